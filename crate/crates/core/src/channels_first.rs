//! Channels-first augmentation: a random orthonormal matrix (rotation or
//! rotoreflection) applied to `(X, Y, Z)`, with labels carried through
//! Cartesian coordinates on the unit sphere. Works for any number of
//! overlapping sources.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rotation::{Rotation3, ORTHONORMAL_TOL};
use crate::signal::{check_span, FoaSignal, LabelTrack};

/// A column whose norm after projection falls below this is treated as
/// linearly dependent.
pub const DEGENERATE_COLUMN_NORM: f64 = 1e-8;

pub const MAX_DRAW_ATTEMPTS: usize = 100;

/// Orthonormalizes the columns of `m` with modified Gram-Schmidt, projecting
/// each column twice against the columns already produced.
///
/// Returns `None` when a column is (numerically) dependent on the previous ones.
pub fn gram_schmidt(m: [[f64; 3]; 3]) -> Option<Rotation3> {
    let columns: [[f64; 3]; 3] = std::array::from_fn(|j| std::array::from_fn(|i| m[i][j]));
    let mut basis: Vec<[f64; 3]> = Vec::with_capacity(3);
    for mut v in columns {
        for _ in 0..2 {
            for q in &basis {
                let proj = dot(q, &v);
                for (vk, qk) in v.iter_mut().zip(q) {
                    *vk -= proj * qk;
                }
            }
        }
        let norm = dot(&v, &v).sqrt();
        if !(norm >= DEGENERATE_COLUMN_NORM) {
            return None;
        }
        basis.push(v.map(|c| c / norm));
    }
    let rows = std::array::from_fn(|i| std::array::from_fn(|j| basis[j][i]));
    Rotation3::from_rows(rows).ok()
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Gram-Schmidt of a matrix with i.i.d. standard normal entries.
///
/// Degenerate draws are redrawn; after [`MAX_DRAW_ATTEMPTS`] failures the
/// call returns `RngFailure`. The output is orthonormal but not Haar-uniform.
pub fn random_orthonormal<R: Rng + ?Sized>(rng: &mut R) -> Result<Rotation3> {
    orthonormalize_draws(|| std::array::from_fn(|_| std::array::from_fn(|_| rng.sample(StandardNormal))))
}

fn orthonormalize_draws(mut draw: impl FnMut() -> [[f64; 3]; 3]) -> Result<Rotation3> {
    for _ in 0..MAX_DRAW_ATTEMPTS {
        if let Some(r) = gram_schmidt(draw()) {
            debug_assert!(r.orthonormality_error() <= ORTHONORMAL_TOL);
            return Ok(r);
        }
    }
    Err(Error::RngFailure(MAX_DRAW_ATTEMPTS))
}

pub fn transform_labels(r: &Rotation3, labels: &LabelTrack) -> LabelTrack {
    labels.map_directions(|d| r.apply_direction(d))
}

/// Channels-first augmentation with a freshly drawn matrix.
pub fn apply_channels_first<R: Rng + ?Sized>(
    sig: &FoaSignal,
    labels: &LabelTrack,
    rng: &mut R,
) -> Result<(FoaSignal, LabelTrack, Rotation3)> {
    check_span(sig, labels)?;
    let r = random_orthonormal(rng)?;
    let (out, out_labels) = apply_rotation(sig, labels, &r)?;
    Ok((out, out_labels, r))
}

/// Applies a caller-supplied orthonormal matrix to channels and labels.
pub fn apply_rotation(
    sig: &FoaSignal,
    labels: &LabelTrack,
    r: &Rotation3,
) -> Result<(FoaSignal, LabelTrack)> {
    check_span(sig, labels)?;
    let out = sig.map_xyz(|_, v| r.apply(v));
    Ok((out, transform_labels(r, labels)))
}
