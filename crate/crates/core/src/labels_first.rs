//! Labels-first augmentation: choose the new labels, then rotate the
//! channels to match.
//!
//! The azimuth shift is one rotation about z shared by every sample. The
//! elevation shift is a Rodrigues rotation about a horizontal axis
//! perpendicular to each frame's (already shifted) azimuth, so it only works
//! when each frame carries at most one source.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{wrap_azimuth, CartesianDir, Direction};
use crate::rotation::Rotation3;
use crate::signal::{check_span, FoaSignal, LabelEntry, LabelTrack};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElevationMode {
    /// `range_min..range_max` are the dataset's elevation limits; β is drawn so
    /// shifted labels stay inside them.
    LabelRange,
    /// `range_min..range_max` is the β interval itself.
    FixedRange,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElevationRangePolicy {
    mode: ElevationMode,
    range_min: f64,
    range_max: f64,
}

impl ElevationRangePolicy {
    pub fn new(mode: ElevationMode, range_min: f64, range_max: f64) -> Result<Self> {
        if !(range_min.is_finite() && range_max.is_finite()) || range_min > range_max {
            return Err(Error::invalid(format!(
                "elevation range ({range_min}, {range_max}) must be finite and ordered"
            )));
        }
        if mode == ElevationMode::LabelRange && (range_min < -FRAC_PI_2 || range_max > FRAC_PI_2) {
            return Err(Error::invalid("label elevation limits must lie within ±90°"));
        }
        Ok(ElevationRangePolicy {
            mode,
            range_min,
            range_max,
        })
    }

    pub fn label_range(min: f64, max: f64) -> Result<Self> {
        Self::new(ElevationMode::LabelRange, min, max)
    }

    pub fn fixed_range(min: f64, max: f64) -> Result<Self> {
        Self::new(ElevationMode::FixedRange, min, max)
    }

    pub fn mode(&self) -> ElevationMode {
        self.mode
    }

    pub fn range_min(&self) -> f64 {
        self.range_min
    }

    pub fn range_max(&self) -> f64 {
        self.range_max
    }
}

/// The random angles of one labels-first call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelsFirstDraw {
    /// Azimuth shift in `[0, 2π)`.
    pub alpha: f64,
    /// Elevation shift.
    pub beta: f64,
}

/// Rotation by `alpha` about the z axis.
pub fn azimuth_rotation_matrix(alpha: f64) -> Rotation3 {
    let (s, c) = alpha.sin_cos();
    Rotation3::from_rows_unchecked([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
}

/// Horizontal unit axis about which a positive rotation raises the elevation
/// of a source at azimuth `phi_prime`: the azimuth direction turned by −90°.
pub fn elevation_axis(phi_prime: f64) -> CartesianDir {
    let (s, c) = phi_prime.sin_cos();
    CartesianDir::new_unchecked(s, -c, 0.0)
}

/// Rotation of `v` by `beta` about the unit axis `u`.
pub fn rodrigues_rotate(v: [f64; 3], u: CartesianDir, beta: f64) -> [f64; 3] {
    AxisRotation::new(u, beta).apply(v)
}

/// Rodrigues' formula with `cos β`, `sin β` precomputed.
#[derive(Debug, Clone, Copy)]
struct AxisRotation {
    u: [f64; 3],
    cos: f64,
    sin: f64,
}

impl AxisRotation {
    fn new(axis: CartesianDir, beta: f64) -> Self {
        let (sin, cos) = beta.sin_cos();
        AxisRotation {
            u: axis.to_array(),
            cos,
            sin,
        }
    }

    #[inline]
    fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let u = &self.u;
        let cross = [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ];
        let along = (u[0] * v[0] + u[1] * v[1] + u[2] * v[2]) * (1.0 - self.cos);
        std::array::from_fn(|i| v[i] * self.cos + cross[i] * self.sin + u[i] * along)
    }
}

/// Draws the elevation shift β according to `policy`.
///
/// In label-range mode the interval is `(min − m_e, max − M_e)` where `m_e`,
/// `M_e` are the extreme label elevations; an empty interval yields 0.
pub fn select_beta<R: Rng + ?Sized>(
    labels: &LabelTrack,
    policy: &ElevationRangePolicy,
    rng: &mut R,
) -> Result<f64> {
    let (lo, hi) = match policy.mode {
        ElevationMode::FixedRange => (policy.range_min, policy.range_max),
        ElevationMode::LabelRange => {
            let (min_el, max_el) = labels
                .directions()
                .map(|d| d.elevation())
                .fold(None, |acc: Option<(f64, f64)>, el| match acc {
                    None => Some((el, el)),
                    Some((lo, hi)) => Some((lo.min(el), hi.max(el))),
                })
                .ok_or(Error::NoActiveFrames)?;
            (policy.range_min - min_el, policy.range_max - max_el)
        }
    };
    if !(hi > lo) {
        return Ok(0.0);
    }
    Ok(rng.random_range(lo..hi))
}

/// Labels-first augmentation with freshly drawn `α` and `β`.
pub fn apply_labels_first<R: Rng + ?Sized>(
    sig: &FoaSignal,
    labels: &LabelTrack,
    policy: &ElevationRangePolicy,
    rng: &mut R,
) -> Result<(FoaSignal, LabelTrack, LabelsFirstDraw)> {
    check_span(sig, labels)?;
    check_single_source(labels)?;
    let alpha = rng.random_range(0.0..TAU);
    let beta = select_beta(labels, policy, rng)?;
    let draw = LabelsFirstDraw { alpha, beta };
    let (out, out_labels) = apply_labels_first_with_draw(sig, labels, policy, draw)?;
    Ok((out, out_labels, draw))
}

/// Labels-first augmentation with caller-chosen angles.
///
/// In label-range mode the shifted elevations are clamped to the policy
/// limits so rounding never pushes them outside. An elevation carried past a
/// pole (possible in fixed-range mode) folds over it, turning the azimuth by
/// 180°, which is where the rotated channels point.
pub fn apply_labels_first_with_draw(
    sig: &FoaSignal,
    labels: &LabelTrack,
    policy: &ElevationRangePolicy,
    draw: LabelsFirstDraw,
) -> Result<(FoaSignal, LabelTrack)> {
    check_span(sig, labels)?;
    check_single_source(labels)?;
    let LabelsFirstDraw { alpha, beta } = draw;

    let mut frames = Vec::with_capacity(labels.len());
    let mut axes: Vec<Option<AxisRotation>> = Vec::with_capacity(labels.len());
    for frame in labels.frames() {
        match frame.first() {
            None => {
                frames.push(Vec::new());
                axes.push(None);
            }
            Some(entry) => {
                let azimuth = wrap_azimuth(entry.direction.azimuth() + alpha);
                axes.push(Some(AxisRotation::new(elevation_axis(azimuth), beta)));
                let elevation = entry.direction.elevation() + beta;
                let direction = shifted_direction(azimuth, elevation, policy);
                frames.push(vec![LabelEntry {
                    source_id: entry.source_id,
                    direction,
                }]);
            }
        }
    }

    let rz = azimuth_rotation_matrix(alpha);
    let hop = sig.hop_samples(labels.frame_hop());
    let out = sig.map_xyz(|t, v| {
        let v = rz.apply(v);
        match axes.get(t / hop) {
            Some(Some(rotation)) => rotation.apply(v),
            _ => v,
        }
    });
    Ok((out, LabelTrack::new(labels.frame_hop(), frames)?))
}

fn shifted_direction(azimuth: f64, elevation: f64, policy: &ElevationRangePolicy) -> Direction {
    if policy.mode == ElevationMode::LabelRange {
        let elevation = elevation.clamp(policy.range_min, policy.range_max);
        return Direction::new_unchecked(azimuth, elevation);
    }
    // fold over the pole; β beyond ±180° wraps first
    let elevation = wrap_azimuth(elevation);
    if elevation > FRAC_PI_2 {
        Direction::new_unchecked(wrap_azimuth(azimuth + PI), PI - elevation)
    } else if elevation < -FRAC_PI_2 {
        Direction::new_unchecked(wrap_azimuth(azimuth + PI), -PI - elevation)
    } else {
        Direction::new_unchecked(azimuth, elevation)
    }
}

fn check_single_source(labels: &LabelTrack) -> Result<()> {
    match labels.frames().iter().enumerate().find(|(_, f)| f.len() > 1) {
        Some((frame, f)) => Err(Error::OverlapUnsupported {
            frame,
            count: f.len(),
        }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::to_cartesian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn deg(az: f64, el: f64) -> Direction {
        Direction::from_degrees(az, el).unwrap()
    }

    fn track(els_deg: &[f64]) -> LabelTrack {
        let frames = els_deg
            .iter()
            .map(|&el| {
                vec![LabelEntry {
                    source_id: 1,
                    direction: deg(10.0, el),
                }]
            })
            .collect();
        LabelTrack::new(0.02, frames).unwrap()
    }

    fn close(a: [f64; 3], b: [f64; 3], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn rz_examples() {
        assert_eq!(azimuth_rotation_matrix(0.0), Rotation3::IDENTITY);
        let m = azimuth_rotation_matrix(FRAC_PI_2).rows();
        let expected = [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]];
        for i in 0..3 {
            assert!(close(m[i], expected[i], 1e-15));
        }
        for k in 0..50 {
            let phi = -3.0 + 0.13 * k as f64;
            let alpha = 0.77 * k as f64;
            let got = azimuth_rotation_matrix(alpha).apply([phi.cos(), phi.sin(), 0.0]);
            let want = [(phi + alpha).cos(), (phi + alpha).sin(), 0.0];
            assert!(close(got, want, 1e-12));
        }
    }

    #[test]
    fn axis_examples() {
        assert!(close(elevation_axis(0.0).to_array(), [0.0, -1.0, 0.0], 1e-15));
        assert!(close(elevation_axis(FRAC_PI_2).to_array(), [1.0, 0.0, 0.0], 1e-15));
        for k in 0..40 {
            let phi = -PI + 0.157 * k as f64;
            let u = elevation_axis(phi).to_array();
            assert_eq!(u[2], 0.0);
            assert!((u[0] * phi.cos() + u[1] * phi.sin()).abs() < 1e-15);
            assert!((u[0].hypot(u[1]) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rodrigues_examples() {
        let u = elevation_axis(0.0);
        let v = [0.4, -2.0, 1.1];
        assert_eq!(rodrigues_rotate(v, u, 0.0), v);
        let along = [0.0, -3.0, 0.0];
        assert!(close(rodrigues_rotate(along, u, 1.234), along, 1e-15));
        assert!(close(rodrigues_rotate([1.0, 0.0, 0.0], u, FRAC_PI_2), [0.0, 0.0, 1.0], 1e-15));
    }

    #[test]
    fn rodrigues_raises_elevation_by_beta() {
        for k in 0..30 {
            let d = deg(-170.0 + 11.0 * k as f64, -40.0 + 2.5 * k as f64);
            let beta = (-20.0 + 1.3 * k as f64).to_radians();
            let u = elevation_axis(d.azimuth());
            let got = rodrigues_rotate(to_cartesian(d).to_array(), u, beta);
            let want = to_cartesian(Direction::new(d.azimuth(), d.elevation() + beta).unwrap());
            assert!(close(got, want.to_array(), 1e-12));
        }
    }

    #[test]
    fn beta_degenerate_interval_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let policy = ElevationRangePolicy::label_range(-40f64.to_radians(), 40f64.to_radians()).unwrap();
        assert_eq!(select_beta(&track(&[-40.0, 0.0, 40.0]), &policy, &mut rng).unwrap(), 0.0);
        // labels already beyond the limits: empty interval
        let wide = ElevationRangePolicy::label_range(-10f64.to_radians(), 10f64.to_radians()).unwrap();
        assert_eq!(select_beta(&track(&[-30.0, 30.0]), &wide, &mut rng).unwrap(), 0.0);
    }

    #[test]
    fn beta_label_range_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let policy = ElevationRangePolicy::label_range(-40f64.to_radians(), 40f64.to_radians()).unwrap();
        let labels = track(&[-10.0, 5.0, 30.0]);
        for _ in 0..500 {
            let b = select_beta(&labels, &policy, &mut rng).unwrap().to_degrees();
            assert!((-30.0 - 1e-9..10.0 + 1e-9).contains(&b), "{b}");
        }
    }

    #[test]
    fn beta_fixed_range_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let policy = ElevationRangePolicy::fixed_range(-20f64.to_radians(), 20f64.to_radians()).unwrap();
        let empty = LabelTrack::inactive(0.02, 4).unwrap();
        for _ in 0..500 {
            let b = select_beta(&empty, &policy, &mut rng).unwrap().to_degrees();
            assert!((-20.0..20.0 + 1e-9).contains(&b));
        }
    }

    #[test]
    fn beta_needs_active_frames_in_label_mode() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let policy = ElevationRangePolicy::label_range(-0.5, 0.5).unwrap();
        let empty = LabelTrack::inactive(0.02, 4).unwrap();
        assert!(matches!(select_beta(&empty, &policy, &mut rng), Err(Error::NoActiveFrames)));
    }

    #[test]
    fn policy_validation() {
        assert!(ElevationRangePolicy::label_range(0.5, -0.5).is_err());
        assert!(ElevationRangePolicy::label_range(-2.0, 0.0).is_err());
        assert!(ElevationRangePolicy::fixed_range(-2.0, 2.0).is_ok());
    }

    #[test]
    fn overlap_is_rejected() {
        let e = |id| LabelEntry {
            source_id: id,
            direction: Direction::FRONT,
        };
        let labels = LabelTrack::new(0.5, vec![vec![e(1)], vec![e(1), e(2)]]).unwrap();
        let sig = FoaSignal::silent(10, 10).unwrap();
        let policy = ElevationRangePolicy::fixed_range(0.0, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            apply_labels_first(&sig, &labels, &policy, &mut rng),
            Err(Error::OverlapUnsupported { frame: 1, count: 2 })
        ));
    }

    #[test]
    fn azimuth_wraps_past_180() {
        let labels = LabelTrack::new(
            0.5,
            vec![vec![LabelEntry {
                source_id: 0,
                direction: deg(170.0, 0.0),
            }]],
        )
        .unwrap();
        let sig = FoaSignal::silent(10, 5).unwrap();
        let policy = ElevationRangePolicy::fixed_range(0.0, 0.0).unwrap();
        let draw = LabelsFirstDraw {
            alpha: 30f64.to_radians(),
            beta: 0.0,
        };
        let (_, out) = apply_labels_first_with_draw(&sig, &labels, &policy, draw).unwrap();
        assert!((out.frames()[0][0].direction.azimuth_deg() + 160.0).abs() < 1e-9);
    }

    #[test]
    fn fixed_range_folds_over_pole() {
        let policy = ElevationRangePolicy::fixed_range(-1.0, 1.0).unwrap();
        let d = shifted_direction(0.0, 100f64.to_radians(), &policy);
        assert!((d.elevation_deg() - 80.0).abs() < 1e-9);
        assert!((d.azimuth_deg() + 180.0).abs() < 1e-9);
    }
}
