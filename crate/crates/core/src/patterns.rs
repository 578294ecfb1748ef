//! The sixteen discrete FOA transforms: eight planar rotations/reflections
//! about the z axis, each with or without a flip of the horizontal plane.
//!
//! Every pattern is a channel-level signed permutation of `(X, Y, Z)` paired
//! with the label map `azimuth' = s·azimuth + δ`, `elevation' = e·elevation`.
//! The channel table below is derived from the steering vectors and checked
//! against the scene encoder in tests.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{wrap_azimuth, Direction};
use crate::rotation::Rotation3;
use crate::signal::{check_span, FoaSignal, LabelTrack};

/// One of the 16 patterns.
///
/// `azimuth_code` packs the azimuth sign and offset: codes 0..=3 keep the
/// sign, 4..=7 negate it; `code % 4` selects the offset 0, +90°, +180°, −90°.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternId {
    azimuth_code: u8,
    elevation_flip: bool,
}

const OFFSETS_DEG: [i32; 4] = [0, 90, 180, -90];

impl PatternId {
    pub const IDENTITY: PatternId = PatternId {
        azimuth_code: 0,
        elevation_flip: false,
    };

    pub fn new(azimuth_code: u8, elevation_flip: bool) -> Result<Self> {
        if azimuth_code > 7 {
            return Err(Error::invalid(format!("azimuth code {azimuth_code} not in 0..=7")));
        }
        Ok(PatternId {
            azimuth_code,
            elevation_flip,
        })
    }

    /// Dense index in `0..16`; 0 is the identity.
    pub fn index(&self) -> usize {
        self.azimuth_code as usize + if self.elevation_flip { 8 } else { 0 }
    }

    pub fn from_index(index: usize) -> Result<Self> {
        if index >= 16 {
            return Err(Error::invalid(format!("pattern index {index} not in 0..16")));
        }
        Ok(PatternId {
            azimuth_code: (index % 8) as u8,
            elevation_flip: index >= 8,
        })
    }

    pub fn all() -> [PatternId; 16] {
        std::array::from_fn(|i| PatternId::from_index(i).unwrap())
    }

    /// Uniform over all 16 patterns, identity included.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> PatternId {
        PatternId::from_index(rng.random_range(0..16)).unwrap()
    }

    pub fn azimuth_code(&self) -> u8 {
        self.azimuth_code
    }

    pub fn elevation_flip(&self) -> bool {
        self.elevation_flip
    }

    /// Azimuth sign `s`.
    pub fn azimuth_sign(&self) -> i8 {
        if self.azimuth_code < 4 {
            1
        } else {
            -1
        }
    }

    pub fn azimuth_offset_deg(&self) -> i32 {
        OFFSETS_DEG[(self.azimuth_code % 4) as usize]
    }

    /// Azimuth offset `δ` in radians.
    pub fn azimuth_offset(&self) -> f64 {
        match self.azimuth_code % 4 {
            0 => 0.0,
            1 => FRAC_PI_2,
            2 => PI,
            _ => -FRAC_PI_2,
        }
    }

    /// Elevation sign `e`.
    pub fn elevation_sign(&self) -> i8 {
        if self.elevation_flip {
            -1
        } else {
            1
        }
    }
}

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = |s: i8| if s > 0 { '+' } else { '-' };
        let offset = match self.azimuth_offset_deg() {
            0 => "0".to_string(),
            d => format!("{d:+}"),
        };
        write!(
            f,
            "s{}d{}e{}",
            sign(self.azimuth_sign()),
            offset,
            sign(self.elevation_sign())
        )
    }
}

impl FromStr for PatternId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("malformed pattern id {s:?}"));
        let rest = s.strip_prefix('s').ok_or_else(bad)?;
        let mut chars = rest.chars();
        let negate = match chars.next() {
            Some('+') => false,
            Some('-') => true,
            _ => return Err(bad()),
        };
        let rest = chars.as_str().strip_prefix('d').ok_or_else(bad)?;
        let (offset, rest) = rest.split_once('e').ok_or_else(bad)?;
        let slot = match offset {
            "0" => 0,
            "+90" => 1,
            "+180" => 2,
            "-90" => 3,
            _ => return Err(bad()),
        };
        let flip = match rest {
            "+" => false,
            "-" => true,
            _ => return Err(bad()),
        };
        PatternId::new(slot + if negate { 4 } else { 0 }, flip)
    }
}

/// A 3×3 matrix with exactly one ±1 per row and column, acting on `(X, Y, Z)`.
///
/// Row `i` reads `out[i] = signs[i] * v[source[i]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignedPermutation3 {
    source: [usize; 3],
    signs: [i8; 3],
}

impl SignedPermutation3 {
    pub const IDENTITY: SignedPermutation3 = SignedPermutation3 {
        source: [0, 1, 2],
        signs: [1, 1, 1],
    };

    pub fn new(source: [usize; 3], signs: [i8; 3]) -> Result<Self> {
        let mut seen = [false; 3];
        for &s in &source {
            if s > 2 || std::mem::replace(&mut seen[s], true) {
                return Err(Error::invalid("source indices must be a permutation of 0..3"));
            }
        }
        if signs.iter().any(|s| s.abs() != 1) {
            return Err(Error::invalid("signs must be +1 or -1"));
        }
        Ok(SignedPermutation3 { source, signs })
    }

    pub fn matrix(&self) -> [[i8; 3]; 3] {
        let mut m = [[0i8; 3]; 3];
        for i in 0..3 {
            m[i][self.source[i]] = self.signs[i];
        }
        m
    }

    pub fn determinant(&self) -> i8 {
        let m = self.matrix();
        let det = m[0][0] as i32 * (m[1][1] as i32 * m[2][2] as i32 - m[1][2] as i32 * m[2][1] as i32)
            - m[0][1] as i32 * (m[1][0] as i32 * m[2][2] as i32 - m[1][2] as i32 * m[2][0] as i32)
            + m[0][2] as i32 * (m[1][0] as i32 * m[2][1] as i32 - m[1][1] as i32 * m[2][0] as i32);
        det as i8
    }

    pub fn transpose(&self) -> SignedPermutation3 {
        let mut source = [0; 3];
        let mut signs = [1; 3];
        for i in 0..3 {
            source[self.source[i]] = i;
            signs[self.source[i]] = self.signs[i];
        }
        SignedPermutation3 { source, signs }
    }

    /// Exact: only moves and negates components.
    #[inline]
    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        std::array::from_fn(|i| {
            let c = v[self.source[i]];
            if self.signs[i] < 0 {
                -c
            } else {
                c
            }
        })
    }

    pub fn to_rotation(&self) -> Rotation3 {
        let m = self.matrix();
        Rotation3::from_rows_unchecked(m.map(|row| row.map(f64::from)))
    }
}

impl Mul for SignedPermutation3 {
    type Output = SignedPermutation3;

    /// Matrix product: `(a * b).apply(v) == a.apply(b.apply(v))`.
    fn mul(self, rhs: SignedPermutation3) -> SignedPermutation3 {
        let source = std::array::from_fn(|i| rhs.source[self.source[i]]);
        let signs = std::array::from_fn(|i| self.signs[i] * rhs.signs[self.source[i]]);
        SignedPermutation3 { source, signs }
    }
}

pub fn pattern_label_map(p: PatternId, d: Direction) -> Direction {
    let azimuth = if p.azimuth_sign() < 0 {
        -d.azimuth()
    } else {
        d.azimuth()
    };
    let azimuth = if p.azimuth_code.is_multiple_of(4) {
        wrap_azimuth(azimuth)
    } else {
        wrap_azimuth(azimuth + p.azimuth_offset())
    };
    let elevation = if p.elevation_flip {
        -d.elevation()
    } else {
        d.elevation()
    };
    Direction::new_unchecked(azimuth, elevation)
}

const X: usize = 0;
const Y: usize = 1;
const Z: usize = 2;

/// Channel transform for `p`, as `(X', Y', Z')` in terms of `(X, Y, Z)`.
pub fn pattern_channel_matrix(p: PatternId) -> SignedPermutation3 {
    let e = p.elevation_sign();
    let ((sx, sgx), (sy, sgy)) = match (p.azimuth_sign(), p.azimuth_offset_deg()) {
        // azimuth + δ
        (1, 0) => ((X, 1), (Y, 1)),
        (1, 90) => ((Y, -1), (X, 1)),
        (1, 180) => ((X, -1), (Y, -1)),
        (1, -90) => ((Y, 1), (X, -1)),
        // -azimuth + δ
        (_, 0) => ((X, 1), (Y, -1)),
        (_, 90) => ((Y, 1), (X, 1)),
        (_, 180) => ((X, -1), (Y, 1)),
        (_, _) => ((Y, -1), (X, -1)),
    };
    SignedPermutation3 {
        source: [sx, sy, Z],
        signs: [sgx, sgy, e],
    }
}

/// Applies pattern `p` to every sample and every label. W is copied as is.
pub fn apply_pattern(
    sig: &FoaSignal,
    labels: &LabelTrack,
    p: PatternId,
) -> Result<(FoaSignal, LabelTrack)> {
    check_span(sig, labels)?;
    let m = pattern_channel_matrix(p);
    let out = sig.map_xyz(|_, v| m.apply(v));
    let out_labels = labels.map_directions(|d| pattern_label_map(p, d));
    Ok((out, out_labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::to_cartesian;
    use std::collections::HashSet;

    fn deg(az: f64, el: f64) -> Direction {
        Direction::from_degrees(az, el).unwrap()
    }

    fn pid(s: &str) -> PatternId {
        s.parse().unwrap()
    }

    #[test]
    fn id_strings_round_trip() {
        let names: HashSet<String> = PatternId::all().iter().map(|p| p.to_string()).collect();
        assert_eq!(names.len(), 16);
        for p in PatternId::all() {
            assert_eq!(p.to_string().parse::<PatternId>().unwrap(), p);
        }
        assert_eq!(PatternId::IDENTITY.to_string(), "s+d0e+");
        assert_eq!(pid("s-d-90e-").azimuth_offset_deg(), -90);
        assert!("s+d+45e+".parse::<PatternId>().is_err());
        assert!("x+d0e+".parse::<PatternId>().is_err());
    }

    #[test]
    fn label_map_examples() {
        let d = deg(37.0, -12.0);
        assert_eq!(pattern_label_map(PatternId::IDENTITY, d), d);

        let out = pattern_label_map(pid("s+d+180e+"), deg(170.0, 5.0));
        assert!((out.azimuth_deg() + 10.0).abs() < 1e-9);

        let out = pattern_label_map(pid("s-d+90e-"), deg(30.0, 20.0));
        assert!((out.azimuth_deg() - 60.0).abs() < 1e-9);
        assert!((out.elevation_deg() + 20.0).abs() < 1e-12);
    }

    #[test]
    fn channel_matrix_examples() {
        assert_eq!(pattern_channel_matrix(PatternId::IDENTITY), SignedPermutation3::IDENTITY);
        // (φ+π/2, θ): X' = -Y, Y' = X
        assert_eq!(
            pattern_channel_matrix(pid("s+d+90e+")).matrix(),
            [[0, -1, 0], [1, 0, 0], [0, 0, 1]]
        );
        // (−φ, −θ): Y' = -Y, Z' = -Z
        assert_eq!(
            pattern_channel_matrix(pid("s-d0e-")).matrix(),
            [[1, 0, 0], [0, -1, 0], [0, 0, -1]]
        );
    }

    /// Independent route: the block `Rot(δ)·diag(1, s)` with integer trig.
    #[test]
    fn table_matches_planar_derivation() {
        for p in PatternId::all() {
            let (c, s) = match p.azimuth_offset_deg() {
                0 => (1, 0),
                90 => (0, 1),
                180 => (-1, 0),
                _ => (0, -1),
            };
            let sign = p.azimuth_sign();
            let expected = [
                [c, -s * sign, 0],
                [s, c * sign, 0],
                [0, 0, p.elevation_sign()],
            ];
            assert_eq!(pattern_channel_matrix(p).matrix(), expected, "pattern {p}");
        }
    }

    /// The `Swap(a, b)` shorthand (`X' <- b, Y' <- a`) in a commonly quoted
    /// form of this table disagrees with the geometry in exactly these cells.
    #[test]
    fn swap_shorthand_disagreements() {
        // Swap(a, b) with a = sa·X, b = sb·Y  =>  X' = sb·Y, Y' = sa·X
        let swap = |sa: i8, sb: i8| [[0, sb, 0], [sa, 0, 0]];
        let plain = |sx: i8, sy: i8| [[sx, 0, 0], [0, sy, 0]];
        // (name, θ-row literal, −θ-row literal)
        let literal = [
            ("s+d-90", swap(-1, 1), swap(-1, 1)),
            ("s+d0", plain(1, 1), plain(1, 1)),
            ("s+d+90", swap(1, -1), swap(1, -1)),
            ("s+d+180", swap(-1, -1), swap(-1, -1)),
            ("s-d-90", swap(1, -1), swap(-1, -1)),
            ("s-d0", plain(1, -1), plain(1, -1)),
            ("s-d+90", swap(1, 1), swap(1, 1)),
            ("s-d+180", plain(-1, 1), plain(-1, 1)),
        ];
        let mut mismatches = Vec::new();
        for (name, up, down) in literal {
            for (suffix, cell) in [("e+", up), ("e-", down)] {
                let id = pid(&format!("{name}{suffix}"));
                let m = pattern_channel_matrix(id).matrix();
                if m[0] != cell[0] || m[1] != cell[1] {
                    mismatches.push(id.to_string());
                }
            }
        }
        assert_eq!(mismatches, ["s+d+180e+", "s+d+180e-", "s-d-90e+"]);
    }

    #[test]
    fn group_of_order_sixteen() {
        let mats: Vec<_> = PatternId::all().iter().map(|&p| pattern_channel_matrix(p)).collect();
        let set: HashSet<_> = mats.iter().copied().collect();
        assert_eq!(set.len(), 16);
        for &a in &mats {
            assert!(a.determinant().abs() == 1);
            assert_eq!(a * a.transpose(), SignedPermutation3::IDENTITY);
            for &b in &mats {
                assert!(set.contains(&(a * b)));
            }
        }
    }

    #[test]
    fn product_matches_composition() {
        let v = [0.3, -1.7, 2.9];
        for p in PatternId::all() {
            for q in PatternId::all() {
                let a = pattern_channel_matrix(p);
                let b = pattern_channel_matrix(q);
                assert_eq!((a * b).apply(v), a.apply(b.apply(v)));
            }
        }
    }

    #[test]
    fn labels_and_channels_agree_on_the_sphere() {
        for p in PatternId::all() {
            for az in (-18..18).map(|k| k as f64 * 10.0 + 3.0) {
                for el in [-80.0, -40.0, -7.0, 0.0, 25.0, 89.0] {
                    let d = deg(az, el);
                    let lhs = pattern_channel_matrix(p).apply(to_cartesian(d).to_array());
                    let rhs = to_cartesian(pattern_label_map(p, d)).to_array();
                    for k in 0..3 {
                        assert!((lhs[k] - rhs[k]).abs() < 1e-12, "{p} {d}");
                    }
                }
            }
        }
    }

    #[test]
    fn signed_permutation_validation() {
        assert!(SignedPermutation3::new([0, 0, 1], [1, 1, 1]).is_err());
        assert!(SignedPermutation3::new([0, 1, 2], [1, 0, 1]).is_err());
        assert!(SignedPermutation3::new([2, 0, 1], [-1, 1, 1]).is_ok());
    }
}
