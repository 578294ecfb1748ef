//! Unit-sphere geometry shared by every transform: directions, their
//! Cartesian form, FOA steering gains and azimuth wrap-around.
//!
//! Angles are radians throughout. Azimuth is measured counter-clockwise from
//! the +x axis in the horizontal plane, elevation upward from that plane.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use crate::error::{Error, Result};

/// Gain of the three dipole channels relative to W.
pub const DIPOLE_GAIN: f64 = 1.732_050_807_568_877_2; // sqrt(3)

/// Reduce an angle to the canonical azimuth interval `[-pi, pi)`.
///
/// Computes `(angle + pi) mod 2pi - pi` with a nonnegative modulus, so `+pi`
/// maps to `-pi`.
pub fn wrap_azimuth(angle: f64) -> f64 {
    if (-PI..PI).contains(&angle) {
        return angle;
    }
    let shifted = (angle + PI).rem_euclid(TAU);
    let wrapped = shifted - PI;
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if wrapped >= PI {
        wrapped - TAU
    } else {
        wrapped
    }
}

/// A direction of arrival on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    azimuth: f64,
    elevation: f64,
}

impl Direction {
    /// Builds a direction, wrapping the azimuth into `[-pi, pi)`.
    ///
    /// Fails when either angle is not finite or the elevation lies outside
    /// `[-pi/2, pi/2]`.
    pub fn new(azimuth: f64, elevation: f64) -> Result<Self> {
        if !azimuth.is_finite() || !elevation.is_finite() {
            return Err(Error::invalid("direction angles must be finite"));
        }
        if elevation.abs() > FRAC_PI_2 {
            return Err(Error::invalid(format!(
                "elevation {elevation} rad outside [-pi/2, pi/2]"
            )));
        }
        Ok(Direction {
            azimuth: wrap_azimuth(azimuth),
            elevation,
        })
    }

    pub fn from_degrees(azimuth_deg: f64, elevation_deg: f64) -> Result<Self> {
        Direction::new(azimuth_deg.to_radians(), elevation_deg.to_radians())
    }

    /// Caller guarantees the invariants already hold.
    pub(crate) const fn new_unchecked(azimuth: f64, elevation: f64) -> Self {
        Direction { azimuth, elevation }
    }

    pub const FRONT: Direction = Direction::new_unchecked(0.0, 0.0);

    pub fn azimuth(&self) -> f64 {
        self.azimuth
    }

    pub fn elevation(&self) -> f64 {
        self.elevation
    }

    pub fn azimuth_deg(&self) -> f64 {
        self.azimuth.to_degrees()
    }

    pub fn elevation_deg(&self) -> f64 {
        self.elevation.to_degrees()
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(az {:.3}°, el {:.3}°)",
            self.azimuth_deg(),
            self.elevation_deg()
        )
    }
}

/// A unit vector in the listener frame (x front, y left, z up).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianDir {
    x: f64,
    y: f64,
    z: f64,
}

impl CartesianDir {
    /// Normalizes `(x, y, z)` to unit length. Fails on a zero or non-finite vector.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm < 1e-300 {
            return Err(Error::invalid("cannot normalize a zero or non-finite vector"));
        }
        Ok(CartesianDir {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    pub(crate) const fn new_unchecked(x: f64, y: f64, z: f64) -> Self {
        CartesianDir { x, y, z }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// Components in `(x, y, z)` order.
    pub fn to_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &CartesianDir) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }
}

/// Per-channel FOA gains for a plane wave from one direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteeringVector {
    pub w: f64,
    pub y: f64,
    pub z: f64,
    pub x: f64,
}

impl SteeringVector {
    /// Gains in file channel order `(W, Y, Z, X)`.
    pub fn to_channel_array(&self) -> [f64; 4] {
        [self.w, self.y, self.z, self.x]
    }
}

pub fn steering_vector(dir: Direction) -> SteeringVector {
    let (sin_az, cos_az) = dir.azimuth.sin_cos();
    let (sin_el, cos_el) = dir.elevation.sin_cos();
    SteeringVector {
        w: 1.0,
        y: DIPOLE_GAIN * sin_az * cos_el,
        z: DIPOLE_GAIN * sin_el,
        x: DIPOLE_GAIN * cos_az * cos_el,
    }
}

pub fn to_cartesian(dir: Direction) -> CartesianDir {
    let (sin_az, cos_az) = dir.azimuth.sin_cos();
    let (sin_el, cos_el) = dir.elevation.sin_cos();
    CartesianDir::new_unchecked(cos_el * cos_az, cos_el * sin_az, sin_el)
}

/// Inverse of [`to_cartesian`]. The input is renormalized first; at the poles
/// the azimuth is 0.
pub fn to_spherical(v: CartesianDir) -> Direction {
    let norm = (v.x * v.x + v.y * v.y + v.z * v.z).sqrt();
    let (x, y, z) = if norm > 0.0 {
        (v.x / norm, v.y / norm, v.z / norm)
    } else {
        (1.0, 0.0, 0.0)
    };
    let horizontal = x.hypot(y);
    let elevation = z.atan2(horizontal);
    let azimuth = if horizontal == 0.0 {
        0.0
    } else {
        wrap_azimuth(y.atan2(x))
    };
    Direction::new_unchecked(azimuth, elevation)
}

/// Great-circle distance in radians, in `[0, pi]`.
///
/// Evaluated as `atan2(|a x b|, a . b)`, which equals the arccos of the
/// clamped dot product but stays accurate for nearly equal directions.
pub fn angular_distance(a: Direction, b: Direction) -> f64 {
    let (u, v) = (to_cartesian(a).to_array(), to_cartesian(b).to_array());
    let cross = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    let sin = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    let cos = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    sin.atan2(cos)
}
