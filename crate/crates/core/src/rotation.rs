//! 3×3 orthonormal matrices acting on `(X, Y, Z)` channel triples and on
//! Cartesian label vectors.

use std::ops::Mul;

use crate::error::{Error, Result};
use crate::geometry::{to_cartesian, to_spherical, CartesianDir, Direction};

/// Orthonormality tolerance, per entry of `R·Rᵀ − I` and on `|det R| − 1`.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation3 {
    m: [[f64; 3]; 3],
}

impl Rotation3 {
    pub const IDENTITY: Rotation3 = Rotation3 {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    /// Checks orthonormality within [`ORTHONORMAL_TOL`].
    pub fn from_rows(m: [[f64; 3]; 3]) -> Result<Self> {
        let r = Rotation3 { m };
        if !m.iter().flatten().all(|v| v.is_finite()) {
            return Err(Error::invalid("matrix has non-finite entries"));
        }
        if r.orthonormality_error() > ORTHONORMAL_TOL
            || (r.determinant().abs() - 1.0).abs() > ORTHONORMAL_TOL
        {
            return Err(Error::invalid("matrix is not orthonormal"));
        }
        Ok(r)
    }

    pub(crate) const fn from_rows_unchecked(m: [[f64; 3]; 3]) -> Self {
        Rotation3 { m }
    }

    pub fn rows(&self) -> [[f64; 3]; 3] {
        self.m
    }

    /// Row-major entries.
    pub fn to_row_major(&self) -> [f64; 9] {
        let m = &self.m;
        [
            m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2], m[2][0], m[2][1], m[2][2],
        ]
    }

    pub fn transpose(&self) -> Rotation3 {
        let m = &self.m;
        Rotation3 {
            m: [
                [m[0][0], m[1][0], m[2][0]],
                [m[0][1], m[1][1], m[2][1]],
                [m[0][2], m[1][2], m[2][2]],
            ],
        }
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// `max |(R·Rᵀ − I)_ij|`.
    pub fn orthonormality_error(&self) -> f64 {
        let p = *self * self.transpose();
        let mut worst = 0.0f64;
        for (i, row) in p.m.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }

    #[inline]
    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.m;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    /// Maps a direction through `R` in Cartesian coordinates.
    pub fn apply_direction(&self, d: Direction) -> Direction {
        let [x, y, z] = self.apply(to_cartesian(d).to_array());
        to_spherical(CartesianDir::new_unchecked(x, y, z))
    }
}

impl Mul for Rotation3 {
    type Output = Rotation3;

    fn mul(self, rhs: Rotation3) -> Rotation3 {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.m[i][k] * rhs.m[k][j]).sum();
            }
        }
        Rotation3 { m: out }
    }
}
