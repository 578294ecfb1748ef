//! Spatial data augmentation for first-order Ambisonics (FOA) recordings.
//!
//! Rotations and reflections of the `(X, Y, Z)` channels move every sound
//! source in a predictable way, so the direction-of-arrival labels can be
//! transformed alongside the audio. Three methods are provided:
//!
//! - [`patterns`]: 16 exact channel swaps/negations (8 azimuth maps × z flip).
//! - [`labels_first`]: pick an azimuth and elevation shift, then rotate with a
//!   z-axis rotation and Rodrigues' formula. One source per frame.
//! - [`channels_first`]: a random orthonormal matrix from Gram-Schmidt, labels
//!   mapped through Cartesian coordinates. Any number of sources.
//!
//! [`scene`] encodes synthetic scenes from steering vectors and [`doa`]
//! estimates directions from the intensity vector; both serve as independent
//! checks of the augmentations.
//!
//! Channels are stored in ACN order `(W, Y, Z, X)`. Angles are radians in
//! memory and degrees in files.

// `!(x > 0.0)` comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod augment;
pub mod channels_first;
pub mod cli;
pub mod doa;
pub mod error;
pub mod geometry;
pub mod io;
pub mod labels_first;
pub mod patterns;
pub mod rotation;
pub mod scene;
pub mod signal;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{
    angular_distance, steering_vector, to_cartesian, to_spherical, wrap_azimuth, CartesianDir,
    Direction, SteeringVector,
};
pub use rotation::Rotation3;
pub use signal::{check_span, Channel, FoaSignal, LabelEntry, LabelTrack};
