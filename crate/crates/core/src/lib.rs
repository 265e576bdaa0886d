//! Numerical lightcone curvature for spacelike submanifolds of
//! Lorentz-Minkowski space: pointwise invariants, total absolute
//! curvature, height-function critical point counts and lightlike
//! tightness/convexity checks.

pub mod curvature;
pub mod error;
pub mod frames;
pub mod heightfn;
pub mod immersion;
pub mod integrate;
pub mod minkowski;
pub mod par;
pub mod tightness;

pub use error::{Error, Result};
