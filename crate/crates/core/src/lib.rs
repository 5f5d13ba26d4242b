//! Discrete complex analysis on black/white triangulated surfaces.

pub mod cli;
pub mod complex;
pub mod dynamics;
pub mod euclid;
pub mod export;
pub mod hyperbolic;
pub mod linalg;
pub mod ops;
pub mod scalar;
