//! Exact linear algebra over the integers and over chain rings.
//!
//! [`int`] holds Smith/Hermite normal forms and rational solving over `Z`;
//! [`zn`] holds scalar arithmetic in `Z/p^m`; [`chain`] holds Howell normal
//! forms, kernels, affine solving and layered lifting over any chain ring
//! scalar (both `Z/p^m` residues and ring-tower elements).

pub mod chain;
pub mod int;
pub mod zn;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error("entries belong to different rings")]
    MixedRings,
    #[error("matrix must be nonempty")]
    Empty,
}
