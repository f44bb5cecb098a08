//! Exact computation with modular forms and Hecke algebras modulo prime powers.
//!
//! The crate provides:
//! - arithmetic in the coefficient rings `O_K / pi^((m-1)e+1)` that assemble
//!   into the ring of residues modulo `p^m` of all p-adic integers
//!   ([`ring`]),
//! - truncated q-expansions with Hecke, diamond and stroke operators
//!   ([`qexp`]), and Dirichlet characters ([`character`]),
//! - exact linear algebra over the integers (Smith/Hermite normal forms) and
//!   over chain rings (Howell normal form, kernels, affine solving, layered
//!   lifting) ([`linalg`]),
//! - integral Hecke algebras of spaces of cusp forms, the pairing with the
//!   space, and forms with coefficients in arbitrary rings ([`hecke`]),
//! - detection and enumeration of weak, dc-weak and strong eigenforms modulo
//!   `p^m`, eigenvalue-system comparison and the half-sum construction
//!   ([`classify`]),
//! - divided congruences, level stripping, weight congruences and Eisenstein
//!   weight equalization ([`divided`]),
//! - nebentypus character decomposition and the determinant obstruction
//!   ([`nebentypus`]),
//! - basis-file ingestion, reports and the command-line driver
//!   ([`spacefile`], [`report`], [`cli`]).

pub mod character;
pub mod classify;
pub mod cli;
pub mod divided;
pub mod hecke;
pub mod linalg;
pub mod nebentypus;
pub mod numfield;
pub mod qexp;
pub mod refdata;
pub mod report;
pub mod ring;
pub mod spacefile;

pub use character::DirichletCharacter;
pub use classify::EigenSystem;
pub use hecke::SpaceBasis;
pub use linalg::chain::{AffineSet, ChainMat};
pub use linalg::int::IntMatrix;
pub use qexp::QExpansion;
pub use ring::{LocalFieldSpec, ModRing, RingElement};
