//! Numerics for Schur multipliers acting on the Schatten classes `S^p_n`.
//!
//! Without the `std` feature the crate is `no_std` (it needs `alloc`; float
//! math then goes through `libm`). It covers:
//!
//! * dense complex matrices, a cyclic Jacobi Hermitian eigensolver, a one-sided
//!   Jacobi SVD and Schatten p-norms ([`linalg`]);
//! * scalar 1-Lipschitz functions, matrix functional calculus and
//!   divided-difference symbols ([`funcalc`]);
//! * Schur multipliers, oscillatory symbols `|μ_k − μ_l|^{is}` and a
//!   duality-iteration lower bound for `‖M_φ‖_{S^p→S^p}` ([`schur`]);
//! * an explicit kernel `g` with `λ/μ = ∫ g(s) λ^{is} μ^{-is} ds` ([`kernel`]);
//! * the decomposition of a divided-difference multiplier into oscillatory
//!   multipliers and the rational-to-integer reduction ([`decomposition`],
//!   [`reduction`]).
//!
//! IO, reports and the command line live in the `schatten-lab` crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod decomposition;
pub mod error;
pub mod funcalc;
pub mod kernel;
pub mod linalg;
pub mod reduction;
pub mod rng;
pub mod schur;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};

pub use funcalc::{Descriptor, MonotoneFlag, ScalarFunction};
pub use kernel::{KernelG, KernelParams};
pub use linalg::{ComplexMatrix, HermitianMatrix, SpectralDecomposition};
pub use schur::{EstimatorConfig, NormEstimate, OscillatorySpec, SchurSymbol};
