//! Quasi-exactly solvable spectra of the pseudo-Hermite isotonic
//! oscillators: Bethe-ansatz system construction, solution enumeration and
//! finite-difference verification.
//!
//! The numeric kernels ([`poly`], [`bethe::MultiPoly`], [`eigen`], [`quad`],
//! [`solve`], the finite-difference part of [`oracle`]) are generic over
//! [`scalar::Real`]; model-level code works in `f64`.

pub mod bethe;
pub mod eigen;
pub mod error;
pub mod models;
pub mod oracle;
pub mod poly;
pub mod quad;
pub mod scalar;
pub mod solve;
pub mod spectra;
pub mod tables;
pub mod threads;

pub use bethe::{build_generic_system, build_system, symbolic_compare, AlgebraicSystem, MultiPoly};
pub use error::{QesError, Result};
pub use models::{BranchParams, H2Spec, H4Spec, Mode, ModelSpec};
pub use oracle::{verify_branch, FdGrid, VerifyReport};
pub use solve::{solve_system, RawSolution, SolverConfig, SolverStats};
pub use spectra::{enumerate_levels, scan_parameters, Branch, ScanGrid, SpectrumReport};
pub use tables::{compare_table, TableId, TableReport};

/// Double-precision aliases.
pub type Poly64 = poly::Poly<f64>;
pub type MultiPoly64 = bethe::MultiPoly<f64>;
pub type System64 = bethe::AlgebraicSystem<f64>;
pub type Solution64 = solve::RawSolution<f64>;
pub type Grid64 = oracle::FdGrid<f64>;

/// Single-precision aliases.
pub type Poly32 = poly::Poly<f32>;
pub type MultiPoly32 = bethe::MultiPoly<f32>;
