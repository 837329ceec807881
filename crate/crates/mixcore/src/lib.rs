//! Pseudo-spectral laboratory core for passive-scalar transport on the
//! periodic torus.
//!
//! Everything in this crate is pure computation over heap arrays: forward and
//! inverse transforms, Fourier-multiplier application, mollifier and kernel
//! symbols, Calderon-Zygmund size estimates, a conservative RK4 transport
//! solver, transport commutators with their δ-scans, and the mixing /
//! Besov / log-derivative norms used as diagnostics. File formats, CSV
//! reports, and the CLI live in the companion `mixlab` crate.
//!
//! The crate is `no_std` (with `alloc`); transcendentals come from `libm`.
//! Fields are immutable after construction and all operations are pure
//! functions, so anything here can be evaluated concurrently without shared
//! state.

#![no_std]

extern crate alloc;

pub mod commutator;
pub mod complex;
pub mod corpus;
pub mod error;
pub mod exponents;
pub mod fft;
pub mod field;
pub mod flow;
pub mod grid;
pub mod kernel;
pub mod lp;
pub mod mollifier;
pub mod norms;
pub mod quad;
pub mod solver;

pub use complex::Complex;
pub use error::{Error, Result};
pub use exponents::ExponentTriple;
pub use field::ScalarField;
pub use flow::{FlowSpec, VelocityField};
pub use grid::TorusGrid;
pub use kernel::{CzReport, KernelSpec};
pub use mollifier::Mollifier;
pub use solver::{SolverConfig, Trajectory};
