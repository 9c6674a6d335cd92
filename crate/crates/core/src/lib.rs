//! Entanglement dynamics of bipartite qudits under local Markovian decoherence.
//!
//! The crate is organised bottom-up:
//!
//! - [`hilbert`]: dimensions, pure states, density matrices and their spectra.
//! - [`lindblad`]: local dephasing / thermal / infinite-temperature generators and
//!   two independent propagation backends (adaptive RK4 and a dense superoperator
//!   exponential).
//! - [`concurrence`]: the estimator stack. Exact two-qubit concurrence, pure-state
//!   concurrence of arbitrary dimension, `T`-matrix lower bounds, the quasi-pure
//!   approximation and a numerical convex-roof upper bound.
//! - [`analytic`]: closed-form concurrence curves used as oracles.
//! - [`sampling`]: seeded random states and unitaries for property checks.

pub mod analytic;
pub mod concurrence;
mod error;
pub mod hilbert;
pub mod lindblad;
pub mod sampling;

pub use error::{Error, Result};
pub use hilbert::{DensityMatrix, HilbertDims, PureState, SpectralDecomposition};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix used throughout.
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Dense complex vector used throughout.
pub type CVector = nalgebra::DVector<C64>;
