//! Concurrence estimators.
//!
//! For a pure state the concurrence is `c(ψ) = √⟨ψ⊗ψ|A|ψ⊗ψ⟩` with
//! `A = Σ_α |χ_α⟩⟨χ_α|` and `|χ_α⟩ = (|kl⟩ − |lk⟩) ⊗ (|mn⟩ − |nm⟩)`, `k < l`,
//! `m < n`. The `χ_α` are deliberately left unnormalised so that the two-qubit
//! case reproduces Wootters' concurrence.
//!
//! Mixed states are handled by a hierarchy of estimators:
//!
//! | estimator | module | kind |
//! |---|---|---|
//! | [`wootters`] | closed form | exact, two qubits only |
//! | [`lower_bound_fixed_z`], [`optimize_lower_bound`] | `T`-matrix bound | lower |
//! | [`quasipure_concurrence`] | leading-eigenvector expansion | lower (approximation) |
//! | [`upper_convex_roof`] | ensemble optimisation | upper |

mod block;
mod lower;
mod quasipure;
mod roof;
mod tmatrix;
mod wootters;

pub use block::{block_concurrence, two_qubit_block};
pub use lower::{lower_bound_fixed_z, optimize_lower_bound, LowerBoundConfig, ZVector};
pub use quasipure::{quasipure_concurrence, quasipure_t, QuasiPureEstimate, QuasiPureGate, QuasiPureMatrix};
pub use roof::{average_concurrence, upper_convex_roof, ConvexRoofConfig, RoofResult};
pub use tmatrix::{
    a_tensor, a_tensor_direct, build_t, chi_indices, pure_concurrence, pure_concurrence_vec, ATensor, ChiIndex,
    TMatrixSet,
};
pub use wootters::{wootters, wootters_matrix};

/// Singular values below this are treated as exact zeros.
pub const SV_ZERO: f64 = 1e-13;

/// Which estimator produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimator {
    ExactWootters,
    PureExact,
    LowerFixedZ,
    LowerOptimized,
    QuasiPure,
    UpperConvexRoof,
}

/// A concurrence value with provenance and optimiser metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcurrenceEstimate {
    pub value: f64,
    pub estimator: Estimator,
    pub iterations: usize,
    pub converged: bool,
}

impl ConcurrenceEstimate {
    pub(crate) fn exact(value: f64, estimator: Estimator) -> Self {
        Self { value, estimator, iterations: 0, converged: true }
    }
}

/// `√(2(d−1)/d)`, the largest concurrence of a `d×d` system.
pub fn max_concurrence(d: usize) -> f64 {
    (2.0 * (d as f64 - 1.0) / d as f64).sqrt()
}

/// `max{S₁ − Σ_{i>1} Sᵢ, 0}` over singular values, ignoring those below [`SV_ZERO`].
pub fn singular_value_bound(values: &[f64]) -> f64 {
    let mut s: Vec<f64> = values.iter().copied().filter(|v| *v >= SV_ZERO).collect();
    if s.is_empty() {
        return 0.0;
    }
    s.sort_by(|a, b| b.total_cmp(a));
    let rest: f64 = s[1..].iter().sum();
    (s[0] - rest).max(0.0)
}
