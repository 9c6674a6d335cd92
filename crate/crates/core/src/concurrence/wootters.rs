use crate::hilbert::{hermitian_eigen, hermitian_part, DensityMatrix};
use crate::{CMatrix, Error, Result, C64};

use super::{ConcurrenceEstimate, Estimator};

/// `σ_y ⊗ σ_y` in the computational basis `|00⟩, |01⟩, |10⟩, |11⟩`.
fn sigma_yy() -> CMatrix {
    let mut y = CMatrix::zeros(4, 4);
    y[(0, 3)] = C64::new(-1.0, 0.0);
    y[(1, 2)] = C64::new(1.0, 0.0);
    y[(2, 1)] = C64::new(1.0, 0.0);
    y[(3, 0)] = C64::new(-1.0, 0.0);
    y
}

/// Wootters' functional `max{λ₁ − λ₂ − λ₃ − λ₄, 0}` for any positive semidefinite
/// 4×4 matrix (not necessarily unit trace).
///
/// The `λᵢ` are the square roots of the eigenvalues of `ρ (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
/// They are obtained as the singular values of `√ρ (σ_y⊗σ_y) √ρ*`, whose
/// product with its adjoint is similar to that matrix.
pub fn wootters_matrix(m: &CMatrix) -> Result<f64> {
    if m.shape() != (4, 4) {
        return Err(Error::Domain(format!("Wootters concurrence needs a 4×4 matrix, got {:?}", m.shape())));
    }
    let (vals, vecs) = hermitian_eigen(&hermitian_part(m))?;
    let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    if let Some(&min) = vals.last() {
        if min < -1e-9 * scale.max(1.0) {
            return Err(Error::Numeric(format!("matrix has eigenvalue {min:e} < −1e-9")));
        }
    }
    let sqrt_diag = nalgebra::DVector::from_iterator(4, vals.iter().map(|v| C64::new(v.max(0.0).sqrt(), 0.0)));
    let root = &vecs * CMatrix::from_diagonal(&sqrt_diag) * vecs.adjoint();
    let prod = &root * sigma_yy() * root.map(|z| z.conj());
    let mut lambda: Vec<f64> = prod.singular_values().iter().copied().collect();
    lambda.sort_by(|a, b| b.total_cmp(a));
    Ok((lambda[0] - lambda[1] - lambda[2] - lambda[3]).max(0.0))
}

/// Exact two-qubit concurrence.
pub fn wootters(rho: &DensityMatrix) -> Result<ConcurrenceEstimate> {
    let dims = rho.dims();
    if dims.d1() != 2 || dims.d2() != 2 {
        return Err(Error::Domain(format!(
            "Wootters concurrence is defined for two qubits, got ({}, {})",
            dims.d1(),
            dims.d2()
        )));
    }
    Ok(ConcurrenceEstimate::exact(wootters_matrix(rho.matrix())?, Estimator::ExactWootters))
}
