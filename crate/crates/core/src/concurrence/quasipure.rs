use crate::hilbert::{spectral, DensityMatrix, HilbertDims, DEFAULT_CUTOFF};
use crate::{CMatrix, CVector, Error, Result};

use super::lower::sv_bound;
use super::tmatrix::{all_terms, bilinear};
use super::{ConcurrenceEstimate, Estimator};

/// Smallest admissible `𝒜^{11}_{11}`.
pub const A11_MIN: f64 = 1e-14;

/// The leading-order matrix `T^{qp}_{jk} = 𝒜^{11}_{jk} / √𝒜^{11}_{11}` over the
/// subnormalised eigenvectors of ρ.
#[derive(Debug, Clone)]
pub struct QuasiPureMatrix {
    pub t: CMatrix,
    /// Eigenvalues of ρ in decreasing order (those above the spectral cutoff).
    pub spectrum: Vec<f64>,
    /// `𝒜^{11}_{11} = μ₁² c(Ψ₁)²`.
    pub a11: f64,
    /// Eigenvectors used for the expansion, in the order of `spectrum`.
    pub eigenvectors: Vec<CVector>,
}

impl QuasiPureMatrix {
    /// `μ₁ − μ₂`, with `μ₂ = 0` for a pure state.
    pub fn gap(&self) -> f64 {
        let mu1 = self.spectrum.first().copied().unwrap_or(0.0);
        let mu2 = self.spectrum.get(1).copied().unwrap_or(0.0);
        mu1 - mu2
    }
}

/// Builds `T^{qp}` from a decomposition whose first vector is the dominant one.
///
/// Uses `𝒜^{11}_{jk} = φ_jᵀ G φ_k` with the bilinear form
/// `G = Σ_α (T^α_{11})* χ_α`, so the work is two dense products instead of one
/// matrix per `α`.
pub(crate) fn quasipure_from_decomposition(decomp: &[CVector], dims: HilbertDims) -> Result<(CMatrix, f64)> {
    let Some(lead) = decomp.first() else {
        return Err(Error::Domain("empty decomposition".into()));
    };
    for phi in decomp {
        dims.check_len(phi.len(), "decomposition vector")?;
    }
    let n = dims.total();
    let mut g = CMatrix::zeros(n, n);
    let mut a11 = 0.0;
    for terms in all_terms(dims) {
        let t11 = bilinear(&terms, lead.as_slice(), lead.as_slice());
        a11 += t11.norm_sqr();
        let w = t11.conj();
        if w.norm_sqr() == 0.0 {
            continue;
        }
        for &(i, j, s) in &terms {
            g[(i, j)] += w * s;
        }
    }
    if a11 < A11_MIN {
        return Err(Error::Degenerate(a11));
    }
    let phi = CMatrix::from_columns(decomp);
    let t = (phi.transpose() * g * &phi).unscale(a11.sqrt());
    Ok((t, a11))
}

/// `T^{qp}` for ρ built from its spectral decomposition.
///
/// Fails with [`Error::Degenerate`] when the leading eigenvector is (nearly)
/// separable, in which case the quasi-pure expansion carries no information.
pub fn quasipure_t(rho: &DensityMatrix) -> Result<QuasiPureMatrix> {
    let sd = spectral(rho, DEFAULT_CUTOFF)?;
    let (t, a11) = quasipure_from_decomposition(&sd.subnormalized, rho.dims())?;
    let eigenvectors = sd.eigenstates.iter().map(|s| s.amplitudes().clone()).collect();
    Ok(QuasiPureMatrix { t, spectrum: sd.eigenvalues, a11, eigenvectors })
}

/// When a quasi-pure value is considered trustworthy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiPureGate {
    /// Required `μ₁ − μ₂`.
    pub min_gap: f64,
    /// Required `μ₁`. Zero disables the check.
    pub min_leading: f64,
}

impl Default for QuasiPureGate {
    fn default() -> Self {
        Self { min_gap: 1e-9, min_leading: 0.0 }
    }
}

impl QuasiPureGate {
    /// Also demands a majority eigenvalue `μ₁ ≥ 1/2`.
    pub fn strict() -> Self {
        Self { min_gap: 1e-9, min_leading: 0.5 }
    }

    pub fn accepts(&self, spectrum: &[f64]) -> bool {
        let mu1 = spectrum.first().copied().unwrap_or(0.0);
        let mu2 = spectrum.get(1).copied().unwrap_or(0.0);
        mu1 - mu2 >= self.min_gap && mu1 >= self.min_leading
    }
}

/// Quasi-pure concurrence together with its validity flag.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiPureEstimate {
    pub estimate: ConcurrenceEstimate,
    pub valid: bool,
    pub spectrum: Vec<f64>,
    /// Leading eigenvector, useful for following a branch through a crossing.
    pub leading: CVector,
}

/// `max{𝒮₁ − Σ_{i>1} 𝒮ᵢ, 0}` over the singular values of `T^{qp}`.
pub fn quasipure_concurrence(rho: &DensityMatrix, gate: &QuasiPureGate) -> Result<QuasiPureEstimate> {
    let qp = quasipure_t(rho)?;
    let value = sv_bound(&qp.t)?;
    let valid = gate.accepts(&qp.spectrum);
    Ok(QuasiPureEstimate {
        estimate: ConcurrenceEstimate::exact(value, Estimator::QuasiPure),
        valid,
        spectrum: qp.spectrum,
        leading: qp.eigenvectors.into_iter().next().unwrap_or_else(|| CVector::zeros(0)),
    })
}
