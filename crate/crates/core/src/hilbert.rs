//! Bipartite Hilbert-space bookkeeping.
//!
//! Basis states `|n m⟩` of `H₁ ⊗ H₂` are flattened row-major, `n·d₂ + m`. Every
//! consumer goes through [`HilbertDims::flat_index`] so that the two-copy
//! identification used by the concurrence machinery ([`HilbertDims::copy_space_map`])
//! stays consistent with state storage.

use nalgebra::SymmetricEigen;

use crate::{CMatrix, CVector, Error, Result, C64};

/// Tolerance on `Σ|ψ|² = 1` for pure states.
pub const NORM_TOL: f64 = 1e-12;
/// Maximum entrywise deviation from Hermiticity accepted for density matrices.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Tolerance on `tr ρ = 1`.
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted for a density matrix.
pub const PSD_TOL: f64 = 1e-8;
/// Default eigenvalue cutoff for subnormalised decompositions.
pub const DEFAULT_CUTOFF: f64 = 1e-12;

/// Local dimensions of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HilbertDims {
    d1: usize,
    d2: usize,
}

impl HilbertDims {
    pub fn new(d1: usize, d2: usize) -> Result<Self> {
        if d1 < 2 || d2 < 2 {
            return Err(Error::Domain(format!("local dimensions must be at least 2, got ({d1}, {d2})")));
        }
        Ok(Self { d1, d2 })
    }

    /// Two subsystems of equal dimension `d`.
    pub fn square(d: usize) -> Result<Self> {
        Self::new(d, d)
    }

    pub fn qubits() -> Self {
        Self { d1: 2, d2: 2 }
    }

    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    /// Total dimension `N = d₁·d₂`.
    pub fn total(&self) -> usize {
        self.d1 * self.d2
    }

    /// Smaller of the two local dimensions.
    pub fn min_local(&self) -> usize {
        self.d1.min(self.d2)
    }

    /// Row-major position of `|n m⟩`.
    pub fn flat_index(&self, n: usize, m: usize) -> Result<usize> {
        if n >= self.d1 || m >= self.d2 {
            return Err(Error::Domain(format!("index ({n}, {m}) out of range for dims ({}, {})", self.d1, self.d2)));
        }
        Ok(n * self.d2 + m)
    }

    /// Inverse of [`flat_index`](Self::flat_index).
    pub fn split_index(&self, i: usize) -> (usize, usize) {
        (i / self.d2, i % self.d2)
    }

    /// Maps the basis element `|i_k i_l⟩ ⊗ |j_m j_n⟩` of `H₁⊗H₁⊗H₂⊗H₂` onto the
    /// component `(flat(k, m), flat(l, n))` of `|φ⟩ ⊗ |φ'⟩ ∈ (H₁⊗H₂)⊗(H₁⊗H₂)`.
    pub fn copy_space_map(&self, k: usize, l: usize, m: usize, n: usize) -> Result<(usize, usize)> {
        Ok((self.flat_index(k, m)?, self.flat_index(l, n)?))
    }

    pub(crate) fn check_len(&self, len: usize, what: &str) -> Result<()> {
        if len != self.total() {
            return Err(Error::Domain(format!("{what} has length {len}, expected {}", self.total())));
        }
        Ok(())
    }
}

/// Normalised pure state on `H₁ ⊗ H₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: HilbertDims,
    amp: CVector,
}

impl PureState {
    pub fn new(dims: HilbertDims, amp: CVector) -> Result<Self> {
        dims.check_len(amp.len(), "amplitude vector")?;
        let norm2 = amp.norm_squared();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation(format!("state is not normalised: Σ|ψ|² = {norm2}")));
        }
        Ok(Self { dims, amp })
    }

    /// Rescales `amp` to unit norm before constructing.
    pub fn normalized(dims: HilbertDims, amp: CVector) -> Result<Self> {
        let norm = amp.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Validation("cannot normalise a zero vector".into()));
        }
        Self::new(dims, amp.unscale(norm))
    }

    /// Sum of weighted product basis states `Σ c |n m⟩`.
    pub fn from_terms(dims: HilbertDims, terms: &[(C64, usize, usize)]) -> Result<Self> {
        let mut amp = CVector::zeros(dims.total());
        for &(c, n, m) in terms {
            amp[dims.flat_index(n, m)?] += c;
        }
        Self::new(dims, amp)
    }

    /// `a|m₁ m₂⟩ + b|n₁ n₂⟩`.
    pub fn two_term(
        dims: HilbertDims,
        a: C64,
        b: C64,
        (m1, m2): (usize, usize),
        (n1, n2): (usize, usize),
    ) -> Result<Self> {
        if (m1, m2) == (n1, n2) {
            return Err(Error::Validation("two-term state needs distinct basis states".into()));
        }
        let norm2 = a.norm_sqr() + b.norm_sqr();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation(format!("|a|² + |b|² = {norm2} is not 1")));
        }
        Self::from_terms(dims, &[(a, m1, m2), (b, n1, n2)])
    }

    pub fn dims(&self) -> HilbertDims {
        self.dims
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amp
    }

    /// `ψ_{nm}`; panics on out-of-range indices.
    pub fn amp(&self, n: usize, m: usize) -> C64 {
        self.amp[n * self.dims.d2 + m]
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix { dims: self.dims, mat: &self.amp * self.amp.adjoint() }
    }

    /// Reduced state of the first subsystem, `tr₂ |ψ⟩⟨ψ|`.
    pub fn reduced_first(&self) -> CMatrix {
        let (d1, d2) = (self.dims.d1, self.dims.d2);
        CMatrix::from_fn(d1, d1, |i, j| (0..d2).map(|m| self.amp[i * d2 + m] * self.amp[j * d2 + m].conj()).sum())
    }

    /// Applies `U₁ ⊗ U₂`; the result is renormalised to absorb round-off.
    pub fn apply_local(&self, u1: &CMatrix, u2: &CMatrix) -> Result<Self> {
        let (d1, d2) = (self.dims.d1, self.dims.d2);
        if u1.shape() != (d1, d1) || u2.shape() != (d2, d2) {
            return Err(Error::Domain("local operator shape mismatch".into()));
        }
        let psi = CMatrix::from_fn(d1, d2, |n, m| self.amp[n * d2 + m]);
        let out = u1 * psi * u2.transpose();
        let amp = CVector::from_fn(d1 * d2, |i, _| out[(i / d2, i % d2)]);
        Self::normalized(self.dims, amp)
    }
}

/// Hermitian, unit-trace, positive semidefinite operator on `H₁ ⊗ H₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: HilbertDims,
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validating constructor.
    pub fn new(dims: HilbertDims, mat: CMatrix) -> Result<Self> {
        let rho = Self::from_raw(dims, mat)?;
        rho.check(HERMITIAN_TOL, TRACE_TOL, PSD_TOL).map_err(|e| match e {
            Error::Integrity(msg) => Error::Validation(msg),
            other => other,
        })?;
        Ok(rho)
    }

    /// Wraps `mat` after a shape check only.
    pub fn from_raw(dims: HilbertDims, mat: CMatrix) -> Result<Self> {
        if mat.shape() != (dims.total(), dims.total()) {
            return Err(Error::Domain(format!(
                "matrix shape {:?} does not match total dimension {}",
                mat.shape(),
                dims.total()
            )));
        }
        Ok(Self { dims, mat })
    }

    /// Maximally mixed state `𝟙/N`.
    pub fn maximally_mixed(dims: HilbertDims) -> Self {
        let n = dims.total();
        Self { dims, mat: CMatrix::identity(n, n).unscale(n as f64) }
    }

    /// Mixture `Σ wᵢ ρᵢ`; weights must be non-negative and sum to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::Validation("empty mixture".into()))?;
        let dims = first.1.dims;
        let mut mat = CMatrix::zeros(dims.total(), dims.total());
        for (w, rho) in parts {
            if rho.dims != dims {
                return Err(Error::Domain("mixture of different dimensions".into()));
            }
            if *w < 0.0 {
                return Err(Error::Validation("negative mixture weight".into()));
            }
            mat += rho.mat.scale(*w);
        }
        Self::new(dims, mat)
    }

    pub fn dims(&self) -> HilbertDims {
        self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// `max |ρ - ρ†|` entrywise.
    pub fn max_asymmetry(&self) -> f64 {
        max_asymmetry(&self.mat)
    }

    /// `(ρ + ρ†)/2`, warning when the discarded anti-Hermitian part is above tolerance.
    pub fn symmetrized(&self) -> Self {
        let asym = self.max_asymmetry();
        if asym > HERMITIAN_TOL {
            log::warn!("symmetrising density matrix with asymmetry {asym:e}");
        }
        Self { dims: self.dims, mat: hermitian_part(&self.mat) }
    }

    /// All eigenvalues (decreasing) and the matching orthonormal eigenvectors as columns.
    pub fn eigen(&self) -> Result<(Vec<f64>, CMatrix)> {
        hermitian_eigen(&hermitian_part(&self.mat))
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let (vals, _) = self.eigen()?;
        Ok(vals.last().copied().unwrap_or(0.0))
    }

    /// Checks Hermiticity, trace and positivity against the given tolerances,
    /// reporting failures as [`Error::Integrity`].
    pub fn check(&self, herm_tol: f64, trace_tol: f64, psd_tol: f64) -> Result<()> {
        let asym = self.max_asymmetry();
        if asym.is_nan() || asym > herm_tol {
            return Err(Error::Integrity(format!("not Hermitian: max |ρ-ρ†| = {asym:e}")));
        }
        let tr = self.trace();
        if !((tr.re - 1.0).abs() <= trace_tol && tr.im.abs() <= trace_tol) {
            return Err(Error::Integrity(format!("trace {tr} differs from 1")));
        }
        let min = self.min_eigenvalue()?;
        if min < -psd_tol {
            return Err(Error::Integrity(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// Largest diagonal entry `⟨n m|ρ|n m⟩` with `n = d₁-1` or `m = d₂-1`.
    pub fn boundary_population(&self) -> f64 {
        let (d1, d2) = (self.dims.d1, self.dims.d2);
        (0..self.dims.total())
            .filter(|&i| {
                let (n, m) = self.dims.split_index(i);
                n == d1 - 1 || m == d2 - 1
            })
            .map(|i| self.mat[(i, i)].re)
            .fold(0.0, f64::max)
    }

    /// `⟨i|ρ|j⟩` by local indices.
    pub fn element(&self, (n1, m1): (usize, usize), (n2, m2): (usize, usize)) -> Result<C64> {
        let i = self.dims.flat_index(n1, m1)?;
        let j = self.dims.flat_index(n2, m2)?;
        Ok(self.mat[(i, j)])
    }
}

/// Eigen-decomposition `ρ = Σ μᵢ |Ψᵢ⟩⟨Ψᵢ|` restricted to `μᵢ > cutoff`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenstates: Vec<PureState>,
    /// `ψᵢ = √μᵢ Ψᵢ`.
    pub subnormalized: Vec<CVector>,
}

impl SpectralDecomposition {
    pub fn rank(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Σ |ψᵢ⟩⟨ψᵢ|`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.subnormalized.first().map(|v| v.len()).unwrap_or(0);
        self.subnormalized.iter().fold(CMatrix::zeros(n, n), |acc, v| acc + v * v.adjoint())
    }
}

/// Spectral decomposition of `rho`, dropping eigenvalues at or below `cutoff`.
pub fn spectral(rho: &DensityMatrix, cutoff: f64) -> Result<SpectralDecomposition> {
    let rho = rho.symmetrized();
    let (vals, vecs) = hermitian_eigen(&rho.mat)?;
    let mut out = SpectralDecomposition { eigenvalues: Vec::new(), eigenstates: Vec::new(), subnormalized: Vec::new() };
    for (i, &mu) in vals.iter().enumerate() {
        if mu <= cutoff {
            break;
        }
        let v = vecs.column(i).into_owned();
        out.subnormalized.push(v.scale(mu.sqrt()));
        out.eigenstates.push(PureState::normalized(rho.dims, v)?);
        out.eigenvalues.push(mu);
    }
    Ok(out)
}

pub(crate) fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).unscale(2.0)
}

pub(crate) fn max_asymmetry(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenpairs of a Hermitian matrix, eigenvalues decreasing. Each eigenvector's
/// largest component is made real and positive so results are reproducible.
pub(crate) fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.nrows();
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numeric("non-finite matrix entry in eigensolver input".into()));
    }
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 100 * n.max(10))
        .ok_or_else(|| Error::Numeric(format!("Hermitian eigensolver did not converge (n = {n})")))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let pivot =
            col.iter().copied().max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr())).unwrap_or(C64::new(1.0, 0.0));
        let phase = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { C64::new(1.0, 0.0) };
        vecs.set_column(dst, &col.map(|z| z * phase));
    }
    Ok((vals, vecs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn flat_index_row_major() {
        let d3 = HilbertDims::square(3).unwrap();
        assert_eq!(d3.flat_index(0, 0).unwrap(), 0);
        assert_eq!(d3.flat_index(2, 1).unwrap(), 7);
        assert_eq!(HilbertDims::qubits().flat_index(1, 0).unwrap(), 2);
        assert!(d3.flat_index(3, 0).is_err());
        assert!(d3.flat_index(0, 3).is_err());
    }

    #[test]
    fn flat_index_is_bijective() {
        let dims = HilbertDims::new(3, 5).unwrap();
        let mut seen = vec![false; dims.total()];
        for n in 0..3 {
            for m in 0..5 {
                let i = dims.flat_index(n, m).unwrap();
                assert!(!seen[i]);
                seen[i] = true;
                assert_eq!(dims.split_index(i), (n, m));
            }
        }
        assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn copy_space_map_examples() {
        let q = HilbertDims::qubits();
        assert_eq!(q.copy_space_map(0, 1, 0, 1).unwrap(), (0, 3));
        assert_eq!(q.copy_space_map(0, 1, 1, 0).unwrap(), (1, 2));
        let d3 = HilbertDims::square(3).unwrap();
        assert_eq!(d3.copy_space_map(0, 2, 0, 2).unwrap(), (0, 8));
        assert!(d3.copy_space_map(0, 3, 0, 0).is_err());
    }

    #[test]
    fn copy_space_map_swap_consistency() {
        // Exchanging the roles of the two copies swaps the output pair.
        let d = HilbertDims::square(4).unwrap();
        for k in 0..4 {
            for l in 0..4 {
                for m in 0..4 {
                    for n in 0..4 {
                        let (a, b) = d.copy_space_map(k, l, m, n).unwrap();
                        let (b2, a2) = d.copy_space_map(l, k, n, m).unwrap();
                        assert_eq!((a, b), (a2, b2));
                    }
                }
            }
        }
    }

    #[test]
    fn dims_reject_small() {
        assert!(HilbertDims::new(1, 3).is_err());
        assert!(HilbertDims::new(2, 1).is_err());
    }

    #[test]
    fn two_term_states() {
        let q = HilbertDims::qubits();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::two_term(q, c(s), c(s), (0, 1), (1, 0)).unwrap();
        assert_abs_diff_eq!(bell.amp(0, 1).re, s);
        assert_abs_diff_eq!(bell.amp(1, 0).re, s);
        assert_eq!(bell.amplitudes().iter().filter(|z| z.norm() > 0.0).count(), 2);

        let product = PureState::two_term(q, c(1.0), c(0.0), (0, 0), (1, 1)).unwrap();
        assert_eq!(product.amp(0, 0), c(1.0));

        let d3 = HilbertDims::square(3).unwrap();
        let qd = PureState::two_term(d3, c(0.5), c(3f64.sqrt() / 2.0), (0, 2), (2, 0)).unwrap();
        assert_abs_diff_eq!(qd.amplitudes().norm(), 1.0, epsilon = 1e-15);

        assert!(PureState::two_term(q, c(1.0), c(1.0), (0, 1), (1, 0)).is_err());
        assert!(PureState::two_term(q, c(s), c(s), (0, 1), (0, 1)).is_err());
    }

    #[test]
    fn density_matrix_validation() {
        let q = HilbertDims::qubits();
        let mut m = CMatrix::identity(4, 4).unscale(4.0);
        assert!(DensityMatrix::new(q, m.clone()).is_ok());
        m[(0, 1)] = C64::new(0.0, 1e-6);
        assert!(matches!(DensityMatrix::new(q, m.clone()), Err(Error::Validation(_))));
        let m2 = CMatrix::identity(4, 4).unscale(2.0);
        assert!(DensityMatrix::new(q, m2).is_err());
        let mut m3 = CMatrix::zeros(4, 4);
        m3[(0, 0)] = c(1.5);
        m3[(1, 1)] = c(-0.5);
        assert!(DensityMatrix::new(q, m3).is_err());
        assert!(DensityMatrix::new(q, CMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn spectral_examples() {
        let q = HilbertDims::qubits();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::two_term(q, c(s), c(s), (0, 1), (1, 0)).unwrap();
        let sd = spectral(&bell.projector(), DEFAULT_CUTOFF).unwrap();
        assert_eq!(sd.rank(), 1);
        assert_abs_diff_eq!(sd.eigenvalues[0], 1.0, epsilon = 1e-12);

        let mixed = DensityMatrix::maximally_mixed(q);
        let sd = spectral(&mixed, DEFAULT_CUTOFF).unwrap();
        assert_eq!(sd.rank(), 4);
        for mu in &sd.eigenvalues {
            assert_abs_diff_eq!(*mu, 0.25, epsilon = 1e-14);
        }
    }

    #[test]
    fn spectral_of_dephased_two_term_state() {
        // ρ = ½(|01⟩⟨01| + |10⟩⟨10|) + ¼(|01⟩⟨10| + h.c.): the 2×2 block
        // [[1/2, 1/4], [1/4, 1/2]] has eigenvalues 3/4 and 1/4.
        let q = HilbertDims::qubits();
        let mut m = CMatrix::zeros(4, 4);
        m[(1, 1)] = c(0.5);
        m[(2, 2)] = c(0.5);
        m[(1, 2)] = c(0.25);
        m[(2, 1)] = c(0.25);
        let rho = DensityMatrix::new(q, m).unwrap();
        let sd = spectral(&rho, DEFAULT_CUTOFF).unwrap();
        assert_eq!(sd.rank(), 2);
        assert_abs_diff_eq!(sd.eigenvalues[0], 0.75, epsilon = 1e-14);
        assert_abs_diff_eq!(sd.eigenvalues[1], 0.25, epsilon = 1e-14);
        let rec = sd.reconstruct();
        assert!((rec - rho.matrix()).camax() < 1e-14);
    }

    #[test]
    fn boundary_population_picks_top_levels() {
        let d3 = HilbertDims::square(3).unwrap();
        let psi = PureState::from_terms(d3, &[(c(0.6), 1, 2), (c(0.8), 0, 0)]).unwrap();
        assert_abs_diff_eq!(psi.projector().boundary_population(), 0.36, epsilon = 1e-15);
    }

    #[test]
    fn reduced_state_of_bell_is_mixed() {
        let q = HilbertDims::qubits();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::two_term(q, c(s), c(s), (0, 0), (1, 1)).unwrap();
        let r = bell.reduced_first();
        assert_abs_diff_eq!(r[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r[(0, 1)].norm(), 0.0);
    }
}
