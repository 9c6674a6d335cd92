use crate::hilbert::{HilbertDims, PureState};
use crate::{CMatrix, CVector, Error, Result, C64};

use super::{ConcurrenceEstimate, Estimator};

/// Multi-index `α = [k, l, m, n]` of an antisymmetric two-copy vector, with
/// `k < l` on `H₁` and `m < n` on `H₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChiIndex {
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub n: usize,
}

impl ChiIndex {
    pub fn new(k: usize, l: usize, m: usize, n: usize) -> Result<Self> {
        if !(k < l && m < n) {
            return Err(Error::Domain(format!("χ index needs k < l and m < n, got [{k},{l},{m},{n}]")));
        }
        Ok(Self { k, l, m, n })
    }

    /// The four signed components of `χ_α` in the two-copy space, as
    /// `(first copy index, second copy index, sign)`.
    pub fn terms(&self, dims: HilbertDims) -> Result<[(usize, usize, f64); 4]> {
        let Self { k, l, m, n } = *self;
        let (a, b) = dims.copy_space_map(k, l, m, n)?;
        let (c, d) = dims.copy_space_map(k, l, n, m)?;
        let (e, f) = dims.copy_space_map(l, k, m, n)?;
        let (g, h) = dims.copy_space_map(l, k, n, m)?;
        Ok([(a, b, 1.0), (c, d, -1.0), (e, f, -1.0), (g, h, 1.0)])
    }
}

/// All `χ` indices for `dims`, ordered lexicographically in `(k, l, m, n)`.
pub fn chi_indices(dims: HilbertDims) -> Vec<ChiIndex> {
    let mut out = Vec::new();
    for k in 0..dims.d1() {
        for l in k + 1..dims.d1() {
            for m in 0..dims.d2() {
                for n in m + 1..dims.d2() {
                    out.push(ChiIndex { k, l, m, n });
                }
            }
        }
    }
    out
}

pub(crate) type Terms = [(usize, usize, f64); 4];

pub(crate) fn all_terms(dims: HilbertDims) -> Vec<Terms> {
    chi_indices(dims).iter().map(|c| c.terms(dims).expect("indices generated in range")).collect()
}

/// `⟨χ_α| u ⊗ v⟩`.
#[inline]
pub(crate) fn bilinear(terms: &Terms, u: &[C64], v: &[C64]) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for &(i, j, s) in terms {
        acc += u[i] * v[j] * s;
    }
    acc
}

/// The matrices `T^α_{jk} = ⟨χ_α| φ_j ⊗ φ_k⟩` for a decomposition `{φ_j}` of ρ.
#[derive(Debug, Clone)]
pub struct TMatrixSet {
    pub dims: HilbertDims,
    pub chis: Vec<ChiIndex>,
    pub mats: Vec<CMatrix>,
}

impl TMatrixSet {
    /// Decomposition size `r`.
    pub fn size(&self) -> usize {
        self.mats.first().map(|m| m.nrows()).unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    /// `Σ_α z_α T^α`.
    pub fn combine(&self, z: &[C64]) -> CMatrix {
        let r = self.size();
        let mut out = CMatrix::zeros(r, r);
        for (t, zi) in self.mats.iter().zip(z) {
            if zi.norm_sqr() != 0.0 {
                out += t.map(|x| x * zi);
            }
        }
        out
    }
}

/// Builds `{T^α}` from subnormalised decomposition vectors.
pub fn build_t(decomp: &[CVector], dims: HilbertDims) -> Result<TMatrixSet> {
    for phi in decomp {
        dims.check_len(phi.len(), "decomposition vector")?;
    }
    let chis = chi_indices(dims);
    let r = decomp.len();
    let mut mats = Vec::with_capacity(chis.len());
    for chi in &chis {
        let terms = chi.terms(dims)?;
        let mut t = CMatrix::zeros(r, r);
        for j in 0..r {
            for k in j..r {
                let v = bilinear(&terms, decomp[j].as_slice(), decomp[k].as_slice());
                t[(j, k)] = v;
                t[(k, j)] = v;
            }
        }
        mats.push(t);
    }
    Ok(TMatrixSet { dims, chis, mats })
}

/// `c(ψ) = 2 √(Σ_{k<l, m<n} |ψ_km ψ_ln − ψ_kn ψ_lm|²)` for a (possibly
/// subnormalised) vector.
pub fn pure_concurrence_vec(psi: &[C64], dims: HilbertDims) -> f64 {
    let (d1, d2) = (dims.d1(), dims.d2());
    let mut sum = 0.0;
    for k in 0..d1 {
        for l in k + 1..d1 {
            for m in 0..d2 {
                for n in m + 1..d2 {
                    let minor = psi[k * d2 + m] * psi[l * d2 + n] - psi[k * d2 + n] * psi[l * d2 + m];
                    sum += minor.norm_sqr();
                }
            }
        }
    }
    2.0 * sum.sqrt()
}

/// Concurrence of a pure state.
pub fn pure_concurrence(psi: &PureState) -> ConcurrenceEstimate {
    ConcurrenceEstimate::exact(pure_concurrence_vec(psi.amplitudes().as_slice(), psi.dims()), Estimator::PureExact)
}

/// Rank-4 tensor `𝒜^{lm}_{jk}` stored densely, index order `[l][m][j][k]`.
#[derive(Debug, Clone)]
pub struct ATensor {
    pub size: usize,
    data: Vec<C64>,
}

impl ATensor {
    pub fn get(&self, l: usize, m: usize, j: usize, k: usize) -> C64 {
        let r = self.size;
        self.data[((l * r + m) * r + j) * r + k]
    }

    pub fn max_abs_diff(&self, other: &ATensor) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// `𝒜^{lm}_{jk} = Σ_α (T^α_{lm})* T^α_{jk}`.
pub fn a_tensor(tset: &TMatrixSet) -> ATensor {
    let r = tset.size();
    let mut data = vec![C64::new(0.0, 0.0); r * r * r * r];
    for t in &tset.mats {
        for l in 0..r {
            for m in 0..r {
                let left = t[(l, m)].conj();
                if left.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..r {
                    for k in 0..r {
                        data[((l * r + m) * r + j) * r + k] += left * t[(j, k)];
                    }
                }
            }
        }
    }
    ATensor { size: r, data }
}

/// `⟨ψ_l ⊗ ψ_m| A |ψ_j ⊗ ψ_k⟩` evaluated with an explicit two-copy operator.
///
/// Each `χ_α` is written out in `H₁⊗H₁⊗H₂⊗H₂` and then reordered into
/// `(H₁⊗H₂)⊗(H₁⊗H₂)` by permuting tensor factors, independently of
/// [`HilbertDims::copy_space_map`]. Intended for cross-checks on small systems:
/// memory is `O(N⁴)`.
pub fn a_tensor_direct(decomp: &[CVector], dims: HilbertDims) -> Result<ATensor> {
    let (d1, d2) = (dims.d1(), dims.d2());
    let n = dims.total();
    for phi in decomp {
        dims.check_len(phi.len(), "decomposition vector")?;
    }
    let reorder = |i1: usize, i1p: usize, j2: usize, j2p: usize| (i1 * d2 + j2) * n + (i1p * d2 + j2p);
    let mut chis = Vec::new();
    for k in 0..d1 {
        for l in k + 1..d1 {
            for m in 0..d2 {
                for nn in m + 1..d2 {
                    // (|kl⟩ − |lk⟩) ⊗ (|mn⟩ − |nm⟩) in H₁⊗H₁⊗H₂⊗H₂
                    let mut chi = CVector::zeros(n * n);
                    let first = [(k, l, 1.0), (l, k, -1.0)];
                    let second = [(m, nn, 1.0), (nn, m, -1.0)];
                    for &(a, b, s1) in &first {
                        for &(c, e, s2) in &second {
                            chi[reorder(a, b, c, e)] += C64::new(s1 * s2, 0.0);
                        }
                    }
                    chis.push(chi);
                }
            }
        }
    }
    let mut a = CMatrix::zeros(n * n, n * n);
    for chi in &chis {
        a += chi * chi.adjoint();
    }
    let r = decomp.len();
    let pair = |x: &CVector, y: &CVector| x.kronecker(y);
    let mut data = vec![C64::new(0.0, 0.0); r * r * r * r];
    for l in 0..r {
        for m in 0..r {
            let bra = pair(&decomp[l], &decomp[m]).adjoint() * &a;
            for j in 0..r {
                for k in 0..r {
                    let ket = pair(&decomp[j], &decomp[k]);
                    data[((l * r + m) * r + j) * r + k] = (&bra * ket)[(0, 0)];
                }
            }
        }
    }
    Ok(ATensor { size: r, data })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::BellKind;
    use crate::hilbert::spectral;
    use crate::sampling::{random_density_matrix, random_pure_state, rng_from_seed};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn chi_count() {
        assert_eq!(chi_indices(HilbertDims::qubits()).len(), 1);
        assert_eq!(chi_indices(HilbertDims::square(3).unwrap()).len(), 9);
        assert_eq!(chi_indices(HilbertDims::new(3, 4).unwrap()).len(), 3 * 6);
        assert!(ChiIndex::new(1, 0, 0, 1).is_err());
    }

    #[test]
    fn pure_concurrence_examples() {
        let bell = BellKind::PsiPlus.state(HilbertDims::qubits()).unwrap();
        assert_abs_diff_eq!(pure_concurrence(&bell).value, 1.0, epsilon = 1e-15);
        let d3 = HilbertDims::square(3).unwrap();
        let prod = PureState::from_terms(d3, &[(r(1.0), 0, 0)]).unwrap();
        assert_eq!(pure_concurrence(&prod).value, 0.0);
        let s = r(1.0 / 3f64.sqrt());
        let ghz = PureState::from_terms(d3, &[(s, 0, 0), (s, 1, 1), (s, 2, 2)]).unwrap();
        assert_abs_diff_eq!(pure_concurrence(&ghz).value, 2.0 / 3f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn single_vector_t_matches_pure_concurrence() {
        let mut rng = rng_from_seed(13);
        let dims = HilbertDims::new(3, 4).unwrap();
        let psi = random_pure_state(dims, &mut rng);
        let tset = build_t(&[psi.amplitudes().clone()], dims).unwrap();
        assert_eq!(tset.size(), 1);
        let sum: f64 = tset.mats.iter().map(|t| t[(0, 0)].norm_sqr()).sum();
        assert_abs_diff_eq!(sum.sqrt(), pure_concurrence(&psi).value, epsilon = 1e-13);
    }

    #[test]
    fn t_matrices_are_symmetric() {
        let mut rng = rng_from_seed(14);
        let dims = HilbertDims::square(3).unwrap();
        let rho = random_density_matrix(dims, 4, &mut rng).unwrap();
        let sd = spectral(&rho, 1e-12).unwrap();
        let tset = build_t(&sd.subnormalized, dims).unwrap();
        for t in &tset.mats {
            assert!((t - t.transpose()).camax() <= 1e-12);
        }
    }

    #[test]
    fn dephased_two_term_state_has_single_t() {
        // φ₁ = √p (a|m₁m₂⟩ + b|n₁n₂⟩), φ₂ = √(1−p)(a|m₁m₂⟩ − b|n₁n₂⟩)
        let dims = HilbertDims::square(3).unwrap();
        let (a, b) = (0.5, 3f64.sqrt() / 2.0);
        let p = 0.8;
        let mk = |w: f64, sign: f64| {
            let mut v = CVector::zeros(9);
            v[dims.flat_index(0, 2).unwrap()] = r(w.sqrt() * a);
            v[dims.flat_index(2, 0).unwrap()] = r(sign * w.sqrt() * b);
            v
        };
        let tset = build_t(&[mk(p, 1.0), mk(1.0 - p, -1.0)], dims).unwrap();
        let nonzero: Vec<_> = tset.chis.iter().zip(&tset.mats).filter(|(_, t)| t.camax() > 1e-14).collect();
        assert_eq!(nonzero.len(), 1);
        let (chi, t) = nonzero[0];
        assert_eq!(*chi, ChiIndex::new(0, 2, 0, 2).unwrap());
        // The overall sign depends on the orientation of χ; singular values do not.
        assert_abs_diff_eq!(t[(0, 0)].norm(), 2.0 * p * a * b, epsilon = 1e-14);
        assert_abs_diff_eq!(t[(1, 1)].norm(), 2.0 * (1.0 - p) * a * b, epsilon = 1e-14);
        assert_abs_diff_eq!(t[(0, 1)].norm(), 0.0, epsilon = 1e-14);
        assert!((t[(0, 0)] / t[(1, 1)]).re < 0.0);
    }

    #[test]
    fn two_qubits_have_one_t() {
        let mut rng = rng_from_seed(15);
        let rho = random_density_matrix(HilbertDims::qubits(), 3, &mut rng).unwrap();
        let sd = spectral(&rho, 1e-12).unwrap();
        let tset = build_t(&sd.subnormalized, HilbertDims::qubits()).unwrap();
        assert_eq!(tset.len(), 1);
        assert_eq!(tset.size(), 3);
    }

    #[test]
    fn a_tensor_routes_agree() {
        let mut rng = rng_from_seed(16);
        for dims in [HilbertDims::qubits(), HilbertDims::square(3).unwrap(), HilbertDims::new(2, 3).unwrap()] {
            let rho = random_density_matrix(dims, 3, &mut rng).unwrap();
            let sd = spectral(&rho, 1e-12).unwrap();
            let via_t = a_tensor(&build_t(&sd.subnormalized, dims).unwrap());
            let direct = a_tensor_direct(&sd.subnormalized, dims).unwrap();
            assert!(via_t.max_abs_diff(&direct) <= 1e-12);
        }
    }

    #[test]
    fn direct_a_reproduces_pure_concurrence() {
        let dims = HilbertDims::square(3).unwrap();
        let s = r(FRAC_1_SQRT_2);
        let psi = PureState::from_terms(dims, &[(s, 1, 2), (s, 2, 1)]).unwrap();
        let a = a_tensor_direct(&[psi.amplitudes().clone()], dims).unwrap();
        assert_abs_diff_eq!(a.get(0, 0, 0, 0).re.sqrt(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn size_mismatch_rejected() {
        let dims = HilbertDims::square(3).unwrap();
        assert!(build_t(&[CVector::zeros(4)], dims).is_err());
    }
}
