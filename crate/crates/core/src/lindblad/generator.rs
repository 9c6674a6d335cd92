use crate::hilbert::{DensityMatrix, HilbertDims};
use crate::{CMatrix, Error, Result, C64};

use super::model::{local_jump_operators, EnvironmentModel};

/// Sparse operator on the full space stored as `(row, col, value)` triplets.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl SparseOp {
    pub fn from_dense(m: &CMatrix) -> Self {
        let mut entries = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v.norm_sqr() != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        Self { dim: m.nrows(), entries }
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for &(i, j, v) in &self.entries {
            m[(i, j)] += v;
        }
        m
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// `local ⊗ 𝟙` (`first = true`) or `𝟙 ⊗ local` on `H₁ ⊗ H₂`.
    fn lift(local: &CMatrix, dims: HilbertDims, first: bool) -> Self {
        let (d1, d2) = (dims.d1(), dims.d2());
        let mut entries = Vec::new();
        for j in 0..local.ncols() {
            for i in 0..local.nrows() {
                let v = local[(i, j)];
                if v.norm_sqr() == 0.0 {
                    continue;
                }
                if first {
                    for m in 0..d2 {
                        entries.push((i * d2 + m, j * d2 + m, v));
                    }
                } else {
                    for n in 0..d1 {
                        entries.push((n * d2 + i, n * d2 + j, v));
                    }
                }
            }
        }
        Self { dim: dims.total(), entries }
    }
}

/// A lifted jump operator with its rate.
#[derive(Debug, Clone)]
struct Jump {
    op: SparseOp,
    rate: f64,
}

/// The dissipator `(𝟙⊗𝓛 + 𝓛⊗𝟙)` for a given environment model.
///
/// Applied as `Σᵢ Γᵢ Lᵢ ρ Lᵢ† − (Kρ + ρK)` with `K = Σᵢ (Γᵢ/2) Lᵢ†Lᵢ`.
#[derive(Debug, Clone)]
pub struct Generator {
    dims: HilbertDims,
    model: Option<EnvironmentModel>,
    local: Vec<(CMatrix, f64)>,
    jumps: Vec<Jump>,
    damping: SparseOp,
}

impl Generator {
    pub fn new(model: &EnvironmentModel, dims: HilbertDims) -> Result<Self> {
        if dims.d1() != dims.d2() {
            // each subsystem gets its own set of local operators
            let l1 = local_jump_operators(model, dims.d1())?;
            let l2 = local_jump_operators(model, dims.d2())?;
            let mut g = Self::from_local_pairs(dims, &l1, &l2);
            g.model = Some(*model);
            return Ok(g);
        }
        let local = local_jump_operators(model, dims.d1())?;
        let mut g = Self::from_local_pairs(dims, &local, &local);
        g.model = Some(*model);
        Ok(g)
    }

    /// Generator from explicit local jump operators applied identically to both
    /// subsystems (requires `d₁ = d₂`).
    pub fn from_local_jumps(dims: HilbertDims, local: &[(CMatrix, f64)]) -> Result<Self> {
        if dims.d1() != dims.d2() {
            return Err(Error::Domain("shared local jumps need d₁ = d₂".into()));
        }
        if local.iter().any(|(m, _)| m.shape() != (dims.d1(), dims.d1())) {
            return Err(Error::Domain("local jump operator has wrong shape".into()));
        }
        Ok(Self::from_local_pairs(dims, local, local))
    }

    fn from_local_pairs(dims: HilbertDims, first: &[(CMatrix, f64)], second: &[(CMatrix, f64)]) -> Self {
        let n = dims.total();
        let mut jumps = Vec::new();
        let mut k = CMatrix::zeros(n, n);
        let lifted = first
            .iter()
            .map(|(l, r)| (SparseOp::lift(l, dims, true), *r))
            .chain(second.iter().map(|(l, r)| (SparseOp::lift(l, dims, false), *r)));
        for (op, rate) in lifted {
            let dense = op.to_dense();
            k += (dense.adjoint() * &dense).scale(rate / 2.0);
            jumps.push(Jump { op, rate });
        }
        let mut local = first.to_vec();
        if dims.d1() != dims.d2() {
            local.extend_from_slice(second);
        }
        Self { dims, model: None, local, jumps, damping: SparseOp::from_dense(&k) }
    }

    pub fn dims(&self) -> HilbertDims {
        self.dims
    }

    pub fn model(&self) -> Option<&EnvironmentModel> {
        self.model.as_ref()
    }

    /// Local jump operators and rates the generator was built from.
    pub fn local_operators(&self) -> &[(CMatrix, f64)] {
        &self.local
    }

    /// `dρ/dt` for a raw `N×N` matrix.
    pub fn apply_matrix(&self, rho: &CMatrix) -> Result<CMatrix> {
        let n = self.dims.total();
        if rho.shape() != (n, n) {
            return Err(Error::Domain(format!(
                "matrix shape {:?} does not match generator dimension {n}",
                rho.shape()
            )));
        }
        let mut out = CMatrix::zeros(n, n);
        self.apply_into(rho, &mut out);
        Ok(out)
    }

    /// `dρ/dt` for a density matrix.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<CMatrix> {
        if rho.dims() != self.dims {
            return Err(Error::Domain("density matrix dimensions differ from generator".into()));
        }
        self.apply_matrix(rho.matrix())
    }

    pub(crate) fn apply_into(&self, rho: &CMatrix, out: &mut CMatrix) {
        let n = self.dims.total();
        out.fill(C64::new(0.0, 0.0));
        for jump in &self.jumps {
            let entries = &jump.op.entries;
            for &(p, r, v) in entries {
                let vr = v * jump.rate;
                for &(q, s, w) in entries {
                    out[(p, q)] += vr * rho[(r, s)] * w.conj();
                }
            }
        }
        for &(p, r, v) in &self.damping.entries {
            for q in 0..n {
                out[(p, q)] -= v * rho[(r, q)];
                out[(q, r)] -= rho[(q, p)] * v;
            }
        }
    }

    /// Dense superoperator acting on column-major `vec(ρ)` (index `i + N·j`).
    pub fn superoperator(&self) -> CMatrix {
        let n = self.dims.total();
        let mut s = CMatrix::zeros(n * n, n * n);
        let mut basis = CMatrix::zeros(n, n);
        let mut out = CMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                basis[(i, j)] = C64::new(1.0, 0.0);
                self.apply_into(&basis, &mut out);
                basis[(i, j)] = C64::new(0.0, 0.0);
                s.set_column(i + n * j, &CMatrix::from_column_slice(n * n, 1, out.as_slice()).column(0));
            }
        }
        s
    }
}

/// `(𝟙⊗𝓛 + 𝓛⊗𝟙)ρ`.
pub fn apply_generator(gen: &Generator, rho: &DensityMatrix) -> Result<CMatrix> {
    gen.apply(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::PureState;
    use crate::lindblad::model::annihilation;
    use crate::sampling::{random_density_matrix, rng_from_seed};

    fn dense_reference(gen: &Generator, rho: &CMatrix) -> CMatrix {
        // Straight transcription of Γ/2 (2LρL† − L†Lρ − ρL†L) with dense Kronecker lifts.
        let dims = gen.dims;
        let id1 = CMatrix::identity(dims.d1(), dims.d1());
        let id2 = CMatrix::identity(dims.d2(), dims.d2());
        let mut out = CMatrix::zeros(dims.total(), dims.total());
        for (l, rate) in gen.local_operators() {
            for lifted in [l.kronecker(&id2), id1.kronecker(l)] {
                let ld = lifted.adjoint();
                let k = &ld * &lifted;
                out += (&lifted * rho * &ld).scale(*rate) - (&k * rho + rho * &k).scale(rate / 2.0);
            }
        }
        out
    }

    #[test]
    fn sparse_application_matches_dense_formula() {
        let mut rng = rng_from_seed(11);
        for model in [
            EnvironmentModel::dephasing(0.8),
            EnvironmentModel::thermal(1.3, 0.4),
            EnvironmentModel::infinite_temperature(0.6),
        ] {
            for d in [2, 3, 4] {
                let dims = HilbertDims::square(d).unwrap();
                let gen = Generator::new(&model, dims).unwrap();
                let rho = random_density_matrix(dims, dims.total(), &mut rng).unwrap();
                let fast = gen.apply(&rho).unwrap();
                let slow = dense_reference(&gen, rho.matrix());
                assert!((fast - slow).camax() < 1e-13);
            }
        }
    }

    #[test]
    fn trace_is_preserved() {
        let mut rng = rng_from_seed(5);
        for d in 2..=5 {
            let dims = HilbertDims::square(d).unwrap();
            let gen = Generator::new(&EnvironmentModel::thermal(1.0, 0.3), dims).unwrap();
            for _ in 0..20 {
                let rho = random_density_matrix(dims, 3, &mut rng).unwrap();
                assert!(gen.apply(&rho).unwrap().trace().norm() < 1e-12);
            }
        }
    }

    #[test]
    fn dephasing_leaves_diagonal_states_fixed() {
        let dims = HilbertDims::square(3).unwrap();
        let gen = Generator::new(&EnvironmentModel::dephasing(2.0), dims).unwrap();
        let diag: Vec<f64> = (1..=9).map(|i| i as f64 / 45.0).collect();
        let mut m = CMatrix::zeros(9, 9);
        for (i, p) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(*p, 0.0);
        }
        let rho = DensityMatrix::new(dims, m).unwrap();
        assert!(gen.apply(&rho).unwrap().camax() <= 1e-13);
    }

    #[test]
    fn ground_state_is_fixed_at_zero_temperature() {
        let dims = HilbertDims::square(4).unwrap();
        let gen = Generator::new(&EnvironmentModel::zero_temperature(1.0), dims).unwrap();
        let ground = PureState::from_terms(dims, &[(C64::new(1.0, 0.0), 0, 0)]).unwrap();
        assert!(gen.apply(&ground.projector()).unwrap().camax() < 1e-15);
    }

    #[test]
    fn bell_coherence_rate_at_zero_temperature() {
        // d/dt ⟨01|ρ|10⟩ = −Γ/2 − Γ/2 times the initial coherence ½.
        let dims = HilbertDims::qubits();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = PureState::two_term(dims, C64::new(s, 0.0), C64::new(s, 0.0), (0, 1), (1, 0)).unwrap();
        let gen = Generator::new(&EnvironmentModel::zero_temperature(1.0), dims).unwrap();
        let drho = gen.apply(&psi.projector()).unwrap();
        assert!((drho[(1, 2)] - C64::new(-0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn thermal_zero_matches_dedicated_decay_path() {
        let dims = HilbertDims::square(3).unwrap();
        let via_model = Generator::new(&EnvironmentModel::thermal(0.9, 0.0), dims).unwrap();
        let direct = Generator::from_local_jumps(dims, &[(annihilation(3), 0.9)]).unwrap();
        let a = via_model.superoperator();
        let b = direct.superoperator();
        assert!((a - b).camax() <= 1e-14);
    }

    #[test]
    fn superoperator_matches_application() {
        let mut rng = rng_from_seed(3);
        let dims = HilbertDims::square(2).unwrap();
        let gen = Generator::new(&EnvironmentModel::thermal(1.0, 0.5), dims).unwrap();
        let rho = random_density_matrix(dims, 4, &mut rng).unwrap();
        let s = gen.superoperator();
        let v = CMatrix::from_column_slice(16, 1, rho.matrix().as_slice());
        let out = s * v;
        let direct = gen.apply(&rho).unwrap();
        assert!((CMatrix::from_column_slice(4, 4, out.as_slice()) - direct).camax() < 1e-14);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let gen = Generator::new(&EnvironmentModel::dephasing(1.0), HilbertDims::qubits()).unwrap();
        let rho = DensityMatrix::maximally_mixed(HilbertDims::square(3).unwrap());
        assert!(matches!(gen.apply(&rho), Err(Error::Domain(_))));
    }
}
