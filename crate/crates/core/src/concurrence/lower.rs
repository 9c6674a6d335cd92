use rayon::prelude::*;

use crate::sampling::{random_unit_vector, substream};
use crate::{CMatrix, CVector, Error, Result, C64};

use super::tmatrix::TMatrixSet;
use super::{singular_value_bound, ConcurrenceEstimate, Estimator};

const UNIT_NORM_TOL: f64 = 1e-12;

/// A point `z` on the complex unit sphere over the `χ` indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ZVector {
    z: CVector,
}

impl ZVector {
    /// Accepts `z` only if `Σ|z_α|² = 1` within `1e-12`.
    pub fn new(z: CVector) -> Result<Self> {
        let norm = z.norm();
        if (norm * norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::Validation(format!("Z vector has squared norm {}, expected 1", norm * norm)));
        }
        Ok(Self { z })
    }

    /// Rescales any non-zero vector onto the unit sphere.
    pub fn normalized(z: CVector) -> Result<Self> {
        let norm = z.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Validation("cannot normalise a zero or non-finite Z vector".into()));
        }
        Ok(Self { z: z.unscale(norm) })
    }

    /// Unit mass on index `alpha`.
    pub fn unit(len: usize, alpha: usize) -> Result<Self> {
        if alpha >= len {
            return Err(Error::Domain(format!("α = {alpha} out of range for {len} χ indices")));
        }
        let mut z = CVector::zeros(len);
        z[alpha] = C64::new(1.0, 0.0);
        Ok(Self { z })
    }

    pub fn as_vector(&self) -> &CVector {
        &self.z
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }
}

/// Settings for [`optimize_lower_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundConfig {
    /// Number of random starting points, in addition to the deterministic ones.
    pub restarts: usize,
    /// Upper limit on refinement sweeps per start.
    pub max_iters: usize,
    /// A sweep gaining less than this shrinks the step.
    pub tol: f64,
    /// Refinement stops once the step drops below this.
    pub min_step: f64,
    pub seed: u64,
}

impl Default for LowerBoundConfig {
    fn default() -> Self {
        Self { restarts: 50, max_iters: 2000, tol: 1e-10, min_step: 1e-6, seed: 0 }
    }
}

pub(crate) fn sv_bound(m: &CMatrix) -> Result<f64> {
    if m.nrows() == 1 && m.ncols() == 1 {
        return Ok(m[(0, 0)].norm());
    }
    let svd = m
        .clone()
        .try_svd(false, false, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numeric("SVD did not converge".into()))?;
    Ok(singular_value_bound(svd.singular_values.as_slice()))
}

fn check_z(tset: &TMatrixSet, z: &ZVector) -> Result<()> {
    if z.len() != tset.len() {
        return Err(Error::Domain(format!("Z vector has {} entries, T set has {}", z.len(), tset.len())));
    }
    Ok(())
}

/// `max{𝒮₁ − Σ_{i>1} 𝒮ᵢ, 0}` for the singular values of `𝒯 = Σ_α z_α T^α`.
pub fn lower_bound_fixed_z(tset: &TMatrixSet, z: &ZVector) -> Result<ConcurrenceEstimate> {
    check_z(tset, z)?;
    let value = if tset.is_empty() { 0.0 } else { sv_bound(&tset.combine(z.as_vector().as_slice()))? };
    Ok(ConcurrenceEstimate::exact(value, Estimator::LowerFixedZ))
}

struct Refined {
    value: f64,
    z: CVector,
    sweeps: usize,
    converged: bool,
}

/// Derivative-free coordinate search on the sphere. The objective is
/// homogeneous of degree one in `z`, so it is evaluated as `f(𝒯)/‖z‖` on the
/// unnormalised iterate.
fn refine(tset: &TMatrixSet, start: CVector, cfg: &LowerBoundConfig) -> Result<Refined> {
    let mut z = start.unscale(start.norm());
    let mut m = tset.combine(z.as_slice());
    let mut norm_sqr = 1.0;
    let mut best = sv_bound(&m)?;
    let mut step = 0.5;
    let mut sweeps = 0;
    let directions = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0)];
    while step >= cfg.min_step && sweeps < cfg.max_iters {
        sweeps += 1;
        let before = best;
        for (alpha, t) in tset.mats.iter().enumerate() {
            for dir in directions {
                let delta = dir * step;
                let zn = z[alpha] + delta;
                let trial_norm_sqr = norm_sqr - z[alpha].norm_sqr() + zn.norm_sqr();
                if trial_norm_sqr <= 1e-30 {
                    continue;
                }
                let trial = &m + t.map(|x| x * delta);
                let value = sv_bound(&trial)? / trial_norm_sqr.sqrt();
                if value > best + 1e-15 {
                    best = value;
                    m = trial;
                    z[alpha] = zn;
                    norm_sqr = trial_norm_sqr;
                }
            }
        }
        let scale = norm_sqr.sqrt();
        z.unscale_mut(scale);
        m.unscale_mut(scale);
        norm_sqr = 1.0;
        if best - before < cfg.tol {
            step /= 4.0;
        }
    }
    Ok(Refined { value: best, z, sweeps, converged: step < cfg.min_step })
}

/// Maximises the fixed-`z` bound over the unit sphere.
///
/// Starting points are the best single-`α` direction, the direction
/// `z_α ∝ (T^α_{11})*` aligned with the leading decomposition vector, and
/// `cfg.restarts` random complex Gaussian points. Each is refined in parallel
/// and the best result wins, ties going to the earliest start.
pub fn optimize_lower_bound(tset: &TMatrixSet, cfg: &LowerBoundConfig) -> Result<(ConcurrenceEstimate, ZVector)> {
    let n = tset.len();
    if n == 0 || tset.size() == 0 {
        let z = if n == 0 { ZVector { z: CVector::zeros(0) } } else { ZVector::unit(n, 0)? };
        return Ok((ConcurrenceEstimate::exact(0.0, Estimator::LowerOptimized), z));
    }

    let mut best_unit = (0usize, f64::NEG_INFINITY);
    for (alpha, t) in tset.mats.iter().enumerate() {
        let v = sv_bound(t)?;
        if v > best_unit.1 {
            best_unit = (alpha, v);
        }
    }
    let mut starts = vec![ZVector::unit(n, best_unit.0)?.z];
    let aligned = CVector::from_iterator(n, tset.mats.iter().map(|t| t[(0, 0)].conj()));
    if aligned.norm() > 0.0 {
        starts.push(aligned);
    }
    for i in 0..cfg.restarts {
        let mut rng = substream(cfg.seed, i as u64);
        starts.push(random_unit_vector(n, &mut rng));
    }

    let results: Vec<Refined> = starts.into_par_iter().map(|s| refine(tset, s, cfg)).collect::<Result<_>>()?;
    let mut best_idx = 0;
    for (i, r) in results.iter().enumerate() {
        if r.value > results[best_idx].value {
            best_idx = i;
        }
    }
    let iterations = results.iter().map(|r| r.sweeps).sum();
    let best = &results[best_idx];
    log::debug!("lower bound {:.6e} from start {best_idx} of {}", best.value, results.len());
    let estimate = ConcurrenceEstimate {
        value: best.value.max(0.0),
        estimator: Estimator::LowerOptimized,
        iterations,
        converged: best.converged,
    };
    Ok((estimate, ZVector::normalized(best.z.clone())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concurrence::{build_t, pure_concurrence, wootters};
    use crate::hilbert::{spectral, HilbertDims, PureState};
    use crate::sampling::{random_density_matrix, random_pure_state, rng_from_seed};

    fn fast() -> LowerBoundConfig {
        LowerBoundConfig { restarts: 8, ..Default::default() }
    }

    #[test]
    fn zvector_validation() {
        assert!(ZVector::new(CVector::from_element(2, C64::new(1.0, 0.0))).is_err());
        assert!(ZVector::normalized(CVector::zeros(3)).is_err());
        let z = ZVector::normalized(CVector::from_element(4, C64::new(0.0, 2.0))).unwrap();
        assert!((z.as_vector().norm() - 1.0).abs() < 1e-15);
        assert!(ZVector::unit(3, 3).is_err());
    }

    #[test]
    fn pure_state_unit_z_recovers_concurrence() {
        let dims = HilbertDims::qubits();
        let psi = PureState::two_term(dims, C64::new(0.6, 0.0), C64::new(0.8, 0.0), (0, 1), (1, 0)).unwrap();
        let tset = build_t(&[psi.amplitudes().clone()], dims).unwrap();
        let v = lower_bound_fixed_z(&tset, &ZVector::unit(1, 0).unwrap()).unwrap().value;
        assert!((v - pure_concurrence(&psi).value).abs() < 1e-15);
    }

    #[test]
    fn pure_state_optimum_is_exact() {
        let mut rng = rng_from_seed(31);
        let dims = HilbertDims::square(3).unwrap();
        let psi = random_pure_state(dims, &mut rng);
        let tset = build_t(&[psi.amplitudes().clone()], dims).unwrap();
        let (est, z) = optimize_lower_bound(&tset, &fast()).unwrap();
        assert!((est.value - pure_concurrence(&psi).value).abs() < 1e-8);
        assert!((z.as_vector().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_qubit_optimum_matches_wootters() {
        let mut rng = rng_from_seed(32);
        for rank in 1..=4 {
            let rho = random_density_matrix(HilbertDims::qubits(), rank, &mut rng).unwrap();
            let sd = spectral(&rho, 1e-12).unwrap();
            let tset = build_t(&sd.subnormalized, rho.dims()).unwrap();
            let (est, _) = optimize_lower_bound(&tset, &fast()).unwrap();
            assert!((est.value - wootters(&rho).unwrap().value).abs() < 1e-6);
        }
    }

    #[test]
    fn optimum_dominates_fixed_z() {
        let mut rng = rng_from_seed(33);
        let dims = HilbertDims::square(3).unwrap();
        let rho = random_density_matrix(dims, 2, &mut rng).unwrap();
        let sd = spectral(&rho, 1e-12).unwrap();
        let tset = build_t(&sd.subnormalized, dims).unwrap();
        let (best, _) = optimize_lower_bound(&tset, &fast()).unwrap();
        for alpha in 0..tset.len() {
            let v = lower_bound_fixed_z(&tset, &ZVector::unit(tset.len(), alpha).unwrap()).unwrap().value;
            assert!(v <= best.value + 1e-12);
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let mut rng = rng_from_seed(34);
        let dims = HilbertDims::square(3).unwrap();
        let rho = random_density_matrix(dims, 3, &mut rng).unwrap();
        let tset = build_t(&spectral(&rho, 1e-12).unwrap().subnormalized, dims).unwrap();
        let a = optimize_lower_bound(&tset, &fast()).unwrap();
        let b = optimize_lower_bound(&tset, &fast()).unwrap();
        assert_eq!(a.0.value, b.0.value);
        assert_eq!(a.1, b.1);
    }

    #[test]
    fn length_mismatch_rejected() {
        let dims = HilbertDims::square(3).unwrap();
        let psi = PureState::from_terms(dims, &[(C64::new(1.0, 0.0), 0, 0)]).unwrap();
        let tset = build_t(&[psi.amplitudes().clone()], dims).unwrap();
        assert!(lower_bound_fixed_z(&tset, &ZVector::unit(2, 0).unwrap()).is_err());
    }
}
