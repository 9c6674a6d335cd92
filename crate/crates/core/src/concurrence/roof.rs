use std::f64::consts::PI;

use rayon::prelude::*;

use crate::hilbert::{spectral, DensityMatrix, HilbertDims, DEFAULT_CUTOFF};
use crate::sampling::{random_unitary, substream};
use crate::{CMatrix, CVector, Error, Result, C64};

use super::tmatrix::{all_terms, bilinear, pure_concurrence_vec, Terms};
use super::{ConcurrenceEstimate, Estimator};

/// Cap on pattern-search moves per pair rotation.
const MAX_LINE_STEPS: usize = 200;

/// Smoothing scales visited in turn; the last stage is the exact objective.
const SMOOTHING: &[f64] = &[1e-2, 1e-3, 1e-4, 1e-5, 0.0];

/// Settings for [`upper_convex_roof`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexRoofConfig {
    /// Columns added on top of `rank(ρ)` when `ensemble_size` is unset.
    pub extra_columns: usize,
    /// Fixed ensemble size; must be at least `rank(ρ)`.
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    /// Restarts carried past the first smoothing stage, chosen by value.
    pub polish: usize,
    pub max_sweeps: usize,
    /// A sweep lowering the average by less than this ends the restart.
    pub tol: f64,
    /// Points per axis of the `(θ, ϕ)` grid scanned for each pair rotation.
    pub theta_grid: usize,
    pub phase_grid: usize,
    pub seed: u64,
}

impl Default for ConvexRoofConfig {
    fn default() -> Self {
        Self {
            extra_columns: 2,
            ensemble_size: None,
            restarts: 20,
            polish: 4,
            max_sweeps: 500,
            tol: 1e-10,
            theta_grid: 12,
            phase_grid: 8,
            seed: 0,
        }
    }
}

/// Outcome of the convex-roof search.
#[derive(Debug, Clone)]
pub struct RoofResult {
    pub estimate: ConcurrenceEstimate,
    /// Final value of every restart, in restart order. Restarts that were not
    /// polished report their value after the first stage.
    pub restart_values: Vec<f64>,
    /// Best decomposition found, as subnormalised vectors.
    pub decomposition: Vec<CVector>,
}

/// `Σᵢ c(φᵢ)` for subnormalised vectors `φᵢ`.
pub fn average_concurrence(decomp: &[CVector], dims: HilbertDims) -> Result<f64> {
    let mut sum = 0.0;
    for phi in decomp {
        dims.check_len(phi.len(), "decomposition vector")?;
        sum += pure_concurrence_vec(phi.as_slice(), dims);
    }
    Ok(sum)
}

/// `√(x² + ε²)`, which rounds off the kink of the objective at `c = 0`.
fn smooth(x: f64, eps: f64) -> f64 {
    if eps == 0.0 {
        x
    } else {
        x.hypot(eps)
    }
}

fn norm_of(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Concurrences of the rotated pair
/// `φp' = cφp + s e^{iϕ}φq`, `φq' = −s e^{−iϕ}φp + cφq`
/// from the precomputed bilinear values `T_pp`, `T_pq`, `T_qq`.
struct PairForm<'a> {
    tpp: &'a [C64],
    tpq: &'a [C64],
    tqq: &'a [C64],
    buf_p: Vec<C64>,
    buf_q: Vec<C64>,
    eps: f64,
}

impl PairForm<'_> {
    fn value(&mut self, theta: f64, phase: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        let e = C64::from_polar(1.0, phase);
        let (a_pp, a_pq, a_qq) = (C64::new(c * c, 0.0), e * (2.0 * c * s), e * e * (s * s));
        let ec = e.conj();
        let (b_pp, b_pq, b_qq) = (ec * ec * (s * s), -ec * (2.0 * c * s), C64::new(c * c, 0.0));
        for i in 0..self.tpp.len() {
            self.buf_p[i] = a_pp * self.tpp[i] + a_pq * self.tpq[i] + a_qq * self.tqq[i];
            self.buf_q[i] = b_pp * self.tpp[i] + b_pq * self.tpq[i] + b_qq * self.tqq[i];
        }
        smooth(norm_of(&self.buf_p), self.eps) + smooth(norm_of(&self.buf_q), self.eps)
    }
}

struct Search<'a> {
    terms: &'a [Terms],
    cfg: &'a ConvexRoofConfig,
}

struct Restart {
    value: f64,
    phis: Vec<CVector>,
    sweeps: usize,
    converged: bool,
}

impl Search<'_> {
    fn forms(&self, p: &CVector, q: &CVector) -> (Vec<C64>, Vec<C64>, Vec<C64>) {
        let (p, q) = (p.as_slice(), q.as_slice());
        let tpp = self.terms.iter().map(|t| bilinear(t, p, p)).collect();
        let tpq = self.terms.iter().map(|t| bilinear(t, p, q)).collect();
        let tqq = self.terms.iter().map(|t| bilinear(t, q, q)).collect();
        (tpp, tpq, tqq)
    }

    /// Best `(θ, ϕ, value)` for one pair: grid scan followed by pattern search.
    fn best_rotation(&self, form: &mut PairForm<'_>, current: f64, scan: bool) -> (f64, f64, f64) {
        let nt = self.cfg.theta_grid.max(1);
        let np = self.cfg.phase_grid.max(1);
        let mut best = (0.0, 0.0, current);
        for i in (0..nt).filter(|_| scan) {
            let theta = i as f64 * PI / (2.0 * nt as f64);
            for j in 0..np {
                let phase = j as f64 * 2.0 * PI / np as f64;
                let v = form.value(theta, phase);
                if v < best.2 {
                    best = (theta, phase, v);
                }
            }
        }
        let (mut ht, mut hp) = if scan { (PI / (4.0 * nt as f64), PI / np as f64) } else { (1e-2, 1e-2) };
        let mut steps = 0;
        while (ht > 1e-9 || hp > 1e-9) && steps < MAX_LINE_STEPS {
            steps += 1;
            let (theta, phase, value) = best;
            let mut moved = false;
            for (dt, dp) in [(ht, 0.0), (-ht, 0.0), (0.0, hp), (0.0, -hp)] {
                let v = form.value(theta + dt, phase + dp);
                if v < best.2 {
                    best = (theta + dt, phase + dp, v);
                    moved = true;
                }
            }
            if !moved || value - best.2 < 1e-15 {
                ht /= 2.0;
                hp /= 2.0;
            }
        }
        best
    }

    /// First, most strongly smoothed stage only.
    fn run_coarse(&self, mut phis: Vec<CVector>, dims: HilbertDims) -> Restart {
        let (sweeps, converged) = self.stage(&mut phis, dims, SMOOTHING[0], self.cfg.max_sweeps);
        let value = phis.iter().map(|p| pure_concurrence_vec(p.as_slice(), dims)).sum();
        Restart { value, phis, sweeps, converged }
    }

    /// Runs the smoothing stages `SMOOTHING[from..]` on `phis`.
    fn run(&self, mut phis: Vec<CVector>, dims: HilbertDims, from: usize, mut sweeps: usize) -> Restart {
        let mut converged = false;
        for &eps in &SMOOTHING[from..] {
            let (n, done) = self.stage(&mut phis, dims, eps, self.cfg.max_sweeps.saturating_sub(sweeps));
            sweeps += n;
            converged = done;
        }
        let value = phis.iter().map(|p| pure_concurrence_vec(p.as_slice(), dims)).sum();
        Restart { value, phis, sweeps, converged }
    }

    /// Pair sweeps on the objective smoothed at scale `eps`, returning the
    /// number of sweeps and whether the last one gained less than `tol`.
    fn stage(&self, phis: &mut [CVector], dims: HilbertDims, eps: f64, budget: usize) -> (usize, bool) {
        let k = phis.len();
        let mut values: Vec<f64> = phis.iter().map(|p| smooth(pure_concurrence_vec(p.as_slice(), dims), eps)).collect();
        let mut total: f64 = values.iter().sum();
        let mut sweeps = 0;
        while sweeps < budget {
            sweeps += 1;
            let before = total;
            for p in 0..k {
                for q in p + 1..k {
                    let (tpp, tpq, tqq) = self.forms(&phis[p], &phis[q]);
                    let n = tpp.len();
                    let mut form = PairForm {
                        tpp: &tpp,
                        tpq: &tpq,
                        tqq: &tqq,
                        buf_p: vec![C64::default(); n],
                        buf_q: vec![C64::default(); n],
                        eps,
                    };
                    let current = values[p] + values[q];
                    let (theta, phase, v) = self.best_rotation(&mut form, current, sweeps == 1);
                    if v < current - 1e-15 {
                        let (s, c) = theta.sin_cos();
                        let e = C64::from_polar(1.0, phase);
                        let new_p = phis[p].scale(c) + &phis[q] * (e * s);
                        let new_q = &phis[p] * (-e.conj() * s) + phis[q].scale(c);
                        phis[p] = new_p;
                        phis[q] = new_q;
                        values[p] = smooth(pure_concurrence_vec(phis[p].as_slice(), dims), eps);
                        values[q] = smooth(pure_concurrence_vec(phis[q].as_slice(), dims), eps);
                    }
                }
            }
            total = values.iter().sum();
            let tol = if eps > 0.0 { self.cfg.tol.max(eps * 1e-4) } else { self.cfg.tol };
            if before - total < tol {
                return (sweeps, true);
            }
        }
        (sweeps, false)
    }
}

/// Upper bound on the concurrence from a numerically optimised decomposition.
///
/// Decompositions `φ_j = Σᵢ V_{ji} ψᵢ` are generated from the subnormalised
/// eigenvectors `ψᵢ` by a `K×r` isometry `V`. Restart 0 starts from the
/// spectral decomposition itself and the others from Haar-random isometries.
/// Each sweep visits every column pair and applies the best `SU(2)` rotation,
/// so `Σ φ_j φ_j† = ρ` holds exactly throughout. The objective is first
/// smoothed as `Σ √(c_j² + ε²)` with decreasing `ε`; all restarts run the
/// coarsest stage and the best `polish` of them continue to the exact one.
pub fn upper_convex_roof(rho: &DensityMatrix, cfg: &ConvexRoofConfig) -> Result<RoofResult> {
    let dims = rho.dims();
    let sd = spectral(rho, DEFAULT_CUTOFF)?;
    let r = sd.rank();
    if r == 0 {
        return Err(Error::Validation("density matrix has no eigenvalue above the cutoff".into()));
    }
    let k = match cfg.ensemble_size {
        Some(k) if k < r => {
            return Err(Error::Configuration(format!("ensemble size {k} is below rank(ρ) = {r}")));
        }
        Some(k) => k,
        None => r + cfg.extra_columns,
    };
    let restarts = cfg.restarts.max(1);
    let psi = CMatrix::from_columns(&sd.subnormalized);
    let terms = all_terms(dims);
    let search = Search { terms: &terms, cfg };

    let coarse: Vec<Restart> = (0..restarts)
        .into_par_iter()
        .map(|i| {
            let v = if i == 0 {
                CMatrix::identity(k, r)
            } else {
                let mut rng = substream(cfg.seed, i as u64);
                random_unitary(k, &mut rng).columns(0, r).into_owned()
            };
            let phi = &psi * v.transpose();
            let phis = phi.column_iter().map(|c| c.into_owned()).collect();
            search.run_coarse(phis, dims)
        })
        .collect();

    let mut order: Vec<usize> = (0..restarts).collect();
    order.sort_by(|&a, &b| coarse[a].value.total_cmp(&coarse[b].value));
    let keep: Vec<usize> = order.into_iter().take(cfg.polish.max(1)).collect();
    let mut results = coarse;
    let polished: Vec<(usize, Restart)> = keep
        .par_iter()
        .map(|&i| {
            let start = &results[i];
            (i, search.run(start.phis.clone(), dims, 1, start.sweeps))
        })
        .collect();
    for (i, res) in polished {
        results[i] = res;
    }

    let mut best = 0;
    for (i, res) in results.iter().enumerate() {
        if res.value < results[best].value {
            best = i;
        }
    }
    let restart_values = results.iter().map(|res| res.value).collect();
    let iterations = results.iter().map(|res| res.sweeps).sum();
    let winner = results.into_iter().nth(best).expect("at least one restart");
    log::debug!("convex roof {:.6e} from restart {best} of {restarts}", winner.value);
    Ok(RoofResult {
        estimate: ConcurrenceEstimate {
            value: winner.value,
            estimator: Estimator::UpperConvexRoof,
            iterations,
            converged: winner.converged,
        },
        restart_values,
        decomposition: winner.phis,
    })
}
