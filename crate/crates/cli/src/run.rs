use entdyn_core::concurrence::{
    block_concurrence, build_t, optimize_lower_bound, quasipure_concurrence, upper_convex_roof, wootters,
};
use entdyn_core::hilbert::{spectral, DEFAULT_CUTOFF};
use entdyn_core::lindblad::evolve_trajectory;
use entdyn_core::{CMatrix, DensityMatrix, Error};
use rayon::prelude::*;

use crate::config::{EstimatorId, NumericEstimator, Scenario};
use crate::error::Result;
use crate::oracle::OracleArgs;

/// One row of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesRecord {
    pub t: f64,
    /// One value per requested estimator, `NaN` where no trustworthy value exists.
    pub values: Vec<f64>,
    pub converged: Vec<bool>,
    pub valid: Vec<bool>,
    /// Eigenvalues of ρ(t) following their eigenvectors continuously in time,
    /// so `mu_i` stays on one branch through level crossings.
    pub eigenvalues: Vec<f64>,
    /// Largest population with a local index at the top level.
    pub boundary_pop: f64,
    pub boundary_ok: bool,
}

/// A complete run with its column layout.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub scenario: Scenario,
    pub estimators: Vec<EstimatorId>,
    pub n_eigenvalues: usize,
    pub records: Vec<TimeSeriesRecord>,
}

impl TimeSeries {
    /// `t`, `c_<est>`, `mu_i`, `boundary_pop`, then the 0/1 flag columns.
    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["t".to_string()];
        h.extend(self.estimators.iter().map(|e| format!("c_{e}")));
        h.extend((1..=self.n_eigenvalues).map(|i| format!("mu_{i}")));
        h.push("boundary_pop".into());
        h.extend(self.flag_names());
        h
    }

    /// Number of leading columns that hold real numbers; the rest are flags.
    pub fn n_value_columns(&self) -> usize {
        1 + self.estimators.len() + self.n_eigenvalues + 1
    }

    fn flag_names(&self) -> Vec<String> {
        let mut f: Vec<String> = self.estimators.iter().map(|e| format!("valid_{e}")).collect();
        f.extend(self.estimators.iter().map(|e| format!("converged_{e}")));
        f.push("valid_boundary".into());
        f
    }

    /// Row values in header order; flags become 0.0 / 1.0.
    pub fn row(&self, r: &TimeSeriesRecord) -> Vec<f64> {
        let flag = |b: bool| if b { 1.0 } else { 0.0 };
        let mut row = vec![r.t];
        row.extend(&r.values);
        row.extend(&r.eigenvalues);
        row.push(r.boundary_pop);
        row.extend(r.valid.iter().map(|&b| flag(b)));
        row.extend(r.converged.iter().map(|&b| flag(b)));
        row.push(flag(r.boundary_ok));
        row
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    fn index(&self, est: EstimatorId) -> Option<usize> {
        self.estimators.iter().position(|&e| e == est)
    }

    pub fn values(&self, est: EstimatorId) -> Option<Vec<f64>> {
        let i = self.index(est)?;
        Some(self.records.iter().map(|r| r.values[i]).collect())
    }

    pub fn valid(&self, est: EstimatorId) -> Option<Vec<bool>> {
        let i = self.index(est)?;
        Some(self.records.iter().map(|r| r.valid[i]).collect())
    }

    pub fn eigenvalue_branch(&self, branch: usize) -> Option<Vec<f64>> {
        (branch < self.n_eigenvalues).then(|| self.records.iter().map(|r| r.eigenvalues[branch]).collect())
    }
}

/// Output of a single estimator on a single state.
#[derive(Debug, Clone, Copy)]
struct Cell {
    value: f64,
    converged: bool,
    valid: bool,
}

impl Cell {
    fn exact(value: f64) -> Self {
        Self { value, converged: true, valid: value.is_finite() }
    }

    fn missing() -> Self {
        Self { value: f64::NAN, converged: false, valid: false }
    }
}

/// Propagates the scenario's state and evaluates every requested estimator at
/// every grid point. Deterministic for a fixed scenario (row `i` uses seed
/// `seed + i`).
pub fn run_scenario(scenario: &Scenario) -> Result<TimeSeries> {
    scenario.validate()?;
    let dims = scenario.hilbert_dims()?;
    let psi = scenario.state.build(dims)?;
    let model = scenario.model.build()?;
    let times = scenario.times()?;
    let oracle_args: Vec<Option<OracleArgs>> = scenario
        .estimators
        .iter()
        .map(|e| match e {
            EstimatorId::Oracle(o) => scenario.oracle_args(*o).map(Some),
            EstimatorId::Numeric(_) => Ok(None),
        })
        .collect::<Result<_>>()?;

    log::info!("scenario '{}': propagating {} points in dims {:?}", scenario.name, times.len(), scenario.dims);
    let traj = evolve_trajectory(&psi.projector(), &model, &times, &scenario.integrator.build())?;
    let branches = track_branches(&traj.states)?;

    log::info!("scenario '{}': evaluating {:?}", scenario.name, scenario.estimators);
    let cells: Vec<Vec<Cell>> = traj
        .states
        .par_iter()
        .enumerate()
        .map(|(row, rho)| {
            let seed = scenario.seed.wrapping_add(row as u64);
            scenario
                .estimators
                .iter()
                .zip(&oracle_args)
                .map(|(est, args)| match (est, args) {
                    (EstimatorId::Oracle(o), Some(a)) => Ok(Cell::exact(o.eval(a, traj.times[row])?)),
                    (EstimatorId::Numeric(n), _) => evaluate(*n, rho, scenario, seed),
                    (EstimatorId::Oracle(_), None) => unreachable!("oracle arguments resolved above"),
                })
                .collect::<Result<Vec<Cell>>>()
        })
        .collect::<Result<_>>()?;

    let n_eig = scenario.export.eigenvalues.unwrap_or(dims.total()).min(dims.total());
    let qp_col = scenario.estimators.iter().position(|&e| e == EstimatorId::QUASIPURE);
    let mut crossed = false;
    let mut records = Vec::with_capacity(times.len());
    for (row, mut cells) in cells.into_iter().enumerate() {
        let tracked = &branches[row];
        // the leading state must still be the one the run started on
        crossed |= tracked.leading_branch != 0;
        if let (Some(i), true) = (qp_col, crossed) {
            cells[i] = Cell::missing();
        }
        let rho = &traj.states[row];
        let boundary_pop = rho.boundary_population();
        records.push(TimeSeriesRecord {
            t: times[row],
            values: cells.iter().map(|c| c.value).collect(),
            converged: cells.iter().map(|c| c.converged).collect(),
            valid: cells.iter().map(|c| c.valid).collect(),
            eigenvalues: tracked.values[..n_eig].to_vec(),
            boundary_pop,
            boundary_ok: boundary_pop <= scenario.export.boundary_threshold,
        });
    }
    Ok(TimeSeries {
        scenario: scenario.clone(),
        estimators: scenario.estimators.clone(),
        n_eigenvalues: n_eig,
        records,
    })
}

fn evaluate(est: NumericEstimator, rho: &DensityMatrix, sc: &Scenario, seed: u64) -> Result<Cell> {
    Ok(match est {
        NumericEstimator::Wootters => Cell::exact(wootters(rho)?.value),
        NumericEstimator::Block => Cell::exact(block_concurrence(rho, sc.block_level())?.value),
        NumericEstimator::LowerOptimized => {
            let tset = build_t(&spectral(rho, DEFAULT_CUTOFF)?.subnormalized, rho.dims())?;
            let (est, _) = optimize_lower_bound(&tset, &sc.lower.build(seed))?;
            Cell { value: est.value, converged: est.converged, valid: true }
        }
        NumericEstimator::Upper => {
            let res = upper_convex_roof(rho, &sc.upper.build(seed))?;
            Cell { value: res.estimate.value, converged: res.estimate.converged, valid: true }
        }
        NumericEstimator::Quasipure => match quasipure_concurrence(rho, &sc.quasipure.build()) {
            Ok(qp) if qp.valid => Cell::exact(qp.estimate.value),
            Ok(_) | Err(Error::Degenerate(_)) => Cell::missing(),
            Err(e) => return Err(e.into()),
        },
    })
}

/// Eigenvalues of one state, arranged by branch.
#[derive(Debug, Clone)]
struct Tracked {
    values: Vec<f64>,
    /// Branch holding the largest eigenvalue.
    leading_branch: usize,
}

/// Follows eigenvectors from one grid point to the next by greedy maximal
/// overlap, so each branch keeps its identity through crossings.
fn track_branches(states: &[DensityMatrix]) -> Result<Vec<Tracked>> {
    let mut out = Vec::with_capacity(states.len());
    let mut prev: Option<CMatrix> = None;
    for rho in states {
        let (vals, vecs) = rho.eigen()?;
        let n = vals.len();
        let perm: Vec<usize> = match &prev {
            None => (0..n).collect(),
            Some(p) => match_columns(p, &vecs),
        };
        let values = perm.iter().map(|&j| vals[j]).collect();
        let leading_branch = perm.iter().position(|&j| j == 0).expect("perm is a permutation");
        let ordered = CMatrix::from_columns(&perm.iter().map(|&j| vecs.column(j).into_owned()).collect::<Vec<_>>());
        prev = Some(ordered);
        out.push(Tracked { values, leading_branch });
    }
    relabel(&mut out);
    Ok(out)
}

/// Orders branches by initial eigenvalue, breaking ties among initially
/// degenerate branches by their peak value along the run.
fn relabel(tracked: &mut [Tracked]) {
    let Some(first) = tracked.first() else { return };
    let n = first.values.len();
    let peak = |b: usize| tracked.iter().map(|t| t.values[b]).fold(f64::NEG_INFINITY, f64::max);
    let key = |b: usize| ((first.values[b] / 1e-10).round() as i64, peak(b));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (ka, kb) = (key(a), key(b));
        kb.0.cmp(&ka.0).then(kb.1.total_cmp(&ka.1)).then(a.cmp(&b))
    });
    let mut position = vec![0; n];
    for (new, &old) in order.iter().enumerate() {
        position[old] = new;
    }
    for t in tracked.iter_mut() {
        t.values = order.iter().map(|&b| t.values[b]).collect();
        t.leading_branch = position[t.leading_branch];
    }
}

/// `perm[b]` is the column of `next` assigned to column `b` of `prev`.
fn match_columns(prev: &CMatrix, next: &CMatrix) -> Vec<usize> {
    let n = prev.ncols();
    let overlap = prev.adjoint() * next;
    let mut pairs: Vec<(f64, usize, usize)> =
        (0..n).flat_map(|b| (0..n).map(move |j| (b, j))).map(|(b, j)| (overlap[(b, j)].norm_sqr(), b, j)).collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut perm = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for (_, b, j) in pairs {
        if perm[b] == usize::MAX && !taken[j] {
            perm[b] = j;
            taken[j] = true;
        }
    }
    perm
}
