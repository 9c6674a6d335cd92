use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{
    Amplitude, EstimatorId, ExportSpec, IntegratorSpec, LowerSpec, ModelKind, ModelSpec, QuasiPureSpec, Scenario,
    StateSpec, TimeSpec, UpperSpec,
};
use crate::error::{CliError, Result};
use crate::export::{export, table_bytes, write_atomic, Format};
use crate::fit::{fit_exponent, ExponentFit};
use crate::oracle::OracleId;
use crate::run::{run_scenario, TimeSeries};

/// Grid sizes and seed shared by the canned bundles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BundleOptions {
    pub n_points: usize,
    /// Grid of the fig1 run that carries the numerical bounds.
    pub bounds_points: usize,
    pub seed: u64,
}

impl Default for BundleOptions {
    fn default() -> Self {
        Self { n_points: 200, bounds_points: 31, seed: 0 }
    }
}

fn base(name: String, d: usize, state: StateSpec, model: ModelSpec, t_max: f64, n_points: usize) -> Scenario {
    Scenario {
        name,
        dims: [d, d],
        state,
        model,
        time: TimeSpec { t_max, n_points },
        estimators: Vec::new(),
        seed: 0,
        integrator: IntegratorSpec::default(),
        lower: LowerSpec::default(),
        upper: UpperSpec::default(),
        quasipure: QuasiPureSpec::default(),
        block: Default::default(),
        export: ExportSpec::default(),
    }
}

fn model(kind: ModelKind, nbar: f64) -> ModelSpec {
    ModelSpec { kind, gamma: 1.0, nbar, ladder: Default::default() }
}

fn psi_plus() -> StateSpec {
    StateSpec::Bell { bell: "psi_plus".into() }
}

/// `(|1m⟩ + |m1⟩)/√2` with `m = d − 1`.
fn fig1_state(d: usize) -> StateSpec {
    let s = Amplitude::Real(std::f64::consts::FRAC_1_SQRT_2);
    StateSpec::TwoTerm { a: s, b: s, m: [1, d - 1], n: [d - 1, 1] }
}

pub const FIG1_T_MAX: f64 = 1.5;
pub const FIG1_DIMS: std::ops::RangeInclusive<usize> = 3..=7;

/// Quasi-pure runs for `d = 3..7` followed by the `d = 3` run with both bounds.
pub fn fig1_scenarios(opts: &BundleOptions) -> Vec<Scenario> {
    let zero_t = model(ModelKind::ZeroTemperature, 0.0);
    let mut out: Vec<Scenario> = FIG1_DIMS
        .map(|d| Scenario {
            estimators: vec![EstimatorId::QUASIPURE],
            seed: opts.seed,
            ..base(format!("fig1_d{d}"), d, fig1_state(d), zero_t.clone(), FIG1_T_MAX, opts.n_points)
        })
        .collect();
    out.push(Scenario {
        estimators: vec![EstimatorId::LOWER, EstimatorId::QUASIPURE, EstimatorId::UPPER],
        seed: opts.seed,
        ..base("fig1_d3_bounds".into(), 3, fig1_state(3), zero_t, FIG1_T_MAX, opts.bounds_points)
    });
    out
}

/// A fitted exponent with the rate it is compared against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRow {
    pub run: String,
    pub estimator: String,
    pub d: usize,
    pub expected_rate: Option<f64>,
    pub fit: Option<ExponentFit>,
}

impl FitRow {
    pub fn relative_error(&self) -> Option<f64> {
        Some((self.fit?.rate - self.expected_rate?).abs() / self.expected_rate?)
    }
}

#[derive(Debug, Clone)]
pub struct Fig1Bundle {
    pub runs: Vec<TimeSeries>,
    pub fits: Vec<FitRow>,
}

impl Fig1Bundle {
    pub fn run(&self, name: &str) -> Option<&TimeSeries> {
        self.runs.iter().find(|r| r.scenario.name == name)
    }

    pub fn fit(&self, run: &str, estimator: EstimatorId) -> Option<&FitRow> {
        self.fits.iter().find(|f| f.run == run && f.estimator == estimator.name())
    }
}

/// Fits over the rows an estimator is valid on.
fn fit_row(series: &TimeSeries, est: EstimatorId, expected_rate: Option<f64>) -> Option<FitRow> {
    let values = series.values(est)?;
    let keep = series.valid(est)?;
    Some(FitRow {
        run: series.scenario.name.clone(),
        estimator: est.name().into(),
        d: series.scenario.dims[0],
        expected_rate,
        fit: fit_exponent(&series.times(), &values, &keep),
    })
}

pub fn scenario_fig1(opts: &BundleOptions) -> Result<Fig1Bundle> {
    let runs: Vec<TimeSeries> = fig1_scenarios(opts).par_iter().map(run_scenario).collect::<Result<_>>()?;
    let mut fits = Vec::new();
    for series in &runs {
        let d = series.scenario.dims[0] as f64;
        fits.extend(fit_row(series, EstimatorId::QUASIPURE, Some(d)));
        fits.extend(fit_row(series, EstimatorId::LOWER, None));
        fits.extend(fit_row(series, EstimatorId::UPPER, Some(2.0)));
    }
    Ok(Fig1Bundle { runs, fits })
}

fn opt(x: Option<f64>) -> String {
    x.map(crate::export::format_float).unwrap_or_default()
}

pub fn fits_bytes(fits: &[FitRow]) -> Result<Vec<u8>> {
    let header: Vec<String> =
        ["run", "estimator", "d", "fitted_rate", "expected_rate", "relative_error", "points", "t_first", "t_last"]
            .map(String::from)
            .to_vec();
    let rows = fits.iter().map(|f| {
        vec![
            f.run.clone(),
            f.estimator.clone(),
            f.d.to_string(),
            opt(f.fit.map(|x| x.rate)),
            opt(f.expected_rate),
            opt(f.relative_error()),
            f.fit.map(|x| x.points.to_string()).unwrap_or_default(),
            opt(f.fit.map(|x| x.t_first)),
            opt(f.fit.map(|x| x.t_last)),
        ]
    });
    table_bytes(&header, rows)
}

fn write_runs(runs: &[TimeSeries], out: &Path, format: Format) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    runs.iter()
        .map(|s| {
            let path = out.join(format!("{}.{}", s.scenario.name, format.extension()));
            export(s, format, &path)?;
            Ok(path)
        })
        .collect()
}

/// One file per run plus `fig1_summary.csv` of fitted exponents.
pub fn write_fig1(bundle: &Fig1Bundle, out: &Path, format: Format) -> Result<Vec<PathBuf>> {
    let mut paths = write_runs(&bundle.runs, out, format)?;
    let summary = out.join("fig1_summary.csv");
    write_atomic(&summary, &fits_bytes(&bundle.fits)?)?;
    paths.push(summary);
    Ok(paths)
}

pub const FIG2_D: usize = 8;
pub const FIG2_NBARS: [f64; 2] = [0.1, 0.2];
pub const FIG2_T_MAX: f64 = 1.0;
pub const FIG2_INFINITE_T_MAX: f64 = 0.06;
/// Window on which the qudit curve is compared with the qubit curve.
pub const FIG2_WINDOW: (f64, f64) = (0.05, 0.5);

fn nbar_tag(nbar: f64) -> String {
    format!("nbar{nbar}").replace('.', "p")
}

/// Qubit and `d = 8` thermal runs for each `n̄`, then infinite- and zero-temperature
/// qudit runs, all from `Ψ⁺` and each with the matching closed-form overlay.
pub fn fig2_scenarios(opts: &BundleOptions) -> Vec<Scenario> {
    let mut out = Vec::new();
    let n = opts.n_points;
    for nbar in FIG2_NBARS {
        let tag = nbar_tag(nbar);
        let thermal = model(ModelKind::Thermal, nbar);
        out.push(Scenario {
            estimators: vec![EstimatorId::WOOTTERS, EstimatorId::Oracle(OracleId::BellThermal)],
            seed: opts.seed,
            ..base(format!("fig2_qubit_{tag}"), 2, psi_plus(), thermal.clone(), FIG2_T_MAX, n)
        });
        out.push(Scenario {
            estimators: vec![EstimatorId::QUASIPURE, EstimatorId::Oracle(OracleId::BellThermal)],
            seed: opts.seed,
            ..base(format!("fig2_d{FIG2_D}_{tag}"), FIG2_D, psi_plus(), thermal, FIG2_T_MAX, n)
        });
    }
    out.push(Scenario {
        estimators: vec![EstimatorId::QUASIPURE, EstimatorId::Oracle(OracleId::BellInfiniteTemperature)],
        seed: opts.seed,
        ..base(
            format!("fig2_d{FIG2_D}_infinite"),
            FIG2_D,
            psi_plus(),
            model(ModelKind::InfiniteTemperature, 0.0),
            FIG2_INFINITE_T_MAX,
            n,
        )
    });
    out.push(Scenario {
        estimators: vec![EstimatorId::QUASIPURE, EstimatorId::Oracle(OracleId::BellZeroTemperature)],
        seed: opts.seed,
        ..base(
            format!("fig2_d{FIG2_D}_zero"),
            FIG2_D,
            psi_plus(),
            model(ModelKind::ZeroTemperature, 0.0),
            FIG2_T_MAX,
            n,
        )
    });
    out
}

/// Comparison of the qudit quasi-pure curve with the qubit closed form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig2Check {
    pub run: String,
    pub nbar: Option<f64>,
    /// Rows inside the comparison window.
    pub rows: usize,
    /// Rows where the quasi-pure value is valid.
    pub valid_rows: usize,
    /// `max(qp − closed form)` over valid rows in the window.
    pub max_excess: f64,
    /// Largest boundary population over the run.
    pub max_boundary_pop: f64,
    /// Whether every row passes the boundary gate.
    pub boundary_ok: bool,
}

#[derive(Debug, Clone)]
pub struct Fig2Bundle {
    pub runs: Vec<TimeSeries>,
    pub checks: Vec<Fig2Check>,
}

impl Fig2Bundle {
    pub fn run(&self, name: &str) -> Option<&TimeSeries> {
        self.runs.iter().find(|r| r.scenario.name == name)
    }
}

fn fig2_check(series: &TimeSeries, overlay: OracleId, window: (f64, f64)) -> Option<Fig2Check> {
    let qp = series.values(EstimatorId::QUASIPURE)?;
    let valid = series.valid(EstimatorId::QUASIPURE)?;
    let exact = series.values(EstimatorId::Oracle(overlay))?;
    let times = series.times();
    let inside: Vec<usize> = (0..times.len()).filter(|&i| times[i] > window.0 && times[i] <= window.1).collect();
    let valid_rows: Vec<usize> = inside.iter().copied().filter(|&i| valid[i]).collect();
    let max_excess = valid_rows.iter().map(|&i| qp[i] - exact[i]).fold(f64::NEG_INFINITY, f64::max);
    Some(Fig2Check {
        run: series.scenario.name.clone(),
        nbar: (series.scenario.model.kind == ModelKind::Thermal).then_some(series.scenario.model.nbar),
        rows: inside.len(),
        valid_rows: valid_rows.len(),
        max_excess,
        max_boundary_pop: series.records.iter().map(|r| r.boundary_pop).fold(0.0, f64::max),
        boundary_ok: series.records.iter().all(|r| r.boundary_ok),
    })
}

pub fn scenario_fig2(opts: &BundleOptions) -> Result<Fig2Bundle> {
    let runs: Vec<TimeSeries> = fig2_scenarios(opts).par_iter().map(run_scenario).collect::<Result<_>>()?;
    let checks = runs
        .iter()
        .filter(|s| s.scenario.dims[0] == FIG2_D)
        .filter_map(|s| match s.scenario.model.kind {
            ModelKind::Thermal => fig2_check(s, OracleId::BellThermal, FIG2_WINDOW),
            ModelKind::InfiniteTemperature => {
                fig2_check(s, OracleId::BellInfiniteTemperature, (0.0, FIG2_INFINITE_T_MAX))
            }
            _ => fig2_check(s, OracleId::BellZeroTemperature, FIG2_WINDOW),
        })
        .collect();
    Ok(Fig2Bundle { runs, checks })
}

pub fn checks_bytes(checks: &[Fig2Check]) -> Result<Vec<u8>> {
    let header: Vec<String> = ["run", "nbar", "rows", "valid_rows", "max_excess", "max_boundary_pop", "boundary_ok"]
        .map(String::from)
        .to_vec();
    let rows = checks.iter().map(|c| {
        vec![
            c.run.clone(),
            opt(c.nbar),
            c.rows.to_string(),
            c.valid_rows.to_string(),
            crate::export::format_float(c.max_excess),
            crate::export::format_float(c.max_boundary_pop),
            u8::from(c.boundary_ok).to_string(),
        ]
    });
    table_bytes(&header, rows)
}

/// One file per run plus `fig2_summary.csv`.
pub fn write_fig2(bundle: &Fig2Bundle, out: &Path, format: Format) -> Result<Vec<PathBuf>> {
    let mut paths = write_runs(&bundle.runs, out, format)?;
    let summary = out.join("fig2_summary.csv");
    write_atomic(&summary, &checks_bytes(&bundle.checks)?)?;
    paths.push(summary);
    Ok(paths)
}
