use crate::hilbert::{hermitian_part, DensityMatrix, HilbertDims, PSD_TOL};
use crate::{CMatrix, Error, Result};

use super::expm::expm;
use super::generator::Generator;
use super::model::EnvironmentModel;

/// Largest total dimension for which the dense superoperator backend is allowed.
pub const MAX_SUPEROPERATOR_DIM: usize = 16;

/// Deviation from trace one / Hermiticity / positivity that aborts a propagation.
pub const INTEGRITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Backend {
    /// RK4 with step-doubling error control.
    AdaptiveRk4,
    /// Classical RK4 with a fixed maximal step.
    FixedRk4 { step: f64 },
    /// `exp(t 𝓢) vec(ρ₀)` with the dense superoperator 𝓢 (`N ≤ 16`).
    SuperoperatorExp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub backend: Backend,
    /// Absolute per-step error target (max-entry norm) for the adaptive backend.
    pub abs_tol: f64,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            backend: Backend::AdaptiveRk4,
            abs_tol: 1e-10,
            initial_step: 1e-3,
            min_step: 1e-12,
            max_steps: 10_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn superoperator() -> Self {
        Self { backend: Backend::SuperoperatorExp, ..Self::default() }
    }

    pub fn fixed_rk4(step: f64) -> Self {
        Self { backend: Backend::FixedRk4 { step }, ..Self::default() }
    }
}

/// Propagated states on a time grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub model: EnvironmentModel,
    pub initial: DensityMatrix,
}

/// Time stepper bound to one generator. The adaptive step size carries over
/// between successive calls to [`advance`](Self::advance).
pub struct Propagator {
    gen: Generator,
    cfg: IntegratorConfig,
    superop: Option<CMatrix>,
    step: f64,
    cached_exp: Option<(f64, CMatrix)>,
}

impl Propagator {
    pub fn new(model: &EnvironmentModel, dims: HilbertDims, cfg: IntegratorConfig) -> Result<Self> {
        Self::from_generator(Generator::new(model, dims)?, cfg)
    }

    pub fn from_generator(gen: Generator, cfg: IntegratorConfig) -> Result<Self> {
        let superop = match cfg.backend {
            Backend::SuperoperatorExp => {
                let n = gen.dims().total();
                if n > MAX_SUPEROPERATOR_DIM {
                    return Err(Error::Configuration(format!(
                        "superoperator backend supports N ≤ {MAX_SUPEROPERATOR_DIM}, got N = {n}"
                    )));
                }
                Some(gen.superoperator())
            }
            Backend::FixedRk4 { step } if step.is_nan() || step <= 0.0 => {
                return Err(Error::Configuration(format!("fixed RK4 step must be > 0, got {step}")))
            }
            _ => None,
        };
        if !(cfg.abs_tol > 0.0 && cfg.initial_step > 0.0 && cfg.min_step > 0.0) {
            return Err(Error::Configuration("integrator tolerances and steps must be positive".into()));
        }
        Ok(Self { gen, step: cfg.initial_step, cfg, superop, cached_exp: None })
    }

    pub fn generator(&self) -> &Generator {
        &self.gen
    }

    /// Advances `rho` by `dt ≥ 0`. The returned matrix is Hermitian by construction.
    pub fn advance(&mut self, rho: &CMatrix, dt: f64) -> Result<CMatrix> {
        if !dt.is_finite() || dt < 0.0 {
            return Err(Error::Domain(format!("time step must be finite and ≥ 0, got {dt}")));
        }
        if dt == 0.0 {
            return Ok(rho.clone());
        }
        match self.cfg.backend {
            Backend::AdaptiveRk4 => self.adaptive(rho, dt),
            Backend::FixedRk4 { step } => Ok(self.fixed(rho, dt, step)),
            Backend::SuperoperatorExp => self.exponential(rho, dt),
        }
    }

    fn rhs(&self, rho: &CMatrix, out: &mut CMatrix) {
        self.gen.apply_into(rho, out);
    }

    fn rk4_step(&self, y: &CMatrix, k1: &CMatrix, h: f64) -> CMatrix {
        let n = y.nrows();
        let mut k2 = CMatrix::zeros(n, n);
        let mut k3 = CMatrix::zeros(n, n);
        let mut k4 = CMatrix::zeros(n, n);
        self.rhs(&(y + k1.scale(h / 2.0)), &mut k2);
        self.rhs(&(y + k2.scale(h / 2.0)), &mut k3);
        self.rhs(&(y + k3.scale(h)), &mut k4);
        y + (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h / 6.0)
    }

    fn fixed(&self, rho: &CMatrix, dt: f64, step: f64) -> CMatrix {
        let n_steps = (dt / step).ceil().max(1.0) as usize;
        let h = dt / n_steps as f64;
        let mut y = rho.clone();
        let mut k1 = CMatrix::zeros(y.nrows(), y.ncols());
        for _ in 0..n_steps {
            self.rhs(&y, &mut k1);
            y = hermitian_part(&self.rk4_step(&y, &k1, h));
        }
        y
    }

    fn adaptive(&mut self, rho: &CMatrix, dt: f64) -> Result<CMatrix> {
        let tol = self.cfg.abs_tol;
        let mut y = rho.clone();
        let mut k1 = CMatrix::zeros(y.nrows(), y.ncols());
        let mut k_mid = CMatrix::zeros(y.nrows(), y.ncols());
        let mut t = 0.0;
        let mut steps = 0usize;
        while t < dt {
            let remaining = dt - t;
            let last = self.step >= remaining;
            let h = if last { remaining } else { self.step };
            if h < self.cfg.min_step && !last {
                return Err(Error::Numeric(format!("step size underflow (h = {h:e})")));
            }
            steps += 1;
            if steps > self.cfg.max_steps {
                return Err(Error::Numeric(format!("exceeded {} integration steps", self.cfg.max_steps)));
            }
            self.rhs(&y, &mut k1);
            let full = self.rk4_step(&y, &k1, h);
            let half = self.rk4_step(&y, &k1, h / 2.0);
            self.rhs(&half, &mut k_mid);
            let double = self.rk4_step(&half, &k_mid, h / 2.0);
            let diff = &double - &full;
            let err = diff.camax() / 15.0;
            if !err.is_finite() {
                return Err(Error::Numeric("non-finite state during integration".into()));
            }
            let factor = if err == 0.0 { 4.0 } else { (0.9 * (tol / err).powf(0.2)).clamp(0.2, 4.0) };
            if err <= tol {
                y = hermitian_part(&(double + diff.unscale(15.0)));
                t = if last { dt } else { t + h };
                // a truncated final step says nothing about the natural step size
                if !last || factor < 1.0 {
                    self.step = h * factor;
                }
            } else {
                self.step = h * factor;
                if self.step < self.cfg.min_step {
                    return Err(Error::Numeric(format!("step size underflow (h = {:e})", self.step)));
                }
            }
        }
        Ok(y)
    }

    fn exponential(&mut self, rho: &CMatrix, dt: f64) -> Result<CMatrix> {
        let n = rho.nrows();
        let reuse = matches!(&self.cached_exp, Some((cached, _)) if *cached == dt);
        if !reuse {
            let s = self.superop.as_ref().expect("superoperator built for this backend");
            self.cached_exp = Some((dt, expm(&s.scale(dt))?));
        }
        let (_, e) = self.cached_exp.as_ref().expect("cached above");
        let v = e * CMatrix::from_column_slice(n * n, 1, rho.as_slice());
        Ok(hermitian_part(&CMatrix::from_column_slice(n, n, v.as_slice())))
    }
}

fn finish(dims: HilbertDims, mat: CMatrix) -> Result<DensityMatrix> {
    let rho = DensityMatrix::from_raw(dims, mat)?;
    rho.check(INTEGRITY_TOL, INTEGRITY_TOL, INTEGRITY_TOL)?;
    let min = rho.min_eigenvalue()?;
    if min < -PSD_TOL {
        log::warn!("propagated state has eigenvalue {min:e} below −{PSD_TOL:e}");
    }
    Ok(rho)
}

/// `ρ(t)` for `dρ/dt = (𝟙⊗𝓛 + 𝓛⊗𝟙)ρ` starting from `rho0`.
pub fn propagate(
    rho0: &DensityMatrix,
    model: &EnvironmentModel,
    t: f64,
    cfg: &IntegratorConfig,
) -> Result<DensityMatrix> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Domain(format!("propagation time must be ≥ 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let mut prop = Propagator::new(model, rho0.dims(), *cfg)?;
    let out = prop.advance(rho0.matrix(), t)?;
    finish(rho0.dims(), out)
}

/// States at every point of `times` (increasing, starting at 0), stepping from
/// one grid point to the next.
pub fn evolve_trajectory(
    rho0: &DensityMatrix,
    model: &EnvironmentModel,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    match times.first() {
        Some(&0.0) => {}
        _ => return Err(Error::Domain("time grid must start at 0".into())),
    }
    if times.windows(2).any(|w| w[1].is_nan() || w[1] <= w[0]) {
        return Err(Error::Domain("time grid must be strictly increasing".into()));
    }
    let mut prop = Propagator::new(model, rho0.dims(), *cfg)?;
    let mut states = Vec::with_capacity(times.len());
    states.push(rho0.clone());
    let mut current = rho0.matrix().clone();
    for w in times.windows(2) {
        let annotate = |e: Error| match e {
            Error::Numeric(m) => Error::Numeric(format!("at t = {}: {m}", w[1])),
            Error::Integrity(m) => Error::Integrity(format!("at t = {}: {m}", w[1])),
            other => other,
        };
        current = prop.advance(&current, w[1] - w[0]).map_err(annotate)?;
        states.push(finish(rho0.dims(), current.clone()).map_err(annotate)?);
    }
    Ok(Trajectory { times: times.to_vec(), states, model: *model, initial: rho0.clone() })
}

/// `n` equally spaced points on `[0, t_max]` (a single point when `t_max = 0`).
pub fn linear_grid(t_max: f64, n: usize) -> Vec<f64> {
    if t_max == 0.0 || n <= 1 {
        return vec![0.0];
    }
    (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
}
