//! Closed-form concurrence curves for the state/environment families that admit
//! them. Every function returns the clamped value `max{c, 0}`; the `*_raw`
//! variants expose the unclamped expression.

use crate::hilbert::{HilbertDims, PureState};
use crate::{Error, Result, C64};

/// The four two-qubit Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellKind {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [Self::PsiPlus, Self::PsiMinus, Self::PhiPlus, Self::PhiMinus];

    /// `true` for `Ψ±`, whose formulas differ from those of `Φ±`.
    pub fn is_psi(self) -> bool {
        matches!(self, Self::PsiPlus | Self::PsiMinus)
    }

    /// `(|01⟩ ± |10⟩)/√2` or `(|00⟩ ± |11⟩)/√2`, embedded in the lowest two levels of `dims`.
    pub fn state(self, dims: HilbertDims) -> Result<PureState> {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let sign = match self {
            Self::PsiPlus | Self::PhiPlus => s,
            Self::PsiMinus | Self::PhiMinus => -s,
        };
        if self.is_psi() {
            PureState::two_term(dims, s, sign, (0, 1), (1, 0))
        } else {
            PureState::two_term(dims, s, sign, (0, 0), (1, 1))
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::PsiPlus => "psi_plus",
            Self::PsiMinus => "psi_minus",
            Self::PhiPlus => "phi_plus",
            Self::PhiMinus => "phi_minus",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// Rate `Γ` and thermal occupation `n̄` of a finite-temperature bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalParams {
    pub gamma: f64,
    pub nbar: f64,
}

impl ThermalParams {
    pub fn new(gamma: f64, nbar: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Domain(format!("Γ must be > 0, got {gamma}")));
        }
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(Error::Domain(format!("n̄ must be ≥ 0, got {nbar}")));
        }
        Ok(Self { gamma, nbar })
    }

    /// `β(t) = exp(−Γ(2n̄+1)t)`.
    pub fn beta(&self, t: f64) -> f64 {
        (-self.gamma * (2.0 * self.nbar + 1.0) * t).exp()
    }
}

/// Bell states under dephasing: `e^{−Γt}` for every kind.
pub fn bell_dephasing(t: f64, gamma: f64) -> f64 {
    (-gamma * t).exp()
}

/// Bell states at zero temperature: `Ψ± → e^{−Γt}`, `Φ± → e^{−2Γt}`.
pub fn bell_zero_temperature(kind: BellKind, t: f64, gamma: f64) -> f64 {
    if kind.is_psi() {
        (-gamma * t).exp()
    } else {
        (-2.0 * gamma * t).exp()
    }
}

/// `c_T` as a function of `β` at fixed `n̄`.
pub fn bell_thermal_of_beta(kind: BellKind, beta: f64, nbar: f64) -> f64 {
    let s = nbar * nbar + nbar;
    let denom = (2.0 * nbar + 1.0).powi(2);
    if kind.is_psi() {
        let root = (s * s * (beta + 1.0).powi(2) + beta * s).sqrt();
        beta - 2.0 * (1.0 - beta) * root / denom
    } else {
        beta + ((2.0 * s + 1.0) * beta * beta - beta - 2.0 * s) / denom
    }
}

/// Unclamped finite-temperature expression `c_T(t)`.
pub fn bell_thermal_raw(kind: BellKind, t: f64, params: ThermalParams) -> Result<f64> {
    let params = ThermalParams::new(params.gamma, params.nbar)?;
    Ok(bell_thermal_of_beta(kind, params.beta(t), params.nbar))
}

/// `max{c_T(t), 0}`.
pub fn bell_thermal(kind: BellKind, t: f64, params: ThermalParams) -> Result<f64> {
    Ok(bell_thermal_raw(kind, t, params)?.max(0.0))
}

/// `lim_{t→∞} c_T(t) = −2n̄(n̄+1)/(2n̄+1)²`, common to all Bell kinds.
pub fn bell_thermal_long_time_limit(nbar: f64) -> f64 {
    -2.0 * nbar * (nbar + 1.0) / (2.0 * nbar + 1.0).powi(2)
}

/// Unclamped infinite-temperature expression `e^{−4Γ̃t}/2 + e^{−2Γ̃t} − 1/2`.
pub fn bell_infinite_temperature_raw(t: f64, gamma_tilde: f64) -> f64 {
    let x = (-2.0 * gamma_tilde * t).exp();
    x * x / 2.0 + x - 0.5
}

pub fn bell_infinite_temperature(t: f64, gamma_tilde: f64) -> f64 {
    bell_infinite_temperature_raw(t, gamma_tilde).max(0.0)
}

/// Initial slope `−dc/dt|₀`: `Ψ± → (2n̄+1+2√(n̄(n̄+1)))Γ`, `Φ± → 2(2n̄+1)Γ`.
pub fn short_time_rate(kind: BellKind, params: ThermalParams) -> f64 {
    let n = params.nbar;
    if kind.is_psi() {
        (2.0 * n + 1.0 + 2.0 * (n * (n + 1.0)).sqrt()) * params.gamma
    } else {
        2.0 * (2.0 * n + 1.0) * params.gamma
    }
}

/// Root of a continuous `f` on `[lo, hi]` with `f(lo) < 0 < f(hi)` or the reverse.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Numeric(format!("no sign change on [{lo}, {hi}]: f = ({f_lo:e}, {f_hi:e})")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Time at which the finite-temperature Bell concurrence first reaches zero.
///
/// Returns `+∞` for `n̄ = 0`, where separability is only asymptotic. The root is
/// located in `β ∈ (0, 1)` and mapped back through `t = −ln β / (Γ(2n̄+1))`.
pub fn separability_time(kind: BellKind, params: ThermalParams) -> Result<f64> {
    let params = ThermalParams::new(params.gamma, params.nbar)?;
    if params.nbar == 0.0 {
        return Ok(f64::INFINITY);
    }
    let beta = bisect(|b| bell_thermal_of_beta(kind, b, params.nbar), 0.0, 1.0, 1e-15)?;
    Ok(-beta.ln() / (params.gamma * (2.0 * params.nbar + 1.0)))
}

/// Separability time of the infinite-temperature channel, from a root search on
/// `x = e^{−2Γ̃t}`.
pub fn infinite_temperature_separability_time(gamma_tilde: f64) -> Result<f64> {
    if gamma_tilde.is_nan() || gamma_tilde <= 0.0 {
        return Err(Error::Domain(format!("Γ̃ must be > 0, got {gamma_tilde}")));
    }
    let x = bisect(|x| x * x / 2.0 + x - 0.5, 0.0, 1.0, 1e-15)?;
    Ok(-x.ln() / (2.0 * gamma_tilde))
}

/// `a|m₁m₂⟩ + b|n₁n₂⟩` under dephasing: `2|ab| exp(−(Γt/2)[(m₁−n₁)² + (m₂−n₂)²])`.
pub fn two_term_dephasing(
    a: C64,
    b: C64,
    (m1, m2): (usize, usize),
    (n1, n2): (usize, usize),
    t: f64,
    gamma: f64,
) -> f64 {
    let dm1 = m1 as f64 - n1 as f64;
    let dm2 = m2 as f64 - n2 as f64;
    2.0 * (a * b).norm() * (-(gamma * t / 2.0) * (dm1 * dm1 + dm2 * dm2)).exp()
}

/// `a|0m⟩ + b|m0⟩` at zero temperature: `2|ab| e^{−mΓt}`.
pub fn zero_t_0m_m0(a: C64, b: C64, m: usize, t: f64, gamma: f64) -> f64 {
    2.0 * (a * b).norm() * (-(m as f64) * gamma * t).exp()
}

/// Unclamped `2e^{−mΓt}(|ab| − (1−e^{−Γt})^m |b|²)`.
pub fn zero_t_00mm_raw(a: C64, b: C64, m: usize, t: f64, gamma: f64) -> f64 {
    let x = (-gamma * t).exp();
    2.0 * x.powi(m as i32) * ((a * b).norm() - (1.0 - x).powi(m as i32) * b.norm_sqr())
}

/// `a|00⟩ + b|mm⟩` at zero temperature.
pub fn zero_t_00mm(a: C64, b: C64, m: usize, t: f64, gamma: f64) -> f64 {
    zero_t_00mm_raw(a, b, m, t, gamma).max(0.0)
}

/// Finite separability time of `a|00⟩ + b|mm⟩` at zero temperature, `+∞` when
/// `|ab| ≥ |b|²` (the bracket never closes).
pub fn zero_t_00mm_separability_time(a: C64, b: C64, m: usize, gamma: f64) -> Result<f64> {
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(Error::Domain(format!("Γ must be > 0, got {gamma}")));
    }
    let ab = (a * b).norm();
    let bb = b.norm_sqr();
    if ab >= bb {
        return Ok(f64::INFINITY);
    }
    // |ab| = (1 − x)^m |b|²  ⇔  x = 1 − (|ab|/|b|²)^{1/m}; solved by bisection in x.
    let x = bisect(|x| ab - (1.0 - x).powi(m as i32) * bb, 0.0, 1.0, 1e-15)?;
    Ok(-x.ln() / gamma)
}
