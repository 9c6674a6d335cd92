use crate::{CMatrix, Error, Result, C64};

/// Which local channel acts on each subsystem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Channel {
    /// `L = a†a` (`σ₊σ₋` for qubits) at rate `Γ`.
    Dephasing,
    /// Decay `a` at `Γ(n̄+1)` and excitation `a†` at `Γn̄`.
    Thermal { nbar: f64 },
    /// Decay and excitation both at `Γ̃`; the `n̄ → ∞`, `Γn̄ = Γ̃` limit of `Thermal`.
    InfiniteTemperature,
}

/// How the ladder operators are realised on the local space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ladder {
    /// `σ₋ = |0⟩⟨1|`; only valid for two-level subsystems.
    QubitSigma,
    /// Truncated bosonic mode, `a|n⟩ = √n |n-1⟩`, `a†|d-1⟩ = 0`.
    #[default]
    BosonicTruncated,
}

/// Local Markovian environment, identical on both subsystems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvironmentModel {
    pub channel: Channel,
    /// `Γ`, or `Γ̃` for [`Channel::InfiniteTemperature`]; units of inverse time.
    pub gamma: f64,
    pub ladder: Ladder,
}

impl EnvironmentModel {
    pub fn dephasing(gamma: f64) -> Self {
        Self { channel: Channel::Dephasing, gamma, ladder: Ladder::default() }
    }

    pub fn thermal(gamma: f64, nbar: f64) -> Self {
        Self { channel: Channel::Thermal { nbar }, gamma, ladder: Ladder::default() }
    }

    pub fn zero_temperature(gamma: f64) -> Self {
        Self::thermal(gamma, 0.0)
    }

    pub fn infinite_temperature(gamma_tilde: f64) -> Self {
        Self { channel: Channel::InfiniteTemperature, gamma: gamma_tilde, ladder: Ladder::default() }
    }

    pub fn with_ladder(mut self, ladder: Ladder) -> Self {
        self.ladder = ladder;
        self
    }

    pub fn nbar(&self) -> Option<f64> {
        match self.channel {
            Channel::Thermal { nbar } => Some(nbar),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::Configuration(format!("rate must be finite and ≥ 0, got {}", self.gamma)));
        }
        if let Channel::Thermal { nbar } = self.channel {
            if !(nbar.is_finite() && nbar >= 0.0) {
                return Err(Error::Configuration(format!("n̄ must be finite and ≥ 0, got {nbar}")));
            }
        }
        Ok(())
    }
}

/// Annihilation operator on a `d`-level space.
pub fn annihilation(d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| if j == i + 1 { C64::new((j as f64).sqrt(), 0.0) } else { C64::new(0.0, 0.0) })
}

/// `σ₋ = |0⟩⟨1|`.
pub fn sigma_minus() -> CMatrix {
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 1)] = C64::new(1.0, 0.0);
    m
}

/// Jump operators `(Lᵢ, Γᵢ)` of one subsystem. Channels with a vanishing rate
/// are omitted, so `Thermal { nbar: 0 }` yields the single decay operator.
pub fn local_jump_operators(model: &EnvironmentModel, d: usize) -> Result<Vec<(CMatrix, f64)>> {
    model.validate()?;
    if d < 2 {
        return Err(Error::Domain(format!("local dimension must be ≥ 2, got {d}")));
    }
    let lower = match model.ladder {
        Ladder::QubitSigma if d != 2 => {
            return Err(Error::Configuration(format!("σ± ladder requires two-level subsystems, got d = {d}")))
        }
        Ladder::QubitSigma => sigma_minus(),
        Ladder::BosonicTruncated => annihilation(d),
    };
    let raise = lower.adjoint();
    let gamma = model.gamma;
    let jumps = match model.channel {
        Channel::Dephasing => vec![(&raise * &lower, gamma)],
        Channel::Thermal { nbar } => vec![(lower, gamma * (nbar + 1.0)), (raise, gamma * nbar)],
        Channel::InfiniteTemperature => vec![(lower, gamma), (raise, gamma)],
    };
    Ok(jumps.into_iter().filter(|(_, rate)| *rate != 0.0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dephasing_qubit_is_projector_on_excited_level() {
        for ladder in [Ladder::QubitSigma, Ladder::BosonicTruncated] {
            let jumps = local_jump_operators(&EnvironmentModel::dephasing(0.7).with_ladder(ladder), 2).unwrap();
            assert_eq!(jumps.len(), 1);
            let (l, rate) = &jumps[0];
            assert_eq!(*rate, 0.7);
            let mut expected = CMatrix::zeros(2, 2);
            expected[(1, 1)] = C64::new(1.0, 0.0);
            assert_eq!(*l, expected);
        }
    }

    #[test]
    fn zero_temperature_has_no_excitation() {
        let jumps = local_jump_operators(&EnvironmentModel::thermal(1.0, 0.0), 3).unwrap();
        assert_eq!(jumps.len(), 1);
        assert_eq!(jumps[0].0, annihilation(3));
        assert_eq!(jumps[0].1, 1.0);
    }

    #[test]
    fn thermal_rates() {
        let jumps = local_jump_operators(&EnvironmentModel::thermal(1.0, 0.2), 2).unwrap();
        let rates: Vec<f64> = jumps.iter().map(|j| j.1).collect();
        assert!((rates[0] - 1.2).abs() < 1e-15);
        assert!((rates[1] - 0.2).abs() < 1e-15);
        assert_eq!(jumps[1].0, annihilation(2).adjoint());
    }

    #[test]
    fn infinite_temperature_rates_equal() {
        let jumps = local_jump_operators(&EnvironmentModel::infinite_temperature(0.5), 4).unwrap();
        assert_eq!(jumps.len(), 2);
        assert_eq!(jumps[0].1, 0.5);
        assert_eq!(jumps[1].1, 0.5);
    }

    #[test]
    fn truncated_ladder() {
        let a = annihilation(4);
        let ad = a.adjoint();
        assert!((a[(2, 3)].re - 3f64.sqrt()).abs() < 1e-15);
        // a†|d-1⟩ = 0
        assert!(ad.column(3).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn sigma_ladder_needs_qubits() {
        let model = EnvironmentModel::thermal(1.0, 0.1).with_ladder(Ladder::QubitSigma);
        assert!(matches!(local_jump_operators(&model, 3), Err(Error::Configuration(_))));
    }

    #[test]
    fn negative_parameters_rejected() {
        assert!(local_jump_operators(&EnvironmentModel::thermal(1.0, -0.1), 2).is_err());
        assert!(local_jump_operators(&EnvironmentModel::dephasing(-1.0), 2).is_err());
    }
}
