use crate::hilbert::DensityMatrix;
use crate::{CMatrix, Error, Result};

use super::wootters::wootters_matrix;
use super::{ConcurrenceEstimate, Estimator};

/// The 4×4 block `ξ` of ρ on the levels `{0, m}` of each party, in the order
/// `|00⟩, |0m⟩, |m0⟩, |mm⟩`. The block keeps the trace weight it has in ρ.
pub fn two_qubit_block(rho: &DensityMatrix, m: usize) -> Result<CMatrix> {
    let dims = rho.dims();
    if m == 0 || m >= dims.min_local() {
        return Err(Error::Domain(format!(
            "level m = {m} must satisfy 0 < m < {} for dims ({}, {})",
            dims.min_local(),
            dims.d1(),
            dims.d2()
        )));
    }
    let levels = [(0, 0), (0, m), (m, 0), (m, m)];
    let idx: Vec<usize> = levels.iter().map(|&(a, b)| dims.flat_index(a, b)).collect::<Result<_>>()?;
    let mat = rho.matrix();
    Ok(CMatrix::from_fn(4, 4, |i, j| mat[(idx[i], idx[j])]))
}

/// Wootters' functional of the block `ξ` on levels `{0, m}`.
pub fn block_concurrence(rho: &DensityMatrix, m: usize) -> Result<ConcurrenceEstimate> {
    let xi = two_qubit_block(rho, m)?;
    Ok(ConcurrenceEstimate::exact(wootters_matrix(&xi)?, Estimator::ExactWootters))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{zero_t_00mm, BellKind};
    use crate::concurrence::wootters;
    use crate::hilbert::{HilbertDims, PureState};
    use crate::lindblad::{propagate, EnvironmentModel, IntegratorConfig};
    use crate::sampling::{random_density_matrix, rng_from_seed};
    use crate::C64;

    #[test]
    fn qubit_block_is_rho() {
        let mut rng = rng_from_seed(61);
        let rho = random_density_matrix(HilbertDims::qubits(), 3, &mut rng).unwrap();
        let xi = two_qubit_block(&rho, 1).unwrap();
        assert_eq!(&xi, rho.matrix());
        assert_eq!(block_concurrence(&rho, 1).unwrap().value, wootters(&rho).unwrap().value);
    }

    #[test]
    fn diagonal_state_has_zero_block_concurrence() {
        let rho = DensityMatrix::maximally_mixed(HilbertDims::square(3).unwrap());
        let xi = two_qubit_block(&rho, 2).unwrap();
        assert!((xi.clone() - CMatrix::from_diagonal(&xi.diagonal())).camax() == 0.0);
        assert_eq!(block_concurrence(&rho, 2).unwrap().value, 0.0);
    }

    #[test]
    fn zero_temperature_00mm_family() {
        let dims = HilbertDims::square(3).unwrap();
        let (a, b) = (C64::new(0.5, 0.0), C64::new(3f64.sqrt() / 2.0, 0.0));
        let psi = PureState::two_term(dims, a, b, (0, 0), (2, 2)).unwrap();
        let model = EnvironmentModel::zero_temperature(1.0);
        for t in [0.0, 0.05, 0.2, 0.5] {
            let rho = propagate(&psi.projector(), &model, t, &IntegratorConfig::default()).unwrap();
            let c = block_concurrence(&rho, 2).unwrap().value;
            assert!((c - zero_t_00mm(a, b, 2, t, 1.0)).abs() < 1e-8, "t={t}");
        }
    }

    #[test]
    fn bell_embedded_in_qutrits() {
        let dims = HilbertDims::square(3).unwrap();
        let rho = BellKind::PhiPlus.state(dims).unwrap().projector();
        assert!((block_concurrence(&rho, 1).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_level() {
        let rho = DensityMatrix::maximally_mixed(HilbertDims::square(3).unwrap());
        assert!(matches!(two_qubit_block(&rho, 3), Err(Error::Domain(_))));
        assert!(matches!(two_qubit_block(&rho, 0), Err(Error::Domain(_))));
    }
}
