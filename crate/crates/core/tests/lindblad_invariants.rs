use entdyn_core::analytic::{bell_thermal, BellKind, ThermalParams};
use entdyn_core::concurrence::wootters;
use entdyn_core::hilbert::HilbertDims;
use entdyn_core::lindblad::{
    apply_generator, evolve_trajectory, linear_grid, local_jump_operators, propagate, EnvironmentModel, Generator,
    IntegratorConfig, Ladder,
};
use entdyn_core::sampling::{random_density_matrix, rng_from_seed};
use entdyn_core::{DensityMatrix, C64};

fn models() -> Vec<EnvironmentModel> {
    vec![
        EnvironmentModel::dephasing(1.0),
        EnvironmentModel::zero_temperature(1.0),
        EnvironmentModel::thermal(1.0, 0.3),
        EnvironmentModel::infinite_temperature(0.5),
    ]
}

#[test]
fn trace_and_positivity_along_trajectories() {
    let mut rng = rng_from_seed(99);
    let times = linear_grid(5.0, 11);
    for dims in [HilbertDims::qubits(), HilbertDims::square(3).unwrap()] {
        for model in models() {
            let rho0 = random_density_matrix(dims, 2, &mut rng).unwrap();
            let traj = evolve_trajectory(&rho0, &model, &times, &IntegratorConfig::default()).unwrap();
            assert!((traj.states[0].matrix() - rho0.matrix()).camax() <= 1e-12);
            for rho in &traj.states {
                assert!((rho.trace().re - 1.0).abs() <= 1e-9);
                assert!(rho.trace().im.abs() <= 1e-12);
                assert!(rho.min_eigenvalue().unwrap() >= -1e-8);
                assert!(rho.max_asymmetry() <= 1e-12);
            }
        }
    }
}

#[test]
fn generator_is_traceless_on_random_states() {
    let mut rng = rng_from_seed(5);
    for model in models() {
        let dims = HilbertDims::square(3).unwrap();
        let gen = Generator::new(&model, dims).unwrap();
        for _ in 0..20 {
            let rho = random_density_matrix(dims, 4, &mut rng).unwrap();
            assert!(apply_generator(&gen, &rho).unwrap().trace().norm() <= 1e-12);
        }
    }
}

#[test]
fn thermal_qubit_populations_reach_equilibrium() {
    let nbar = 0.4;
    let ground = BellKind::PhiPlus.state(HilbertDims::qubits()).unwrap().projector();
    let rho = propagate(&ground, &EnvironmentModel::thermal(1.0, nbar), 20.0, &IntegratorConfig::default()).unwrap();
    let (p0, p1) = ((nbar + 1.0) / (2.0 * nbar + 1.0), nbar / (2.0 * nbar + 1.0));
    let expect = [p0 * p0, p0 * p1, p1 * p0, p1 * p1];
    for (i, e) in expect.iter().enumerate() {
        assert!((rho.matrix()[(i, i)].re - e).abs() <= 1e-6, "population {i}");
    }
}

#[test]
fn large_nbar_approaches_infinite_temperature() {
    let gamma_tilde = 0.5;
    let nbar = 50.0;
    let rho0 = BellKind::PsiPlus.state(HilbertDims::qubits()).unwrap().projector();
    let thermal = EnvironmentModel::thermal(gamma_tilde / nbar, nbar);
    let limit = EnvironmentModel::infinite_temperature(gamma_tilde);
    let times = linear_grid(2.0, 9);
    let a = evolve_trajectory(&rho0, &thermal, &times, &IntegratorConfig::default()).unwrap();
    let b = evolve_trajectory(&rho0, &limit, &times, &IntegratorConfig::default()).unwrap();
    for (x, y) in a.states.iter().zip(&b.states) {
        assert!((x.matrix() - y.matrix()).camax() <= 2e-2);
    }
}

#[test]
fn backends_agree() {
    let mut rng = rng_from_seed(17);
    let dims = HilbertDims::new(2, 3).unwrap();
    let rho0 = random_density_matrix(dims, 3, &mut rng).unwrap();
    for model in models() {
        let a = propagate(&rho0, &model, 0.7, &IntegratorConfig::default()).unwrap();
        let b = propagate(&rho0, &model, 0.7, &IntegratorConfig::superoperator()).unwrap();
        assert!((a.matrix() - b.matrix()).camax() <= 1e-8);
    }
}

#[test]
fn thermal_psi_plus_matches_closed_form() {
    let params = ThermalParams::new(1.0, 0.1).unwrap();
    let rho0 = BellKind::PsiPlus.state(HilbertDims::qubits()).unwrap().projector();
    let rho = propagate(&rho0, &EnvironmentModel::thermal(1.0, 0.1), 0.5, &IntegratorConfig::default()).unwrap();
    let expected = bell_thermal(BellKind::PsiPlus, 0.5, params).unwrap();
    assert!((wootters(&rho).unwrap().value - expected).abs() <= 1e-8);
}

#[test]
fn jump_operator_catalogue() {
    let ops = local_jump_operators(&EnvironmentModel::thermal(1.0, 0.2), 2).unwrap();
    let rates: Vec<f64> = ops.iter().map(|(_, r)| *r).collect();
    assert_eq!(rates.len(), 2);
    assert!((rates[0] - 1.2).abs() < 1e-15 && (rates[1] - 0.2).abs() < 1e-15);
    assert_eq!(local_jump_operators(&EnvironmentModel::zero_temperature(1.0), 3).unwrap().len(), 1);
    let sigma = EnvironmentModel::zero_temperature(1.0).with_ladder(Ladder::QubitSigma);
    assert!(local_jump_operators(&sigma, 3).is_err());
    assert!(local_jump_operators(&sigma, 2).is_ok());
}

#[test]
fn diagonal_states_are_dephasing_fixed_points() {
    let dims = HilbertDims::square(3).unwrap();
    let diag = DensityMatrix::new(
        dims,
        entdyn_core::CMatrix::from_fn(9, 9, |i, j| {
            if i == j {
                C64::new((i + 1) as f64 / 45.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }),
    )
    .unwrap();
    let gen = Generator::new(&EnvironmentModel::dephasing(2.0), dims).unwrap();
    assert!(apply_generator(&gen, &diag).unwrap().camax() <= 1e-13);
}
