use entdyn_core::concurrence::{
    a_tensor, a_tensor_direct, build_t, optimize_lower_bound, pure_concurrence, upper_convex_roof, wootters,
    ConvexRoofConfig, LowerBoundConfig,
};
use entdyn_core::hilbert::{spectral, DEFAULT_CUTOFF};
use entdyn_core::lindblad::{propagate, EnvironmentModel, IntegratorConfig};
use entdyn_core::sampling::{random_density_matrix, random_pure_state, random_unitary, substream, SeededRng};
use entdyn_core::{HilbertDims, PureState};
use rand::Rng;
use rayon::prelude::*;

use crate::error::Result;

/// Worst observed deviation of one property over all samples.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub samples: usize,
    pub worst: f64,
    pub tolerance: f64,
}

impl PropertyOutcome {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

struct Property {
    name: &'static str,
    tolerance: f64,
    check: fn(&mut SeededRng) -> Result<f64>,
}

fn pick_dims(rng: &mut SeededRng, choices: &[(usize, usize)]) -> HilbertDims {
    let (a, b) = choices[rng.random_range(0..choices.len())];
    HilbertDims::new(a, b).expect("fixed dimensions are valid")
}

const DIMS: [(usize, usize); 5] = [(2, 2), (2, 3), (3, 3), (3, 4), (4, 4)];

fn random_model(rng: &mut SeededRng) -> EnvironmentModel {
    let gamma = rng.random_range(0.1..2.0);
    match rng.random_range(0..4) {
        0 => EnvironmentModel::dephasing(gamma),
        1 => EnvironmentModel::zero_temperature(gamma),
        2 => EnvironmentModel::thermal(gamma, rng.random_range(0.0..2.0)),
        _ => EnvironmentModel::infinite_temperature(gamma),
    }
}

/// Largest violation of unit trace, Hermiticity and positivity after propagation.
fn density_invariants(rng: &mut SeededRng) -> Result<f64> {
    let dims = pick_dims(rng, &DIMS[..3]);
    let rank = rng.random_range(1..=dims.total());
    let rho0 = random_density_matrix(dims, rank, rng)?;
    let t = rng.random_range(0.0..3.0);
    let rho = propagate(&rho0, &random_model(rng), t, &IntegratorConfig::default())?;
    let trace = (rho.trace() - 1.0).norm();
    let negativity = (-rho.min_eigenvalue()?).max(0.0);
    Ok(trace.max(rho.max_asymmetry()).max(negativity))
}

/// `lower − upper`, which must not be positive.
fn ordering(rng: &mut SeededRng) -> Result<f64> {
    let dims = pick_dims(rng, &[(2, 3), (3, 3)]);
    let rho = random_density_matrix(dims, rng.random_range(1..=3), rng)?;
    let seed = rng.random();
    let tset = build_t(&spectral(&rho, DEFAULT_CUTOFF)?.subnormalized, dims)?;
    let (lower, _) = optimize_lower_bound(&tset, &LowerBoundConfig { restarts: 4, seed, ..Default::default() })?;
    let upper = upper_convex_roof(&rho, &ConvexRoofConfig { restarts: 2, polish: 1, seed, ..Default::default() })?;
    Ok((lower.value - upper.estimate.value).max(0.0))
}

fn two_qubit_collapse(rng: &mut SeededRng) -> Result<f64> {
    let dims = HilbertDims::qubits();
    let rho = random_density_matrix(dims, rng.random_range(1..=4), rng)?;
    let seed = rng.random();
    let tset = build_t(&spectral(&rho, DEFAULT_CUTOFF)?.subnormalized, dims)?;
    let (lower, _) = optimize_lower_bound(&tset, &LowerBoundConfig { restarts: 4, seed, ..Default::default() })?;
    Ok((lower.value - wootters(&rho)?.value).abs())
}

fn purity_formula(psi: &PureState) -> f64 {
    let r = psi.reduced_first();
    let tr_sq = (&r * &r).trace().re;
    (2.0 * (1.0 - tr_sq)).max(0.0).sqrt()
}

fn pure_state_formula(rng: &mut SeededRng) -> Result<f64> {
    let psi = random_pure_state(pick_dims(rng, &DIMS), rng);
    Ok((pure_concurrence(&psi).value - purity_formula(&psi)).abs())
}

fn local_unitary_invariance(rng: &mut SeededRng) -> Result<f64> {
    let dims = pick_dims(rng, &DIMS);
    let psi = random_pure_state(dims, rng);
    let u1 = random_unitary(dims.d1(), rng);
    let u2 = random_unitary(dims.d2(), rng);
    let moved = psi.apply_local(&u1, &u2)?;
    Ok((pure_concurrence(&psi).value - pure_concurrence(&moved).value).abs())
}

fn a_tensor_reconstruction(rng: &mut SeededRng) -> Result<f64> {
    let dims = pick_dims(rng, &DIMS[..3]);
    let rho = random_density_matrix(dims, rng.random_range(1..=3), rng)?;
    let sd = spectral(&rho, DEFAULT_CUTOFF)?;
    let via_t = a_tensor(&build_t(&sd.subnormalized, dims)?);
    Ok(via_t.max_abs_diff(&a_tensor_direct(&sd.subnormalized, dims)?))
}

const PROPERTIES: [Property; 6] = [
    Property { name: "density matrix invariants under propagation", tolerance: 1e-8, check: density_invariants },
    Property { name: "lower bound below upper bound", tolerance: 1e-6, check: ordering },
    Property { name: "two-qubit lower bound equals wootters", tolerance: 1e-6, check: two_qubit_collapse },
    Property { name: "pure-state concurrence equals purity formula", tolerance: 1e-10, check: pure_state_formula },
    Property { name: "local-unitary invariance", tolerance: 1e-10, check: local_unitary_invariance },
    Property { name: "A tensor from T matrices", tolerance: 1e-10, check: a_tensor_reconstruction },
];

/// Runs every property on `samples` seeded draws. Sample `i` of property `p`
/// uses substream `(seed, p·2³² + i)`, so results do not depend on thread count.
pub fn run_property_suite(samples: usize, seed: u64) -> Result<Vec<PropertyOutcome>> {
    PROPERTIES
        .iter()
        .enumerate()
        .map(|(p, prop)| {
            let worst = (0..samples)
                .into_par_iter()
                .map(|i| (prop.check)(&mut substream(seed, ((p as u64) << 32) + i as u64)))
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            log::info!("{}: worst {worst:e} over {samples} samples", prop.name);
            Ok(PropertyOutcome { name: prop.name, samples, worst, tolerance: prop.tolerance })
        })
        .collect()
}
