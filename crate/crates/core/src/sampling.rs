//! Seeded random states, density matrices and unitaries.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hilbert::{DensityMatrix, HilbertDims, PureState};
use crate::{CMatrix, CVector, Result, C64};

/// The generator used everywhere a seed is accepted.
pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for restart `index` of a run seeded with `seed`.
pub fn substream(seed: u64, index: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index + 1);
    rng
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    CVector::from_fn(n, |_, _| complex_gaussian(rng))
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-random `n×n` unitary (QR of a Ginibre matrix with the phase of `R`'s
/// diagonal absorbed into `Q`).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let qr = gaussian_matrix(n, n, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Uniformly random pure state.
pub fn random_pure_state<R: Rng + ?Sized>(dims: HilbertDims, rng: &mut R) -> PureState {
    let v = gaussian_vector(dims.total(), rng);
    PureState::normalized(dims, v).expect("Gaussian vector is almost surely non-zero")
}

/// Random density matrix of the given rank, `ρ = G G† / tr(G G†)` with `G` an
/// `N×rank` complex Gaussian matrix.
pub fn random_density_matrix<R: Rng + ?Sized>(dims: HilbertDims, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    let rank = rank.clamp(1, dims.total());
    let g = gaussian_matrix(dims.total(), rank, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let m = crate::hilbert::hermitian_part(&m.unscale(tr));
    DensityMatrix::new(dims, m)
}

/// Random point on the unit sphere of `Cⁿ`.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    let v = gaussian_vector(n, rng);
    let norm = v.norm();
    v.unscale(norm)
}
