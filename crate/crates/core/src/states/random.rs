//! Seeded random states.

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::qmat::{CMatrix, C64};
use crate::rng::{seeded, Rng};

use super::{Mstate, PureState, SystemLayout};

/// Standard complex Gaussian, `E|z|² = 1`.
pub fn complex_gaussian(rng: &mut Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random unit vector.
pub fn haar_vector(dim: usize, rng: &mut Rng) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}

/// Haar-random pure state on `layout`.
pub fn random_pure(layout: &SystemLayout, seed: u64) -> PureState {
    let mut rng = seeded(seed);
    let v = haar_vector(layout.total_dim(), &mut rng);
    PureState::normalized(layout.clone(), v).expect("non-zero Gaussian vector")
}

/// Induced-measure density matrix `G G† / Tr(G G†)` with `G` Ginibre `dim × rank`.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> CMatrix {
    let mut rng = seeded(seed);
    let rank = rank.clamp(1, dim);
    let g: Vec<C64> = (0..dim * rank).map(|_| complex_gaussian(&mut rng)).collect();
    let g = CMatrix::from_vec(dim, rank, g).expect("shape");
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    let mut m = m.scale(1.0 / tr);
    // exact Hermiticity
    m = m.hermitian_part();
    m
}

/// Random mixed state of the given rank on `layout`.
pub fn random_mstate(layout: &SystemLayout, rank: usize, seed: u64) -> Mstate {
    Mstate::from_parts(layout.clone(), random_density(layout.total_dim(), rank, seed))
}

/// `(1 - p) ρ + p I/d`
pub fn depolarize(rho: &Mstate, p: f64) -> Mstate {
    let d = rho.dim();
    let mut m = rho.matrix().scale(1.0 - p);
    m.add_scaled(&CMatrix::identity(d), p / d as f64);
    Mstate::from_parts(rho.layout().clone(), m)
}
