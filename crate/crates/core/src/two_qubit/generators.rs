//! Seeded test-state generators.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{inner, kron, kron_vec, ComplexMatrix, HermitianMatrix, C64, ZERO};

use super::gamma::rotated_bell;
use super::state::{concurrence, DensityMatrix, PureState};

/// The generator used for every seeded routine in this crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

fn gaussian_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    (0..n).map(|_| gaussian(rng)).collect()
}

/// `|ψ⁻⟩ = (|01⟩ − |10⟩)/√2`.
pub fn singlet() -> PureState {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    PureState::new([ZERO, h, -h, ZERO]).unwrap()
}

/// `p|ψ⁻⟩⟨ψ⁻| + (1−p)·1/4`.
pub fn werner_state(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParam(format!("Werner weight {p} outside [0, 1]")));
    }
    let m = singlet().projector().scale(p).plus(&HermitianMatrix::identity(4).scale((1.0 - p) / 4.0));
    DensityMatrix::new(m)
}

/// Uniformly distributed pure state on two qubits.
pub fn sample_pure_state<R: Rng + ?Sized>(rng: &mut R) -> PureState {
    PureState::normalize(&gaussian_vec(rng, 4)).unwrap()
}

/// Uniformly distributed single-qubit pure state.
pub fn sample_qubit<R: Rng + ?Sized>(rng: &mut R) -> [C64; 2] {
    let v = gaussian_vec(rng, 2);
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

/// `|a⟩⊗|b⟩` with both factors Haar-random.
pub fn sample_product_state<R: Rng + ?Sized>(rng: &mut R) -> PureState {
    let a = sample_qubit(rng);
    let b = sample_qubit(rng);
    PureState::normalize(&kron_vec(&a, &b)).unwrap()
}

/// Haar-random 2×2 unitary.
pub fn sample_unitary2<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    let a = sample_qubit(rng);
    let phase = rng.random::<f64>() * 2.0 * PI;
    let e = C64::from_polar(1.0, phase);
    // Columns a and e·(−a₁*, a₀*)ᵀ.
    ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => a[0],
        (1, 0) => a[1],
        (0, 1) => -a[1].conj() * e,
        _ => a[0].conj() * e,
    })
}

/// `u ⊗ v` with independent Haar factors.
pub fn sample_local_unitary<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    let u = sample_unitary2(rng);
    let v = sample_unitary2(rng);
    kron(&u, &v)
}

pub fn random_pure_state(seed: u64) -> PureState {
    sample_pure_state(&mut seeded_rng(seed))
}

pub fn random_product_state(seed: u64) -> PureState {
    sample_product_state(&mut seeded_rng(seed))
}

pub fn random_local_unitary(seed: u64) -> ComplexMatrix {
    sample_local_unitary(&mut seeded_rng(seed))
}

fn mixture(vectors: &[Vec<C64>], weights: &[f64]) -> Result<DensityMatrix> {
    let mut m = HermitianMatrix::zeros(4);
    for (v, w) in vectors.iter().zip(weights) {
        m.add_scaled(*w, &HermitianMatrix::projector(v));
    }
    DensityMatrix::from_unnormalized(&m)
}

/// `Σ_k v_k v_k†` for `rank` complex Gaussian vectors, normalized.
pub fn random_density(rank: usize, seed: u64) -> Result<DensityMatrix> {
    if !(1..=4).contains(&rank) {
        return Err(Error::InvalidParam(format!("rank {rank} outside 1..=4")));
    }
    let mut rng = seeded_rng(seed);
    let vs: Vec<Vec<C64>> = (0..rank).map(|_| gaussian_vec(&mut rng, 4)).collect();
    mixture(&vs, &vec![1.0; rank])
}

/// Random convex mixture of `n_terms` product projectors.
pub fn random_separable(n_terms: usize, seed: u64) -> Result<DensityMatrix> {
    if n_terms == 0 {
        return Err(Error::InvalidParam("a separable mixture needs at least one term".into()));
    }
    let mut rng = seeded_rng(seed);
    let vs: Vec<Vec<C64>> =
        (0..n_terms).map(|_| sample_product_state(&mut rng).as_slice().to_vec()).collect();
    let ws: Vec<f64> = (0..n_terms).map(|_| 0.05 + rng.random::<f64>()).collect();
    mixture(&vs, &ws)
}

/// Random rank-3 state whose kernel is spanned by `gamma`.
pub fn sample_rank3_orthogonal<R: Rng + ?Sized>(rng: &mut R, gamma: &PureState) -> Result<DensityMatrix> {
    let g = gamma.as_slice();
    let vs: Vec<Vec<C64>> = (0..3)
        .map(|_| {
            let v = gaussian_vec(rng, 4);
            let ov = inner(g, &v);
            v.iter().zip(g).map(|(x, y)| x - ov * y).collect()
        })
        .collect();
    mixture(&vs, &[1.0; 3])
}

/// Rank-3 state orthogonal to a random product state.
pub fn rank3_product_gamma(seed: u64) -> Result<DensityMatrix> {
    let mut rng = seeded_rng(seed);
    let gamma = sample_product_state(&mut rng);
    sample_rank3_orthogonal(&mut rng, &gamma)
}

/// Rank-3 state orthogonal to a random pure state with concurrence at least 0.05.
pub fn rank3_entangled_gamma(seed: u64) -> Result<DensityMatrix> {
    let mut rng = seeded_rng(seed);
    let gamma = loop {
        let g = sample_pure_state(&mut rng);
        if concurrence(&g) >= 0.05 {
            break g;
        }
    };
    sample_rank3_orthogonal(&mut rng, &gamma)
}

/// A state `s·σ + (1−s)|ψ(θ)⟩⟨ψ(θ)|` in a random local frame, where `σ` is a
/// rank-3 mixture of product states orthogonal to `|+−⟩` and `ψ(θ)` is the
/// rotated Bell vector. Such states are solved in closed form.
#[derive(Clone, Debug)]
pub struct AnalyticProductSample {
    pub rho: DensityMatrix,
    pub s: f64,
    pub theta: f64,
    /// Local unitary applied after construction.
    pub frame: ComplexMatrix,
}

pub fn analytic_product_sample(seed: u64) -> Result<AnalyticProductSample> {
    let mut rng = seeded_rng(seed);
    let plus = [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)];
    let minus = [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(-FRAC_1_SQRT_2, 0.0)];
    // Members of the form |−⟩|b⟩ or |a⟩|+⟩ are orthogonal to |+−⟩ and carry no |++⟩⟨−−| coherence.
    let n_terms = 4 + (rng.random::<u32>() % 3) as usize;
    let vs: Vec<Vec<C64>> = (0..n_terms)
        .map(|k| {
            let q = sample_qubit(&mut rng);
            if k % 2 == 0 {
                kron_vec(&minus, &q)
            } else {
                kron_vec(&q, &plus)
            }
        })
        .collect();
    let ws: Vec<f64> = (0..n_terms).map(|_| 0.1 + rng.random::<f64>()).collect();
    let sigma = mixture(&vs, &ws)?;
    let s = 0.2 + 0.6 * rng.random::<f64>();
    let theta = (2.0 * rng.random::<f64>() - 1.0) * PI;
    let psi = rotated_bell(theta);
    let m = sigma.scale(s).plus(&psi.projector().scale(1.0 - s));
    let frame = sample_local_unitary(&mut rng);
    let rho = DensityMatrix::new(m)?.conjugated(&frame);
    Ok(AnalyticProductSample { rho, s, theta, frame })
}
