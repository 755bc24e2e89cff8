//! Witness positivity over product states, by Haar sampling plus a Bloch-angle grid.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{kron_vec, vec_norm, HermitianMatrix, C64};
use crate::two_qubit::{sample_qubit, seeded_rng, PureState};

/// Product states over which `tr{Wσ} ≥ 0` is expected.
#[derive(Clone, Debug, PartialEq)]
pub enum WitnessDomain {
    AllProducts,
    /// Product states orthogonal to the given vector, which is where a
    /// rank-3 witness acts.
    OrthogonalTo(PureState),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WitnessSampling {
    pub samples: usize,
    /// Points per Bloch angle; zero disables the grid.
    pub grid: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessCheck {
    /// Minimum of `tr{Wσ}` over every evaluated product state.
    pub min_over_samples: f64,
    pub tr_w_rho: f64,
    pub n_evaluated: usize,
}

fn bloch(theta: f64, phi: f64) -> [C64; 2] {
    [C64::new((theta / 2.0).cos(), 0.0), C64::from_polar((theta / 2.0).sin(), phi)]
}

/// `g × g` single-qubit states on Bloch angles `θ_i = πi/(g−1)`, `φ_j = 2πj/g`.
pub fn product_grid(g: usize) -> Vec<[C64; 2]> {
    let dt = if g > 1 { PI / (g - 1) as f64 } else { 0.0 };
    (0..g)
        .flat_map(|i| (0..g).map(move |j| bloch(dt * i as f64, 2.0 * PI * j as f64 / g as f64)))
        .collect()
}

/// Unit vector orthogonal to `w`, or `|0⟩` when `w` vanishes.
fn orthogonal_unit(w: [C64; 2]) -> [C64; 2] {
    let n = vec_norm(&w);
    if n < 1e-12 {
        return [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    }
    [-w[1].conj() / n, w[0].conj() / n]
}

/// Second factor `b` with `⟨γ|a⊗b⟩ = 0`.
fn complete_second(gamma: &[C64], a: &[C64; 2]) -> [C64; 2] {
    let w = [
        a[0].conj() * gamma[0] + a[1].conj() * gamma[2],
        a[0].conj() * gamma[1] + a[1].conj() * gamma[3],
    ];
    orthogonal_unit(w)
}

/// First factor `a` with `⟨γ|a⊗b⟩ = 0`.
fn complete_first(gamma: &[C64], b: &[C64; 2]) -> [C64; 2] {
    let w = [
        b[0].conj() * gamma[0] + b[1].conj() * gamma[1],
        b[0].conj() * gamma[2] + b[1].conj() * gamma[3],
    ];
    orthogonal_unit(w)
}

/// Minimum of `tr{Wσ}` over `samples` random product states and the grid,
/// together with `tr{Wρ}`. The sample sequence depends only on `seed`, so a
/// longer run sees a superset of the states of a shorter one.
pub fn check_witness(
    w: &HermitianMatrix,
    rho: &HermitianMatrix,
    sampling: &WitnessSampling,
    domain: &WitnessDomain,
) -> Result<WitnessCheck> {
    if sampling.samples == 0 {
        return Err(Error::InvalidParam("witness check needs at least one sample".into()));
    }
    let mut min = f64::INFINITY;
    let mut count = 0usize;
    let mut eval = |a: &[C64; 2], b: &[C64; 2]| {
        min = min.min(w.expectation(&kron_vec(a, b)));
        count += 1;
    };
    let mut rng = seeded_rng(sampling.seed);
    for k in 0..sampling.samples {
        let a = sample_qubit(&mut rng);
        let b = sample_qubit(&mut rng);
        match domain {
            WitnessDomain::AllProducts => eval(&a, &b),
            WitnessDomain::OrthogonalTo(g) if k % 2 == 0 => eval(&a, &complete_second(g.as_slice(), &a)),
            WitnessDomain::OrthogonalTo(g) => eval(&complete_first(g.as_slice(), &b), &b),
        }
    }
    let grid = product_grid(sampling.grid);
    match domain {
        WitnessDomain::AllProducts => {
            for a in &grid {
                for b in &grid {
                    eval(a, b);
                }
            }
        }
        WitnessDomain::OrthogonalTo(g) => {
            for q in &grid {
                eval(q, &complete_second(g.as_slice(), q));
                eval(&complete_first(g.as_slice(), q), q);
            }
        }
    }
    Ok(WitnessCheck { min_over_samples: min, tr_w_rho: w.trace_product(rho).re, n_evaluated: count })
}
