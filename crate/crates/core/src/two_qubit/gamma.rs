//! Canonical form of the pure state orthogonal to a rank-3 state, and the
//! Γ operator basis of its three-dimensional support.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::Result;
use crate::linalg::{
    eig_hermitian, frobenius_inner, inner, kron, kron_vec, restrict, vec_norm, ComplexMatrix,
    HermitianMatrix, C64, ONE, ZERO,
};

use super::pauli::{partial_transpose_1, pauli_basis, sigma_tau};
use super::state::{concurrence, PureState};

fn plus() -> [C64; 2] {
    [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)]
}

fn minus() -> [C64; 2] {
    [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(-FRAC_1_SQRT_2, 0.0)]
}

/// Schmidt weights `(c, s)` of the canonical state with concurrence `q`.
fn schmidt_weights(q: f64) -> (f64, f64) {
    let p = (1.0 - q * q).max(0.0).sqrt();
    (((1.0 + p) / 2.0).sqrt(), ((1.0 - p) / 2.0).sqrt())
}

/// `c|+−⟩ − s|−+⟩`, whose projector is
/// `¼(1 + pσ₁ − pτ₁ − σ₁τ₁ − qσ₂τ₂ − qσ₃τ₃)` with `p = √(1−q²)`.
pub fn canonical_gamma_vector(q: f64) -> PureState {
    let (c, s) = schmidt_weights(q);
    let pm = kron_vec(&plus(), &minus());
    let mp = kron_vec(&minus(), &plus());
    let v: Vec<C64> = pm.iter().zip(&mp).map(|(a, b)| a * c - b * s).collect();
    PureState::normalize(&v).expect("canonical vector is nonzero")
}

/// The canonical projector written out in Pauli components.
pub fn canonical_gamma_projector(q: f64) -> HermitianMatrix {
    let p = (1.0 - q * q).max(0.0).sqrt();
    let terms = [
        (1.0, sigma_tau(0, 0)),
        (p, sigma_tau(1, 0)),
        (-p, sigma_tau(0, 1)),
        (-1.0, sigma_tau(1, 1)),
        (-q, sigma_tau(2, 2)),
        (-q, sigma_tau(3, 3)),
    ];
    let mut out = HermitianMatrix::zeros(4);
    for (w, e) in &terms {
        out.add_scaled(*w, e);
    }
    out.scale(0.25)
}

/// Local frame bringing an orthogonal pure state into canonical form.
#[derive(Clone, Debug)]
pub struct CanonicalGamma {
    /// Concurrence of γ.
    pub q: f64,
    /// `√(1 − q²)`.
    pub p: f64,
    pub u_local: ComplexMatrix,
    pub v_local: ComplexMatrix,
    /// γ as given, in the caller's frame.
    pub input: PureState,
}

impl CanonicalGamma {
    /// The canonical state itself, with an identity frame.
    pub fn canonical(q: f64) -> Self {
        Self {
            q,
            p: (1.0 - q * q).max(0.0).sqrt(),
            u_local: ComplexMatrix::identity(2),
            v_local: ComplexMatrix::identity(2),
            input: canonical_gamma_vector(q),
        }
    }

    /// `u ⊗ v`, mapping the caller's frame to the canonical one.
    pub fn frame(&self) -> ComplexMatrix {
        kron(&self.u_local, &self.v_local)
    }

    pub fn canonical_vector(&self) -> PureState {
        canonical_gamma_vector(self.q)
    }

    /// Same frame with the concurrence snapped to zero; used once γ has been
    /// classified as a product state.
    pub fn as_product(&self) -> Self {
        Self { q: 0.0, p: 1.0, ..self.clone() }
    }
}

fn unit2(v: [C64; 2]) -> [C64; 2] {
    let n = vec_norm(&v);
    [v[0] / n, v[1] / n]
}

fn orthogonal2(v: [C64; 2]) -> [C64; 2] {
    [-v[1].conj(), v[0].conj()]
}

/// Reduces `γ` to the canonical `c|+−⟩ − s|−+⟩` form by a Schmidt
/// decomposition followed by the fixed local rotation onto the `|±⟩` basis.
pub fn canonicalize_gamma(gamma: &PureState) -> Result<CanonicalGamma> {
    let g = gamma.amplitudes();
    let coeff = ComplexMatrix::from_fn(2, |i, j| g[2 * i + j]);
    let reduced = HermitianMatrix::hermitize(&(&coeff * &coeff.adjoint()));
    let spec = eig_hermitian(&reduced)?;
    let a1 = spec.vector(1);
    let a1 = unit2([a1[0], a1[1]]);
    let a2 = unit2(orthogonal2(a1));

    // w_k = (⟨a_k| ⊗ 1)|γ⟩
    let contract = |a: &[C64; 2]| -> [C64; 2] {
        [
            a[0].conj() * g[0] + a[1].conj() * g[2],
            a[0].conj() * g[1] + a[1].conj() * g[3],
        ]
    };
    let w1 = contract(&a1);
    let w2 = contract(&a2);
    let b1 = unit2(w1);
    // Orthogonal complement of b1 with phase taken from w2 when it is resolvable.
    let mut b2 = orthogonal2(b1);
    let overlap = b2[0].conj() * w2[0] + b2[1].conj() * w2[1];
    let d1 = vec_norm(&w1);
    let d2 = overlap;
    let phase2 = if d2.norm() > 1e-300 { d2.conj() / d2.norm() } else { ONE };
    b2 = unit2(b2);

    let bra = |k: &[C64; 2], a: &[C64; 2], s: C64| {
        ComplexMatrix::from_fn(2, |i, j| k[i] * a[j].conj() * s)
    };
    let u_local = &bra(&plus(), &a1, ONE) + &bra(&minus(), &a2, -phase2);
    let v_local = &bra(&minus(), &b1, ONE) + &bra(&plus(), &b2, ONE);

    let s = d2.norm();
    let norm = (d1 * d1 + s * s).sqrt();
    let q = (2.0 * d1 * s / (norm * norm)).min(1.0);
    debug_assert!((q - concurrence(gamma)).abs() < 1e-8);
    Ok(CanonicalGamma { q, p: (1.0 - q * q).max(0.0).sqrt(), u_local, v_local, input: gamma.clone() })
}

/// Orthogonal operator basis `{Γ_1, …, Γ_9}` of the support of `P₃ = 1 − γ`
/// in the canonical frame.
///
/// `Γ_1 = P₃`, `Γ_8 = ½(σ₂τ₂ − σ₃τ₃)`, `Γ_9 = ½(σ₂τ₃ + σ₃τ₂)`; `Γ_2..Γ_7`
/// come from Gram-Schmidt on the compressed Pauli operators `P₃ E_k P₃`, in
/// index order, normalized to `tr{Γ²} = 2`.
#[derive(Clone, Debug)]
pub struct GammaBasis {
    pub q: f64,
    pub gamma: PureState,
    pub p3: HermitianMatrix,
    /// Orthonormal basis of the support of `P₃`: `|++⟩, |−−⟩, s|+−⟩ + c|−+⟩`.
    pub support: Vec<Vec<C64>>,
    pub elements: Vec<HermitianMatrix>,
}

impl GammaBasis {
    /// Zero-based: `get(0)` is `Γ_1`.
    pub fn get(&self, k: usize) -> &HermitianMatrix {
        &self.elements[k]
    }

    pub fn gamma8(&self) -> &HermitianMatrix {
        &self.elements[7]
    }

    pub fn gamma9(&self) -> &HermitianMatrix {
        &self.elements[8]
    }

    pub fn norm_sq(&self, k: usize) -> f64 {
        if k == 0 {
            3.0
        } else {
            2.0
        }
    }

    /// 3×3 matrix of `Γ_k` in [`Self::support`].
    pub fn restricted(&self, k: usize) -> ComplexMatrix {
        restrict(&self.elements[k], &self.support)
    }

    /// Components `tr{Γ_k H}`.
    pub fn coefficients(&self, h: &HermitianMatrix) -> Vec<f64> {
        self.elements.iter().map(|g| g.trace_product(h).re).collect()
    }

    /// `Σ_k Γ_k tr{Γ_k H} / tr{Γ_k²}`, which equals `P₃ H P₃`.
    pub fn expand(&self, h: &HermitianMatrix) -> HermitianMatrix {
        let mut out = HermitianMatrix::zeros(4);
        for (k, c) in self.coefficients(h).iter().enumerate() {
            out.add_scaled(c / self.norm_sq(k), &self.elements[k]);
        }
        out
    }

    /// `⅓ Σ_k x_k Γ_k` for the leading `x.len()` elements.
    pub fn combine(&self, x: &[f64]) -> HermitianMatrix {
        let mut out = HermitianMatrix::zeros(4);
        for (xk, g) in x.iter().zip(&self.elements) {
            out.add_scaled(*xk, g);
        }
        out.scale(1.0 / 3.0)
    }

    /// Orthonormal basis of the support of `1 − γ^T1`; only rank 3 when γ is a product state.
    pub fn pt_support(&self) -> Result<Vec<Vec<C64>>> {
        let spec = eig_hermitian(&partial_transpose_1(&self.gamma.projector()))?;
        Ok((0..3).map(|k| spec.vector(k)).collect())
    }
}

pub fn gamma_basis(cg: &CanonicalGamma) -> GammaBasis {
    let q = cg.q;
    let (c, s) = schmidt_weights(q);
    let gamma = canonical_gamma_vector(q);
    let p3 = HermitianMatrix::identity(4).minus(&gamma.projector());

    let pp = kron_vec(&plus(), &plus());
    let mm = kron_vec(&minus(), &minus());
    let pm = kron_vec(&plus(), &minus());
    let mp = kron_vec(&minus(), &plus());
    let perp: Vec<C64> = pm.iter().zip(&mp).map(|(a, b)| a * s + b * c).collect();
    let support = vec![pp, mm, perp];

    let g8 = sigma_tau(2, 2).minus(&sigma_tau(3, 3)).scale(0.5);
    let g9 = sigma_tau(2, 3).plus(&sigma_tau(3, 2)).scale(0.5);

    let mut accepted: Vec<HermitianMatrix> = vec![p3.clone(), g8.clone(), g9.clone()];
    let mut middle: Vec<HermitianMatrix> = Vec::with_capacity(6);
    for e in pauli_basis().elements().iter().skip(1) {
        if middle.len() == 6 {
            break;
        }
        let mut cand = e.conjugate_by(&p3);
        for b in &accepted {
            let w = frobenius_inner(b, &cand).unwrap() / frobenius_inner(b, b).unwrap();
            cand.add_scaled(-w, b);
        }
        let n = cand.frobenius_norm();
        if n < 1e-8 {
            continue;
        }
        let cand = cand.scale(2f64.sqrt() / n);
        accepted.push(cand.clone());
        middle.push(cand);
    }
    assert_eq!(middle.len(), 6, "support operator space must be 9-dimensional");

    let mut elements = Vec::with_capacity(9);
    elements.push(p3.clone());
    elements.extend(middle);
    elements.push(g8);
    elements.push(g9);
    GammaBasis { q, gamma, p3, support, elements }
}

/// `|φ⁺⟩ = (|00⟩+|11⟩)/√2`.
pub fn phi_plus() -> PureState {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    PureState::new([h, ZERO, ZERO, h]).unwrap()
}

/// `|ψ⁺⟩ = i(|01⟩+|10⟩)/√2`.
pub fn psi_plus() -> PureState {
    let h = C64::new(0.0, FRAC_1_SQRT_2);
    PureState::new([ZERO, h, h, ZERO]).unwrap()
}

/// `cos(θ/2)|φ⁺⟩ − sin(θ/2)|ψ⁺⟩`.
pub fn rotated_bell(theta: f64) -> PureState {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let v: Vec<C64> = phi_plus()
        .as_slice()
        .iter()
        .zip(psi_plus().as_slice())
        .map(|(a, b)| a * c - b * s)
        .collect();
    PureState::normalize(&v).unwrap()
}

/// `|⟨a|b⟩|` for two pure states, ignoring global phase.
pub fn overlap(a: &PureState, b: &PureState) -> f64 {
    inner(a.as_slice(), b.as_slice()).norm()
}
