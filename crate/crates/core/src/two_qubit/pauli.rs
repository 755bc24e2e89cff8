use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::OnceLock;

use crate::linalg::{kron, ComplexMatrix, HermitianMatrix, C64, I, ONE, ZERO};

/// Single-qubit Pauli matrix `σ_k`, `k = 0..3` with `σ_0 = 1`.
pub fn pauli(k: usize) -> ComplexMatrix {
    let rows = match k {
        0 => [[ONE, ZERO], [ZERO, ONE]],
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -I], [I, ZERO]],
        3 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => panic!("Pauli index {k} out of range"),
    };
    ComplexMatrix::from_fn(2, |i, j| rows[i][j])
}

/// `σ_i τ_j = σ_i ⊗ σ_j` on two qubits.
pub fn sigma_tau(i: usize, j: usize) -> HermitianMatrix {
    HermitianMatrix::hermitize(&kron(&pauli(i), &pauli(j)))
}

/// The sixteen operators `E_{4i+j+1} = σ_i τ_j`, lexicographic in `(i, j)`.
///
/// They are mutually orthogonal with `tr{E_a E_b} = 4δ_ab` and every element
/// except `E_1 = 1` is traceless.
#[derive(Clone, Debug)]
pub struct PauliBasis {
    elements: Vec<HermitianMatrix>,
}

impl PauliBasis {
    pub fn elements(&self) -> &[HermitianMatrix] {
        &self.elements
    }

    /// Zero-based access: `get(4*i + j)` is `σ_i τ_j`.
    pub fn get(&self, k: usize) -> &HermitianMatrix {
        &self.elements[k]
    }

    /// Real components `tr{E_k H}` of a Hermitian operator.
    pub fn coefficients(&self, h: &HermitianMatrix) -> [f64; 16] {
        let mut out = [0.0; 16];
        for (o, e) in out.iter_mut().zip(&self.elements) {
            *o = e.trace_product(h).re;
        }
        out
    }

    /// `¼ Σ_k x_k E_k`.
    pub fn combine(&self, x: &[f64]) -> HermitianMatrix {
        let mut out = HermitianMatrix::zeros(4);
        for (xk, e) in x.iter().zip(&self.elements) {
            out.add_scaled(*xk, e);
        }
        out.scale(0.25)
    }
}

pub fn pauli_basis() -> &'static PauliBasis {
    static BASIS: OnceLock<PauliBasis> = OnceLock::new();
    BASIS.get_or_init(|| PauliBasis {
        elements: (0..4).flat_map(|i| (0..4).map(move |j| sigma_tau(i, j))).collect(),
    })
}

/// Columns are the magic basis vectors
/// `(|00⟩+|11⟩)/√2, i(|00⟩−|11⟩)/√2, i(|01⟩+|10⟩)/√2, (|01⟩−|10⟩)/√2`.
pub fn magic_matrix() -> ComplexMatrix {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let ih = C64::new(0.0, FRAC_1_SQRT_2);
    let cols = [
        [h, ZERO, ZERO, h],
        [ih, ZERO, ZERO, -ih],
        [ZERO, ih, ih, ZERO],
        [ZERO, h, -h, ZERO],
    ];
    ComplexMatrix::from_fn(4, |i, j| cols[j][i])
}

/// Matrix of `A` in the magic basis, `M†·A·M`.
pub fn to_magic(a: &HermitianMatrix) -> HermitianMatrix {
    a.conjugate_by(&magic_matrix().adjoint())
}

/// Inverse of [`to_magic`].
pub fn from_magic(a: &HermitianMatrix) -> HermitianMatrix {
    a.conjugate_by(&magic_matrix())
}

/// Partial transposition on the first qubit in the convention `σ → −σ`, `τ → τ`.
///
/// This is the plain first-factor transpose followed by conjugation with
/// `σ_2 ⊗ 1`. The two differ by a local unitary, so positivity is unaffected,
/// and this form commutes with every local unitary conjugation `(u⊗v)·(u⊗v)†`.
pub fn partial_transpose_1(a: &HermitianMatrix) -> HermitianMatrix {
    let mut t = ComplexMatrix::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    t[(2 * k + j, 2 * i + l)] = a[(2 * i + j, 2 * k + l)];
                }
            }
        }
    }
    // (σ_2 ⊗ 1) T (σ_2 ⊗ 1): swaps the qubit-1 blocks and negates the off-diagonal ones.
    let out = ComplexMatrix::from_fn(4, |r, c| {
        let (r1, r2) = (r / 2, r % 2);
        let (c1, c2) = (c / 2, c % 2);
        let sign = if r1 == c1 { 1.0 } else { -1.0 };
        t[(2 * (1 - r1) + r2, 2 * (1 - c1) + c2)] * sign
    });
    HermitianMatrix::hermitize(&out)
}
