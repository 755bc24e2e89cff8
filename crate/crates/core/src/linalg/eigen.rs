//! Cyclic complex Jacobi eigensolver and the spectral helpers built on it.

use super::matrix::{inner, ComplexMatrix, HermitianMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Off-diagonal Frobenius norm at which a sweep sequence stops, relative to `‖A‖_F`.
const OFF_DIAG_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;
/// Eigenvalues closer than this (relative) are treated as one degenerate cluster.
const CLUSTER_TOL: f64 = 1e-10;

/// Eigenvalues in ascending order with the matching unitary matrix of column
/// eigenvectors.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Spectrum {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// `Σ_k f(λ_k) |v_k⟩⟨v_k|`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let n = self.values.len();
        let q = &self.vectors;
        let mut out = ComplexMatrix::zeros(n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let qik = q[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += qik * q[(j, k)].conj();
                }
            }
        }
        HermitianMatrix::hermitize(&out)
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.map(|l| l)
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Full spectral decomposition of a Hermitian matrix.
///
/// Sweeps visit pairs `(p, q)` in row-major order, eigenvalues are sorted
/// ascending with a stable sort, and each numerically degenerate cluster is
/// re-orthonormalized by Gram-Schmidt in index order, so identical input bits
/// give identical output bits.
pub fn eig_hermitian(a: &HermitianMatrix) -> Result<Spectrum> {
    if !a.is_finite() {
        return Err(Error::InvalidMatrix("non-finite entries".into()));
    }
    let n = a.dim();
    let mut m = a.as_matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let norm = m.frobenius_norm();
    let target = OFF_DIAG_TOL * norm;

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&m) <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase = apq / mag;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // R = [[c, s·e^{iφ}], [−s·e^{−iφ}, c]] on (p, q); M ← R† M R.
                let rpq = phase * s;
                let rqp = -phase.conj() * s;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * c + mkq * rqp;
                    m[(k, q)] = mkp * rpq + mkq * c;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = mpk * c + mqk * rqp.conj();
                    m[(q, k)] = mpk * rpq.conj() + mqk * c;
                }
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * rqp;
                    v[(k, q)] = vkp * rpq + vkq * c;
                }
            }
        }
    }
    if off_diagonal_norm(&m) > target.max(f64::MIN_POSITIVE) * 10.0 {
        return Err(Error::InvalidMatrix("Jacobi iteration did not converge".into()));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let values: Vec<f64> = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut columns: Vec<Vec<C64>> = order.iter().map(|&i| v.column(i)).collect();

    let cluster_tol = CLUSTER_TOL * norm.max(1.0);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] <= cluster_tol {
            end += 1;
        }
        if end - start > 1 {
            gram_schmidt(&mut columns[start..end]);
        }
        start = end;
    }

    let vectors = ComplexMatrix::from_fn(n, |i, j| columns[j][i]);
    Ok(Spectrum { values, vectors })
}

fn gram_schmidt(cols: &mut [Vec<C64>]) {
    for k in 0..cols.len() {
        for j in 0..k {
            let proj = inner(&cols[j], &cols[k]);
            let (head, tail) = cols.split_at_mut(k);
            for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                *x -= proj * y;
            }
        }
        let norm = cols[k].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[k].iter_mut() {
            *x /= norm;
        }
    }
}

fn rel_scale(a: &ComplexMatrix) -> f64 {
    a.frobenius_norm().max(1.0)
}

/// `λ_min(A) ≥ −tol·max(1, ‖A‖_F)`.
pub fn is_psd(a: &HermitianMatrix, tol: f64) -> Result<bool> {
    let spec = eig_hermitian(a)?;
    Ok(spec.min() >= -tol * rel_scale(a))
}

pub fn min_eigenvalue(a: &HermitianMatrix) -> Result<f64> {
    Ok(eig_hermitian(a)?.min())
}

/// Principal square root of a PSD matrix; eigenvalues in `[−1e−9·scale, 0)` are clamped.
pub fn psd_sqrt(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let spec = eig_hermitian(a)?;
    if spec.min() < -1e-9 * rel_scale(a) {
        return Err(Error::NotPsd(spec.min()));
    }
    // Eigenvalues at roundoff level are zero to working precision; their square
    // roots would otherwise inflate to ~1e-8.
    let floor = 64.0 * f64::EPSILON * spec.values.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    Ok(spec.map(|l| if l > floor { l.sqrt() } else { 0.0 }))
}

/// Number of eigenvalues with `|λ| > eps·max(1, ‖A‖_F)`.
pub fn rank_eps(a: &HermitianMatrix, eps: f64) -> Result<usize> {
    let spec = eig_hermitian(a)?;
    let cut = eps * rel_scale(a);
    Ok(spec.values.iter().filter(|l| l.abs() > cut).count())
}

/// Hilbert-Schmidt pairing `tr{A·B}`; real for Hermitian arguments.
pub fn frobenius_inner(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch { expected: a.dim(), got: b.dim() });
    }
    Ok(a.trace_product(b).re)
}

/// Tensor product `A ⊗ B`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim(), b.dim());
    ComplexMatrix::from_fn(na * nb, |i, j| a[(i / nb, j / nb)] * b[(i % nb, j % nb)])
}

/// State-vector tensor product.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}
