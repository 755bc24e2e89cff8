use super::matrix::{vec_norm, ComplexMatrix, HermitianMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Pivots at or below this fraction of `max(1, ‖A‖_F)` are treated as zero.
const PIVOT_TOL: f64 = 1e-15;

struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

fn lu_factor(a: &ComplexMatrix) -> Result<Lu> {
    let n = a.dim();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let tiny = PIVOT_TOL * a.frobenius_norm().max(1.0);
    for k in 0..n {
        let mut piv = k;
        let mut best = lu[(k, k)].norm();
        for i in (k + 1)..n {
            let v = lu[(i, k)].norm();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best <= tiny {
            return Err(Error::SingularSystem);
        }
        if piv != k {
            perm.swap(k, piv);
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = t;
            }
        }
        let d = lu[(k, k)];
        for i in (k + 1)..n {
            let f = lu[(i, k)] / d;
            lu[(i, k)] = f;
            if f == ZERO {
                continue;
            }
            for j in (k + 1)..n {
                let u = lu[(k, j)];
                lu[(i, j)] -= f * u;
            }
        }
    }
    Ok(Lu { lu, perm })
}

impl Lu {
    fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = b.len();
        let mut y: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                y[i] = y[i] - l * y[j];
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let u = self.lu[(i, j)];
                y[i] = y[i] - u * y[j];
            }
            y[i] /= self.lu[(i, i)];
        }
        y
    }
}

/// Solves `A·x = b` by partially pivoted LU with one step of iterative refinement.
pub fn solve_hermitian_linear(a: &HermitianMatrix, b: &[C64]) -> Result<Vec<C64>> {
    if b.len() != a.dim() {
        return Err(Error::DimMismatch { expected: a.dim(), got: b.len() });
    }
    let lu = lu_factor(a)?;
    let mut x = lu.solve(b);
    let ax = a.matvec(&x);
    let r: Vec<C64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    if vec_norm(&r) > 0.0 {
        let dx = lu.solve(&r);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
    }
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::SingularSystem);
    }
    Ok(x)
}

/// Lower-triangular `L` with `A = L·L†`; fails with `NotPsd` unless `A` is positive definite.
pub fn cholesky(a: &HermitianMatrix) -> Result<ComplexMatrix> {
    let n = a.dim();
    let mut l = ComplexMatrix::zeros(n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPsd(d));
        }
        let djj = d.sqrt();
        l[(j, j)] = C64::new(djj, 0.0);
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Inverse of a lower-triangular matrix.
pub fn lower_inverse(l: &ComplexMatrix) -> ComplexMatrix {
    let n = l.dim();
    let mut inv = ComplexMatrix::zeros(n);
    for j in 0..n {
        inv[(j, j)] = l[(j, j)].inv();
        for i in (j + 1)..n {
            let mut s = ZERO;
            for k in j..i {
                s += l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -s / l[(i, i)];
        }
    }
    inv
}

/// Inverse of a Hermitian positive-definite matrix via Cholesky.
pub fn hpd_inverse(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let l = cholesky(a)?;
    let li = lower_inverse(&l);
    Ok(HermitianMatrix::hermitize(&(&li.adjoint() * &li)))
}
