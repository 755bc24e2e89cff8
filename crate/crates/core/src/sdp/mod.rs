//! Block-diagonal Hermitian semidefinite programs in the canonical pair
//!
//! ```text
//! primal: minimize c·x  subject to  F(x) = F0 + Σ x_i F_i ⪰ 0
//! dual:   maximize −tr{F0 Z}  subject to  tr{F_i Z} = c_i,  Z ⪰ 0
//! ```
//!
//! solved by an infeasible primal-dual path-following method.

mod block;
mod solver;

pub use block::{BlockLayout, BlockMatrix};
pub use solver::{
    dual_residuals, feasible_start, solve, solve_unchecked, IterationRecord, ResidualReport,
    SdpSolution, SolveStatus, SolverConfig, StartingPoint,
};

use crate::error::{Error, Result};

/// Problem data; every matrix conforms to `layout`.
#[derive(Clone, Debug, PartialEq)]
pub struct SdpProblem {
    layout: BlockLayout,
    f0: BlockMatrix,
    f: Vec<BlockMatrix>,
    c: Vec<f64>,
}

impl SdpProblem {
    pub fn new(layout: BlockLayout, f0: BlockMatrix, f: Vec<BlockMatrix>, c: Vec<f64>) -> Result<Self> {
        if f.is_empty() {
            return Err(Error::InvalidParam("an SDP needs at least one variable".into()));
        }
        if f.len() != c.len() {
            return Err(Error::DimMismatch { expected: f.len(), got: c.len() });
        }
        for m in std::iter::once(&f0).chain(&f) {
            layout.check(m)?;
            if !m.is_finite() {
                return Err(Error::InvalidMatrix("non-finite problem data".into()));
            }
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite objective".into()));
        }
        Ok(Self { layout, f0, f, c })
    }

    pub fn layout(&self) -> &BlockLayout {
        &self.layout
    }

    pub fn f0(&self) -> &BlockMatrix {
        &self.f0
    }

    pub fn f(&self) -> &[BlockMatrix] {
        &self.f
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// Number of variables.
    pub fn m(&self) -> usize {
        self.f.len()
    }

    /// `F(x) = F0 + Σ x_i F_i`.
    pub fn eval(&self, x: &[f64]) -> BlockMatrix {
        let mut out = self.f0.clone();
        for (xi, fi) in x.iter().zip(&self.f) {
            out.add_scaled(*xi, fi);
        }
        out
    }

    /// `Σ x_i F_i` without the constant term.
    pub fn linear_part(&self, x: &[f64]) -> BlockMatrix {
        let mut out = BlockMatrix::zeros(&self.layout);
        for (xi, fi) in x.iter().zip(&self.f) {
            out.add_scaled(*xi, fi);
        }
        out
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.c.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn dual_objective(&self, z: &BlockMatrix) -> f64 {
        -self.f0.trace_product(z)
    }

    /// `tr{F_i Z} − c_i`.
    pub fn equality_residuals(&self, z: &BlockMatrix) -> Vec<f64> {
        self.f.iter().zip(&self.c).map(|(fi, ci)| fi.trace_product(z) - ci).collect()
    }
}
