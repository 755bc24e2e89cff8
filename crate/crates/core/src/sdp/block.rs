use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, HermitianMatrix};

/// Sizes of the diagonal blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockLayout {
    block_dims: Vec<usize>,
}

impl BlockLayout {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() || block_dims.contains(&0) {
            return Err(Error::InvalidParam(format!("invalid block layout {block_dims:?}")));
        }
        Ok(Self { block_dims })
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn num_blocks(&self) -> usize {
        self.block_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.block_dims.iter().sum()
    }

    pub fn check(&self, m: &BlockMatrix) -> Result<()> {
        if m.blocks.len() != self.block_dims.len() {
            return Err(Error::DimMismatch { expected: self.block_dims.len(), got: m.blocks.len() });
        }
        for (b, &d) in m.blocks.iter().zip(&self.block_dims) {
            if b.dim() != d {
                return Err(Error::DimMismatch { expected: d, got: b.dim() });
            }
        }
        Ok(())
    }
}

/// Block-diagonal Hermitian matrix stored block by block.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMatrix {
    blocks: Vec<HermitianMatrix>,
}

impl BlockMatrix {
    pub fn new(blocks: Vec<HermitianMatrix>) -> Self {
        Self { blocks }
    }

    pub fn zeros(layout: &BlockLayout) -> Self {
        Self { blocks: layout.block_dims.iter().map(|&d| HermitianMatrix::zeros(d)).collect() }
    }

    pub fn identity(layout: &BlockLayout) -> Self {
        Self { blocks: layout.block_dims.iter().map(|&d| HermitianMatrix::identity(d)).collect() }
    }

    pub fn blocks(&self) -> &[HermitianMatrix] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &HermitianMatrix {
        &self.blocks[k]
    }

    pub fn into_blocks(self) -> Vec<HermitianMatrix> {
        self.blocks
    }

    pub fn is_finite(&self) -> bool {
        self.blocks.iter().all(|b| b.is_finite())
    }

    /// `Re tr{A·B}` summed over blocks.
    pub fn trace_product(&self, other: &Self) -> f64 {
        self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.trace_product(b).re).sum()
    }

    pub fn trace(&self) -> f64 {
        self.blocks.iter().map(|b| b.trace_re()).sum()
    }

    pub fn add_scaled(&mut self, s: f64, other: &Self) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            a.add_scaled(s, b);
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { blocks: self.blocks.iter().map(|b| b.scale(s)).collect() }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(1.0, other);
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(-1.0, other);
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.blocks.iter().map(|b| b.frobenius_norm().powi(2)).sum::<f64>().sqrt()
    }

    /// `‖A·B‖_F` computed block by block.
    pub fn product_norm(&self, other: &Self) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (&**a * &**b).frobenius_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let mut m = f64::INFINITY;
        for b in &self.blocks {
            m = m.min(eig_hermitian(b)?.min());
        }
        Ok(m)
    }
}
