//! Finite-dimensional C*-algebras `M_{d_1} ⊕ … ⊕ M_{d_k}`, their elements,
//! and states given by one density matrix per block.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::{CMat, C64};

/// Numerical thresholds used across the crate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Smallest admissible density eigenvalue (`-psd`).
    pub psd: f64,
    /// Hermiticity, trace normalization and centering checks.
    pub norm: f64,
    /// A density eigenvalue above this counts as strictly positive; also the
    /// rank cut for GNS Gram matrices.
    pub faithful: f64,
    /// Freeness residual bound for alternating centered moments.
    pub free: f64,
    /// Relative positivity threshold of the faithfulness witness search.
    pub pos: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            psd: 1e-10,
            norm: 1e-10,
            faithful: 1e-8,
            free: 1e-10,
            pos: 1e-9,
        }
    }
}

/// A direct sum of full matrix blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockAlgebra {
    label: String,
    block_dims: Vec<usize>,
}

impl BlockAlgebra {
    pub fn new(label: impl Into<String>, block_dims: Vec<usize>) -> Result<Arc<Self>> {
        let label = label.into();
        if block_dims.is_empty() {
            return Err(Error::Structural(format!("algebra `{label}` has no blocks")));
        }
        if let Some(b) = block_dims.iter().position(|&d| d == 0) {
            return Err(Error::Structural(format!("algebra `{label}`: block {b} has dimension 0")));
        }
        Ok(Arc::new(Self { label, block_dims }))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    /// Linear dimension `Σ d_b²`.
    pub fn linear_dim(&self) -> usize {
        self.block_dims.iter().map(|d| d * d).sum()
    }

    /// Offset of block `b` in the flattened coefficient vector.
    pub fn block_offset(&self, b: usize) -> usize {
        self.block_dims[..b].iter().map(|d| d * d).sum()
    }

    /// Flat index of the matrix unit `e^{(b)}_{ij}` (blocks in order, rows major).
    pub fn unit_index(&self, b: usize, i: usize, j: usize) -> usize {
        self.block_offset(b) + i * self.block_dims[b] + j
    }

    pub fn one(self: &Arc<Self>) -> AlgebraElement {
        AlgebraElement {
            parent: Arc::clone(self),
            blocks: self.block_dims.iter().map(|&d| CMat::identity(d, d)).collect(),
        }
    }

    pub fn zero(self: &Arc<Self>) -> AlgebraElement {
        AlgebraElement {
            parent: Arc::clone(self),
            blocks: self.block_dims.iter().map(|&d| CMat::zeros(d, d)).collect(),
        }
    }

    pub fn scalar(self: &Arc<Self>, c: C64) -> AlgebraElement {
        self.one().scale(c)
    }

    pub fn matrix_unit(self: &Arc<Self>, b: usize, i: usize, j: usize) -> Result<AlgebraElement> {
        let d = *self
            .block_dims
            .get(b)
            .ok_or_else(|| Error::Structural(format!("algebra `{}` has no block {b}", self.label)))?;
        if i >= d || j >= d {
            return Err(Error::Structural(format!("matrix unit ({i},{j}) outside block {b} of size {d}")));
        }
        let mut e = self.zero();
        e.blocks[b][(i, j)] = C64::new(1.0, 0.0);
        Ok(e)
    }

    /// All matrix units, ordered by [`BlockAlgebra::unit_index`].
    pub fn basis(self: &Arc<Self>) -> Vec<AlgebraElement> {
        let mut out = Vec::with_capacity(self.linear_dim());
        for (b, &d) in self.block_dims.iter().enumerate() {
            for i in 0..d {
                for j in 0..d {
                    out.push(self.matrix_unit(b, i, j).expect("index in range"));
                }
            }
        }
        out
    }

    pub fn element(self: &Arc<Self>, blocks: Vec<CMat>) -> Result<AlgebraElement> {
        self.check_blocks(&blocks, "element")?;
        Ok(AlgebraElement { parent: Arc::clone(self), blocks })
    }

    pub fn from_coefficients(self: &Arc<Self>, coeffs: &[C64]) -> Result<AlgebraElement> {
        if coeffs.len() != self.linear_dim() {
            return Err(Error::Structural(format!(
                "expected {} coefficients for `{}`, got {}",
                self.linear_dim(),
                self.label,
                coeffs.len()
            )));
        }
        let mut blocks = Vec::with_capacity(self.block_dims.len());
        let mut off = 0;
        for &d in &self.block_dims {
            blocks.push(CMat::from_row_slice(d, d, &coeffs[off..off + d * d]));
            off += d * d;
        }
        Ok(AlgebraElement { parent: Arc::clone(self), blocks })
    }

    fn check_blocks(&self, blocks: &[CMat], what: &str) -> Result<()> {
        if blocks.len() != self.block_dims.len() {
            return Err(Error::Structural(format!(
                "{what} for `{}` has {} blocks, expected {}",
                self.label,
                blocks.len(),
                self.block_dims.len()
            )));
        }
        for (b, (m, &d)) in blocks.iter().zip(&self.block_dims).enumerate() {
            if m.shape() != (d, d) {
                return Err(Error::Structural(format!(
                    "{what} for `{}`: block {b} has shape {:?}, expected ({d}, {d})",
                    self.label,
                    m.shape()
                )));
            }
        }
        Ok(())
    }
}

fn same_parent(a: &Arc<BlockAlgebra>, b: &Arc<BlockAlgebra>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::Structural(format!(
            "elements of different algebras `{}` and `{}`",
            a.label, b.label
        )))
    }
}

/// An element of a [`BlockAlgebra`], stored densely per block.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    parent: Arc<BlockAlgebra>,
    blocks: Vec<CMat>,
}

impl AlgebraElement {
    pub fn parent(&self) -> &Arc<BlockAlgebra> {
        &self.parent
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> &CMat {
        &self.blocks[b]
    }

    pub fn multiply(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        same_parent(&self.parent, &other.parent)?;
        Ok(AlgebraElement {
            parent: Arc::clone(&self.parent),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect(),
        })
    }

    pub fn adjoint(&self) -> AlgebraElement {
        AlgebraElement {
            parent: Arc::clone(&self.parent),
            blocks: self.blocks.iter().map(|m| m.adjoint()).collect(),
        }
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        same_parent(&self.parent, &other.parent)?;
        Ok(AlgebraElement {
            parent: Arc::clone(&self.parent),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: C64) -> AlgebraElement {
        AlgebraElement {
            parent: Arc::clone(&self.parent),
            blocks: self.blocks.iter().map(|m| m * c).collect(),
        }
    }

    /// Coefficients in the matrix-unit basis.
    pub fn coefficients(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.parent.linear_dim());
        for m in &self.blocks {
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    out.push(m[(i, j)]);
                }
            }
        }
        out
    }

    /// C*-norm: the largest singular value over all blocks.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(linalg::spectral_norm).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &AlgebraElement) -> Result<f64> {
        same_parent(&self.parent, &other.parent)?;
        Ok(self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| linalg::max_abs(&(a - b)))
            .fold(0.0, f64::max))
    }
}

/// Result of a faithfulness test: the smallest density eigenvalue is the margin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Faithfulness {
    pub faithful: bool,
    pub margin: f64,
}

/// A state `φ(a) = Σ_b tr(ρ_b a_b)`.
#[derive(Clone, Debug)]
pub struct StateSpec {
    parent: Arc<BlockAlgebra>,
    densities: Vec<CMat>,
    min_eigenvalues: Vec<f64>,
    faithful_tol: f64,
}

impl StateSpec {
    pub fn new(parent: &Arc<BlockAlgebra>, densities: Vec<CMat>, tol: &Tolerances) -> Result<Self> {
        parent.check_blocks(&densities, "density")?;
        let mut min_eigenvalues = Vec::with_capacity(densities.len());
        let mut trace = C64::new(0.0, 0.0);
        for (b, rho) in densities.iter().enumerate() {
            if !linalg::is_hermitian(rho, tol.norm) {
                return Err(Error::Validation(format!(
                    "state on `{}`: density of block {b} is not Hermitian",
                    parent.label
                )));
            }
            let lambda = linalg::min_hermitian_eigenvalue(rho);
            if lambda < -tol.psd {
                return Err(Error::Validation(format!(
                    "state on `{}`: density of block {b} has eigenvalue {lambda:e} < 0",
                    parent.label
                )));
            }
            min_eigenvalues.push(lambda);
            trace += rho.trace();
        }
        if (trace - C64::new(1.0, 0.0)).norm() > tol.norm {
            return Err(Error::Validation(format!(
                "state on `{}`: total trace {trace} != 1",
                parent.label
            )));
        }
        Ok(Self {
            parent: Arc::clone(parent),
            densities,
            min_eigenvalues,
            faithful_tol: tol.faithful,
        })
    }

    /// Diagonal densities from per-block weights.
    pub fn diagonal(parent: &Arc<BlockAlgebra>, weights: &[Vec<f64>], tol: &Tolerances) -> Result<Self> {
        let densities = weights
            .iter()
            .map(|w| CMat::from_diagonal(&crate::CVec::from_iterator(w.len(), w.iter().map(|&x| C64::new(x, 0.0)))))
            .collect();
        Self::new(parent, densities, tol)
    }

    /// The normalized trace `tr(a) / Σ d_b`.
    pub fn normalized_trace(parent: &Arc<BlockAlgebra>, tol: &Tolerances) -> Result<Self> {
        let total: usize = parent.block_dims.iter().sum();
        let w = 1.0 / total as f64;
        let weights: Vec<Vec<f64>> = parent.block_dims.iter().map(|&d| vec![w; d]).collect();
        Self::diagonal(parent, &weights, tol)
    }

    pub fn parent(&self) -> &Arc<BlockAlgebra> {
        &self.parent
    }

    pub fn densities(&self) -> &[CMat] {
        &self.densities
    }

    pub fn eval(&self, a: &AlgebraElement) -> Result<C64> {
        same_parent(&self.parent, &a.parent)?;
        Ok(self
            .densities
            .iter()
            .zip(&a.blocks)
            .map(|(rho, x)| (rho * x).trace())
            .sum())
    }

    pub fn is_faithful(&self) -> Faithfulness {
        let margin = self.min_eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        Faithfulness {
            faithful: margin > self.faithful_tol,
            margin,
        }
    }

    /// `a° = a − φ(a)·1`.
    pub fn center(&self, a: &AlgebraElement) -> Result<AlgebraElement> {
        let phi = self.eval(a)?;
        a.sub(&self.parent.scalar(phi))
    }

    /// Convex combination `t·self + (1−t)·other` of two states on the same algebra.
    pub fn mix(&self, t: f64, other: &StateSpec, tol: &Tolerances) -> Result<StateSpec> {
        same_parent(&self.parent, &other.parent)?;
        let densities = self
            .densities
            .iter()
            .zip(&other.densities)
            .map(|(a, b)| a.scale(t) + b.scale(1.0 - t))
            .collect();
        StateSpec::new(&self.parent, densities, tol)
    }
}
