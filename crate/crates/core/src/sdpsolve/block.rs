use nalgebra::{DMatrix, DVector};

use crate::relax::{BlockKind, BlockSpec, SdpInstance, SparseSym};

/// One block of a block-diagonal symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum BlockMat {
    Dense(DMatrix<f64>),
    Diag(DVector<f64>),
}

impl BlockMat {
    pub fn scaled_identity(spec: &BlockSpec, s: f64) -> Self {
        match spec.kind {
            BlockKind::Dense => Self::Dense(DMatrix::identity(spec.size, spec.size) * s),
            BlockKind::Diagonal => Self::Diag(DVector::from_element(spec.size, s)),
        }
    }

    pub fn zeros(spec: &BlockSpec) -> Self {
        Self::scaled_identity(spec, 0.0)
    }

    pub fn size(&self) -> usize {
        match self {
            Self::Dense(m) => m.nrows(),
            Self::Diag(d) => d.len(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            Self::Dense(m) => m.clone(),
            Self::Diag(d) => DMatrix::from_diagonal(d),
        }
    }

    /// `⟨A, B⟩ = trace(A B)` for symmetric blocks of the same shape.
    pub fn dot(&self, other: &Self) -> f64 {
        match (self, other) {
            (Self::Dense(a), Self::Dense(b)) => a.dot(b),
            (Self::Diag(a), Self::Diag(b)) => a.dot(b),
            _ => panic!("block kinds differ"),
        }
    }

    pub fn axpy(&mut self, a: f64, other: &Self) {
        match (self, other) {
            (Self::Dense(x), Self::Dense(y)) => *x += y * a,
            (Self::Diag(x), Self::Diag(y)) => x.axpy(a, y, 1.0),
            _ => panic!("block kinds differ"),
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            Self::Dense(m) => m.amax(),
            Self::Diag(d) => d.amax(),
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        match self {
            Self::Dense(m) => m
                .clone()
                .symmetric_eigenvalues()
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min),
            Self::Diag(d) => d.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Self::Dense(m) => m.iter().all(|v| v.is_finite()),
            Self::Diag(d) => d.iter().all(|v| v.is_finite()),
        }
    }
}

pub type BlockDiag = Vec<BlockMat>;

pub fn scaled_identity(blocks: &[BlockSpec], s: f64) -> BlockDiag {
    blocks.iter().map(|b| BlockMat::scaled_identity(b, s)).collect()
}

pub fn dot(a: &BlockDiag, b: &BlockDiag) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

pub fn max_abs(a: &BlockDiag) -> f64 {
    a.iter().map(BlockMat::max_abs).fold(0.0, f64::max)
}

pub fn min_eigenvalue(a: &BlockDiag) -> f64 {
    a.iter()
        .map(BlockMat::min_eigenvalue)
        .fold(f64::INFINITY, f64::min)
}

/// `⟨F, X⟩` for sparse symmetric `F` stored by its upper triangle.
pub fn sparse_dot(f: &SparseSym, x: &BlockDiag) -> f64 {
    f.entries()
        .iter()
        .map(|e| match &x[e.block] {
            BlockMat::Dense(m) => {
                if e.row == e.col {
                    e.value * m[(e.row, e.row)]
                } else {
                    2.0 * e.value * m[(e.row, e.col)]
                }
            }
            BlockMat::Diag(d) => e.value * d[e.row],
        })
        .sum()
}

/// `acc += a·F`.
pub fn add_sparse(acc: &mut BlockDiag, a: f64, f: &SparseSym) {
    for e in f.entries() {
        match &mut acc[e.block] {
            BlockMat::Dense(m) => {
                m[(e.row, e.col)] += a * e.value;
                if e.row != e.col {
                    m[(e.col, e.row)] += a * e.value;
                }
            }
            BlockMat::Diag(d) => d[e.row] += a * e.value,
        }
    }
}

/// `Σ_i F_i y_i − F_0`.
pub fn lmi(sdp: &SdpInstance, y: &[f64]) -> BlockDiag {
    let mut out: BlockDiag = sdp.blocks.iter().map(BlockMat::zeros).collect();
    add_sparse(&mut out, -1.0, &sdp.constant);
    for (f, &v) in sdp.constraints.iter().zip(y) {
        if v != 0.0 {
            add_sparse(&mut out, v, f);
        }
    }
    out
}
