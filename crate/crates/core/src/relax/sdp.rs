//! Block-diagonal SDP data in SDPA orientation:
//!
//! ```text
//! (y-side)  min  cᵀy + offset    s.t.  Σ_i F_i y_i − F_0 ⪰ 0
//! (X-side)  max  ⟨F_0, X⟩ + offset  s.t.  ⟨F_i, X⟩ = c_i,  X ⪰ 0
//! ```
//!
//! Every relaxation built here puts moments on the y-side and Gram matrices
//! on the X-side, so "primal" means moments and "dual" means SOS throughout.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::poly::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormulationTag {
    NominalPrimal,
    NominalDual,
    NoiseDual,
    /// Both-penalty moment twin of `NoiseDual`; only used for duality checks.
    NoisePenalized,
    PriorityTrace,
    PriorityPsdPrimal,
    PriorityPsdDual,
    CanonicalRobust,
    /// Imported without a header.
    Generic,
}

impl FormulationTag {
    pub const ALL: [FormulationTag; 9] = [
        Self::NominalPrimal,
        Self::NominalDual,
        Self::NoiseDual,
        Self::NoisePenalized,
        Self::PriorityTrace,
        Self::PriorityPsdPrimal,
        Self::PriorityPsdDual,
        Self::CanonicalRobust,
        Self::Generic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::NominalPrimal => "nominal-primal",
            Self::NominalDual => "nominal-dual",
            Self::NoiseDual => "noise-dual",
            Self::NoisePenalized => "noise-penalized",
            Self::PriorityTrace => "priority-trace",
            Self::PriorityPsdPrimal => "priority-psd-primal",
            Self::PriorityPsdDual => "priority-psd-dual",
            Self::CanonicalRobust => "canonical-robust",
            Self::Generic => "generic",
        }
    }
}

impl fmt::Display for FormulationTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FormulationTag {
    type Err = Error;

    /// `priority-psd` is accepted as the moment-side `priority-psd-primal`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "priority-psd" {
            return Ok(Self::PriorityPsdPrimal);
        }
        Self::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown formulation tag `{s}`")))
    }
}

/// Which formulation an instance encodes, with its noise radii.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formulation {
    pub tag: FormulationTag,
    pub eps: Rational,
    pub eta: Rational,
}

impl Formulation {
    pub fn new(tag: FormulationTag, eps: Rational, eta: Rational) -> Self {
        Self { tag, eps, eta }
    }

    pub fn generic() -> Self {
        Self::new(
            FormulationTag::Generic,
            crate::poly::rational::int(0),
            crate::poly::rational::int(0),
        )
    }
}

/// How solver variables map back to a moment vector indexed by `ℕⁿ_{2j}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Encoding {
    /// `y_i = y_{α_{i+1}}` for `i < N−1`; `y₀ = 1` eliminated.
    Moment,
    /// `y_i = y_{α_i}` for `i < N`; `λ = λ⁺ − λ⁻` sits in the last
    /// (diagonal) block.
    Gram,
}

impl Encoding {
    pub fn name(self) -> &'static str {
        match self {
            Self::Moment => "moment",
            Self::Gram => "gram",
        }
    }
}

impl FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "moment" => Ok(Self::Moment),
            "gram" => Ok(Self::Gram),
            _ => Err(Error::Parse(format!("unknown encoding `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MomentLayout {
    pub nvars: usize,
    pub order: u32,
    pub encoding: Encoding,
    /// Number of leading dense blocks holding `X₀ … X_m`.
    pub gram_blocks: usize,
}

impl MomentLayout {
    pub fn num_moments(&self) -> usize {
        crate::poly::basis_len(self.nvars, 2 * self.order)
    }

    /// Full moment vector (with `y₀`) from solver variables.
    pub fn moments(&self, y: &[f64]) -> Vec<f64> {
        let n = self.num_moments();
        match self.encoding {
            Encoding::Moment => std::iter::once(1.0).chain(y[..n - 1].iter().copied()).collect(),
            Encoding::Gram => y[..n].to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    Dense,
    Diagonal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockSpec {
    pub size: usize,
    pub kind: BlockKind,
}

impl BlockSpec {
    pub fn dense(size: usize) -> Self {
        Self {
            size,
            kind: BlockKind::Dense,
        }
    }

    pub fn diagonal(size: usize) -> Self {
        Self {
            size,
            kind: BlockKind::Diagonal,
        }
    }

    /// SDPA signed size: negative for diagonal blocks.
    pub fn signed_size(&self) -> i64 {
        match self.kind {
            BlockKind::Dense => self.size as i64,
            BlockKind::Diagonal => -(self.size as i64),
        }
    }
}

/// One upper-triangle entry, 0-based, `row ≤ col`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// Sparse symmetric block-diagonal matrix stored by its upper triangle.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseSym {
    entries: Vec<Entry>,
}

impl SparseSym {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `value` at `(row, col)`; the pair is normalized to the upper triangle.
    pub fn push(&mut self, block: usize, row: usize, col: usize, value: f64) {
        let (row, col) = if row <= col { (row, col) } else { (col, row) };
        self.entries.push(Entry {
            block,
            row,
            col,
            value,
        });
    }

    /// Sorts by `(block, row, col)`, merges duplicates and drops zeros.
    pub fn normalize(&mut self) {
        self.entries
            .sort_by_key(|e| (e.block, e.row, e.col));
        let mut out: Vec<Entry> = Vec::with_capacity(self.entries.len());
        for e in self.entries.drain(..) {
            match out.last_mut() {
                Some(last) if (last.block, last.row, last.col) == (e.block, e.row, e.col) => {
                    last.value += e.value
                }
                _ => out.push(e),
            }
        }
        out.retain(|e| e.value != 0.0);
        self.entries = out;
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|e| Entry {
                    value: e.value * s,
                    ..*e
                })
                .collect(),
        }
    }
}

/// A block-diagonal SDP in SDPA orientation.
#[derive(Clone, Debug, PartialEq)]
pub struct SdpInstance {
    pub formulation: Formulation,
    pub layout: Option<MomentLayout>,
    pub blocks: Vec<BlockSpec>,
    pub c: Vec<f64>,
    /// `F_0`.
    pub constant: SparseSym,
    /// `F_1 … F_m`.
    pub constraints: Vec<SparseSym>,
    pub offset: f64,
}

impl SdpInstance {
    pub fn num_constraints(&self) -> usize {
        self.c.len()
    }

    pub fn block_sizes(&self) -> Vec<i64> {
        self.blocks.iter().map(BlockSpec::signed_size).collect()
    }

    /// Checks block ranges, diagonal-block entries and dimensions.
    pub fn validate(&self) -> Result<()> {
        if self.constraints.len() != self.c.len() {
            return Err(Error::DimensionMismatch {
                expected: self.c.len(),
                got: self.constraints.len(),
            });
        }
        if self.blocks.iter().any(|b| b.size == 0) {
            return Err(Error::InvalidProblem("block of size zero".into()));
        }
        for m in std::iter::once(&self.constant).chain(&self.constraints) {
            for e in m.entries() {
                let b = self.blocks.get(e.block).ok_or_else(|| {
                    Error::InvalidProblem(format!("block index {} out of range", e.block + 1))
                })?;
                if e.col >= b.size || e.row > e.col {
                    return Err(Error::InvalidProblem(format!(
                        "entry ({}, {}) outside block {} of size {}",
                        e.row + 1,
                        e.col + 1,
                        e.block + 1,
                        b.size
                    )));
                }
                if b.kind == BlockKind::Diagonal && e.row != e.col {
                    return Err(Error::InvalidProblem(format!(
                        "off-diagonal entry in diagonal block {}",
                        e.block + 1
                    )));
                }
                if !e.value.is_finite() {
                    return Err(Error::InvalidProblem("non-finite entry".into()));
                }
            }
        }
        Ok(())
    }

    /// Same instance with the objective scaled by `s`; values scale by `s`.
    /// Multiplies `c` and the offset by `s > 0`; both optimal values scale by `s`.
    pub fn scale_objective(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.c.iter_mut().for_each(|v| *v *= s);
        out.offset *= s;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_round_trip() {
        for t in FormulationTag::ALL {
            assert_eq!(t.name().parse::<FormulationTag>().unwrap(), t);
        }
        assert!("bogus".parse::<FormulationTag>().is_err());
    }

    #[test]
    fn normalize_merges_and_orders() {
        let mut m = SparseSym::new();
        m.push(1, 0, 0, 1.0);
        m.push(0, 2, 1, 2.0);
        m.push(0, 1, 2, 3.0);
        m.push(0, 0, 0, 0.0);
        m.normalize();
        assert_eq!(
            m.entries(),
            &[
                Entry {
                    block: 0,
                    row: 1,
                    col: 2,
                    value: 5.0
                },
                Entry {
                    block: 1,
                    row: 0,
                    col: 0,
                    value: 1.0
                }
            ]
        );
    }

    #[test]
    fn validate_rejects_off_diagonal_in_lp_block() {
        let mut f = SparseSym::new();
        f.push(0, 0, 1, 1.0);
        let sdp = SdpInstance {
            formulation: Formulation::generic(),
            layout: None,
            blocks: vec![BlockSpec::diagonal(2)],
            c: vec![1.0],
            constant: SparseSym::new(),
            constraints: vec![f],
            offset: 0.0,
        };
        assert!(sdp.validate().is_err());
    }
}
