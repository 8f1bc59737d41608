//! Primal-dual interior-point solver for block-diagonal SDPs in SDPA form.

mod block;
mod ipm;

pub use block::{lmi, sparse_dot, BlockDiag, BlockMat};
pub use ipm::{solve, IterationRecord, SolverConfig, SolverResult, SolverStatus};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relax::SdpInstance;

/// Absolute residuals of a point `(y, X)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `max_i |⟨F_i, X⟩ − c_i|`.
    pub equality: f64,
    /// `max |Σ F_i y_i − F_0 − Z|` for the solver's slack; for a bare point,
    /// the most negative eigenvalue of `Σ F_i y_i − F_0` (0 when PSD).
    pub lmi: f64,
    /// `max(0, −λ_min(X))`: the η-level the X-side actually sits at.
    pub cone: f64,
    /// `|p − d| / (1 + |p| + |d|)`.
    pub gap: f64,
    pub primal: f64,
    pub dual: f64,
}

impl Residuals {
    /// `(r_p, r_d, gap)`.
    pub fn triple(&self) -> (f64, f64, f64) {
        (self.equality, self.cone, self.gap)
    }
}

fn check_point(sdp: &SdpInstance, y: &[f64], x: &BlockDiag) -> Result<()> {
    if y.len() != sdp.num_constraints() {
        return Err(Error::DimensionMismatch {
            expected: sdp.num_constraints(),
            got: y.len(),
        });
    }
    if x.len() != sdp.blocks.len() {
        return Err(Error::DimensionMismatch {
            expected: sdp.blocks.len(),
            got: x.len(),
        });
    }
    for (b, spec) in x.iter().zip(&sdp.blocks) {
        let kind_ok = matches!(
            (b, spec.kind),
            (BlockMat::Dense(_), crate::relax::BlockKind::Dense)
                | (BlockMat::Diag(_), crate::relax::BlockKind::Diagonal)
        );
        if !kind_ok || b.size() != spec.size {
            return Err(Error::DimensionMismatch {
                expected: spec.size,
                got: b.size(),
            });
        }
    }
    Ok(())
}

/// Residuals of an arbitrary point `(y, X)` against `sdp`.
pub fn residuals(sdp: &SdpInstance, y: &[f64], x: &BlockDiag) -> Result<Residuals> {
    check_point(sdp, y, x)?;
    let equality = sdp
        .constraints
        .iter()
        .zip(&sdp.c)
        .map(|(f, c)| (sparse_dot(f, x) - c).abs())
        .fold(0.0, f64::max);
    let lmi_min = block::min_eigenvalue(&lmi(sdp, y));
    let primal = sdp.c.iter().zip(y).map(|(c, y)| c * y).sum::<f64>() + sdp.offset;
    let dual = sparse_dot(&sdp.constant, x) + sdp.offset;
    Ok(Residuals {
        equality,
        lmi: (-lmi_min).max(0.0),
        cone: (-block::min_eigenvalue(x)).max(0.0),
        gap: (primal - dual).abs() / (1.0 + primal.abs() + dual.abs()),
        primal,
        dual,
    })
}

/// The `(ε, η)` at which the returned X-side point is exactly feasible:
/// equality violation and cone violation.
pub fn achieved_noise_level(res: &SolverResult) -> (f64, f64) {
    (res.residuals.equality, res.residuals.cone)
}
