//! Infeasible primal-dual path-following with the HKM direction.

use std::fmt;

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::block::{
    add_sparse, dot, lmi, max_abs, scaled_identity, sparse_dot, BlockDiag, BlockMat,
};
use crate::error::{Error, Result};
use crate::relax::{BlockKind, SdpInstance};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Stopping tolerance on relative residuals and gap.
    pub epsilon_star: f64,
    /// Initial point `X⁰ = Z⁰ = lambda_star·I`.
    pub lambda_star: f64,
    /// Centering parameter while iterates are infeasible.
    pub beta_bar: f64,
    /// Centering parameter once both residuals are below `epsilon_star`.
    pub beta_star: f64,
    pub max_iter: usize,
    pub step_fraction: f64,
    /// Print `iter r_p r_d gap step` lines to stderr.
    #[serde(default)]
    pub verbose: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon_star: 1e-7,
            lambda_star: 1e2,
            beta_bar: 0.2,
            beta_star: 0.1,
            max_iter: 200,
            step_fraction: 0.9,
            verbose: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidProblem(format!("{name} must be positive")))
            }
        };
        pos(self.epsilon_star, "epsilon_star")?;
        pos(self.lambda_star, "lambda_star")?;
        pos(self.beta_bar, "beta_bar")?;
        pos(self.beta_star, "beta_star")?;
        if self.epsilon_star >= 1.0 {
            return Err(Error::InvalidProblem("epsilon_star must be < 1".into()));
        }
        if self.beta_bar >= 1.0 || self.beta_star >= 1.0 {
            return Err(Error::InvalidProblem("centering parameters must be < 1".into()));
        }
        if !(self.step_fraction > 0.0 && self.step_fraction < 1.0) {
            return Err(Error::InvalidProblem("step_fraction must lie in (0,1)".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidProblem("max_iter must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SolverStatus {
    Optimal,
    /// The X-side (SOS) objective diverges upward: y-side infeasible.
    PrimalInfeasibleSuspected,
    /// The y-side (moment) objective diverges downward: X-side infeasible.
    DualInfeasibleSuspected,
    MaxIter,
    NumericalFailure,
}

impl SolverStatus {
    pub fn name(self) -> &'static str {
        match self {
            Self::Optimal => "OPTIMAL",
            Self::PrimalInfeasibleSuspected => "PRIMAL_INFEASIBLE_SUSPECTED",
            Self::DualInfeasibleSuspected => "DUAL_INFEASIBLE_SUSPECTED",
            Self::MaxIter => "MAX_ITER",
            Self::NumericalFailure => "NUMERICAL_FAILURE",
        }
    }
}

impl fmt::Display for SolverStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    /// Relative X-side equality residual.
    pub r_p: f64,
    /// Relative y-side LMI residual.
    pub r_d: f64,
    pub gap: f64,
    pub mu: f64,
    pub step_x: f64,
    pub step_z: f64,
    pub primal: f64,
    pub dual: f64,
}

impl fmt::Display for IterationRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:.3e} {:.3e} {:.3e} {:.3} {:.3}",
            self.iter, self.r_p, self.r_d, self.gap, self.step_x, self.step_z
        )
    }
}

#[derive(Clone, Debug)]
pub struct SolverResult {
    pub status: SolverStatus,
    /// `cᵀy + offset` (moment side).
    pub primal_value: f64,
    /// `⟨F_0, X⟩ + offset` (SOS side).
    pub dual_value: f64,
    pub y: Vec<f64>,
    pub x: BlockDiag,
    pub z: BlockDiag,
    pub residuals: super::Residuals,
    pub iterations: usize,
    pub history: Vec<IterationRecord>,
}

/// `(i, entries of F_i in one block)`.
type BlockEntries = Vec<(usize, Vec<(usize, usize, f64)>)>;

/// Per-block sparse view of the constraint matrices.
struct Structure {
    /// `dense[b]` lists `(i, entries of F_i in block b)`.
    dense: Vec<BlockEntries>,
    /// `diag[b][d]` lists `(i, F_i[d])`.
    diag: Vec<Vec<Vec<(usize, f64)>>>,
}

impl Structure {
    fn new(sdp: &SdpInstance) -> Self {
        let mut dense: Vec<BlockEntries> = vec![Vec::new(); sdp.blocks.len()];
        let mut diag: Vec<Vec<Vec<(usize, f64)>>> = sdp
            .blocks
            .iter()
            .map(|b| match b.kind {
                BlockKind::Dense => Vec::new(),
                BlockKind::Diagonal => vec![Vec::new(); b.size],
            })
            .collect();
        for (i, f) in sdp.constraints.iter().enumerate() {
            for e in f.entries() {
                match sdp.blocks[e.block].kind {
                    BlockKind::Dense => {
                        let list = &mut dense[e.block];
                        match list.last_mut() {
                            Some((k, v)) if *k == i => v.push((e.row, e.col, e.value)),
                            _ => list.push((i, vec![(e.row, e.col, e.value)])),
                        }
                    }
                    BlockKind::Diagonal => diag[e.block][e.row].push((i, e.value)),
                }
            }
        }
        Self { dense, diag }
    }
}

fn inverse(z: &BlockMat) -> Option<BlockMat> {
    match z {
        BlockMat::Dense(m) => Cholesky::new(m.clone()).map(|c| BlockMat::Dense(c.inverse())),
        BlockMat::Diag(d) => {
            if d.iter().all(|v| *v > 0.0) {
                Some(BlockMat::Diag(d.map(|v| 1.0 / v)))
            } else {
                None
            }
        }
    }
}

fn schur(st: &Structure, x: &BlockDiag, zi: &BlockDiag, m: usize) -> DMatrix<f64> {
    let mut b = DMatrix::<f64>::zeros(m, m);
    for (blk, terms) in st.dense.iter().enumerate() {
        if terms.is_empty() {
            continue;
        }
        let (BlockMat::Dense(xm), BlockMat::Dense(zm)) = (&x[blk], &zi[blk]) else {
            unreachable!()
        };
        let s = xm.nrows();
        let mut g = DMatrix::<f64>::zeros(s, s);
        for (k, fk) in terms {
            g.fill(0.0);
            for &(r, c, v) in fk {
                g.ger(v, &xm.column(r), &zm.column(c), 1.0);
                if r != c {
                    g.ger(v, &xm.column(c), &zm.column(r), 1.0);
                }
            }
            for (i, fi) in terms {
                let mut acc = 0.0;
                for &(r, c, v) in fi {
                    acc += if r == c {
                        v * g[(r, r)]
                    } else {
                        v * (g[(r, c)] + g[(c, r)])
                    };
                }
                b[(*i, *k)] += acc;
            }
        }
    }
    for (blk, positions) in st.diag.iter().enumerate() {
        if positions.is_empty() {
            continue;
        }
        let (BlockMat::Diag(xd), BlockMat::Diag(zd)) = (&x[blk], &zi[blk]) else {
            unreachable!()
        };
        for (d, list) in positions.iter().enumerate() {
            let w = xd[d] * zd[d];
            for &(k, vk) in list {
                for &(i, vi) in list {
                    b[(i, k)] += vi * vk * w;
                }
            }
        }
    }
    (&b + b.transpose()) * 0.5
}

/// `a·Z⁻¹ − X − sym(X W Z⁻¹)` blockwise.
fn hkm_term(a: f64, x: &BlockDiag, zi: &BlockDiag, w: &BlockDiag) -> BlockDiag {
    x.iter()
        .zip(zi)
        .zip(w)
        .map(|((x, zi), w)| match (x, zi, w) {
            (BlockMat::Dense(x), BlockMat::Dense(zi), BlockMat::Dense(w)) => {
                let p = x * w * zi;
                BlockMat::Dense(zi * a - x - (&p + p.transpose()) * 0.5)
            }
            (BlockMat::Diag(x), BlockMat::Diag(zi), BlockMat::Diag(w)) => BlockMat::Diag(
                DVector::from_fn(x.len(), |d, _| a * zi[d] - x[d] - x[d] * w[d] * zi[d]),
            ),
            _ => unreachable!(),
        })
        .collect()
}

/// Largest `α` with `X + α dX ⪰ 0` (infinite if `dX ⪰ 0`).
fn max_step(x: &BlockDiag, dx: &BlockDiag) -> f64 {
    let mut alpha = f64::INFINITY;
    for (x, dx) in x.iter().zip(dx) {
        let lam = match (x, dx) {
            (BlockMat::Dense(x), BlockMat::Dense(dx)) => {
                let Some(ch) = Cholesky::new(x.clone()) else {
                    return 0.0;
                };
                let l = ch.l();
                let Some(a) = l.solve_lower_triangular(dx) else {
                    return 0.0;
                };
                let Some(m) = l.solve_lower_triangular(&a.transpose()) else {
                    return 0.0;
                };
                let m = (&m + m.transpose()) * 0.5;
                m.symmetric_eigenvalues()
                    .iter()
                    .copied()
                    .fold(f64::INFINITY, f64::min)
            }
            (BlockMat::Diag(x), BlockMat::Diag(dx)) => x
                .iter()
                .zip(dx.iter())
                .map(|(x, dx)| dx / x)
                .fold(f64::INFINITY, f64::min),
            _ => unreachable!(),
        };
        if lam < 0.0 {
            alpha = alpha.min(-1.0 / lam);
        }
    }
    alpha
}

struct Measures {
    eq_abs: f64,
    r_p: f64,
    r_d: f64,
    lmi_abs: f64,
    gap: f64,
    mu: f64,
    primal: f64,
    dual: f64,
}

struct Scales {
    c: f64,
    f0: f64,
    dim: f64,
}

fn measure(
    sdp: &SdpInstance,
    sc: &Scales,
    y: &[f64],
    x: &BlockDiag,
    z: &BlockDiag,
    r: &mut [f64],
    d: &mut BlockDiag,
) -> Measures {
    for (i, f) in sdp.constraints.iter().enumerate() {
        r[i] = sdp.c[i] - sparse_dot(f, x);
    }
    *d = lmi(sdp, y);
    for (d, z) in d.iter_mut().zip(z) {
        d.axpy(-1.0, z);
    }
    let eq_abs = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let lmi_abs = max_abs(d);
    let primal = sdp.c.iter().zip(y).map(|(c, y)| c * y).sum::<f64>() + sdp.offset;
    let dual = sparse_dot(&sdp.constant, x) + sdp.offset;
    Measures {
        eq_abs,
        r_p: eq_abs / (1.0 + sc.c),
        r_d: lmi_abs / (1.0 + sc.f0),
        lmi_abs,
        gap: (primal - dual).abs() / (1.0 + primal.abs() + dual.abs()),
        mu: dot(x, z) / sc.dim,
        primal,
        dual,
    }
}

fn finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

pub fn solve(sdp: &SdpInstance, cfg: &SolverConfig) -> Result<SolverResult> {
    cfg.validate()?;
    sdp.validate()?;
    let m = sdp.num_constraints();
    let st = Structure::new(sdp);
    let sc = Scales {
        c: sdp.c.iter().fold(0.0f64, |a, v| a.max(v.abs())),
        f0: sdp
            .constant
            .entries()
            .iter()
            .fold(0.0f64, |a, e| a.max(e.value.abs())),
        dim: sdp.blocks.iter().map(|b| b.size as f64).sum(),
    };
    let mut y = vec![0.0; m];
    let mut x = scaled_identity(&sdp.blocks, cfg.lambda_star);
    let mut z = scaled_identity(&sdp.blocks, cfg.lambda_star);
    let mut r = vec![0.0; m];
    let mut d: BlockDiag = Vec::new();
    let mut history = Vec::new();
    let mut status = SolverStatus::MaxIter;
    let mut meas = measure(sdp, &sc, &y, &x, &z, &mut r, &mut d);
    let (r_p0, r_d0) = (meas.r_p.max(f64::MIN_POSITIVE), meas.r_d.max(f64::MIN_POSITIVE));
    let diverge = 1.0 / cfg.epsilon_star;
    let mut iter = 0;
    let mut stalled = 0;
    // Best iterate by the worst of the three stopping measures; returned on any non-OPTIMAL exit.
    let merit = |m: &Measures| m.r_p.max(m.r_d).max(m.gap);
    let mut best: Option<(f64, Vec<f64>, BlockDiag, BlockDiag)> = None;
    loop {
        let eps = cfg.epsilon_star;
        if meas.r_p <= eps && meas.r_d <= eps && meas.gap <= eps {
            status = SolverStatus::Optimal;
            break;
        }
        if meas.primal < -diverge && meas.r_d <= (1e-3 * r_d0).max(eps) {
            status = SolverStatus::DualInfeasibleSuspected;
            break;
        }
        if meas.dual > diverge && meas.r_p <= (1e-3 * r_p0).max(eps) {
            status = SolverStatus::PrimalInfeasibleSuspected;
            break;
        }
        if iter >= cfg.max_iter {
            break;
        }
        iter += 1;
        let feasible = meas.r_p <= eps && meas.r_d <= eps;
        let mut sigma = if feasible { cfg.beta_star } else { cfg.beta_bar };
        let Some(zi) = z.iter().map(inverse).collect::<Option<BlockDiag>>() else {
            status = SolverStatus::NumericalFailure;
            break;
        };
        let b = schur(&st, &x, &zi, m);
        let mut chol = Cholesky::new(b.clone());
        if chol.is_none() {
            // One retry: lightly regularized system and at least beta_bar centering.
            sigma = sigma.max(cfg.beta_bar);
            let reg = 1e-12 * b.diagonal().amax().max(1e-300);
            chol = Cholesky::new(&b + DMatrix::identity(m, m) * reg);
        }
        let Some(chol) = chol else {
            status = SolverStatus::NumericalFailure;
            break;
        };
        let h = hkm_term(sigma * meas.mu, &x, &zi, &d);
        let rhs = DVector::from_fn(m, |i, _| sparse_dot(&sdp.constraints[i], &h) - r[i]);
        let dy = chol.solve(&rhs);
        if !finite(dy.as_slice()) {
            status = SolverStatus::NumericalFailure;
            break;
        }
        let mut dz = d.clone();
        for (i, f) in sdp.constraints.iter().enumerate() {
            if dy[i] != 0.0 {
                add_sparse(&mut dz, dy[i], f);
            }
        }
        let dx = hkm_term(sigma * meas.mu, &x, &zi, &dz);
        let step_x = (cfg.step_fraction * max_step(&x, &dx)).min(1.0);
        let step_z = (cfg.step_fraction * max_step(&z, &dz)).min(1.0);
        if best.as_ref().is_none_or(|b| merit(&meas) < b.0) {
            best = Some((merit(&meas), y.clone(), x.clone(), z.clone()));
        }
        for (x, dx) in x.iter_mut().zip(&dx) {
            x.axpy(step_x, dx);
        }
        for (z, dz) in z.iter_mut().zip(&dz) {
            z.axpy(step_z, dz);
        }
        for (y, dy) in y.iter_mut().zip(dy.iter()) {
            *y += step_z * dy;
        }
        if !(x.iter().all(BlockMat::is_finite) && z.iter().all(BlockMat::is_finite) && finite(&y))
        {
            status = SolverStatus::NumericalFailure;
            break;
        }
        meas = measure(sdp, &sc, &y, &x, &z, &mut r, &mut d);
        let rec = IterationRecord {
            iter,
            r_p: meas.r_p,
            r_d: meas.r_d,
            gap: meas.gap,
            mu: meas.mu,
            step_x,
            step_z,
            primal: meas.primal,
            dual: meas.dual,
        };
        if cfg.verbose {
            eprintln!("{rec}");
        }
        history.push(rec);
        if step_x < 1e-10 && step_z < 1e-10 {
            stalled += 1;
            if stalled >= 5 {
                status = SolverStatus::NumericalFailure;
                break;
            }
        } else {
            stalled = 0;
        }
    }
    if status != SolverStatus::Optimal {
        if let Some((m0, by, bx, bz)) = best {
            let current = if finite(&y) { merit(&meas) } else { f64::INFINITY };
            if m0 < current {
                (y, x, z) = (by, bx, bz);
                meas = measure(sdp, &sc, &y, &x, &z, &mut r, &mut d);
            }
        }
    }
    let cone = super::block::min_eigenvalue(&x);
    Ok(SolverResult {
        status,
        primal_value: meas.primal,
        dual_value: meas.dual,
        residuals: super::Residuals {
            equality: meas.eq_abs,
            lmi: meas.lmi_abs,
            cone: (-cone).max(0.0),
            gap: meas.gap,
            primal: meas.primal,
            dual: meas.dual,
        },
        y,
        x,
        z,
        iterations: iter,
        history,
    })
}
