//! Minimizer extraction from a (near) flat moment sequence by column echelon
//! reduction, multiplication matrices and an ordered real Schur form.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::rational::{from_f64, to_f64};
use crate::poly::{basis, half_degree, Monomial, Rational};
use crate::relax::{FormulationTag, MomentProblem, MomentSequence};
use crate::robust::{robust_objective_eps, robust_objective_eta};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionConfig {
    /// Relative singular-value cutoff for numerical rank.
    pub rank_tol: f64,
    /// Pivot threshold of the echelon reduction, relative to the largest entry.
    pub pivot_tol: f64,
    /// Constraint / bound certification tolerance.
    pub feas_tol: f64,
    /// Seed of the random convex combination of multiplication matrices.
    pub seed: u64,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            rank_tol: 1e-3,
            pivot_tol: 1e-6,
            feas_tol: 1e-4,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtractedPoint {
    pub x: Vec<f64>,
    pub weight: f64,
    pub objective: f64,
    /// `f(x) − L_y(f)`.
    pub objective_gap: f64,
    /// `min_ℓ g_ℓ(x)`; `None` without constraints.
    pub min_constraint: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtractionResult {
    /// Numerical rank of `M_t(y)` for `t = 0..=j`.
    pub ranks: Vec<usize>,
    pub flat: bool,
    /// Order of the moment matrix the points were read from.
    pub order_used: u32,
    pub basis: Vec<String>,
    pub points: Vec<ExtractedPoint>,
    /// `‖M_j(y) − Σ_k w_k v(x_k) v(x_k)ᵀ‖_F`.
    pub reconstruction_error: f64,
    pub weight_sum: f64,
}

impl ExtractionResult {
    pub fn rank(&self) -> usize {
        self.points.len()
    }

    /// Points are trustworthy only under flatness.
    pub fn trusted(&self) -> bool {
        self.flat
    }
}

fn sorted_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let e = m.clone().symmetric_eigen();
    let mut idx: Vec<usize> = (0..e.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[b].total_cmp(&e.eigenvalues[a]));
    let vals = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(m.nrows(), idx.len(), |r, c| e.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

fn numerical_rank(vals: &[f64], tol: f64) -> usize {
    let top = vals.first().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return 0;
    }
    vals.iter().take_while(|v| **v >= tol * top).count()
}

/// Reduced row echelon form of `a` with partial pivoting; returns the form
/// and the pivot columns.
fn rref(mut a: DMatrix<f64>, tol: f64) -> (DMatrix<f64>, Vec<usize>) {
    let (rows, cols) = a.shape();
    let mut pivots = Vec::new();
    let mut i = 0;
    for j in 0..cols {
        if i == rows {
            break;
        }
        let (p, val) = (i..rows)
            .map(|r| (r, a[(r, j)].abs()))
            .fold((i, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if val <= tol {
            for r in i..rows {
                a[(r, j)] = 0.0;
            }
            continue;
        }
        a.swap_rows(i, p);
        let piv = a[(i, j)];
        for c in j..cols {
            a[(i, c)] /= piv;
        }
        for r in 0..rows {
            if r != i {
                let f = a[(r, j)];
                if f != 0.0 {
                    for c in j..cols {
                        let v = a[(i, c)];
                        a[(r, c)] -= f * v;
                    }
                }
            }
        }
        pivots.push(j);
        i += 1;
    }
    (a, pivots)
}

fn monomial_vector(rows: &[Monomial], x: &[f64]) -> DVector<f64> {
    DVector::from_iterator(rows.len(), rows.iter().map(|m| m.eval_f64(x)))
}

/// Extracts atoms from `y` (normalized so that `y₀ = 1`).
pub fn extract_minimizers(
    y: &MomentSequence<f64>,
    mp: &MomentProblem,
    cfg: &ExtractionConfig,
) -> Result<ExtractionResult> {
    let n = mp.nvars();
    if y.nvars() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: y.nvars(),
        });
    }
    let y0 = y.values()[0];
    if !(y0 > 0.0 && y0.is_finite()) {
        return Err(Error::Extraction(format!("y₀ = {y0} is not positive")));
    }
    let y = MomentSequence::new(
        y.basis().clone(),
        y.values().iter().map(|v| v / y0).collect(),
    )?;
    let j = y.order();
    let d = mp
        .constraints()
        .iter()
        .map(half_degree)
        .max()
        .unwrap_or(0)
        .max(1);
    let full = y.moment_matrix(j);
    let mut ranks = Vec::with_capacity(j as usize + 1);
    for t in 0..=j {
        let s = crate::poly::basis_len(n, t);
        let (vals, _) = sorted_eigen(&full.view((0, 0), (s, s)).into_owned());
        ranks.push(numerical_rank(&vals, cfg.rank_tol));
    }
    let flat_t = (d..=j).find(|&t| ranks[t as usize] == ranks[(t - d) as usize]);
    let flat = flat_t.is_some();
    let t = flat_t
        .or_else(|| (1..=j).find(|&t| ranks[t as usize] == ranks[t as usize - 1]))
        .unwrap_or(j);
    let rows = basis(n, t);
    let s = rows.len();
    let (vals, vecs) = sorted_eigen(&full.view((0, 0), (s, s)).into_owned());
    let r = ranks[t as usize];
    if r == 0 {
        return Err(Error::Extraction("moment matrix has rank zero".into()));
    }
    let v = DMatrix::from_fn(s, r, |i, k| vecs[(i, k)] * vals[k].max(0.0).sqrt());
    let vt = v.transpose();
    let (red, pivots) = rref(vt.clone(), cfg.pivot_tol * vt.amax());
    if pivots.len() != r {
        return Err(Error::Extraction(format!(
            "echelon reduction found {} pivots for rank {r}",
            pivots.len()
        )));
    }
    let u = red.rows(0, r).transpose();
    let monos: Vec<Monomial> = rows.iter().cloned().collect();
    let basis_monos: Vec<&Monomial> = pivots.iter().map(|&p| &monos[p]).collect();
    let mut mult = Vec::with_capacity(n);
    for i in 0..n {
        let xi = Monomial::var(n, i);
        let mut ni = DMatrix::zeros(r, r);
        for (k, w) in basis_monos.iter().enumerate() {
            let shifted = w.mul(&xi);
            let row = rows.index_of(&shifted).ok_or_else(|| {
                Error::Extraction(format!(
                    "x{}·{} leaves the degree-{t} basis; rank structure is not flat",
                    i + 1,
                    w
                ))
            })?;
            for c in 0..r {
                ni[(k, c)] = u[(row, c)];
            }
        }
        mult.push(ni);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut lam: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = lam.iter().sum();
    lam.iter_mut().for_each(|l| *l /= total);
    let mut comb = DMatrix::zeros(r, r);
    for (l, ni) in lam.iter().zip(&mult) {
        comb += ni * *l;
    }
    let schur = nalgebra::Schur::try_new(comb, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Extraction("Schur decomposition did not converge".into()))?;
    let (q, _) = schur.unpack();
    let mut points: Vec<Vec<f64>> = (0..r)
        .map(|k| {
            let qk = q.column(k);
            mult.iter().map(|ni| (qk.transpose() * ni * qk)[(0, 0)]).collect()
        })
        .collect();
    points.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .find(|(x, y)| (*x - *y).abs() > 1e-8 * (1.0 + x.abs().max(y.abs())))
            .map(|(x, y)| x.total_cmp(y))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let weights = fit_weights(&y, &points, t)?;
    let mut recon = y.moment_matrix(j);
    let full_rows: Vec<Monomial> = basis(n, j).iter().cloned().collect();
    for (w, x) in weights.iter().zip(&points) {
        let vx = monomial_vector(&full_rows, x);
        recon -= &vx * vx.transpose() * *w;
    }
    let ly = y.riesz(mp.objective())?;
    let pts = points
        .into_iter()
        .zip(&weights)
        .map(|(x, &w)| {
            let objective = mp.objective().eval_f64(&x)?;
            let min_constraint = mp
                .constraints()
                .iter()
                .map(|g| g.eval_f64(&x))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .reduce(f64::min);
            Ok(ExtractedPoint {
                x,
                weight: w,
                objective,
                objective_gap: objective - ly,
                min_constraint,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExtractionResult {
        ranks,
        flat,
        order_used: t,
        basis: basis_monos.iter().map(|m| m.to_string()).collect(),
        points: pts,
        reconstruction_error: recon.norm(),
        weight_sum: weights.iter().sum(),
    })
}

/// Least squares `Σ_k w_k x_k^α ≈ y_α` over `|α| ≤ 2t`, rows scaled to unit size.
fn fit_weights(y: &MomentSequence<f64>, points: &[Vec<f64>], t: u32) -> Result<Vec<f64>> {
    let rows = basis(y.nvars(), 2 * t);
    let r = points.len();
    let mut a = DMatrix::zeros(rows.len(), r);
    let mut b = DVector::zeros(rows.len());
    for (i, m) in rows.iter().enumerate() {
        let ya = y.values()[i];
        let vals: Vec<f64> = points.iter().map(|x| m.eval_f64(x)).collect();
        let scale = vals.iter().fold(ya.abs(), |s, v| s.max(v.abs())).max(1.0);
        for (k, v) in vals.iter().enumerate() {
            a[(i, k)] = v / scale;
        }
        b[i] = ya / scale;
    }
    let svd = a.svd(true, true);
    let w = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::Extraction(format!("weight fit failed: {e}")))?;
    Ok(w.iter().copied().collect())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertifyReport {
    pub x: Vec<f64>,
    pub objective: f64,
    pub constraints: Vec<f64>,
    pub bound: f64,
    /// `f(x) − bound`.
    pub gap: f64,
    pub pass: bool,
}

/// PASS iff every `g_ℓ(x) ≥ −feas_tol` and `f(x) − bound ≥ −feas_tol`.
pub fn certify_point(
    x: &[f64],
    mp: &MomentProblem,
    bound: f64,
    cfg: &ExtractionConfig,
) -> Result<CertifyReport> {
    if x.len() != mp.nvars() {
        return Err(Error::DimensionMismatch {
            expected: mp.nvars(),
            got: x.len(),
        });
    }
    let objective = mp.objective().eval_f64(x)?;
    let constraints = mp
        .constraints()
        .iter()
        .map(|g| g.eval_f64(x))
        .collect::<Result<Vec<_>>>()?;
    let gap = objective - bound;
    let pass = constraints.iter().all(|g| *g >= -cfg.feas_tol) && gap >= -cfg.feas_tol;
    Ok(CertifyReport {
        x: x.to_vec(),
        objective,
        constraints,
        bound,
        gap,
        pass,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RankOneReport {
    Checked {
        x: Vec<f64>,
        robust_objective: f64,
        value: f64,
        discrepancy: f64,
        tol: f64,
        pass: bool,
    },
    NotRankOne {
        rank: usize,
    },
}

impl RankOneReport {
    pub fn pass(&self) -> Option<bool> {
        match self {
            Self::Checked { pass, .. } => Some(*pass),
            Self::NotRankOne { .. } => None,
        }
    }
}

/// If `M_j(y)` is numerically rank one, compares the robust objective at its
/// atom with the solve value; tolerance `10·epsilon_star·(1 + |value|)`.
pub fn rank_one_equivalence_check(
    y: &MomentSequence<f64>,
    mp: &MomentProblem,
    tag: FormulationTag,
    value: f64,
    epsilon_star: f64,
    cfg: &ExtractionConfig,
) -> Result<RankOneReport> {
    let (vals, _) = sorted_eigen(&y.moment_matrix(y.order()));
    let rank = numerical_rank(&vals, cfg.rank_tol);
    if rank != 1 {
        return Ok(RankOneReport::NotRankOne { rank });
    }
    let ex = extract_minimizers(y, mp, cfg)?;
    let x = ex.points[0].x.clone();
    let xr: Vec<Rational> = x.iter().map(|v| from_f64(*v)).collect();
    let robust = match tag {
        FormulationTag::PriorityTrace => robust_objective_eta(mp, &xr)?,
        FormulationTag::PriorityPsdPrimal | FormulationTag::PriorityPsdDual => {
            robust_objective_eps(mp, &xr)?
        }
        other => {
            return Err(Error::InvalidProblem(format!(
                "rank-one check needs a priority formulation, got {other}"
            )))
        }
    };
    let robust = to_f64(&robust);
    let discrepancy = (robust - value).abs();
    let tol = 10.0 * epsilon_star * (1.0 + value.abs());
    Ok(RankOneReport::Checked {
        x,
        robust_objective: robust,
        value,
        discrepancy,
        tol,
        pass: discrepancy <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;

    fn univariate(j: u32) -> MomentProblem {
        MomentProblem::new(Polynomial::parse(1, "1 2").unwrap(), vec![], j).unwrap()
    }

    #[test]
    fn dirac_at_two() {
        let y = MomentSequence::atomic(&[1.0], &[vec![2.0]], 2).unwrap();
        let ex = extract_minimizers(&y, &univariate(1), &ExtractionConfig::default()).unwrap();
        assert!(ex.flat);
        assert_eq!(ex.rank(), 1);
        assert!((ex.points[0].x[0] - 2.0).abs() < 1e-12);
        assert!((ex.points[0].weight - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_two_point_measure() {
        let y = MomentSequence::atomic(&[0.5, 0.5], &[vec![-1.0], vec![1.0]], 4).unwrap();
        let ex = extract_minimizers(&y, &univariate(2), &ExtractionConfig::default()).unwrap();
        assert!(ex.flat);
        assert_eq!(ex.rank(), 2);
        assert!((ex.points[0].x[0] + 1.0).abs() < 1e-10);
        assert!((ex.points[1].x[0] - 1.0).abs() < 1e-10);
        for p in &ex.points {
            assert!((p.weight - 0.5).abs() < 1e-10);
        }
        assert!(ex.reconstruction_error < 1e-10);
    }

    #[test]
    fn four_planar_atoms() {
        let a = 3f64.sqrt() / 3.0;
        let pts = vec![vec![-a, -a], vec![-a, a], vec![a, -a], vec![a, a]];
        let y = MomentSequence::atomic(&[0.25; 4], &pts, 8).unwrap();
        let mp = MomentProblem::new(Polynomial::parse(2, "1 2 0").unwrap(), vec![], 4).unwrap();
        let ex = extract_minimizers(&y, &mp, &ExtractionConfig::default()).unwrap();
        assert!(ex.flat);
        assert_eq!(ex.rank(), 4);
        for (p, q) in ex.points.iter().zip(&pts) {
            assert!((p.x[0] - q[0]).abs() < 1e-9 && (p.x[1] - q[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn certify_examples() {
        let g = Polynomial::parse(2, "1 0 0\n-1 2 0\n-1 0 2").unwrap();
        let mp = MomentProblem::new(Polynomial::parse(2, "1 1 0").unwrap(), vec![g], 1).unwrap();
        let rep = certify_point(&[2.0, 0.0], &mp, 0.0, &ExtractionConfig::default()).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.constraints, vec![-3.0]);
        let f = Polynomial::parse(2, "1/27 0 0\n1 4 2\n1 2 4\n-1 2 2").unwrap();
        let mp = MomentProblem::new(f, vec![], 8).unwrap();
        let rep = certify_point(&[0.57735, 0.57735], &mp, -1.81e-4, &ExtractionConfig::default())
            .unwrap();
        assert!(rep.pass);
        assert!((rep.gap - 1.81e-4).abs() < 1e-6);
    }

    #[test]
    fn rank_one_check_skips_multi_atom() {
        let y = MomentSequence::atomic(&[0.5, 0.5], &[vec![-1.0], vec![1.0]], 4).unwrap();
        let rep = rank_one_equivalence_check(
            &y,
            &univariate(2),
            FormulationTag::PriorityTrace,
            0.0,
            1e-7,
            &ExtractionConfig::default(),
        )
        .unwrap();
        assert!(matches!(rep, RankOneReport::NotRankOne { rank: 2 }));
    }
}
