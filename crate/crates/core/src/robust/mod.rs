//! The solver-as-adversary reading: worst-case polynomials, robust
//! objectives and max-min / min-max value checks.

use num::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::rational::{from_f64, int, to_f64};
use crate::poly::{even_square_perturbation, MonomialBasis, Polynomial, Rational};
use crate::relax::{
    build_canonical_robust, build_noise_dual, build_nominal, build_priority_psd,
    build_priority_trace, MomentProblem, MomentSequence, SdpInstance,
};
use crate::sdpsolve::{solve, SolverConfig, SolverStatus};

/// `f̃_α = f_α + sign(y_α)·ε` over every α of the moment index set.
#[derive(Clone, Debug)]
pub struct WorstCasePolynomial {
    pub base: Polynomial,
    pub eps: Rational,
    pub basis: MonomialBasis,
    pub signs: Vec<i8>,
    pub perturbed: Polynomial,
}

impl WorstCasePolynomial {
    /// `max_α |f̃_α − f_α|`.
    pub fn distance(&self) -> Rational {
        (&self.perturbed - &self.base).max_abs_coeff()
    }
}

/// Sign rule with `sign(0) = 0`; `f` must live inside the index set of `y`.
pub fn worst_case_polynomial(
    f: &Polynomial,
    y: &MomentSequence<Rational>,
    eps: &Rational,
) -> Result<WorstCasePolynomial> {
    if f.nvars() != y.nvars() {
        return Err(Error::DimensionMismatch {
            expected: y.nvars(),
            got: f.nvars(),
        });
    }
    if f.degree() > y.basis().degree() {
        return Err(Error::DegreeBound(format!(
            "polynomial degree {} exceeds moment degree {}",
            f.degree(),
            y.basis().degree()
        )));
    }
    if eps.is_negative() {
        return Err(Error::InvalidProblem("eps must be nonnegative".into()));
    }
    let mut perturbed = f.clone();
    let signs: Vec<i8> = y
        .values()
        .iter()
        .map(|v| {
            if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            }
        })
        .collect();
    for (m, s) in y.basis().iter().zip(&signs) {
        if *s != 0 {
            perturbed.add_term(m.clone(), eps * int(*s as i64));
        }
    }
    Ok(WorstCasePolynomial {
        base: f.clone(),
        eps: eps.clone(),
        basis: y.basis().clone(),
        signs,
        perturbed,
    })
}

/// Same rule for a floating moment vector, read exactly as dyadic rationals.
pub fn worst_case_polynomial_f64(
    f: &Polynomial,
    y: &MomentSequence<f64>,
    eps: &Rational,
) -> Result<(WorstCasePolynomial, MomentSequence<Rational>)> {
    let exact = MomentSequence::new(
        y.basis().clone(),
        y.values().iter().map(|v| from_f64(*v)).collect(),
    )?;
    Ok((worst_case_polynomial(f, &exact, eps)?, exact))
}

fn check_point(mp: &MomentProblem, x: &[Rational]) -> Result<()> {
    if x.len() != mp.nvars() {
        return Err(Error::DimensionMismatch {
            expected: mp.nvars(),
            got: x.len(),
        });
    }
    Ok(())
}

/// `f(x) + η Σ_ℓ g_ℓ(x) Σ_{β ∈ ℕⁿ_{j−d_ℓ}} x^{2β}`, exactly.
pub fn robust_objective_eta(mp: &MomentProblem, x: &[Rational]) -> Result<Rational> {
    check_point(mp, x)?;
    even_square_perturbation(mp.objective(), mp.constraints(), mp.order(), mp.eta())?.eval(x)
}

/// `f(x) + ε Σ_{α ∈ ℕⁿ_{2j}} |x^α|`, exactly.
pub fn robust_objective_eps(mp: &MomentProblem, x: &[Rational]) -> Result<Rational> {
    check_point(mp, x)?;
    let mut acc = Rational::zero();
    for m in mp.moment_basis().iter() {
        let mut v = int(1);
        for (xi, e) in x.iter().zip(m.exponents()) {
            for _ in 0..*e {
                v *= xi;
            }
        }
        acc += v.abs();
    }
    Ok(mp.objective().eval(x)? + mp.eps() * acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameTag {
    PriorityTrace,
    PriorityPsd,
    Canonical,
}

impl GameTag {
    pub fn name(self) -> &'static str {
        match self {
            Self::PriorityTrace => "priority-trace",
            Self::PriorityPsd => "priority-psd",
            Self::Canonical => "canonical",
        }
    }
}

#[derive(Clone, Debug)]
pub struct GameConfig {
    pub solver: SolverConfig,
    /// Defaults to `10·epsilon_star`.
    pub tol: Option<f64>,
    /// Enumerate all `2^m` corners when at most this many, else sample this many.
    pub max_corners: usize,
    pub seed: u64,
}

impl Default for GameConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            tol: None,
            max_corners: 64,
            seed: 0,
        }
    }
}

impl GameConfig {
    pub fn tolerance(&self) -> f64 {
        self.tol.unwrap_or(10.0 * self.solver.epsilon_star)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GameReport {
    pub formulation: GameTag,
    /// Penalized (min-max) value.
    pub value_penalized: f64,
    /// Max-min value from the box / shifted-cone side.
    pub value_maxmin: f64,
    /// Corner-grid lower bound on the max-min value (canonical only).
    pub value_minmax_grid: Option<f64>,
    pub corners_evaluated: usize,
    pub corners_skipped: usize,
    pub discrepancy: f64,
    pub tol: f64,
    pub statuses: Vec<SolverStatus>,
    pub pass_equal: bool,
    pub pass_grid: bool,
    pub pass: bool,
}

fn solve_value(sdp: &SdpInstance, cfg: &SolverConfig, primal: bool) -> Result<(f64, SolverStatus)> {
    let r = solve(sdp, cfg)?;
    Ok((
        if primal { r.primal_value } else { r.dual_value },
        r.status,
    ))
}

/// `max_{c̃ ∈ corners} min_y c̃ᵀy + offset` over the y-side of `sdp`.
fn corner_grid(
    sdp: &SdpInstance,
    eps: f64,
    cfg: &GameConfig,
) -> Result<(Option<f64>, usize, usize)> {
    let m = sdp.num_constraints();
    let mut corners: Vec<Vec<f64>> = Vec::new();
    if m < 63 && (1u64 << m) <= cfg.max_corners as u64 {
        for mask in 0..(1u64 << m) {
            corners.push((0..m).map(|i| if mask >> i & 1 == 1 { eps } else { -eps }).collect());
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let signs = [-eps, eps];
        for _ in 0..cfg.max_corners {
            corners.push((0..m).map(|_| *signs.choose(&mut rng).unwrap()).collect());
        }
    }
    let mut best: Option<f64> = None;
    let (mut done, mut skipped) = (0, 0);
    for delta in corners {
        let mut inner = sdp.clone();
        inner.c.iter_mut().zip(&delta).for_each(|(c, d)| *c += d);
        let r = solve(&inner, &cfg.solver)?;
        if r.status == SolverStatus::Optimal {
            done += 1;
            best = Some(best.map_or(r.primal_value, |b: f64| b.max(r.primal_value)));
        } else {
            skipped += 1;
        }
    }
    Ok((best, done, skipped))
}

/// Checks penalized value = max-min value, and for `Canonical` also that
/// a corner grid of the coefficient box stays below the penalized value.
pub fn verify_minimax(mp: &MomentProblem, tag: GameTag, cfg: &GameConfig) -> Result<GameReport> {
    let tol = cfg.tolerance();
    let mut statuses = Vec::new();
    let (a, b, grid, done, skipped) = match tag {
        GameTag::PriorityTrace => {
            let (a, s1) = solve_value(&build_priority_trace(mp), &cfg.solver, true)?;
            let shifted = mp.clone().with_noise(Rational::zero(), mp.eta().clone())?;
            let (b, s2) = solve_value(&build_noise_dual(&shifted), &cfg.solver, false)?;
            statuses.extend([s1, s2]);
            (a, b, None, 0, 0)
        }
        GameTag::PriorityPsd => {
            let (p, d) = build_priority_psd(mp);
            let (a, s1) = solve_value(&p, &cfg.solver, true)?;
            let (b, s2) = solve_value(&d, &cfg.solver, false)?;
            statuses.extend([s1, s2]);
            (a, b, None, 0, 0)
        }
        GameTag::Canonical => {
            let (nominal, _) = build_nominal(mp);
            let robust = build_canonical_robust(&nominal, mp.eps());
            let r = solve(&robust, &cfg.solver)?;
            statuses.push(r.status);
            let (grid, done, skipped) = corner_grid(&nominal, to_f64(mp.eps()), cfg)?;
            (r.primal_value, r.dual_value, grid, done, skipped)
        }
    };
    let discrepancy = (a - b).abs();
    let pass_equal =
        discrepancy <= tol && statuses.iter().all(|s| *s == SolverStatus::Optimal);
    let pass_grid = grid.is_none_or(|g| g <= a + tol);
    Ok(GameReport {
        formulation: tag,
        value_penalized: a,
        value_maxmin: b,
        value_minmax_grid: grid,
        corners_evaluated: done,
        corners_skipped: skipped,
        discrepancy,
        tol,
        statuses,
        pass_equal,
        pass_grid,
        pass: pass_equal && pass_grid,
    })
}

/// Uniform random rational in `[-1, 1]` with denominator `den`.
pub fn random_rational<R: Rng>(rng: &mut R, den: i64) -> Rational {
    crate::poly::rational::ratio(rng.gen_range(-den..=den), den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::basis;
    use crate::poly::rational::ratio;

    #[test]
    fn all_positive_moments_give_all_plus() {
        let y = MomentSequence::new(basis(1, 2), vec![int(1), int(2), int(3)]).unwrap();
        let w = worst_case_polynomial(&Polynomial::zero(1), &y, &int(1)).unwrap();
        assert_eq!(w.perturbed, Polynomial::parse(1, "1 0\n1 1\n1 2").unwrap());
        assert_eq!(w.distance(), int(1));
    }

    #[test]
    fn zero_moment_keeps_coefficient() {
        let f = Polynomial::parse(1, "5 1").unwrap();
        let y = MomentSequence::new(basis(1, 2), vec![int(1), int(0), int(-2)]).unwrap();
        let w = worst_case_polynomial(&f, &y, &ratio(1, 2)).unwrap();
        assert_eq!(w.signs, vec![1, 0, -1]);
        assert_eq!(w.perturbed, Polynomial::parse(1, "1/2 0\n5 1\n-1/2 2").unwrap());
        let lhs = y.riesz(&w.perturbed).unwrap();
        assert_eq!(lhs, y.riesz(&f).unwrap() + ratio(1, 2) * y.l1_norm());
    }

    #[test]
    fn eta_objective_examples() {
        let mp = MomentProblem::new(Polynomial::zero(1), vec![], 1).unwrap();
        assert_eq!(robust_objective_eta(&mp, &[int(3)]).unwrap(), int(0));
        let mp = mp.with_noise(int(0), int(1)).unwrap();
        assert_eq!(robust_objective_eta(&mp, &[int(0)]).unwrap(), int(1));
        assert!(robust_objective_eta(&mp, &[int(0), int(1)]).is_err());
    }

    #[test]
    fn eps_objective_examples() {
        let f = Polynomial::parse(1, "1 2").unwrap();
        let mp = MomentProblem::new(f, vec![], 1).unwrap();
        assert_eq!(robust_objective_eps(&mp, &[int(-2)]).unwrap(), int(4));
        let mp = MomentProblem::new(Polynomial::zero(1), vec![], 1)
            .unwrap()
            .with_noise(int(1), int(0))
            .unwrap();
        assert_eq!(robust_objective_eps(&mp, &[int(-1)]).unwrap(), int(3));
    }

    #[test]
    fn eps_objective_matches_orthant_form() {
        let f = Polynomial::parse(1, "1 0\n-3 1\n1 4").unwrap();
        let mp = MomentProblem::new(f.clone(), vec![], 2)
            .unwrap()
            .with_noise(ratio(1, 7), int(0))
            .unwrap();
        let p = crate::poly::l1_perturbation_orthant(&f, 2, &ratio(1, 7)).unwrap();
        for x in [int(0), ratio(1, 3), int(2)] {
            assert_eq!(robust_objective_eps(&mp, std::slice::from_ref(&x)).unwrap(), p.eval(&[x]).unwrap());
        }
    }

    #[test]
    fn x_squared_game_values() {
        let mp = MomentProblem::new(Polynomial::parse(1, "1 2").unwrap(), vec![], 1)
            .unwrap()
            .with_noise(ratio(1, 2), int(0))
            .unwrap();
        let rep = verify_minimax(&mp, GameTag::PriorityPsd, &GameConfig::default()).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!((rep.value_penalized - 0.5).abs() < 1e-6);
        assert!((rep.value_maxmin - 0.5).abs() < 1e-6);
    }
}
