use momsos::poly::rational::{int, pow10_neg, ratio};
use momsos::poly::{Polynomial, Rational};
use momsos::relax::{
    build_canonical_robust, build_noise_dual, build_nominal, build_priority_psd,
    build_priority_trace, from_sdpa_str, to_sdpa_string, BlockSpec, Formulation, MomentProblem,
    SdpInstance, SparseSym,
};
use momsos::sdpsolve::{achieved_noise_level, residuals, solve, BlockMat, SolverConfig, SolverStatus};
use num::Zero;

fn p(n: usize, s: &str) -> Polynomial {
    Polynomial::parse(n, s).unwrap()
}

fn optimal(sdp: &SdpInstance) -> momsos::sdpsolve::SolverResult {
    let r = solve(sdp, &SolverConfig::default()).unwrap();
    assert_eq!(r.status, SolverStatus::Optimal, "{:?}", r.residuals);
    r
}

fn x_squared() -> MomentProblem {
    MomentProblem::new(p(1, "1 2"), vec![], 1).unwrap()
}

#[test]
fn x_squared_nominal_dual_has_gram_diag_0_1() {
    let r = optimal(&build_nominal(&x_squared()).1);
    assert!(r.dual_value.abs() < 1e-6);
    let BlockMat::Dense(x) = &r.x[0] else { panic!("dense Gram block") };
    assert!(x[(0, 0)].abs() < 1e-6 && x[(0, 1)].abs() < 1e-6 && (x[(1, 1)] - 1.0).abs() < 1e-6);
}

#[test]
fn noise_dual_lowers_constant_by_eps() {
    let mp = x_squared().with_noise(int(1), Rational::zero()).unwrap();
    let r = optimal(&build_noise_dual(&mp));
    assert!((r.dual_value - 1.0).abs() < 1e-6);
}

#[test]
fn priority_psd_pair_on_x_squared() {
    let mp = x_squared().with_noise(ratio(1, 2), Rational::zero()).unwrap();
    let (primal, dual) = build_priority_psd(&mp);
    assert!((optimal(&primal).primal_value - 0.5).abs() < 1e-6);
    assert!((optimal(&dual).dual_value - 0.5).abs() < 1e-6);
}

#[test]
fn linear_objective_on_unit_interval() {
    let mp = MomentProblem::new(p(1, "1 1"), vec![p(1, "1 1"), p(1, "1 0\n-1 1")], 1).unwrap();
    let r = optimal(&build_nominal(&mp).0);
    assert!(r.primal_value.abs() < 1e-6);
    assert!(r.y[0].abs() < 1e-5);
}

#[test]
fn trace_penalty_of_zero_objective() {
    let mp = MomentProblem::new(Polynomial::zero(1), vec![], 1)
        .unwrap()
        .with_noise(Rational::zero(), int(1))
        .unwrap();
    let r = optimal(&build_priority_trace(&mp));
    assert!((r.primal_value - 1.0).abs() < 1e-6);
}

/// `min y₁ s.t. [[y₁,1],[1,y₂]] ⪰ 0, y₂ ≤ 10`.
fn two_by_two_with_cap() -> SdpInstance {
    let mut f1 = SparseSym::new();
    f1.push(0, 0, 0, 1.0);
    let mut f2 = SparseSym::new();
    f2.push(0, 1, 1, 1.0);
    f2.push(1, 0, 0, -1.0);
    let mut f0 = SparseSym::new();
    f0.push(0, 0, 1, -1.0);
    f0.push(1, 0, 0, -10.0);
    SdpInstance {
        formulation: Formulation::generic(),
        layout: None,
        blocks: vec![BlockSpec::dense(2), BlockSpec::diagonal(1)],
        c: vec![1.0, 0.0],
        constant: f0,
        constraints: vec![f1, f2],
        offset: 0.0,
    }
}

#[test]
fn canonical_robust_bounds_on_capped_instance() {
    let base = two_by_two_with_cap();
    let nominal = optimal(&base);
    assert!((nominal.primal_value - 0.1).abs() < 1e-6);
    let eps = pow10_neg(2);
    let robust = optimal(&build_canonical_robust(&base, &eps));
    let l1: f64 = nominal.y.iter().map(|v| v.abs()).sum();
    assert!(robust.primal_value >= nominal.primal_value - 1e-6);
    assert!(robust.primal_value - nominal.primal_value <= 0.01 * l1 + 1e-6);
    assert!((robust.primal_value - robust.dual_value).abs() < 1e-6);
}

#[test]
fn canonical_robust_scalar_example() {
    let mut f1 = SparseSym::new();
    f1.push(0, 0, 0, 1.0);
    let sdp = SdpInstance {
        formulation: Formulation::generic(),
        layout: None,
        blocks: vec![BlockSpec::diagonal(1)],
        c: vec![1.0],
        constant: SparseSym::new(),
        constraints: vec![f1],
        offset: 0.0,
    };
    let r = optimal(&build_canonical_robust(&sdp, &ratio(1, 2)));
    assert!(r.primal_value.abs() < 1e-6 && r.y[0].abs() < 1e-5);
    let r0 = optimal(&build_canonical_robust(&sdp, &Rational::zero()));
    assert!(r0.primal_value.abs() < 1e-6);
}

fn toy_problems() -> Vec<MomentProblem> {
    vec![
        x_squared(),
        MomentProblem::new(p(1, "1 4\n-3 2\n1 1\n2 0"), vec![p(1, "4 0\n-1 2")], 2).unwrap(),
        MomentProblem::new(p(2, "1 1 1"), vec![p(2, "1 0 0\n-1 2 0\n-1 0 2")], 1).unwrap(),
        MomentProblem::new(p(1, "-1 2"), vec![p(1, "1 0\n-1 2")], 1).unwrap(),
    ]
}

#[test]
fn weak_duality_gap_and_cones_along_toy_runs() {
    let cfg = SolverConfig::default();
    for mp in toy_problems() {
        let (primal, dual) = build_nominal(&mp);
        for sdp in [primal, dual] {
            let r = solve(&sdp, &cfg).unwrap();
            assert_eq!(r.status, SolverStatus::Optimal);
            let last = &r.history[r.history.len().saturating_sub(10)..];
            for w in last.windows(2) {
                assert!(w[1].gap <= w[0].gap * (1.0 + 1e-9) + 1e-15, "gap rose: {:?}", w);
            }
            let feasible_tail = r.history.iter().filter(|h| h.r_p <= 1e-6 && h.r_d <= 1e-6);
            for h in feasible_tail {
                assert!(h.dual <= h.primal + 1e-6 * (1.0 + h.primal.abs()), "{h:?}");
            }
            for b in r.x.iter().chain(&r.z) {
                assert!(b.min_eigenvalue() > -cfg.epsilon_star);
            }
            let res = residuals(&sdp, &r.y, &r.x).unwrap();
            assert!(res.equality <= 1e-6 && res.gap <= 1e-6);
        }
    }
}

#[test]
fn motzkin_noise_solve_reports_achieved_noise() {
    let f = p(2, "1/27 0 0\n1 4 2\n1 2 4\n-1 2 2");
    let mp = MomentProblem::new(f, vec![], 8)
        .unwrap()
        .with_noise(pow10_neg(8), Rational::zero())
        .unwrap();
    let (primal, _) = build_priority_psd(&mp);
    let loose = solve(&primal, &SolverConfig::default()).unwrap();
    let tight = solve(
        &primal,
        &SolverConfig {
            epsilon_star: 1e-11,
            ..SolverConfig::default()
        },
    )
    .unwrap();
    assert_eq!(loose.status, SolverStatus::Optimal);
    assert_eq!(tight.status, SolverStatus::Optimal);
    let scale = 1.0 + primal.c.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    for (r, eps) in [(&loose, SolverConfig::default().epsilon_star), (&tight, 1e-11)] {
        let (eq, cone) = achieved_noise_level(r);
        assert!(eq > 0.0 && eq <= eps * scale, "{eq} vs {eps}");
        assert!(cone <= eps);
    }
    assert!(tight.iterations >= loose.iterations);
}

#[test]
fn exchange_format_round_trip_preserves_the_optimum() {
    let (_, dual) = build_nominal(&toy_problems()[1]);
    let back = from_sdpa_str(&to_sdpa_string(&dual)).unwrap();
    let (a, b) = (optimal(&dual), optimal(&back));
    assert!((a.dual_value - b.dual_value).abs() < 1e-9);
}
