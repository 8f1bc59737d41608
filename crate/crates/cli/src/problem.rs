//! Builtin problems and the JSON problem-description file.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use momsos::poly::rational::{int, parse_rational, ratio};
use momsos::poly::{Polynomial, Rational};
use momsos::relax::MomentProblem;
use num::{Signed, Zero};
use serde::Deserialize;

pub const BUILTINS: [&str; 3] = ["motzkin", "univariate", "x2"];

/// `x⁴y² + x²y⁴ − 3x²y² + 1`, scaled by 1/27 as `1/27 + x⁴y² + x²y⁴ − x²y²`.
pub fn motzkin() -> Polynomial {
    Polynomial::parse(2, "1/27 0 0\n1 4 2\n1 2 4\n-1 2 2").expect("builtin")
}

/// `(x − 100)² ((x − 1)² + γ/99²)`: global minimizers 1 and 100 when `γ = 0`.
pub fn univariate(gamma: &Rational) -> Polynomial {
    let a = Polynomial::parse(1, "1 2\n-200 1\n10000 0").expect("builtin");
    let mut b = Polynomial::parse(1, "1 2\n-2 1\n1 0").expect("builtin");
    b.add_term(momsos::poly::Monomial::one(1), gamma / int(99 * 99));
    &a * &b
}

pub fn x_squared() -> Polynomial {
    Polynomial::parse(1, "1 2").expect("builtin")
}

/// Natural order of a builtin: the smallest one covering its degree,
/// except Motzkin whose interesting order is 8.
fn builtin(name: &str, gamma: &Rational) -> Result<(Polynomial, u32)> {
    match name {
        "motzkin" => Ok((motzkin(), 8)),
        "univariate" => Ok((univariate(gamma), 2)),
        "x2" => Ok((x_squared(), 1)),
        other => bail!(
            "unknown builtin `{other}` (expected one of {})",
            BUILTINS.join(", ")
        ),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Variables {
    Count(usize),
    Names(Vec<String>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Terms {
    Text(String),
    Lines(Vec<String>),
}

impl Terms {
    fn text(&self) -> String {
        match self {
            Self::Text(t) => t.clone(),
            Self::Lines(l) => l.join("\n"),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Number {
    Text(String),
    Int(i64),
    Float(f64),
}

impl Number {
    fn rational(&self) -> Result<Rational> {
        match self {
            Self::Text(s) => Ok(parse_rational(s)?),
            Self::Int(i) => Ok(int(*i)),
            // Shortest decimal form, so 1e-8 stays 10⁻⁸ and not its binary neighbour.
            Self::Float(f) => Ok(parse_rational(&format!("{f:e}"))?),
        }
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct NoiseSpec {
    epsilon: Option<Number>,
    eta: Option<Number>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    variables: Variables,
    objective: Terms,
    #[serde(default)]
    constraints: Vec<Terms>,
    order: Option<u32>,
    #[serde(rename = "ball_N")]
    ball_n: Option<Number>,
    #[serde(default)]
    noise: NoiseSpec,
}

/// A loaded problem before order/noise overrides.
#[derive(Clone, Debug)]
pub struct LoadedProblem {
    pub objective: Polynomial,
    pub constraints: Vec<Polynomial>,
    pub order: Option<u32>,
    pub ball: Option<Rational>,
    pub eps: Rational,
    pub eta: Rational,
}

impl LoadedProblem {
    /// Applies overrides; the order defaults to the smallest valid one.
    pub fn into_problem(
        self,
        order: Option<u32>,
        eps: Option<&Rational>,
        eta: Option<&Rational>,
    ) -> Result<MomentProblem> {
        let min_order = std::iter::once(&self.objective)
            .chain(&self.constraints)
            .map(|p| p.degree().div_ceil(2))
            .max()
            .unwrap_or(1)
            .max(1);
        let j = order.or(self.order).unwrap_or(min_order);
        let mut mp = MomentProblem::new(self.objective, self.constraints, j)?;
        if let Some(n) = self.ball {
            mp = mp.with_ball(n)?;
        }
        let eps = eps.cloned().unwrap_or(self.eps);
        let eta = eta.cloned().unwrap_or(self.eta);
        if eps.is_negative() || eta.is_negative() {
            bail!("noise radii must be nonnegative");
        }
        Ok(mp.with_noise(eps, eta)?)
    }
}

pub fn parse_problem_json(text: &str) -> Result<LoadedProblem> {
    let file: ProblemFile = serde_json::from_str(text).context("problem file")?;
    let n = match &file.variables {
        Variables::Count(n) => *n,
        Variables::Names(v) => v.len(),
    };
    if n == 0 {
        bail!("problem file: `variables` must be positive");
    }
    let objective = Polynomial::parse(n, &file.objective.text())
        .map_err(|e| anyhow!("problem file: objective: {e}"))?;
    let constraints = file
        .constraints
        .iter()
        .enumerate()
        .map(|(i, t)| {
            Polynomial::parse(n, &t.text())
                .map_err(|e| anyhow!("problem file: constraint {}: {e}", i + 1))
        })
        .collect::<Result<Vec<_>>>()?;
    let ball = file.ball_n.as_ref().map(Number::rational).transpose()?;
    if ball.as_ref().is_some_and(|b| !b.is_positive()) {
        bail!("problem file: `ball_N` must be positive");
    }
    Ok(LoadedProblem {
        objective,
        constraints,
        order: file.order,
        ball,
        eps: file
            .noise
            .epsilon
            .as_ref()
            .map(Number::rational)
            .transpose()?
            .unwrap_or_else(Rational::zero),
        eta: file
            .noise
            .eta
            .as_ref()
            .map(Number::rational)
            .transpose()?
            .unwrap_or_else(Rational::zero),
    })
}

/// Resolves a builtin name or a problem-file path.
pub fn load(source: &str, gamma: Option<&Rational>) -> Result<LoadedProblem> {
    if BUILTINS.contains(&source) {
        let g = gamma.cloned().unwrap_or_else(Rational::zero);
        let (objective, order) = builtin(source, &g)?;
        return Ok(LoadedProblem {
            objective,
            constraints: vec![],
            order: Some(order),
            ball: None,
            eps: Rational::zero(),
            eta: Rational::zero(),
        });
    }
    let path = Path::new(source);
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read problem `{source}`"))?;
    parse_problem_json(&text).with_context(|| format!("in `{source}`"))
}

/// The perturbed objective of the Motzkin SOS check, `f + γ Σ_{|β|≤j} x^{2β}`.
pub fn perturbed_motzkin(j: u32, gamma: &Rational) -> Result<Polynomial> {
    Ok(momsos::poly::even_square_perturbation(
        &motzkin(),
        &[],
        j,
        gamma,
    )?)
}

pub fn default_gamma() -> Rational {
    ratio(1, 1000)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn univariate_vanishes_at_both_minimizers() {
        let f = univariate(&Rational::zero());
        assert!(f.eval(&[int(1)]).unwrap().is_zero());
        assert!(f.eval(&[int(100)]).unwrap().is_zero());
        let g = univariate(&default_gamma());
        assert_eq!(g.eval(&[int(1)]).unwrap(), ratio(1, 1000));
    }

    #[test]
    fn motzkin_is_zero_at_minimizers() {
        let f = motzkin();
        let x = vec![int(1), int(1)];
        // 1/27 + 1 + 1 − 1 at (1,1) is not zero; zero needs x² = y² = 1/3.
        assert_eq!(f.eval(&x).unwrap(), ratio(28, 27));
        let v = f.eval_f64(&[3f64.sqrt() / 3.0, 3f64.sqrt() / 3.0]).unwrap();
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn parses_problem_file() {
        let p = parse_problem_json(
            r#"{"variables": ["x", "y"], "objective": ["1 2 0", "1 0 2"],
                "constraints": ["1 0 0\n-1 1 0"], "order": 2, "ball_N": "4",
                "noise": {"epsilon": 1e-8, "eta": "0"}}"#,
        )
        .unwrap();
        assert_eq!(p.constraints.len(), 1);
        assert_eq!(p.eps, parse_rational("1e-8").unwrap());
        let mp = p.into_problem(None, None, None).unwrap();
        assert_eq!(mp.order(), 2);
        assert_eq!(mp.constraints().len(), 2);
    }

    #[test]
    fn malformed_term_names_its_line() {
        let err = parse_problem_json(
            r#"{"variables": 1, "objective": ["1 2", "oops 1", "3 0"]}"#,
        )
        .unwrap_err();
        let msg = format!("{err:#}");
        assert!(msg.contains("objective") && msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn order_defaults_to_degree() {
        let p = parse_problem_json(r#"{"variables": 1, "objective": "1 6"}"#).unwrap();
        assert_eq!(p.into_problem(None, None, None).unwrap().order(), 3);
    }
}
