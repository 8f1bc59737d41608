use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use momsos::extract::ExtractionConfig;
use momsos::poly::rational::parse_rational;
use momsos::poly::Rational;
use momsos::relax::{FormulationTag, MomentProblem};
use momsos::sdpsolve::SolverConfig;
use serde::{Deserialize, Serialize};

use crate::problem;

/// Everything needed to re-run a command; echoed as the first report record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// Builtin name or path to a problem file.
    pub problem: String,
    /// Parameter of the `univariate` builtin.
    pub gamma: Option<String>,
    pub formulation: String,
    pub order: Option<u32>,
    pub eps: Option<String>,
    pub eta: Option<String>,
    pub solver: SolverConfig,
    pub extraction: ExtractionConfig,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl RunManifest {
    pub fn new(problem: impl Into<String>, formulation: FormulationTag) -> Self {
        Self {
            problem: problem.into(),
            gamma: None,
            formulation: formulation.name().to_string(),
            order: None,
            eps: None,
            eta: None,
            solver: SolverConfig::default(),
            extraction: ExtractionConfig::default(),
            seed: 0,
            out: None,
        }
    }

    pub fn tag(&self) -> Result<FormulationTag> {
        Ok(self.formulation.parse()?)
    }

    fn rational(field: &str, v: &Option<String>) -> Result<Option<Rational>> {
        v.as_deref()
            .map(|s| parse_rational(s).with_context(|| format!("--{field}")))
            .transpose()
    }

    /// Range checks; syncs the extraction seed with the run seed.
    pub fn validate(&mut self) -> Result<()> {
        self.tag()?;
        self.solver.validate()?;
        let e = &self.extraction;
        for (name, v) in [
            ("rank_tol", e.rank_tol),
            ("pivot_tol", e.pivot_tol),
            ("feas_tol", e.feas_tol),
        ] {
            if !(v > 0.0 && v < 1.0) {
                bail!("extraction {name} must lie in (0, 1), got {v}");
            }
        }
        if let Some(j) = self.order {
            if !(1..=30).contains(&j) {
                bail!("--order must lie in 1..=30, got {j}");
            }
        }
        for (name, v) in [("eps", &self.eps), ("eta", &self.eta), ("gamma", &self.gamma)] {
            if let Some(r) = Self::rational(name, v)? {
                if r < Rational::from_integer(0.into()) {
                    bail!("--{name} must be nonnegative");
                }
            }
        }
        self.extraction.seed = self.seed;
        Ok(())
    }

    pub fn problem(&self) -> Result<MomentProblem> {
        let gamma = Self::rational("gamma", &self.gamma)?;
        let loaded = problem::load(&self.problem, gamma.as_ref())?;
        loaded.into_problem(
            self.order,
            Self::rational("eps", &self.eps)?.as_ref(),
            Self::rational("eta", &self.eta)?.as_ref(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_round_trips_through_json() {
        let mut m = RunManifest::new("motzkin", FormulationTag::PriorityPsdPrimal);
        m.eps = Some("1e-8".into());
        m.seed = 7;
        m.validate().unwrap();
        let back: RunManifest = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.extraction.seed, 7);
    }

    #[test]
    fn ranges_are_checked() {
        let mut m = RunManifest::new("x2", FormulationTag::NominalDual);
        m.eps = Some("-1".into());
        assert!(m.validate().is_err());
        let mut m = RunManifest::new("x2", FormulationTag::NominalDual);
        m.formulation = "bogus".into();
        assert!(m.validate().is_err());
        let mut m = RunManifest::new("x2", FormulationTag::NominalDual);
        m.order = Some(0);
        assert!(m.validate().is_err());
    }
}
