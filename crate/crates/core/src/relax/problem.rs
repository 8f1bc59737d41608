use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{basis, half_degree, MonomialBasis, Polynomial, Rational};

/// Noise radii of the perturbed dual: equality slack `eps`, cone shift `eta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Noise {
    pub eps: Rational,
    pub eta: Rational,
}

impl Default for Noise {
    fn default() -> Self {
        Self {
            eps: Rational::zero(),
            eta: Rational::zero(),
        }
    }
}

/// `min { f(x) : g_ℓ(x) ≥ 0 }` together with a relaxation order and noise radii.
#[derive(Clone, Debug)]
pub struct MomentProblem {
    objective: Polynomial,
    constraints: Vec<Polynomial>,
    user_constraints: usize,
    ball: Option<Rational>,
    order: u32,
    noise: Noise,
}

impl MomentProblem {
    pub fn new(objective: Polynomial, constraints: Vec<Polynomial>, order: u32) -> Result<Self> {
        let n = objective.nvars();
        if n == 0 {
            return Err(Error::InvalidProblem("objective has no variables".into()));
        }
        if order == 0 {
            return Err(Error::InvalidProblem("relaxation order must be ≥ 1".into()));
        }
        if objective.degree() > 2 * order {
            return Err(Error::DegreeBound(format!(
                "objective degree {} exceeds 2j = {}",
                objective.degree(),
                2 * order
            )));
        }
        for (k, g) in constraints.iter().enumerate() {
            if g.nvars() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: g.nvars(),
                });
            }
            if g.degree() > 2 * order {
                return Err(Error::DegreeBound(format!(
                    "constraint {} has degree {} > 2j = {}",
                    k + 1,
                    g.degree(),
                    2 * order
                )));
            }
        }
        let user_constraints = constraints.len();
        Ok(Self {
            objective,
            constraints,
            user_constraints,
            ball: None,
            order,
            noise: Noise::default(),
        })
    }

    /// Appends the ball constraint `N − ‖x‖²`.
    pub fn with_ball(mut self, radius_sq: Rational) -> Result<Self> {
        if !radius_sq.is_positive() {
            return Err(Error::InvalidProblem("ball constant N must be positive".into()));
        }
        if self.ball.is_some() {
            return Err(Error::InvalidProblem("ball constraint already present".into()));
        }
        let n = self.nvars();
        let mut g = Polynomial::constant(n, radius_sq.clone());
        for i in 0..n {
            g = &g - &(&Polynomial::var(n, i) * &Polynomial::var(n, i));
        }
        self.constraints.push(g);
        self.ball = Some(radius_sq);
        Ok(self)
    }

    pub fn with_noise(mut self, eps: Rational, eta: Rational) -> Result<Self> {
        if eps.is_negative() || eta.is_negative() {
            return Err(Error::InvalidProblem("noise radii must be nonnegative".into()));
        }
        self.noise = Noise { eps, eta };
        Ok(self)
    }

    pub fn with_objective(&self, objective: Polynomial) -> Result<Self> {
        let mut out = Self::new(
            objective,
            self.constraints[..self.user_constraints].to_vec(),
            self.order,
        )?;
        if let Some(n) = &self.ball {
            out = out.with_ball(n.clone())?;
        }
        out.noise = self.noise.clone();
        Ok(out)
    }

    pub fn with_order(&self, order: u32) -> Result<Self> {
        let mut out = Self::new(
            self.objective.clone(),
            self.constraints[..self.user_constraints].to_vec(),
            order,
        )?;
        if let Some(n) = &self.ball {
            out = out.with_ball(n.clone())?;
        }
        out.noise = self.noise.clone();
        Ok(out)
    }

    pub fn nvars(&self) -> usize {
        self.objective.nvars()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn objective(&self) -> &Polynomial {
        &self.objective
    }

    /// `g₁ … g_m`, including the ball constraint when present.
    pub fn constraints(&self) -> &[Polynomial] {
        &self.constraints
    }

    pub fn ball(&self) -> Option<&Rational> {
        self.ball.as_ref()
    }

    pub fn noise(&self) -> &Noise {
        &self.noise
    }

    pub fn eps(&self) -> &Rational {
        &self.noise.eps
    }

    pub fn eta(&self) -> &Rational {
        &self.noise.eta
    }

    /// `g₀ = 1, g₁, …, g_m`.
    pub fn localizers(&self) -> Vec<Polynomial> {
        std::iter::once(Polynomial::one(self.nvars()))
            .chain(self.constraints.iter().cloned())
            .collect()
    }

    /// `d_ℓ = ⌈deg g_ℓ / 2⌉` for `ℓ = 0..m`.
    pub fn half_degrees(&self) -> Vec<u32> {
        self.localizers().iter().map(half_degree).collect()
    }

    /// `ℕⁿ_{2j}`, the index set of the moment vector.
    pub fn moment_basis(&self) -> MonomialBasis {
        basis(self.nvars(), 2 * self.order)
    }
}
