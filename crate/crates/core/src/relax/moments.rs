use nalgebra::DMatrix;
use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{basis, Monomial, MonomialBasis, Polynomial, Rational};

/// A (pseudo-)moment vector indexed by `ℕⁿ_{2j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSequence<T> {
    basis: MonomialBasis,
    values: Vec<T>,
}

impl<T> MomentSequence<T> {
    pub fn new(basis: MonomialBasis, values: Vec<T>) -> Result<Self> {
        if basis.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                got: values.len(),
            });
        }
        Ok(Self { basis, values })
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn nvars(&self) -> usize {
        self.basis.nvars()
    }

    /// `j` such that the index set is `ℕⁿ_{2j}`.
    pub fn order(&self) -> u32 {
        self.basis.degree() / 2
    }

    pub fn get(&self, m: &Monomial) -> Option<&T> {
        self.basis.index_of(m).map(|i| &self.values[i])
    }
}

impl MomentSequence<Rational> {
    /// Moments of the Dirac measure at `x`, exactly.
    pub fn dirac(x: &[Rational], degree: u32) -> Self {
        let b = basis(x.len(), degree);
        let values = b
            .iter()
            .map(|m| Polynomial::monomial(x.len(), m.clone(), Rational::from_integer(1.into())).eval(x).unwrap())
            .collect();
        Self { basis: b, values }
    }

    /// `L_y(f) = Σ_α f_α y_α`; terms of `f` outside the index set are an error.
    pub fn riesz(&self, f: &Polynomial) -> Result<Rational> {
        let mut acc = Rational::zero();
        for (m, c) in f.terms() {
            let y = self.get(m).ok_or_else(|| {
                Error::DegreeBound(format!("monomial {m} outside the moment index set"))
            })?;
            acc += c * y;
        }
        Ok(acc)
    }

    pub fn l1_norm(&self) -> Rational {
        self.values.iter().fold(Rational::zero(), |a, v| a + v.abs())
    }

    pub fn is_normalized(&self) -> bool {
        self.values[0] == Rational::from_integer(1.into())
    }

    pub fn to_f64(&self) -> MomentSequence<f64> {
        MomentSequence {
            basis: self.basis.clone(),
            values: self.values.iter().map(crate::poly::rational::to_f64).collect(),
        }
    }
}

impl MomentSequence<f64> {
    /// Moments of `Σ_k w_k δ_{x_k}`.
    pub fn atomic(weights: &[f64], points: &[Vec<f64>], degree: u32) -> Result<Self> {
        let n = points.first().map(Vec::len).ok_or_else(|| {
            Error::InvalidProblem("atomic measure needs at least one point".into())
        })?;
        if weights.len() != points.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                got: weights.len(),
            });
        }
        let b = basis(n, degree);
        let values = b
            .iter()
            .map(|m| {
                weights
                    .iter()
                    .zip(points)
                    .map(|(w, x)| w * m.eval_f64(x))
                    .sum()
            })
            .collect();
        Ok(Self { basis: b, values })
    }

    pub fn riesz(&self, f: &Polynomial) -> Result<f64> {
        let mut acc = 0.0;
        for (m, c) in f.terms() {
            let y = self.get(m).ok_or_else(|| {
                Error::DegreeBound(format!("monomial {m} outside the moment index set"))
            })?;
            acc += crate::poly::rational::to_f64(c) * y;
        }
        Ok(acc)
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.values[0] - 1.0).abs() <= tol
    }

    /// `M_k(y)` with rows indexed by `ℕⁿ_k`, `2k ≤ 2j`.
    pub fn moment_matrix(&self, k: u32) -> DMatrix<f64> {
        let rows = basis(self.nvars(), k);
        let s = rows.len();
        DMatrix::from_fn(s, s, |r, c| {
            let m = rows.get(r).mul(rows.get(c));
            self.values[self.basis.index_of(&m).expect("2k within moment degree")]
        })
    }
}
