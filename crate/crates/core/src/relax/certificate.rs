use nalgebra::DMatrix;

use super::localizing::LocalizingSystem;
use super::problem::MomentProblem;
use crate::error::{Error, Result};
use crate::poly::rational::to_f64;

/// `f − λ = Σ_ℓ σ_ℓ g_ℓ + r` with `σ_ℓ = v_ℓᵀ X_ℓ v_ℓ`, checked numerically.
#[derive(Clone, Debug)]
pub struct SosCertificate {
    pub lambda: f64,
    pub grams: Vec<DMatrix<f64>>,
    /// `r_α` for every α in `ℕⁿ_{2j}`.
    pub residual: Vec<f64>,
    pub max_residual: f64,
    pub min_eigenvalues: Vec<f64>,
}

impl SosCertificate {
    pub fn new(
        mp: &MomentProblem,
        ls: &LocalizingSystem,
        lambda: f64,
        grams: Vec<DMatrix<f64>>,
    ) -> Result<Self> {
        if grams.len() != ls.blocks.len() {
            return Err(Error::DimensionMismatch {
                expected: ls.blocks.len(),
                got: grams.len(),
            });
        }
        for (g, b) in grams.iter().zip(&ls.blocks) {
            if g.nrows() != b.side() || g.ncols() != b.side() {
                return Err(Error::DimensionMismatch {
                    expected: b.side(),
                    got: g.nrows(),
                });
            }
        }
        let residual: Vec<f64> = ls
            .moments
            .iter()
            .enumerate()
            .map(|(a, alpha)| {
                let mut r = to_f64(&mp.objective().coeff(alpha));
                if a == 0 {
                    r -= lambda;
                }
                for (g, b) in grams.iter().zip(&ls.blocks) {
                    for (i, j, v) in b.coefficient(a) {
                        let w = if i == j { 1.0 } else { 2.0 };
                        r -= w * to_f64(v) * g[(*i, *j)];
                    }
                }
                r
            })
            .collect();
        let max_residual = residual.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        let min_eigenvalues = grams
            .iter()
            .map(|g| {
                g.clone()
                    .symmetric_eigenvalues()
                    .iter()
                    .copied()
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        Ok(Self {
            lambda,
            grams,
            residual,
            max_residual,
            min_eigenvalues,
        })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Valid at level `(ε*, η*)` iff `max|r_α| ≤ ε*` and every `X_ℓ ⪰ −η* I`.
    pub fn is_valid(&self, eps_star: f64, eta_star: f64) -> bool {
        self.max_residual <= eps_star && self.min_eigenvalue() >= -eta_star
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;
    use crate::relax::localizing_system;

    #[test]
    fn x_squared_has_exact_certificate() {
        let mp = MomentProblem::new(Polynomial::parse(1, "1 2").unwrap(), vec![], 1).unwrap();
        let ls = localizing_system(&mp);
        let x = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        let cert = SosCertificate::new(&mp, &ls, 0.0, vec![x]).unwrap();
        assert_eq!(cert.max_residual, 0.0);
        assert!(cert.is_valid(0.0, 0.0));
        let bad = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
        let cert = SosCertificate::new(&mp, &ls, 1.0, vec![bad]).unwrap();
        assert_eq!(cert.max_residual, 0.0);
        assert!(!cert.is_valid(1e-9, 0.5));
        assert!(cert.is_valid(1e-9, 1.0));
    }
}
