//! Coefficient matrices `C^ℓ_α` of the localizing matrices
//! `M_{j−d_ℓ}(g_ℓ y) = Σ_α C^ℓ_α y_α`.

use std::collections::BTreeMap;

use num::Zero;

use super::problem::MomentProblem;
use crate::poly::{basis, half_degree, MonomialBasis, Polynomial, Rational};

/// Upper-triangle entry `(row, col, value)` with `row ≤ col`.
pub type SymEntry = (usize, usize, Rational);

/// All `C^ℓ_α` for one localizer `g_ℓ`, rows indexed by `ℕⁿ_{j−d_ℓ}`.
#[derive(Clone, Debug)]
pub struct LocalizingBlock {
    pub localizer: Polynomial,
    pub half_degree: u32,
    pub rows: MonomialBasis,
    /// `coeffs[a]` holds the upper triangle of `C^ℓ_{α_a}`.
    coeffs: Vec<Vec<SymEntry>>,
}

impl LocalizingBlock {
    pub fn side(&self) -> usize {
        self.rows.len()
    }

    pub fn coefficient(&self, alpha_index: usize) -> &[SymEntry] {
        &self.coeffs[alpha_index]
    }

    /// `trace(C^ℓ_α)`.
    pub fn trace(&self, alpha_index: usize) -> Rational {
        self.coeffs[alpha_index]
            .iter()
            .filter(|(r, c, _)| r == c)
            .fold(Rational::zero(), |acc, (_, _, v)| acc + v)
    }

    /// Dense `Σ_α C^ℓ_α y_α`.
    pub fn assemble(&self, y: &[Rational]) -> Vec<Vec<Rational>> {
        let s = self.side();
        let mut m = vec![vec![Rational::zero(); s]; s];
        for (a, entries) in self.coeffs.iter().enumerate() {
            if y[a].is_zero() {
                continue;
            }
            for (r, c, v) in entries {
                let t = v * &y[a];
                m[*r][*c] += &t;
                if r != c {
                    m[*c][*r] += t;
                }
            }
        }
        m
    }

    pub fn assemble_f64(&self, y: &[f64]) -> Vec<Vec<f64>> {
        let s = self.side();
        let mut m = vec![vec![0.0; s]; s];
        for (a, entries) in self.coeffs.iter().enumerate() {
            if y[a] == 0.0 {
                continue;
            }
            for (r, c, v) in entries {
                let t = crate::poly::rational::to_f64(v) * y[a];
                m[*r][*c] += t;
                if r != c {
                    m[*c][*r] += t;
                }
            }
        }
        m
    }
}

/// The family `{C^ℓ_α}` for `ℓ = 0..m` and `α ∈ ℕⁿ_{2j}`.
#[derive(Clone, Debug)]
pub struct LocalizingSystem {
    pub moments: MonomialBasis,
    pub blocks: Vec<LocalizingBlock>,
}

impl LocalizingSystem {
    /// `Σ_ℓ trace(C^ℓ_α)` per α: the coefficients of `Σ_ℓ g_ℓ Σ_β x^{2β}`.
    pub fn trace_coefficients(&self) -> Vec<Rational> {
        (0..self.moments.len())
            .map(|a| {
                self.blocks
                    .iter()
                    .fold(Rational::zero(), |acc, b| acc + b.trace(a))
            })
            .collect()
    }
}

/// Expands every localizer: entry `(β, γ)` of `C^ℓ_α` is
/// `Σ_{β+γ+δ=α} g_{ℓ,δ}`; for `g₀ = 1` this is `1_{β+γ=α}`.
pub fn localizing_system(mp: &MomentProblem) -> LocalizingSystem {
    let n = mp.nvars();
    let j = mp.order();
    let moments = mp.moment_basis();
    let blocks = mp
        .localizers()
        .into_iter()
        .map(|g| {
            let d = half_degree(&g);
            let rows = basis(n, j - d);
            let mut acc: Vec<BTreeMap<(usize, usize), Rational>> =
                vec![BTreeMap::new(); moments.len()];
            for (r, beta) in rows.iter().enumerate() {
                for (c, gamma) in rows.iter().enumerate().skip(r) {
                    let bg = beta.mul(gamma);
                    for (delta, coeff) in g.terms() {
                        let alpha = bg.mul(delta);
                        let a = moments
                            .index_of(&alpha)
                            .expect("β+γ+δ stays within ℕⁿ_{2j}");
                        *acc[a].entry((r, c)).or_insert_with(Rational::zero) += coeff;
                    }
                }
            }
            let coeffs = acc
                .into_iter()
                .map(|m| {
                    m.into_iter()
                        .filter(|(_, v)| !v.is_zero())
                        .map(|((r, c), v)| (r, c, v))
                        .collect()
                })
                .collect();
            LocalizingBlock {
                localizer: g,
                half_degree: d,
                rows,
                coeffs,
            }
        })
        .collect();
    LocalizingSystem { moments, blocks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational::int;

    #[test]
    fn hankel_moment_matrix() {
        let f = Polynomial::parse(1, "1 2").unwrap();
        let mp = MomentProblem::new(f, vec![], 1).unwrap();
        let ls = localizing_system(&mp);
        let m = ls.blocks[0].assemble(&[int(1), int(2), int(5)]);
        assert_eq!(m, vec![vec![int(1), int(2)], vec![int(2), int(5)]]);
    }

    #[test]
    fn localizing_one_minus_x_squared() {
        let f = Polynomial::parse(1, "1 1").unwrap();
        let g = Polynomial::parse(1, "1 0\n-1 2").unwrap();
        let mp = MomentProblem::new(f, vec![g], 2).unwrap();
        let ls = localizing_system(&mp);
        let y: Vec<Rational> = (0..5).map(|k| int(3 * k * k + 1)).collect();
        let m = ls.blocks[1].assemble(&y);
        for b in 0..2 {
            for c in 0..2 {
                assert_eq!(m[b][c], &y[b + c] - &y[b + c + 2]);
            }
        }
    }

    #[test]
    fn traces_match_even_square_weights() {
        let f = Polynomial::parse(2, "1 1 1").unwrap();
        let g = Polynomial::parse(2, "1 0 0\n-1 2 0\n-1 0 2").unwrap();
        let mp = MomentProblem::new(f.clone(), vec![g.clone()], 3).unwrap();
        let ls = localizing_system(&mp);
        let tr = ls.trace_coefficients();
        let expected = crate::poly::even_square_perturbation(&Polynomial::zero(2), &[g], 3, &int(1))
            .unwrap();
        for (a, alpha) in ls.moments.iter().enumerate() {
            assert_eq!(tr[a], expected.coeff(alpha));
        }
    }
}
