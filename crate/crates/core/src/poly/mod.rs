//! Exact polynomial arithmetic, monomial bases and univariate root isolation.

mod monomial;
mod polynomial;
pub mod rational;
mod roots;

pub use monomial::{basis, basis_len, Monomial, MonomialBasis};
pub use polynomial::{parse_term, sum_of_even_squares, sum_of_monomials, Polynomial};
pub use rational::{parse_rational, Rational};
pub use roots::{
    default_width, isolate_real_roots, local_minima, LocalMinimum, RootInterval, RootIsolation,
    SturmSequence,
};

use crate::error::{Error, Result};

/// `⌈deg g / 2⌉`.
pub fn half_degree(g: &Polynomial) -> u32 {
    g.degree().div_ceil(2)
}

/// `p + θ Σ_ℓ g_ℓ Σ_{β ∈ ℕⁿ_{j−d_ℓ}} x^{2β}` with `g₀ = 1` prepended to
/// `constraints`. With no constraints this is `p + θ Σ_{|β|≤j} x^{2β}`.
pub fn even_square_perturbation(
    p: &Polynomial,
    constraints: &[Polynomial],
    j: u32,
    theta: &Rational,
) -> Result<Polynomial> {
    let n = p.nvars();
    let mut out = p.clone();
    let one = Polynomial::one(n);
    for g in std::iter::once(&one).chain(constraints) {
        if g.nvars() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: g.nvars(),
            });
        }
        if g.degree() > 2 * j {
            return Err(Error::DegreeBound(format!(
                "constraint of degree {} exceeds 2j = {}",
                g.degree(),
                2 * j
            )));
        }
        let weight = sum_of_even_squares(n, j - half_degree(g));
        out = &out + &(g * &weight).scale(theta);
    }
    Ok(out)
}

/// `p + ε Σ_{α=0}^{2j} x^α`, the orthant form of `p + ε Σ |x^α|` for `x ≥ 0`.
pub fn l1_perturbation_orthant(p: &Polynomial, j: u32, eps: &Rational) -> Result<Polynomial> {
    if p.nvars() != 1 {
        return Err(Error::NotUnivariate(p.nvars()));
    }
    Ok(p + &sum_of_monomials(1, 2 * j).scale(eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rational::{int, pow10_neg};

    #[test]
    fn even_squares_from_zero() {
        let p = even_square_perturbation(&Polynomial::zero(1), &[], 1, &int(1)).unwrap();
        assert_eq!(p, Polynomial::parse(1, "1 0\n1 2").unwrap());
    }

    #[test]
    fn even_squares_with_constraint() {
        let f = Polynomial::parse(1, "1 2").unwrap();
        let g = Polynomial::parse(1, "1 0\n-1 2").unwrap();
        let got = even_square_perturbation(&f, std::slice::from_ref(&g), 2, &int(1)).unwrap();
        let expected = &(&f + &Polynomial::parse(1, "1 0\n1 2\n1 4").unwrap())
            + &(&Polynomial::parse(1, "1 0\n1 2").unwrap() * &g);
        assert_eq!(got, expected);
    }

    #[test]
    fn even_squares_motzkin_support() {
        let f = Polynomial::parse(2, "1/27 0 0\n1 4 2\n1 2 4\n-1 2 2").unwrap();
        let got = even_square_perturbation(&f, &[], 8, &pow10_neg(8)).unwrap();
        let diff = &got - &f;
        assert_eq!(diff.num_terms(), 45);
        assert!(diff.terms().all(|(m, c)| m.is_even() && *c == pow10_neg(8)));
    }

    #[test]
    fn zero_theta_is_identity() {
        let f = Polynomial::parse(2, "3 1 1\n-1 0 2").unwrap();
        let g = Polynomial::parse(2, "1 0 0\n-1 2 0").unwrap();
        assert_eq!(even_square_perturbation(&f, &[g], 3, &int(0)).unwrap(), f);
    }

    #[test]
    fn degree_bound_is_enforced() {
        let g = Polynomial::parse(1, "1 6").unwrap();
        assert!(matches!(
            even_square_perturbation(&Polynomial::zero(1), &[g], 2, &int(1)),
            Err(Error::DegreeBound(_))
        ));
    }

    #[test]
    fn l1_orthant_from_zero() {
        let p = l1_perturbation_orthant(&Polynomial::zero(1), 1, &int(1)).unwrap();
        assert_eq!(p, Polynomial::parse(1, "1 0\n1 1\n1 2").unwrap());
        assert!(l1_perturbation_orthant(&Polynomial::zero(2), 1, &int(1)).is_err());
    }
}
