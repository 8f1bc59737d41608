//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{Signed, Zero};

use super::monomial::{basis, Monomial};
use super::rational::{parse_rational, to_f64, Rational};
use crate::error::{Error, Result};

/// `p = Σ_α p_α x^α` over `n` variables. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        Self::monomial(n, Monomial::one(n), c)
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Rational::from_integer(1.into()))
    }

    pub fn var(n: usize, i: usize) -> Self {
        Self::monomial(n, Monomial::var(n, i), Rational::from_integer(1.into()))
    }

    pub fn monomial(n: usize, m: Monomial, c: Rational) -> Self {
        assert_eq!(m.nvars(), n, "monomial arity must match the polynomial");
        let mut p = Self::zero(n);
        p.add_term(m, c);
        p
    }

    /// Builds a polynomial from `(coefficient, exponents)` pairs, merging duplicates.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Rational, Vec<u32>)>,
    {
        let mut p = Self::zero(n);
        for (c, exps) in terms {
            if exps.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: exps.len(),
                });
            }
            p.add_term(Monomial::new(exps), c);
        }
        Ok(p)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        debug_assert_eq!(m.nvars(), self.n);
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn scale(&self, s: &Rational) -> Polynomial {
        if s.is_zero() {
            return Polynomial::zero(self.n);
        }
        Polynomial {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    /// Largest coefficient magnitude (`‖p‖_∞` on coefficients).
    pub fn max_abs_coeff(&self) -> Rational {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    fn check_point_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: len,
            });
        }
        Ok(())
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, x: &[Rational]) -> Result<Rational> {
        self.check_point_len(x.len())?;
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &e) in x.iter().zip(m.exponents()) {
                if e > 0 {
                    t *= num::pow(xi.clone(), e as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, x: &[f64]) -> Result<f64> {
        self.check_point_len(x.len())?;
        Ok(self
            .terms
            .iter()
            .map(|(m, c)| to_f64(c) * m.eval_f64(x))
            .sum())
    }

    /// Partial derivative with respect to `x_i`.
    pub fn derivative(&self, i: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.n);
        for (m, c) in &self.terms {
            let e = m.exponents()[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.exponents().to_vec();
            exps[i] -= 1;
            out.add_term(Monomial::new(exps), c * Rational::from_integer(e.into()));
        }
        out
    }

    /// Dense univariate coefficients `[p_0, p_1, …, p_deg]`.
    pub fn univariate_coeffs(&self) -> Result<Vec<Rational>> {
        if self.n != 1 {
            return Err(Error::NotUnivariate(self.n));
        }
        let deg = self.degree() as usize;
        let mut out = vec![Rational::zero(); deg + 1];
        for (m, c) in &self.terms {
            out[m.exponents()[0] as usize] = c.clone();
        }
        Ok(out)
    }

    pub fn from_univariate_coeffs(coeffs: &[Rational]) -> Polynomial {
        let mut p = Polynomial::zero(1);
        for (k, c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::new(vec![k as u32]), c.clone());
        }
        p
    }

    /// Parses the line-oriented term format: `num/den e1 … en` per line,
    /// blank lines and `#` comments ignored. Errors name the offending line.
    pub fn parse(n: usize, text: &str) -> Result<Polynomial> {
        let mut p = Polynomial::zero(n);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (m, c) = parse_term(n, line).map_err(|msg| Error::ParseLine {
                line: lineno + 1,
                msg,
            })?;
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// Inverse of [`Polynomial::parse`]; terms in graded order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (m, c) in &self.terms {
            out.push_str(&format!("{}/{}", c.numer(), c.denom()));
            for e in m.exponents() {
                out.push_str(&format!(" {e}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Parses a single `coeff e1 … en` term.
pub fn parse_term(n: usize, line: &str) -> std::result::Result<(Monomial, Rational), String> {
    let mut fields = line.split_whitespace();
    let coeff = fields.next().ok_or("empty term")?;
    let c = parse_rational(coeff).map_err(|e| e.to_string())?;
    let exps: Vec<u32> = fields
        .map(|f| {
            f.parse::<u32>()
                .map_err(|_| format!("invalid exponent `{f}`"))
        })
        .collect::<std::result::Result<_, _>>()?;
    if exps.len() != n {
        return Err(format!("expected {n} exponents, found {}", exps.len()));
    }
    Ok((Monomial::new(exps), c))
}

impl Add<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.n, rhs.n);
        let mut out = Polynomial::zero(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})*{m}")?;
            }
        }
        Ok(())
    }
}

/// `Σ_{β ∈ ℕⁿ_k} x^{2β}`: every monomial square of degree at most `2k`.
pub fn sum_of_even_squares(n: usize, k: u32) -> Polynomial {
    let one = Rational::from_integer(1.into());
    let mut p = Polynomial::zero(n);
    for beta in basis(n, k).iter() {
        p.add_term(beta.double(), one.clone());
    }
    p
}

/// `Σ_{α ∈ ℕⁿ_d} x^α`.
pub fn sum_of_monomials(n: usize, d: u32) -> Polynomial {
    let one = Rational::from_integer(1.into());
    let mut p = Polynomial::zero(n);
    for alpha in basis(n, d).iter() {
        p.add_term(alpha.clone(), one.clone());
    }
    p
}
