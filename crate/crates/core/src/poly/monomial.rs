//! Exponent vectors and graded monomial bases.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

/// Exponent vector `α ∈ ℕⁿ` of a monomial `x^α`.
///
/// Ordering is graded: total degree first, then lexicographically with
/// `x₁ > x₂ > … > xₙ`, so that `1 < x₁ < x₂ < x₁² < x₁x₂ < x₂² < …`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Self { exps }
    }

    pub fn one(n: usize) -> Self {
        Self { exps: vec![0; n] }
    }

    /// The monomial `x_i`.
    pub fn var(n: usize, i: usize) -> Self {
        let mut exps = vec![0; n];
        exps[i] = 1;
        Self { exps }
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// True when every exponent is even, i.e. the monomial is a square `x^{2β}`.
    pub fn is_even(&self) -> bool {
        self.exps.iter().all(|&e| e % 2 == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars(), other.nvars());
        Monomial {
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn double(&self) -> Monomial {
        Monomial {
            exps: self.exps.iter().map(|e| 2 * e).collect(),
        }
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.exps
            .iter()
            .zip(x)
            .map(|(&e, &xi)| xi.powi(e as i32))
            .product()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "x{}^{}", i + 1, e)?;
            }
        }
        Ok(())
    }
}

/// All monomials of `ℕⁿ_d` in graded order, with a reverse index.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    n: usize,
    degree: u32,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl PartialEq for MonomialBasis {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.degree == other.degree
    }
}

impl MonomialBasis {
    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn get(&self, i: usize) -> &Monomial {
        &self.monomials[i]
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Monomial> {
        self.monomials.iter()
    }

    /// Evaluates the monomial vector `v(x) = (x^α)_α` at a point.
    pub fn eval_f64(&self, x: &[f64]) -> Vec<f64> {
        self.monomials.iter().map(|m| m.eval_f64(x)).collect()
    }
}

/// Builds `ℕⁿ_d`: every exponent vector of total degree at most `d`.
pub fn basis(n: usize, d: u32) -> MonomialBasis {
    let mut monomials = Vec::new();
    for deg in 0..=d {
        let mut current = vec![0u32; n];
        push_of_degree(&mut monomials, &mut current, 0, deg);
    }
    // Generation already follows the order; sort keeps the invariant explicit.
    monomials.sort();
    let index = monomials
        .iter()
        .enumerate()
        .map(|(i, m)| (m.clone(), i))
        .collect();
    MonomialBasis {
        n,
        degree: d,
        monomials,
        index,
    }
}

fn push_of_degree(out: &mut Vec<Monomial>, current: &mut [u32], pos: usize, remaining: u32) {
    let n = current.len();
    if n == 0 {
        if remaining == 0 {
            out.push(Monomial::new(Vec::new()));
        }
        return;
    }
    if pos == n - 1 {
        current[pos] = remaining;
        out.push(Monomial::new(current.to_vec()));
        current[pos] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        push_of_degree(out, current, pos + 1, remaining - e);
    }
    current[pos] = 0;
}

/// `C(n + d, n)`, the size of `ℕⁿ_d`.
pub fn basis_len(n: usize, d: u32) -> usize {
    let d = d as usize;
    let mut acc: u128 = 1;
    for k in 1..=n {
        acc = acc * (d + k) as u128 / k as u128;
    }
    acc as usize
}
