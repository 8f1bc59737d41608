//! Real-root isolation for univariate rational polynomials via Sturm sequences.
//!
//! Counting uses half-open intervals `(a, b]` on the square-free part, so every
//! isolating interval either contains exactly one root in its interior or
//! degenerates to an exact rational root `[r, r]`.

use num::{One, Signed, Zero};

use super::polynomial::Polynomial;
use super::rational::{ratio, Rational};
use crate::error::{Error, Result};

/// Dense univariate coefficients, lowest degree first, without trailing zeros.
type Dense = Vec<Rational>;

fn trim(mut p: Dense) -> Dense {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn eval_dense(p: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn derivative_dense(p: &[Rational]) -> Dense {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * Rational::from_integer(k.into()))
            .collect(),
    )
}

/// Polynomial division; returns `(quotient, remainder)`.
fn divmod(a: &[Rational], b: &[Rational]) -> (Dense, Dense) {
    let b = trim(b.to_vec());
    assert!(!b.is_empty(), "division by the zero polynomial");
    let mut rem = trim(a.to_vec());
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let lead = b.last().unwrap().clone();
    let mut quot = vec![Rational::zero(); rem.len() - b.len() + 1];
    while rem.len() >= b.len() && !rem.is_empty() {
        let shift = rem.len() - b.len();
        let factor = rem.last().unwrap() / &lead;
        for (k, bc) in b.iter().enumerate() {
            rem[shift + k] -= &factor * bc;
        }
        quot[shift] = factor;
        rem.pop();
        rem = trim(rem);
    }
    (quot, rem)
}

fn monic(p: Dense) -> Dense {
    match p.last() {
        Some(lead) if !lead.is_zero() => {
            let lead = lead.clone();
            p.into_iter().map(|c| c / &lead).collect()
        }
        _ => p,
    }
}

fn gcd(a: &[Rational], b: &[Rational]) -> Dense {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let (_, r) = divmod(&a, &b);
        a = b;
        b = monic(r);
    }
    monic(a)
}

/// Square-free part `p / gcd(p, p')`.
fn square_free(p: &[Rational]) -> Dense {
    let d = derivative_dense(p);
    if d.is_empty() {
        return trim(p.to_vec());
    }
    let g = gcd(p, &d);
    if g.len() <= 1 {
        return trim(p.to_vec());
    }
    divmod(p, &g).0
}

/// Sturm chain `p₀ = p, p₁ = p', p_{k+1} = −rem(p_{k−1}, p_k)`.
#[derive(Clone, Debug)]
pub struct SturmSequence {
    chain: Vec<Dense>,
}

impl SturmSequence {
    fn new(p: &[Rational]) -> Self {
        let p0 = trim(p.to_vec());
        let p1 = derivative_dense(&p0);
        let mut chain = vec![p0];
        if !p1.is_empty() {
            chain.push(p1);
        }
        while chain.len() >= 2 {
            let k = chain.len();
            let (_, r) = divmod(&chain[k - 2], &chain[k - 1]);
            if r.is_empty() {
                break;
            }
            // Positive rescaling keeps signs and tames coefficient growth.
            let scale = r.last().unwrap().abs();
            chain.push(r.into_iter().map(|c| -c / &scale).collect());
        }
        Self { chain }
    }

    /// Number of sign changes in the chain evaluated at `x` (zeros skipped).
    pub fn variations(&self, x: &Rational) -> usize {
        let mut count = 0;
        let mut last: Option<bool> = None;
        for q in &self.chain {
            let v = eval_dense(q, x);
            if v.is_zero() {
                continue;
            }
            let pos = v.is_positive();
            if let Some(prev) = last {
                if prev != pos {
                    count += 1;
                }
            }
            last = Some(pos);
        }
        count
    }

    /// Distinct roots in the half-open interval `(a, b]`.
    pub fn count(&self, a: &Rational, b: &Rational) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }
}

/// A closed rational interval `[lo, hi]` holding exactly one real root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RootInterval {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }
}

/// Isolating intervals for the distinct real roots of a univariate polynomial.
#[derive(Clone, Debug)]
pub struct RootIsolation {
    pub polynomial: Polynomial,
    pub intervals: Vec<RootInterval>,
    pub width: Rational,
    square_free: Dense,
    sturm: SturmSequence,
}

impl RootIsolation {
    /// Shrinks every non-exact interval to width at most `width`.
    pub fn refine(&mut self, width: &Rational) {
        for iv in &mut self.intervals {
            refine_interval(&self.square_free, &self.sturm, iv, width);
        }
        if *width < self.width {
            self.width = width.clone();
        }
    }

    /// Re-certifies every interval: exact roots vanish, the others hold one
    /// Sturm-counted root in `(lo, hi]` and no root at `hi`.
    pub fn verify(&self) -> bool {
        let disjoint = self
            .intervals
            .windows(2)
            .all(|w| w[0].hi < w[1].lo);
        disjoint
            && self.intervals.iter().all(|iv| {
                if iv.is_exact() {
                    eval_dense(&self.square_free, &iv.lo).is_zero()
                } else {
                    self.sturm.count(&iv.lo, &iv.hi) == 1
                        && !eval_dense(&self.square_free, &iv.hi).is_zero()
                }
            })
    }

    /// Distinct roots in `[lo, hi]` according to the Sturm chain alone.
    pub fn sturm_count(&self, lo: &Rational, hi: &Rational) -> usize {
        let at_lo = usize::from(eval_dense(&self.square_free, lo).is_zero());
        self.sturm.count(lo, hi) + at_lo
    }
}

fn refine_interval(q: &[Rational], sturm: &SturmSequence, iv: &mut RootInterval, width: &Rational) {
    let two = Rational::from_integer(2.into());
    while !iv.is_exact() && iv.width() > *width {
        let mid = (&iv.lo + &iv.hi) / &two;
        if eval_dense(q, &mid).is_zero() {
            iv.lo = mid.clone();
            iv.hi = mid;
            return;
        }
        if sturm.count(&iv.lo, &mid) == 1 {
            iv.hi = mid;
        } else {
            iv.lo = mid;
        }
    }
}

/// Default refinement width, `10⁻⁶`.
pub fn default_width() -> Rational {
    ratio(1, 1_000_000)
}

/// Isolates every distinct real root of `p` in the closed range `[lo, hi]`,
/// by bisection of the range, refined to intervals of width at most `width`.
pub fn isolate_real_roots(
    p: &Polynomial,
    lo: &Rational,
    hi: &Rational,
    width: &Rational,
) -> Result<RootIsolation> {
    let coeffs = trim(p.univariate_coeffs()?);
    if coeffs.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    if lo > hi {
        return Err(Error::InvalidProblem(format!(
            "empty root range [{lo}, {hi}]"
        )));
    }
    let q = square_free(&coeffs);
    let sturm = SturmSequence::new(&q);
    let mut intervals = Vec::new();
    if eval_dense(&q, lo).is_zero() {
        intervals.push(RootInterval {
            lo: lo.clone(),
            hi: lo.clone(),
        });
    }
    let mut stack = vec![(lo.clone(), hi.clone())];
    let two = Rational::from_integer(2.into());
    let mut found = Vec::new();
    while let Some((a, b)) = stack.pop() {
        let k = sturm.count(&a, &b);
        match k {
            0 => {}
            1 => {
                let mut iv = if eval_dense(&q, &b).is_zero() {
                    RootInterval { lo: b.clone(), hi: b }
                } else {
                    RootInterval { lo: a, hi: b }
                };
                refine_interval(&q, &sturm, &mut iv, width);
                found.push(iv);
            }
            _ => {
                let mid = (&a + &b) / &two;
                stack.push((mid.clone(), b));
                stack.push((a, mid));
            }
        }
    }
    found.sort_by(|x, y| x.lo.cmp(&y.lo));
    intervals.extend(found);
    Ok(RootIsolation {
        polynomial: p.clone(),
        intervals,
        width: width.clone(),
        square_free: q,
        sturm,
    })
}

/// A local minimizer of a univariate polynomial located through its derivative.
#[derive(Clone, Debug)]
pub struct LocalMinimum {
    /// Isolating interval of the critical point.
    pub interval: RootInterval,
    /// Reported abscissa: the interval midpoint.
    pub point: Rational,
    /// Exact polynomial value at `point`.
    pub value: Rational,
}

/// Local minima of `p` in `[lo, hi]`: roots of `p'` where `p'` changes sign
/// from negative to positive, read off at the isolating-interval endpoints.
pub fn local_minima(
    p: &Polynomial,
    lo: &Rational,
    hi: &Rational,
    width: &Rational,
) -> Result<Vec<LocalMinimum>> {
    let dp = p.derivative(0);
    if dp.is_zero() {
        return Ok(Vec::new());
    }
    let iso = isolate_real_roots(&dp, lo, hi, width)?;
    let d = trim(dp.univariate_coeffs()?);
    let mut out = Vec::new();
    for iv in &iso.intervals {
        let (left, right) = if iv.is_exact() {
            flanks(&iso, &iv.lo)
        } else {
            (iv.lo.clone(), iv.hi.clone())
        };
        let sl = eval_dense(&d, &left);
        let sr = eval_dense(&d, &right);
        if sl.is_negative() && sr.is_positive() {
            let point = iv.midpoint();
            let value = p.eval(std::slice::from_ref(&point))?;
            out.push(LocalMinimum {
                interval: iv.clone(),
                point,
                value,
            });
        }
    }
    Ok(out)
}

/// Sample points on both sides of an exact root with no other root between.
fn flanks(iso: &RootIsolation, r: &Rational) -> (Rational, Rational) {
    let mut delta = Rational::one();
    loop {
        let a = r - &delta;
        let b = r + &delta;
        if iso.sturm_count(&a, &b) == 1 {
            return (a, b);
        }
        delta /= Rational::from_integer(2.into());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational::{int, ratio};

    fn upoly(coeffs: &[i64]) -> Polynomial {
        Polynomial::from_univariate_coeffs(&coeffs.iter().map(|&c| int(c)).collect::<Vec<_>>())
    }

    #[test]
    fn sqrt_two_is_isolated_and_refined() {
        let p = upoly(&[-2, 0, 1]);
        let mut iso = isolate_real_roots(&p, &int(0), &int(10), &default_width()).unwrap();
        assert_eq!(iso.intervals.len(), 1);
        assert!(iso.verify());
        iso.refine(&ratio(1, 100_000));
        let iv = &iso.intervals[0];
        assert!(iv.lo >= ratio(141_421, 100_000));
        assert!(iv.hi <= ratio(141_422, 100_000));
    }

    #[test]
    fn exact_rational_roots_become_points() {
        // (x − 1)(x − 2)(x − 3)
        let p = upoly(&[-6, 11, -6, 1]);
        let iso = isolate_real_roots(&p, &int(0), &int(4), &default_width()).unwrap();
        assert_eq!(iso.intervals.len(), 3);
        assert!(iso.verify());
        assert!(iso.intervals.iter().any(|iv| iv.is_exact() && iv.lo == int(2)));
    }

    #[test]
    fn root_at_range_start_is_kept() {
        let p = upoly(&[0, -1, 1]); // x(x − 1)
        let iso = isolate_real_roots(&p, &int(0), &int(5), &default_width()).unwrap();
        assert_eq!(iso.intervals.len(), 2);
        assert!(iso.intervals[0].is_exact());
        assert_eq!(iso.intervals[0].lo, int(0));
    }

    #[test]
    fn repeated_roots_counted_once() {
        // (x − 1)²(x + 3)
        let p = &upoly(&[1, -2, 1]) * &upoly(&[3, 1]);
        let iso = isolate_real_roots(&p, &int(-10), &int(10), &default_width()).unwrap();
        assert_eq!(iso.intervals.len(), 2);
        assert_eq!(iso.sturm_count(&int(-10), &int(10)), 2);
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        let err = isolate_real_roots(&Polynomial::zero(1), &int(0), &int(1), &default_width());
        assert!(matches!(err, Err(Error::ZeroPolynomial)));
        assert!(matches!(
            isolate_real_roots(&Polynomial::zero(2), &int(0), &int(1), &default_width()),
            Err(Error::NotUnivariate(2))
        ));
    }

    #[test]
    fn tiny_coefficients_are_handled_exactly() {
        // x² − 10⁻³⁰ has roots ±10⁻¹⁵.
        let mut c = vec![-crate::poly::rational::pow10_neg(30), int(0), int(1)];
        c.truncate(3);
        let p = Polynomial::from_univariate_coeffs(&c);
        let iso = isolate_real_roots(&p, &int(-1), &int(1), &crate::poly::rational::pow10_neg(20)).unwrap();
        assert_eq!(iso.intervals.len(), 2);
        assert!(iso.verify());
    }

    #[test]
    fn quartic_local_minima() {
        // (x² − 1)² has minima at ±1 and a maximum at 0.
        let p = &upoly(&[-1, 0, 1]) * &upoly(&[-1, 0, 1]);
        let mins = local_minima(&p, &int(-2), &int(2), &default_width()).unwrap();
        assert_eq!(mins.len(), 2);
        assert!(mins.iter().all(|m| m.value == int(0)));
    }
}
