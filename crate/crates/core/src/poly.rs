//! Dense univariate polynomials over the rationals, with Sturm sequences for
//! exact real-root counting on intervals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Shorthand for `num / den`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Coefficients are stored lowest degree first with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// `c * X^k`
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    /// Number of nonzero coefficients.
    pub fn monomial_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rat(k as i64))
                .collect(),
        )
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let lead = divisor.leading().expect("division by the zero polynomial");
        let dd = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / lead;
            if !c.is_zero() {
                for (i, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + i] -= &c * d;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        match a.leading().cloned() {
            Some(l) => a.scale(&l.recip()),
            None => a,
        }
    }

    /// Same roots, each with multiplicity one.
    pub fn squarefree(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0
    }

    /// Integer polynomial with the same roots and coprime coefficients.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        let den = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if g.is_zero() {
            return ints;
        }
        ints.into_iter().map(|c| c / &g).collect()
    }

    /// Sum of |coefficient| * r^k, an upper bound for |p| on [-r, r].
    pub fn abs_bound(&self, r: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * r + c.abs();
        }
        acc
    }

    /// Sturm sequence of the square-free part.
    pub fn sturm_sequence(&self) -> Vec<Polynomial> {
        let p0 = self.squarefree();
        if p0.is_zero() {
            return Vec::new();
        }
        let mut seq = vec![p0.clone(), p0.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            if r.is_zero() {
                break;
            }
            seq.push(-r);
        }
        seq
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_roots(&self, a: &BigRational, b: &BigRational) -> usize {
        let seq = self.sturm_sequence();
        sign_changes(&seq, a).saturating_sub(sign_changes(&seq, b))
    }

    /// Whether the polynomial vanishes somewhere on the closed interval `[a, b]`.
    pub fn has_root_in(&self, a: &BigRational, b: &BigRational) -> bool {
        if self.is_zero() {
            return true;
        }
        self.eval(a).is_zero() || self.count_roots(a, b) > 0
    }

    /// Rational roots in `[a, b]` found through the rational root theorem.
    /// Returns `None` if the coefficients are too large to factor quickly.
    pub fn rational_roots_in(&self, a: &BigRational, b: &BigRational) -> Option<Vec<BigRational>> {
        if self.degree().unwrap_or(0) == 0 {
            return Some(Vec::new());
        }
        let ints = self.squarefree().primitive_integer();
        // strip the factor X^k so the constant term is nonzero
        let shift = ints.iter().position(|c| !c.is_zero()).unwrap_or(0);
        let mut roots = Vec::new();
        if shift > 0 && a <= &BigRational::zero() && &BigRational::zero() <= b {
            roots.push(BigRational::zero());
        }
        let ints = &ints[shift..];
        if ints.len() <= 1 {
            return Some(roots);
        }
        let lead = ints.last().unwrap().abs();
        let constant = ints[0].abs();
        let num_divs = small_divisors(&constant)?;
        let den_divs = small_divisors(&lead)?;
        let reduced = Polynomial::new(ints.iter().map(|c| BigRational::from_integer(c.clone())).collect());
        let mut seen = std::collections::BTreeSet::new();
        for p in &num_divs {
            for q in &den_divs {
                for sign in [1i64, -1] {
                    let cand = BigRational::new(p * BigInt::from(sign), q.clone());
                    if &cand < a || &cand > b || !seen.insert(cand.clone()) {
                        continue;
                    }
                    if reduced.eval(&cand).is_zero() {
                        roots.push(cand);
                    }
                }
            }
        }
        roots.sort();
        Some(roots)
    }

    /// Disjoint intervals `(lo, hi]` inside `(a, b]`, each holding exactly one
    /// root, refined until narrower than `width`.
    pub fn isolate_roots(
        &self,
        a: &BigRational,
        b: &BigRational,
        width: &BigRational,
    ) -> Vec<(BigRational, BigRational)> {
        let seq = self.sturm_sequence();
        if seq.is_empty() {
            return Vec::new();
        }
        let two = rat(2);
        let mut out = Vec::new();
        let mut stack = vec![(a.clone(), b.clone())];
        while let Some((lo, hi)) = stack.pop() {
            let count = sign_changes(&seq, &lo).saturating_sub(sign_changes(&seq, &hi));
            if count == 0 {
                continue;
            }
            if count == 1 && &hi - &lo < *width {
                out.push((lo, hi));
                continue;
            }
            let mid = (&lo + &hi) / &two;
            stack.push((mid.clone(), hi));
            stack.push((lo, mid));
        }
        out.sort();
        out
    }
}

fn sign_changes(seq: &[Polynomial], x: &BigRational) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for p in seq {
        let v = p.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// All positive divisors, or `None` when `n` is too large for trial division.
fn small_divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.to_u64().filter(|&n| n <= 1 << 40)?;
    let mut divs = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            divs.push(BigInt::from(d));
            if d * d != n {
                divs.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Some(divs)
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "X")?,
                (1, false) => write!(f, "{mag}X")?,
                (_, true) => write!(f, "X^{k}")?,
                (_, false) => write!(f, "{mag}X^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_roundtrip() {
        let a = Polynomial::from_ints(&[-1, 0, 0, 2, 5]);
        let b = Polynomial::from_ints(&[3, 1, 2]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.degree().unwrap() < 2);
    }

    #[test]
    fn sturm_counts_roots() {
        // (X - 1/4)(X - 1/2)(X - 2)
        let p = &(&Polynomial::new(vec![ratio(-1, 4), rat(1)]) * &Polynomial::new(vec![ratio(-1, 2), rat(1)]))
            * &Polynomial::from_ints(&[-2, 1]);
        assert_eq!(p.count_roots(&rat(0), &rat(1)), 2);
        assert_eq!(p.count_roots(&rat(0), &ratio(1, 4)), 1);
        assert_eq!(p.count_roots(&ratio(1, 4), &rat(1)), 1);
        assert_eq!(p.count_roots(&rat(-5), &rat(5)), 3);
        // x^2 + 1 has none
        assert_eq!(Polynomial::from_ints(&[1, 0, 1]).count_roots(&rat(-9), &rat(9)), 0);
    }

    #[test]
    fn repeated_roots_counted_once() {
        let p = &Polynomial::from_ints(&[-1, 2]) * &Polynomial::from_ints(&[-1, 2]);
        assert_eq!(p.count_roots(&rat(0), &rat(1)), 1);
        assert!(p.has_root_in(&rat(0), &rat(1)));
    }

    #[test]
    fn rational_roots() {
        let p = &Polynomial::from_ints(&[-1, 3]) * &Polynomial::from_ints(&[-2, 0, 1]);
        let roots = p.rational_roots_in(&rat(0), &rat(1)).unwrap();
        assert_eq!(roots, vec![ratio(1, 3)]);
        let iso = p.isolate_roots(&rat(-2), &rat(2), &ratio(1, 1000));
        assert_eq!(iso.len(), 3);
        for (lo, hi) in iso {
            assert!(&hi - &lo < ratio(1, 1000));
        }
    }

    #[test]
    fn display() {
        assert_eq!(Polynomial::from_ints(&[2, -3, 1]).to_string(), "X^2 - 3X + 2");
        assert_eq!(Polynomial::zero().to_string(), "0");
    }
}
