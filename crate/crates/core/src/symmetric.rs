//! Power sums, elementary symmetric polynomials and the Girard–Newton
//! recurrence linking them, plus the monic polynomial `G(s; X) = prod (X - s_i)`.
//!
//! All arithmetic is exact over the rationals. The modular variant works in
//! `Z / p^m` and refuses to run when some `j <= n` is divisible by `p`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::local_field::{abs_value, FieldSpec, Prime};
use crate::poly::{rat, Polynomial};

/// `(p_1, ..., p_n)` with `p_k = sum_i x_i^k`.
pub fn power_sums(points: &[BigRational]) -> Vec<BigRational> {
    let n = points.len();
    let mut sums = vec![BigRational::zero(); n];
    for x in points {
        let mut pow = BigRational::one();
        for s in sums.iter_mut() {
            pow *= x;
            *s += &pow;
        }
    }
    sums
}

/// Solve the Girard–Newton recurrence
/// `(-1)^{j-1} j sigma_j = sum_{i<j} (-1)^i p_{j-i} sigma_i`
/// for `(sigma_1, ..., sigma_n)`, given `(p_1, ..., p_n)` and `sigma_0 = 1`.
pub fn elementary_from_power(power: &[BigRational]) -> Vec<BigRational> {
    let n = power.len();
    let mut sigma = Vec::with_capacity(n + 1);
    sigma.push(BigRational::one());
    for j in 1..=n {
        let mut acc = BigRational::zero();
        for i in 0..j {
            let term = &power[j - i - 1] * &sigma[i];
            if i % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc /= rat(j as i64);
        if j % 2 == 0 {
            acc = -acc;
        }
        sigma.push(acc);
    }
    sigma.remove(0);
    sigma
}

/// The same recurrence modulo `p^precision`. Fails when `p <= n`, since then
/// `j = p` has no inverse.
pub fn elementary_from_power_mod(power: &[u64], p: Prime, precision: u32) -> Result<Vec<u64>> {
    let n = power.len();
    let pv = p.get();
    if let Some(j) = (1..=n).find(|j| (*j as u64).is_multiple_of(pv)) {
        return Err(Error::NotInvertible { j, p: pv });
    }
    let modulus = p
        .pow(precision)
        .ok_or_else(|| Error::InvalidInput(format!("{p}^{precision} overflows")))? as u128;
    let m = modulus;
    let mut sigma: Vec<u128> = vec![1 % m];
    for j in 1..=n {
        let mut acc: u128 = 0;
        for i in 0..j {
            let term = (power[j - i - 1] as u128 % m) * sigma[i] % m;
            acc = if i % 2 == 0 {
                (acc + term) % m
            } else {
                (acc + m - term) % m
            };
        }
        let inv = mod_inverse(j as u128 % m, m).expect("unit");
        acc = acc * inv % m;
        if j % 2 == 0 {
            acc = (m - acc) % m;
        }
        sigma.push(acc);
    }
    Ok(sigma[1..].iter().map(|&x| x as u64).collect())
}

fn mod_inverse(a: u128, m: u128) -> Option<u128> {
    if m == 1 {
        return Some(0);
    }
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(m as i128) as u128)
}

/// Power sums and elementary symmetric polynomials of one point set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricData {
    /// `(p_1, ..., p_n)`
    pub power: Vec<BigRational>,
    /// `(sigma_0, ..., sigma_n)` with `sigma_0 = 1`
    pub elementary: Vec<BigRational>,
}

impl SymmetricData {
    pub fn from_points(points: &[BigRational]) -> Self {
        let power = power_sums(points);
        let mut elementary = vec![BigRational::one()];
        elementary.extend(elementary_from_power(&power));
        SymmetricData { power, elementary }
    }
}

/// A monic polynomial, coefficients lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonicPolynomial {
    coeffs: Vec<BigRational>,
}

impl MonicPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// `(sigma_1, ..., sigma_n)` read off the coefficients.
    pub fn elementary(&self) -> Vec<BigRational> {
        let n = self.degree();
        (1..=n)
            .map(|k| {
                let c = self.coeffs[n - k].clone();
                if k % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
            .collect()
    }

    pub fn to_polynomial(&self) -> Polynomial {
        Polynomial::new(self.coeffs.clone())
    }
}

/// `G(s; X) = prod_i (X - s_i)`.
pub fn vieta_polynomial(points: &[BigRational]) -> MonicPolynomial {
    let mut coeffs = vec![BigRational::one()];
    for s in points {
        let mut next = vec![BigRational::zero(); coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * s;
        }
        coeffs = next;
    }
    MonicPolynomial { coeffs }
}

/// How far two point sets are from sharing power sums, elementary symmetric
/// polynomials and the polynomial `G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GnDefect {
    /// `max_k |p_k(t) - p_k(s)|`
    pub power_defect: BigRational,
    /// `max_j |sigma_j(t) - sigma_j(s)|`
    pub elementary_defect: BigRational,
    /// Over `Q_p` the exact `sup_{|x| <= 1} |G(t;x) - G(s;x)|`, which is the
    /// largest coefficient difference. Over the reals the upper bound
    /// `sum_j |coef_j(t) - coef_j(s)|` on `[0, 1]`.
    pub sup_g_defect: BigRational,
}

pub fn gn_defect(s: &[BigRational], t: &[BigRational], field: FieldSpec) -> Result<GnDefect> {
    if s.len() != t.len() {
        return Err(Error::LengthMismatch {
            expected: s.len(),
            got: t.len(),
        });
    }
    let diff_max = |a: &[BigRational], b: &[BigRational]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| abs_value(field, &(x - y)))
            .max()
            .unwrap_or_else(BigRational::zero)
    };
    let power_defect = diff_max(&power_sums(s), &power_sums(t));
    let gs = vieta_polynomial(s);
    let gt = vieta_polynomial(t);
    let elementary_defect = diff_max(&gs.elementary(), &gt.elementary());
    let coef_diffs = gs
        .coefficients()
        .iter()
        .zip(gt.coefficients())
        .map(|(x, y)| abs_value(field, &(x - y)));
    let sup_g_defect = if field.is_archimedean() {
        coef_diffs.fold(BigRational::zero(), |a, b| a + b)
    } else {
        coef_diffs.max().unwrap_or_else(BigRational::zero)
    };
    Ok(GnDefect {
        power_defect,
        elementary_defect,
        sup_g_defect,
    })
}

/// Lift a vector of small integers to rationals.
pub fn rationals(xs: &[i64]) -> Vec<BigRational> {
    xs.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ratio;
    use proptest::prelude::*;

    #[test]
    fn power_sum_examples() {
        assert_eq!(power_sums(&rationals(&[1, 2])), rationals(&[3, 5]));
        assert_eq!(power_sums(&rationals(&[0, 0, 0])), rationals(&[0, 0, 0]));
        assert_eq!(power_sums(&rationals(&[1, 2, 3])), rationals(&[6, 14, 36]));
    }

    #[test]
    fn girard_newton_examples() {
        assert_eq!(elementary_from_power(&rationals(&[3, 5])), rationals(&[3, 2]));
        assert_eq!(
            elementary_from_power(&rationals(&[0, 0, 0, 0])),
            rationals(&[0, 0, 0, 0])
        );
        assert_eq!(elementary_from_power(&rationals(&[6, 14, 36])), rationals(&[6, 11, 6]));
    }

    #[test]
    fn vieta_examples() {
        assert_eq!(
            vieta_polynomial(&rationals(&[1, 2])).coefficients(),
            &rationals(&[2, -3, 1])[..]
        );
        assert_eq!(
            vieta_polynomial(&rationals(&[0])).coefficients(),
            &rationals(&[0, 1])[..]
        );
        assert_eq!(
            vieta_polynomial(&rationals(&[1, 1])).coefficients(),
            &rationals(&[1, -2, 1])[..]
        );
        let g = vieta_polynomial(&[ratio(1, 3), ratio(-2, 5), rat(7)]);
        for r in [ratio(1, 3), ratio(-2, 5), rat(7)] {
            assert!(g.eval(&r).is_zero());
        }
    }

    #[test]
    fn modular_recurrence() {
        let p = Prime::new(7).unwrap();
        // points 1, 2, 3 mod 49
        let sig = elementary_from_power_mod(&[6, 14, 36], p, 2).unwrap();
        assert_eq!(sig, vec![6, 11, 6]);
        let p3 = Prime::new(3).unwrap();
        assert_eq!(
            elementary_from_power_mod(&[6, 14, 36], p3, 2),
            Err(Error::NotInvertible { j: 3, p: 3 })
        );
        assert!(elementary_from_power_mod(&[3, 5], p3, 2).is_ok());
    }

    #[test]
    fn defect_examples() {
        let f5 = FieldSpec::padic(5).unwrap();
        let s = rationals(&[1, 2]);
        let zero = gn_defect(&s, &s, FieldSpec::Real).unwrap();
        assert!(zero.power_defect.is_zero() && zero.elementary_defect.is_zero() && zero.sup_g_defect.is_zero());
        let swapped = gn_defect(&s, &rationals(&[2, 1]), f5).unwrap();
        assert!(swapped.power_defect.is_zero() && swapped.sup_g_defect.is_zero());

        let d = gn_defect(&rationals(&[0, 1]), &rationals(&[5, 1]), f5).unwrap();
        assert_eq!(d.power_defect, ratio(1, 5));
        assert_eq!(d.elementary_defect, ratio(1, 5));
        assert_eq!(d.sup_g_defect, ratio(1, 5));

        assert!(matches!(
            gn_defect(&rationals(&[0, 1]), &rationals(&[1]), f5),
            Err(Error::LengthMismatch { .. })
        ));
    }

    fn small_rationals(max_len: usize) -> impl Strategy<Value = Vec<BigRational>> {
        prop::collection::vec((-50i64..50, 1i64..12), 1..=max_len)
            .prop_map(|v| v.into_iter().map(|(a, b)| ratio(a, b)).collect())
    }

    proptest! {
        #[test]
        fn newton_roundtrip(points in small_rationals(8)) {
            let sigma = elementary_from_power(&power_sums(&points));
            prop_assert_eq!(sigma, vieta_polynomial(&points).elementary());
        }

        #[test]
        fn permutation_invariance(mut points in small_rationals(6), seed in any::<u64>()) {
            let p = power_sums(&points);
            let g = vieta_polynomial(&points);
            let k = points.len();
            points.rotate_left((seed as usize) % k);
            if k > 1 { points.swap(0, (seed as usize / 7) % k); }
            prop_assert_eq!(power_sums(&points), p);
            prop_assert_eq!(vieta_polynomial(&points), g);
        }

        #[test]
        fn ultrametric_transfer(s in prop::collection::vec(0i64..625, 2..=4), t in prop::collection::vec(0i64..625, 4)) {
            // p = 7 > n: the power defect controls the elementary defect
            let f = FieldSpec::padic(7).unwrap();
            let s = rationals(&s);
            let t = rationals(&t[..s.len()]);
            let d = gn_defect(&s, &t, f).unwrap();
            prop_assert!(d.elementary_defect <= d.power_defect);
            prop_assert!(d.sup_g_defect == d.elementary_defect);
        }
    }
}
