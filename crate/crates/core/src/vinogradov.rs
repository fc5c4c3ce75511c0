//! Exact solution counts for the Vinogradov system
//! `sum_i gamma(t_i) = sum_i gamma(s_i)` with all `s_i, t_i` in `[1, N]`.

use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::bounds::factorial;
use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::syzygy::{binomial, for_each_sorted_with_first};
use crate::ENUMERATION_BUDGET;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CountMethod {
    /// `sum_v m(v)^2` over the level sets of `t -> sum_i gamma(t_i)`.
    HashJoin,
    /// Literal comparison of every pair of `n`-tuples.
    BruteForce,
    /// Closed form for the moment curve, whose only solutions are
    /// permutations.
    PermutationFormula,
}

impl CountMethod {
    pub fn name(self) -> &'static str {
        match self {
            CountMethod::HashJoin => "HashJoin",
            CountMethod::BruteForce => "BruteForce",
            CountMethod::PermutationFormula => "PermutationFormula",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountResult {
    pub n: usize,
    pub big_n: u64,
    pub count: BigUint,
    pub method: CountMethod,
    pub elapsed: Duration,
}

/// `N^n`, the diagonal solutions `t = s`.
pub fn diagonal_count(n: usize, big_n: u64) -> BigUint {
    BigUint::from(big_n).pow(n as u32)
}

/// Partitions of `n` as non-increasing part lists.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            go(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// `sum_{s in [1,N]^n}` (number of distinct orderings of `s`), grouped by
/// the multiplicity pattern `lambda` of `s`:
/// `sum_lambda C(N, k) k! / prod_j c_j! * (n! / prod_i lambda_i!)^2` with
/// `k` parts, `c_j` of them equal to `j`.
pub fn permutation_count(n: usize, big_n: u64) -> BigUint {
    let n_fact = factorial(n);
    partitions(n)
        .iter()
        .map(|lambda| {
            let k = lambda.len();
            if k as u64 > big_n {
                return BigUint::zero();
            }
            let mut repeats = vec![0usize; n + 1];
            for &part in lambda {
                repeats[part] += 1;
            }
            let patterns =
                binomial(big_n, k as u64) * factorial(k) / repeats.iter().map(|&c| factorial(c)).product::<BigUint>();
            let orderings = &n_fact / lambda.iter().map(|&l| factorial(l)).product::<BigUint>();
            patterns * &orderings * &orderings
        })
        .sum()
}

/// `D gamma(x)` for `x = 1..=N` as exact integers, `D` the common
/// denominator of the coefficients.
fn integer_table(curve: &Curve, big_n: u64) -> Result<Vec<Vec<i128>>> {
    let d = curve
        .coords()
        .iter()
        .flat_map(|c| c.coeffs().iter())
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let d = BigRational::from_integer(d);
    (1..=big_n)
        .map(|x| {
            let x = BigRational::from_integer(BigInt::from(x));
            curve
                .eval(&x)
                .into_iter()
                .map(|v| {
                    (v * &d)
                        .to_integer()
                        .to_i128()
                        .ok_or_else(|| Error::budget("integer curve values", "more than 127 bits", ENUMERATION_BUDGET))
                })
                .collect()
        })
        .collect()
}

fn tuple_sum(table: &[Vec<i128>], t: &[u64], out: &mut [i128]) -> Result<()> {
    out.iter_mut().for_each(|x| *x = 0);
    for &x in t {
        for (o, v) in out.iter_mut().zip(&table[x as usize]) {
            *o = o
                .checked_add(*v)
                .ok_or_else(|| Error::InvalidInput("curve sums overflow".into()))?;
        }
    }
    Ok(())
}

/// Number of orderings of a sorted tuple.
fn orderings(sorted: &[u64], n_fact: u64) -> u64 {
    let mut w = n_fact;
    let mut run = 1u64;
    let mut f = 1u64;
    for k in 1..sorted.len() {
        if sorted[k] == sorted[k - 1] {
            run += 1;
            f *= run;
        } else {
            w /= f;
            run = 1;
            f = 1;
        }
    }
    w / f
}

fn hash_join(curve: &Curve, big_n: u64) -> Result<BigUint> {
    let n = curve.dim();
    let work = binomial(big_n + n as u64 - 1, n as u64);
    if work > BigUint::from(ENUMERATION_BUDGET) {
        return Err(Error::budget("hash-join count", work, ENUMERATION_BUDGET));
    }
    let table = integer_table(curve, big_n)?;
    let n_fact = factorial(n).to_u64().expect("n! fits u64 within budget");

    // mixed radix over the ranges of the n coordinate sums
    let mut radix: Vec<(i128, u128)> = Vec::with_capacity(n);
    let mut total: Option<u128> = Some(1);
    for k in 0..n {
        let lo = table.iter().map(|r| r[k]).min().unwrap() * n as i128;
        let hi = table.iter().map(|r| r[k]).max().unwrap() * n as i128;
        let width = (hi - lo) as u128 + 1;
        total = total.and_then(|t| t.checked_mul(width));
        radix.push((lo, width));
    }

    let levels = if total.is_some() {
        let pack = |v: &[i128]| {
            v.iter()
                .zip(&radix)
                .rev()
                .fold(0u128, |acc, (x, (lo, w))| acc * w + (x - lo) as u128)
        };
        level_sizes(n, big_n, &table, n_fact, pack)?
    } else {
        level_sizes(n, big_n, &table, n_fact, |v: &[i128]| v.to_vec())?
    };
    let sum: u128 = levels.iter().map(|&m| m as u128 * m as u128).sum();
    Ok(BigUint::from(sum))
}

/// The multiset `{m(v)}` of level-set sizes, in key order.
fn level_sizes<K, F>(n: usize, big_n: u64, table: &[Vec<i128>], n_fact: u64, pack: F) -> Result<Vec<u64>>
where
    K: Ord + Send,
    F: Fn(&[i128]) -> K + Sync,
{
    let shards: Vec<Result<Vec<(K, u64)>>> = (0..big_n)
        .into_par_iter()
        .map(|first| {
            let mut out = Vec::new();
            let mut sum = vec![0i128; n];
            let mut err = None;
            for_each_sorted_with_first(n, first, big_n, |t| {
                if err.is_none() {
                    match tuple_sum(table, t, &mut sum) {
                        Ok(()) => out.push((pack(&sum), orderings(t, n_fact))),
                        Err(e) => err = Some(e),
                    }
                }
            });
            match err {
                Some(e) => Err(e),
                None => Ok(out),
            }
        })
        .collect();
    let mut entries = Vec::new();
    for shard in shards {
        entries.extend(shard?);
    }
    entries.par_sort_unstable_by(|a, b| a.0.cmp(&b.0));
    Ok(entries
        .chunk_by(|a, b| a.0 == b.0)
        .map(|g| g.iter().map(|e| e.1).sum())
        .collect())
}

fn brute_force(curve: &Curve, big_n: u64) -> Result<BigUint> {
    let n = curve.dim();
    let ordered = big_n.checked_pow(n as u32);
    let pairs = ordered.and_then(|m| m.checked_mul(m));
    match pairs {
        Some(p) if p <= ENUMERATION_BUDGET => {}
        _ => {
            return Err(Error::budget(
                "brute-force count",
                format!("{big_n}^{}", 2 * n),
                ENUMERATION_BUDGET,
            ))
        }
    }
    let table = integer_table(curve, big_n)?;
    let m = ordered.unwrap();
    let mut sums: Vec<Vec<i128>> = Vec::with_capacity(m as usize);
    let mut t = vec![0u64; n];
    let mut buf = vec![0i128; n];
    for _ in 0..m {
        tuple_sum(&table, &t, &mut buf)?;
        sums.push(buf.clone());
        for x in t.iter_mut() {
            *x += 1;
            if *x < big_n {
                break;
            }
            *x = 0;
        }
    }
    let count: u64 = sums
        .par_iter()
        .map(|s| sums.iter().filter(|t| *t == s).count() as u64)
        .sum();
    Ok(BigUint::from(count))
}

/// `J(N) = #{(s, t) in [1,N]^{2n} : sum gamma(t_i) = sum gamma(s_i)}`.
pub fn count_solutions(curve: &Curve, big_n: u64, method: CountMethod) -> Result<CountResult> {
    if big_n == 0 {
        return Err(Error::InvalidInput("N must be at least 1".into()));
    }
    let start = Instant::now();
    let count = match method {
        CountMethod::HashJoin => hash_join(curve, big_n)?,
        CountMethod::BruteForce => brute_force(curve, big_n)?,
        CountMethod::PermutationFormula => {
            if !curve.is_moment() {
                return Err(Error::UnsupportedCurve(format!(
                    "the permutation formula holds for the moment curve, not {}",
                    curve.name()
                )));
            }
            permutation_count(curve.dim(), big_n)
        }
    };
    Ok(CountResult {
        n: curve.dim(),
        big_n,
        count,
        method,
        elapsed: start.elapsed(),
    })
}

/// One row comparing `J(N)` with the main term `n! N^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticRow {
    pub big_n: u64,
    pub count: BigUint,
    pub main_term: BigUint,
    /// `n! N^n - J(N)`.
    pub residual: BigInt,
    /// `residual / N^{n-1}`.
    pub scaled_residual: f64,
}

pub fn asymptotic_report(n: usize, big_ns: &[u64], method: CountMethod) -> Result<Vec<AsymptoticRow>> {
    let curve = Curve::moment(n)?;
    big_ns
        .iter()
        .map(|&big_n| {
            let count = count_solutions(&curve, big_n, method)?.count;
            let main_term = factorial(n) * diagonal_count(n, big_n);
            let residual = BigInt::from(main_term.clone()) - BigInt::from(count.clone());
            let scale = diagonal_count(n - 1, big_n);
            let scaled_residual = residual.to_f64().unwrap() / scale.to_f64().unwrap();
            Ok(AsymptoticRow {
                big_n,
                count,
                main_term,
                residual,
                scaled_residual,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;
    use proptest::prelude::*;

    fn count(n: usize, big_n: u64, method: CountMethod) -> u64 {
        count_solutions(&Curve::moment(n).unwrap(), big_n, method)
            .unwrap()
            .count
            .to_u64()
            .unwrap()
    }

    #[test]
    fn count_examples() {
        for method in [
            CountMethod::HashJoin,
            CountMethod::BruteForce,
            CountMethod::PermutationFormula,
        ] {
            assert_eq!(count(2, 3, method), 15);
            assert_eq!(count(2, 10, method), 190);
            assert_eq!(count(3, 2, method), 20);
            assert_eq!(count(3, 5, method), 545);
            assert_eq!(count(2, 1, method), 1);
        }
    }

    #[test]
    fn closed_forms() {
        for big_n in 1..40u64 {
            assert_eq!(permutation_count(2, big_n), BigUint::from(2 * big_n * big_n - big_n));
            let c3 = 6 * big_n.pow(3) + 4 * big_n - 9 * big_n * big_n;
            assert_eq!(permutation_count(3, big_n), BigUint::from(c3));
        }
        assert_eq!(diagonal_count(2, 10), BigUint::from(100u32));
        assert_eq!(diagonal_count(3, 5), BigUint::from(125u32));
        assert_eq!(partitions(4).len(), 5);
    }

    #[test]
    fn asymptotics() {
        let rows = asymptotic_report(2, &[10, 100], CountMethod::HashJoin).unwrap();
        assert_eq!(rows[0].residual, BigInt::from(10));
        assert_eq!(rows[0].scaled_residual, 1.0);
        assert_eq!(rows[1].residual, BigInt::from(100));
        let rows = asymptotic_report(3, &[10], CountMethod::BruteForce).unwrap();
        assert_eq!(rows[0].residual, BigInt::from(860));
        assert!((rows[0].scaled_residual - 8.6).abs() < 1e-12);
    }

    #[test]
    fn non_moment_curves() {
        // (T, 2T): every pair with equal coordinate sums solves
        let line = Curve::new(
            vec![Polynomial::from_ints(&[0, 1]), Polynomial::from_ints(&[0, 2])],
            "line",
        )
        .unwrap();
        let a = count_solutions(&line, 6, CountMethod::HashJoin).unwrap().count;
        let b = count_solutions(&line, 6, CountMethod::BruteForce).unwrap().count;
        assert_eq!(a, b);
        assert_eq!(a, BigUint::from(146u32));
        assert!(matches!(
            count_solutions(&line, 6, CountMethod::PermutationFormula),
            Err(Error::UnsupportedCurve(_))
        ));
        // rational coefficients are scaled to integers
        let half = Curve::new(
            vec![
                Polynomial::from_ints(&[0, 1]),
                Polynomial::new(vec![
                    BigRational::zero(),
                    BigRational::zero(),
                    BigRational::new(1.into(), 2.into()),
                ]),
            ],
            "half",
        )
        .unwrap();
        assert_eq!(
            count_solutions(&half, 7, CountMethod::HashJoin).unwrap().count,
            permutation_count(2, 7)
        );
    }

    #[test]
    fn budget_guard() {
        let err = count_solutions(&Curve::moment(2).unwrap(), 200, CountMethod::BruteForce).unwrap_err();
        assert!(err.is_budget());
        assert!(count_solutions(&Curve::moment(2).unwrap(), 0, CountMethod::HashJoin).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn methods_agree(n in 2usize..5, big_n in 1u64..9) {
            let a = count(n, big_n, CountMethod::HashJoin);
            let c = count(n, big_n, CountMethod::PermutationFormula);
            prop_assert_eq!(a, c);
            if big_n.pow(2 * n as u32) <= 20_000_000 {
                prop_assert_eq!(count(n, big_n, CountMethod::BruteForce), c);
            }
            let diag = diagonal_count(n, big_n).to_u64().unwrap();
            prop_assert!(a >= diag);
            prop_assert_eq!(a == diag, big_n == 1);
            prop_assert!(a < count(n, big_n + 1, CountMethod::PermutationFormula));
        }
    }
}
