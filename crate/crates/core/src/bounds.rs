//! Explicit constants: the field constants `C_{K,n}`, the three `H` bounds,
//! combinatorial refinements of `n^n`, Lipschitz norms and Wronskians.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::local_field::FieldSpec;
use crate::poly::{rat, ratio, Polynomial};

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::InvalidInput(format!("dimension must be at least 2, got {n}")))
    } else {
        Ok(())
    }
}

/// `C_{K,n}`: 1 for non-Archimedean fields; `7^n` (n <= 6) or `5^n` (n >= 7)
/// over the reals; the squares of those over the complex numbers.
pub fn field_constant(field: FieldSpec, n: usize) -> Result<BigUint> {
    check_dim(n)?;
    let base: u32 = if n <= 6 { 7 } else { 5 };
    let exp = (n as u32) * field.eta();
    Ok(match field {
        FieldSpec::PAdic(_) => BigUint::one(),
        _ => BigUint::from(base).pow(exp),
    })
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

fn falling(n: usize, m: usize) -> BigUint {
    (0..m).fold(BigUint::one(), |acc, i| acc * (n - i) as u64)
}

/// `x^(1/k)` for a big integer, via logarithms so huge values stay finite.
pub fn root_f64(x: &BigUint, k: f64) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        x.to_f64().unwrap().powf(1.0 / k)
    } else {
        let shift = bits - 64;
        let top = (x >> shift).to_f64().unwrap();
        ((top.ln() + shift as f64 * std::f64::consts::LN_2) / k).exp()
    }
}

/// `C_{K,n}^{1/2n} n^{1/2}`.
pub fn theorem1_constant(field: FieldSpec, n: usize) -> Result<f64> {
    let c = field_constant(field, n)?;
    Ok(root_f64(&c, 2.0 * n as f64) * (n as f64).sqrt())
}

/// `(n!)^{1/2n}`, the asymptotic size of the sharp constant.
pub fn factorial_root(n: usize) -> f64 {
    root_f64(&factorial(n), 2.0 * n as f64)
}

/// `5^{eta n} n!`, the Archimedean combinatorial bound on `H^{2n}` quoted
/// alongside the Bezout argument.
pub fn archimedean_combinatorial_bound(field: FieldSpec, n: usize) -> Result<BigUint> {
    check_dim(n)?;
    if !field.is_archimedean() {
        return Err(Error::InvalidInput("only defined over R and C".into()));
    }
    Ok(BigUint::from(5u32).pow(field.eta() * n as u32) * factorial(n))
}

/// `max_{m=1..n} n(n-1)...(n-m+1) m^{n-m}`.
pub fn max_formula_bound(n: usize) -> BigUint {
    (1..=n)
        .map(|m| falling(n, m) * BigUint::from(m).pow((n - m) as u32))
        .max()
        .unwrap_or_else(BigUint::zero)
}

/// Stirling numbers of the second kind `S(n, m)` for `m = 0..=n`.
pub fn stirling2_row(n: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for i in 1..=n {
        let mut next = vec![BigUint::zero(); i + 1];
        for m in 1..=i {
            let keep = if m < row.len() { &row[m] * m } else { BigUint::zero() };
            next[m] = keep + &row[m - 1];
        }
        row = next;
    }
    row
}

/// `sum_m S(n, m) n(n-1)...(n-m+1)`: maps of the `n` coordinates into the
/// `n` cells of the base tuple, grouped by the size of their image. This
/// is an interpretation of the Stirling-number refinement, and by the
/// falling-factorial identity it always equals `n^n`.
pub fn stirling_variant(n: usize) -> BigUint {
    stirling2_row(n)
        .iter()
        .enumerate()
        .map(|(m, s)| s * falling(n, m))
        .sum()
}

/// Combinatorial refinement of `n^n`: exactly `n!` for `n = 2, 3`, where the
/// case analysis is small, and the max formula [`max_formula_bound`] above
/// that.
pub fn refined_diagonal_bound(n: usize) -> Result<BigUint> {
    check_dim(n)?;
    Ok(if n <= 3 { factorial(n) } else { max_formula_bound(n) })
}

/// `det(gamma'(t), gamma''(t), ..., gamma^{(n)}(t))` as an exact polynomial.
pub fn wronskian(curve: &Curve) -> Polynomial {
    let n = curve.dim();
    // rows: derivative order 1..=n, columns: coordinates
    let rows: Vec<Vec<Polynomial>> = (1..=n).map(|k| curve.derivative(k)).collect();
    let mut memo: HashMap<u32, Polynomial> = HashMap::new();
    minor(&rows, 0, 0, &mut memo)
}

// Laplace expansion along row `r`, with `used` the set of columns taken by
// the rows above.
fn minor(rows: &[Vec<Polynomial>], r: usize, used: u32, memo: &mut HashMap<u32, Polynomial>) -> Polynomial {
    let n = rows.len();
    if r == n {
        return Polynomial::constant(BigRational::one());
    }
    if let Some(p) = memo.get(&used) {
        return p.clone();
    }
    let mut acc = Polynomial::zero();
    let mut sign_pos = true;
    for c in 0..n {
        if used & (1 << c) != 0 {
            continue;
        }
        let entry = &rows[r][c];
        if !entry.is_zero() {
            let sub = minor(rows, r + 1, used | (1 << c), memo);
            let term = entry * &sub;
            acc = if sign_pos { &acc + &term } else { &acc - &term };
        }
        sign_pos = !sign_pos;
    }
    memo.insert(used, acc.clone());
    acc
}

/// The Wronskian has no root on `[0, 1]`, decided by Sturm's theorem.
pub fn nondegenerate(curve: &Curve) -> bool {
    let w = wronskian(curve);
    !w.has_root_in(&rat(0), &rat(1))
}

/// Nondegeneracy on the complex unit square: `Some(false)` when the
/// Wronskian vanishes somewhere on it, `Some(true)` when its constant term
/// dominates the rest on `|z| <= sqrt 2`, `None` when neither test decides.
pub fn nondegenerate_complex(curve: &Curve) -> Option<bool> {
    let w = wronskian(curve);
    if w.has_root_in(&rat(0), &rat(1)) {
        return Some(false);
    }
    // sqrt 2 < 3/2
    let r = ratio(3, 2);
    let tail = &w - &Polynomial::constant(w.coeff(0));
    if w.coeff(0).abs() > tail.abs_bound(&r) {
        Some(true)
    } else {
        None
    }
}

/// Lipschitz norm of a real curve on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LipschitzNorm {
    /// The exact value when `exact`, otherwise an upper bound within `1e-9`.
    pub value: BigRational,
    pub exact: bool,
}

impl LipschitzNorm {
    pub fn ceil(&self) -> BigInt {
        self.value.ceil().to_integer()
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }
}

/// `max_i sup_{[0,1]} |gamma_i'|`, found from the endpoints and the critical
/// points of each `gamma_i'`. Rational critical points are evaluated exactly;
/// irrational ones are isolated with Sturm sequences and bounded.
pub fn lipschitz_norm(curve: &Curve) -> LipschitzNorm {
    let mut best: Option<(BigRational, bool)> = None;
    let mut push = |v: BigRational, exact: bool| {
        best = match best.take() {
            None => Some((v, exact)),
            Some((b, _)) if v > b => Some((v, exact)),
            Some((b, e)) if v == b => Some((b, e || exact)),
            other => other,
        };
    };
    let (zero, one) = (rat(0), rat(1));
    let tol = ratio(1, 10_000_000_000);
    for coord in curve.coords() {
        let g = coord.derivative();
        push(g.eval(&zero).abs(), true);
        push(g.eval(&one).abs(), true);
        let h = g.derivative();
        if h.is_zero() {
            continue;
        }
        let mut rest = h.squarefree();
        if let Some(roots) = h.rational_roots_in(&zero, &one) {
            for r in roots {
                push(g.eval(&r).abs(), true);
                rest = rest.div_rem(&Polynomial::new(vec![-r, rat(1)])).0;
            }
        }
        if rest.degree().unwrap_or(0) == 0 {
            continue;
        }
        let hp = h.clone();
        for (lo, hi) in rest.isolate_roots(&zero, &one, &ratio(1, 1 << 20)) {
            let (mut lo, mut hi) = (lo, hi);
            loop {
                let bound = hp.abs_bound(&hi.abs().max(lo.abs())) * (&hi - &lo);
                if bound <= tol {
                    let upper = g.eval(&lo).abs().max(g.eval(&hi).abs()) + bound;
                    push(upper, false);
                    break;
                }
                let mid = (&lo + &hi) / rat(2);
                if rest.count_roots(&lo, &mid) == 1 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
        }
    }
    let (value, exact) = best.unwrap_or((rat(0), true));
    LipschitzNorm { value, exact }
}

/// Upper bound for the Lipschitz norm over the complex unit square with the
/// max-metric: `|z| <= sqrt 2 < 3/2` there, so
/// `l <= 3/2 * max_i sum_k k |c_k| (3/2)^{k-1}`.
pub fn lipschitz_norm_complex(curve: &Curve) -> BigRational {
    let r = ratio(3, 2);
    curve
        .coords()
        .iter()
        .map(|c| c.derivative().abs_bound(&r) * &r)
        .max()
        .unwrap_or_else(|| rat(0))
}

fn lipschitz_ceil(curve: &Curve, field: FieldSpec) -> Result<u64> {
    let v = match field {
        FieldSpec::Real => lipschitz_norm(curve).value,
        FieldSpec::Complex => lipschitz_norm_complex(curve),
        FieldSpec::PAdic(_) => {
            return Err(Error::InvalidInput(
                "Lipschitz constants are defined over R and C".into(),
            ))
        }
    };
    v.ceil()
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::InvalidInput("Lipschitz norm out of range".into()))
}

/// The Bezout-type bounds for a non-degenerate polynomial curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BezoutBound {
    /// `(2 ceil(l) + 1)^{eta/2} (prod deg)^{1/2n}`
    pub h_bound: f64,
    /// `(2 ceil(l) + 1)^{n eta} prod deg`
    #[serde(serialize_with = "ser_biguint")]
    pub syzygy_bound: BigUint,
    pub lipschitz_ceil: u64,
    pub degree_product: u64,
}

pub fn bezout_constant(curve: &Curve, field: FieldSpec) -> Result<BezoutBound> {
    let nondeg = match field {
        FieldSpec::Real => nondegenerate(curve),
        FieldSpec::Complex => nondegenerate_complex(curve)
            .ok_or_else(|| Error::InvalidInput("could not certify nondegeneracy on the complex square".into()))?,
        FieldSpec::PAdic(_) => return Err(Error::InvalidInput("Bezout bounds are stated over R and C".into())),
    };
    if !nondeg {
        return Err(Error::DegenerateCurve);
    }
    let n = curve.dim();
    let l = lipschitz_ceil(curve, field)?;
    let degree_product: u64 = curve.degrees().iter().map(|&d| d as u64).product();
    let base = 2 * l + 1;
    let eta = field.eta();
    let h_bound = (base as f64).powf(eta as f64 / 2.0) * (degree_product as f64).powf(1.0 / (2.0 * n as f64));
    let syzygy_bound = BigUint::from(base).pow(n as u32 * eta) * degree_product;
    Ok(BezoutBound {
        h_bound,
        syzygy_bound,
        lipschitz_ceil: l,
        degree_product,
    })
}

/// The fewnomial bounds over the reals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FewnomialBound {
    /// `(2 ceil(l) + 1)^{1/2} (2^{M(M-1)/2} (n+1)^M)^{1/2n}`
    pub h_bound: f64,
    /// `(2 ceil(l) + 1)^n 2^{M(M-1)/2} (n+1)^M`
    #[serde(serialize_with = "ser_biguint")]
    pub syzygy_bound: BigUint,
    pub monomials: usize,
}

pub fn fewnomial_constant(curve: &Curve) -> Result<FewnomialBound> {
    let n = curve.dim();
    let m = curve.monomial_count();
    let l = lipschitz_ceil(curve, FieldSpec::Real)?;
    let khovanskii =
        BigUint::from(2u32).pow((m * m.saturating_sub(1) / 2) as u32) * BigUint::from(n as u64 + 1).pow(m as u32);
    let h_bound = ((2 * l + 1) as f64).sqrt() * root_f64(&khovanskii, 2.0 * n as f64);
    let syzygy_bound = BigUint::from(2 * l + 1).pow(n as u32) * &khovanskii;
    Ok(FewnomialBound {
        h_bound,
        syzygy_bound,
        monomials: m,
    })
}

pub(crate) fn ser_biguint<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// One tabulated constant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub parameters: BTreeMap<String, String>,
    /// Exact decimal value when the constant is an integer.
    pub exact: Option<String>,
    pub value: f64,
    pub formula: String,
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// Rows of the requested table for `n = 2..=n_max`. Tables:
/// `theorem1`, `syzygy`, `bezout`, `fewnomial`, `refined`, `lipschitz`,
/// `wronskian`.
pub fn table(name: &str, field: FieldSpec, n_max: usize) -> Result<Vec<BoundReport>> {
    let mut rows = Vec::new();
    for n in 2..=n_max {
        let base = vec![("field", field.name()), ("n", n.to_string())];
        let row = match name {
            "theorem1" => BoundReport {
                name: "theorem1_constant".into(),
                parameters: params(&base),
                exact: None,
                value: theorem1_constant(field, n)?,
                formula: format!(
                    "C_{{{field},{n}}}^(1/{}) * sqrt({n}), C = {}",
                    2 * n,
                    field_constant(field, n)?
                ),
            },
            "syzygy" => {
                let b = field_constant(field, n)? * BigUint::from(n).pow(n as u32);
                BoundReport {
                    name: "syzygy_bound".into(),
                    parameters: params(&base),
                    value: b.to_f64().unwrap_or(f64::INFINITY),
                    exact: Some(b.to_string()),
                    formula: format!("C_{{{field},{n}}} * {n}^{n}"),
                }
            }
            "bezout" => {
                let b = bezout_constant(&Curve::moment(n)?, field)?;
                BoundReport {
                    name: "bezout_constant".into(),
                    parameters: params(&[
                        ("field", field.name()),
                        ("n", n.to_string()),
                        ("curve", "moment".into()),
                    ]),
                    value: b.h_bound,
                    exact: Some(b.syzygy_bound.to_string()),
                    formula: format!(
                        "(2*{}+1)^({}/2) * {}^(1/{})",
                        b.lipschitz_ceil,
                        field.eta(),
                        b.degree_product,
                        2 * n
                    ),
                }
            }
            "fewnomial" => {
                let b = fewnomial_constant(&Curve::moment(n)?)?;
                BoundReport {
                    name: "fewnomial_constant".into(),
                    parameters: params(&[
                        ("n", n.to_string()),
                        ("curve", "moment".into()),
                        ("M", b.monomials.to_string()),
                    ]),
                    value: b.h_bound,
                    exact: Some(b.syzygy_bound.to_string()),
                    formula: "(2 ceil(l)+1)^(1/2) * (2^(M(M-1)/2) (n+1)^M)^(1/2n)".into(),
                }
            }
            "refined" => {
                let r = refined_diagonal_bound(n)?;
                BoundReport {
                    name: "refined_diagonal_bound".into(),
                    parameters: params(&[("n", n.to_string())]),
                    value: r.to_f64().unwrap_or(f64::INFINITY),
                    exact: Some(r.to_string()),
                    formula: format!(
                        "n! for n<=3, else max_m n!/(n-m)! m^(n-m); max formula = {}, stirling = {}",
                        max_formula_bound(n),
                        stirling_variant(n)
                    ),
                }
            }
            "lipschitz" => {
                let l = lipschitz_norm(&Curve::moment(n)?);
                BoundReport {
                    name: "lipschitz_norm".into(),
                    parameters: params(&[("n", n.to_string()), ("curve", "moment".into())]),
                    value: l.to_f64(),
                    exact: l.exact.then(|| l.value.to_string()),
                    formula: "max_i sup_[0,1] |gamma_i'|".into(),
                }
            }
            "wronskian" => {
                let w = wronskian(&Curve::moment(n)?);
                BoundReport {
                    name: "wronskian".into(),
                    parameters: params(&[("n", n.to_string()), ("curve", "moment".into())]),
                    value: w.eval_f64(0.0),
                    exact: Some(w.to_string()),
                    formula: "det(gamma', ..., gamma^(n))".into(),
                }
            }
            other => return Err(Error::InvalidInput(format!("unknown table {other}"))),
        };
        rows.push(row);
    }
    Ok(rows)
}
