//! The three field families (the reals, the complex numbers and the p-adic
//! numbers `Q_p`): partitions of the unit ball into cells, absolute values,
//! additive characters and finite-precision p-adic representatives.
//!
//! Everything here is exact. Characters are computed as a rational phase in
//! `[0, 1)` and only converted to a complex double at the very end.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// A prime number, checked on construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// `p^k`, or `None` on `u64` overflow.
    pub fn pow(self, k: u32) -> Option<u64> {
        self.0.checked_pow(k)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Which local field we are working over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldSpec {
    Real,
    Complex,
    PAdic(Prime),
}

impl FieldSpec {
    pub fn padic(p: u64) -> Result<Self> {
        Prime::new(p).map(FieldSpec::PAdic)
    }

    pub fn is_archimedean(self) -> bool {
        !matches!(self, FieldSpec::PAdic(_))
    }

    pub fn prime(self) -> Option<Prime> {
        match self {
            FieldSpec::PAdic(p) => Some(p),
            _ => None,
        }
    }

    /// Real dimension of the field: 1 for the reals, 2 for the complex
    /// numbers. Non-Archimedean fields report 1.
    pub fn eta(self) -> u32 {
        match self {
            FieldSpec::Complex => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> String {
        match self {
            FieldSpec::Real => "R".into(),
            FieldSpec::Complex => "C".into(),
            FieldSpec::PAdic(p) => format!("Q_{p}"),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A scale `delta`. For `Q_p` it is `p^{-s}`; for the reals and complex
/// numbers it is `1/R` for a positive integer `R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scale {
    exponent: Option<u32>,
    cells_per_axis: u64,
}

impl Scale {
    /// `delta = p^{-s}`.
    pub fn padic(p: Prime, s: u32) -> Result<Self> {
        let cells = p
            .pow(s)
            .ok_or_else(|| Error::InvalidInput(format!("{p}^{s} overflows")))?;
        Ok(Scale {
            exponent: Some(s),
            cells_per_axis: cells,
        })
    }

    /// `delta = 1/r`.
    pub fn archimedean(r: u64) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidInput("scale 1/0".into()));
        }
        Ok(Scale {
            exponent: None,
            cells_per_axis: r,
        })
    }

    /// Exponent `s` of a p-adic scale.
    pub fn exponent(&self) -> Option<u32> {
        self.exponent
    }

    /// `1/delta`: `p^s` or `R`.
    pub fn cells_per_axis(&self) -> u64 {
        self.cells_per_axis
    }

    pub fn delta(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(self.cells_per_axis))
    }

    pub fn check(&self, field: FieldSpec) -> Result<()> {
        match (field, self.exponent) {
            (FieldSpec::PAdic(p), Some(s)) if p.pow(s) == Some(self.cells_per_axis) => Ok(()),
            (FieldSpec::PAdic(p), _) => Err(Error::ScaleMismatch(format!(
                "1/{} is not a power of 1/{p}",
                self.cells_per_axis
            ))),
            (_, None) => Ok(()),
            (f, Some(_)) => Err(Error::ScaleMismatch(format!("p-adic scale used over {f}"))),
        }
    }
}

/// Position of a cell inside its partition: an index along the line, or an
/// index pair `(j, k)` for the complex unit square.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellIndex {
    Line(u64),
    Square(u64, u64),
}

/// One ball (p-adic) or interval/square (Archimedean) of the partition at a
/// given scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub field: FieldSpec,
    pub scale: Scale,
    pub index: CellIndex,
}

impl Cell {
    pub fn new(field: FieldSpec, scale: Scale, index: CellIndex) -> Result<Self> {
        scale.check(field)?;
        let r = scale.cells_per_axis();
        let ok = match (field, index) {
            (FieldSpec::Complex, CellIndex::Square(j, k)) => j < r && k < r,
            (FieldSpec::Complex, CellIndex::Line(_)) => false,
            (_, CellIndex::Line(j)) => j < r,
            (_, CellIndex::Square(..)) => false,
        };
        if ok {
            Ok(Cell { field, scale, index })
        } else {
            Err(Error::InvalidInput(format!(
                "cell index {index:?} is not valid for {field} at scale 1/{r}"
            )))
        }
    }

    pub fn line(field: FieldSpec, scale: Scale, j: u64) -> Result<Self> {
        Self::new(field, scale, CellIndex::Line(j))
    }

    /// Index along the line (`None` for complex cells).
    pub fn line_index(&self) -> Option<u64> {
        match self.index {
            CellIndex::Line(j) => Some(j),
            CellIndex::Square(..) => None,
        }
    }

    /// Closed-open bounds `[lo, hi)` of a real interval cell.
    pub fn interval(&self) -> Option<(BigRational, BigRational)> {
        match (self.field, self.index) {
            (FieldSpec::Real, CellIndex::Line(j)) => {
                let d = self.scale.delta();
                Some((&d * BigInt::from(j), &d * BigInt::from(j + 1)))
            }
            _ => None,
        }
    }

    /// Whether the exact point `x` lies in the cell.
    pub fn contains(&self, x: &BigRational) -> bool {
        match (self.field, self.index) {
            (FieldSpec::Real, CellIndex::Line(_)) => {
                let (lo, hi) = self.interval().unwrap();
                &lo <= x && x < &hi
            }
            (FieldSpec::PAdic(p), CellIndex::Line(j)) => {
                let s = self.scale.exponent().unwrap_or(0);
                match padic_residue(p, x, s) {
                    Some(r) => r == j,
                    None => false,
                }
            }
            _ => false,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            CellIndex::Line(j) => write!(f, "{j}"),
            CellIndex::Square(j, k) => write!(f, "({j},{k})"),
        }
    }
}

/// An ordered `n`-tuple of cells sharing field and scale.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellTuple {
    cells: Vec<Cell>,
}

impl CellTuple {
    pub fn new(cells: Vec<Cell>) -> Result<Self> {
        if cells.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a cell tuple needs at least 2 entries, got {}",
                cells.len()
            )));
        }
        let (f, s) = (cells[0].field, cells[0].scale);
        if cells.iter().any(|c| c.field != f || c.scale != s) {
            return Err(Error::InvalidInput(
                "cells of a tuple must share field and scale".into(),
            ));
        }
        Ok(CellTuple { cells })
    }

    /// Build a tuple of line cells from their indices.
    pub fn from_indices(field: FieldSpec, scale: Scale, indices: &[u64]) -> Result<Self> {
        let cells = indices
            .iter()
            .map(|&j| Cell::line(field, scale, j))
            .collect::<Result<Vec<_>>>()?;
        Self::new(cells)
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn field(&self) -> FieldSpec {
        self.cells[0].field
    }

    pub fn scale(&self) -> Scale {
        self.cells[0].scale
    }

    /// Line indices; panics on complex cells.
    pub fn indices(&self) -> Vec<u64> {
        self.cells.iter().map(|c| c.line_index().expect("line cell")).collect()
    }

    /// Sorted copy of the cells, i.e. the tuple viewed as a multiset.
    pub fn multiset(&self) -> Vec<Cell> {
        let mut c = self.cells.clone();
        c.sort();
        c
    }
}

impl fmt::Display for CellTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.cells.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// The class `residue + p^precision Z_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PAdicApprox {
    pub prime: Prime,
    pub residue: u64,
    pub precision: u32,
}

impl PAdicApprox {
    pub fn new(prime: Prime, residue: u64, precision: u32) -> Result<Self> {
        let modulus = prime
            .pow(precision)
            .ok_or_else(|| Error::InvalidInput(format!("{prime}^{precision} overflows")))?;
        if precision == 0 || residue >= modulus {
            return Err(Error::InvalidInput(format!(
                "residue {residue} invalid at precision {precision}"
            )));
        }
        Ok(PAdicApprox {
            prime,
            residue,
            precision,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.prime.get().pow(self.precision)
    }
}

/// All cells of the partition of the unit ball at the given scale.
pub fn partition(field: FieldSpec, scale: Scale) -> Result<Vec<Cell>> {
    scale.check(field)?;
    let r = scale.cells_per_axis();
    let cells = match field {
        FieldSpec::Complex => (0..r)
            .flat_map(|j| (0..r).map(move |k| CellIndex::Square(j, k)))
            .map(|index| Cell { field, scale, index })
            .collect(),
        _ => (0..r)
            .map(|j| Cell {
                field,
                scale,
                index: CellIndex::Line(j),
            })
            .collect(),
    };
    Ok(cells)
}

/// `v_p(x)`, or `None` for zero.
pub fn valuation(p: Prime, x: &BigRational) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let pb = BigInt::from(p.get());
    let count = |mut n: BigInt| {
        let mut v = 0i64;
        loop {
            let (q, r) = n.div_rem(&pb);
            if !r.is_zero() {
                return v;
            }
            n = q;
            v += 1;
        }
    };
    Some(count(x.numer().clone()) - count(x.denom().clone()))
}

/// Exact absolute value: `p^{-v_p(x)}` over `Q_p`, the usual one otherwise.
pub fn abs_value(field: FieldSpec, x: &BigRational) -> BigRational {
    match field {
        FieldSpec::PAdic(p) => match valuation(p, x) {
            None => BigRational::zero(),
            Some(v) => {
                let pb = BigRational::from_integer(BigInt::from(p.get()));
                num_traits::pow::Pow::pow(&pb, -v as i32)
            }
        },
        _ => x.abs(),
    }
}

/// Sup-norm over coordinates.
pub fn abs_value_tuple(field: FieldSpec, xs: &[BigRational]) -> BigRational {
    xs.iter()
        .map(|x| abs_value(field, x))
        .max()
        .unwrap_or_else(BigRational::zero)
}

/// `|x + iy| = max(|x|, |y|)` on the complex numbers.
pub fn abs_value_complex(re: &BigRational, im: &BigRational) -> BigRational {
    re.abs().max(im.abs())
}

/// Residue of `x mod p^s` for a p-integral rational, `None` if `x` is not in
/// `Z_p`.
pub fn padic_residue(p: Prime, x: &BigRational, s: u32) -> Option<u64> {
    if valuation(p, x).is_some_and(|v| v < 0) {
        return None;
    }
    let m = BigInt::from(p.pow(s)?);
    // x = a/b with p not dividing b
    let inv = x.denom().modinv(&m)?;
    (x.numer() * inv).mod_floor(&m).to_u64()
}

fn is_power_of(p: Prime, n: &BigInt) -> bool {
    let pb = BigInt::from(p.get());
    let mut n = n.abs();
    while !n.is_one() {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return false;
        }
        n = q;
    }
    true
}

/// Fractional part `x - floor(x)` of a rational, in `[0, 1)`.
pub fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// The phase `theta` in `[0, 1)` with `e(x) = exp(2 pi i theta)`.
///
/// Over `Q_p` the character is `exp(2 pi i {x}_p)` where `{x}_p` is the
/// p-adic fractional part; for a rational `a/p^k` in lowest terms `{x}_p`
/// equals the ordinary fractional part. Over the reals (and the complex
/// numbers, for a real argument) `e(t) = exp(-2 pi i t)`.
pub fn character_phase(field: FieldSpec, x: &BigRational) -> Result<BigRational> {
    match field {
        FieldSpec::PAdic(p) => {
            if !is_power_of(p, x.denom()) {
                return Err(Error::DenominatorNotPrimePower(x.to_string(), p.get()));
            }
            Ok(frac(x))
        }
        _ => Ok(frac(&-x)),
    }
}

/// `exp(2 pi i theta)` for an exact phase.
pub fn unit_from_phase(theta: &BigRational) -> Complex64 {
    let t = frac(theta).to_f64().unwrap_or(0.0);
    let (s, c) = (std::f64::consts::TAU * t).sin_cos();
    Complex64::new(c, s)
}

/// The additive character `e(x)`.
pub fn character(field: FieldSpec, x: &BigRational) -> Result<Complex64> {
    character_phase(field, x).map(|t| unit_from_phase(&t))
}

/// Representatives modulo `p^m` of a p-adic cell.
pub fn cell_representatives(cell: &Cell, m: u32) -> Result<Vec<PAdicApprox>> {
    let p = cell
        .field
        .prime()
        .ok_or_else(|| Error::InvalidInput("representatives need a p-adic cell".into()))?;
    let s = cell.scale.exponent().unwrap_or(0);
    if m < s {
        return Err(Error::PrecisionMismatch(format!(
            "precision {m} is below the cell scale {s}"
        )));
    }
    let j = cell.line_index().expect("p-adic cells are line cells");
    let step = p.pow(s).unwrap();
    let count = p
        .pow(m - s)
        .ok_or_else(|| Error::InvalidInput(format!("{p}^{} overflows", m - s)))?;
    (0..count)
        .map(|k| PAdicApprox::new(p, j + k * step, m.max(1)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, ratio};
    use proptest::prelude::*;

    fn q(p: u64) -> FieldSpec {
        FieldSpec::padic(p).unwrap()
    }

    #[test]
    fn primes() {
        assert!(FieldSpec::padic(1).is_err());
        assert!(FieldSpec::padic(9).is_err());
        assert!(FieldSpec::padic(7).is_ok());
        assert_eq!(FieldSpec::Real.eta(), 1);
        assert_eq!(FieldSpec::Complex.eta(), 2);
    }

    #[test]
    fn partition_sizes() {
        let f5 = q(5);
        let p5 = f5.prime().unwrap();
        let cells = partition(f5, Scale::padic(p5, 1).unwrap()).unwrap();
        assert_eq!(
            cells.iter().map(|c| c.line_index().unwrap()).collect::<Vec<_>>(),
            vec![0, 1, 2, 3, 4]
        );

        let f3 = q(3);
        let cells = partition(f3, Scale::padic(f3.prime().unwrap(), 2).unwrap()).unwrap();
        let mut idx: Vec<u64> = cells.iter().map(|c| c.line_index().unwrap()).collect();
        idx.sort();
        assert_eq!(idx, (0..9).collect::<Vec<_>>());

        let cells = partition(FieldSpec::Real, Scale::archimedean(4).unwrap()).unwrap();
        let bounds: Vec<_> = cells.iter().map(|c| c.interval().unwrap()).collect();
        assert_eq!(
            bounds,
            vec![
                (rat(0), ratio(1, 4)),
                (ratio(1, 4), ratio(1, 2)),
                (ratio(1, 2), ratio(3, 4)),
                (ratio(3, 4), rat(1))
            ]
        );

        assert_eq!(
            partition(FieldSpec::Complex, Scale::archimedean(3).unwrap())
                .unwrap()
                .len(),
            9
        );
    }

    #[test]
    fn scale_mismatch() {
        let f5 = q(5);
        assert!(partition(f5, Scale::archimedean(4).unwrap()).is_err());
        let p3 = Prime::new(3).unwrap();
        assert!(partition(f5, Scale::padic(p3, 1).unwrap()).is_err());
        assert!(partition(FieldSpec::Real, Scale::padic(p3, 1).unwrap()).is_err());
    }

    #[test]
    fn characters() {
        let one = character(q(5), &rat(2)).unwrap();
        assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let w = character(q(3), &ratio(1, 3)).unwrap();
        let expected = Complex64::from_polar(1.0, std::f64::consts::TAU / 3.0);
        assert!((w - expected).norm() < 1e-15);
        assert!((w - Complex64::new(1.0, 0.0)).norm() > 0.5);

        let m = character(FieldSpec::Real, &ratio(1, 2)).unwrap();
        assert!((m - Complex64::new(-1.0, 0.0)).norm() < 1e-15);

        assert!(matches!(
            character(q(5), &ratio(1, 3)),
            Err(Error::DenominatorNotPrimePower(..))
        ));
    }

    #[test]
    fn absolute_values() {
        assert_eq!(abs_value(q(5), &rat(50)), ratio(1, 25));
        assert_eq!(abs_value_tuple(q(5), &[rat(1), ratio(1, 5)]), rat(5));
        assert_eq!(abs_value(FieldSpec::Real, &ratio(-3, 4)), ratio(3, 4));
        assert_eq!(abs_value(q(5), &rat(0)), rat(0));
        assert_eq!(abs_value_complex(&ratio(1, 2), &ratio(-3, 4)), ratio(3, 4));
    }

    #[test]
    fn representatives() {
        let f3 = q(3);
        let p3 = f3.prime().unwrap();
        let cell = Cell::line(f3, Scale::padic(p3, 1).unwrap(), 2).unwrap();
        let reps: Vec<u64> = cell_representatives(&cell, 2)
            .unwrap()
            .iter()
            .map(|r| r.residue)
            .collect();
        assert_eq!(reps, vec![2, 5, 8]);

        let f5 = q(5);
        let cell = Cell::line(f5, Scale::padic(f5.prime().unwrap(), 1).unwrap(), 0).unwrap();
        let reps: Vec<u64> = cell_representatives(&cell, 1)
            .unwrap()
            .iter()
            .map(|r| r.residue)
            .collect();
        assert_eq!(reps, vec![0]);

        let f2 = q(2);
        let cell = Cell::line(f2, Scale::padic(f2.prime().unwrap(), 1).unwrap(), 1).unwrap();
        let reps = cell_representatives(&cell, 3).unwrap();
        assert_eq!(reps.iter().map(|r| r.residue).collect::<Vec<_>>(), vec![1, 3, 5, 7]);
        assert!(reps.iter().all(|r| r.modulus() == 8));

        assert!(matches!(
            cell_representatives(&cell, 0),
            Err(Error::PrecisionMismatch(_))
        ));
    }

    #[test]
    fn partition_covers_disjointly() {
        for (p, s, m) in [(2u64, 1u32, 4u32), (3, 2, 3), (5, 1, 2), (7, 1, 2)] {
            let f = q(p);
            let pr = f.prime().unwrap();
            let cells = partition(f, Scale::padic(pr, s).unwrap()).unwrap();
            let mut seen = vec![0u32; pr.pow(m).unwrap() as usize];
            for c in &cells {
                for r in cell_representatives(c, m).unwrap() {
                    seen[r.residue as usize] += 1;
                    assert!(c.contains(&rat(r.residue as i64)));
                }
            }
            assert!(seen.iter().all(|&k| k == 1), "p={p} s={s}");
        }
    }

    fn padic_rational(p: u64) -> impl Strategy<Value = BigRational> {
        (-10_000i64..10_000, 0u32..4).prop_map(move |(a, k)| ratio(a, (p as i64).pow(k)))
    }

    proptest! {
        #[test]
        fn character_is_a_homomorphism(x in padic_rational(5), y in padic_rational(5)) {
            let f = q(5);
            let lhs = character(f, &(&x + &y)).unwrap();
            let rhs = character(f, &x).unwrap() * character(f, &y).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12);
            prop_assert!((lhs.norm() - 1.0).abs() < 1e-12);
            // exact phase additivity
            let px = character_phase(f, &x).unwrap();
            let py = character_phase(f, &y).unwrap();
            prop_assert_eq!(character_phase(f, &(&x + &y)).unwrap(), frac(&(px + py)));
        }

        #[test]
        fn real_character_is_a_homomorphism(a in -1000i64..1000, b in 1i64..97, c in -1000i64..1000, d in 1i64..97) {
            let (x, y) = (ratio(a, b), ratio(c, d));
            let lhs = character(FieldSpec::Real, &(&x + &y)).unwrap();
            let rhs = character(FieldSpec::Real, &x).unwrap() * character(FieldSpec::Real, &y).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn character_trivial_exactly_on_integers(x in padic_rational(3)) {
            let f = q(3);
            let trivial = character_phase(f, &x).unwrap().is_zero();
            let integral = abs_value(f, &x) <= rat(1);
            prop_assert_eq!(trivial, integral);
        }

        #[test]
        fn padic_abs_is_multiplicative_and_ultrametric(x in padic_rational(5), y in padic_rational(5)) {
            let f = q(5);
            prop_assert_eq!(abs_value(f, &(&x * &y)), abs_value(f, &x) * abs_value(f, &y));
            let sum = abs_value(f, &(&x + &y));
            prop_assert!(sum <= abs_value(f, &x).max(abs_value(f, &y)));
        }

        #[test]
        fn real_abs_is_multiplicative(a in -1000i64..1000, b in 1i64..50, c in -1000i64..1000, d in 1i64..50) {
            let (x, y) = (ratio(a, b), ratio(c, d));
            prop_assert_eq!(abs_value(FieldSpec::Real, &(&x * &y)), abs_value(FieldSpec::Real, &x) * abs_value(FieldSpec::Real, &y));
        }
    }
}
