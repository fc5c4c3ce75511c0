//! Extension operators `E_I f(x) = int_I f(xi) e(gamma(xi) . x) d xi` for the
//! moment curve, the square function `S_delta f`, and the weighted `L^{2n}`
//! norms whose ratio is the quantity `H_gamma`.
//!
//! Over `Q_p` a test function is locally constant at precision `m` and every
//! integral is a finite sum. Over the reals a test function is a finite
//! atomic measure: point masses `f(a)/M` at `a/M`, or unit masses for the
//! comb. The real weighted norms use the periodicity of `|E f|^{2n}` and the
//! band limit of the weight, which makes the midpoint rule exact.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::local_field::{padic_residue, valuation, Cell, FieldSpec, Prime, Scale};
use crate::summation::pairwise_sum;

/// Upper limit on the number of complex multiply-adds in one norm
/// computation.
pub const QUADRATURE_BUDGET: u64 = 4_000_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum FunctionKind {
    /// `values[a]` on the class of `a` modulo `p^m` (p-adic, `resolution =
    /// p^m`), or the mass `values[a] / M` at `a / M` (real, `resolution = M`).
    LocallyConstant { resolution: u64, values: Vec<Complex64> },
    /// Unit masses at `(i - 1)/N`, `i = 1..N`, one in each cell of width
    /// `1/N`.
    AtomicComb { atoms: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    pub field: FieldSpec,
    pub kind: FunctionKind,
}

fn check_finite(values: &[Complex64]) -> Result<()> {
    if values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput("function values must be finite".into()))
    }
}

fn random_values(len: u64, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
        .collect()
}

impl TestFunction {
    pub fn padic(p: Prime, precision: u32, values: Vec<Complex64>) -> Result<Self> {
        let resolution = p
            .pow(precision)
            .ok_or_else(|| Error::InvalidInput(format!("{p}^{precision} overflows")))?;
        if values.len() as u64 != resolution {
            return Err(Error::LengthMismatch {
                expected: resolution as usize,
                got: values.len(),
            });
        }
        check_finite(&values)?;
        Ok(TestFunction {
            field: FieldSpec::PAdic(p),
            kind: FunctionKind::LocallyConstant { resolution, values },
        })
    }

    pub fn real(resolution: u64, values: Vec<Complex64>) -> Result<Self> {
        if resolution == 0 || values.len() as u64 != resolution {
            return Err(Error::LengthMismatch {
                expected: resolution as usize,
                got: values.len(),
            });
        }
        check_finite(&values)?;
        Ok(TestFunction {
            field: FieldSpec::Real,
            kind: FunctionKind::LocallyConstant { resolution, values },
        })
    }

    pub fn comb(atoms: u64) -> Result<Self> {
        if atoms == 0 {
            return Err(Error::InvalidInput("a comb needs at least one atom".into()));
        }
        Ok(TestFunction {
            field: FieldSpec::Real,
            kind: FunctionKind::AtomicComb { atoms },
        })
    }

    /// `1_O` at the coarsest resolution.
    pub fn one(field: FieldSpec) -> Result<Self> {
        match field {
            FieldSpec::PAdic(p) => Self::padic(p, 0, vec![Complex64::new(1.0, 0.0)]),
            FieldSpec::Real => Self::real(1, vec![Complex64::new(1.0, 0.0)]),
            FieldSpec::Complex => Err(unsupported_complex()),
        }
    }

    /// Values uniform in `[-1, 1] + i[-1, 1]`, reproducible from `seed`.
    pub fn random_padic(p: Prime, precision: u32, seed: u64) -> Result<Self> {
        let len = p
            .pow(precision)
            .ok_or_else(|| Error::InvalidInput(format!("{p}^{precision} overflows")))?;
        Self::padic(p, precision, random_values(len, seed))
    }

    pub fn random_real(resolution: u64, seed: u64) -> Result<Self> {
        Self::real(resolution, random_values(resolution, seed))
    }

    pub fn resolution(&self) -> u64 {
        match &self.kind {
            FunctionKind::LocallyConstant { resolution, .. } => *resolution,
            FunctionKind::AtomicComb { atoms } => *atoms,
        }
    }

    /// Precision `m` of a p-adic function (`resolution = p^m`).
    pub fn precision(&self) -> Option<u32> {
        let p = self.field.prime()?.get();
        let mut r = self.resolution();
        let mut m = 0;
        while r > 1 {
            r /= p;
            m += 1;
        }
        Some(m)
    }

    /// Value on the class `a` (p-adic) or mass at `a / M` (real).
    pub fn mass(&self, a: u64) -> Complex64 {
        match &self.kind {
            FunctionKind::LocallyConstant { resolution, values } => match self.field {
                FieldSpec::Real => values[a as usize] / *resolution as f64,
                _ => values[(a % resolution) as usize],
            },
            FunctionKind::AtomicComb { .. } => Complex64::new(1.0, 0.0),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            FunctionKind::LocallyConstant { values, .. } => values.iter().all(|v| v.is_zero()),
            FunctionKind::AtomicComb { .. } => false,
        }
    }

    /// `int |f|`.
    pub fn l1_norm(&self) -> f64 {
        match &self.kind {
            FunctionKind::LocallyConstant { resolution, values } => {
                pairwise_sum(&values.iter().map(|v| v.norm()).collect::<Vec<_>>()) / *resolution as f64
            }
            FunctionKind::AtomicComb { atoms } => *atoms as f64,
        }
    }

    /// `f` restricted to a cell, as a locally constant function.
    pub fn restrict(&self, cell: &Cell) -> Result<Self> {
        if cell.field != self.field {
            return Err(Error::ScaleMismatch(format!(
                "{} cell for a {} function",
                cell.field, self.field
            )));
        }
        let r = cell.scale.cells_per_axis();
        let j = cell.line_index().ok_or_else(unsupported_complex)?;
        match self.field {
            FieldSpec::PAdic(p) => {
                let lifted = self.lift_padic(p, cell.scale.exponent().unwrap())?;
                let m = lifted.precision().unwrap();
                let FunctionKind::LocallyConstant { resolution, values } = lifted.kind else {
                    unreachable!()
                };
                let values = (0..resolution)
                    .map(|a| {
                        if a % r == j {
                            values[a as usize]
                        } else {
                            Complex64::zero()
                        }
                    })
                    .collect();
                Self::padic(p, m, values)
            }
            _ => {
                let m = self.resolution();
                let values = (0..m)
                    .map(|a| {
                        if a * r / m == j {
                            self.mass(a) * m as f64
                        } else {
                            Complex64::zero()
                        }
                    })
                    .collect();
                Self::real(m, values)
            }
        }
    }

    /// The same p-adic function written at precision `max(m, precision)`.
    pub fn lift_padic(&self, p: Prime, precision: u32) -> Result<Self> {
        let m = self
            .precision()
            .ok_or_else(|| Error::InvalidInput("not a p-adic function".into()))?;
        let target = m.max(precision);
        let len = p
            .pow(target)
            .ok_or_else(|| Error::InvalidInput(format!("{p}^{target} overflows")))?;
        Self::padic(p, target, (0..len).map(|a| self.mass(a)).collect())
    }

    /// Pointwise sum of two functions at a common resolution.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::ScaleMismatch("functions over different fields".into()));
        }
        match self.field {
            FieldSpec::PAdic(p) => {
                let m = self.precision().unwrap().max(other.precision().unwrap());
                let len = p.pow(m).unwrap();
                Self::padic(p, m, (0..len).map(|a| self.mass(a) + other.mass(a)).collect())
            }
            _ => {
                let m = self.resolution();
                if other.resolution() != m {
                    return Err(Error::PrecisionMismatch(format!(
                        "resolutions {m} and {}",
                        other.resolution()
                    )));
                }
                Self::real(m, (0..m).map(|a| (self.mass(a) + other.mass(a)) * m as f64).collect())
            }
        }
    }
}

fn unsupported_complex() -> Error {
    Error::InvalidInput("numerics over C are not supported".into())
}

fn omega_table(len: u64, sign: f64) -> Vec<Complex64> {
    (0..len)
        .map(|k| {
            let (s, c) = (sign * TAU * k as f64 / len as f64).sin_cos();
            Complex64::new(c, s)
        })
        .collect()
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(a: u64, k: u32, m: u64) -> u64 {
    (0..k).fold(1 % m, |acc, _| mul_mod(acc, a, m))
}

/// Smallest `e >= 0` with `|x_k|_p <= p^e` for all `k`, checking that the
/// denominators are powers of `p`.
fn padic_size(p: Prime, xs: &[BigRational]) -> Result<u32> {
    let mut e = 0i64;
    for x in xs {
        let mut d = x.denom().clone();
        let pb = BigInt::from(p.get());
        while (&d % &pb).is_zero() {
            d /= &pb;
        }
        if d != BigInt::from(1) {
            return Err(Error::DenominatorNotPrimePower(x.to_string(), p.get()));
        }
        if let Some(v) = valuation(p, x) {
            e = e.max(-v);
        }
    }
    u32::try_from(e).map_err(|_| Error::InvalidInput("point too large".into()))
}

/// Residues of `x_k p^e` modulo `p^e`.
fn scaled_residues(p: Prime, xs: &[BigRational], e: u32) -> Vec<u64> {
    let q = BigRational::from_integer(BigInt::from(p.pow(e).unwrap()));
    xs.iter()
        .map(|x| padic_residue(p, &(x * &q), e).expect("p-integral after scaling"))
        .collect()
}

/// `E_J f(x)` for every cell `J` of the partition with `cells` cells.
fn cell_values(f: &TestFunction, cells: u64, scale_exp: Option<u32>, x: &[BigRational]) -> Result<Vec<Complex64>> {
    let n = x.len();
    if n < 2 {
        return Err(Error::InvalidInput("points need at least 2 coordinates".into()));
    }
    match f.field {
        FieldSpec::PAdic(p) => {
            let m = f.precision().unwrap();
            let e = padic_size(p, x)?.max(m).max(scale_exp.unwrap_or(0));
            let big_q = p
                .pow(e)
                .filter(|&q| q <= 1 << 26)
                .ok_or_else(|| Error::budget("p-adic extension sum", format!("{p}^{e}"), 1 << 26))?;
            let res = scaled_residues(p, x, e);
            let mut out = vec![Complex64::zero(); cells as usize];
            for a in 0..big_q {
                let phase = (1..=n as u32).fold(0u64, |acc, k| {
                    (acc + mul_mod(pow_mod(a, k, big_q), res[k as usize - 1], big_q)) % big_q
                });
                let (s, c) = (TAU * phase as f64 / big_q as f64).sin_cos();
                out[(a % cells) as usize] += f.mass(a) * Complex64::new(c, s);
            }
            let scale = 1.0 / big_q as f64;
            Ok(out.into_iter().map(|v| v * scale).collect())
        }
        FieldSpec::Real => {
            let m = f.resolution();
            let mut out = vec![Complex64::zero(); cells as usize];
            let mb = BigInt::from(m);
            for a in 0..m {
                let xi = BigRational::new(BigInt::from(a), mb.clone());
                let mut pow = xi.clone();
                let mut t = BigRational::zero();
                for xk in x {
                    t += &pow * xk;
                    pow *= &xi;
                }
                let theta = (&t.floor() - &t).to_f64().unwrap();
                let (s, c) = (TAU * theta).sin_cos();
                out[(a * cells / m) as usize] += f.mass(a) * Complex64::new(c, s);
            }
            Ok(out)
        }
        FieldSpec::Complex => Err(unsupported_complex()),
    }
}

fn scale_for(f: &TestFunction, scale: &Scale) -> Result<(u64, Option<u32>)> {
    scale.check(f.field)?;
    Ok((scale.cells_per_axis(), scale.exponent()))
}

/// `E_I f(x)` for a cell `I`, or for the whole unit ball when `cell` is
/// `None`. Exact rational phases; the sum itself is in complex doubles.
pub fn extension_op(f: &TestFunction, cell: Option<&Cell>, x: &[BigRational]) -> Result<Complex64> {
    match cell {
        None => Ok(cell_values(f, 1, None, x)?[0]),
        Some(c) => {
            if c.field != f.field {
                return Err(Error::ScaleMismatch(format!(
                    "{} cell for a {} function",
                    c.field, f.field
                )));
            }
            let (cells, exp) = scale_for(f, &c.scale)?;
            let j = c.line_index().ok_or_else(unsupported_complex)?;
            Ok(cell_values(f, cells, exp, x)?[j as usize])
        }
    }
}

/// `S_delta f(x) = (sum_J |E_J f(x)|^2)^{1/2}`.
pub fn square_function(f: &TestFunction, scale: &Scale, x: &[BigRational]) -> Result<f64> {
    let (cells, exp) = scale_for(f, scale)?;
    let v = cell_values(f, cells, exp, x)?;
    Ok(pairwise_sum(&v.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>()).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightProfile {
    /// `1_{|z| <= 1}`.
    IndicatorBall,
    /// `prod_k w(z_k)` with `w(u) = (pi/2)^2 sinc^2(u - 1/2)`, which is at
    /// least 1 on `[0, 1]` and has Fourier transform supported in `[-1, 1]`.
    ShiftedFejer,
}

/// `W_{c,R}(x) = W((x - c)/R)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSpec {
    pub field: FieldSpec,
    pub center: Vec<BigRational>,
    /// The dilation `R = delta^{-n}`.
    pub radius: BigRational,
    pub profile: WeightProfile,
}

/// The one-dimensional profile `(pi/2)^2 sinc^2(u - 1/2)`.
pub fn fejer(u: f64) -> f64 {
    let v = std::f64::consts::PI * (u - 0.5);
    let sinc = if v.abs() < 1e-12 { 1.0 } else { v.sin() / v };
    FRAC_PI_2 * FRAC_PI_2 * sinc * sinc
}

impl WeightSpec {
    pub fn for_scale(field: FieldSpec, scale: &Scale, center: Vec<BigRational>) -> Result<Self> {
        scale.check(field)?;
        let n = center.len();
        let radius = BigRational::from_integer(num_traits::pow(BigInt::from(scale.cells_per_axis()), n));
        let profile = match field {
            FieldSpec::PAdic(_) => WeightProfile::IndicatorBall,
            FieldSpec::Real => WeightProfile::ShiftedFejer,
            FieldSpec::Complex => return Err(unsupported_complex()),
        };
        Ok(WeightSpec {
            field,
            center,
            radius,
            profile,
        })
    }

    /// `W_{c,R}(x)`, exact for the indicator.
    pub fn eval(&self, x: &[BigRational]) -> Result<f64> {
        if x.len() != self.center.len() {
            return Err(Error::LengthMismatch {
                expected: self.center.len(),
                got: x.len(),
            });
        }
        let diffs: Vec<BigRational> = x.iter().zip(&self.center).map(|(a, c)| a - c).collect();
        Ok(match self.profile {
            WeightProfile::IndicatorBall => {
                let inside = diffs
                    .iter()
                    .all(|d| crate::local_field::abs_value(self.field, d) <= self.radius);
                if inside {
                    1.0
                } else {
                    0.0
                }
            }
            WeightProfile::ShiftedFejer => diffs
                .iter()
                .map(|d| fejer((d / &self.radius).to_f64().unwrap()))
                .product(),
        })
    }

    /// Minimum of `W` over a `k^n` sample grid of the box `c + [0, R]^n`
    /// (real), or over the box `c + p^{-ns} Z_p^n` itself (p-adic, where it
    /// is identically 1).
    pub fn box_minimum(&self, k: u64) -> Result<f64> {
        let n = self.center.len();
        let mut min = f64::INFINITY;
        let mut digits = vec![0u64; n];
        loop {
            let x: Vec<BigRational> = digits
                .iter()
                .zip(&self.center)
                .map(|(&d, c)| match self.profile {
                    WeightProfile::ShiftedFejer => {
                        c + &self.radius * BigRational::new(BigInt::from(d), BigInt::from(k - 1))
                    }
                    WeightProfile::IndicatorBall => {
                        c + &self.radius * BigRational::new(BigInt::from(d), BigInt::from(k))
                    }
                })
                .collect();
            min = min.min(self.eval(&x)?);
            let mut i = 0;
            loop {
                if i == n {
                    return Ok(min);
                }
                digits[i] += 1;
                if digits[i] < k {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadratureSpec {
    /// Midpoint rule with `steps_per_unit` points per unit length over one
    /// period of the integrand.
    RealMidpoint { steps_per_unit: u32 },
    /// Exact sum over the classes modulo `Z_p^n` of the weight's support.
    PAdicExact,
}

impl QuadratureSpec {
    /// The default rule for a field and dimension: `max(4, n + 1)` points per
    /// unit over the reals.
    pub fn default_for(field: FieldSpec, n: usize) -> Self {
        match field {
            FieldSpec::PAdic(_) => QuadratureSpec::PAdicExact,
            _ => QuadratureSpec::RealMidpoint {
                steps_per_unit: (n as u32 + 1).max(4),
            },
        }
    }

    pub fn grid_step(&self) -> Option<f64> {
        match self {
            QuadratureSpec::RealMidpoint { steps_per_unit } => Some(1.0 / *steps_per_unit as f64),
            QuadratureSpec::PAdicExact => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormReport {
    /// `(int |E_O f|^{2n} W)^{1/2n}`
    pub lhs: f64,
    /// `(int (S_delta f)^{2n} W)^{1/2n}`
    pub rhs: f64,
    pub ratio: f64,
    /// Number of quadrature points.
    pub points: u64,
}

impl NormReport {
    fn from_powers(lhs_pow: f64, rhs_pow: f64, n: usize, points: u64) -> Result<Self> {
        if rhs_pow <= 0.0 {
            return Err(if lhs_pow > 0.0 {
                Error::InvalidInput("square function vanishes where the extension does not".into())
            } else {
                Error::ZeroFunction
            });
        }
        let k = 1.0 / (2 * n) as f64;
        let (lhs, rhs) = (lhs_pow.powf(k), rhs_pow.powf(k));
        Ok(NormReport {
            lhs,
            rhs,
            ratio: lhs / rhs,
            points,
        })
    }
}

/// `||E_O f||_{L^{2n}(W)}`, `||S_delta f||_{L^{2n}(W)}` and their ratio, for
/// the weight `W_{c, delta^{-n}}` with `n = center.len()`.
pub fn weighted_norms(
    f: &TestFunction,
    scale: &Scale,
    center: &[BigRational],
    quad: &QuadratureSpec,
) -> Result<NormReport> {
    let n = center.len();
    if n < 2 {
        return Err(Error::InvalidInput("the weight needs at least 2 coordinates".into()));
    }
    scale.check(f.field)?;
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    match (f.field, quad) {
        (FieldSpec::PAdic(p), QuadratureSpec::PAdicExact) => padic_norms(f, p, scale, center),
        (FieldSpec::Real, QuadratureSpec::RealMidpoint { steps_per_unit }) => {
            let h = *steps_per_unit as u64;
            if h < 4 || h < n as u64 + 1 {
                return Err(Error::InvalidInput(format!(
                    "{h} steps per unit cannot resolve the weight; need at least {}",
                    (n + 1).max(4)
                )));
            }
            real_norms(f, h, scale, center)
        }
        (FieldSpec::Complex, _) => Err(unsupported_complex()),
        (field, quad) => Err(Error::InvalidInput(format!(
            "quadrature {quad:?} does not apply over {field}"
        ))),
    }
}

fn padic_norms(f: &TestFunction, p: Prime, scale: &Scale, center: &[BigRational]) -> Result<NormReport> {
    let n = center.len();
    let s = scale.exponent().unwrap();
    let cells = scale.cells_per_axis();
    let ns = n as u32 * s;
    let q = p
        .pow(ns)
        .ok_or_else(|| Error::budget("p-adic norms", format!("{p}^{ns}"), QUADRATURE_BUDGET))?;
    let per_cell = q / cells;
    let m = f.precision().unwrap();
    let e = m.max(ns).max(padic_size(p, center)?);
    let big_q = p.pow(e).filter(|&v| v <= 1 << 26);
    let outer = q.checked_pow(n as u32 - 1);
    let work = match (big_q, outer) {
        (Some(bq), Some(o)) => o.checked_mul(bq * n as u64 + cells * per_cell * per_cell + q * cells),
        _ => None,
    };
    if !work.is_some_and(|w| w <= QUADRATURE_BUDGET) {
        return Err(Error::budget(
            "p-adic norms",
            format!("{p}^{}", (n as u32 - 1) * ns + e),
            QUADRATURE_BUDGET,
        ));
    }
    let big_q = big_q.unwrap();
    let outer = outer.unwrap();
    let r = big_q / q;

    let values: Vec<Complex64> = (0..big_q).map(|a| f.mass(a)).collect();
    let ctil = scaled_residues(p, center, e);
    let powers: Vec<Vec<u64>> = (1..=n as u32)
        .map(|k| (0..big_q).map(|a| pow_mod(a, k, big_q)).collect())
        .collect();
    let base: Vec<u64> = (0..big_q as usize)
        .map(|a| (0..n).fold(0u64, |acc, k| (acc + mul_mod(powers[k][a], ctil[k], big_q)) % big_q))
        .collect();
    let w_big = omega_table(big_q, 1.0);
    let w_q = omega_table(q, 1.0);
    let w_l = omega_table(per_cell, 1.0);
    let inv_q = 1.0 / big_q as f64;

    let partials: Vec<(f64, f64)> = (0..outer)
        .into_par_iter()
        .map(|idx| {
            // y' = (u_2, ..., u_n)
            let mut rest = idx;
            let mut shift = vec![0u64; n];
            for slot in shift.iter_mut().skip(1) {
                *slot = (rest % q) * r;
                rest /= q;
            }
            let mut folded = vec![Complex64::zero(); q as usize];
            for a in 0..big_q as usize {
                let mut phase = base[a];
                for k in 1..n {
                    phase = (phase + mul_mod(powers[k][a], shift[k], big_q)) % big_q;
                }
                folded[a % q as usize] += values[a] * w_big[phase as usize];
            }
            // D[j][v] = sum_b G[j + cells b] w_L^{b v}
            let mut d = vec![Complex64::zero(); (cells * per_cell) as usize];
            for j in 0..cells {
                for v in 0..per_cell {
                    let mut acc = Complex64::zero();
                    for b in 0..per_cell {
                        acc += folded[(j + cells * b) as usize] * w_l[((b * v) % per_cell) as usize];
                    }
                    d[(j * per_cell + v) as usize] = acc;
                }
            }
            let square: Vec<f64> = (0..per_cell)
                .map(|v| {
                    (0..cells)
                        .map(|j| d[(j * per_cell + v) as usize].norm_sqr())
                        .sum::<f64>()
                        * inv_q
                        * inv_q
                })
                .collect();
            let mut lhs = Vec::with_capacity(q as usize);
            let mut rhs = Vec::with_capacity(q as usize);
            for u in 0..q {
                let v = u % per_cell;
                let mut e_o = Complex64::zero();
                for j in 0..cells {
                    e_o += w_q[((j * u) % q) as usize] * d[(j * per_cell + v) as usize];
                }
                lhs.push((e_o * inv_q).norm_sqr().powi(n as i32));
                rhs.push(square[v as usize].powi(n as i32));
            }
            (pairwise_sum(&lhs), pairwise_sum(&rhs))
        })
        .collect();
    let lhs: Vec<f64> = partials.iter().map(|x| x.0).collect();
    let rhs: Vec<f64> = partials.iter().map(|x| x.1).collect();
    NormReport::from_powers(pairwise_sum(&lhs), pairwise_sum(&rhs), n, outer * q)
}

/// The periodized real weight on one coordinate, sampled at the midpoints
/// `(u + 1/2)/h`, `u < h P`:
/// `(R (pi/2)^2 / P) [1 + 2 sum_{1 <= m < P/R} tri(R m / P) cos(2 pi m (x - c - R/2) / P)]`.
fn periodized_weight(h: u64, period: u64, radius: f64, center: f64) -> Vec<f64> {
    let p = period as f64;
    let amp = radius * FRAC_PI_2 * FRAC_PI_2 / p;
    let harmonics: Vec<(f64, f64)> = (1..)
        .map(|m| (m as f64, 1.0 - radius * m as f64 / p))
        .take_while(|&(_, t)| t > 0.0)
        .collect();
    (0..h * period)
        .map(|u| {
            let x = (u as f64 + 0.5) / h as f64;
            let osc: f64 = harmonics
                .iter()
                .map(|&(m, t)| t * (TAU * m * (x - center - radius / 2.0) / p).cos())
                .sum();
            amp * (1.0 + 2.0 * osc)
        })
        .collect()
}

fn real_norms(f: &TestFunction, h: u64, scale: &Scale, center: &[BigRational]) -> Result<NormReport> {
    let n = center.len();
    let m = f.resolution();
    let cells = scale.cells_per_axis();
    let too_big = || {
        Error::budget(
            "real norms",
            format!("{h}^{n} * {m}^{}", n * (n + 1) / 2 + 1),
            QUADRATURE_BUDGET,
        )
    };
    // periods M^k and the common phase denominator 2 h M^n
    let periods: Vec<u64> = (1..=n as u32)
        .map(|k| m.checked_pow(k).ok_or_else(too_big))
        .collect::<Result<_>>()?;
    let denom = periods[n - 1]
        .checked_mul(2 * h)
        .filter(|&d| d <= 1 << 26)
        .ok_or_else(too_big)?;
    let sizes: Vec<u64> = periods.iter().map(|&p| p * h).collect();
    let points = sizes
        .iter()
        .try_fold(1u64, |acc, &s| acc.checked_mul(s))
        .ok_or_else(too_big)?;
    let atoms: Vec<(u64, Complex64)> = (0..m).map(|a| (a, f.mass(a))).filter(|x| !x.1.is_zero()).collect();
    if !points
        .checked_mul(atoms.len() as u64)
        .is_some_and(|w| w <= QUADRATURE_BUDGET)
    {
        return Err(too_big());
    }
    let radius = num_traits::pow(cells as f64, n);
    let weights: Vec<Vec<f64>> = (0..n)
        .map(|k| periodized_weight(h, periods[k], radius, center[k].to_f64().unwrap()))
        .collect();

    // coefficient of (2 u_k + 1) in the phase numerator of atom a
    let coef: Vec<Vec<u64>> = atoms
        .iter()
        .map(|&(a, _)| {
            (1..=n as u32)
                .map(|k| mul_mod(pow_mod(a, k, denom), periods[n - 1] / periods[k as usize - 1], denom))
                .collect()
        })
        .collect();
    let cell_of: Vec<usize> = atoms.iter().map(|&(a, _)| (a * cells / m) as usize).collect();
    let omega = omega_table(denom, -1.0);
    let outer: u64 = sizes[1..].iter().product();

    let partials: Vec<(f64, f64)> = (0..outer)
        .into_par_iter()
        .map(|idx| {
            let mut rest = idx;
            let mut outer_weight = 1.0;
            let mut base: Vec<u64> = vec![0; atoms.len()];
            for k in 1..n {
                let u = rest % sizes[k];
                rest /= sizes[k];
                outer_weight *= weights[k][u as usize];
                let odd = (2 * u + 1) % denom;
                for (b, c) in base.iter_mut().zip(&coef) {
                    *b = (*b + mul_mod(c[k], odd, denom)) % denom;
                }
            }
            let mut bins = vec![Complex64::zero(); cells as usize];
            let mut lhs = Vec::with_capacity(sizes[0] as usize);
            let mut rhs = Vec::with_capacity(sizes[0] as usize);
            for u in 0..sizes[0] {
                bins.iter_mut().for_each(|b| *b = Complex64::zero());
                let odd = (2 * u + 1) % denom;
                for (i, &(_, w)) in atoms.iter().enumerate() {
                    let phase = (base[i] + mul_mod(coef[i][0], odd, denom)) % denom;
                    bins[cell_of[i]] += w * omega[phase as usize];
                }
                let e_o: Complex64 = bins.iter().sum();
                let sq: f64 = bins.iter().map(|b| b.norm_sqr()).sum();
                let wt = weights[0][u as usize];
                lhs.push(e_o.norm_sqr().powi(n as i32) * wt);
                rhs.push(sq.powi(n as i32) * wt);
            }
            (pairwise_sum(&lhs) * outer_weight, pairwise_sum(&rhs) * outer_weight)
        })
        .collect();
    let cell_volume = (1.0 / h as f64).powi(n as i32);
    let lhs: Vec<f64> = partials.iter().map(|x| x.0).collect();
    let rhs: Vec<f64> = partials.iter().map(|x| x.1).collect();
    NormReport::from_powers(
        pairwise_sum(&lhs) * cell_volume,
        pairwise_sum(&rhs) * cell_volume,
        n,
        points,
    )
}

/// The norm ratio for the comb of `N` unit atoms at scale `1/N`, centered at
/// the origin.
pub fn comb_ratio(n: usize, atoms: u64, quad: &QuadratureSpec) -> Result<NormReport> {
    let f = TestFunction::comb(atoms)?;
    let scale = Scale::archimedean(atoms)?;
    weighted_norms(&f, &scale, &vec![BigRational::zero(); n], quad)
}
