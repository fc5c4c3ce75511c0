use std::time::Instant;

use momentsq_core::bounds::{self, factorial, factorial_root, theorem1_constant, BoundReport};
use momentsq_core::extension::{comb_ratio, weighted_norms, NormReport, QuadratureSpec, TestFunction};
use momentsq_core::syzygy::{syzygy_bound, syzygy_set_nonarch, syzygy_set_real, SyzygyReport};
use momentsq_core::vinogradov::{count_solutions, CountMethod};
use momentsq_core::{CellTuple, Curve, FieldSpec, Prime, Scale};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::args::{BoundsArgs, FieldArg, FunctionArg, MethodArg, RatioArgs, SyzygyArgs, VinoArgs};
use crate::output::Rendered;
use crate::Failure;

pub const SCHEMA: &str = "1";

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

pub fn elapsed_ms(start: Instant, timing: bool) -> Option<f64> {
    timing.then(|| start.elapsed().as_secs_f64() * 1e3)
}

fn rational(flag: &str, text: &str) -> Result<BigRational, Failure> {
    text.trim()
        .parse()
        .map_err(|_| usage(format!("{flag} expects a rational such as 1/32, got `{text}`")))
}

fn field_spec(field: FieldArg, p: Option<u64>) -> Result<FieldSpec, Failure> {
    Ok(match field {
        FieldArg::Padic => {
            let p = p.ok_or_else(|| usage("--p is required for the p-adic field"))?;
            FieldSpec::padic(p)?
        }
        FieldArg::Real => FieldSpec::Real,
        FieldArg::Complex => FieldSpec::Complex,
    })
}

#[derive(Serialize)]
struct SyzygyDoc {
    schema: &'static str,
    field: String,
    p: Option<u64>,
    n: usize,
    s: Option<u32>,
    r: Option<u64>,
    base: Vec<u64>,
    epsilon: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid_step: Option<String>,
    members: Vec<Vec<u64>>,
    cardinality: usize,
    method: &'static str,
    bound: String,
    within_bound: bool,
    strong_diagonal_expected: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<f64>,
}

pub fn syzygy(a: &SyzygyArgs, timing: bool) -> Result<Rendered, Failure> {
    let start = Instant::now();
    if a.n < 2 {
        return Err(usage("--n must be at least 2"));
    }
    if a.tuple.len() != a.n {
        return Err(usage(format!(
            "--tuple has {} entries, expected n = {}",
            a.tuple.len(),
            a.n
        )));
    }
    let field = field_spec(a.field, a.p)?;
    let (report, scale_r, grid_step): (SyzygyReport, Option<u64>, Option<BigRational>) = match field {
        FieldSpec::PAdic(p) => {
            let s = a.s.ok_or_else(|| usage("--s is required for the p-adic field"))?;
            let scale = Scale::padic(p, s)?;
            let i = CellTuple::from_indices(field, scale, &a.tuple)?;
            (syzygy_set_nonarch(&i)?, None, None)
        }
        FieldSpec::Real => {
            let r = a.r.ok_or_else(|| usage("--r is required for the real field"))?;
            let scale = Scale::archimedean(r)?;
            let delta = scale.delta();
            let epsilon = match &a.epsilon {
                Some(t) => rational("--epsilon", t)?,
                None => num_traits::pow(delta.clone(), a.n),
            };
            let step = match &a.grid_step {
                Some(t) => rational("--grid-step", t)?,
                None => delta / BigInt::from(8),
            };
            let curve = Curve::moment(a.n)?;
            let i = CellTuple::from_indices(field, scale, &a.tuple)?;
            (
                syzygy_set_real(&curve, &i, scale, &epsilon, &step)?,
                Some(r),
                Some(step),
            )
        }
        FieldSpec::Complex => return Err(usage("syzygy sets are available over Q_p and the reals")),
    };
    let bound = syzygy_bound(field, a.n)?;
    let members = report.member_indices();
    let rows = members
        .iter()
        .enumerate()
        .map(|(k, m)| vec![k.to_string(), join(m, " ")])
        .collect();
    let doc = SyzygyDoc {
        schema: SCHEMA,
        field: field.name(),
        p: field.prime().map(Prime::get),
        n: a.n,
        s: report.base.scale().exponent(),
        r: scale_r,
        base: report.base.indices(),
        epsilon: report.epsilon.to_string(),
        grid_step: grid_step.map(|g| g.to_string()),
        cardinality: report.cardinality,
        method: report.method.name(),
        within_bound: BigUint::from(report.cardinality) <= bound,
        bound: bound.to_string(),
        strong_diagonal_expected: field.prime().map(|p| p.get() > a.n as u64),
        members,
        elapsed_ms: elapsed_ms(start, timing),
    };
    Ok(Rendered::new(&doc, vec!["member", "cells"], rows))
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

#[derive(Serialize)]
struct VinoDoc {
    schema: &'static str,
    n: usize,
    #[serde(rename = "N")]
    big_n: u64,
    method: &'static str,
    count: String,
    /// `n! N^n`
    main_term: String,
    /// `n! N^n - count`
    residual: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<f64>,
}

pub fn vino(a: &VinoArgs, timing: bool) -> Result<Rendered, Failure> {
    let method = match a.method {
        MethodArg::HashJoin => CountMethod::HashJoin,
        MethodArg::BruteForce => CountMethod::BruteForce,
        MethodArg::PermutationFormula => CountMethod::PermutationFormula,
    };
    let curve = Curve::moment(a.n)?;
    let result = count_solutions(&curve, a.big_n, method)?;
    let main_term = factorial(a.n) * BigUint::from(a.big_n).pow(a.n as u32);
    let residual = BigInt::from(main_term.clone()) - BigInt::from(result.count.clone());
    let doc = VinoDoc {
        schema: SCHEMA,
        n: a.n,
        big_n: a.big_n,
        method: method.name(),
        count: result.count.to_string(),
        main_term: main_term.to_string(),
        residual: residual.to_string(),
        elapsed_ms: timing.then_some(result.elapsed.as_secs_f64() * 1e3),
    };
    let row = vec![
        a.n.to_string(),
        a.big_n.to_string(),
        doc.method.to_string(),
        doc.count.clone(),
        doc.main_term.clone(),
        doc.residual.clone(),
    ];
    Ok(Rendered::new(
        &doc,
        vec!["n", "N", "method", "count", "main_term", "residual"],
        vec![row],
    ))
}

#[derive(Serialize)]
struct BoundsDoc<'a> {
    schema: &'static str,
    table: &'a str,
    field: String,
    n_max: usize,
    rows: &'a [BoundReport],
}

pub fn bounds(a: &BoundsArgs) -> Result<Rendered, Failure> {
    if a.n_max < 2 {
        return Err(usage("--n-max must be at least 2"));
    }
    let field = field_spec(a.field, Some(a.p))?;
    let rows = bounds::table(&a.table, field, a.n_max)?;
    let doc = BoundsDoc {
        schema: SCHEMA,
        table: &a.table,
        field: field.name(),
        n_max: a.n_max,
        rows: &rows,
    };
    let csv_rows = rows
        .iter()
        .map(|r| {
            let params: Vec<String> = r.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
            vec![
                r.name.clone(),
                params.join(";"),
                r.exact.clone().unwrap_or_default(),
                r.value.to_string(),
                r.formula.clone(),
            ]
        })
        .collect();
    Ok(Rendered::new(
        &doc,
        vec!["name", "parameters", "exact", "value", "formula"],
        csv_rows,
    ))
}

#[derive(Serialize)]
struct Sample {
    seed: Option<u64>,
    lhs: f64,
    rhs: f64,
    ratio: f64,
    points: u64,
}

impl Sample {
    fn new(seed: Option<u64>, r: NormReport) -> Self {
        Sample {
            seed,
            lhs: r.lhs,
            rhs: r.rhs,
            ratio: r.ratio,
            points: r.points,
        }
    }
}

#[derive(Serialize)]
struct RatioDoc {
    schema: &'static str,
    field: String,
    n: usize,
    delta: String,
    function: &'static str,
    quadrature: String,
    samples: Vec<Sample>,
    max_ratio: f64,
    theorem1_bound: f64,
    within_theorem1: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    lower_bound_target: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<f64>,
}

pub fn ratio(a: &RatioArgs, timing: bool) -> Result<Rendered, Failure> {
    let start = Instant::now();
    if a.n < 2 {
        return Err(usage("--n must be at least 2"));
    }
    if a.samples == 0 {
        return Err(usage("--samples must be positive"));
    }
    let field = match a.function {
        FunctionArg::Comb => FieldSpec::Real,
        _ => field_spec(a.field, Some(a.p))?,
    };
    let quad = match (field, a.steps_per_unit) {
        (FieldSpec::Real, Some(steps)) => QuadratureSpec::RealMidpoint { steps_per_unit: steps },
        _ => QuadratureSpec::default_for(field, a.n),
    };
    let center = vec![BigRational::zero(); a.n];
    let seeds = (0..a.samples)
        .map(|k| {
            a.seed
                .checked_add(k)
                .ok_or_else(|| usage("--seed + --samples overflows"))
        })
        .collect::<Result<Vec<u64>, Failure>>()?;
    let (delta, samples) = match (a.function, field) {
        (FunctionArg::Comb, _) => {
            let r = comb_ratio(a.n, a.atoms, &quad)?;
            (
                BigRational::new(BigInt::one(), a.atoms.into()),
                vec![Sample::new(None, r)],
            )
        }
        (_, FieldSpec::PAdic(p)) => {
            let scale = Scale::padic(p, a.s)?;
            let m = a.precision.unwrap_or(a.s + 1);
            let mut out = Vec::new();
            if a.function == FunctionArg::One {
                let f = TestFunction::one(field)?;
                out.push(Sample::new(None, weighted_norms(&f, &scale, &center, &quad)?));
            } else {
                for &seed in &seeds {
                    let f = TestFunction::random_padic(p, m, seed)?;
                    out.push(Sample::new(Some(seed), weighted_norms(&f, &scale, &center, &quad)?));
                }
            }
            (scale.delta(), out)
        }
        (_, FieldSpec::Real) => {
            let scale = Scale::archimedean(a.r)?;
            let mut out = Vec::new();
            if a.function == FunctionArg::One {
                let f = TestFunction::one(field)?;
                out.push(Sample::new(None, weighted_norms(&f, &scale, &center, &quad)?));
            } else {
                for &seed in &seeds {
                    let f = TestFunction::random_real(a.resolution, seed)?;
                    out.push(Sample::new(Some(seed), weighted_norms(&f, &scale, &center, &quad)?));
                }
            }
            (scale.delta(), out)
        }
        (_, FieldSpec::Complex) => return Err(usage("norm ratios are available over Q_p and the reals")),
    };
    let theorem = theorem1_constant(field, a.n)?;
    let max_ratio = samples.iter().map(|s| s.ratio).fold(0.0, f64::max);
    let rows = samples
        .iter()
        .map(|s| {
            vec![
                s.seed.map(|x| x.to_string()).unwrap_or_default(),
                s.lhs.to_string(),
                s.rhs.to_string(),
                s.ratio.to_string(),
                s.points.to_string(),
            ]
        })
        .collect();
    let doc = RatioDoc {
        schema: SCHEMA,
        field: field.name(),
        n: a.n,
        delta: delta.to_string(),
        function: match a.function {
            FunctionArg::Random => "random",
            FunctionArg::One => "one",
            FunctionArg::Comb => "comb",
        },
        quadrature: match quad {
            QuadratureSpec::PAdicExact => "exact".into(),
            QuadratureSpec::RealMidpoint { steps_per_unit } => format!("midpoint/{steps_per_unit}"),
        },
        samples,
        max_ratio,
        theorem1_bound: theorem,
        within_theorem1: max_ratio <= theorem,
        lower_bound_target: (a.function == FunctionArg::Comb).then(|| factorial_root(a.n)),
        elapsed_ms: elapsed_ms(start, timing),
    };
    Ok(Rendered::new(&doc, vec!["seed", "lhs", "rhs", "ratio", "points"], rows))
}
