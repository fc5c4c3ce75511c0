//! The sets `S(delta, I; eps)` of cell tuples `J` for which some `s in I`,
//! `t in J` satisfy `|sum_i gamma(t_i) - gamma(s_i)| <= eps`.
//!
//! Over `Q_p` with the moment curve and `eps = delta^n = p^{-ns}` membership
//! is a congruence question modulo `p^{ns}` and is decided exactly. Over the
//! reals the set is approximated from below by sampling a grid.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::bounds::field_constant;
use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::local_field::{CellTuple, FieldSpec, Scale};
use crate::ENUMERATION_BUDGET;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DecisionMethod {
    CongruenceExact,
    PermutationOracle,
    RealSampled,
}

impl DecisionMethod {
    pub fn name(self) -> &'static str {
        match self {
            DecisionMethod::CongruenceExact => "CongruenceExact",
            DecisionMethod::PermutationOracle => "PermutationOracle",
            DecisionMethod::RealSampled => "RealSampled",
        }
    }
}

/// Points `s in I`, `t in J` certifying membership. Over `Q_p` these are
/// residues modulo `p^{ns}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub s: Vec<BigRational>,
    pub t: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyzygyReport {
    pub base: CellTuple,
    pub epsilon: BigRational,
    /// Sorted lexicographically by cell indices.
    pub members: Vec<CellTuple>,
    pub method: DecisionMethod,
    pub cardinality: usize,
    /// Either empty or one witness per member.
    pub witnesses: Vec<Witness>,
}

impl SyzygyReport {
    fn new(
        base: CellTuple,
        epsilon: BigRational,
        mut members: Vec<(CellTuple, Option<Witness>)>,
        method: DecisionMethod,
    ) -> Self {
        members.sort_by(|a, b| a.0.cmp(&b.0));
        members.dedup_by(|a, b| a.0 == b.0);
        let witnesses = if members.iter().all(|m| m.1.is_some()) {
            members.iter().map(|m| m.1.clone().unwrap()).collect()
        } else {
            Vec::new()
        };
        let members: Vec<CellTuple> = members.into_iter().map(|m| m.0).collect();
        SyzygyReport {
            base,
            epsilon,
            cardinality: members.len(),
            members,
            method,
            witnesses,
        }
    }

    pub fn contains(&self, j: &CellTuple) -> bool {
        self.members.binary_search(j).is_ok()
    }

    pub fn member_indices(&self) -> Vec<Vec<u64>> {
        self.members.iter().map(CellTuple::indices).collect()
    }
}

/// `C_{K,n} n^n`.
pub fn syzygy_bound(field: FieldSpec, n: usize) -> Result<BigUint> {
    Ok(field_constant(field, n)? * BigUint::from(n).pow(n as u32))
}

/// Whether `J` equals `I` as a multiset of cells.
pub fn permutation_predicate(i: &CellTuple, j: &CellTuple) -> bool {
    i.len() == j.len() && i.multiset() == j.multiset()
}

/// Rearranges `v` into the next lexicographic permutation; false once `v` is
/// the last one.
pub fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// All distinct orderings of a multiset, in lexicographic order.
pub fn distinct_orderings<T: Ord + Clone>(items: &[T]) -> Vec<Vec<T>> {
    let mut v = items.to_vec();
    v.sort();
    let mut out = vec![v.clone()];
    while next_permutation(&mut v) {
        out.push(v.clone());
    }
    out
}

/// The permutation oracle's answer: all distinct orderings of `I`.
pub fn permutation_oracle_set(i: &CellTuple) -> Result<SyzygyReport> {
    let members = distinct_orderings(i.cells())
        .into_iter()
        .map(|c| CellTuple::new(c).map(|t| (t, None)))
        .collect::<Result<Vec<_>>>()?;
    let eps = default_epsilon(i)?;
    Ok(SyzygyReport::new(
        i.clone(),
        eps,
        members,
        DecisionMethod::PermutationOracle,
    ))
}

fn default_epsilon(i: &CellTuple) -> Result<BigRational> {
    let n = i.len() as u32;
    let r = BigInt::from(i.scale().cells_per_axis());
    Ok(BigRational::new(BigInt::one(), num_traits::pow(r, n as usize)))
}

/// Parameters of the exact p-adic decision for one `(p, n, s)`.
#[derive(Clone, Copy, Debug)]
struct Congruence {
    n: usize,
    /// `p^s`, the number of cells.
    cells: u64,
    /// `p^{ns}`.
    q: u64,
    /// `p^{(n-1)s}`, residues modulo `q` per cell.
    per_cell: u64,
}

impl Congruence {
    fn new(field: FieldSpec, scale: Scale, n: usize) -> Result<Self> {
        let p = field
            .prime()
            .ok_or_else(|| Error::InvalidInput(format!("exact decision needs Q_p, got {field}")))?;
        scale.check(field)?;
        let s = scale.exponent().unwrap();
        let too_big = || {
            Error::budget(
                "p-adic enumeration",
                format!("{p}^{}", n as u32 * s),
                ENUMERATION_BUDGET,
            )
        };
        let q = p.pow(n as u32 * s).ok_or_else(too_big)?;
        // keys pack n residues modulo q into a u128
        (q as u128).checked_pow(n as u32).ok_or_else(too_big)?;
        let cells = scale.cells_per_axis();
        Ok(Congruence {
            n,
            cells,
            q,
            per_cell: q / cells,
        })
    }

    /// Power sums `sum_i x_i^k mod q`, `k = 1..n`, packed in base `q`.
    fn key(&self, xs: &[u64]) -> u128 {
        let q = self.q as u128;
        let mut sums = [0u128; 16];
        let sums = if self.n <= 16 {
            &mut sums[..self.n]
        } else {
            return self.key_long(xs);
        };
        for &x in xs {
            let mut pow = 1u128;
            for s in sums.iter_mut() {
                pow = pow * x as u128 % q;
                *s += pow;
            }
        }
        sums.iter().rev().fold(0u128, |key, s| key * q + s % q)
    }

    fn key_long(&self, xs: &[u64]) -> u128 {
        let q = self.q as u128;
        let mut sums = vec![0u128; self.n];
        for &x in xs {
            let mut pow = 1u128;
            for s in sums.iter_mut() {
                pow = pow * x as u128 % q;
                *s = (*s + pow) % q;
            }
        }
        sums.iter().rev().fold(0u128, |key, s| key * q + s)
    }

    /// Number of residue tuples with `x_i` in cell `c_i`.
    fn tuples_per_cell_tuple(&self) -> Option<u64> {
        self.per_cell.checked_pow(self.n as u32)
    }

    /// Visit every residue tuple lying over the cell tuple `cells`.
    fn for_each_lift(&self, cells: &[u64], mut f: impl FnMut(&[u64])) {
        let n = self.n;
        let mut digits = vec![0u64; n];
        let mut xs: Vec<u64> = cells.to_vec();
        loop {
            f(&xs);
            let mut i = 0;
            loop {
                if i == n {
                    return;
                }
                digits[i] += 1;
                if digits[i] < self.per_cell {
                    xs[i] = cells[i] + digits[i] * self.cells;
                    break;
                }
                digits[i] = 0;
                xs[i] = cells[i];
                i += 1;
            }
        }
    }
}

fn check_tuple(t: &CellTuple, field: FieldSpec, scale: Scale, n: usize) -> Result<()> {
    if t.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: t.len(),
        });
    }
    if t.field() != field || t.scale() != scale {
        return Err(Error::ScaleMismatch("tuples live at different scales".into()));
    }
    Ok(())
}

fn nonarch_setup(i: &CellTuple) -> Result<Congruence> {
    let field = i.field();
    if !matches!(field, FieldSpec::PAdic(_)) {
        return Err(Error::InvalidInput(format!("exact decision needs Q_p, got {field}")));
    }
    Congruence::new(field, i.scale(), i.len())
}

/// Exact decision of `J in S(p^{-s}, I; p^{-ns})` for the moment curve over
/// `Q_p`, by matching power-sum vectors modulo `p^{ns}`.
pub fn is_syzygy_nonarch(i: &CellTuple, j: &CellTuple) -> Result<bool> {
    let c = nonarch_setup(i)?;
    check_tuple(j, i.field(), i.scale(), i.len())?;
    let lifts = c.tuples_per_cell_tuple();
    match lifts.and_then(|l| l.checked_mul(2)) {
        Some(work) if work <= ENUMERATION_BUDGET => {}
        _ => {
            return Err(Error::budget(
                "syzygy pair check",
                format!("2 * {}^{}", c.per_cell, c.n),
                ENUMERATION_BUDGET,
            ))
        }
    }
    let mut keys = std::collections::HashSet::new();
    c.for_each_lift(&j.indices(), |t| {
        keys.insert(c.key(t));
    });
    let mut found = false;
    c.for_each_lift(&i.indices(), |s| {
        found = found || keys.contains(&c.key(s));
    });
    Ok(found)
}

pub(crate) fn binomial(n: u64, k: u64) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Calls `f` for every non-decreasing tuple `(first, x_2, ..., x_n)` with
/// entries below `q`.
pub(crate) fn for_each_sorted_with_first(n: usize, first: u64, q: u64, mut f: impl FnMut(&[u64])) {
    let mut xs = vec![first; n];
    loop {
        f(&xs);
        let mut i = n - 1;
        loop {
            if i == 0 {
                return;
            }
            if xs[i] + 1 < q {
                xs[i] += 1;
                let v = xs[i];
                for x in &mut xs[i + 1..] {
                    *x = v;
                }
                break;
            }
            i -= 1;
        }
    }
}

fn residue_witness(s: &[u64], t: &[u64]) -> Witness {
    let conv = |xs: &[u64]| xs.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect();
    Witness { s: conv(s), t: conv(t) }
}

/// The whole set `S(p^{-s}, I; p^{-ns})` for the moment curve over `Q_p`.
///
/// Residue tuples over `I` are hashed by their power-sum vectors; then every
/// non-decreasing residue tuple modulo `p^{ns}` is probed, and the cells of
/// each hit, in every order, are members.
pub fn syzygy_set_nonarch(i: &CellTuple) -> Result<SyzygyReport> {
    let c = nonarch_setup(i)?;
    let scan = binomial(c.q + c.n as u64 - 1, c.n as u64);
    let work = BigUint::from(c.per_cell).pow(c.n as u32) + &scan;
    if work > BigUint::from(ENUMERATION_BUDGET) {
        return Err(Error::budget("syzygy enumeration", work, ENUMERATION_BUDGET));
    }
    let mut v_i: HashMap<u128, Vec<u64>> = HashMap::new();
    c.for_each_lift(&i.indices(), |s| {
        v_i.entry(c.key(s)).or_insert_with(|| s.to_vec());
    });

    let hits: Vec<(Vec<u64>, Vec<u64>)> = (0..c.q)
        .into_par_iter()
        .map(|first| {
            let mut found: Vec<(Vec<u64>, Vec<u64>)> = Vec::new();
            for_each_sorted_with_first(c.n, first, c.q, |t| {
                if let Some(s) = v_i.get(&c.key(t)) {
                    found.push((t.to_vec(), s.clone()));
                }
            });
            found
        })
        .flatten()
        .collect();

    // one witness per cell multiset, then every ordering of it
    let mut by_cells: HashMap<Vec<u64>, (Vec<u64>, Vec<u64>)> = HashMap::new();
    for (t, s) in hits {
        let mut order: Vec<usize> = (0..c.n).collect();
        order.sort_by_key(|&k| (t[k] % c.cells, t[k]));
        let t_sorted: Vec<u64> = order.iter().map(|&k| t[k]).collect();
        let cells: Vec<u64> = t_sorted.iter().map(|x| x % c.cells).collect();
        by_cells.entry(cells).or_insert((t_sorted, s));
    }
    let field = i.field();
    let scale = i.scale();
    let mut members = Vec::new();
    for (cells, (t, s)) in by_cells {
        // permute the witness along with the cells
        let mut paired: Vec<(u64, u64)> = cells.iter().copied().zip(t.iter().copied()).collect();
        paired.sort();
        loop {
            let idx: Vec<u64> = paired.iter().map(|x| x.0).collect();
            let tt: Vec<u64> = paired.iter().map(|x| x.1).collect();
            members.push((
                CellTuple::from_indices(field, scale, &idx)?,
                Some(residue_witness(&s, &tt)),
            ));
            if !next_cell_order(&mut paired) {
                break;
            }
        }
    }
    let eps = default_epsilon(i)?;
    Ok(SyzygyReport::new(
        i.clone(),
        eps,
        members,
        DecisionMethod::CongruenceExact,
    ))
}

// Next distinct ordering of the cell indices, carrying the paired residues.
fn next_cell_order(v: &mut [(u64, u64)]) -> bool {
    let mut cells: Vec<u64> = v.iter().map(|x| x.0).collect();
    if !next_permutation(&mut cells) {
        return false;
    }
    let mut pool: Vec<(u64, u64)> = v.to_vec();
    for (slot, &cell) in v.iter_mut().zip(&cells) {
        let k = pool.iter().position(|x| x.0 == cell).unwrap();
        *slot = pool.remove(k);
    }
    true
}

/// Exact syzygy sets for every base tuple at one `(p, n, s)`, built from a
/// single scan of the non-decreasing residue tuples modulo `p^{ns}`.
#[derive(Clone, Debug)]
pub struct SyzygyAtlas {
    field: FieldSpec,
    scale: Scale,
    n: usize,
    /// All cell multisets as sorted index vectors, in lexicographic order.
    multisets: Vec<Vec<u64>>,
    index: HashMap<Vec<u64>, usize>,
    /// `related[a]`: multisets sharing a power-sum vector with multiset `a`.
    related: Vec<Vec<usize>>,
}

impl SyzygyAtlas {
    pub fn build(p: u64, n: usize, s: u32) -> Result<Self> {
        let field = FieldSpec::padic(p)?;
        let scale = Scale::padic(field.prime().unwrap(), s)?;
        if n < 2 {
            return Err(Error::InvalidInput("n must be at least 2".into()));
        }
        let c = Congruence::new(field, scale, n)?;
        let scan = binomial(c.q + n as u64 - 1, n as u64);
        if scan > BigUint::from(ENUMERATION_BUDGET) {
            return Err(Error::budget("syzygy atlas", scan, ENUMERATION_BUDGET));
        }
        let key_fits_u64 = (c.q as u128)
            .checked_pow(n as u32)
            .is_some_and(|k| k <= u64::MAX as u128);
        if !key_fits_u64 {
            return Err(Error::budget(
                "syzygy atlas keys",
                format!("{}^{n}", c.q),
                ENUMERATION_BUDGET,
            ));
        }

        let mut multisets = Vec::new();
        for first in 0..c.cells {
            for_each_sorted_with_first(n, first, c.cells, |m| multisets.push(m.to_vec()));
        }
        let index: HashMap<Vec<u64>, usize> = multisets.iter().enumerate().map(|(k, m)| (m.clone(), k)).collect();
        // dense lookup by the base-p^s code of a sorted cell tuple
        let code = |m: &[u64]| m.iter().fold(0u64, |acc, &x| acc * c.cells + x) as usize;
        let mut dense = vec![0u32; c.cells.pow(n as u32) as usize];
        for (k, m) in multisets.iter().enumerate() {
            dense[code(m)] = k as u32;
        }

        let mut entries: Vec<(u64, u32)> = (0..c.q)
            .into_par_iter()
            .map(|first| {
                let mut out = Vec::new();
                let mut cells = vec![0u64; n];
                for_each_sorted_with_first(n, first, c.q, |t| {
                    for (slot, x) in cells.iter_mut().zip(t) {
                        *slot = x % c.cells;
                    }
                    cells.sort_unstable();
                    out.push((c.key(t) as u64, dense[code(&cells)]));
                });
                out.sort_unstable();
                out.dedup();
                out
            })
            .flatten()
            .collect();
        entries.par_sort_unstable();
        entries.dedup();

        let mut related: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); multisets.len()];
        for group in entries.chunk_by(|a, b| a.0 == b.0) {
            for a in group {
                for b in group {
                    related[a.1 as usize].insert(b.1 as usize);
                }
            }
        }
        Ok(SyzygyAtlas {
            field,
            scale,
            n,
            multisets,
            index,
            related: related.into_iter().map(|r| r.into_iter().collect()).collect(),
        })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Every cell multiset, as a sorted tuple.
    pub fn multisets(&self) -> &[Vec<u64>] {
        &self.multisets
    }

    /// Every ordered base tuple `I in P_delta^n`.
    pub fn all_tuples(&self) -> Result<Vec<CellTuple>> {
        let mut out = Vec::new();
        for m in &self.multisets {
            for idx in distinct_orderings(m) {
                out.push(CellTuple::from_indices(self.field, self.scale, &idx)?);
            }
        }
        out.sort();
        Ok(out)
    }

    pub fn report(&self, i: &CellTuple) -> Result<SyzygyReport> {
        check_tuple(i, self.field, self.scale, self.n)?;
        let mut key = i.indices();
        key.sort_unstable();
        let a = self.index[&key];
        let mut members = Vec::new();
        for &b in &self.related[a] {
            for idx in distinct_orderings(&self.multisets[b]) {
                members.push((CellTuple::from_indices(self.field, self.scale, &idx)?, None));
            }
        }
        let eps = default_epsilon(i)?;
        Ok(SyzygyReport::new(
            i.clone(),
            eps,
            members,
            DecisionMethod::CongruenceExact,
        ))
    }

    /// `max_I |S(delta, I; delta^n)|`.
    pub fn max_cardinality(&self) -> usize {
        self.related
            .iter()
            .map(|r| r.iter().map(|&b| distinct_orderings(&self.multisets[b]).len()).sum())
            .max()
            .unwrap_or(0)
    }

    /// Whether every multiset is related only to itself.
    pub fn is_strongly_diagonal(&self) -> bool {
        self.related.iter().enumerate().all(|(a, r)| r == &[a])
    }
}

/// Sampled lower approximation of `S(delta, I; eps)` for a real polynomial
/// curve. Grid points `j delta + k h` are taken in each cell; a tuple `J`
/// is reported only once a grid witness has been verified exactly.
pub fn syzygy_set_real(
    curve: &Curve,
    i: &CellTuple,
    scale: Scale,
    epsilon: &BigRational,
    grid_step: &BigRational,
) -> Result<SyzygyReport> {
    let n = curve.dim();
    check_tuple(i, FieldSpec::Real, scale, n)?;
    if !grid_step.is_positive() {
        return Err(Error::EmptyGrid);
    }
    let delta = scale.delta();
    if grid_step * BigInt::from(8) > delta {
        return Err(Error::InvalidInput(format!(
            "grid step {grid_step} exceeds delta/8 = {}",
            &delta / BigInt::from(8)
        )));
    }
    if epsilon.is_negative() {
        return Err(Error::InvalidInput("epsilon must be non-negative".into()));
    }
    let cells = scale.cells_per_axis();
    let per_cell = (&delta / grid_step)
        .ceil()
        .to_integer()
        .to_u64()
        .ok_or(Error::EmptyGrid)?;
    let work = BigUint::from(cells).pow(n as u32) * BigUint::from(per_cell).pow(2 * n as u32);
    if work > BigUint::from(ENUMERATION_BUDGET) * 10u32 {
        return Err(Error::budget("real syzygy sampling", work, ENUMERATION_BUDGET * 10));
    }

    // grid[j][k] = point, exact values and f64 values
    let grid: Vec<Vec<GridPoint>> = (0..cells)
        .map(|j| {
            let lo = &delta * BigInt::from(j);
            (0..per_cell)
                .map(|k| GridPoint::new(curve, &lo + grid_step * BigInt::from(k)))
                .collect()
        })
        .collect();

    let base_sums = tuple_sums(&grid, &i.indices());
    let mut order: Vec<usize> = (0..base_sums.len()).collect();
    order.sort_by(|&a, &b| base_sums[a].approx[0].total_cmp(&base_sums[b].approx[0]));
    let firsts: Vec<f64> = order.iter().map(|&a| base_sums[a].approx[0]).collect();
    let eps_f = epsilon.to_f64().unwrap_or(f64::INFINITY);
    let slack = 1e-9 * (1.0 + eps_f);

    let mut multisets = Vec::new();
    for first in 0..cells {
        for_each_sorted_with_first(n, first, cells, |m| multisets.push(m.to_vec()));
    }
    let found: Vec<Option<(Vec<u64>, Witness)>> = multisets
        .par_iter()
        .map(|m| {
            let sums = tuple_sums(&grid, m);
            for t in &sums {
                let x = t.approx[0];
                let lo = firsts.partition_point(|&v| v < x - eps_f - slack);
                for &a in &order[lo..] {
                    let b = &base_sums[a];
                    if b.approx[0] > x + eps_f + slack {
                        break;
                    }
                    let close = b
                        .approx
                        .iter()
                        .zip(&t.approx)
                        .all(|(u, v)| (u - v).abs() <= eps_f + slack);
                    if close && exact_close(&b.exact, &t.exact, epsilon) {
                        return Some((
                            m.clone(),
                            Witness {
                                s: b.points.clone(),
                                t: t.points.clone(),
                            },
                        ));
                    }
                }
            }
            None
        })
        .collect();

    let mut members = Vec::new();
    for (m, w) in found.into_iter().flatten() {
        let mut paired: Vec<(u64, BigRational)> = m.iter().copied().zip(w.t.iter().cloned()).collect();
        paired.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        for idx in distinct_orderings(&m) {
            let mut pool = paired.clone();
            let t: Vec<BigRational> = idx
                .iter()
                .map(|c| {
                    let k = pool.iter().position(|x| x.0 == *c).unwrap();
                    pool.remove(k).1
                })
                .collect();
            let tuple = CellTuple::from_indices(FieldSpec::Real, scale, &idx)?;
            members.push((tuple, Some(Witness { s: w.s.clone(), t })));
        }
    }
    Ok(SyzygyReport::new(
        i.clone(),
        epsilon.clone(),
        members,
        DecisionMethod::RealSampled,
    ))
}

struct GridPoint {
    x: BigRational,
    exact: Vec<BigRational>,
    approx: Vec<f64>,
}

impl GridPoint {
    fn new(curve: &Curve, x: BigRational) -> Self {
        let exact = curve.eval(&x);
        let approx = exact.iter().map(|v| v.to_f64().unwrap()).collect();
        GridPoint { x, exact, approx }
    }
}

struct TupleSum {
    points: Vec<BigRational>,
    exact: Vec<BigRational>,
    approx: Vec<f64>,
}

/// `sum_i gamma(x_i)` for every grid tuple over the given cells.
fn tuple_sums(grid: &[Vec<GridPoint>], cells: &[u64]) -> Vec<TupleSum> {
    let n = cells.len();
    let per = grid[0].len();
    let dim = grid[0][0].exact.len();
    let mut out = Vec::new();
    let mut digits = vec![0usize; n];
    loop {
        let pts: Vec<&GridPoint> = (0..n).map(|i| &grid[cells[i] as usize][digits[i]]).collect();
        let mut exact = vec![BigRational::zero(); dim];
        let mut approx = vec![0.0; dim];
        for p in &pts {
            for d in 0..dim {
                exact[d] += &p.exact[d];
                approx[d] += p.approx[d];
            }
        }
        out.push(TupleSum {
            points: pts.iter().map(|p| p.x.clone()).collect(),
            exact,
            approx,
        });
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            digits[i] += 1;
            if digits[i] < per {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

fn exact_close(a: &[BigRational], b: &[BigRational], eps: &BigRational) -> bool {
    a.iter()
        .zip(b)
        .all(|(u, v)| (u - v).abs().cmp(eps) != Ordering::Greater)
}

/// Re-checks a real witness: `s_i in I_i`, `t_i in J_i` and the sums are
/// `eps`-close in the max-norm.
pub fn verify_real_witness(curve: &Curve, i: &CellTuple, j: &CellTuple, w: &Witness, epsilon: &BigRational) -> bool {
    let inside = |tuple: &CellTuple, pts: &[BigRational]| {
        tuple.len() == pts.len() && tuple.cells().iter().zip(pts).all(|(c, x)| c.contains(x))
    };
    if !inside(i, &w.s) || !inside(j, &w.t) {
        return false;
    }
    let sum = |pts: &[BigRational]| {
        pts.iter().fold(vec![BigRational::zero(); curve.dim()], |mut acc, x| {
            for (a, v) in acc.iter_mut().zip(curve.eval(x)) {
                *a += v;
            }
            acc
        })
    };
    exact_close(&sum(&w.s), &sum(&w.t), epsilon)
}

/// Re-checks a p-adic residue witness: the residues lie over the cells and
/// their power sums agree modulo `p^{ns}`.
pub fn verify_nonarch_witness(i: &CellTuple, j: &CellTuple, w: &Witness) -> Result<bool> {
    let c = nonarch_setup(i)?;
    let to_u64 = |xs: &[BigRational]| -> Option<Vec<u64>> { xs.iter().map(|x| x.to_integer().to_u64()).collect() };
    let (Some(s), Some(t)) = (to_u64(&w.s), to_u64(&w.t)) else {
        return Ok(false);
    };
    let over = |tuple: &CellTuple, xs: &[u64]| {
        xs.len() == tuple.len()
            && tuple
                .indices()
                .iter()
                .zip(xs)
                .all(|(&cell, &x)| x < c.q && x % c.cells == cell)
    };
    Ok(over(i, &s) && over(j, &t) && c.key(&s) == c.key(&t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ratio;
    use proptest::prelude::*;

    fn qp_tuple(p: u64, s: u32, idx: &[u64]) -> CellTuple {
        let f = FieldSpec::padic(p).unwrap();
        CellTuple::from_indices(f, Scale::padic(f.prime().unwrap(), s).unwrap(), idx).unwrap()
    }

    fn real_tuple(r: u64, idx: &[u64]) -> CellTuple {
        CellTuple::from_indices(FieldSpec::Real, Scale::archimedean(r).unwrap(), idx).unwrap()
    }

    #[test]
    fn pair_examples() {
        let i = qp_tuple(3, 1, &[0, 1]);
        assert!(is_syzygy_nonarch(&i, &i).unwrap());
        assert!(is_syzygy_nonarch(&i, &qp_tuple(3, 1, &[1, 0])).unwrap());
        assert!(!is_syzygy_nonarch(&qp_tuple(3, 1, &[0, 0]), &qp_tuple(3, 1, &[0, 1])).unwrap());
    }

    #[test]
    fn set_examples() {
        let r = syzygy_set_nonarch(&qp_tuple(5, 1, &[0, 1])).unwrap();
        assert_eq!(r.member_indices(), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(r.cardinality, 2);
        assert_eq!(r.epsilon, ratio(1, 25));
        let r = syzygy_set_nonarch(&qp_tuple(5, 1, &[2, 2])).unwrap();
        assert_eq!(r.member_indices(), vec![vec![2, 2]]);
        let r = syzygy_set_nonarch(&qp_tuple(3, 1, &[0, 1, 2])).unwrap();
        assert_eq!(r.cardinality, 6);
        assert!(BigUint::from(r.cardinality) <= syzygy_bound(r.base.field(), 3).unwrap());
        for (j, w) in r.members.iter().zip(&r.witnesses) {
            assert!(verify_nonarch_witness(&r.base, j, w).unwrap());
        }
    }

    #[test]
    fn budget_guard() {
        let err = syzygy_set_nonarch(&qp_tuple(5, 9, &[0, 1])).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn bound_examples() {
        let qp = FieldSpec::padic(7).unwrap();
        assert_eq!(syzygy_bound(qp, 3).unwrap(), BigUint::from(27u32));
        assert_eq!(syzygy_bound(FieldSpec::Real, 3).unwrap(), BigUint::from(9261u32));
        assert_eq!(
            syzygy_bound(FieldSpec::Real, 7).unwrap(),
            BigUint::from(5u32).pow(7) * BigUint::from(7u32).pow(7)
        );
    }

    #[test]
    fn permutation_predicate_examples() {
        let t = |idx: &[u64]| qp_tuple(5, 1, idx);
        assert!(permutation_predicate(&t(&[0, 1]), &t(&[1, 0])));
        assert!(!permutation_predicate(&t(&[0, 0]), &t(&[0, 1])));
        assert!(permutation_predicate(&t(&[2, 2]), &t(&[2, 2])));
    }

    #[test]
    fn orderings() {
        assert_eq!(
            distinct_orderings(&[1, 0, 1]),
            vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]
        );
        assert_eq!(distinct_orderings(&[3, 3]).len(), 1);
    }

    #[test]
    fn atlas_matches_single_sets() {
        let atlas = SyzygyAtlas::build(3, 3, 1).unwrap();
        for i in atlas.all_tuples().unwrap() {
            assert_eq!(
                atlas.report(&i).unwrap(),
                syzygy_set_nonarch(&i)
                    .unwrap_or_else(|e| panic!("{e}"))
                    .without_witnesses()
            );
        }
        // p <= n is not excluded by the enumeration, and these small cases
        // are still strongly diagonal
        for (p, n, s) in [(2, 3, 1), (2, 2, 2), (3, 4, 1)] {
            assert!(SyzygyAtlas::build(p, n, s).unwrap().is_strongly_diagonal());
        }
        assert_eq!(SyzygyAtlas::build(2, 3, 1).unwrap().max_cardinality(), 3);
        assert!(SyzygyAtlas::build(5, 2, 1).unwrap().is_strongly_diagonal());
    }

    impl SyzygyReport {
        fn without_witnesses(mut self) -> Self {
            self.witnesses.clear();
            self
        }
    }

    #[test]
    fn real_examples() {
        let g = Curve::moment(2).unwrap();
        let scale = Scale::archimedean(8).unwrap();
        let i = real_tuple(8, &[2, 5]);
        let r = syzygy_set_real(&g, &i, scale, &ratio(1, 64), &ratio(1, 64)).unwrap();
        assert!(r.contains(&i));
        assert!(r.contains(&real_tuple(8, &[5, 2])));
        assert!(r.cardinality <= 50);
        for (j, w) in r.members.iter().zip(&r.witnesses) {
            assert!(verify_real_witness(&g, &i, j, w, &r.epsilon));
        }
        // a vacuous threshold admits every tuple
        let i4 = real_tuple(4, &[1, 3]);
        let all = syzygy_set_real(&g, &i4, Scale::archimedean(4).unwrap(), &ratio(4, 1), &ratio(1, 32)).unwrap();
        assert_eq!(all.cardinality, 16);
        assert_eq!(
            syzygy_set_real(&g, &i, scale, &ratio(1, 64), &ratio(0, 1)).unwrap_err(),
            Error::EmptyGrid
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn symmetric_and_reflexive(a in 0u64..7, b in 0u64..7, c in 0u64..7, d in 0u64..7) {
            let i = qp_tuple(7, 1, &[a, b]);
            let j = qp_tuple(7, 1, &[c, d]);
            prop_assert!(is_syzygy_nonarch(&i, &i).unwrap());
            prop_assert_eq!(is_syzygy_nonarch(&i, &j).unwrap(), is_syzygy_nonarch(&j, &i).unwrap());
            prop_assert_eq!(is_syzygy_nonarch(&i, &j).unwrap(), permutation_predicate(&i, &j));
        }

        #[test]
        fn set_is_permutations(a in 0u64..5, b in 0u64..5, c in 0u64..5) {
            let i = qp_tuple(5, 1, &[a, b, c]);
            let r = syzygy_set_nonarch(&i).unwrap();
            prop_assert!(r.contains(&i));
            prop_assert_eq!(r.members, permutation_oracle_set(&i).unwrap().members);
        }
    }
}
