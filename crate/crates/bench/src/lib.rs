//! Shared fixtures for the benchmarks.

use momentsq_core::{CellTuple, FieldSpec, Prime, Scale};
use num_rational::BigRational;
use num_traits::Zero;

/// The base tuple `(0, 1, ..., n-1)` at scale `p^{-s}`.
pub fn padic_tuple(p: u64, n: usize, s: u32) -> CellTuple {
    let prime = Prime::new(p).expect("prime");
    let scale = Scale::padic(prime, s).expect("scale");
    let idx: Vec<u64> = (0..n as u64).collect();
    CellTuple::from_indices(FieldSpec::PAdic(prime), scale, &idx).expect("tuple")
}

pub fn origin(n: usize) -> Vec<BigRational> {
    vec![BigRational::zero(); n]
}
