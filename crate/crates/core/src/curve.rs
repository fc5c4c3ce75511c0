use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// A polynomial curve `gamma = (gamma_1, ..., gamma_n)` with exact rational
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curve {
    coords: Vec<Polynomial>,
    name: String,
}

impl Curve {
    pub fn new(coords: Vec<Polynomial>, name: impl Into<String>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "curves need dimension at least 2, got {}",
                coords.len()
            )));
        }
        Ok(Curve {
            coords,
            name: name.into(),
        })
    }

    /// `gamma(T) = (T, T^2, ..., T^n)`.
    pub fn moment(n: usize) -> Result<Self> {
        let coords = (1..=n).map(|k| Polynomial::monomial(BigRational::one(), k)).collect();
        Self::new(coords, "moment")
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn coords(&self) -> &[Polynomial] {
        &self.coords
    }

    /// Whether the coordinates are exactly `T, T^2, ..., T^n`.
    pub fn is_moment(&self) -> bool {
        self.coords.iter().enumerate().all(|(i, c)| {
            c.degree() == Some(i + 1) && c.coeffs()[..=i].iter().all(Zero::is_zero) && c.coeffs()[i + 1].is_one()
        })
    }

    pub fn eval(&self, t: &BigRational) -> Vec<BigRational> {
        self.coords.iter().map(|c| c.eval(t)).collect()
    }

    pub fn eval_f64(&self, t: f64) -> Vec<f64> {
        self.coords.iter().map(|c| c.eval_f64(t)).collect()
    }

    /// `deg(gamma_i)`; the zero polynomial counts as degree 0.
    pub fn degrees(&self) -> Vec<usize> {
        self.coords.iter().map(|c| c.degree().unwrap_or(0)).collect()
    }

    /// Total number of monomials appearing across all coordinates.
    pub fn monomial_count(&self) -> usize {
        self.coords.iter().map(Polynomial::monomial_count).sum()
    }

    /// Coordinate-wise `k`-th derivative.
    pub fn derivative(&self, k: usize) -> Vec<Polynomial> {
        self.coords
            .iter()
            .map(|c| (0..k).fold(c.clone(), |p, _| p.derivative()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn moment_curve() {
        let g = Curve::moment(3).unwrap();
        assert!(g.is_moment());
        assert_eq!(g.eval(&rat(2)), vec![rat(2), rat(4), rat(8)]);
        assert_eq!(g.degrees(), vec![1, 2, 3]);
        assert_eq!(g.monomial_count(), 3);
        assert!(Curve::moment(1).is_err());
        let other = Curve::new(
            vec![Polynomial::from_ints(&[0, 1]), Polynomial::from_ints(&[0, 2])],
            "line",
        )
        .unwrap();
        assert!(!other.is_moment());
    }
}
