//! Hypotheses `f(z) = Σ_k a_k φ_k(z)` over a feature set.

use num_complex::Complex64;

use crate::basis::{BaseFeatures, FeatureSet};
use crate::error::{Error, Result};
use crate::point::ComplexPoint;

#[derive(Debug, Clone)]
pub struct Hypothesis {
    features: FeatureSet,
    coeffs: Vec<Complex64>,
    folded: Vec<Complex64>,
}

impl Hypothesis {
    pub fn new(features: FeatureSet, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != features.len() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for {} features",
                coeffs.len(),
                features.len()
            )));
        }
        let folded = features.fold(&coeffs);
        Ok(Hypothesis {
            features,
            coeffs,
            folded,
        })
    }

    pub fn zero(features: FeatureSet) -> Self {
        let k = features.len();
        Hypothesis::new(features, vec![Complex64::new(0.0, 0.0); k]).expect("matching length")
    }

    /// Coefficient vector `e_k`.
    pub fn unit(features: FeatureSet, k: usize) -> Result<Self> {
        let mut c = vec![Complex64::new(0.0, 0.0); features.len()];
        *c.get_mut(k)
            .ok_or_else(|| Error::InvalidArgument(format!("feature index {k} out of range")))? =
            Complex64::new(1.0, 0.0);
        Hypothesis::new(features, c)
    }

    pub fn features(&self) -> &FeatureSet {
        &self.features
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficients of `z^p` when the base family is plain monomials.
    pub fn monomial_coefficients(&self) -> Option<&[Complex64]> {
        match self.features.base() {
            BaseFeatures::Monomials { .. } => Some(&self.folded),
            _ => None,
        }
    }

    /// `α·self + β·other` over the same feature set.
    pub fn combine(&self, alpha: Complex64, other: &Hypothesis, beta: Complex64) -> Result<Self> {
        if self.features != other.features {
            return Err(Error::InvalidArgument(
                "cannot combine hypotheses over different feature sets".into(),
            ));
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        Hypothesis::new(self.features.clone(), coeffs)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c * s).collect();
        Hypothesis::new(self.features.clone(), coeffs).expect("same length")
    }

    pub fn eval(&self, z: ComplexPoint) -> Result<Complex64> {
        self.features.domain().check(z)?;
        Ok(self.features.combine_base(&self.folded, z).0)
    }

    pub fn derivative(&self, z: ComplexPoint) -> Result<Complex64> {
        self.features.domain().check(z)?;
        Ok(self.features.combine_base(&self.folded, z).1)
    }

    /// `(f(z), f'(z))` in one pass.
    pub fn eval_with_derivative(&self, z: ComplexPoint) -> Result<(Complex64, Complex64)> {
        self.features.domain().check(z)?;
        Ok(self.features.combine_base(&self.folded, z))
    }

    /// Evaluation without the domain check, for callers that already clip.
    pub(crate) fn eval_pair_unchecked(&self, z: ComplexPoint) -> (Complex64, Complex64) {
        self.features.combine_base(&self.folded, z)
    }

    /// `‖a‖²` restricted to regularized features.
    pub fn coefficient_norm_sqr(&self) -> f64 {
        self.coeffs
            .iter()
            .zip(self.features.regularized())
            .filter(|(_, r)| **r)
            .map(|(c, _)| c.norm_sqr())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn basis(k: usize) -> FeatureSet {
        FeatureSet::monomial_orthonormal(k).unwrap()
    }

    #[test]
    fn zero_hypothesis_vanishes() {
        let h = Hypothesis::zero(basis(5));
        assert_eq!(h.eval(Complex64::new(0.2, 0.7)).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn unit_coefficients_reproduce_basis_values() {
        let h1 = Hypothesis::unit(basis(3), 1).unwrap();
        let v = h1.eval(Complex64::new(1.0, 0.0)).unwrap();
        assert!((v.re - (2.0 / PI).sqrt()).abs() < 1e-15);
        assert!((v.re - 0.79788).abs() < 1e-5);
        let h0 = Hypothesis::unit(basis(3), 0).unwrap();
        let v0 = h0.eval(Complex64::new(0.0, 0.0)).unwrap();
        assert!((v0.re - 0.56419).abs() < 1e-5);
    }

    #[test]
    fn derivative_examples() {
        let b = basis(3);
        let d0 = Hypothesis::unit(b.clone(), 0).unwrap();
        assert_eq!(d0.derivative(Complex64::new(0.4, 0.1)).unwrap().norm(), 0.0);
        let d1 = Hypothesis::unit(b.clone(), 1).unwrap();
        let v = d1.derivative(Complex64::new(-0.3, 0.6)).unwrap();
        assert!((v - Complex64::new((2.0 / PI).sqrt(), 0.0)).norm() < 1e-15);
        // e_2 at 0.5: central difference of the value, step 1e-5.
        let d2 = Hypothesis::unit(b, 2).unwrap();
        let z = Complex64::new(0.5, 0.0);
        let step = 1e-5;
        let fd = (d2.eval(z + step).unwrap() - d2.eval(z - step).unwrap()) / (2.0 * step);
        let got = d2.derivative(z).unwrap();
        assert!((got - fd).norm() < 1e-8);
        assert!((got.re - (3.0 / PI).sqrt()).abs() < 1e-12);
        assert!((got.re - 0.97721).abs() < 1e-5);
    }

    #[test]
    fn outside_domain_is_rejected() {
        let h = Hypothesis::unit(basis(2), 1).unwrap();
        assert!(matches!(
            h.eval(Complex64::new(0.9, 0.9)),
            Err(Error::DomainViolation { .. })
        ));
        assert!(h.derivative(Complex64::new(0.0, -1.01)).is_err());
    }

    #[test]
    fn combine_requires_same_features() {
        let a = Hypothesis::unit(basis(2), 0).unwrap();
        let b = Hypothesis::unit(basis(3), 0).unwrap();
        assert!(a.combine(Complex64::new(1.0, 0.0), &b, Complex64::new(1.0, 0.0)).is_err());
    }
}
