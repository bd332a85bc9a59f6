//! Reproducing kernels of the disk and projections onto holomorphic functions.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::FeatureSet;
use crate::error::{Error, Result};
use crate::hypothesis::Hypothesis;
use crate::io::fmt_f64;
use crate::point::{in_closed_disk, ComplexPoint};
use crate::quadrature::{default_disk_rule, ComplexSum, QuadratureRule};

/// Angles used for boundary projections. The labelers of interest jump on the
/// circle, so the periodic trapezoid rule only converges like `k/N²`.
pub const SZEGO_ANGLES: usize = 32768;

const POLE_EPS: f64 = 1e-10;
const CIRCLE_EPS: f64 = 1e-9;

fn check_disk(z: ComplexPoint) -> Result<()> {
    if in_closed_disk(z) {
        Ok(())
    } else {
        Err(Error::DomainViolation {
            re: z.re,
            im: z.im,
            domain: "unit disk",
        })
    }
}

fn denominator(z: ComplexPoint, zeta: ComplexPoint) -> Result<Complex64> {
    let d = Complex64::new(1.0, 0.0) - z * zeta.conj();
    if d.norm() < POLE_EPS {
        return Err(Error::SingularEvaluation(format!(
            "kernel pole at z={z}, zeta={zeta}"
        )));
    }
    Ok(d)
}

/// `1 / (π (1 − z·conj ζ)²)`.
pub fn bergman_kernel(z: ComplexPoint, zeta: ComplexPoint) -> Result<Complex64> {
    check_disk(z)?;
    check_disk(zeta)?;
    let d = denominator(z, zeta)?;
    Ok(1.0 / (PI * d * d))
}

/// `1 / (2π (1 − z·conj ζ))` for `ζ` on the unit circle.
pub fn szego_kernel(z: ComplexPoint, zeta: ComplexPoint) -> Result<Complex64> {
    check_disk(z)?;
    if (zeta.norm() - 1.0).abs() > CIRCLE_EPS {
        return Err(Error::DomainViolation {
            re: zeta.re,
            im: zeta.im,
            domain: "unit circle",
        });
    }
    let d = denominator(z, zeta)?;
    Ok(1.0 / (TAU * d))
}

/// `Σ_{k<K} φ_k(z)·conj(φ_k(ζ))` over the orthonormal monomials.
pub fn truncated_bergman_kernel(k: usize, z: ComplexPoint, zeta: ComplexPoint) -> Complex64 {
    let w = z * zeta.conj();
    let mut p = Complex64::new(1.0, 0.0);
    let mut sum = ComplexSum::default();
    for j in 0..k {
        sum.add(p * ((j as f64 + 1.0) / PI));
        p *= w;
    }
    sum.value()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    BergmanDisk,
    SzegoDisk,
    TruncatedSeries,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    /// Number of series terms; used by [`KernelKind::TruncatedSeries`].
    pub truncation: usize,
}

impl KernelSpec {
    pub fn bergman() -> Self {
        KernelSpec {
            kind: KernelKind::BergmanDisk,
            truncation: 30,
        }
    }

    pub fn szego() -> Self {
        KernelSpec {
            kind: KernelKind::SzegoDisk,
            truncation: 30,
        }
    }

    pub fn eval(&self, z: ComplexPoint, zeta: ComplexPoint) -> Result<Complex64> {
        match self.kind {
            KernelKind::BergmanDisk => bergman_kernel(z, zeta),
            KernelKind::SzegoDisk => szego_kernel(z, zeta),
            KernelKind::TruncatedSeries => {
                check_disk(z)?;
                check_disk(zeta)?;
                Ok(truncated_bergman_kernel(self.truncation, z, zeta))
            }
        }
    }
}

/// Projection of a labeling function onto the first `k` holomorphic modes.
///
/// Bergman and truncated-series kernels use the disk inner product; the
/// Szegő kernel uses the circle inner product with boundary basis
/// `e^{ikθ}/√(2π)`, so the resulting function is `Σ_k c_k z^k` with
/// `c_k = (1/2π) ∫ labeler(e^{iθ}) e^{−ikθ} dθ`. Either way the result is
/// returned as a hypothesis over the orthonormal disk monomials.
pub fn holomorphic_bayes<F>(labeler: F, kernel: &KernelSpec, k: usize) -> Result<Hypothesis>
where
    F: Fn(ComplexPoint) -> Complex64,
{
    let rule = match kernel.kind {
        KernelKind::SzegoDisk => QuadratureRule::circle(SZEGO_ANGLES),
        _ => default_disk_rule().clone(),
    };
    holomorphic_bayes_with(labeler, kernel, k, &rule)
}

/// As [`holomorphic_bayes`] with an explicit quadrature rule.
pub fn holomorphic_bayes_with<F>(
    labeler: F,
    kernel: &KernelSpec,
    k: usize,
    rule: &QuadratureRule,
) -> Result<Hypothesis>
where
    F: Fn(ComplexPoint) -> Complex64,
{
    if k == 0 {
        return Err(Error::InvalidArgument("truncation must be at least 1".into()));
    }
    let values: Vec<Complex64> = rule
        .points()
        .iter()
        .map(|&z| {
            let v = labeler(z);
            if v.re.is_finite() && v.im.is_finite() {
                Ok(v)
            } else {
                Err(Error::IntegrationFailure { re: z.re, im: z.im })
            }
        })
        .collect::<Result<_>>()?;
    let basis = FeatureSet::monomial_orthonormal(k)?;
    let mut sums = vec![ComplexSum::default(); k];
    for ((z, w), v) in rule.points().iter().zip(rule.weights()).zip(&values) {
        let zc = z.conj();
        let mut p = *v * *w;
        for s in sums.iter_mut() {
            s.add(p);
            p *= zc;
        }
    }
    // sums[j] = ∫ labeler · conj(z)^j
    let coeffs = sums
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let norm = ((j as f64 + 1.0) / PI).sqrt();
            match kernel.kind {
                // monomial coefficient (1/2π)∫..., rescaled to the orthonormal basis
                KernelKind::SzegoDisk => s.value() / TAU / norm,
                _ => s.value() * norm,
            }
        })
        .collect();
    Hypothesis::new(basis, coeffs)
}

/// CSV with columns `k,re,im` listing coefficients of `z^k`.
pub fn monomial_coefficients_csv(h: &Hypothesis) -> Result<String> {
    let c = h.monomial_coefficients().ok_or_else(|| {
        Error::InvalidArgument("hypothesis is not over a monomial base".into())
    })?;
    let mut out = String::from("k,re,im\n");
    for (k, v) in c.iter().enumerate() {
        let _ = writeln!(out, "{k},{},{}", fmt_f64(v.re), fmt_f64(v.im));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::sign_re;
    use crate::quadrature::integrate_disk;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bergman_examples() {
        let k0 = bergman_kernel(c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!((k0.re - 1.0 / PI).abs() < 1e-15);
        let k = bergman_kernel(c(0.5, 0.0), c(0.5, 0.0)).unwrap();
        let series = truncated_bergman_kernel(200, c(0.5, 0.0), c(0.5, 0.0));
        assert!((k - series).norm() < 1e-10);
        assert!((k.re - 0.56588).abs() < 1e-5);
        let a = bergman_kernel(c(0.3, 0.0), c(0.0, 0.2)).unwrap();
        let b = bergman_kernel(c(0.0, 0.2), c(0.3, 0.0)).unwrap();
        assert!((a - b.conj()).norm() < 1e-15);
    }

    #[test]
    fn szego_examples() {
        for theta in [0.0, 1.0, 2.5] {
            let v = szego_kernel(c(0.0, 0.0), Complex64::from_polar(1.0, theta)).unwrap();
            assert!((v.re - 1.0 / TAU).abs() < 1e-15 && v.im.abs() < 1e-15);
        }
        let v = szego_kernel(c(0.5, 0.0), c(1.0, 0.0)).unwrap();
        let geometric: f64 = (0..200).map(|k| 0.5f64.powi(k)).sum::<f64>() / TAU;
        assert!((v.re - geometric).abs() < 1e-12);
        assert!((v.re - std::f64::consts::FRAC_1_PI).abs() < 1e-5);
        assert!(szego_kernel(c(0.0, 0.0), c(0.5, 0.0)).is_err());
    }

    #[test]
    fn poles_are_reported() {
        assert!(matches!(
            bergman_kernel(c(1.0, 0.0), c(1.0, 0.0)),
            Err(Error::SingularEvaluation(_))
        ));
        assert!(matches!(
            szego_kernel(c(0.0, 1.0), c(0.0, 1.0)),
            Err(Error::SingularEvaluation(_))
        ));
    }

    #[test]
    fn szego_projection_of_constant_is_constant() {
        let h = holomorphic_bayes(|_| c(1.0, 0.0), &KernelSpec::szego(), 5).unwrap();
        let m = h.monomial_coefficients().unwrap();
        assert!((m[0] - 1.0).norm() < 1e-12);
        assert!(m[1..].iter().all(|v| v.norm() < 1e-12));
        assert!((h.eval(c(0.3, -0.4)).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn szego_projection_of_sign_is_arctan_series() {
        let h = holomorphic_bayes(|z| c(sign_re(z), 0.0), &KernelSpec::szego(), 30).unwrap();
        let m = h.monomial_coefficients().unwrap();
        assert!((m[1].re - std::f64::consts::FRAC_2_PI).abs() < 1e-5);
        assert!((m[3].re + 0.21221).abs() < 1e-5);
        for (k, v) in m.iter().enumerate() {
            let expect = if k % 2 == 1 {
                let s = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
                2.0 / PI * s / k as f64
            } else {
                0.0
            };
            assert!((v - expect).norm() <= 1e-6, "k={k}: {v} vs {expect}");
        }
        assert!(h.eval(c(0.0, 0.0)).unwrap().norm() < 1e-12);
    }

    #[test]
    fn szego_projection_matches_discrete_fourier_oracle() {
        // Independent oracle: DFT of sign(cos θ) at 4096 angles, sampled at
        // cell midpoints so no node lands on a jump.
        let n = 4096;
        let h = holomorphic_bayes(|z| c(sign_re(z), 0.0), &KernelSpec::szego(), 8).unwrap();
        let m = h.monomial_coefficients().unwrap();
        for k in 0..8 {
            let mut s = c(0.0, 0.0);
            for j in 0..n {
                let th = TAU * (j as f64 + 0.5) / n as f64;
                s += Complex64::from_polar(th.cos().signum(), -(k as f64) * th);
            }
            s /= n as f64;
            assert!((m[k] - s).norm() < 1e-5, "k={k}");
        }
    }

    #[test]
    fn bergman_reproducing_property() {
        let basis = FeatureSet::monomial_orthonormal(20).unwrap();
        let pts = [
            c(0.1, 0.2),
            c(-0.4, 0.3),
            c(0.55, -0.1),
            c(0.0, -0.6),
            c(-0.2, -0.2),
        ];
        for j in 0..20 {
            let phi = Hypothesis::unit(basis.clone(), j).unwrap();
            for &z in &pts {
                // ⟨φ_j, K(·, z)⟩ = ∫ φ_j(ζ)·conj(K(ζ, z)) dV = ∫ φ_j(ζ)·K(z, ζ) dV
                let got = integrate_disk(|zeta| phi.eval(zeta).unwrap() * bergman_kernel(z, zeta).unwrap())
                .unwrap();
                let expect = phi.eval(z).unwrap();
                assert!((got - expect).norm() < 1e-6, "j={j}, z={z}");
            }
        }
    }

    #[test]
    fn bergman_projection_reproduces_polynomials() {
        let h = holomorphic_bayes(|z| z * z - 0.5, &KernelSpec::bergman(), 6).unwrap();
        let m = h.monomial_coefficients().unwrap();
        assert!((m[0] + 0.5).norm() < 1e-10);
        assert!((m[2] - 1.0).norm() < 1e-10);
        assert!(m[1].norm() < 1e-10 && m[3].norm() < 1e-10);
    }

    #[test]
    fn csv_lists_coefficients() {
        let h = holomorphic_bayes(|_| c(1.0, 0.0), &KernelSpec::szego(), 2).unwrap();
        let csv = monomial_coefficients_csv(&h).unwrap();
        assert!(csv.starts_with("k,re,im\n0,"));
        assert_eq!(csv.lines().count(), 3);
    }
}
