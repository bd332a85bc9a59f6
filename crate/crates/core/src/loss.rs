//! Losses for complex-valued classifiers.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hypothesis::Hypothesis;
use crate::point::{ComplexPoint, Label};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossSpec {
    /// `[sign(Re f) ≠ t] + (Im f)²`; a zero real part counts as an error.
    Complex01,
    /// `max(0, 1 − t·Re f) + (Im f)²`.
    HingeComplex,
}

impl LossSpec {
    pub fn value(self, t: Label, f: Complex64) -> f64 {
        let im2 = f.im * f.im;
        match self {
            LossSpec::Complex01 => {
                let miss = if t.agrees(f.re) { 0.0 } else { 1.0 };
                miss + im2
            }
            LossSpec::HingeComplex => (1.0 - t.sign() * f.re).max(0.0) + im2,
        }
    }

    /// Input gradient of the loss, the vector `(∂/∂x, ∂/∂y)` packed as `x + iy`.
    ///
    /// For `f = u + iv` holomorphic, `∇u = conj(f')` and `∇v = i·conj(f')`.
    /// The 0-1 term has zero gradient almost everywhere.
    pub fn gradient(self, t: Label, f: Complex64, fprime: Complex64) -> Complex64 {
        let grad_u = fprime.conj();
        let grad_v = Complex64::new(0.0, 1.0) * fprime.conj();
        let im_part = grad_v * (2.0 * f.im);
        match self {
            LossSpec::Complex01 => im_part,
            LossSpec::HingeComplex => {
                if 1.0 - t.sign() * f.re > 0.0 {
                    im_part - grad_u * t.sign()
                } else {
                    im_part
                }
            }
        }
    }
}

/// Complex 0-1 loss of `h` on the sample `(z, t)`.
pub fn complex_01_loss(t: Label, z: ComplexPoint, h: &Hypothesis) -> Result<f64> {
    Ok(LossSpec::Complex01.value(t, h.eval(z)?))
}
