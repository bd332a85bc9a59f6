//! Points of the complex plane and binary labels.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point `z = re + i·im`. Alias kept so signatures read in domain terms.
pub type ComplexPoint = Complex64;

/// Slack allowed on `|z|² ≤ 1` for disk membership.
pub const DISK_SLACK: f64 = 1e-12;

pub fn in_closed_disk(z: ComplexPoint) -> bool {
    z.norm_sqr() <= 1.0 + DISK_SLACK
}

/// Binary class label `t ∈ {−1, +1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Negative => -1.0,
            Label::Positive => 1.0,
        }
    }

    /// Label of a nonzero real value; `None` when the sign is undefined.
    pub fn of(value: f64) -> Option<Label> {
        if value > 0.0 {
            Some(Label::Positive)
        } else if value < 0.0 {
            Some(Label::Negative)
        } else {
            None
        }
    }

    /// `true` when `value` is classified as this label. A zero value never is.
    pub fn agrees(self, value: f64) -> bool {
        self.sign() * value > 0.0
    }
}

impl TryFrom<i64> for Label {
    type Error = Error;

    fn try_from(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Label::Positive),
            -1 => Ok(Label::Negative),
            other => Err(Error::InvalidArgument(format!(
                "label must be -1 or +1, got {other}"
            ))),
        }
    }
}

impl From<Label> for i64 {
    fn from(l: Label) -> i64 {
        match l {
            Label::Negative => -1,
            Label::Positive => 1,
        }
    }
}

/// Sign labeler of the half-disk task, `t(z) = sign(Re z)`.
///
/// Returns `0.0` within `1e-12` of the imaginary axis, which is the midpoint
/// value expected by quadrature of a jump that sits on a node.
pub fn sign_re(z: ComplexPoint) -> f64 {
    if z.re.abs() < 1e-12 {
        0.0
    } else {
        z.re.signum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_roundtrip_and_agreement() {
        assert_eq!(Label::try_from(1).unwrap(), Label::Positive);
        assert_eq!(Label::try_from(-1).unwrap(), Label::Negative);
        assert!(Label::try_from(0).is_err());
        assert!(Label::Positive.agrees(0.1));
        assert!(!Label::Positive.agrees(0.0));
        assert!(!Label::Negative.agrees(0.0));
        assert_eq!(i64::from(Label::Negative), -1);
    }

    #[test]
    fn disk_membership_uses_slack() {
        assert!(in_closed_disk(ComplexPoint::new(1.0, 0.0)));
        assert!(in_closed_disk(ComplexPoint::from_polar(1.0, 0.3)));
        assert!(!in_closed_disk(ComplexPoint::new(1.0 + 1e-9, 0.0)));
    }
}
