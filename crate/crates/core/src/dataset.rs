//! Labeled training sets.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{data_lines, fmt_f64, parse_f64, short_hash};
use crate::point::{ComplexPoint, Label};

/// Samples closer than this to the imaginary axis have no sign label.
pub const LABEL_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub z: ComplexPoint,
    pub t: Label,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    samples: Vec<LabeledSample>,
    provenance: String,
}

impl Dataset {
    /// Builds a dataset, rejecting empty input and repeated points.
    pub fn new(samples: Vec<LabeledSample>, provenance: impl Into<String>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::DegenerateDataset("no samples".into()));
        }
        for (i, a) in samples.iter().enumerate() {
            if samples[..i].iter().any(|b| b.z == a.z) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate sample point ({}, {})",
                    a.z.re, a.z.im
                )));
            }
        }
        Ok(Dataset {
            samples,
            provenance: provenance.into(),
        })
    }

    pub fn samples(&self) -> &[LabeledSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// `true` when every point is real and lies in `[0, 1]`.
    pub fn on_unit_interval(&self) -> bool {
        self.samples
            .iter()
            .all(|s| s.z.im == 0.0 && (0.0..=1.0).contains(&s.z.re))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,t\n");
        for s in &self.samples {
            let _ = writeln!(
                out,
                "{},{},{}",
                fmt_f64(s.z.re),
                fmt_f64(s.z.im),
                i64::from(s.t)
            );
        }
        out
    }

    pub fn from_csv(text: &str, provenance: impl Into<String>) -> Result<Self> {
        let mut samples = Vec::new();
        for (lineno, line) in data_lines(text) {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!(
                    "line {}: expected 3 fields, got {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let t: i64 = fields[2]
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            samples.push(LabeledSample {
                z: ComplexPoint::new(parse_f64(fields[0])?, parse_f64(fields[1])?),
                t: Label::try_from(t)?,
            });
        }
        Dataset::new(samples, provenance)
    }

    /// Content hash of the CSV serialization.
    pub fn fingerprint(&self) -> String {
        short_hash(self.to_csv().as_bytes(), 16)
    }
}

/// The circle set `S_n`: the n-th roots of unity labeled by `sign(Re z)`.
///
/// Roots with `|Re z| < 1e-9` are dropped since their sign is undefined.
pub fn make_circle_dataset(n: usize) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be at least 2, got {n}")));
    }
    let samples: Vec<LabeledSample> = (0..n)
        .map(|k| ComplexPoint::from_polar(1.0, TAU * k as f64 / n as f64))
        .filter(|z| z.re.abs() >= LABEL_EPS)
        .map(|z| LabeledSample {
            z,
            t: Label::of(z.re).expect("nonzero real part"),
        })
        .collect();
    if samples.is_empty() {
        return Err(Error::DegenerateDataset(format!(
            "every root of unity of order {n} lies on the imaginary axis"
        )));
    }
    Dataset::new(samples, format!("S_{n} circle"))
}

/// Interval stand-in task: `n` equispaced points of `[0, 1]` labeled by `sign(x − ½)`.
///
/// Points within `1e-9` of `½` are dropped.
pub fn make_interval_dataset(n: usize) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be at least 2, got {n}")));
    }
    let samples: Vec<LabeledSample> = (0..n)
        .map(|k| k as f64 / (n - 1) as f64)
        .filter(|x| (x - 0.5).abs() >= LABEL_EPS)
        .map(|x| LabeledSample {
            z: ComplexPoint::new(x, 0.0),
            t: Label::of(x - 0.5).expect("nonzero offset"),
        })
        .collect();
    Dataset::new(samples, format!("interval toy, {n} equispaced points"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_roots() {
        let d = make_circle_dataset(2).unwrap();
        assert_eq!(d.len(), 2);
        assert!((d.samples()[0].z - ComplexPoint::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(d.samples()[0].t, Label::Positive);
        assert!((d.samples()[1].z - ComplexPoint::new(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(d.samples()[1].t, Label::Negative);
    }

    #[test]
    fn thirty_roots_sample_seven_is_positive() {
        let d = make_circle_dataset(30).unwrap();
        assert_eq!(d.len(), 30);
        let s = d.samples()[7];
        assert!((s.z.re - (84f64.to_radians()).cos()).abs() < 1e-15);
        assert!(s.z.re > 0.104 && s.z.re < 0.106);
        assert_eq!(s.t, Label::Positive);
    }

    #[test]
    fn four_roots_drop_imaginary_axis() {
        let d = make_circle_dataset(4).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.samples()[0].t, Label::Positive);
        assert_eq!(d.samples()[1].t, Label::Negative);
    }

    #[test]
    fn too_small_n_is_rejected() {
        assert!(matches!(make_circle_dataset(1), Err(Error::InvalidArgument(_))));
        assert!(matches!(make_circle_dataset(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn circle_dataset_is_deterministic() {
        assert_eq!(make_circle_dataset(17).unwrap(), make_circle_dataset(17).unwrap());
    }

    #[test]
    fn duplicates_and_empty_rejected() {
        let s = LabeledSample {
            z: ComplexPoint::new(0.5, 0.0),
            t: Label::Positive,
        };
        assert!(Dataset::new(vec![s, s], "dup").is_err());
        assert!(matches!(
            Dataset::new(vec![], "empty"),
            Err(Error::DegenerateDataset(_))
        ));
    }

    #[test]
    fn csv_round_trip() {
        let d = make_circle_dataset(30).unwrap();
        let back = Dataset::from_csv(&d.to_csv(), d.provenance()).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.fingerprint(), d.fingerprint());
    }

    #[test]
    fn interval_toy_has_balanced_labels() {
        let d = make_interval_dataset(16).unwrap();
        assert_eq!(d.len(), 16);
        assert!(d.on_unit_interval());
        let pos = d.samples().iter().filter(|s| s.t == Label::Positive).count();
        assert_eq!(pos, 8);
    }
}
