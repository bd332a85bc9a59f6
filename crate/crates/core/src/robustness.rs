//! Gradient attacks, flip radii, boundary crossings, transfer metrics and
//! the normality probe.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::FeatureKind;
use crate::dataset::{make_circle_dataset, LabeledSample};
use crate::error::{Error, Result};
use crate::hypothesis::Hypothesis;
use crate::learner::{train_complex_svc, train_dirac_memorizer, TrainConfig, HARD_MARGIN_C};
use crate::loss::LossSpec;
use crate::par_map;
use crate::point::{sign_re, ComplexPoint, Label};

const STALL_GRADIENT: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackConfig {
    /// Length of each step (steps follow the normalized gradient).
    pub step: f64,
    pub max_iterations: usize,
    /// Perturbation budget `ε_max`.
    pub budget: f64,
    pub bisection_tol: f64,
    /// Stop at the first misclassified iterate; otherwise keep ascending
    /// until the iteration cap.
    #[serde(default = "default_true")]
    pub stop_at_flip: bool,
}

fn default_true() -> bool {
    true
}

impl Default for AttackConfig {
    fn default() -> Self {
        AttackConfig {
            step: 1e-3,
            max_iterations: 4000,
            budget: 2.0,
            bisection_tol: 1e-3,
            stop_at_flip: true,
        }
    }
}

impl AttackConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !(ok(self.step) && ok(self.budget) && ok(self.bisection_tol) && self.max_iterations > 0) {
            return Err(Error::InvalidArgument(
                "attack step, budget, tolerance and iteration cap must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackResult {
    pub point: ComplexPoint,
    pub perturbation: f64,
    pub success: bool,
    /// The gradient vanished before the label flipped.
    pub stalled: bool,
    pub iterations: usize,
}

fn clip_disk(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r > 1.0 {
        z / r
    } else {
        z
    }
}

/// Steepest descent on `t·Re f`: `z ← clip(z − η·t·conj(f')/|f'|)`, kept
/// within `|z − z₀| ≤ budget` and the closed disk.
pub fn gradient_attack(h: &Hypothesis, z0: ComplexPoint, t: Label, cfg: &AttackConfig) -> Result<AttackResult> {
    cfg.validate()?;
    h.features().domain().check(z0)?;
    let flipped = |z: Complex64| -> bool {
        let f = h.eval_pair_unchecked(z).0;
        !t.agrees(f.re)
    };
    let mut z = z0;
    let mut success = flipped(z);
    if success && cfg.stop_at_flip {
        return Ok(AttackResult {
            point: z,
            perturbation: 0.0,
            success,
            stalled: false,
            iterations: 0,
        });
    }
    let mut stalled = false;
    let mut iterations = 0;
    for it in 1..=cfg.max_iterations {
        iterations = it;
        let g = h.eval_pair_unchecked(z).1;
        let gn = g.norm();
        if !(gn > STALL_GRADIENT) {
            stalled = !success;
            break;
        }
        let mut next = z - g.conj() / gn * (cfg.step * t.sign());
        let d = next - z0;
        if d.norm() > cfg.budget {
            next = z0 + d * (cfg.budget / d.norm());
        }
        next = clip_disk(next);
        if (next - z).norm() < 1e-15 {
            break;
        }
        z = next;
        if flipped(z) {
            success = true;
            if cfg.stop_at_flip {
                break;
            }
        }
    }
    if !cfg.stop_at_flip {
        success = flipped(z);
    }
    Ok(AttackResult {
        point: z,
        perturbation: (z - z0).norm(),
        success,
        stalled,
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlipRadius {
    pub radius: f64,
    /// No attack within the full budget succeeded.
    pub at_budget: bool,
}

/// Smallest budget at which the attack succeeds, by bisection.
pub fn min_flip_radius(h: &Hypothesis, z0: ComplexPoint, t: Label, cfg: &AttackConfig) -> Result<FlipRadius> {
    let mut cfg = *cfg;
    cfg.stop_at_flip = true;
    let full = gradient_attack(h, z0, t, &cfg)?;
    if full.success && full.perturbation == 0.0 {
        return Ok(FlipRadius {
            radius: 0.0,
            at_budget: false,
        });
    }
    if !full.success {
        return Ok(FlipRadius {
            radius: cfg.budget,
            at_budget: true,
        });
    }
    let (mut lo, mut hi) = (0.0, full.perturbation.min(cfg.budget));
    while hi - lo > cfg.bisection_tol {
        let mid = 0.5 * (lo + hi);
        let trial = AttackConfig { budget: mid, ..cfg };
        if gradient_attack(h, z0, t, &trial)?.success {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(FlipRadius {
        radius: hi,
        at_budget: false,
    })
}

/// Boundary probes `e^{iθ_j}`, `θ_j = 2π(j + ½)/n`, labelled by `sign(Re z)`;
/// probes on the imaginary axis are skipped.
pub fn boundary_probes(n: usize) -> Vec<LabeledSample> {
    (0..n)
        .filter_map(|j| {
            let z = Complex64::from_polar(1.0, TAU * (j as f64 + 0.5) / n as f64);
            Label::of(sign_re(z)).map(|t| LabeledSample { z, t })
        })
        .collect()
}

/// Flip radii at each probe, in probe order.
pub fn flip_radii(h: &Hypothesis, probes: &[LabeledSample], cfg: &AttackConfig) -> Result<Vec<FlipRadius>> {
    par_map(probes, |p| min_flip_radius(h, p.z, p.t, cfg))
        .into_iter()
        .collect()
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Points of a fine grid over the disk where `Re f ≤ 0` and where `Re f ≥ 0`;
/// used to measure the exact distance to the decision boundary, independent
/// of any attack's ability to reach it.
#[derive(Debug, Clone)]
pub struct DecisionMap {
    nonpositive: Vec<ComplexPoint>,
    nonnegative: Vec<ComplexPoint>,
    pub spacing: f64,
}

impl DecisionMap {
    pub fn new(h: &Hypothesis, resolution: usize) -> Result<Self> {
        if resolution < 3 {
            return Err(Error::InvalidArgument("decision map needs resolution >= 3".into()));
        }
        let spacing = 2.0 / (resolution - 1) as f64;
        let rows: Vec<usize> = (0..resolution).collect();
        let per_row = par_map(&rows, |&i| {
            let mut neg = Vec::new();
            let mut pos = Vec::new();
            for j in 0..resolution {
                let z = Complex64::new(-1.0 + spacing * j as f64, -1.0 + spacing * i as f64);
                if z.norm() > 1.0 {
                    continue;
                }
                let re = h.eval_pair_unchecked(z).0.re;
                if re <= 0.0 {
                    neg.push(z);
                }
                if re >= 0.0 {
                    pos.push(z);
                }
            }
            (neg, pos)
        });
        let mut nonpositive = Vec::new();
        let mut nonnegative = Vec::new();
        for (n, p) in per_row {
            nonpositive.extend(n);
            nonnegative.extend(p);
        }
        Ok(DecisionMap {
            nonpositive,
            nonnegative,
            spacing,
        })
    }

    /// Distance from `z0` to the nearest grid point labelled against `t`;
    /// `None` if the grid has no such point.
    pub fn distance(&self, z0: ComplexPoint, t: Label) -> Option<f64> {
        let set = match t {
            Label::Positive => &self.nonpositive,
            Label::Negative => &self.nonnegative,
        };
        set.iter().map(|z| (z - z0).norm()).min_by(f64::total_cmp)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossings {
    pub count: usize,
    /// Refined crossing angles in `[0, 2π)`.
    pub angles: Vec<f64>,
}

/// Sign changes of `θ ↦ Re f(e^{iθ})` sampled at `θ_j = 2πj/n`, refined by
/// bisection. Samples with `Re f = 0` exactly are skipped.
pub fn boundary_crossings(h: &Hypothesis, n_angles: usize) -> Result<Crossings> {
    if n_angles < 64 {
        return Err(Error::InvalidArgument("at least 64 angles are required".into()));
    }
    let re = |theta: f64| h.eval_pair_unchecked(Complex64::from_polar(1.0, theta)).0.re;
    let samples: Vec<(f64, f64)> = (0..n_angles)
        .map(|j| {
            let th = TAU * j as f64 / n_angles as f64;
            (th, re(th))
        })
        .filter(|(_, v)| *v != 0.0)
        .collect();
    if samples.iter().any(|(_, v)| !v.is_finite()) {
        return Err(Error::SingularEvaluation("non-finite value on the circle".into()));
    }
    let mut angles = Vec::new();
    let n = samples.len();
    for i in 0..n {
        let (a, va) = samples[i];
        let (mut b, vb) = samples[(i + 1) % n];
        if va.signum() == vb.signum() {
            continue;
        }
        if b <= a {
            b += TAU;
        }
        let (mut lo, mut hi) = (a, b);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let vm = re(mid);
            if vm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if vm.signum() == va.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        angles.push((0.5 * (lo + hi)).rem_euclid(TAU));
    }
    angles.sort_by(f64::total_cmp);
    Ok(Crossings {
        count: angles.len(),
        angles,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub grad_norm_target: f64,
    pub grad_cosine_distance: f64,
    pub loss_variance_surrogate: f64,
    pub transfer_rate: f64,
    pub attacks_succeeded: usize,
    pub attacks_transferred: usize,
    pub cosine_points: usize,
}

/// Transferability of attacks crafted on `surrogate` against `target`.
///
/// Gradients are of the complex hinge loss with respect to the input.
/// The loss variance is that of the surrogate's complex 0-1 loss.
pub fn transfer_metrics(
    target: &Hypothesis,
    surrogate: &Hypothesis,
    points: &[LabeledSample],
    cfg: &AttackConfig,
) -> Result<TransferReport> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("no evaluation points".into()));
    }
    let loss = LossSpec::HingeComplex;
    let mut grad_norm = 0.0;
    let mut cos_sum = 0.0;
    let mut cos_n = 0;
    let mut l1 = 0.0;
    let mut l2 = 0.0;
    for p in points {
        let (ft, dt) = target.eval_with_derivative(p.z)?;
        let (fs, ds) = surrogate.eval_with_derivative(p.z)?;
        let gt = loss.gradient(p.t, ft, dt);
        let gs = loss.gradient(p.t, fs, ds);
        grad_norm += gt.norm();
        if gt.norm() > STALL_GRADIENT && gs.norm() > STALL_GRADIENT {
            let cos = (gt.re * gs.re + gt.im * gs.im) / (gt.norm() * gs.norm());
            cos_sum += 1.0 - cos.clamp(-1.0, 1.0);
            cos_n += 1;
        }
        let l = LossSpec::Complex01.value(p.t, fs);
        l1 += l;
        l2 += l * l;
    }
    let n = points.len() as f64;
    if cos_n == 0 {
        return Err(Error::UndefinedMetric(
            "every evaluation point has a vanishing gradient".into(),
        ));
    }
    let mean = l1 / n;
    let variance = (l2 / n - mean * mean).max(0.0);
    let attacks = par_map(points, |p| gradient_attack(surrogate, p.z, p.t, cfg))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut succeeded = 0;
    let mut transferred = 0;
    for (p, a) in points.iter().zip(&attacks) {
        if !a.success {
            continue;
        }
        succeeded += 1;
        let f = target.eval(a.point)?;
        if !p.t.agrees(f.re) {
            transferred += 1;
        }
    }
    if succeeded == 0 {
        return Err(Error::UndefinedMetric("no surrogate attack succeeded".into()));
    }
    Ok(TransferReport {
        grad_norm_target: grad_norm / n,
        grad_cosine_distance: cos_sum / cos_n as f64,
        loss_variance_surrogate: variance,
        transfer_rate: transferred as f64 / succeeded as f64,
        attacks_succeeded: succeeded,
        attacks_transferred: transferred,
        cosine_points: cos_n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum NormalityRule {
    ComplexSvc { k: usize, c: f64, feature_kind: FeatureKind },
    DiracMemorizer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityReport {
    /// `(n, sup deviation)` rows in increasing `n`.
    pub rows: Vec<(usize, f64)>,
    pub reference: String,
}

impl NormalityReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].1 < w[0].1)
    }
}

/// `64 × 64` grid on `[−0.95, 0.95]²` restricted to `|z| ≤ 0.95`.
pub fn normality_grid() -> Vec<ComplexPoint> {
    let n = 64;
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let x = -0.95 + 1.9 * i as f64 / (n - 1) as f64;
            let y = -0.95 + 1.9 * j as f64 / (n - 1) as f64;
            let z = Complex64::new(x, y);
            if z.norm() <= 0.95 {
                out.push(z);
            }
        }
    }
    out
}

/// Trains on `S_n` for each `n` and reports the sup-deviation over `grid`
/// from the reference model trained on `S_reference` (or, for the
/// memorizer, from the labeler `sign(Re z)`).
pub fn normality_probe(
    rule: &NormalityRule,
    n_schedule: &[usize],
    reference_n: usize,
    grid: &[ComplexPoint],
) -> Result<NormalityReport> {
    if n_schedule.is_empty() || !n_schedule.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument("n schedule must be strictly increasing".into()));
    }
    if reference_n < *n_schedule.last().expect("nonempty") {
        return Err(Error::InvalidArgument(
            "reference n must not be below the schedule".into(),
        ));
    }
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty evaluation grid".into()));
    }
    let sup = |f: &dyn Fn(ComplexPoint) -> Result<f64>| -> Result<f64> {
        grid.iter().try_fold(0.0f64, |m, z| Ok(m.max(f(*z)?)))
    };
    match rule {
        NormalityRule::ComplexSvc { k, c, feature_kind } => {
            let cfg = TrainConfig::new(*c, *k, *feature_kind);
            let reference = train_complex_svc(&make_circle_dataset(reference_n)?, &cfg)?;
            let models = par_map(n_schedule, |&n| train_complex_svc(&make_circle_dataset(n)?, &cfg));
            let mut rows = Vec::new();
            for (&n, m) in n_schedule.iter().zip(models) {
                let m = m?;
                let d = sup(&|z| {
                    Ok((m.hypothesis.eval(z)? - reference.hypothesis.eval(z)?).norm())
                })?;
                rows.push((n, d));
            }
            Ok(NormalityReport {
                rows,
                reference: format!("complex SVC on S_{reference_n}, K={k}, C={c}"),
            })
        }
        NormalityRule::DiracMemorizer => {
            let cfg = TrainConfig::new(HARD_MARGIN_C, 1, FeatureKind::Custom);
            let mut rows = Vec::new();
            for &n in n_schedule {
                let m = train_dirac_memorizer(&make_circle_dataset(n)?, &cfg)?;
                let d = sup(&|z| Ok((m.hypothesis.eval(z)? - sign_re(z)).norm()))?;
                rows.push((n, d));
            }
            Ok(NormalityReport {
                rows,
                reference: "labeler sign(Re z)".into(),
            })
        }
    }
}
