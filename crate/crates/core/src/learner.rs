//! Support vector learning rules over holomorphic and real feature sets.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{Domain, FeatureKind, FeatureSet};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::features::{
    harmonic_transform, project_activation, relu_ann_features, ActivationFamily,
    ANN_GRID_POINTS,
};
use crate::hypothesis::Hypothesis;
use crate::io::{data_lines, fmt_f64, parse_f64};
use crate::qp::{solve_qp, KktResiduals, QpProblem, QpSolution, DEFAULT_TOL};

/// Soft-margin weight that stands in for a hard margin.
pub const HARD_MARGIN_C: f64 = 1e8;
/// Largest slack accepted by the hard-margin post-check.
pub const HARD_MARGIN_SLACK: f64 = 1e-6;

fn default_true() -> bool {
    true
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_power() -> u32 {
    3
}

fn default_grid() -> usize {
    ANN_GRID_POINTS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub c: f64,
    pub k: usize,
    pub feature_kind: FeatureKind,
    #[serde(default = "default_true")]
    pub conjugate_samples: bool,
    #[serde(default = "default_tol")]
    pub qp_tol: f64,
    /// Exponent of the Cauchy activation used for disk ANN features.
    #[serde(default = "default_power")]
    pub activation_power: u32,
    /// Grid size for tabulated interval ANN features.
    #[serde(default = "default_grid")]
    pub ann_grid_points: usize,
}

impl TrainConfig {
    pub fn new(c: f64, k: usize, feature_kind: FeatureKind) -> Self {
        TrainConfig {
            c,
            k,
            feature_kind,
            conjugate_samples: true,
            qp_tol: DEFAULT_TOL,
            activation_power: default_power(),
            ann_grid_points: ANN_GRID_POINTS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::InvalidArgument(format!("C must be positive, got {}", self.c)));
        }
        if self.k == 0 {
            return Err(Error::InvalidArgument("K must be at least 1".into()));
        }
        if !(self.qp_tol.is_finite() && self.qp_tol > 0.0) {
            return Err(Error::InvalidArgument("QP tolerance must be positive".into()));
        }
        if self.ann_grid_points < 3 {
            return Err(Error::InvalidArgument("ANN grid needs at least 3 points".into()));
        }
        Ok(())
    }

    pub fn is_hard_margin(&self) -> bool {
        self.c >= HARD_MARGIN_C
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureDomain {
    Disk,
    Interval,
}

impl FeatureDomain {
    pub fn of(data: &Dataset) -> Self {
        if data.on_unit_interval() {
            FeatureDomain::Interval
        } else {
            FeatureDomain::Disk
        }
    }
}

/// Features for a config.
///
/// Monomial and harmonic kinds are the disk bases (usable on `[0, 1]` too).
/// ANN kinds project an activation family: the Cauchy family
/// `(1 − conj(ω) z)^{−p}` on the disk, ReLU on the interval. On the disk the
/// harmonic ANN set is the harmonic transform of the ANN set; on the interval
/// it is the ReLU projection of the harmonic disk basis.
pub fn build_features(cfg: &TrainConfig, domain: FeatureDomain) -> Result<FeatureSet> {
    cfg.validate()?;
    let ortho = FeatureSet::monomial_orthonormal(cfg.k)?;
    match (cfg.feature_kind, domain) {
        (FeatureKind::MonomialOrthonormal, _) => Ok(ortho),
        (FeatureKind::Harmonic, _) => harmonic_transform(&ortho),
        (FeatureKind::AnnProjected, FeatureDomain::Disk) => project_activation(
            &ActivationFamily::CauchyPower {
                power: cfg.activation_power,
            },
            &ortho,
            &[],
            false,
        ),
        (FeatureKind::AnnProjectedHarmonic, FeatureDomain::Disk) => {
            let ann = project_activation(
                &ActivationFamily::CauchyPower {
                    power: cfg.activation_power,
                },
                &ortho,
                &[],
                false,
            )?;
            harmonic_transform(&ann)
        }
        (FeatureKind::AnnProjected, FeatureDomain::Interval) => {
            Ok(relu_ann_features(cfg.k, cfg.ann_grid_points)?.0)
        }
        (FeatureKind::AnnProjectedHarmonic, FeatureDomain::Interval) => {
            Ok(relu_ann_features(cfg.k, cfg.ann_grid_points)?.1)
        }
        (kind, _) => Err(Error::InvalidArgument(format!(
            "feature kind {kind:?} cannot be built from a config"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    ComplexSvc,
    RealSvc,
}

#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub hypothesis: Hypothesis,
    pub qp: QpSolution,
    pub slacks: Vec<f64>,
    /// Multipliers of the margin constraints, one per sample.
    pub duals: Vec<f64>,
    pub config: TrainConfig,
    pub rule: Rule,
    pub domain: FeatureDomain,
    pub dataset_fingerprint: String,
}

impl TrainedModel {
    pub fn objective(&self) -> f64 {
        self.qp.objective
    }

    pub fn total_slack(&self) -> f64 {
        self.slacks.iter().sum()
    }

    /// `t_n·Re f(w_n)` for each sample, `w_n` being the point the constraint uses.
    pub fn margins(&self, data: &Dataset) -> Result<Vec<f64>> {
        data.samples()
            .iter()
            .map(|s| {
                let w = constraint_point(s.z, self.config.conjugate_samples && self.rule == Rule::ComplexSvc);
                Ok(s.t.sign() * self.hypothesis.eval(w)?.re)
            })
            .collect()
    }

    pub fn coefficients_csv(&self) -> String {
        let mut out = String::from("k,re,im\n");
        for (k, c) in self.hypothesis.coeffs().iter().enumerate() {
            let _ = writeln!(out, "{k},{},{}", fmt_f64(c.re), fmt_f64(c.im));
        }
        out
    }

    pub fn metadata(&self) -> ModelMetadata {
        ModelMetadata {
            config: self.config.clone(),
            rule: self.rule,
            domain: self.domain,
            dataset_fingerprint: self.dataset_fingerprint.clone(),
            objective: self.qp.objective,
            kkt: self.qp.kkt,
            iterations: self.qp.iterations,
            total_slack: self.total_slack(),
            features: self.hypothesis.features().description().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub config: TrainConfig,
    pub rule: Rule,
    pub domain: FeatureDomain,
    pub dataset_fingerprint: String,
    pub objective: f64,
    pub kkt: KktResiduals,
    pub iterations: usize,
    pub total_slack: f64,
    pub features: String,
}

/// Reads coefficients written by [`TrainedModel::coefficients_csv`].
pub fn coefficients_from_csv(text: &str) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    for (lineno, line) in data_lines(text) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 3 {
            return Err(Error::Parse(format!("line {lineno}: expected k,re,im")));
        }
        let k: usize = f[0]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("line {lineno}: bad index")))?;
        if k != out.len() {
            return Err(Error::Parse(format!("line {lineno}: indices must be 0,1,2,...")));
        }
        out.push(Complex64::new(parse_f64(f[1])?, parse_f64(f[2])?));
    }
    Ok(out)
}

/// Rebuilds a hypothesis from saved coefficients and metadata.
pub fn load_hypothesis(coeffs_csv: &str, metadata_json: &str) -> Result<(Hypothesis, ModelMetadata)> {
    let meta: ModelMetadata =
        serde_json::from_str(metadata_json).map_err(|e| Error::Parse(e.to_string()))?;
    if meta.rule != Rule::ComplexSvc {
        return Err(Error::InvalidArgument(
            "only complex SVC models can be rebuilt from their config".into(),
        ));
    }
    let features = build_features(&meta.config, meta.domain)?;
    let h = Hypothesis::new(features, coefficients_from_csv(coeffs_csv)?)?;
    Ok((h, meta))
}

fn constraint_point(z: Complex64, conjugate: bool) -> Complex64 {
    if conjugate {
        z.conj()
    } else {
        z
    }
}

/// Complex soft-margin SVC with features built from `cfg`.
pub fn train_complex_svc(data: &Dataset, cfg: &TrainConfig) -> Result<TrainedModel> {
    let domain = FeatureDomain::of(data);
    let features = build_features(cfg, domain)?;
    train_complex_svc_with(data, features, cfg, domain)
}

/// Complex soft-margin SVC over explicit features.
///
/// Variables are `(Re a, Im a, ξ)`; constraints per sample are
/// `t·Re f(w) + ξ ≥ 1`, `ξ − Im f(w) ≥ 0`, `ξ + Im f(w) ≥ 0`, `ξ ≥ 0` with
/// `w = conj(z)` when `conjugate_samples` is set.
pub fn train_complex_svc_with(
    data: &Dataset,
    features: FeatureSet,
    cfg: &TrainConfig,
    domain: FeatureDomain,
) -> Result<TrainedModel> {
    cfg.validate()?;
    let k = features.len();
    let n = data.len();
    let nv = 2 * k + n;
    let m = 4 * n;
    let mut q = DMatrix::<f64>::zeros(nv, nv);
    for (j, reg) in features.regularized().iter().enumerate() {
        if *reg {
            q[(j, j)] = 1.0;
            q[(k + j, k + j)] = 1.0;
        }
    }
    let mut c = DVector::<f64>::zeros(nv);
    c.rows_mut(2 * k, n).fill(cfg.c);
    let mut a = DMatrix::<f64>::zeros(m, nv);
    let mut b = DVector::<f64>::zeros(m);
    for (i, s) in data.samples().iter().enumerate() {
        let w = constraint_point(s.z, cfg.conjugate_samples);
        let phi = features.values(w)?;
        let t = s.t.sign();
        let xi = 2 * k + i;
        let (r0, r1, r2, r3) = (4 * i, 4 * i + 1, 4 * i + 2, 4 * i + 3);
        for (j, v) in phi.iter().enumerate() {
            // Re f = Σ α p − β q, Im f = Σ α q + β p
            a[(r0, j)] = t * v.re;
            a[(r0, k + j)] = -t * v.im;
            a[(r1, j)] = -v.im;
            a[(r1, k + j)] = -v.re;
            a[(r2, j)] = v.im;
            a[(r2, k + j)] = v.re;
        }
        a[(r0, xi)] = 1.0;
        a[(r1, xi)] = 1.0;
        a[(r2, xi)] = 1.0;
        a[(r3, xi)] = 1.0;
        b[r0] = 1.0;
    }
    let problem = QpProblem::new(q, c, a, b)?;
    let sol = solve_qp(&problem, cfg.qp_tol).map_err(|e| match e {
        Error::Infeasible => Error::Internal("soft-margin program reported infeasible".into()),
        other => other,
    })?;
    let coeffs: Vec<Complex64> = (0..k).map(|j| Complex64::new(sol.x[j], sol.x[k + j])).collect();
    let slacks: Vec<f64> = (0..n).map(|i| sol.x[2 * k + i]).collect();
    let duals: Vec<f64> = (0..n).map(|i| sol.lambda[4 * i]).collect();
    finish(data, features, coeffs, slacks, duals, sol, cfg, Rule::ComplexSvc, domain)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    data: &Dataset,
    features: FeatureSet,
    coeffs: Vec<Complex64>,
    slacks: Vec<f64>,
    duals: Vec<f64>,
    qp: QpSolution,
    cfg: &TrainConfig,
    rule: Rule,
    domain: FeatureDomain,
) -> Result<TrainedModel> {
    if cfg.is_hard_margin() {
        let worst = slacks.iter().copied().fold(0.0, f64::max);
        if worst > HARD_MARGIN_SLACK {
            return Err(Error::MarginInfeasible(worst));
        }
    }
    Ok(TrainedModel {
        hypothesis: Hypothesis::new(features, coeffs)?,
        qp,
        slacks,
        duals,
        config: cfg.clone(),
        rule,
        domain,
        dataset_fingerprint: data.fingerprint(),
    })
}

/// Real soft-margin SVC: `min ½‖w‖² + CΣξ` with `t·Σ w_k g_k(x) ≥ 1 − ξ`.
/// Every feature must be real-valued at the samples.
pub fn train_real_svc(data: &Dataset, features: FeatureSet, cfg: &TrainConfig) -> Result<TrainedModel> {
    cfg.validate()?;
    let k = features.len();
    let n = data.len();
    let nv = k + n;
    let mut q = DMatrix::<f64>::zeros(nv, nv);
    for (j, reg) in features.regularized().iter().enumerate() {
        if *reg {
            q[(j, j)] = 1.0;
        }
    }
    let mut c = DVector::<f64>::zeros(nv);
    c.rows_mut(k, n).fill(cfg.c);
    let mut a = DMatrix::<f64>::zeros(2 * n, nv);
    let mut b = DVector::<f64>::zeros(2 * n);
    for (i, s) in data.samples().iter().enumerate() {
        let g = features.values(s.z)?;
        if let Some(v) = g.iter().find(|v| v.im.abs() > 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "real SVC needs real features; got imaginary part {:e}",
                v.im
            )));
        }
        for (j, v) in g.iter().enumerate() {
            a[(2 * i, j)] = s.t.sign() * v.re;
        }
        a[(2 * i, k + i)] = 1.0;
        a[(2 * i + 1, k + i)] = 1.0;
        b[2 * i] = 1.0;
    }
    let problem = QpProblem::new(q, c, a, b)?;
    let sol = solve_qp(&problem, cfg.qp_tol).map_err(|e| match e {
        Error::Infeasible => Error::Internal("soft-margin program reported infeasible".into()),
        other => other,
    })?;
    let coeffs = (0..k).map(|j| Complex64::new(sol.x[j], 0.0)).collect();
    let slacks = (0..n).map(|i| sol.x[k + i]).collect();
    let duals = (0..n).map(|i| sol.lambda[2 * i]).collect();
    let domain = FeatureDomain::of(data);
    finish(data, features, coeffs, slacks, duals, sol, cfg, Rule::RealSvc, domain)
}

/// `Σ_n λ_n t_n g(x_n)`: the coefficients of the dual-form solution
/// `h* = Σ λ_n t_n s(x_n; ·)` projected on the feature basis.
pub fn dual_reconstruction(model: &TrainedModel, data: &Dataset) -> Result<Vec<Complex64>> {
    let k = model.hypothesis.features().len();
    let mut out = vec![Complex64::new(0.0, 0.0); k];
    for (s, l) in data.samples().iter().zip(&model.duals) {
        let g = model.hypothesis.features().values(s.z)?;
        for (o, v) in out.iter_mut().zip(g) {
            *o += v * (l * s.t.sign());
        }
    }
    Ok(out)
}

/// The robust rule: the same program on harmonic features.
pub fn train_robust(data: &Dataset, cfg: &TrainConfig) -> Result<TrainedModel> {
    let mut robust = cfg.clone();
    robust.feature_kind = match cfg.feature_kind {
        FeatureKind::MonomialOrthonormal | FeatureKind::Harmonic => FeatureKind::Harmonic,
        FeatureKind::AnnProjected | FeatureKind::AnnProjectedHarmonic => {
            FeatureKind::AnnProjectedHarmonic
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "no harmonic counterpart for {other:?}"
            )))
        }
    };
    train_complex_svc(data, &robust)
}

/// The robust real rule: harmonic transform of `features`, then real SVC.
pub fn train_robust_real(data: &Dataset, features: &FeatureSet, cfg: &TrainConfig) -> Result<TrainedModel> {
    train_real_svc(data, harmonic_transform(features)?, cfg)
}

/// Point-evaluation memorizer: one Dirac feature per sample.
pub fn train_dirac_memorizer(data: &Dataset, cfg: &TrainConfig) -> Result<TrainedModel> {
    let domain = if data.on_unit_interval() {
        Domain::UnitInterval
    } else {
        Domain::UnitDisk
    };
    let nodes = data.samples().iter().map(|s| s.z).collect();
    train_real_svc(data, FeatureSet::dirac(nodes, domain)?, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{make_circle_dataset, LabeledSample};
    use crate::features::dirichlet_energy;
    use crate::point::Label;
    use crate::qp::brute_force_qp;
    use std::f64::consts::PI;

    fn sample(x: f64, t: Label) -> LabeledSample {
        LabeledSample {
            z: Complex64::new(x, 0.0),
            t,
        }
    }

    #[test]
    fn two_antipodal_samples_hard_margin() {
        let data = make_circle_dataset(2).unwrap();
        let cfg = TrainConfig::new(HARD_MARGIN_C, 2, FeatureKind::MonomialOrthonormal);
        let m = train_complex_svc(&data, &cfg).unwrap();
        let a = m.hypothesis.coeffs();
        assert!(a[0].norm() < 1e-6);
        assert!((a[1].re - (PI / 2.0).sqrt()).abs() < 1e-6, "{}", a[1]);
        assert!(a[1].im.abs() < 1e-6);
        assert!((m.objective() - PI / 4.0).abs() < 1e-6);
        assert!(m.slacks.iter().all(|x| *x <= 1e-6));
    }

    #[test]
    fn two_sample_program_matches_oracle() {
        // Soft margin so the oracle sees a well-posed program of 8 constraints.
        let data = make_circle_dataset(2).unwrap();
        let cfg = TrainConfig::new(10.0, 2, FeatureKind::MonomialOrthonormal);
        let m = train_complex_svc(&data, &cfg).unwrap();
        let features = build_features(&cfg, FeatureDomain::Disk).unwrap();
        let k = features.len();
        let mut q = DMatrix::<f64>::zeros(2 * k + 2, 2 * k + 2);
        for j in 0..2 * k {
            q[(j, j)] = 1.0;
        }
        let mut c = DVector::zeros(2 * k + 2);
        c.rows_mut(2 * k, 2).fill(10.0);
        let mut a = DMatrix::zeros(8, 2 * k + 2);
        let mut b = DVector::zeros(8);
        for (i, s) in data.samples().iter().enumerate() {
            let phi = features.values(s.z.conj()).unwrap();
            for j in 0..k {
                a[(4 * i, j)] = s.t.sign() * phi[j].re;
                a[(4 * i, k + j)] = -s.t.sign() * phi[j].im;
                a[(4 * i + 1, j)] = -phi[j].im;
                a[(4 * i + 1, k + j)] = -phi[j].re;
                a[(4 * i + 2, j)] = phi[j].im;
                a[(4 * i + 2, k + j)] = phi[j].re;
            }
            for r in 0..4 {
                a[(4 * i + r, 2 * k + i)] = 1.0;
            }
            b[4 * i] = 1.0;
        }
        let oracle = brute_force_qp(&QpProblem::new(q, c, a, b).unwrap()).unwrap();
        assert!((oracle.objective - m.objective()).abs() < 1e-7);
        assert!((oracle.x[1] - (PI / 2.0).sqrt()).abs() < 1e-7);
    }

    #[test]
    fn single_sample_constant_feature() {
        let data = Dataset::new(vec![sample(0.5, Label::Positive)], "single").unwrap();
        let cfg = TrainConfig::new(HARD_MARGIN_C, 1, FeatureKind::MonomialOrthonormal);
        let m = train_complex_svc(&data, &cfg).unwrap();
        assert!((m.hypothesis.coeffs()[0].re - PI.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn tiny_c_gives_near_zero_coefficients() {
        let data = make_circle_dataset(30).unwrap();
        let cfg = TrainConfig::new(1e-8, 10, FeatureKind::MonomialOrthonormal);
        let m = train_complex_svc(&data, &cfg).unwrap();
        assert!(m.hypothesis.coeffs().iter().all(|c| c.norm() < 1e-6));
    }

    #[test]
    fn robust_energy_not_above_nonrobust() {
        let data = make_circle_dataset(30).unwrap();
        for c in [0.1, 1.0, 10.0] {
            let cfg = TrainConfig::new(c, 30, FeatureKind::MonomialOrthonormal);
            let plain = train_complex_svc(&data, &cfg).unwrap();
            let robust = train_robust(&data, &cfg).unwrap();
            let e_plain = dirichlet_energy(&plain.hypothesis).unwrap();
            let e_robust = dirichlet_energy(&robust.hypothesis).unwrap();
            assert!(e_robust <= e_plain * (1.0 + 1e-6), "C={c}: {e_robust} vs {e_plain}");
        }
    }

    #[test]
    fn robust_and_plain_agree_on_antipodal_pair() {
        let data = make_circle_dataset(2).unwrap();
        let cfg = TrainConfig::new(HARD_MARGIN_C, 5, FeatureKind::MonomialOrthonormal);
        let plain = train_complex_svc(&data, &cfg).unwrap();
        let robust = train_robust(&data, &cfg).unwrap();
        for i in 0..=36 {
            let x = -0.9 + 1.8 * i as f64 / 36.0;
            for y in [-0.3, 0.0, 0.3] {
                let z = Complex64::new(x, y);
                if x.abs() < 1e-9 {
                    continue;
                }
                let a = plain.hypothesis.eval(z).unwrap().re.signum();
                let b = robust.hypothesis.eval(z).unwrap().re.signum();
                assert_eq!(a, b, "z={z}");
            }
        }
    }

    #[test]
    fn slack_is_monotone_in_c() {
        let data = make_circle_dataset(30).unwrap();
        let mut last = f64::INFINITY;
        for c in [0.1, 1.0, 10.0, 100.0] {
            let cfg = TrainConfig::new(c, 30, FeatureKind::MonomialOrthonormal);
            let m = train_complex_svc(&data, &cfg).unwrap();
            assert!(m.total_slack() <= last + 1e-6);
            last = m.total_slack();
        }
    }

    #[test]
    fn s30_k30_c10_fits_every_sample() {
        let data = make_circle_dataset(30).unwrap();
        let cfg = TrainConfig::new(10.0, 30, FeatureKind::MonomialOrthonormal);
        let m = train_complex_svc(&data, &cfg).unwrap();
        assert!(m.slacks.iter().all(|x| *x <= 1e-6));
        for (mg, l) in m.margins(&data).unwrap().iter().zip(&m.duals) {
            assert!(*mg >= 1.0 - 1e-6);
            assert!((l * (mg - 1.0)).abs() <= 1e-6);
        }
    }

    #[test]
    fn affine_real_svc_splits_at_half() {
        let data = Dataset::new(
            vec![sample(0.2, Label::Negative), sample(0.8, Label::Positive)],
            "pair",
        )
        .unwrap();
        let feats = FeatureSet::interval_monomials(2).unwrap();
        let cfg = TrainConfig::new(HARD_MARGIN_C, 2, FeatureKind::Custom);
        let m = train_real_svc(&data, feats, &cfg).unwrap();
        let w = m.hypothesis.coeffs();
        assert!((w[0].re + 5.0 / 3.0).abs() < 1e-6 && (w[1].re - 10.0 / 3.0).abs() < 1e-6);
        let root = -w[0].re / w[1].re;
        assert!((root - 0.5).abs() < 1e-6);
        let rec = dual_reconstruction(&m, &data).unwrap();
        for (p, r) in w.iter().zip(&rec) {
            assert!((p - r).norm() <= 1e-5);
        }
    }

    #[test]
    fn dirac_memorizer_fits_labels_only_at_samples() {
        let data = Dataset::new(
            vec![
                sample(0.1, Label::Negative),
                sample(0.5, Label::Positive),
                sample(0.9, Label::Positive),
            ],
            "three",
        )
        .unwrap();
        let cfg = TrainConfig::new(HARD_MARGIN_C, 3, FeatureKind::Custom);
        let m = train_dirac_memorizer(&data, &cfg).unwrap();
        for s in data.samples() {
            let v = m.hypothesis.eval(s.z).unwrap();
            assert!((v.re - s.t.sign()).abs() < 1e-6);
        }
        assert_eq!(m.hypothesis.eval(Complex64::new(0.3, 0.0)).unwrap().norm(), 0.0);
    }

    #[test]
    fn model_round_trip() {
        let data = make_circle_dataset(8).unwrap();
        let cfg = TrainConfig::new(1.0, 6, FeatureKind::Harmonic);
        let m = train_complex_svc(&data, &cfg).unwrap();
        let json = serde_json::to_string(&m.metadata()).unwrap();
        let (h, meta) = load_hypothesis(&m.coefficients_csv(), &json).unwrap();
        assert_eq!(meta.config, cfg);
        let z = Complex64::new(0.2, 0.5);
        assert_eq!(h.eval(z).unwrap(), m.hypothesis.eval(z).unwrap());
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::new(0.0, 3, FeatureKind::Harmonic).validate().is_err());
        assert!(TrainConfig::new(1.0, 0, FeatureKind::Harmonic).validate().is_err());
        let data = make_circle_dataset(4).unwrap();
        assert!(train_complex_svc(&data, &TrainConfig::new(-1.0, 3, FeatureKind::Harmonic)).is_err());
    }
}
