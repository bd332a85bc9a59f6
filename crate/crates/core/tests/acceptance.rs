//! Acceptance criteria, one test each. Every test writes a single
//! `criterion N: PASS|FAIL ...` line to stdout (bypassing capture) and then
//! asserts the verdict.

use std::f64::consts::{FRAC_2_PI, PI};
use std::io::Write;

use holo_core::bergman::{holomorphic_bayes, KernelSpec};
use holo_core::dataset::{make_circle_dataset, make_interval_dataset};
use holo_core::experiments::{run_experiment, Bundle, ExperimentConfig, ExperimentId};
use holo_core::features::tuning_matrix;
use holo_core::learner::{
    build_features, dual_reconstruction, train_complex_svc, train_dirac_memorizer, train_real_svc, FeatureDomain,
    TrainConfig, HARD_MARGIN_C,
};
use holo_core::pde::{eigen_rect, harmonic_activation_check, ActivationField};
use holo_core::point::sign_re;
use holo_core::qp::{brute_force_qp, solve_qp, QpProblem, DEFAULT_TOL};
use holo_core::quadrature::QuadratureRule;
use holo_core::robustness::{normality_grid, normality_probe, NormalityRule};
use holo_core::{Dataset, FeatureKind, FeatureSet, Hypothesis};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GRAM_TOL: f64 = 1e-6;
const SIGMA_DIAG_REL_TOL: f64 = 1e-6;
const SIGMA_OFFDIAG_TOL: f64 = 1e-8;
const ENERGY_TOL: f64 = 1e-4;
const ENERGY_VECTORS: usize = 50;
const FOURIER_TOL: f64 = 1e-6;
const BRANCH_POINT_FLOOR: f64 = 1.5;
const BRANCH_POINT_K: usize = 256;
const QP_INSTANCES: usize = 200;
const QP_TOL: f64 = 1e-6;
const DUAL_TOL: f64 = 1e-5;
const FIG1_C: f64 = 10.0;
const EIGEN_REL_TOL: f64 = 1e-6;
const IDENTITY_TOL: f64 = 1e-5;
const CONTROL_GAP: f64 = 1e-3;

fn report(id: &str, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {id}: {verdict} {name} | {detail}");
    let _ = out.flush();
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn experiment(id: ExperimentId, c: Option<f64>) -> Bundle {
    let mut cfg = ExperimentConfig::new(id);
    cfg.c = c;
    run_experiment(&cfg).unwrap_or_else(|e| panic!("{id} failed: {e}"))
}

fn check_summary(b: &Bundle) -> String {
    b.checks
        .iter()
        .map(|c| format!("{}={} ({})", c.name, if c.passed { "ok" } else { "no" }, c.detail))
        .collect::<Vec<_>>()
        .join("; ")
}

#[test]
fn criterion_01_basis_orthonormality() {
    let k = 30;
    let basis = FeatureSet::monomial_orthonormal(k).unwrap();
    let rule = QuadratureRule::disk(64, 256);
    let mut gram = DMatrix::<Complex64>::zeros(k, k);
    for (z, w) in rule.points().iter().zip(rule.weights()) {
        let v = basis.values(*z).unwrap();
        for i in 0..k {
            for j in 0..k {
                gram[(i, j)] += v[i] * v[j].conj() * *w;
            }
        }
    }
    let err = (gram - DMatrix::<Complex64>::identity(k, k)).iter().map(|x| x.norm()).fold(0.0, f64::max);
    report("1", "basis orthonormality", err <= GRAM_TOL, &format!("max |G - I| = {err:.3e} (tol {GRAM_TOL:e})"));
}

#[test]
fn criterion_02_tuning_matrix_closed_form() {
    let k = 30;
    let sigma = tuning_matrix(&FeatureSet::monomial_orthonormal(k).unwrap()).unwrap().matrix;
    let mut diag = 0.0f64;
    let mut off = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            if i == j {
                let expect = (i * (i + 1)) as f64;
                diag = diag.max((sigma[(i, i)] - expect).norm() / expect.max(1.0));
            } else {
                off = off.max(sigma[(i, j)].norm());
            }
        }
    }
    report(
        "2",
        "tuning matrix closed form",
        diag <= SIGMA_DIAG_REL_TOL && off <= SIGMA_OFFDIAG_TOL,
        &format!("diag rel err {diag:.3e} (tol {SIGMA_DIAG_REL_TOL:e}), off-diag {off:.3e} (tol {SIGMA_OFFDIAG_TOL:e})"),
    );
}

#[test]
fn criterion_03_energy_equals_coefficient_norm() {
    let cfg = TrainConfig::new(1.0, 30, FeatureKind::Harmonic);
    let features = build_features(&cfg, FeatureDomain::Disk).unwrap();
    let regularized = features.regularized().to_vec();
    let rule = QuadratureRule::disk(64, 256);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..ENERGY_VECTORS {
        let coeffs: Vec<Complex64> = regularized
            .iter()
            .map(|&r| {
                if r {
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        let norm_sqr: f64 = coeffs.iter().map(|a| a.norm_sqr()).sum();
        let h = Hypothesis::new(features.clone(), coeffs).unwrap();
        // Energy by direct quadrature of |f'|², not through the tuning matrix.
        let energy = rule.integrate_real(|z| h.derivative(z).unwrap().norm_sqr()).unwrap();
        worst = worst.max((energy - norm_sqr).abs() / (1.0 + norm_sqr));
    }
    report(
        "3",
        "Dirichlet energy equals coefficient norm",
        worst <= ENERGY_TOL,
        &format!("max |E - |a|^2| / (1 + |a|^2) = {worst:.3e} over {ENERGY_VECTORS} vectors (tol {ENERGY_TOL:e})"),
    );
}

#[test]
fn criterion_04_holomorphic_bayes_coefficients() {
    let labeler = |z: Complex64| Complex64::new(sign_re(z), 0.0);
    let h = holomorphic_bayes(labeler, &KernelSpec::szego(), 30).unwrap();
    let c = h.monomial_coefficients().unwrap();
    let mut err = 0.0f64;
    for (k, ck) in c.iter().enumerate() {
        let expect = if k % 2 == 1 {
            let sign = if (k - 1) / 2 % 2 == 0 { 1.0 } else { -1.0 };
            FRAC_2_PI * sign / k as f64
        } else {
            0.0
        };
        err = err.max((ck - expect).norm());
    }
    let wide = holomorphic_bayes(labeler, &KernelSpec::szego(), BRANCH_POINT_K).unwrap();
    let growth = wide.eval(Complex64::new(0.0, 0.999)).unwrap().norm();
    report(
        "4",
        "holomorphic Bayes coefficients",
        err <= FOURIER_TOL && growth > BRANCH_POINT_FLOOR,
        &format!(
            "max coefficient err {err:.3e} (tol {FOURIER_TOL:e}); |o(0.999i)| = {growth:.4} at K={BRANCH_POINT_K} (floor {BRANCH_POINT_FLOOR})"
        ),
    );
}

fn random_qp(rng: &mut ChaCha8Rng) -> QpProblem {
    let n = rng.gen_range(1..=6);
    let m = rng.gen_range(1..=10);
    let l = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let q = &l * l.transpose() + DMatrix::identity(n, n) * 0.1;
    let q = (&q + q.transpose()) * 0.5;
    let c = DVector::from_fn(n, |_, _| rng.gen_range(-2.0..2.0));
    let a = DMatrix::from_fn(m, n, |_, _| rng.gen_range(-1.0..1.0));
    let x0 = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    let slack = DVector::from_fn(m, |_, _| rng.gen_range(0.0..1.0));
    // a x >= b with a strictly feasible point x0
    let b = &a * &x0 - slack;
    QpProblem::new(q, c, a, b).unwrap()
}

#[test]
fn criterion_05_qp_correctness() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..QP_INSTANCES {
        let p = random_qp(&mut rng);
        let ipm = solve_qp(&p, DEFAULT_TOL).unwrap();
        let oracle = brute_force_qp(&p).unwrap();
        worst = worst.max((ipm.objective - oracle.objective).abs());
    }
    let data = make_circle_dataset(2).unwrap();
    let m = train_complex_svc(&data, &TrainConfig::new(HARD_MARGIN_C, 2, FeatureKind::MonomialOrthonormal)).unwrap();
    let a1 = m.hypothesis.coeffs()[1];
    let a1_err = (a1 - Complex64::new((PI / 2.0).sqrt(), 0.0)).norm();
    report(
        "5",
        "QP correctness",
        worst <= QP_TOL && a1_err <= QP_TOL,
        &format!(
            "max objective gap {worst:.3e} over {QP_INSTANCES} instances; a1 err {a1_err:.3e} (tol {QP_TOL:e})"
        ),
    );
}

#[test]
fn criterion_06_dual_reconstruction() {
    let mut cases: Vec<(&str, Dataset, FeatureSet, f64)> = Vec::new();
    let pair = Dataset::from_csv("x,y,t\n0.2,0,-1\n0.8,0,1\n", "pair").unwrap();
    cases.push(("affine pair", pair, FeatureSet::interval_monomials(2).unwrap(), HARD_MARGIN_C));
    cases.push((
        "interval cubic",
        make_interval_dataset(16).unwrap(),
        FeatureSet::interval_monomials(4).unwrap(),
        10.0,
    ));
    let mut worst = 0.0f64;
    let mut names = Vec::new();
    for (name, data, feats, c) in cases {
        let cfg = TrainConfig::new(c, feats.len(), FeatureKind::Custom);
        let m = train_real_svc(&data, feats, &cfg).unwrap();
        let rec = dual_reconstruction(&m, &data).unwrap();
        for (p, r) in m.hypothesis.coeffs().iter().zip(&rec) {
            worst = worst.max((p - r).norm());
        }
        names.push(name);
    }
    let circle = make_circle_dataset(12).unwrap();
    let m = train_dirac_memorizer(&circle, &TrainConfig::new(HARD_MARGIN_C, 1, FeatureKind::Custom)).unwrap();
    let rec = dual_reconstruction(&m, &circle).unwrap();
    for (p, r) in m.hypothesis.coeffs().iter().zip(&rec) {
        worst = worst.max((p - r).norm());
    }
    names.push("dirac memorizer");
    report(
        "6",
        "dual reconstruction",
        worst <= DUAL_TOL,
        &format!("max |a - sum l t s| = {worst:.3e} on {} (tol {DUAL_TOL:e})", names.join(", ")),
    );
}

#[test]
fn criterion_07_fig1_at_c10() {
    let b = experiment(ExperimentId::Fig1, Some(FIG1_C));
    report("7", "fig1 ordering on S_30, K=30, C=10", b.passed(), &check_summary(&b));
}

#[test]
fn criterion_07b_fig1_at_default_c() {
    let b = experiment(ExperimentId::Fig1, None);
    report("7b", "fig1 ordering on S_30, K=30, C=1", b.passed(), &check_summary(&b));
}

#[test]
fn criterion_08_potential_residual_and_order() {
    let b = experiment(ExperimentId::PdeCheck, None);
    let wanted = ["residual_le_5e-2", "second_order_convergence"];
    let selected: Vec<_> = b.checks.iter().filter(|c| wanted.contains(&c.name.as_str())).collect();
    assert_eq!(selected.len(), wanted.len(), "pde_check checks renamed: {}", check_summary(&b));
    let pass = selected.iter().all(|c| c.passed);
    let detail = selected.iter().map(|c| format!("{}: {}", c.name, c.detail)).collect::<Vec<_>>().join("; ");
    report("8", "Newtonian potential of the duals", pass, &detail);
}

#[test]
fn criterion_09_eigen_activation_identity() {
    let rect = eigen_rect();
    let mode = |kx: f64, ky: f64| ActivationField::CosineMode { kx, ky };
    // Eigen case: −Δ𝔰 = 𝔰 on [0, π]² with zero Neumann data.
    let r = harmonic_activation_check(&[mode(1.0, 0.0), mode(0.0, 1.0)], &[0.7, -1.2], rect, 64).unwrap();
    let all = [mode(1.0, 0.0), mode(0.0, 1.0), mode(1.0, 1.0), mode(2.0, 0.0), mode(2.0, 1.0)];
    let pairs = harmonic_activation_check(&all, &[1.0; 5], rect, 64).unwrap();
    let rc = harmonic_activation_check(&[mode(1.0, 1.0)], &[1.0], rect, 64).unwrap();
    let pass = r.norm_energy_rel_gap <= EIGEN_REL_TOL
        && pairs.max_identity_error <= IDENTITY_TOL
        && rc.norm_energy_rel_gap > CONTROL_GAP;
    report(
        "9",
        "eigen activation identity",
        pass,
        &format!(
            "rel gap {:.3e} (tol {EIGEN_REL_TOL:e}); identity err {:.3e} over {} pairs (tol {IDENTITY_TOL:e}); control gap {:.3e} (> {CONTROL_GAP:e})",
            r.norm_energy_rel_gap,
            pairs.max_identity_error,
            pairs.pairs.len(),
            rc.norm_energy_rel_gap
        ),
    );
}

#[test]
fn criterion_10_normality() {
    let grid = normality_grid();
    let schedule = [20, 40, 80];
    let svc = NormalityRule::ComplexSvc { k: 15, c: 1.0, feature_kind: FeatureKind::MonomialOrthonormal };
    let rs = normality_probe(&svc, &schedule, 320, &grid).unwrap();
    let devs: Vec<f64> = rs.rows.iter().map(|r| r.1).collect();
    let decreasing = devs.windows(2).all(|w| w[1] < w[0]);
    let rm = normality_probe(&NormalityRule::DiracMemorizer, &schedule, 320, &grid).unwrap();
    let mem: Vec<f64> = rm.rows.iter().map(|r| r.1).collect();
    let stuck = mem.iter().all(|d| *d >= 1.0);
    report(
        "10",
        "normality",
        decreasing && stuck,
        &format!("svc sup-deviation {devs:?}; memorizer sup |f - t| {mem:?}"),
    );
}

#[test]
fn criterion_11_transfer() {
    let b = experiment(ExperimentId::Transfer, None);
    report("11", "transfer", b.passed(), &check_summary(&b));
}

#[test]
fn criterion_12_determinism() {
    let ids = [
        ExperimentId::Fig1,
        ExperimentId::Fig2,
        ExperimentId::PdeCheck,
        ExperimentId::Transfer,
        ExperimentId::Normality,
    ];
    let mut differing = Vec::new();
    let mut files = 0;
    for id in ids {
        let a = experiment(id, None);
        let b = experiment(id, None);
        if a.files != b.files {
            differing.push(id.name());
        }
        files += a.files.len();
    }
    report(
        "12",
        "determinism",
        differing.is_empty(),
        &format!("{files} artifacts compared across 5 experiments; differing: {differing:?}"),
    );
}
