use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use holo_core::basis::{FeatureKind, FeatureSet};
use holo_core::bergman::{holomorphic_bayes, monomial_coefficients_csv, KernelSpec};
use holo_core::dataset::{make_circle_dataset, make_interval_dataset, Dataset};
use holo_core::experiments::{run_experiment, ExperimentConfig, ExperimentId};
use holo_core::features::{
    feature_table_to_csv, tuning_matrix, ActivationFamily, TableHeader, ANN_GRID_POINTS, GRADIENT_CONVENTION,
};
use holo_core::hypothesis::Hypothesis;
use holo_core::io::{data_lines, fmt_f64, parse_f64, write_atomic};
use holo_core::learner::{
    build_features, load_hypothesis, train_complex_svc, train_robust, FeatureDomain, TrainConfig,
};
use holo_core::pde::{potential_convergence, robust_h_from_duals, DEFAULT_SMOOTH_BAND};
use holo_core::point::{sign_re, Label};
use holo_core::render::{render_circle_profiles, render_domain_coloring, render_range_curve, RenderConfig};
use holo_core::robustness::{
    boundary_probes, gradient_attack, min_flip_radius, normality_grid, normality_probe, transfer_metrics,
    AttackConfig, NormalityRule,
};
use holo_core::Error;

/// Overrides the root directory that experiment bundles are written under.
const OUTPUT_ROOT_VAR: &str = "HOLO_OUTPUT_ROOT";

/// Set once CSV data went to stdout; the status line then goes to stderr.
static STDOUT_USED: AtomicBool = AtomicBool::new(false);

#[derive(Parser)]
#[command(name = "holo", version, about = "Holomorphic classifiers: training, robustness and figures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a labeled dataset as CSV (re,im,t).
    Dataset(DatasetArgs),
    /// Build a feature set and write its tuning matrix (and table, if tabulated).
    Basis(BasisArgs),
    /// Project sign(Re z) onto the first K holomorphic modes.
    Project(ProjectArgs),
    /// Train a complex SVC on a dataset.
    Train(TrainArgs),
    /// Attack a saved model at one point.
    Attack(AttackArgs),
    /// Transferability of surrogate attacks to a target model.
    Transfer(TransferArgs),
    /// Sup-deviation of trained models as the sample count grows.
    Normality(NormalityArgs),
    /// Newtonian potential of dual multipliers and its Laplacian residual.
    Pde(PdeArgs),
    /// Render a saved model.
    Render(RenderArgs),
    /// Run a full experiment pipeline and write its bundle.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DatasetKind {
    Circle,
    Interval,
}

#[derive(Args)]
struct DatasetArgs {
    #[arg(value_enum)]
    kind: DatasetKind,
    /// Number of points before dropping unlabeled ones.
    #[arg(long, default_value_t = 30)]
    n: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    MonomialOrthonormal,
    Harmonic,
    AnnProjected,
    AnnProjectedHarmonic,
}

impl From<Kind> for FeatureKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::MonomialOrthonormal => FeatureKind::MonomialOrthonormal,
            Kind::Harmonic => FeatureKind::Harmonic,
            Kind::AnnProjected => FeatureKind::AnnProjected,
            Kind::AnnProjectedHarmonic => FeatureKind::AnnProjectedHarmonic,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    Disk,
    Interval,
}

impl From<DomainArg> for FeatureDomain {
    fn from(d: DomainArg) -> Self {
        match d {
            DomainArg::Disk => FeatureDomain::Disk,
            DomainArg::Interval => FeatureDomain::Interval,
        }
    }
}

#[derive(Args)]
struct BasisArgs {
    #[arg(long, default_value_t = 30)]
    k: usize,
    #[arg(long, value_enum, default_value_t = Kind::MonomialOrthonormal)]
    kind: Kind,
    #[arg(long, value_enum, default_value_t = DomainArg::Disk)]
    domain: DomainArg,
    /// Grid size for tabulated interval features.
    #[arg(long, default_value_t = ANN_GRID_POINTS)]
    grid_points: usize,
    /// Tuning matrix CSV (j,k,re,im).
    #[arg(long)]
    tuning: Option<PathBuf>,
    /// Feature table CSV for tabulated features.
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Szego,
    Bergman,
}

#[derive(Args)]
struct ProjectArgs {
    #[arg(long, default_value_t = 30)]
    k: usize,
    #[arg(long, value_enum, default_value_t = KernelArg::Szego)]
    kernel: KernelArg,
    /// Monomial coefficient CSV (k,re,im); stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    /// Dataset CSV (re,im,t).
    #[arg(long)]
    data: PathBuf,
    /// JSON training config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    /// Train on the harmonic counterpart of the feature kind.
    #[arg(long)]
    robust: bool,
    /// Directory for coefficients.csv, model.json and duals.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ModelArgs {
    /// Coefficient CSV written by `train`.
    #[arg(long)]
    coeffs: PathBuf,
    /// Metadata JSON written by `train`.
    #[arg(long)]
    meta: PathBuf,
}

#[derive(Args)]
struct AttackOpts {
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    #[arg(long, default_value_t = 4000)]
    max_iterations: usize,
    #[arg(long, default_value_t = 2.0)]
    budget: f64,
    #[arg(long, default_value_t = 1e-3)]
    bisection_tol: f64,
}

impl AttackOpts {
    fn config(&self) -> AttackConfig {
        AttackConfig {
            step: self.step,
            max_iterations: self.max_iterations,
            budget: self.budget,
            bisection_tol: self.bisection_tol,
            stop_at_flip: true,
        }
    }
}

#[derive(Args)]
struct AttackArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Start point as `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    z: String,
    /// True label, +1 or -1.
    #[arg(long, allow_hyphen_values = true)]
    t: i64,
    /// Bisect for the smallest budget that flips the label.
    #[arg(long)]
    radius: bool,
    #[command(flatten)]
    attack: AttackOpts,
}

#[derive(Args)]
struct TransferArgs {
    #[arg(long)]
    target_coeffs: PathBuf,
    #[arg(long)]
    target_meta: PathBuf,
    #[arg(long)]
    surrogate_coeffs: PathBuf,
    #[arg(long)]
    surrogate_meta: PathBuf,
    /// Evaluation points on the unit circle.
    #[arg(long, default_value_t = 256)]
    probes: usize,
    #[command(flatten)]
    attack: AttackOpts,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Svc,
    Memorizer,
}

#[derive(Args)]
struct NormalityArgs {
    #[arg(long, value_enum, default_value_t = RuleArg::Svc)]
    rule: RuleArg,
    #[arg(long, default_value_t = 15)]
    k: usize,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Strictly increasing sample counts, comma separated.
    #[arg(long, default_value = "20,40,80")]
    schedule: String,
    #[arg(long, default_value_t = 320)]
    reference: usize,
    /// CSV (n,sup_deviation); JSON on stdout either way.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Relu,
    /// `s ≡ 1` on the unit disk.
    Unit,
}

#[derive(Args)]
struct PdeArgs {
    /// Dataset CSV (re,im,t).
    #[arg(long)]
    data: PathBuf,
    /// Dual CSV (n,dual) written by `train`; all ones when omitted.
    #[arg(long)]
    duals: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FamilyArg::Relu)]
    family: FamilyArg,
    #[arg(long, default_value_t = 129)]
    resolution: usize,
    /// Also measure the convergence order against this finer grid.
    #[arg(long)]
    fine_resolution: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SMOOTH_BAND)]
    smooth_band: f64,
    /// Field CSV (x,y,value).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Style {
    Domain,
    Profile,
    Range,
}

#[derive(Args)]
struct RenderArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_enum, default_value_t = Style::Domain)]
    style: Style,
    #[arg(long, default_value_t = 512)]
    size: usize,
    #[arg(long, default_value_t = 4096)]
    n_angles: usize,
    /// Logarithmic magnitude compression.
    #[arg(long)]
    log: bool,
    /// Put the magnitude on HSV value instead of saturation.
    #[arg(long)]
    value: bool,
    /// PNG output.
    #[arg(long)]
    out: PathBuf,
    /// Curve CSV for profile and range styles.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// fig1, fig2, pde_check, transfer, normality or custom.
    experiment: String,
    /// JSON experiment config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    probes: Option<usize>,
    #[arg(long)]
    size: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; defaults to `$HOLO_OUTPUT_ROOT/<experiment>`, then
    /// the config's output_dir, then `artifacts/<experiment>`.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure carried to `main`: an optional stage tag and the message.
struct Failure {
    stage: Option<String>,
    message: String,
    code: u8,
    extra: Value,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            stage: None,
            message: e.to_string(),
            code: 2,
            extra: Value::Null,
        }
    }
}

type CliResult = Result<Value, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::from(Error::Io(format!("{}: {e}", path.display()))))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => Ok(write_atomic(p, text.as_bytes())?),
        None => {
            print!("{text}");
            STDOUT_USED.store(true, Ordering::Relaxed);
            Ok(())
        }
    }
}

fn load_model(m: &ModelArgs) -> Result<Hypothesis, Failure> {
    Ok(load_hypothesis(&read(&m.coeffs)?, &read(&m.meta)?)?.0)
}

fn parse_point(s: &str) -> Result<Complex64, Failure> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::Parse(format!("point '{s}' is not re,im")).into());
    }
    Ok(Complex64::new(parse_f64(parts[0])?, parse_f64(parts[1])?))
}

fn cmd_dataset(a: DatasetArgs) -> CliResult {
    let d = match a.kind {
        DatasetKind::Circle => make_circle_dataset(a.n)?,
        DatasetKind::Interval => make_interval_dataset(a.n)?,
    };
    emit(a.out.as_deref(), &d.to_csv())?;
    Ok(json!({"samples": d.len(), "fingerprint": d.fingerprint(), "provenance": d.provenance()}))
}

fn cmd_basis(a: BasisArgs) -> CliResult {
    let mut cfg = TrainConfig::new(1.0, a.k, a.kind.into());
    cfg.ann_grid_points = a.grid_points;
    let fs: FeatureSet = build_features(&cfg, a.domain.into())?;
    let sigma = tuning_matrix(&fs)?;
    if let Some(p) = &a.tuning {
        write_atomic(p, sigma.to_csv().as_bytes())?;
    }
    if let Some(p) = &a.table {
        let header = TableHeader {
            family: "relu_affine".into(),
            k: a.k,
            grid_points: a.grid_points,
            quadrature: "rotated half-disk sector, 32 x 64 Gauss-Legendre".into(),
            convention: GRADIENT_CONVENTION.into(),
        };
        write_atomic(p, feature_table_to_csv(&fs, &header)?.as_bytes())?;
    }
    Ok(json!({
        "features": fs.len(),
        "kind": fs.kind(),
        "description": fs.description(),
        "tuning_eigenvalues": sigma.eigenvalues(),
    }))
}

fn cmd_project(a: ProjectArgs) -> CliResult {
    let kernel = match a.kernel {
        KernelArg::Szego => KernelSpec::szego(),
        KernelArg::Bergman => KernelSpec::bergman(),
    };
    let h = holomorphic_bayes(|z| Complex64::new(sign_re(z), 0.0), &kernel, a.k)?;
    emit(a.out.as_deref(), &monomial_coefficients_csv(&h)?)?;
    Ok(json!({"k": a.k, "kernel": kernel.kind, "value_at_0.999i": {
        "re": h.eval(Complex64::new(0.0, 0.999))?.re,
        "im": h.eval(Complex64::new(0.0, 0.999))?.im,
    }}))
}

fn cmd_train(a: TrainArgs) -> CliResult {
    let data = Dataset::from_csv(&read(&a.data)?, a.data.display().to_string())?;
    let mut cfg = match &a.config {
        Some(p) => serde_json::from_str::<TrainConfig>(&read(p)?)
            .map_err(|e| Failure::from(Error::Parse(format!("train config: {e}"))))?,
        None => TrainConfig::new(1.0, 30, FeatureKind::MonomialOrthonormal),
    };
    if let Some(k) = a.k {
        cfg.k = k;
    }
    if let Some(c) = a.c {
        cfg.c = c;
    }
    if let Some(kind) = a.kind {
        cfg.feature_kind = kind.into();
    }
    let model = if a.robust {
        train_robust(&data, &cfg)?
    } else {
        train_complex_svc(&data, &cfg)?
    };
    let meta = serde_json::to_string_pretty(&model.metadata()).expect("metadata serializes");
    let mut duals = String::from("n,dual\n");
    for (i, l) in model.duals.iter().enumerate() {
        let _ = writeln!(duals, "{i},{}", fmt_f64(*l));
    }
    write_atomic(&a.out.join("coefficients.csv"), model.coefficients_csv().as_bytes())?;
    write_atomic(&a.out.join("model.json"), meta.as_bytes())?;
    write_atomic(&a.out.join("duals.csv"), duals.as_bytes())?;
    Ok(json!({
        "objective": model.objective(),
        "total_slack": model.total_slack(),
        "iterations": model.qp.iterations,
        "margins": model.margins(&data)?,
    }))
}

fn cmd_attack(a: AttackArgs) -> CliResult {
    let h = load_model(&a.model)?;
    let z = parse_point(&a.z)?;
    let t = Label::try_from(a.t)?;
    let cfg = a.attack.config();
    if a.radius {
        Ok(json!(min_flip_radius(&h, z, t, &cfg)?))
    } else {
        Ok(json!(gradient_attack(&h, z, t, &cfg)?))
    }
}

fn cmd_transfer(a: TransferArgs) -> CliResult {
    let target = load_hypothesis(&read(&a.target_coeffs)?, &read(&a.target_meta)?)?.0;
    let surrogate = load_hypothesis(&read(&a.surrogate_coeffs)?, &read(&a.surrogate_meta)?)?.0;
    let r = transfer_metrics(&target, &surrogate, &boundary_probes(a.probes), &a.attack.config())?;
    Ok(json!(r))
}

fn parse_schedule(s: &str) -> Result<Vec<usize>, Failure> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Failure::from(Error::Parse(format!("bad schedule entry '{p}'"))))
        })
        .collect()
}

fn cmd_normality(a: NormalityArgs) -> CliResult {
    let rule = match a.rule {
        RuleArg::Svc => NormalityRule::ComplexSvc {
            k: a.k,
            c: a.c,
            feature_kind: FeatureKind::MonomialOrthonormal,
        },
        RuleArg::Memorizer => NormalityRule::DiracMemorizer,
    };
    let r = normality_probe(&rule, &parse_schedule(&a.schedule)?, a.reference, &normality_grid())?;
    if let Some(p) = &a.out {
        let mut csv = String::from("n,sup_deviation\n");
        for (n, d) in &r.rows {
            let _ = writeln!(csv, "{n},{}", fmt_f64(*d));
        }
        write_atomic(p, csv.as_bytes())?;
    }
    Ok(json!({"report": r, "strictly_decreasing": r.strictly_decreasing()}))
}

fn cmd_pde(a: PdeArgs) -> CliResult {
    let data = Dataset::from_csv(&read(&a.data)?, a.data.display().to_string())?;
    let duals = match &a.duals {
        Some(p) => {
            let text = read(p)?;
            data_lines(&text)
                .map(|(_, l)| {
                    let v = l.split(',').nth(1).ok_or_else(|| Error::Parse(format!("bad dual row '{l}'")))?;
                    parse_f64(v)
                })
                .collect::<Result<Vec<_>, Error>>()?
        }
        None => vec![1.0; data.len()],
    };
    let family = match a.family {
        FamilyArg::Relu => ActivationFamily::ReluAffine,
        FamilyArg::Unit => ActivationFamily::Custom(std::sync::Arc::new(|_, _| 1.0)),
    };
    let labels: Vec<Label> = data.samples().iter().map(|s| s.t).collect();
    let xs: Vec<Complex64> = data.samples().iter().map(|s| s.z).collect();
    let r = robust_h_from_duals(&duals, &labels, &family, &xs, a.resolution)?;
    if let Some(p) = &a.out {
        write_atomic(p, r.field.to_csv().as_bytes())?;
    }
    let conv = match a.fine_resolution {
        Some(fine) => {
            Some(potential_convergence(&duals, &labels, &family, &xs, a.resolution, fine, a.smooth_band)?)
        }
        None => None,
    };
    Ok(json!({"residual": r.residual, "convergence": conv}))
}

fn cmd_render(a: RenderArgs) -> CliResult {
    let h = load_model(&a.model)?;
    let mut cfg = RenderConfig {
        size: a.size,
        n_angles: a.n_angles,
        ..RenderConfig::default()
    };
    if a.log {
        cfg.magnitude = holo_core::render::MagnitudeMap::Log;
    }
    if a.value {
        cfg.channel = holo_core::render::MagnitudeChannel::Value;
    }
    let (image, csv, extra) = match a.style {
        Style::Domain => {
            let r = render_domain_coloring(&h, &cfg)?;
            (r.image, None, json!({"nonfinite_pixels": r.nonfinite_pixels}))
        }
        Style::Profile => {
            let r = render_circle_profiles(&h, a.n_angles, (a.size / 2).max(64))?;
            let csv = r.to_csv();
            (r.image, Some(csv), json!({"crossings": r.crossings}))
        }
        Style::Range => {
            let r = render_range_curve(&h, a.n_angles, a.size)?;
            let csv = r.to_csv();
            (r.image, Some(csv), json!({"length": r.length, "axis_crossings": r.axis_crossings}))
        }
    };
    write_atomic(&a.out, &image.to_png()?)?;
    if let (Some(p), Some(text)) = (&a.csv, csv) {
        write_atomic(p, text.as_bytes())?;
    }
    Ok(extra)
}

fn cmd_experiment(a: ExperimentArgs) -> CliResult {
    let id = ExperimentId::parse(&a.experiment)?;
    let mut cfg = match &a.config {
        Some(p) => ExperimentConfig::from_json(&read(p)?)?,
        None => ExperimentConfig::new(id),
    };
    cfg.experiment = id;
    if a.n.is_some() {
        cfg.n = a.n;
    }
    if a.k.is_some() {
        cfg.k = a.k;
    }
    if a.c.is_some() {
        cfg.c = a.c;
    }
    if let Some(p) = a.probes {
        cfg.probes = p;
    }
    if let Some(s) = a.size {
        cfg.render.size = s;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    let dir = match (&a.out, std::env::var_os(OUTPUT_ROOT_VAR), &cfg.output_dir) {
        (Some(d), _, _) => d.clone(),
        (None, Some(root), _) => PathBuf::from(root).join(id.name()),
        (None, None, Some(d)) => PathBuf::from(d),
        (None, None, None) => PathBuf::from("artifacts").join(id.name()),
    };
    let bundle = run_experiment(&cfg).map_err(|e| Failure {
        stage: Some(e.stage.clone()),
        message: e.error.to_string(),
        code: 2,
        extra: Value::Null,
    })?;
    let written = bundle.write(&dir)?;
    let summary = json!({
        "experiment": id,
        "output_dir": dir,
        "files": written.len(),
        "checks": bundle.checks,
    });
    if !bundle.passed() {
        return Err(Failure {
            stage: Some("checks".into()),
            message: format!("{} check(s) failed", bundle.failed_checks().len()),
            code: 1,
            extra: summary,
        });
    }
    Ok(summary)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let out = json!({"status": "error", "stage": "arguments", "error": e.to_string().trim()});
            println!("{}", serde_json::to_string(&out).expect("json"));
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Dataset(a) => cmd_dataset(a),
        Command::Basis(a) => cmd_basis(a),
        Command::Project(a) => cmd_project(a),
        Command::Train(a) => cmd_train(a),
        Command::Attack(a) => cmd_attack(a),
        Command::Transfer(a) => cmd_transfer(a),
        Command::Normality(a) => cmd_normality(a),
        Command::Pde(a) => cmd_pde(a),
        Command::Render(a) => cmd_render(a),
        Command::Experiment(a) => cmd_experiment(a),
    };
    match result {
        Ok(v) => {
            let out = serde_json::to_string(&json!({"status": "ok", "result": v})).expect("json");
            if STDOUT_USED.load(Ordering::Relaxed) {
                eprintln!("{out}");
            } else {
                println!("{out}");
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            let out = json!({
                "status": "error",
                "stage": f.stage,
                "error": f.message,
                "detail": f.extra,
            });
            println!("{}", serde_json::to_string(&out).expect("json"));
            ExitCode::from(f.code)
        }
    }
}
