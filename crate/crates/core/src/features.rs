//! Tuning matrix, harmonic feature transform, Dirichlet energy, and features
//! obtained by projecting an activation family onto a disk basis.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{BaseFeatures, Domain, FeatureKind, FeatureSet, HermiteTable};
use crate::error::{Error, Result};
use crate::hypothesis::Hypothesis;
use crate::io::{data_lines, fmt_f64, parse_f64};
use crate::par_map;
use crate::point::ComplexPoint;
use crate::quadrature::{default_disk_rule, default_interval_rule, gauss_legendre_on, QuadratureRule};

/// Gradient convention: `‖∇f‖² := |f'|²` (one copy, not `|∇u|² + |∇v|²`).
pub const GRADIENT_CONVENTION: &str = "single_copy";

/// Default grid for tabulated activation projections.
pub const ANN_GRID_POINTS: usize = 513;

const CONSTANT_TOL: f64 = 1e-12;
const MIN_EIGENVALUE: f64 = 1e-10;

/// Nodes and weights on which gradient Gram integrals are exact or nearly so.
fn gradient_rule(features: &FeatureSet) -> (Vec<ComplexPoint>, Vec<f64>) {
    match (features.domain(), features.base()) {
        (Domain::UnitDisk, _) => {
            let r = default_disk_rule();
            (r.points().to_vec(), r.weights().to_vec())
        }
        (Domain::UnitInterval, BaseFeatures::Tabulated(table)) => {
            // Hermite derivatives are quadratics per cell; 3 points are exact.
            let mut pts = Vec::new();
            let mut wts = Vec::new();
            for w in table.grid().windows(2) {
                let (x, wx) = gauss_legendre_on(3, w[0], w[1]);
                pts.extend(x.into_iter().map(|x| Complex64::new(x, 0.0)));
                wts.extend(wx);
            }
            (pts, wts)
        }
        (Domain::UnitInterval, _) => {
            let r = default_interval_rule();
            (r.points().to_vec(), r.weights().to_vec())
        }
        (Domain::Rectangle(rect), _) => {
            let r = QuadratureRule::rectangle(rect, 64, 64);
            (r.points().to_vec(), r.weights().to_vec())
        }
    }
}

/// Hermitian Gram matrix of feature gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct TuningMatrix {
    pub matrix: DMatrix<Complex64>,
    pub nodes: usize,
    pub description: String,
}

impl TuningMatrix {
    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `aᵀ Σ conj(a)`, the Dirichlet energy of `Σ a_k φ_k`.
    pub fn energy(&self, coeffs: &[Complex64]) -> f64 {
        let k = self.len();
        let mut e = Complex64::new(0.0, 0.0);
        for i in 0..k {
            for j in 0..k {
                e += coeffs[i] * self.matrix[(i, j)] * coeffs[j].conj();
            }
        }
        e.re
    }

    /// Indices whose gradient vanishes identically.
    pub fn constant_indices(&self) -> Vec<usize> {
        let scale = (0..self.len())
            .map(|i| self.matrix[(i, i)].re)
            .fold(1.0f64, f64::max);
        (0..self.len())
            .filter(|&i| self.matrix[(i, i)].re <= CONSTANT_TOL * scale)
            .collect()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# K={}\n# quadrature_nodes={}\n# convention={}\n# {}\nj,k,re,im\n",
            self.len(),
            self.nodes,
            GRADIENT_CONVENTION,
            self.description
        );
        for i in 0..self.len() {
            for j in 0..self.len() {
                let v = self.matrix[(i, j)];
                let _ = writeln!(out, "{i},{j},{},{}", fmt_f64(v.re), fmt_f64(v.im));
            }
        }
        out
    }
}

/// `Σ_jk = ∫ φ_j'·conj(φ_k')`, symmetrized after quadrature.
pub fn tuning_matrix(features: &FeatureSet) -> Result<TuningMatrix> {
    let (pts, wts) = gradient_rule(features);
    let nb = features.base().len();
    let mut gram = DMatrix::<Complex64>::zeros(nb, nb);
    let mut b = Vec::with_capacity(nb);
    for (z, w) in pts.iter().zip(&wts) {
        features.base_values_unchecked(*z, true, &mut b);
        if b.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::IntegrationFailure { re: z.re, im: z.im });
        }
        for p in 0..nb {
            if b[p].re == 0.0 && b[p].im == 0.0 {
                continue;
            }
            let bp = b[p] * *w;
            for q in 0..nb {
                gram[(p, q)] += bp * b[q].conj();
            }
        }
    }
    let m = features.map();
    let sigma = m * gram * m.adjoint();
    let sigma = (&sigma + sigma.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(TuningMatrix {
        matrix: sigma,
        nodes: pts.len(),
        description: features.description().to_string(),
    })
}

/// `∫ |f'|²` over the feature domain.
pub fn dirichlet_energy(h: &Hypothesis) -> Result<f64> {
    let (pts, wts) = gradient_rule(h.features());
    let mut sum = crate::quadrature::NeumaierSum::default();
    for (z, w) in pts.iter().zip(&wts) {
        let d = h.eval_pair_unchecked(*z).1;
        if !(d.re.is_finite() && d.im.is_finite()) {
            return Err(Error::IntegrationFailure { re: z.re, im: z.im });
        }
        sum.add(w * d.norm_sqr());
    }
    Ok(sum.value())
}

/// `φ* = Σ^{-1/2} φ` on the non-constant features; constants pass through
/// unchanged and are excluded from the coefficient penalty.
pub fn harmonic_transform(features: &FeatureSet) -> Result<FeatureSet> {
    let sigma = tuning_matrix(features)?;
    let k = sigma.len();
    let constants = sigma.constant_indices();
    let active: Vec<usize> = (0..k).filter(|i| !constants.contains(i)).collect();
    let root = if active.is_empty() {
        // only constants: nothing to whiten
        DMatrix::<Complex64>::zeros(0, 0)
    } else {
        let sub = DMatrix::from_fn(active.len(), active.len(), |i, j| {
            sigma.matrix[(active[i], active[j])]
        });
        let eig = SymmetricEigen::new(sub);
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min > MIN_EIGENVALUE) {
            return Err(Error::NotPositiveDefinite { eigenvalue: min });
        }
        let inv_sqrt = DMatrix::from_fn(active.len(), active.len(), |i, j| {
            if i == j {
                Complex64::new(1.0 / eig.eigenvalues[i].sqrt(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        &eig.eigenvectors * inv_sqrt * eig.eigenvectors.adjoint()
    };
    let mut t = DMatrix::<Complex64>::zeros(k, k);
    for &c in &constants {
        t[(c, c)] = Complex64::new(1.0, 0.0);
    }
    for (i, &ai) in active.iter().enumerate() {
        for (j, &aj) in active.iter().enumerate() {
            t[(ai, aj)] = root[(i, j)];
        }
    }
    let regularized = (0..k).map(|i| !constants.contains(&i)).collect();
    features.transformed(
        &t,
        features.kind().harmonic_counterpart(),
        regularized,
        format!("harmonic transform of [{}]", features.description()),
    )
}

pub type CustomActivation = Arc<dyn Fn(ComplexPoint, ComplexPoint) -> f64 + Send + Sync>;

/// Activation families `s(x; ω)` with parameter `ω` in the unit disk.
#[derive(Clone)]
pub enum ActivationFamily {
    /// `max(0, Re ω·x + Im ω)` for `x ∈ [0, 1]`.
    ReluAffine,
    /// `δ(ω − x)`.
    Dirac,
    /// `(1 − conj(ω)·z)^{−p}` for `z` in the disk.
    CauchyPower { power: u32 },
    /// Arbitrary real activation `s(x, ω)` on `x ∈ [0, 1]`.
    Custom(CustomActivation),
}

impl fmt::Debug for ActivationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActivationFamily::ReluAffine => write!(f, "ReluAffine"),
            ActivationFamily::Dirac => write!(f, "Dirac"),
            ActivationFamily::CauchyPower { power } => write!(f, "CauchyPower({power})"),
            ActivationFamily::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl ActivationFamily {
    pub fn name(&self) -> String {
        match self {
            ActivationFamily::ReluAffine => "relu_affine".into(),
            ActivationFamily::Dirac => "dirac".into(),
            ActivationFamily::CauchyPower { power } => format!("cauchy_power_{power}"),
            ActivationFamily::Custom(_) => "custom".into(),
        }
    }

    pub fn input_domain(&self) -> Domain {
        match self {
            ActivationFamily::CauchyPower { .. } => Domain::UnitDisk,
            _ => Domain::UnitInterval,
        }
    }

    /// `s(x; ω)`; the Dirac family has no pointwise value.
    pub fn eval(&self, x: ComplexPoint, omega: ComplexPoint) -> Result<Complex64> {
        match self {
            ActivationFamily::ReluAffine => {
                Ok(Complex64::new((omega.re * x.re + omega.im).max(0.0), 0.0))
            }
            ActivationFamily::Dirac => Err(Error::InvalidArgument(
                "the Dirac family is a distribution".into(),
            )),
            ActivationFamily::CauchyPower { power } => {
                let d = Complex64::new(1.0, 0.0) - omega.conj() * x;
                if d.norm() < 1e-12 {
                    return Err(Error::SingularEvaluation(format!("activation pole at {x}")));
                }
                Ok(d.powi(-(*power as i32)))
            }
            ActivationFamily::Custom(f) => Ok(Complex64::new(f(x, omega), 0.0)),
        }
    }
}

/// Equispaced grid of `n` points on `[0, 1]`.
pub fn unit_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coefficient of `w^m` in `(1 − w)^{−p}`.
pub fn cauchy_series_coefficient(power: u32, m: usize) -> f64 {
    if power == 0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    binomial((m + power as usize - 1) as u64, (power - 1) as u64)
}

const SECTOR_RADIAL: usize = 32;
const SECTOR_ANGULAR: usize = 64;

/// `ψ_α(x) = ∫ φ_α(ω)·s(x; ω) dV(ω)` (or with `conj(φ_α)` when `conjugate`).
///
/// Interval families are tabulated on `x_grid` (which must span `[0, 1]`) and
/// interpolated by cubic Hermite polynomials; the Cauchy family has a closed
/// form over monomial bases.
pub fn project_activation(
    family: &ActivationFamily,
    basis: &FeatureSet,
    x_grid: &[f64],
    conjugate: bool,
) -> Result<FeatureSet> {
    if basis.domain() != Domain::UnitDisk && !matches!(family, ActivationFamily::Dirac) {
        return Err(Error::InvalidArgument("activation parameters live in the unit disk".into()));
    }
    let kind = match basis.kind() {
        FeatureKind::Harmonic => FeatureKind::AnnProjectedHarmonic,
        _ => FeatureKind::AnnProjected,
    };
    let desc = format!(
        "{} projected on [{}]{}",
        family.name(),
        basis.description(),
        if conjugate { ", conjugated" } else { "" }
    );
    match family {
        ActivationFamily::ReluAffine => relu_projection(basis, x_grid, conjugate, kind, desc),
        ActivationFamily::Dirac => {
            if let BaseFeatures::Dirac { .. } = basis.base() {
                return Ok(basis.clone());
            }
            check_grid(x_grid)?;
            let rows = par_map(x_grid, |&x| {
                let z = Complex64::new(x, 0.0);
                let v = basis.values(z)?;
                let d = basis.derivatives(z)?;
                Ok((maybe_conj(v, conjugate), maybe_conj(d, conjugate)))
            });
            let table = columns_from_rows(x_grid, rows)?;
            FeatureSet::tabulated(kind, table, basis.regularized().to_vec(), desc)
        }
        ActivationFamily::CauchyPower { power } => {
            if conjugate {
                return Err(Error::InvalidArgument(
                    "conjugated projection of a holomorphic family collapses to the constant term"
                        .into(),
                ));
            }
            if !matches!(basis.base(), BaseFeatures::Monomials { .. }) {
                return Err(Error::InvalidArgument(
                    "the Cauchy family is projected in closed form over monomial bases".into(),
                ));
            }
            // ∫ ω^j (1 − conj(ω) z)^{−p} dV = s_j · π/(j+1) · z^j
            let nb = basis.base().len();
            let scale = DMatrix::from_fn(nb, nb, |i, j| {
                if i == j {
                    Complex64::new(cauchy_series_coefficient(*power, j) * PI / (j as f64 + 1.0), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            FeatureSet::new(
                kind,
                Domain::UnitDisk,
                basis.base().clone(),
                basis.map() * scale,
                basis.regularized().to_vec(),
                basis.includes_constant(),
                desc,
            )
        }
        ActivationFamily::Custom(f) => {
            check_grid(x_grid)?;
            let rule = default_disk_rule();
            let rows = par_map(x_grid, |&x| {
                let z = Complex64::new(x, 0.0);
                let mut acc = vec![Complex64::new(0.0, 0.0); basis.len()];
                for (w, om) in rule.weights().iter().zip(rule.points()) {
                    let s = f(z, *om);
                    if !s.is_finite() {
                        return Err(Error::IntegrationFailure { re: om.re, im: om.im });
                    }
                    for (a, v) in acc.iter_mut().zip(basis.values(*om)?) {
                        *a += v * (s * w);
                    }
                }
                Ok(maybe_conj(acc, conjugate))
            });
            let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
            let cols = transpose(&rows);
            let table = HermiteTable::from_values(x_grid.to_vec(), cols)?;
            FeatureSet::tabulated(kind, table, basis.regularized().to_vec(), desc)
        }
    }
}

fn maybe_conj(v: Vec<Complex64>, conjugate: bool) -> Vec<Complex64> {
    if conjugate {
        v.into_iter().map(|c| c.conj()).collect()
    } else {
        v
    }
}

fn check_grid(x_grid: &[f64]) -> Result<()> {
    if x_grid.len() < 3 {
        return Err(Error::InvalidArgument("projection grid needs at least 3 points".into()));
    }
    if x_grid.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::InvalidArgument("projection grid must lie in [0, 1]".into()));
    }
    Ok(())
}

fn transpose(rows: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let k = rows.first().map_or(0, Vec::len);
    (0..k).map(|j| rows.iter().map(|r| r[j]).collect()).collect()
}

type Row = (Vec<Complex64>, Vec<Complex64>);

fn columns_from_rows(x_grid: &[f64], rows: Vec<Result<Row>>) -> Result<HermiteTable> {
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let values: Vec<_> = rows.iter().map(|r| r.0.clone()).collect();
    let derivs: Vec<_> = rows.iter().map(|r| r.1.clone()).collect();
    HermiteTable::new(x_grid.to_vec(), transpose(&values), transpose(&derivs))
}

/// The ReLU kink `x·Re ω + Im ω = 0` is a line through the origin, so the
/// support is the half disk centred on direction `atan2(1, x)`; integrating
/// over that sector keeps the quadrature spectrally accurate.
fn relu_projection(
    basis: &FeatureSet,
    x_grid: &[f64],
    conjugate: bool,
    kind: FeatureKind,
    desc: String,
) -> Result<FeatureSet> {
    check_grid(x_grid)?;
    let sector = QuadratureRule::disk_sector(-FRAC_PI_2, FRAC_PI_2, SECTOR_RADIAL, SECTOR_ANGULAR);
    let rows = par_map(x_grid, |&x| relu_row(basis, &sector, x, conjugate));
    let table = columns_from_rows(x_grid, rows)?;
    FeatureSet::tabulated(kind, table, basis.regularized().to_vec(), desc)
}

fn relu_row(basis: &FeatureSet, sector: &QuadratureRule, x: f64, conjugate: bool) -> Result<Row> {
    // integrate the base features, then apply the feature map once
    let rot = Complex64::from_polar(1.0, 1f64.atan2(x));
    let nb = basis.base().len();
    let mut val = vec![Complex64::new(0.0, 0.0); nb];
    let mut der = vec![Complex64::new(0.0, 0.0); nb];
    let mut phi = Vec::with_capacity(nb);
    for (p, w) in sector.points().iter().zip(sector.weights()) {
        let om = p * rot;
        let lin = (x * om.re + om.im).max(0.0);
        basis.base_values_unchecked(om, false, &mut phi);
        for j in 0..nb {
            let v = if conjugate { phi[j].conj() } else { phi[j] };
            val[j] += v * (lin * w);
            der[j] += v * (om.re * w);
        }
    }
    let m = basis.map();
    let apply = |b: &[Complex64]| -> Vec<Complex64> {
        (0..m.nrows())
            .map(|i| {
                (0..nb)
                    .map(|j| if conjugate { m[(i, j)].conj() } else { m[(i, j)] } * b[j])
                    .sum()
            })
            .collect()
    };
    Ok((apply(&val), apply(&der)))
}

/// The ANN feature pair used for interval experiments: ReLU projections of the
/// orthonormal disk basis and of its harmonic transform.
pub fn relu_ann_features(k: usize, grid_points: usize) -> Result<(FeatureSet, FeatureSet)> {
    let ortho = FeatureSet::monomial_orthonormal(k)?;
    let harmonic = harmonic_transform(&ortho)?;
    let grid = unit_grid(grid_points);
    Ok((
        project_activation(&ActivationFamily::ReluAffine, &ortho, &grid, false)?,
        project_activation(&ActivationFamily::ReluAffine, &harmonic, &grid, false)?,
    ))
}

/// Real features `Re ψ_α`, `Im ψ_α` of a complex feature set on the interval.
/// Columns that vanish identically are dropped.
pub fn realify(features: &FeatureSet) -> Result<FeatureSet> {
    if features.domain() != Domain::UnitInterval {
        return Err(Error::InvalidArgument("realify supports interval features only".into()));
    }
    let desc = format!("real and imaginary parts of [{}]", features.description());
    match features.base() {
        BaseFeatures::Tabulated(table) => {
            let m = features.map();
            let mut vals = Vec::new();
            let mut ders = Vec::new();
            let mut reg = Vec::new();
            for i in 0..features.len() {
                let combine = |cols: &[Vec<Complex64>]| -> Vec<Complex64> {
                    (0..table.grid().len())
                        .map(|g| (0..m.ncols()).map(|p| m[(i, p)] * cols[p][g]).sum())
                        .collect()
                };
                let v = combine(table.values());
                let d = combine(table.derivatives());
                for part in [0usize, 1] {
                    let pick = |c: &Complex64| Complex64::new(if part == 0 { c.re } else { c.im }, 0.0);
                    let pv: Vec<_> = v.iter().map(pick).collect();
                    if pv.iter().all(|c| c.re.abs() < 1e-14) {
                        continue;
                    }
                    vals.push(pv);
                    ders.push(d.iter().map(pick).collect());
                    reg.push(features.regularized()[i]);
                }
            }
            let t = HermiteTable::new(table.grid().to_vec(), vals, ders)?;
            FeatureSet::tabulated(FeatureKind::Custom, t, reg, desc)
        }
        BaseFeatures::Monomials { .. } | BaseFeatures::Dirac { .. } => {
            let m = features.map();
            let mut rows = Vec::new();
            let mut reg = Vec::new();
            for i in 0..m.nrows() {
                for part in [0usize, 1] {
                    let row: Vec<Complex64> = (0..m.ncols())
                        .map(|p| Complex64::new(if part == 0 { m[(i, p)].re } else { m[(i, p)].im }, 0.0))
                        .collect();
                    if row.iter().all(|c| c.re == 0.0) {
                        continue;
                    }
                    rows.push(row);
                    reg.push(features.regularized()[i]);
                }
            }
            let map = DMatrix::from_fn(rows.len(), m.ncols(), |i, j| rows[i][j]);
            FeatureSet::new(
                FeatureKind::Custom,
                Domain::UnitInterval,
                features.base().clone(),
                map,
                reg,
                features.includes_constant(),
                desc,
            )
        }
    }
}

/// Metadata written as header comments of a feature table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableHeader {
    pub family: String,
    pub k: usize,
    pub grid_points: usize,
    pub quadrature: String,
    pub convention: String,
}

/// Long-format CSV `x,alpha,re,im,dre,dim` of a tabulated feature set.
pub fn feature_table_to_csv(features: &FeatureSet, header: &TableHeader) -> Result<String> {
    let BaseFeatures::Tabulated(table) = features.base() else {
        return Err(Error::InvalidArgument("feature set is not tabulated".into()));
    };
    let m = features.map();
    let mut out = String::new();
    let _ = writeln!(out, "# family={}", header.family);
    let _ = writeln!(out, "# K={}", header.k);
    let _ = writeln!(out, "# grid_points={}", header.grid_points);
    let _ = writeln!(out, "# quadrature={}", header.quadrature);
    let _ = writeln!(out, "# convention={}", header.convention);
    let _ = writeln!(
        out,
        "# regularized={}",
        features
            .regularized()
            .iter()
            .map(|r| if *r { "1" } else { "0" })
            .collect::<Vec<_>>()
            .join("")
    );
    out.push_str("x,alpha,re,im,dre,dim\n");
    for (g, x) in table.grid().iter().enumerate() {
        for a in 0..features.len() {
            let v: Complex64 = (0..m.ncols()).map(|p| m[(a, p)] * table.values()[p][g]).sum();
            let d: Complex64 = (0..m.ncols())
                .map(|p| m[(a, p)] * table.derivatives()[p][g])
                .sum();
            let _ = writeln!(
                out,
                "{},{a},{},{},{},{}",
                fmt_f64(*x),
                fmt_f64(v.re),
                fmt_f64(v.im),
                fmt_f64(d.re),
                fmt_f64(d.im)
            );
        }
    }
    Ok(out)
}

/// Reads a table written by [`feature_table_to_csv`].
pub fn feature_table_from_csv(text: &str, kind: FeatureKind) -> Result<FeatureSet> {
    let mut regularized: Option<Vec<bool>> = None;
    for line in text.lines() {
        if let Some(rest) = line.trim().strip_prefix("# regularized=") {
            regularized = Some(rest.chars().map(|c| c == '1').collect());
        }
    }
    let mut grid: Vec<f64> = Vec::new();
    let mut vals: Vec<Vec<Complex64>> = Vec::new();
    let mut ders: Vec<Vec<Complex64>> = Vec::new();
    for (lineno, line) in data_lines(text) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(Error::Parse(format!("line {lineno}: expected 6 fields")));
        }
        let x = parse_f64(f[0])?;
        let a: usize = f[1]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("line {lineno}: bad feature index")))?;
        if grid.last().is_none_or(|last| *last != x) {
            grid.push(x);
        }
        if a >= vals.len() {
            vals.resize(a + 1, Vec::new());
            ders.resize(a + 1, Vec::new());
        }
        vals[a].push(Complex64::new(parse_f64(f[2])?, parse_f64(f[3])?));
        ders[a].push(Complex64::new(parse_f64(f[4])?, parse_f64(f[5])?));
    }
    let k = vals.len();
    let regularized = regularized.unwrap_or_else(|| vec![true; k]);
    if regularized.len() != k {
        return Err(Error::Parse("regularized header does not match feature count".into()));
    }
    let table = HermiteTable::new(grid, vals, ders)?;
    FeatureSet::tabulated(kind, table, regularized, "feature table read from CSV")
}
