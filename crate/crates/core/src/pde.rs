//! Newtonian potentials on grids, the five-point Laplacian, and the
//! divergence-theorem identities behind harmonic activation families.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::ActivationFamily;
use crate::io::fmt_f64;
use crate::par_map;
use crate::point::{ComplexPoint, Label};
use crate::quadrature::{gauss_legendre_on, QuadratureRule, Rect};

/// Largest relative residual accepted by [`robust_h_from_duals`].
pub const RESIDUAL_LIMIT: f64 = 5e-2;
pub const DEFAULT_RESOLUTION: usize = 129;
pub const FINE_RESOLUTION: usize = 257;
const NEUMANN_LIMIT: f64 = 1e-3;
/// Distance kept from the non-smooth set of the source in convergence studies.
pub const DEFAULT_SMOOTH_BAND: f64 = 0.2;

/// Real values on the nodes of a uniform grid over a rectangle.
/// Node `(i, j)` sits at `(x0 + i·hx, y0 + j·hy)` and is stored at `j·nx + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    rect: Rect,
    nx: usize,
    ny: usize,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(rect: Rect, nx: usize, ny: usize, values: Vec<f64>) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::InvalidArgument("grid needs at least 3 nodes per axis".into()));
        }
        if values.len() != nx * ny {
            return Err(Error::InvalidArgument("grid value count mismatch".into()));
        }
        if !(rect.x1 > rect.x0 && rect.y1 > rect.y0) {
            return Err(Error::InvalidArgument("grid rectangle is empty".into()));
        }
        Ok(GridField { rect, nx, ny, values })
    }

    pub fn from_fn(rect: Rect, nx: usize, ny: usize, f: impl Fn(ComplexPoint) -> f64 + Sync + Send) -> Result<Self> {
        let zero = GridField::new(rect, nx, ny, vec![0.0; nx * ny])?;
        let idx: Vec<usize> = (0..nx * ny).collect();
        let values = par_map(&idx, |&k| f(zero.node(k % nx, k / nx)));
        GridField::new(rect, nx, ny, values)
    }

    /// Square grid with `n` nodes per side.
    pub fn square(rect: Rect, n: usize, f: impl Fn(ComplexPoint) -> f64 + Sync + Send) -> Result<Self> {
        GridField::from_fn(rect, n, n, f)
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn hx(&self) -> f64 {
        (self.rect.x1 - self.rect.x0) / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.rect.y1 - self.rect.y0) / (self.ny - 1) as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn node(&self, i: usize, j: usize) -> ComplexPoint {
        Complex64::new(
            self.rect.x0 + self.hx() * i as f64,
            self.rect.y0 + self.hy() * j as f64,
        )
    }

    pub fn same_grid(&self, other: &GridField) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.rect == other.rect
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// CSV with columns `x,y,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,value\n");
        for j in 0..self.ny {
            for i in 0..self.nx {
                let z = self.node(i, j);
                let _ = writeln!(out, "{},{},{}", fmt_f64(z.re), fmt_f64(z.im), fmt_f64(self.at(i, j)));
            }
        }
        out
    }
}

/// `Φ(ω) = −ln|ω| / 2π`, so that `−ΔΦ = δ`.
pub fn fundamental_solution_2d(omega: ComplexPoint) -> Result<f64> {
    let r = omega.norm();
    if r == 0.0 {
        return Err(Error::SingularEvaluation("fundamental solution at the origin".into()));
    }
    Ok(-r.ln() / TAU)
}

/// `∫_{[−a,a]²} Φ(w) dw` in closed form.
pub fn fundamental_solution_cell_integral(a: f64) -> f64 {
    // ∫_{[−a,a]²} ln|w| dw = 2a²(2 ln a + ln 2 − 3 + π/2)
    let log_integral = 2.0 * a * a * (2.0 * a.ln() + 2f64.ln() - 3.0 + PI / 2.0);
    -log_integral / TAU
}

fn fft2(data: &mut [Complex64], n: usize, inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    for row in data.chunks_mut(n) {
        fft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        for j in 0..n {
            col[j] = data[j * n + i];
        }
        fft.process(&mut col);
        for j in 0..n {
            data[j * n + i] = col[j];
        }
    }
}

/// `(Φ ∗ ρ)` at the grid nodes: midpoint rule on every cell except the one
/// containing the target node, which uses the exact cell integral of `Φ`.
/// Evaluated as a zero-padded FFT convolution.
pub fn newtonian_potential(rho: &GridField) -> Result<GridField> {
    let (nx, ny) = (rho.nx, rho.ny);
    let h = rho.hx();
    if (rho.hy() - h).abs() > 1e-12 * h {
        return Err(Error::InvalidArgument("potential needs square cells".into()));
    }
    let n = (2 * nx.max(ny) - 1).next_power_of_two();
    let mut kernel = vec![Complex64::new(0.0, 0.0); n * n];
    let self_cell = fundamental_solution_cell_integral(h / 2.0);
    for dj in -(ny as i64 - 1)..=(ny as i64 - 1) {
        for di in -(nx as i64 - 1)..=(nx as i64 - 1) {
            let v = if di == 0 && dj == 0 {
                self_cell
            } else {
                let w = Complex64::new(di as f64 * h, dj as f64 * h);
                -w.norm().ln() / TAU * h * h
            };
            let i = di.rem_euclid(n as i64) as usize;
            let j = dj.rem_euclid(n as i64) as usize;
            kernel[j * n + i] = Complex64::new(v, 0.0);
        }
    }
    let mut src = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..ny {
        for i in 0..nx {
            src[j * n + i] = Complex64::new(rho.at(i, j), 0.0);
        }
    }
    fft2(&mut kernel, n, false);
    fft2(&mut src, n, false);
    for (s, k) in src.iter_mut().zip(&kernel) {
        *s *= k;
    }
    fft2(&mut src, n, true);
    let scale = 1.0 / (n * n) as f64;
    let mut values = vec![0.0; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            values[j * nx + i] = src[j * n + i].re * scale;
        }
    }
    GridField::new(rho.rect, nx, ny, values)
}

/// Source `Σ_n λ_n t_n s(x_n; ω)` on the grid, zero outside the unit disk.
pub fn dual_source(
    duals: &[f64],
    labels: &[Label],
    family: &ActivationFamily,
    samples: &[ComplexPoint],
    rect: Rect,
    n: usize,
) -> Result<GridField> {
    if duals.len() != labels.len() || duals.len() != samples.len() {
        return Err(Error::InvalidArgument("duals, labels and samples differ in length".into()));
    }
    if let Some(l) = duals.iter().find(|l| !(**l >= 0.0)) {
        return Err(Error::InvalidArgument(format!("dual multiplier {l} is negative")));
    }
    if matches!(family, ActivationFamily::Dirac) {
        return Err(Error::InvalidArgument("the Dirac family has no pointwise source".into()));
    }
    // surface evaluation errors after the parallel fill
    let probe = Complex64::new(0.0, 0.0);
    for x in samples {
        family.eval(*x, probe)?;
    }
    GridField::square(rect, n, |w| {
        if w.norm() > 1.0 {
            return 0.0;
        }
        duals
            .iter()
            .zip(labels)
            .zip(samples)
            .map(|((l, t), x)| l * t.sign() * family.eval(*x, w).map(|v| v.re).unwrap_or(f64::NAN))
            .sum()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub max_abs: f64,
    pub mean_abs: f64,
    /// `max_abs / max |rhs|` over the checked nodes (or `max_abs` when the
    /// right-hand side vanishes there).
    pub max_rel: f64,
    pub h_grid: f64,
    pub nodes: usize,
}

/// `|(−Δ_h h) − rhs|` over nodes at least two cells from the grid edge.
pub fn laplacian_residual(h: &GridField, rhs: &GridField) -> Result<ResidualReport> {
    laplacian_residual_masked(h, rhs, |_| true)
}

/// As [`laplacian_residual`], restricted to nodes where `mask` holds.
pub fn laplacian_residual_masked(
    h: &GridField,
    rhs: &GridField,
    mask: impl Fn(ComplexPoint) -> bool,
) -> Result<ResidualReport> {
    if !h.same_grid(rhs) {
        return Err(Error::InvalidArgument("fields live on different grids".into()));
    }
    let (hx, hy) = (h.hx(), h.hy());
    let mut max_abs = 0.0f64;
    let mut sum = 0.0;
    let mut rhs_max = 0.0f64;
    let mut nodes = 0;
    for j in 2..h.ny - 2 {
        for i in 2..h.nx - 2 {
            if !mask(h.node(i, j)) {
                continue;
            }
            let lap = (h.at(i + 1, j) - 2.0 * h.at(i, j) + h.at(i - 1, j)) / (hx * hx)
                + (h.at(i, j + 1) - 2.0 * h.at(i, j) + h.at(i, j - 1)) / (hy * hy);
            let r = (-lap - rhs.at(i, j)).abs();
            max_abs = max_abs.max(r);
            rhs_max = rhs_max.max(rhs.at(i, j).abs());
            sum += r;
            nodes += 1;
        }
    }
    if nodes == 0 {
        return Err(Error::InvalidArgument("no interior nodes to check".into()));
    }
    Ok(ResidualReport {
        max_abs,
        mean_abs: sum / nodes as f64,
        max_rel: if rhs_max > 0.0 { max_abs / rhs_max } else { max_abs },
        h_grid: hx.max(hy),
        nodes,
    })
}

/// Nodes kept by the potential check: inside the bounding box by two cells
/// and at least two cells away from the unit circle, where the source jumps.
pub fn potential_mask(h_grid: f64) -> impl Fn(ComplexPoint) -> bool {
    move |z: ComplexPoint| (z.norm() - 1.0).abs() >= 2.0 * h_grid
}

/// Default bounding box of the parameter disk.
pub fn potential_rect() -> Rect {
    Rect::new(-1.25, 1.25, -1.25, 1.25)
}

#[derive(Debug, Clone)]
pub struct PotentialResult {
    pub field: GridField,
    pub source: GridField,
    pub residual: ResidualReport,
}

/// `h(ω) = Σ λ_n t_n ∫ Φ(ω − w) s(x_n; w) dV(w)` on an `n × n` grid over the
/// default box, checked against `−Δh = Σ λ_n t_n s(x_n; ω)`.
pub fn robust_h_from_duals(
    duals: &[f64],
    labels: &[Label],
    family: &ActivationFamily,
    samples: &[ComplexPoint],
    n: usize,
) -> Result<PotentialResult> {
    let rect = potential_rect();
    let source = dual_source(duals, labels, family, samples, rect, n)?;
    let field = newtonian_potential(&source)?;
    let residual = laplacian_residual_masked(&field, &source, potential_mask(field.hx()))?;
    if residual.max_rel > RESIDUAL_LIMIT {
        return Err(Error::ResolutionInsufficient(residual.max_rel));
    }
    Ok(PotentialResult {
        field,
        source,
        residual,
    })
}

/// Nodes farther than `band` from every place the source is not smooth:
/// the unit circle and, for the ReLU family, each kink line `Re ω·x + Im ω = 0`
/// of a sample with a nonzero multiplier.
pub fn smooth_region_mask(
    duals: &[f64],
    family: &ActivationFamily,
    samples: &[ComplexPoint],
    band: f64,
) -> impl Fn(ComplexPoint) -> bool {
    let kinks: Vec<f64> = match family {
        ActivationFamily::ReluAffine => duals
            .iter()
            .zip(samples)
            .filter(|(l, _)| **l > 0.0)
            .map(|(_, x)| x.re)
            .collect(),
        _ => Vec::new(),
    };
    move |w: ComplexPoint| {
        (w.norm() - 1.0).abs() >= band
            && kinks
                .iter()
                .all(|x| (w.re * x + w.im).abs() >= band * (x * x + 1.0).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub coarse: ResidualReport,
    pub fine: ResidualReport,
    /// `log2` of the ratio of maximal residuals on the common smooth region.
    pub order: f64,
    pub band: f64,
}

/// Residuals of the potential at two resolutions over a fixed smooth region.
pub fn potential_convergence(
    duals: &[f64],
    labels: &[Label],
    family: &ActivationFamily,
    samples: &[ComplexPoint],
    coarse: usize,
    fine: usize,
    band: f64,
) -> Result<ConvergenceReport> {
    let mut out = Vec::new();
    for n in [coarse, fine] {
        let r = robust_h_from_duals(duals, labels, family, samples, n)?;
        let mask = smooth_region_mask(duals, family, samples, band);
        out.push(laplacian_residual_masked(&r.field, &r.source, mask)?);
    }
    let ratio = out[0].max_abs / out[1].max_abs;
    let h_ratio = out[0].h_grid / out[1].h_grid;
    Ok(ConvergenceReport {
        coarse: out[0],
        fine: out[1],
        order: ratio.ln() / h_ratio.ln(),
        band,
    })
}

/// Smooth field `𝔰` on a rectangle with known gradient and `s = −Δ𝔰`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActivationField {
    /// `cos(kx·x)·cos(ky·y)`.
    CosineMode { kx: f64, ky: f64 },
    /// `sin(kx·x)·sin(ky·y)`; violates the Neumann condition on `[0, π]²`.
    SineMode { kx: f64, ky: f64 },
}

impl ActivationField {
    pub fn value(&self, z: ComplexPoint) -> f64 {
        match *self {
            ActivationField::CosineMode { kx, ky } => (kx * z.re).cos() * (ky * z.im).cos(),
            ActivationField::SineMode { kx, ky } => (kx * z.re).sin() * (ky * z.im).sin(),
        }
    }

    pub fn gradient(&self, z: ComplexPoint) -> (f64, f64) {
        match *self {
            ActivationField::CosineMode { kx, ky } => (
                -kx * (kx * z.re).sin() * (ky * z.im).cos(),
                -ky * (kx * z.re).cos() * (ky * z.im).sin(),
            ),
            ActivationField::SineMode { kx, ky } => (
                kx * (kx * z.re).cos() * (ky * z.im).sin(),
                ky * (kx * z.re).sin() * (ky * z.im).cos(),
            ),
        }
    }

    /// `s = −Δ𝔰`.
    pub fn source(&self, z: ComplexPoint) -> f64 {
        let (kx, ky) = match *self {
            ActivationField::CosineMode { kx, ky } | ActivationField::SineMode { kx, ky } => (kx, ky),
        };
        (kx * kx + ky * ky) * self.value(z)
    }

    /// `Some(μ)` when `−Δ𝔰 = μ𝔰`.
    pub fn eigenvalue(&self) -> Option<f64> {
        match *self {
            ActivationField::CosineMode { kx, ky } | ActivationField::SineMode { kx, ky } => {
                Some(kx * kx + ky * ky)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityPair {
    pub n: usize,
    pub m: usize,
    /// `∫ ∇𝔰_n·∇𝔰_m`
    pub gradient_form: f64,
    /// `∫ 𝔰_n s_m`
    pub source_form: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicActivationReport {
    pub dirichlet_energy: f64,
    pub norm_sqr: f64,
    /// `Σ a_n a_m ∫ 𝔰_n s_m`
    pub cross_form: f64,
    pub pairs: Vec<IdentityPair>,
    /// Largest `|∫∇𝔰_n·∇𝔰_m − ∫𝔰_n s_m| / (1 + |∫𝔰_n s_m|)`.
    pub max_identity_error: f64,
    /// Every field satisfies `−Δ𝔰 = 𝔰`.
    pub eigen_case: bool,
    /// `|‖h‖² − E[h]| / max(‖h‖², E[h])`.
    pub norm_energy_rel_gap: f64,
    pub max_normal_derivative: f64,
}

/// Checks the divergence-theorem identity `∫∇𝔰_n·∇𝔰_m = ∫𝔰_n s_m` and,
/// for `h = Σ a_n 𝔰_n`, compares `‖h‖²` with `E[h] = ∫‖∇h‖²`.
pub fn harmonic_activation_check(
    fields: &[ActivationField],
    coeffs: &[f64],
    rect: Rect,
    order: usize,
) -> Result<HarmonicActivationReport> {
    if fields.is_empty() || fields.len() != coeffs.len() {
        return Err(Error::InvalidArgument("one coefficient per field is required".into()));
    }
    // Neumann data on the four edges.
    let (xs, _) = gauss_legendre_on(order, rect.x0, rect.x1);
    let (ys, _) = gauss_legendre_on(order, rect.y0, rect.y1);
    let mut normal = 0.0f64;
    for f in fields {
        for &x in &xs {
            for y in [rect.y0, rect.y1] {
                normal = normal.max(f.gradient(Complex64::new(x, y)).1.abs());
            }
        }
        for &y in &ys {
            for x in [rect.x0, rect.x1] {
                normal = normal.max(f.gradient(Complex64::new(x, y)).0.abs());
            }
        }
    }
    if normal > NEUMANN_LIMIT {
        return Err(Error::BoundaryConditionViolated(normal));
    }
    let rule = QuadratureRule::rectangle(rect, order, order);
    let k = fields.len();
    let mut pairs = Vec::new();
    let mut max_err = 0.0f64;
    let mut cross = 0.0;
    for n in 0..k {
        for m in 0..k {
            let g = rule.integrate_real(|z| {
                let (a, b) = (fields[n].gradient(z), fields[m].gradient(z));
                a.0 * b.0 + a.1 * b.1
            })?;
            let s = rule.integrate_real(|z| fields[n].value(z) * fields[m].source(z))?;
            max_err = max_err.max((g - s).abs() / (1.0 + s.abs()));
            cross += coeffs[n] * coeffs[m] * s;
            pairs.push(IdentityPair {
                n,
                m,
                gradient_form: g,
                source_form: s,
            });
        }
    }
    let energy = rule.integrate_real(|z| {
        let (gx, gy) = fields
            .iter()
            .zip(coeffs)
            .fold((0.0, 0.0), |(x, y), (f, a)| {
                let g = f.gradient(z);
                (x + a * g.0, y + a * g.1)
            });
        gx * gx + gy * gy
    })?;
    let norm_sqr = rule.integrate_real(|z| {
        let v: f64 = fields.iter().zip(coeffs).map(|(f, a)| a * f.value(z)).sum();
        v * v
    })?;
    let eigen_case = fields
        .iter()
        .all(|f| f.eigenvalue().is_some_and(|mu| (mu - 1.0).abs() < 1e-12));
    let scale = norm_sqr.max(energy).max(f64::MIN_POSITIVE);
    Ok(HarmonicActivationReport {
        dirichlet_energy: energy,
        norm_sqr,
        cross_form: cross,
        pairs,
        max_identity_error: max_err,
        eigen_case,
        norm_energy_rel_gap: (norm_sqr - energy).abs() / scale,
        max_normal_derivative: normal,
    })
}

/// `[0, π]²`.
pub fn eigen_rect() -> Rect {
    Rect::new(0.0, PI, 0.0, PI)
}
