//! Tensor-product quadrature on the disk, the circle, the unit interval and
//! axis-aligned rectangles.
//!
//! Disk rules are Gauss–Legendre in the radius (Jacobian `r` folded into the
//! weights) times the trapezoid rule in the angle. Circle rules are the
//! equispaced trapezoid rule, spectrally accurate for smooth periodic
//! integrands. Sums are accumulated with Neumaier compensation in node order,
//! so results are reproducible for a fixed rule.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::point::ComplexPoint;

pub const DEFAULT_DISK_RADIAL: usize = 64;
pub const DEFAULT_DISK_ANGULAR: usize = 256;
pub const DEFAULT_CIRCLE_ANGLES: usize = 4096;
pub const DEFAULT_INTERVAL_ORDER: usize = 256;
pub const DEFAULT_RECT_ORDER: usize = 64;

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi's initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let pm1 = if n == 0 { 0.0 } else { p0 };
    let d = n as f64 * (x * p - pm1) / (x * x - 1.0);
    (p, d)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        x.iter().map(|&t| mid + half * t).collect(),
        w.iter().map(|&v| half * v).collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadratureDomain {
    UnitDisk,
    DiskSector { theta_lo: f64, theta_hi: f64 },
    UnitCircle,
    UnitInterval,
    Rectangle(Rect),
}

/// A list of `(point, weight)` pairs over one domain.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    domain: QuadratureDomain,
    points: Vec<ComplexPoint>,
    weights: Vec<f64>,
    order: usize,
}

impl QuadratureRule {
    pub fn disk(radial: usize, angular: usize) -> Self {
        let (r, wr) = gauss_legendre_on(radial, 0.0, 1.0);
        let dtheta = TAU / angular as f64;
        let mut points = Vec::with_capacity(radial * angular);
        let mut weights = Vec::with_capacity(radial * angular);
        for j in 0..angular {
            let e = Complex64::from_polar(1.0, dtheta * j as f64);
            for (ri, wi) in r.iter().zip(&wr) {
                points.push(e * *ri);
                weights.push(wi * ri * dtheta);
            }
        }
        QuadratureRule {
            domain: QuadratureDomain::UnitDisk,
            points,
            weights,
            order: radial,
        }
    }

    /// Gauss–Legendre in both radius and angle over `θ ∈ [theta_lo, theta_hi]`.
    /// Used when the integrand has a kink along a ray through the origin.
    pub fn disk_sector(theta_lo: f64, theta_hi: f64, radial: usize, angular: usize) -> Self {
        let (r, wr) = gauss_legendre_on(radial, 0.0, 1.0);
        let (th, wt) = gauss_legendre_on(angular, theta_lo, theta_hi);
        let mut points = Vec::with_capacity(radial * angular);
        let mut weights = Vec::with_capacity(radial * angular);
        for (tj, wj) in th.iter().zip(&wt) {
            let e = Complex64::from_polar(1.0, *tj);
            for (ri, wi) in r.iter().zip(&wr) {
                points.push(e * *ri);
                weights.push(wi * ri * wj);
            }
        }
        QuadratureRule {
            domain: QuadratureDomain::DiskSector { theta_lo, theta_hi },
            points,
            weights,
            order: radial,
        }
    }

    pub fn circle(angles: usize) -> Self {
        let dtheta = TAU / angles as f64;
        QuadratureRule {
            domain: QuadratureDomain::UnitCircle,
            points: (0..angles)
                .map(|j| Complex64::from_polar(1.0, dtheta * j as f64))
                .collect(),
            weights: vec![dtheta; angles],
            order: angles,
        }
    }

    pub fn interval(order: usize) -> Self {
        let (x, w) = gauss_legendre_on(order, 0.0, 1.0);
        QuadratureRule {
            domain: QuadratureDomain::UnitInterval,
            points: x.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
            weights: w,
            order,
        }
    }

    pub fn rectangle(rect: Rect, nx: usize, ny: usize) -> Self {
        let (x, wx) = gauss_legendre_on(nx, rect.x0, rect.x1);
        let (y, wy) = gauss_legendre_on(ny, rect.y0, rect.y1);
        let mut points = Vec::with_capacity(nx * ny);
        let mut weights = Vec::with_capacity(nx * ny);
        for (yj, wj) in y.iter().zip(&wy) {
            for (xi, wi) in x.iter().zip(&wx) {
                points.push(Complex64::new(*xi, *yj));
                weights.push(wi * wj);
            }
        }
        QuadratureRule {
            domain: QuadratureDomain::Rectangle(rect),
            points,
            weights,
            order: nx.max(ny),
        }
    }

    pub fn domain(&self) -> QuadratureDomain {
        self.domain
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn points(&self) -> &[ComplexPoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sum of the weights: π, 2π, 1 or the rectangle's area.
    pub fn measure(&self) -> f64 {
        let mut acc = NeumaierSum::default();
        for w in &self.weights {
            acc.add(*w);
        }
        acc.value()
    }

    pub fn integrate<F>(&self, f: F) -> Result<Complex64>
    where
        F: Fn(ComplexPoint) -> Complex64,
    {
        let mut acc = ComplexSum::default();
        for (z, w) in self.points.iter().zip(&self.weights) {
            let v = f(*z);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::IntegrationFailure { re: z.re, im: z.im });
            }
            acc.add(v * *w);
        }
        Ok(acc.value())
    }

    pub fn integrate_real<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(ComplexPoint) -> f64,
    {
        let mut acc = NeumaierSum::default();
        for (z, w) in self.points.iter().zip(&self.weights) {
            let v = f(*z);
            if !v.is_finite() {
                return Err(Error::IntegrationFailure { re: z.re, im: z.im });
            }
            acc.add(v * *w);
        }
        Ok(acc.value())
    }
}

fn default_disk() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| QuadratureRule::disk(DEFAULT_DISK_RADIAL, DEFAULT_DISK_ANGULAR))
}

fn default_circle() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| QuadratureRule::circle(DEFAULT_CIRCLE_ANGLES))
}

fn default_interval() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| QuadratureRule::interval(DEFAULT_INTERVAL_ORDER))
}

/// `∫_𝔻 f dV` with the default 64 × 256 rule.
pub fn integrate_disk<F: Fn(ComplexPoint) -> Complex64>(f: F) -> Result<Complex64> {
    default_disk().integrate(f)
}

/// `∫_0^{2π} f(e^{iθ}) dθ` with 4096 equispaced angles.
pub fn integrate_circle<F: Fn(ComplexPoint) -> Complex64>(f: F) -> Result<Complex64> {
    default_circle().integrate(f)
}

/// `∫_0^1 f(x) dx` with 256-point Gauss–Legendre. The integrand receives `x + 0i`.
pub fn integrate_interval<F: Fn(ComplexPoint) -> Complex64>(f: F) -> Result<Complex64> {
    default_interval().integrate(f)
}

pub fn integrate_rect<F: Fn(ComplexPoint) -> Complex64>(rect: Rect, f: F) -> Result<Complex64> {
    QuadratureRule::rectangle(rect, DEFAULT_RECT_ORDER, DEFAULT_RECT_ORDER).integrate(f)
}

pub(crate) fn default_disk_rule() -> &'static QuadratureRule {
    default_disk()
}

pub(crate) fn default_interval_rule() -> &'static QuadratureRule {
    default_interval()
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn add(&mut self, v: Complex64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}
