//! Domain coloring, circle profiles, range curves and field heatmaps as
//! 8-bit RGBA PNG images plus CSV curve data.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::hypothesis::Hypothesis;
use crate::io::fmt_f64;
use crate::par_map;
use crate::pde::GridField;
use crate::quadrature::QuadratureRule;

pub type Rgba = [u8; 4];

const WHITE: Rgba = [255, 255, 255, 255];
const BLACK: Rgba = [0, 0, 0, 255];
const GREY: Rgba = [160, 160, 160, 255];
const RE_COLOR: Rgba = [200, 40, 40, 255];
const IM_COLOR: Rgba = [40, 80, 200, 255];
const MARK_COLOR: Rgba = [20, 150, 60, 255];

/// How `|f|` is squashed into `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MagnitudeMap {
    /// `m / (1 + m)`
    #[default]
    Rational,
    /// `ℓ / (1 + ℓ)` with `ℓ = ln(1 + m)`, for fields with large excursions.
    Log,
}

impl MagnitudeMap {
    pub fn apply(self, m: f64) -> f64 {
        let m = match self {
            MagnitudeMap::Rational => m,
            MagnitudeMap::Log => m.ln_1p(),
        };
        m / (1.0 + m)
    }
}

/// Which HSV channel carries the compressed magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MagnitudeChannel {
    #[default]
    Saturation,
    Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderConfig {
    pub size: usize,
    pub re_levels: Vec<f64>,
    pub im_levels: Vec<f64>,
    pub magnitude: MagnitudeMap,
    pub channel: MagnitudeChannel,
    /// Samples along the circle for profiles and range curves.
    pub n_angles: usize,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            size: 512,
            re_levels: vec![-1.0, -0.5, 0.0, 0.5, 1.0],
            im_levels: vec![-1.0, -0.5, 0.0, 0.5, 1.0],
            magnitude: MagnitudeMap::Rational,
            channel: MagnitudeChannel::Saturation,
            n_angles: 4096,
        }
    }
}

impl RenderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.size < 64 {
            return Err(Error::InvalidArgument(format!("image size {} is below 64", self.size)));
        }
        if self.n_angles < 64 {
            return Err(Error::InvalidArgument("at least 64 angles are required".into()));
        }
        if self.re_levels.iter().chain(&self.im_levels).any(|l| !l.is_finite()) {
            return Err(Error::InvalidArgument("contour levels must be finite".into()));
        }
        Ok(())
    }
}

/// Row-major RGBA image, row 0 at the top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: usize,
    height: usize,
    rgba: Vec<u8>,
}

impl Image {
    pub fn new(width: usize, height: usize, fill: Rgba) -> Self {
        Image {
            width,
            height,
            rgba: fill.repeat(width * height),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn rgba(&self) -> &[u8] {
        &self.rgba
    }

    pub fn pixel(&self, x: usize, y: usize) -> Rgba {
        let i = 4 * (y * self.width + x);
        [self.rgba[i], self.rgba[i + 1], self.rgba[i + 2], self.rgba[i + 3]]
    }

    pub fn set(&mut self, x: i64, y: i64, c: Rgba) {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            return;
        }
        let i = 4 * (y as usize * self.width + x as usize);
        self.rgba[i..i + 4].copy_from_slice(&c);
    }

    /// Straight segment between pixel-space points.
    pub fn line(&mut self, (x0, y0): (f64, f64), (x1, y1): (f64, f64), c: Rgba) {
        if ![x0, y0, x1, y1].iter().all(|v| v.is_finite()) {
            return;
        }
        let steps = (x1 - x0).abs().max((y1 - y0).abs()).ceil().max(1.0) as usize;
        for s in 0..=steps {
            let t = s as f64 / steps as f64;
            let x = x0 + t * (x1 - x0);
            let y = y0 + t * (y1 - y0);
            self.set(x.round() as i64, y.round() as i64, c);
        }
    }

    fn dot(&mut self, (x, y): (f64, f64), r: i64, c: Rgba) {
        let (cx, cy) = (x.round() as i64, y.round() as i64);
        for dy in -r..=r {
            for dx in -r..=r {
                if dx * dx + dy * dy <= r * r {
                    self.set(cx + dx, cy + dy, c);
                }
            }
        }
    }

    /// PNG bytes: IHDR, IDAT and IEND only, so equal images encode identically.
    pub fn to_png(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, self.width as u32, self.height as u32);
            enc.set_color(png::ColorType::Rgba);
            enc.set_depth(png::BitDepth::Eight);
            let mut w = enc
                .write_header()
                .map_err(|e| Error::Internal(format!("png header: {e}")))?;
            w.write_image_data(&self.rgba)
                .map_err(|e| Error::Internal(format!("png data: {e}")))?;
            w.finish()
                .map_err(|e| Error::Internal(format!("png finish: {e}")))?;
        }
        Ok(out)
    }
}

/// `h, s, v ∈ [0, 1]`.
pub fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [u8; 3] {
    let h6 = (h.rem_euclid(1.0)) * 6.0;
    let sector = (h6.floor() as usize).min(5);
    let f = h6 - sector as f64;
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    let (r, g, b) = match sector {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    let q8 = |x: f64| (x.clamp(0.0, 1.0) * 255.0).round() as u8;
    [q8(r), q8(g), q8(b)]
}

/// Color of one value: hue from the argument, magnitude on the chosen channel.
pub fn domain_color(f: Complex64, cfg: &RenderConfig) -> Rgba {
    if !(f.re.is_finite() && f.im.is_finite()) {
        return BLACK;
    }
    let hue = f.arg().rem_euclid(TAU) / TAU;
    let m = cfg.magnitude.apply(f.norm());
    let [r, g, b] = match cfg.channel {
        MagnitudeChannel::Saturation => hsv_to_rgb(hue, m, 1.0),
        MagnitudeChannel::Value => hsv_to_rgb(hue, 1.0, m),
    };
    [r, g, b, 255]
}

/// Segment in grid coordinates: `(i, j)` is node `i` along x, `j` along y.
pub type Segment = [(f64, f64); 2];

/// Iso-line `value = level` of a row-major `nx × ny` node grid.
///
/// Nodes with `value ≥ level` count as inside; saddles are split by the cell
/// mean. Cells touching a non-finite node are skipped.
pub fn marching_squares(values: &[f64], nx: usize, ny: usize, level: f64) -> Vec<Segment> {
    let mut segs = Vec::new();
    if nx < 2 || ny < 2 || values.len() != nx * ny {
        return segs;
    }
    let v = |i: usize, j: usize| values[j * nx + i];
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            // corners counter-clockwise from (i, j)
            let c = [v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)];
            if c.iter().any(|x| !x.is_finite()) {
                continue;
            }
            let pos = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
            let inside: Vec<bool> = c.iter().map(|x| *x >= level).collect();
            let case = inside
                .iter()
                .enumerate()
                .fold(0usize, |acc, (k, b)| acc | ((*b as usize) << k));
            if case == 0 || case == 15 {
                continue;
            }
            // crossing point on edge k (from corner k to corner k+1)
            let edge = |k: usize| {
                let (a, b) = (k, (k + 1) % 4);
                let t = (level - c[a]) / (c[b] - c[a]);
                let (pa, pb) = (pos[a], pos[b]);
                (
                    i as f64 + pa.0 + t * (pb.0 - pa.0),
                    j as f64 + pa.1 + t * (pb.1 - pa.1),
                )
            };
            let crossed: Vec<usize> = (0..4).filter(|&k| inside[k] != inside[(k + 1) % 4]).collect();
            if crossed.len() == 2 {
                segs.push([edge(crossed[0]), edge(crossed[1])]);
            } else {
                let centre_inside = c.iter().sum::<f64>() / 4.0 >= level;
                // pair each crossing with its neighbour around the corner that
                // is separated from the centre
                let pairs = if inside[0] == centre_inside { [(1, 2), (3, 0)] } else { [(0, 1), (2, 3)] };
                for (a, b) in pairs {
                    segs.push([edge(a), edge(b)]);
                }
            }
        }
    }
    segs
}

#[derive(Debug, Clone)]
pub struct DomainColoring {
    pub image: Image,
    pub nonfinite_pixels: usize,
}

fn pixel_to_disk(i: f64, j: f64, size: usize) -> Complex64 {
    let s = 2.0 / size as f64;
    Complex64::new(-1.0 + (i + 0.5) * s, 1.0 - (j + 0.5) * s)
}

/// Domain coloring of `h` on the unit disk with Re-contours in white and
/// Im-contours in black. Pixels outside the disk are transparent.
pub fn render_domain_coloring(h: &Hypothesis, cfg: &RenderConfig) -> Result<DomainColoring> {
    cfg.validate()?;
    let n = cfg.size;
    let rows: Vec<usize> = (0..n).collect();
    let values: Vec<Vec<Option<Complex64>>> = par_map(&rows, |&j| {
        (0..n)
            .map(|i| {
                let z = pixel_to_disk(i as f64, j as f64, n);
                (z.norm() <= 1.0).then(|| h.eval_pair_unchecked(z).0)
            })
            .collect()
    });
    let mut image = Image::new(n, n, [0, 0, 0, 0]);
    let mut nonfinite = 0;
    for (j, row) in values.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            if let Some(f) = v {
                if !(f.re.is_finite() && f.im.is_finite()) {
                    nonfinite += 1;
                }
                image.set(i as i64, j as i64, domain_color(*f, cfg));
            }
        }
    }
    let flat = |part: fn(&Complex64) -> f64| -> Vec<f64> {
        values
            .iter()
            .flatten()
            .map(|v| v.as_ref().map_or(f64::NAN, part))
            .collect()
    };
    let re = flat(|f| f.re);
    let im = flat(|f| f.im);
    for (field, levels, color) in [(&re, &cfg.re_levels, WHITE), (&im, &cfg.im_levels, BLACK)] {
        for &level in levels {
            for [a, b] in marching_squares(field, n, n, level) {
                image.line(a, b, color);
            }
        }
    }
    Ok(DomainColoring {
        image,
        nonfinite_pixels: nonfinite,
    })
}

/// `f(e^{iθ})` at `θ_j = 2πj/n`.
fn circle_values(h: &Hypothesis, n: usize) -> (Vec<f64>, Vec<Complex64>) {
    let thetas: Vec<f64> = (0..n).map(|j| TAU * j as f64 / n as f64).collect();
    let values = par_map(&thetas, |&t| h.eval_pair_unchecked(Complex64::from_polar(1.0, t)).0);
    (thetas, values)
}

/// Sign changes of consecutive nonzero samples around the closed curve.
fn sign_changes(re: &[f64]) -> usize {
    let nz: Vec<f64> = re.iter().copied().filter(|v| *v != 0.0).collect();
    let n = nz.len();
    (0..n).filter(|&i| nz[i].signum() != nz[(i + 1) % n].signum()).count()
}

/// Scales data coordinates into a plot box with a margin.
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    width: usize,
    height: usize,
    margin: f64,
}

impl Frame {
    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let w = self.width as f64 - 2.0 * self.margin;
        let h = self.height as f64 - 2.0 * self.margin;
        (
            self.margin + (x - self.x0) / (self.x1 - self.x0) * w,
            self.margin + (self.y1 - y) / (self.y1 - self.y0) * h,
        )
    }

    fn polyline(&self, img: &mut Image, pts: &[(f64, f64)], c: Rgba) {
        for w in pts.windows(2) {
            img.line(self.map(w[0].0, w[0].1), self.map(w[1].0, w[1].1), c);
        }
    }
}

fn symmetric_range(values: impl Iterator<Item = f64>) -> f64 {
    let m = values.filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs()));
    if m > 0.0 {
        1.05 * m
    } else {
        1.0
    }
}

#[derive(Debug, Clone)]
pub struct CircleProfile {
    pub theta: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Sign changes of `Re f` between consecutive samples.
    pub crossings: usize,
    pub image: Image,
}

impl CircleProfile {
    /// CSV with columns `theta,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,re,im\n");
        for (t, v) in self.theta.iter().zip(&self.values) {
            let _ = writeln!(out, "{},{},{}", fmt_f64(*t), fmt_f64(v.re), fmt_f64(v.im));
        }
        out
    }
}

/// `Re f` (red) and `Im f` (blue) over `θ ∈ [0, 2π)`, crossings of `Re f = 0` marked.
pub fn render_circle_profiles(h: &Hypothesis, n_angles: usize, size: usize) -> Result<CircleProfile> {
    if n_angles < 64 || size < 64 {
        return Err(Error::InvalidArgument("need at least 64 angles and 64 pixels".into()));
    }
    let (theta, values) = circle_values(h, n_angles);
    let span = symmetric_range(values.iter().flat_map(|v| [v.re, v.im]));
    let frame = Frame {
        x0: 0.0,
        x1: TAU,
        y0: -span,
        y1: span,
        width: 2 * size,
        height: size,
        margin: 8.0,
    };
    let mut img = Image::new(frame.width, frame.height, WHITE);
    frame.polyline(&mut img, &[(0.0, 0.0), (TAU, 0.0)], GREY);
    let re: Vec<(f64, f64)> = theta.iter().zip(&values).map(|(t, v)| (*t, v.re)).collect();
    let im: Vec<(f64, f64)> = theta.iter().zip(&values).map(|(t, v)| (*t, v.im)).collect();
    frame.polyline(&mut img, &im, IM_COLOR);
    frame.polyline(&mut img, &re, RE_COLOR);
    let n = values.len();
    let mut crossings = 0;
    let nz: Vec<usize> = (0..n).filter(|&i| values[i].re != 0.0).collect();
    for k in 0..nz.len() {
        let (a, b) = (nz[k], nz[(k + 1) % nz.len()]);
        if values[a].re.signum() != values[b].re.signum() {
            crossings += 1;
            let t = theta[a] + 0.5 * TAU / n as f64;
            frame.polyline(&mut img, &[(t, -span), (t, span)], MARK_COLOR);
        }
    }
    Ok(CircleProfile {
        theta,
        values,
        crossings,
        image: img,
    })
}

#[derive(Debug, Clone)]
pub struct RangeCurve {
    pub points: Vec<Complex64>,
    /// Length of the closed polygon through the samples.
    pub length: f64,
    /// Crossings of the imaginary axis.
    pub axis_crossings: usize,
    pub image: Image,
}

impl RangeCurve {
    /// CSV with columns `theta,re,im`.
    pub fn to_csv(&self) -> String {
        let n = self.points.len();
        let mut out = String::from("theta,re,im\n");
        for (j, v) in self.points.iter().enumerate() {
            let t = TAU * j as f64 / n as f64;
            let _ = writeln!(out, "{},{},{}", fmt_f64(t), fmt_f64(v.re), fmt_f64(v.im));
        }
        out
    }
}

/// The closed curve `θ ↦ f(e^{iθ})` in the range plane with the imaginary
/// axis (the decision boundary) drawn in black.
pub fn render_range_curve(h: &Hypothesis, n_angles: usize, size: usize) -> Result<RangeCurve> {
    if n_angles < 64 || size < 64 {
        return Err(Error::InvalidArgument("need at least 64 angles and 64 pixels".into()));
    }
    let (_, points) = circle_values(h, n_angles);
    let n = points.len();
    let length: f64 = (0..n).map(|j| (points[(j + 1) % n] - points[j]).norm()).sum();
    let re: Vec<f64> = points.iter().map(|p| p.re).collect();
    let span = symmetric_range(points.iter().flat_map(|v| [v.re, v.im]));
    let frame = Frame {
        x0: -span,
        x1: span,
        y0: -span,
        y1: span,
        width: size,
        height: size,
        margin: 8.0,
    };
    let mut img = Image::new(size, size, WHITE);
    frame.polyline(&mut img, &[(-span, 0.0), (span, 0.0)], GREY);
    frame.polyline(&mut img, &[(0.0, -span), (0.0, span)], BLACK);
    let mut pts: Vec<(f64, f64)> = points.iter().map(|p| (p.re, p.im)).collect();
    pts.push(pts[0]);
    frame.polyline(&mut img, &pts, RE_COLOR);
    Ok(RangeCurve {
        points,
        length,
        axis_crossings: sign_changes(&re),
        image: img,
    })
}

/// `∫₀^{2π} |f′(e^{iθ})| dθ` by the periodic trapezoid rule.
pub fn boundary_arc_length(h: &Hypothesis, n_angles: usize) -> Result<f64> {
    QuadratureRule::circle(n_angles).integrate_real(|z| h.eval_pair_unchecked(z).1.norm())
}

#[derive(Debug, Clone)]
pub struct IntervalProfile {
    pub x: Vec<f64>,
    pub values: Vec<Complex64>,
    pub image: Image,
}

impl IntervalProfile {
    /// CSV with columns `x,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,re,im\n");
        for (x, v) in self.x.iter().zip(&self.values) {
            let _ = writeln!(out, "{},{},{}", fmt_f64(*x), fmt_f64(v.re), fmt_f64(v.im));
        }
        out
    }
}

/// `Re f` and `Im f` over `[0, 1]` with the training points at `t = ±1`
/// and the margin lines `Re f = ±1` in grey.
pub fn render_interval_profile(h: &Hypothesis, data: &Dataset, n: usize, size: usize) -> Result<IntervalProfile> {
    if n < 2 || size < 64 {
        return Err(Error::InvalidArgument("need at least 2 samples and 64 pixels".into()));
    }
    let x: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let values = x
        .iter()
        .map(|&x| h.eval(Complex64::new(x, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    let span = symmetric_range(values.iter().flat_map(|v| [v.re, v.im]).chain([1.0]));
    let frame = Frame {
        x0: 0.0,
        x1: 1.0,
        y0: -span,
        y1: span,
        width: 2 * size,
        height: size,
        margin: 8.0,
    };
    let mut img = Image::new(frame.width, frame.height, WHITE);
    for y in [-1.0, 1.0] {
        frame.polyline(&mut img, &[(0.0, y), (1.0, y)], GREY);
    }
    frame.polyline(&mut img, &[(0.0, 0.0), (1.0, 0.0)], BLACK);
    let pts = |part: fn(&Complex64) -> f64| -> Vec<(f64, f64)> {
        x.iter().zip(&values).map(|(x, v)| (*x, part(v))).collect()
    };
    frame.polyline(&mut img, &pts(|v| v.im), IM_COLOR);
    frame.polyline(&mut img, &pts(|v| v.re), RE_COLOR);
    for s in data.samples() {
        img.dot(frame.map(s.z.re, s.t.sign()), 3, MARK_COLOR);
    }
    Ok(IntervalProfile { x, values, image: img })
}

/// Diverging blue–white–red heatmap, symmetric about zero, `y` up.
pub fn render_field_heatmap(field: &GridField) -> Image {
    let (nx, ny) = (field.nx(), field.ny());
    let scale = field.max_abs();
    let mut img = Image::new(nx, ny, WHITE);
    for j in 0..ny {
        for i in 0..nx {
            let v = field.at(i, j);
            let c = if !v.is_finite() {
                BLACK
            } else {
                let t = if scale > 0.0 { (v / scale).clamp(-1.0, 1.0) } else { 0.0 };
                let fade = |x: f64| (255.0 * (1.0 - x.abs())).round() as u8;
                if t >= 0.0 {
                    [255, fade(t), fade(t), 255]
                } else {
                    [fade(t), fade(t), 255, 255]
                }
            };
            img.set(i as i64, (ny - 1 - j) as i64, c);
        }
    }
    img
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::FeatureSet;

    fn identity() -> Hypothesis {
        let fs = FeatureSet::monomial_orthonormal(2).unwrap();
        Hypothesis::unit(fs, 1).unwrap().scaled((std::f64::consts::PI / 2.0).sqrt())
    }

    fn constant(c: f64) -> Hypothesis {
        let fs = FeatureSet::monomial_orthonormal(1).unwrap();
        Hypothesis::unit(fs, 0).unwrap().scaled(c * std::f64::consts::PI.sqrt())
    }

    fn no_contours() -> RenderConfig {
        RenderConfig {
            size: 64,
            re_levels: vec![],
            im_levels: vec![],
            ..RenderConfig::default()
        }
    }

    #[test]
    fn hsv_primaries() {
        assert_eq!(hsv_to_rgb(0.0, 1.0, 1.0), [255, 0, 0]);
        assert_eq!(hsv_to_rgb(1.0 / 3.0, 1.0, 1.0), [0, 255, 0]);
        assert_eq!(hsv_to_rgb(2.0 / 3.0, 1.0, 1.0), [0, 0, 255]);
        assert_eq!(hsv_to_rgb(0.3, 0.0, 1.0), [255, 255, 255]);
    }

    #[test]
    fn constant_one_is_uniform_half_saturated_red() {
        let cfg = RenderConfig {
            re_levels: vec![1.0],
            ..no_contours()
        };
        let r = render_domain_coloring(&constant(1.0), &cfg).unwrap();
        let expect = r.image.pixel(32, 32);
        assert_eq!(expect[0], 255);
        assert!((127..=128).contains(&expect[1]) && expect[1] == expect[2]);
        assert_eq!(r.image.pixel(10, 32), expect);
        assert_eq!(r.image.pixel(0, 0), [0, 0, 0, 0]);
        assert_eq!(r.nonfinite_pixels, 0);
    }

    #[test]
    fn value_channel_darkens_small_values() {
        let cfg = RenderConfig {
            channel: MagnitudeChannel::Value,
            ..no_contours()
        };
        let r = render_domain_coloring(&constant(1.0), &cfg).unwrap();
        let [red, g, b, a] = r.image.pixel(32, 32);
        assert!((127..=128).contains(&red) && g == 0 && b == 0 && a == 255);
        assert!((MagnitudeMap::Log.apply(std::f64::consts::E - 1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn identity_winds_once_and_draws_the_real_diameter() {
        let cfg = RenderConfig {
            size: 65,
            re_levels: vec![],
            im_levels: vec![0.0],
            ..RenderConfig::default()
        };
        let r = render_domain_coloring(&identity(), &cfg).unwrap();
        // the middle row carries the Im = 0 contour
        for i in 10..55 {
            assert_eq!(r.image.pixel(i, 32), BLACK, "pixel {i}");
        }
        // hue around a circle of radius 0.6 makes one full turn
        let mut turn = 0.0;
        let mut prev: Option<f64> = None;
        for k in 0..=256 {
            let z = Complex64::from_polar(0.6, TAU * k as f64 / 256.0);
            let c = domain_color(identity().eval(z).unwrap(), &cfg);
            let [r, g, b, _] = c.map(f64::from);
            let hue = (3f64.sqrt() * (g - b)).atan2(2.0 * r - g - b);
            if let Some(p) = prev {
                turn += (hue - p + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI;
            }
            prev = Some(hue);
        }
        assert!((turn - TAU).abs() < 0.1, "{turn}");
    }

    #[test]
    fn marching_squares_traces_a_circle() {
        let n = 101;
        let vals: Vec<f64> = (0..n * n)
            .map(|k| {
                let (x, y) = ((k % n) as f64 - 50.0, (k / n) as f64 - 50.0);
                (x * x + y * y).sqrt()
            })
            .collect();
        let segs = marching_squares(&vals, n, n, 30.0);
        assert!(!segs.is_empty());
        for [a, b] in segs {
            for (x, y) in [a, b] {
                let r = ((x - 50.0).powi(2) + (y - 50.0).powi(2)).sqrt();
                assert!((r - 30.0).abs() < 0.05, "{r}");
            }
        }
        assert!(marching_squares(&vals, n, n, 500.0).is_empty());
    }

    #[test]
    fn nonfinite_pixels_are_black_and_counted() {
        let mut cfg = no_contours();
        cfg.size = 64;
        let c = domain_color(Complex64::new(f64::NAN, 0.0), &cfg);
        assert_eq!(c, BLACK);
    }

    #[test]
    fn identity_profiles_and_range_curve() {
        let h = identity();
        let p = render_circle_profiles(&h, 256, 64).unwrap();
        for (t, v) in p.theta.iter().zip(&p.values) {
            assert!((v.re - t.cos()).abs() < 1e-12 && (v.im - t.sin()).abs() < 1e-12);
        }
        assert_eq!(p.crossings, 2);
        let r = render_range_curve(&h, 4096, 64).unwrap();
        assert_eq!(r.axis_crossings, 2);
        assert!((r.length - TAU).abs() < 1e-5);
        assert!((boundary_arc_length(&h, 256).unwrap() - TAU).abs() < 1e-12);
    }

    #[test]
    fn zero_hypothesis_profile_is_flat() {
        let h = Hypothesis::zero(FeatureSet::monomial_orthonormal(3).unwrap());
        let p = render_circle_profiles(&h, 64, 64).unwrap();
        assert!(p.values.iter().all(|v| *v == Complex64::new(0.0, 0.0)));
        assert!(p.to_csv().starts_with("theta,re,im\n"));
    }

    #[test]
    fn png_is_deterministic_and_minimal() {
        let cfg = RenderConfig {
            size: 64,
            ..RenderConfig::default()
        };
        let a = render_domain_coloring(&identity(), &cfg).unwrap().image.to_png().unwrap();
        let b = render_domain_coloring(&identity(), &cfg).unwrap().image.to_png().unwrap();
        assert_eq!(a, b);
        let chunks: Vec<&[u8]> = {
            let mut out = Vec::new();
            let mut i = 8;
            while i + 8 <= a.len() {
                let len = u32::from_be_bytes(a[i..i + 4].try_into().unwrap()) as usize;
                out.push(&a[i + 4..i + 8]);
                i += 12 + len;
            }
            out
        };
        assert!(chunks.iter().all(|c| matches!(*c, b"IHDR" | b"IDAT" | b"IEND")), "{chunks:?}");
        let dec = png::Decoder::new(std::io::Cursor::new(a));
        let reader = dec.read_info().unwrap();
        assert_eq!(reader.info().width, 64);
    }

    #[test]
    fn small_images_are_rejected() {
        let cfg = RenderConfig {
            size: 32,
            ..RenderConfig::default()
        };
        assert!(render_domain_coloring(&identity(), &cfg).is_err());
        let cfg = RenderConfig {
            re_levels: vec![f64::NAN],
            ..RenderConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
