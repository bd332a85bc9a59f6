//! Browser demo: train a nonrobust or robust classifier on `S_n`, draw it,
//! and measure how far a clicked point must move before its label flips.
//!
//! [`Demo`] is plain Rust so it can be tested on the host; [`WebModel`] is
//! the thin wasm-bindgen wrapper the page talks to.

use holo_core::experiments::identity_hypothesis;
use holo_core::features::dirichlet_energy;
use holo_core::learner::{train_complex_svc, train_robust, TrainConfig};
use holo_core::render::{
    render_circle_profiles, render_domain_coloring, render_range_curve, MagnitudeMap, RenderConfig,
};
use holo_core::robustness::{boundary_crossings, min_flip_radius, AttackConfig};
use holo_core::{dataset::make_circle_dataset, Error, FeatureKind, Hypothesis, Label, Result};
use num_complex::Complex64;
use wasm_bindgen::prelude::*;

pub const MAX_SAMPLES: usize = 200;
pub const MAX_FEATURES: usize = 64;
const CIRCLE_ANGLES: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Domain,
    Profile,
    Range,
}

impl Style {
    pub fn parse(s: &str) -> Result<Style> {
        match s {
            "domain" => Ok(Style::Domain),
            "profile" => Ok(Style::Profile),
            "range" => Ok(Style::Range),
            other => Err(Error::InvalidArgument(format!("unknown style '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Demo {
    hypothesis: Hypothesis,
    crossings: usize,
    energy: f64,
    curve_length: f64,
}

impl Demo {
    /// Trains on the `n` equally spaced circle samples with `k` features.
    pub fn train(n: usize, k: usize, c: f64, robust: bool) -> Result<Demo> {
        if n > MAX_SAMPLES || k > MAX_FEATURES {
            return Err(Error::InvalidArgument(format!(
                "demo limits are n <= {MAX_SAMPLES}, K <= {MAX_FEATURES}"
            )));
        }
        let data = make_circle_dataset(n)?;
        let cfg = TrainConfig::new(c, k, FeatureKind::MonomialOrthonormal);
        let model = if robust { train_robust(&data, &cfg)? } else { train_complex_svc(&data, &cfg)? };
        Demo::from_hypothesis(model.hypothesis)
    }

    /// `f(z) = z`, shown before anything is trained.
    pub fn identity() -> Result<Demo> {
        Demo::from_hypothesis(identity_hypothesis())
    }

    fn from_hypothesis(h: Hypothesis) -> Result<Demo> {
        let crossings = boundary_crossings(&h, CIRCLE_ANGLES)?.count;
        let energy = dirichlet_energy(&h)?;
        let curve_length = render_range_curve(&h, CIRCLE_ANGLES, 64)?.length;
        Ok(Demo { hypothesis: h, crossings, energy, curve_length })
    }

    pub fn hypothesis(&self) -> &Hypothesis {
        &self.hypothesis
    }

    pub fn crossings(&self) -> usize {
        self.crossings
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn curve_length(&self) -> f64 {
        self.curve_length
    }

    pub fn eval(&self, re: f64, im: f64) -> Result<Complex64> {
        self.hypothesis.eval(Complex64::new(re, im))
    }

    /// PNG bytes of one view of the hypothesis.
    pub fn render(&self, style: Style, size: usize, log_magnitude: bool) -> Result<Vec<u8>> {
        let image = match style {
            Style::Domain => {
                let cfg = RenderConfig {
                    size,
                    magnitude: if log_magnitude { MagnitudeMap::Log } else { MagnitudeMap::Rational },
                    ..RenderConfig::default()
                };
                render_domain_coloring(&self.hypothesis, &cfg)?.image
            }
            Style::Profile => render_circle_profiles(&self.hypothesis, CIRCLE_ANGLES, size)?.image,
            Style::Range => render_range_curve(&self.hypothesis, CIRCLE_ANGLES, size)?.image,
        };
        image.to_png()
    }

    /// Smallest perturbation that flips the predicted label at `(re, im)`,
    /// or `None` if the point sits on the boundary or no flip is found
    /// within the attack budget.
    pub fn flip_radius(&self, re: f64, im: f64) -> Result<Option<f64>> {
        let z = Complex64::new(re, im);
        let Some(t) = Label::of(self.hypothesis.eval(z)?.re) else {
            return Ok(None);
        };
        let r = min_flip_radius(&self.hypothesis, z, t, &AttackConfig::default())?;
        Ok((!r.at_budget).then_some(r.radius))
    }
}

fn js_err(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct WebModel(Demo);

#[wasm_bindgen]
impl WebModel {
    #[wasm_bindgen(constructor)]
    pub fn new() -> std::result::Result<WebModel, JsError> {
        Demo::identity().map(WebModel).map_err(js_err)
    }

    pub fn train(n: usize, k: usize, c: f64, robust: bool) -> std::result::Result<WebModel, JsError> {
        Demo::train(n, k, c, robust).map(WebModel).map_err(js_err)
    }

    pub fn crossings(&self) -> usize {
        self.0.crossings()
    }

    pub fn energy(&self) -> f64 {
        self.0.energy()
    }

    #[wasm_bindgen(js_name = curveLength)]
    pub fn curve_length(&self) -> f64 {
        self.0.curve_length()
    }

    /// `[re, im]` of the hypothesis at a point of the closed disk.
    pub fn eval(&self, re: f64, im: f64) -> std::result::Result<Vec<f64>, JsError> {
        let v = self.0.eval(re, im).map_err(js_err)?;
        Ok(vec![v.re, v.im])
    }

    pub fn render(&self, style: &str, size: usize, log_magnitude: bool) -> std::result::Result<Vec<u8>, JsError> {
        let style = Style::parse(style).map_err(js_err)?;
        self.0.render(style, size, log_magnitude).map_err(js_err)
    }

    /// Flip radius, or `undefined` when there is none within the budget.
    #[wasm_bindgen(js_name = flipRadius)]
    pub fn flip_radius(&self, re: f64, im: f64) -> std::result::Result<Option<f64>, JsError> {
        self.0.flip_radius(re, im).map_err(js_err)
    }
}
