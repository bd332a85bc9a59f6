//! Finite feature families on the disk or the unit interval.
//!
//! Every [`FeatureSet`] is a linear image `φ = M·b` of a base family `b`
//! (plain monomials `z^p`, a tabulated table of functions of a real variable,
//! or point evaluations). Orthonormal, harmonic and custom sets over the same
//! base differ only in `M`, which keeps evaluation of hypotheses cheap: a
//! hypothesis folds its coefficients through `M` once.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{in_closed_disk, ComplexPoint};
use crate::quadrature::Rect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    MonomialOrthonormal,
    Harmonic,
    AnnProjected,
    AnnProjectedHarmonic,
    CustomGrid,
    Custom,
}

impl FeatureKind {
    /// Kind produced by applying the harmonic transform to this kind.
    pub fn harmonic_counterpart(self) -> FeatureKind {
        match self {
            FeatureKind::MonomialOrthonormal | FeatureKind::Harmonic => FeatureKind::Harmonic,
            FeatureKind::AnnProjected | FeatureKind::AnnProjectedHarmonic => {
                FeatureKind::AnnProjectedHarmonic
            }
            other => other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    UnitDisk,
    UnitInterval,
    Rectangle(Rect),
}

impl Domain {
    pub fn name(&self) -> &'static str {
        match self {
            Domain::UnitDisk => "unit disk",
            Domain::UnitInterval => "unit interval",
            Domain::Rectangle(_) => "rectangle",
        }
    }

    pub fn contains(&self, z: ComplexPoint) -> bool {
        const EPS: f64 = 1e-12;
        match self {
            Domain::UnitDisk => in_closed_disk(z),
            Domain::UnitInterval => z.im.abs() <= EPS && z.re >= -EPS && z.re <= 1.0 + EPS,
            Domain::Rectangle(r) => {
                z.re >= r.x0 - EPS && z.re <= r.x1 + EPS && z.im >= r.y0 - EPS && z.im <= r.y1 + EPS
            }
        }
    }

    pub fn check(&self, z: ComplexPoint) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::DomainViolation {
                re: z.re,
                im: z.im,
                domain: self.name(),
            })
        }
    }
}

/// Complex-valued functions of a real variable sampled on a grid, with their
/// derivatives, interpolated by cubic Hermite polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteTable {
    grid: Vec<f64>,
    /// `values[j][i]` is feature `j` at `grid[i]`.
    values: Vec<Vec<Complex64>>,
    derivatives: Vec<Vec<Complex64>>,
}

impl HermiteTable {
    pub fn new(
        grid: Vec<f64>,
        values: Vec<Vec<Complex64>>,
        derivatives: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        if grid.len() < 2 {
            return Err(Error::InvalidArgument("table grid needs at least 2 points".into()));
        }
        if !grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("table grid must be strictly increasing".into()));
        }
        if values.len() != derivatives.len()
            || values
                .iter()
                .chain(&derivatives)
                .any(|col| col.len() != grid.len())
        {
            return Err(Error::InvalidArgument("table columns do not match the grid".into()));
        }
        Ok(HermiteTable {
            grid,
            values,
            derivatives,
        })
    }

    /// Table from values only; derivatives by second-order finite differences.
    pub fn from_values(grid: Vec<f64>, values: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = grid.len();
        if n < 3 {
            return Err(Error::InvalidArgument("table grid needs at least 3 points".into()));
        }
        let derivatives = values
            .iter()
            .map(|col| {
                (0..n)
                    .map(|i| {
                        let (a, b, c) = if i == 0 {
                            (0, 1, 2)
                        } else if i == n - 1 {
                            (n - 3, n - 2, n - 1)
                        } else {
                            (i - 1, i, i + 1)
                        };
                        lagrange_derivative(
                            [grid[a], grid[b], grid[c]],
                            [col[a], col[b], col[c]],
                            grid[i],
                        )
                    })
                    .collect()
            })
            .collect();
        HermiteTable::new(grid, values, derivatives)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[Vec<Complex64>] {
        &self.values
    }

    pub fn derivatives(&self) -> &[Vec<Complex64>] {
        &self.derivatives
    }

    pub fn columns(&self) -> usize {
        self.values.len()
    }

    fn locate(&self, x: f64) -> (usize, f64, f64) {
        let n = self.grid.len();
        let i = match self.grid.binary_search_by(|g| g.total_cmp(&x)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        };
        let h = self.grid[i + 1] - self.grid[i];
        let t = ((x - self.grid[i]) / h).clamp(0.0, 1.0);
        (i, t, h)
    }

    fn eval_column(&self, j: usize, i: usize, t: f64, h: f64) -> (Complex64, Complex64) {
        let (y0, y1) = (self.values[j][i], self.values[j][i + 1]);
        let (m0, m1) = (self.derivatives[j][i] * h, self.derivatives[j][i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let value = y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + m0 * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + m1 * (t3 - t2);
        let slope = (y0 * (6.0 * t2 - 6.0 * t)
            + m0 * (3.0 * t2 - 4.0 * t + 1.0)
            + y1 * (-6.0 * t2 + 6.0 * t)
            + m1 * (3.0 * t2 - 2.0 * t))
            / h;
        (value, slope)
    }
}

fn lagrange_derivative(x: [f64; 3], y: [Complex64; 3], at: f64) -> Complex64 {
    let mut d = Complex64::new(0.0, 0.0);
    for j in 0..3 {
        let mut denom = 1.0;
        for m in 0..3 {
            if m != j {
                denom *= x[j] - x[m];
            }
        }
        let mut num = 0.0;
        for i in 0..3 {
            if i == j {
                continue;
            }
            let mut prod = 1.0;
            for m in 0..3 {
                if m != j && m != i {
                    prod *= at - x[m];
                }
            }
            num += prod;
        }
        d += y[j] * (num / denom);
    }
    d
}

#[derive(Debug, Clone, PartialEq)]
pub enum BaseFeatures {
    /// `b_p(z) = z^p` for `p < count`.
    Monomials { count: usize },
    /// Tabulated functions of `x = Re z`.
    Tabulated(Arc<HermiteTable>),
    /// `b_p(z) = 1` at `nodes[p]`, `0` elsewhere.
    Dirac { nodes: Vec<ComplexPoint> },
}

const DIRAC_MATCH: f64 = 1e-12;

impl BaseFeatures {
    pub fn len(&self) -> usize {
        match self {
            BaseFeatures::Monomials { count } => *count,
            BaseFeatures::Tabulated(t) => t.columns(),
            BaseFeatures::Dirac { nodes } => nodes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn values_into(&self, z: ComplexPoint, out: &mut Vec<Complex64>, deriv: bool) {
        out.clear();
        match self {
            BaseFeatures::Monomials { count } => {
                if deriv {
                    let mut p = Complex64::new(1.0, 0.0);
                    out.push(Complex64::new(0.0, 0.0));
                    for k in 1..*count {
                        out.push(p * k as f64);
                        p *= z;
                    }
                    out.truncate(*count);
                } else {
                    let mut p = Complex64::new(1.0, 0.0);
                    for _ in 0..*count {
                        out.push(p);
                        p *= z;
                    }
                }
            }
            BaseFeatures::Tabulated(table) => {
                let (i, t, h) = table.locate(z.re);
                for j in 0..table.columns() {
                    let (v, d) = table.eval_column(j, i, t, h);
                    out.push(if deriv { d } else { v });
                }
            }
            BaseFeatures::Dirac { nodes } => {
                for node in nodes {
                    let hit = !deriv && (z - node).norm() <= DIRAC_MATCH;
                    out.push(Complex64::new(if hit { 1.0 } else { 0.0 }, 0.0));
                }
            }
        }
    }

    /// `Σ_p e_p b_p(z)` and `Σ_p e_p b_p'(z)`.
    fn combine(&self, e: &[Complex64], z: ComplexPoint) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        match self {
            BaseFeatures::Monomials { .. } => {
                let mut value = zero;
                let mut slope = zero;
                for (p, c) in e.iter().enumerate().rev() {
                    slope = slope * z + value;
                    value = value * z + c;
                    let _ = p;
                }
                (value, slope)
            }
            BaseFeatures::Tabulated(table) => {
                let (i, t, h) = table.locate(z.re);
                let mut value = zero;
                let mut slope = zero;
                for (j, c) in e.iter().enumerate() {
                    if *c == zero {
                        continue;
                    }
                    let (v, d) = table.eval_column(j, i, t, h);
                    value += c * v;
                    slope += c * d;
                }
                (value, slope)
            }
            BaseFeatures::Dirac { nodes } => {
                let value = nodes
                    .iter()
                    .zip(e)
                    .filter(|(n, _)| (z - **n).norm() <= DIRAC_MATCH)
                    .map(|(_, c)| *c)
                    .sum();
                (value, zero)
            }
        }
    }
}

#[derive(Debug)]
struct Inner {
    kind: FeatureKind,
    domain: Domain,
    base: BaseFeatures,
    /// `K × B` map from base functions to features.
    map: DMatrix<Complex64>,
    regularized: Vec<bool>,
    includes_constant: bool,
    description: String,
}

/// A truncated family of `K` complex features, each with a complex derivative.
#[derive(Debug, Clone)]
pub struct FeatureSet {
    inner: Arc<Inner>,
}

impl PartialEq for FeatureSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.kind == other.inner.kind
                && self.inner.domain == other.inner.domain
                && self.inner.base == other.inner.base
                && self.inner.map == other.inner.map
                && self.inner.regularized == other.inner.regularized)
    }
}

impl FeatureSet {
    pub fn new(
        kind: FeatureKind,
        domain: Domain,
        base: BaseFeatures,
        map: DMatrix<Complex64>,
        regularized: Vec<bool>,
        includes_constant: bool,
        description: impl Into<String>,
    ) -> Result<Self> {
        if map.ncols() != base.len() {
            return Err(Error::InvalidArgument(format!(
                "feature map has {} columns for {} base functions",
                map.ncols(),
                base.len()
            )));
        }
        if map.nrows() == 0 {
            return Err(Error::InvalidArgument("feature set must be nonempty".into()));
        }
        if regularized.len() != map.nrows() {
            return Err(Error::InvalidArgument(
                "one regularization flag per feature is required".into(),
            ));
        }
        if map.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidArgument("feature map has non-finite entries".into()));
        }
        Ok(FeatureSet {
            inner: Arc::new(Inner {
                kind,
                domain,
                base,
                map,
                regularized,
                includes_constant,
                description: description.into(),
            }),
        })
    }

    /// `φ_k(z) = sqrt((k+1)/π)·z^k`, `k < count`: the orthonormal basis of A²(𝔻).
    pub fn monomial_orthonormal(count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidArgument("feature count must be at least 1".into()));
        }
        let map = DMatrix::from_fn(count, count, |i, j| {
            if i == j {
                Complex64::new(((i as f64 + 1.0) / PI).sqrt(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        FeatureSet::new(
            FeatureKind::MonomialOrthonormal,
            Domain::UnitDisk,
            BaseFeatures::Monomials { count },
            map,
            vec![true; count],
            true,
            format!("orthonormal monomials, K={count}"),
        )
    }

    /// Plain powers `1, x, …, x^{count-1}` on the unit interval.
    pub fn interval_monomials(count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidArgument("feature count must be at least 1".into()));
        }
        FeatureSet::new(
            FeatureKind::Custom,
            Domain::UnitInterval,
            BaseFeatures::Monomials { count },
            DMatrix::identity(count, count),
            vec![true; count],
            true,
            format!("interval monomials, K={count}"),
        )
    }

    /// One point-evaluation feature per node.
    pub fn dirac(nodes: Vec<ComplexPoint>, domain: Domain) -> Result<Self> {
        let k = nodes.len();
        if k == 0 {
            return Err(Error::InvalidArgument("Dirac family needs nodes".into()));
        }
        for n in &nodes {
            domain.check(*n)?;
        }
        FeatureSet::new(
            FeatureKind::Custom,
            domain,
            BaseFeatures::Dirac { nodes },
            DMatrix::identity(k, k),
            vec![true; k],
            false,
            format!("Dirac point evaluations, K={k}"),
        )
    }

    /// Features read from a table over `[0, 1]`.
    pub fn tabulated(
        kind: FeatureKind,
        table: HermiteTable,
        regularized: Vec<bool>,
        description: impl Into<String>,
    ) -> Result<Self> {
        let grid = table.grid();
        if grid[0] > 1e-12 || (grid[grid.len() - 1] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument("table grid must span [0, 1]".into()));
        }
        let k = table.columns();
        let includes_constant = table
            .derivatives()
            .iter()
            .any(|col| col.iter().all(|d| d.norm() < 1e-14));
        FeatureSet::new(
            kind,
            Domain::UnitInterval,
            BaseFeatures::Tabulated(Arc::new(table)),
            DMatrix::identity(k, k),
            regularized,
            includes_constant,
            description,
        )
    }

    /// A new set over the same base with map `transform · M`.
    pub fn transformed(
        &self,
        transform: &DMatrix<Complex64>,
        kind: FeatureKind,
        regularized: Vec<bool>,
        description: impl Into<String>,
    ) -> Result<Self> {
        if transform.ncols() != self.len() {
            return Err(Error::InvalidArgument(format!(
                "transform has {} columns for {} features",
                transform.ncols(),
                self.len()
            )));
        }
        FeatureSet::new(
            kind,
            self.inner.domain,
            self.inner.base.clone(),
            transform * &self.inner.map,
            regularized,
            self.inner.includes_constant,
            description,
        )
    }

    pub fn len(&self) -> usize {
        self.inner.map.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> FeatureKind {
        self.inner.kind
    }

    pub fn domain(&self) -> Domain {
        self.inner.domain
    }

    pub fn base(&self) -> &BaseFeatures {
        &self.inner.base
    }

    pub fn map(&self) -> &DMatrix<Complex64> {
        &self.inner.map
    }

    /// `false` for features excluded from the coefficient penalty (bias columns).
    pub fn regularized(&self) -> &[bool] {
        &self.inner.regularized
    }

    pub fn includes_constant(&self) -> bool {
        self.inner.includes_constant
    }

    pub fn description(&self) -> &str {
        &self.inner.description
    }

    /// Feature values at `z`.
    pub fn values(&self, z: ComplexPoint) -> Result<Vec<Complex64>> {
        self.inner.domain.check(z)?;
        Ok(self.apply_map(z, false))
    }

    /// Complex derivatives `φ_k'(z)` (d/dx for interval features).
    pub fn derivatives(&self, z: ComplexPoint) -> Result<Vec<Complex64>> {
        self.inner.domain.check(z)?;
        Ok(self.apply_map(z, true))
    }

    pub(crate) fn base_values_unchecked(&self, z: ComplexPoint, deriv: bool, out: &mut Vec<Complex64>) {
        self.inner.base.values_into(z, out, deriv);
    }

    fn apply_map(&self, z: ComplexPoint, deriv: bool) -> Vec<Complex64> {
        let mut b = Vec::with_capacity(self.inner.base.len());
        self.inner.base.values_into(z, &mut b, deriv);
        let m = &self.inner.map;
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * b[j]).sum())
            .collect()
    }

    /// Folds feature coefficients into base coefficients: `Mᵀ a`.
    pub(crate) fn fold(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let m = &self.inner.map;
        (0..m.ncols())
            .map(|j| (0..m.nrows()).map(|i| coeffs[i] * m[(i, j)]).sum())
            .collect()
    }

    pub(crate) fn combine_base(&self, folded: &[Complex64], z: ComplexPoint) -> (Complex64, Complex64) {
        self.inner.base.combine(folded, z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal_values_and_derivatives() {
        let f = FeatureSet::monomial_orthonormal(4).unwrap();
        let z = Complex64::new(0.3, -0.4);
        let v = f.values(z).unwrap();
        let d = f.derivatives(z).unwrap();
        for k in 0..4 {
            let s = ((k as f64 + 1.0) / PI).sqrt();
            assert!((v[k] - s * z.powu(k as u32)).norm() < 1e-15);
            let expect = if k == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                s * k as f64 * z.powu(k as u32 - 1)
            };
            assert!((d[k] - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn domain_checks() {
        let f = FeatureSet::monomial_orthonormal(3).unwrap();
        assert!(matches!(
            f.values(Complex64::new(1.1, 0.0)),
            Err(Error::DomainViolation { .. })
        ));
        let g = FeatureSet::interval_monomials(2).unwrap();
        assert!(g.values(Complex64::new(0.5, 0.1)).is_err());
        assert!(g.values(Complex64::new(-0.1, 0.0)).is_err());
        assert!(g.values(Complex64::new(1.0, 0.0)).is_ok());
    }

    #[test]
    fn hermite_table_is_exact_for_cubics() {
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let f = |x: f64| Complex64::new(x * x * x - x, 2.0 * x * x);
        let df = |x: f64| Complex64::new(3.0 * x * x - 1.0, 4.0 * x);
        let table = HermiteTable::new(
            grid.clone(),
            vec![grid.iter().map(|&x| f(x)).collect()],
            vec![grid.iter().map(|&x| df(x)).collect()],
        )
        .unwrap();
        let set = FeatureSet::tabulated(FeatureKind::CustomGrid, table, vec![true], "cubic").unwrap();
        for &x in &[0.0, 0.033, 0.5, 0.71, 1.0] {
            let z = Complex64::new(x, 0.0);
            assert!((set.values(z).unwrap()[0] - f(x)).norm() < 1e-13);
            assert!((set.derivatives(z).unwrap()[0] - df(x)).norm() < 1e-12);
        }
    }

    #[test]
    fn finite_difference_table_is_exact_for_quadratics() {
        let grid: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
        let vals = vec![grid.iter().map(|&x| Complex64::new(x * x, -x)).collect()];
        let t = HermiteTable::from_values(grid, vals).unwrap();
        for (i, d) in t.derivatives()[0].iter().enumerate() {
            let x = t.grid()[i];
            assert!((d - Complex64::new(2.0 * x, -1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn dirac_features_fire_only_on_nodes() {
        let nodes = vec![Complex64::new(0.2, 0.0), Complex64::new(0.7, 0.0)];
        let f = FeatureSet::dirac(nodes, Domain::UnitInterval).unwrap();
        assert_eq!(f.values(Complex64::new(0.7, 0.0)).unwrap()[1].re, 1.0);
        assert_eq!(f.values(Complex64::new(0.7, 0.0)).unwrap()[0].re, 0.0);
        assert!(f.values(Complex64::new(0.5, 0.0)).unwrap().iter().all(|v| v.norm() == 0.0));
    }
}
