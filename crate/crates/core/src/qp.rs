//! Dense convex quadratic programs `min ½xᵀQx + cᵀx  s.t.  Ax ≥ b`.
//!
//! [`solve_qp`] is a Mehrotra predictor-corrector interior point method;
//! [`brute_force_qp`] enumerates active sets and serves as a test oracle.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::fmt_f64;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const MAX_ITERATIONS: usize = 200;
pub const ORACLE_MAX_CONSTRAINTS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct QpProblem {
    q: DMatrix<f64>,
    c: DVector<f64>,
    a: DMatrix<f64>,
    b: DVector<f64>,
}

impl QpProblem {
    pub fn new(q: DMatrix<f64>, c: DVector<f64>, a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        let n = c.len();
        if q.nrows() != n || q.ncols() != n {
            return Err(Error::InvalidArgument(format!(
                "Q is {}x{} for {n} variables",
                q.nrows(),
                q.ncols()
            )));
        }
        if a.ncols() != n || a.nrows() != b.len() {
            return Err(Error::InvalidArgument(format!(
                "A is {}x{}, b has {} entries, {n} variables",
                a.nrows(),
                a.ncols(),
                b.len()
            )));
        }
        if (&q - q.transpose()).amax() > 1e-12 * (1.0 + q.amax()) {
            return Err(Error::InvalidArgument("Q is not symmetric".into()));
        }
        let finite = |m: &[f64]| m.iter().all(|v| v.is_finite());
        if !(finite(q.as_slice()) && finite(c.as_slice()) && finite(a.as_slice()) && finite(b.as_slice())) {
            return Err(Error::InvalidArgument("QP data must be finite".into()));
        }
        Ok(QpProblem { q, c, a, b })
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn variables(&self) -> usize {
        self.c.len()
    }

    pub fn constraints(&self) -> usize {
        self.b.len()
    }

    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.q * x)) + self.c.dot(x)
    }

    /// Unscaled KKT residuals of a candidate primal-dual pair.
    pub fn kkt(&self, x: &DVector<f64>, lambda: &DVector<f64>) -> KktResiduals {
        let stat = &self.q * x + &self.c - self.a.transpose() * lambda;
        let slack = &self.a * x - &self.b;
        KktResiduals {
            stationarity: stat.amax(),
            primal_feasibility: slack.iter().fold(0.0f64, |m, v| m.max(-v)),
            complementarity: slack
                .iter()
                .zip(lambda.iter())
                .fold(0.0f64, |m, (s, l)| m.max((s * l).abs())),
            dual_feasibility: lambda.iter().fold(0.0f64, |m, l| m.max(-l)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KktResiduals {
    /// `‖Qx + c − Aᵀλ‖∞`
    pub stationarity: f64,
    /// `max(0, max_i (b − Ax)_i)`
    pub primal_feasibility: f64,
    /// `max_i |λ_i (Ax − b)_i|`
    pub complementarity: f64,
    /// `max(0, max_i −λ_i)`
    pub dual_feasibility: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution {
    pub x: DVector<f64>,
    pub lambda: DVector<f64>,
    pub objective: f64,
    pub kkt: KktResiduals,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpOptions {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for QpOptions {
    fn default() -> Self {
        QpOptions {
            tol: DEFAULT_TOL,
            max_iterations: MAX_ITERATIONS,
        }
    }
}

/// Solves the program to relative tolerance `tol`.
///
/// Residuals are measured relative to the scale of the data they compare
/// (`1 + ‖c‖∞ + ‖Qx‖∞ + ‖Aᵀλ‖∞` for stationarity, `1 + ‖b‖∞ + ‖Ax‖∞` for
/// feasibility, `1 + |objective|` for the complementarity gap), so
/// penalties such as `C = 1e8` do not demand precision below machine epsilon.
pub fn solve_qp(p: &QpProblem, tol: f64) -> Result<QpSolution> {
    solve_qp_with(
        p,
        QpOptions {
            tol,
            ..QpOptions::default()
        },
    )
}

fn max_step(v: &DVector<f64>, dv: &DVector<f64>) -> f64 {
    v.iter()
        .zip(dv.iter())
        .filter(|(_, d)| **d < 0.0)
        .map(|(v, d)| -v / d)
        .fold(1.0, f64::min)
}

fn solve_spd(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    if let Some(ch) = m.clone().cholesky() {
        return Ok(ch.solve(rhs));
    }
    let scale = m.diagonal().amax().max(1.0);
    let mut delta = 1e-14 * scale;
    for _ in 0..12 {
        let mut reg = m.clone();
        for i in 0..reg.nrows() {
            reg[(i, i)] += delta;
        }
        if let Some(ch) = reg.cholesky() {
            return Ok(ch.solve(rhs));
        }
        delta *= 100.0;
    }
    Err(Error::Internal("normal equations are not positive definite".into()))
}

pub fn solve_qp_with(p: &QpProblem, opts: QpOptions) -> Result<QpSolution> {
    let n = p.variables();
    let m = p.constraints();
    let (q, c, a, b) = (&p.q, &p.c, &p.a, &p.b);
    if m == 0 {
        let x = solve_spd(q, &(-c)).map_err(|_| {
            Error::Internal("unconstrained program has singular Q".into())
        })?;
        let lambda = DVector::zeros(0);
        return Ok(QpSolution {
            objective: p.objective(&x),
            kkt: p.kkt(&x, &lambda),
            x,
            lambda,
            iterations: 0,
        });
    }
    let at = a.transpose();
    let b_scale = 1.0 + b.amax();
    let c_scale = 1.0 + c.amax();

    let mut x = DVector::<f64>::zeros(n);
    let mut s = DVector::from_iterator(m, (a * &x - b).iter().map(|v| v.abs().max(1.0)));
    let mut lambda = DVector::from_element(m, 1.0);

    let mut last = (f64::NAN, f64::NAN, f64::NAN);
    for iter in 0..opts.max_iterations {
        let qx = q * &x;
        let atl = &at * &lambda;
        let r_d = &qx + c - &atl;
        let ax = a * &x;
        let r_p = &ax - &s - b;
        let mu = s.dot(&lambda) / m as f64;
        let obj = 0.5 * x.dot(&qx) + c.dot(&x);

        let stat = r_d.amax() / (c_scale + qx.amax() + atl.amax());
        let feas = r_p.amax() / (b_scale + ax.amax());
        let gap = s.dot(&lambda) / (1.0 + obj.abs());
        last = (stat, feas, gap);
        if stat <= opts.tol && feas <= opts.tol && gap <= opts.tol {
            let kkt = p.kkt(&x, &lambda);
            return Ok(QpSolution {
                objective: obj,
                x,
                lambda,
                kkt,
                iterations: iter,
            });
        }

        // Farkas certificate: y ≥ 0, Aᵀy ≈ 0, bᵀy > 0.
        let l1 = lambda.sum();
        if l1 > 1e6 * c_scale {
            let y = &lambda / l1;
            let aty = (&at * &y).amax();
            let by = b.dot(&y);
            if aty <= 1e-8 * (1.0 + a.amax()) && by > 1e-6 * b_scale {
                return Err(Error::Infeasible);
            }
        }

        let d = DVector::from_iterator(m, lambda.iter().zip(s.iter()).map(|(l, s)| l / s));
        let mut normal = q.clone();
        for i in 0..m {
            let di = d[i];
            let row = a.row(i);
            for j in 0..n {
                let aij = row[j];
                if aij == 0.0 {
                    continue;
                }
                let w = di * aij;
                for k in 0..n {
                    normal[(j, k)] += w * row[k];
                }
            }
        }
        let direction = |rhs_c: &DVector<f64>| -> Result<(DVector<f64>, DVector<f64>, DVector<f64>)> {
            // rhs_c is the right side of Λ ds + S dλ = rhs_c
            let t = DVector::from_iterator(
                m,
                (0..m).map(|i| (rhs_c[i] - lambda[i] * r_p[i]) / s[i]),
            );
            let rhs = -&r_d + &at * &t;
            let dx = solve_spd(&normal, &rhs)?;
            let adx = a * &dx;
            let ds = &adx + &r_p;
            let dl = DVector::from_iterator(
                m,
                (0..m).map(|i| (rhs_c[i] - lambda[i] * ds[i]) / s[i]),
            );
            Ok((dx, ds, dl))
        };

        let rhs_aff = -s.component_mul(&lambda);
        let (_, ds_a, dl_a) = direction(&rhs_aff)?;
        let alpha_aff = max_step(&s, &ds_a).min(max_step(&lambda, &dl_a));
        let mu_aff = (&s + &ds_a * alpha_aff).dot(&(&lambda + &dl_a * alpha_aff)) / m as f64;
        let sigma = (mu_aff / mu).powi(3).clamp(0.0, 1.0);
        let rhs_cor = DVector::from_iterator(
            m,
            (0..m).map(|i| -s[i] * lambda[i] - ds_a[i] * dl_a[i] + sigma * mu),
        );
        let (dx, ds, dl) = direction(&rhs_cor)?;
        let alpha_max = max_step(&s, &ds).min(max_step(&lambda, &dl));
        let alpha = (0.995 * alpha_max).min(1.0);
        x += &dx * alpha;
        s += &ds * alpha;
        lambda += &dl * alpha;
        let floor = f64::MIN_POSITIVE;
        s.apply(|v| *v = v.max(floor));
        lambda.apply(|v| *v = v.max(floor));
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iterations,
        stationarity: last.0,
        feasibility: last.1,
        complementarity: last.2,
    })
}

/// Exhaustive active-set oracle for programs with at most 16 constraints.
pub fn brute_force_qp(p: &QpProblem) -> Result<QpSolution> {
    let n = p.variables();
    let m = p.constraints();
    if m > ORACLE_MAX_CONSTRAINTS {
        return Err(Error::OracleTooLarge(m));
    }
    let feas_tol = 1e-9 * (1.0 + p.b.amax());
    let mut best: Option<(f64, DVector<f64>, DVector<f64>)> = None;
    for mask in 0u32..(1u32 << m) {
        let active: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let k = active.len();
        if k > n {
            continue;
        }
        let dim = n + k;
        let mut kkt = DMatrix::<f64>::zeros(dim, dim);
        kkt.view_mut((0, 0), (n, n)).copy_from(&p.q);
        let mut rhs = DVector::<f64>::zeros(dim);
        rhs.rows_mut(0, n).copy_from(&(-&p.c));
        for (r, &i) in active.iter().enumerate() {
            for j in 0..n {
                kkt[(j, n + r)] = -p.a[(i, j)];
                kkt[(n + r, j)] = p.a[(i, j)];
            }
            rhs[n + r] = p.b[i];
        }
        let lu = kkt.clone().full_piv_lu();
        let u = lu.u();
        let diag: Vec<f64> = (0..dim).map(|i| u[(i, i)].abs()).collect();
        let dmax = diag.iter().copied().fold(0.0, f64::max);
        let dmin = diag.iter().copied().fold(f64::INFINITY, f64::min);
        if dim > 0 && !(dmin > 1e-12 * dmax.max(1.0)) {
            continue;
        }
        let Some(sol) = lu.solve(&rhs) else { continue };
        if (&kkt * &sol - &rhs).amax() > 1e-9 * (1.0 + rhs.amax()) {
            continue;
        }
        let x = sol.rows(0, n).into_owned();
        let mut lambda = DVector::<f64>::zeros(m);
        for (r, &i) in active.iter().enumerate() {
            lambda[i] = sol[n + r];
        }
        if lambda.iter().any(|l| *l < -1e-9) {
            continue;
        }
        if (&p.a * &x - &p.b).iter().any(|v| *v < -feas_tol) {
            continue;
        }
        let obj = p.objective(&x);
        if best.as_ref().is_none_or(|(o, _, _)| obj < *o - 1e-12 * (1.0 + o.abs())) {
            best = Some((obj, x, lambda));
        }
    }
    let (objective, x, lambda) = best.ok_or(Error::Infeasible)?;
    Ok(QpSolution {
        kkt: p.kkt(&x, &lambda),
        objective,
        x,
        lambda,
        iterations: 0,
    })
}

fn write_matrix(out: &mut String, name: &str, m: &DMatrix<f64>) {
    let _ = writeln!(out, "# {name} {}x{}", m.nrows(), m.ncols());
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| fmt_f64(m[(r, c)])).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
}

fn write_vector(out: &mut String, name: &str, v: &DVector<f64>) {
    let _ = writeln!(out, "# {name} {}", v.len());
    for x in v.iter() {
        let _ = writeln!(out, "{}", fmt_f64(*x));
    }
}

/// `Q`, `c`, `A`, `b` and (if given) the solution as labelled CSV blocks.
pub fn debug_dump(p: &QpProblem, sol: Option<&QpSolution>) -> String {
    let mut out = String::new();
    write_matrix(&mut out, "Q", &p.q);
    write_vector(&mut out, "c", &p.c);
    write_matrix(&mut out, "A", &p.a);
    write_vector(&mut out, "b", &p.b);
    if let Some(s) = sol {
        write_vector(&mut out, "x", &s.x);
        write_vector(&mut out, "lambda", &s.lambda);
        let _ = writeln!(out, "# objective\n{}", fmt_f64(s.objective));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn problem(q: &[f64], c: &[f64], a: &[f64], b: &[f64]) -> QpProblem {
        let n = c.len();
        let m = b.len();
        QpProblem::new(
            DMatrix::from_row_slice(n, n, q),
            DVector::from_row_slice(c),
            DMatrix::from_row_slice(m, n, a),
            DVector::from_row_slice(b),
        )
        .unwrap()
    }

    #[test]
    fn one_dimensional_bound() {
        let p = problem(&[1.0], &[0.0], &[1.0], &[1.0]);
        for s in [solve_qp(&p, DEFAULT_TOL).unwrap(), brute_force_qp(&p).unwrap()] {
            assert!((s.x[0] - 1.0).abs() < 1e-8);
            assert!((s.lambda[0] - 1.0).abs() < 1e-7);
            assert!((s.objective - 0.5).abs() < 1e-8);
        }
    }

    #[test]
    fn symmetric_half_plane() {
        let p = problem(&[1.0, 0.0, 0.0, 1.0], &[0.0, 0.0], &[1.0, 1.0], &[2.0]);
        for s in [solve_qp(&p, DEFAULT_TOL).unwrap(), brute_force_qp(&p).unwrap()] {
            assert!((s.x[0] - 1.0).abs() < 1e-8 && (s.x[1] - 1.0).abs() < 1e-8);
            assert!((s.lambda[0] - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn infeasible_toy_is_detected() {
        let p = problem(&[1.0], &[0.0], &[1.0, -1.0], &[1.0, 1.0]);
        assert_eq!(brute_force_qp(&p).unwrap_err(), Error::Infeasible);
        assert_eq!(solve_qp(&p, DEFAULT_TOL).unwrap_err(), Error::Infeasible);
    }

    #[test]
    fn unconstrained_minimum() {
        let p = problem(&[2.0, 0.0, 0.0, 4.0], &[-2.0, 4.0], &[], &[]);
        for s in [solve_qp(&p, DEFAULT_TOL).unwrap(), brute_force_qp(&p).unwrap()] {
            assert!((s.x[0] - 1.0).abs() < 1e-12 && (s.x[1] + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_refuses_large_instances() {
        let m = 17;
        let p = QpProblem::new(
            DMatrix::identity(1, 1),
            DVector::zeros(1),
            DMatrix::from_element(m, 1, 1.0),
            DVector::zeros(m),
        )
        .unwrap();
        assert_eq!(brute_force_qp(&p).unwrap_err(), Error::OracleTooLarge(17));
    }

    #[test]
    fn rejects_asymmetric_q() {
        let r = QpProblem::new(
            DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]),
            DVector::zeros(2),
            DMatrix::zeros(0, 2),
            DVector::zeros(0),
        );
        assert!(r.is_err());
    }

    #[test]
    fn kkt_residuals_within_tolerance_and_deterministic() {
        let p = problem(
            &[2.0, 0.5, 0.5, 1.0],
            &[-1.0, 0.3],
            &[1.0, 0.0, 0.0, 1.0, -1.0, -1.0],
            &[-1.0, -0.5, -1.5],
        );
        let s1 = solve_qp(&p, DEFAULT_TOL).unwrap();
        let s2 = solve_qp(&p, DEFAULT_TOL).unwrap();
        assert_eq!(s1, s2);
        assert!(s1.kkt.stationarity <= 1e-7);
        assert!(s1.kkt.primal_feasibility <= 1e-7);
        assert!(s1.kkt.complementarity <= 1e-7);
        assert!(s1.lambda.iter().all(|l| *l >= 0.0));
    }

    #[test]
    fn dump_has_all_blocks() {
        let p = problem(&[1.0], &[0.0], &[1.0], &[1.0]);
        let s = solve_qp(&p, DEFAULT_TOL).unwrap();
        let d = debug_dump(&p, Some(&s));
        for block in ["# Q", "# c", "# A", "# b", "# x", "# lambda", "# objective"] {
            assert!(d.contains(block), "{block}");
        }
    }

    fn random_instance() -> impl Strategy<Value = QpProblem> {
        (1usize..=6, 0usize..=10).prop_flat_map(|(n, m)| {
            (
                prop::collection::vec(-1.0f64..1.0, n * n),
                prop::collection::vec(-1.0f64..1.0, n),
                prop::collection::vec(-1.0f64..1.0, m * n),
                prop::collection::vec(-1.0f64..1.0, n),
                prop::collection::vec(0.0f64..1.0, m),
            )
                .prop_map(move |(l, c, a, x0, gap)| {
                    let l = DMatrix::from_row_slice(n, n, &l);
                    let q = &l * l.transpose() + DMatrix::identity(n, n) * 0.1;
                    let q = (&q + q.transpose()) * 0.5;
                    let a = DMatrix::from_row_slice(m, n, &a);
                    let x0 = DVector::from_row_slice(&x0);
                    let b = &a * x0 - DVector::from_row_slice(&gap);
                    QpProblem::new(q, DVector::from_row_slice(&c), a, b).unwrap()
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn interior_point_matches_oracle(p in random_instance()) {
            let ipm = solve_qp(&p, DEFAULT_TOL).unwrap();
            let bf = brute_force_qp(&p).unwrap();
            prop_assert!((ipm.objective - bf.objective).abs() <= 1e-6 * (1.0 + bf.objective.abs()));
            prop_assert!(ipm.lambda.iter().all(|l| *l >= 0.0));
            prop_assert!(ipm.kkt.complementarity <= 1e-6);
        }
    }
}
