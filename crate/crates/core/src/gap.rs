//! Gap function, its gradient, and the descent method built on it.
//!
//! With a regularizer `G >= 0`, `G(x, x) = 0`, the gap is
//! `g(u) = max_w { -F(u, w) - G(u, w) } = -min_w { F(u, w) + G(u, w) }`,
//! nonnegative whenever `F(u, u) = 0` and zero exactly where `w(u) = u`.
//! With `G = (alpha / 2)|w - u|^2` and `alpha = k / r` it vanishes at the
//! solutions of the regularized problem.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::inner;
use crate::model::{SolverConfig, Status, Trace, UREProblem, MULTISTART};
use crate::point::{Matrix, Point};
use crate::schemes::natural_residual;

/// Coarse scan size used by the line search before golden-section refinement.
pub const LINE_SCAN_POINTS: usize = 17;
/// Threshold for the necessary-condition check.
pub const NECESSARY_TOL: f64 = 1e-9;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Clone, Debug, PartialEq)]
pub enum Regularizer {
    /// `(alpha / 2) |x - y|^2`
    Quadratic { alpha: f64 },
    /// `(1/2) <x - y, M (x - y)>` for symmetric positive definite `M`.
    Metric { m: Matrix },
}

impl Regularizer {
    pub fn value(&self, x: &Point, y: &Point) -> f64 {
        match self {
            Regularizer::Quadratic { alpha } => 0.5 * alpha * x.dist_sq(y),
            Regularizer::Metric { m } => 0.5 * m.quadratic_form(&(x - y)),
        }
    }

    pub fn grad_x(&self, x: &Point, y: &Point) -> Point {
        match self {
            Regularizer::Quadratic { alpha } => (x - y).scale(*alpha),
            Regularizer::Metric { m } => {
                let d = x - y;
                (&m.apply(&d) + &m.apply_transpose(&d)).scale(0.5)
            }
        }
    }

    pub fn grad_y(&self, x: &Point, y: &Point) -> Point {
        self.grad_x(x, y).scale(-1.0)
    }
}

#[derive(Clone, Debug)]
pub struct GapModel {
    pub problem: UREProblem,
    pub alpha: f64,
    pub regularizer: Regularizer,
}

impl GapModel {
    /// Quadratic regularizer with `alpha`, defaulting to `k / r` (1 when `r` is infinite).
    pub fn new(problem: UREProblem, alpha: Option<f64>) -> Result<Self> {
        let alpha = alpha.unwrap_or_else(|| default_alpha(&problem));
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
        }
        Ok(GapModel { problem, alpha, regularizer: Regularizer::Quadratic { alpha } })
    }

    pub fn with_regularizer(problem: UREProblem, regularizer: Regularizer) -> Result<Self> {
        let alpha = match &regularizer {
            Regularizer::Quadratic { alpha } => *alpha,
            Regularizer::Metric { m } => {
                if !m.is_square() || m.ncols() != problem.dim() {
                    return Err(Error::InvalidParameter("metric must be square and match the dimension".into()));
                }
                default_alpha(&problem)
            }
        };
        Ok(GapModel { problem, alpha, regularizer })
    }

    pub fn from_config(problem: UREProblem, cfg: &SolverConfig) -> Result<Self> {
        Self::new(problem, cfg.alpha)
    }

    fn objective(&self, u: &Point, w: &Point) -> f64 {
        self.problem.f.eval(u, w) + self.regularizer.value(u, w)
    }
}

pub fn default_alpha(p: &UREProblem) -> f64 {
    if p.r().is_finite() { p.k() / p.r() } else { 1.0 }
}

/// Minimizer over the set of `w -> F(u, w) + G(u, w)`, by projected gradient
/// descent from `u` and 8 seeded samples, keeping the best.
pub fn w_map(g: &GapModel, u: &Point, cfg: &SolverConfig) -> Result<Point> {
    w_map_with_value(g, u, cfg).map(|(w, _)| w)
}

fn w_map_with_value(g: &GapModel, u: &Point, cfg: &SolverConfig) -> Result<(Point, f64)> {
    let p = &g.problem;
    p.require_member(u)?;
    if !p.f.has_grad_v() {
        return Err(Error::MissingGradient("second-argument"));
    }
    let objective = |w: &Point| g.objective(u, w);
    let gradient = |w: &Point| &p.f.grad_v(u, w).expect("checked above") + &g.regularizer.grad_y(u, w);
    let starts = inner::starts_around(&p.set, u, MULTISTART - 1, cfg.seed)?;
    let best = inner::minimize_multistart(&p.set, &objective, &gradient, &starts, cfg.inner_tol, cfg.max_inner)?;
    Ok((best.point, best.value))
}

/// `g(u) = -(F(u, w(u)) + G(u, w(u)))`.
pub fn gap_value(g: &GapModel, u: &Point, cfg: &SolverConfig) -> Result<f64> {
    if !g.problem.f.diagonal_zero() {
        return Err(Error::DiagonalNotZero);
    }
    let (_, value) = w_map_with_value(g, u, cfg)?;
    Ok(0.0 - value)
}

/// `g'(u) = -grad_u F(u, y) - grad_x G(u, y)` at `y = w(u)`.
pub fn gap_gradient(g: &GapModel, u: &Point, cfg: &SolverConfig) -> Result<Point> {
    if !g.problem.f.has_grad_u() {
        return Err(Error::MissingGradient("first-argument"));
    }
    let y = w_map(g, u, cfg)?;
    gap_gradient_at(g, u, &y)
}

fn gap_gradient_at(g: &GapModel, u: &Point, y: &Point) -> Result<Point> {
    let fu = g.problem.f.grad_u(u, y)?;
    Ok((&fu + &g.regularizer.grad_x(u, y)).scale(-1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NecessaryConditionReport {
    pub passed: bool,
    /// Minimum over sampled pairs of `<S(u, w), w - u>`, where
    /// `S = F'_u + G'_x + F'_w + G'_y`.
    pub min_value: f64,
    /// The same minimum with the opposite orientation, `<S(u, w), u - w>`.
    pub min_value_reversed: f64,
    pub worst_pair: Option<(Point, Point)>,
    pub pairs: usize,
}

/// Sampled check of the condition that makes `w(u) - u` a descent direction:
/// `<S(u, w), w - u> >= 0` for all pairs of the set.
///
/// For `F(u, w) = <T u, w - u>` this reads `(w - u)^T JT(u) (w - u) >= 0`.
pub fn check_necessary_condition(g: &GapModel, n_pairs: usize, seed: u64) -> Result<NecessaryConditionReport> {
    let f = &g.problem.f;
    if !f.has_grad_u() {
        return Err(Error::MissingGradient("first-argument"));
    }
    if !f.has_grad_v() {
        return Err(Error::MissingGradient("second-argument"));
    }
    let pts = g.problem.set.sample(2 * n_pairs, seed)?;
    let mut min_value = f64::INFINITY;
    let mut min_reversed = f64::INFINITY;
    let mut worst_pair = None;
    for pair in pts.chunks_exact(2) {
        let (u, w) = (&pair[0], &pair[1]);
        let s = &(&f.grad_u(u, w)? + &g.regularizer.grad_x(u, w)) + &(&f.grad_v(u, w)? + &g.regularizer.grad_y(u, w));
        let value = s.dot(&(w - u));
        min_reversed = min_reversed.min(-value);
        if value < min_value {
            min_value = value;
            worst_pair = Some((u.clone(), w.clone()));
        }
    }
    Ok(NecessaryConditionReport {
        passed: min_value >= -NECESSARY_TOL,
        min_value,
        min_value_reversed: min_reversed,
        worst_pair,
        pairs: n_pairs,
    })
}

/// Minimize `t -> g(u + t d)` over `[0, 1]`.
///
/// Probed points outside the set are projected back before evaluation. The
/// result comes from a 17-point scan refined by golden-section search on the
/// bracket around the best scan point.
pub fn line_search(g: &GapModel, u: &Point, d: &Point, cfg: &SolverConfig) -> Result<f64> {
    Ok(line_search_with_value(g, u, d, cfg)?.0)
}

fn line_search_with_value(g: &GapModel, u: &Point, d: &Point, cfg: &SolverConfig) -> Result<(f64, f64)> {
    let set = &g.problem.set;
    let phi = |t: f64| -> Result<f64> {
        let x = u.axpy(t, d);
        let x = if set.contains_default(&x)? { x } else { set.project(&x)?.point };
        gap_value(g, &x, cfg)
    };
    if d.norm() == 0.0 {
        return Ok((0.0, phi(0.0)?));
    }
    let last = (LINE_SCAN_POINTS - 1) as f64;
    let mut best = (0.0, phi(0.0)?);
    let mut best_i = 0;
    for i in 1..LINE_SCAN_POINTS {
        let t = i as f64 / last;
        let v = phi(t)?;
        if v < best.1 {
            best = (t, v);
            best_i = i;
        }
    }
    let mut a = (best_i.saturating_sub(1)) as f64 / last;
    let mut b = ((best_i + 1).min(LINE_SCAN_POINTS - 1)) as f64 / last;
    let mut c = b - INV_PHI * (b - a);
    let mut e = a + INV_PHI * (b - a);
    let mut fc = phi(c)?;
    let mut fe = phi(e)?;
    while b - a > cfg.line_search_tol {
        if fc < fe {
            b = e;
            e = c;
            fe = fc;
            c = b - INV_PHI * (b - a);
            fc = phi(c)?;
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + INV_PHI * (b - a);
            fe = phi(e)?;
        }
    }
    for (t, v) in [(c, fc), (e, fe)] {
        if v < best.1 {
            best = (t, v);
        }
    }
    Ok(best)
}

/// Descent on the gap: `u_{n+1} = u_n + t_n (w(u_n) - u_n)`.
///
/// Stops when `|d_n|` or `|u_{n+1} - u_n|` drops below `outer_tol`. On
/// nonconvex sets a step landing outside the set ends the run with
/// `SubproblemFailed`.
pub fn descent_solve(g: &GapModel, cfg: &SolverConfig, u0: &Point) -> Result<Trace> {
    cfg.validate()?;
    let p = &g.problem;
    p.require_member(u0)?;
    let mut trace = Trace::new();
    let mut u = u0.clone();
    let gap = gap_value(g, &u, cfg)?;
    trace.push(u.clone(), 0.0, natural_residual(p, &u)?, Some(gap), None);
    for _ in 0..cfg.max_outer {
        let d = &w_map(g, &u, cfg)? - &u;
        if d.norm() < cfg.outer_tol {
            trace.status = Status::Converged;
            return Ok(trace);
        }
        let (t, value) = line_search_with_value(g, &u, &d, cfg)?;
        let candidate = u.axpy(t, &d);
        let next = if p.set.contains_default(&candidate)? {
            candidate
        } else {
            let projected = p.set.project(&candidate)?.point;
            if !p.set.contains_default(&projected)? {
                trace.status = Status::SubproblemFailed;
                trace.failure = Some(Error::InfeasibleSegment.to_string());
                return Ok(trace);
            }
            projected
        };
        let step = next.dist(&u);
        trace.push(next.clone(), step, natural_residual(p, &next)?, Some(value), Some(t));
        u = next;
        if step < cfg.outer_tol {
            trace.status = Status::Converged;
            return Ok(trace);
        }
    }
    trace.status = Status::MaxIterations;
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConstraintSet;
    use crate::model::Bifunction;

    fn identity_ball10() -> GapModel {
        let f = Bifunction::affine_vi(Matrix::identity(2), Point::zeros(2)).unwrap();
        let set = ConstraintSet::ball(Point::zeros(2), 10.0).unwrap();
        GapModel::new(UREProblem::new(f, set, 1.0, 1.0).unwrap(), None).unwrap()
    }

    fn unit_ball_shift() -> GapModel {
        let f = Bifunction::affine_vi(Matrix::identity(2), Point::from([-2.0, 0.0])).unwrap();
        GapModel::new(UREProblem::new(f, ConstraintSet::unit_ball(2), 1.0, 1.0).unwrap(), None).unwrap()
    }

    #[test]
    fn w_map_examples() {
        let cfg = SolverConfig::default();
        let g = identity_ball10();
        assert_eq!(g.alpha, 1.0);
        let w = w_map(&g, &Point::from([0.5, 0.0]), &cfg).unwrap();
        assert!(w.norm() < 1e-12, "{w:?}");

        let g = unit_ball_shift();
        let u = Point::from([1.0, 0.0]);
        assert!(w_map(&g, &u, &cfg).unwrap().dist(&u) < 1e-10);

        let z = GapModel::new(
            UREProblem::new(Bifunction::zero(2), ConstraintSet::unit_ball(2), 1.0, 1.0).unwrap(),
            None,
        )
        .unwrap();
        let u = Point::from([0.1, -0.4]);
        assert!(w_map(&z, &u, &cfg).unwrap().dist(&u) < 1e-12);
        assert_eq!(gap_value(&z, &u, &cfg).unwrap(), 0.0);
        assert_eq!(gap_gradient(&z, &u, &cfg).unwrap(), Point::zeros(2));
    }

    #[test]
    fn gap_value_examples() {
        let cfg = SolverConfig::default();
        let v = gap_value(&identity_ball10(), &Point::from([0.5, 0.0]), &cfg).unwrap();
        assert!((v - 0.125).abs() < 1e-12);
        let v = gap_value(&unit_ball_shift(), &Point::from([1.0, 0.0]), &cfg).unwrap();
        assert!(v.abs() < 1e-10);
    }

    #[test]
    fn gap_gradient_example() {
        let cfg = SolverConfig::default();
        let grad = gap_gradient(&identity_ball10(), &Point::from([0.5, 0.0]), &cfg).unwrap();
        assert!(grad.dist(&Point::from([0.5, 0.0])) < 1e-12);
        // Interior solution with T(u*) = 0.
        let grad = gap_gradient(&identity_ball10(), &Point::zeros(2), &cfg).unwrap();
        assert!(grad.norm() < 1e-12);
    }

    #[test]
    fn gap_requires_diagonal_flag() {
        let f = Bifunction::new(|u: &Point, v: &Point| u.dot(v)).with_grad_v(|u, _| u.clone());
        let g = GapModel::new(UREProblem::new(f, ConstraintSet::unit_ball(2), 1.0, 1.0).unwrap(), None).unwrap();
        assert_eq!(gap_value(&g, &Point::zeros(2), &SolverConfig::default()), Err(Error::DiagonalNotZero));
    }

    #[test]
    fn line_search_examples() {
        let cfg = SolverConfig::default();
        let g = identity_ball10();
        let u = Point::from([0.5, 0.0]);
        assert_eq!(line_search(&g, &u, &Point::from([-0.5, 0.0]), &cfg).unwrap(), 1.0);
        assert_eq!(line_search(&g, &u, &Point::zeros(2), &cfg).unwrap(), 0.0);
        // Moving away from the origin increases |u|^2 / 2.
        assert_eq!(line_search(&g, &u, &Point::from([1.0, 0.0]), &cfg).unwrap(), 0.0);
    }

    #[test]
    fn line_search_interior_minimum() {
        let cfg = SolverConfig::default();
        let g = identity_ball10();
        // phi(t) = |(1 - 2.6 t, 0)|^2 / 2, minimized at t = 1/2.6.
        let t = line_search(&g, &Point::from([1.0, 0.0]), &Point::from([-2.6, 0.0]), &cfg).unwrap();
        assert!((t - 1.0 / 2.6).abs() < 1e-6, "{t}");
    }

    #[test]
    fn descent_examples() {
        let cfg = SolverConfig::default();
        let trace = descent_solve(&identity_ball10(), &cfg, &Point::from([0.5, 0.0])).unwrap();
        assert_eq!(trace.status, Status::Converged);
        let gaps: Vec<f64> = trace.records.iter().map(|r| r.gap.unwrap()).collect();
        assert_eq!(gaps.len(), 2);
        assert!((gaps[0] - 0.125).abs() < 1e-12 && gaps[1].abs() < 1e-12, "{gaps:?}");
        assert_eq!(trace.records[1].t, Some(1.0));

        let trace = descent_solve(&unit_ball_shift(), &cfg, &Point::from([1.0, 0.0])).unwrap();
        assert_eq!(trace.records.len(), 1);
        assert_eq!(trace.status, Status::Converged);
    }

    #[test]
    fn necessary_condition_examples() {
        let f = Bifunction::affine_vi(Matrix::identity(2), Point::from([-2.0, 0.0])).unwrap();
        let g = GapModel::new(UREProblem::new(f, ConstraintSet::unit_ball(2), 1.0, 1.0).unwrap(), None).unwrap();
        let r = check_necessary_condition(&g, 1000, 5).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.min_value_reversed < 0.0);

        let z = GapModel::new(
            UREProblem::new(Bifunction::zero(2), ConstraintSet::unit_ball(2), 1.0, 1.0).unwrap(),
            None,
        )
        .unwrap();
        let r = check_necessary_condition(&z, 100, 5).unwrap();
        assert!(r.passed && r.min_value == 0.0);
    }

    #[test]
    fn metric_regularizer_gradients() {
        let m = Matrix::new(vec![vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let reg = Regularizer::Metric { m };
        let x = Point::from([0.3, -0.2]);
        let y = Point::from([-0.1, 0.4]);
        let h = 1e-6;
        for i in 0..2 {
            let e = Point::basis(2, i);
            let fd = (reg.value(&x.axpy(h, &e), &y) - reg.value(&x.axpy(-h, &e), &y)) / (2.0 * h);
            assert!((fd - reg.grad_x(&x, &y)[i]).abs() < 1e-8);
        }
        assert_eq!(reg.value(&x, &x), 0.0);
    }
}
