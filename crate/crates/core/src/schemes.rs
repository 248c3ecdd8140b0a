//! Auxiliary-principle iterations: inertial proximal, proximal and explicit.
//!
//! The implicit subproblem at step `n` asks for `w` in the set with
//!
//! ```text
//! lambda F(w, v) + <(1 + kappa)(w - u_n) + gamma_n (u_n - u_{n-1}) + kappa (v - w), v - w> >= 0
//! ```
//!
//! for all `v`. Dropping the nonnegative `kappa |v - w|^2` term leaves
//! `lambda F(w, v) + (1 + kappa) <w - z, v - w> >= 0` with
//! `z = u_n - gamma_n / (1 + kappa) (u_n - u_{n-1})`, whose solutions are the
//! fixed points of `w -> P(z - lambda / (1 + kappa) grad_v F(w, w))`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{SolverConfig, Status, Trace, UREProblem};
use crate::point::Point;

/// Number of sampled test points used by the subproblem audit.
pub const VERIFY_SAMPLES: usize = 10_000;
/// Largest tolerated violation in the subproblem audit.
pub const VERIFY_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct SubproblemSpec<'a> {
    pub problem: &'a UREProblem,
    pub u_n: Point,
    pub u_prev: Point,
    pub lambda: f64,
    pub gamma_n: f64,
}

impl<'a> SubproblemSpec<'a> {
    pub fn new(problem: &'a UREProblem, u_n: Point, u_prev: Point, lambda: f64, gamma_n: f64) -> Result<Self> {
        if !(lambda > 0.0) || !(gamma_n >= 0.0) {
            return Err(Error::InvalidParameter("subproblem needs lambda > 0 and gamma_n >= 0".into()));
        }
        problem.require_member(&u_n)?;
        problem.require_member(&u_prev)?;
        Ok(SubproblemSpec { problem, u_n, u_prev, lambda, gamma_n })
    }

    pub fn kappa(&self) -> f64 {
        self.problem.kappa()
    }

    /// Inertial anchor `z = u_n - gamma_n / (1 + kappa) (u_n - u_prev)`.
    pub fn anchor(&self) -> Point {
        let c = self.gamma_n / (1.0 + self.kappa());
        self.u_n.axpy(-c, &(&self.u_n - &self.u_prev))
    }

    /// Left-hand side of the subproblem inequality at the candidate `w` and test point `v`.
    pub fn inequality_lhs(&self, w: &Point, v: &Point) -> f64 {
        let kappa = self.kappa();
        let dv = v - w;
        let lin = (&w.scale(1.0 + kappa) - &self.u_n.scale(1.0 + kappa))
            .axpy(self.gamma_n, &(&self.u_n - &self.u_prev))
            .axpy(kappa, &dv);
        self.lambda * self.problem.f.eval(w, v) + lin.dot(&dv)
    }
}

/// Solve one implicit step by the projected fixed-point iteration.
pub fn solve_subproblem(spec: &SubproblemSpec<'_>, cfg: &SolverConfig) -> Result<Point> {
    let f = &spec.problem.f;
    if !f.has_grad_v() {
        return Err(Error::MissingGradient("second-argument"));
    }
    let set = &spec.problem.set;
    let z = spec.anchor();
    let step = spec.lambda / (1.0 + spec.kappa());
    let mut w = spec.u_n.clone();
    for _ in 0..cfg.max_inner {
        let g = f.diagonal_grad_v(&w)?;
        let next = set.project(&z.axpy(-step, &g))?.point;
        let change = next.dist(&w);
        w = next;
        if !w.is_finite() {
            return Err(Error::SubproblemFailed("iterate became non-finite".into()));
        }
        if change <= cfg.inner_tol {
            return Ok(w);
        }
    }
    Err(Error::SubproblemFailed(format!("no fixed point to {:e} within {} iterations", cfg.inner_tol, cfg.max_inner)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub passed: bool,
    /// Most negative left-hand side found (positive means no violation seen).
    pub min_lhs: f64,
    pub worst_v: Option<Point>,
    pub samples: usize,
}

/// Sample `n_samples` points of the set and evaluate the subproblem inequality at `w`.
pub fn verify_subproblem(spec: &SubproblemSpec<'_>, w: &Point, n_samples: usize, seed: u64) -> Result<InequalityReport> {
    let mut min_lhs = f64::INFINITY;
    let mut worst_v = None;
    for v in spec.problem.set.sample(n_samples, seed)? {
        let lhs = spec.inequality_lhs(w, &v);
        if lhs < min_lhs {
            min_lhs = lhs;
            worst_v = Some(v);
        }
    }
    Ok(InequalityReport { passed: min_lhs >= -VERIFY_TOL, min_lhs, worst_v, samples: n_samples })
}

/// `|u - P(u - grad_v F(u, u))|`; zero exactly at projected-stationary points.
pub fn natural_residual(p: &UREProblem, u: &Point) -> Result<f64> {
    let g = p.f.diagonal_grad_v(u)?;
    Ok(u.dist(&p.set.project(&u.axpy(-1.0, &g))?.point))
}

/// Inertial proximal iteration with `u_{-1} = u_0`.
pub fn inertial_proximal_solve(p: &UREProblem, cfg: &SolverConfig, u0: &Point) -> Result<Trace> {
    cfg.validate()?;
    p.require_member(u0)?;
    if !p.f.has_grad_v() {
        return Err(Error::MissingGradient("second-argument"));
    }
    let mut trace = Trace::new();
    trace.push(u0.clone(), 0.0, natural_residual(p, u0)?, None, None);
    let mut prev = u0.clone();
    let mut cur = u0.clone();
    for n in 0..cfg.max_outer {
        let spec = SubproblemSpec::new(p, cur.clone(), prev.clone(), cfg.lambda, cfg.gamma.at(n))?;
        let next = match solve_subproblem(&spec, cfg) {
            Ok(w) => w,
            Err(Error::SubproblemFailed(msg)) => {
                trace.status = Status::SubproblemFailed;
                trace.failure = Some(msg);
                return Ok(trace);
            }
            Err(e) => return Err(e),
        };
        if cfg.verify {
            let report = verify_subproblem(&spec, &next, VERIFY_SAMPLES, cfg.seed.wrapping_add(n as u64))?;
            if !report.passed {
                trace.status = Status::SubproblemFailed;
                trace.failure = Some(format!("subproblem inequality violated by {:e} at step {n}", -report.min_lhs));
                return Ok(trace);
            }
        }
        let step = next.dist(&cur);
        trace.push(next.clone(), step, natural_residual(p, &next)?, None, None);
        prev = cur;
        cur = next;
        if step < cfg.outer_tol {
            trace.status = Status::Converged;
            return Ok(trace);
        }
    }
    trace.status = Status::MaxIterations;
    Ok(trace)
}

/// Proximal iteration: the inertial scheme with `gamma_n = 0`.
pub fn proximal_solve(p: &UREProblem, cfg: &SolverConfig, u0: &Point) -> Result<Trace> {
    let cfg = SolverConfig { gamma: crate::model::GammaSchedule::zero(), ..cfg.clone() };
    inertial_proximal_solve(p, &cfg, u0)
}

/// Explicit iteration `u_{n+1} = P(u_n - lambda grad_v F(u_n, u_n))`.
pub fn explicit_solve(p: &UREProblem, cfg: &SolverConfig, u0: &Point) -> Result<Trace> {
    cfg.validate()?;
    p.require_member(u0)?;
    if !p.f.has_grad_v() {
        return Err(Error::MissingGradient("second-argument"));
    }
    let mut trace = Trace::new();
    trace.push(u0.clone(), 0.0, natural_residual(p, u0)?, None, None);
    let mut cur = u0.clone();
    for _ in 0..cfg.max_outer {
        let g = p.f.diagonal_grad_v(&cur)?;
        let next = p.set.project(&cur.axpy(-cfg.lambda, &g))?.point;
        let step = next.dist(&cur);
        trace.push(next.clone(), step, natural_residual(p, &next)?, None, None);
        cur = next;
        if step < cfg.outer_tol {
            trace.status = Status::Converged;
            return Ok(trace);
        }
    }
    trace.status = Status::MaxIterations;
    Ok(trace)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FejerReport {
    pub passed: bool,
    /// Smallest `rhs + slack - lhs` over consecutive pairs.
    pub worst_margin: f64,
    pub worst_index: Option<usize>,
    pub pairs: usize,
}

/// Check `|u_{n+1} - u*|^2 <= (1+e)^2 |u_n - u*|^2 - |u_{n+1} - (1+e) u_n + e u*|^2`
/// for every consecutive pair, with slack `1e-8 (1 + |u_n - u*|^2)`.
pub fn fejer_check(trace: &Trace, u_star: &Point, epsilon: f64) -> Result<FejerReport> {
    fejer_check_points(&trace.iterates().cloned().collect::<Vec<_>>(), u_star, epsilon)
}

pub fn fejer_check_points(iterates: &[Point], u_star: &Point, epsilon: f64) -> Result<FejerReport> {
    if iterates.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let mut worst_margin = f64::INFINITY;
    let mut worst_index = None;
    for (n, pair) in iterates.windows(2).enumerate() {
        let (un, un1) = (&pair[0], &pair[1]);
        let dn = un.dist_sq(u_star);
        let lhs = un1.dist_sq(u_star);
        let mix = un1.axpy(-(1.0 + epsilon), un).axpy(epsilon, u_star);
        let rhs = (1.0 + epsilon).powi(2) * dn - mix.norm_sq();
        let margin = rhs + 1e-8 * (1.0 + dn) - lhs;
        if margin < worst_margin {
            worst_margin = margin;
            worst_index = Some(n);
        }
    }
    Ok(FejerReport { passed: worst_margin >= 0.0, worst_margin, worst_index, pairs: iterates.len() - 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConstraintSet;
    use crate::model::Bifunction;
    use crate::point::Matrix;

    fn shifted(p: [f64; 2], set: ConstraintSet, k: f64, r: f64) -> UREProblem {
        let f = Bifunction::affine_vi(Matrix::identity(2), Point::from([-p[0], -p[1]])).unwrap();
        UREProblem::new(f, set, k, r).unwrap()
    }

    #[test]
    fn solution_is_subproblem_fixed_point() {
        let p = shifted([2.0, 0.0], ConstraintSet::unit_ball(2), 1.0, 1.0);
        let cfg = SolverConfig::default();
        for (lambda, gamma) in [(0.5, 0.2), (3.0, 0.0), (0.01, 0.3)] {
            let u = Point::from([1.0, 0.0]);
            let spec = SubproblemSpec::new(&p, u.clone(), u.clone(), lambda, gamma).unwrap();
            let w = solve_subproblem(&spec, &cfg).unwrap();
            assert!(w.dist(&u) <= 1e-14);
        }
    }

    #[test]
    fn zero_inertia_zero_kappa_is_implicit_projection_step() {
        let p = shifted([2.0, 0.0], ConstraintSet::unit_ball(2), 1.0, f64::INFINITY);
        let cfg = SolverConfig::default();
        let u = Point::from([0.0, -1.0]);
        let spec = SubproblemSpec::new(&p, u.clone(), Point::from([0.3, 0.1]), 0.5, 0.0).unwrap();
        let w = solve_subproblem(&spec, &cfg).unwrap();
        let t = &w - &Point::from([2.0, 0.0]);
        let back = p.set.project(&u.axpy(-0.5, &t)).unwrap().point;
        assert!(w.dist(&back) <= 1e-11);
    }

    #[test]
    fn annulus_subproblem_matches_closed_form() {
        let ann = ConstraintSet::annulus(Point::zeros(2), 1.0, 2.0).unwrap();
        let p = shifted([2.0, 0.0], ann, 1.0, 1.0);
        let cfg = SolverConfig::default();
        let spec = SubproblemSpec::new(&p, Point::from([1.5, 0.0]), Point::from([1.4, 0.0]), 0.5, 0.2).unwrap();
        let w = solve_subproblem(&spec, &cfg).unwrap();
        // z = 1.5 - (0.2/1.5)*0.1; interior fixed point w = (3z + 2) / 4 = 1.615.
        assert!(w.dist(&Point::from([1.615, 0.0])) <= 1e-12, "{w:?}");
        let report = verify_subproblem(&spec, &w, VERIFY_SAMPLES, 11).unwrap();
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn missing_gradient() {
        let f = Bifunction::new(|u, v| u.dot(v));
        let p = UREProblem::new(f, ConstraintSet::unit_ball(2), 1.0, 1.0).unwrap();
        let cfg = SolverConfig::default();
        assert_eq!(
            explicit_solve(&p, &cfg, &Point::zeros(2)),
            Err(Error::MissingGradient("second-argument"))
        );
    }

    #[test]
    fn stationary_start_converges_in_one_step() {
        let p = shifted([2.0, 0.0], ConstraintSet::unit_ball(2), 1.0, 1.0);
        let cfg = SolverConfig::default();
        let u = Point::from([1.0, 0.0]);
        for trace in [
            inertial_proximal_solve(&p, &cfg, &u).unwrap(),
            proximal_solve(&p, &cfg, &u).unwrap(),
            explicit_solve(&p, &cfg, &u).unwrap(),
        ] {
            assert_eq!(trace.status, Status::Converged);
            assert_eq!(trace.iterations(), 1);
            assert!(trace.last().unwrap().step_norm <= cfg.inner_tol);
        }
    }

    #[test]
    fn fejer_constant_trace_passes_and_empty_fails() {
        let u = Point::from([1.0, 0.0]);
        let report = fejer_check_points(&vec![u.clone(); 5], &u, 0.5).unwrap();
        assert!(report.passed);
        assert_eq!(report.pairs, 4);
        assert_eq!(fejer_check_points(&[], &u, 0.5), Err(Error::EmptyTrace));
    }

    #[test]
    fn max_iterations_status() {
        let p = shifted([2.0, 0.0], ConstraintSet::unit_ball(2), 1.0, 1.0);
        let cfg = SolverConfig { max_outer: 1, ..SolverConfig::default() };
        let trace = proximal_solve(&p, &cfg, &Point::from([0.0, -1.0])).unwrap();
        assert_eq!(trace.status, Status::MaxIterations);
        assert_eq!(trace.records.len(), 2);
    }
}
