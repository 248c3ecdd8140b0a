//! Projected gradient descent with backtracking over a constraint set.
//!
//! Shared by the residual evaluation and the w-map. Neither the schemes nor
//! the oracle go through here.

use crate::error::{Error, Result};
use crate::geometry::ConstraintSet;
use crate::point::Point;

const MAX_STEP: f64 = 1e8;
const MAX_BACKTRACKS: usize = 80;

#[derive(Clone, Debug)]
pub(crate) struct InnerOutcome {
    pub point: Point,
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Minimize `objective` over `set` starting from the projection of `start`.
///
/// Each step takes `y = P(x - s g)` with the largest `s` (starting from twice
/// the last accepted step) that satisfies the quadratic upper-model test.
/// Stops when `|y - x| <= tol`, or when no step length yields descent.
pub(crate) fn minimize_projected(
    set: &ConstraintSet,
    objective: &dyn Fn(&Point) -> f64,
    gradient: &dyn Fn(&Point) -> Point,
    start: &Point,
    tol: f64,
    max_iter: usize,
) -> Result<InnerOutcome> {
    let mut x = set.project(start)?.point;
    let mut fx = objective(&x);
    if !fx.is_finite() {
        return Err(Error::NonFiniteValue);
    }
    let mut s: f64 = 1.0;
    for it in 0..max_iter {
        let g = gradient(&x);
        s = (2.0 * s).min(MAX_STEP);
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let y = set.project(&x.axpy(-s, &g))?.point;
            let d = &y - &x;
            let fy = objective(&y);
            let model = fx + g.dot(&d) + d.norm_sq() / (2.0 * s);
            if fy.is_finite() && fy <= model + 1e-15 * fx.abs() {
                accepted = Some((y, fy, d.norm()));
                break;
            }
            s *= 0.5;
        }
        let Some((y, fy, step)) = accepted else {
            // No step length gives descent: x is stationary to working precision.
            return Ok(InnerOutcome { point: x, value: fx, converged: true, iterations: it });
        };
        // Keep the better point if rounding made the accepted step worse.
        if fy <= fx {
            x = y;
            fx = fy;
        }
        if step <= tol {
            return Ok(InnerOutcome { point: x, value: fx, converged: true, iterations: it + 1 });
        }
    }
    Ok(InnerOutcome { point: x, value: fx, converged: false, iterations: max_iter })
}

/// Run [`minimize_projected`] from every start and keep the lowest value.
/// Fails when the winning start did not converge.
pub(crate) fn minimize_multistart(
    set: &ConstraintSet,
    objective: &dyn Fn(&Point) -> f64,
    gradient: &dyn Fn(&Point) -> Point,
    starts: &[Point],
    tol: f64,
    max_iter: usize,
) -> Result<InnerOutcome> {
    let mut best: Option<InnerOutcome> = None;
    for start in starts {
        let out = minimize_projected(set, objective, gradient, start, tol, max_iter)?;
        if best.as_ref().is_none_or(|b| out.value < b.value) {
            best = Some(out);
        }
    }
    let best = best.ok_or_else(|| Error::InvalidParameter("no starting points".into()))?;
    if !best.converged {
        return Err(Error::InnerSolveFailed { iterations: best.iterations });
    }
    Ok(best)
}

/// `u` followed by `extra` seeded samples of the set.
pub(crate) fn starts_around(set: &ConstraintSet, u: &Point, extra: usize, seed: u64) -> Result<Vec<Point>> {
    let mut starts = vec![u.clone()];
    if extra > 0 {
        starts.extend(set.sample(extra, seed)?);
    }
    Ok(starts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_quadratic_minimum() {
        let ball = ConstraintSet::ball(Point::zeros(2), 10.0).unwrap();
        let target = Point::from([1.0, -2.0]);
        let obj = |x: &Point| 0.5 * x.dist_sq(&target);
        let grad = |x: &Point| x - &target;
        let out = minimize_projected(&ball, &obj, &grad, &Point::from([5.0, 5.0]), 1e-12, 1000).unwrap();
        assert!(out.converged);
        assert!(out.point.dist(&target) < 1e-10);
    }

    #[test]
    fn linear_objective_on_ball_hits_boundary() {
        let ball = ConstraintSet::unit_ball(2);
        let c = Point::from([3.0, 4.0]);
        let obj = |x: &Point| c.dot(x);
        let grad = |_: &Point| c.clone();
        let out = minimize_projected(&ball, &obj, &grad, &Point::zeros(2), 1e-12, 1000).unwrap();
        assert!(out.point.dist(&Point::from([-0.6, -0.8])) < 1e-10);
    }

    #[test]
    fn multistart_escapes_local_minimum_on_annulus() {
        let ann = ConstraintSet::annulus(Point::zeros(2), 1.0, 2.0).unwrap();
        let c = Point::from([1.0, 0.0]);
        let obj = |x: &Point| c.dot(x);
        let grad = |_: &Point| c.clone();
        let starts = starts_around(&ann, &Point::from([1.5, 0.0]), 8, 3).unwrap();
        let out = minimize_multistart(&ann, &obj, &grad, &starts, 1e-12, 1000).unwrap();
        assert!((out.value + 2.0).abs() < 1e-9, "{}", out.value);
    }
}
