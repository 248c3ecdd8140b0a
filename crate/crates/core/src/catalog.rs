//! Ready-made problems with known solutions.

use crate::geometry::{ConstraintSet, SetKind};
use crate::model::{Bifunction, UREProblem};
use crate::point::{Matrix, Point};

/// A problem together with a starting point and, when known, its solution.
#[derive(Clone, Debug)]
pub struct Shipped {
    pub name: &'static str,
    pub problem: UREProblem,
    pub start: Point,
    pub solution: Option<Point>,
}

/// `T(u) = u - p`. With `kappa = 1/2` its regularized solutions are exactly
/// the nearest points of the set to `p`.
pub fn shifted_identity(p: &Point) -> Bifunction {
    Bifunction::affine_vi(Matrix::identity(p.dim()), p.scale(-1.0)).expect("square identity")
}

/// `F(u, w) = |w|^2 - |u|^2`: strictly convex in `w`, zero on the diagonal.
pub fn norm_difference() -> Bifunction {
    Bifunction::new(|u: &Point, w: &Point| w.norm_sq() - u.norm_sq())
        .with_grad_u(|u, _| u.scale(-2.0))
        .with_grad_v(|_, w| w.scale(2.0))
        .with_diagonal_zero(true)
}

/// `F(u, v) = <-u, v - u>`, the VI of `T(u) = -u`.
pub fn sign_flip(dim: usize) -> Bifunction {
    Bifunction::affine_vi(Matrix::scaled_identity(dim, -1.0), Point::zeros(dim)).expect("square matrix")
}

/// `T(u) = u - (2, 0)` on the unit disc, `k = r = 1`; solution `(1, 0)`.
pub fn unit_ball_shift() -> Shipped {
    let problem =
        UREProblem::new(shifted_identity(&Point::from([2.0, 0.0])), ConstraintSet::unit_ball(2), 1.0, 1.0)
            .expect("valid problem");
    Shipped { name: "unit_ball_shift", problem, start: Point::from([0.0, -1.0]), solution: Some(Point::from([1.0, 0.0])) }
}

/// `T(u) = u - (0.2, 0)` on the annulus `1 <= |u| <= 2`, `k = r = 1`;
/// solution `(1, 0)`, the annulus point nearest to `(0.2, 0)`.
pub fn annulus_shift() -> Shipped {
    let set = ConstraintSet::annulus(Point::zeros(2), 1.0, 2.0).expect("valid annulus");
    let problem = UREProblem::new(shifted_identity(&Point::from([0.2, 0.0])), set, 1.0, 1.0).expect("valid problem");
    Shipped { name: "annulus_shift", problem, start: Point::from([0.0, 1.5]), solution: Some(Point::from([1.0, 0.0])) }
}

/// `T(u) = u` on the disc of radius 10, `k = r = 1`; solution the origin.
pub fn ball10_identity() -> Shipped {
    let set = ConstraintSet::ball(Point::zeros(2), 10.0).expect("valid ball");
    let problem = UREProblem::new(shifted_identity(&Point::zeros(2)), set, 1.0, 1.0).expect("valid problem");
    Shipped { name: "ball10_identity", problem, start: Point::from([0.5, 0.0]), solution: Some(Point::zeros(2)) }
}

/// `T(u) = A u - b` with `A = [[2, 1], [-1, 2]]` (positive definite, not
/// symmetric) and `b = (1, 1)` on `[-1, 1]^2`, plain equilibrium (`r = inf`).
/// The zero of `T`, `(0.2, 0.6)`, is interior and solves the problem.
pub fn box_rotation() -> Shipped {
    let a = Matrix::new(vec![vec![2.0, 1.0], vec![-1.0, 2.0]]).expect("valid matrix");
    let f = Bifunction::affine_vi(a, Point::from([-1.0, -1.0])).expect("valid operator");
    let set = ConstraintSet::axis_box(vec![-1.0, -1.0], vec![1.0, 1.0]).expect("valid box");
    let problem = UREProblem::new(f, set, 1.0, f64::INFINITY).expect("valid problem");
    Shipped { name: "box_rotation", problem, start: Point::from([-1.0, 1.0]), solution: Some(Point::from([0.2, 0.6])) }
}

/// `T(u) = u - (1, 0.5)` on two disjoint unit discs centered at `(+-3, 0)`,
/// `k = r = 1`; solution the nearest point of the right disc.
pub fn two_balls_shift() -> Shipped {
    let set = ConstraintSet::new(SetKind::TwoBallUnion {
        center_a: Point::from([3.0, 0.0]),
        radius_a: 1.0,
        center_b: Point::from([-3.0, 0.0]),
        radius_b: 1.0,
    })
    .expect("valid union");
    let p = Point::from([1.0, 0.5]);
    let c = Point::from([3.0, 0.0]);
    let solution = c.axpy(1.0 / p.dist(&c), &(&p - &c));
    let problem = UREProblem::new(shifted_identity(&p), set, 1.0, 1.0).expect("valid problem");
    Shipped { name: "two_balls_shift", problem, start: Point::from([3.0, 1.0]), solution: Some(solution) }
}

/// The four problems on which the gap axioms are checked.
pub fn gap_suite() -> Vec<Shipped> {
    vec![unit_ball_shift(), annulus_shift(), ball10_identity(), box_rotation()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_solutions_are_feasible_and_stationary() {
        for s in [unit_ball_shift(), annulus_shift(), ball10_identity(), box_rotation(), two_balls_shift()] {
            let u = s.solution.unwrap();
            assert!(s.problem.set.contains_default(&u).unwrap(), "{}", s.name);
            assert!(s.problem.set.contains_default(&s.start).unwrap(), "{}", s.name);
            let r = crate::schemes::natural_residual(&s.problem, &u).unwrap();
            assert!(r < 1e-12, "{}: {r}", s.name);
        }
    }
}
