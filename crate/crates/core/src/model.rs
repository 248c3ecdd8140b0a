//! Problem data, solver configuration and iteration traces.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{membership_tol, ConstraintSet};
use crate::inner;
use crate::point::{Matrix, Point};

pub type ScalarFn = Arc<dyn Fn(&Point, &Point) -> f64 + Send + Sync>;
pub type PartialGradFn = Arc<dyn Fn(&Point, &Point) -> Point + Send + Sync>;
pub type Operator = Arc<dyn Fn(&Point) -> Point + Send + Sync>;
pub type JacobianFn = Arc<dyn Fn(&Point) -> Matrix + Send + Sync>;

/// A bifunction `F(u, v)` with optional partial gradients.
#[derive(Clone)]
pub struct Bifunction {
    eval: ScalarFn,
    grad_u: Option<PartialGradFn>,
    grad_v: Option<PartialGradFn>,
    vi_operator: Option<Operator>,
    diagonal_zero: bool,
}

impl fmt::Debug for Bifunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Bifunction")
            .field("grad_u", &self.grad_u.is_some())
            .field("grad_v", &self.grad_v.is_some())
            .field("vi_form", &self.vi_operator.is_some())
            .field("diagonal_zero", &self.diagonal_zero)
            .finish()
    }
}

impl Bifunction {
    pub fn new(eval: impl Fn(&Point, &Point) -> f64 + Send + Sync + 'static) -> Self {
        Bifunction { eval: Arc::new(eval), grad_u: None, grad_v: None, vi_operator: None, diagonal_zero: false }
    }

    pub fn with_grad_u(mut self, g: impl Fn(&Point, &Point) -> Point + Send + Sync + 'static) -> Self {
        self.grad_u = Some(Arc::new(g));
        self
    }

    pub fn with_grad_v(mut self, g: impl Fn(&Point, &Point) -> Point + Send + Sync + 'static) -> Self {
        self.grad_v = Some(Arc::new(g));
        self
    }

    /// Asserts `F(u, u) = 0` for every `u`.
    pub fn with_diagonal_zero(mut self, flag: bool) -> Self {
        self.diagonal_zero = flag;
        self
    }

    /// `F ≡ 0`.
    pub fn zero(dim: usize) -> Self {
        Bifunction::new(|_, _| 0.0)
            .with_grad_u(move |_, _| Point::zeros(dim))
            .with_grad_v(move |_, _| Point::zeros(dim))
            .with_diagonal_zero(true)
    }

    /// Variational-inequality bifunction of the affine operator `T(u) = A u + b`.
    pub fn affine_vi(a: Matrix, b: Point) -> Result<Self> {
        if !a.is_square() || a.ncols() != b.dim() {
            return Err(Error::InvalidParameter("affine operator needs a square matrix matching the offset".into()));
        }
        let a2 = a.clone();
        let t: Operator = Arc::new(move |u: &Point| &a.apply(u) + &b);
        let jt: JacobianFn = Arc::new(move |_: &Point| a2.clone());
        Ok(make_vi_bifunction(t, Some(jt)))
    }

    pub fn eval(&self, u: &Point, v: &Point) -> f64 {
        (self.eval)(u, v)
    }

    pub fn has_grad_u(&self) -> bool {
        self.grad_u.is_some()
    }

    pub fn has_grad_v(&self) -> bool {
        self.grad_v.is_some() || self.vi_operator.is_some()
    }

    pub fn grad_u(&self, u: &Point, v: &Point) -> Result<Point> {
        self.grad_u.as_ref().map(|g| g(u, v)).ok_or(Error::MissingGradient("first-argument"))
    }

    pub fn grad_v(&self, u: &Point, v: &Point) -> Result<Point> {
        if let Some(g) = &self.grad_v {
            return Ok(g(u, v));
        }
        self.vi_operator.as_ref().map(|t| t(u)).ok_or(Error::MissingGradient("second-argument"))
    }

    /// `grad_v F(u, v)` at `v = u`; equals `T(u)` in VI form.
    pub fn diagonal_grad_v(&self, u: &Point) -> Result<Point> {
        match &self.vi_operator {
            Some(t) => Ok(t(u)),
            None => self.grad_v(u, u),
        }
    }

    pub fn vi_operator(&self) -> Option<&Operator> {
        self.vi_operator.as_ref()
    }

    pub fn diagonal_zero(&self) -> bool {
        self.diagonal_zero
    }
}

/// `F(u, v) = <T(u), v - u>`, with `grad_v = T(u)` and, when the Jacobian is
/// given, `grad_u = JT(u)^T (v - u) - T(u)`.
pub fn make_vi_bifunction(t: Operator, jt: Option<JacobianFn>) -> Bifunction {
    let te = t.clone();
    let tv = t.clone();
    let mut f = Bifunction {
        eval: Arc::new(move |u: &Point, v: &Point| te(u).dot(&(v - u))),
        grad_u: None,
        grad_v: Some(Arc::new(move |u: &Point, _v: &Point| tv(u))),
        vi_operator: Some(t.clone()),
        diagonal_zero: true,
    };
    if let Some(jt) = jt {
        let tu = t;
        f.grad_u = Some(Arc::new(move |u: &Point, v: &Point| &jt(u).apply_transpose(&(v - u)) - &tu(u)));
    }
    f
}

/// The regularized equilibrium problem: find `u` in the set with
/// `F(u, v) + (k / 2r) |v - u|^2 >= 0` for every `v` in the set.
#[derive(Clone, Debug)]
pub struct UREProblem {
    pub f: Bifunction,
    pub set: ConstraintSet,
    k: f64,
    r: f64,
    kappa: f64,
}

impl UREProblem {
    /// `r = f64::INFINITY` gives the plain equilibrium problem.
    pub fn new(f: Bifunction, set: ConstraintSet, k: f64, r: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidParameter(format!("k must be positive and finite, got {k}")));
        }
        if !(r > 0.0) {
            return Err(Error::InvalidParameter(format!("r must be positive, got {r}")));
        }
        if r > set.prox_constant() {
            return Err(Error::InvalidParameter(format!(
                "r = {r} exceeds the prox-regularity constant {} of the set",
                set.prox_constant()
            )));
        }
        let kappa = if r.is_infinite() { 0.0 } else { k / (2.0 * r) };
        Ok(UREProblem { f, set, k, r, kappa })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `k / 2r`, zero when `r` is infinite.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub(crate) fn require_member(&self, u: &Point) -> Result<()> {
        u.check_dim(self.dim())?;
        let d = self.set.distance(u)?;
        if d > membership_tol(u) {
            return Err(Error::PointNotInSet { distance: d });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GammaSchedule {
    Constant { value: f64 },
    /// `initial * ratio^n`
    Geometric { initial: f64, ratio: f64 },
}

impl GammaSchedule {
    pub fn zero() -> Self {
        GammaSchedule::Constant { value: 0.0 }
    }

    pub fn at(&self, n: usize) -> f64 {
        match *self {
            GammaSchedule::Constant { value } => value,
            GammaSchedule::Geometric { initial, ratio } => initial * ratio.powi(n.min(i32::MAX as usize) as i32),
        }
    }

    fn validate(&self, errors: &mut Vec<String>) {
        let in_range = |g: f64| (0.0..1.0).contains(&g);
        match *self {
            GammaSchedule::Constant { value } if !in_range(value) => {
                errors.push(format!("gamma must lie in [0, 1), got {value}"))
            }
            GammaSchedule::Geometric { initial, ratio } if !in_range(initial) || !(0.0..=1.0).contains(&ratio) => {
                errors.push("geometric gamma needs initial in [0, 1) and ratio in [0, 1]".into())
            }
            _ => {}
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub lambda: f64,
    pub gamma: GammaSchedule,
    /// Gap regularization; `None` means `k / r` (or 1 when `r` is infinite).
    pub alpha: Option<f64>,
    pub outer_tol: f64,
    pub inner_tol: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub line_search_tol: f64,
    pub seed: u64,
    /// Audit every subproblem solution against sampled test points.
    pub verify: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            lambda: 0.5,
            gamma: GammaSchedule::Constant { value: 0.2 },
            alpha: None,
            outer_tol: 1e-8,
            inner_tol: 1e-12,
            max_outer: 500,
            max_inner: 10_000,
            line_search_tol: 1e-10,
            seed: 0,
            verify: false,
        }
    }
}

impl SolverConfig {
    /// Default configuration with `lambda = 0.5 / (1 + L)` for a sampled
    /// Lipschitz estimate `L` of `u -> grad_v F(u, u)`.
    pub fn for_problem(p: &UREProblem) -> Result<Self> {
        let cfg = SolverConfig::default();
        Ok(SolverConfig { lambda: default_lambda(p, cfg.seed)?, ..cfg })
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = GammaSchedule::Constant { value: gamma };
        self
    }

    pub fn validation_errors(&self) -> Vec<String> {
        let mut errors = Vec::new();
        let positive = |name: &str, v: f64, errors: &mut Vec<String>| {
            if !(v.is_finite() && v > 0.0) {
                errors.push(format!("{name} must be positive, got {v}"));
            }
        };
        positive("lambda", self.lambda, &mut errors);
        positive("outer_tol", self.outer_tol, &mut errors);
        positive("inner_tol", self.inner_tol, &mut errors);
        positive("line_search_tol", self.line_search_tol, &mut errors);
        if let Some(a) = self.alpha {
            positive("alpha", a, &mut errors);
        }
        if self.max_outer == 0 {
            errors.push("max_outer must be positive".into());
        }
        if self.max_inner == 0 {
            errors.push("max_inner must be positive".into());
        }
        self.gamma.validate(&mut errors);
        errors
    }

    pub fn validate(&self) -> Result<()> {
        let errors = self.validation_errors();
        if errors.is_empty() { Ok(()) } else { Err(Error::InvalidParameter(errors.join("; "))) }
    }
}

/// `0.5 / (1 + L)` where `L` is the largest difference quotient of
/// `u -> grad_v F(u, u)` over 100 sampled pairs.
pub fn default_lambda(p: &UREProblem, seed: u64) -> Result<f64> {
    let pts = p.set.sample(200, seed)?;
    let mut lip: f64 = 0.0;
    for pair in pts.chunks_exact(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let d = a.dist(b);
        if d > 0.0 {
            let ga = p.f.diagonal_grad_v(a)?;
            let gb = p.f.diagonal_grad_v(b)?;
            lip = lip.max(ga.dist(&gb) / d);
        }
    }
    Ok(0.5 / (1.0 + lip))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Converged,
    MaxIterations,
    SubproblemFailed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub iterate: Point,
    /// `|u_n - u_{n-1}|`, zero for the starting point.
    pub step_norm: f64,
    pub residual: f64,
    pub gap: Option<f64>,
    /// Line-search parameter of the step that produced this iterate.
    pub t: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
    pub status: Status,
    pub failure: Option<String>,
}

impl Trace {
    pub(crate) fn new() -> Self {
        Trace { records: Vec::new(), status: Status::MaxIterations, failure: None }
    }

    pub(crate) fn push(&mut self, iterate: Point, step_norm: f64, residual: f64, gap: Option<f64>, t: Option<f64>) {
        let iter = self.records.len();
        self.records.push(TraceRecord { iter, iterate, step_norm, residual, gap, t });
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    pub fn final_point(&self) -> Option<&Point> {
        self.last().map(|r| &r.iterate)
    }

    /// Number of steps taken (records minus the starting point).
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn iterates(&self) -> impl Iterator<Item = &Point> {
        self.records.iter().map(|r| &r.iterate)
    }
}

/// Number of multi-start points used by residual and w-map minimizations.
pub const MULTISTART: usize = 9;

/// `max(0, -m)` with `m = min_v F(u, v) + kappa |v - u|^2` over the set,
/// approximated by projected gradient descent from `u` and
/// `minimizer_budget - 1` seeded samples.
pub fn problem_residual(p: &UREProblem, u: &Point, minimizer_budget: usize, cfg: &SolverConfig) -> Result<f64> {
    p.require_member(u)?;
    if !p.f.has_grad_v() {
        return Err(Error::MissingGradient("second-argument"));
    }
    let kappa = p.kappa();
    let objective = |v: &Point| p.f.eval(u, v) + kappa * v.dist_sq(u);
    let gradient = |v: &Point| {
        let g = p.f.grad_v(u, v).expect("checked above");
        g.axpy(2.0 * kappa, &(v - u))
    };
    let starts = inner::starts_around(&p.set, u, minimizer_budget.saturating_sub(1), cfg.seed)?;
    let best = inner::minimize_multistart(&p.set, &objective, &gradient, &starts, cfg.inner_tol, cfg.max_inner)?;
    Ok((-best.value).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_points(dim: usize, n: usize, scale: f64, seed: u64) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| Point::from_fn(dim, |_| rng.random_range(-scale..=scale))).collect()
    }

    fn shifted_identity(p: [f64; 2]) -> Bifunction {
        Bifunction::affine_vi(Matrix::identity(2), Point::from([-p[0], -p[1]])).unwrap()
    }

    #[test]
    fn vi_bifunction_examples() {
        let id = make_vi_bifunction(Arc::new(|u: &Point| u.clone()), None);
        assert_eq!(id.eval(&Point::from([1.0, 0.0]), &Point::from([0.0, 1.0])), -1.0);
        let f = shifted_identity([2.0, 0.0]);
        assert_eq!(f.eval(&Point::from([1.0, 0.0]), &Point::from([0.5, 0.0])), 0.5);
        for u in random_points(2, 1000, 5.0, 1) {
            assert!(f.eval(&u, &u).abs() <= 1e-12);
            assert!(id.eval(&u, &u).abs() <= 1e-12);
        }
        assert!(f.diagonal_zero());
    }

    #[test]
    fn missing_gradient_is_reported() {
        let f = Bifunction::new(|u, v| u.dot(v));
        assert_eq!(f.grad_u(&Point::zeros(1), &Point::zeros(1)), Err(Error::MissingGradient("first-argument")));
        assert!(!f.has_grad_v());
    }

    #[test]
    fn problem_validation() {
        let ball = ConstraintSet::unit_ball(2);
        let f = Bifunction::zero(2);
        assert!(UREProblem::new(f.clone(), ball.clone(), -1.0, 1.0).is_err());
        let p = UREProblem::new(f.clone(), ball, 1.0, f64::INFINITY).unwrap();
        assert_eq!(p.kappa(), 0.0);
        let sphere = ConstraintSet::sphere(Point::zeros(2), 1.0).unwrap();
        assert!(UREProblem::new(f.clone(), sphere.clone(), 1.0, 2.0).is_err());
        assert_eq!(UREProblem::new(f, sphere, 1.0, 0.5).unwrap().kappa(), 1.0);
    }

    #[test]
    fn residual_examples() {
        let cfg = SolverConfig::default();
        let p = UREProblem::new(shifted_identity([2.0, 0.0]), ConstraintSet::unit_ball(2), 1.0, 1.0).unwrap();
        let r = problem_residual(&p, &Point::from([1.0, 0.0]), MULTISTART, &cfg).unwrap();
        assert!(r <= 1e-12, "{r}");
        // min_v <(-2,0), v> + |v|^2 / 2 over the unit ball is -1.5 at v = (1, 0).
        let r = problem_residual(&p, &Point::zeros(2), MULTISTART, &cfg).unwrap();
        assert!((r - 1.5).abs() < 1e-9, "{r}");

        let z = UREProblem::new(Bifunction::zero(2), ConstraintSet::unit_ball(2), 1.0, 1.0).unwrap();
        assert_eq!(problem_residual(&z, &Point::from([0.3, 0.2]), MULTISTART, &cfg).unwrap(), 0.0);

        let out = problem_residual(&p, &Point::from([3.0, 0.0]), MULTISTART, &cfg);
        assert!(matches!(out, Err(Error::PointNotInSet { .. })));
    }

    #[test]
    fn gamma_validation() {
        let cfg = SolverConfig::default().with_gamma(1.0);
        assert!(cfg.validate().is_err());
        assert!(SolverConfig::default().validate().is_ok());
    }
}
