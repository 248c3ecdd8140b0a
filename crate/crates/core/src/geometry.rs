//! Uniformly prox-regular constraint sets.
//!
//! Every set knows its nearest-point projection, its prox-regularity constant
//! `r` (the largest radius such that every unit proximal normal `w` at `u`
//! satisfies `<w, v - u> <= |v - u|^2 / (2r)` for all `v` in the set) and a
//! finite box used for sampling and grid enumeration.
//!
//! Projections onto the nonconvex kinds are set-valued on a measure-zero
//! locus. There the projection falls back to a fixed tie-break and reports
//! `unique = false`:
//!
//! * sphere / annulus center: the point on the first canonical axis;
//! * equidistant from both balls of a [`SetKind::TwoBallUnion`]: the ball
//!   whose center is lexicographically smaller;
//! * center of the hole of a [`SetKind::BoxMinusBall`]: first canonical axis.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;

/// Relative membership tolerance used when none is given explicitly.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-9;

/// Proximal normal inequality violations above this count as failures.
pub const PROX_NORMAL_TOL: f64 = 1e-9;

/// Default membership tolerance at `x`: `1e-9 * (1 + |x|)`.
pub fn membership_tol(x: &Point) -> f64 {
    DEFAULT_MEMBERSHIP_TOL * (1.0 + x.norm())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl AxisBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::InvalidParameter("box bounds must have equal, nonzero length".into()));
        }
        if lower.iter().chain(&upper).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("box bounds must be finite".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(Error::InvalidParameter("box lower bound exceeds upper bound".into()));
        }
        Ok(AxisBox { lower, upper })
    }

    fn around(center: &Point, radius: f64) -> Self {
        AxisBox {
            lower: center.coords().iter().map(|c| c - radius).collect(),
            upper: center.coords().iter().map(|c| c + radius).collect(),
        }
    }

    fn hull(&self, other: &AxisBox) -> AxisBox {
        AxisBox {
            lower: self.lower.iter().zip(&other.lower).map(|(a, b)| a.min(*b)).collect(),
            upper: self.upper.iter().zip(&other.upper).map(|(a, b)| a.max(*b)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn clamp(&self, x: &Point) -> Point {
        Point::from_fn(x.dim(), |i| x[i].clamp(self.lower[i], self.upper[i]))
    }

    pub fn contains(&self, x: &Point, tol: f64) -> bool {
        (0..self.dim()).all(|i| x[i] >= self.lower[i] - tol && x[i] <= self.upper[i] + tol)
    }

    /// Distance from `x` to the box boundary when `x` is inside; negative outside.
    fn inner_margin(&self, x: &Point) -> f64 {
        (0..self.dim())
            .map(|i| (x[i] - self.lower[i]).min(self.upper[i] - x[i]))
            .fold(f64::INFINITY, f64::min)
    }

    fn uniform(&self, rng: &mut ChaCha8Rng) -> Point {
        Point::from_fn(self.dim(), |i| {
            let (l, u) = (self.lower[i], self.upper[i]);
            if l == u { l } else { rng.random_range(l..=u) }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetKind {
    Box { bounds: AxisBox },
    Ball { center: Point, radius: f64 },
    /// `{x : <normal, x> <= offset}`; `window` is the finite box used for
    /// sampling, since the halfspace itself is unbounded.
    Halfspace { normal: Point, offset: f64, window: AxisBox },
    Sphere { center: Point, radius: f64 },
    /// Box with an open ball removed. The closed ball must sit strictly inside
    /// the box or cover all of it (empty set).
    BoxMinusBall { bounds: AxisBox, center: Point, radius: f64 },
    Annulus { center: Point, inner_radius: f64, outer_radius: f64 },
    TwoBallUnion { center_a: Point, radius_a: f64, center_b: Point, radius_b: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub point: Point,
    pub unique: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    kind: SetKind,
    dim: usize,
    prox_constant: f64,
    bounding_box: AxisBox,
    empty: bool,
}

impl ConstraintSet {
    pub fn new(kind: SetKind) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        let positive = |r: f64| r.is_finite() && r > 0.0;
        let mut empty = false;
        let (dim, prox_constant, bounding_box) = match &kind {
            SetKind::Box { bounds } => (bounds.dim(), f64::INFINITY, bounds.clone()),
            SetKind::Ball { center, radius } => {
                if !positive(*radius) {
                    return bad("ball radius must be positive");
                }
                (center.dim(), f64::INFINITY, AxisBox::around(center, *radius))
            }
            SetKind::Halfspace { normal, offset, window } => {
                if normal.norm() == 0.0 || !offset.is_finite() {
                    return bad("halfspace needs a nonzero normal and finite offset");
                }
                if normal.dim() != window.dim() {
                    return bad("halfspace window dimension differs from normal");
                }
                (normal.dim(), f64::INFINITY, window.clone())
            }
            SetKind::Sphere { center, radius } => {
                if !positive(*radius) {
                    return bad("sphere radius must be positive");
                }
                (center.dim(), *radius, AxisBox::around(center, *radius))
            }
            SetKind::BoxMinusBall { bounds, center, radius } => {
                if !positive(*radius) {
                    return bad("hole radius must be positive");
                }
                if center.dim() != bounds.dim() {
                    return bad("hole center dimension differs from box");
                }
                let margin = bounds.inner_margin(center);
                // Farthest box corner from the hole center.
                let far = (0..bounds.dim())
                    .map(|i| {
                        let d = (center[i] - bounds.lower[i]).abs().max((bounds.upper[i] - center[i]).abs());
                        d * d
                    })
                    .sum::<f64>()
                    .sqrt();
                if far < *radius {
                    empty = true;
                } else if margin <= *radius {
                    return bad("hole must lie strictly inside the box");
                }
                (bounds.dim(), *radius, bounds.clone())
            }
            SetKind::Annulus { center, inner_radius, outer_radius } => {
                if !positive(*inner_radius) || !(outer_radius.is_finite() && outer_radius >= inner_radius) {
                    return bad("annulus needs 0 < inner_radius <= outer_radius");
                }
                (center.dim(), *inner_radius, AxisBox::around(center, *outer_radius))
            }
            SetKind::TwoBallUnion { center_a, radius_a, center_b, radius_b } => {
                if !positive(*radius_a) || !positive(*radius_b) {
                    return bad("ball radii must be positive");
                }
                if center_a.dim() != center_b.dim() {
                    return bad("ball centers differ in dimension");
                }
                let gap = center_a.dist(center_b) - radius_a - radius_b;
                if gap <= 0.0 {
                    return bad("balls of a two-ball union must be disjoint");
                }
                let bb = AxisBox::around(center_a, *radius_a).hull(&AxisBox::around(center_b, *radius_b));
                (center_a.dim(), gap / 2.0, bb)
            }
        };
        Ok(ConstraintSet { kind, dim, prox_constant, bounding_box, empty })
    }

    pub fn unit_ball(dim: usize) -> Self {
        Self::ball(Point::zeros(dim), 1.0).expect("valid ball")
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        Self::new(SetKind::Ball { center, radius })
    }

    pub fn sphere(center: Point, radius: f64) -> Result<Self> {
        Self::new(SetKind::Sphere { center, radius })
    }

    pub fn annulus(center: Point, inner_radius: f64, outer_radius: f64) -> Result<Self> {
        Self::new(SetKind::Annulus { center, inner_radius, outer_radius })
    }

    pub fn axis_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        Self::new(SetKind::Box { bounds: AxisBox::new(lower, upper)? })
    }

    pub fn kind(&self) -> &SetKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Uniform prox-regularity constant; `+inf` for convex sets.
    pub fn prox_constant(&self) -> f64 {
        self.prox_constant
    }

    pub fn bounding_box(&self) -> &AxisBox {
        &self.bounding_box
    }

    pub fn is_convex(&self) -> bool {
        self.prox_constant.is_infinite()
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    /// Whether sampling should draw from the set directly instead of
    /// rejection sampling in the bounding box.
    fn is_surface(&self) -> bool {
        matches!(self.kind, SetKind::Sphere { .. })
    }

    pub fn contains(&self, x: &Point, tol: f64) -> Result<bool> {
        Ok(self.distance(x)? <= tol)
    }

    /// Membership with the default relative tolerance.
    pub fn contains_default(&self, x: &Point) -> Result<bool> {
        self.contains(x, membership_tol(x))
    }

    pub fn distance(&self, x: &Point) -> Result<f64> {
        let p = self.project(x)?;
        Ok(x.dist(&p.point))
    }

    pub fn project(&self, x: &Point) -> Result<Projection> {
        x.check_dim(self.dim)?;
        if self.empty {
            return Err(Error::EmptySet);
        }
        let unique = |point| Projection { point, unique: true };
        Ok(match &self.kind {
            SetKind::Box { bounds } => unique(bounds.clamp(x)),
            SetKind::Ball { center, radius } => {
                let d = x.dist(center);
                if d <= *radius {
                    unique(x.clone())
                } else {
                    unique(center.axpy(radius / d, &(x - center)))
                }
            }
            SetKind::Halfspace { normal, offset, .. } => {
                let excess = normal.dot(x) - offset;
                if excess <= 0.0 {
                    unique(x.clone())
                } else {
                    unique(x.axpy(-excess / normal.norm_sq(), normal))
                }
            }
            SetKind::Sphere { center, radius } => radial(center, x, *radius),
            SetKind::Annulus { center, inner_radius, outer_radius } => {
                let d = x.dist(center);
                if d > *outer_radius {
                    radial(center, x, *outer_radius)
                } else if d < *inner_radius {
                    radial(center, x, *inner_radius)
                } else {
                    unique(x.clone())
                }
            }
            SetKind::BoxMinusBall { bounds, center, radius } => {
                if x.dist(center) < *radius {
                    radial(center, x, *radius)
                } else {
                    // The hole sits strictly inside the box, so clamping an
                    // outside point never lands in it.
                    unique(bounds.clamp(x))
                }
            }
            SetKind::TwoBallUnion { center_a, radius_a, center_b, radius_b } => {
                let pa = ball_projection(center_a, *radius_a, x);
                let pb = ball_projection(center_b, *radius_b, x);
                let da = x.dist(&pa);
                let db = x.dist(&pb);
                let tie = da > 0.0 && (da - db).abs() <= 1e-14 * (1.0 + da.max(db));
                let a_first = lex_le(center_a, center_b);
                let point = if tie {
                    if a_first { pa } else { pb }
                } else if da < db {
                    pa
                } else {
                    pb
                };
                Projection { point, unique: !tie }
            }
        })
    }

    /// Projection that refuses to pick a tie-break.
    pub fn project_strict(&self, x: &Point) -> Result<Point> {
        let p = self.project(x)?;
        if !p.unique {
            return Err(Error::DegenerateProjection);
        }
        Ok(p.point)
    }

    /// `n` points of the set, deterministic for a fixed seed.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<Point>> {
        if n == 0 {
            return Err(Error::InvalidParameter("sample count must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if self.empty {
            return Err(Error::SamplingExhausted { wanted: n, got: 0 });
        }
        if self.is_surface() {
            let SetKind::Sphere { center, radius } = &self.kind else { unreachable!() };
            return Ok((0..n)
                .map(|_| {
                    let g = Point::from_fn(self.dim, |_| rng.sample(StandardNormal));
                    let g = g.scale(1.0 / g.norm());
                    let p = center.axpy(*radius, &g);
                    // Snap onto the sphere to remove rounding drift.
                    radial(center, &p, *radius).point
                })
                .collect());
        }
        let max_attempts = 1000 * n + 10_000;
        let mut out = Vec::with_capacity(n);
        for _ in 0..max_attempts {
            let x = self.bounding_box.uniform(&mut rng);
            if self.contains(&x, 0.0)? {
                out.push(x);
                if out.len() == n {
                    return Ok(out);
                }
            }
        }
        Err(Error::SamplingExhausted { wanted: n, got: out.len() })
    }

    /// Points of the set boundary, with the outward unit proximal normal
    /// `(x - P(x)) / |x - P(x)|` built from an exterior point `x`.
    pub fn sample_boundary_normals(&self, n: usize, seed: u64) -> Result<Vec<(Point, Point)>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bb = &self.bounding_box;
        let pad: Vec<f64> = bb.lower.iter().zip(&bb.upper).map(|(l, u)| 0.25 * (u - l).max(1.0)).collect();
        let wide = AxisBox {
            lower: bb.lower.iter().zip(&pad).map(|(l, p)| l - p).collect(),
            upper: bb.upper.iter().zip(&pad).map(|(u, p)| u + p).collect(),
        };
        let mut out = Vec::with_capacity(n);
        for _ in 0..(1000 * n + 10_000) {
            let x = wide.uniform(&mut rng);
            let p = self.project(&x)?;
            let d = x.dist(&p.point);
            if !p.unique || d <= 1e-6 {
                continue;
            }
            let w = (&x - &p.point).scale(1.0 / d);
            out.push((p.point, w));
            if out.len() == n {
                return Ok(out);
            }
        }
        Err(Error::SamplingExhausted { wanted: n, got: out.len() })
    }
}

fn lex_le(a: &Point, b: &Point) -> bool {
    for (x, y) in a.coords().iter().zip(b.coords()) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    true
}

fn ball_projection(center: &Point, radius: f64, x: &Point) -> Point {
    let d = x.dist(center);
    if d <= radius { x.clone() } else { center.axpy(radius / d, &(x - center)) }
}

/// Nearest point of the sphere `|y - center| = radius` to `x`.
fn radial(center: &Point, x: &Point, radius: f64) -> Projection {
    let diff = x - center;
    let d = diff.norm();
    if d == 0.0 {
        Projection { point: center.axpy(radius, &Point::basis(center.dim(), 0)), unique: false }
    } else {
        Projection { point: center.axpy(radius / d, &diff), unique: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProxNormalReport {
    pub passed: bool,
    /// Largest value of `<w, v - u> - |v - u|^2 / (2 r)` over the samples.
    pub max_violation: f64,
    pub worst_sample: Option<Point>,
    pub samples: usize,
}

/// Sampled certificate of the prox-regularity inequality at `u` for the
/// normal `w`, using the set's declared constant.
pub fn proximal_normal_check(
    s: &ConstraintSet,
    u: &Point,
    w: &Point,
    n_samples: usize,
    seed: u64,
) -> Result<ProxNormalReport> {
    proximal_normal_check_with(s, u, w, s.prox_constant(), n_samples, seed)
}

/// Same as [`proximal_normal_check`] with an explicitly claimed constant.
pub fn proximal_normal_check_with(
    s: &ConstraintSet,
    u: &Point,
    w: &Point,
    prox_constant: f64,
    n_samples: usize,
    seed: u64,
) -> Result<ProxNormalReport> {
    u.check_dim(s.dim())?;
    w.check_dim(s.dim())?;
    let dist = s.distance(u)?;
    if dist > membership_tol(u) {
        return Err(Error::PointNotInSet { distance: dist });
    }
    if w.norm() > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter("normal must have norm <= 1".into()));
    }
    if !(prox_constant > 0.0) {
        return Err(Error::InvalidParameter("prox constant must be positive".into()));
    }
    let curvature = if prox_constant.is_infinite() { 0.0 } else { 0.5 / prox_constant };
    let mut max_violation = f64::NEG_INFINITY;
    let mut worst = None;
    for v in s.sample(n_samples, seed)? {
        let diff = &v - u;
        let violation = w.dot(&diff) - curvature * diff.norm_sq();
        if violation > max_violation {
            max_violation = violation;
            worst = Some(v);
        }
    }
    Ok(ProxNormalReport {
        passed: max_violation <= PROX_NORMAL_TOL,
        max_violation,
        worst_sample: worst,
        samples: n_samples,
    })
}
