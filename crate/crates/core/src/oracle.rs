//! Brute-force and sampling oracles.
//!
//! Nothing here calls into the solvers: the grid oracle evaluates `F`
//! directly on a lattice and the gradient helpers use their own central
//! differences.

use std::collections::HashMap;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{AxisBox, ConstraintSet, SetKind};
use crate::model::{Bifunction, UREProblem};
use crate::point::Point;

/// Upper bound on the number of lattice points per grid.
pub const GRID_LIMIT: u64 = 10_000_000;
/// Largest dimension the grid oracle accepts.
pub const MAX_GRID_DIM: usize = 3;
/// Conclusion values above this count as pseudomonotonicity failures.
pub const PSEUDOMONOTONE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    /// Number of intervals per axis; axis `i` carries `resolution[i] + 1` points.
    pub resolution: Vec<usize>,
    pub bounds: AxisBox,
    pub membership_tol: f64,
}

impl GridSpec {
    /// Uniform resolution over the set's bounding box. Sets without interior
    /// (spheres) get a membership tolerance of half a grid diagonal.
    pub fn for_set(set: &ConstraintSet, resolution: usize) -> Self {
        let bounds = set.bounding_box().clone();
        let resolution = vec![resolution; set.dim()];
        let mut gs = GridSpec { resolution, bounds, membership_tol: 1e-9 };
        if matches!(set.kind(), SetKind::Sphere { .. }) {
            gs.membership_tol = 0.5 * gs.max_spacing() * (set.dim() as f64).sqrt();
        }
        gs
    }

    pub fn spacing(&self) -> Vec<f64> {
        self.resolution
            .iter()
            .zip(self.bounds.lower.iter().zip(&self.bounds.upper))
            .map(|(&n, (l, u))| if n > 0 { (u - l) / n as f64 } else { 0.0 })
            .collect()
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacing().into_iter().fold(0.0, f64::max)
    }

    pub fn total_points(&self) -> u64 {
        self.resolution.iter().map(|&n| n as u64 + 1).product()
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if dim > MAX_GRID_DIM {
            return Err(Error::InvalidParameter(format!("grid oracle supports dimension <= {MAX_GRID_DIM}")));
        }
        if self.resolution.len() != dim || self.bounds.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: self.resolution.len() });
        }
        if self.resolution.iter().any(|&n| n < 2) {
            return Err(Error::InvalidParameter("grid resolution must be >= 2 per axis".into()));
        }
        let total = self.total_points();
        if total > GRID_LIMIT {
            return Err(Error::GridTooLarge { points: total, limit: GRID_LIMIT });
        }
        Ok(())
    }

    /// Lattice points with their integer coordinates, in row-major order.
    fn lattice(&self) -> Vec<(Vec<usize>, Point)> {
        let spacing = self.spacing();
        let dim = self.resolution.len();
        let mut out = Vec::with_capacity(self.total_points() as usize);
        let mut idx = vec![0usize; dim];
        loop {
            let x = Point::from_fn(dim, |i| {
                if idx[i] == self.resolution[i] {
                    self.bounds.upper[i]
                } else {
                    self.bounds.lower[i] + idx[i] as f64 * spacing[i]
                }
            });
            out.push((idx.clone(), x));
            let mut axis = dim;
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] <= self.resolution[axis] {
                    break;
                }
                idx[axis] = 0;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    pub best_point: Point,
    /// `min_v F(u, v) + kappa |v - u|^2` over the grid at the best point.
    pub best_value: f64,
    pub certified: bool,
    pub tolerance: f64,
    pub lipschitz: f64,
    pub spacing: f64,
    pub grid_points: usize,
}

const COARSE_POINTS: usize = 256;
const BLOCKS_PER_AXIS: usize = 16;
const SEED_CANDIDATES: usize = 4;

/// Test points of the lattice with the visiting order used to refute candidates.
struct Lattice {
    pts: Vec<Point>,
    coarse: Vec<usize>,
    block_of: Vec<Vec<usize>>,
    blocks: HashMap<Vec<usize>, Vec<usize>>,
}

impl Lattice {
    /// Indices near the block of `k`, then every point.
    fn neighbourhood(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        let home = &self.block_of[k];
        let dim = home.len();
        let mut near = Vec::new();
        for code in 0..3usize.pow(dim as u32) {
            let mut key = Vec::with_capacity(dim);
            let mut c = code;
            for &h in home {
                let off = c % 3;
                c /= 3;
                if h + off < 1 {
                    break;
                }
                key.push(h + off - 1);
            }
            if key.len() == dim {
                if let Some(b) = self.blocks.get(&key) {
                    near.extend_from_slice(b);
                }
            }
        }
        near.into_iter().chain(0..self.pts.len())
    }
}

/// Exhaustive lattice search for `argmax_u min_v F(u, v) + kappa |v - u|^2`.
///
/// The result equals a full scan over all pairs with ties going to the lowest
/// lattice index. A candidate is dropped as soon as one test point pushes its
/// inner value below the incumbent, so test points likely to do that (recent
/// refuters, a coarse subset and the lattice block around the best coarse
/// test point) are visited first.
pub fn grid_solve(p: &UREProblem, gs: &GridSpec) -> Result<OracleResult> {
    gs.validate(p.dim())?;
    let set = &p.set;
    let res = &gs.resolution;
    let (idx, pts): (Vec<Vec<usize>>, Vec<Point>) = gs
        .lattice()
        .into_iter()
        .filter(|(_, x)| set.contains(x, gs.membership_tol).unwrap_or(false))
        .unzip();
    if pts.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let kappa = p.kappa();
    let f = &p.f;
    let inner = |u: &Point, v: &Point| f.eval(u, v) + kappa * v.dist_sq(u);

    let n = pts.len();
    let coarse: Vec<usize> = (0..n).step_by((n / COARSE_POINTS).max(1)).collect();
    let block_of: Vec<Vec<usize>> = idx
        .iter()
        .map(|ix| ix.iter().zip(res).map(|(&i, &r)| i * BLOCKS_PER_AXIS / (r + 1)).collect())
        .collect();
    let mut blocks: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for (k, b) in block_of.iter().enumerate() {
        blocks.entry(b.clone()).or_default().push(k);
    }
    let lat = Lattice { pts, coarse, block_of, blocks };

    // Returns the exact inner minimum of candidate `i` if it beats `(bi, bm)`.
    let challenge = |i: usize, bi: usize, bm: f64, recent: &mut Vec<usize>| -> Option<f64> {
        let u = &lat.pts[i];
        let refutes = |val: f64| val < bm || (val == bm && i > bi);
        let mut min = f64::INFINITY;
        for &j in recent.iter() {
            let val = inner(u, &lat.pts[j]);
            if refutes(val) {
                return None;
            }
            min = min.min(val);
        }
        let mut hint = lat.coarse[0];
        for &j in &lat.coarse {
            let val = inner(u, &lat.pts[j]);
            if val < min {
                min = val;
                hint = j;
            }
            if refutes(val) {
                recent.insert(0, j);
                recent.truncate(4);
                return None;
            }
        }
        for j in lat.neighbourhood(hint) {
            let val = inner(u, &lat.pts[j]);
            if refutes(val) {
                recent.insert(0, j);
                recent.truncate(4);
                return None;
            }
            min = min.min(val);
        }
        Some(min)
    };

    // Seed the incumbent with the exact values of the most promising coarse points.
    let mut seeds: Vec<(usize, f64)> = lat
        .coarse
        .iter()
        .map(|&i| (i, lat.coarse.iter().map(|&j| inner(&lat.pts[i], &lat.pts[j])).fold(f64::INFINITY, f64::min)))
        .collect();
    seeds.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut best: (usize, f64) = (usize::MAX, f64::NEG_INFINITY);
    let mut recent = Vec::new();
    for &(i, _) in seeds.iter().take(SEED_CANDIDATES) {
        if let Some(m) = challenge(i, best.0, best.1, &mut recent) {
            best = (i, m);
        }
    }

    let chunk = n.div_ceil(rayon::current_num_threads().max(1) * 4);
    let seed_best = best;
    let winners: Vec<(usize, f64)> = (0..n)
        .collect::<Vec<_>>()
        .par_chunks(chunk)
        .filter_map(|ids| {
            let mut local = seed_best;
            let mut recent = Vec::new();
            for &i in ids {
                if i == local.0 {
                    continue;
                }
                if let Some(m) = challenge(i, local.0, local.1, &mut recent) {
                    local = (i, m);
                }
            }
            (local != seed_best).then_some(local)
        })
        .collect();
    for w in winners {
        if w.1 > best.1 || (w.1 == best.1 && w.0 < best.0) {
            best = w;
        }
    }
    let (bi, best_value) = best;

    let lipschitz = 2.0 * sampled_inner_lipschitz(&lat.pts, &inner, 1000, 0x5eed);
    let spacing = gs.max_spacing();
    let tolerance = lipschitz * spacing;
    Ok(OracleResult {
        best_point: lat.pts[bi].clone(),
        best_value,
        certified: best_value >= -tolerance,
        tolerance,
        lipschitz,
        spacing,
        grid_points: n,
    })
}

/// Largest gradient norm in `v` of the inner objective over sampled pairs.
fn sampled_inner_lipschitz(pts: &[Point], inner: &(dyn Fn(&Point, &Point) -> f64 + Sync), n: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_norm: f64 = 0.0;
    for _ in 0..n {
        let u = pts.choose(&mut rng).expect("nonempty");
        let v = pts.choose(&mut rng).expect("nonempty");
        let h = 1e-6 * (1.0 + v.norm());
        if let Ok(g) = finite_diff_gradient(|x| inner(u, x), v, h) {
            max_norm = max_norm.max(g.norm());
        }
    }
    max_norm
}

/// Central differences `(f(u + h e_i) - f(u - h e_i)) / 2h`.
pub fn finite_diff_gradient(f: impl Fn(&Point) -> f64, u: &Point, h: f64) -> Result<Point> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter("step must be positive".into()));
    }
    let mut out = Vec::with_capacity(u.dim());
    for i in 0..u.dim() {
        let e = Point::basis(u.dim(), i);
        let plus = f(&u.axpy(h, &e));
        let minus = f(&u.axpy(-h, &e));
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::NonFiniteValue);
        }
        out.push((plus - minus) / (2.0 * h));
    }
    Point::new(out).map_err(|_| Error::NonFiniteValue)
}

/// Step used for gradient checks: `1e-6 (1 + |u|)`.
pub fn default_fd_step(u: &Point) -> f64 {
    1e-6 * (1.0 + u.norm())
}

/// `|a - b| / max(|a|, |b|, 1e-8)`
pub fn relative_error(a: &Point, b: &Point) -> f64 {
    a.dist(b) / a.norm().max(b.norm()).max(1e-8)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GradientReport {
    pub passed: bool,
    pub max_relative_error: f64,
    pub points: usize,
}

/// Compare the bifunction's partial gradients with central differences of
/// `eval` at sampled pairs of the set.
pub fn check_bifunction_gradients(f: &Bifunction, s: &ConstraintSet, n_pairs: usize, seed: u64, tol: f64) -> Result<GradientReport> {
    let pts = s.sample(2 * n_pairs, seed)?;
    let mut worst: f64 = 0.0;
    for pair in pts.chunks_exact(2) {
        let (u, v) = (&pair[0], &pair[1]);
        if f.has_grad_u() {
            let fd = finite_diff_gradient(|x| f.eval(x, v), u, default_fd_step(u))?;
            worst = worst.max(relative_error(&f.grad_u(u, v)?, &fd));
        }
        if f.has_grad_v() {
            let fd = finite_diff_gradient(|x| f.eval(u, x), v, default_fd_step(v))?;
            worst = worst.max(relative_error(&f.grad_v(u, v)?, &fd));
        }
    }
    Ok(GradientReport { passed: worst <= tol, max_relative_error: worst, points: n_pairs })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub u: Point,
    pub v: Point,
    /// `F(u, v) + kappa |v - u|^2`, nonnegative by selection.
    pub premise: f64,
    /// `F(v, u) + kappa |v - u|^2`, positive for a counterexample.
    pub conclusion: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PseudomonotoneReport {
    pub passed: bool,
    pub pairs: usize,
    pub premise_held: usize,
    pub counterexamples: Vec<Counterexample>,
}

/// Per-pair test of `F(u,v) + kappa|v-u|^2 >= 0  =>  F(v,u) + kappa|v-u|^2 <= 0`.
pub fn check_pseudomonotone(f: &Bifunction, s: &ConstraintSet, kappa: f64, n_pairs: usize, seed: u64) -> Result<PseudomonotoneReport> {
    if n_pairs == 0 {
        return Err(Error::InvalidParameter("n_pairs must be positive".into()));
    }
    let pts = s.sample(2 * n_pairs, seed)?;
    let mut premise_held = 0;
    let mut counterexamples = Vec::new();
    for pair in pts.chunks_exact(2) {
        let (u, v) = (&pair[0], &pair[1]);
        let reg = kappa * u.dist_sq(v);
        let premise = f.eval(u, v) + reg;
        if premise < 0.0 {
            continue;
        }
        premise_held += 1;
        let conclusion = f.eval(v, u) + reg;
        if conclusion > PSEUDOMONOTONE_TOL {
            counterexamples.push(Counterexample { u: u.clone(), v: v.clone(), premise, conclusion });
        }
    }
    Ok(PseudomonotoneReport { passed: counterexamples.is_empty(), pairs: n_pairs, premise_held, counterexamples })
}
