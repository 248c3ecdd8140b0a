//! Run configuration files.
//!
//! A config is a flat list of `dotted.key = value` lines. `#` starts a
//! comment. Vectors are comma separated, matrix rows are separated by `;`,
//! and `inf` is accepted wherever a real is. Unknown keys are rejected.
//!
//! ```text
//! scheme = proximal
//! problem.bifunction.kind = vi_affine
//! problem.bifunction.offset = -2, 0
//! problem.set.kind = ball
//! problem.set.center = 0, 0
//! problem.set.radius = 1
//! problem.k = 1
//! problem.r = 1
//! start = 0, -1
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::geometry::{AxisBox, ConstraintSet, SetKind};
use crate::model::{default_lambda, Bifunction, GammaSchedule, SolverConfig, UREProblem};
use crate::point::{Matrix, Point};
use crate::{catalog, Error as CoreError};

pub const SCHEMES: [&str; 4] = ["proximal", "inertial", "explicit", "descent"];
pub const SET_KINDS: [&str; 7] = ["box", "ball", "halfspace", "sphere", "box_minus_ball", "annulus", "two_ball_union"];
pub const BIFUNCTION_KINDS: [&str; 3] = ["vi_affine", "zero", "norm_difference"];

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{path}:{line}: {field}: {message}")]
    Parse { path: String, line: usize, field: String, message: String },
    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Validation(Vec<String>),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Proximal,
    Inertial,
    Explicit,
    Descent,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Proximal => "proximal",
            Scheme::Inertial => "inertial",
            Scheme::Explicit => "explicit",
            Scheme::Descent => "descent",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "proximal" => Scheme::Proximal,
            "inertial" => Scheme::Inertial,
            "explicit" => Scheme::Explicit,
            "descent" => Scheme::Descent,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BifunctionSpec {
    /// `T(u) = matrix * u + offset`
    ViAffine { matrix: Matrix, offset: Point },
    Zero,
    NormDifference,
}

impl BifunctionSpec {
    pub fn build(&self, dim: usize) -> Result<Bifunction, CoreError> {
        match self {
            BifunctionSpec::ViAffine { matrix, offset } => Bifunction::affine_vi(matrix.clone(), offset.clone()),
            BifunctionSpec::Zero => Ok(Bifunction::zero(dim)),
            BifunctionSpec::NormDifference => Ok(catalog::norm_difference()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub bifunction: BifunctionSpec,
    pub set: SetKind,
    pub k: f64,
    pub r: f64,
}

impl ProblemSpec {
    pub fn build(&self) -> Result<UREProblem, CoreError> {
        let set = ConstraintSet::new(self.set.clone())?;
        let f = self.bifunction.build(set.dim())?;
        UREProblem::new(f, set, self.k, self.r)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleSpec {
    pub enabled: bool,
    pub resolution: usize,
    /// Largest accepted distance to the oracle point; defaults to twice the grid spacing.
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputSpec {
    pub dir: PathBuf,
    pub trace: String,
    pub summary: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scheme: Scheme,
    pub problem: ProblemSpec,
    pub start: Point,
    /// Known solution; enables the Fejér check on proximal runs.
    pub solution: Option<Point>,
    pub solver: SolverConfig,
    pub oracle: OracleSpec,
    pub output: OutputSpec,
}

#[derive(Debug)]
struct Entry {
    value: String,
    line: usize,
}

struct Reader<'a> {
    path: &'a str,
    entries: BTreeMap<String, Entry>,
    errors: Vec<String>,
}

impl<'a> Reader<'a> {
    fn parse_err(&self, key: &str, message: impl Into<String>) -> ConfigError {
        let line = self.entries.get(key).map_or(0, |e| e.line);
        ConfigError::Parse { path: self.path.into(), line, field: key.into(), message: message.into() }
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key).map(|e| e.value)
    }

    fn peek(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn required(&mut self, key: &str) -> Option<String> {
        let v = self.take(key);
        if v.is_none() {
            self.errors.push(format!("missing required field {key}"));
        }
        v
    }

    fn real(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        let Some(raw) = self.peek(key) else { return Ok(None) };
        let v = parse_real(raw).ok_or_else(|| self.parse_err(key, format!("expected a number, got {raw:?}")))?;
        self.take(key);
        Ok(Some(v))
    }

    fn integer(&mut self, key: &str) -> Result<Option<u64>, ConfigError> {
        let Some(raw) = self.peek(key) else { return Ok(None) };
        let v = raw
            .parse::<u64>()
            .map_err(|_| self.parse_err(key, format!("expected a nonnegative integer, got {raw:?}")))?;
        self.take(key);
        Ok(Some(v))
    }

    fn boolean(&mut self, key: &str) -> Result<Option<bool>, ConfigError> {
        let Some(raw) = self.peek(key) else { return Ok(None) };
        let v = match raw {
            "true" => true,
            "false" => false,
            _ => return Err(self.parse_err(key, format!("expected true or false, got {raw:?}"))),
        };
        self.take(key);
        Ok(Some(v))
    }

    fn vector(&mut self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some(raw) = self.peek(key) else { return Ok(None) };
        let v = parse_vector(raw).ok_or_else(|| self.parse_err(key, format!("expected comma-separated numbers, got {raw:?}")))?;
        self.take(key);
        Ok(Some(v))
    }

    fn matrix(&mut self, key: &str) -> Result<Option<Vec<Vec<f64>>>, ConfigError> {
        let Some(raw) = self.peek(key) else { return Ok(None) };
        let rows: Option<Vec<Vec<f64>>> = raw.split(';').map(parse_vector).collect();
        let rows = rows.ok_or_else(|| self.parse_err(key, "expected rows of numbers separated by ';'"))?;
        self.take(key);
        Ok(Some(rows))
    }

    fn req_real(&mut self, key: &str) -> Result<f64, ConfigError> {
        let v = self.real(key)?;
        if v.is_none() {
            self.errors.push(format!("missing required field {key}"));
        }
        Ok(v.unwrap_or(f64::NAN))
    }

    fn req_point(&mut self, key: &str) -> Result<Point, ConfigError> {
        match self.vector(key)? {
            Some(v) => Point::new(v).map_err(|e| self.parse_err(key, e.to_string())),
            None => {
                self.errors.push(format!("missing required field {key}"));
                Ok(Point::zeros(1))
            }
        }
    }

    fn req_vec(&mut self, key: &str) -> Result<Vec<f64>, ConfigError> {
        let v = self.vector(key)?;
        if v.is_none() {
            self.errors.push(format!("missing required field {key}"));
        }
        Ok(v.unwrap_or_else(|| vec![0.0]))
    }
}

fn parse_real(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "+inf" | "infinity" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        t => t.parse::<f64>().ok().filter(|v| !v.is_nan()),
    }
}

fn parse_vector(s: &str) -> Option<Vec<f64>> {
    let v: Option<Vec<f64>> = s.split(',').map(parse_real).collect();
    v.filter(|v| !v.is_empty())
}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_config_str(&text, &path.display().to_string())
}

pub fn parse_config_str(text: &str, origin: &str) -> Result<RunConfig, ConfigError> {
    let mut entries = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Parse {
                path: origin.into(),
                line,
                field: content.into(),
                message: "expected `key = value`".into(),
            });
        };
        let key = key.trim().to_string();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.') {
            return Err(ConfigError::Parse { path: origin.into(), line, field: key, message: "malformed key".into() });
        }
        if let Some(prev) = entries.insert(key.clone(), Entry { value: value.trim().to_string(), line }) {
            return Err(ConfigError::Parse {
                path: origin.into(),
                line,
                field: key,
                message: format!("duplicate key (first set on line {})", prev.line),
            });
        }
    }
    let mut rd = Reader { path: origin, entries, errors: Vec::new() };
    read_run_config(&mut rd)
}

fn read_set(rd: &mut Reader<'_>) -> Result<Option<SetKind>, ConfigError> {
    let Some(kind) = rd.required("problem.set.kind") else { return Ok(None) };
    let boxed = |rd: &mut Reader<'_>, lo: &str, hi: &str| -> Result<Option<AxisBox>, ConfigError> {
        let (l, u) = (rd.req_vec(lo)?, rd.req_vec(hi)?);
        match AxisBox::new(l, u) {
            Ok(b) => Ok(Some(b)),
            Err(e) => {
                rd.errors.push(format!("{lo}/{hi}: {e}"));
                Ok(None)
            }
        }
    };
    let set = match kind.as_str() {
        "box" => boxed(rd, "problem.set.lower", "problem.set.upper")?.map(|bounds| SetKind::Box { bounds }),
        "ball" => Some(SetKind::Ball { center: rd.req_point("problem.set.center")?, radius: rd.req_real("problem.set.radius")? }),
        "sphere" => Some(SetKind::Sphere { center: rd.req_point("problem.set.center")?, radius: rd.req_real("problem.set.radius")? }),
        "halfspace" => {
            let normal = rd.req_point("problem.set.normal")?;
            let offset = rd.req_real("problem.set.offset")?;
            boxed(rd, "problem.set.window_lower", "problem.set.window_upper")?
                .map(|window| SetKind::Halfspace { normal, offset, window })
        }
        "box_minus_ball" => {
            let center = rd.req_point("problem.set.center")?;
            let radius = rd.req_real("problem.set.radius")?;
            boxed(rd, "problem.set.lower", "problem.set.upper")?.map(|bounds| SetKind::BoxMinusBall { bounds, center, radius })
        }
        "annulus" => Some(SetKind::Annulus {
            center: rd.req_point("problem.set.center")?,
            inner_radius: rd.req_real("problem.set.inner_radius")?,
            outer_radius: rd.req_real("problem.set.outer_radius")?,
        }),
        "two_ball_union" => Some(SetKind::TwoBallUnion {
            center_a: rd.req_point("problem.set.center_a")?,
            radius_a: rd.req_real("problem.set.radius_a")?,
            center_b: rd.req_point("problem.set.center_b")?,
            radius_b: rd.req_real("problem.set.radius_b")?,
        }),
        other => {
            rd.errors.push(format!("unknown set kind {other:?}; allowed: {}", SET_KINDS.join(", ")));
            None
        }
    };
    Ok(set)
}

fn read_bifunction(rd: &mut Reader<'_>) -> Result<Option<BifunctionSpec>, ConfigError> {
    let Some(kind) = rd.required("problem.bifunction.kind") else { return Ok(None) };
    Ok(match kind.as_str() {
        "vi_affine" => {
            let offset = rd.req_point("problem.bifunction.offset")?;
            let matrix = match rd.matrix("problem.bifunction.matrix")? {
                Some(rows) => match Matrix::new(rows) {
                    Ok(m) => m,
                    Err(e) => {
                        rd.errors.push(format!("problem.bifunction.matrix: {e}"));
                        return Ok(None);
                    }
                },
                None => Matrix::identity(offset.dim()),
            };
            Some(BifunctionSpec::ViAffine { matrix, offset })
        }
        "zero" => Some(BifunctionSpec::Zero),
        "norm_difference" => Some(BifunctionSpec::NormDifference),
        other => {
            rd.errors.push(format!("unknown bifunction kind {other:?}; allowed: {}", BIFUNCTION_KINDS.join(", ")));
            None
        }
    })
}

fn read_run_config(rd: &mut Reader<'_>) -> Result<RunConfig, ConfigError> {
    let scheme = match rd.required("scheme") {
        Some(s) => Scheme::parse(&s).or_else(|| {
            rd.errors.push(format!("unknown scheme {s:?}; allowed: {}", SCHEMES.join(", ")));
            None
        }),
        None => None,
    };
    let bifunction = read_bifunction(rd)?;
    let set = read_set(rd)?;
    let k = rd.req_real("problem.k")?;
    let r = rd.real("problem.r")?.unwrap_or(f64::INFINITY);
    if !(k.is_finite() && k > 0.0) && !k.is_nan() {
        rd.errors.push(format!("problem.k must be positive and finite, got {k}"));
    }
    if !(r > 0.0) {
        rd.errors.push(format!("problem.r must be positive, got {r}"));
    }
    let start = rd.req_point("start")?;
    let solution = match rd.vector("solution")? {
        Some(v) => Some(Point::new(v).map_err(|e| rd.parse_err("solution", e.to_string()))?),
        None => None,
    };

    let defaults = SolverConfig::default();
    let lambda = rd.real("solver.lambda")?;
    let gamma_value = rd.real("solver.gamma")?;
    let gamma_ratio = rd.real("solver.gamma_ratio")?;
    let gamma = match (gamma_value, gamma_ratio) {
        (v, Some(ratio)) => GammaSchedule::Geometric { initial: v.unwrap_or(0.2), ratio },
        (Some(value), None) => GammaSchedule::Constant { value },
        (None, None) => defaults.gamma.clone(),
    };
    let mut solver = SolverConfig {
        lambda: lambda.unwrap_or(defaults.lambda),
        gamma,
        alpha: rd.real("solver.alpha")?,
        outer_tol: rd.real("solver.outer_tol")?.unwrap_or(defaults.outer_tol),
        inner_tol: rd.real("solver.inner_tol")?.unwrap_or(defaults.inner_tol),
        max_outer: rd.integer("solver.max_outer")?.map_or(defaults.max_outer, |v| v as usize),
        max_inner: rd.integer("solver.max_inner")?.map_or(defaults.max_inner, |v| v as usize),
        line_search_tol: rd.real("solver.line_search_tol")?.unwrap_or(defaults.line_search_tol),
        seed: rd.integer("solver.seed")?.unwrap_or(defaults.seed),
        verify: rd.boolean("solver.verify")?.unwrap_or(false),
    };
    rd.errors.extend(solver.validation_errors().into_iter().map(|e| format!("solver.{e}")));

    let oracle = OracleSpec {
        enabled: rd.boolean("oracle.enabled")?.unwrap_or(false),
        resolution: rd.integer("oracle.resolution")?.map_or(400, |v| v as usize),
        tolerance: rd.real("oracle.tolerance")?,
    };
    if oracle.resolution < 2 {
        rd.errors.push("oracle.resolution must be >= 2".into());
    }
    if let Some(t) = oracle.tolerance {
        if !(t > 0.0) {
            rd.errors.push("oracle.tolerance must be positive".into());
        }
    }
    let output = OutputSpec {
        dir: PathBuf::from(rd.take("output.dir").unwrap_or_else(|| "out".into())),
        trace: rd.take("output.trace").unwrap_or_else(|| "trace.csv".into()),
        summary: rd.take("output.summary").unwrap_or_else(|| "summary.json".into()),
    };
    let unknown: Vec<String> =
        rd.entries.iter().map(|(key, e)| format!("unknown key {key} (line {})", e.line)).collect();
    rd.errors.extend(unknown);

    let (Some(scheme), Some(bifunction), Some(set)) = (scheme, bifunction, set) else {
        return Err(ConfigError::Validation(std::mem::take(&mut rd.errors)));
    };
    if !rd.errors.is_empty() {
        return Err(ConfigError::Validation(std::mem::take(&mut rd.errors)));
    }
    let problem = ProblemSpec { bifunction, set, k, r };
    match problem.build() {
        Ok(p) => {
            if start.dim() != p.dim() {
                rd.errors.push(format!("start has dimension {}, problem has {}", start.dim(), p.dim()));
            } else if !p.set.contains_default(&start).unwrap_or(false) {
                rd.errors.push("start is not in the constraint set".into());
            }
            if let Some(s) = &solution {
                if s.dim() != p.dim() {
                    rd.errors.push("solution dimension differs from the problem".into());
                }
            }
            if lambda.is_none() && rd.errors.is_empty() {
                match default_lambda(&p, solver.seed) {
                    Ok(l) => solver.lambda = l,
                    Err(e) => rd.errors.push(format!("cannot derive default lambda: {e}")),
                }
            }
        }
        Err(e) => rd.errors.push(format!("problem: {e}")),
    }
    if !rd.errors.is_empty() {
        return Err(ConfigError::Validation(std::mem::take(&mut rd.errors)));
    }
    Ok(RunConfig { scheme, problem, start, solution, solver, oracle, output })
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Serialize a config back to the text format; `parse_config_str(&emit(rc))`
/// reproduces `rc`.
pub fn emit(rc: &RunConfig) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    kv("scheme", rc.scheme.name().into());
    match &rc.problem.bifunction {
        BifunctionSpec::ViAffine { matrix, offset } => {
            kv("problem.bifunction.kind", "vi_affine".into());
            kv("problem.bifunction.matrix", matrix.rows().iter().map(|r| fmt_vec(r)).collect::<Vec<_>>().join("; "));
            kv("problem.bifunction.offset", fmt_vec(offset.coords()));
        }
        BifunctionSpec::Zero => kv("problem.bifunction.kind", "zero".into()),
        BifunctionSpec::NormDifference => kv("problem.bifunction.kind", "norm_difference".into()),
    }
    match &rc.problem.set {
        SetKind::Box { bounds } => {
            kv("problem.set.kind", "box".into());
            kv("problem.set.lower", fmt_vec(&bounds.lower));
            kv("problem.set.upper", fmt_vec(&bounds.upper));
        }
        SetKind::Ball { center, radius } | SetKind::Sphere { center, radius } => {
            let kind = if matches!(rc.problem.set, SetKind::Ball { .. }) { "ball" } else { "sphere" };
            kv("problem.set.kind", kind.into());
            kv("problem.set.center", fmt_vec(center.coords()));
            kv("problem.set.radius", radius.to_string());
        }
        SetKind::Halfspace { normal, offset, window } => {
            kv("problem.set.kind", "halfspace".into());
            kv("problem.set.normal", fmt_vec(normal.coords()));
            kv("problem.set.offset", offset.to_string());
            kv("problem.set.window_lower", fmt_vec(&window.lower));
            kv("problem.set.window_upper", fmt_vec(&window.upper));
        }
        SetKind::BoxMinusBall { bounds, center, radius } => {
            kv("problem.set.kind", "box_minus_ball".into());
            kv("problem.set.lower", fmt_vec(&bounds.lower));
            kv("problem.set.upper", fmt_vec(&bounds.upper));
            kv("problem.set.center", fmt_vec(center.coords()));
            kv("problem.set.radius", radius.to_string());
        }
        SetKind::Annulus { center, inner_radius, outer_radius } => {
            kv("problem.set.kind", "annulus".into());
            kv("problem.set.center", fmt_vec(center.coords()));
            kv("problem.set.inner_radius", inner_radius.to_string());
            kv("problem.set.outer_radius", outer_radius.to_string());
        }
        SetKind::TwoBallUnion { center_a, radius_a, center_b, radius_b } => {
            kv("problem.set.kind", "two_ball_union".into());
            kv("problem.set.center_a", fmt_vec(center_a.coords()));
            kv("problem.set.radius_a", radius_a.to_string());
            kv("problem.set.center_b", fmt_vec(center_b.coords()));
            kv("problem.set.radius_b", radius_b.to_string());
        }
    }
    kv("problem.k", rc.problem.k.to_string());
    kv("problem.r", rc.problem.r.to_string());
    kv("start", fmt_vec(rc.start.coords()));
    if let Some(s) = &rc.solution {
        kv("solution", fmt_vec(s.coords()));
    }
    let s = &rc.solver;
    kv("solver.lambda", s.lambda.to_string());
    match s.gamma {
        GammaSchedule::Constant { value } => kv("solver.gamma", value.to_string()),
        GammaSchedule::Geometric { initial, ratio } => {
            kv("solver.gamma", initial.to_string());
            kv("solver.gamma_ratio", ratio.to_string());
        }
    }
    if let Some(a) = s.alpha {
        kv("solver.alpha", a.to_string());
    }
    kv("solver.outer_tol", s.outer_tol.to_string());
    kv("solver.inner_tol", s.inner_tol.to_string());
    kv("solver.max_outer", s.max_outer.to_string());
    kv("solver.max_inner", s.max_inner.to_string());
    kv("solver.line_search_tol", s.line_search_tol.to_string());
    kv("solver.seed", s.seed.to_string());
    kv("solver.verify", s.verify.to_string());
    kv("oracle.enabled", rc.oracle.enabled.to_string());
    kv("oracle.resolution", rc.oracle.resolution.to_string());
    if let Some(t) = rc.oracle.tolerance {
        kv("oracle.tolerance", t.to_string());
    }
    kv("output.dir", rc.output.dir.display().to_string());
    kv("output.trace", rc.output.trace.clone());
    kv("output.summary", rc.output.summary.clone());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
scheme = proximal
problem.bifunction.kind = vi_affine
problem.bifunction.offset = 0, 0
problem.set.kind = ball
problem.set.center = 0, 0
problem.set.radius = 1
problem.k = 1
problem.r = 1
start = 0.5, 0
";

    #[test]
    fn minimal_config_gets_defaults() {
        let rc = parse_config_str(MINIMAL, "min.conf").unwrap();
        assert_eq!(rc.scheme, Scheme::Proximal);
        assert_eq!(rc.problem.bifunction, BifunctionSpec::ViAffine { matrix: Matrix::identity(2), offset: Point::zeros(2) });
        assert_eq!(rc.solver.gamma, GammaSchedule::Constant { value: 0.2 });
        assert_eq!(rc.solver.max_outer, 500);
        assert!(!rc.oracle.enabled);
        assert_eq!(rc.oracle.resolution, 400);
        assert_eq!(rc.output.trace, "trace.csv");
        // Identity has Lipschitz constant 1, so the heuristic gives 0.25.
        assert!((rc.solver.lambda - 0.25).abs() < 1e-12, "{}", rc.solver.lambda);
    }

    #[test]
    fn negative_k_is_named() {
        let text = MINIMAL.replace("problem.k = 1", "problem.k = -1");
        let ConfigError::Validation(errors) = parse_config_str(&text, "x").unwrap_err() else { panic!() };
        assert!(errors.iter().any(|e| e.contains("problem.k")), "{errors:?}");
    }

    #[test]
    fn unknown_scheme_lists_allowed() {
        let text = MINIMAL.replace("scheme = proximal", "scheme = newton");
        let ConfigError::Validation(errors) = parse_config_str(&text, "x").unwrap_err() else { panic!() };
        assert!(errors.iter().any(|e| e.contains("newton") && e.contains("proximal, inertial, explicit, descent")));
    }

    #[test]
    fn every_violation_is_listed() {
        let text = format!("{MINIMAL}solver.inner_tol = -1\nbogus.key = 3\n").replace("problem.k = 1", "problem.k = 0");
        let ConfigError::Validation(errors) = parse_config_str(&text, "x").unwrap_err() else { panic!() };
        assert_eq!(errors.len(), 3, "{errors:?}");
    }

    #[test]
    fn parse_errors_carry_line_and_field() {
        let text = MINIMAL.replace("problem.set.radius = 1", "problem.set.radius = one");
        match parse_config_str(&text, "x.conf").unwrap_err() {
            ConfigError::Parse { line, field, .. } => {
                assert_eq!(line, 6);
                assert_eq!(field, "problem.set.radius");
            }
            e => panic!("{e:?}"),
        }
        let err = parse_config_str("scheme proximal\n", "x").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 1, .. }));
        let err = parse_config_str(&format!("{MINIMAL}scheme = explicit\n"), "x").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 10, .. }));
    }

    #[test]
    fn emit_round_trips() {
        let mut rc = parse_config_str(MINIMAL, "x").unwrap();
        rc.solver.lambda = 0.1 + 0.2;
        rc.solver.alpha = Some(1.0 / 3.0);
        rc.problem.r = f64::INFINITY;
        rc.problem.k = 1.0;
        rc.solution = Some(Point::from([1e-17, -0.3]));
        let text = emit(&rc);
        assert_eq!(parse_config_str(&text, "x").unwrap(), rc);
    }
}
