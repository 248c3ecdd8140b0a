use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::config::{parse_config, RunConfig, Scheme};
use crate::gap::{descent_solve, GapModel};
use crate::model::{problem_residual, Status, Trace, UREProblem, MULTISTART};
use crate::oracle::{grid_solve, GridSpec};
use crate::point::Point;
use crate::schemes::{explicit_solve, fejer_check, inertial_proximal_solve, proximal_solve};

pub const EXIT_CONVERGED: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_MAX_ITERATIONS: i32 = 2;
pub const EXIT_SUBPROBLEM_FAILED: i32 = 3;
pub const EXIT_ORACLE_DISAGREEMENT: i32 = 4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub status: Status,
    pub iterations: usize,
    pub final_point: Point,
    pub final_residual: f64,
    pub final_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_point: Option<Point>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fejer_passed: Option<bool>,
}

/// Everything a run produced, before it is written out.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub trace: Trace,
    pub summary: Summary,
    pub exit_code: i32,
}

/// Trace as CSV: `iter,step_norm,residual,gap,t`, reals to 17 significant digits.
pub fn trace_csv(trace: &Trace) -> String {
    let mut out = String::from("iter,step_norm,residual,gap,t\n");
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
    for r in &trace.records {
        let _ = writeln!(out, "{},{:.16e},{:.16e},{},{}", r.iter, r.step_norm, r.residual, opt(r.gap), opt(r.t));
    }
    out
}

fn solve(rc: &RunConfig, p: &UREProblem) -> crate::Result<Trace> {
    match rc.scheme {
        Scheme::Proximal => proximal_solve(p, &rc.solver, &rc.start),
        Scheme::Inertial => inertial_proximal_solve(p, &rc.solver, &rc.start),
        Scheme::Explicit => explicit_solve(p, &rc.solver, &rc.start),
        Scheme::Descent => {
            let g = GapModel::from_config(p.clone(), &rc.solver)?;
            descent_solve(&g, &rc.solver, &rc.start)
        }
    }
}

/// Run the configured scheme (and oracle, if enabled) without touching the filesystem.
pub fn execute(rc: &RunConfig) -> crate::Result<Outcome> {
    let p = rc.problem.build()?;
    let trace = solve(rc, &p)?;
    let final_point = trace.final_point().cloned().ok_or(crate::Error::EmptyTrace)?;
    let final_residual = problem_residual(&p, &final_point, MULTISTART, &rc.solver)?;
    let final_gap = trace.last().and_then(|r| r.gap);
    let mut exit_code = match trace.status {
        Status::Converged => EXIT_CONVERGED,
        Status::MaxIterations => EXIT_MAX_ITERATIONS,
        Status::SubproblemFailed => EXIT_SUBPROBLEM_FAILED,
    };

    let fejer_passed = match (&rc.solution, rc.scheme) {
        (Some(u_star), Scheme::Proximal) => Some(fejer_check(&trace, u_star, p.kappa())?.passed),
        _ => None,
    };

    let (mut oracle_point, mut oracle_distance) = (None, None);
    if rc.oracle.enabled {
        let gs = GridSpec::for_set(&p.set, rc.oracle.resolution);
        let res = grid_solve(&p, &gs)?;
        let dist = res.best_point.dist(&final_point);
        let tol = rc.oracle.tolerance.unwrap_or(2.0 * res.spacing);
        if dist > tol && exit_code == EXIT_CONVERGED {
            exit_code = EXIT_ORACLE_DISAGREEMENT;
        }
        oracle_point = Some(res.best_point);
        oracle_distance = Some(dist);
    }

    let summary = Summary {
        status: trace.status,
        iterations: trace.iterations(),
        final_point,
        final_residual,
        final_gap,
        oracle_point,
        oracle_distance,
        fejer_passed,
    };
    Ok(Outcome { trace, summary, exit_code })
}

fn write_outputs(rc: &RunConfig, out: &Outcome) -> std::io::Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(&rc.output.dir)?;
    let trace_path = rc.output.dir.join(&rc.output.trace);
    let summary_path = rc.output.dir.join(&rc.output.summary);
    fs::write(&trace_path, trace_csv(&out.trace))?;
    let json = serde_json::to_string_pretty(&out.summary).map_err(std::io::Error::other)?;
    fs::write(&summary_path, json + "\n")?;
    Ok((trace_path, summary_path))
}

/// Execute and write the trace CSV and JSON summary; returns the process exit code.
pub fn run(rc: &RunConfig) -> i32 {
    let outcome = match execute(rc) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_IO;
        }
    };
    if let Some(msg) = &outcome.trace.failure {
        eprintln!("subproblem failure: {msg}");
    }
    match write_outputs(rc, &outcome) {
        Ok(_) => outcome.exit_code,
        Err(e) => {
            eprintln!("error: cannot write outputs to {}: {e}", rc.output.dir.display());
            EXIT_IO
        }
    }
}

/// Command-line overrides applied on top of a parsed config.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub oracle: bool,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub verify: bool,
}

impl Overrides {
    pub fn apply(&self, rc: &mut RunConfig) {
        rc.oracle.enabled |= self.oracle;
        rc.solver.verify |= self.verify;
        if let Some(dir) = &self.out {
            rc.output.dir = dir.clone();
        }
        if let Some(seed) = self.seed {
            rc.solver.seed = seed;
        }
    }
}

/// Parse, override and run a single config file.
pub fn run_file(path: &Path, ov: &Overrides) -> i32 {
    match parse_config(path) {
        Ok(mut rc) => {
            ov.apply(&mut rc);
            run(&rc)
        }
        Err(e) => {
            eprintln!("{e}");
            EXIT_IO
        }
    }
}

/// Run every `*.conf` in `dir` concurrently. Each run writes into
/// `<out>/<file stem>/`, where `<out>` is the override or `out`. Returns the
/// largest exit code.
pub fn run_suite(dir: &Path, ov: &Overrides) -> i32 {
    let mut files: Vec<PathBuf> = match fs::read_dir(dir) {
        Ok(rd) => rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "conf"))
            .collect(),
        Err(e) => {
            eprintln!("error: cannot read suite directory {}: {e}", dir.display());
            return EXIT_IO;
        }
    };
    files.sort();
    if files.is_empty() {
        eprintln!("error: no .conf files in {}", dir.display());
        return EXIT_IO;
    }
    let root = ov.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let codes: Vec<(PathBuf, i32)> = files
        .par_iter()
        .map(|f| {
            let stem = f.file_stem().map(|s| s.to_owned()).unwrap_or_default();
            let local = Overrides { out: Some(root.join(stem)), ..ov.clone() };
            (f.clone(), run_file(f, &local))
        })
        .collect();
    for (f, code) in &codes {
        println!("{}: exit {code}", f.display());
    }
    codes.iter().map(|(_, c)| *c).max().unwrap_or(EXIT_CONVERGED)
}
