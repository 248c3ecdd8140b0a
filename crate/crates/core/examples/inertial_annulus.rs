//! Inertial proximal scheme on the nonconvex annulus `1 <= |u| <= 2`.
//! The momentum schedule decays geometrically; with `gamma = 0` the run
//! reproduces the plain proximal trace exactly.

use urep::catalog;
use urep::{inertial_proximal_solve, proximal_solve, GammaSchedule, SolverConfig};

fn main() -> urep::Result<()> {
    let s = catalog::annulus_shift();
    let base = SolverConfig { lambda: 0.5, ..SolverConfig::default() };

    let cfg = SolverConfig { gamma: GammaSchedule::Geometric { initial: 0.3, ratio: 0.9 }, ..base.clone() };
    let trace = inertial_proximal_solve(&s.problem, &cfg, &s.start)?;
    let last = trace.last().unwrap();
    println!("inertial: {:?} in {} steps, final {:?}", trace.status, trace.iterations(), last.iterate.coords());
    println!("distance to (1, 0): {:.2e}", last.iterate.dist(s.solution.as_ref().unwrap()));

    let no_momentum = inertial_proximal_solve(&s.problem, &base.clone().with_gamma(0.0), &s.start)?;
    let proximal = proximal_solve(&s.problem, &base, &s.start)?;
    println!("gamma = 0 matches proximal: {}", no_momentum == proximal);
    Ok(())
}
