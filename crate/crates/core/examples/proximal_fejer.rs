//! Proximal scheme on the unit disc with `T(u) = u - (2, 0)`, followed by
//! the Fejér-type inequality check along the trace.

use urep::catalog;
use urep::{fejer_check, proximal_solve, SolverConfig};

fn main() -> urep::Result<()> {
    let s = catalog::unit_ball_shift();
    let cfg = SolverConfig { lambda: 0.5, ..SolverConfig::default() };
    let trace = proximal_solve(&s.problem, &cfg, &s.start)?;
    for r in trace.records.iter().take(6) {
        println!("{:>3}  u = {:?}  step = {:.3e}", r.iter, r.iterate.coords(), r.step_norm);
    }
    let u_star = s.solution.expect("known solution");
    let report = fejer_check(&trace, &u_star, s.problem.kappa())?;
    println!("status {:?} after {} iterations", trace.status, trace.iterations());
    println!("final {:?}", trace.final_point().unwrap().coords());
    println!("fejer passed = {} (worst margin {:.3e} over {} pairs)", report.passed, report.worst_margin, report.pairs);
    assert!(report.passed);
    Ok(())
}
