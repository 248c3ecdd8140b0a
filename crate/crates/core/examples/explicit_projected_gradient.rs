//! Explicit scheme `u <- P(u - lambda T(u))` on a box with a non-symmetric
//! monotone operator, compared with a hand-written projected-gradient loop.

use urep::catalog;
use urep::{explicit_solve, Point, SolverConfig};

fn main() -> urep::Result<()> {
    let s = catalog::box_rotation();
    let cfg = SolverConfig { lambda: 0.2, max_outer: 2000, ..SolverConfig::default() };
    let trace = explicit_solve(&s.problem, &cfg, &s.start)?;
    println!("{:?} after {} steps: {:?}", trace.status, trace.iterations(), trace.final_point().unwrap().coords());

    let t = |u: &Point| Point::from([2.0 * u[0] + u[1] - 1.0, -u[0] + 2.0 * u[1] - 1.0]);
    let mut u = s.start.clone();
    let mut worst: f64 = 0.0;
    for r in trace.records.iter().skip(1) {
        u = u.axpy(-cfg.lambda, &t(&u)).map(|x| x.clamp(-1.0, 1.0));
        worst = worst.max(u.dist(&r.iterate));
    }
    println!("max deviation from the reference loop: {worst:e}");
    Ok(())
}
