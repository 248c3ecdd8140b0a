//! Brute-force lattice solution of the regularized problem, used as ground
//! truth for the iterative schemes.

use std::time::Instant;

use urep::catalog;
use urep::{grid_solve, proximal_solve, GridSpec, SolverConfig};

fn main() -> urep::Result<()> {
    for s in [catalog::unit_ball_shift(), catalog::annulus_shift()] {
        let start = Instant::now();
        let res = grid_solve(&s.problem, &GridSpec::for_set(&s.problem.set, 400))?;
        let elapsed = start.elapsed();
        let cfg = SolverConfig { lambda: 0.5, ..SolverConfig::default() };
        let trace = proximal_solve(&s.problem, &cfg, &s.start)?;
        let end = trace.final_point().unwrap();
        println!(
            "{}: oracle {:?} (value {:.2e}, certified {}, {} lattice points, {:.2?}), solver distance {:.2e}",
            s.name,
            res.best_point.coords(),
            res.best_value,
            res.certified,
            res.grid_points,
            elapsed,
            end.dist(&res.best_point),
        );
    }
    Ok(())
}
