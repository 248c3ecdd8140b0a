//! Gap function, its gradient and the descent method.

use urep::catalog;
use urep::{check_necessary_condition, descent_solve, gap_gradient, gap_value, problem_residual, GapModel, Point, SolverConfig};

fn main() -> urep::Result<()> {
    let cfg = SolverConfig::default();

    let ball = GapModel::new(catalog::ball10_identity().problem, None)?;
    let u = Point::from([0.5, 0.0]);
    println!("ball(10), T = id: gap(0.5, 0) = {}", gap_value(&ball, &u, &cfg)?);
    println!("                  grad       = {:?}", gap_gradient(&ball, &u, &cfg)?.coords());
    let trace = descent_solve(&ball, &cfg, &u)?;
    let gaps: Vec<f64> = trace.records.iter().filter_map(|r| r.gap).collect();
    println!("                  gap trace  = {gaps:?}");

    let s = catalog::unit_ball_shift();
    let g = GapModel::new(s.problem.clone(), None)?;
    let nc = check_necessary_condition(&g, 1000, 7)?;
    println!("unit disc: descent condition holds = {} (min {:.3e})", nc.passed, nc.min_value);
    let trace = descent_solve(&g, &cfg, &s.start)?;
    let end = trace.final_point().unwrap();
    println!("descent from {:?}: {:?} in {} steps -> {:?}", s.start.coords(), trace.status, trace.iterations(), end.coords());
    println!("residual at the end: {:e}", problem_residual(&s.problem, end, 9, &cfg)?);
    Ok(())
}
