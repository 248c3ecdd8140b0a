//! Projections and sampled prox-regularity certificates for every set kind.

use urep::geometry::proximal_normal_check_with;
use urep::{proximal_normal_check, AxisBox, ConstraintSet, Point, SetKind};

fn main() -> urep::Result<()> {
    let sets = vec![
        ConstraintSet::axis_box(vec![-1.0, -1.0], vec![1.0, 1.0])?,
        ConstraintSet::unit_ball(2),
        ConstraintSet::new(SetKind::Halfspace {
            normal: Point::from([1.0, 1.0]),
            offset: 0.5,
            window: AxisBox::new(vec![-3.0, -3.0], vec![3.0, 3.0])?,
        })?,
        ConstraintSet::sphere(Point::zeros(2), 1.5)?,
        ConstraintSet::new(SetKind::BoxMinusBall {
            bounds: AxisBox::new(vec![-2.0, -2.0], vec![2.0, 2.0])?,
            center: Point::zeros(2),
            radius: 0.5,
        })?,
        ConstraintSet::annulus(Point::zeros(2), 1.0, 2.0)?,
        ConstraintSet::new(SetKind::TwoBallUnion {
            center_a: Point::from([-2.0, 0.0]),
            radius_a: 1.0,
            center_b: Point::from([2.0, 0.0]),
            radius_b: 0.5,
        })?,
    ];
    for s in &sets {
        let mut worst = f64::NEG_INFINITY;
        let mut all = true;
        for (i, (u, w)) in s.sample_boundary_normals(100, 11)?.iter().enumerate() {
            let r = proximal_normal_check(s, u, w, 2000, i as u64)?;
            worst = worst.max(r.max_violation);
            all &= r.passed;
        }
        println!("{:<60} r = {:<6} passed = {all} (max violation {worst:.2e})", format!("{:?}", s.kind()).chars().take(60).collect::<String>(), s.prox_constant());
    }

    // Claiming a larger constant than the annulus supports is caught.
    let annulus = &sets[5];
    let u = Point::from([1.0, 0.0]);
    let w = Point::from([-1.0, 0.0]);
    let r = proximal_normal_check_with(annulus, &u, &w, 10.0, 5000, 3)?;
    println!("annulus with claimed r = 10: passed = {} (violation {:.3})", r.passed, r.max_violation);

    let p = annulus.project(&Point::zeros(2))?;
    println!("projection of the annulus center: {:?}, unique = {}", p.point.coords(), p.unique);
    Ok(())
}
