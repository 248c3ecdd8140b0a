#![allow(dead_code)]

use urep::{AxisBox, ConstraintSet, Point, SetKind};

/// One instance of every set kind, in 2D.
pub fn every_kind() -> Vec<ConstraintSet> {
    vec![
        ConstraintSet::axis_box(vec![-1.0, -0.5], vec![1.0, 2.0]).unwrap(),
        ConstraintSet::ball(Point::from([0.5, -0.5]), 1.5).unwrap(),
        ConstraintSet::new(SetKind::Halfspace {
            normal: Point::from([1.0, 2.0]),
            offset: 0.5,
            window: AxisBox::new(vec![-3.0, -3.0], vec![3.0, 3.0]).unwrap(),
        })
        .unwrap(),
        ConstraintSet::sphere(Point::from([0.2, 0.1]), 1.2).unwrap(),
        ConstraintSet::new(SetKind::BoxMinusBall {
            bounds: AxisBox::new(vec![-2.0, -2.0], vec![2.0, 2.0]).unwrap(),
            center: Point::from([0.3, 0.0]),
            radius: 0.7,
        })
        .unwrap(),
        ConstraintSet::annulus(Point::zeros(2), 1.0, 2.0).unwrap(),
        ConstraintSet::new(SetKind::TwoBallUnion {
            center_a: Point::from([-2.0, 0.0]),
            radius_a: 1.0,
            center_b: Point::from([1.5, 1.0]),
            radius_b: 0.5,
        })
        .unwrap(),
    ]
}

/// The same kinds in 3D, for the kinds that are not inherently planar.
pub fn every_kind_3d() -> Vec<ConstraintSet> {
    vec![
        ConstraintSet::axis_box(vec![-1.0, -1.0, 0.0], vec![1.0, 1.0, 0.5]).unwrap(),
        ConstraintSet::unit_ball(3),
        ConstraintSet::sphere(Point::zeros(3), 2.0).unwrap(),
        ConstraintSet::annulus(Point::from([0.0, 1.0, 0.0]), 0.5, 1.5).unwrap(),
    ]
}
