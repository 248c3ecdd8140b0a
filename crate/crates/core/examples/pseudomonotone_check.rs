//! Sampled pseudomonotonicity: a monotone affine VI passes, the sign-flipped
//! identity does not.

use urep::catalog;
use urep::{check_pseudomonotone, Bifunction, ConstraintSet, Matrix, Point};

fn main() -> urep::Result<()> {
    let set = ConstraintSet::axis_box(vec![-2.0, -2.0], vec![2.0, 2.0])?;
    let a = Matrix::new(vec![vec![1.0, 2.0], vec![-2.0, 1.0]])?;
    let monotone = Bifunction::affine_vi(a, Point::from([0.5, -0.5]))?;
    let r = check_pseudomonotone(&monotone, &set, 0.0, 10_000, 1)?;
    println!("monotone affine VI: premise held on {}/{} pairs, {} counterexamples", r.premise_held, r.pairs, r.counterexamples.len());

    let r = check_pseudomonotone(&catalog::sign_flip(2), &set, 0.0, 10_000, 1)?;
    println!("sign flip:          premise held on {}/{} pairs, {} counterexamples", r.premise_held, r.pairs, r.counterexamples.len());
    if let Some(c) = r.counterexamples.first() {
        println!("  e.g. u = {:?}, v = {:?}: F(u,v) = {:.3}, F(v,u) = {:.3}", c.u.coords(), c.v.coords(), c.premise, c.conclusion);
    }
    Ok(())
}
