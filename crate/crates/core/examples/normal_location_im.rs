//! Normal location: Y = θ + Z observed at y = 1, with the two-sided random
//! set S = {u : |2u − 1| < |2U★ − 1|}.
//!
//! Prints the point plausibility curve next to its closed form
//! 1 − |2Φ(y − θ) − 1|, belief and plausibility of a few assertions, and the
//! 95% plausibility interval.

use im_core::confcurve::linspace;
use im_core::engine::{belief, belief_via_principle, point_plausibility_curve, principle_assertion, BeliefOptions};
use im_core::normal;
use im_core::{builtin_randomset, Model, ParamSet, ParamSpace, Point};

pub fn run_example() -> im_core::Result<()> {
    let model = Model::normal_location();
    let y = Point::scalar(1.0);
    let fam = builtin_randomset("two-sided")?;

    let grid = linspace(-2.0, 4.0, 13);
    let pl = point_plausibility_curve(&model, &y, &fam, &grid, &BeliefOptions::default())?;
    println!("{:>6} {:>12} {:>12}", "theta", "pl", "closed form");
    for (t, p) in grid.iter().zip(&pl) {
        let closed = 1.0 - (2.0 * normal::cdf(1.0 - t) - 1.0).abs();
        println!("{t:>6.2} {p:>12.9} {closed:>12.9}");
        assert!((p - closed).abs() < 1e-9);
    }

    let space = ParamSpace::Real(im_core::Interval::real_line());
    for text in ["(-inf,0]", "(0,inf)", "[0.5,1.5]", "{1}"] {
        let a = ParamSet::parse(text, &space)?;
        let r = belief(&model, &y, &fam, &a, &BeliefOptions::default())?;
        println!("A = {text:<10} bel {:.6}  pl {:.6}  ({:?})", r.belief, r.plausibility, r.method);
    }

    // a half-line never gets belief from a two-sided set, yet is fully plausible
    let half = ParamSet::parse("(-inf,1]", &space)?;
    let r = belief(&model, &y, &fam, &half, &BeliefOptions::default())?;
    assert_eq!((r.belief, r.plausibility), (0.0, 1.0));

    let a95 = principle_assertion(&model, &y, &fam, 0.95)?;
    println!("95% plausibility interval: {a95}");
    let a = ParamSet::parse("(-1,3)", &space)?;
    println!("bel of (-1,3) via principle assertions: {:.6}", belief_via_principle(&model, &y, &fam, &a)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> im_core::Result<()> {
    run_example()
}
