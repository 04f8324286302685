//! Round trip between confidence curves and inferential models.
//!
//! A curve defines the association cc(θ) − u = 0; with the random set
//! S = [0, U★) its point plausibility is 1 − cc. A conservative IM curve
//! becomes exact after recalibration against the fiducial distribution.

use im_core::confcurve::{cc_from_im, fieller_cc, im_from_cc, linspace, recalibrate_exact};
use im_core::engine::{belief, point_plausibility_curve, BeliefOptions};
use im_core::fiducial::FiducialOptions;
use im_core::{nested_from_gamma, Interval, Model, ParamSet, Point};

pub fn run_example() -> im_core::Result<()> {
    let fieller = fieller_cc(2.0, 1.0, linspace(-10.0, 10.0, 2001))?;
    let (model, fam) = im_from_cc(&fieller)?;
    let y = Point::scalar(0.0);
    let grid = [-5.0, -1.0, 0.5, 2.0, 4.0];
    let pl = point_plausibility_curve(&model, &y, &fam, &grid, &BeliefOptions::default())?;
    for (t, p) in grid.iter().zip(&pl) {
        println!("ρ = {t:>5}: pl {p:.6}  1 − cc {:.6}", 1.0 - fieller.evaluate(*t));
    }
    let a = ParamSet::Real(Interval::closed(0.0, 4.0).into());
    let r = belief(&model, &y, &fam, &a, &BeliefOptions::default())?;
    println!("A = {a}: bel {:.6} (curve says {:.6})", r.belief, fieller.cc_belief(&a)?);

    let nl = Model::normal_location();
    let y = Point::scalar(0.3);
    let wide = nested_from_gamma("wide", |u| (2.0 * (1.0 - (2.0 * u - 1.0).abs())).min(1.0));
    let cons = cc_from_im(&nl, &y, &wide, linspace(-4.0, 4.0, 161))?;
    let exact = recalibrate_exact(&cons, &nl, &y, &wide, &FiducialOptions::new(40_000, 0.0, 3))?;
    println!("{:?} curve 95% set {}", cons.kind(), cons.confidence_set(0.95)?);
    println!("{:?} curve 95% set {}", exact.kind(), exact.confidence_set(0.95)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> im_core::Result<()> {
    run_example()
}
