//! Coverage by simulation at θ0 = 0 in the normal location model.
//!
//! The curve from the two-sided random set is exact. A confidence
//! distribution centered half a unit off undercovers, and the random set
//! with γ(u) = u² fails the conservative bound as well.

use im_core::confcurve::{cc_from_cd, cc_from_im};
use im_core::normal;
use im_core::validate::{belief_validity_sim, cc_coverage_sim, CoverageReport};
use im_core::{builtin_randomset, nested_from_gamma, Interval, Model, ParamSet, Point};

fn show(label: &str, r: &CoverageReport) {
    println!("{label}: {:?}, passed {}", r.rule, r.passed());
    for ((a, e), s) in r.alphas.iter().zip(&r.empirical).zip(&r.se).step_by(3) {
        println!("  α {a:.2}  empirical {e:.4} ± {s:.4}");
    }
}

pub fn run_example() -> im_core::Result<()> {
    let model = Model::normal_location();
    let theta0 = Point::scalar(0.0);
    let alphas: Vec<f64> = (1..20).map(|j| j as f64 / 20.0).collect();
    let n_rep = 10_000;

    let two = builtin_randomset("two-sided")?;
    let exact = |y: &Point| cc_from_im(&Model::normal_location(), y, &two, vec![0.0]);
    show("two-sided IM curve", &cc_coverage_sim(&model, &theta0, &exact, n_rep, &alphas, 1)?);

    let shifted = |y: &Point| {
        let c = y.x() + 0.5;
        cc_from_cd(move |t| normal::cdf(t - c), vec![0.0])
    };
    show("shifted CD curve", &cc_coverage_sim(&model, &theta0, &shifted, n_rep, &alphas, 1)?);

    let square = nested_from_gamma("square", |u| u * u);
    let bad = |y: &Point| cc_from_im(&Model::normal_location(), y, &square, vec![0.0]);
    show("γ = u² curve", &cc_coverage_sim(&model, &theta0, &bad, n_rep, &alphas, 1)?);

    let a = ParamSet::Real(Interval::open(1.0, f64::INFINITY).into());
    show("bel of (1, inf)", &belief_validity_sim(&model, &theta0, &two, &a, n_rep, &alphas, 1)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> im_core::Result<()> {
    run_example()
}
