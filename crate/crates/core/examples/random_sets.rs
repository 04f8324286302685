//! Predictive random sets: the built-in families, a γ table read from CSV,
//! and what the validity check says about each.
//!
//! γ(u) = u² puts too much mass at small γ and fails the check; the offset
//! family shares γ with the two-sided one but is not nested.

use im_core::model::AuxDistribution;
use im_core::randomset::check_validity_condition;
use im_core::{builtin_discrete, builtin_randomset, nested_from_gamma, NestedFamily};

fn report(fam: &NestedFamily, aux: &AuxDistribution) {
    let alphas: Vec<f64> = (1..10).map(|j| j as f64 / 10.0).collect();
    let r = check_validity_condition(fam, aux, 50_000, &alphas, 11);
    let worst = r.rows.iter().map(|row| row.estimate - row.alpha).fold(f64::NEG_INFINITY, f64::max);
    println!(
        "{:<18} valid {:<5} uniform {:<5} KS {:.4}  max(P(γ ≤ α) − α) {:+.4}",
        fam.name(),
        r.valid(),
        r.uniform,
        r.ks_statistic,
        worst
    );
}

pub fn run_example() -> im_core::Result<()> {
    let u01 = AuxDistribution::Uniform01;
    for name in ["left", "right", "two-sided", "offset"] {
        let fam = builtin_randomset(name)?;
        println!("{name}: γ(0.25) = {:.3}, S at α = 0.5 is {}", fam.gamma(0.25), fam.level_set(0.5));
        report(&fam, &u01);
    }

    let table = NestedFamily::from_csv("table", "u,gamma\n0,0\n0.5,1\n1,0\n")?;
    report(&table, &u01);
    report(&nested_from_gamma("square", |u| u * u), &u01);
    report(&NestedFamily::constant(1.0), &u01);

    // offset draws a window of half width; its nesting shares γ
    let offset = builtin_randomset("offset")?;
    assert!(!offset.is_canonical() && offset.canonical().is_canonical());

    let six = AuxDistribution::DiscreteUniform(6);
    for name in ["left", "right", "two-sided", "offset"] {
        let fam = builtin_discrete(name, 6)?;
        let g: Vec<String> = fam.gamma_table().unwrap_or_default().iter().map(|g| g.to_string()).collect();
        println!("discrete {name:<10} γ = [{}]", g.join(", "));
        report(&fam, &six);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> im_core::Result<()> {
    run_example()
}
