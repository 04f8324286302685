// One test per acceptance criterion. Each prints a single line
// `criterion N: PASS|FAIL <detail>`; run with `--nocapture` to see them.

use im_core::confcurve::{cc_from_im, fieller_cc, linspace, two_normal_curve, Functional};
use im_core::engine::{belief, belief_exact_discrete, point_plausibility_curve, principle_assertion, BeliefOptions, Method};
use im_core::fiducial::{matching_randomset, sample_gfd, FiducialOptions};
use im_core::normal;
use im_core::randomset::check_validity_condition;
use im_core::validate::{belief_validity_sim, build_oracle, cc_coverage_sim, check_theorems, support_window, Oracle};
use im_core::{builtin_discrete, builtin_randomset, IntSet, Interval, Model, ParamSet, Point};
use rand::Rng;
use std::time::Instant;

const Z975: f64 = 1.959_963_984_540_054;

fn report(n: u32, pass: bool, detail: String) {
    println!("criterion {n}: {} {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n}: {detail}");
}

fn p(x: f64) -> Point {
    Point::scalar(x)
}

fn alphas() -> Vec<f64> {
    (1..20).map(|j| j as f64 / 20.0).collect()
}

// pl(θ) = 1 − |2Φ(y − θ) − 1|
fn closed_pl(y: f64, t: f64) -> f64 {
    1.0 - (2.0 * normal::cdf(y - t) - 1.0).abs()
}

#[test]
fn criterion_1_plausibility_closed_form() {
    let m = Model::normal_location();
    let fam = builtin_randomset("two-sided").unwrap();
    let y = 1.0;
    let grid = linspace(-3.0, 5.0, 21);
    let exact = point_plausibility_curve(&m, &p(y), &fam, &grid, &BeliefOptions::default()).unwrap();
    let start = Instant::now();
    let opts = BeliefOptions { n_mc: 100_000, seed: 2024, method: Method::MonteCarlo };
    let mc = point_plausibility_curve(&m, &p(y), &fam, &grid, &opts).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let mut worst_exact: f64 = 0.0;
    let mut worst_mc_ratio: f64 = 0.0;
    for ((t, e), s) in grid.iter().zip(&exact).zip(&mc) {
        let want = closed_pl(y, *t);
        worst_exact = worst_exact.max((e - want).abs());
        let tol = (3.0 * (want * (1.0 - want) / 1e5).sqrt()).max(1e-6);
        worst_mc_ratio = worst_mc_ratio.max((s - want).abs() / tol);
    }
    report(
        1,
        worst_exact <= 1e-6 && worst_mc_ratio <= 1.0 && secs < 10.0,
        format!("exact max err {worst_exact:.2e}, MC max err/tol {worst_mc_ratio:.3}, MC batch {secs:.2}s"),
    );
}

#[test]
fn criterion_2_cc_identity() {
    let m = Model::normal_location();
    let fam = builtin_randomset("two-sided").unwrap();
    let y = p(1.0);
    let grid = linspace(-3.0, 5.0, 201);
    let cc = cc_from_im(&m, &y, &fam, grid.clone()).unwrap();
    let pl = point_plausibility_curve(&m, &y, &fam, &grid, &BeliefOptions::default()).unwrap();
    let worst = cc.values().iter().zip(&pl).map(|(c, q)| (c - (1.0 - q)).abs()).fold(0.0, f64::max);
    report(2, worst <= 1e-6, format!("max |cc − (1 − pl)| = {worst:.2e} over {} points", grid.len()));
}

#[test]
fn criterion_3_cc_exactness() {
    let m = Model::normal_location();
    let fam = builtin_randomset("two-sided").unwrap();
    let builder = |y: &Point| cc_from_im(&Model::normal_location(), y, &fam, vec![0.0]);
    let start = Instant::now();
    let r = cc_coverage_sim(&m, &p(0.0), &builder, 10_000, &alphas(), 20240601).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let worst = r.alphas.iter().zip(&r.empirical).map(|(a, e)| (a - e).abs()).fold(0.0, f64::max);
    report(3, worst <= 0.015 && secs < 30.0, format!("max |P(cc < α) − α| = {worst:.4}, {secs:.2}s"));
}

#[test]
fn criterion_4_belief_validity() {
    let m = Model::normal_location();
    let fam = builtin_randomset("two-sided").unwrap();
    let a = ParamSet::Real(Interval::open(1.0, f64::INFINITY).into());
    let r = belief_validity_sim(&m, &p(0.0), &fam, &a, 10_000, &alphas(), 77).unwrap();
    let worst = r.alphas.iter().zip(&r.empirical).map(|(a, e)| e - a).fold(f64::NEG_INFINITY, f64::max);
    report(4, worst <= 0.015, format!("max P(bel ≥ 1 − α) − α = {worst:.4}"));
}

fn sweep() -> Vec<Oracle> {
    [4u32, 8]
        .iter()
        .map(|&n| {
            let m = Model::discrete_shift(n);
            let y = p(5.0);
            let fams: Vec<_> =
                ["left", "right", "two-sided", "offset"].iter().map(|s| builtin_discrete(s, n).unwrap()).collect();
            // two extra points on each side of the support
            let support = support_window(&m, &y).unwrap();
            let window: Vec<i64> = (support[0] - 2..=support[support.len() - 1] + 2).collect();
            build_oracle(&m, &y, &fams, &window).unwrap()
        })
        .collect()
}

fn violations(oracles: &[Oracle], name: &str) -> (usize, usize, usize) {
    let (mut rows, mut bad, mut skipped) = (0, 0, 0);
    for o in oracles {
        let r = check_theorems(o).unwrap();
        for c in r.checks.iter().filter(|c| c.name == name) {
            if c.applicable {
                rows += c.checked;
                bad += c.violations.len();
            } else {
                skipped += 1;
            }
        }
    }
    (rows, bad, skipped)
}

#[test]
fn criterion_5_sandwich() {
    let start = Instant::now();
    let oracles = sweep();
    let (rows, bad, _) = violations(&oracles, "sandwich");
    let secs = start.elapsed().as_secs_f64();
    report(5, bad == 0 && rows > 0 && secs < 60.0, format!("{rows} rows, {bad} violations, {secs:.2}s"));
}

#[test]
fn criterion_6_dominance_and_gap() {
    let oracles = sweep();
    let (dr, db, ds) = violations(&oracles, "nesting-dominance");
    let (gr, gb, gs) = violations(&oracles, "belief-plausibility-gap");
    // closed form: for a half-line A, bel(A) > 0 only if pl(A) = 1
    let m = Model::normal_location();
    let fam = builtin_randomset("two-sided").unwrap();
    let y = 1.0;
    let mut gap_ok = true;
    for c in linspace(-3.0, 5.0, 33) {
        for a in [Interval::new(f64::NEG_INFINITY, c, false, true), Interval::new(c, f64::INFINITY, false, false)] {
            let a = ParamSet::Real(a.into());
            let r = belief(&m, &p(y), &fam, &a, &BeliefOptions::default()).unwrap();
            gap_ok &= r.belief == 0.0 || r.plausibility == 1.0;
        }
    }
    let at_y = belief(&m, &p(y), &fam, &ParamSet::Real(Interval::new(f64::NEG_INFINITY, y, false, true).into()), &BeliefOptions::default()).unwrap();
    gap_ok &= at_y.belief == 0.0 && at_y.plausibility == 1.0;
    report(
        6,
        db == 0 && gb == 0 && ds == 0 && gs == 0 && gap_ok,
        format!("dominance {dr} rows {db} violations; gap {gr} rows {gb} violations; half-lines ok {gap_ok}"),
    );
}

#[test]
fn criterion_7_matching_attains_fid() {
    let n = 8;
    let m = Model::discrete_shift(n);
    let y = p(5.0);
    let window: Vec<i64> = (-4..=7).collect();
    let fams = vec![builtin_discrete("two-sided", n).unwrap()];
    let oracle = build_oracle(&m, &y, &fams, &window).unwrap();
    let mut rng = im_core::rng::substream(7, 0);
    let grid: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
    let (mut equal, mut valid) = (0, 0);
    for _ in 0..100 {
        let row = &oracle.tables[0].rows[rng.random_range(0..oracle.tables[0].rows.len())];
        let a = ParamSet::Integer(IntSet::finite(row.assertion.iter().copied()));
        let fam = matching_randomset(&m, &y, &a).unwrap();
        let (bel, _) = belief_exact_discrete(&m, &y, &fam, &a).unwrap();
        equal += usize::from(bel == row.fid);
        valid += usize::from(check_validity_condition(&fam, &m.aux(), 0, &grid, 0).valid());
    }
    report(7, equal == 100 && valid == 100, format!("bel = fid on {equal}/100, validity check passed on {valid}/100"));
}

#[test]
fn criterion_8_principle_assertions() {
    let oracles = sweep();
    let (rows, bad, _) = violations(&oracles, "principle-assertion-exactness");
    let m = Model::normal_location();
    let fam = builtin_randomset("two-sided").unwrap();
    let y = p(1.0);
    let a95 = principle_assertion(&m, &y, &fam, 0.95).unwrap();
    let s = sample_gfd(&m, &y, &FiducialOptions::new(100_000, 0.0, 88)).unwrap();
    let (fid, se) = s.probability(&a95);
    report(
        8,
        bad == 0 && rows > 0 && (fid - 0.95).abs() <= 3.0 * se,
        format!("discrete: {rows} levels, {bad} mismatches; normal fid(A_0.95) = {fid:.4} ± {se:.4}"),
    );
}

// roots of ρ²(y² − z²) − 2xyρ + x² − z² = 0
fn fieller_roots(x: f64, y: f64, z: f64) -> (f64, f64) {
    let (a, b, c) = (y * y - z * z, -2.0 * x * y, x * x - z * z);
    let d = (b * b - 4.0 * a * c).sqrt();
    let (r1, r2) = ((-b - d) / (2.0 * a), (-b + d) / (2.0 * a));
    (r1.min(r2), r1.max(r2))
}

#[test]
fn criterion_9_figure_curves() {
    let dir = tempfile::tempdir().unwrap();
    let exe = env!("CARGO_BIN_EXE_im");
    let mut emitted = true;
    for f in ["mu-x", "mu-y", "ratio"] {
        let prefix = dir.path().join(f);
        let status = std::process::Command::new(exe)
            .args(["cc", "--model", "two-normal", "--data", "2", "1", "--functional", f, "--levels", "0.95"])
            .arg("--out")
            .arg(&prefix)
            .output()
            .unwrap();
        let csv = std::fs::read_to_string(prefix.with_extension("csv")).unwrap_or_default();
        emitted &= status.status.success() && csv.lines().count() > 100;
    }
    let grid = linspace(-10.0, 10.0, 2001);
    let mx = two_normal_curve(Functional::MuX, 2.0, 1.0, grid.clone()).unwrap();
    let my = two_normal_curve(Functional::MuY, 2.0, 1.0, grid.clone()).unwrap();
    let minima = (mx.minimizer() - 2.0).abs() < 1e-9
        && (my.minimizer() - 1.0).abs() < 1e-9
        && mx.evaluate(2.0) == 0.0
        && my.evaluate(1.0) == 0.0;

    let fieller = fieller_cc(2.0, 1.0, grid).unwrap();
    let set = fieller.confidence_set(0.95).unwrap();
    let parts = set.as_real().unwrap().parts().to_vec();
    let (r1, r2) = fieller_roots(2.0, 1.0, Z975);
    let complement = parts.len() == 2 && parts[0].lo == f64::NEG_INFINITY && parts[1].hi == f64::INFINITY;
    let endpoints = complement && (parts[0].hi - r1).abs() <= 1e-6 && (parts[1].lo - r2).abs() <= 1e-6;

    // the set is bounded below 2Φ(1) − 1 and unbounded above it
    let onset = 2.0 * normal::cdf(1.0) - 1.0;
    let unbounded = |a: f64| fieller.confidence_set(a).map(|s| !s.as_real().unwrap().is_bounded()).unwrap();
    let unbounded_onset = !unbounded(onset - 1e-6) && unbounded(onset + 1e-6);
    report(
        9,
        emitted && minima && endpoints && unbounded_onset,
        format!(
            "curves emitted {emitted}; minima ok {minima}; 95% set {set} vs roots ({r1:.9}, {r2:.9}); \
             unbounded from {onset:.4} {unbounded_onset}"
        ),
    );
}

// The literal whole-line onset. The Fieller curve peaks at 2Φ(√(x² + y²)) − 1,
// so at (2, 1) the set covers the line only from 0.9747; this check fails.
#[test]
#[ignore = "whole-line onset is 2Φ(√5) − 1 ≈ 0.9747, not 2Φ(1) − 1; run with --ignored to see the failure"]
fn criterion_9_whole_line_onset() {
    let fieller = fieller_cc(2.0, 1.0, linspace(-10.0, 10.0, 2001)).unwrap();
    let onset = 2.0 * normal::cdf(1.0) - 1.0;
    let whole = |a: f64| fieller.confidence_set(a).map(|s| s.as_real().unwrap().is_real_line()).unwrap();
    let pass = !whole(onset - 1e-6) && whole(onset + 1e-6);
    let actual = normal::central(5f64.sqrt());
    report(
        9,
        pass,
        format!("whole line at {:.4}: {}; at {actual:.6}: {}", onset + 1e-6, whole(onset + 1e-6), whole(actual + 1e-9)),
    );
}

#[test]
fn criterion_10_gfd_ks() {
    let m = Model::normal_location();
    let y = 1.0;
    let n = 100_000;
    let s = sample_gfd(&m, &p(y), &FiducialOptions::new(n, 0.0, 10)).unwrap();
    let mut x: Vec<f64> = s.draws.iter().map(|t| t.x()).collect();
    x.sort_by(f64::total_cmp);
    let d = x
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let f = normal::cdf(v - y);
            ((i + 1) as f64 / n as f64 - f).max(f - i as f64 / n as f64)
        })
        .fold(0.0, f64::max);
    let crit = 1.628 / (n as f64).sqrt();
    report(10, d <= crit, format!("KS D = {d:.5}, 1% critical value {crit:.5}"));
}
