//! Frequentist checks: coverage of confidence curves, validity of beliefs,
//! and an exhaustive oracle over every assertion of a small parameter window
//! of a discrete model.
//!
//! Simulated verdicts use three binomial standard errors. Replication r draws
//! from substream r of the seed, so reports do not depend on thread count.

use crate::confcurve::ConfidenceCurve;
use crate::engine::{belief, belief_exact_discrete, BeliefOptions, Method};
use crate::error::{ImError, Result};
use crate::fiducial::{fid_exact_discrete, matching_randomset};
use crate::model::{AuxDistribution, AuxSet, Model, TieRule};
use crate::point::Point;
use crate::randomset::{check_validity_condition, to_f64, NestedFamily};
use crate::rng::substream;
use crate::sets::{IntSet, ParamSet};
use crate::Prob;
use num_traits::Zero;
use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use std::collections::BTreeSet;

/// Largest window swept over all of its subsets.
pub const MAX_WINDOW: usize = 12;

/// Assertions drawn when a window is too large to sweep.
pub const SAMPLED_ASSERTIONS: usize = 1000;

fn ser_prob<S: Serializer>(p: &Prob, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// |p − α| ≤ 3 se.
    ExactMatch,
    /// p ≥ α − 3 se.
    ConservativeBound,
    /// p ≤ α + 3 se.
    ValidityBound,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverageReport {
    pub quantity: String,
    pub rule: Rule,
    pub alphas: Vec<f64>,
    pub empirical: Vec<f64>,
    pub se: Vec<f64>,
    /// Zero for enumerated reports.
    pub n_rep: usize,
    pub verdict: Vec<bool>,
    pub exact: bool,
}

impl CoverageReport {
    fn new(quantity: String, rule: Rule, alphas: &[f64], empirical: Vec<f64>, n_rep: usize, exact: bool) -> Self {
        let se: Vec<f64> = if exact {
            vec![0.0; empirical.len()]
        } else {
            empirical.iter().map(|p| (p * (1.0 - p) / n_rep as f64).sqrt()).collect()
        };
        let verdict = alphas
            .iter()
            .zip(&empirical)
            .zip(&se)
            .map(|((a, p), s)| match rule {
                Rule::ExactMatch => (p - a).abs() <= 3.0 * s,
                Rule::ConservativeBound => *p >= a - 3.0 * s,
                Rule::ValidityBound => *p <= a + 3.0 * s,
            })
            .collect();
        Self { quantity, rule, alphas: alphas.to_vec(), empirical, se, n_rep, verdict, exact }
    }

    pub fn passed(&self) -> bool {
        self.verdict.iter().all(|v| *v)
    }
}

/// Simulates Y at θ0, builds a curve per replication and records
/// P(cc_Y(θ0) < α). Exact curves are held to the exact-match rule,
/// conservative ones to the conservative bound.
pub fn cc_coverage_sim(
    model: &Model,
    theta0: &Point,
    builder: &(dyn Fn(&Point) -> Result<ConfidenceCurve> + Sync),
    n_rep: usize,
    alphas: &[f64],
    seed: u64,
) -> Result<CoverageReport> {
    let draws: Vec<(f64, bool)> = (0..n_rep)
        .into_par_iter()
        .map(|r| {
            let y = model.simulate_data(theta0, &mut substream(seed, r as u64));
            let cc = builder(&y)?;
            Ok((cc.evaluate(theta0.x()), cc.kind() == crate::confcurve::CurveKind::Exact))
        })
        .collect::<Result<_>>()?;
    let exact_curve = draws.iter().all(|(_, e)| *e);
    let empirical = alphas
        .iter()
        .map(|a| draws.iter().filter(|(c, _)| c < a).count() as f64 / n_rep as f64)
        .collect();
    let rule = if exact_curve { Rule::ExactMatch } else { Rule::ConservativeBound };
    Ok(CoverageReport::new(format!("P(cc_Y({theta0}) < alpha)"), rule, alphas, empirical, n_rep, false))
}

/// P_θ0(bel_Y(A) ≥ 1 − α) for an assertion A that excludes θ0.
pub fn belief_validity_sim(
    model: &Model,
    theta0: &Point,
    fam: &NestedFamily,
    a: &ParamSet,
    n_rep: usize,
    alphas: &[f64],
    seed: u64,
) -> Result<CoverageReport> {
    if a.contains(theta0) {
        return Err(ImError::ThetaInAssertion(format!("{theta0} lies in {a}")));
    }
    let opts = BeliefOptions { n_mc: 10_000, seed, method: Method::Auto };
    let bels: Vec<f64> = (0..n_rep)
        .into_par_iter()
        .map(|r| {
            let y = model.simulate_data(theta0, &mut substream(seed, r as u64));
            belief(model, &y, fam, a, &BeliefOptions { seed: seed ^ (r as u64).rotate_left(32), ..opts }).map(|b| b.belief)
        })
        .collect::<Result<_>>()?;
    let empirical = alphas
        .iter()
        .map(|a| bels.iter().filter(|b| **b >= 1.0 - a).count() as f64 / n_rep as f64)
        .collect();
    Ok(CoverageReport::new(format!("P(bel_Y({a}) >= 1 - alpha)"), Rule::ValidityBound, alphas, empirical, n_rep, false))
}

/// Exact P_θ0(bel_Y(A) ≥ 1 − α) for a discrete auxiliary, enumerating Y.
pub fn belief_validity_exact(
    model: &Model,
    theta0: &Point,
    fam: &NestedFamily,
    a: &ParamSet,
    alphas: &[f64],
) -> Result<CoverageReport> {
    if a.contains(theta0) {
        return Err(ImError::ThetaInAssertion(format!("{theta0} lies in {a}")));
    }
    let AuxDistribution::DiscreteUniform(n) = model.aux() else {
        return Err(ImError::InvalidArgument(format!("`{}` has a continuous auxiliary", model.name())));
    };
    let bels: Vec<Prob> = (0..n)
        .map(|k| {
            let y = model.generate(theta0, &Point::scalar(k as f64));
            belief_exact_discrete(model, &y, fam, a).map(|(b, _)| b)
        })
        .collect::<Result<_>>()?;
    let empirical = alphas
        .iter()
        .map(|&alpha| bels.iter().filter(|b| to_f64(**b) >= 1.0 - alpha).count() as f64 / n as f64)
        .collect();
    Ok(CoverageReport::new(format!("P(bel_Y({a}) >= 1 - alpha)"), Rule::ValidityBound, alphas, empirical, 0, true))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleRow {
    pub assertion: Vec<i64>,
    #[serde(serialize_with = "ser_prob")]
    pub bel: Prob,
    #[serde(serialize_with = "ser_prob")]
    pub pl: Prob,
    #[serde(serialize_with = "ser_prob")]
    pub fid: Prob,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleTable {
    pub model: String,
    pub y: f64,
    pub family: String,
    pub window: Vec<i64>,
    /// Whether rows are a random sample of the subsets.
    pub sampled: bool,
    pub rows: Vec<OracleRow>,
}

/// Exhaustive tables for a discrete model at data y.
#[derive(Clone, Debug)]
pub struct Oracle {
    pub model: Model,
    pub y: Point,
    pub families: Vec<NestedFamily>,
    pub tables: Vec<OracleTable>,
}

/// Every subset of the window, or [`SAMPLED_ASSERTIONS`] random ones when
/// `seed` is given and the window exceeds [`MAX_WINDOW`].
fn assertions(window: &[i64], seed: Option<u64>) -> Result<(Vec<BTreeSet<i64>>, bool)> {
    let k = window.len();
    if k <= MAX_WINDOW {
        let all = (0u32..1 << k)
            .map(|bits| (0..k).filter(|i| bits >> i & 1 == 1).map(|i| window[i]).collect())
            .collect();
        return Ok((all, false));
    }
    let Some(seed) = seed else {
        return Err(ImError::WindowTooLarge { size: k, limit: MAX_WINDOW });
    };
    let mut rng = substream(seed, 0);
    let mut out = Vec::with_capacity(SAMPLED_ASSERTIONS);
    for _ in 0..SAMPLED_ASSERTIONS {
        let size = rand::Rng::random_range(&mut rng, 0..=k);
        out.push(sample(&mut rng, k, size).into_iter().map(|i| window[i]).collect());
    }
    Ok((out, true))
}

/// The default window: every parameter some auxiliary value solves for.
pub fn support_window(model: &Model, y: &Point) -> Result<Vec<i64>> {
    let AuxDistribution::DiscreteUniform(n) = model.aux() else {
        return Err(ImError::InvalidArgument(format!("`{}` has a continuous auxiliary", model.name())));
    };
    let mut w = BTreeSet::new();
    for k in 0..n {
        if let ParamSet::Integer(IntSet::Finite(s)) = model.solve_theta(y, &Point::scalar(k as f64))? {
            w.extend(s);
        }
    }
    Ok(w.into_iter().collect())
}

pub fn build_oracle(model: &Model, y: &Point, fams: &[NestedFamily], window: &[i64]) -> Result<Oracle> {
    build(model, y, fams, window, None)
}

/// As [`build_oracle`], sampling assertions when the window is too large.
pub fn build_oracle_sampled(model: &Model, y: &Point, fams: &[NestedFamily], window: &[i64], seed: u64) -> Result<Oracle> {
    build(model, y, fams, window, Some(seed))
}

fn build(model: &Model, y: &Point, fams: &[NestedFamily], window: &[i64], seed: Option<u64>) -> Result<Oracle> {
    if !model.is_discrete() {
        return Err(ImError::InvalidArgument(format!("`{}` has a continuous auxiliary", model.name())));
    }
    let (sets, sampled) = assertions(window, seed)?;
    let fids: Vec<Prob> = sets
        .par_iter()
        .map(|s| fid_exact_discrete(model, y, &ParamSet::Integer(IntSet::Finite(s.clone())), &TieRule::Leftmost))
        .collect::<Result<_>>()?;
    let tables = fams
        .iter()
        .map(|fam| {
            let rows = sets
                .par_iter()
                .zip(&fids)
                .map(|(s, fid)| {
                    let a = ParamSet::Integer(IntSet::Finite(s.clone()));
                    let (bel, pl) = belief_exact_discrete(model, y, fam, &a)?;
                    Ok(OracleRow { assertion: s.iter().copied().collect(), bel, pl, fid: *fid })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(OracleTable {
                model: model.name(),
                y: y.x(),
                family: fam.name().to_string(),
                window: window.to_vec(),
                sampled,
                rows,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Oracle { model: model.clone(), y: *y, families: fams.to_vec(), tables })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremCheck {
    pub name: String,
    pub family: String,
    pub applicable: bool,
    pub note: String,
    pub checked: usize,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremReport {
    pub checks: Vec<TheoremCheck>,
}

impl TheoremReport {
    pub fn violations(&self) -> usize {
        self.checks.iter().filter(|c| c.applicable).map(|c| c.violations.len()).sum()
    }
}

fn row_label(row: &OracleRow) -> String {
    IntSet::finite(row.assertion.iter().copied()).to_string()
}

fn pairwise_intersecting(outcomes: &[(BTreeSet<i64>, Prob)]) -> bool {
    let live: Vec<&BTreeSet<i64>> = outcomes.iter().filter(|(_, p)| !p.is_zero()).map(|(s, _)| s).collect();
    live.iter().all(|a| live.iter().all(|b| !a.is_disjoint(b)))
}

/// Checks the oracle tables row by row:
/// the sandwich bel ≤ fid ≤ pl, dominance of each family by its canonical
/// nesting, bel > 0 ⇒ pl = 1 for intersecting realizations, duality
/// bel(A) + pl(Aᶜ) = 1, bel = fid for the matching family of each A, and
/// fid(A_α) = α at the attained levels of families with uniform γ(U★).
pub fn check_theorems(oracle: &Oracle) -> Result<TheoremReport> {
    let (model, y) = (&oracle.model, &oracle.y);
    let mut checks = Vec::new();
    let one = Prob::from_integer(1);
    for (fam, table) in oracle.families.iter().zip(&oracle.tables) {
        let outcomes = fam.outcomes().expect("discrete family");
        let images: Vec<(ParamSet, Prob)> = outcomes
            .iter()
            .map(|(s, p)| Ok((model.image(y, &AuxSet::Discrete(s.clone()))?, *p)))
            .collect::<Result<_>>()?;
        let never_empty = images.iter().all(|(i, p)| p.is_zero() || !i.is_empty().unwrap_or(true));

        let sandwich = table
            .rows
            .iter()
            .filter(|r| !(r.bel <= r.fid && r.fid <= r.pl))
            .map(|r| format!("{}: bel {} fid {} pl {}", row_label(r), r.bel, r.fid, r.pl))
            .collect();
        checks.push(TheoremCheck {
            name: "sandwich".into(),
            family: fam.name().into(),
            applicable: true,
            note: String::new(),
            checked: table.rows.len(),
            violations: sandwich,
        });

        // dominance by the canonical nesting with the same γ
        let nested = fam.canonical();
        let nested_empty = nested
            .outcomes()
            .expect("discrete family")
            .iter()
            .any(|(s, p)| !p.is_zero() && model.image(y, &AuxSet::Discrete(s.clone())).map(|i| i.is_empty().unwrap_or(true)).unwrap_or(true));
        let mut dominance = Vec::new();
        for r in &table.rows {
            let a = ParamSet::Integer(IntSet::finite(r.assertion.iter().copied()));
            let (bel_nested, _) = belief_exact_discrete(model, y, &nested, &a)?;
            if r.bel > bel_nested {
                dominance.push(format!("{}: bel {} > nested bel {}", row_label(r), r.bel, bel_nested));
            }
        }
        checks.push(TheoremCheck {
            name: "nesting-dominance".into(),
            family: fam.name().into(),
            applicable: !nested_empty,
            note: if nested_empty {
                "canonical nesting has empty realizations; dominance is not implied and rows are informational".into()
            } else {
                String::new()
            },
            checked: table.rows.len(),
            violations: dominance,
        });

        let intersecting = pairwise_intersecting(&outcomes);
        let gap = table
            .rows
            .iter()
            .filter(|r| r.bel > Prob::zero() && r.pl != one)
            .map(|r| format!("{}: bel {} pl {}", row_label(r), r.bel, r.pl))
            .collect();
        checks.push(TheoremCheck {
            name: "belief-plausibility-gap".into(),
            family: fam.name().into(),
            applicable: intersecting,
            note: if intersecting { String::new() } else { "some realizations are disjoint".into() },
            checked: table.rows.len(),
            violations: gap,
        });

        // duality needs the window to hold every Θ_y(u)
        let window: BTreeSet<i64> = table.window.iter().copied().collect();
        let covered = images.iter().all(|(i, _)| match i {
            ParamSet::Integer(IntSet::Finite(s)) => s.is_subset(&window),
            _ => false,
        });
        let mut duality = Vec::new();
        if covered && !table.sampled {
            let by_set: std::collections::BTreeMap<&[i64], &OracleRow> =
                table.rows.iter().map(|r| (r.assertion.as_slice(), r)).collect();
            for r in &table.rows {
                let comp: Vec<i64> = window.iter().filter(|k| !r.assertion.contains(k)).copied().collect();
                if let Some(c) = by_set.get(comp.as_slice()) {
                    if r.bel + c.pl != one {
                        duality.push(format!("{}: bel {} + pl(complement) {}", row_label(r), r.bel, c.pl));
                    }
                }
            }
        }
        checks.push(TheoremCheck {
            name: "duality".into(),
            family: fam.name().into(),
            applicable: covered && !table.sampled,
            note: if covered { String::new() } else { "window misses some Θ_y(u)".into() },
            checked: table.rows.len(),
            violations: duality,
        });

        // fid(A_α) = α where γ(U★) is uniform
        let uniform = fam.is_canonical() && fam.has_uniform_law() && never_empty;
        let mut exactness = Vec::new();
        let mut levels: Vec<Prob> = fam.gamma_table().unwrap().iter().filter(|g| **g < one).map(|g| one - g).collect();
        levels.push(one);
        levels.sort();
        levels.dedup();
        if uniform {
            for &alpha in &levels {
                let s = fam.level_set_exact(alpha).unwrap();
                let a_alpha = model.image(y, &AuxSet::Discrete(s))?;
                let fid = fid_exact_discrete(model, y, &a_alpha, &TieRule::Leftmost)?;
                if fid != alpha {
                    exactness.push(format!("alpha {alpha}: fid(A_alpha) = {fid}"));
                }
            }
        }
        checks.push(TheoremCheck {
            name: "principle-assertion-exactness".into(),
            family: fam.name().into(),
            applicable: uniform,
            note: if uniform { String::new() } else { "γ(U★) is not uniform".into() },
            checked: if uniform { levels.len() } else { 0 },
            violations: exactness,
        });
    }

    // the matching family attains fid for every assertion
    if let Some(table) = oracle.tables.first() {
        let AuxDistribution::DiscreteUniform(n) = model.aux() else { unreachable!() };
        let alphas: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
        let violations: Vec<String> = table
            .rows
            .par_iter()
            .map(|r| -> Result<Option<String>> {
                let a = ParamSet::Integer(IntSet::finite(r.assertion.iter().copied()));
                let fam = matching_randomset(model, y, &a)?;
                let (bel, _) = belief_exact_discrete(model, y, &fam, &a)?;
                let valid = check_validity_condition(&fam, &model.aux(), 0, &alphas, 0).valid();
                Ok((bel != r.fid || !valid).then(|| format!("{}: bel {} fid {} valid {valid}", row_label(r), bel, r.fid)))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        checks.push(TheoremCheck {
            name: "matching-attains-fid".into(),
            family: "matching".into(),
            applicable: true,
            note: String::new(),
            checked: table.rows.len(),
            violations,
        });
    }
    Ok(TheoremReport { checks })
}
