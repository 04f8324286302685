//! Belief and plausibility of assertions about θ.
//!
//! bel_y(A) = P(Θ_y(𝒮) ⊆ A | Θ_y(𝒮) ≠ ∅) and pl_y(A) = 1 − bel_y(Aᶜ).
//!
//! Exact path: discrete auxiliaries are enumerated in rationals. Canonical
//! nested families on the unit interval use P(S_{U*} ⊆ W) = 1 − sup_{u∉W} γ(u)
//! with W = {u : Θ_y(u) ⊆ A}, which needs the model's exact preimages.
//! Everything else is Monte Carlo with standard errors.

use crate::error::{ImError, Result};
use crate::model::{AuxDistribution, AuxSet, Model};
use crate::point::Point;
use crate::randomset::{to_f64, NestedFamily};
use crate::rng::substream;
use crate::sets::{IntSet, Interval, IntervalUnion, ParamSet};
use crate::Prob;
use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Draws per Monte Carlo block; block b uses substream b of the seed.
pub const BLOCK: usize = 4096;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    Auto,
    Exact,
    MonteCarlo,
}

impl std::str::FromStr for Method {
    type Err = ImError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Method::Auto),
            "exact" => Ok(Method::Exact),
            "monte-carlo" | "mc" => Ok(Method::MonteCarlo),
            _ => Err(ImError::Parse(format!("unknown method `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodUsed {
    Exact,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeliefOptions {
    pub n_mc: usize,
    pub seed: u64,
    pub method: Method,
}

impl Default for BeliefOptions {
    fn default() -> Self {
        Self { n_mc: 100_000, seed: 0, method: Method::Auto }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BeliefReport {
    pub belief: f64,
    pub plausibility: f64,
    /// Zero on the exact path.
    pub se_belief: f64,
    pub se_plausibility: f64,
    /// Discarded realizations with Θ_y(S) = ∅.
    pub n_empty: u64,
    pub n_draws: u64,
    pub method: MethodUsed,
    /// Rational values when the auxiliary is discrete.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<(String, String)>,
}

/// Draws S and returns Θ_y(S).
pub fn realize_theta_set<R: Rng + ?Sized>(model: &Model, y: &Point, fam: &NestedFamily, rng: &mut R) -> Result<ParamSet> {
    model.image(y, &fam.draw(rng))
}

/// Θ_y(S) for a given realization S.
pub fn theta_set(model: &Model, y: &Point, s: &AuxSet) -> Result<ParamSet> {
    model.image(y, s)
}

/// A_{α,y} = Θ_y(S_α).
pub fn principle_assertion(model: &Model, y: &Point, fam: &NestedFamily, alpha: f64) -> Result<ParamSet> {
    model.image(y, &fam.principle_nested_set(alpha))
}

fn check_pairing(model: &Model, fam: &NestedFamily) -> Result<()> {
    match (model.aux(), fam.support_size()) {
        (AuxDistribution::DiscreteUniform(n), Some(k)) if n as usize == k => Ok(()),
        (AuxDistribution::Uniform01, None) => Ok(()),
        (aux, _) => Err(ImError::InvalidArgument(format!(
            "random set `{}` does not live on the auxiliary space of `{}` ({aux:?})",
            fam.name(),
            model.name()
        ))),
    }
}

pub fn belief(model: &Model, y: &Point, fam: &NestedFamily, a: &ParamSet, opts: &BeliefOptions) -> Result<BeliefReport> {
    check_pairing(model, fam)?;
    match opts.method {
        Method::Exact => belief_exact(model, y, fam, a),
        Method::MonteCarlo => belief_monte_carlo(model, y, fam, a, opts),
        Method::Auto => match belief_exact(model, y, fam, a) {
            Err(ImError::Unsupported(_)) => belief_monte_carlo(model, y, fam, a, opts),
            other => other,
        },
    }
}

/// Exact rational belief and plausibility for a discrete auxiliary.
pub fn belief_exact_discrete(model: &Model, y: &Point, fam: &NestedFamily, a: &ParamSet) -> Result<(Prob, Prob)> {
    let outcomes = fam
        .outcomes()
        .ok_or_else(|| ImError::Unsupported(format!("exact enumeration of `{}`", fam.name())))?;
    let (mut empty, mut inside, mut hits) = (Prob::zero(), Prob::zero(), Prob::zero());
    for (s, p) in outcomes {
        let img = model.image(y, &AuxSet::Discrete(s))?;
        if img.is_empty()? {
            empty += p;
            continue;
        }
        if img.is_subset(a)? {
            inside += p;
        }
        if !img.is_disjoint(a)? {
            hits += p;
        }
    }
    let keep = Prob::from_integer(1) - empty;
    if keep.is_zero() {
        return Err(ImError::AllRealizationsEmpty);
    }
    Ok((inside / keep, hits / keep))
}

fn belief_exact(model: &Model, y: &Point, fam: &NestedFamily, a: &ParamSet) -> Result<BeliefReport> {
    if fam.is_discrete() {
        let (bel, pl) = belief_exact_discrete(model, y, fam, a)?;
        return Ok(BeliefReport {
            belief: to_f64(bel),
            plausibility: to_f64(pl),
            se_belief: 0.0,
            se_plausibility: 0.0,
            n_empty: 0,
            n_draws: 0,
            method: MethodUsed::Exact,
            exact: Some((bel.to_string(), pl.to_string())),
        });
    }
    if !fam.is_canonical() {
        return Err(ImError::Unsupported(format!("exact belief for the non-nested family `{}`", fam.name())));
    }
    let bel = belief_nested_continuous(model, y, fam, a)?;
    let pl = 1.0 - belief_nested_continuous(model, y, fam, &a.complement())?;
    Ok(BeliefReport {
        belief: bel,
        plausibility: pl,
        se_belief: 0.0,
        se_plausibility: 0.0,
        n_empty: 0,
        n_draws: 0,
        method: MethodUsed::Exact,
        exact: None,
    })
}

fn belief_nested_continuous(model: &Model, y: &Point, fam: &NestedFamily, a: &ParamSet) -> Result<f64> {
    let covered = |set: &ParamSet| -> Result<f64> {
        match model.preimage(y, set)? {
            AuxSet::Continuous(w) => Ok(1.0 - fam.sup_gamma_outside(&w)),
            AuxSet::Discrete(_) => Err(ImError::InvalidArgument("discrete preimage for a continuous family".into())),
        }
    };
    let empty = covered(&ParamSet::empty_in(&model.param_space()))?;
    if empty >= 1.0 {
        return Err(ImError::AllRealizationsEmpty);
    }
    Ok(((covered(a)? - empty) / (1.0 - empty)).clamp(0.0, 1.0))
}

#[derive(Clone, Copy, Default)]
struct Tally {
    draws: u64,
    empty: u64,
    inside: u64,
    hits: u64,
}

fn belief_monte_carlo(model: &Model, y: &Point, fam: &NestedFamily, a: &ParamSet, opts: &BeliefOptions) -> Result<BeliefReport> {
    let blocks = opts.n_mc.div_ceil(BLOCK);
    let tally = (0..blocks)
        .into_par_iter()
        .map(|b| -> Result<Tally> {
            let mut rng = substream(opts.seed, b as u64);
            let mut t = Tally::default();
            let n = BLOCK.min(opts.n_mc - b * BLOCK);
            for _ in 0..n {
                let img = realize_theta_set(model, y, fam, &mut rng)?;
                t.draws += 1;
                if img.is_empty()? {
                    t.empty += 1;
                    continue;
                }
                t.inside += img.is_subset(a)? as u64;
                t.hits += !img.is_disjoint(a)? as u64;
            }
            Ok(t)
        })
        .try_reduce(Tally::default, |x, y| {
            Ok(Tally {
                draws: x.draws + y.draws,
                empty: x.empty + y.empty,
                inside: x.inside + y.inside,
                hits: x.hits + y.hits,
            })
        })?;
    let kept = tally.draws - tally.empty;
    if kept == 0 {
        return Err(ImError::AllRealizationsEmpty);
    }
    let n = kept as f64;
    let bel = tally.inside as f64 / n;
    let pl = tally.hits as f64 / n;
    Ok(BeliefReport {
        belief: bel,
        plausibility: pl,
        se_belief: (bel * (1.0 - bel) / n).sqrt(),
        se_plausibility: (pl * (1.0 - pl) / n).sqrt(),
        n_empty: tally.empty,
        n_draws: tally.draws,
        method: MethodUsed::MonteCarlo,
        exact: None,
    })
}

/// sup{α : A_{α,y} ⊆ A}, by bisection on α to 1e-12 for continuous
/// families and over the attained levels for discrete ones.
pub fn belief_via_principle(model: &Model, y: &Point, fam: &NestedFamily, a: &ParamSet) -> Result<f64> {
    if fam.is_discrete() {
        return belief_via_principle_exact(model, y, fam, a).map(to_f64);
    }
    let fits = |alpha: f64| -> Result<bool> { model.image(y, &fam.level_set(alpha))?.is_subset(a) };
    if fits(1.0)? {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if fits(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Exact form of [`belief_via_principle`] for discrete families. S_α only
/// changes at α = 1 − γ_k, so the supremum is one of those levels or 1.
pub fn belief_via_principle_exact(model: &Model, y: &Point, fam: &NestedFamily, a: &ParamSet) -> Result<Prob> {
    let table = fam
        .gamma_table()
        .ok_or_else(|| ImError::InvalidArgument(format!("`{}` is not discrete", fam.name())))?;
    let one = Prob::from_integer(1);
    let mut levels: Vec<Prob> = table.iter().map(|g| one - g).chain([one]).collect();
    levels.sort();
    levels.dedup();
    let mut best = Prob::zero();
    for alpha in levels {
        let s = fam.level_set_exact(alpha).expect("discrete family");
        if model.image(y, &AuxSet::Discrete(s))?.is_subset(a)? {
            best = best.max(alpha);
        }
    }
    Ok(best)
}

/// pl_y({θ}) for θ on a grid.
pub fn point_plausibility_curve(model: &Model, y: &Point, fam: &NestedFamily, grid: &[f64], opts: &BeliefOptions) -> Result<Vec<f64>> {
    check_pairing(model, fam)?;
    let singleton = |t: f64| match model.param_space() {
        crate::sets::ParamSpace::Integer if t.fract() == 0.0 => ParamSet::Integer(IntSet::finite([t as i64])),
        crate::sets::ParamSpace::Integer => ParamSet::Integer(IntSet::empty()),
        _ => ParamSet::Real(Interval::point(t).into()),
    };
    let exact_ok = opts.method != Method::MonteCarlo && (fam.is_discrete() || fam.is_canonical());
    if exact_ok {
        let first = grid.first().map(|&t| belief(model, y, fam, &singleton(t), &BeliefOptions { method: Method::Exact, ..*opts }));
        match first {
            Some(Err(ImError::Unsupported(_))) if opts.method == Method::Auto => {}
            _ => {
                return grid
                    .par_iter()
                    .map(|&t| belief(model, y, fam, &singleton(t), &BeliefOptions { method: Method::Exact, ..*opts }).map(|r| r.plausibility))
                    .collect();
            }
        }
    } else if opts.method == Method::Exact {
        return Err(ImError::Unsupported(format!("exact plausibility for `{}`", fam.name())));
    }
    // one shared batch of realizations serves every grid point
    let blocks = opts.n_mc.div_ceil(BLOCK);
    let sets: Vec<ParamSet> = (0..blocks)
        .into_par_iter()
        .map(|b| -> Result<Vec<ParamSet>> {
            let mut rng = substream(opts.seed, b as u64);
            let n = BLOCK.min(opts.n_mc - b * BLOCK);
            let mut out = Vec::with_capacity(n);
            for _ in 0..n {
                let img = realize_theta_set(model, y, fam, &mut rng)?;
                if !img.is_empty()? {
                    out.push(img);
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    if sets.is_empty() {
        return Err(ImError::AllRealizationsEmpty);
    }
    Ok(grid
        .par_iter()
        .map(|&t| {
            let p = Point::scalar(t);
            sets.iter().filter(|s| s.contains(&p)).count() as f64 / sets.len() as f64
        })
        .collect())
}

/// The exact-belief preimage W = {u : Θ_y(u) ⊆ A} of a real assertion.
pub fn assertion_preimage(model: &Model, y: &Point, a: &ParamSet) -> Result<IntervalUnion> {
    match model.preimage(y, a)? {
        AuxSet::Continuous(w) => Ok(w),
        AuxSet::Discrete(s) => Ok(IntervalUnion::new(s.iter().map(|&k| Interval::point(k as f64)))),
    }
}

/// Realizations of a discrete family mapped to Θ_y(S), with probabilities.
pub fn theta_outcomes(model: &Model, y: &Point, fam: &NestedFamily) -> Result<Vec<(BTreeSet<i64>, ParamSet, Prob)>> {
    let outs = fam
        .outcomes()
        .ok_or_else(|| ImError::InvalidArgument(format!("`{}` is not discrete", fam.name())))?;
    outs.into_iter()
        .map(|(s, p)| Ok((s.clone(), model.image(y, &AuxSet::Discrete(s))?, p)))
        .collect()
}
