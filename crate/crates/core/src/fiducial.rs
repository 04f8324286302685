//! Generalized fiducial distribution by ε-truncated rejection sampling.
//!
//! A proposal U★ is accepted when the pseudo-solution Q_y(U★) leaves a
//! residual of norm at most ε; the accepted Q_y(U★) are the fiducial draws.
//! Residuals below [`EXACT_TOL`] count as exact solutions, so ε = 0 samples
//! the fiducial distribution itself whenever the association is solvable.

use crate::engine::BLOCK;
use crate::error::{ImError, Result};
use crate::model::{AuxDistribution, Model, Norm, TieRule};
use crate::point::Point;
use crate::randomset::{to_f64, NestedFamily};
use crate::rng::substream;
use crate::sets::ParamSet;
use crate::Prob;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

/// Residual norm treated as zero.
pub const EXACT_TOL: f64 = 1e-9;

/// Acceptance rate below which sampling gives up.
pub const DEFAULT_FLOOR: f64 = 1e-4;

/// Blocks in the first sampling round; later rounds adapt to the rate.
const FIRST_ROUND_BLOCKS: usize = 16;

#[derive(Clone, Debug)]
pub struct FiducialOptions {
    pub n: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub norm: Norm,
    pub tie: TieRule,
    pub floor: f64,
}

impl FiducialOptions {
    pub fn new(n: usize, epsilon: f64, seed: u64) -> Self {
        Self { n, epsilon, seed, norm: Norm::L2, tie: TieRule::Leftmost, floor: DEFAULT_FLOOR }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiducialSample {
    pub draws: Vec<Point>,
    pub epsilon: f64,
    pub acceptance_rate: f64,
    pub proposals: u64,
    pub tie_rule: String,
    pub norm: Norm,
    pub seed: u64,
}

impl FiducialSample {
    /// Fraction of draws in `a` with its binomial standard error.
    pub fn probability(&self, a: &ParamSet) -> (f64, f64) {
        let n = self.draws.len() as f64;
        let p = self.draws.iter().filter(|t| a.contains(t)).count() as f64 / n;
        (p, (p * (1.0 - p) / n).sqrt())
    }
}

fn check_options(opts: &FiducialOptions) -> Result<()> {
    if opts.n == 0 {
        return Err(ImError::InvalidArgument("fiducial sample size must be at least 1".into()));
    }
    if opts.epsilon.is_nan() || opts.epsilon < 0.0 {
        return Err(ImError::InvalidArgument(format!("epsilon must be non-negative, got {}", opts.epsilon)));
    }
    Ok(())
}

/// Q_y(u) when its residual is within ε, `None` when the proposal is rejected.
pub fn accept(model: &Model, y: &Point, u: &Point, epsilon: f64, norm: Norm, tie: &TieRule) -> Result<Option<Point>> {
    let q = match model.pseudo_solve(y, u, norm, tie) {
        Ok(q) => q,
        Err(ImError::NoConvergence(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let r = norm.apply(&model.residual(y, &q, u));
    Ok((r <= epsilon.max(EXACT_TOL)).then_some(q))
}

pub fn sample_gfd(model: &Model, y: &Point, opts: &FiducialOptions) -> Result<FiducialSample> {
    check_options(opts)?;
    let mut draws = Vec::with_capacity(opts.n);
    let (mut proposals, mut accepted) = (0u64, 0u64);
    let mut next_block = 0usize;
    let mut round = FIRST_ROUND_BLOCKS.max(opts.n.div_ceil(BLOCK));
    while draws.len() < opts.n {
        let blocks: Vec<Vec<Point>> = (next_block..next_block + round)
            .into_par_iter()
            .map(|b| -> Result<Vec<Point>> {
                let mut rng = substream(opts.seed, b as u64);
                let mut out = Vec::new();
                for _ in 0..BLOCK {
                    let u = model.draw_aux(&mut rng);
                    if let Some(q) = accept(model, y, &u, opts.epsilon, opts.norm, &opts.tie)? {
                        out.push(q);
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        next_block += round;
        proposals += (round * BLOCK) as u64;
        for b in blocks {
            accepted += b.len() as u64;
            draws.extend(b);
        }
        let rate = accepted as f64 / proposals as f64;
        if rate < opts.floor {
            return Err(ImError::AcceptanceTooLow { rate, floor: opts.floor });
        }
        // enough blocks to finish at the observed rate, with margin
        let missing = opts.n.saturating_sub(draws.len()) as f64;
        round = ((missing / rate * 1.1) / BLOCK as f64).ceil().max(1.0) as usize;
    }
    draws.truncate(opts.n);
    Ok(FiducialSample {
        draws,
        epsilon: opts.epsilon,
        acceptance_rate: accepted as f64 / proposals as f64,
        proposals,
        tie_rule: opts.tie.id(),
        norm: opts.norm,
        seed: opts.seed,
    })
}

/// The fiducial distribution of a discrete-auxiliary model: the law of
/// Q_y(U★) given acceptance, as atoms with exact probabilities.
pub fn gfd_exact_discrete(model: &Model, y: &Point, epsilon: f64, norm: Norm, tie: &TieRule) -> Result<Vec<(Point, Prob)>> {
    let AuxDistribution::DiscreteUniform(n) = model.aux() else {
        return Err(ImError::InvalidArgument(format!("`{}` has a continuous auxiliary", model.name())));
    };
    let hits: Vec<Point> = (0..n)
        .map(|k| accept(model, y, &Point::scalar(k as f64), epsilon, norm, tie))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    if hits.is_empty() {
        return Err(ImError::AcceptanceTooLow { rate: 0.0, floor: 0.0 });
    }
    let w = Prob::new(1, hits.len() as i128);
    let mut atoms: Vec<(Point, Prob)> = Vec::new();
    for q in hits {
        match atoms.iter_mut().find(|(p, _)| *p == q) {
            Some((_, m)) => *m += w,
            None => atoms.push((q, w)),
        }
    }
    atoms.sort_by(|a, b| a.0.x().total_cmp(&b.0.x()));
    Ok(atoms)
}

/// Exact fid_y(A) for a discrete auxiliary at ε = 0.
pub fn fid_exact_discrete(model: &Model, y: &Point, a: &ParamSet, tie: &TieRule) -> Result<Prob> {
    Ok(gfd_exact_discrete(model, y, 0.0, Norm::L2, tie)?
        .into_iter()
        .filter(|(t, _)| a.contains(t))
        .map(|(_, p)| p)
        .sum())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FidEstimate {
    pub probability: f64,
    pub se: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    pub acceptance_rate: f64,
}

/// fid_y(A): exact enumeration for discrete auxiliaries, the fraction of
/// sampled draws in A otherwise.
pub fn fid_probability(model: &Model, y: &Point, a: &ParamSet, opts: &FiducialOptions) -> Result<FidEstimate> {
    check_options(opts)?;
    if model.is_discrete() {
        let atoms = gfd_exact_discrete(model, y, opts.epsilon, opts.norm, &opts.tie)?;
        let p: Prob = atoms.iter().filter(|(t, _)| a.contains(t)).map(|(_, p)| *p).sum();
        let AuxDistribution::DiscreteUniform(n) = model.aux() else { unreachable!() };
        let accepted = (0..n)
            .map(|k| accept(model, y, &Point::scalar(k as f64), opts.epsilon, opts.norm, &opts.tie))
            .filter(|r| matches!(r, Ok(Some(_))))
            .count();
        return Ok(FidEstimate {
            probability: to_f64(p),
            se: 0.0,
            exact: Some(p.to_string()),
            acceptance_rate: accepted as f64 / n as f64,
        });
    }
    let s = sample_gfd(model, y, opts)?;
    let (p, se) = s.probability(a);
    Ok(FidEstimate { probability: p, se, exact: None, acceptance_rate: s.acceptance_rate })
}

/// A nested random set whose belief of `a` at `y` equals fid_y(A).
///
/// Solvable auxiliary points with Θ_y(u) ⊆ A are ranked first and the rest
/// after them; rank r of M solvable points gets γ = 1 − (r−1)/M. Points
/// without solutions get γ = 1: they are always drawn and contribute nothing
/// to Θ_y(S). The family satisfies the validity condition, and for models
/// with single-valued solutions bel_y(A) = |{u : Θ_y(u) ⊆ A}|/M = fid_y(A).
pub fn matching_randomset(model: &Model, y: &Point, a: &ParamSet) -> Result<NestedFamily> {
    let AuxDistribution::DiscreteUniform(n) = model.aux() else {
        return Err(ImError::InvalidArgument(format!(
            "matching random sets need a finite auxiliary space; `{}` is continuous",
            model.name()
        )));
    };
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    let mut unsolvable = Vec::new();
    for k in 0..n as i64 {
        let theta = model.solve_theta(y, &Point::scalar(k as f64))?;
        if theta.is_empty()? {
            unsolvable.push(k);
        } else if theta.is_subset(a)? {
            inside.push(k);
        } else {
            outside.push(k);
        }
    }
    let m = (inside.len() + outside.len()) as i128;
    let mut table = vec![Prob::zero(); n as usize];
    for (r, &k) in inside.iter().chain(&outside).enumerate() {
        table[k as usize] = Prob::new(m - r as i128, m.max(1));
    }
    for k in unsolvable {
        table[k as usize] = Prob::from_integer(1);
    }
    NestedFamily::from_table(&format!("matching:{}", a), table)
}
