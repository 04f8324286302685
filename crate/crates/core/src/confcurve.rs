//! Confidence curves θ ↦ cc_y(θ) ∈ [0, 1] whose sublevel sets
//! {θ : cc_y(θ) ≤ α} are α-level confidence sets.
//!
//! A curve keeps an evaluator together with its values on a sorted grid.
//! Level sets come from the grid with crossings refined by bisection on the
//! evaluator and outward doubling past the grid ends; evaluators must accept
//! ±∞ and return the limits there.

use crate::error::{ImError, Result};
use crate::fiducial::{gfd_exact_discrete, sample_gfd, FiducialOptions};
use crate::model::{Association, AuxDistribution, AuxSet, Model, Norm, TieRule};
use crate::normal;
use crate::point::Point;
use crate::randomset::{builtin_randomset, to_f64, NestedFamily};
use crate::sets::{IntSet, Interval, IntervalUnion, ParamSet, ParamSpace};
use crate::Prob;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Points in the default evaluation grid.
pub const DEFAULT_GRID: usize = 2001;

/// Farthest distance searched past the grid for a level crossing.
const SEARCH_LIMIT: f64 = 1e12;

type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type ExactEval = Arc<dyn Fn(f64) -> Prob + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    Exact,
    Conservative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Cd,
    Im,
    FiducialRecalibrated,
    Fieller,
}

/// Whether the curve lives on the real line or on the integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    Real,
    Integer,
}

#[derive(Clone)]
pub struct ConfidenceCurve {
    grid: Vec<f64>,
    values: Vec<f64>,
    eval: Eval,
    exact: Option<ExactEval>,
    kind: CurveKind,
    provenance: Provenance,
    domain: Domain,
}

impl fmt::Debug for ConfidenceCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ConfidenceCurve({:?}, {:?}, {:?}, {} grid points)",
            self.provenance,
            self.kind,
            self.domain,
            self.grid.len()
        )
    }
}

/// `n` evenly spaced points from `lo` to `hi`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

impl ConfidenceCurve {
    pub fn new(
        grid: Vec<f64>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        kind: CurveKind,
        provenance: Provenance,
    ) -> Result<Self> {
        Self::build(grid, Arc::new(eval), None, kind, provenance, Domain::Real)
    }

    fn build(
        mut grid: Vec<f64>,
        eval: Eval,
        exact: Option<ExactEval>,
        kind: CurveKind,
        provenance: Provenance,
        domain: Domain,
    ) -> Result<Self> {
        if grid.iter().any(|x| !x.is_finite()) {
            return Err(ImError::InvalidArgument("curve grids must be finite".into()));
        }
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        if grid.is_empty() {
            return Err(ImError::InvalidArgument("curve grid is empty".into()));
        }
        let values = grid.par_iter().map(|&t| eval(t).clamp(0.0, 1.0)).collect();
        Ok(Self { grid, values, eval, exact, kind, provenance, domain })
    }

    pub fn evaluate(&self, theta: f64) -> f64 {
        (self.eval)(theta).clamp(0.0, 1.0)
    }

    /// Exact rational value, for curves of discrete models.
    pub fn exact_at(&self, theta: f64) -> Option<Prob> {
        self.exact.as_ref().map(|f| f(theta))
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// First grid point with the smallest value.
    pub fn minimizer(&self) -> f64 {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v < self.values[best] {
                best = i;
            }
        }
        self.grid[best]
    }

    /// {θ : cc(θ) ≤ α}, or {θ : cc(θ) < α} when `strict`.
    pub fn sublevel(&self, alpha: f64, strict: bool) -> Result<ParamSet> {
        let ok = move |v: f64| if strict { v < alpha } else { v <= alpha };
        if self.domain == Domain::Integer {
            let ks = self.grid.iter().zip(&self.values).filter(|(_, v)| ok(**v)).map(|(t, _)| *t as i64);
            return Ok(ParamSet::Integer(IntSet::finite(ks)));
        }
        let g = &self.grid;
        let n = g.len();
        let status: Vec<bool> = self.values.iter().map(|v| ok(*v)).collect();
        let mut parts = Vec::new();
        let mut i = 0;
        while i < n {
            if !status[i] {
                i += 1;
                continue;
            }
            let mut j = i;
            while j + 1 < n && status[j + 1] {
                j += 1;
            }
            let lo = if i == 0 { self.outward(g[0], -1.0, &ok)? } else { Some(self.crossing(g[i - 1], g[i], &ok)) };
            let hi = if j == n - 1 { self.outward(g[n - 1], 1.0, &ok)? } else { Some(self.crossing(g[j + 1], g[j], &ok)) };
            let (lo, lo_closed) = lo.map_or((f64::NEG_INFINITY, false), |x| (x, !strict));
            let (hi, hi_closed) = hi.map_or((f64::INFINITY, false), |x| (x, !strict));
            parts.push(Interval::new(lo, hi, lo_closed, hi_closed));
            i = j + 1;
        }
        // dips between grid points, e.g. a minimizer off the grid at α = 0
        for k in 1..n.saturating_sub(1) {
            let v = self.values[k];
            if !status[k] && v <= self.values[k - 1] && v <= self.values[k + 1] {
                let (m, fm) = golden_min(|t| self.evaluate(t), g[k - 1], g[k + 1]);
                if ok(fm) {
                    let lo = self.crossing(g[k - 1], m, &ok);
                    let hi = self.crossing(g[k + 1], m, &ok);
                    parts.push(Interval::new(lo, hi, !strict, !strict));
                }
            }
        }
        Ok(ParamSet::Real(IntervalUnion::new(parts)))
    }

    /// The boundary between `bad` (outside the level set) and `good`.
    fn crossing(&self, bad: f64, good: f64, ok: &impl Fn(f64) -> bool) -> f64 {
        let (mut b, mut g) = (bad, good);
        for _ in 0..200 {
            let mid = 0.5 * (b + g);
            if mid == b || mid == g {
                break;
            }
            if ok(self.evaluate(mid)) {
                g = mid;
            } else {
                b = mid;
            }
        }
        g
    }

    /// Searches past a grid end for the edge of the level set; `None` when
    /// the set is unbounded on that side.
    fn outward(&self, from: f64, dir: f64, ok: &impl Fn(f64) -> bool) -> Result<Option<f64>> {
        let span = (self.grid[self.grid.len() - 1] - self.grid[0]).max(1.0);
        let (mut prev, mut d) = (from, span);
        while d <= SEARCH_LIMIT {
            let x = from + dir * d;
            if !ok(self.evaluate(x)) {
                return Ok(Some(self.crossing(x, prev, ok)));
            }
            prev = x;
            d *= 2.0;
        }
        if ok(self.evaluate(dir * f64::INFINITY)) {
            Ok(None)
        } else {
            Err(ImError::GridTooCoarse(format!(
                "no level crossing found within {SEARCH_LIMIT:e} of the grid end {from}"
            )))
        }
    }

    /// The α-level confidence set {θ : cc(θ) ≤ α}.
    pub fn confidence_set(&self, alpha: f64) -> Result<ParamSet> {
        self.sublevel(alpha, false)
    }

    /// inf{cc(θ) : θ ∈ A}, 1 for empty A.
    pub fn inf_over(&self, a: &ParamSet) -> Result<f64> {
        self.extremum(a, true)
    }

    /// sup{cc(θ) : θ ∈ A}, 0 for empty A.
    pub fn sup_over(&self, a: &ParamSet) -> Result<f64> {
        self.extremum(a, false)
    }

    fn extremum(&self, a: &ParamSet, min: bool) -> Result<f64> {
        let pick = |x: f64, y: f64| if min { x.min(y) } else { x.max(y) };
        let start = if min { 1.0 } else { 0.0 };
        match (a, self.domain) {
            (ParamSet::Real(u), Domain::Real) => {
                Ok(u.parts().iter().map(|i| self.extremum_on(i, min)).fold(start, pick))
            }
            (ParamSet::Integer(IntSet::Finite(ks)), Domain::Integer) => {
                Ok(ks.iter().map(|&k| self.evaluate(k as f64)).fold(start, pick))
            }
            (ParamSet::Integer(s @ IntSet::Cofinite(_)), Domain::Integer) => {
                let on_grid = self.grid.iter().filter(|t| s.contains(**t as i64)).map(|&t| self.evaluate(t));
                let tails = [self.evaluate(f64::NEG_INFINITY), self.evaluate(f64::INFINITY)];
                Ok(on_grid.chain(tails).fold(start, pick))
            }
            (other, _) => Err(ImError::InvalidArgument(format!(
                "assertion `{other}` does not match a {:?} curve",
                self.domain
            ))),
        }
    }

    fn extremum_on(&self, i: &Interval, min: bool) -> f64 {
        let sign = if min { 1.0 } else { -1.0 };
        let f = |t: f64| sign * self.evaluate(t);
        let mut best = f64::INFINITY;
        // endpoints stand for their limits, so open ends count as well
        for e in [i.lo, i.hi] {
            best = best.min(f(e));
        }
        let g = &self.grid;
        let start = g.partition_point(|t| *t < i.lo);
        let stop = g.partition_point(|t| *t <= i.hi);
        let stored = |k: usize| sign * self.values[k];
        let bracket = match (start..stop).filter(|&k| i.contains(g[k])).min_by(|&a, &b| stored(a).total_cmp(&stored(b))) {
            Some(k) => {
                best = best.min(stored(k));
                let lo = if k > 0 { g[k - 1].max(i.lo) } else { i.lo };
                let hi = if k + 1 < g.len() { g[k + 1].min(i.hi) } else { i.hi };
                Some((lo, hi))
            }
            None => Some((i.lo, i.hi)),
        };
        if let Some((lo, hi)) = bracket.filter(|(lo, hi)| lo.is_finite() && hi.is_finite() && hi > lo) {
            best = best.min(golden_min(f, lo, hi).1);
        }
        sign * best
    }

    /// sup{α : {cc ≤ α} ⊆ A} = inf{cc(θ) : θ ∉ A}.
    pub fn cc_belief(&self, a: &ParamSet) -> Result<f64> {
        self.inf_over(&self.complement(a)?)
    }

    /// 1 − cc-bel(Aᶜ) = 1 − inf{cc(θ) : θ ∈ A}.
    pub fn cc_plausibility(&self, a: &ParamSet) -> Result<f64> {
        Ok(1.0 - self.inf_over(a)?)
    }

    fn complement(&self, a: &ParamSet) -> Result<ParamSet> {
        match a {
            ParamSet::Real(_) | ParamSet::Integer(_) => Ok(a.complement()),
            other => Err(ImError::InvalidArgument(format!("cannot complement `{other}` for a curve"))),
        }
    }
}

/// Golden-section minimum of `f` on [a, b].
fn golden_min(f: impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (a, b);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        if b - a <= 1e-14 * (1.0 + a.abs()) {
            break;
        }
    }
    let m = 0.5 * (a + b);
    let fm = f(m);
    [(c, fc), (d, fd), (m, fm)].into_iter().min_by(|x, y| x.1.total_cmp(&y.1)).unwrap()
}

/// cc(θ) = 2|H(θ) − 1/2| for a confidence distribution function H.
pub fn cc_from_cd(h: impl Fn(f64) -> f64 + Send + Sync + 'static, grid: Vec<f64>) -> Result<ConfidenceCurve> {
    let mut sorted = grid.clone();
    sorted.sort_by(f64::total_cmp);
    let hs: Vec<f64> = sorted.iter().map(|&t| h(t)).collect();
    if let Some(v) = hs.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(ImError::InvalidArgument(format!("distribution function value {v} outside [0, 1]")));
    }
    for k in 1..hs.len() {
        if hs[k] < hs[k - 1] - 1e-12 {
            return Err(ImError::NonMonotone { left: sorted[k - 1], right: sorted[k] });
        }
    }
    ConfidenceCurve::new(grid, move |t| 2.0 * (h(t) - 0.5).abs(), CurveKind::Exact, Provenance::Cd)
}

/// Confidence distribution function of a sample: the empirical CDF.
pub fn empirical_cd(draws: &[f64]) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
    let mut x = draws.to_vec();
    x.sort_by(f64::total_cmp);
    move |t| x.partition_point(|v| *v <= t) as f64 / x.len() as f64
}

/// cc(θ) = inf{α : θ ∈ A_{α,y}}. Since θ ∈ A_{α,y} exactly when
/// u_{y,θ} ∈ S_α, this is 1 − γ(u_{y,θ}); discrete families stay rational.
/// The curve is exact when γ(U★) is certified uniform, conservative otherwise.
pub fn cc_from_im(model: &Model, y: &Point, fam: &NestedFamily, grid: Vec<f64>) -> Result<ConfidenceCurve> {
    let kind = if fam.has_uniform_law() { CurveKind::Exact } else { CurveKind::Conservative };
    if fam.is_discrete() {
        let (m, yy, f) = (model.clone(), *y, fam.clone());
        let exact: ExactEval = Arc::new(move |t| {
            let one = Prob::from_integer(1);
            match m.aux_for(&yy, &Point::scalar(t)) {
                Ok(u) => one - f.gamma_exact(u.x()).unwrap_or_else(Prob::zero),
                Err(_) => one,
            }
        });
        let e = exact.clone();
        return ConfidenceCurve::build(grid, Arc::new(move |t| to_f64(e(t))), Some(exact), kind, Provenance::Im, Domain::Integer);
    }
    let (m, yy, f) = (model.clone(), *y, fam.clone());
    // u ∈ S_α iff γ(u) > 1 − α, so the infimum over α is 1 − γ(u)
    let eval = move |t: f64| -> f64 {
        match m.aux_for(&yy, &Point::scalar(t)) {
            Ok(u) => 1.0 - f.gamma(u.x()),
            Err(_) => 1.0,
        }
    };
    ConfidenceCurve::build(grid, Arc::new(eval), None, kind, Provenance::Im, Domain::Real)
}

/// cc′(θ) = inf{fid_y(A_{α,y}) : θ ∈ A_{α,y}} = P(cc(θ★) ≤ cc(θ)) for θ★ from
/// the fiducial distribution, floored at the input curve.
///
/// Discrete models are enumerated exactly; otherwise one fiducial sample is
/// drawn and its empirical distribution of cc(θ★) is used.
pub fn recalibrate_exact(
    cc: &ConfidenceCurve,
    model: &Model,
    y: &Point,
    _fam: &NestedFamily,
    opts: &FiducialOptions,
) -> Result<ConfidenceCurve> {
    if model.is_discrete() {
        let atoms = gfd_exact_discrete(model, y, 0.0, opts.norm, &opts.tie)?;
        let base = cc.clone();
        let levels: Vec<(Prob, Prob)> = atoms
            .iter()
            .map(|(t, p)| (base.exact_at(t.x()).unwrap_or_else(|| approx_prob(base.evaluate(t.x()))), *p))
            .collect();
        let exact: ExactEval = Arc::new(move |t| {
            let c = base.exact_at(t).unwrap_or_else(|| approx_prob(base.evaluate(t)));
            let f: Prob = levels.iter().filter(|(l, _)| *l <= c).map(|(_, p)| *p).sum();
            f.max(c)
        });
        let e = exact.clone();
        return ConfidenceCurve::build(
            cc.grid.clone(),
            Arc::new(move |t| to_f64(e(t))),
            Some(exact),
            CurveKind::Exact,
            Provenance::FiducialRecalibrated,
            cc.domain,
        );
    }
    let sample = sample_gfd(model, y, opts)?;
    let mut levels: Vec<f64> = sample.draws.par_iter().map(|t| cc.evaluate(t.x())).collect();
    levels.sort_by(f64::total_cmp);
    let base = cc.clone();
    let n = levels.len() as f64;
    let eval = move |t: f64| {
        let c = base.evaluate(t);
        (levels.partition_point(|l| *l <= c) as f64 / n).max(c)
    };
    ConfidenceCurve::build(
        cc.grid.clone(),
        Arc::new(eval),
        None,
        CurveKind::Exact,
        Provenance::FiducialRecalibrated,
        cc.domain,
    )
}

fn approx_prob(x: f64) -> Prob {
    Prob::new((x * 1e15).round() as i128, 1_000_000_000_000_000)
}

/// Fieller curve for the ratio ρ = μx/μy of two unit-variance normal means:
/// cc(ρ) = 2Φ(|x − ρy|/√(1+ρ²)) − 1.
pub fn fieller_cc(x: f64, y: f64, grid: Vec<f64>) -> Result<ConfidenceCurve> {
    let eval = move |rho: f64| {
        if rho.is_infinite() {
            return normal::central(y);
        }
        normal::central((x - rho * y) / (1.0 + rho * rho).sqrt())
    };
    ConfidenceCurve::new(grid, eval, CurveKind::Exact, Provenance::Fieller)
}

/// Functionals of the two-normal means (μx, μy) with a closed-form curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Functional {
    MuX,
    MuY,
    Ratio,
}

impl std::str::FromStr for Functional {
    type Err = ImError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mu-x" => Ok(Functional::MuX),
            "mu-y" => Ok(Functional::MuY),
            "ratio" => Ok(Functional::Ratio),
            _ => Err(ImError::Parse(format!("unknown functional `{s}`"))),
        }
    }
}

/// Curve for one functional of (μx, μy) given data (x, y).
pub fn two_normal_curve(functional: Functional, x: f64, y: f64, grid: Vec<f64>) -> Result<ConfidenceCurve> {
    let location = |obs: f64, grid| cc_from_cd(move |t| normal::cdf(t - obs), grid);
    match functional {
        Functional::MuX => location(x, grid),
        Functional::MuY => location(y, grid),
        Functional::Ratio => fieller_cc(x, y, grid),
    }
}

/// The association cc(θ) − u with u ~ U(0, 1): the data are absorbed into
/// the curve, so any data point may be passed to the solvers.
#[derive(Clone)]
pub struct CurveAssociation {
    cc: ConfidenceCurve,
}

impl fmt::Debug for CurveAssociation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CurveAssociation({:?})", self.cc)
    }
}

impl CurveAssociation {
    fn level_band(&self, i: &Interval) -> Result<IntervalUnion> {
        let upper = self.cc.sublevel(i.hi, !i.hi_closed)?;
        let lower = self.cc.sublevel(i.lo, !i.lo_closed)?;
        match (upper, lower) {
            (ParamSet::Real(up), ParamSet::Real(low)) => Ok(up.difference(&low)),
            _ => Err(ImError::Unsupported("curve associations on integer domains".into())),
        }
    }

    /// cc(I) for an interval I of θ, as a closed interval of levels.
    fn level_range(&self, i: &Interval) -> Result<Interval> {
        let set = ParamSet::Real((*i).into());
        Ok(Interval::closed(self.cc.inf_over(&set)?, self.cc.sup_over(&set)?))
    }
}

impl Association for CurveAssociation {
    fn name(&self) -> String {
        format!("curve:{:?}", self.cc.provenance)
    }

    fn param_space(&self) -> ParamSpace {
        ParamSpace::Real(Interval::real_line())
    }

    fn aux(&self) -> AuxDistribution {
        AuxDistribution::Uniform01
    }

    fn residual(&self, _y: &Point, theta: &Point, u: &Point) -> Point {
        Point::scalar(self.cc.evaluate(theta.x()) - u.x())
    }

    fn solve_theta(&self, _y: &Point, u: &Point) -> Result<ParamSet> {
        let u = u.x();
        Ok(ParamSet::Real(self.level_band(&Interval::closed(u, u))?))
    }

    fn aux_for(&self, _y: &Point, theta: &Point) -> Result<Point> {
        Ok(Point::scalar(self.cc.evaluate(theta.x())))
    }

    /// The data are fixed inside the curve; returns NaN.
    fn generate(&self, _theta: &Point, _u: &Point) -> Point {
        Point::scalar(f64::NAN)
    }

    fn image(&self, _y: &Point, s: &AuxSet) -> Result<ParamSet> {
        let AuxSet::Continuous(u) = s else {
            return Err(ImError::InvalidArgument("discrete set for a curve association".into()));
        };
        let mut out = IntervalUnion::empty();
        for i in u.parts() {
            out = out.union(&self.level_band(i)?);
        }
        Ok(ParamSet::Real(out))
    }

    fn preimage(&self, _y: &Point, a: &ParamSet) -> Result<AuxSet> {
        let ParamSet::Real(a) = a else {
            return Err(ImError::InvalidArgument(format!("`{a}` is not a real assertion")));
        };
        // u fails when some θ outside A sits on the level cc(θ) = u
        let mut hit = IntervalUnion::empty();
        for i in a.complement().parts() {
            hit = hit.union(&self.level_range(i)?.into());
        }
        Ok(AuxSet::Continuous(IntervalUnion::from(Interval::closed(0.0, 1.0)).difference(&hit)))
    }

    fn pseudo_solve(&self, y: &Point, u: &Point, _norm: Norm, tie: &TieRule) -> Result<Point> {
        let set = self.solve_theta(y, u)?;
        tie.select(&crate::model::candidate_points(&set)).ok_or_else(|| {
            ImError::NoConvergence(format!("level {} is not attained by the curve", u.x()))
        })
    }
}

/// The inferential model equivalent to a curve: association cc(θ) − u with
/// the random set S = [0, U*], whose point plausibility is 1 − cc(θ).
pub fn im_from_cc(cc: &ConfidenceCurve) -> Result<(Model, NestedFamily)> {
    if cc.domain != Domain::Real {
        return Err(ImError::Unsupported("curve associations on integer domains".into()));
    }
    Ok((Model::new(CurveAssociation { cc: cc.clone() }), builtin_randomset("left")?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{belief, point_plausibility_curve, BeliefOptions, Method};
    use crate::randomset::{builtin_discrete, nested_from_gamma};
    use proptest::prelude::*;

    const Z: f64 = 1.959964;
    const Z975: f64 = 1.959_963_984_540_054;

    fn p(x: f64) -> Point {
        Point::scalar(x)
    }

    fn real(lo: f64, hi: f64, lc: bool, hc: bool) -> ParamSet {
        ParamSet::Real(Interval::new(lo, hi, lc, hc).into())
    }

    fn nl_curve(y: f64) -> ConfidenceCurve {
        let fam = builtin_randomset("two-sided").unwrap();
        cc_from_im(&Model::normal_location(), &p(y), &fam, linspace(y - 6.0, y + 6.0, DEFAULT_GRID)).unwrap()
    }

    #[test]
    fn cd_curve_examples() {
        let cc = cc_from_cd(|t| normal::cdf(t - 1.0), linspace(-5.0, 7.0, 101)).unwrap();
        assert_eq!(cc.evaluate(1.0), 0.0);
        assert!((cc.evaluate(1.0 + Z) - 0.95).abs() < 1e-6);
        let step = cc_from_cd(|t| if t >= 0.0 { 1.0 } else { 0.0 }, linspace(-1.0, 1.0, 11)).unwrap();
        assert_eq!(step.evaluate(0.3), 1.0);
        assert_eq!(step.evaluate(-0.3), 1.0);
        let bad = cc_from_cd(|t| normal::cdf(-t), linspace(-1.0, 1.0, 11));
        assert!(matches!(bad, Err(ImError::NonMonotone { .. })));
    }

    #[test]
    fn im_curve_matches_closed_form() {
        let cc = nl_curve(1.0);
        assert_eq!(cc.kind(), CurveKind::Exact);
        let worst = cc
            .grid()
            .iter()
            .zip(cc.values())
            .map(|(t, v)| (v - (2.0 * normal::cdf(1.0 - t) - 1.0).abs()).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-6, "{worst}");
        assert_eq!(cc.evaluate(1.0), 0.0);
    }

    #[test]
    fn im_curve_is_the_principle_assertion_infimum() {
        // oracle: bisect on α over the principle assertions themselves
        let m = Model::normal_location();
        for name in ["two-sided", "left", "right"] {
            let fam = builtin_randomset(name).unwrap();
            let cc = cc_from_im(&m, &p(0.2), &fam, linspace(-3.0, 3.0, 7)).unwrap();
            for t in [-2.5, -0.4, 0.2, 0.9, 2.2] {
                let inside = |a: f64| crate::engine::principle_assertion(&m, &p(0.2), &fam, a).unwrap().contains(&p(t));
                let (mut lo, mut hi) = (0.0, 1.0);
                while hi - lo > 1e-12 {
                    let mid = 0.5 * (lo + hi);
                    if inside(mid) { hi = mid } else { lo = mid }
                }
                assert!((cc.evaluate(t) - hi).abs() < 1e-9, "{name} θ={t}: {} vs {hi}", cc.evaluate(t));
            }
        }
    }

    #[test]
    fn discrete_im_curve() {
        let d = Model::discrete_shift(4);
        let t = NestedFamily::from_table("t", [4, 3, 2, 1].map(|k| Prob::new(k, 4)).to_vec()).unwrap();
        let cc = cc_from_im(&d, &p(5.0), &t, (0..=8).map(f64::from).collect()).unwrap();
        assert_eq!(cc.exact_at(4.0), Some(Prob::new(1, 4)));
        assert_eq!(cc.exact_at(5.0), Some(Prob::zero()));
        assert_eq!(cc.exact_at(8.0), Some(Prob::from_integer(1)));
        assert_eq!(cc.kind(), CurveKind::Exact);
        assert_eq!(cc.confidence_set(0.5).unwrap().as_integer(), Some(&IntSet::finite([3, 4, 5])));
    }

    #[test]
    fn confidence_sets() {
        let cc = nl_curve(0.0);
        let set = cc.confidence_set(0.95).unwrap();
        let i = set.as_real().unwrap().parts()[0];
        assert!((i.lo + Z975).abs() < 1e-8 && (i.hi - Z975).abs() < 1e-8);
        let tiny = cc.confidence_set(1e-6).unwrap();
        assert!(tiny.contains(&p(0.0)));
        // minimizer between grid points
        let off = cc_from_cd(|t| normal::cdf(t - 0.123), linspace(-3.0, 3.0, 11)).unwrap();
        let s = off.confidence_set(1e-9).unwrap();
        assert!((s.as_real().unwrap().parts()[0].lo - 0.123).abs() < 1e-8, "{s}");
    }

    #[test]
    fn fieller_values_and_sets() {
        let f = fieller_cc(2.0, 1.0, linspace(-10.0, 10.0, DEFAULT_GRID)).unwrap();
        assert_eq!(f.evaluate(2.0), 0.0);
        assert!((f.evaluate(f64::INFINITY) - 0.682_689_492_137_085_9).abs() < 1e-15);
        assert!((f.evaluate(-1e9) - 0.682_689_492_137_085_9).abs() < 1e-9);
        let flat = fieller_cc(0.0, 0.0, linspace(-3.0, 3.0, 7)).unwrap();
        assert!(flat.values().iter().all(|v| *v == 0.0));
        // (x − ρy)² = z²(1+ρ²) with x = 2, y = 1
        let z2 = Z975 * Z975;
        let (a, b, c) = (1.0 - z2, -4.0, 4.0 - z2);
        let disc = (b * b - 4.0 * a * c).sqrt();
        let mut roots = [(-b - disc) / (2.0 * a), (-b + disc) / (2.0 * a)];
        roots.sort_by(f64::total_cmp);
        let set = f.confidence_set(0.95).unwrap();
        let parts = set.as_real().unwrap().parts().to_vec();
        assert_eq!(parts.len(), 2, "{set}");
        assert_eq!(parts[0].lo, f64::NEG_INFINITY);
        assert_eq!(parts[1].hi, f64::INFINITY);
        assert!((parts[0].hi - roots[0]).abs() < 1e-6 && (parts[1].lo - roots[1]).abs() < 1e-6);
    }

    #[test]
    fn cc_belief_and_plausibility() {
        let cc = nl_curve(0.0);
        let a = real(-Z, Z, false, false);
        assert!((cc.cc_belief(&a).unwrap() - 0.95).abs() < 1e-6);
        assert_eq!(cc.cc_plausibility(&real(-1.0, 1.0, true, true)).unwrap(), 1.0);
        assert_eq!(cc.cc_belief(&ParamSet::Real(IntervalUnion::real_line())).unwrap(), 1.0);
        let b = real(0.5, 2.0, true, true);
        let pl = cc.cc_plausibility(&b).unwrap();
        let bel_c = cc.cc_belief(&b.complement()).unwrap();
        assert!((pl - (1.0 - bel_c)).abs() < 1e-15);
        assert!((pl - (1.0 - (2.0 * normal::cdf(0.5) - 1.0))).abs() < 1e-9);
    }

    #[test]
    fn im_curve_matches_engine_plausibility() {
        let grid = linspace(-4.0, 4.0, 81);
        for name in ["two-sided", "left", "right", "offset"] {
            let fam = builtin_randomset(name).unwrap().canonical();
            let m = Model::normal_location();
            let cc = cc_from_im(&m, &p(0.4), &fam, grid.clone()).unwrap();
            let pl = point_plausibility_curve(&m, &p(0.4), &fam, &grid, &BeliefOptions::default()).unwrap();
            for (c, q) in cc.values().iter().zip(&pl) {
                assert!((1.0 - c - q).abs() < 1e-6, "{name}");
            }
        }
        let d = Model::discrete_shift(6);
        let fam = builtin_discrete("two-sided", 6).unwrap();
        let grid: Vec<f64> = (-2..=10).map(f64::from).collect();
        let cc = cc_from_im(&d, &p(4.0), &fam, grid.clone()).unwrap();
        let pl = point_plausibility_curve(&d, &p(4.0), &fam, &grid, &BeliefOptions::default()).unwrap();
        for (c, q) in cc.values().iter().zip(&pl) {
            assert!((1.0 - c - q).abs() < 1e-15);
        }
    }

    #[test]
    fn cd_and_im_curves_coincide() {
        let y = -0.7;
        let grid = linspace(-6.0, 5.0, 301);
        let a = cc_from_cd(move |t| normal::cdf(t - y), grid.clone()).unwrap();
        let b = nl_curve(y);
        for t in grid {
            assert!((a.evaluate(t) - b.evaluate(t)).abs() < 1e-9);
        }
    }

    #[test]
    fn recalibration() {
        let m = Model::normal_location();
        let y = p(0.3);
        let two = builtin_randomset("two-sided").unwrap();
        let grid = linspace(-4.0, 4.0, 161);
        let cc = cc_from_im(&m, &y, &two, grid.clone()).unwrap();
        let n = 40_000;
        let re = recalibrate_exact(&cc, &m, &y, &two, &FiducialOptions::new(n, 0.0, 12)).unwrap();
        for (a, b) in cc.values().iter().zip(re.values()) {
            let se = (a * (1.0 - a) / n as f64).sqrt();
            assert!(b >= a && b - a <= 3.0 * se + 1e-12);
        }
        // γ = min(1, 2(1 − |2u − 1|)) gives a conservative curve
        let wide = nested_from_gamma("wide", |u| (2.0 * (1.0 - (2.0 * u - 1.0).abs())).min(1.0));
        let cons = cc_from_im(&m, &y, &wide, grid).unwrap();
        assert_eq!(cons.kind(), CurveKind::Conservative);
        let re = recalibrate_exact(&cons, &m, &y, &wide, &FiducialOptions::new(n, 0.0, 12)).unwrap();
        assert_eq!(re.kind(), CurveKind::Exact);
        assert!(cons.values().iter().zip(re.values()).all(|(a, b)| b >= a));
        assert!(cons.values().iter().zip(re.values()).any(|(a, b)| b - a > 0.1));
    }

    #[test]
    fn discrete_recalibration_is_exact() {
        let d = Model::discrete_shift(4);
        let y = p(5.0);
        let t = NestedFamily::from_table("t", [4, 3, 2, 1].map(|k| Prob::new(k, 4)).to_vec()).unwrap();
        let grid: Vec<f64> = (0..=8).map(f64::from).collect();
        let cc = cc_from_im(&d, &y, &t, grid).unwrap();
        let re = recalibrate_exact(&cc, &d, &y, &t, &FiducialOptions::new(1, 0.0, 0)).unwrap();
        // γ(U★) is uniform here, so fid(A_α) equals the level itself
        for k in 2..=5 {
            assert_eq!(re.exact_at(k as f64), Some(Prob::new(6 - k, 4)), "θ={k}");
        }
        let skew = NestedFamily::from_table("s", [4, 1, 1, 1].map(|k| Prob::new(k, 4)).to_vec()).unwrap();
        let cc = cc_from_im(&d, &y, &skew, (0..=8).map(f64::from).collect()).unwrap();
        let re = recalibrate_exact(&cc, &d, &y, &skew, &FiducialOptions::new(1, 0.0, 0)).unwrap();
        assert_eq!(re.exact_at(5.0), Some(Prob::new(1, 4)));
        assert_eq!(re.exact_at(3.0), Some(Prob::from_integer(1)));
    }

    #[test]
    fn curve_to_im_round_trip() {
        for cc in [nl_curve(0.0), fieller_cc(2.0, 1.0, linspace(-10.0, 10.0, 401)).unwrap()] {
            let (m, fam) = im_from_cc(&cc).unwrap();
            let back = cc_from_im(&m, &p(0.0), &fam, cc.grid().to_vec()).unwrap();
            let worst = cc.values().iter().zip(back.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(worst <= 1e-6, "{worst}");
            let grid: Vec<f64> = cc.grid().iter().step_by(20).copied().collect();
            let pl = point_plausibility_curve(&m, &p(0.0), &fam, &grid, &BeliefOptions::default()).unwrap();
            for (t, q) in grid.iter().zip(&pl) {
                assert!((q - (1.0 - cc.evaluate(*t))).abs() < 1e-9, "θ={t}");
            }
        }
        let flat = cc_from_cd(|_| 0.5, linspace(-2.0, 2.0, 21)).unwrap();
        let (m, fam) = im_from_cc(&flat).unwrap();
        let pl = point_plausibility_curve(&m, &p(0.0), &fam, &[-1.0, 0.0, 1.7], &BeliefOptions::default()).unwrap();
        assert_eq!(pl, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn curve_im_belief_matches_cc_belief() {
        let cc = nl_curve(0.0);
        let (m, fam) = im_from_cc(&cc).unwrap();
        let a = real(-1.0, 2.5, true, false);
        let ex = belief(&m, &p(0.0), &fam, &a, &BeliefOptions::default()).unwrap();
        assert!((ex.belief - cc.cc_belief(&a).unwrap()).abs() < 1e-9);
        let sim = belief(&m, &p(0.0), &fam, &a, &BeliefOptions { n_mc: 4000, seed: 2, method: Method::MonteCarlo }).unwrap();
        assert!((sim.belief - ex.belief).abs() < 3.0 * sim.se_belief + 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn level_sets_nest(a in 0.0f64..1.0, b in 0.0f64..1.0, x in -3.0f64..3.0, y in -3.0f64..3.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let f = fieller_cc(x, y, linspace(-10.0, 10.0, 201)).unwrap();
            let (s1, s2) = (f.confidence_set(lo).unwrap(), f.confidence_set(hi).unwrap());
            prop_assert!(s1.is_subset(&s2).unwrap(), "{} ⊄ {}", s1, s2);
        }
    }
}
