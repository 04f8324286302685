//! Statistical models written as association equations a(y, θ, u) = 0.
//!
//! A model couples an auxiliary distribution with three solvers: the
//! parameter set Θ_y(u) solving the association for fixed data and auxiliary
//! value, the auxiliary value u_{y,θ} for fixed data and parameter, and the
//! data generating map y = G(θ, u). One-dimensional models whose solutions
//! move monotonically with u also provide exact images Θ_y(S) of auxiliary
//! sets and the preimages {u : Θ_y(u) ⊆ A} that the exact belief path uses.

use crate::error::{ImError, Result};
use crate::normal;
use crate::point::Point;
use crate::rng::open01;
use crate::sets::{IntSet, Interval, IntervalUnion, ParamSet, ParamSpace};
use crate::Prob;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Distribution of one auxiliary coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuxDistribution {
    Uniform01,
    StandardNormal,
    /// Uniform on {0, 1, ..., n-1}.
    DiscreteUniform(u32),
}

impl AuxDistribution {
    pub fn is_discrete(&self) -> bool {
        matches!(self, AuxDistribution::DiscreteUniform(_))
    }

    /// The range R(U).
    pub fn range(&self) -> AuxSet {
        match *self {
            AuxDistribution::Uniform01 => AuxSet::Continuous(Interval::closed(0.0, 1.0).into()),
            AuxDistribution::StandardNormal => AuxSet::Continuous(IntervalUnion::real_line()),
            AuxDistribution::DiscreteUniform(n) => AuxSet::Discrete((0..n as i64).collect()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            AuxDistribution::Uniform01 => open01(rng),
            AuxDistribution::StandardNormal => normal::quantile(open01(rng)),
            AuxDistribution::DiscreteUniform(n) => rng.random_range(0..n) as f64,
        }
    }

    pub fn cdf(&self, u: f64) -> f64 {
        match *self {
            AuxDistribution::Uniform01 => u.clamp(0.0, 1.0),
            AuxDistribution::StandardNormal => normal::cdf(u),
            AuxDistribution::DiscreteUniform(n) => ((u.floor() + 1.0) / n as f64).clamp(0.0, 1.0),
        }
    }

    pub fn quantile(&self, p: f64) -> f64 {
        match *self {
            AuxDistribution::Uniform01 => p.clamp(0.0, 1.0),
            AuxDistribution::StandardNormal => normal::quantile(p),
            AuxDistribution::DiscreteUniform(n) => ((p * n as f64).ceil() - 1.0).clamp(0.0, n as f64 - 1.0),
        }
    }

    /// P(U ∈ s).
    pub fn prob(&self, s: &AuxSet) -> f64 {
        match (self, s) {
            (AuxDistribution::DiscreteUniform(_), AuxSet::Discrete(_)) => {
                let p = self.prob_exact(s).unwrap_or_default();
                *p.numer() as f64 / *p.denom() as f64
            }
            (_, AuxSet::Continuous(u)) => u
                .parts()
                .iter()
                .map(|i| {
                    // atoms only exist for the discrete kind
                    (self.cdf(i.hi) - self.cdf(i.lo)).max(0.0)
                })
                .sum(),
            _ => 0.0,
        }
    }

    /// Exact P(U ∈ s) for discrete auxiliaries.
    pub fn prob_exact(&self, s: &AuxSet) -> Option<Prob> {
        match (self, s) {
            (AuxDistribution::DiscreteUniform(n), AuxSet::Discrete(ks)) => {
                let hits = ks.iter().filter(|&&k| k >= 0 && k < *n as i64).count();
                Some(Prob::new(hits as i128, *n as i128))
            }
            _ => None,
        }
    }
}

/// A subset of the auxiliary range: a realization of a predictive random set.
#[derive(Clone, Debug, PartialEq)]
pub enum AuxSet {
    Continuous(IntervalUnion),
    Discrete(BTreeSet<i64>),
}

impl AuxSet {
    pub fn empty_like(&self) -> AuxSet {
        match self {
            AuxSet::Continuous(_) => AuxSet::Continuous(IntervalUnion::empty()),
            AuxSet::Discrete(_) => AuxSet::Discrete(BTreeSet::new()),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            AuxSet::Continuous(u) => u.is_empty(),
            AuxSet::Discrete(s) => s.is_empty(),
        }
    }

    pub fn contains(&self, u: f64) -> bool {
        match self {
            AuxSet::Continuous(s) => s.contains(u),
            AuxSet::Discrete(s) => u.fract() == 0.0 && s.contains(&(u as i64)),
        }
    }

    pub fn is_subset(&self, other: &AuxSet) -> bool {
        match (self, other) {
            (AuxSet::Continuous(a), AuxSet::Continuous(b)) => a.is_subset(b),
            (AuxSet::Discrete(a), AuxSet::Discrete(b)) => a.is_subset(b),
            _ => false,
        }
    }

    pub fn intersect(&self, other: &AuxSet) -> AuxSet {
        match (self, other) {
            (AuxSet::Continuous(a), AuxSet::Continuous(b)) => AuxSet::Continuous(a.intersect(b)),
            (AuxSet::Discrete(a), AuxSet::Discrete(b)) => AuxSet::Discrete(a & b),
            _ => self.empty_like(),
        }
    }

    /// Complement relative to the auxiliary range.
    pub fn complement_in(&self, aux: &AuxDistribution) -> AuxSet {
        match (self, aux.range()) {
            (AuxSet::Continuous(a), AuxSet::Continuous(r)) => AuxSet::Continuous(r.difference(a)),
            (AuxSet::Discrete(a), AuxSet::Discrete(r)) => AuxSet::Discrete(&r - a),
            (s, _) => s.clone(),
        }
    }
}

impl fmt::Display for AuxSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AuxSet::Continuous(u) => write!(f, "{u}"),
            AuxSet::Discrete(s) => write!(f, "{}", IntSet::Finite(s.clone())),
        }
    }
}

/// Norm used to measure association residuals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    #[default]
    L2,
    Linf,
}

impl Norm {
    pub fn apply(&self, r: &Point) -> f64 {
        match self {
            Norm::L2 => r.l2(),
            Norm::Linf => r.linf(),
        }
    }
}

impl std::str::FromStr for Norm {
    type Err = ImError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l2" => Ok(Norm::L2),
            "linf" => Ok(Norm::Linf),
            _ => Err(ImError::Parse(format!("unknown norm `{s}`"))),
        }
    }
}

/// Rule that picks one minimizer when a pseudo-solution is not unique.
/// Each rule yields a different version of the fiducial distribution.
#[derive(Clone, Debug, Default)]
pub enum TieRule {
    #[default]
    Leftmost,
    Rightmost,
    /// Prefer a minimizer outside the given set, leftmost otherwise.
    Avoid(ParamSet),
}

impl TieRule {
    pub fn id(&self) -> String {
        match self {
            TieRule::Leftmost => "leftmost".into(),
            TieRule::Rightmost => "rightmost".into(),
            TieRule::Avoid(a) => format!("avoid:{a}"),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "leftmost" => Ok(TieRule::Leftmost),
            "rightmost" => Ok(TieRule::Rightmost),
            _ => Err(ImError::Parse(format!("unknown tie rule `{s}`"))),
        }
    }

    /// Picks one candidate; `None` when there are none.
    pub fn select(&self, candidates: &[Point]) -> Option<Point> {
        let lex = |a: &&Point, b: &&Point| {
            a.as_slice()
                .iter()
                .zip(b.as_slice())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        };
        match self {
            TieRule::Leftmost => candidates.iter().min_by(lex).copied(),
            TieRule::Rightmost => candidates.iter().max_by(lex).copied(),
            TieRule::Avoid(a) => candidates
                .iter()
                .filter(|p| !a.contains(p))
                .min_by(lex)
                .or_else(|| candidates.iter().min_by(lex))
                .copied(),
        }
    }
}

/// Candidate points of a solution set, for tie selection.
pub fn candidate_points(set: &ParamSet) -> Vec<Point> {
    match set {
        ParamSet::Real(u) => u
            .parts()
            .iter()
            .flat_map(|i| {
                if i.lo == i.hi {
                    vec![Point::scalar(i.lo)]
                } else {
                    [i.lo, i.hi].into_iter().filter(|v| v.is_finite()).map(Point::scalar).collect()
                }
            })
            .collect(),
        ParamSet::Integer(IntSet::Finite(s)) => s.iter().map(|&k| Point::scalar(k as f64)).collect(),
        ParamSet::Points(v) => v.clone(),
        _ => Vec::new(),
    }
}

/// An association a(y, θ, u) = 0 together with its solvers.
pub trait Association: Send + Sync + fmt::Debug {
    fn name(&self) -> String;

    fn param_space(&self) -> ParamSpace;

    /// Distribution of each auxiliary coordinate.
    fn aux(&self) -> AuxDistribution;

    fn aux_dim(&self) -> usize {
        1
    }

    /// The residual a(y, θ, u); a vector for multivariate data.
    fn residual(&self, y: &Point, theta: &Point, u: &Point) -> Point;

    /// Θ_y(u), possibly empty.
    fn solve_theta(&self, y: &Point, u: &Point) -> Result<ParamSet>;

    /// u_{y,θ}.
    fn aux_for(&self, y: &Point, theta: &Point) -> Result<Point>;

    /// The data generating map y = G(θ, u).
    fn generate(&self, theta: &Point, u: &Point) -> Point;

    /// Θ_y(S) = ∪_{u∈S} Θ_y(u).
    fn image(&self, _y: &Point, _s: &AuxSet) -> Result<ParamSet> {
        Err(ImError::Unsupported(format!("exact images for model `{}`", self.name())))
    }

    /// {u ∈ R(U) : Θ_y(u) ⊆ A}; auxiliary values without solutions belong to it.
    fn preimage(&self, _y: &Point, _a: &ParamSet) -> Result<AuxSet> {
        Err(ImError::Unsupported(format!("exact preimages for model `{}`", self.name())))
    }

    /// Q_y(u) = argmin_θ ‖a(y, θ, u)‖.
    fn pseudo_solve(&self, y: &Point, u: &Point, _norm: Norm, tie: &TieRule) -> Result<Point> {
        let set = self.solve_theta(y, u)?;
        tie.select(&candidate_points(&set)).ok_or_else(|| {
            ImError::NoConvergence(format!("no minimizer found for y={y}, u={u}"))
        })
    }
}

/// A shareable handle to an association.
#[derive(Clone)]
pub struct Model {
    inner: Arc<dyn Association>,
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Model({})", self.inner.name())
    }
}

impl Model {
    pub fn new(assoc: impl Association + 'static) -> Self {
        Self { inner: Arc::new(assoc) }
    }

    pub fn normal_location() -> Self {
        Self::new(NormalLocation::default())
    }

    pub fn two_normal() -> Self {
        Self::new(TwoNormal)
    }

    pub fn exp_rate() -> Self {
        Self::new(ExpRate)
    }

    pub fn discrete_shift(n: u32) -> Self {
        Self::new(DiscreteShift::new(n))
    }

    /// Looks up a built-in model: `normal-location`, `two-normal`,
    /// `exp-rate` or `discrete-shift:N`.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "normal-location" => Ok(Self::normal_location()),
            "two-normal" => Ok(Self::two_normal()),
            "exp-rate" => Ok(Self::exp_rate()),
            _ => {
                let n = name
                    .strip_prefix("discrete-shift:")
                    .and_then(|n| n.parse::<u32>().ok())
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| ImError::UnknownModel(name.to_string()))?;
                Ok(Self::discrete_shift(n))
            }
        }
    }

    pub fn association(&self) -> &dyn Association {
        self.inner.as_ref()
    }

    pub fn name(&self) -> String {
        self.inner.name()
    }

    pub fn param_space(&self) -> ParamSpace {
        self.inner.param_space()
    }

    pub fn param_dim(&self) -> usize {
        match self.param_space() {
            ParamSpace::Plane(..) => 2,
            _ => 1,
        }
    }

    pub fn aux(&self) -> AuxDistribution {
        self.inner.aux()
    }

    pub fn aux_dim(&self) -> usize {
        self.inner.aux_dim()
    }

    pub fn is_discrete(&self) -> bool {
        self.aux().is_discrete()
    }

    pub fn residual(&self, y: &Point, theta: &Point, u: &Point) -> Point {
        self.inner.residual(y, theta, u)
    }

    pub fn solve_theta(&self, y: &Point, u: &Point) -> Result<ParamSet> {
        self.inner.solve_theta(y, u)
    }

    pub fn aux_for(&self, y: &Point, theta: &Point) -> Result<Point> {
        self.inner.aux_for(y, theta)
    }

    pub fn generate(&self, theta: &Point, u: &Point) -> Point {
        self.inner.generate(theta, u)
    }

    pub fn image(&self, y: &Point, s: &AuxSet) -> Result<ParamSet> {
        if s.is_empty() {
            return Ok(ParamSet::empty_in(&self.param_space()));
        }
        self.inner.image(y, s)
    }

    pub fn preimage(&self, y: &Point, a: &ParamSet) -> Result<AuxSet> {
        self.inner.preimage(y, a)
    }

    pub fn pseudo_solve(&self, y: &Point, u: &Point, norm: Norm, tie: &TieRule) -> Result<Point> {
        self.inner.pseudo_solve(y, u, norm, tie)
    }

    pub fn draw_aux<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let aux = self.aux();
        match self.aux_dim() {
            1 => Point::scalar(aux.sample(rng)),
            _ => {
                let a = aux.sample(rng);
                Point::pair(a, aux.sample(rng))
            }
        }
    }

    /// Y = G(θ, U) with U drawn from the auxiliary distribution.
    pub fn simulate_data<R: Rng + ?Sized>(&self, theta: &Point, rng: &mut R) -> Point {
        let u = self.draw_aux(rng);
        self.generate(theta, &u)
    }
}

/// Scalar model with uniform auxiliary whose solution θ(u) is unique where it
/// exists and monotone in u. Provides exact images and preimages.
struct MonotoneMap<'a> {
    window: Interval,
    increasing: bool,
    theta_of_u: &'a dyn Fn(f64) -> f64,
    u_of_theta: &'a dyn Fn(f64) -> f64,
}

impl MonotoneMap<'_> {
    /// Auxiliary values that have a solution inside the window.
    fn solvable(&self) -> Interval {
        let w = self.window;
        let (a, b) = ((self.u_of_theta)(w.lo), (self.u_of_theta)(w.hi));
        let s = if self.increasing {
            Interval { lo: a, hi: b, lo_closed: w.lo_closed, hi_closed: w.hi_closed }
        } else {
            Interval { lo: b, hi: a, lo_closed: w.hi_closed, hi_closed: w.lo_closed }
        };
        s.intersect(&Interval::closed(0.0, 1.0))
    }

    fn theta_at(&self, u: f64, solvable: &Interval) -> f64 {
        let w = self.window;
        if u == solvable.lo {
            if self.increasing { w.lo } else { w.hi }
        } else if u == solvable.hi {
            if self.increasing { w.hi } else { w.lo }
        } else {
            (self.theta_of_u)(u)
        }
    }

    fn image(&self, s: &IntervalUnion) -> IntervalUnion {
        let sol = self.solvable();
        let parts = s.parts().iter().filter_map(|i| {
            let j = i.intersect(&sol);
            if j.is_empty() {
                return None;
            }
            let (a, b) = (self.theta_at(j.lo, &sol), self.theta_at(j.hi, &sol));
            Some(if self.increasing {
                Interval::new(a, b, j.lo_closed, j.hi_closed)
            } else {
                Interval::new(b, a, j.hi_closed, j.lo_closed)
            })
        });
        IntervalUnion::new(parts).intersect(&self.window.into())
    }

    fn preimage(&self, a: &IntervalUnion) -> IntervalUnion {
        let inside = a.intersect(&self.window.into());
        let u_at = |t: f64| (self.u_of_theta)(t);
        let parts = inside.parts().iter().map(|k| {
            let (ua, ub) = (u_at(k.lo), u_at(k.hi));
            if self.increasing {
                Interval::new(ua, ub, k.lo_closed, k.hi_closed)
            } else {
                Interval::new(ub, ua, k.hi_closed, k.lo_closed)
            }
        });
        let unit: IntervalUnion = Interval::closed(0.0, 1.0).into();
        let unsolvable = unit.difference(&self.solvable().into());
        IntervalUnion::new(parts).intersect(&unit).union(&unsolvable)
    }

    fn pseudo_solve(&self, u: f64) -> Result<f64> {
        let sol = self.solvable();
        if sol.contains(u) {
            return Ok(self.theta_at(u, &sol));
        }
        // the root lies beyond one edge of the window
        let below = u <= sol.lo;
        let edge = match (below, self.increasing) {
            (true, true) | (false, false) => self.window.lo,
            _ => self.window.hi,
        };
        if edge.is_finite() {
            Ok(edge)
        } else {
            Err(ImError::NoConvergence(format!(
                "u={u} has no solution and the window is unbounded on that side"
            )))
        }
    }
}

fn scalar_image(map: &MonotoneMap<'_>, s: &AuxSet) -> Result<ParamSet> {
    match s {
        AuxSet::Continuous(u) => Ok(ParamSet::Real(map.image(u))),
        AuxSet::Discrete(_) => Err(ImError::InvalidArgument("discrete set for a continuous model".into())),
    }
}

fn scalar_preimage(map: &MonotoneMap<'_>, a: &ParamSet) -> Result<AuxSet> {
    match a {
        ParamSet::Real(u) => Ok(AuxSet::Continuous(map.preimage(u))),
        other => Err(ImError::InvalidArgument(format!("`{other}` is not a real assertion"))),
    }
}

fn no_solution(y: &Point, theta: &Point) -> ImError {
    ImError::NoSolution { y: y.to_string(), theta: theta.to_string() }
}

/// Y = θ + Φ⁻¹(U), U ~ U(0, 1), with an optional restricted parameter window.
#[derive(Clone, Debug)]
pub struct NormalLocation {
    window: Interval,
}

impl Default for NormalLocation {
    fn default() -> Self {
        Self { window: Interval::real_line() }
    }
}

impl NormalLocation {
    pub fn with_window(window: Interval) -> Self {
        Self { window }
    }

    fn with_map<T>(&self, y: f64, f: impl FnOnce(&MonotoneMap<'_>) -> T) -> T {
        let t = |u: f64| y - normal::quantile(u);
        let u = |theta: f64| normal::cdf(y - theta);
        f(&MonotoneMap { window: self.window, increasing: false, theta_of_u: &t, u_of_theta: &u })
    }
}

impl Association for NormalLocation {
    fn name(&self) -> String {
        if self.window == Interval::real_line() {
            "normal-location".into()
        } else {
            format!("normal-location{}", self.window)
        }
    }

    fn param_space(&self) -> ParamSpace {
        ParamSpace::Real(self.window)
    }

    fn aux(&self) -> AuxDistribution {
        AuxDistribution::Uniform01
    }

    fn residual(&self, y: &Point, theta: &Point, u: &Point) -> Point {
        Point::scalar(y.x() - theta.x() - normal::quantile(u.x()))
    }

    fn solve_theta(&self, y: &Point, u: &Point) -> Result<ParamSet> {
        let u = u.x();
        let mut out = IntervalUnion::empty();
        if u > 0.0 && u < 1.0 {
            let theta = y.x() - normal::quantile(u);
            if self.window.contains(theta) {
                out = Interval::point(theta).into();
            }
        }
        Ok(ParamSet::Real(out))
    }

    fn aux_for(&self, y: &Point, theta: &Point) -> Result<Point> {
        if !self.window.contains(theta.x()) {
            return Err(no_solution(y, theta));
        }
        Ok(Point::scalar(normal::cdf(y.x() - theta.x())))
    }

    fn generate(&self, theta: &Point, u: &Point) -> Point {
        Point::scalar(theta.x() + normal::quantile(u.x()))
    }

    fn image(&self, y: &Point, s: &AuxSet) -> Result<ParamSet> {
        self.with_map(y.x(), |m| scalar_image(m, s))
    }

    fn preimage(&self, y: &Point, a: &ParamSet) -> Result<AuxSet> {
        self.with_map(y.x(), |m| scalar_preimage(m, a))
    }

    fn pseudo_solve(&self, y: &Point, u: &Point, _norm: Norm, _tie: &TieRule) -> Result<Point> {
        self.with_map(y.x(), |m| m.pseudo_solve(u.x())).map(Point::scalar)
    }
}

/// Y = −ln(1 − U)/λ, an exponential sample with rate λ > 0.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExpRate;

impl ExpRate {
    fn with_map<T>(&self, y: f64, f: impl FnOnce(&MonotoneMap<'_>) -> T) -> T {
        let t = |u: f64| -(-u).ln_1p() / y;
        let u = |lambda: f64| -(-lambda * y).exp_m1();
        let window = Interval::open(0.0, f64::INFINITY);
        f(&MonotoneMap { window, increasing: true, theta_of_u: &t, u_of_theta: &u })
    }
}

impl Association for ExpRate {
    fn name(&self) -> String {
        "exp-rate".into()
    }

    fn param_space(&self) -> ParamSpace {
        ParamSpace::Real(Interval::open(0.0, f64::INFINITY))
    }

    fn aux(&self) -> AuxDistribution {
        AuxDistribution::Uniform01
    }

    fn residual(&self, y: &Point, theta: &Point, u: &Point) -> Point {
        Point::scalar(y.x() + (-u.x()).ln_1p() / theta.x())
    }

    fn solve_theta(&self, y: &Point, u: &Point) -> Result<ParamSet> {
        let (y, u) = (y.x(), u.x());
        if y > 0.0 && u > 0.0 && u < 1.0 {
            return Ok(ParamSet::Real(Interval::point(-(-u).ln_1p() / y).into()));
        }
        Ok(ParamSet::Real(IntervalUnion::empty()))
    }

    fn aux_for(&self, y: &Point, theta: &Point) -> Result<Point> {
        if y.x() <= 0.0 || theta.x() <= 0.0 {
            return Err(no_solution(y, theta));
        }
        Ok(Point::scalar(-(-theta.x() * y.x()).exp_m1()))
    }

    fn generate(&self, theta: &Point, u: &Point) -> Point {
        Point::scalar(-(-u.x()).ln_1p() / theta.x())
    }

    fn image(&self, y: &Point, s: &AuxSet) -> Result<ParamSet> {
        if y.x() <= 0.0 {
            return Ok(ParamSet::Real(IntervalUnion::empty()));
        }
        self.with_map(y.x(), |m| scalar_image(m, s))
    }

    fn preimage(&self, y: &Point, a: &ParamSet) -> Result<AuxSet> {
        if y.x() <= 0.0 {
            return Ok(AuxDistribution::Uniform01.range());
        }
        self.with_map(y.x(), |m| scalar_preimage(m, a))
    }

    fn pseudo_solve(&self, y: &Point, u: &Point, _norm: Norm, _tie: &TieRule) -> Result<Point> {
        if y.x() <= 0.0 {
            return Err(ImError::NoConvergence(format!("exp-rate needs positive data, got {y}")));
        }
        self.with_map(y.x(), |m| m.pseudo_solve(u.x())).map(Point::scalar)
    }
}

/// X ~ N(μx, 1), Y ~ N(μy, 1) independent; θ = (μx, μy), data (x, y).
#[derive(Clone, Copy, Debug, Default)]
pub struct TwoNormal;

impl Association for TwoNormal {
    fn name(&self) -> String {
        "two-normal".into()
    }

    fn param_space(&self) -> ParamSpace {
        ParamSpace::Plane(Interval::real_line(), Interval::real_line())
    }

    fn aux(&self) -> AuxDistribution {
        AuxDistribution::StandardNormal
    }

    fn aux_dim(&self) -> usize {
        2
    }

    fn residual(&self, y: &Point, theta: &Point, u: &Point) -> Point {
        Point::pair(y.get(0) - theta.get(0) - u.get(0), y.get(1) - theta.get(1) - u.get(1))
    }

    fn solve_theta(&self, y: &Point, u: &Point) -> Result<ParamSet> {
        let theta = Point::pair(y.get(0) - u.get(0), y.get(1) - u.get(1));
        Ok(ParamSet::Points(if theta.is_finite() { vec![theta] } else { vec![] }))
    }

    fn aux_for(&self, y: &Point, theta: &Point) -> Result<Point> {
        Ok(Point::pair(y.get(0) - theta.get(0), y.get(1) - theta.get(1)))
    }

    fn generate(&self, theta: &Point, u: &Point) -> Point {
        Point::pair(theta.get(0) + u.get(0), theta.get(1) + u.get(1))
    }
}

/// Y = θ + U with θ an integer and U uniform on {0, ..., n-1}.
#[derive(Clone, Copy, Debug)]
pub struct DiscreteShift {
    n: u32,
}

impl DiscreteShift {
    pub fn new(n: u32) -> Self {
        assert!(n >= 1, "discrete shift needs at least one auxiliary point");
        Self { n }
    }

    fn as_int(x: f64) -> Option<i64> {
        (x.fract() == 0.0 && x.is_finite()).then_some(x as i64)
    }
}

impl Association for DiscreteShift {
    fn name(&self) -> String {
        format!("discrete-shift:{}", self.n)
    }

    fn param_space(&self) -> ParamSpace {
        ParamSpace::Integer
    }

    fn aux(&self) -> AuxDistribution {
        AuxDistribution::DiscreteUniform(self.n)
    }

    fn residual(&self, y: &Point, theta: &Point, u: &Point) -> Point {
        Point::scalar(y.x() - theta.x() - u.x())
    }

    fn solve_theta(&self, y: &Point, u: &Point) -> Result<ParamSet> {
        let sol = match (Self::as_int(y.x()), Self::as_int(u.x())) {
            (Some(y), Some(u)) if (0..self.n as i64).contains(&u) => IntSet::finite([y - u]),
            _ => IntSet::empty(),
        };
        Ok(ParamSet::Integer(sol))
    }

    fn aux_for(&self, y: &Point, theta: &Point) -> Result<Point> {
        match (Self::as_int(y.x()), Self::as_int(theta.x())) {
            (Some(yi), Some(t)) if (0..self.n as i64).contains(&(yi - t)) => Ok(Point::scalar((yi - t) as f64)),
            _ => Err(no_solution(y, theta)),
        }
    }

    fn generate(&self, theta: &Point, u: &Point) -> Point {
        Point::scalar(theta.x() + u.x())
    }

    fn image(&self, y: &Point, s: &AuxSet) -> Result<ParamSet> {
        let AuxSet::Discrete(ks) = s else {
            return Err(ImError::InvalidArgument("continuous set for a discrete model".into()));
        };
        let Some(yi) = Self::as_int(y.x()) else {
            return Ok(ParamSet::Integer(IntSet::empty()));
        };
        Ok(ParamSet::Integer(IntSet::finite(
            ks.iter().filter(|&&k| (0..self.n as i64).contains(&k)).map(|k| yi - k),
        )))
    }

    fn preimage(&self, y: &Point, a: &ParamSet) -> Result<AuxSet> {
        let ParamSet::Integer(a) = a else {
            return Err(ImError::InvalidArgument(format!("`{a}` is not an integer assertion")));
        };
        let n = self.n as i64;
        Ok(AuxSet::Discrete(match Self::as_int(y.x()) {
            Some(yi) => (0..n).filter(|k| a.contains(yi - k)).collect(),
            None => (0..n).collect(),
        }))
    }
}

/// A user-supplied scalar association a(y, θ, u) with uniform auxiliary,
/// monotone in both θ and u, on a bounded parameter window.
///
/// Solutions are found by bisection to a relative width of 1e-12.
pub struct MonotoneAssociation {
    name: String,
    window: Interval,
    increasing: bool,
    residual: Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>,
    generate: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for MonotoneAssociation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MonotoneAssociation({}, window {})", self.name, self.window)
    }
}

impl MonotoneAssociation {
    /// `increasing` states whether the solution θ(u) grows with u.
    pub fn new(
        name: impl Into<String>,
        window: Interval,
        increasing: bool,
        residual: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        generate: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(window.lo.is_finite() && window.hi.is_finite()) || window.is_empty() {
            return Err(ImError::InvalidArgument(format!(
                "root finding needs a bounded parameter window, got {window}"
            )));
        }
        Ok(Self {
            name: name.into(),
            window,
            increasing,
            residual: Arc::new(residual),
            generate: Arc::new(generate),
        })
    }

    fn theta_of_u(&self, y: f64, u: f64) -> f64 {
        bisect_root(|t| (self.residual)(y, t, u), self.window.lo, self.window.hi).unwrap_or(f64::NAN)
    }

    fn u_of_theta(&self, y: f64, theta: f64) -> f64 {
        let f = |u: f64| (self.residual)(y, theta, u);
        match bisect_root(f, 0.0, 1.0) {
            Some(u) => u,
            // no sign change: the solution for theta is off the unit interval
            None => {
                let at_zero = f(0.0).abs();
                let at_one = f(1.0).abs();
                if at_zero <= at_one { 0.0 } else { 1.0 }
            }
        }
    }

    fn with_map<T>(&self, y: f64, f: impl FnOnce(&MonotoneMap<'_>) -> T) -> T {
        let t = |u: f64| self.theta_of_u(y, u);
        let u = |theta: f64| self.u_of_theta(y, theta);
        f(&MonotoneMap { window: self.window, increasing: self.increasing, theta_of_u: &t, u_of_theta: &u })
    }
}

impl Association for MonotoneAssociation {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn param_space(&self) -> ParamSpace {
        ParamSpace::Real(self.window)
    }

    fn aux(&self) -> AuxDistribution {
        AuxDistribution::Uniform01
    }

    fn residual(&self, y: &Point, theta: &Point, u: &Point) -> Point {
        Point::scalar((self.residual)(y.x(), theta.x(), u.x()))
    }

    fn solve_theta(&self, y: &Point, u: &Point) -> Result<ParamSet> {
        let roots = find_roots(|t| (self.residual)(y.x(), t, u.x()), self.window.lo, self.window.hi, 256)?;
        Ok(ParamSet::Real(IntervalUnion::new(
            roots.into_iter().filter(|r| self.window.contains(*r)).map(Interval::point),
        )))
    }

    fn aux_for(&self, y: &Point, theta: &Point) -> Result<Point> {
        if !self.window.contains(theta.x()) {
            return Err(no_solution(y, theta));
        }
        bisect_root(|u| (self.residual)(y.x(), theta.x(), u), 0.0, 1.0)
            .map(Point::scalar)
            .ok_or_else(|| no_solution(y, theta))
    }

    fn generate(&self, theta: &Point, u: &Point) -> Point {
        Point::scalar((self.generate)(theta.x(), u.x()))
    }

    fn image(&self, y: &Point, s: &AuxSet) -> Result<ParamSet> {
        self.with_map(y.x(), |m| scalar_image(m, s))
    }

    fn preimage(&self, y: &Point, a: &ParamSet) -> Result<AuxSet> {
        self.with_map(y.x(), |m| scalar_preimage(m, a))
    }

    fn pseudo_solve(&self, y: &Point, u: &Point, _norm: Norm, _tie: &TieRule) -> Result<Point> {
        self.with_map(y.x(), |m| m.pseudo_solve(u.x())).map(Point::scalar)
    }
}

/// Bisection for a sign change of `f` on [lo, hi]; `None` without one.
pub fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Option<f64> {
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.is_nan() || fhi.is_nan() || flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || (hi - lo) <= 1e-12 * (1.0 + mid.abs()) {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// All roots of `f` on [lo, hi] found by scanning `cells` subintervals for
/// sign changes and bisecting each bracket.
pub fn find_roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, cells: usize) -> Result<Vec<f64>> {
    let xs: Vec<f64> = (0..=cells).map(|k| lo + (hi - lo) * k as f64 / cells as f64).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    if let Some(k) = fs.iter().position(|v| !v.is_finite()) {
        return Err(ImError::SolverFailure(format!("non-finite residual at {}", xs[k])));
    }
    let mut roots = Vec::new();
    for k in 0..cells {
        if fs[k] == 0.0 {
            roots.push(xs[k]);
        } else if fs[k + 1] != 0.0 && fs[k].signum() != fs[k + 1].signum() {
            let r = bisect_root(&f, xs[k], xs[k + 1])
                .ok_or_else(|| ImError::SolverFailure(format!("bracket [{}, {}] lost", xs[k], xs[k + 1])))?;
            roots.push(r);
        }
    }
    if fs[cells] == 0.0 {
        roots.push(xs[cells]);
    }
    Ok(roots)
}
