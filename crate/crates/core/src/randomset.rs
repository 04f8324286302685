//! Predictive random sets on the auxiliary space.
//!
//! A family is stored through its containment function γ(u) = P(u ∈ 𝒮) and
//! realized in canonical nested form S_α = {u : γ(u) > 1 − α}, S = S_{U*}
//! with U* ~ U(0, 1). The canonical form has the same γ as the family it was
//! built from. Families that are not nested keep their raw draw alongside.
//!
//! Continuous families live on the unit interval, the range of a U(0, 1)
//! auxiliary. Discrete families live on {0, ..., n-1} and carry exact γ values.

use crate::error::{ImError, Result};
use crate::model::{AuxDistribution, AuxSet};
use crate::rng::{open01, substream};
use crate::sets::{Interval, IntervalUnion};
use crate::Prob;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

/// Cells used to invert a general γ on the unit interval.
pub const GRID_CELLS: usize = 1 << 12;

/// Quadrature points behind [`NestedFamily::has_uniform_law`].
pub const UNIFORM_LAW_POINTS: usize = 1 << 14;
const UNIFORM_LAW_TOL: f64 = 1e-3;

type GammaFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Gamma {
    /// Piecewise linear through knots with strictly increasing u from 0 to 1.
    Linear(Vec<(f64, f64)>),
    /// General γ with its values cached on the inversion grid.
    Function(GammaFn, Arc<[f64]>),
    /// Exact γ_k for k = 0..n.
    Table(Vec<Prob>),
}

/// Realization rule of a family that is not in canonical nested form.
#[derive(Clone, Debug, PartialEq)]
pub enum RawDraw {
    /// S = (V/2, 1/2 + V/2) with V ~ U(0, 1).
    Offset,
    /// Explicit outcomes with exact probabilities.
    Outcomes(Vec<(BTreeSet<i64>, Prob)>),
}

#[derive(Clone)]
pub struct NestedFamily {
    name: String,
    gamma: Gamma,
    raw: Option<RawDraw>,
    // law of γ(V) for V ~ U(0, 1), computed on first use
    uniform_law: Arc<OnceLock<bool>>,
}

impl fmt::Debug for NestedFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.gamma {
            Gamma::Linear(k) => format!("linear, {} knots", k.len()),
            Gamma::Function(..) => "function".to_string(),
            Gamma::Table(t) => format!("table, n={}", t.len()),
        };
        write!(f, "NestedFamily({}, {kind}, raw={:?})", self.name, self.raw)
    }
}

/// Named continuous family: `two-sided`, `left`, `right` or `offset`.
pub fn builtin_randomset(name: &str) -> Result<NestedFamily> {
    let knots = match name {
        "two-sided" | "offset" => vec![(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)],
        "left" => vec![(0.0, 1.0), (1.0, 0.0)],
        "right" => vec![(0.0, 0.0), (1.0, 1.0)],
        _ => return Err(ImError::UnknownRandomSet(name.to_string())),
    };
    let mut fam = NestedFamily::from_knots(name, knots)?;
    if name == "offset" {
        fam.raw = Some(RawDraw::Offset);
    }
    Ok(fam)
}

/// Discrete analog of a named family on {0, ..., n-1}.
///
/// `left` has γ_k = 1 − k/n, `right` γ_k = (k+1)/n and `two-sided` ranks
/// points by distance from the center, γ_k = 1 − #{j strictly closer}/n.
/// `offset` draws one of the windows of width ⌈3n/4⌉ uniformly; any two of
/// them intersect but they are not nested.
pub fn builtin_discrete(name: &str, n: u32) -> Result<NestedFamily> {
    if n == 0 {
        return Err(ImError::InvalidArgument("discrete family needs n >= 1".into()));
    }
    let ni = n as i128;
    let table: Vec<Prob> = match name {
        "left" => (0..ni).map(|k| Prob::new(ni - k, ni)).collect(),
        "right" => (0..ni).map(|k| Prob::new(k + 1, ni)).collect(),
        "two-sided" => {
            // twice the distance to the center keeps the comparison integral
            let dist = |k: i128| (2 * k - (ni - 1)).abs();
            (0..ni)
                .map(|k| Prob::new(ni - (0..ni).filter(|&j| dist(j) < dist(k)).count() as i128, ni))
                .collect()
        }
        "offset" => {
            let w = (3 * n).div_ceil(4) as i64;
            let starts = n as i64 - w + 1;
            let outcomes = (0..starts).map(|s| ((s..s + w).collect(), Prob::new(1, starts as i128))).collect();
            return NestedFamily::from_outcomes(name, n, outcomes);
        }
        _ => return Err(ImError::UnknownRandomSet(name.to_string())),
    };
    NestedFamily::from_table(name, table)
}

/// Canonical nested family for an arbitrary γ on the unit interval, inverted
/// on a grid of [`GRID_CELLS`] cells with bisection at crossings.
pub fn nested_from_gamma(name: &str, gamma: impl Fn(f64) -> f64 + Send + Sync + 'static) -> NestedFamily {
    let values: Arc<[f64]> = (0..=GRID_CELLS).map(|j| gamma(j as f64 / GRID_CELLS as f64).clamp(0.0, 1.0)).collect();
    NestedFamily { name: name.to_string(), gamma: Gamma::Function(Arc::new(gamma), values), raw: None, uniform_law: Default::default() }
}

impl NestedFamily {
    /// Named family matched to an auxiliary distribution.
    pub fn for_aux(name: &str, aux: &AuxDistribution) -> Result<Self> {
        match aux {
            AuxDistribution::DiscreteUniform(n) => builtin_discrete(name, *n),
            AuxDistribution::Uniform01 => builtin_randomset(name),
            AuxDistribution::StandardNormal => Err(ImError::Unsupported(
                "random sets for normal auxiliaries; use the confidence-curve or fiducial paths".into(),
            )),
        }
    }

    /// Piecewise linear γ. Knots must have increasing u inside [0, 1];
    /// γ is held constant beyond the first and last knot.
    pub fn from_knots(name: &str, mut knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(ImError::InvalidArgument("a γ table needs at least one knot".into()));
        }
        for w in knots.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(ImError::InvalidArgument(format!("γ knots must increase in u, got {} then {}", w[0].0, w[1].0)));
            }
        }
        for &(u, g) in &knots {
            if !(0.0..=1.0).contains(&u) || !(0.0..=1.0).contains(&g) {
                return Err(ImError::InvalidArgument(format!("γ knot ({u}, {g}) outside the unit square")));
            }
        }
        if knots[0].0 > 0.0 {
            knots.insert(0, (0.0, knots[0].1));
        }
        let last = *knots.last().unwrap();
        if last.0 < 1.0 {
            knots.push((1.0, last.1));
        }
        if knots.len() == 1 {
            knots.push((1.0, knots[0].1));
        }
        Ok(Self { name: name.to_string(), gamma: Gamma::Linear(knots), raw: None, uniform_law: Default::default() })
    }

    /// Reads `u,gamma` rows; blank lines, `#` comments and a header are skipped.
    pub fn from_csv(name: &str, text: &str) -> Result<Self> {
        let mut knots = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed = match fields.as_slice() {
                [u, g] => u.parse::<f64>().ok().zip(g.parse::<f64>().ok()),
                _ => None,
            };
            match parsed {
                Some(k) => knots.push(k),
                None if knots.is_empty() && i == 0 => continue,
                None => return Err(ImError::Parse(format!("γ table line {}: `{line}`", i + 1))),
            }
        }
        Self::from_knots(name, knots)
    }

    /// Discrete family from exact γ_k, k = 0..n.
    pub fn from_table(name: &str, table: Vec<Prob>) -> Result<Self> {
        if table.is_empty() {
            return Err(ImError::InvalidArgument("a γ table needs at least one entry".into()));
        }
        if let Some(g) = table.iter().find(|g| **g < Prob::zero() || **g > Prob::from_integer(1)) {
            return Err(ImError::InvalidArgument(format!("γ value {g} outside [0, 1]")));
        }
        Ok(Self { name: name.to_string(), gamma: Gamma::Table(table), raw: None, uniform_law: Default::default() })
    }

    /// Discrete family given by explicit outcomes; γ is their containment.
    pub fn from_outcomes(name: &str, n: u32, outcomes: Vec<(BTreeSet<i64>, Prob)>) -> Result<Self> {
        let total: Prob = outcomes.iter().map(|(_, p)| *p).sum();
        if total != Prob::from_integer(1) || outcomes.iter().any(|(_, p)| *p < Prob::zero()) {
            return Err(ImError::InvalidArgument(format!("outcome probabilities sum to {total}")));
        }
        if let Some(k) = outcomes.iter().flat_map(|(s, _)| s.iter()).find(|&&k| k < 0 || k >= n as i64) {
            return Err(ImError::InvalidArgument(format!("outcome point {k} outside 0..{n}")));
        }
        let table = (0..n as i64)
            .map(|k| outcomes.iter().filter(|(s, _)| s.contains(&k)).map(|(_, p)| *p).sum())
            .collect();
        Ok(Self { name: name.to_string(), gamma: Gamma::Table(table), raw: Some(RawDraw::Outcomes(outcomes)), uniform_law: Default::default() })
    }

    /// γ ≡ c on the unit interval; c = 1 gives the vacuous family.
    pub fn constant(c: f64) -> Self {
        Self::from_knots(&format!("constant:{c}"), vec![(0.0, c), (1.0, c)]).expect("constant γ within [0, 1]")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.gamma, Gamma::Table(_))
    }

    /// Whether draws follow the canonical nesting S_{U*}.
    pub fn is_canonical(&self) -> bool {
        self.raw.is_none()
    }

    pub fn raw(&self) -> Option<&RawDraw> {
        self.raw.as_ref()
    }

    /// The canonical nested family with the same γ.
    pub fn canonical(&self) -> NestedFamily {
        Self { name: format!("{}/nested", self.name), gamma: self.gamma.clone(), raw: None, uniform_law: self.uniform_law.clone() }
    }

    /// Whether γ(V) ~ U(0, 1) for V ~ U(0, 1), checked deterministically on
    /// [`UNIFORM_LAW_POINTS`] midpoints. Discrete families compare exactly
    /// at the attained values of γ.
    pub fn has_uniform_law(&self) -> bool {
        *self.uniform_law.get_or_init(|| match &self.gamma {
            Gamma::Table(t) => {
                let n = t.len() as i128;
                t.iter().all(|g| Prob::new(t.iter().filter(|h| *h <= g).count() as i128, n) == *g)
            }
            _ => {
                let m = UNIFORM_LAW_POINTS;
                let mut g: Vec<f64> = (0..m).map(|j| self.gamma((j as f64 + 0.5) / m as f64)).collect();
                g.sort_by(f64::total_cmp);
                let ks = g
                    .iter()
                    .enumerate()
                    .map(|(i, x)| ((i + 1) as f64 / m as f64 - x).max(x - i as f64 / m as f64))
                    .fold(0.0, f64::max);
                ks <= UNIFORM_LAW_TOL
            }
        })
    }

    /// Size of the discrete auxiliary space, if any.
    pub fn support_size(&self) -> Option<usize> {
        match &self.gamma {
            Gamma::Table(t) => Some(t.len()),
            _ => None,
        }
    }

    pub fn gamma(&self, u: f64) -> f64 {
        match &self.gamma {
            Gamma::Linear(k) => linear_at(k, u),
            Gamma::Function(f, _) => f(u).clamp(0.0, 1.0),
            Gamma::Table(_) => self.gamma_exact(u).map_or(0.0, to_f64),
        }
    }

    /// Exact γ at a discrete auxiliary point.
    pub fn gamma_exact(&self, u: f64) -> Option<Prob> {
        let Gamma::Table(t) = &self.gamma else { return None };
        if u.fract() != 0.0 || u < 0.0 || u >= t.len() as f64 {
            return Some(Prob::zero());
        }
        Some(t[u as usize])
    }

    pub fn gamma_table(&self) -> Option<&[Prob]> {
        match &self.gamma {
            Gamma::Table(t) => Some(t),
            _ => None,
        }
    }

    /// S_α = {u : γ(u) > 1 − α}.
    pub fn level_set(&self, alpha: f64) -> AuxSet {
        let t = 1.0 - alpha;
        match &self.gamma {
            Gamma::Table(tab) => AuxSet::Discrete(
                (0..tab.len() as i64).filter(|&k| to_f64(tab[k as usize]) > t).collect(),
            ),
            _ => AuxSet::Continuous(self.superlevel(t, true)),
        }
    }

    /// S_α for an exact level; discrete families only.
    pub fn level_set_exact(&self, alpha: Prob) -> Option<BTreeSet<i64>> {
        let Gamma::Table(tab) = &self.gamma else { return None };
        let t = Prob::from_integer(1) - alpha;
        Some((0..tab.len() as i64).filter(|&k| tab[k as usize] > t).collect())
    }

    /// S_α for α > 0; at α = 0 the minimal set {γ = 1} common to all draws.
    pub fn principle_nested_set(&self, alpha: f64) -> AuxSet {
        if alpha > 0.0 {
            return self.level_set(alpha);
        }
        match &self.gamma {
            Gamma::Table(tab) => AuxSet::Discrete(
                (0..tab.len() as i64).filter(|&k| tab[k as usize] == Prob::from_integer(1)).collect(),
            ),
            _ => AuxSet::Continuous(self.superlevel(1.0, false)),
        }
    }

    /// The realization for a given uniform index v.
    pub fn draw_at(&self, v: f64) -> AuxSet {
        match &self.raw {
            None => self.level_set(v),
            Some(RawDraw::Offset) => AuxSet::Continuous(Interval::open(0.5 * v, 0.5 + 0.5 * v).into()),
            Some(RawDraw::Outcomes(outs)) => {
                let mut acc = 0.0;
                for (s, p) in outs {
                    acc += to_f64(*p);
                    if v < acc {
                        return AuxSet::Discrete(s.clone());
                    }
                }
                AuxSet::Discrete(outs.last().map(|(s, _)| s.clone()).unwrap_or_default())
            }
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> AuxSet {
        self.draw_at(open01(rng))
    }

    /// All realizations of a discrete family with their exact probabilities.
    pub fn outcomes(&self) -> Option<Vec<(BTreeSet<i64>, Prob)>> {
        if let Some(RawDraw::Outcomes(o)) = &self.raw {
            return Some(o.clone());
        }
        let Gamma::Table(tab) = &self.gamma else { return None };
        let mut levels: Vec<Prob> = tab.iter().copied().filter(|g| !g.is_zero()).collect();
        levels.sort_by(|a, b| b.cmp(a));
        levels.dedup();
        let mut out = Vec::new();
        let top = levels.first().copied().unwrap_or_else(Prob::zero);
        if top < Prob::from_integer(1) {
            out.push((BTreeSet::new(), Prob::from_integer(1) - top));
        }
        for (j, &g) in levels.iter().enumerate() {
            let next = levels.get(j + 1).copied().unwrap_or_else(Prob::zero);
            let set = (0..tab.len() as i64).filter(|&k| tab[k as usize] >= g).collect();
            out.push((set, g - next));
        }
        Some(out)
    }

    /// sup{γ(u) : u ∈ [0, 1] ∖ w}, 0 when w covers the unit interval.
    pub fn sup_gamma_outside(&self, w: &IntervalUnion) -> f64 {
        let rest = IntervalUnion::from(Interval::closed(0.0, 1.0)).difference(w);
        rest.parts().iter().map(|i| self.sup_on(i)).fold(0.0, f64::max)
    }

    /// Exact sup of γ_k over k ∉ w.
    pub fn sup_gamma_outside_exact(&self, w: &BTreeSet<i64>) -> Option<Prob> {
        let Gamma::Table(tab) = &self.gamma else { return None };
        Some(
            (0..tab.len() as i64)
                .filter(|k| !w.contains(k))
                .map(|k| tab[k as usize])
                .max()
                .unwrap_or_else(Prob::zero),
        )
    }

    fn sup_on(&self, i: &Interval) -> f64 {
        match &self.gamma {
            Gamma::Linear(k) => {
                let inner = k.iter().filter(|(u, _)| *u > i.lo && *u < i.hi).map(|(_, g)| *g);
                inner.chain([linear_at(k, i.lo), linear_at(k, i.hi)]).fold(0.0, f64::max)
            }
            Gamma::Function(f, grid) => {
                let n = GRID_CELLS as f64;
                let lo = (i.lo * n).ceil().max(0.0) as usize;
                let hi = ((i.hi * n).floor().min(n)) as usize;
                let inner = (lo..=hi).filter(|&j| i.contains(j as f64 / n)).map(|j| grid[j]);
                inner.chain([f(i.lo).clamp(0.0, 1.0), f(i.hi).clamp(0.0, 1.0)]).fold(0.0, f64::max)
            }
            Gamma::Table(_) => 0.0,
        }
    }

    /// {u : γ(u) > t} or {u : γ(u) ≥ t} on the unit interval.
    fn superlevel(&self, t: f64, strict: bool) -> IntervalUnion {
        let pass = |g: f64| if strict { g > t } else { g >= t };
        let segments: Vec<(f64, f64, f64, f64)> = match &self.gamma {
            Gamma::Linear(k) => k.windows(2).map(|w| (w[0].0, w[1].0, w[0].1, w[1].1)).collect(),
            Gamma::Function(_, grid) => (0..GRID_CELLS)
                .map(|j| (j as f64 / GRID_CELLS as f64, (j + 1) as f64 / GRID_CELLS as f64, grid[j], grid[j + 1]))
                .collect(),
            Gamma::Table(_) => return IntervalUnion::empty(),
        };
        let crossing = |a: f64, b: f64, ga: f64, gb: f64| -> f64 {
            match &self.gamma {
                Gamma::Function(f, _) => {
                    // keep the side of a that matches ga
                    let (mut lo, mut hi) = (a, b);
                    let up = pass(ga);
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + hi);
                        if pass(f(mid).clamp(0.0, 1.0)) == up {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    if up { lo } else { hi }
                }
                _ => a + (ga - t) / (ga - gb) * (b - a),
            }
        };
        let parts = segments.into_iter().filter_map(|(a, b, ga, gb)| match (pass(ga), pass(gb)) {
            (true, true) => Some(Interval::closed(a, b)),
            (true, false) => Some(Interval::new(a, crossing(a, b, ga, gb), true, !strict)),
            (false, true) => Some(Interval::new(crossing(a, b, ga, gb), b, !strict, true)),
            (false, false) => None,
        });
        IntervalUnion::new(parts)
    }
}

fn linear_at(knots: &[(f64, f64)], u: f64) -> f64 {
    if !(0.0..=1.0).contains(&u) {
        return 0.0;
    }
    let i = knots.partition_point(|(x, _)| *x <= u);
    if i == 0 {
        return knots[0].1;
    }
    if i == knots.len() {
        return knots[i - 1].1;
    }
    let ((a, ga), (b, gb)) = (knots[i - 1], knots[i]);
    ga + (gb - ga) * (u - a) / (b - a)
}

pub(crate) fn to_f64(p: Prob) -> f64 {
    p.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidityRow {
    pub alpha: f64,
    /// P(γ(U★) ≤ α), estimated or exact.
    pub estimate: f64,
    pub se: f64,
    pub violated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidityReport {
    pub family: String,
    pub exact: bool,
    pub n_mc: usize,
    pub rows: Vec<ValidityRow>,
    /// Kolmogorov distance between the law of γ(U★) and U(0, 1); on
    /// discrete auxiliaries only the attained values of γ are compared.
    pub ks_statistic: f64,
    pub uniform: bool,
}

impl ValidityReport {
    pub fn valid(&self) -> bool {
        self.rows.iter().all(|r| !r.violated)
    }
}

/// Checks P(γ(U★) ≤ α) ≤ α on a grid of α, with U★ drawn from `aux`.
///
/// Discrete auxiliaries are enumerated exactly. Otherwise a violation is
/// flagged when the estimate exceeds α by three null standard errors, and
/// continuous auxiliaries enter γ through their CDF.
pub fn check_validity_condition(
    fam: &NestedFamily,
    aux: &AuxDistribution,
    n_mc: usize,
    alphas: &[f64],
    seed: u64,
) -> ValidityReport {
    if let (Some(tab), AuxDistribution::DiscreteUniform(n)) = (fam.gamma_table(), aux) {
        let n = *n as i128;
        let at = |a: Prob| Prob::new(tab.iter().filter(|g| **g <= a).count() as i128, n);
        let rows = alphas
            .iter()
            .map(|&alpha| {
                let p = tab.iter().filter(|g| to_f64(**g) <= alpha).count() as f64 / n as f64;
                ValidityRow { alpha, estimate: p, se: 0.0, violated: p > alpha }
            })
            .collect();
        let ks = tab.iter().map(|g| (to_f64(at(*g)) - to_f64(*g)).abs()).fold(0.0, f64::max);
        let uniform = tab.iter().all(|g| at(*g) == *g);
        return ValidityReport { family: fam.name.clone(), exact: true, n_mc: 0, rows, ks_statistic: ks, uniform };
    }
    let mut rng = substream(seed, 0);
    let mut g: Vec<f64> = (0..n_mc).map(|_| fam.gamma(aux.cdf(aux.sample(&mut rng)))).collect();
    g.sort_by(f64::total_cmp);
    let n = n_mc as f64;
    let rows = alphas
        .iter()
        .map(|&alpha| {
            let p = g.partition_point(|x| *x <= alpha) as f64 / n;
            let se = (alpha * (1.0 - alpha) / n).sqrt();
            ValidityRow { alpha, estimate: p, se, violated: p > alpha + 3.0 * se }
        })
        .collect();
    let ks = g
        .iter()
        .enumerate()
        .map(|(i, x)| ((i + 1) as f64 / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max);
    ValidityReport {
        family: fam.name.clone(),
        exact: false,
        n_mc,
        rows,
        ks_statistic: ks,
        uniform: ks <= 1.63 / n.sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cont(s: &AuxSet) -> &IntervalUnion {
        match s {
            AuxSet::Continuous(u) => u,
            _ => panic!("expected a continuous set"),
        }
    }

    #[test]
    fn builtin_gamma_values() {
        let two = builtin_randomset("two-sided").unwrap();
        assert_eq!(two.gamma(0.5), 1.0);
        assert!((two.gamma(0.975) - 0.05).abs() < 1e-12);
        assert!((builtin_randomset("left").unwrap().gamma(0.3) - 0.7).abs() < 1e-15);
        assert!((builtin_randomset("right").unwrap().gamma(0.3) - 0.3).abs() < 1e-15);
        assert!(matches!(builtin_randomset("square"), Err(ImError::UnknownRandomSet(_))));
    }

    #[test]
    fn containment_frequency_matches_gamma() {
        // P(u ∈ S) from 1e5 draws, for nested and raw draws alike
        for name in ["two-sided", "left", "right", "offset"] {
            let fam = builtin_randomset(name).unwrap();
            let mut rng = substream(40, 0);
            let draws: Vec<AuxSet> = (0..100_000).map(|_| fam.draw(&mut rng)).collect();
            for j in 0..=10 {
                let u = j as f64 / 10.0;
                let p = draws.iter().filter(|s| s.contains(u)).count() as f64 / draws.len() as f64;
                let g = fam.gamma(u);
                let se = (g * (1.0 - g) / draws.len() as f64).sqrt().max(1e-9);
                assert!((p - g).abs() <= 3.0 * se + 1e-12, "{name} u={u}: {p} vs {g}");
            }
        }
    }

    #[test]
    fn level_sets_of_builtins() {
        let two = builtin_randomset("two-sided").unwrap();
        let s = two.level_set(0.5);
        assert_eq!(cont(&s).to_string(), "(0.25,0.75)");
        let s = two.principle_nested_set(0.95);
        let i = cont(&s).parts()[0];
        assert!((i.lo - 0.025).abs() < 1e-12 && (i.hi - 0.975).abs() < 1e-12 && !i.lo_closed && !i.hi_closed);
        assert_eq!(cont(&two.principle_nested_set(0.0)).to_string(), "[0.5,0.5]");
        let left = builtin_randomset("left").unwrap();
        let s = left.principle_nested_set(0.3);
        let i = cont(&s).parts()[0];
        assert!(i.lo == 0.0 && i.lo_closed && (i.hi - 0.3).abs() < 1e-15 && !i.hi_closed);
        let vac = NestedFamily::constant(1.0);
        for a in [0.01, 0.5, 1.0] {
            assert_eq!(cont(&vac.level_set(a)).to_string(), "[0,1]");
        }
    }

    #[test]
    fn grid_inversion_agrees_with_closed_form() {
        let f = nested_from_gamma("tent", |u| 1.0 - (2.0 * u - 1.0).abs());
        for a in [0.1, 0.5, 0.95] {
            let i = cont(&f.level_set(a)).parts()[0];
            assert!((i.lo - (1.0 - a) / 2.0).abs() < 1e-12, "{a}: {}", i.lo);
            assert!((i.hi - (1.0 + a) / 2.0).abs() < 1e-12);
        }
        let w: IntervalUnion = Interval::closed(0.2, 0.6).into();
        assert!((f.sup_gamma_outside(&w) - 0.8).abs() < 1e-3);
    }

    #[test]
    fn discrete_table_level_set() {
        let t = [4, 3, 2, 1].map(|k| Prob::new(k, 4)).to_vec();
        let fam = NestedFamily::from_table("t", t).unwrap();
        assert_eq!(fam.level_set(0.6), AuxSet::Discrete([0, 1, 2].into()));
        assert_eq!(fam.level_set_exact(Prob::new(3, 5)).unwrap(), [0, 1, 2].into());
        let outs = fam.outcomes().unwrap();
        assert_eq!(outs.len(), 4);
        let total: Prob = outs.iter().map(|(_, p)| *p).sum();
        assert_eq!(total, Prob::from_integer(1));
    }

    #[test]
    fn discrete_builtins_are_valid() {
        for n in 1..=12 {
            for name in ["left", "right", "two-sided", "offset"] {
                let fam = builtin_discrete(name, n).unwrap();
                let alphas: Vec<f64> = (0..=n).map(|j| j as f64 / n as f64).collect();
                let rep = check_validity_condition(&fam, &AuxDistribution::DiscreteUniform(n), 0, &alphas, 0);
                assert!(rep.valid(), "{name} n={n}: {rep:?}");
                // containment of the canonical outcomes reproduces γ exactly
                let outs = fam.canonical().outcomes().unwrap();
                for k in 0..n as i64 {
                    let p: Prob = outs.iter().filter(|(s, _)| s.contains(&k)).map(|(_, p)| *p).sum();
                    assert_eq!(Some(p), fam.gamma_exact(k as f64));
                }
            }
        }
        let off = builtin_discrete("offset", 8).unwrap().outcomes().unwrap();
        for (a, _) in &off {
            for (b, _) in &off {
                assert!(!a.is_disjoint(b));
            }
        }
    }

    #[test]
    fn validity_condition_reports() {
        let alphas: Vec<f64> = (1..20).map(|j| j as f64 / 20.0).collect();
        let two = builtin_randomset("two-sided").unwrap();
        let rep = check_validity_condition(&two, &AuxDistribution::Uniform01, 100_000, &alphas, 1);
        assert!(rep.valid() && rep.uniform, "{rep:?}");
        let vac = NestedFamily::constant(1.0);
        let rep = check_validity_condition(&vac, &AuxDistribution::Uniform01, 10_000, &alphas, 1);
        assert!(rep.valid() && !rep.uniform);
        assert!(rep.rows.iter().all(|r| r.estimate == 0.0));
        // γ = u² has P(γ(U) ≤ α) = √α
        let sq = nested_from_gamma("square", |u| u * u);
        let rep = check_validity_condition(&sq, &AuxDistribution::Uniform01, 100_000, &alphas, 1);
        for r in &rep.rows {
            assert!(r.violated, "α={}", r.alpha);
            assert!((r.estimate - r.alpha.sqrt()).abs() < 0.01);
        }
    }

    #[test]
    fn csv_tables() {
        let fam = NestedFamily::from_csv("t", "u,gamma\n0,0\n0.5,1\n1,0\n").unwrap();
        assert!((fam.gamma(0.25) - 0.5).abs() < 1e-15);
        assert!(NestedFamily::from_csv("t", "0,0\n0.5,2\n").is_err());
        assert!(NestedFamily::from_csv("t", "0.5,0\n0.2,1\n").is_err());
        let flat = NestedFamily::from_csv("t", "0.5,0.4").unwrap();
        assert_eq!(flat.gamma(0.0), 0.4);
    }

    proptest! {
        #[test]
        fn nesting_is_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0, which in 0usize..4) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let fam = match which {
                0 => builtin_randomset("two-sided").unwrap(),
                1 => builtin_randomset("left").unwrap(),
                2 => builtin_randomset("right").unwrap(),
                _ => nested_from_gamma("bump", |u| (std::f64::consts::PI * u).sin().powi(2)),
            };
            prop_assert!(fam.level_set(lo).is_subset(&fam.level_set(hi)));
            prop_assert!(fam.principle_nested_set(0.0).is_subset(&fam.level_set(hi.max(1e-9))));
        }

        #[test]
        fn nested_draws_intersect(v in 1e-9f64..1.0, w in 1e-9f64..1.0) {
            let fam = builtin_randomset("two-sided").unwrap();
            prop_assert!(!fam.draw_at(v).intersect(&fam.draw_at(w)).is_empty());
        }

        #[test]
        fn discrete_nesting(n in 1u32..12, a in 0i128..=60, b in 0i128..=60) {
            let fam = builtin_discrete("two-sided", n).unwrap();
            let (lo, hi) = (Prob::new(a.min(b), 60), Prob::new(a.max(b), 60));
            prop_assert!(fam.level_set_exact(lo).unwrap().is_subset(&fam.level_set_exact(hi).unwrap()));
        }
    }
}
