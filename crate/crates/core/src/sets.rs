//! Exact set algebra for parameter and auxiliary spaces.
//!
//! Real subsets are finite unions of intervals with explicit open/closed
//! endpoints, kept in a normal form (sorted, pairwise disjoint, no two parts
//! that could be merged). Integer subsets are finite or cofinite, so
//! complements stay exact. Both support union, intersection, complement and
//! subset tests without approximation; belief computations depend on that.

use crate::error::{ImError, Result};
use crate::point::Point;
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Self {
        Self {
            lo,
            hi,
            lo_closed: lo_closed && lo.is_finite(),
            hi_closed: hi_closed && hi.is_finite(),
        }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, false, false)
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, true, true)
    }

    pub fn point(x: f64) -> Self {
        Self::closed(x, x)
    }

    pub fn real_line() -> Self {
        Self::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_nan()
            || self.hi.is_nan()
            || self.lo > self.hi
            || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    pub fn length(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.hi - self.lo
        }
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_closed) = match self.lo.partial_cmp(&other.lo) {
            Some(Ordering::Greater) => (self.lo, self.lo_closed),
            Some(Ordering::Less) => (other.lo, other.lo_closed),
            _ => (self.lo, self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Less) => (self.hi, self.hi_closed),
            Some(Ordering::Greater) => (other.hi, other.hi_closed),
            _ => (self.hi, self.hi_closed && other.hi_closed),
        };
        Interval::new(lo, hi, lo_closed, hi_closed)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// A finite union of real intervals in normal form.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IntervalUnion {
    parts: Vec<Interval>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn real_line() -> Self {
        Self::from(Interval::real_line())
    }

    pub fn new(parts: impl IntoIterator<Item = Interval>) -> Self {
        let mut parts: Vec<Interval> = parts.into_iter().filter(|i| !i.is_empty()).collect();
        parts.sort_by(|a, b| {
            a.lo.partial_cmp(&b.lo)
                .unwrap_or(Ordering::Equal)
                .then_with(|| b.lo_closed.cmp(&a.lo_closed))
        });
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for next in parts {
            if let Some(cur) = merged.last_mut() {
                let touches = next.lo < cur.hi
                    || (next.lo == cur.hi && (cur.hi_closed || next.lo_closed));
                if touches {
                    match next.hi.partial_cmp(&cur.hi) {
                        Some(Ordering::Greater) => {
                            cur.hi = next.hi;
                            cur.hi_closed = next.hi_closed;
                        }
                        Some(Ordering::Equal) => cur.hi_closed |= next.hi_closed,
                        _ => {}
                    }
                    continue;
                }
            }
            merged.push(next);
        }
        Self { parts: merged }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.parts.iter().any(|i| i.contains(x))
    }

    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        IntervalUnion::new(self.parts.iter().chain(other.parts.iter()).copied())
    }

    pub fn intersect(&self, other: &IntervalUnion) -> IntervalUnion {
        let mut out = Vec::new();
        for a in &self.parts {
            for b in &other.parts {
                let c = a.intersect(b);
                if !c.is_empty() {
                    out.push(c);
                }
            }
        }
        IntervalUnion::new(out)
    }

    /// Complement within the real line.
    pub fn complement(&self) -> IntervalUnion {
        let mut out = Vec::with_capacity(self.parts.len() + 1);
        let mut lo = f64::NEG_INFINITY;
        let mut lo_closed = false;
        for p in &self.parts {
            out.push(Interval::new(lo, p.lo, lo_closed, !p.lo_closed));
            lo = p.hi;
            lo_closed = !p.hi_closed;
        }
        out.push(Interval::new(lo, f64::INFINITY, lo_closed, false));
        IntervalUnion::new(out)
    }

    pub fn difference(&self, other: &IntervalUnion) -> IntervalUnion {
        self.intersect(&other.complement())
    }

    pub fn is_subset(&self, other: &IntervalUnion) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &IntervalUnion) -> bool {
        self.intersect(other).is_empty()
    }

    /// Lebesgue measure.
    pub fn length(&self) -> f64 {
        self.parts.iter().map(Interval::length).sum()
    }

    pub fn inf(&self) -> Option<f64> {
        self.parts.first().map(|i| i.lo)
    }

    pub fn sup(&self) -> Option<f64> {
        self.parts.last().map(|i| i.hi)
    }

    pub fn is_bounded(&self) -> bool {
        self.inf().is_none_or(f64::is_finite) && self.sup().is_none_or(f64::is_finite)
    }

    pub fn is_real_line(&self) -> bool {
        matches!(self.parts.as_slice(), [i] if i.lo == f64::NEG_INFINITY && i.hi == f64::INFINITY)
    }
}

impl From<Interval> for IntervalUnion {
    fn from(i: Interval) -> Self {
        IntervalUnion::new([i])
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("{}");
        }
        for (k, p) in self.parts.iter().enumerate() {
            if k > 0 {
                f.write_str("|")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// A finite or cofinite subset of the integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntSet {
    Finite(BTreeSet<i64>),
    /// Every integer except the listed ones.
    Cofinite(BTreeSet<i64>),
}

impl IntSet {
    pub fn empty() -> Self {
        IntSet::Finite(BTreeSet::new())
    }

    pub fn all() -> Self {
        IntSet::Cofinite(BTreeSet::new())
    }

    pub fn finite(values: impl IntoIterator<Item = i64>) -> Self {
        IntSet::Finite(values.into_iter().collect())
    }

    pub fn contains(&self, k: i64) -> bool {
        match self {
            IntSet::Finite(s) => s.contains(&k),
            IntSet::Cofinite(s) => !s.contains(&k),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, IntSet::Finite(s) if s.is_empty())
    }

    pub fn complement(&self) -> IntSet {
        match self {
            IntSet::Finite(s) => IntSet::Cofinite(s.clone()),
            IntSet::Cofinite(s) => IntSet::Finite(s.clone()),
        }
    }

    pub fn union(&self, other: &IntSet) -> IntSet {
        use IntSet::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a | b),
            (Cofinite(a), Cofinite(b)) => Cofinite(a & b),
            (Finite(f), Cofinite(c)) | (Cofinite(c), Finite(f)) => Cofinite(c - f),
        }
    }

    pub fn intersect(&self, other: &IntSet) -> IntSet {
        self.complement().union(&other.complement()).complement()
    }

    pub fn is_subset(&self, other: &IntSet) -> bool {
        use IntSet::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.is_subset(b),
            (Finite(a), Cofinite(b)) => a.is_disjoint(b),
            (Cofinite(_), Finite(_)) => false,
            (Cofinite(a), Cofinite(b)) => b.is_subset(a),
        }
    }

    pub fn is_disjoint(&self, other: &IntSet) -> bool {
        self.intersect(other).is_empty()
    }

    pub fn len(&self) -> Option<usize> {
        match self {
            IntSet::Finite(s) => Some(s.len()),
            IntSet::Cofinite(_) => None,
        }
    }
}

impl fmt::Display for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |s: &BTreeSet<i64>| s.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",");
        match self {
            IntSet::Finite(s) => write!(f, "{{{}}}", list(s)),
            IntSet::Cofinite(s) if s.is_empty() => f.write_str("Z"),
            IntSet::Cofinite(s) => write!(f, "Z\\{{{}}}", list(s)),
        }
    }
}

/// Membership test for sets that have no exact representation.
#[derive(Clone)]
pub struct Predicate {
    label: String,
    test: Arc<dyn Fn(&Point) -> bool + Send + Sync>,
}

impl Predicate {
    pub fn new(label: impl Into<String>, test: impl Fn(&Point) -> bool + Send + Sync + 'static) -> Self {
        Self { label: label.into(), test: Arc::new(test) }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn test(&self, p: &Point) -> bool {
        (self.test)(p)
    }
}

impl fmt::Debug for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Predicate({})", self.label)
    }
}

/// The kind of space a model's parameter lives in.
#[derive(Clone, Debug, PartialEq)]
pub enum ParamSpace {
    /// A real interval (the parameter window).
    Real(Interval),
    Integer,
    /// The plane, as a product of two windows.
    Plane(Interval, Interval),
}

impl ParamSpace {
    pub fn full_set(&self) -> ParamSet {
        match self {
            ParamSpace::Real(w) => ParamSet::Real(IntervalUnion::from(*w)),
            ParamSpace::Integer => ParamSet::Integer(IntSet::all()),
            ParamSpace::Plane(a, b) => {
                let (a, b) = (*a, *b);
                ParamSet::Predicate(Predicate::new(format!("{a}x{b}"), move |p| {
                    a.contains(p.get(0)) && b.contains(p.get(1))
                }))
            }
        }
    }
}

/// A subset of parameter space: an assertion, or a realized set Θ_y(S).
#[derive(Clone, Debug)]
pub enum ParamSet {
    Real(IntervalUnion),
    Integer(IntSet),
    /// Finitely many points of the plane.
    Points(Vec<Point>),
    Predicate(Predicate),
}

impl ParamSet {
    pub fn empty_in(space: &ParamSpace) -> ParamSet {
        match space {
            ParamSpace::Real(_) => ParamSet::Real(IntervalUnion::empty()),
            ParamSpace::Integer => ParamSet::Integer(IntSet::empty()),
            ParamSpace::Plane(..) => ParamSet::Points(Vec::new()),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match self {
            ParamSet::Real(u) => p.dim() == 1 && u.contains(p.x()),
            ParamSet::Integer(s) => {
                p.dim() == 1 && p.x().fract() == 0.0 && s.contains(p.x() as i64)
            }
            ParamSet::Points(v) => v.contains(p),
            ParamSet::Predicate(pr) => pr.test(p),
        }
    }

    /// Emptiness is only decidable for exact representations.
    pub fn is_empty(&self) -> Result<bool> {
        match self {
            ParamSet::Real(u) => Ok(u.is_empty()),
            ParamSet::Integer(s) => Ok(s.is_empty()),
            ParamSet::Points(v) => Ok(v.is_empty()),
            ParamSet::Predicate(p) => Err(ImError::Unsupported(format!(
                "emptiness of predicate set `{}`",
                p.label()
            ))),
        }
    }

    pub fn complement(&self) -> ParamSet {
        match self {
            ParamSet::Real(u) => ParamSet::Real(u.complement()),
            ParamSet::Integer(s) => ParamSet::Integer(s.complement()),
            other => {
                let inner = other.clone();
                ParamSet::Predicate(Predicate::new(format!("not {}", other), move |p| {
                    !inner.contains(p)
                }))
            }
        }
    }

    pub fn union(&self, other: &ParamSet) -> Result<ParamSet> {
        use ParamSet::*;
        Ok(match (self, other) {
            (Real(a), Real(b)) => Real(a.union(b)),
            (Integer(a), Integer(b)) => Integer(a.union(b)),
            (Points(a), Points(b)) => Points(sorted_points(a.iter().chain(b.iter()).copied())),
            (a, b) if a.is_planar() && b.is_planar() => {
                let (a, b) = (a.clone(), b.clone());
                Predicate(self::Predicate::new(format!("{a} or {b}"), move |p| {
                    a.contains(p) || b.contains(p)
                }))
            }
            (a, b) => return Err(mismatch(a, b)),
        })
    }

    pub fn intersect(&self, other: &ParamSet) -> Result<ParamSet> {
        use ParamSet::*;
        Ok(match (self, other) {
            (Real(a), Real(b)) => Real(a.intersect(b)),
            (Integer(a), Integer(b)) => Integer(a.intersect(b)),
            (Points(a), b) if b.is_planar() => Points(a.iter().filter(|p| b.contains(p)).copied().collect()),
            (a, Points(b)) if a.is_planar() => Points(b.iter().filter(|p| a.contains(p)).copied().collect()),
            (a, b) if a.is_planar() && b.is_planar() => {
                let (a, b) = (a.clone(), b.clone());
                Predicate(self::Predicate::new(format!("{a} and {b}"), move |p| {
                    a.contains(p) && b.contains(p)
                }))
            }
            (a, b) => return Err(mismatch(a, b)),
        })
    }

    /// Exact subset test; fails for predicate left-hand sides.
    pub fn is_subset(&self, other: &ParamSet) -> Result<bool> {
        use ParamSet::*;
        match (self, other) {
            (Real(a), Real(b)) => Ok(a.is_subset(b)),
            (Integer(a), Integer(b)) => Ok(a.is_subset(b)),
            (Points(a), b) if b.is_planar() => Ok(a.iter().all(|p| b.contains(p))),
            (Predicate(p), _) => Err(ImError::Unsupported(format!(
                "subset test with predicate set `{}` on the left",
                p.label()
            ))),
            (a, b) => Err(mismatch(a, b)),
        }
    }

    pub fn is_disjoint(&self, other: &ParamSet) -> Result<bool> {
        self.intersect(other)?.is_empty()
    }

    fn is_planar(&self) -> bool {
        matches!(self, ParamSet::Points(_) | ParamSet::Predicate(_))
    }

    pub fn as_real(&self) -> Option<&IntervalUnion> {
        match self {
            ParamSet::Real(u) => Some(u),
            _ => None,
        }
    }

    pub fn as_integer(&self) -> Option<&IntSet> {
        match self {
            ParamSet::Integer(s) => Some(s),
            _ => None,
        }
    }

    /// Parses an assertion string in the given space.
    ///
    /// Real sets are `|`-separated intervals such as `(-inf,0]|(2,3)`;
    /// finite sets are written `{3,4,5}`. `{}` is the empty set and `Z` the
    /// whole integer line. A finite set in a real space becomes a union of
    /// degenerate closed intervals.
    pub fn parse(s: &str, space: &ParamSpace) -> Result<ParamSet> {
        let s = s.trim();
        if s.starts_with('{') || s.starts_with('Z') {
            let ints = parse_intset(s)?;
            return match space {
                ParamSpace::Integer => Ok(ParamSet::Integer(ints)),
                ParamSpace::Real(_) => match ints {
                    IntSet::Finite(v) => Ok(ParamSet::Real(IntervalUnion::new(
                        v.into_iter().map(|k| Interval::point(k as f64)),
                    ))),
                    IntSet::Cofinite(_) => Err(ImError::Parse(format!("`{s}` is not a real set"))),
                },
                ParamSpace::Plane(..) => Err(ImError::Parse(format!(
                    "`{s}`: planar assertions cannot be written as strings"
                ))),
            };
        }
        let union = parse_interval_union(s)?;
        match space {
            ParamSpace::Real(_) => Ok(ParamSet::Real(union)),
            ParamSpace::Integer => {
                // integers inside the intervals, which must then be bounded
                if !union.is_bounded() {
                    return Err(ImError::Parse(format!(
                        "`{s}`: unbounded interval in an integer space"
                    )));
                }
                let mut v = BTreeSet::new();
                for p in union.parts() {
                    let mut k = p.lo.ceil() as i64;
                    while (k as f64) <= p.hi {
                        if p.contains(k as f64) {
                            v.insert(k);
                        }
                        k += 1;
                    }
                }
                Ok(ParamSet::Integer(IntSet::Finite(v)))
            }
            ParamSpace::Plane(..) => Err(ImError::Parse(format!(
                "`{s}`: planar assertions cannot be written as strings"
            ))),
        }
    }
}

impl fmt::Display for ParamSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamSet::Real(u) => write!(f, "{u}"),
            ParamSet::Integer(s) => write!(f, "{s}"),
            ParamSet::Points(v) => {
                let items: Vec<String> = v.iter().map(|p| p.to_string()).collect();
                write!(f, "{{{}}}", items.join(","))
            }
            ParamSet::Predicate(p) => write!(f, "<{}>", p.label()),
        }
    }
}

fn mismatch(a: &ParamSet, b: &ParamSet) -> ImError {
    ImError::InvalidArgument(format!("sets `{a}` and `{b}` live in different spaces"))
}

fn sorted_points(it: impl Iterator<Item = Point>) -> Vec<Point> {
    let mut v: Vec<Point> = it.collect();
    v.sort_by(|a, b| {
        a.as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    });
    v.dedup();
    v
}

fn parse_number(s: &str) -> Result<f64> {
    let t = s.trim();
    let v = match t {
        "inf" | "+inf" | "infinity" | "Inf" => f64::INFINITY,
        "-inf" | "-infinity" | "-Inf" => f64::NEG_INFINITY,
        _ => t.parse::<f64>().map_err(|_| ImError::Parse(format!("bad number `{t}`")))?,
    };
    if v.is_nan() {
        return Err(ImError::Parse("NaN endpoint".into()));
    }
    Ok(v)
}

pub fn parse_interval(s: &str) -> Result<Interval> {
    let t = s.trim();
    let err = || ImError::Parse(format!("bad interval `{t}`"));
    if t.len() < 2 {
        return Err(err());
    }
    let lo_closed = match t.as_bytes()[0] {
        b'[' => true,
        b'(' => false,
        _ => return Err(err()),
    };
    let hi_closed = match t.as_bytes()[t.len() - 1] {
        b']' => true,
        b')' => false,
        _ => return Err(err()),
    };
    let body = &t[1..t.len() - 1];
    let (a, b) = body.split_once(',').ok_or_else(err)?;
    let (lo, hi) = (parse_number(a)?, parse_number(b)?);
    if lo > hi {
        return Err(ImError::Parse(format!("interval `{t}` has lo > hi")));
    }
    Ok(Interval::new(lo, hi, lo_closed, hi_closed))
}

pub fn parse_interval_union(s: &str) -> Result<IntervalUnion> {
    let t = s.trim();
    if t == "{}" || t.is_empty() {
        return Ok(IntervalUnion::empty());
    }
    if t == "R" {
        return Ok(IntervalUnion::real_line());
    }
    let parts = t.split('|').map(parse_interval).collect::<Result<Vec<_>>>()?;
    Ok(IntervalUnion::new(parts))
}

pub fn parse_intset(s: &str) -> Result<IntSet> {
    let t = s.trim();
    if t == "Z" {
        return Ok(IntSet::all());
    }
    let (cofinite, body) = match t.strip_prefix("Z\\") {
        Some(rest) => (true, rest.trim()),
        None => (false, t),
    };
    let inner = body
        .strip_prefix('{')
        .and_then(|b| b.strip_suffix('}'))
        .ok_or_else(|| ImError::Parse(format!("bad finite set `{t}`")))?;
    let mut v = BTreeSet::new();
    for item in inner.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let k = item
            .parse::<i64>()
            .map_err(|_| ImError::Parse(format!("bad integer `{item}` in `{t}`")))?;
        v.insert(k);
    }
    Ok(if cofinite { IntSet::Cofinite(v) } else { IntSet::Finite(v) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iu(s: &str) -> IntervalUnion {
        parse_interval_union(s).unwrap()
    }

    #[test]
    fn normalization_merges_touching_parts() {
        assert_eq!(iu("(0,1]|(1,2)"), iu("(0,2)"));
        assert_eq!(iu("(0,1)|[1,2)"), iu("(0,2)"));
        assert_eq!(iu("(0,1)|(1,2)").parts().len(), 2);
        assert_eq!(iu("(2,3)|(0,5)"), iu("(0,5)"));
        assert!(iu("(1,1)").is_empty());
        assert_eq!(iu("[1,1]").parts().len(), 1);
        // infinite endpoints are always open
        assert_eq!(IntervalUnion::from(Interval::new(f64::NEG_INFINITY, 0.0, true, true)), iu("(-inf,0]"));
    }

    #[test]
    fn complement_flips_endpoint_flags() {
        assert_eq!(iu("(-inf,0]|(2,3)").complement(), iu("(0,2]|[3,inf)"));
        assert!(IntervalUnion::empty().complement().is_real_line());
        assert!(IntervalUnion::real_line().complement().is_empty());
        assert_eq!(iu("[1,1]").complement(), iu("(-inf,1)|(1,inf)"));
    }

    #[test]
    fn subset_respects_open_endpoints() {
        assert!(iu("(0,1)").is_subset(&iu("[0,1]")));
        assert!(!iu("[0,1]").is_subset(&iu("(0,1)")));
        assert!(!iu("(0,1]").is_subset(&iu("(0,1)")));
        assert!(iu("(0,1)|(1,2)").is_subset(&iu("(0,2)")));
        assert!(iu("(0,1)").is_disjoint(&iu("[1,2)")));
        assert!(!iu("(0,1]").is_disjoint(&iu("[1,2)")));
    }

    #[test]
    fn display_round_trips() {
        for s in ["(-inf,0]|(2,3)", "[1,1]", "{}", "(-1.5,2.25]|[3,inf)"] {
            assert_eq!(iu(s).to_string(), s);
        }
    }

    #[test]
    fn intset_algebra() {
        let a = IntSet::finite([3, 4, 5]);
        let c = a.complement();
        assert!(!c.contains(4) && c.contains(6));
        assert!(a.is_subset(&IntSet::all()));
        assert!(!c.is_subset(&a));
        assert!(a.union(&c).is_subset(&IntSet::all()) && IntSet::all().is_subset(&a.union(&c)));
        assert!(a.intersect(&c).is_empty());
        assert_eq!(parse_intset("Z\\{1,2}").unwrap(), IntSet::Cofinite([1, 2].into()));
        assert_eq!(parse_intset(&c.to_string()).unwrap(), c);
    }

    #[test]
    fn parse_in_spaces() {
        let z = ParamSet::parse("{3,4,5}", &ParamSpace::Integer).unwrap();
        assert_eq!(z.as_integer(), Some(&IntSet::finite([3, 4, 5])));
        let z2 = ParamSet::parse("[2.5,5]", &ParamSpace::Integer).unwrap();
        assert_eq!(z2.as_integer(), Some(&IntSet::finite([3, 4, 5])));
        let r = ParamSet::parse("{1,2}", &ParamSpace::Real(Interval::real_line())).unwrap();
        assert!(r.contains(&Point::scalar(2.0)) && !r.contains(&Point::scalar(1.5)));
        assert!(ParamSet::parse("(0,", &ParamSpace::Integer).is_err());
        assert!(ParamSet::parse("(3,1)", &ParamSpace::Real(Interval::real_line())).is_err());
    }

    #[test]
    fn mixed_spaces_are_rejected() {
        let a = ParamSet::Real(iu("(0,1)"));
        let b = ParamSet::Integer(IntSet::finite([1]));
        assert!(a.is_subset(&b).is_err());
        assert!(a.union(&b).is_err());
    }

    #[test]
    fn planar_points_against_predicates() {
        let disk = ParamSet::Predicate(Predicate::new("disk", |p: &Point| p.l2() <= 1.0));
        let pts = ParamSet::Points(vec![Point::pair(0.1, 0.2), Point::pair(0.5, 0.5)]);
        assert!(pts.is_subset(&disk).unwrap());
        assert!(disk.is_subset(&pts).is_err());
        let outside = ParamSet::Points(vec![Point::pair(2.0, 0.0)]);
        assert!(outside.is_disjoint(&disk).unwrap());
        assert!(!disk.complement().contains(&Point::pair(0.0, 0.0)));
    }

    fn endpoint() -> impl Strategy<Value = f64> {
        // a small lattice makes shared endpoints common
        (-8i32..8).prop_map(|k| k as f64 * 0.5)
    }

    fn arb_interval() -> impl Strategy<Value = Interval> {
        (endpoint(), endpoint(), any::<bool>(), any::<bool>(), prop::bool::weighted(0.1), prop::bool::weighted(0.1))
            .prop_map(|(a, b, lc, hc, lo_inf, hi_inf)| {
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                let lo = if lo_inf { f64::NEG_INFINITY } else { lo };
                let hi = if hi_inf { f64::INFINITY } else { hi };
                Interval::new(lo, hi, lc, hc)
            })
    }

    fn arb_union() -> impl Strategy<Value = IntervalUnion> {
        prop::collection::vec(arb_interval(), 0..5).prop_map(IntervalUnion::new)
    }

    fn probe_points() -> Vec<f64> {
        (-40..=40).map(|k| k as f64 * 0.25).collect()
    }

    proptest! {
        #[test]
        fn normal_form_invariant(u in arb_union()) {
            for w in u.parts().windows(2) {
                prop_assert!(w[0].hi <= w[1].lo);
                prop_assert!(!(w[0].hi == w[1].lo && (w[0].hi_closed || w[1].lo_closed)));
            }
            for p in u.parts() {
                prop_assert!(!p.is_empty());
            }
        }

        #[test]
        fn de_morgan(a in arb_union(), b in arb_union()) {
            prop_assert_eq!(a.union(&b).complement(), a.complement().intersect(&b.complement()));
            prop_assert_eq!(a.intersect(&b).complement(), a.complement().union(&b.complement()));
            prop_assert_eq!(a.complement().complement(), a.clone());
        }

        #[test]
        fn subset_antisymmetry(a in arb_union(), b in arb_union()) {
            if a.is_subset(&b) && b.is_subset(&a) {
                prop_assert_eq!(&a, &b);
            }
            prop_assert!(a.intersect(&b).is_subset(&a));
            prop_assert!(a.is_subset(&a.union(&b)));
        }

        #[test]
        fn membership_agrees_with_algebra(a in arb_union(), b in arb_union()) {
            let (u, i, c) = (a.union(&b), a.intersect(&b), a.complement());
            for x in probe_points() {
                prop_assert_eq!(u.contains(x), a.contains(x) || b.contains(x));
                prop_assert_eq!(i.contains(x), a.contains(x) && b.contains(x));
                prop_assert_eq!(c.contains(x), !a.contains(x));
            }
        }

        #[test]
        fn intset_de_morgan(a in prop::collection::btree_set(-5i64..5, 0..6), b in prop::collection::btree_set(-5i64..5, 0..6), ca in any::<bool>(), cb in any::<bool>()) {
            let a = if ca { IntSet::Cofinite(a) } else { IntSet::Finite(a) };
            let b = if cb { IntSet::Cofinite(b) } else { IntSet::Finite(b) };
            prop_assert_eq!(a.union(&b).complement(), a.complement().intersect(&b.complement()));
            for k in -7..7 {
                prop_assert_eq!(a.intersect(&b).contains(k), a.contains(k) && b.contains(k));
            }
        }
    }
}
