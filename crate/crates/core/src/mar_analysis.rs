//! Missing-at-random decisions and the observed-data mechanism.
//!
//! A mechanism `g` is MAR with respect to an observable data event when it takes a
//! single value on that event. Restricting `g` to the event gives the range set `S`;
//! `P(R | Y_obs)` on the event is then `sup S` (or `inf S`, which classifies
//! identically). Repeating this over every event gives an [`ObservedMechanism`]
//! defined on the observable data.
//!
//! Mechanisms obtained by factorizing a density are undefined where `f(y) = 0`.
//! Those points are left out of every constancy test and listed in the result.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::distribution::{
    selection_factorize, DensityFamily, DistributionError, FullDensity, Marginal, Mechanism,
    ValidationReport,
};
use crate::prob::{format_rational, Prob};
use crate::sample_space::{
    project_observed, MissingnessPattern, ObservableDataEvent, ObservedData, Omega, Point,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarError {
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error("mechanism is undefined on every member of event {0}")]
    UndefinedOnEvent(String),
    #[error("event {0} does not belong to the mechanism's sample space")]
    ForeignEvent(String),
    #[error("pattern {0} is not in the pattern set")]
    UnknownPattern(MissingnessPattern),
    #[error("event {0} has probability zero")]
    ZeroProbabilityEvent(String),
    #[error("observed mechanism has no value for {0}")]
    MissingObservedValue(String),
    #[error("reconstructed table is not a density ({report}); the mechanism was not everywhere MAR")]
    NotReconstructible {
        report: ValidationReport,
        density: Box<FullDensity>,
    },
}

/// Which end of the range set stands in for `P(R | Y_obs)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Mode {
    #[default]
    Sup,
    Inf,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Sup => "sup",
            Mode::Inf => "inf",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sup" => Ok(Mode::Sup),
            "inf" => Ok(Mode::Inf),
            other => Err(format!("unknown mode `{other}` (expected sup or inf)")),
        }
    }
}

/// The values `g` takes on one observable data event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictionRange {
    event: ObservableDataEvent,
    values: Vec<Prob>,
    per_point: Vec<(Point, Prob)>,
    excluded: Vec<Point>,
}

impl RestrictionRange {
    pub fn event(&self) -> &ObservableDataEvent {
        &self.event
    }

    /// Distinct values, ascending.
    pub fn values(&self) -> &[Prob] {
        &self.values
    }

    /// `g` at each defined member, in member order.
    pub fn per_point(&self) -> &[(Point, Prob)] {
        &self.per_point
    }

    /// Members where `g` is undefined.
    pub fn excluded(&self) -> &[Point] {
        &self.excluded
    }

    pub fn is_constant(&self) -> bool {
        self.values.len() == 1
    }

    pub fn sup(&self) -> &Prob {
        self.values.last().expect("range is never empty")
    }

    pub fn inf(&self) -> &Prob {
        self.values.first().expect("range is never empty")
    }

    pub fn select(&self, mode: Mode) -> &Prob {
        match mode {
            Mode::Sup => self.sup(),
            Mode::Inf => self.inf(),
        }
    }
}

fn check_event(g: &Mechanism, e: &ObservableDataEvent) -> Result<(), MarError> {
    let omega = g.omega();
    if omega.patterns().index_of(e.pattern()).is_none()
        || e.members().iter().any(|m| !omega.contains(m))
        || e.len() != omega.event_for(&e.key()).map_or(0, |x| x.len())
    {
        return Err(MarError::ForeignEvent(e.to_string()));
    }
    Ok(())
}

/// Restricts `g` to `e` and collects the distinct values it takes there.
pub fn restriction_range(
    g: &Mechanism,
    e: &ObservableDataEvent,
) -> Result<RestrictionRange, MarError> {
    check_event(g, e)?;
    let mut per_point = Vec::with_capacity(e.len());
    let mut excluded = Vec::new();
    for m in e.members() {
        match g.value(m) {
            Some(v) => per_point.push((m.clone(), v.clone())),
            None => excluded.push(m.clone()),
        }
    }
    if per_point.is_empty() {
        return Err(MarError::UndefinedOnEvent(e.to_string()));
    }
    let values: BTreeSet<Prob> = per_point.iter().map(|(_, v)| v.clone()).collect();
    Ok(RestrictionRange {
        event: e.clone(),
        values: values.into_iter().collect(),
        per_point,
        excluded,
    })
}

/// `P(R | Y_obs)` on one event: `sup` (or `inf`) of the range set.
pub fn p_r_given_yobs(g: &Mechanism, e: &ObservableDataEvent, mode: Mode) -> Result<Prob, MarError> {
    Ok(restriction_range(g, e)?.select(mode).clone())
}

/// Two members of one event on which `g` differs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub event: ObservableDataEvent,
    pub first: (Point, Prob),
    pub second: (Point, Prob),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "event {}: g at {} is {}, g at {} is {}",
            self.event, self.first.0, self.first.1, self.second.0, self.second.1
        )
    }
}

/// Result of a MAR decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MarVerdict {
    /// Constant on every event. `excluded` lists undefined points left out.
    EverywhereMar { excluded: Vec<Point> },
    /// Constant on one event. `value` is `None` when `g` is undefined on all of it.
    RealizedMar {
        event: ObservableDataEvent,
        value: Option<Prob>,
        excluded: Vec<Point>,
    },
    NotMar(Witness),
}

impl MarVerdict {
    pub fn is_mar(&self) -> bool {
        !matches!(self, MarVerdict::NotMar(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            MarVerdict::NotMar(w) => Some(w),
            _ => None,
        }
    }

    pub fn excluded(&self) -> &[Point] {
        match self {
            MarVerdict::EverywhereMar { excluded } | MarVerdict::RealizedMar { excluded, .. } => {
                excluded
            }
            MarVerdict::NotMar(_) => &[],
        }
    }
}

impl fmt::Display for MarVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MarVerdict::EverywhereMar { .. } => f.write_str("EverywhereMAR"),
            MarVerdict::RealizedMar { event, value, .. } => match value {
                Some(v) => write!(f, "RealizedMAR on {event} (g = {v})"),
                None => write!(f, "RealizedMAR on {event} (vacuous: zero marginal mass)"),
            },
            MarVerdict::NotMar(w) => write!(f, "NotMAR\nwitness {w}"),
        }
    }
}

/// Decides whether `g` is constant on `e`. Negative answers carry the
/// lexicographically first pair of members with different values.
pub fn is_realized_mar(g: &Mechanism, e: &ObservableDataEvent) -> Result<MarVerdict, MarError> {
    let range = match restriction_range(g, e) {
        Ok(range) => range,
        Err(MarError::UndefinedOnEvent(_)) => {
            return Ok(MarVerdict::RealizedMar {
                event: e.clone(),
                value: None,
                excluded: e.members().to_vec(),
            })
        }
        Err(err) => return Err(err),
    };
    if range.is_constant() {
        return Ok(MarVerdict::RealizedMar {
            event: e.clone(),
            value: Some(range.values[0].clone()),
            excluded: range.excluded,
        });
    }
    let anchor = &range.per_point[0];
    let other = range.per_point[1..]
        .iter()
        .find(|(_, v)| *v != anchor.1)
        .expect("non-constant range has a differing member");
    Ok(MarVerdict::NotMar(Witness {
        event: e.clone(),
        first: anchor.clone(),
        second: other.clone(),
    }))
}

/// Decides everywhere-MAR: constancy on every observable data event, in
/// enumeration order. The first failing event supplies the witness.
pub fn is_everywhere_mar(g: &Mechanism) -> Result<MarVerdict, MarError> {
    let mut excluded = Vec::new();
    for e in g.omega().enumerate_events() {
        match is_realized_mar(g, &e)? {
            MarVerdict::NotMar(w) => return Ok(MarVerdict::NotMar(w)),
            MarVerdict::RealizedMar { excluded: x, .. } => excluded.extend(x),
            MarVerdict::EverywhereMar { .. } => unreachable!("per-event verdict"),
        }
    }
    Ok(MarVerdict::EverywhereMar { excluded })
}

/// `P(R | Y_obs)` tabulated on the observable data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservedMechanism {
    omega: Omega,
    mode: Mode,
    table: BTreeMap<ObservedData, Prob>,
    undefined: Vec<ObservedData>,
}

impl ObservedMechanism {
    pub fn omega(&self) -> &Omega {
        &self.omega
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn get(&self, key: &ObservedData) -> Option<&Prob> {
        self.table.get(key)
    }

    /// The value for the event containing `p`.
    pub fn value_at(&self, p: &Point) -> Option<&Prob> {
        let values = project_observed(&p.y, &p.r).ok()?;
        self.table.get(&ObservedData {
            pattern: p.r.clone(),
            values,
        })
    }

    /// Entries in key order.
    pub fn entries(&self) -> impl Iterator<Item = (&ObservedData, &Prob)> {
        self.table.iter()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Events on which the source mechanism had no values at all.
    pub fn undefined(&self) -> &[ObservedData] {
        &self.undefined
    }
}

/// Builds `P(R | Y_obs)` on every observable data event.
pub fn observed_mechanism(g: &Mechanism, mode: Mode) -> Result<ObservedMechanism, MarError> {
    let mut table = BTreeMap::new();
    let mut undefined = Vec::new();
    for e in g.omega().enumerate_events() {
        match restriction_range(g, &e) {
            Ok(range) => {
                table.insert(e.key(), range.select(mode).clone());
            }
            Err(MarError::UndefinedOnEvent(_)) => undefined.push(e.key()),
            Err(err) => return Err(err),
        }
    }
    Ok(ObservedMechanism {
        omega: g.omega().clone(),
        mode,
        table,
        undefined,
    })
}

/// A member where `P(R | Y_obs, Y_mis) != P(R | Y_obs)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationFailure {
    pub point: Point,
    pub missing_values: Vec<i64>,
    pub lhs: Prob,
    pub rhs: Prob,
}

impl fmt::Display for EquationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mis: Vec<String> = self.missing_values.iter().map(ToString::to_string).collect();
        write!(
            f,
            "Y_mis = ({}) at {}: P(R|Y_obs,Y_mis) = {} but P(R|Y_obs) = {}",
            mis.join(","),
            self.point,
            self.lhs,
            self.rhs
        )
    }
}

/// First member of `e` breaking `g(r|y*) = P(R | Y_obs)`, if any.
pub fn standard_equation_failure(
    g: &Mechanism,
    e: &ObservableDataEvent,
    mode: Mode,
) -> Result<Option<EquationFailure>, MarError> {
    let range = restriction_range(g, e)?;
    let rhs = range.select(mode);
    Ok(range
        .per_point
        .iter()
        .find(|(_, lhs)| lhs != rhs)
        .map(|(point, lhs)| EquationFailure {
            missing_values: crate::sample_space::project_missing(&point.y, &point.r)
                .expect("member matches its pattern"),
            point: point.clone(),
            lhs: lhs.clone(),
            rhs: rhs.clone(),
        }))
}

/// Whether `g(r|y*) = P(R | Y_obs)` holds for every member of `e`.
pub fn standard_equation_holds(
    g: &Mechanism,
    e: &ObservableDataEvent,
    mode: Mode,
) -> Result<bool, MarError> {
    Ok(standard_equation_failure(g, e, mode)?.is_none())
}

fn positive_event_mass(h: &FullDensity, e: &ObservableDataEvent) -> Result<BigRational, MarError> {
    h.ensure_valid()?;
    if !h.omega().contains(&e.members()[0]) {
        return Err(MarError::ForeignEvent(e.to_string()));
    }
    let mass = h.probability_of(e.members());
    if mass.is_zero() {
        return Err(MarError::ZeroProbabilityEvent(e.to_string()));
    }
    Ok(mass)
}

/// A member where the pattern-mixture conditional of the missing part differs from
/// the `f`-conditional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalMismatch {
    pub point: Point,
    pub pattern_conditional: BigRational,
    pub marginal_conditional: BigRational,
}

impl fmt::Display for ConditionalMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "at {}: p(y_mis | y_obs, r) = {} but f(y_mis | y_obs) = {}",
            self.point,
            format_rational(&self.pattern_conditional),
            format_rational(&self.marginal_conditional)
        )
    }
}

/// First member where `p(y*_mis | y_obs, r) != f(y*_mis | y_obs)`.
pub fn drawn_at_random_failure(
    h: &FullDensity,
    e: &ObservableDataEvent,
) -> Result<Option<ConditionalMismatch>, MarError> {
    let event_mass = positive_event_mass(h, e)?;
    let f = crate::distribution::marginal_y(h)?;
    let f_of = |p: &Point| f.get(&p.y).expect("member lies in the space").value().clone();
    // The members of e, read as y-vectors, are exactly the y* sharing y_obs.
    let f_mass = e
        .members()
        .iter()
        .fold(BigRational::zero(), |acc, m| acc + f_of(m));
    for m in e.members() {
        let h_val = h.get(m).expect("valid density is complete").value();
        let pattern_conditional = h_val / &event_mass;
        let marginal_conditional = f_of(m) / &f_mass;
        if pattern_conditional != marginal_conditional {
            return Ok(Some(ConditionalMismatch {
                point: m.clone(),
                pattern_conditional,
                marginal_conditional,
            }));
        }
    }
    Ok(None)
}

/// Whether the complete data in `e` can be "drawn at random": the missing part's
/// pattern-mixture conditional equals its `f`-conditional at every member.
pub fn drawn_at_random_check(h: &FullDensity, e: &ObservableDataEvent) -> Result<bool, MarError> {
    Ok(drawn_at_random_failure(h, e)?.is_none())
}

/// Whether `p(y|r) = c f(y)` on `e` for one constant `c`, by pairwise cross-multiplication.
pub fn shape_proportionality_check(
    h: &FullDensity,
    e: &ObservableDataEvent,
) -> Result<bool, MarError> {
    positive_event_mass(h, e)?;
    let bars = shape_bars(h, e)?;
    for (i, (_, pa, fa)) in bars.iter().enumerate() {
        for (_, pb, fb) in &bars[i + 1..] {
            if pa * fb != pb * fa {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The constant `c` with `p(y|r) = c f(y)` on `e`, when one exists.
pub fn shape_constant(
    h: &FullDensity,
    e: &ObservableDataEvent,
) -> Result<Option<BigRational>, MarError> {
    if !shape_proportionality_check(h, e)? {
        return Ok(None);
    }
    let bars = shape_bars(h, e)?;
    Ok(bars
        .iter()
        .find(|(_, _, f)| !f.is_zero())
        .map(|(_, p, f)| p / f))
}

/// `(member, p(y|r), f(y))` for each member of `e`.
pub fn shape_bars(
    h: &FullDensity,
    e: &ObservableDataEvent,
) -> Result<Vec<(Point, BigRational, BigRational)>, MarError> {
    let omega = h.omega();
    let r = omega
        .patterns()
        .index_of(e.pattern())
        .ok_or_else(|| MarError::UnknownPattern(e.pattern().clone()))?;
    let pr = crate::distribution::marginal_r(h)?[r].value().clone();
    if pr.is_zero() {
        return Err(MarError::ZeroProbabilityEvent(e.to_string()));
    }
    let f = crate::distribution::marginal_y(h)?;
    Ok(e.members()
        .iter()
        .map(|m| {
            let h_val = h.get(m).expect("valid density is complete").value();
            let fy = f.get(&m.y).expect("member lies in the space").value().clone();
            (m.clone(), h_val / &pr, fy)
        })
        .collect())
}

/// `h(y, r) = f(y) P(R | Y_obs)(y_obs, r)`. Fails when the result is not a density.
pub fn reconstruct_full(f: &Marginal, om: &ObservedMechanism) -> Result<FullDensity, MarError> {
    let h = reconstruct_unchecked(f, om)?;
    let report = h.validate();
    if report.is_valid() {
        Ok(h)
    } else {
        Err(MarError::NotReconstructible {
            report,
            density: Box::new(h),
        })
    }
}

fn reconstruct_unchecked(f: &Marginal, om: &ObservedMechanism) -> Result<FullDensity, MarError> {
    let omega = om.omega();
    if f.space() != omega.space() {
        return Err(DistributionError::SpaceMismatch.into());
    }
    let mut table = Vec::with_capacity(omega.len());
    for p in omega.points() {
        let fy = f.get(&p.y).expect("point lies in the space");
        let v = match om.value_at(&p) {
            Some(v) => fy.times(v),
            None if fy.is_zero() => Prob::zero(),
            None => return Err(MarError::MissingObservedValue(p.to_string())),
        };
        table.push(v);
    }
    Ok(FullDensity::from_table(omega.clone(), table)?)
}

/// Outcome of rebuilding `h` from `f` and `P(R | Y_obs)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReconstructionReport {
    pub mode: Mode,
    pub reconstructed: FullDensity,
    pub validation: ValidationReport,
    /// Points where the rebuilt value differs from `h`.
    pub mismatches: Vec<Point>,
}

impl ReconstructionReport {
    pub fn round_trip_holds(&self) -> bool {
        self.validation.is_valid() && self.mismatches.is_empty()
    }
}

/// Factorizes `h`, builds `P(R | Y_obs)` and compares the rebuilt table with `h`.
pub fn reconstruction_check(h: &FullDensity, mode: Mode) -> Result<ReconstructionReport, MarError> {
    let sm = selection_factorize(h)?;
    let om = observed_mechanism(sm.mechanism(), mode)?;
    let rebuilt = reconstruct_unchecked(sm.marginal(), &om)?;
    let mismatches = h
        .omega()
        .points()
        .filter(|p| rebuilt.get(p) != h.get(p))
        .collect();
    Ok(ReconstructionReport {
        mode,
        validation: rebuilt.validate(),
        reconstructed: rebuilt,
        mismatches,
    })
}

/// Coordinates `i` such that toggling `y_i` alone changes `g(r|y)`.
///
/// Pairs with an undefined endpoint are skipped. For a total mechanism, support
/// inside the observed coordinates of every pattern is the same thing as being
/// everywhere MAR. With undefined rows only one direction survives: support on a
/// missing coordinate still proves NotMAR, but two defined members of an event
/// that differ in several missing coordinates can disagree without any
/// single-coordinate path between them.
pub fn dependence_support(
    g: &Mechanism,
    r: &MissingnessPattern,
) -> Result<BTreeSet<usize>, MarError> {
    let omega = g.omega();
    let ri = omega
        .patterns()
        .index_of(r)
        .ok_or_else(|| MarError::UnknownPattern(r.clone()))?;
    let space = omega.space();
    let mut support = BTreeSet::new();
    for yi in 0..space.size() {
        let Some(base) = g.at(yi, ri) else { continue };
        let y = space.value_at(yi);
        for (i, var) in space.variables().iter().enumerate() {
            if support.contains(&i) {
                continue;
            }
            for &level in var.levels() {
                if level == y[i] {
                    continue;
                }
                let mut other = y.clone();
                other[i] = level;
                let oi = space.index_of(&other).expect("toggled vector stays in the grid");
                if g.at(oi, ri).is_some_and(|v| v != base) {
                    support.insert(i);
                    break;
                }
            }
        }
    }
    Ok(support)
}

/// A pair of data vectors, equal on the coordinates missing under `r_j`, on which
/// `g(r_j|.)` differs, with the compensating change in the other patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingPair {
    pub from: Vec<i64>,
    pub to: Vec<i64>,
    /// `g(r_j|to) - g(r_j|from)`.
    pub target_change: BigRational,
    /// Change in the summed probability of every other pattern.
    pub others_change: BigRational,
}

/// Every pair of `y` vectors differing only in coordinates observed under `r`
/// on which `g(r|.)` changes.
pub fn normalization_coupling(
    g: &Mechanism,
    r: &MissingnessPattern,
) -> Result<Vec<CouplingPair>, MarError> {
    let omega = g.omega();
    let ri = omega
        .patterns()
        .index_of(r)
        .ok_or_else(|| MarError::UnknownPattern(r.clone()))?;
    let space = omega.space();
    let k = omega.patterns().len();
    let others = |y: usize| -> Option<BigRational> {
        (0..k)
            .filter(|&j| j != ri)
            .try_fold(BigRational::zero(), |acc, j| Some(acc + g.at(y, j)?.value()))
    };
    let mut pairs = Vec::new();
    for a in 0..space.size() {
        let ya = space.value_at(a);
        let mis_a = crate::sample_space::project_missing(&ya, r).expect("arity");
        for b in a + 1..space.size() {
            let yb = space.value_at(b);
            if crate::sample_space::project_missing(&yb, r).expect("arity") != mis_a {
                continue;
            }
            let (Some(ga), Some(gb)) = (g.at(a, ri), g.at(b, ri)) else {
                continue;
            };
            if ga == gb {
                continue;
            }
            let (Some(oa), Some(ob)) = (others(a), others(b)) else {
                continue;
            };
            pairs.push(CouplingPair {
                from: ya.clone(),
                to: yb,
                target_change: gb.value() - ga.value(),
                others_change: ob - oa,
            });
        }
    }
    Ok(pairs)
}

/// Outcome of checking MAR across a family of densities on one event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyMarReport {
    /// Label of the first member that is not MAR, with its witness.
    pub offending: Option<(String, Witness)>,
    /// Members whose factorized mechanism is undefined on the whole event.
    pub vacuous: Vec<String>,
}

impl FamilyMarReport {
    pub fn holds(&self) -> bool {
        self.offending.is_none()
    }
}

/// MAR with respect to `e` for every density in the family.
pub fn family_mar(family: &DensityFamily, e: &ObservableDataEvent) -> Result<FamilyMarReport, MarError> {
    let mut vacuous = Vec::new();
    for (label, h) in family.members() {
        let sm = selection_factorize(h)?;
        match is_realized_mar(sm.mechanism(), e)? {
            MarVerdict::NotMar(w) => {
                return Ok(FamilyMarReport {
                    offending: Some((label.clone(), w)),
                    vacuous,
                })
            }
            MarVerdict::RealizedMar { value: None, .. } => vacuous.push(label.clone()),
            _ => {}
        }
    }
    Ok(FamilyMarReport {
        offending: None,
        vacuous,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::{Marginal, SelectionModel};
    use crate::sample_space::{DataSpace, PatternSet};

    fn pat(s: &str) -> MissingnessPattern {
        s.parse().unwrap()
    }

    fn p(n: i64, d: i64) -> Prob {
        Prob::ratio(n, d).unwrap()
    }

    fn omega2(patterns: &[&str]) -> Omega {
        Omega::new(
            DataSpace::with_level_counts(&[2, 2]).unwrap(),
            PatternSet::new(2, patterns.iter().map(|s| pat(s)).collect()).unwrap(),
        )
        .unwrap()
    }

    /// g(10|y) = (1 + 2 y_var)/10, g(11|y) = the rest.
    fn linear(var: usize) -> Mechanism {
        Mechanism::from_fn(omega2(&["11", "10"]), |y, r| {
            let v = p(1 + 2 * y[var], 10);
            if r.is_complete() {
                v.complement()
            } else {
                v
            }
        })
        .unwrap()
    }

    fn event(o: &Omega, y: Vec<i64>, r: &str) -> ObservableDataEvent {
        o.observable_event(&Point::new(y, pat(r))).unwrap()
    }

    #[test]
    fn constant_range() {
        let o = omega2(&["11", "00"]);
        let g = Mechanism::from_fn(o.clone(), |_, r| if r.is_complete() { p(3, 4) } else { p(1, 4) })
            .unwrap();
        let e = event(&o, vec![0, 0], "00");
        assert_eq!(e.len(), 4);
        let range = restriction_range(&g, &e).unwrap();
        assert_eq!(range.values(), &[p(1, 4)]);
        assert_eq!(p_r_given_yobs(&g, &e, Mode::Sup).unwrap(), p(1, 4));
        assert_eq!(p_r_given_yobs(&g, &e, Mode::Inf).unwrap(), p(1, 4));
    }

    #[test]
    fn two_valued_range() {
        let g = linear(1);
        let e = event(g.omega(), vec![0, 0], "10");
        let range = restriction_range(&g, &e).unwrap();
        assert_eq!(range.values(), &[p(1, 10), p(3, 10)]);
        assert_eq!(p_r_given_yobs(&g, &e, Mode::Sup).unwrap(), p(3, 10));
        assert_eq!(p_r_given_yobs(&g, &e, Mode::Inf).unwrap(), p(1, 10));
        let cc = event(g.omega(), vec![1, 1], "11");
        assert_eq!(restriction_range(&g, &cc).unwrap().values(), &[p(7, 10)]);
    }

    #[test]
    fn realized_mar_verdicts() {
        let g = linear(1);
        let e = event(g.omega(), vec![0, 1], "10");
        let MarVerdict::NotMar(w) = is_realized_mar(&g, &e).unwrap() else {
            panic!("expected NotMAR");
        };
        assert_eq!(w.first, (Point::new(vec![0, 0], pat("10")), p(1, 10)));
        assert_eq!(w.second, (Point::new(vec![0, 1], pat("10")), p(3, 10)));
        assert!(g.omega().ob_equivalent(&w.first.0, &w.second.0).unwrap());
        let cc = event(g.omega(), vec![0, 1], "11");
        assert!(is_realized_mar(&g, &cc).unwrap().is_mar());
    }

    #[test]
    fn everywhere_verdicts() {
        assert!(matches!(
            is_everywhere_mar(&linear(0)).unwrap(),
            MarVerdict::EverywhereMar { .. }
        ));
        let verdict = is_everywhere_mar(&linear(1)).unwrap();
        let w = verdict.witness().unwrap();
        assert_eq!(w.event.pattern(), &pat("10"));
        assert_eq!(w.event.observed_values().get(&0), Some(&0));
    }

    #[test]
    fn standard_equation_modes() {
        let g = linear(1);
        let e = event(g.omega(), vec![1, 0], "10");
        let sup = standard_equation_failure(&g, &e, Mode::Sup).unwrap().unwrap();
        assert_eq!(sup.lhs, p(1, 10));
        assert_eq!(sup.rhs, p(3, 10));
        assert_eq!(sup.missing_values, vec![0]);
        let inf = standard_equation_failure(&g, &e, Mode::Inf).unwrap().unwrap();
        assert_eq!(inf.missing_values, vec![1]);
        assert!(standard_equation_holds(&linear(0), &e, Mode::Sup).unwrap());
    }

    #[test]
    fn observed_mechanism_tables() {
        let mar = observed_mechanism(&linear(0), Mode::Sup).unwrap();
        assert_eq!(mar.len(), 6);
        for pt in mar.omega().points() {
            assert_eq!(mar.value_at(&pt), linear(0).value(&pt));
        }
        let g = linear(1);
        let sup = observed_mechanism(&g, Mode::Sup).unwrap();
        let inf = observed_mechanism(&g, Mode::Inf).unwrap();
        let differing: Vec<_> = sup
            .entries()
            .zip(inf.entries())
            .filter(|(a, b)| a.1 != b.1)
            .map(|(a, _)| a.0.clone())
            .collect();
        assert_eq!(differing.len(), 2);
        assert!(differing.iter().all(|k| k.pattern == pat("10")));
    }

    fn density(g: &Mechanism, f: Vec<Prob>) -> FullDensity {
        let f = Marginal::new(g.omega().space().clone(), f).unwrap();
        SelectionModel::new(f, g.clone()).unwrap().recompose()
    }

    #[test]
    fn drawn_at_random_and_shape_agree() {
        let f = vec![p(1, 8), p(3, 8), p(1, 4), p(1, 4)];
        let mar = density(&linear(0), f.clone());
        let mnar = density(&linear(1), f);
        for e in mar.omega().enumerate_events() {
            assert!(drawn_at_random_check(&mar, &e).unwrap());
            assert!(shape_proportionality_check(&mar, &e).unwrap());
        }
        let e = event(mnar.omega(), vec![0, 0], "10");
        assert!(!drawn_at_random_check(&mnar, &e).unwrap());
        assert!(!shape_proportionality_check(&mnar, &e).unwrap());
        assert!(shape_constant(&mnar, &e).unwrap().is_none());
    }

    #[test]
    fn uniform_shape_constant() {
        let h = FullDensity::uniform(omega2(&["11", "10"]));
        let e = event(h.omega(), vec![1, 0], "10");
        // p(r) = 1/2, f = 1/4, p(y|r) = 1/4: c = 1.
        assert_eq!(
            shape_constant(&h, &e).unwrap(),
            Some(BigRational::from_integer(1.into()))
        );
    }

    #[test]
    fn zero_probability_event_is_reported() {
        let o = omega2(&["11", "10"]);
        let g = Mechanism::from_fn(o.clone(), |_, r| if r.is_complete() { Prob::one() } else { Prob::zero() })
            .unwrap();
        let h = density(&g, vec![p(1, 4); 4]);
        let e = event(&o, vec![0, 0], "10");
        assert!(matches!(
            drawn_at_random_check(&h, &e),
            Err(MarError::ZeroProbabilityEvent(_))
        ));
        assert!(matches!(
            shape_proportionality_check(&h, &e),
            Err(MarError::ZeroProbabilityEvent(_))
        ));
    }

    #[test]
    fn zero_mass_members_contribute_nothing() {
        let g = linear(0);
        let h = density(&g, vec![Prob::zero(), p(1, 2), p(1, 4), p(1, 4)]);
        let e = event(h.omega(), vec![0, 0], "10");
        assert!(drawn_at_random_check(&h, &e).unwrap());
        let sm = selection_factorize(&h).unwrap();
        let verdict = is_realized_mar(sm.mechanism(), &e).unwrap();
        assert_eq!(verdict.excluded(), &[Point::new(vec![0, 0], pat("10"))]);
    }

    #[test]
    fn reconstruction_round_trip() {
        let f = vec![p(1, 8), p(3, 8), p(1, 4), p(1, 4)];
        let mar = density(&linear(0), f.clone());
        let sm = selection_factorize(&mar).unwrap();
        let om = observed_mechanism(sm.mechanism(), Mode::Sup).unwrap();
        assert_eq!(reconstruct_full(sm.marginal(), &om).unwrap(), mar);
        let mnar = density(&linear(1), f);
        let sm = selection_factorize(&mnar).unwrap();
        let om = observed_mechanism(sm.mechanism(), Mode::Sup).unwrap();
        assert!(matches!(
            reconstruct_full(sm.marginal(), &om),
            Err(MarError::NotReconstructible { .. })
        ));
        let report = reconstruction_check(&mnar, Mode::Inf).unwrap();
        assert!(!report.round_trip_holds());
        assert!(!report.mismatches.is_empty());
    }

    #[test]
    fn dependence_support_examples() {
        let r = pat("10");
        assert_eq!(dependence_support(&linear(0), &r).unwrap(), BTreeSet::from([0]));
        assert_eq!(dependence_support(&linear(1), &r).unwrap(), BTreeSet::from([1]));
        let o = omega2(&["11", "10"]);
        let mcar = Mechanism::from_fn(o, |_, r| if r.is_complete() { p(1, 3) } else { p(2, 3) })
            .unwrap();
        for r in mcar.omega().patterns().patterns() {
            assert!(dependence_support(&mcar, r).unwrap().is_empty());
        }
    }

    #[test]
    fn coupling_pairs_offset() {
        let g = linear(0);
        let pairs = normalization_coupling(&g, &pat("10")).unwrap();
        assert_eq!(pairs.len(), 2);
        for pair in pairs {
            assert_eq!(pair.others_change, -pair.target_change);
        }
    }

    #[test]
    fn family_checks() {
        let f = vec![p(1, 8), p(3, 8), p(1, 4), p(1, 4)];
        let mar = density(&linear(0), f.clone());
        let mnar = density(&linear(1), f);
        let e = event(mar.omega(), vec![0, 0], "10");
        let fam = DensityFamily::new("m", vec![("a".into(), mar.clone()), ("b".into(), mnar)]).unwrap();
        let report = family_mar(&fam, &e).unwrap();
        assert_eq!(report.offending.as_ref().unwrap().0, "b");
        let single = DensityFamily::new("m", vec![("a".into(), mar)]).unwrap();
        assert!(family_mar(&single, &e).unwrap().holds());
    }

    #[test]
    fn foreign_event_rejected() {
        let g = linear(0);
        let other = Omega::new(
            DataSpace::with_level_counts(&[3, 2]).unwrap(),
            PatternSet::new(2, vec![pat("11"), pat("10")]).unwrap(),
        )
        .unwrap();
        let e = event(&other, vec![2, 0], "10");
        assert!(matches!(restriction_range(&g, &e), Err(MarError::ForeignEvent(_))));
    }
}
