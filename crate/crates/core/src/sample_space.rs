//! Finite data spaces, missingness patterns and the observable-data-event partition.
//!
//! Everything here is built by exhaustive enumeration. A [`DataSpace`] is the full
//! product grid of its variables' levels; an [`Omega`] pairs it with a [`PatternSet`]
//! and gives every point `(y, r)` a dense index, which the probability tables in
//! [`crate::distribution`] use for storage.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Level code of a single variable.
pub type Level = i64;

/// Upper bound on `|Y|` accepted by [`DataSpace::new`].
pub const MAX_DATA_POINTS: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("variable `{0}` has no levels")]
    NoLevels(String),
    #[error("variable `{name}` repeats level {level}")]
    DuplicateLevel { name: String, level: Level },
    #[error("invalid variable name `{0}`")]
    BadName(String),
    #[error("data space has no variables")]
    NoVariables,
    #[error("variable name `{0}` is used twice")]
    DuplicateVariable(String),
    #[error("data space is too large to enumerate")]
    TooLarge,
    #[error("pattern set is empty")]
    NoPatterns,
    #[error("pattern {pattern} has length {len}, expected {expected}")]
    PatternLength {
        pattern: MissingnessPattern,
        len: usize,
        expected: usize,
    },
    #[error("pattern {0} is listed twice")]
    DuplicatePattern(MissingnessPattern),
    #[error("the all-ones pattern must be present")]
    MissingCompletePattern,
    #[error("bad pattern literal `{0}`")]
    BadPatternLiteral(String),
    #[error("length mismatch: values have length {values}, pattern has length {pattern}")]
    LengthMismatch { values: usize, pattern: usize },
    #[error("point {0} is not in the sample space")]
    InvalidPoint(Point),
}

/// One coordinate of `Y` together with its admissible level codes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Variable {
    name: String,
    levels: Vec<Level>,
}

impl Variable {
    pub fn new(name: impl Into<String>, levels: Vec<Level>) -> Result<Self, SpaceError> {
        let name = name.into();
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(SpaceError::BadName(name));
        }
        if levels.is_empty() {
            return Err(SpaceError::NoLevels(name));
        }
        let mut seen = HashSet::new();
        for &level in &levels {
            if !seen.insert(level) {
                return Err(SpaceError::DuplicateLevel { name, level });
            }
        }
        Ok(Variable { name, levels })
    }

    /// A variable with levels `0..count`.
    pub fn with_range(name: impl Into<String>, count: usize) -> Result<Self, SpaceError> {
        Variable::new(name, (0..count as Level).collect())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level_position(&self, level: Level) -> Option<usize> {
        self.levels.iter().position(|&l| l == level)
    }
}

/// The data space `Y`: the full product grid of its variables' levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataSpace {
    variables: Vec<Variable>,
    size: usize,
}

impl DataSpace {
    pub fn new(variables: Vec<Variable>) -> Result<Self, SpaceError> {
        if variables.is_empty() {
            return Err(SpaceError::NoVariables);
        }
        let mut names = HashSet::new();
        for v in &variables {
            if !names.insert(v.name.as_str()) {
                return Err(SpaceError::DuplicateVariable(v.name.clone()));
            }
        }
        let size = variables
            .iter()
            .try_fold(1usize, |acc, v| acc.checked_mul(v.levels.len()))
            .filter(|&s| s <= MAX_DATA_POINTS)
            .ok_or(SpaceError::TooLarge)?;
        Ok(DataSpace { variables, size })
    }

    /// `Y1, Y2, ...` with level counts taken from `counts`, levels `0..count`.
    pub fn with_level_counts(counts: &[usize]) -> Result<Self, SpaceError> {
        let vars = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| Variable::with_range(format!("Y{}", i + 1), c))
            .collect::<Result<Vec<_>, _>>()?;
        DataSpace::new(vars)
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn arity(&self) -> usize {
        self.variables.len()
    }

    /// `|Y|`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn contains(&self, y: &[Level]) -> bool {
        self.index_of(y).is_some()
    }

    /// Dense index of `y` in enumeration order (last variable varies fastest).
    pub fn index_of(&self, y: &[Level]) -> Option<usize> {
        if y.len() != self.arity() {
            return None;
        }
        let mut idx = 0usize;
        for (v, &level) in self.variables.iter().zip(y) {
            idx = idx * v.levels.len() + v.level_position(level)?;
        }
        Some(idx)
    }

    /// The vector at dense index `idx`. Panics when out of range.
    pub fn value_at(&self, mut idx: usize) -> Vec<Level> {
        assert!(idx < self.size, "data index out of range");
        let mut y = vec![0; self.arity()];
        for (slot, v) in y.iter_mut().zip(&self.variables).rev() {
            let n = v.levels.len();
            *slot = v.levels[idx % n];
            idx /= n;
        }
        y
    }

    /// Every `y` in enumeration order.
    pub fn values(&self) -> impl Iterator<Item = Vec<Level>> + '_ {
        (0..self.size).map(|i| self.value_at(i))
    }

    /// All assignments to the variables at `indices`, in enumeration order.
    pub fn assignments(&self, indices: &[usize]) -> Vec<Vec<Level>> {
        let mut out = vec![Vec::with_capacity(indices.len())];
        for &i in indices {
            let levels = &self.variables[i].levels;
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    levels.iter().map(move |&l| {
                        let mut next = prefix.clone();
                        next.push(l);
                        next
                    })
                })
                .collect();
        }
        out
    }
}

/// A missingness pattern `r`; `true` marks an observed coordinate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MissingnessPattern(Vec<bool>);

impl MissingnessPattern {
    pub fn new(bits: Vec<bool>) -> Self {
        MissingnessPattern(bits)
    }

    pub fn all_observed(n: usize) -> Self {
        MissingnessPattern(vec![true; n])
    }

    pub fn all_missing(n: usize) -> Self {
        MissingnessPattern(vec![false; n])
    }

    /// The monotone pattern observing exactly the first `observed` of `n` coordinates.
    pub fn monotone(n: usize, observed: usize) -> Self {
        MissingnessPattern((0..n).map(|i| i < observed).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_observed(&self, i: usize) -> bool {
        self.0[i]
    }

    /// `r . r`, the number of observed coordinates.
    pub fn observed_count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn is_complete(&self) -> bool {
        self.0.iter().all(|&b| b)
    }

    pub fn observed_indices(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i]).collect()
    }

    pub fn missing_indices(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| !self.0[i]).collect()
    }
}

impl fmt::Display for MissingnessPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for MissingnessPattern {
    type Err = SpaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() {
            return Err(SpaceError::BadPatternLiteral(s.to_owned()));
        }
        s.chars()
            .map(|c| match c {
                '1' => Ok(true),
                '0' => Ok(false),
                _ => Err(SpaceError::BadPatternLiteral(s.to_owned())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(MissingnessPattern)
    }
}

/// The pattern set `R`. The all-ones pattern always sits at index 0; the rest keep
/// the order they were supplied in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSet {
    patterns: Vec<MissingnessPattern>,
}

impl PatternSet {
    pub fn new(arity: usize, patterns: Vec<MissingnessPattern>) -> Result<Self, SpaceError> {
        if patterns.is_empty() {
            return Err(SpaceError::NoPatterns);
        }
        let mut seen = HashSet::new();
        for p in &patterns {
            if p.len() != arity {
                return Err(SpaceError::PatternLength {
                    pattern: p.clone(),
                    len: p.len(),
                    expected: arity,
                });
            }
            if !seen.insert(p.clone()) {
                return Err(SpaceError::DuplicatePattern(p.clone()));
            }
        }
        let complete = patterns
            .iter()
            .position(MissingnessPattern::is_complete)
            .ok_or(SpaceError::MissingCompletePattern)?;
        let mut ordered = Vec::with_capacity(patterns.len());
        ordered.push(patterns[complete].clone());
        ordered.extend(
            patterns
                .into_iter()
                .enumerate()
                .filter(|&(i, _)| i != complete)
                .map(|(_, p)| p),
        );
        Ok(PatternSet { patterns: ordered })
    }

    /// Only the complete-case pattern.
    pub fn complete_only(arity: usize) -> Self {
        PatternSet {
            patterns: vec![MissingnessPattern::all_observed(arity)],
        }
    }

    /// All `2^n` patterns, all-ones first and the rest in descending binary order.
    pub fn all(arity: usize) -> Self {
        let patterns = (0..1usize << arity)
            .rev()
            .map(|m| {
                MissingnessPattern((0..arity).map(|i| m >> (arity - 1 - i) & 1 == 1).collect())
            })
            .collect();
        PatternSet { patterns }
    }

    /// The monotone dropout chain `1..1, 1..10, ..., 10..0`, optionally followed by all-zeros.
    pub fn monotone(arity: usize, with_all_missing: bool) -> Self {
        let mut patterns: Vec<_> = (1..=arity)
            .rev()
            .map(|j| MissingnessPattern::monotone(arity, j))
            .collect();
        if with_all_missing {
            patterns.push(MissingnessPattern::all_missing(arity));
        }
        PatternSet { patterns }
    }

    pub fn patterns(&self) -> &[MissingnessPattern] {
        &self.patterns
    }

    /// `k`.
    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.patterns[0].len()
    }

    pub fn index_of(&self, r: &MissingnessPattern) -> Option<usize> {
        self.patterns.iter().position(|p| p == r)
    }

    pub fn get(&self, idx: usize) -> &MissingnessPattern {
        &self.patterns[idx]
    }

    /// Coordinates observed under every pattern in the set.
    pub fn common_observed(&self) -> Vec<usize> {
        (0..self.arity())
            .filter(|&i| self.patterns.iter().all(|p| p.is_observed(i)))
            .collect()
    }
}

/// A point `(y, r)` of the full sample space.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub y: Vec<Level>,
    pub r: MissingnessPattern,
}

impl Point {
    pub fn new(y: Vec<Level>, r: MissingnessPattern) -> Self {
        Point { y, r }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(({}), {})", join_levels(&self.y), self.r)
    }
}

pub(crate) fn join_levels(values: &[Level]) -> String {
    values
        .iter()
        .map(Level::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// Observed values of `y` under `r`, in index order. Empty when nothing is observed.
pub fn project_observed(y: &[Level], r: &MissingnessPattern) -> Result<Vec<Level>, SpaceError> {
    select(y, r, true)
}

/// Unobserved values of `y` under `r`, in index order. Empty for the all-ones pattern.
pub fn project_missing(y: &[Level], r: &MissingnessPattern) -> Result<Vec<Level>, SpaceError> {
    select(y, r, false)
}

fn select(y: &[Level], r: &MissingnessPattern, keep: bool) -> Result<Vec<Level>, SpaceError> {
    if y.len() != r.len() {
        return Err(SpaceError::LengthMismatch {
            values: y.len(),
            pattern: r.len(),
        });
    }
    Ok(y.iter()
        .zip(r.bits())
        .filter(|&(_, &b)| b == keep)
        .map(|(&v, _)| v)
        .collect())
}

/// Inverse of the two projections: interleaves observed and missing values by `r`.
pub fn merge_projections(
    observed: &[Level],
    missing: &[Level],
    r: &MissingnessPattern,
) -> Result<Vec<Level>, SpaceError> {
    let n_obs = r.observed_count();
    if observed.len() != n_obs || missing.len() != r.len() - n_obs {
        return Err(SpaceError::LengthMismatch {
            values: observed.len() + missing.len(),
            pattern: r.len(),
        });
    }
    let (mut obs, mut mis) = (observed.iter(), missing.iter());
    Ok(r.bits()
        .iter()
        .map(|&b| {
            if b {
                *obs.next().unwrap()
            } else {
                *mis.next().unwrap()
            }
        })
        .collect())
}

/// An element of the observable data: a pattern plus the values it reveals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObservedData {
    pub pattern: MissingnessPattern,
    pub values: Vec<Level>,
}

impl fmt::Display for ObservedData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut obs = self.values.iter();
        let shown: Vec<String> = self
            .pattern
            .bits()
            .iter()
            .map(|&b| {
                if b {
                    obs.next().map_or_else(String::new, Level::to_string)
                } else {
                    "NA".to_owned()
                }
            })
            .collect();
        write!(f, "{} ({})", self.pattern, shown.join(","))
    }
}

/// An observable data event: every point sharing a pattern and its observed values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservableDataEvent {
    pattern: MissingnessPattern,
    observed_values: BTreeMap<usize, Level>,
    members: Vec<Point>,
}

impl ObservableDataEvent {
    pub fn pattern(&self) -> &MissingnessPattern {
        &self.pattern
    }

    /// Observed variable index to level.
    pub fn observed_values(&self) -> &BTreeMap<usize, Level> {
        &self.observed_values
    }

    /// Members in enumeration order of their `y`.
    pub fn members(&self) -> &[Point] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_singleton(&self) -> bool {
        self.members.len() == 1
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.r == self.pattern
            && self
                .observed_values
                .iter()
                .all(|(&i, &v)| p.y.get(i) == Some(&v))
            && p.y.len() == self.pattern.len()
    }

    /// The observable-data key of this event.
    pub fn key(&self) -> ObservedData {
        ObservedData {
            pattern: self.pattern.clone(),
            values: self.observed_values.values().copied().collect(),
        }
    }
}

impl fmt::Display for ObservableDataEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.key().fmt(f)
    }
}

/// The full sample space `Omega = Y x R` with dense indexing.
///
/// Index of `(y, r)` is `pattern_index * |Y| + data_index`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Omega {
    space: DataSpace,
    patterns: PatternSet,
}

impl Omega {
    pub fn new(space: DataSpace, patterns: PatternSet) -> Result<Self, SpaceError> {
        if patterns.arity() != space.arity() {
            return Err(SpaceError::PatternLength {
                pattern: patterns.get(0).clone(),
                len: patterns.arity(),
                expected: space.arity(),
            });
        }
        space
            .size()
            .checked_mul(patterns.len())
            .filter(|&n| n <= MAX_DATA_POINTS)
            .ok_or(SpaceError::TooLarge)?;
        Ok(Omega { space, patterns })
    }

    pub fn space(&self) -> &DataSpace {
        &self.space
    }

    pub fn patterns(&self) -> &PatternSet {
        &self.patterns
    }

    /// `|Omega|`.
    pub fn len(&self) -> usize {
        self.space.size() * self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, data_idx: usize, pattern_idx: usize) -> usize {
        pattern_idx * self.space.size() + data_idx
    }

    /// `(data index, pattern index)` of `p`, if it lies in the space.
    pub fn locate(&self, p: &Point) -> Option<(usize, usize)> {
        Some((self.space.index_of(&p.y)?, self.patterns.index_of(&p.r)?))
    }

    pub fn point_index(&self, p: &Point) -> Option<usize> {
        self.locate(p).map(|(y, r)| self.index(y, r))
    }

    pub fn point_at(&self, idx: usize) -> Point {
        let n = self.space.size();
        Point::new(self.space.value_at(idx % n), self.patterns.get(idx / n).clone())
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.locate(p).is_some()
    }

    /// Every point, pattern-major.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(|i| self.point_at(i))
    }

    /// The event containing `p`.
    pub fn observable_event(&self, p: &Point) -> Result<ObservableDataEvent, SpaceError> {
        if !self.contains(p) {
            return Err(SpaceError::InvalidPoint(p.clone()));
        }
        let observed: BTreeMap<usize, Level> =
            p.r.observed_indices().into_iter().map(|i| (i, p.y[i])).collect();
        Ok(self.build_event(&p.r, observed))
    }

    fn build_event(
        &self,
        r: &MissingnessPattern,
        observed_values: BTreeMap<usize, Level>,
    ) -> ObservableDataEvent {
        let missing = r.missing_indices();
        let members = self
            .space
            .assignments(&missing)
            .into_iter()
            .map(|fill| {
                let obs: Vec<Level> = observed_values.values().copied().collect();
                let y = merge_projections(&obs, &fill, r).expect("lengths follow the pattern");
                Point::new(y, r.clone())
            })
            .collect();
        ObservableDataEvent {
            pattern: r.clone(),
            observed_values,
            members,
        }
    }

    /// The event keyed by an observable-data element, if it exists in this space.
    pub fn event_for(&self, key: &ObservedData) -> Option<ObservableDataEvent> {
        self.patterns.index_of(&key.pattern)?;
        let idx = key.pattern.observed_indices();
        if idx.len() != key.values.len() {
            return None;
        }
        for (&i, &v) in idx.iter().zip(&key.values) {
            self.space.variables()[i].level_position(v)?;
        }
        Some(self.build_event(&key.pattern, idx.into_iter().zip(key.values.iter().copied()).collect()))
    }

    /// Every observable data event: pattern order, then observed values in enumeration order.
    pub fn enumerate_events(&self) -> Vec<ObservableDataEvent> {
        self.patterns
            .patterns()
            .iter()
            .flat_map(|r| {
                let observed = r.observed_indices();
                self.space
                    .assignments(&observed)
                    .into_iter()
                    .map(move |vals| {
                        let map = observed.iter().copied().zip(vals).collect();
                        (r, map)
                    })
            })
            .map(|(r, map)| self.build_event(r, map))
            .collect()
    }

    /// Whether two points generate the same observable data event.
    pub fn ob_equivalent(&self, a: &Point, b: &Point) -> Result<bool, SpaceError> {
        for p in [a, b] {
            if !self.contains(p) {
                return Err(SpaceError::InvalidPoint(p.clone()));
            }
        }
        Ok(a.r == b.r && project_observed(&a.y, &a.r)? == project_observed(&b.y, &b.r)?)
    }
}
