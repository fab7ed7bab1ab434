//! Exact probability tables on `Omega` and their two factorizations.
//!
//! A [`FullDensity`] `h` can be split as `f(y) g(r|y)` ([`SelectionModel`]) or as
//! `p(r) p(y|r)` ([`PatternMixture`]). Both recompose to `h` exactly. Where
//! `f(y) = 0` the factorized mechanism has no value and its row is marked undefined.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::prob::{format_rational, total, Prob};
use crate::sample_space::{join_levels, DataSpace, MissingnessPattern, Omega, Point};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistributionError {
    #[error("invalid density: {0}")]
    Invalid(ValidationReport),
    #[error("point {0} is not in the sample space")]
    UnknownPoint(Point),
    #[error("point {0} is given twice")]
    DuplicatePoint(Point),
    #[error("table has {got} entries, expected {expected}")]
    Dimension { got: usize, expected: usize },
    #[error("data space mismatch between marginal and mechanism")]
    SpaceMismatch,
    #[error("mechanism probabilities for y = ({y}) sum to {total}; each row must sum to 1")]
    RowSum { y: String, total: String },
    #[error("mechanism row for y = ({0}) is only partially defined")]
    PartialRow(String),
    #[error("mechanism is undefined at y = ({0}) where f(y) > 0")]
    UndefinedWherePositive(String),
    #[error("{what} sums to {total}, expected 1")]
    Mass { what: String, total: String },
    #[error("component given for pattern {0} whose probability is zero")]
    ZeroWeightComponent(MissingnessPattern),
    #[error("no component for pattern {0} whose probability is positive")]
    MissingComponent(MissingnessPattern),
    #[error("density family is empty")]
    EmptyFamily,
    #[error("family member `{0}` lives on a different sample space")]
    FamilyMismatch(String),
}

/// One defect found by [`FullDensity::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Defect {
    /// Points with no entry.
    Incomplete(Vec<Point>),
    /// Entries do not sum to one.
    Mass(BigRational),
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defect::Incomplete(missing) => {
                write!(f, "incomplete table: {} point(s) have no entry", missing.len())?;
                if let Some(first) = missing.first() {
                    write!(f, " (first: {first})")?;
                }
                Ok(())
            }
            Defect::Mass(total) => write!(f, "mass != 1: entries sum to {}", format_rational(total)),
        }
    }
}

/// Outcome of validating a density table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub total_mass: BigRational,
    pub defects: Vec<Defect>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.defects.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid (total mass {})", format_rational(&self.total_mass));
        }
        let parts: Vec<String> = self.defects.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("; "))
    }
}

/// A full density `h` on `Omega`. May be incomplete or mis-normalized until validated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullDensity {
    omega: Omega,
    table: Vec<Option<Prob>>,
}

impl FullDensity {
    /// Builds a table from explicit entries. Completeness and mass are not checked here.
    pub fn from_entries<I>(omega: Omega, entries: I) -> Result<Self, DistributionError>
    where
        I: IntoIterator<Item = (Point, Prob)>,
    {
        let mut table = vec![None; omega.len()];
        for (p, prob) in entries {
            let idx = omega
                .point_index(&p)
                .ok_or_else(|| DistributionError::UnknownPoint(p.clone()))?;
            if table[idx].is_some() {
                return Err(DistributionError::DuplicatePoint(p));
            }
            table[idx] = Some(prob);
        }
        Ok(FullDensity { omega, table })
    }

    /// A complete table in `Omega`'s dense index order.
    pub fn from_table(omega: Omega, table: Vec<Prob>) -> Result<Self, DistributionError> {
        if table.len() != omega.len() {
            return Err(DistributionError::Dimension {
                got: table.len(),
                expected: omega.len(),
            });
        }
        Ok(FullDensity {
            omega,
            table: table.into_iter().map(Some).collect(),
        })
    }

    pub fn from_fn(omega: Omega, mut value: impl FnMut(&Point) -> Prob) -> Self {
        let table = omega.points().map(|p| Some(value(&p))).collect();
        FullDensity { omega, table }
    }

    /// The uniform density on `Omega`.
    pub fn uniform(omega: Omega) -> Self {
        let each = Prob::ratio(1, omega.len() as i64).expect("non-empty space");
        FullDensity::from_fn(omega, |_| each.clone())
    }

    /// Builds and validates in one step.
    pub fn new<I>(omega: Omega, entries: I) -> Result<Self, DistributionError>
    where
        I: IntoIterator<Item = (Point, Prob)>,
    {
        let h = FullDensity::from_entries(omega, entries)?;
        h.ensure_valid()?;
        Ok(h)
    }

    pub fn omega(&self) -> &Omega {
        &self.omega
    }

    pub fn get(&self, p: &Point) -> Option<&Prob> {
        self.table[self.omega.point_index(p)?].as_ref()
    }

    pub fn at(&self, idx: usize) -> Option<&Prob> {
        self.table[idx].as_ref()
    }

    /// Value at `(data index, pattern index)`, zero when absent.
    pub(crate) fn mass_at(&self, y: usize, r: usize) -> BigRational {
        self.table[self.omega.index(y, r)]
            .as_ref()
            .map_or_else(BigRational::zero, |p| p.value().clone())
    }

    /// Every `(point, value)` pair present, in dense order.
    pub fn entries(&self) -> impl Iterator<Item = (Point, &Prob)> + '_ {
        self.table
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.as_ref().map(|p| (self.omega.point_at(i), p)))
    }

    /// Checks completeness and unit mass.
    pub fn validate(&self) -> ValidationReport {
        let missing: Vec<Point> = self
            .table
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_none())
            .map(|(i, _)| self.omega.point_at(i))
            .collect();
        let total_mass = total(self.table.iter().flatten());
        let mut defects = Vec::new();
        if !missing.is_empty() {
            defects.push(Defect::Incomplete(missing));
        }
        if !total_mass.is_one() {
            defects.push(Defect::Mass(total_mass.clone()));
        }
        ValidationReport {
            total_mass,
            defects,
        }
    }

    pub fn ensure_valid(&self) -> Result<(), DistributionError> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(DistributionError::Invalid(report))
        }
    }

    /// Exact probability of a set of points.
    pub fn probability_of<'a, I>(&self, points: I) -> BigRational
    where
        I: IntoIterator<Item = &'a Point>,
    {
        points
            .into_iter()
            .filter_map(|p| self.get(p))
            .fold(BigRational::zero(), |acc, p| acc + p.value())
    }
}

/// A probability table over `Y`, used for `f(y)` and for pattern-mixture components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Marginal {
    space: DataSpace,
    probs: Vec<Prob>,
}

impl Marginal {
    /// A table over `Y` in enumeration order; must sum to one.
    pub fn new(space: DataSpace, probs: Vec<Prob>) -> Result<Self, DistributionError> {
        if probs.len() != space.size() {
            return Err(DistributionError::Dimension {
                got: probs.len(),
                expected: space.size(),
            });
        }
        let mass = total(&probs);
        if !mass.is_one() {
            return Err(DistributionError::Mass {
                what: "marginal".into(),
                total: format_rational(&mass),
            });
        }
        Ok(Marginal { space, probs })
    }

    pub fn uniform(space: DataSpace) -> Self {
        let each = Prob::ratio(1, space.size() as i64).expect("non-empty space");
        let probs = vec![each; space.size()];
        Marginal { space, probs }
    }

    pub fn space(&self) -> &DataSpace {
        &self.space
    }

    pub fn probs(&self) -> &[Prob] {
        &self.probs
    }

    pub fn at(&self, data_idx: usize) -> &Prob {
        &self.probs[data_idx]
    }

    pub fn get(&self, y: &[i64]) -> Option<&Prob> {
        self.space.index_of(y).map(|i| &self.probs[i])
    }

    /// Exact mean of variable `var` under this table.
    pub fn mean(&self, var: usize) -> BigRational {
        self.space
            .values()
            .zip(&self.probs)
            .fold(BigRational::zero(), |acc, (y, p)| {
                acc + BigRational::from_integer(y[var].into()) * p.value()
            })
    }
}

/// A missingness mechanism `g(r|y)`, stored row-wise per `y`.
///
/// Each row is either fully defined and sums to exactly one, or fully undefined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mechanism {
    omega: Omega,
    table: Vec<Option<Prob>>,
}

impl Mechanism {
    /// `table` is in `Omega`'s dense index order.
    pub fn new(omega: Omega, table: Vec<Option<Prob>>) -> Result<Self, DistributionError> {
        if table.len() != omega.len() {
            return Err(DistributionError::Dimension {
                got: table.len(),
                expected: omega.len(),
            });
        }
        let g = Mechanism { omega, table };
        for y in 0..g.omega.space().size() {
            g.check_row(y)?;
        }
        Ok(g)
    }

    /// A total mechanism from a closure over `(y, r)`.
    pub fn from_fn(
        omega: Omega,
        mut value: impl FnMut(&[i64], &MissingnessPattern) -> Prob,
    ) -> Result<Self, DistributionError> {
        let table = omega.points().map(|p| Some(value(&p.y, &p.r))).collect();
        Mechanism::new(omega, table)
    }

    /// Builds a total mechanism from explicit `(point, value)` entries covering all of `Omega`.
    pub fn from_entries<I>(omega: Omega, entries: I) -> Result<Self, DistributionError>
    where
        I: IntoIterator<Item = (Point, Prob)>,
    {
        let mut table = vec![None; omega.len()];
        for (p, prob) in entries {
            let idx = omega
                .point_index(&p)
                .ok_or_else(|| DistributionError::UnknownPoint(p.clone()))?;
            if table[idx].is_some() {
                return Err(DistributionError::DuplicatePoint(p));
            }
            table[idx] = Some(prob);
        }
        Mechanism::new(omega, table)
    }

    fn check_row(&self, y: usize) -> Result<(), DistributionError> {
        let row: Vec<Option<&Prob>> = self.row(y).collect();
        let defined = row.iter().filter(|p| p.is_some()).count();
        let label = || join_levels(&self.omega.space().value_at(y));
        if defined == 0 {
            return Ok(());
        }
        if defined != row.len() {
            return Err(DistributionError::PartialRow(label()));
        }
        let sum = total(row.into_iter().flatten());
        if !sum.is_one() {
            return Err(DistributionError::RowSum {
                y: label(),
                total: format_rational(&sum),
            });
        }
        Ok(())
    }

    fn row(&self, y: usize) -> impl Iterator<Item = Option<&Prob>> + '_ {
        (0..self.omega.patterns().len()).map(move |r| self.table[self.omega.index(y, r)].as_ref())
    }

    pub fn omega(&self) -> &Omega {
        &self.omega
    }

    /// `g(r|y)` by dense indices.
    pub fn at(&self, data_idx: usize, pattern_idx: usize) -> Option<&Prob> {
        self.table[self.omega.index(data_idx, pattern_idx)].as_ref()
    }

    /// `g(p.r | p.y)`; `None` when undefined or outside the space.
    pub fn value(&self, p: &Point) -> Option<&Prob> {
        self.table[self.omega.point_index(p)?].as_ref()
    }

    pub fn is_row_defined(&self, data_idx: usize) -> bool {
        self.table[self.omega.index(data_idx, 0)].is_some()
    }

    pub fn is_total(&self) -> bool {
        self.table.iter().all(Option::is_some)
    }

    /// Points where the mechanism carries no value.
    pub fn undefined_points(&self) -> Vec<Point> {
        self.table
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_none())
            .map(|(i, _)| self.omega.point_at(i))
            .collect()
    }

    /// Returns a copy with one entry replaced. Row constraints are re-checked.
    pub fn with_entries(
        &self,
        updates: impl IntoIterator<Item = (Point, Prob)>,
    ) -> Result<Self, DistributionError> {
        let mut table = self.table.clone();
        for (p, v) in updates {
            let idx = self
                .omega
                .point_index(&p)
                .ok_or_else(|| DistributionError::UnknownPoint(p.clone()))?;
            table[idx] = Some(v);
        }
        Mechanism::new(self.omega.clone(), table)
    }
}

/// The selection-model factorization `h(y, r) = f(y) g(r|y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionModel {
    marginal: Marginal,
    mechanism: Mechanism,
}

impl SelectionModel {
    pub fn new(marginal: Marginal, mechanism: Mechanism) -> Result<Self, DistributionError> {
        if marginal.space() != mechanism.omega().space() {
            return Err(DistributionError::SpaceMismatch);
        }
        for (y, f) in marginal.probs().iter().enumerate() {
            if !f.is_zero() && !mechanism.is_row_defined(y) {
                return Err(DistributionError::UndefinedWherePositive(join_levels(
                    &marginal.space().value_at(y),
                )));
            }
        }
        Ok(SelectionModel {
            marginal,
            mechanism,
        })
    }

    pub fn marginal(&self) -> &Marginal {
        &self.marginal
    }

    pub fn mechanism(&self) -> &Mechanism {
        &self.mechanism
    }

    pub fn omega(&self) -> &Omega {
        self.mechanism.omega()
    }

    pub fn into_parts(self) -> (Marginal, Mechanism) {
        (self.marginal, self.mechanism)
    }

    /// `h(y, r) = f(y) g(r|y)`, with `0 * undefined = 0`.
    pub fn recompose(&self) -> FullDensity {
        let omega = self.omega().clone();
        let n = omega.space().size();
        let table = (0..omega.len())
            .map(|i| {
                let (y, r) = (i % n, i / n);
                let f = self.marginal.at(y);
                Some(match self.mechanism.at(y, r) {
                    Some(g) => f.times(g),
                    None => Prob::zero(),
                })
            })
            .collect();
        FullDensity { omega, table }
    }
}

/// The pattern-mixture factorization `h(y, r) = p(r) p(y|r)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternMixture {
    omega: Omega,
    pattern_marginal: Vec<Prob>,
    components: Vec<Option<Marginal>>,
}

impl PatternMixture {
    /// `components[j]` must be present exactly when `pattern_marginal[j] > 0`.
    pub fn new(
        omega: Omega,
        pattern_marginal: Vec<Prob>,
        components: Vec<Option<Marginal>>,
    ) -> Result<Self, DistributionError> {
        let k = omega.patterns().len();
        if pattern_marginal.len() != k || components.len() != k {
            return Err(DistributionError::Dimension {
                got: pattern_marginal.len().min(components.len()),
                expected: k,
            });
        }
        let mass = total(&pattern_marginal);
        if !mass.is_one() {
            return Err(DistributionError::Mass {
                what: "pattern marginal".into(),
                total: format_rational(&mass),
            });
        }
        for (j, (p, c)) in pattern_marginal.iter().zip(&components).enumerate() {
            let r = omega.patterns().get(j).clone();
            match c {
                Some(c) if c.space() != omega.space() => {
                    return Err(DistributionError::SpaceMismatch)
                }
                Some(_) if p.is_zero() => return Err(DistributionError::ZeroWeightComponent(r)),
                None if !p.is_zero() => return Err(DistributionError::MissingComponent(r)),
                _ => {}
            }
        }
        Ok(PatternMixture {
            omega,
            pattern_marginal,
            components,
        })
    }

    pub fn omega(&self) -> &Omega {
        &self.omega
    }

    /// `p(r)` in pattern order.
    pub fn pattern_marginal(&self) -> &[Prob] {
        &self.pattern_marginal
    }

    /// `p(y|r)` for pattern index `j`; `None` when `p(r_j) = 0`.
    pub fn component(&self, j: usize) -> Option<&Marginal> {
        self.components[j].as_ref()
    }

    pub fn components(&self) -> &[Option<Marginal>] {
        &self.components
    }

    /// `h(y, r) = p(r) p(y|r)`.
    pub fn recompose(&self) -> FullDensity {
        let omega = self.omega.clone();
        let n = omega.space().size();
        let table = (0..omega.len())
            .map(|i| {
                let (y, r) = (i % n, i / n);
                Some(match &self.components[r] {
                    Some(c) => self.pattern_marginal[r].times(c.at(y)),
                    None => Prob::zero(),
                })
            })
            .collect();
        FullDensity { omega, table }
    }
}

/// A finite model of densities over a common sample space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityFamily {
    label: String,
    members: Vec<(String, FullDensity)>,
}

impl DensityFamily {
    pub fn new(
        label: impl Into<String>,
        members: Vec<(String, FullDensity)>,
    ) -> Result<Self, DistributionError> {
        let first = members.first().ok_or(DistributionError::EmptyFamily)?;
        let omega = first.1.omega().clone();
        for (name, h) in &members {
            if h.omega() != &omega {
                return Err(DistributionError::FamilyMismatch(name.clone()));
            }
        }
        Ok(DensityFamily {
            label: label.into(),
            members,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn members(&self) -> &[(String, FullDensity)] {
        &self.members
    }

    pub fn omega(&self) -> &Omega {
        self.members[0].1.omega()
    }
}

fn ratio_prob(num: &BigRational, den: &BigRational) -> Prob {
    Prob::new(num / den).expect("a part never exceeds its whole")
}

/// `f(y) = sum_r h(y, r)`.
pub fn marginal_y(h: &FullDensity) -> Result<Marginal, DistributionError> {
    h.ensure_valid()?;
    let omega = h.omega();
    let k = omega.patterns().len();
    let probs = (0..omega.space().size())
        .map(|y| {
            let s = (0..k).fold(BigRational::zero(), |acc, r| acc + h.mass_at(y, r));
            Prob::new(s).expect("sub-mass of a valid density")
        })
        .collect();
    Ok(Marginal {
        space: omega.space().clone(),
        probs,
    })
}

/// `p(r) = sum_y h(y, r)`, in pattern order.
pub fn marginal_r(h: &FullDensity) -> Result<Vec<Prob>, DistributionError> {
    h.ensure_valid()?;
    let omega = h.omega();
    Ok((0..omega.patterns().len())
        .map(|r| {
            let s = (0..omega.space().size())
                .fold(BigRational::zero(), |acc, y| acc + h.mass_at(y, r));
            Prob::new(s).expect("sub-mass of a valid density")
        })
        .collect())
}

/// Splits `h` into `f(y)` and `g(r|y)`. Rows with `f(y) = 0` come back undefined.
pub fn selection_factorize(h: &FullDensity) -> Result<SelectionModel, DistributionError> {
    let f = marginal_y(h)?;
    let omega = h.omega().clone();
    let n = omega.space().size();
    let table = (0..omega.len())
        .map(|i| {
            let (y, r) = (i % n, i / n);
            let fy = f.at(y);
            (!fy.is_zero()).then(|| ratio_prob(&h.mass_at(y, r), fy.value()))
        })
        .collect();
    let g = Mechanism { omega, table };
    Ok(SelectionModel {
        marginal: f,
        mechanism: g,
    })
}

/// Splits `h` into `p(r)` and the components `p(y|r)`.
pub fn pattern_mixture_factorize(h: &FullDensity) -> Result<PatternMixture, DistributionError> {
    let pr = marginal_r(h)?;
    let omega = h.omega().clone();
    let components = pr
        .iter()
        .enumerate()
        .map(|(r, p)| {
            (!p.is_zero()).then(|| Marginal {
                space: omega.space().clone(),
                probs: (0..omega.space().size())
                    .map(|y| ratio_prob(&h.mass_at(y, r), p.value()))
                    .collect(),
            })
        })
        .collect();
    Ok(PatternMixture {
        omega,
        pattern_marginal: pr,
        components,
    })
}

/// `f(y) = sum_r p(r) p(y|r)`, computed from the mixture side.
pub fn mixture_marginal(pm: &PatternMixture) -> Marginal {
    let space = pm.omega().space().clone();
    let probs = (0..space.size())
        .map(|y| {
            let s = pm
                .pattern_marginal()
                .iter()
                .zip(pm.components())
                .filter_map(|(p, c)| c.as_ref().map(|c| p.value() * c.at(y).value()))
                .fold(BigRational::zero(), |acc, v| acc + v);
            Prob::new(s).expect("mixture of probabilities")
        })
        .collect();
    Marginal { space, probs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample_space::{DataSpace, PatternSet};

    fn pat(s: &str) -> MissingnessPattern {
        s.parse().unwrap()
    }

    fn p(n: i64, d: i64) -> Prob {
        Prob::ratio(n, d).unwrap()
    }

    fn omega(counts: &[usize], patterns: &[&str]) -> Omega {
        let space = DataSpace::with_level_counts(counts).unwrap();
        let set = PatternSet::new(counts.len(), patterns.iter().map(|s| pat(s)).collect()).unwrap();
        Omega::new(space, set).unwrap()
    }

    #[test]
    fn uniform_table_is_valid() {
        let h = FullDensity::uniform(omega(&[2, 2], &["11", "10"]));
        assert_eq!(h.omega().len(), 8);
        assert!(h.validate().is_valid());
        assert!(h.entries().all(|(_, v)| *v == p(1, 8)));
    }

    #[test]
    fn incomplete_table_reported() {
        let o = omega(&[2, 2], &["11", "10"]);
        let entries: Vec<_> = o.points().skip(1).map(|pt| (pt, p(1, 7))).collect();
        let h = FullDensity::from_entries(o, entries).unwrap();
        let report = h.validate();
        assert!(!report.is_valid());
        assert!(matches!(&report.defects[0], Defect::Incomplete(m) if m.len() == 1));
        assert!(report.to_string().contains("incomplete table"));
    }

    #[test]
    fn overweight_table_reported() {
        let o = omega(&[2, 2], &["11", "10"]);
        let mut first = true;
        let h = FullDensity::from_fn(o, |_| {
            if std::mem::take(&mut first) {
                p(2, 8)
            } else {
                p(1, 8)
            }
        });
        let report = h.validate();
        assert_eq!(report.total_mass, BigRational::new(9.into(), 8.into()));
        assert!(report.to_string().contains("mass != 1"));
        assert!(matches!(
            selection_factorize(&h),
            Err(DistributionError::Invalid(_))
        ));
    }

    #[test]
    fn perturbation_of_one_millionth_is_caught() {
        let o = omega(&[2, 2], &["11", "10"]);
        let base = FullDensity::uniform(o.clone());
        let eps = BigRational::new(1.into(), 1_000_000.into());
        for sign in [1, -1] {
            let mut tweaked = false;
            let h = FullDensity::from_fn(o.clone(), |_| {
                let v = BigRational::new(1.into(), 8.into());
                if std::mem::replace(&mut tweaked, true) {
                    Prob::new(v).unwrap()
                } else {
                    Prob::new(v + &eps * BigRational::from_integer(sign.into())).unwrap()
                }
            });
            assert!(!h.validate().is_valid());
        }
        assert!(base.validate().is_valid());
    }

    #[test]
    fn uniform_selection_factorization() {
        let h = FullDensity::uniform(omega(&[2], &["1", "0"]));
        let sm = selection_factorize(&h).unwrap();
        assert_eq!(sm.marginal().probs(), &[p(1, 2), p(1, 2)]);
        for y in 0..2 {
            for r in 0..2 {
                assert_eq!(sm.mechanism().at(y, r), Some(&p(1, 2)));
            }
        }
        assert_eq!(sm.recompose(), h);
    }

    #[test]
    fn factorization_recovers_constant_mechanism() {
        let o = omega(&[3], &["1", "0"]);
        let f = [p(1, 6), p(1, 3), p(1, 2)];
        let c = [p(3, 4), p(1, 4)];
        let h = FullDensity::from_table(
            o.clone(),
            (0..2)
                .flat_map(|r| {
                    let cr = &c[r];
                    f.iter().map(move |fy| fy.times(cr))
                })
                .collect(),
        )
        .unwrap();
        let sm = selection_factorize(&h).unwrap();
        for y in 0..3 {
            assert_eq!(sm.mechanism().at(y, 0), Some(&c[0]));
            assert_eq!(sm.mechanism().at(y, 1), Some(&c[1]));
        }
    }

    #[test]
    fn zero_mass_row_is_undefined() {
        let o = omega(&[3], &["1", "0"]);
        let table = vec![p(1, 4), p(0, 1), p(1, 4), p(1, 4), p(0, 1), p(1, 4)];
        let h = FullDensity::from_table(o, table).unwrap();
        let sm = selection_factorize(&h).unwrap();
        assert!(!sm.mechanism().is_row_defined(1));
        assert_eq!(sm.mechanism().undefined_points().len(), 2);
        assert_eq!(sm.recompose(), h);
    }

    #[test]
    fn uniform_mixture_factorization() {
        let h = FullDensity::uniform(omega(&[2, 2], &["11", "01"]));
        let pm = pattern_mixture_factorize(&h).unwrap();
        assert_eq!(pm.pattern_marginal(), &[p(1, 2), p(1, 2)]);
        for j in 0..2 {
            assert!(pm.component(j).unwrap().probs().iter().all(|v| *v == p(1, 4)));
        }
        assert_eq!(pm.recompose(), h);
    }

    #[test]
    fn degenerate_mixture() {
        let o = omega(&[2], &["1", "0"]);
        let h = FullDensity::from_table(o, vec![p(1, 3), p(2, 3), p(0, 1), p(0, 1)]).unwrap();
        let pm = pattern_mixture_factorize(&h).unwrap();
        assert_eq!(pm.pattern_marginal(), &[Prob::one(), Prob::zero()]);
        assert!(pm.component(1).is_none());
        assert_eq!(pm.component(0).unwrap().probs(), &[p(1, 3), p(2, 3)]);
        assert_eq!(pm.recompose(), h);
    }

    #[test]
    fn recompose_by_hand() {
        // f uniform on two points, g = (2/3, 1/3) everywhere.
        let o = omega(&[2], &["1", "0"]);
        let f = Marginal::uniform(o.space().clone());
        let g = Mechanism::from_fn(o, |_, r| if r.is_complete() { p(2, 3) } else { p(1, 3) })
            .unwrap();
        let h = SelectionModel::new(f, g).unwrap().recompose();
        let got: Vec<_> = h.entries().map(|(pt, v)| (pt.y[0], pt.r.to_string(), v.clone())).collect();
        assert_eq!(
            got,
            vec![
                (0, "1".to_string(), p(1, 3)),
                (1, "1".to_string(), p(1, 3)),
                (0, "0".to_string(), p(1, 6)),
                (1, "0".to_string(), p(1, 6)),
            ]
        );
        assert!(h.validate().is_valid());
    }

    #[test]
    fn zero_weight_component_gives_support_on_complete_cases() {
        let o = omega(&[2], &["1", "0"]);
        let comp = Marginal::new(o.space().clone(), vec![p(1, 4), p(3, 4)]).unwrap();
        let pm = PatternMixture::new(o.clone(), vec![Prob::one(), Prob::zero()], vec![Some(comp.clone()), None])
            .unwrap();
        let h = pm.recompose();
        assert!(h.validate().is_valid());
        assert_eq!(h.at(o.index(1, 0)), Some(&p(3, 4)));
        assert!(h.at(o.index(0, 1)).unwrap().is_zero());
        assert!(matches!(
            PatternMixture::new(o.clone(), vec![Prob::one(), Prob::zero()], vec![Some(comp.clone()), Some(comp)]),
            Err(DistributionError::ZeroWeightComponent(_))
        ));
    }

    #[test]
    fn mechanism_rows_must_sum_to_one() {
        let o = omega(&[2], &["1", "0"]);
        let err = Mechanism::from_fn(o.clone(), |y, r| {
            if y[0] == 1 && r.is_complete() {
                p(7, 8)
            } else {
                p(1, 4)
            }
        })
        .unwrap_err();
        assert!(matches!(err, DistributionError::RowSum { .. }));
        let mut table = vec![Some(p(1, 2)); 4];
        table[o.index(0, 1)] = None;
        assert!(matches!(
            Mechanism::new(o, table),
            Err(DistributionError::PartialRow(_))
        ));
    }

    #[test]
    fn marginals_of_single_pattern_and_uniform() {
        let h = FullDensity::uniform(omega(&[3], &["1"]));
        let pm = pattern_mixture_factorize(&h).unwrap();
        assert_eq!(marginal_y(&h).unwrap(), *pm.component(0).unwrap());
        let h = FullDensity::uniform(omega(&[2, 3], &["11", "10", "00"]));
        assert!(marginal_y(&h).unwrap().probs().iter().all(|v| *v == p(1, 6)));
        assert!(marginal_r(&h).unwrap().iter().all(|v| *v == p(1, 3)));
    }

    #[test]
    fn family_requires_common_space() {
        let a = FullDensity::uniform(omega(&[2], &["1", "0"]));
        let b = FullDensity::uniform(omega(&[3], &["1", "0"]));
        assert!(matches!(
            DensityFamily::new("m", vec![]),
            Err(DistributionError::EmptyFamily)
        ));
        assert!(matches!(
            DensityFamily::new("m", vec![("a".into(), a.clone()), ("b".into(), b)]),
            Err(DistributionError::FamilyMismatch(_))
        ));
        assert_eq!(DensityFamily::new("m", vec![("a".into(), a)]).unwrap().members().len(), 1);
    }
}
