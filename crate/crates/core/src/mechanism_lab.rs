//! Mechanism generators, dataset sampling and the complete-case bias calculation.
//!
//! Three generators produce everywhere-MAR mechanisms by construction:
//! [`make_constant`], [`make_common_observed`] and [`make_monotone_dropout`].
//! [`perturb_mnar`] breaks MAR on a chosen event by moving mass between two
//! patterns at one member. Randomized variants draw rational parameters with
//! bounded denominators from [`SplitMix64`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::distribution::{
    marginal_y, pattern_mixture_factorize, DistributionError, FullDensity, Marginal, Mechanism,
};
use crate::prob::{format_rational, total, Prob};
use crate::rng::SplitMix64;
use crate::sample_space::{
    join_levels, project_observed, DataSpace, Level, MissingnessPattern, ObservableDataEvent,
    ObservedData, Omega, PatternSet, Point, SpaceError,
};

/// Default bound on denominators drawn by the random generators.
pub const DEFAULT_MAX_DENOMINATOR: u64 = 64;

/// Values for a subset of variables, keyed by variable index.
pub type Assignment = BTreeMap<usize, Level>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabError {
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("{what} sums to {total}, expected 1")]
    Mass { what: String, total: String },
    #[error("expected {expected} probabilities (one per pattern), got {got}")]
    VectorLength { expected: usize, got: usize },
    #[error("table is keyed on variable {0}, which is not observed under every pattern")]
    NonCommonVariable(usize),
    #[error("table keys do not all use the same variables")]
    InconsistentKeys,
    #[error("table has no entry for assignment {0}")]
    MissingAssignment(String),
    #[error("table entry {0} is not a valid assignment")]
    BadAssignment(String),
    #[error("pattern set is not the monotone dropout chain")]
    NotMonotone,
    #[error("expected {expected} hazard tables, got {got}")]
    HazardCount { expected: usize, got: usize },
    #[error("hazard at step {step} depends on variable {var}, which is not observed before that step")]
    HazardLooksAhead { step: usize, var: usize },
    #[error("hazard at step 0 must be zero when the all-missing pattern is absent")]
    NoAllMissingPattern,
    #[error("pattern {0} is not in the pattern set")]
    UnknownPattern(MissingnessPattern),
    #[error("donor pattern must differ from the event's pattern")]
    DonorIsTarget,
    #[error("event {0} has a single member; a perturbation cannot break constancy there")]
    SingletonEvent(String),
    #[error("perturbation moves g({target}|y) to {target_value} and g({donor}|y) to {donor_value}; both must stay in [0, 1]")]
    BoundViolation {
        target: MissingnessPattern,
        donor: MissingnessPattern,
        target_value: String,
        donor_value: String,
    },
    #[error("no event admits a perturbation")]
    NoPerturbableEvent,
    #[error("the complete-case pattern has probability zero")]
    ZeroCompleteCases,
    #[error("variable index {0} is out of range")]
    VariableOutOfRange(usize),
}

fn check_vector(omega: &Omega, probs: &[Prob], what: &str) -> Result<(), LabError> {
    let k = omega.patterns().len();
    if probs.len() != k {
        return Err(LabError::VectorLength {
            expected: k,
            got: probs.len(),
        });
    }
    let mass = total(probs);
    if !mass.is_one() {
        return Err(LabError::Mass {
            what: what.to_owned(),
            total: format_rational(&mass),
        });
    }
    Ok(())
}

/// A function of some variables, given as a complete table over their assignments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentTable<V> {
    vars: Vec<usize>,
    entries: BTreeMap<Vec<Level>, V>,
}

impl<V: Clone> AssignmentTable<V> {
    /// Checks that every key uses the same variables and that every assignment of
    /// those variables is present.
    pub fn new(space: &DataSpace, table: BTreeMap<Assignment, V>) -> Result<Self, LabError> {
        let vars: Vec<usize> = table
            .keys()
            .next()
            .map(|k| k.keys().copied().collect())
            .unwrap_or_default();
        if let Some(&bad) = vars.iter().find(|&&i| i >= space.arity()) {
            return Err(LabError::VariableOutOfRange(bad));
        }
        let mut entries = BTreeMap::new();
        for (key, v) in table {
            if key.keys().copied().collect::<Vec<_>>() != vars {
                return Err(LabError::InconsistentKeys);
            }
            for (&i, &level) in &key {
                if space.variables()[i].level_position(level).is_none() {
                    return Err(LabError::BadAssignment(format!("{key:?}")));
                }
            }
            entries.insert(key.into_values().collect::<Vec<_>>(), v);
        }
        for a in space.assignments(&vars) {
            if !entries.contains_key(&a) {
                let shown: Assignment = vars.iter().copied().zip(a).collect();
                return Err(LabError::MissingAssignment(format!("{shown:?}")));
            }
        }
        Ok(AssignmentTable { vars, entries })
    }

    /// A table that ignores every variable.
    pub fn constant(value: V) -> Self {
        AssignmentTable {
            vars: Vec::new(),
            entries: BTreeMap::from([(Vec::new(), value)]),
        }
    }

    /// Variables the table is keyed on.
    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn lookup(&self, y: &[Level]) -> &V {
        let key: Vec<Level> = self.vars.iter().map(|&i| y[i]).collect();
        &self.entries[&key]
    }

    pub fn entries(&self) -> impl Iterator<Item = (Assignment, &V)> + '_ {
        self.entries
            .iter()
            .map(|(k, v)| (self.vars.iter().copied().zip(k.iter().copied()).collect(), v))
    }
}

/// `g(r|y) = probs[r]` for every `y` (missing completely at random).
pub fn make_constant(omega: &Omega, probs: &[Prob]) -> Result<Mechanism, LabError> {
    check_vector(omega, probs, "constant probability vector")?;
    let n = omega.space().size();
    let table = (0..omega.len()).map(|i| Some(probs[i / n].clone())).collect();
    Ok(Mechanism::new(omega.clone(), table)?)
}

/// `g(r|y) = table(y restricted to the commonly observed variables)[r]`.
pub fn make_common_observed(
    omega: &Omega,
    table: BTreeMap<Assignment, Vec<Prob>>,
) -> Result<Mechanism, LabError> {
    let common: BTreeSet<usize> = omega.patterns().common_observed().into_iter().collect();
    if let Some(&bad) = table
        .keys()
        .flat_map(|k| k.keys())
        .find(|i| !common.contains(i))
    {
        return Err(LabError::NonCommonVariable(bad));
    }
    let table = AssignmentTable::new(omega.space(), table)?;
    for (key, v) in table.entries() {
        check_vector(omega, v, &format!("probability vector for {key:?}"))?;
    }
    common_observed_from_table(omega, &table)
}

fn common_observed_from_table(
    omega: &Omega,
    table: &AssignmentTable<Vec<Prob>>,
) -> Result<Mechanism, LabError> {
    let patterns = omega.patterns();
    Ok(Mechanism::from_fn(omega.clone(), |y, r| {
        table.lookup(y)[patterns.index_of(r).expect("pattern from omega")].clone()
    })?)
}

/// Checks that `patterns` is the monotone chain, optionally with all-missing appended.
fn monotone_shape(patterns: &PatternSet) -> Result<bool, LabError> {
    let n = patterns.arity();
    let chain: Vec<MissingnessPattern> = (1..=n).rev().map(|j| MissingnessPattern::monotone(n, j)).collect();
    let set: BTreeSet<&MissingnessPattern> = patterns.patterns().iter().collect();
    let zeros = MissingnessPattern::all_missing(n);
    let has_zeros = set.contains(&zeros);
    if set.len() != chain.len() + usize::from(has_zeros) || !chain.iter().all(|c| set.contains(c)) {
        return Err(LabError::NotMonotone);
    }
    Ok(has_zeros)
}

/// Monotone dropout: `hazards[t]` is the probability of dropping out at variable `t`
/// having reached it, and may depend only on variables before `t`.
///
/// The pattern observing the first `j` variables gets
/// `prod_{t<j} (1 - hazards[t]) * hazards[j]`; the complete pattern gets the
/// full survival product.
pub fn make_monotone_dropout(
    omega: &Omega,
    hazards: &[AssignmentTable<Prob>],
) -> Result<Mechanism, LabError> {
    let has_zeros = monotone_shape(omega.patterns())?;
    let n = omega.space().arity();
    if hazards.len() != n {
        return Err(LabError::HazardCount {
            expected: n,
            got: hazards.len(),
        });
    }
    for (step, h) in hazards.iter().enumerate() {
        if let Some(&var) = h.vars().iter().find(|&&v| v >= step) {
            return Err(LabError::HazardLooksAhead { step, var });
        }
    }
    if !has_zeros && hazards[0].entries().any(|(_, p)| !p.is_zero()) {
        return Err(LabError::NoAllMissingPattern);
    }
    Ok(Mechanism::from_fn(omega.clone(), |y, r| {
        let j = r.observed_count();
        let survival = hazards[..j]
            .iter()
            .fold(Prob::one(), |acc, h| acc.times(&h.lookup(y).complement()));
        if j == n {
            survival
        } else {
            survival.times(hazards[j].lookup(y))
        }
    })?)
}

/// Hazard tables keyed by assignment maps, validated against `space`.
pub fn hazard_tables(
    space: &DataSpace,
    tables: Vec<BTreeMap<Assignment, Prob>>,
) -> Result<Vec<AssignmentTable<Prob>>, LabError> {
    tables
        .into_iter()
        .map(|t| AssignmentTable::new(space, t))
        .collect()
}

/// Moves `delta` of mass from `donor` to the event's pattern at the event's first member.
pub fn perturb_mnar(
    g: &Mechanism,
    e: &ObservableDataEvent,
    delta: &Prob,
    donor: &MissingnessPattern,
) -> Result<Mechanism, LabError> {
    let patterns = g.omega().patterns();
    patterns
        .index_of(donor)
        .ok_or_else(|| LabError::UnknownPattern(donor.clone()))?;
    patterns
        .index_of(e.pattern())
        .ok_or_else(|| LabError::UnknownPattern(e.pattern().clone()))?;
    if donor == e.pattern() {
        return Err(LabError::DonorIsTarget);
    }
    if delta.is_zero() {
        return Ok(g.clone());
    }
    if e.is_singleton() {
        return Err(LabError::SingletonEvent(e.to_string()));
    }
    let member = &e.members()[0];
    let donor_point = Point::new(member.y.clone(), donor.clone());
    let undefined = || {
        DistributionError::UndefinedWherePositive(join_levels(&member.y))
    };
    let target_value = g.value(member).ok_or_else(undefined)?.value() + delta.value();
    let donor_value = g.value(&donor_point).ok_or_else(undefined)?.value() - delta.value();
    let (Ok(t), Ok(d)) = (Prob::new(target_value.clone()), Prob::new(donor_value.clone())) else {
        return Err(LabError::BoundViolation {
            target: e.pattern().clone(),
            donor: donor.clone(),
            target_value: format_rational(&target_value),
            donor_value: format_rational(&donor_value),
        });
    };
    Ok(g.with_entries([(member.clone(), t), (donor_point, d)])?)
}

/// Which generator a [`MechanismSpec`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MechanismKind {
    Constant,
    CommonObserved,
    MonotoneDropout,
    PerturbedMnar,
}

impl fmt::Display for MechanismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MechanismKind::Constant => "constant",
            MechanismKind::CommonObserved => "common-observed",
            MechanismKind::MonotoneDropout => "monotone",
            MechanismKind::PerturbedMnar => "mnar",
        })
    }
}

/// Parameters for one of the generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MechanismSpec {
    Constant {
        probs: Vec<Prob>,
    },
    CommonObserved {
        table: AssignmentTable<Vec<Prob>>,
    },
    MonotoneDropout {
        hazards: Vec<AssignmentTable<Prob>>,
    },
    PerturbedMnar {
        base: Box<MechanismSpec>,
        target: ObservedData,
        delta: Prob,
        donor: MissingnessPattern,
    },
}

impl MechanismSpec {
    pub fn kind(&self) -> MechanismKind {
        match self {
            MechanismSpec::Constant { .. } => MechanismKind::Constant,
            MechanismSpec::CommonObserved { .. } => MechanismKind::CommonObserved,
            MechanismSpec::MonotoneDropout { .. } => MechanismKind::MonotoneDropout,
            MechanismSpec::PerturbedMnar { .. } => MechanismKind::PerturbedMnar,
        }
    }

    pub fn build(&self, omega: &Omega) -> Result<Mechanism, LabError> {
        match self {
            MechanismSpec::Constant { probs } => make_constant(omega, probs),
            MechanismSpec::CommonObserved { table } => {
                let common: BTreeSet<usize> =
                    omega.patterns().common_observed().into_iter().collect();
                if let Some(&bad) = table.vars().iter().find(|i| !common.contains(i)) {
                    return Err(LabError::NonCommonVariable(bad));
                }
                for (key, v) in table.entries() {
                    check_vector(omega, v, &format!("probability vector for {key:?}"))?;
                }
                common_observed_from_table(omega, table)
            }
            MechanismSpec::MonotoneDropout { hazards } => make_monotone_dropout(omega, hazards),
            MechanismSpec::PerturbedMnar {
                base,
                target,
                delta,
                donor,
            } => {
                let g = base.build(omega)?;
                let e = omega
                    .event_for(target)
                    .ok_or_else(|| LabError::UnknownPattern(target.pattern.clone()))?;
                perturb_mnar(&g, &e, delta, donor)
            }
        }
    }

    /// Draws random parameters for `kind` on `omega`.
    pub fn random(kind: MechanismKind, omega: &Omega, seed: u64) -> Result<Self, LabError> {
        let mut rng = SplitMix64::new(seed);
        let max_den = DEFAULT_MAX_DENOMINATOR;
        let k = omega.patterns().len();
        match kind {
            MechanismKind::Constant => Ok(MechanismSpec::Constant {
                probs: rng.prob_vector(k, max_den, false),
            }),
            MechanismKind::CommonObserved => {
                let common = omega.patterns().common_observed();
                let vars: Vec<usize> = common.into_iter().filter(|_| rng.coin()).collect();
                let entries = omega
                    .space()
                    .assignments(&vars)
                    .into_iter()
                    .map(|a| (a, rng.prob_vector(k, max_den, false)))
                    .collect();
                Ok(MechanismSpec::CommonObserved {
                    table: AssignmentTable { vars, entries },
                })
            }
            MechanismKind::MonotoneDropout => {
                let has_zeros = monotone_shape(omega.patterns())?;
                let n = omega.space().arity();
                let hazards = (0..n)
                    .map(|step| {
                        let vars = rng.subset(step);
                        let entries = omega
                            .space()
                            .assignments(&vars)
                            .into_iter()
                            .map(|a| {
                                let p = if step == 0 && !has_zeros {
                                    Prob::zero()
                                } else {
                                    rng.prob(max_den)
                                };
                                (a, p)
                            })
                            .collect();
                        AssignmentTable { vars, entries }
                    })
                    .collect();
                Ok(MechanismSpec::MonotoneDropout { hazards })
            }
            MechanismKind::PerturbedMnar => {
                let base = MechanismSpec::Constant {
                    probs: rng.prob_vector(k, max_den.max(k as u64), true),
                };
                let g = base.build(omega)?;
                let candidates: Vec<ObservableDataEvent> = omega
                    .enumerate_events()
                    .into_iter()
                    .filter(|e| !e.is_singleton())
                    .collect();
                if candidates.is_empty() {
                    return Err(LabError::NoPerturbableEvent);
                }
                let e = &candidates[rng.index(candidates.len())];
                let others: Vec<&MissingnessPattern> = omega
                    .patterns()
                    .patterns()
                    .iter()
                    .filter(|r| *r != e.pattern())
                    .collect();
                let donor = others[rng.index(others.len())].clone();
                let member = &e.members()[0];
                let room_target = g.value(member).expect("total").complement();
                let room_donor = g
                    .value(&Point::new(member.y.clone(), donor.clone()))
                    .expect("total")
                    .clone();
                let room = room_target.min(room_donor);
                // delta = room * a/q with 0 < a <= q, so 0 < delta <= room.
                let q = 1 + rng.below(max_den);
                let a = 1 + rng.below(q);
                let delta = Prob::new(
                    room.value() * BigRational::new(BigInt::from(a), BigInt::from(q)),
                )
                .expect("fraction of a probability");
                Ok(MechanismSpec::PerturbedMnar {
                    base: Box::new(base),
                    target: e.key(),
                    delta,
                    donor,
                })
            }
        }
    }
}

/// A random mechanism where each incomplete pattern's probability depends on a
/// random subset of variables. With `observed_only`, those subsets are drawn from
/// the pattern's observed variables, which makes the result everywhere MAR.
pub fn random_functional_mechanism(
    omega: &Omega,
    rng: &mut SplitMix64,
    observed_only: bool,
) -> Mechanism {
    let k = omega.patterns().len();
    let space = omega.space();
    // Each incomplete pattern stays below 1/(k-1), so the complete pattern keeps the rest.
    let cap = (k.max(2) - 1) as i64;
    let tables: Vec<AssignmentTable<Prob>> = omega.patterns().patterns()[1..]
        .iter()
        .map(|r| {
            let pool = if observed_only {
                r.observed_indices()
            } else {
                (0..space.arity()).collect()
            };
            let vars: Vec<usize> = pool.into_iter().filter(|_| rng.coin()).collect();
            let entries = space
                .assignments(&vars)
                .into_iter()
                .map(|a| {
                    let p = rng.prob(DEFAULT_MAX_DENOMINATOR);
                    (a, Prob::new(p.value() / BigRational::from_integer(cap.into())).expect("scaled"))
                })
                .collect();
            AssignmentTable { vars, entries }
        })
        .collect();
    Mechanism::from_fn(omega.clone(), |y, r| {
        let j = omega.patterns().index_of(r).expect("pattern from omega");
        if j == 0 {
            let rest = tables
                .iter()
                .fold(BigRational::zero(), |acc, t| acc + t.lookup(y).value());
            Prob::new(BigRational::one() - rest).expect("capped mass")
        } else {
            tables[j - 1].lookup(y).clone()
        }
    })
    .expect("rows sum to one by construction")
}

/// A mechanism with every row an independent random probability vector.
pub fn random_mechanism(omega: &Omega, rng: &mut SplitMix64) -> Mechanism {
    let k = omega.patterns().len();
    let rows: Vec<Vec<Prob>> = (0..omega.space().size())
        .map(|_| rng.prob_vector(k, DEFAULT_MAX_DENOMINATOR, false))
        .collect();
    let n = omega.space().size();
    let table = (0..omega.len())
        .map(|i| Some(rows[i % n][i / n].clone()))
        .collect();
    Mechanism::new(omega.clone(), table).expect("rows sum to one")
}

/// A random marginal over `space`; with `positive`, every entry is nonzero.
pub fn random_marginal(space: &DataSpace, rng: &mut SplitMix64, positive: bool) -> Marginal {
    let n = space.size();
    let max_den = DEFAULT_MAX_DENOMINATOR.max(n as u64);
    Marginal::new(space.clone(), rng.prob_vector(n, max_den, positive)).expect("sums to one")
}

/// A random sample space with at most the given numbers of variables, levels per
/// variable and patterns. Level counts are at least 2.
pub fn random_omega(
    rng: &mut SplitMix64,
    max_vars: usize,
    max_levels: usize,
    max_patterns: usize,
) -> Omega {
    let n = 1 + rng.index(max_vars);
    let counts: Vec<usize> = (0..n).map(|_| 2 + rng.index(max_levels - 1)).collect();
    let space = DataSpace::with_level_counts(&counts).expect("small space");
    let all = PatternSet::all(n);
    let mut others: Vec<MissingnessPattern> = all.patterns()[1..].to_vec();
    let extra = rng.index(max_patterns.min(others.len() + 1));
    let mut chosen = vec![all.get(0).clone()];
    for _ in 0..extra {
        let i = rng.index(others.len());
        chosen.push(others.swap_remove(i));
    }
    Omega::new(space, PatternSet::new(n, chosen).expect("distinct patterns")).expect("small")
}

/// Where a dataset came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    /// FNV-1a fingerprint of the generating density's table.
    pub density_id: u64,
    pub seed: u64,
}

/// Rows of observable data drawn from a full density.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncompleteDataset {
    omega: Omega,
    rows: Vec<ObservedData>,
    provenance: Provenance,
}

impl IncompleteDataset {
    pub fn omega(&self) -> &Omega {
        &self.omega
    }

    pub fn rows(&self) -> &[ObservedData] {
        &self.rows
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// How many rows fall in each observable data event.
    pub fn counts(&self) -> BTreeMap<&ObservedData, usize> {
        let mut counts = BTreeMap::new();
        for row in &self.rows {
            *counts.entry(row).or_insert(0) += 1;
        }
        counts
    }
}

fn fingerprint(h: &FullDensity) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for (p, v) in h.entries() {
        for byte in format!("{p}={v};").bytes() {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(0x0100_0000_01b3);
        }
    }
    hash
}

/// Draws `n_rows` points from `h` and keeps only their observed parts.
///
/// Row `i` uses the `i`-th SplitMix64 output `u` for `seed` and selects the first
/// point (in dense order) whose cumulative probability exceeds `u / 2^64`. The
/// comparison is exact.
pub fn sample_dataset(
    h: &FullDensity,
    n_rows: usize,
    seed: u64,
) -> Result<IncompleteDataset, LabError> {
    h.ensure_valid()?;
    let omega = h.omega().clone();
    let two64: BigInt = BigInt::one() << 64;
    let mut cum = BigRational::zero();
    let mut thresholds = Vec::new();
    for i in 0..omega.len() {
        let v = h.at(i).expect("valid density is complete");
        if v.is_zero() {
            continue;
        }
        cum += v.value();
        thresholds.push((i, cum.clone()));
    }
    let rows = (0..n_rows as u64)
        .map(|row| {
            let u = BigRational::new(BigInt::from(SplitMix64::at(seed, row)), two64.clone());
            let pos = thresholds.partition_point(|(_, c)| *c <= u);
            let point = omega.point_at(thresholds[pos].0);
            ObservedData {
                values: project_observed(&point.y, &point.r).expect("arity"),
                pattern: point.r,
            }
        })
        .collect();
    Ok(IncompleteDataset {
        omega,
        rows,
        provenance: Provenance {
            density_id: fingerprint(h),
            seed,
        },
    })
}

/// Complete-case versus marginal mean of one variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiasReport {
    pub variable: usize,
    /// `E[Y_i | R = 1]`.
    pub complete_case_mean: BigRational,
    /// `E[Y_i]`.
    pub marginal_mean: BigRational,
    /// Complete-case mean minus marginal mean.
    pub difference: BigRational,
}

impl fmt::Display for BiasReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "complete-case mean {}\nmarginal mean {}\ndifference {}",
            format_rational(&self.complete_case_mean),
            format_rational(&self.marginal_mean),
            format_rational(&self.difference)
        )
    }
}

/// Exact bias of a complete-case mean for variable `var`.
pub fn complete_case_bias(h: &FullDensity, var: usize) -> Result<BiasReport, LabError> {
    if var >= h.omega().space().arity() {
        return Err(LabError::VariableOutOfRange(var));
    }
    let pm = pattern_mixture_factorize(h)?;
    let complete = pm.component(0).ok_or(LabError::ZeroCompleteCases)?;
    let cc = complete.mean(var);
    let marginal = marginal_y(h)?.mean(var);
    Ok(BiasReport {
        variable: var,
        difference: &cc - &marginal,
        complete_case_mean: cc,
        marginal_mean: marginal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::SelectionModel;
    use crate::mar_analysis::{is_everywhere_mar, is_realized_mar, MarVerdict};

    fn pat(s: &str) -> MissingnessPattern {
        s.parse().unwrap()
    }

    fn p(n: i64, d: i64) -> Prob {
        Prob::ratio(n, d).unwrap()
    }

    fn omega(counts: &[usize], patterns: &[&str]) -> Omega {
        Omega::new(
            DataSpace::with_level_counts(counts).unwrap(),
            PatternSet::new(counts.len(), patterns.iter().map(|s| pat(s)).collect()).unwrap(),
        )
        .unwrap()
    }

    fn assign(pairs: &[(usize, Level)]) -> Assignment {
        pairs.iter().copied().collect()
    }

    #[test]
    fn constant_mechanisms() {
        let o = omega(&[2, 2], &["11", "10"]);
        let g = make_constant(&o, &[p(3, 4), p(1, 4)]).unwrap();
        assert!(matches!(is_everywhere_mar(&g).unwrap(), MarVerdict::EverywhereMar { .. }));
        let degenerate = make_constant(&o, &[Prob::one(), Prob::zero()]).unwrap();
        assert!(o.points().all(|pt| degenerate.value(&pt).unwrap().is_one() == pt.r.is_complete()));
        assert!(matches!(
            make_constant(&o, &[p(5, 8), p(1, 4)]),
            Err(LabError::Mass { .. })
        ));
    }

    #[test]
    fn common_observed_mechanism() {
        let o = omega(&[2, 2], &["11", "10"]);
        let table = BTreeMap::from([
            (assign(&[(0, 0)]), vec![p(1, 2), p(1, 2)]),
            (assign(&[(0, 1)]), vec![p(9, 10), p(1, 10)]),
        ]);
        let g = make_common_observed(&o, table).unwrap();
        assert!(is_everywhere_mar(&g).unwrap().is_mar());
        assert_eq!(g.value(&Point::new(vec![1, 0], pat("10"))), Some(&p(1, 10)));

        let bad = BTreeMap::from([
            (assign(&[(1, 0)]), vec![p(1, 2), p(1, 2)]),
            (assign(&[(1, 1)]), vec![p(1, 2), p(1, 2)]),
        ]);
        assert!(matches!(
            make_common_observed(&o, bad),
            Err(LabError::NonCommonVariable(1))
        ));
        let short = BTreeMap::from([(assign(&[(0, 0)]), vec![p(1, 2), p(1, 2)])]);
        assert!(matches!(
            make_common_observed(&o, short),
            Err(LabError::MissingAssignment(_))
        ));
    }

    #[test]
    fn empty_common_set_reduces_to_constant() {
        let o = omega(&[2, 2], &["11", "10", "01"]);
        assert!(o.patterns().common_observed().is_empty());
        let probs = vec![p(1, 2), p(1, 3), p(1, 6)];
        let g = make_common_observed(&o, BTreeMap::from([(Assignment::new(), probs.clone())]))
            .unwrap();
        assert_eq!(g, make_constant(&o, &probs).unwrap());
    }

    #[test]
    fn monotone_two_step_expansion() {
        let o = Omega::new(
            DataSpace::with_level_counts(&[2, 2]).unwrap(),
            PatternSet::monotone(2, true),
        )
        .unwrap();
        let hazards = hazard_tables(
            o.space(),
            vec![
                BTreeMap::from([(Assignment::new(), p(1, 3))]),
                BTreeMap::from([
                    (assign(&[(0, 0)]), p(0, 1)),
                    (assign(&[(0, 1)]), p(1, 2)),
                ]),
            ],
        )
        .unwrap();
        let g = make_monotone_dropout(&o, &hazards).unwrap();
        for y in o.space().values() {
            let y1 = y[0];
            let at = |r: &str| g.value(&Point::new(y.clone(), pat(r))).unwrap().clone();
            assert_eq!(at("00"), p(1, 3));
            assert_eq!(at("10"), p(2, 3).times(&p(y1, 2)));
            assert_eq!(at("11"), p(2, 3).times(&p(2 - y1, 2)));
        }
        assert!(is_everywhere_mar(&g).unwrap().is_mar());
    }

    #[test]
    fn monotone_rejections() {
        let o = Omega::new(
            DataSpace::with_level_counts(&[2, 2]).unwrap(),
            PatternSet::monotone(2, false),
        )
        .unwrap();
        let zero = AssignmentTable::constant(Prob::zero());
        let g = make_monotone_dropout(&o, &[zero.clone(), zero.clone()]).unwrap();
        assert!(o.points().all(|pt| g.value(&pt).unwrap().is_one() == pt.r.is_complete()));

        let ahead = hazard_tables(
            o.space(),
            vec![BTreeMap::from([
                (assign(&[(1, 0)]), p(1, 4)),
                (assign(&[(1, 1)]), p(1, 2)),
            ])],
        )
        .unwrap();
        assert!(matches!(
            make_monotone_dropout(&o, &[zero.clone(), ahead[0].clone()]),
            Err(LabError::HazardLooksAhead { step: 1, var: 1 })
        ));
        assert!(matches!(
            make_monotone_dropout(&o, &[AssignmentTable::constant(p(1, 3)), zero.clone()]),
            Err(LabError::NoAllMissingPattern)
        ));
        let not_chain = omega(&[2, 2], &["11", "01"]);
        assert!(matches!(
            make_monotone_dropout(&not_chain, &[zero.clone(), zero]),
            Err(LabError::NotMonotone)
        ));
    }

    #[test]
    fn perturbation_breaks_one_event() {
        let o = omega(&[2, 2], &["11", "10"]);
        let g = make_constant(&o, &[p(3, 4), p(1, 4)]).unwrap();
        let e = o.observable_event(&Point::new(vec![1, 0], pat("10"))).unwrap();
        let bent = perturb_mnar(&g, &e, &p(1, 8), &pat("11")).unwrap();
        let MarVerdict::NotMar(w) = is_realized_mar(&bent, &e).unwrap() else {
            panic!("expected NotMAR");
        };
        assert_eq!(w.first, (Point::new(vec![1, 0], pat("10")), p(3, 8)));
        let untouched = o.observable_event(&Point::new(vec![0, 0], pat("10"))).unwrap();
        assert!(is_realized_mar(&bent, &untouched).unwrap().is_mar());

        assert_eq!(perturb_mnar(&g, &e, &Prob::zero(), &pat("11")).unwrap(), g);
        assert!(matches!(
            perturb_mnar(&g, &e, &p(7, 8), &pat("11")),
            Err(LabError::BoundViolation { .. })
        ));
        assert!(matches!(
            perturb_mnar(&g, &e, &p(1, 8), &pat("10")),
            Err(LabError::DonorIsTarget)
        ));
        let single = o.observable_event(&Point::new(vec![1, 0], pat("11"))).unwrap();
        assert!(matches!(
            perturb_mnar(&g, &single, &p(1, 8), &pat("10")),
            Err(LabError::SingletonEvent(_))
        ));
    }

    #[test]
    fn random_specs_build() {
        let o = omega(&[2, 3], &["11", "10", "00"]);
        for seed in 0..20 {
            for kind in [
                MechanismKind::Constant,
                MechanismKind::CommonObserved,
                MechanismKind::PerturbedMnar,
            ] {
                let spec = MechanismSpec::random(kind, &o, seed).unwrap();
                assert_eq!(spec.kind(), kind);
                let g = spec.build(&o).unwrap();
                assert_eq!(
                    is_everywhere_mar(&g).unwrap().is_mar(),
                    kind != MechanismKind::PerturbedMnar
                );
            }
        }
        let g = MechanismSpec::random(MechanismKind::MonotoneDropout, &o, 3)
            .unwrap()
            .build(&o)
            .unwrap();
        assert!(is_everywhere_mar(&g).unwrap().is_mar());
        assert!(matches!(
            MechanismSpec::random(MechanismKind::MonotoneDropout, &omega(&[2, 2], &["11", "01"]), 1),
            Err(LabError::NotMonotone)
        ));
    }

    #[test]
    fn sampling_is_reproducible() {
        let o = omega(&[2, 2], &["11", "10"]);
        let h = FullDensity::uniform(o.clone());
        assert!(sample_dataset(&h, 0, 1).unwrap().is_empty());
        let a = sample_dataset(&h, 200, 99).unwrap();
        let b = sample_dataset(&h, 200, 99).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.rows(), sample_dataset(&h, 200, 100).unwrap().rows());
        for row in a.rows() {
            assert_eq!(row.values.len(), row.pattern.observed_count());
        }
        let point = FullDensity::from_fn(o, |pt| {
            if pt.y == [1, 0] && pt.r.is_complete() {
                Prob::one()
            } else {
                Prob::zero()
            }
        });
        let rows = sample_dataset(&point, 50, 5).unwrap();
        assert!(rows.rows().iter().all(|r| r.values == [1, 0]));
    }

    #[test]
    fn bias_under_mcar_is_zero() {
        let o = omega(&[2, 3], &["11", "01"]);
        let f = Marginal::new(
            o.space().clone(),
            vec![p(1, 12), p(1, 6), p(1, 4), p(1, 4), p(1, 6), p(1, 12)],
        )
        .unwrap();
        let g = make_constant(&o, &[p(2, 5), p(3, 5)]).unwrap();
        let h = SelectionModel::new(f, g).unwrap().recompose();
        for var in 0..2 {
            assert!(complete_case_bias(&h, var).unwrap().difference.is_zero());
        }
        assert!(matches!(
            complete_case_bias(&h, 2),
            Err(LabError::VariableOutOfRange(2))
        ));
    }

    #[test]
    fn bias_under_mar_on_dependent_variable() {
        // f uniform on {0,1}^2, g(10|y) = 1/4 + y0/2. Complete cases favour y0 = 0.
        let o = omega(&[2, 2], &["11", "10"]);
        let g = Mechanism::from_fn(o.clone(), |y, r| {
            let miss = p(1 + 2 * y[0], 4);
            if r.is_complete() {
                miss.complement()
            } else {
                miss
            }
        })
        .unwrap();
        let h = SelectionModel::new(Marginal::uniform(o.space().clone()), g).unwrap().recompose();
        let report = complete_case_bias(&h, 0).unwrap();
        // p(11) = 1/4 (3/4 + 3/4 + 1/4 + 1/4) = 1/2; E[Y0 | 11] = (1/4 + 1/4) / 4 / (1/2) = 1/4.
        assert_eq!(report.complete_case_mean, BigRational::new(1.into(), 4.into()));
        assert_eq!(report.marginal_mean, BigRational::new(1.into(), 2.into()));
        assert!(!report.difference.is_zero());
    }

    #[test]
    fn no_complete_cases() {
        let o = omega(&[2], &["1", "0"]);
        let h = FullDensity::from_table(o, vec![Prob::zero(), Prob::zero(), p(1, 2), p(1, 2)]).unwrap();
        assert!(matches!(
            complete_case_bias(&h, 0),
            Err(LabError::ZeroCompleteCases)
        ));
    }
}
