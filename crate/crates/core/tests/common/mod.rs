//! Randomized instances and brute-force oracles shared by the integration tests.
//!
//! The oracles work from raw tables with plain loops and hash maps. They do not
//! call the library's event enumeration, factorization or classification code.

#![allow(dead_code)]

use std::collections::HashMap;

use marlab::distribution::{selection_factorize, FullDensity, Marginal, Mechanism, SelectionModel};
use marlab::mechanism_lab::{
    random_functional_mechanism, random_marginal, random_mechanism, random_omega, Assignment,
    AssignmentTable, MechanismKind, MechanismSpec,
};
use marlab::rng::SplitMix64;
use marlab::{DataSpace, ObservableDataEvent, Omega, PatternSet, Prob};
use num_rational::BigRational;
use num_traits::{One, Zero};

/// How an instance's mechanism was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    /// Every row an independent random vector.
    Arbitrary,
    /// Each pattern depends on a random subset of all variables.
    Functional,
    /// Each pattern depends on a random subset of its observed variables.
    FunctionalObserved,
    Constant,
    CommonObserved,
    Monotone,
    Mnar,
}

impl Class {
    /// Classes that are everywhere MAR by construction.
    pub fn mar_by_construction(self) -> bool {
        matches!(
            self,
            Class::FunctionalObserved | Class::Constant | Class::CommonObserved | Class::Monotone
        )
    }
}

pub struct Instance {
    pub seed: u64,
    pub class: Class,
    /// The mechanism as generated, total on `Omega`.
    pub mechanism: Mechanism,
    pub marginal: Marginal,
    pub density: FullDensity,
    /// `true` when every `f(y) > 0`.
    pub positive: bool,
    /// The perturbed event for `Class::Mnar`.
    pub target: Option<ObservableDataEvent>,
}

impl Instance {
    /// `g` obtained by factorizing `h`; rows with `f(y) = 0` are undefined.
    pub fn factorized(&self) -> Mechanism {
        selection_factorize(&self.density).unwrap().into_parts().1
    }
}

fn monotone_omega(rng: &mut SplitMix64) -> Omega {
    let n = 1 + rng.index(3);
    let counts: Vec<usize> = (0..n).map(|_| 2 + rng.index(2)).collect();
    let space = DataSpace::with_level_counts(&counts).unwrap();
    let with_zeros = rng.coin() || n == 1;
    Omega::new(space, PatternSet::monotone(n, with_zeros)).unwrap()
}

/// One instance: spaces with at most 3 variables, 3 levels and 4 patterns. The
/// class cycles with the seed.
pub fn instance(seed: u64) -> Instance {
    let class = [
        Class::Arbitrary,
        Class::Functional,
        Class::FunctionalObserved,
        Class::Constant,
        Class::CommonObserved,
        Class::Monotone,
        Class::Mnar,
    ][(seed % 7) as usize];
    instance_of(seed, class)
}

pub fn instance_of(seed: u64, class: Class) -> Instance {
    let mut rng = SplitMix64::new(seed);
    let omega = if class == Class::Monotone {
        monotone_omega(&mut rng)
    } else {
        random_omega(&mut rng, 3, 3, 4)
    };
    // MNAR needs a non-singleton event, hence a pattern with something missing.
    let omega = if class == Class::Mnar && omega.patterns().len() == 1 {
        let n = omega.space().arity();
        Omega::new(omega.space().clone(), PatternSet::all(n)).unwrap()
    } else {
        omega
    };
    let positive = class == Class::Mnar || rng.below(3) != 0;
    let marginal = random_marginal(omega.space(), &mut rng, positive);
    let positive = marginal.probs().iter().all(|p| !p.is_zero());
    let sub_seed = rng.next_u64();
    let (mechanism, target) = match class {
        Class::Arbitrary => (random_mechanism(&omega, &mut rng), None),
        Class::Functional => (random_functional_mechanism(&omega, &mut rng, false), None),
        Class::FunctionalObserved => (random_functional_mechanism(&omega, &mut rng, true), None),
        Class::Constant => (build(MechanismKind::Constant, &omega, sub_seed), None),
        Class::CommonObserved => (build(MechanismKind::CommonObserved, &omega, sub_seed), None),
        Class::Monotone => (build(MechanismKind::MonotoneDropout, &omega, sub_seed), None),
        Class::Mnar => {
            let spec = MechanismSpec::random(MechanismKind::PerturbedMnar, &omega, sub_seed).unwrap();
            let MechanismSpec::PerturbedMnar { target, .. } = &spec else { unreachable!() };
            let e = omega.event_for(target).unwrap();
            (spec.build(&omega).unwrap(), Some(e))
        }
    };
    let density = SelectionModel::new(marginal.clone(), mechanism.clone())
        .unwrap()
        .recompose();
    Instance {
        seed,
        class,
        mechanism,
        marginal,
        density,
        positive,
        target,
    }
}

fn build(kind: MechanismKind, omega: &Omega, seed: u64) -> Mechanism {
    MechanismSpec::random(kind, omega, seed)
        .unwrap()
        .build(omega)
        .unwrap()
}

/// The randomized suite: `count` instances from consecutive seeds.
pub fn suite(count: u64) -> Vec<Instance> {
    (0..count).map(instance).collect()
}

/// A random valid density on a random small sample space. Roughly a third have zeros.
pub fn random_density(seed: u64) -> FullDensity {
    let mut rng = SplitMix64::new(seed ^ 0x5eed);
    let omega = random_omega(&mut rng, 3, 3, 4);
    let positive = rng.below(3) != 0;
    let len = omega.len() as u64;
    let probs = rng.prob_vector(omega.len(), 64.max(len), positive);
    FullDensity::from_table(omega, probs).unwrap()
}

// Oracles

/// Every `y` in the product grid, first variable slowest.
pub fn grid(space: &DataSpace) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for var in space.variables() {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                var.levels().iter().map(move |&l| {
                    let mut y = prefix.clone();
                    y.push(l);
                    y
                })
            })
            .collect();
    }
    out
}

/// `(bits, y)` keys of `Omega`.
pub fn points(omega: &Omega) -> Vec<(Vec<bool>, Vec<i64>)> {
    let ys = grid(omega.space());
    omega
        .patterns()
        .patterns()
        .iter()
        .flat_map(|r| ys.iter().map(move |y| (r.bits().to_vec(), y.clone())))
        .collect()
}

/// The observable-data key of a point: pattern plus values with `None` where missing.
pub fn ob_key(bits: &[bool], y: &[i64]) -> ObKey {
    (
        bits.to_vec(),
        bits.iter().zip(y).map(|(&b, &v)| b.then_some(v)).collect(),
    )
}

/// Pattern bits plus values, `None` where missing.
pub type ObKey = (Vec<bool>, Vec<Option<i64>>);

pub type Table = HashMap<(Vec<bool>, Vec<i64>), BigRational>;

/// Raw table of `h`.
pub fn density_table(h: &FullDensity) -> Table {
    h.entries()
        .map(|(p, v)| ((p.r.bits().to_vec(), p.y.clone()), v.value().clone()))
        .collect()
}

/// Raw table of a mechanism, leaving out undefined entries.
pub fn mechanism_table(g: &Mechanism) -> Table {
    g.omega()
        .points()
        .filter_map(|p| {
            g.value(&p)
                .map(|v| ((p.r.bits().to_vec(), p.y.clone()), v.value().clone()))
        })
        .collect()
}

/// `f(y) = sum_r h(y, r)`.
pub fn oracle_marginal(h: &Table) -> HashMap<Vec<i64>, BigRational> {
    let mut f: HashMap<Vec<i64>, BigRational> = HashMap::new();
    for ((_, y), v) in h {
        *f.entry(y.clone()).or_insert_with(BigRational::zero) += v;
    }
    f
}

/// `g(r|y) = h(y, r) / f(y)` where `f(y) > 0`.
pub fn oracle_mechanism(h: &Table) -> Table {
    let f = oracle_marginal(h);
    h.iter()
        .filter(|((_, y), _)| !f[y].is_zero())
        .map(|(k, v)| (k.clone(), v / &f[&k.1]))
        .collect()
}

/// For each observable-data key, whether the defined values of `g` on it are all equal.
/// Uses the double loop over member pairs.
pub fn oracle_constancy(omega: &Omega, g: &Table) -> HashMap<ObKey, bool> {
    let mut groups: HashMap<ObKey, Vec<&BigRational>> = HashMap::new();
    for (bits, y) in points(omega) {
        let key = ob_key(&bits, &y);
        let entry = groups.entry(key).or_default();
        if let Some(v) = g.get(&(bits, y)) {
            entry.push(v);
        }
    }
    groups
        .into_iter()
        .map(|(k, vals)| {
            let constant = vals
                .iter()
                .enumerate()
                .all(|(i, a)| vals[i + 1..].iter().all(|b| a == b));
            (k, constant)
        })
        .collect()
}

/// Whether `g` is constant on every observable-data key.
pub fn oracle_everywhere_mar(omega: &Omega, g: &Table) -> bool {
    oracle_constancy(omega, g).values().all(|&c| c)
}

pub fn event_key(e: &ObservableDataEvent) -> ObKey {
    let p = &e.members()[0];
    ob_key(p.r.bits(), &p.y)
}

/// Exact `sum(values) == 1` with entries in `[0, 1]`.
pub fn is_probability_row<'a>(values: impl IntoIterator<Item = &'a Prob>) -> bool {
    let mut sum = BigRational::zero();
    for v in values {
        let x = v.value();
        if x < &BigRational::zero() || x > &BigRational::one() {
            return false;
        }
        sum += x;
    }
    sum.is_one()
}

/// Hazard table keyed on variable `var` with a random entry per level.
pub fn hazard_on(space: &DataSpace, var: usize, rng: &mut SplitMix64) -> AssignmentTable<Prob> {
    let table = space.variables()[var]
        .levels()
        .iter()
        .map(|&l| (Assignment::from([(var, l)]), rng.prob(64)))
        .collect();
    AssignmentTable::new(space, table).unwrap()
}
