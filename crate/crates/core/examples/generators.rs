//! Builds each kind of mechanism by hand and checks its classification.

use std::collections::BTreeMap;

use marlab::mar_analysis::is_everywhere_mar;
use marlab::mechanism_lab::{
    hazard_tables, make_common_observed, make_constant, make_monotone_dropout, perturb_mnar, Assignment,
};
use marlab::{DataSpace, MissingnessPattern, Omega, PatternSet, Prob};

fn p(n: i64, d: i64) -> Prob {
    Prob::ratio(n, d).expect("in range")
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = DataSpace::with_level_counts(&[2, 2, 2])?;

    let all = Omega::new(space.clone(), PatternSet::all(3))?;
    let mcar = make_constant(&all, &[vec![p(1, 2)], vec![p(1, 14); 7]].concat())?;
    println!("constant:        {}", is_everywhere_mar(&mcar)?);

    // Y1 is seen in every pattern, so g may depend on it.
    let chain = PatternSet::new(
        3,
        ["111", "110", "100"]
            .iter()
            .map(|s| MissingnessPattern::new(s.chars().map(|c| c == '1').collect()))
            .collect(),
    )?;
    let chained = Omega::new(space.clone(), chain)?;
    let table = BTreeMap::from([
        (Assignment::from([(0, 0)]), vec![p(1, 2), p(1, 4), p(1, 4)]),
        (Assignment::from([(0, 1)]), vec![p(1, 3), p(1, 3), p(1, 3)]),
    ]);
    let common = make_common_observed(&chained, table)?;
    println!("common-observed: {}", is_everywhere_mar(&common)?);

    let monotone = Omega::new(space.clone(), PatternSet::monotone(3, true))?;
    let hazards = hazard_tables(
        &space,
        vec![
            BTreeMap::from([(Assignment::new(), p(1, 10))]),
            BTreeMap::from([(Assignment::from([(0, 0)]), p(1, 5)), (Assignment::from([(0, 1)]), p(2, 5))]),
            BTreeMap::from([(Assignment::from([(1, 0)]), p(1, 4)), (Assignment::from([(1, 1)]), p(1, 2))]),
        ],
    )?;
    let dropout = make_monotone_dropout(&monotone, &hazards)?;
    println!("monotone:        {}", is_everywhere_mar(&dropout)?);

    let target = all
        .enumerate_events()
        .into_iter()
        .find(|e| e.len() == 4)
        .expect("an event with two missing values");
    let bent = perturb_mnar(&mcar, &target, &p(1, 100), all.patterns().get(0))?;
    println!("perturbed:       {}", is_everywhere_mar(&bent)?);
    Ok(())
}
