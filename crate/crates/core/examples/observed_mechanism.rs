//! Computes P(R | Y_obs) with both range modes and shows where they disagree.

use marlab::mar_analysis::{observed_mechanism, restriction_range, Mode};
use marlab::mechanism_lab::{perturb_mnar, MechanismKind, MechanismSpec};
use marlab::{DataSpace, Omega, PatternSet, Prob};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let omega = Omega::new(DataSpace::with_level_counts(&[2, 2])?, PatternSet::all(2))?;
    let base = MechanismSpec::random(MechanismKind::Constant, &omega, 3)?.build(&omega)?;

    let target = omega
        .enumerate_events()
        .into_iter()
        .find(|e| e.len() == 2)
        .expect("a two-point event");
    let donor = omega.patterns().get(0).clone();
    let g = perturb_mnar(&base, &target, &Prob::ratio(1, 100)?, &donor)?;

    let range = restriction_range(&g, &target)?;
    print!("range of g on {}:", target.key());
    for v in range.values() {
        print!(" {v}");
    }
    println!();

    let sup = observed_mechanism(&g, Mode::Sup)?;
    let inf = observed_mechanism(&g, Mode::Inf)?;
    for (key, s) in sup.entries() {
        let i = inf.get(key).expect("same keys");
        let flag = if s != i { "  <- not constant" } else { "" };
        println!("{key}  sup {s}  inf {i}{flag}");
    }
    Ok(())
}
