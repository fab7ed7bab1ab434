//! Rebuilds h from f(y) and P(R | Y_obs). Exact under MAR, off otherwise.

use marlab::mar_analysis::{reconstruction_check, Mode};
use marlab::mechanism_lab::{MechanismKind, MechanismSpec};
use marlab::rng::SplitMix64;
use marlab::{mechanism_lab::random_marginal, DataSpace, Omega, PatternSet, SelectionModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let omega = Omega::new(DataSpace::with_level_counts(&[2, 2, 2])?, PatternSet::all(3))?;
    let f = random_marginal(omega.space(), &mut SplitMix64::new(11), true);
    for kind in [MechanismKind::CommonObserved, MechanismKind::PerturbedMnar] {
        let g = MechanismSpec::random(kind, &omega, 5)?.build(&omega)?;
        let h = SelectionModel::new(f.clone(), g)?.recompose();
        for mode in [Mode::Sup, Mode::Inf] {
            let report = reconstruction_check(&h, mode)?;
            println!(
                "{:>15} {mode}: round trip {}, {} mismatched points, rebuilt valid: {}",
                kind.to_string(),
                if report.round_trip_holds() { "holds" } else { "fails" },
                report.mismatches.len(),
                report.validation.is_valid()
            );
        }
    }
    Ok(())
}
