//! Complete-case means against full-data means under MCAR and under MNAR.

use marlab::mechanism_lab::{complete_case_bias, MechanismKind, MechanismSpec};
use marlab::{DataSpace, Marginal, Mechanism, Omega, PatternSet, Prob, SelectionModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let omega = Omega::new(DataSpace::with_level_counts(&[2, 2])?, PatternSet::monotone(2, false))?;
    let f = Marginal::uniform(omega.space().clone());

    let mcar = MechanismSpec::random(MechanismKind::Constant, &omega, 1)?.build(&omega)?;
    // Y2 is kept more often when it is 1.
    let mnar = Mechanism::from_fn(omega.clone(), |y, r| {
        let keep = Prob::ratio(1, if y[1] == 1 { 2 } else { 4 }).expect("in range");
        if r.is_complete() { keep } else { keep.complement() }
    })?;

    for (label, g) in [("MCAR", mcar), ("MNAR", mnar)] {
        let h = SelectionModel::new(f.clone(), g)?.recompose();
        println!("== {label}");
        for var in 0..2 {
            println!("Y{}\n{}", var + 1, complete_case_bias(&h, var)?);
        }
    }
    Ok(())
}
