//! Draws a reproducible incomplete dataset and tallies the observed rows.

use marlab::mechanism_lab::{sample_dataset, MechanismKind, MechanismSpec};
use marlab::{DataSpace, Marginal, Omega, PatternSet, SelectionModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let omega = Omega::new(DataSpace::with_level_counts(&[2, 2])?, PatternSet::monotone(2, true))?;
    let g = MechanismSpec::random(MechanismKind::MonotoneDropout, &omega, 8)?.build(&omega)?;
    let h = SelectionModel::new(Marginal::uniform(omega.space().clone()), g)?.recompose();

    let data = sample_dataset(&h, 1000, 2024)?;
    assert_eq!(data, sample_dataset(&h, 1000, 2024)?);
    let prov = data.provenance();
    println!("{} rows, density {:016x}, seed {}", data.len(), prov.density_id, prov.seed);
    for (row, count) in data.counts() {
        let expected = h.probability_of(h.omega().event_for(row).expect("observed").members());
        println!("  {row:<14} {count:>4}   expected {:.1}", 1000.0 * to_f64(&expected));
    }
    Ok(())
}

fn to_f64(x: &num_rational::BigRational) -> f64 {
    marlab::Prob::new(x.clone()).expect("probability").to_f64()
}
