//! Compares the missing data's conditional distribution with the marginal one on each event.

use marlab::distribution::SelectionModel;
use marlab::mar_analysis::{drawn_at_random_failure, shape_constant};
use marlab::{DataSpace, Marginal, Mechanism, Omega, PatternSet, Prob};

fn density(depends_on_missing: bool) -> Result<marlab::FullDensity, Box<dyn std::error::Error>> {
    let omega = Omega::new(DataSpace::with_level_counts(&[2, 3])?, PatternSet::monotone(2, false))?;
    let f = Marginal::new(
        omega.space().clone(),
        [1, 2, 3, 3, 2, 1].iter().map(|&k| Prob::ratio(k, 12)).collect::<Result<_, _>>()?,
    )?;
    let g = Mechanism::from_fn(omega, |y, r| {
        let key = if depends_on_missing { y[1] } else { y[0] };
        let drop = Prob::ratio(1 + key, 6).expect("in range");
        if r.is_complete() { drop.complement() } else { drop }
    })?;
    Ok(SelectionModel::new(f, g)?.recompose())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (label, mnar) in [("dropout on Y1", false), ("dropout on Y2", true)] {
        let h = density(mnar)?;
        println!("{label}:");
        for e in h.omega().enumerate_events().iter().filter(|e| !e.is_singleton()) {
            match drawn_at_random_failure(&h, e)? {
                None => {
                    let c = shape_constant(&h, e)?.expect("proportional");
                    println!("  {}: drawn at random, p(y|r) = {c} f(y)", e.key());
                }
                Some(m) => println!("  {}: {m}", e.key()),
            }
        }
    }
    Ok(())
}
