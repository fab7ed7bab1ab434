//! Classifies a mechanism event by event and reports a witness where MAR fails.

use marlab::mar_analysis::{is_everywhere_mar, is_realized_mar, MarVerdict};
use marlab::{DataSpace, Mechanism, Omega, PatternSet, Prob};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let omega = Omega::new(DataSpace::with_level_counts(&[2, 2])?, PatternSet::monotone(2, false))?;

    // Y2 goes missing more often when Y1 = 1. Depends only on what is observed.
    let mar = Mechanism::from_fn(omega.clone(), |y, r| {
        let drop = if y[0] == 1 { Prob::ratio(1, 2) } else { Prob::ratio(1, 5) };
        let drop = drop.expect("in range");
        if r.is_complete() { drop.complement() } else { drop }
    })?;
    println!("observed-only dropout: {}", is_everywhere_mar(&mar)?);

    // Y2 goes missing more often when Y2 itself is 1.
    let mnar = Mechanism::from_fn(omega.clone(), |y, r| {
        let drop = Prob::ratio(1, if y[1] == 1 { 2 } else { 5 }).expect("in range");
        if r.is_complete() { drop.complement() } else { drop }
    })?;
    for e in omega.enumerate_events() {
        match is_realized_mar(&mnar, &e)? {
            MarVerdict::NotMar(w) => println!(
                "event {}: NotMAR, g = {} at {} but {} at {}",
                e.key(), w.first.1, w.first.0, w.second.1, w.second.0
            ),
            v => println!("event {}: {v}", e.key()),
        }
    }
    Ok(())
}
