//! Splits one full density both ways and puts it back together exactly.

use marlab::distribution::{mixture_marginal, pattern_mixture_factorize, selection_factorize};
use marlab::{marginal_y, DataSpace, FullDensity, Omega, PatternSet, Prob};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let omega = Omega::new(DataSpace::with_level_counts(&[2, 2])?, PatternSet::all(2))?;
    // Weights 1..=16 over 136.
    let table = (1..=16).map(|k| Prob::ratio(k, 136)).collect::<Result<Vec<_>, _>>()?;
    let h = FullDensity::from_table(omega, table)?;

    let sm = selection_factorize(&h)?;
    println!("f(y):");
    for (y, f) in sm.omega().space().values().zip(sm.marginal().probs()) {
        println!("  {y:?}  {f}");
    }
    println!("g(r|y) for y = [0, 0]:");
    for (j, r) in sm.omega().patterns().patterns().iter().enumerate() {
        println!("  {r}  {}", sm.mechanism().at(0, j).expect("f > 0"));
    }
    assert_eq!(sm.recompose(), h);

    let pm = pattern_mixture_factorize(&h)?;
    println!("p(r):");
    for (r, p) in pm.omega().patterns().patterns().iter().zip(pm.pattern_marginal()) {
        println!("  {r}  {p}");
    }
    assert_eq!(pm.recompose(), h);
    assert_eq!(mixture_marginal(&pm), marginal_y(&h)?);
    println!("both factorizations reproduce h exactly");
    Ok(())
}
