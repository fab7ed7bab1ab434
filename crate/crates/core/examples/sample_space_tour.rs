//! Builds a small sample space, lists its observable data events and projects a point.

use marlab::{project_missing, project_observed, DataSpace, Omega, PatternSet, Point, Variable};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = DataSpace::new(vec![
        Variable::new("visit1", vec![0, 1])?,
        Variable::new("visit2", vec![0, 1, 2])?,
    ])?;
    let omega = Omega::new(space, PatternSet::all(2))?;
    println!("|Y| = {}, |R| = {}, |Omega| = {}", omega.space().size(), omega.patterns().len(), omega.len());

    let events = omega.enumerate_events();
    println!("{} observable data events:", events.len());
    for e in &events {
        println!("  {}  ({} points)", e.key(), e.len());
    }

    let p = omega.point_at(7);
    println!("point {p}");
    println!("  observed part {:?}", project_observed(&p.y, &p.r)?);
    println!("  missing part  {:?}", project_missing(&p.y, &p.r)?);

    let q = Point::new(vec![p.y[0], (p.y[1] + 1) % 3], p.r.clone());
    println!("  ob-equivalent to {q}: {}", omega.ob_equivalent(&p, &q)?);
    Ok(())
}
