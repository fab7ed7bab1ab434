//! Parses a model file, reports errors with their line, and prints canonical forms.

use marlab::distribution::pattern_mixture_factorize;
use marlab::model_file::{parse_model, serialize_model, Model};

const TEXT: &str = "\
# two binary answers, the second sometimes skipped
space
Q1 0 1
Q2 0 1
patterns
11
10
selection
marginal
0 0 1/4
0 1 1/4
1 0 1/4
1 1 1/4
mechanism
0 0 11 3/4
0 0 10 1/4
0 1 11 3/4
0 1 10 1/4
1 0 11 1/2
1 0 10 1/2
1 1 11 1/2
1 1 10 1/2
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = parse_model(TEXT)?;
    println!("parsed a {} model over {} points", model.section(), model.omega().len());

    let mixture = Model::Mixture(pattern_mixture_factorize(&model.density())?);
    print!("{}", serialize_model(&mixture));

    let broken = TEXT.replace("1 1 10 1/2", "1 1 10 0.5");
    let err = parse_model(&broken).unwrap_err();
    assert_eq!(err.line(), 22);
    println!("broken copy rejected: {err}");
    Ok(())
}
