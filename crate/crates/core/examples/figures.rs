//! Renders the three figure layouts as ASCII and writes one SVG.

use marlab::figure::{emit_figure, FigureFormat, FigureKind, FigureSpec};
use marlab::model_file::parse_model;

const MODEL: &str = include_str!("../tests/data/corpus/mnar_binary_pair.model");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h = parse_model(MODEL)?.density();
    for kind in [FigureKind::Factorization, FigureKind::Event, FigureKind::Shape] {
        let spec = FigureSpec { kind, format: FigureFormat::Ascii, event: None };
        println!("--- figure {kind}");
        print!("{}", emit_figure(&h, &spec)?);
    }
    let svg = emit_figure(&h, &FigureSpec { kind: FigureKind::Shape, format: FigureFormat::Svg, event: None })?;
    let path = std::env::temp_dir().join("marlab-shape.svg");
    std::fs::write(&path, svg)?;
    println!("wrote {}", path.display());
    Ok(())
}
