use std::path::PathBuf;

use marlab::model_file::{parse_model, parse_model_bytes, serialize_model, Model};

fn corpus() -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/corpus");
    let labels = std::fs::read_to_string(dir.join("labels.tsv")).unwrap();
    labels
        .lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (file, _) = l.split_once('\t').unwrap();
            (file.to_string(), std::fs::read_to_string(dir.join(file)).unwrap())
        })
        .collect()
}

fn err_line(text: &str) -> (usize, bool) {
    let e = parse_model(text).unwrap_err();
    (e.line(), e.is_syntax())
}

const HEAD: &str = "space\nY1 0 1\npatterns\n1\n0\n";

#[test]
fn corpus_files_round_trip() {
    for (name, text) in corpus() {
        let model = parse_model(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let canon = serialize_model(&model);
        let again = parse_model(&canon).unwrap();
        assert_eq!(again, model, "{name}");
        assert_eq!(serialize_model(&again), canon, "{name}");
    }
}

#[test]
fn density_form_accepts_comments_and_blank_lines() {
    let text = format!("# two points\n{HEAD}\ndensity\n1 0 1/4  # kept\n1 1 1/4\n0 0 1/4\n0 1 1/4\n");
    let Model::Density(h) = parse_model(&text).unwrap() else { panic!("density") };
    assert_eq!(h.omega().len(), 4);
}

#[test]
fn syntax_errors_carry_line_numbers() {
    assert_eq!(err_line(&format!("{HEAD}density\n1 0 0.25\n")), (7, true));
    assert_eq!(err_line(&format!("{HEAD}density\n1 0\n")), (7, true));
    assert_eq!(err_line(&format!("{HEAD}densty\n")), (6, true));
    assert_eq!(err_line("patterns\n1\n"), (1, true));
    assert_eq!(err_line("space\nY1 0 1\npatterns\n1\n2\n"), (5, true));
}

#[test]
fn invariant_errors_carry_line_numbers() {
    let heavy = format!("{HEAD}density\n1 0 1/2\n1 1 1/2\n0 0 1/2\n0 1 0\n");
    let e = parse_model(&heavy).unwrap_err();
    assert!(!e.is_syntax(), "{e}");

    let dup = format!("{HEAD}density\n1 0 1/4\n1 0 1/4\n0 0 1/4\n0 1 1/4\n");
    assert_eq!(err_line(&dup), (8, false));

    let first_not_complete = "space\nY1 0 1\npatterns\n0\n1\ndensity\n";
    assert!(!parse_model(first_not_complete).unwrap_err().is_syntax());
}

#[test]
fn carriage_returns_and_bad_utf8_are_rejected() {
    let crlf = format!("{HEAD}density\n").replace('\n', "\r\n");
    assert!(parse_model(&crlf).unwrap_err().is_syntax());
    let e = parse_model_bytes(&[b's', 0xff, b'\n']).unwrap_err();
    assert!(e.is_syntax());
}

#[test]
fn selection_may_omit_rows_where_f_is_zero() {
    let text = format!(
        "{HEAD}selection\nmarginal\n0 1\n1 0\nmechanism\n0 1 1/3\n0 0 2/3\n"
    );
    let Model::Selection(sm) = parse_model(&text).unwrap() else { panic!("selection") };
    assert!(!sm.mechanism().is_row_defined(1));
    let missing_needed = format!("{HEAD}selection\nmarginal\n0 1/2\n1 1/2\nmechanism\n0 1 1\n0 0 0\n");
    assert!(!parse_model(&missing_needed).unwrap_err().is_syntax());
}
