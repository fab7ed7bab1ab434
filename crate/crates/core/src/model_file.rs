//! The line-oriented model file format.
//!
//! ```text
//! # two binary variables, second one sometimes missing
//! space
//! Y1 0 1
//! Y2 0 1
//! patterns
//! 11
//! 10
//! selection
//! marginal
//! 0 0 1/4
//! 0 1 1/4
//! 1 0 1/4
//! 1 1 1/4
//! mechanism
//! 0 0 11 3/4
//! 0 0 10 1/4
//! ...
//! ```
//!
//! `space` and `patterns` come first, followed by exactly one of `density`,
//! `selection` or `mixture`. Line shapes by block:
//!
//! | block              | line                      |
//! |--------------------|---------------------------|
//! | `space`            | `NAME level...`           |
//! | `patterns`         | `bits` (all-ones first)   |
//! | `density`          | `bits level... p/q`       |
//! | `marginal`         | `level... p/q`            |
//! | `mechanism`        | `level... bits p/q`       |
//! | `pattern-marginal` | `bits p/q`                |
//! | `component <bits>` | `level... p/q`            |
//!
//! `selection` holds a `marginal` and then a `mechanism` block. Mechanism rows may
//! be left out where `f(y) = 0`. `mixture` holds a `pattern-marginal` block and one
//! `component` block for each pattern with positive probability. Probabilities are
//! integers or `p/q`; decimals are rejected. `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::One;
use thiserror::Error;

use crate::distribution::{
    selection_factorize, pattern_mixture_factorize, DistributionError, FullDensity, Marginal,
    Mechanism, PatternMixture, SelectionModel,
};
use crate::prob::{format_rational, Prob};
use crate::sample_space::{
    join_levels, DataSpace, Level, MissingnessPattern, Omega, PatternSet, Point, Variable,
};

const KEYWORDS: [&str; 9] = [
    "space",
    "patterns",
    "density",
    "selection",
    "mixture",
    "marginal",
    "mechanism",
    "pattern-marginal",
    "component",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {message}")]
    Invariant { line: usize, message: String },
}

impl ModelError {
    pub fn line(&self) -> usize {
        match self {
            ModelError::Syntax { line, .. } | ModelError::Invariant { line, .. } => *line,
        }
    }

    pub fn is_syntax(&self) -> bool {
        matches!(self, ModelError::Syntax { .. })
    }
}

fn syntax<T>(line: usize, message: impl Into<String>) -> Result<T, ModelError> {
    Err(ModelError::Syntax {
        line,
        message: message.into(),
    })
}

fn invariant<T>(line: usize, message: impl ToString) -> Result<T, ModelError> {
    Err(ModelError::Invariant {
        line,
        message: message.to_string(),
    })
}

/// A parsed model file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Model {
    Density(FullDensity),
    Selection(SelectionModel),
    Mixture(PatternMixture),
}

impl Model {
    pub fn omega(&self) -> &Omega {
        match self {
            Model::Density(h) => h.omega(),
            Model::Selection(s) => s.omega(),
            Model::Mixture(m) => m.omega(),
        }
    }

    /// The full density the model describes.
    pub fn density(&self) -> FullDensity {
        match self {
            Model::Density(h) => h.clone(),
            Model::Selection(s) => s.recompose(),
            Model::Mixture(m) => m.recompose(),
        }
    }

    /// The selection-model form, factorizing when necessary.
    pub fn selection(&self) -> Result<SelectionModel, DistributionError> {
        match self {
            Model::Selection(s) => Ok(s.clone()),
            other => selection_factorize(&other.density()),
        }
    }

    /// The pattern-mixture form, factorizing when necessary.
    pub fn mixture(&self) -> Result<PatternMixture, DistributionError> {
        match self {
            Model::Mixture(m) => Ok(m.clone()),
            other => pattern_mixture_factorize(&other.density()),
        }
    }

    pub fn section(&self) -> &'static str {
        match self {
            Model::Density(_) => "density",
            Model::Selection(_) => "selection",
            Model::Mixture(_) => "mixture",
        }
    }
}

struct Line<'a> {
    number: usize,
    tokens: Vec<&'a str>,
}

fn tokenize(text: &str) -> Result<Vec<Line<'_>>, ModelError> {
    let mut lines = Vec::new();
    for (i, raw) in text.split('\n').enumerate() {
        let number = i + 1;
        if raw.contains('\r') {
            return syntax(number, "carriage return found; lines must end with LF only");
        }
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if !tokens.is_empty() {
            lines.push(Line { number, tokens });
        }
    }
    Ok(lines)
}

fn is_header(line: &Line<'_>) -> bool {
    let first = line.tokens[0];
    KEYWORDS.contains(&first)
        || (line.tokens.len() == 1 && first.starts_with(|c: char| c.is_ascii_alphabetic()))
}

/// Splits lines into `(header line, body lines)` blocks.
fn blocks<'a, 'b>(lines: &'b [Line<'a>]) -> Result<Vec<(&'b Line<'a>, &'b [Line<'a>])>, ModelError> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let header = &lines[i];
        if !is_header(header) {
            return syntax(header.number, "data line outside any section");
        }
        let name = header.tokens[0];
        if !KEYWORDS.contains(&name) {
            return syntax(header.number, format!("unknown section `{name}`"));
        }
        let args = if name == "component" { 1 } else { 0 };
        if header.tokens.len() != 1 + args {
            return syntax(
                header.number,
                format!("section `{name}` takes {args} argument(s)"),
            );
        }
        let start = i + 1;
        i = start;
        while i < lines.len() && !is_header(&lines[i]) {
            i += 1;
        }
        out.push((header, &lines[start..i]));
    }
    Ok(out)
}

fn parse_prob(line: usize, token: &str) -> Result<Prob, ModelError> {
    token.parse::<Prob>().or_else(|e| match e {
        crate::prob::ProbParseError::Range(_) => invariant(line, e),
        crate::prob::ProbParseError::Syntax(_) => syntax(line, e.to_string()),
    })
}

fn parse_level(line: usize, token: &str) -> Result<Level, ModelError> {
    token
        .parse::<Level>()
        .or_else(|_| syntax(line, format!("expected an integer level, found `{token}`")))
}

fn parse_pattern(line: usize, token: &str, arity: usize) -> Result<MissingnessPattern, ModelError> {
    let r: MissingnessPattern = token
        .parse()
        .or_else(|_| syntax(line, format!("expected a pattern bitstring, found `{token}`")))?;
    if r.len() != arity {
        return syntax(
            line,
            format!("pattern `{token}` has length {}, expected {arity}", r.len()),
        );
    }
    Ok(r)
}

fn parse_levels(line: &Line<'_>, tokens: &[&str], space: &DataSpace) -> Result<Vec<Level>, ModelError> {
    let y = tokens
        .iter()
        .map(|t| parse_level(line.number, t))
        .collect::<Result<Vec<_>, _>>()?;
    if !space.contains(&y) {
        return invariant(line.number, format!("({}) is not in the data space", join_levels(&y)));
    }
    Ok(y)
}

fn expect_len(line: &Line<'_>, n: usize, shape: &str) -> Result<(), ModelError> {
    if line.tokens.len() != n {
        return syntax(
            line.number,
            format!("expected {n} fields (`{shape}`), found {}", line.tokens.len()),
        );
    }
    Ok(())
}

fn parse_space(header: &Line<'_>, body: &[Line<'_>]) -> Result<DataSpace, ModelError> {
    let mut vars = Vec::new();
    for line in body {
        if line.tokens.len() < 2 {
            return syntax(line.number, "expected `NAME level...`");
        }
        let levels = line.tokens[1..]
            .iter()
            .map(|t| parse_level(line.number, t))
            .collect::<Result<Vec<_>, _>>()?;
        vars.push(Variable::new(line.tokens[0], levels).or_else(|e| invariant(line.number, e))?);
    }
    DataSpace::new(vars).or_else(|e| invariant(header.number, e))
}

fn parse_patterns(header: &Line<'_>, body: &[Line<'_>], arity: usize) -> Result<PatternSet, ModelError> {
    let mut patterns = Vec::new();
    for line in body {
        expect_len(line, 1, "bits")?;
        let r = parse_pattern(line.number, line.tokens[0], arity)?;
        if patterns.is_empty() && !r.is_complete() {
            return invariant(line.number, "the first pattern must be all ones");
        }
        if patterns.contains(&r) {
            return invariant(line.number, format!("pattern {r} is listed twice"));
        }
        patterns.push(r);
    }
    if patterns.is_empty() {
        return invariant(header.number, "no patterns listed");
    }
    PatternSet::new(arity, patterns).or_else(|e| invariant(header.number, e))
}

fn parse_marginal(header: &Line<'_>, body: &[Line<'_>], space: &DataSpace) -> Result<Marginal, ModelError> {
    let n = space.arity();
    let mut probs: Vec<Option<Prob>> = vec![None; space.size()];
    for line in body {
        expect_len(line, n + 1, "level... p/q")?;
        let y = parse_levels(line, &line.tokens[..n], space)?;
        let p = parse_prob(line.number, line.tokens[n])?;
        let slot = &mut probs[space.index_of(&y).expect("checked")];
        if slot.is_some() {
            return invariant(line.number, format!("({}) is given twice", join_levels(&y)));
        }
        *slot = Some(p);
    }
    if let Some(i) = probs.iter().position(Option::is_none) {
        return invariant(
            header.number,
            format!("no entry for ({})", join_levels(&space.value_at(i))),
        );
    }
    let what = header.tokens.join(" ");
    Marginal::new(space.clone(), probs.into_iter().flatten().collect()).or_else(|e| match e {
        DistributionError::Mass { total, .. } => {
            invariant(header.number, format!("`{what}` sums to {total}, expected 1"))
        }
        other => invariant(header.number, other),
    })
}

fn parse_density(header: &Line<'_>, body: &[Line<'_>], omega: &Omega) -> Result<FullDensity, ModelError> {
    let n = omega.space().arity();
    let mut entries = Vec::new();
    let mut seen = BTreeMap::new();
    for line in body {
        expect_len(line, n + 2, "bits level... p/q")?;
        let r = parse_pattern(line.number, line.tokens[0], n)?;
        if omega.patterns().index_of(&r).is_none() {
            return invariant(line.number, format!("pattern {r} is not in the pattern set"));
        }
        let y = parse_levels(line, &line.tokens[1..=n], omega.space())?;
        let p = parse_prob(line.number, line.tokens[n + 1])?;
        let point = Point::new(y, r);
        if seen.insert(omega.point_index(&point), line.number).is_some() {
            return invariant(line.number, format!("point {point} is given twice"));
        }
        entries.push((point, p));
    }
    let h = FullDensity::from_entries(omega.clone(), entries).or_else(|e| invariant(header.number, e))?;
    let report = h.validate();
    if !report.is_valid() {
        return invariant(header.number, report);
    }
    Ok(h)
}

fn parse_mechanism(
    header: &Line<'_>,
    body: &[Line<'_>],
    omega: &Omega,
    marginal: &Marginal,
) -> Result<Mechanism, ModelError> {
    let space = omega.space();
    let n = space.arity();
    let mut table: Vec<Option<Prob>> = vec![None; omega.len()];
    let mut first_line: BTreeMap<usize, usize> = BTreeMap::new();
    for line in body {
        expect_len(line, n + 2, "level... bits p/q")?;
        let y = parse_levels(line, &line.tokens[..n], space)?;
        let r = parse_pattern(line.number, line.tokens[n], n)?;
        let p = parse_prob(line.number, line.tokens[n + 1])?;
        let point = Point::new(y, r);
        let Some(idx) = omega.point_index(&point) else {
            return invariant(line.number, format!("pattern {} is not in the pattern set", point.r));
        };
        if table[idx].is_some() {
            return invariant(line.number, format!("point {point} is given twice"));
        }
        first_line.entry(idx % space.size()).or_insert(line.number);
        table[idx] = Some(p);
    }
    let k = omega.patterns().len();
    for y in 0..space.size() {
        let defined = (0..k).filter(|&r| table[omega.index(y, r)].is_some()).count();
        let line = first_line.get(&y).copied().unwrap_or(header.number);
        if defined == 0 && !marginal.at(y).is_zero() {
            return invariant(
                header.number,
                format!(
                    "no mechanism row for y = ({}) although f(y) > 0",
                    join_levels(&space.value_at(y))
                ),
            );
        }
        let label = || join_levels(&space.value_at(y));
        if defined != 0 && defined != k {
            return invariant(line, DistributionError::PartialRow(label()));
        }
        let row = (0..k).filter_map(|r| table[omega.index(y, r)].as_ref());
        let sum = crate::prob::total(row);
        if defined == k && !sum.is_one() {
            return invariant(
                line,
                DistributionError::RowSum {
                    y: label(),
                    total: format_rational(&sum),
                },
            );
        }
    }
    Mechanism::new(omega.clone(), table).or_else(|e| invariant(header.number, e))
}

fn parse_selection(
    header: &Line<'_>,
    sub: &[(&Line<'_>, &[Line<'_>])],
    omega: &Omega,
) -> Result<SelectionModel, ModelError> {
    let names: Vec<&str> = sub.iter().map(|(h, _)| h.tokens[0]).collect();
    if names != ["marginal", "mechanism"] {
        return syntax(
            header.number,
            "`selection` must contain a `marginal` block followed by a `mechanism` block",
        );
    }
    let marginal = parse_marginal(sub[0].0, sub[0].1, omega.space())?;
    let mechanism = parse_mechanism(sub[1].0, sub[1].1, omega, &marginal)?;
    SelectionModel::new(marginal, mechanism).or_else(|e| invariant(header.number, e))
}

fn parse_mixture(
    header: &Line<'_>,
    sub: &[(&Line<'_>, &[Line<'_>])],
    omega: &Omega,
) -> Result<PatternMixture, ModelError> {
    let Some(((pm_header, pm_body), components)) = sub.split_first() else {
        return syntax(header.number, "`mixture` must start with a `pattern-marginal` block");
    };
    if pm_header.tokens[0] != "pattern-marginal" {
        return syntax(pm_header.number, "`mixture` must start with a `pattern-marginal` block");
    }
    let patterns = omega.patterns();
    let k = patterns.len();
    let n = omega.space().arity();
    let mut weights: Vec<Option<Prob>> = vec![None; k];
    for line in *pm_body {
        expect_len(line, 2, "bits p/q")?;
        let r = parse_pattern(line.number, line.tokens[0], n)?;
        let Some(j) = patterns.index_of(&r) else {
            return invariant(line.number, format!("pattern {r} is not in the pattern set"));
        };
        if weights[j].is_some() {
            return invariant(line.number, format!("pattern {r} is given twice"));
        }
        weights[j] = Some(parse_prob(line.number, line.tokens[1])?);
    }
    if let Some(j) = weights.iter().position(Option::is_none) {
        return invariant(pm_header.number, format!("no entry for pattern {}", patterns.get(j)));
    }
    let weights: Vec<Prob> = weights.into_iter().flatten().collect();
    let mut parts: Vec<Option<Marginal>> = vec![None; k];
    for (c_header, c_body) in components {
        if c_header.tokens[0] != "component" {
            return syntax(
                c_header.number,
                format!("unexpected `{}` block inside `mixture`", c_header.tokens[0]),
            );
        }
        let r = parse_pattern(c_header.number, c_header.tokens[1], n)?;
        let Some(j) = patterns.index_of(&r) else {
            return invariant(c_header.number, format!("pattern {r} is not in the pattern set"));
        };
        if parts[j].is_some() {
            return invariant(c_header.number, format!("component {r} is given twice"));
        }
        if weights[j].is_zero() {
            return invariant(c_header.number, format!("component given for pattern {r} whose probability is zero"));
        }
        parts[j] = Some(parse_marginal(c_header, c_body, omega.space())?);
    }
    PatternMixture::new(omega.clone(), weights, parts).or_else(|e| invariant(header.number, e))
}

/// Parses a model file.
pub fn parse_model(text: &str) -> Result<Model, ModelError> {
    let lines = tokenize(text)?;
    let blocks = blocks(&lines)?;
    let mut iter = blocks.iter().peekable();
    let last_line = text.split('\n').count();

    let Some((space_header, space_body)) = iter.next().filter(|(h, _)| h.tokens[0] == "space") else {
        let line = blocks.first().map_or(last_line, |(h, _)| h.number);
        return syntax(line, "the file must start with a `space` section");
    };
    let space = parse_space(space_header, space_body)?;

    let Some((pat_header, pat_body)) = iter.next().filter(|(h, _)| h.tokens[0] == "patterns") else {
        return syntax(space_header.number, "`space` must be followed by a `patterns` section");
    };
    let patterns = parse_patterns(pat_header, pat_body, space.arity())?;
    let omega = Omega::new(space, patterns).or_else(|e| invariant(pat_header.number, e))?;

    let Some((body_header, body)) = iter.next() else {
        return syntax(last_line, "missing `density`, `selection` or `mixture` section");
    };
    let rest: Vec<(&Line<'_>, &[Line<'_>])> = iter.map(|(h, b)| (*h, *b)).collect();
    let nested = |allowed: &[&str]| -> Result<(), ModelError> {
        if let Some((h, _)) = rest.iter().find(|(h, _)| !allowed.contains(&h.tokens[0])) {
            return syntax(h.number, format!("unexpected `{}` section", h.tokens[0]));
        }
        if !body.is_empty() {
            return syntax(body[0].number, format!("`{}` holds blocks, not data lines", body_header.tokens[0]));
        }
        Ok(())
    };
    match body_header.tokens[0] {
        "density" => {
            if let Some((h, _)) = rest.first() {
                return syntax(h.number, format!("unexpected `{}` section after `density`", h.tokens[0]));
            }
            Ok(Model::Density(parse_density(body_header, body, &omega)?))
        }
        "selection" => {
            nested(&["marginal", "mechanism"])?;
            Ok(Model::Selection(parse_selection(body_header, &rest, &omega)?))
        }
        "mixture" => {
            nested(&["pattern-marginal", "component"])?;
            Ok(Model::Mixture(parse_mixture(body_header, &rest, &omega)?))
        }
        other => syntax(
            body_header.number,
            format!("expected `density`, `selection` or `mixture`, found `{other}`"),
        ),
    }
}

/// Parses raw bytes, which must be UTF-8.
pub fn parse_model_bytes(bytes: &[u8]) -> Result<Model, ModelError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_model(text),
        Err(e) => {
            let line = 1 + bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count();
            syntax(line, "file is not valid UTF-8")
        }
    }
}

fn write_header(out: &mut String, omega: &Omega) {
    out.push_str("space\n");
    for v in omega.space().variables() {
        out.push_str(v.name());
        for level in v.levels() {
            let _ = write!(out, " {level}");
        }
        out.push('\n');
    }
    out.push_str("patterns\n");
    for r in omega.patterns().patterns() {
        let _ = writeln!(out, "{r}");
    }
}

fn levels(y: &[Level]) -> String {
    y.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn write_marginal(out: &mut String, m: &Marginal) {
    for (y, p) in m.space().values().zip(m.probs()) {
        let _ = writeln!(out, "{} {}", levels(&y), format_rational(p.value()));
    }
}

/// Writes `model` in canonical form: no comments, single spaces, every entry listed
/// in enumeration order (pattern-major for densities), undefined mechanism rows left out.
pub fn serialize_model(model: &Model) -> String {
    let mut out = String::new();
    write_header(&mut out, model.omega());
    match model {
        Model::Density(h) => {
            out.push_str("density\n");
            for (p, v) in h.entries() {
                let _ = writeln!(out, "{} {} {}", p.r, levels(&p.y), format_rational(v.value()));
            }
        }
        Model::Selection(s) => {
            out.push_str("selection\nmarginal\n");
            write_marginal(&mut out, s.marginal());
            out.push_str("mechanism\n");
            let omega = s.omega();
            let space = omega.space();
            for (yi, y) in space.values().enumerate() {
                for (ri, r) in omega.patterns().patterns().iter().enumerate() {
                    if let Some(v) = s.mechanism().at(yi, ri) {
                        let _ = writeln!(out, "{} {r} {}", levels(&y), format_rational(v.value()));
                    }
                }
            }
        }
        Model::Mixture(m) => {
            out.push_str("mixture\npattern-marginal\n");
            let patterns = m.omega().patterns().patterns();
            for (r, p) in patterns.iter().zip(m.pattern_marginal()) {
                let _ = writeln!(out, "{r} {}", format_rational(p.value()));
            }
            for (r, c) in patterns.iter().zip(m.components()) {
                if let Some(c) = c {
                    let _ = writeln!(out, "component {r}");
                    write_marginal(&mut out, c);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "space\nY1 0 1\npatterns\n1\n0\ndensity\n1 0 1/4\n1 1 1/4\n0 0 1/4\n0 1 1/4\n";

    const SELECTION: &str = "\
# constant mechanism
space
Y1 0 1
Y2 0 1
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
1 0 11 3/4
1 0 10 1/4
1 1 11 3/4
1 1 10 1/4
";

    #[test]
    fn minimal_density() {
        let m = parse_model(MINIMAL).unwrap();
        assert_eq!(m.omega().len(), 4);
        assert!(m.density().validate().is_valid());
        assert_eq!(serialize_model(&m), MINIMAL);
    }

    #[test]
    fn selection_round_trip() {
        let m = parse_model(SELECTION).unwrap();
        let canonical = serialize_model(&m);
        assert_eq!(canonical, SELECTION.replace("# constant mechanism\n", ""));
        assert_eq!(parse_model(&canonical).unwrap(), m);
    }

    #[test]
    fn mixture_round_trip() {
        let h = parse_model(SELECTION).unwrap().density();
        let m = Model::Mixture(pattern_mixture_factorize(&h).unwrap());
        let text = serialize_model(&m);
        assert!(text.contains("component 10\n"));
        let back = parse_model(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.density(), h);
    }

    #[test]
    fn wrong_pattern_length_reports_line() {
        let text = "space\nY1 0 1\npatterns\n1\n10\ndensity\n1 0 1\n";
        let err = parse_model(text).unwrap_err();
        assert!(err.is_syntax());
        assert_eq!(err.line(), 5);
    }

    #[test]
    fn overweight_mechanism_row_reports_line() {
        let text = SELECTION.replace("1 0 10 1/4", "1 0 10 3/8");
        let err = parse_model(&text).unwrap_err();
        assert!(!err.is_syntax());
        assert_eq!(err.line(), 19);
        assert!(err.to_string().contains("9/8"), "{err}");
    }

    #[test]
    fn rejections() {
        let cases = [
            (MINIMAL.replace("density", "densty"), 6, true),
            (MINIMAL.replace("1/4\n0 0", "0.25\n0 0"), 8, true),
            (MINIMAL.replace("0 1 1/4", "0 1 1/2"), 6, false),
            (MINIMAL.replace("0 1 1/4\n", ""), 6, false),
            (MINIMAL.replace("1 1 1/4", "1 0 1/4"), 8, false),
            (MINIMAL.replace("1 1 1/4", "1 2 1/4"), 8, false),
            (MINIMAL.replace("patterns\n1\n0", "patterns\n0\n1"), 4, false),
            (MINIMAL.replace("\n", "\r\n"), 1, true),
            (format!("{MINIMAL}extra\n"), 11, true),
            ("patterns\n1\n".to_owned(), 1, true),
        ];
        for (text, line, is_syntax) in cases {
            let err = parse_model(&text).unwrap_err();
            assert_eq!((err.line(), err.is_syntax()), (line, is_syntax), "{err}");
        }
    }

    #[test]
    fn undefined_mechanism_rows_may_be_omitted() {
        let text = "space\nY1 0 1\npatterns\n1\n0\nselection\nmarginal\n0 1\n1 0\nmechanism\n0 1 1/2\n0 0 1/2\n";
        let m = parse_model(text).unwrap();
        let Model::Selection(s) = &m else { panic!() };
        assert!(!s.mechanism().is_row_defined(1));
        assert_eq!(serialize_model(&m), text);
        let missing = "space\nY1 0 1\npatterns\n1\n0\nselection\nmarginal\n0 1/2\n1 1/2\nmechanism\n0 1 1/2\n0 0 1/2\n";
        assert_eq!(parse_model(missing).unwrap_err().line(), 10);
    }

    #[test]
    fn non_utf8_rejected() {
        let err = parse_model_bytes(b"space\n\xff\n").unwrap_err();
        assert_eq!(err.line(), 2);
    }
}
