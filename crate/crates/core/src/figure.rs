//! Figure emission for the three panel layouts: the factorization overview, one
//! observable data event inside its pattern slice, and the shape comparison of
//! `p(y|r)` against `f(y)` over one event.
//!
//! Every layout is reduced to a list of bar panels plus notes, then rendered as
//! hand-written SVG or as aligned ASCII. Bar lengths share one scale per figure.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::distribution::{
    marginal_r, marginal_y, mixture_marginal, pattern_mixture_factorize, selection_factorize,
    DistributionError, FullDensity,
};
use crate::mar_analysis::{
    is_everywhere_mar, is_realized_mar, restriction_range, shape_bars, shape_constant, MarError,
    MarVerdict,
};
use crate::prob::format_rational;
use crate::sample_space::{join_levels, ObservableDataEvent, ObservedData, Point};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FigureError {
    #[error("unknown figure `{0}`; expected 1, 2 or 3")]
    UnknownFigure(String),
    #[error("unknown figure format `{0}`; expected svg or ascii")]
    UnknownFormat(String),
    #[error("event {0} is not in the sample space")]
    UnknownEvent(String),
    #[error("no event with positive probability")]
    NoEvent,
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Mar(#[from] MarError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureKind {
    /// `p(r)`, the components `p(y|r)` and the marginal `f(y)`.
    Factorization,
    /// One observable data event inside its pattern slice.
    Event,
    /// `p(y|r)` against `f(y)` over one event.
    Shape,
}

impl FromStr for FigureKind {
    type Err = FigureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1" => Ok(FigureKind::Factorization),
            "2" => Ok(FigureKind::Event),
            "3" => Ok(FigureKind::Shape),
            other => Err(FigureError::UnknownFigure(other.to_owned())),
        }
    }
}

impl fmt::Display for FigureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FigureKind::Factorization => "1",
            FigureKind::Event => "2",
            FigureKind::Shape => "3",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FigureFormat {
    #[default]
    Svg,
    Ascii,
}

impl FromStr for FigureFormat {
    type Err = FigureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "svg" => Ok(FigureFormat::Svg),
            "ascii" => Ok(FigureFormat::Ascii),
            other => Err(FigureError::UnknownFormat(other.to_owned())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FigureSpec {
    pub kind: FigureKind,
    pub format: FigureFormat,
    /// Event for layouts 2 and 3. Chosen automatically when absent.
    pub event: Option<ObservedData>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Bar {
    label: String,
    value: BigRational,
    highlight: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Panel {
    title: String,
    bars: Vec<Bar>,
    notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Figure {
    title: String,
    panels: Vec<Panel>,
    notes: Vec<String>,
}

fn bar(label: String, value: &BigRational, highlight: bool) -> Bar {
    Bar {
        label,
        value: value.clone(),
        highlight,
    }
}

fn sum_note(bars: &[Bar]) -> String {
    let total = bars.iter().fold(BigRational::zero(), |acc, b| acc + &b.value);
    format!("sum = {}", format_rational(&total))
}

fn factorization(h: &FullDensity) -> Result<Figure, FigureError> {
    let pm = pattern_mixture_factorize(h)?;
    let f = marginal_y(h)?;
    let space = h.omega().space();
    let patterns = h.omega().patterns().patterns();
    let mut panels = Vec::new();

    let pr_bars: Vec<Bar> = patterns
        .iter()
        .zip(pm.pattern_marginal())
        .map(|(r, p)| bar(r.to_string(), p.value(), false))
        .collect();
    panels.push(Panel {
        title: "p(r)".into(),
        notes: vec![sum_note(&pr_bars)],
        bars: pr_bars,
    });
    for (j, r) in patterns.iter().enumerate() {
        let title = format!("p(y | r = {r})");
        match pm.component(j) {
            Some(c) => {
                let bars: Vec<Bar> = space
                    .values()
                    .zip(c.probs())
                    .map(|(y, p)| bar(format!("({})", join_levels(&y)), p.value(), false))
                    .collect();
                panels.push(Panel {
                    title,
                    notes: vec![sum_note(&bars)],
                    bars,
                });
            }
            None => panels.push(Panel {
                title,
                bars: Vec::new(),
                notes: vec!["p(r) = 0, component undefined".into()],
            }),
        }
    }
    let f_bars: Vec<Bar> = space
        .values()
        .zip(f.probs())
        .map(|(y, p)| bar(format!("({})", join_levels(&y)), p.value(), false))
        .collect();
    panels.push(Panel {
        title: "f(y)".into(),
        notes: vec![sum_note(&f_bars)],
        bars: f_bars,
    });
    let identity = mixture_marginal(&pm) == f;
    Ok(Figure {
        title: "Selection-model and pattern-mixture factorizations".into(),
        panels,
        notes: vec![format!(
            "mixture identity f(y) = sum_r p(r) p(y|r): {}",
            if identity { "holds exactly" } else { "FAILS" }
        )],
    })
}

fn positive(h: &FullDensity, e: &ObservableDataEvent) -> bool {
    !h.probability_of(e.members()).is_zero()
}

fn pick_event(h: &FullDensity, requested: &Option<ObservedData>, prefer_witness: bool) -> Result<ObservableDataEvent, FigureError> {
    let omega = h.omega();
    if let Some(key) = requested {
        return omega
            .event_for(key)
            .ok_or_else(|| FigureError::UnknownEvent(key.to_string()));
    }
    if prefer_witness {
        let g = selection_factorize(h)?;
        if let MarVerdict::NotMar(w) = is_everywhere_mar(g.mechanism())? {
            return Ok(w.event);
        }
    }
    let events = omega.enumerate_events();
    events
        .iter()
        .find(|e| !e.is_singleton() && positive(h, e))
        .or_else(|| events.iter().find(|e| positive(h, e)))
        .cloned()
        .ok_or(FigureError::NoEvent)
}

fn event_panel(h: &FullDensity, e: &ObservableDataEvent) -> Result<Figure, FigureError> {
    let omega = h.omega();
    let r = e.pattern();
    let bars: Vec<Bar> = omega
        .space()
        .values()
        .map(|y| {
            let p = Point::new(y, r.clone());
            let v = h.get(&p).expect("point of omega").value().clone();
            bar(format!("({})", join_levels(&p.y)), &v, e.contains(&p))
        })
        .collect();
    let g = selection_factorize(h)?;
    let mut notes = vec![
        format!("event {e}: {} member(s), marked", e.len()),
        format!(
            "observed part fixed at {}; missing coordinates {:?} vary",
            e.key(),
            r.missing_indices()
        ),
        format!("P(event) = {}", format_rational(&h.probability_of(e.members()))),
    ];
    match restriction_range(g.mechanism(), e) {
        Ok(range) => {
            let values: Vec<String> = range.values().iter().map(ToString::to_string).collect();
            notes.push(format!("g(r|y) on the event takes {{{}}}", values.join(", ")));
            notes.push(
                match is_realized_mar(g.mechanism(), e)? {
                    MarVerdict::NotMar(_) => "g is not constant here: NotMAR",
                    _ => "g is constant here: MAR",
                }
                .into(),
            );
        }
        Err(MarError::UndefinedOnEvent(_)) => {
            notes.push("g(r|y) is undefined on the whole event (f = 0)".into())
        }
        Err(other) => return Err(other.into()),
    }
    Ok(Figure {
        title: format!("An observable data event in Omega_r, r = {r}"),
        panels: vec![Panel {
            title: format!("h(y, r = {r})"),
            bars,
            notes: Vec::new(),
        }],
        notes,
    })
}

fn shape_panel(h: &FullDensity, e: &ObservableDataEvent) -> Result<Figure, FigureError> {
    let bars = shape_bars(h, e)?;
    let constant = shape_constant(h, e)?;
    let g = selection_factorize(h)?;
    let witness = match is_realized_mar(g.mechanism(), e) {
        Ok(MarVerdict::NotMar(w)) => Some(w.second.0),
        _ => None,
    };
    let hl = |p: &Point| constant.is_none() && witness.as_ref() == Some(p);
    let label = |p: &Point| format!("({})", join_levels(&p.y));
    let p_bars = bars.iter().map(|(p, v, _)| bar(label(p), v, hl(p))).collect();
    let f_bars = bars.iter().map(|(p, _, v)| bar(label(p), v, hl(p))).collect();
    let r = e.pattern();
    let pr = &marginal_r(h)?[h.omega().patterns().index_of(r).expect("event pattern")];
    let mut notes = vec![format!("event {e}, p(r) = {pr}")];
    match &constant {
        Some(c) => notes.push(format!(
            "same shape: p(y|r) = c f(y) on the event with c = {}",
            format_rational(c)
        )),
        None => {
            notes.push("not proportional: p(y|r) and f(y) differ in shape".into());
            if let Some(w) = &witness {
                notes.push(format!("witness bar marked at {w}"));
            }
        }
    }
    Ok(Figure {
        title: "Effect of MAR on the pattern-mixture component".into(),
        panels: vec![
            Panel {
                title: format!("p(y | r = {r}) on the event"),
                bars: p_bars,
                notes: Vec::new(),
            },
            Panel {
                title: "f(y) on the projection of the event".into(),
                bars: f_bars,
                notes: Vec::new(),
            },
        ],
        notes,
    })
}

fn max_value(fig: &Figure) -> BigRational {
    fig.panels
        .iter()
        .flat_map(|p| &p.bars)
        .map(|b| b.value.clone())
        .max()
        .unwrap_or_else(BigRational::zero)
}

const ASCII_WIDTH: i64 = 40;

/// `round(width * v / max)` computed exactly.
fn scaled(v: &BigRational, max: &BigRational, width: i64) -> usize {
    if max.is_zero() {
        return 0;
    }
    let x = v * BigRational::from_integer(BigInt::from(width)) / max;
    x.round().to_integer().to_usize().unwrap_or(0)
}

fn render_ascii(fig: &Figure) -> String {
    let max = max_value(fig);
    let label_w = fig
        .panels
        .iter()
        .flat_map(|p| &p.bars)
        .map(|b| b.label.len())
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    let _ = writeln!(out, "{}", fig.title);
    let _ = writeln!(out, "{}", "=".repeat(fig.title.len()));
    for panel in &fig.panels {
        let _ = writeln!(out, "\n{}", panel.title);
        for b in &panel.bars {
            let n = scaled(&b.value, &max, ASCII_WIDTH);
            let mark = if b.highlight { '*' } else { ' ' };
            let line = format!(
                "{mark} {:<label_w$} |{:<w$} {}",
                b.label,
                "#".repeat(n),
                format_rational(&b.value),
                w = ASCII_WIDTH as usize
            );
            let _ = writeln!(out, "{}", line.trim_end());
        }
        for note in &panel.notes {
            let _ = writeln!(out, "  {note}");
        }
    }
    if !fig.notes.is_empty() {
        out.push('\n');
        for note in &fig.notes {
            let _ = writeln!(out, "{note}");
        }
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn render_svg(fig: &Figure) -> String {
    const BAR_W: usize = 34;
    const GAP: usize = 6;
    const PLOT_H: f64 = 100.0;
    const PANEL_H: usize = 170;
    const LEFT: usize = 20;
    let max = max_value(fig);
    let widest = fig.panels.iter().map(|p| p.bars.len()).max().unwrap_or(0);
    let width = (LEFT * 2 + widest * (BAR_W + GAP)).max(480);
    let height = 50 + fig.panels.len() * PANEL_H + 20 * fig.notes.len() + 10;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="monospace">"#
    );
    let _ = writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{LEFT}" y="24" font-size="14" font-weight="bold">{}</text>"#,
        escape(&fig.title)
    );
    for (i, panel) in fig.panels.iter().enumerate() {
        let top = 40 + i * PANEL_H;
        let base = top as f64 + 20.0 + PLOT_H;
        let _ = writeln!(out, r#"<g class="panel">"#);
        let _ = writeln!(
            out,
            r#"<text x="{LEFT}" y="{}" font-size="12">{}</text>"#,
            top + 12,
            escape(&panel.title)
        );
        let axis_end = LEFT + panel.bars.len().max(1) * (BAR_W + GAP);
        let _ = writeln!(
            out,
            r#"<line x1="{LEFT}" y1="{base:.2}" x2="{axis_end}" y2="{base:.2}" stroke="black"/>"#
        );
        for (j, b) in panel.bars.iter().enumerate() {
            let x = LEFT + GAP / 2 + j * (BAR_W + GAP);
            let h = if max.is_zero() {
                0.0
            } else {
                crate::prob::ratio_to_f64(&(&b.value / &max)) * PLOT_H
            };
            let fill = if b.highlight { "#c0392b" } else { "#4a6fa5" };
            let _ = writeln!(
                out,
                r#"<rect x="{x}" y="{:.2}" width="{BAR_W}" height="{h:.2}" fill="{fill}"><title>{} = {}</title></rect>"#,
                base - h,
                escape(&b.label),
                format_rational(&b.value)
            );
            let cx = x + BAR_W / 2;
            let _ = writeln!(
                out,
                r#"<text x="{cx}" y="{:.2}" font-size="9" text-anchor="middle">{}</text>"#,
                base + 12.0,
                escape(&b.label)
            );
            let _ = writeln!(
                out,
                r#"<text x="{cx}" y="{:.2}" font-size="8" text-anchor="middle">{}</text>"#,
                base - h - 3.0,
                format_rational(&b.value)
            );
        }
        for (k, note) in panel.notes.iter().enumerate() {
            let _ = writeln!(
                out,
                r#"<text x="{LEFT}" y="{:.2}" font-size="10" font-style="italic">{}</text>"#,
                base + 26.0 + 12.0 * k as f64,
                escape(note)
            );
        }
        let _ = writeln!(out, "</g>");
    }
    let notes_top = 40 + fig.panels.len() * PANEL_H;
    for (k, note) in fig.notes.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<text x="{LEFT}" y="{}" font-size="11">{}</text>"#,
            notes_top + 14 + 20 * k,
            escape(note)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Renders one of the three layouts for `h`.
pub fn emit_figure(h: &FullDensity, spec: &FigureSpec) -> Result<String, FigureError> {
    h.ensure_valid()?;
    let fig = match spec.kind {
        FigureKind::Factorization => factorization(h)?,
        FigureKind::Event => event_panel(h, &pick_event(h, &spec.event, false)?)?,
        FigureKind::Shape => shape_panel(h, &pick_event(h, &spec.event, true)?)?,
    };
    Ok(match spec.format {
        FigureFormat::Svg => render_svg(&fig),
        FigureFormat::Ascii => render_ascii(&fig),
    })
}
