//! Command-line front end. [`run`] parses arguments, executes one subcommand and
//! returns the process exit code: 0 on success, 1 when an assertion (`check`,
//! `validate`) fails, 2 on usage, input or parse errors.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Zero;

use crate::distribution::{FullDensity, Marginal, SelectionModel};
use crate::figure::{emit_figure, FigureFormat, FigureKind, FigureSpec};
use crate::mar_analysis::{
    drawn_at_random_failure, is_everywhere_mar, is_realized_mar, observed_mechanism,
    reconstruction_check, shape_bars, shape_proportionality_check, standard_equation_failure,
    MarError, MarVerdict, Mode,
};
use crate::mechanism_lab::{complete_case_bias, random_marginal, sample_dataset, MechanismKind, MechanismSpec};
use crate::model_file::{parse_model_bytes, serialize_model, Model, ModelError};
use crate::prob::format_rational;
use crate::rng::SplitMix64;
use crate::sample_space::{
    DataSpace, Level, MissingnessPattern, ObservableDataEvent, ObservedData, Omega, PatternSet,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "marlab",
    version,
    about = "Exact analysis of missingness mechanisms on finite distributions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Factorization {
    Selection,
    Mixture,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Property {
    DrawnAtRandom,
    Shape,
    StandardEquation,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Constant,
    CommonObserved,
    Monotone,
    Mnar,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Sup,
    Inf,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Sup => Mode::Sup,
            ModeArg::Inf => Mode::Inf,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Svg,
    Ascii,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a model file and check every constraint; exit 1 if one fails
    Validate { file: PathBuf },
    /// Print the selection-model or pattern-mixture form as a model file
    Factorize {
        file: PathBuf,
        #[arg(long = "as", value_enum)]
        form: Factorization,
    },
    /// List the observable data events with their probabilities
    Events { file: PathBuf },
    /// Decide everywhere MAR, or realized MAR on one event
    Classify {
        file: PathBuf,
        /// Event as PATTERN:v1,v2,... with NA for missing values, e.g. 10:1,NA
        #[arg(long)]
        event: Option<String>,
    },
    /// Print the observed-data mechanism P(R|Y_obs)
    Pryobs {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "sup")]
        mode: ModeArg,
    },
    /// Check a MAR consequence on every applicable event; exit 1 if it fails
    Check {
        file: PathBuf,
        #[arg(long, value_enum)]
        property: Property,
        #[arg(long, value_enum, default_value = "sup")]
        mode: ModeArg,
        /// Restrict the check to one event
        #[arg(long)]
        event: Option<String>,
    },
    /// Rebuild h from f and P(R|Y_obs) and compare with the original
    Reconstruct {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "sup")]
        mode: ModeArg,
    },
    /// Emit a random model file with a mechanism of the chosen class
    Generate {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        vars: usize,
        #[arg(long, default_value_t = 2)]
        levels: usize,
        /// all, monotone, chain, or a comma-separated list of bitstrings
        #[arg(long)]
        patterns: Option<String>,
    },
    /// Draw rows from the model and print them as CSV with NA for missing values
    Sample {
        file: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact complete-case bias of one variable's mean
    Bias {
        file: PathBuf,
        #[arg(long)]
        var: String,
    },
    /// Draw figure 1, 2 or 3
    Plot {
        file: PathBuf,
        #[arg(long)]
        figure: String,
        /// Output path; - writes to stdout
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "svg")]
        format: FormatArg,
        #[arg(long)]
        event: Option<String>,
    },
}

/// A failure with its exit code and message.
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.to_string(),
    }
}

impl From<MarError> for Failure {
    fn from(e: MarError) -> Self {
        usage(e)
    }
}

impl From<crate::distribution::DistributionError> for Failure {
    fn from(e: crate::distribution::DistributionError) -> Self {
        usage(e)
    }
}

impl From<crate::mechanism_lab::LabError> for Failure {
    fn from(e: crate::mechanism_lab::LabError) -> Self {
        usage(e)
    }
}

impl From<crate::figure::FigureError> for Failure {
    fn from(e: crate::figure::FigureError) -> Self {
        usage(e)
    }
}

fn read_model(path: &PathBuf) -> Result<Model, (Option<ModelError>, Failure)> {
    let bytes = std::fs::read(path)
        .map_err(|e| (None, usage(format!("cannot read {}: {e}", path.display()))))?;
    parse_model_bytes(&bytes).map_err(|e| {
        let message = format!("{}: {e}", path.display());
        (Some(e), usage(message))
    })
}

fn load(path: &PathBuf) -> Result<Model, Failure> {
    read_model(path).map_err(|(_, f)| f)
}

/// Parses `PATTERN:v1,v2,...` where missing positions hold `NA`. A bare pattern
/// with nothing observed may omit the colon.
pub fn parse_event_key(s: &str) -> Result<ObservedData, String> {
    let (bits, rest) = s.split_once(':').unwrap_or((s, ""));
    let pattern: MissingnessPattern = bits
        .parse()
        .map_err(|_| format!("bad pattern `{bits}` in event `{s}`"))?;
    let fields: Vec<&str> = if rest.is_empty() {
        Vec::new()
    } else {
        rest.split(',').map(str::trim).collect()
    };
    if rest.is_empty() && pattern.observed_count() == 0 {
        return Ok(ObservedData {
            pattern,
            values: Vec::new(),
        });
    }
    if fields.len() != pattern.len() {
        return Err(format!(
            "event `{s}` lists {} values for a pattern of length {}",
            fields.len(),
            pattern.len()
        ));
    }
    let mut values = Vec::new();
    for (field, &observed) in fields.iter().zip(pattern.bits()) {
        match (observed, *field) {
            (false, "NA") => {}
            (false, other) => return Err(format!("expected NA at a missing position, found `{other}`")),
            (true, v) => values.push(
                v.parse::<Level>()
                    .map_err(|_| format!("bad level `{v}` in event `{s}`"))?,
            ),
        }
    }
    Ok(ObservedData { pattern, values })
}

fn find_event(omega: &Omega, key: &str) -> Result<ObservableDataEvent, Failure> {
    let data = parse_event_key(key).map_err(usage)?;
    omega
        .event_for(&data)
        .ok_or_else(|| usage(format!("event `{key}` is not in the sample space")))
}

fn pattern_set(spec: &str, arity: usize) -> Result<PatternSet, Failure> {
    Ok(match spec {
        "all" => PatternSet::all(arity),
        "monotone" => PatternSet::monotone(arity, true),
        "chain" => PatternSet::monotone(arity, false),
        list => {
            let patterns = list
                .split(',')
                .map(|s| s.trim().parse::<MissingnessPattern>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(usage)?;
            PatternSet::new(arity, patterns).map_err(usage)?
        }
    })
}

fn generate(
    kind: Kind,
    seed: u64,
    vars: usize,
    levels: usize,
    patterns: Option<String>,
) -> Result<String, Failure> {
    if vars == 0 || levels == 0 {
        return Err(usage("--vars and --levels must be positive"));
    }
    let (kind, default_patterns) = match kind {
        Kind::Constant => (MechanismKind::Constant, "all"),
        Kind::CommonObserved => (MechanismKind::CommonObserved, "chain"),
        Kind::Monotone => (MechanismKind::MonotoneDropout, "monotone"),
        Kind::Mnar => (MechanismKind::PerturbedMnar, "all"),
    };
    let space = DataSpace::with_level_counts(&vec![levels; vars]).map_err(usage)?;
    let patterns = pattern_set(patterns.as_deref().unwrap_or(default_patterns), vars)?;
    let omega = Omega::new(space, patterns).map_err(usage)?;
    let spec = MechanismSpec::random(kind, &omega, seed)?;
    let g = spec.build(&omega)?;
    let f: Marginal = random_marginal(omega.space(), &mut SplitMix64::new(!seed), true);
    let model = Model::Selection(SelectionModel::new(f, g)?);
    let mut out = format!("# generated: kind {kind}, seed {seed}\n");
    if let MechanismSpec::PerturbedMnar { target, delta, donor, .. } = &spec {
        let _ = writeln!(out, "# perturbed at event {target}: moved {delta} from pattern {donor}");
    }
    out.push_str(&serialize_model(&model));
    Ok(out)
}

fn classify(model: &Model, event: Option<String>) -> Result<String, Failure> {
    let sm = model.selection()?;
    let g = sm.mechanism();
    let verdict = match event {
        Some(key) => is_realized_mar(g, &find_event(model.omega(), &key)?)?,
        None => is_everywhere_mar(g)?,
    };
    let mut out = format!("{verdict}\n");
    if let MarVerdict::NotMar(w) = &verdict {
        let _ = writeln!(out, "point {} has g = {}", w.first.0, w.first.1);
        let _ = writeln!(out, "point {} has g = {}", w.second.0, w.second.1);
    }
    if !verdict.excluded().is_empty() {
        let _ = writeln!(
            out,
            "note: g is undefined (f = 0) at {} point(s), left out of the comparison",
            verdict.excluded().len()
        );
    }
    Ok(out)
}

fn events(model: &Model) -> String {
    let h = model.density();
    let events = h.omega().enumerate_events();
    let mut out = format!(
        "{} events partition {} points\n",
        events.len(),
        h.omega().len()
    );
    for e in &events {
        let _ = writeln!(
            out,
            "{}  members {}  P = {}",
            e,
            e.len(),
            format_rational(&h.probability_of(e.members()))
        );
    }
    out
}

fn pryobs(model: &Model, mode: Mode) -> Result<String, Failure> {
    let sm = model.selection()?;
    let om = observed_mechanism(sm.mechanism(), mode)?;
    let mut out = format!("P(R|Y_obs), mode {mode}\n");
    for (key, v) in om.entries() {
        let _ = writeln!(out, "{key}  {v}");
    }
    for key in om.undefined() {
        let _ = writeln!(out, "{key}  undefined");
    }
    Ok(out)
}

/// Runs `property` over the selected events. Returns the report and whether it held.
fn check(
    model: &Model,
    property: Property,
    mode: Mode,
    event: Option<String>,
) -> Result<(String, bool), Failure> {
    let h = model.density();
    let events = match event {
        Some(key) => vec![find_event(h.omega(), &key)?],
        None => h.omega().enumerate_events(),
    };
    let g = match property {
        Property::StandardEquation => Some(model.selection()?),
        _ => None,
    };
    let mut checked = 0;
    for e in &events {
        let failure = match property {
            Property::StandardEquation => {
                let g = g.as_ref().expect("factorized above").mechanism();
                match standard_equation_failure(g, e, mode) {
                    Ok(f) => f.map(|f| format!("event {e}: {f}")),
                    Err(MarError::UndefinedOnEvent(_)) => continue,
                    Err(other) => return Err(other.into()),
                }
            }
            Property::DrawnAtRandom => match drawn_at_random_failure(&h, e) {
                Ok(f) => f.map(|f| format!("event {e}: {f}")),
                Err(MarError::ZeroProbabilityEvent(_)) => continue,
                Err(other) => return Err(other.into()),
            },
            Property::Shape => match shape_proportionality_check(&h, e) {
                Ok(true) => None,
                Ok(false) => {
                    let bars = shape_bars(&h, e)?;
                    let shown: Vec<String> = bars
                        .iter()
                        .map(|(p, pr, f)| {
                            format!("{}: {} vs {}", p, format_rational(pr), format_rational(f))
                        })
                        .collect();
                    Some(format!(
                        "event {e}: p(y|r) is not proportional to f(y) [{}]",
                        shown.join("; ")
                    ))
                }
                Err(MarError::ZeroProbabilityEvent(_)) => continue,
                Err(other) => return Err(other.into()),
            },
        };
        checked += 1;
        if let Some(message) = failure {
            return Ok((format!("fails\n{message}\n"), false));
        }
    }
    Ok((format!("holds on {checked} event(s)\n"), true))
}

fn reconstruct(model: &Model, mode: Mode) -> Result<String, Failure> {
    let h = model.density();
    let report = reconstruction_check(&h, mode)?;
    let mut out = format!("mode {mode}\n");
    if report.round_trip_holds() {
        out.push_str("round trip holds: f(y) P(R|Y_obs) reproduces h exactly\n");
        return Ok(out);
    }
    let _ = writeln!(
        out,
        "round trip fails: {} of {} points differ",
        report.mismatches.len(),
        h.omega().len()
    );
    for p in report.mismatches.iter().take(5) {
        let _ = writeln!(
            out,
            "  {p}: h = {}, rebuilt = {}",
            h.get(p).expect("complete"),
            report.reconstructed.get(p).expect("complete")
        );
    }
    if !report.validation.is_valid() {
        let _ = writeln!(out, "rebuilt table is not a density: {}", report.validation);
    }
    Ok(out)
}

fn sample(model: &Model, n: usize, seed: u64) -> Result<String, Failure> {
    let h: FullDensity = model.density();
    let data = sample_dataset(&h, n, seed)?;
    let space = h.omega().space();
    let mut out = String::from("pattern");
    for v in space.variables() {
        let _ = write!(out, ",{}", v.name());
    }
    out.push('\n');
    for row in data.rows() {
        let _ = write!(out, "{}", row.pattern);
        let mut values = row.values.iter();
        for &observed in row.pattern.bits() {
            match observed {
                true => {
                    let _ = write!(out, ",{}", values.next().expect("one value per observed"));
                }
                false => out.push_str(",NA"),
            }
        }
        out.push('\n');
    }
    Ok(out)
}

fn bias(model: &Model, var: &str) -> Result<String, Failure> {
    let h = model.density();
    let idx = h
        .omega()
        .space()
        .variable_index(var)
        .ok_or_else(|| usage(format!("no variable named `{var}`")))?;
    let report = complete_case_bias(&h, idx)?;
    let verdict = is_everywhere_mar(model.selection()?.mechanism())?;
    let class = if verdict.is_mar() { "EverywhereMAR" } else { "NotMAR" };
    let zero = if report.difference.is_zero() { " (unbiased)" } else { "" };
    Ok(format!("variable {var}\n{report}{zero}\nmechanism {class}\n"))
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    let text = match command {
        Command::Validate { file } => match read_model(&file) {
            Ok(model) => {
                let o = model.omega();
                format!(
                    "valid {} model: |Y| = {}, |R| = {}, |Omega| = {}\n",
                    model.section(),
                    o.space().size(),
                    o.patterns().len(),
                    o.len()
                )
            }
            Err((Some(e), f)) if !e.is_syntax() => {
                return Err(Failure {
                    code: EXIT_NEGATIVE,
                    message: f.message,
                })
            }
            Err((_, f)) => return Err(f),
        },
        Command::Factorize { file, form } => {
            let model = load(&file)?;
            let converted = match form {
                Factorization::Selection => Model::Selection(model.selection()?),
                Factorization::Mixture => Model::Mixture(model.mixture()?),
            };
            serialize_model(&converted)
        }
        Command::Events { file } => events(&load(&file)?),
        Command::Classify { file, event } => classify(&load(&file)?, event)?,
        Command::Pryobs { file, mode } => pryobs(&load(&file)?, mode.into())?,
        Command::Check {
            file,
            property,
            mode,
            event,
        } => {
            let (text, held) = check(&load(&file)?, property, mode.into(), event)?;
            write_out(out, &text)?;
            return Ok(if held { EXIT_OK } else { EXIT_NEGATIVE });
        }
        Command::Reconstruct { file, mode } => reconstruct(&load(&file)?, mode.into())?,
        Command::Generate {
            kind,
            seed,
            vars,
            levels,
            patterns,
        } => generate(kind, seed, vars, levels, patterns)?,
        Command::Sample { file, n, seed } => sample(&load(&file)?, n, seed)?,
        Command::Bias { file, var } => bias(&load(&file)?, &var)?,
        Command::Plot {
            file,
            figure,
            out: path,
            format,
            event,
        } => {
            let model = load(&file)?;
            let spec = FigureSpec {
                kind: figure.parse::<FigureKind>()?,
                format: match format {
                    FormatArg::Svg => FigureFormat::Svg,
                    FormatArg::Ascii => FigureFormat::Ascii,
                },
                event: event.map(|k| parse_event_key(&k)).transpose().map_err(usage)?,
            };
            let doc = emit_figure(&model.density(), &spec)?;
            if path.as_os_str() == "-" {
                doc
            } else {
                std::fs::write(&path, doc)
                    .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
                format!("wrote {}\n", path.display())
            }
        }
    };
    write_out(out, &text)?;
    Ok(EXIT_OK)
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| usage(format!("cannot write output: {e}")))
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
