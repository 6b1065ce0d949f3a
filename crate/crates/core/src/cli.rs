//! Command-line front end: annotation in, models out.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::dutch::{theory_for, validate_annotation, Annotation};
use crate::engine::{enumerate_models, Answer, SolveConfig};
use crate::kr::{parse_formula, parse_theory};
use crate::logic::Formula;
use crate::temporal::TimePoint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Derive tense and time information for an annotated Dutch sentence.
#[derive(Clone, Debug, Parser)]
#[command(name = "tense-abduce", version)]
pub struct Cli {
    /// Sentence annotation: ground facts over the annotation predicates.
    #[arg(long)]
    pub annotation: PathBuf,
    /// Extra theory file merged after the bundled theory.
    #[arg(long = "theory")]
    pub theories: Vec<PathBuf>,
    /// Observation that must hold in every model.
    #[arg(long)]
    pub query: Option<String>,
    /// Maximum number of models to print.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub models: u64,
    /// Labelling picks the earliest times at or after this point.
    #[arg(long, default_value = "ts(1999,1,1,0)")]
    pub anchor: TimePoint,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Reduction steps before the search gives up.
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: u64,
}

/// Exit status and rendered streams of one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn error(msg: String) -> Outcome {
        Outcome { status: 2, stdout: String::new(), stderr: format!("error: {msg}\n") }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    match models(cli) {
        Ok(answers) => render(&answers, cli.format),
        Err(msg) => Outcome::error(msg),
    }
}

fn models(cli: &Cli) -> Result<Vec<Answer>, String> {
    let read = |p: &PathBuf| std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()));
    let annotation = Annotation::parse(&read(&cli.annotation)?).map_err(|e| format!("{}: {e}", cli.annotation.display()))?;
    let mut extra = Vec::new();
    for p in &cli.theories {
        extra.push(parse_theory(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))?);
    }
    let theory = theory_for(&annotation, &extra).map_err(|e| e.to_string())?;
    let diagnostics = validate_annotation(&annotation, &theory);
    if !diagnostics.is_empty() {
        let mut msg = format!("{}: invalid annotation", cli.annotation.display());
        for d in &diagnostics {
            write!(msg, "\n  {d}").expect("write to string");
        }
        return Err(msg);
    }
    let query = match &cli.query {
        Some(q) => parse_formula(q).map_err(|e| format!("query: {e}"))?,
        None => Formula::True,
    };
    let config = SolveConfig { budget: cli.budget, anchor: cli.anchor };
    let n = usize::try_from(cli.models).unwrap_or(usize::MAX);
    enumerate_models(&theory, &query, n, config).map_err(|e| e.to_string())
}

fn render(answers: &[Answer], format: Format) -> Outcome {
    let status = if answers.is_empty() { 1 } else { 0 };
    let stdout = match format {
        Format::Text if answers.is_empty() => "no\n".to_string(),
        Format::Text => answers.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"),
        Format::Json => {
            let docs: Vec<serde_json::Value> = answers.iter().map(Answer::to_json).collect();
            let mut s = serde_json::to_string_pretty(&docs).expect("json rendering");
            s.push('\n');
            s
        }
    };
    Outcome { status, stdout, stderr: String::new() }
}
