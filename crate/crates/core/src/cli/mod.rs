//! Command-line front end: spec files, command dispatch and reports.

pub mod checks;
pub mod run;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::splitting::{GroupModel, Heuristics, ModelSpec, DEFAULT_PRECISION_BITS};

pub use run::{run, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, clap::ValueEnum)]
pub enum Command {
    Jordan,
    Snf,
    Nilradical,
    Splitting,
    Beta,
    Nilshadow,
    Hull,
    Gan,
    Growth,
    #[value(name = "check410")]
    Check410,
    Verify,
    Invariants,
    Suite,
}

impl Command {
    pub const ALL: [Command; 13] = [
        Command::Jordan,
        Command::Snf,
        Command::Nilradical,
        Command::Splitting,
        Command::Beta,
        Command::Nilshadow,
        Command::Hull,
        Command::Gan,
        Command::Growth,
        Command::Check410,
        Command::Verify,
        Command::Invariants,
        Command::Suite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Jordan => "jordan",
            Command::Snf => "snf",
            Command::Nilradical => "nilradical",
            Command::Splitting => "splitting",
            Command::Beta => "beta",
            Command::Nilshadow => "nilshadow",
            Command::Hull => "hull",
            Command::Gan => "gan",
            Command::Growth => "growth",
            Command::Check410 => "check410",
            Command::Verify => "verify",
            Command::Invariants => "invariants",
            Command::Suite => "suite",
        }
    }

    pub fn from_name(name: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Needs a polynomial-growth model.
    pub fn needs_hull(self) -> bool {
        matches!(
            self,
            Command::Hull
                | Command::Gan
                | Command::Growth
                | Command::Check410
                | Command::Verify
                | Command::Invariants
                | Command::Nilshadow
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_precision")]
    pub precision_bits: usize,
    #[serde(default)]
    pub allow_heuristic: bool,
}

fn default_precision() -> usize {
    DEFAULT_PRECISION_BITS
}

impl Default for Options {
    fn default() -> Self {
        Options {
            seed: 0,
            precision_bits: DEFAULT_PRECISION_BITS,
            allow_heuristic: false,
        }
    }
}

impl Options {
    /// `NILSHADOW_PRECISION_BITS` takes precedence over the file.
    pub fn heuristics(&self) -> Heuristics {
        let precision_bits = std::env::var("NILSHADOW_PRECISION_BITS")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(self.precision_bits);
        Heuristics { precision_bits }
    }
}

#[derive(Clone, Debug)]
pub struct SpecFile {
    pub model: GroupModel,
    /// Commands run by `suite`; all of them when empty.
    pub requested: Vec<Command>,
    pub options: Options,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    model: ModelSpec,
    #[serde(default)]
    requested: Vec<String>,
    #[serde(default)]
    options: Options,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid model: {0}")]
    Semantic(String),
    #[error("{0}")]
    Io(String),
}

pub fn parse_spec(text: &str) -> Result<SpecFile, CliError> {
    let raw: RawSpec = serde_json::from_str(text).map_err(|e| CliError::Syntax {
        line: e.line(),
        column: e.column(),
        message: strip_location(&e.to_string()),
    })?;
    let model = raw.model.build().map_err(|e| CliError::Semantic(e.to_string()))?;
    let mut seen = BTreeSet::new();
    let mut requested = Vec::new();
    for name in &raw.requested {
        let c = Command::from_name(name).ok_or_else(|| CliError::Semantic(format!("unknown command {name:?}")))?;
        if seen.insert(c) {
            requested.push(c);
        }
    }
    Ok(SpecFile {
        model,
        requested,
        options: raw.options,
    })
}

fn strip_location(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}
