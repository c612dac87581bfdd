//! `diffloc` command-line front end: JSON in, JSON out.

mod check;
mod commands;

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use diffloc::Config;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "diffloc",
    version,
    about = "Localized factorization of circle diffeomorphisms"
)]
struct Cli {
    /// JSON input file; standard input when omitted.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// JSON file with configuration values; missing keys keep their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Spectral refit tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Minimum number of harmonics at the start of a refit.
    #[arg(long, global = true)]
    modes: Option<usize>,
    /// Margin fraction of the partition of unity.
    #[arg(long, global = true)]
    margin: Option<f64>,
    /// Fraction of the admissible ε actually used
    #[arg(long, global = true)]
    safety: Option<f64>,
    /// Periodization step for translations and special conformal maps.
    #[arg(long, global = true)]
    step: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Split a near-identity diffeomorphism into interval-localized factors.
    Localize,
    /// Slice a diffeomorphism into factors inside the admissible neighbourhood.
    Slice,
    /// Iwasawa coordinates of a Möbius element.
    Iwasawa,
    /// Translation / special conformal word of a Möbius element.
    TsWord,
    /// Translation / special conformal word of D(τ).
    DilationWord {
        #[arg(long, allow_hyphen_values = true)]
        tau: f64,
    },
    /// Translation / special conformal word of R(α).
    RotationWord {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
    },
    /// Localized word of a Möbius element.
    MoebiusWord,
    /// Compose universal-cover elements and trivialize them.
    Cover,
    /// Sign cocycle table of Möbius elements.
    Cocycle,
    /// Bott cocycle table of diffeomorphisms.
    Bott,
    /// Run the seeded property suite.
    Check {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
    /// CSV dump of x, φ̃(x), φ̃'(x) on the configured grid.
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Circle,
    Localization,
    Moebius,
    Cocycle,
    Words,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Circle => "circle",
            Suite::Localization => "localization",
            Suite::Moebius => "moebius",
            Suite::Cocycle => "cocycle",
            Suite::Words => "words",
        }
    }
}

/// Exit status 1 is a rejected input, 2 a numerical failure.
#[derive(Debug)]
pub struct Failure {
    pub kind: String,
    pub message: String,
    pub code: u8,
}

impl Failure {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self {
            kind: "InvalidInput".into(),
            message: message.into(),
            code: 1,
        }
    }

    pub fn numerical(kind: &str, message: impl Into<String>) -> Self {
        Self {
            kind: kind.into(),
            message: message.into(),
            code: 2,
        }
    }
}

impl From<diffloc::Error> for Failure {
    fn from(e: diffloc::Error) -> Self {
        Self {
            kind: e.kind().into(),
            message: e.to_string(),
            code: if e.is_validation() { 1 } else { 2 },
        }
    }
}

fn load_config(cli: &Cli) -> Result<Config, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?
        }
        None => Config::default(),
    };
    if let Some(t) = cli.tol {
        cfg.refit_tail = t;
    }
    if let Some(m) = cli.modes {
        cfg.modes = m;
    }
    if let Some(m) = cli.margin {
        cfg.margin_fraction = m;
    }
    if let Some(s) = cli.safety {
        cfg.safety = s;
    }
    if let Some(s) = cli.step {
        cfg.step = Some(s);
    }
    let checks = [
        (cfg.refit_tail > 0.0, "tolerance must be positive"),
        (
            cfg.modes >= 1 && cfg.modes <= cfg.max_modes,
            "modes must lie in [1, max_modes]",
        ),
        (
            cfg.margin_fraction > 0.0 && cfg.margin_fraction < 0.5,
            "margin must lie in (0, 0.5)",
        ),
        (
            cfg.safety > 0.0 && cfg.safety <= 1.0,
            "safety must lie in (0, 1]",
        ),
        (
            cfg.step.is_none_or(|s| s > 0.0 && s.is_finite()),
            "step must be positive",
        ),
        (cfg.grid_points >= 2, "grid must have at least two points"),
    ];
    for (ok, msg) in checks {
        if !ok {
            return Err(Failure::invalid(msg));
        }
    }
    Ok(cfg)
}

fn read_input(cli: &Cli) -> Result<Value, Failure> {
    let text = match &cli.input {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?,
        None => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::invalid(format!("stdin: {e}")))?;
            s
        }
    };
    serde_json::from_str(&text).map_err(|e| Failure::invalid(format!("input: {e}")))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Localize => "localize",
        Command::Slice => "slice",
        Command::Iwasawa => "iwasawa",
        Command::TsWord => "ts-word",
        Command::DilationWord { .. } => "dilation-word",
        Command::RotationWord { .. } => "rotation-word",
        Command::MoebiusWord => "moebius-word",
        Command::Cover => "cover",
        Command::Cocycle => "cocycle",
        Command::Bott => "bott",
        Command::Check { .. } => "check",
        Command::Grid => "grid",
    }
}

enum Output {
    Json(Value),
    Text(String),
}

fn run(cli: &Cli, cfg: &Config) -> Result<(Output, bool), Failure> {
    let result = match &cli.command {
        Command::DilationWord { tau } => commands::dilation_word(*tau)?,
        Command::RotationWord { alpha } => commands::rotation_word(*alpha)?,
        Command::Check { suite } => {
            let report = check::run(*suite, cli.seed, cfg);
            let passed = report.passed;
            let value = serde_json::to_value(&report).expect("report serializes");
            return Ok((Output::Json(value), passed));
        }
        Command::Grid => return Ok((Output::Text(commands::grid(&read_input(cli)?, cfg)?), true)),
        other => {
            let input = read_input(cli)?;
            match other {
                Command::Localize => commands::localize(&input, cfg)?,
                Command::Slice => commands::slice(&input, cfg)?,
                Command::Iwasawa => commands::iwasawa(&input)?,
                Command::TsWord => commands::ts_word(&input)?,
                Command::MoebiusWord => commands::moebius_word(&input, cfg)?,
                Command::Cover => commands::cover(&input)?,
                Command::Cocycle => commands::cocycle(&input)?,
                Command::Bott => commands::bott(&input, cfg)?,
                _ => unreachable!("handled above"),
            }
        }
    };
    Ok((Output::Json(result), true))
}

fn envelope(command: &str, cfg: &Config, seed: u64, body: (&str, Value)) -> Value {
    let mut v = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "seed": seed,
        "config": cfg,
    });
    v[body.0] = body.1;
    v
}

fn emit(path: Option<&PathBuf>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let name = command_name(&cli.command);
    let outcome = load_config(&cli).and_then(|cfg| run(&cli, &cfg).map(|r| (cfg, r)));
    let (text, code) = match outcome {
        Ok((_, (Output::Text(t), _))) => (t, 0),
        Ok((cfg, (Output::Json(v), passed))) => {
            let doc = envelope(name, &cfg, cli.seed, ("result", v));
            (pretty(&doc), if passed { 0 } else { 2 })
        }
        Err(f) => {
            let cfg = load_config(&cli).unwrap_or_default();
            let doc = envelope(
                name,
                &cfg,
                cli.seed,
                (
                    "error",
                    json!({"kind": f.kind, "message": f.message, "exit_code": f.code}),
                ),
            );
            (pretty(&doc), f.code)
        }
    };
    if let Err(e) = emit(cli.output.as_ref(), &text) {
        if e.kind() == io::ErrorKind::BrokenPipe {
            return ExitCode::from(code);
        }
        eprintln!("diffloc: cannot write output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}
