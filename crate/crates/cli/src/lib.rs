//! `lawk`: batch front end for the invariant computations in `lawk-core`.
//!
//! [`run`] is the whole program minus process plumbing, so tests can drive it
//! in-process.

mod commands;
mod emit;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use lawk_core::Error;
use serde::Serialize;
use serde_json::{json, Map, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Emit {
    Json,
    Tsv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AuditKind {
    Stabilization,
    Perfectness,
    Lemma,
    Whitehead,
    Matrix,
    Zigzag,
}

#[derive(Debug, Parser)]
#[command(name = "lawk", version, about = "K-theoretic invariants of concrete Lawvere theories")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Theory spec, e.g. post:2, gsets:c3, matrix:2(sets).
    #[arg(long, global = true)]
    pub theory: Option<String>,
    #[arg(long, global = true, default_value_t = 3)]
    pub max_rank: usize,
    /// Number of trailing stages the telescope classification looks at.
    #[arg(long, global = true, default_value_t = 3)]
    pub window: usize,
    /// Largest hom-set (or search space) enumerated exhaustively.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    pub cutoff: u64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Emit::Json)]
    pub emit: Emit,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Check the theory laws on ranks up to --max-rank.
    Validate,
    /// Grothendieck group of free models.
    K0,
    /// Colimit of abelianized automorphism groups along stabilization.
    K1,
    /// Stable H_1 of the automorphism groups (same pipeline as k1).
    H1,
    /// Structural checks: stabilization, perfectness, idempotent lemma, commutator identities, matrix invariance.
    Audit {
        #[arg(long, value_enum)]
        kind: AuditKind,
        /// Matrix size for --kind matrix.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Idempotent T_1 -> T_1 as morphism JSON (lemma and zigzag audits).
        #[arg(long)]
        idempotent: Option<PathBuf>,
        /// Random automorphisms per theory for --kind whitehead.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Random pairs per theory for the thrice-space identity.
        #[arg(long, default_value_t = 25)]
        pairs: usize,
    },
    /// Classes of idempotents up to splitting, optionally compared with another theory.
    Fingerprint {
        #[arg(long)]
        compare: Option<String>,
    },
    /// Permutation matrices against the Post action on F_p^r.
    Morava {
        #[arg(long, default_value_t = 2)]
        p: u64,
    },
    /// Four-stage scenario: an idempotent modification of M_2(post:2) with the
    /// retracts of post:3 but a different K_1.
    Demo {
        /// Idempotent of matrix:2(post:2) at rank 1; default has a 3-point image.
        #[arg(long)]
        idempotent: Option<PathBuf>,
        /// Fingerprint comparison target; default post:k for a k-point image.
        #[arg(long)]
        compare: Option<String>,
    },
}

/// Everything a run produced.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub(crate) struct Report {
    pub value: Value,
    pub text: String,
    /// `Some(reason)` when an assertion failed.
    pub failure: Option<String>,
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_resource_limit() {
        return EXIT_RESOURCE;
    }
    match e {
        Error::Parse(_)
        | Error::UnsupportedParameter(_)
        | Error::InvalidGroupTable(_)
        | Error::Io(_)
        | Error::WindowLargerThanChain { .. }
        | Error::EnumerationUnavailable(_) => EXIT_USAGE,
        _ => EXIT_ASSERTION,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::TheoryMismatch { .. } => "TheoryMismatch",
        Error::RankMismatch(_) => "RankMismatch",
        Error::Parse(_) => "ParseError",
        Error::InvalidGroupTable(_) => "InvalidGroupTable",
        Error::UnsupportedParameter(_) => "UnsupportedParameter",
        Error::InvalidMorphism(_) => "InvalidMorphism",
        Error::EnumerationUnavailable(_) => "EnumerationUnavailable",
        Error::CutoffExceeded { .. } => "CutoffExceeded",
        Error::RankTooLarge { .. } => "RankTooLarge",
        Error::DomainMismatch(_) => "DomainMismatch",
        Error::QuotientTooLarge { .. } => "QuotientTooLarge",
        Error::NotIdempotent => "NotIdempotent",
        Error::NotAutomorphism(_) => "NotAutomorphism",
        Error::NotHomomorphism(_) => "NotHomomorphism",
        Error::WindowLargerThanChain { .. } => "WindowLargerThanChain",
        Error::Io(_) => "IoError",
    }
}

fn envelope(cli: &Cli, body: Value) -> Value {
    let mut out = Map::new();
    out.insert("tool".into(), json!("lawk"));
    out.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    out.insert("config".into(), config_json(cli));
    if let Value::Object(m) = body {
        out.extend(m);
    } else {
        out.insert("value".into(), body);
    }
    Value::Object(out)
}

fn config_json(cli: &Cli) -> Value {
    let mut c = serde_json::to_value(&cli.command).unwrap_or(Value::Null);
    if let Value::Object(m) = &mut c {
        m.insert("theory".into(), json!(cli.theory));
        m.insert("max_rank".into(), json!(cli.max_rank));
        m.insert("window".into(), json!(cli.window));
        m.insert("cutoff".into(), json!(cli.cutoff));
        m.insert("seed".into(), json!(cli.seed));
        m.insert("emit".into(), json!(cli.emit));
        m.insert("out".into(), json!(cli.out.as_ref().map(|p| p.display().to_string())));
    }
    c
}

fn check_config(cli: &Cli) -> Result<(), String> {
    if cli.max_rank < 1 {
        return Err("--max-rank must be at least 1".into());
    }
    if cli.window < 1 {
        return Err("--window must be at least 1".into());
    }
    if cli.cutoff < 1 {
        return Err("--cutoff must be at least 1".into());
    }
    Ok(())
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    if let Err(msg) = check_config(&cli) {
        let body = json!({"error": {"kind": "UsageError", "message": msg}});
        return finish(&cli, EXIT_USAGE, envelope(&cli, body), format!("error: {msg}\n"), Some(msg));
    }
    match commands::dispatch(&cli) {
        Ok(rep) => {
            let code = if rep.failure.is_some() { EXIT_ASSERTION } else { EXIT_OK };
            let value = envelope(&cli, rep.value);
            finish(&cli, code, value, rep.text, rep.failure)
        }
        Err(e) => {
            let body = json!({"error": {"kind": error_kind(&e), "message": e.to_string()}});
            let text = format!("error: {e}\n");
            finish(&cli, exit_code(&e), envelope(&cli, body), text, Some(e.to_string()))
        }
    }
}

fn finish(cli: &Cli, code: i32, value: Value, text: String, failure: Option<String>) -> Outcome {
    let rendered = match cli.emit {
        Emit::Json => {
            let mut s = serde_json::to_string_pretty(&value).expect("report serializes");
            s.push('\n');
            s
        }
        Emit::Tsv => emit::tsv(&value),
        Emit::Text => text,
    };
    let mut stderr = failure.map(|f| format!("lawk: {f}\n")).unwrap_or_default();
    let stdout = match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &rendered) {
                stderr.push_str(&format!("lawk: cannot write {}: {e}\n", path.display()));
                return Outcome { code: EXIT_USAGE, stdout: rendered, stderr };
            }
            String::new()
        }
        None => rendered,
    };
    Outcome { code, stdout, stderr }
}
