//! The `cryptopath` command line. Every subcommand is a thin shell over one
//! library call; [`run`] returns what the binary would print, so tests can
//! compare the two directly.

pub mod args;
mod live;
mod numbers;
mod scenario;
mod text;

use std::ffi::OsString;
use std::io::Read;
use std::path::Path;

use anyhow::Context;
use clap::Parser;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

pub use args::Cli;
use args::{Command, Input};

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// What a subcommand produced.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandResult {
    pub code: i32,
    pub report: String,
    pub json: Value,
}

impl CommandResult {
    pub fn ok(report: impl Into<String>, json: Value) -> Self {
        Self {
            code: EXIT_OK,
            report: report.into(),
            json,
        }
    }

    /// A completed command whose answer is "no" (bad signature, failed check).
    pub fn negative(report: impl Into<String>, json: Value) -> Self {
        Self {
            code: EXIT_FAILED,
            ..Self::ok(report, json)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Output {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let json = cli.json;
    match execute(cli) {
        Ok(r) => {
            let mut stdout = if json {
                serde_json::to_string_pretty(&r.json).expect("json output")
            } else {
                r.report
            };
            if !stdout.ends_with('\n') {
                stdout.push('\n');
            }
            Output {
                code: r.code,
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => Output {
            code: EXIT_FAILED,
            stdout: String::new(),
            stderr: format!("error: {e:#}\n"),
        },
    }
}

pub fn execute(cli: Cli) -> anyhow::Result<CommandResult> {
    let seed = cli.seed.unwrap_or(0);
    match cli.command {
        Command::Caesar(c) => text::caesar(c),
        Command::Rail(c) => text::rail(c),
        Command::Otp(c) => text::otp(c),
        Command::Toyblock(c) => text::toyblock(c, seed),
        Command::Bits(c) => text::bits(c),
        Command::Freq(c) => text::freq(c),
        Command::Dh(c) => numbers::dh(c, seed),
        Command::Rsa(c) => numbers::rsa(c),
        Command::Oneway(c) => numbers::oneway(c),
        Command::Hybrid(c) => numbers::hybrid(c, seed),
        Command::Serve(a) => live::serve(a, cli.seed),
        Command::Bot(c) => live::bot(c, seed),
        Command::Scenario(c) => scenario::scenario(c),
    }
}

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn read_file(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

impl Input {
    pub fn read(&self) -> anyhow::Result<String> {
        match (&self.text, &self.file) {
            (Some(t), _) => Ok(t.clone()),
            (None, Some(path)) => read_file(path),
            (None, None) => {
                let mut s = String::new();
                std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
                Ok(s)
            }
        }
    }
}
