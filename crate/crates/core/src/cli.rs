// Copyright 2026 The AQS Simulator Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Batch runner behind the `aqs` binary.
//!
//! `aqs run --scenario <name> --n <int> --trials <int> --seed <int>
//! [--defenses a,b] [--indices i,j] [--out <path>] [--format json|text]`
//!
//! Exit codes: 0 when every trial shows its scenario's expected outcome,
//! 1 on usage or I/O errors, 2 when an expected outcome is missing.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::adversary::Scenario;
use crate::defense::DefenseConfig;
use crate::numfmt::Decimal17;
use crate::protocol::{RunStatus, Transcript, Verdict, VerifyOutcome};
use crate::runner::{run_trial, RunError, TrialOutcome, TrialSpec};

pub const SEED_ENV: &str = "AQS_SEED";
pub const COMPLETENESS_TOLERANCE: f64 = 1e-9;
pub const FALSE_R_FIDELITY_GAP: f64 = 1e-6;
pub const LAW_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{flag}: {message}")]
    Usage { flag: String, message: String },
    #[error("{0}")]
    Clap(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("trial {trial}: {source}")]
    Run { trial: u64, source: RunError },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Run { .. } => 2,
            _ => 1,
        }
    }

    fn usage(flag: &str, message: impl Into<String>) -> Self {
        CliError::Usage {
            flag: flag.to_owned(),
            message: message.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    #[default]
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "aqs", version, about = "Seeded runs of the arbitrated quantum signature protocol")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a batch of trials of one scenario.
    Run(RunArgs),
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    /// honest, bob-lies, alice-tampers-ma, eve-disturbs-ma, alice-false-r, ipe, delay-photon
    #[arg(long)]
    scenario: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    trials: usize,
    /// Falls back to $AQS_SEED.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma list of wavelength-filter, pns.
    #[arg(long, default_value = "")]
    defenses: String,
    /// 1-based M_A positions for the tampering scenarios.
    #[arg(long, default_value = "1")]
    indices: String,
    /// Write all transcripts to this file as one JSON array.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub defenses: DefenseConfig,
    pub out: Option<PathBuf>,
    pub format: Format,
}

/// Parses `argv` (program name first). `env` looks up environment variables.
pub fn parse_config<I, T, F>(argv: I, env: F) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    F: Fn(&str) -> Option<String>,
{
    let Command::Run(args) = Cli::try_parse_from(argv).map_err(|e| CliError::Clap(e.render().to_string()))?.command;
    if args.n == 0 {
        return Err(CliError::usage("--n", "must be at least 1"));
    }
    if args.trials == 0 {
        return Err(CliError::usage("--trials", "must be at least 1"));
    }
    let seed = match args.seed {
        Some(s) => s,
        None => {
            let raw = env(SEED_ENV).ok_or_else(|| CliError::usage("--seed", format!("required unless {SEED_ENV} is set")))?;
            raw.trim()
                .parse()
                .map_err(|_| CliError::usage("--seed", format!("{SEED_ENV}={raw:?} is not a 64-bit unsigned integer")))?
        }
    };
    let indices = args
        .indices
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::usage("--indices", format!("`{}` is not a comma list of integers", args.indices)))?;
    let scenario = Scenario::from_name(&args.scenario, &indices).map_err(|e| CliError::usage("--scenario", e.to_string()))?;
    scenario.validate(args.n).map_err(|e| CliError::usage("--indices", e.to_string()))?;
    let defenses = DefenseConfig::parse(&args.defenses).map_err(|e| CliError::usage("--defenses", e.to_string()))?;
    Ok(RunConfig {
        scenario,
        n: args.n,
        trials: args.trials,
        seed,
        defenses,
        out: args.out,
        format: args.format,
    })
}

/// What a trial of a scenario must show.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    /// Full honest acceptance.
    Completes,
    /// Honest acceptance on the surface while Alice reads Bob's key.
    StealthExtraction,
    /// A receive-side device raises an alarm and the run stops.
    Detected,
    /// Bob claims a failed comparison that actually succeeded.
    FalseDispute,
    /// The comparison fails because `M_A` was altered.
    ComparisonFails,
    /// Bob accepts a pad that is not the one used to sign.
    FalsePad,
}

pub fn expected_outcome(scenario: &Scenario, defenses: &DefenseConfig) -> Expectation {
    match scenario {
        Scenario::Honest => Expectation::Completes,
        Scenario::BobLies => Expectation::FalseDispute,
        Scenario::AliceTampersMa { .. } | Scenario::EveDisturbsMa { .. } => Expectation::ComparisonFails,
        Scenario::AliceFalseR => Expectation::FalsePad,
        Scenario::IpeAttack if defenses.wavelength_filter || defenses.pns => Expectation::Detected,
        Scenario::DelayPhotonAttack if defenses.pns => Expectation::Detected,
        Scenario::IpeAttack | Scenario::DelayPhotonAttack => Expectation::StealthExtraction,
    }
}

/// Named per-trial checks for an expectation.
pub fn evaluate(expectation: Expectation, o: &TrialOutcome) -> Vec<(&'static str, bool)> {
    let v1 = ("V = 1", o.v == Some(true));
    let law = ("Bell law uniform", o.law_deviation <= LAW_TOLERANCE);
    let quiet = ("no alarms", o.alarms.is_empty());
    let unpublished = ("r not published", o.published_r.is_none());
    let inconclusive = ("verdict Inconclusive", o.verdict == Some(Verdict::Inconclusive));
    let honest = |o: &TrialOutcome| {
        vec![
            v1,
            ("comparison MatchOK", o.v5 == Some(VerifyOutcome::MatchOk)),
            (
                "recovered fidelity >= 1 - 1e-9",
                o.recover_fidelity_min().is_some_and(|f| f >= 1.0 - COMPLETENESS_TOLERANCE),
            ),
            ("signature valid", o.signature_valid == Some(true)),
            ("verdict NoDispute", o.verdict == Some(Verdict::NoDispute)),
            law,
            quiet,
        ]
    };
    match expectation {
        Expectation::Completes => honest(o),
        Expectation::StealthExtraction => {
            let mut c = honest(o);
            c.push(("key bits extracted exactly", o.extraction.as_ref().is_some_and(|e| e.is_exact())));
            c
        }
        Expectation::Detected => vec![
            ("alarm raised", !o.alarms.is_empty() && o.status == RunStatus::AttackDetected),
            ("no verdict", o.verdict.is_none()),
            ("no key bits extracted", o.extraction.is_none()),
        ],
        Expectation::FalseDispute => vec![
            v1,
            ("true comparison MatchOK", o.v5 == Some(VerifyOutcome::MatchOk)),
            unpublished,
            inconclusive,
            law,
            quiet,
        ],
        Expectation::ComparisonFails => vec![
            v1,
            ("comparison Mismatch", o.v5 == Some(VerifyOutcome::Mismatch)),
            unpublished,
            inconclusive,
            law,
            quiet,
        ],
        Expectation::FalsePad => vec![
            v1,
            ("comparison MatchOK", o.v5 == Some(VerifyOutcome::MatchOk)),
            ("signature invalid under posted r", o.signature_valid == Some(false)),
            (
                "recovered fidelity < 1 - 1e-6",
                o.recover_fidelity_min().is_some_and(|f| f < 1.0 - FALSE_R_FIDELITY_GAP),
            ),
            inconclusive,
            law,
            quiet,
        ],
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialSummary {
    pub trial: u64,
    pub status: RunStatus,
    #[serde(rename = "V")]
    pub v: Option<bool>,
    pub v5: Option<VerifyOutcome>,
    pub recover_fidelity_min: Option<Decimal17>,
    pub signature_valid: Option<bool>,
    pub verdict: Option<Verdict>,
    pub alarms: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckTally {
    pub check: &'static str,
    pub passed: usize,
    pub total: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatchSummary {
    pub scenario: String,
    pub n: usize,
    pub seed: u64,
    pub defenses: Vec<String>,
    pub expectation: Expectation,
    pub trials: Vec<TrialSummary>,
    pub checks: Vec<CheckTally>,
    pub all_passed: bool,
}

pub struct Batch {
    pub summary: BatchSummary,
    pub transcripts: Vec<Transcript>,
}

/// Runs every trial (in parallel; results keep trial order) and tallies the
/// expected-outcome checks.
pub fn run_batch(config: &RunConfig) -> Result<Batch, CliError> {
    let expectation = expected_outcome(&config.scenario, &config.defenses);
    let reports = (0..config.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let spec = TrialSpec {
                scenario: config.scenario.clone(),
                n: config.n,
                seed: config.seed,
                trial,
                defenses: config.defenses,
            };
            run_trial(&spec).map_err(|source| CliError::Run { trial, source })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut checks: Vec<CheckTally> = Vec::new();
    let mut trials = Vec::with_capacity(reports.len());
    for (trial, report) in reports.iter().enumerate() {
        let o = &report.outcome;
        let results = evaluate(expectation, o);
        for (check, ok) in &results {
            match checks.iter_mut().find(|t| t.check == *check) {
                Some(t) => {
                    t.total += 1;
                    t.passed += usize::from(*ok);
                }
                None => checks.push(CheckTally {
                    check,
                    passed: usize::from(*ok),
                    total: 1,
                }),
            }
        }
        trials.push(TrialSummary {
            trial: trial as u64,
            status: o.status,
            v: o.v,
            v5: o.v5,
            recover_fidelity_min: o.recover_fidelity_min().map(Decimal17),
            signature_valid: o.signature_valid,
            verdict: o.verdict,
            alarms: o.alarms.len(),
            passed: results.iter().all(|(_, ok)| *ok),
        });
    }
    let all_passed = trials.iter().all(|t| t.passed);
    let summary = BatchSummary {
        scenario: config.scenario.name().to_owned(),
        n: config.n,
        seed: config.seed,
        defenses: config.defenses.names(),
        expectation,
        trials,
        checks,
        all_passed,
    };
    let transcripts = reports.into_iter().map(|r| r.transcript).collect();
    Ok(Batch { summary, transcripts })
}

/// All transcripts of a batch as one JSON array, newline-terminated.
pub fn transcripts_json(transcripts: &[Transcript]) -> String {
    let parts: Vec<String> = transcripts.iter().map(Transcript::to_json).collect();
    format!("[{}]\n", parts.join(","))
}

pub fn render_summary(summary: &BatchSummary, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(summary).expect("summary serialization is infallible");
            s.push('\n');
            s
        }
        Format::Text => {
            let defenses = if summary.defenses.is_empty() {
                "none".to_owned()
            } else {
                summary.defenses.join(",")
            };
            let mut s = format!(
                "scenario={} n={} trials={} seed={} defenses={}\n",
                summary.scenario,
                summary.n,
                summary.trials.len(),
                summary.seed,
                defenses
            );
            for c in &summary.checks {
                let mark = if c.passed == c.total { "PASS" } else { "FAIL" };
                s.push_str(&format!("{mark} {}/{} {}\n", c.passed, c.total, c.check));
            }
            s.push_str(if summary.all_passed { "result: ok\n" } else { "result: FAILED\n" });
            s
        }
    }
}

/// Full command execution; returns the process exit code.
pub fn execute<I, T, F>(argv: I, env: F, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    F: Fn(&str) -> Option<String>,
{
    let outcome = parse_config(argv, env).and_then(|config| {
        let batch = run_batch(&config)?;
        if let Some(path) = &config.out {
            std::fs::write(path, transcripts_json(&batch.transcripts)).map_err(|e| CliError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
        }
        Ok((config, batch))
    });
    match outcome {
        Ok((config, batch)) => {
            let _ = stdout.write_all(render_summary(&batch.summary, config.format).as_bytes());
            if batch.summary.all_passed {
                0
            } else {
                2
            }
        }
        Err(CliError::Clap(text)) if is_informational(&text) => {
            let _ = stdout.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn is_informational(clap_text: &str) -> bool {
    !clap_text.starts_with("error:")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_env(_: &str) -> Option<String> {
        None
    }

    fn args(s: &str) -> Vec<String> {
        std::iter::once("aqs".to_owned()).chain(s.split_whitespace().map(str::to_owned)).collect()
    }

    #[test]
    fn valid_config() {
        let c = parse_config(args("run --scenario honest --n 8 --trials 100 --seed 42"), no_env).unwrap();
        assert_eq!(c.scenario, Scenario::Honest);
        assert_eq!((c.n, c.trials, c.seed), (8, 100, 42));
        assert_eq!(c.defenses, DefenseConfig::NONE);
        assert_eq!(c.format, Format::Text);
    }

    #[test]
    fn unknown_scenario_names_the_flag() {
        let e = parse_config(args("run --scenario bogus --n 1 --trials 1 --seed 1"), no_env).unwrap_err();
        assert!(matches!(&e, CliError::Usage { flag, .. } if flag == "--scenario"), "{e}");
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn seed_falls_back_to_env() {
        let env = |k: &str| (k == SEED_ENV).then(|| "7".to_owned());
        assert_eq!(parse_config(args("run --scenario honest --n 1 --trials 1"), env).unwrap().seed, 7);
        let e = parse_config(args("run --scenario honest --n 1 --trials 1"), no_env).unwrap_err();
        assert!(e.to_string().starts_with("--seed"));
        let bad = |_: &str| Some("x".to_owned());
        assert!(parse_config(args("run --scenario honest --n 1 --trials 1"), bad).is_err());
    }

    #[test]
    fn range_and_list_errors_name_their_flag() {
        for (line, flag) in [
            ("run --scenario honest --n 0 --trials 1 --seed 1", "--n"),
            ("run --scenario honest --n 1 --trials 0 --seed 1", "--trials"),
            ("run --scenario honest --n 1 --trials 1 --seed 1 --defenses laser", "--defenses"),
            ("run --scenario alice-tampers-ma --n 2 --trials 1 --seed 1 --indices 3", "--indices"),
        ] {
            match parse_config(args(line), no_env).unwrap_err() {
                CliError::Usage { flag: f, .. } => assert_eq!(f, flag),
                other => panic!("{line}: {other}"),
            }
        }
        let e = parse_config(args("run --scenario honest --n x --trials 1 --seed 1"), no_env).unwrap_err();
        assert!(e.to_string().contains("--n"));
    }

    #[test]
    fn expectation_table() {
        let filter = DefenseConfig::parse("wavelength-filter").unwrap();
        let pns = DefenseConfig::parse("pns").unwrap();
        assert_eq!(expected_outcome(&Scenario::IpeAttack, &DefenseConfig::NONE), Expectation::StealthExtraction);
        assert_eq!(expected_outcome(&Scenario::IpeAttack, &filter), Expectation::Detected);
        assert_eq!(expected_outcome(&Scenario::DelayPhotonAttack, &filter), Expectation::StealthExtraction);
        assert_eq!(expected_outcome(&Scenario::DelayPhotonAttack, &pns), Expectation::Detected);
        assert_eq!(expected_outcome(&Scenario::Honest, &DefenseConfig::ALL), Expectation::Completes);
    }

    #[test]
    fn every_expectation_is_met() {
        let cases = [
            ("honest", ""),
            ("honest", "wavelength-filter,pns"),
            ("bob-lies", ""),
            ("alice-tampers-ma", ""),
            ("eve-disturbs-ma", ""),
            ("alice-false-r", ""),
            ("ipe", ""),
            ("ipe", "wavelength-filter"),
            ("ipe", "pns"),
            ("delay-photon", ""),
            ("delay-photon", "wavelength-filter"),
            ("delay-photon", "pns"),
        ];
        for (scenario, defenses) in cases {
            let config = RunConfig {
                scenario: Scenario::from_name(scenario, &[1, 2]).unwrap(),
                n: 3,
                trials: 5,
                seed: 11,
                defenses: DefenseConfig::parse(defenses).unwrap(),
                out: None,
                format: Format::Text,
            };
            let batch = run_batch(&config).unwrap();
            assert!(batch.summary.all_passed, "{scenario} [{defenses}]\n{}", render_summary(&batch.summary, Format::Text));
            assert_eq!(batch.summary.trials.len(), 5);
        }
    }

    #[test]
    fn text_summary_has_one_line_per_check() {
        let config = parse_config(args("run --scenario honest --n 2 --trials 3 --seed 5"), no_env).unwrap();
        let batch = run_batch(&config).unwrap();
        let text = render_summary(&batch.summary, Format::Text);
        assert_eq!(text.lines().count(), batch.summary.checks.len() + 2);
        assert!(text.lines().filter(|l| l.starts_with("PASS 3/3")).count() == batch.summary.checks.len());
        let json: serde_json::Value = serde_json::from_str(&render_summary(&batch.summary, Format::Json)).unwrap();
        assert_eq!(json["all_passed"], true);
        assert_eq!(json["trials"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn help_exits_zero() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(execute(args("--help"), no_env, &mut out, &mut err), 0);
        assert!(String::from_utf8(out).unwrap().contains("run"));
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(execute(args("run --n 1"), no_env, &mut out, &mut err), 1);
        assert!(!err.is_empty());
    }
}
