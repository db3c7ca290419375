//! `scelicit` command line. Exit codes: 0 success, 1 verification
//! failure, 2 usage or input error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use crate::adversary::{
    adv_random_known, adv_random_unknown, adv_sequential_sc, play, AdversaryVerdict, Game, Victim,
};
use crate::domain::{AccessMode, CandidateId, CandidatePartition};
use crate::error::Error;
use crate::generate::{gen_single_crossing, gen_width_w};

use super::{default_suite, run_on_profile, scp, AlgoId, Arrival, RunConfig, RunReport};

#[derive(Debug, Parser)]
#[command(name = "scelicit", about = "Preference elicitation for single-crossing profiles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random single-crossing profile in .scp format.
    Generate {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, env = "SCELICIT_SEED", default_value_t = 0)]
        seed: u64,
        /// Make all votes pairwise distinct.
        #[arg(long)]
        distinct: bool,
        /// Generate a width-w profile; the partition is reported on stderr.
        #[arg(long)]
        width: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Elicit a profile from a file and check the result.
    Run {
        #[arg(long)]
        algo: String,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, value_enum)]
        access: Option<AccessArg>,
        #[arg(long, default_value = "sc")]
        arrival: String,
        /// Inner algorithm for `--algo width`.
        #[arg(long)]
        inner: Option<String>,
        /// Candidate blocks for `--algo width`, e.g. "0,1;2,3".
        #[arg(long)]
        blocks: Option<String>,
        #[arg(long, env = "SCELICIT_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Run the default experiment suite and write a CSV report.
    Bench {
        #[arg(long)]
        out: Option<PathBuf>,
        /// Zero the timing column so reports are reproducible.
        #[arg(long)]
        no_timing: bool,
        #[arg(long, env = "SCELICIT_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Play an elicitation strategy against an adversary.
    Adversary {
        #[arg(long, value_enum)]
        adv: AdvArg,
        #[arg(long, value_enum)]
        algo: VictimArg,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, env = "SCELICIT_SEED", default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AccessArg {
    Random,
    Sequential,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AdvArg {
    RandomKnown,
    SeqSc,
    RandomUnknown,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VictimArg {
    KnownRandom,
    SeqSc,
    Unknown,
    Cheat,
}

enum Failure {
    Usage(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    2
                }
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => 0,
        Err(Failure::Verification) => 1,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Command::Generate {
            m,
            n,
            seed,
            distinct,
            width,
            out: path,
        } => {
            let profile = match width {
                Some(w) => {
                    if distinct {
                        return Err(Failure::Usage("--distinct and --width are exclusive".into()));
                    }
                    let (p, _, part) = gen_width_w(m, n, w, seed)?;
                    writeln!(err, "blocks: {}", format_blocks(&part))?;
                    p
                }
                None => gen_single_crossing(m, n, seed, distinct)?.0,
            };
            let text = scp::serialize(&profile);
            match path {
                Some(p) => fs::write(p, text)?,
                None => out.write_all(text.as_bytes())?,
            }
            Ok(())
        }
        Command::Run {
            algo,
            profile,
            access,
            arrival,
            inner,
            blocks,
            seed,
        } => {
            let algo: AlgoId = algo.parse()?;
            let arrival: Arrival = arrival.parse()?;
            let inner = inner.map(|s| s.parse::<AlgoId>()).transpose()?;
            let effective = inner.unwrap_or(algo);
            let access = match access {
                Some(AccessArg::Random) => AccessMode::Random,
                Some(AccessArg::Sequential) => AccessMode::Sequential,
                None => effective.default_access(),
            };
            let cfg = RunConfig {
                algo,
                inner,
                access,
                arrival,
            };
            cfg.validate()?;
            let text = fs::read_to_string(&profile)
                .map_err(|e| Failure::Usage(format!("{}: {e}", profile.display())))?;
            let truth = scp::parse(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", profile.display())))?;
            let partition = match (algo, blocks) {
                (AlgoId::Width, Some(b)) => Some(parse_blocks(truth.num_candidates(), &b)?),
                (AlgoId::Width, None) => {
                    return Err(Failure::Usage("--algo width needs --blocks".into()))
                }
                (_, Some(_)) => return Err(Failure::Usage("--blocks only applies to width".into())),
                _ => None,
            };
            let outcome = run_on_profile(
                &cfg,
                &truth,
                truth.certificate(),
                partition.as_ref(),
                seed,
            )?;
            writeln!(out, "algo: {}", cfg.label())?;
            writeln!(out, "queries: {}", outcome.result.queries)?;
            if let Some(split) = outcome.result.good_bad {
                writeln!(out, "good: {}", split.good)?;
                writeln!(out, "bad: {}", split.bad)?;
            }
            writeln!(out, "bound: {}", outcome.bound)?;
            writeln!(out, "within_bound: {}", outcome.within_bound())?;
            writeln!(out, "exact: {}", outcome.exact)?;
            if outcome.ok() {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Bench {
            out: path,
            no_timing,
            seed,
        } => {
            let mut report = RunReport::default();
            for spec in default_suite(seed, !no_timing) {
                report.extend(super::run_experiment(&spec)?);
            }
            match path {
                Some(p) => report.write_csv(fs::File::create(p)?)?,
                None => report.write_csv(&mut *out)?,
            }
            let failed = report.rows.iter().filter(|r| !r.ok).count();
            writeln!(err, "{} rows, {failed} failed", report.rows.len())?;
            if failed == 0 {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Adversary {
            adv,
            algo,
            m,
            n,
            seed,
        } => {
            if m < 2 || n == 0 {
                return Err(Failure::Usage("need m >= 2 and n >= 1".into()));
            }
            let victim = match algo {
                VictimArg::KnownRandom => Victim::KnownRandom,
                VictimArg::SeqSc => Victim::SequentialSc,
                VictimArg::Unknown => Victim::Unknown,
                VictimArg::Cheat => Victim::Cheat(seed),
            };
            let compatible = matches!(
                (adv, victim),
                (_, Victim::Unknown | Victim::Cheat(_))
                    | (AdvArg::RandomKnown, Victim::KnownRandom)
                    | (AdvArg::SeqSc, Victim::SequentialSc)
            );
            if !compatible {
                return Err(Failure::Usage(format!(
                    "{algo:?} cannot run in the {adv:?} adversary's scenario"
                )));
            }
            let game: Game = match adv {
                AdvArg::RandomKnown => play(adv_random_known(m, n), victim)?,
                AdvArg::SeqSc => play(adv_sequential_sc(m, n), victim)?,
                AdvArg::RandomUnknown => play(adv_random_unknown(m, n), victim)?,
            };
            match &game.verdict {
                AdversaryVerdict::Certified { queries } => {
                    writeln!(
                        out,
                        "Certified: queries={queries} intra_pair_queries={}",
                        game.intra_queries()
                    )?;
                    Ok(())
                }
                AdversaryVerdict::Refuted(r) => {
                    writeln!(
                        out,
                        "Refuted: voter {} pair ({}, {}) queries={}",
                        r.voter,
                        r.pair.low(),
                        r.pair.high(),
                        game.ledger.count()
                    )?;
                    write!(out, "witness:\n{}", scp::serialize(&r.witness))?;
                    Err(Failure::Verification)
                }
            }
        }
    }
}

fn format_blocks(part: &CandidatePartition) -> String {
    part.blocks()
        .iter()
        .map(|b| b.iter().map(|c| c.0.to_string()).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_blocks(m: usize, text: &str) -> Result<CandidatePartition, Failure> {
    let blocks = text
        .split(';')
        .map(|b| {
            b.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map(CandidateId)
                        .map_err(|_| Failure::Usage(format!("bad candidate {t:?} in --blocks")))
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CandidatePartition::new(m, blocks)?)
}
