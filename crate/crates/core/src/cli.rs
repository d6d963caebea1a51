//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::audit::{self, AuditReport, DimensionCensus, Postulate, Verdict};
use crate::born::born_demo;
use crate::correlations::ProbabilityTable;
use crate::error::Error;
use crate::evaluator::evaluate_with;
use crate::io::{read_theory, to_report, Theory};
use crate::ocb::ocb_demo;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_AUDIT_FAIL: i32 = 2;
pub const EXIT_UNPHYSICAL: i32 = 3;

/// Networks sampled by `demo born`.
pub const BORN_DEMO_NETWORKS: usize = 200;

#[derive(Debug, Parser)]
#[command(name = "opcone", version, about = "Evaluate and audit operational theories over ordered vector spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the network of a theory file and print its probability table.
    Eval {
        file: PathBuf,
        /// Recorded in the machine report; evaluation itself is deterministic.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        machine: bool,
    },
    /// Audit postulates on the systems of a theory file.
    Audit {
        file: PathBuf,
        /// Comma-separated subset of linearity,dimension,pairing,homogeneity,qubit.
        #[arg(long, value_delimiter = ',', required = true)]
        postulates: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        machine: bool,
    },
    /// Print the dimension census for every pair of declared systems.
    Dims {
        file: PathBuf,
        #[arg(long)]
        machine: bool,
    },
    /// Run a bundled demonstration.
    Demo {
        which: Demo,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        machine: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Demo {
    Ocb,
    Born,
}

/// Formats with 12 significant digits.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        format!("{:.*}", (11 - exp).max(0) as usize, x)
    } else {
        format!("{x:.11e}")
    }
}

#[derive(Serialize)]
struct EvalMachine<'a> {
    file: &'a str,
    seed: u64,
    table: &'a ProbabilityTable,
    flags: Vec<String>,
}

#[derive(Serialize)]
struct CensusEntry {
    a: String,
    b: String,
    census: Option<DimensionCensus>,
    report: AuditReport,
}

fn print_table(out: &mut dyn Write, table: &ProbabilityTable) -> std::io::Result<()> {
    writeln!(out, "outcome\tprobability\tweight")?;
    for row in &table.rows {
        writeln!(out, "{}\t{}\t{}", row.outcome.join(","), sig12(row.probability), row.weight)?;
    }
    writeln!(out, "total weight\t{}", table.total_weight)
}

fn code_for(e: &Error) -> i32 {
    match e {
        Error::UnphysicalSetup => EXIT_UNPHYSICAL,
        _ => EXIT_INPUT,
    }
}

fn load(file: &Path) -> Result<Theory, Error> {
    read_theory(file)
}

fn parse_postulates(list: &[String]) -> Result<Vec<Postulate>, Error> {
    list.iter()
        .map(|p| {
            Postulate::from_keyword(p.trim())
                .ok_or_else(|| Error::InvalidArgument(format!("unknown postulate `{p}`")))
        })
        .collect()
}

fn run_command(cmd: Command, out: &mut dyn Write) -> Result<i32, Error> {
    let io_err = |e: std::io::Error| Error::Io(e.to_string());
    match cmd {
        Command::Eval { file, seed, machine } => {
            let theory = load(&file)?;
            let seed = seed.unwrap_or(theory.options.seed);
            let network = theory.network()?;
            let result = evaluate_with(&network, &theory.eval_options()).map_err(|e| match e {
                Error::UnphysicalSetup => e,
                other => Error::parse(file.display().to_string(), other.to_string()),
            })?;
            if machine {
                let report = EvalMachine {
                    file: &file.display().to_string(),
                    seed,
                    table: &result.table,
                    flags: result.flags(),
                };
                writeln!(out, "{}", to_report(&report)?).map_err(io_err)?;
            } else {
                print_table(out, &result.table).map_err(io_err)?;
                for f in result.flags() {
                    writeln!(out, "warning: {f}").map_err(io_err)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Audit {
            file,
            postulates,
            seed,
            machine,
        } => {
            let postulates = parse_postulates(&postulates)?;
            let theory = load(&file)?;
            let seed = seed.unwrap_or(theory.options.seed);
            let reports = audit::audit_theory(&theory, &postulates, seed);
            if machine {
                writeln!(out, "{}", to_report(&reports)?).map_err(io_err)?;
            } else {
                for r in &reports {
                    write!(out, "{r}").map_err(io_err)?;
                }
            }
            let failed = reports.iter().any(|r| r.verdict == Verdict::Fail);
            Ok(if failed { EXIT_AUDIT_FAIL } else { EXIT_OK })
        }
        Command::Dims { file, machine } => {
            let theory = load(&file)?;
            let entries: Vec<CensusEntry> = audit::system_pairs(&theory)
                .into_iter()
                .map(|(i, j)| {
                    let (a, b) = (&theory.systems[i], &theory.systems[j]);
                    let (census, report) = audit::audit_dimension(&a.space, &b.space);
                    CensusEntry {
                        a: a.name.clone(),
                        b: b.name.clone(),
                        census,
                        report,
                    }
                })
                .collect();
            if machine {
                writeln!(out, "{}", to_report(&entries)?).map_err(io_err)?;
            } else {
                for e in &entries {
                    match &e.census {
                        Some(c) => writeln!(out, "{} x {}: {c} [{}]", e.a, e.b, e.report.verdict),
                        None => writeln!(out, "{} x {}: composite undefined [{}]", e.a, e.b, e.report.verdict),
                    }
                    .map_err(io_err)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Demo { which, seed, machine } => {
            match which {
                Demo::Ocb => {
                    let r = ocb_demo()?;
                    if machine {
                        writeln!(out, "{}", to_report(&r)?).map_err(io_err)?;
                    } else {
                        writeln!(out, "success probability (indefinite order): {}", sig12(r.success)).map_err(io_err)?;
                        writeln!(out, "success probability (causal process):   {}", sig12(r.causal_process_success))
                            .map_err(io_err)?;
                        writeln!(out, "best ordered strategy:                  {}", sig12(r.best_classical_strategy))
                            .map_err(io_err)?;
                        writeln!(out, "causal bound:                           {}", sig12(r.causal_bound)).map_err(io_err)?;
                    }
                }
                Demo::Born => {
                    let r = born_demo(seed, BORN_DEMO_NETWORKS)?;
                    if machine {
                        writeln!(out, "{}", to_report(&r)?).map_err(io_err)?;
                    } else {
                        writeln!(
                            out,
                            "{} networks, {} outcomes, max deviation from density-matrix propagation: {:e}",
                            r.networks, r.outcomes_compared, r.max_deviation
                        )
                        .map_err(io_err)?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
    }
}

/// Runs the CLI on `args` (including the program name), writing normal output
/// to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match run_command(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            code_for(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(1.0), "1.00000000000");
        assert_eq!(sig12(0.8535533905932738), "0.853553390593");
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1.5e-9), "1.50000000000e-9");
    }

    #[test]
    fn unknown_subcommand_exits_one() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["opcone", "frobnicate"], &mut out, &mut err), EXIT_INPUT);
        assert!(String::from_utf8(err).unwrap().contains("Usage"));
    }
}
