//! The `gradus` binary: run a job file, or scan numerical semigroups
//! straight from flags. Exit code 0 means everything asserted was verified,
//! 1 a refutation, 2 precision-inconclusive, 3 an input error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gradus_cli::job::{CommandSpec, JobFile};
use gradus_cli::{apply_overrides, compile, parse_job, render, run, Format, Overrides};

#[derive(Parser)]
#[command(name = "gradus", version, about = "exact local-algebra workbench")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute a JSON job file and print the report
    Run {
        jobfile: PathBuf,
        /// override the job's field: q or fp:<prime>
        #[arg(long)]
        field: Option<String>,
        /// override the ring truncation D
        #[arg(long)]
        trunc: Option<usize>,
        /// default window for commands that omit one
        #[arg(long)]
        window: Option<usize>,
        /// default seed for randomized base changes
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "table")]
        format: Format,
    },
    /// Enumerate semigroups within constraints and check HF monotonicity
    ScanSemigroups {
        #[arg(long, default_value_t = 3)]
        max_embdim: usize,
        #[arg(long, default_value_t = 8)]
        max_mult: u64,
        #[arg(long, default_value_t = 100)]
        max_frobenius: i64,
        /// degrees of the Hilbert function to inspect
        #[arg(long, default_value_t = 10)]
        window: usize,
        #[arg(long, default_value = "table")]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (job, overrides, format) = match cli.cmd {
        Cmd::Run { jobfile, field, trunc, window, seed, format } => {
            let text = match std::fs::read_to_string(&jobfile) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {}: {e}", jobfile.display());
                    return ExitCode::from(3);
                }
            };
            let job = match parse_job(&text) {
                Ok(j) => j,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(3);
                }
            };
            (job, Overrides { field, trunc, window, seed }, format)
        }
        Cmd::ScanSemigroups { max_embdim, max_mult, max_frobenius, window, format } => {
            let job = JobFile {
                field: None,
                ring: None,
                relations: Vec::new(),
                modules: Default::default(),
                factorizations: Default::default(),
                graded: Default::default(),
                semigroups: Default::default(),
                commands: vec![CommandSpec {
                    cmd: "scan-semigroups".into(),
                    module: None,
                    factorization: None,
                    graded: None,
                    semigroup: None,
                    forms: None,
                    window: Some(window),
                    alpha: None,
                    seed: None,
                    max_embdim: Some(max_embdim),
                    max_mult: Some(max_mult),
                    max_frobenius: Some(max_frobenius),
                }],
            };
            (job, Overrides::default(), format)
        }
    };

    let mut job = job;
    apply_overrides(&mut job, &overrides);
    let compiled = match compile(&job) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    let report = run(&compiled);
    print!("{}", render(&report, format));
    ExitCode::from(report.exit_code())
}
