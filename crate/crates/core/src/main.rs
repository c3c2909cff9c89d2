use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bsideal::cli::{self, exit};

#[derive(Parser)]
#[command(name = "bsideal", version, about = "Bernstein-Sato ideal elements and zero-locus checks")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the tasks of a problem file and print a report.
    Run {
        /// Problem file: one spec or a JSON array of specs.
        spec: Option<PathBuf>,
        /// Emit the report as JSON.
        #[arg(long, conflicts_with = "text")]
        json: bool,
        /// Emit the report as text (the default).
        #[arg(long)]
        text: bool,
        /// Largest slope entry tried when extracting hyperplanes.
        #[arg(long, value_name = "N")]
        slope_bound: Option<u32>,
        /// Also run the bundled example corpus.
        #[arg(long)]
        seed_corpus: bool,
        /// Compare each entry against `<dir>/<id>.json`.
        #[arg(long, value_name = "DIR")]
        check_golden: Option<PathBuf>,
        /// Write each entry to `<dir>/<id>.json`.
        #[arg(long, value_name = "DIR", conflicts_with = "check_golden")]
        write_golden: Option<PathBuf>,
    },
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return code(if e.use_stderr() { exit::USAGE } else { exit::PASS });
        }
    };
    let Command::Run {
        spec,
        json,
        text: _,
        slope_bound,
        seed_corpus,
        check_golden,
        write_golden,
    } = args.command;

    let mut specs = Vec::new();
    if let Some(path) = &spec {
        let parsed = std::fs::read_to_string(path)
            .map_err(|e| format!("parse-error: cannot read {}: {e}", path.display()))
            .and_then(|t| cli::parse_specs(&t).map_err(|e| e.to_string()));
        match parsed {
            Ok(v) => specs.extend(v),
            Err(msg) => {
                eprintln!("{msg}");
                return code(exit::USAGE);
            }
        }
    }
    if seed_corpus {
        specs.extend(cli::corpus_specs());
    }
    if specs.is_empty() {
        eprintln!("parse-error: no problem file given (pass a spec or --seed-corpus)");
        return code(exit::USAGE);
    }

    let report = cli::run(&specs, slope_bound);
    print!("{}", if json { report.to_json() } else { report.to_text() });

    let mut status = report.exit_code();
    if let Some(dir) = write_golden {
        if let Err(e) = cli::write_golden(&report, &dir) {
            eprintln!("cannot write golden files: {e}");
            return code(exit::USAGE);
        }
    }
    if let Some(dir) = check_golden {
        let problems = cli::check_golden(&report, &dir);
        for p in &problems {
            eprintln!("golden mismatch: {p}");
        }
        if !problems.is_empty() && status == exit::PASS {
            status = exit::CHECK_FAILED;
        }
    }
    code(status)
}
