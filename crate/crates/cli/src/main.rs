use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;

use occupancy_cli::cli::{Cli, Command, ProbModel};
use occupancy_cli::{record, run};

fn main() -> ExitCode {
    let args = Cli::parse();
    let result = match &args.command {
        Command::Prob {
            model: ProbModel::Subset { params, run },
        } => run::prob_subset(params, run),
        Command::Prob {
            model: ProbModel::Bins { params, run },
        } => run::prob_bins(params, run),
        Command::Threshold(a) => run::threshold(a),
        Command::Validity(a) => run::validity_cmd(a),
        Command::Sweep(a) => run::sweep(a),
    };
    match result {
        Ok(report) => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            if let Err(e) = record::write_records(&mut out, &report.records, report.output.format)
                .and_then(|_| out.flush())
            {
                eprintln!("error: writing output: {e}");
                return ExitCode::FAILURE;
            }
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            ExitCode::from(report.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
