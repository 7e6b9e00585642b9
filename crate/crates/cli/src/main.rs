use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use hcn_sleep_cli::{run, CliError, ExperimentSpec};

fn main() -> ExitCode {
    let spec = match ExperimentSpec::try_parse() {
        Ok(s) => s,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or_default().trim_start_matches("error: ");
            eprintln!("{}", CliError::Usage(first.to_string()).to_json());
            return ExitCode::from(2);
        }
    };
    match run(&spec) {
        Ok(outputs) => {
            for o in outputs {
                println!("{}: {}", o.path.display(), o.summary);
                for w in o.warnings {
                    eprintln!("warning: {}: {w}", o.path.display());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::FAILURE
        }
    }
}
