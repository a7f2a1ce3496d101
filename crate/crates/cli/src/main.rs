use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use cnp_cli::args::Cli;
use cnp_cli::{run, EXIT_INPUT};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_INPUT as u8),
            };
        }
    };
    let start = Instant::now();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    let run_report = outcome.run_report(start.elapsed().as_millis() as u64);
    let stdout = if outcome.enveloped {
        serde_json::to_string_pretty(&run_report)
    } else {
        serde_json::to_string_pretty(&outcome.report)
    };
    println!("{}", stdout.expect("reports serialize"));
    for d in &outcome.diagnostics {
        eprintln!("{d}");
    }
    if let Some(path) = &cli.json {
        let text = serde_json::to_string_pretty(&run_report).expect("reports serialize");
        if let Err(e) = std::fs::write(path, text) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(EXIT_INPUT as u8);
        }
    }
    ExitCode::from(outcome.code as u8)
}
