use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use warpgray_cli::config::Cli;
use warpgray_cli::run;

/// Exit codes: 0 all checks passed, 1 a check failed, 2 invalid input.
fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = cli.command.split();
    let cfg = match flags.resolve(command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if flags.dump_config {
        let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
        return ExitCode::SUCCESS;
    }
    match run::run(&cfg) {
        Ok(status) => ExitCode::from(status.exit_code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
