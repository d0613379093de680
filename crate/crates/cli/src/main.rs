use std::process::ExitCode;

use clap::Parser;
use probarg_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = run(&cli.command);
    if cli.json {
        println!("{}", report.to_json());
    } else {
        for line in &report.lines {
            println!("{line}");
        }
        for d in &report.diagnostics {
            eprintln!("{}: {d}", if report.exit_code() >= 2 { "error" } else { "note" });
        }
    }
    ExitCode::from(report.exit_code())
}
