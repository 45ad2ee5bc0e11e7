mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::output::Outputs;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli, &argv) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli, argv: &[String]) -> anyhow::Result<bool> {
    let mut out = Outputs::new(&cli.global.out)?;
    let outcome = commands::run(&cli.command, &cli.global, &mut out)?;
    out.manifest(cli, argv, outcome.summary)?;
    for line in &outcome.lines {
        println!("{line}");
    }
    println!("{}", if outcome.ok { "PASS" } else { "FAIL" });
    Ok(outcome.ok)
}
