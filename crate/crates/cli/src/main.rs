use std::process::ExitCode;

use clap::Parser;

use qmacro_cli::args::{resolve, Cli};
use qmacro_cli::config::Command;
use qmacro_cli::output::emit;
use qmacro_cli::run::{execute, RunError};
use qmacro_cli::verify::run_all;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = cli.command.parts();
    let config = match resolve(command, flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("qmacro: configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    if command == Command::Verify {
        let outcomes = run_all(&config.criteria, config.seed);
        for o in &outcomes {
            println!("{}", o.line());
        }
        let failed = outcomes.iter().filter(|o| !o.passed).count();
        println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
        return if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) };
    }
    let result = execute(&config).and_then(|t| emit(&config, &t, std::io::stdout().lock()).map_err(RunError::from));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        // downstream closed the pipe (`| head`)
        Err(RunError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe && config.out.is_none() => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qmacro: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
