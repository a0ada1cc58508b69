use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use stablefrac::commands::{run, Cli, EXIT_INPUT};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(r) => {
            // A closed pipe is not an error worth reporting.
            let _ = writeln!(std::io::stdout(), "{}", r.json);
            ExitCode::from(r.code as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            let _ = writeln!(std::io::stdout(), "{}", serde_json::json!({ "error": e.to_string() }));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
