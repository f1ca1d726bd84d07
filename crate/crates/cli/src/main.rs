use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use posmap_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, code) = match run(&cli) {
        Ok(outcome) => {
            let _ = writeln!(std::io::stdout(), "{}", outcome.stdout);
            (Some(outcome.report), outcome.code)
        }
        Err(e) => {
            eprintln!("posmap: {}", e.message);
            if let Some(report) = &e.report {
                let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(report).expect("json"));
            }
            (e.report, e.code)
        }
    };
    if let (Some(path), Some(report)) = (&cli.json_out, report) {
        let text = serde_json::to_string_pretty(&report).expect("json") + "\n";
        if let Err(e) = std::fs::write(path, text) {
            eprintln!("posmap: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code as u8)
}
