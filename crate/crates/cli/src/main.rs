use std::process::ExitCode;

use bergkern_cli::{error_json, run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.render().to_string();
            let doc = serde_json::json!({ "error": { "kind": "usage", "message": msg.trim_end(), "exit_code": 2 } });
            eprintln!("{doc}");
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            let doc = error_json(&err);
            eprintln!("{doc}");
            ExitCode::from(doc["error"]["exit_code"].as_u64().unwrap_or(1) as u8)
        }
    }
}
