use std::process::ExitCode;

use clap::Parser;
use sturmian::cli::{run, write_atomic, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    print!("{}", report.text);
    if let (Some(path), Some(doc)) = (&cli.out, &report.document) {
        if let Err(e) = write_atomic(path, doc) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if report.success {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
