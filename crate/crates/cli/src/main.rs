use std::io::Write;

use clap::Parser;
use entpdf_cli::commands::{run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            let _ = writeln!(std::io::stdout(), "{summary}");
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
