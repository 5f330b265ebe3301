use std::io::Write;

use clap::Parser;
use qplane::cli::{render, run, Cli, Format};

fn main() {
    let cli = Cli::parse();
    let outcome = run(&cli);
    let failed = outcome.is_err();
    let (text, code) = render(&cli, outcome);
    // a closed pipe on the reader's side is not an error worth reporting
    let _ = if failed && cli.format == Format::Text {
        writeln!(std::io::stderr(), "{text}")
    } else {
        writeln!(std::io::stdout(), "{text}")
    };
    std::process::exit(code);
}
