use clap::Parser;
use pubmark_cli::commands::{run, Cli};
use pubmark_cli::EXIT_ERROR;

fn main() {
    let code = match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    };
    std::process::exit(code);
}
