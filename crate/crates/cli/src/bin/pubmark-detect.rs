//! Detection only. Needs nothing but a public key.

use clap::Parser;
use pubmark_cli::commands::{detect, exit_code, DetectArgs};
use pubmark_cli::EXIT_ERROR;

#[derive(Parser)]
#[command(name = "pubmark-detect", version, about = "Check a PNG for a publicly detectable watermark")]
struct Cli {
    #[command(flatten)]
    args: DetectArgs,
}

fn main() {
    let code = match detect(&Cli::parse().args) {
        Ok(found) => exit_code(found),
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    };
    std::process::exit(code);
}
