use clap::Parser;
use gme_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = gme_cli::run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
