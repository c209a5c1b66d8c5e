use clap::Parser;
use srllab::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("srllab: {}", e);
        std::process::exit(e.exit_code());
    }
}
