use clap::Parser;
use ensemble_twa::cli::{main_with, Cli};

fn main() {
    std::process::exit(main_with(Cli::parse()));
}
