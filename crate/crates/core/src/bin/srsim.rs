use clap::Parser;
use srsim::cli::{run, Args};

fn main() {
    std::process::exit(run(&Args::parse()));
}
