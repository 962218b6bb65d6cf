//! Figure datasets through the command layer, written to a directory
//! (first argument, default `figures`).

use clap::Parser;
use twinbeam::cli::{run, write_outputs, Cli};

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "figures".into());
    for fig in ["2", "3", "4"] {
        let cli = Cli::parse_from(["twinbeam", "reproduce-figure", fig, "--out", &dir]);
        let outputs = run(&cli).unwrap_or_else(|e| panic!("figure {fig}: {e}"));
        for path in write_outputs(&cli, &outputs).expect("writable").unwrap_or_default() {
            println!("{}", path.display());
        }
    }
}
