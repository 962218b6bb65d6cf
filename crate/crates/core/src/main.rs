use clap::Parser;
use std::io::Write;
use twinbeam::cli::{run, write_outputs, Cli};

fn main() {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|outputs| {
        if write_outputs(&cli, &outputs)?.is_none() {
            let mut out = std::io::stdout().lock();
            for o in &outputs {
                match out.write_all(o.content.as_bytes()) {
                    Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => return Ok(()),
                    r => r?,
                }
            }
        }
        Ok(())
    });
    if let Err(e) = result {
        eprintln!("twinbeam: {e}");
        std::process::exit(e.exit_code());
    }
}
