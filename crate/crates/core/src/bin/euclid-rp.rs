use clap::Parser;
use euclid_rp::cli::{run, Command, Overrides, EXIT_ERROR};
use std::path::PathBuf;

/// Reflection-positivity, inner-product and scattering experiments.
#[derive(Parser)]
#[command(version)]
struct Args {
    /// rp-check, norm, heat, cook, smatrix or spin-check
    command: String,
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to [output] dir.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides [output] seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() {
    // Usage errors exit 1; exit 2 is reserved for certified failures.
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            std::process::exit(EXIT_ERROR);
        }
    };
    let command: Command = match args.command.parse() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(EXIT_ERROR);
        }
    };
    let overrides = Overrides {
        out: args.out,
        threads: args.threads,
        seed: args.seed,
    };
    std::process::exit(run(command, &args.config, &overrides));
}
