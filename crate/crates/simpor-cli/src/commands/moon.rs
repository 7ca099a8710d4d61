use std::path::PathBuf;

use clap::Args;
use simpor::data::{make_moon, save_csv, DEFAULT_NOISE};
use simpor::Result;

use super::ensure_writable;

#[derive(Args)]
pub struct MoonArgs {
    /// Total samples before thinning the minority moon.
    #[arg(long, default_value_t = 3000)]
    samples: usize,
    /// Target majority/minority imbalance ratio.
    #[arg(long, default_value_t = 7.0)]
    ir: f64,
    /// Standard deviation of the coordinate noise.
    #[arg(long, default_value_t = DEFAULT_NOISE)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    output: PathBuf,
    /// Overwrite an existing output file.
    #[arg(long)]
    force: bool,
}

pub fn run(args: MoonArgs) -> Result<()> {
    let ds = make_moon(args.samples, args.ir, args.noise, args.seed)?;
    ensure_writable(&args.output, args.force)?;
    save_csv(&ds, &args.output)?;
    let counts = ds.class_counts();
    println!(
        "wrote {}: {} rows ({} majority / {} minority)",
        args.output.display(),
        ds.len(),
        counts[0],
        counts[1]
    );
    Ok(())
}
