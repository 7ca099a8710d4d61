use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use simpor::baselines::oversample;
use simpor::data::save_csv;
use simpor::metrics::BalanceMethod;
use simpor::synth::{balance, save_csv_with_provenance};
use simpor::Result;

use super::{default_report_path, ensure_writable, load_input, write_json};
use crate::fileconfig::FileConfig;
use crate::options::{build_method, method_config_json, SimporOpts};

#[derive(Args)]
pub struct BalanceArgs {
    /// Input CSV.
    #[arg(long)]
    input: PathBuf,
    /// none, ros, smote, borderline_smote, adasyn or simpor.
    #[arg(long, default_value = "simpor")]
    method: String,
    /// key=value settings file; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Label column: a header name, a zero-based index, or 'last'.
    #[arg(long, default_value = "last")]
    label_column: String,
    /// Balanced CSV path (default: input stem + .balanced.csv).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Run report JSON path (default: output stem + .report.json).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Add provenance columns (synthetic flag, parent row, radius,
    /// posterior log-ratio, phase) to the output CSV. simpor only.
    #[arg(long)]
    provenance: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Overwrite existing output files.
    #[arg(long)]
    force: bool,
    #[command(flatten)]
    simpor: SimporOpts,
}

pub fn run(args: BalanceArgs) -> Result<()> {
    let cfg = FileConfig::load(args.config.as_deref())?;
    let method = build_method(&args.method, &args.simpor, &cfg, args.seed)?;
    cfg.finish()?;
    if args.provenance && !matches!(method, BalanceMethod::Simpor(_)) {
        return Err(simpor::Error::config(
            "--provenance is only available with --method simpor",
        ));
    }

    let ds = load_input(&args.input, &args.label_column)?;
    let output = args
        .output
        .unwrap_or_else(|| args.input.with_extension("balanced.csv"));
    let report_path = args.report.unwrap_or_else(|| default_report_path(&output));
    ensure_writable(&output, args.force)?;

    let (balanced, report_body) = match &method {
        BalanceMethod::Simpor(simpor_cfg) => {
            let res = balance(&ds, simpor_cfg)?;
            if args.provenance {
                save_csv_with_provenance(&res, &output)?;
            } else {
                save_csv(&res.dataset, &output)?;
            }
            println!(
                "balanced {}: {} majority / {} minority, +{} synthetic in {:.2}s",
                args.input.display(),
                res.report.n_majority,
                res.report.n_minority,
                res.report.n_synthetic,
                res.report.balance_seconds
            );
            let body = serde_json::to_value(&res.report).expect("report serializes");
            (res.dataset, body)
        }
        BalanceMethod::Baseline(baseline_cfg) => {
            let started = Instant::now();
            let res = oversample(&ds, baseline_cfg)?;
            let seconds = started.elapsed().as_secs_f64();
            save_csv(&res.dataset, &output)?;
            println!(
                "balanced {}: +{} synthetic in {:.2}s",
                args.input.display(),
                res.n_synthetic,
                seconds
            );
            let body = serde_json::json!({
                "n_original": ds.len(),
                "n_synthetic": res.n_synthetic,
                "duplication_fallback": res.duplication_fallback,
                "danger_fallback": res.danger_fallback,
                "uniform_fallback": res.uniform_fallback,
                "balance_seconds": seconds,
            });
            (res.dataset, body)
        }
        BalanceMethod::Identity => {
            save_csv(&ds, &output)?;
            println!("copied {} unchanged (method none)", args.input.display());
            (ds.clone(), serde_json::json!({ "n_synthetic": 0 }))
        }
    };

    let report = serde_json::json!({
        "command": "balance",
        "input": args.input.display().to_string(),
        "output": output.display().to_string(),
        "label_column": args.label_column,
        "method": method.name(),
        "seed": args.seed,
        "config": method_config_json(&method),
        "class_counts": balanced.class_counts(),
        "report": report_body,
    });
    write_json(&report_path, &report, args.force)?;
    println!("wrote {} and {}", output.display(), report_path.display());
    Ok(())
}
