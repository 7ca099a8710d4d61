use std::path::PathBuf;

use clap::Args;
use simpor::metrics::evaluate;
use simpor::Result;

use super::{load_input, write_json};
use crate::fileconfig::FileConfig;
use crate::options::{build_eval, build_method, method_config_json, EvalOpts, SimporOpts};

#[derive(Args)]
pub struct EvalArgs {
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
    /// Write the full report as JSON here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Overwrite an existing report file.
    #[arg(long)]
    force: bool,
    #[command(flatten)]
    eval: EvalOpts,
    #[command(flatten)]
    simpor: SimporOpts,
}

pub fn run(args: EvalArgs) -> Result<()> {
    let cfg = FileConfig::load(args.config.as_deref())?;
    let method = build_method(&args.method, &args.simpor, &cfg, args.seed)?;
    let settings = build_eval(&args.eval, &cfg, args.seed)?;
    cfg.finish()?;

    let ds = load_input(&args.input, &args.label_column)?;
    let report = evaluate(&ds, &method, &settings)?;
    println!(
        "{}: method={} trials={} macro_f1={:.4}±{:.4} roc_auc={:.4}±{:.4}",
        args.input.display(),
        report.method,
        report.n_trials,
        report.mean_macro_f1,
        report.std_macro_f1,
        report.mean_roc_auc,
        report.std_roc_auc
    );

    if let Some(path) = &args.report {
        let body = serde_json::json!({
            "command": "eval",
            "input": args.input.display().to_string(),
            "label_column": args.label_column,
            "method": report.method,
            "seed": args.seed,
            "settings": serde_json::to_value(&settings).expect("settings serialize"),
            "config": method_config_json(&method),
            "report": serde_json::to_value(&report).expect("report serializes"),
        });
        write_json(path, &body, args.force)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
