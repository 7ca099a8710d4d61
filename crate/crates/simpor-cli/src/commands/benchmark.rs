use std::io::Write as _;
use std::path::PathBuf;

use clap::Args;
use simpor::metrics::{evaluate, wilcoxon_signed_rank, winning_times, EvaluationReport};
use simpor::Result;

use super::{ensure_writable, load_input, write_json};
use crate::fileconfig::FileConfig;
use crate::options::{build_eval, build_method, method_config_json, EvalOpts, SimporOpts};

#[derive(Args)]
pub struct BenchmarkArgs {
    /// Input CSV; repeat the flag to benchmark several datasets.
    #[arg(long = "input", required = true)]
    inputs: Vec<PathBuf>,
    /// Comma-separated method list.
    #[arg(long, default_value = "none,ros,smote,borderline_smote,adasyn,simpor")]
    methods: String,
    /// key=value settings file; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Label column: a header name, a zero-based index, or 'last'.
    #[arg(long, default_value = "last")]
    label_column: String,
    /// Summary CSV path.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Full report JSON path.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Overwrite existing output files.
    #[arg(long)]
    force: bool,
    #[command(flatten)]
    eval: EvalOpts,
    #[command(flatten)]
    simpor: SimporOpts,
}

pub fn run(args: BenchmarkArgs) -> Result<()> {
    let cfg = FileConfig::load(args.config.as_deref())?;
    let method_names: Vec<&str> = args
        .methods
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if method_names.len() < 2 {
        return Err(simpor::Error::config(
            "benchmark needs at least 2 methods (comma-separated)",
        ));
    }
    let methods: Vec<_> = method_names
        .iter()
        .map(|name| build_method(name, &args.simpor, &cfg, args.seed))
        .collect::<Result<_>>()?;
    let settings = build_eval(&args.eval, &cfg, args.seed)?;
    cfg.finish()?;

    // reports[d][m]: dataset d evaluated under method m.
    let mut reports: Vec<Vec<EvaluationReport>> = Vec::with_capacity(args.inputs.len());
    for input in &args.inputs {
        let ds = load_input(input, &args.label_column)?;
        let mut row = Vec::with_capacity(methods.len());
        for method in &methods {
            let report = evaluate(&ds, method, &settings)?;
            println!(
                "{}: method={} macro_f1={:.4}±{:.4} roc_auc={:.4}±{:.4}",
                input.display(),
                report.method,
                report.mean_macro_f1,
                report.std_macro_f1,
                report.mean_roc_auc,
                report.std_roc_auc
            );
            row.push(report);
        }
        reports.push(row);
    }

    let f1_table: Vec<Vec<f64>> = reports
        .iter()
        .map(|row| row.iter().map(|r| r.mean_macro_f1).collect())
        .collect();
    let auc_table: Vec<Vec<f64>> = reports
        .iter()
        .map(|row| row.iter().map(|r| r.mean_roc_auc).collect())
        .collect();
    let f1_wins = winning_times(&f1_table)?;
    let auc_wins = winning_times(&auc_table)?;
    println!("winning times (macro F1 / ROC-AUC):");
    for (m, name) in method_names.iter().enumerate() {
        println!("  {name}: {} / {}", f1_wins[m], auc_wins[m]);
    }

    // Paired Wilcoxon against simpor: over per-dataset means when several
    // datasets are given, otherwise over the single dataset's trials.
    let mut wilcoxon = Vec::new();
    if let Some(s) = method_names.iter().position(|n| *n == "simpor") {
        let pairing = if reports.len() > 1 {
            "dataset_means"
        } else {
            "trials"
        };
        for (m, name) in method_names.iter().enumerate() {
            if m == s {
                continue;
            }
            let (ours, theirs): (Vec<f64>, Vec<f64>) = if reports.len() > 1 {
                (
                    reports.iter().map(|row| row[s].mean_macro_f1).collect(),
                    reports.iter().map(|row| row[m].mean_macro_f1).collect(),
                )
            } else {
                (reports[0][s].f1_values(), reports[0][m].f1_values())
            };
            match wilcoxon_signed_rank(&ours, &theirs) {
                Ok(w) => {
                    println!(
                        "wilcoxon simpor vs {name} ({pairing}): W={} p={:.4}{}",
                        w.statistic,
                        w.p_value,
                        if w.reliable { "" } else { " (small sample)" }
                    );
                    wilcoxon.push(serde_json::json!({
                        "baseline": name,
                        "pairing": pairing,
                        "result": serde_json::to_value(&w).expect("result serializes"),
                    }));
                }
                Err(e) => println!("wilcoxon simpor vs {name}: skipped ({e})"),
            }
        }
    }

    if let Some(path) = &args.output {
        ensure_writable(path, args.force)?;
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(
            out,
            "dataset,method,mean_macro_f1,std_macro_f1,mean_roc_auc,std_roc_auc"
        )?;
        for (d, input) in args.inputs.iter().enumerate() {
            for r in &reports[d] {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    input.display(),
                    r.method,
                    r.mean_macro_f1,
                    r.std_macro_f1,
                    r.mean_roc_auc,
                    r.std_roc_auc
                )?;
            }
        }
        out.flush()?;
        println!("wrote {}", path.display());
    }

    if let Some(path) = &args.report {
        let body = serde_json::json!({
            "command": "benchmark",
            "inputs": args.inputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            "methods": method_names,
            "seed": args.seed,
            "settings": serde_json::to_value(&settings).expect("settings serialize"),
            "method_configs": methods.iter().map(method_config_json).collect::<Vec<_>>(),
            "winning_times": { "macro_f1": f1_wins, "roc_auc": auc_wins },
            "wilcoxon": wilcoxon,
            "reports": reports
                .iter()
                .map(|row| serde_json::to_value(row).expect("reports serialize"))
                .collect::<Vec<_>>(),
        });
        write_json(path, &body, args.force)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
