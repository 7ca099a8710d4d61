use std::io::Write as _;
use std::path::PathBuf;

use clap::Args;
use simpor::metrics::{evaluate, BalanceMethod};
use simpor::synth::SimporConfig;
use simpor::{Error, Result};

use super::{ensure_writable, load_input, write_json};
use crate::fileconfig::FileConfig;
use crate::options::{build_eval, build_simpor, EvalOpts, SimporOpts};

#[derive(Args)]
pub struct SweepArgs {
    /// Input CSV.
    #[arg(long)]
    input: PathBuf,
    /// Swept parameter: alpha or informative_portion (alias ip).
    #[arg(long)]
    param: String,
    /// Values as start:stop:step (inclusive) or a comma-separated list.
    #[arg(long)]
    values: String,
    /// key=value settings file; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Label column: a header name, a zero-based index, or 'last'.
    #[arg(long, default_value = "last")]
    label_column: String,
    /// Series CSV path.
    #[arg(long)]
    output: PathBuf,
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

pub fn run(args: SweepArgs) -> Result<()> {
    let cfg = FileConfig::load(args.config.as_deref())?;
    let base = build_simpor(&args.simpor, &cfg, args.seed)?;
    let settings = build_eval(&args.eval, &cfg, args.seed)?;
    cfg.finish()?;

    let values = parse_values(&args.values)?;
    let ds = load_input(&args.input, &args.label_column)?;

    let mut rows = Vec::with_capacity(values.len());
    for &value in &values {
        let mut swept = base.clone();
        apply_param(&mut swept, &args.param, value)?;
        let method = BalanceMethod::Simpor(Box::new(swept));
        let report = evaluate(&ds, &method, &settings)?;
        println!(
            "{}={}: macro_f1={:.4}±{:.4} roc_auc={:.4}±{:.4}",
            args.param,
            value,
            report.mean_macro_f1,
            report.std_macro_f1,
            report.mean_roc_auc,
            report.std_roc_auc
        );
        rows.push((value, report));
    }

    ensure_writable(&args.output, args.force)?;
    let mut out = std::io::BufWriter::new(std::fs::File::create(&args.output)?);
    writeln!(
        out,
        "{},mean_macro_f1,std_macro_f1,mean_roc_auc,std_roc_auc",
        args.param
    )?;
    for (value, r) in &rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            value, r.mean_macro_f1, r.std_macro_f1, r.mean_roc_auc, r.std_roc_auc
        )?;
    }
    out.flush()?;
    println!("wrote {}", args.output.display());

    if let Some(path) = &args.report {
        let body = serde_json::json!({
            "command": "sweep",
            "input": args.input.display().to_string(),
            "param": args.param,
            "values": values,
            "seed": args.seed,
            "settings": serde_json::to_value(&settings).expect("settings serialize"),
            "base_config": serde_json::to_value(&base).expect("config serializes"),
            "reports": rows
                .iter()
                .map(|(v, r)| {
                    serde_json::json!({
                        "value": v,
                        "report": serde_json::to_value(r).expect("report serializes"),
                    })
                })
                .collect::<Vec<_>>(),
        });
        write_json(path, &body, args.force)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn apply_param(cfg: &mut SimporConfig, param: &str, value: f64) -> Result<()> {
    match param {
        "alpha" => cfg.alpha = value,
        "informative_portion" | "ip" => cfg.active.informative_portion = value,
        other => {
            return Err(Error::config(format!(
                "unknown sweep parameter '{other}' (expected alpha or informative_portion)"
            )))
        }
    }
    cfg.validate()
}

/// "0.2:1.0:0.2" (inclusive) or "0.2,0.4,0.6".
fn parse_values(raw: &str) -> Result<Vec<f64>> {
    let bad = |what: &str| Error::config(format!("invalid --values '{raw}': {what}"));
    let values = if raw.contains(':') {
        let parts: Vec<&str> = raw.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:stop:step"));
        }
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
        let (start, stop, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
        let finite = start.is_finite() && stop.is_finite() && step.is_finite();
        if !finite || step <= 0.0 || stop < start {
            return Err(bad("need finite start:stop:step with step > 0 and stop >= start"));
        }
        // Count steps up front so float drift cannot drop the endpoint, and
        // snap each value so 0.3 + 2*0.3 prints as 0.9, not 0.8999...9.
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
            .collect()
    } else {
        raw.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad("not a number")))
            .collect::<Result<Vec<f64>>>()?
    };
    if values.is_empty() {
        return Err(bad("no values"));
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_are_inclusive() {
        let v = parse_values("0.2:1.0:0.2").unwrap();
        assert_eq!(v.len(), 5);
        assert!((v[0] - 0.2).abs() < 1e-12);
        assert!((v[4] - 1.0).abs() < 1e-9);
        assert_eq!(parse_values("0.1:1.0:0.1").unwrap().len(), 10);
        assert_eq!(parse_values("0.5:0.5:0.1").unwrap(), vec![0.5]);
    }

    #[test]
    fn lists_parse() {
        assert_eq!(parse_values("0.2, 0.4").unwrap(), vec![0.2, 0.4]);
        assert!(parse_values("a,b").is_err());
        assert!(parse_values("1:2").is_err());
        assert!(parse_values("1:0:0.1").is_err());
        assert!(parse_values("1:2:-1").is_err());
    }
}
