use std::io::Write as _;
use std::path::PathBuf;

use clap::Args;
use simpor::reduce::{class_overlap_percent, Pca, DEFAULT_OVERLAP_BINS};
use simpor::Result;

use super::{default_report_path, ensure_writable, load_input, write_json};

#[derive(Args)]
pub struct ProjectArgs {
    /// Input CSV.
    #[arg(long)]
    input: PathBuf,
    /// Label column: a header name, a zero-based index, or 'last'.
    #[arg(long, default_value = "last")]
    label_column: String,
    /// Principal components to keep.
    #[arg(long, default_value_t = 2)]
    components: usize,
    /// Histogram bins for the class-overlap readout.
    #[arg(long, default_value_t = DEFAULT_OVERLAP_BINS)]
    bins: usize,
    /// Projected CSV path (default: input stem + .projected.csv).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Report JSON path (default: output stem + .report.json).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Overwrite existing output files.
    #[arg(long)]
    force: bool,
}

pub fn run(args: ProjectArgs) -> Result<()> {
    let ds = load_input(&args.input, &args.label_column)?;
    let output = args
        .output
        .unwrap_or_else(|| args.input.with_extension("projected.csv"));
    let report_path = args.report.unwrap_or_else(|| default_report_path(&output));

    let pca = Pca::fit(ds.features(), args.components)?;
    let projected = pca.transform(ds.features())?;

    ensure_writable(&output, args.force)?;
    let mut out = std::io::BufWriter::new(std::fs::File::create(&output)?);
    let header: Vec<String> = (1..=args.components)
        .map(|c| format!("pc{c}"))
        .chain([ds.label_column().to_string()])
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for (row, &label) in projected.rows().into_iter().zip(ds.labels()) {
        for v in row.iter() {
            write!(out, "{v},")?;
        }
        writeln!(out, "{}", ds.label_names()[label])?;
    }
    out.flush()?;

    // The overlap readout is defined for two-class data only.
    let overlap = if ds.present_classes().len() == 2 {
        Some(class_overlap_percent(&ds, args.bins)?)
    } else {
        None
    };
    match overlap {
        Some(pct) => println!(
            "projected {} onto {} component(s); class overlap {:.2}%",
            args.input.display(),
            args.components,
            pct
        ),
        None => println!(
            "projected {} onto {} component(s)",
            args.input.display(),
            args.components
        ),
    }

    let body = serde_json::json!({
        "command": "project",
        "input": args.input.display().to_string(),
        "output": output.display().to_string(),
        "label_column": args.label_column,
        "components": args.components,
        "bins": args.bins,
        "explained_variance": pca.explained_variance().to_vec(),
        "class_overlap_percent": overlap,
    });
    write_json(&report_path, &body, args.force)?;
    println!("wrote {} and {}", output.display(), report_path.display());
    Ok(())
}
