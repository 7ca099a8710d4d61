//! Classification metrics and comparison statistics.
//!
//! Macro-averaged precision/recall/F1, rank-based ROC-AUC, a paired Wilcoxon
//! signed-rank test (normal approximation with tie correction), and the
//! per-method win count used to compare balancing methods across datasets.

mod evaluate;

pub use evaluate::{evaluate, BalanceMethod, EvalSettings, EvaluationReport, TrialMetrics};

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Per-class precision, recall and F1.
#[derive(Debug, Clone, Serialize)]
pub struct ClassScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Rows of this class in `y_true`.
    pub support: usize,
}

/// Macro-averaged scores over a fixed class universe.
#[derive(Debug, Clone, Serialize)]
pub struct MacroScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub per_class: Vec<ClassScore>,
    /// Classes that never occur in `y_true` or `y_pred`; they score 0 and
    /// drag the macro average down, so callers may want to report them.
    pub degenerate_classes: Vec<usize>,
}

/// Macro precision/recall/F1 over class ids `0..n_classes`.
///
/// A class with an empty denominator (no predicted rows for precision, no
/// true rows for recall, or both for F1) scores 0 for that quantity. All
/// `n_classes` classes enter the unweighted average.
pub fn macro_scores(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> Result<MacroScores> {
    if y_true.len() != y_pred.len() {
        return Err(Error::data(format!(
            "y_true has {} rows, y_pred has {}",
            y_true.len(),
            y_pred.len()
        )));
    }
    if y_true.is_empty() {
        return Err(Error::data("cannot score an empty prediction set"));
    }
    if n_classes == 0 {
        return Err(Error::data("n_classes must be positive"));
    }
    for &y in y_true.iter().chain(y_pred.iter()) {
        if y >= n_classes {
            return Err(Error::data(format!(
                "class id {y} out of range (n_classes {n_classes})"
            )));
        }
    }

    let mut tp = vec![0usize; n_classes];
    let mut fp = vec![0usize; n_classes];
    let mut fn_ = vec![0usize; n_classes];
    for (&t, &p) in y_true.iter().zip(y_pred.iter()) {
        if t == p {
            tp[t] += 1;
        } else {
            fp[p] += 1;
            fn_[t] += 1;
        }
    }

    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let mut per_class = Vec::with_capacity(n_classes);
    let mut degenerate = Vec::new();
    for c in 0..n_classes {
        let precision = ratio(tp[c], tp[c] + fp[c]);
        let recall = ratio(tp[c], tp[c] + fn_[c]);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        if tp[c] + fp[c] + fn_[c] == 0 {
            degenerate.push(c);
        }
        per_class.push(ClassScore {
            precision,
            recall,
            f1,
            support: tp[c] + fn_[c],
        });
    }
    let k = n_classes as f64;
    Ok(MacroScores {
        precision: per_class.iter().map(|s| s.precision).sum::<f64>() / k,
        recall: per_class.iter().map(|s| s.recall).sum::<f64>() / k,
        f1: per_class.iter().map(|s| s.f1).sum::<f64>() / k,
        per_class,
        degenerate_classes: degenerate,
    })
}

/// Macro-averaged F1 over class ids `0..n_classes`.
pub fn f1_macro(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> Result<f64> {
    Ok(macro_scores(y_true, y_pred, n_classes)?.f1)
}

/// Ranks with ties assigned the average of the positions they span.
/// Returned ranks are 1-based and aligned with the input order.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Positions i..=j (0-based) share the average 1-based rank.
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Area under the ROC curve via the rank-sum formulation.
///
/// Equal scores across the class boundary contribute half a win, matching
/// the probabilistic definition `P(score+ > score-) + P(tie)/2`. Requires at
/// least one positive and one negative row and finite scores.
pub fn roc_auc(labels: &[usize], scores: &[f64], positive: usize) -> Result<f64> {
    if labels.len() != scores.len() {
        return Err(Error::data(format!(
            "{} labels but {} scores",
            labels.len(),
            scores.len()
        )));
    }
    if labels.is_empty() {
        return Err(Error::data("cannot compute AUC on an empty set"));
    }
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::data(format!("non-finite score {bad}")));
    }
    let n_pos = labels.iter().filter(|&&y| y == positive).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::data(format!(
            "AUC needs both classes present (positives: {n_pos}, negatives: {n_neg})"
        )));
    }
    let ranks = average_ranks(scores);
    let rank_sum_pos: f64 = labels
        .iter()
        .zip(ranks.iter())
        .filter(|(&y, _)| y == positive)
        .map(|(_, &r)| r)
        .sum();
    let n_pos_f = n_pos as f64;
    Ok((rank_sum_pos - n_pos_f * (n_pos_f + 1.0) / 2.0) / (n_pos_f * n_neg as f64))
}

/// Outcome of a paired Wilcoxon signed-rank test.
#[derive(Debug, Clone, Serialize)]
pub struct WilcoxonResult {
    /// `min(W+, W-)`, the smaller signed-rank sum.
    pub statistic: f64,
    /// Pairs remaining after zero differences are dropped.
    pub n_effective: usize,
    pub z: f64,
    /// Two-sided p-value from the normal approximation with tie-corrected
    /// variance and continuity correction.
    pub p_value: f64,
    pub significant_at_5pct: bool,
    /// False when fewer than 5 effective pairs remain; the normal
    /// approximation is not meaningful that small.
    pub reliable: bool,
}

/// Paired two-sided Wilcoxon signed-rank test.
///
/// Zero differences are dropped; tied absolute differences get average
/// ranks. Errors if the lengths differ, fewer than 2 pairs are given, or
/// every difference is zero.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    if a.len() != b.len() {
        return Err(Error::data(format!(
            "paired test needs equal lengths, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::data("paired test needs at least 2 pairs"));
    }
    let diffs: Vec<f64> = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::data("non-finite difference in paired test"));
    }
    let n = diffs.len();
    if n == 0 {
        return Err(Error::data(
            "all paired differences are zero; the test is undefined",
        ));
    }

    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&abs);
    let w_plus: f64 = diffs
        .iter()
        .zip(ranks.iter())
        .filter(|(&d, _)| d > 0.0)
        .map(|(_, &r)| r)
        .sum();
    let n_f = n as f64;
    let total = n_f * (n_f + 1.0) / 2.0;
    let w_minus = total - w_plus;
    // An empty rank sum is -0.0; normalize so one-sided data reports W = 0.
    let w = w_plus.min(w_minus) + 0.0;

    // Tie correction: subtract (t^3 - t)/48 for each group of t tied ranks.
    let mut sorted = abs.clone();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += (t * t * t - t) / 48.0;
        i = j + 1;
    }
    let mean = n_f * (n_f + 1.0) / 4.0;
    let variance = n_f * (n_f + 1.0) * (2.0 * n_f + 1.0) / 24.0 - tie_term;
    if variance <= 0.0 {
        return Err(Error::numerical(
            "zero variance in signed-rank test (too many ties)",
        ));
    }
    // W <= mean by construction, so the continuity correction moves toward 0.
    let z = (w - mean + 0.5) / variance.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let p_value = (2.0 * normal.cdf(z)).min(1.0);

    Ok(WilcoxonResult {
        statistic: w,
        n_effective: n,
        z,
        p_value,
        significant_at_5pct: p_value < 0.05,
        reliable: n >= 5,
    })
}

/// Per-method win counts over a score table (rows: datasets, columns:
/// methods). Every method matching the row maximum exactly gets the win, so
/// ties award one win to each tied method.
pub fn winning_times(table: &[Vec<f64>]) -> Result<Vec<usize>> {
    if table.is_empty() {
        return Err(Error::data("empty score table"));
    }
    let width = table[0].len();
    if width == 0 {
        return Err(Error::data("score table has no methods"));
    }
    let mut wins = vec![0usize; width];
    for (i, row) in table.iter().enumerate() {
        if row.len() != width {
            return Err(Error::data(format!(
                "score table row {i} has {} entries, expected {width}",
                row.len()
            )));
        }
        let best = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !best.is_finite() {
            return Err(Error::data(format!("non-finite score in row {i}")));
        }
        for (j, &v) in row.iter().enumerate() {
            if v == best {
                wins[j] += 1;
            }
        }
    }
    Ok(wins)
}
