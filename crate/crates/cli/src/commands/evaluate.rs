use std::collections::HashSet;
use std::fs;

use factcheck_core::generator::Prediction;
use factcheck_core::scoring::{averitec_score, ScoreReport};
use serde::Serialize;

use super::verify::PREDICTIONS_FILE;
use super::{existing, read_dataset, select};
use crate::args::EvaluateArgs;
use crate::config::AppConfig;
use crate::output::{write_atomic, write_json};
use crate::CliError;

/// Leading CSV columns; one `pass@<threshold>` column follows per threshold.
pub const REPORT_CSV_HEADER: [&str; 6] =
    ["claim_id", "hu_meteor_q", "hu_meteor_qa", "label_pred", "label_gold", "label_correct"];

#[derive(Serialize)]
struct ReportFile<'a> {
    claims: usize,
    predictions: String,
    #[serde(flatten)]
    report: &'a ScoreReport,
}

fn check_ids(preds: &[Prediction], gold_ids: &[u64]) -> Result<(), CliError> {
    let pred_ids: HashSet<u64> = preds.iter().map(|p| p.claim_id).collect();
    let gold_set: HashSet<u64> = gold_ids.iter().copied().collect();
    let missing: Vec<u64> = gold_ids.iter().copied().filter(|id| !pred_ids.contains(id)).collect();
    let mut extra: Vec<u64> = pred_ids.difference(&gold_set).copied().collect();
    extra.sort_unstable();
    if missing.is_empty() && extra.is_empty() {
        return Ok(());
    }
    Err(CliError::Usage(format!(
        "prediction ids do not match the dataset: missing {missing:?}, extra {extra:?}"
    )))
}

fn render_csv(report: &ScoreReport) -> Result<Vec<u8>, CliError> {
    let csv_err = |e: csv::Error| CliError::io("cannot render report CSV", e.into());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = REPORT_CSV_HEADER.iter().map(|s| s.to_string()).collect();
    header.extend(report.averitec.iter().map(|t| format!("pass@{}", t.threshold)));
    w.write_record(&header).map_err(csv_err)?;
    for c in &report.per_claim {
        let mut row = vec![
            c.claim_id.to_string(),
            format!("{:.6}", c.hu_meteor_q),
            format!("{:.6}", c.hu_meteor_qa),
            c.label_pred.to_string(),
            c.label_gold.to_string(),
            c.label_correct.to_string(),
        ];
        for t in &report.averitec {
            row.push((c.label_correct && c.hu_meteor(report.mode) >= t.threshold).to_string());
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| CliError::io("cannot render report CSV", e.into_error()))
}

/// Plain-text table with one column per headline metric.
pub fn summary(report: &ScoreReport) -> String {
    let mut names = vec!["Q only".to_string(), "Q + A".to_string()];
    let mut values = vec![report.q_score, report.qa_score];
    for t in &report.averitec {
        names.push(format!("AVeriTeC@{}", t.threshold));
        values.push(t.score);
    }
    names.extend(["accuracy".to_string(), "macro-F1".to_string()]);
    values.extend([report.accuracy, report.macro_f1]);
    let widths: Vec<usize> = names.iter().map(|n| n.len().max(6)).collect();
    let head: Vec<String> = names.iter().zip(&widths).map(|(n, w)| format!("{n:>w$}")).collect();
    let row: Vec<String> = values.iter().zip(&widths).map(|(v, w)| format!("{v:>w$.3}")).collect();
    format!("{}\n{}", head.join("  "), row.join("  "))
}

pub fn run(config: &AppConfig, args: &EvaluateArgs) -> Result<(), CliError> {
    let dataset = read_dataset(&existing(&config.paths.dataset, "dataset")?)?;
    let golds: Vec<_> = select(&dataset, &args.filter)?.into_iter().cloned().collect();
    let pred_path = args
        .predictions
        .clone()
        .unwrap_or_else(|| config.paths.output_dir.join(PREDICTIONS_FILE));
    if !pred_path.exists() {
        return Err(CliError::Usage(format!("prediction file does not exist: {}", pred_path.display())));
    }
    let text = fs::read_to_string(&pred_path)
        .map_err(|e| CliError::io(format!("cannot read {}", pred_path.display()), e))?;
    let mut preds: Vec<Prediction> = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("malformed prediction file {}: {e}", pred_path.display())))?;
    if !args.filter.claim_ids.is_empty() {
        preds.retain(|p| args.filter.claim_ids.contains(&p.claim_id));
    }
    let gold_ids: Vec<u64> = golds.iter().map(|c| c.id).collect();
    check_ids(&preds, &gold_ids)?;

    let report = averitec_score(&preds, &golds, &config.scoring, &config.meteor)?;
    let out = &config.paths.output_dir;
    write_json(
        &out.join("report.json"),
        &ReportFile {
            claims: golds.len(),
            predictions: pred_path.display().to_string(),
            report: &report,
        },
    )?;
    write_atomic(&out.join("report.csv"), &render_csv(&report)?)?;
    println!("evaluate: {} claims", golds.len());
    println!("{}", summary(&report));
    Ok(())
}
