use std::collections::HashMap;
use std::fs;

use factcheck_core::corpus::{load_dataset, Claim};
use factcheck_core::generator::{build_chat_model, generate_with_fewshot, ChatModel, FewShotPool, Prediction};
use factcheck_core::verdict::{ensemble, final_label, likert_softmax, load_external_probs, LabelDistribution};
use rayon::prelude::*;

use super::retrieve::RetrievalStage;
use super::{existing, read_dataset, select};
use crate::args::VerifyArgs;
use crate::config::AppConfig;
use crate::output::{write_json, ErrorRecord, ProgressLog, ProgressRecord};
use crate::CliError;

pub const PROGRESS_FILE: &str = "progress.jsonl";
pub const PREDICTIONS_FILE: &str = "predictions.json";
pub const ERRORS_FILE: &str = "verify_errors.json";

struct Pipeline<'a> {
    config: &'a AppConfig,
    retrieval: RetrievalStage,
    chat: Box<dyn ChatModel>,
    fewshot: Option<FewShotPool>,
    /// Training and evaluation claims come from the same file, so a claim
    /// must not be its own example.
    exclude_self: bool,
    external: Option<HashMap<u64, LabelDistribution>>,
}

impl Pipeline<'_> {
    fn predict(&self, claim: &Claim) -> Result<Prediction, CliError> {
        let cfg = &self.config.generator;
        let retrieval = self.retrieval.run(claim, self.config)?;
        let fewshot = match &self.fewshot {
            Some(pool) if !cfg.simplified && !retrieval.is_empty() => {
                pool.select(claim, cfg.fewshot_count, self.exclude_self.then_some(claim.id))
            }
            _ => Vec::new(),
        };
        let out = generate_with_fewshot(claim, &retrieval.sources, &fewshot, cfg, self.chat.as_ref())?;
        for w in &out.parse_warnings {
            log::info!("claim {}: {w}", claim.id);
        }
        let p_llm = likert_softmax(&out.ratings);
        let p = match (&self.config.ensemble, &self.external) {
            (Some(ens), Some(ext)) => ensemble(&p_llm, &ext[&claim.id], ens),
            _ => p_llm,
        };
        Ok(Prediction::new(claim, &out, &retrieval.sources, final_label(&p, out.verdict)))
    }
}

fn load_fewshot(config: &AppConfig) -> Result<(Option<FewShotPool>, bool), CliError> {
    let cfg = &config.generator;
    if cfg.simplified || cfg.fewshot_count == 0 {
        return Ok((None, false));
    }
    if config.paths.train_set.is_none() {
        log::warn!("paths.train_set is not set; prompting without few-shot examples");
        return Ok((None, false));
    }
    let train_path = existing(&config.paths.train_set, "train_set")?;
    let pool = FewShotPool::new(&load_dataset(&train_path)?);
    let same_file = match &config.paths.dataset {
        Some(d) => fs::canonicalize(d).ok() == fs::canonicalize(&train_path).ok(),
        None => false,
    };
    Ok((Some(pool), same_file))
}

fn load_external(config: &AppConfig, selected: &[&Claim]) -> Result<Option<HashMap<u64, LabelDistribution>>, CliError> {
    if config.ensemble.is_none() {
        return Ok(None);
    }
    let path = existing(&config.paths.external_probs, "external_probs")?;
    let probs = load_external_probs(&path)?;
    let missing: Vec<u64> = selected.iter().map(|c| c.id).filter(|id| !probs.contains_key(id)).collect();
    if !missing.is_empty() {
        return Err(CliError::Usage(format!(
            "{} has no probabilities for claim ids {missing:?}",
            path.display()
        )));
    }
    Ok(Some(probs))
}

pub fn run(config: &AppConfig, args: &VerifyArgs) -> Result<(), CliError> {
    let dataset = read_dataset(&existing(&config.paths.dataset, "dataset")?)?;
    let selected = select(&dataset, &args.run.filter)?;
    let external = load_external(config, &selected)?;
    let (fewshot, exclude_self) = load_fewshot(config)?;
    let pipeline = Pipeline {
        config,
        retrieval: RetrievalStage::open(config)?,
        chat: build_chat_model(&config.generator, &dataset)?,
        fewshot,
        exclude_self,
        external,
    };

    let out_dir = &config.paths.output_dir;
    let (progress, done) = ProgressLog::open(&out_dir.join(PROGRESS_FILE), args.fresh)?;
    let todo: Vec<&Claim> = selected.iter().copied().filter(|c| !done.contains_key(&c.id)).collect();
    let resumed = selected.len() - todo.len();

    let results: Vec<(u64, Result<Prediction, String>)> = todo
        .par_iter()
        .map(|claim| {
            let result = pipeline.predict(claim).map_err(|e| e.to_string());
            let record = match &result {
                Ok(p) => ProgressRecord::Ok {
                    claim_id: claim.id,
                    prediction: p.clone(),
                },
                Err(e) => ProgressRecord::Error {
                    claim_id: claim.id,
                    error: e.clone(),
                },
            };
            let result = match progress.append(&record) {
                Ok(()) => result,
                Err(e) => Err(e.to_string()),
            };
            (claim.id, result)
        })
        .collect();

    let mut fresh: HashMap<u64, Prediction> = HashMap::new();
    let mut errors = Vec::new();
    for (claim_id, result) in results {
        match result {
            Ok(p) => {
                fresh.insert(claim_id, p);
            }
            Err(error) => errors.push(ErrorRecord { claim_id, error }),
        }
    }
    let predictions: Vec<&Prediction> = selected
        .iter()
        .filter_map(|c| done.get(&c.id).or_else(|| fresh.get(&c.id)))
        .collect();
    write_json(&out_dir.join(PREDICTIONS_FILE), &predictions)?;
    write_json(&out_dir.join(ERRORS_FILE), &errors)?;

    for e in &errors {
        eprintln!("claim {}: {}", e.claim_id, e.error);
    }
    println!(
        "verify: {} claims, {} predicted ({} resumed), {} failed",
        selected.len(),
        predictions.len(),
        resumed,
        errors.len()
    );
    if errors.is_empty() || args.run.keep_going {
        Ok(())
    } else {
        Err(CliError::ClaimFailures {
            failed: errors.len(),
            total: selected.len(),
        })
    }
}
