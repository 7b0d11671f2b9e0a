use std::fmt::Write;

use super::types::GeneratorConfig;
use crate::corpus::Claim;
use crate::retriever::RetrievedSource;

const OUTPUT_FORMAT_FULL: &str = r#"```json
{
 "questions":
     [
         {"question": "<Your first question>", "answer": "<The answer to the Your first question>", "source": "<Single numeric source ID backing the answer for Your first question>", "answer_type":"<The type of first answer>"},
         {"question": "<Your second question>", "answer": "<The answer to the Your second question>", "source": "<Single numeric Source ID backing the answer for Your second question>", "answer_type":"<The type of second answer>"}
     ],
 "claim_veracity": {
     "Supported": "<Likert-scale rating of how much You agree with the 'Supported' veracity classification>",
     "Refuted": "<Likert-scale rating of how much You agree with the 'Refuted' veracity classification>",
     "Not Enough Evidence": "<Likert-scale rating of how much You agree with the 'Not Enough Evidence' veracity classification>",
     "Conflicting Evidence/Cherrypicking": "<Likert-scale rating of how much You agree with the 'Conflicting Evidence/Cherrypicking' veracity classification>"
 },
 "veracity_verdict": "<The suggested veracity classification for the claim>"
}
```"#;

const OUTPUT_FORMAT_SIMPLIFIED: &str = r#"```json
{
 "questions":
     [
         {"question": "<Your first question>", "answer": "<The answer to the Your first question>", "source": "<Single numeric source ID backing the answer for Your first question>"},
         {"question": "<Your second question>", "answer": "<The answer to the Your second question>", "source": "<Single numeric Source ID backing the answer for Your second question>"}
     ],
 "veracity_verdict": "<The suggested veracity classification for the claim>"
}
```"#;

fn instructions(l: usize, simplified: bool) -> String {
    let mut s = format!(
        "You are a professional fact checker, formulate up to {l} questions that cover all the facts \
         needed to validate whether the factual statement (in User message) is true, false, uncertain \
         or a matter of opinion."
    );
    if simplified {
        s.push_str(
            "\nAfter formulating Your questions and their answers using the provided sources, you note \
             the single likeliest veracity verdict (Supported claim, Refuted claim, Not enough evidence, \
             or Conflicting evidence/Cherrypicking) according to your best knowledge.",
        );
    } else {
        s.push_str(
            " Each question has one of four answer types: Boolean, Extractive, Abstractive and \
             Unanswerable using the provided sources.\nAfter formulating Your questions and their answers \
             using the provided sources, You evaluate the possible veracity verdicts (Supported claim, \
             Refuted claim, Not enough evidence, or Conflicting evidence/Cherrypicking) given your claim \
             and evidence on a Likert scale (1 - Strongly disagree, 2 - Disagree, 3 - Neutral, 4 - Agree, \
             5 - Strongly agree). Ultimately, you note the single likeliest veracity verdict according to \
             your best knowledge.",
        );
    }
    s
}

/// Renders the system prompt and the user prompt (the bare claim text).
///
/// Sources appear as `## Source ID: <rank> [<url>]` blocks holding the
/// previous chunk, the chunk and the next chunk; absent context is left
/// out. Few-shot examples are rendered in the order given.
pub fn build_prompt(
    claim: &Claim,
    sources: &[RetrievedSource],
    fewshot: &[Claim],
    cfg: &GeneratorConfig,
) -> (String, String) {
    let mut out = instructions(cfg.l, cfg.simplified);
    out.push_str("\nThe facts must be coming from these sources, please refer them using assigned IDs:\n---\n");
    for source in sources {
        let chunk = &source.chunk;
        let _ = writeln!(out, "## Source ID: {} [{}]", source.rank, chunk.doc_url);
        if let Some(prev) = &chunk.prev_context {
            let _ = writeln!(out, "{prev}");
        }
        let _ = writeln!(out, "{}", chunk.text);
        if let Some(next) = &chunk.next_context {
            let _ = writeln!(out, "{next}");
        }
        out.push('\n');
    }
    out.push_str("---\n## Output formatting\nPlease, you MUST only print the output in the following output format:\n");
    out.push_str(if cfg.simplified {
        OUTPUT_FORMAT_SIMPLIFIED
    } else {
        OUTPUT_FORMAT_FULL
    });
    out.push('\n');

    if !cfg.simplified && !fewshot.is_empty() {
        out.push_str("---\n## Few-shot learning\nYou have access to the following few-shot learning examples for questions and answers.:\n");
        for example in fewshot {
            let verdict = example.gold_label.map(|l| l.as_str()).unwrap_or("unknown");
            let _ = write!(
                out,
                "\n### Question examples for claim \"{}\" (verdict {})\n",
                example.text, verdict
            );
            for qa in &example.gold_evidence {
                let _ = writeln!(
                    out,
                    "\"question\": \"{}\", \"answer\": \"{}\", \"answer_type\": \"{}\"",
                    qa.question, qa.answer, qa.answer_type
                );
            }
        }
    }
    (out, claim.text.clone())
}
