mod oracles;

use std::collections::HashMap;

use factcheck_core::corpus::{Chunk, Claim, GoldQA};
use factcheck_core::generator::{
    build_prompt, parse_output, run_generation, select_fewshot, ChatModel, EchoChat, FewShotPool, GeneratorConfig,
    GeneratorOutput, LikertRatings, MockChat, EvidenceQA,
};
use factcheck_core::lexical::{tokenize, TokenizerConfig};
use factcheck_core::retriever::RetrievedSource;
use factcheck_core::{AnswerType, Error, VeracityLabel};
use proptest::prelude::*;

fn gold(id: u64, text: &str, label: VeracityLabel) -> Claim {
    Claim::new(id, text)
        .unwrap()
        .with_gold(
            label,
            vec![
                GoldQA {
                    question: format!("What does claim {id} say?"),
                    answer: text.to_string(),
                    answer_type: AnswerType::Extractive,
                },
                GoldQA {
                    question: "Is it accurate?".into(),
                    answer: "Yes".into(),
                    answer_type: AnswerType::Boolean,
                },
            ],
        )
        .unwrap()
}

fn sources(n: usize) -> Vec<RetrievedSource> {
    (1..=n)
        .map(|rank| RetrievedSource {
            rank,
            chunk: Chunk {
                doc_url: format!("https://news.example/{rank}"),
                index_in_doc: 0,
                sentences: vec![format!("Passage {rank}.")],
                text: format!("Passage {rank}."),
                prev_context: None,
                next_context: None,
                oversized: false,
            },
            sim_to_claim: 1.0 / rank as f64,
        })
        .collect()
}

const GOOD: &str = r#"{"questions": [{"question": "Q1?", "answer": "A1", "source": "1", "answer_type": "Extractive"}],
 "claim_veracity": {"Supported": "5", "Refuted": "1", "Not Enough Evidence": "2", "Conflicting Evidence/Cherrypicking": "1"},
 "veracity_verdict": "Supported"}"#;

#[test]
fn empty_retrieval_short_circuits() {
    let claim = Claim::new(1, "Nothing to see").unwrap();
    let chat = MockChat::new(HashMap::new());
    let out = run_generation(&claim, &[], &[], &GeneratorConfig::default(), &chat).unwrap();
    assert!(out.evidence.is_empty());
    assert_eq!(out.verdict, VeracityLabel::NotEnoughEvidence);
    assert_eq!(out.ratings.values(), [1, 1, 5, 1]);
}

#[test]
fn one_failure_then_success_is_retried() {
    let claim = Claim::new(3, "A claim").unwrap();
    let chat = MockChat::new(HashMap::from([(3, vec!["not json at all".to_string(), GOOD.to_string()])]));
    let out = run_generation(&claim, &sources(2), &[], &GeneratorConfig::default(), &chat).unwrap();
    assert_eq!(out.verdict, VeracityLabel::Supported);
    assert!(out.parse_warnings.iter().any(|w| w == "retry_count 1"), "{:?}", out.parse_warnings);
}

#[test]
fn persistent_failure_reports_attempts_and_text() {
    let claim = Claim::new(3, "A claim").unwrap();
    let chat = MockChat::new(HashMap::from([(3, vec!["{\"questions\": []}".to_string(); 4])]));
    match run_generation(&claim, &sources(2), &[], &GeneratorConfig::default(), &chat) {
        Err(Error::Parse { attempts, raw_text, .. }) => {
            assert_eq!(attempts, 4);
            assert_eq!(raw_text, "{\"questions\": []}");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn unknown_claim_has_no_script() {
    let claim = Claim::new(8, "A claim").unwrap();
    let chat = MockChat::new(HashMap::new());
    let err = run_generation(&claim, &sources(1), &[], &GeneratorConfig::default(), &chat).unwrap_err();
    assert!(matches!(err, Error::NoScript { claim_id: 8, .. }));
}

#[test]
fn echo_returns_gold() {
    let claim = gold(5, "The bridge opened in 1999.", VeracityLabel::Refuted);
    let chat = EchoChat::new(std::slice::from_ref(&claim));
    let out = run_generation(&claim, &sources(3), &[], &GeneratorConfig::default(), &chat).unwrap();
    assert_eq!(out.verdict, VeracityLabel::Refuted);
    assert_eq!(out.ratings, LikertRatings::one_hot(VeracityLabel::Refuted));
    let pairs: Vec<(String, String, AnswerType)> =
        out.evidence.iter().map(|e| (e.question.clone(), e.answer.clone(), e.answer_type)).collect();
    let want: Vec<(String, String, AnswerType)> =
        claim.gold_evidence.iter().map(|g| (g.question.clone(), g.answer.clone(), g.answer_type)).collect();
    assert_eq!(pairs, want);
    assert!(out.parse_warnings.is_empty());
}

fn train_set() -> Vec<Claim> {
    vec![
        gold(10, "The mayor raised taxes on small businesses", VeracityLabel::Refuted),
        gold(11, "Vaccines cause autism in children", VeracityLabel::Refuted),
        gold(12, "The mayor opened a new park downtown", VeracityLabel::Supported),
        gold(13, "Unemployment fell to record lows last year", VeracityLabel::Supported),
        gold(14, "The park closed because of taxes", VeracityLabel::NotEnoughEvidence),
    ]
}

#[test]
fn fewshot_order_follows_bm25_oracle() {
    let train = train_set();
    let claim = Claim::new(99, "The mayor raised park taxes").unwrap();
    let got: Vec<u64> = select_fewshot(&claim, &train, 10).iter().map(|c| c.id).collect();
    let cfg = TokenizerConfig::default();
    let docs: Vec<Vec<String>> = train.iter().map(|c| tokenize(&c.text, &cfg)).collect();
    let want: Vec<u64> = oracles::bm25::naive_top(&docs, &tokenize(&claim.text, &cfg), 1.2, 0.75, 10)
        .into_iter()
        .map(|(i, _)| train[i].id)
        .collect();
    assert_eq!(got, want);
    assert_eq!(got.len(), 3);
    assert!(select_fewshot(&claim, &train, 0).is_empty());
    assert!(select_fewshot(&claim, &[], 10).is_empty());
}

#[test]
fn fewshot_never_contains_the_claim_itself() {
    let train = train_set();
    let claim = train[0].clone();
    let pool = FewShotPool::new(&train);
    // identical text is skipped even without an id to exclude
    assert!(pool.select(&claim, 10, None).iter().all(|c| c.id != claim.id));
    let reworded = Claim::new(claim.id, "The mayor raised taxes on small shops").unwrap();
    assert_eq!(pool.select(&reworded, 10, None)[0].id, claim.id);
    assert!(pool.select(&reworded, 10, Some(claim.id)).iter().all(|c| c.id != claim.id));
    let picked = select_fewshot(&claim, &train, 10);
    assert!(picked.iter().all(|c| c.id != claim.id));
    let (system, _) = build_prompt(&claim, &sources(1), &picked, &GeneratorConfig::default());
    assert!(!system.contains(&format!("What does claim {} say?", claim.id)));
}

#[test]
fn prompt_is_pure() {
    let train = train_set();
    let claim = Claim::new(99, "The mayor raised park taxes").unwrap();
    let shots = select_fewshot(&claim, &train, 10);
    let cfg = GeneratorConfig::default();
    assert_eq!(build_prompt(&claim, &sources(3), &shots, &cfg), build_prompt(&claim, &sources(3), &shots, &cfg));
}

fn answer_type() -> impl Strategy<Value = AnswerType> {
    prop::sample::select(vec![AnswerType::Extractive, AnswerType::Abstractive, AnswerType::Boolean, AnswerType::Unanswerable])
}

fn output() -> impl Strategy<Value = GeneratorOutput> {
    let qa = ("[A-Za-z?\" ]{1,20}[a-z]", "[A-Za-z0-9 \\\\]{0,20}[a-z]", 0usize..8, answer_type()).prop_map(
        |(question, answer, source_rank, answer_type)| EvidenceQA {
            question,
            answer,
            source_rank,
            answer_type,
        },
    );
    (
        prop::collection::vec(qa, 0..14),
        prop::array::uniform4(1u8..=5),
        prop::sample::select(VeracityLabel::ALL.to_vec()),
    )
        .prop_map(|(evidence, r, verdict)| GeneratorOutput {
            evidence,
            ratings: LikertRatings::new(r).unwrap(),
            verdict,
            raw_text: String::new(),
            parse_warnings: Vec::new(),
        })
}

proptest! {
    #[test]
    fn reparsing_rendered_output_is_stable(out in output(), m in 1usize..6) {
        let cfg = GeneratorConfig::default();
        let first = parse_output(&out.to_model_json().to_string(), m, &cfg).unwrap();
        let second = parse_output(&first.to_model_json().to_string(), m, &cfg).unwrap();
        prop_assert_eq!(&first.evidence, &second.evidence);
        prop_assert_eq!(first.ratings, second.ratings);
        prop_assert_eq!(first.verdict, second.verdict);
        prop_assert!(first.evidence.len() <= cfg.l);
        if first.parse_warnings.is_empty() {
            prop_assert!(first.evidence.iter().all(|e| (1..=m).contains(&e.source_rank)));
        }
    }
}

#[test]
fn mock_is_safe_across_threads() {
    let script: HashMap<u64, Vec<String>> = (0..16).map(|id| (id, vec![format!("r{id}a"), format!("r{id}b")])).collect();
    let chat = MockChat::new(script);
    let results: Vec<(u64, String, String)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..16u64)
            .map(|id| {
                let chat = &chat;
                s.spawn(move || {
                    let req = factcheck_core::generator::ChatRequest {
                        claim_id: id,
                        system: String::new(),
                        user: String::new(),
                    };
                    (id, chat.complete(&req).unwrap(), chat.complete(&req).unwrap())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    for (id, a, b) in results {
        assert_eq!(a, format!("r{id}a"));
        assert_eq!(b, format!("r{id}b"));
    }
}
