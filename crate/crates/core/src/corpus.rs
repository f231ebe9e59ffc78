//! Problem corpora: JSONL reading, the shipped golden cases, a seeded problem
//! generator, the corpus runner and the regression checks.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::explain::{explain, Format};
use crate::lexicon::{KnowledgeBase, LexicalRelation, RelKind};
use crate::oracle::{check_problem, OracleVerdict, DEFAULT_MAX_SIZE};
use crate::proof::{RunConfig, SearchedRelation};
use crate::prover::{classify, Flags, Label, NliProblem, ProofResult, ProverError};
use crate::tableau::Budget;

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        source: serde_json::Error,
    },
}

/// One problem per non-blank line.
pub fn parse_corpus(text: &str) -> Result<Vec<NliProblem>, CorpusError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|source| CorpusError::Json { line: i + 1, source }))
        .collect()
}

pub fn read_corpus(path: &Path) -> Result<Vec<NliProblem>, CorpusError> {
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_corpus(&text)
}

pub fn write_corpus(problems: &[NliProblem]) -> String {
    problems
        .iter()
        .map(|p| serde_json::to_string(p).expect("problems serialize") + "\n")
        .collect()
}

/// A regression case with its expected label and the KB facts it relies on.
#[derive(Debug, Clone)]
pub struct GoldenCase {
    pub problem: NliProblem,
    pub requires: Vec<LexicalRelation>,
}

fn case(id: &str, premises: &[&str], hypothesis: &str, gold: Label, requires: &[(&str, RelKind, &str)]) -> GoldenCase {
    let mut problem = NliProblem::new(id, premises, hypothesis);
    problem.gold = Some(gold);
    GoldenCase {
        problem,
        requires: requires.iter().map(|(a, r, b)| LexicalRelation::new(a, *r, b)).collect(),
    }
}

pub const DRUGS_PREMISE: &str =
    "Drugs that slow down or halt Alzheimer's disease work best the earlier you administer them";
pub const DRUGS_HYPOTHESIS: &str = "Alzheimer's disease is treated using drugs";

pub fn golden_cases() -> Vec<GoldenCase> {
    use Label::*;
    use RelKind::*;
    vec![
        case("birds-hover", &["many birds hover high"], "few birds fly", Contradiction, &[("hover", Sub, "fly"), ("many", Alt, "few")]),
        case("birds-hover-swapped", &["few birds fly"], "many birds hover high", Contradiction, &[("hover", Sub, "fly"), ("many", Alt, "few")]),
        case("drugs-treat", &[DRUGS_PREMISE], DRUGS_HYPOTHESIS, Entailment, &[]),
        case("not-all", &["Not all birds fly"], "Some bird does not fly", Entailment, &[]),
        case("identity", &["every dog barks"], "every dog barks", Entailment, &[]),
        case("neutral-some-all", &["some birds fly"], "all birds fly", Neutral, &[]),
        case("neutral-many", &["many birds fly"], "many birds hover", Neutral, &[]),
        case(
            "multi-premise",
            &["every bird flies", "some sparrows sleep"],
            "some birds fly",
            Entailment,
            &[("sparrow", Sub, "bird")],
        ),
        case("no-hover", &["no birds fly"], "some birds hover", Contradiction, &[("hover", Sub, "fly")]),
        case("hover-no", &["some birds hover"], "no birds fly", Contradiction, &[("hover", Sub, "fly")]),
        case("sparrow-up", &["some sparrows hover"], "some birds fly", Entailment, &[("sparrow", Sub, "bird")]),
        case("animal-down", &["every animal moves"], "every dog moves", Entailment, &[("dog", Sub, "animal")]),
        case("dog-no-animal", &["some dogs sleep"], "no animals sleep", Contradiction, &[("dog", Sub, "animal")]),
        case("every-some-not", &["every bird flies"], "some birds do not fly", Contradiction, &[]),
        case("passive-frame", &["John chases Fido"], "Fido is chased by John", Entailment, &[]),
        case("sleep-run", &["John sleeps"], "John runs", Contradiction, &[("sleep", Alt, "run")]),
        case("small-animal", &["some mice sleep"], "some small animals sleep", Entailment, &[("mouse", Sub, "small animal")]),
    ]
}

pub fn golden_problems() -> Vec<NliProblem> {
    golden_cases().into_iter().map(|c| c.problem).collect()
}

const GEN_NOUNS: &[&str] = &["animal", "bird", "dog", "mouse", "sparrow"];
const GEN_VERBS: &[&str] = &["bark", "fly", "hover", "move", "run", "sleep", "walk"];
const GEN_NAMES: &[&str] = &["John", "Mary", "Fido"];
const GEN_ADVERBS: &[&str] = &["high", "quickly"];
const SG_DETS: &[&str] = &["a", "every", "some"];
const PL_DETS: &[&str] = &["some", "all", "no", "many", "few"];

fn pick<'a>(rng: &mut ChaCha8Rng, xs: &[&'a str]) -> &'a str {
    xs.choose(rng).expect("non-empty vocabulary")
}

#[derive(Debug, Clone)]
enum Subject {
    Name(&'static str),
    Quantified {
        det: &'static str,
        singular: bool,
        small: bool,
        noun: &'static str,
    },
    NotAll(&'static str),
}

/// A sentence of the generator's sub-grammar, kept structured so that
/// hypotheses can be built by perturbing a premise.
#[derive(Debug, Clone)]
struct GenSentence {
    subject: Subject,
    negated: bool,
    verb: &'static str,
    adverb: Option<&'static str>,
}

impl GenSentence {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        let subject = match rng.gen_range(0..10) {
            0 => Subject::Name(pick(rng, GEN_NAMES)),
            1 => Subject::NotAll(pick(rng, GEN_NOUNS)),
            _ => {
                let singular = rng.gen_bool(0.4);
                Subject::Quantified {
                    det: pick(rng, if singular { SG_DETS } else { PL_DETS }),
                    singular,
                    small: rng.gen_bool(0.15),
                    noun: pick(rng, GEN_NOUNS),
                }
            }
        };
        let plain = matches!(subject, Subject::NotAll(_));
        GenSentence {
            subject,
            negated: !plain && rng.gen_bool(0.2),
            verb: pick(rng, GEN_VERBS),
            adverb: (!plain && rng.gen_bool(0.2)).then(|| pick(rng, GEN_ADVERBS)),
        }
    }

    /// Change one or two parts, keeping the rest.
    fn perturb(&self, rng: &mut ChaCha8Rng) -> Self {
        let mut s = self.clone();
        for _ in 0..rng.gen_range(1..=2) {
            match rng.gen_range(0..5) {
                0 => s.verb = pick(rng, GEN_VERBS),
                1 if !matches!(s.subject, Subject::NotAll(_)) => s.negated = !s.negated,
                2 if !matches!(s.subject, Subject::NotAll(_)) => {
                    s.adverb = if s.adverb.is_some() { None } else { Some(pick(rng, GEN_ADVERBS)) }
                }
                3 => match &mut s.subject {
                    Subject::Quantified { noun, .. } | Subject::NotAll(noun) => *noun = pick(rng, GEN_NOUNS),
                    Subject::Name(n) => *n = pick(rng, GEN_NAMES),
                },
                _ => match &mut s.subject {
                    Subject::Quantified { det, singular, small, .. } => {
                        *det = pick(rng, if *singular { SG_DETS } else { PL_DETS });
                        if rng.gen_bool(0.3) {
                            *small = !*small;
                        }
                    }
                    Subject::NotAll(noun) => {
                        s.subject = Subject::Quantified {
                            det: "some",
                            singular: false,
                            small: false,
                            noun,
                        };
                        s.negated = true;
                    }
                    Subject::Name(_) => s.verb = pick(rng, GEN_VERBS),
                },
            }
        }
        s
    }

    fn render(&self) -> String {
        let (base, third) = crate::parser::verb_forms(self.verb).expect("generator verbs are known");
        let (np, singular) = match &self.subject {
            Subject::Name(n) => (n.to_string(), true),
            Subject::NotAll(noun) => {
                let (_, pl) = crate::parser::noun_forms(noun).expect("generator nouns are known");
                return format!("Not all {pl} {base}");
            }
            Subject::Quantified {
                det,
                singular,
                small,
                noun,
            } => {
                let (sg, pl) = crate::parser::noun_forms(noun).expect("generator nouns are known");
                let noun = if *singular { sg } else { pl };
                let nbar = if *small { format!("small {noun}") } else { noun.to_string() };
                let det = if *det == "a" && nbar.starts_with('a') { "an" } else { det };
                (format!("{det} {nbar}"), *singular)
            }
        };
        let mut vp = match (self.negated, singular) {
            (true, true) => format!("does not {base}"),
            (true, false) => format!("do not {base}"),
            (false, true) => third.to_string(),
            (false, false) => base.to_string(),
        };
        if let Some(a) = self.adverb {
            vp = format!("{vp} {a}");
        }
        format!("{np} {vp}")
    }
}

/// One random sentence of the monadic fragment.
pub fn gen_sentence(rng: &mut ChaCha8Rng) -> String {
    GenSentence::random(rng).render()
}

/// `n` reproducible problems with one or two premises. Most hypotheses are
/// perturbations of a premise, so that a fair share of problems are not neutral.
pub fn generate(seed: u64, n: usize) -> Vec<NliProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let k = if rng.gen_bool(0.3) { 2 } else { 1 };
            let premises: Vec<GenSentence> = (0..k).map(|_| GenSentence::random(&mut rng)).collect();
            let hypothesis = if rng.gen_bool(0.8) {
                let base = premises.choose(&mut rng).expect("at least one premise");
                base.perturb(&mut rng)
            } else {
                GenSentence::random(&mut rng)
            };
            NliProblem {
                id: format!("gen-{i:04}"),
                premises: premises.iter().map(GenSentence::render).collect(),
                hypothesis: hypothesis.render(),
                gold: None,
            }
        })
        .collect()
}

pub type Outcome = Result<ProofResult, ProverError>;

/// Classify every problem; results come back sorted by problem id.
/// `jobs` = 0 uses all cores; without the `parallel` feature the run is sequential.
pub fn run_corpus(problems: &[NliProblem], kb: &KnowledgeBase, config: &RunConfig, jobs: usize) -> Vec<(String, Outcome)> {
    let mut out = run_unsorted(problems, kb, config, jobs);
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

#[cfg(feature = "parallel")]
fn run_unsorted(problems: &[NliProblem], kb: &KnowledgeBase, config: &RunConfig, jobs: usize) -> Vec<(String, Outcome)> {
    use rayon::prelude::*;
    if jobs == 1 {
        return run_sequential(problems, kb, config);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    pool.install(|| {
        problems
            .par_iter()
            .map(|p| (p.id.clone(), classify(p, kb, config)))
            .collect()
    })
}

#[cfg(not(feature = "parallel"))]
fn run_unsorted(problems: &[NliProblem], kb: &KnowledgeBase, config: &RunConfig, _jobs: usize) -> Vec<(String, Outcome)> {
    run_sequential(problems, kb, config)
}

pub fn run_sequential(problems: &[NliProblem], kb: &KnowledgeBase, config: &RunConfig) -> Vec<(String, Outcome)> {
    problems.iter().map(|p| (p.id.clone(), classify(p, kb, config))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigLine {
    pub config: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LabelLine {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flags: Option<Flags>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub millis: Option<u128>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl LabelLine {
    pub fn from_outcome(id: &str, o: &Outcome, timing: bool) -> LabelLine {
        match o {
            Ok(r) => LabelLine {
                id: id.to_string(),
                label: Some(r.label),
                flags: Some(r.flags),
                entries: Some(r.entries),
                millis: timing.then_some(r.millis),
                error: None,
                message: None,
            },
            Err(e) => LabelLine {
                id: id.to_string(),
                label: None,
                flags: None,
                entries: None,
                millis: None,
                error: Some("parse".to_string()),
                message: Some(e.to_string()),
            },
        }
    }
}

/// Labels JSONL: a config header line, then one line per problem.
pub fn labels_jsonl(results: &[(String, Outcome)], config: &RunConfig, timing: bool) -> String {
    let mut out = serde_json::to_string(&ConfigLine { config: config.clone() }).expect("config serializes");
    out.push('\n');
    for (id, o) in results {
        out.push_str(&serde_json::to_string(&LabelLine::from_outcome(id, o, timing)).expect("labels serialize"));
        out.push('\n');
    }
    out
}

/// Label lines of a labels file, skipping the config header.
pub fn parse_labels(text: &str) -> Result<Vec<LabelLine>, CorpusError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with("{\"config\""))
        .map(|(i, l)| serde_json::from_str(l).map_err(|source| CorpusError::Json { line: i + 1, source }))
        .collect()
}

/// File name for a problem's proof.
pub fn proof_file_name(id: &str) -> String {
    let safe: String = id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' })
        .collect();
    format!("{safe}.proof.json")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RegressionReport {
    pub checks: Vec<Check>,
}

impl RegressionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &str, failures: Vec<String>, ok_detail: String) {
        self.checks.push(Check {
            name: name.to_string(),
            passed: failures.is_empty(),
            detail: if failures.is_empty() { ok_detail } else { failures.join("; ") },
        });
    }
}

/// Non-Neutral results whose proved relation has an oracle countermodel.
pub fn soundness_failures(problems: &[NliProblem], results: &[(String, Outcome)], kb: &KnowledgeBase, max_size: usize) -> (usize, Vec<String>) {
    let by_id: BTreeMap<&str, &NliProblem> = problems.iter().map(|p| (p.id.as_str(), p)).collect();
    let mut checked = 0;
    let mut bad = Vec::new();
    for (id, o) in results {
        let Ok(r) = o else { continue };
        let relation = match r.label {
            Label::Entailment => SearchedRelation::Entailment,
            Label::Contradiction => SearchedRelation::Contradiction,
            Label::Neutral => continue,
        };
        match check_problem(by_id[id.as_str()], relation, kb, max_size) {
            OracleVerdict::Countermodel { model } => bad.push(format!("{id}: {model}")),
            OracleVerdict::NoCountermodel => checked += 1,
            OracleVerdict::Abstain { .. } => {}
        }
    }
    (checked, bad)
}

/// Golden labels and explanations, symmetry, identity, soundness, determinism
/// and budget monotonicity. With `golden_dir`, explanations are compared with
/// the stored files `<id>.<format>.json`.
pub fn run_regressions(kb: &KnowledgeBase, golden_dir: Option<&Path>, generated: usize) -> RegressionReport {
    let config = RunConfig::default();
    let mut report = RegressionReport::default();
    let cases = golden_cases();

    let mut bad = Vec::new();
    for c in &cases {
        for r in &c.requires {
            if !kb.is_subsumed(&r.lhs, &r.rhs) && !kb.is_alternative(&r.lhs, &r.rhs) {
                bad.push(format!("{}: KB lacks {r}", c.problem.id));
            }
        }
        match classify(&c.problem, kb, &config) {
            Ok(r) if Some(r.label) == c.problem.gold => {}
            Ok(r) => bad.push(format!("{}: got {:?}", c.problem.id, r.label)),
            Err(e) => bad.push(e.to_string()),
        }
    }
    report.push("golden labels", bad, format!("{} cases", cases.len()));

    let mut bad = Vec::new();
    let mut compared = 0;
    for c in &cases {
        let Ok(ProofResult { proof: Some(proof), .. }) = classify(&c.problem, kb, &config) else {
            continue;
        };
        for f in Format::ALL {
            let e = match explain(&proof, f) {
                Ok(e) => e,
                Err(err) => {
                    bad.push(format!("{} {f}: {err}", c.problem.id));
                    continue;
                }
            };
            match crate::eval::score_one(f, &e, &e) {
                Ok(s) if s.exact && s.prf.f1 == 1.0 => {}
                _ => bad.push(format!("{} {f}: not reflexive", c.problem.id)),
            }
            if let Some(dir) = golden_dir {
                let path = dir.join(format!("{}.{f}.json", c.problem.id));
                match fs::read_to_string(&path) {
                    Ok(text) if text.trim_end() == e.to_json().trim_end() => compared += 1,
                    Ok(_) => bad.push(format!("{} differs from {}", c.problem.id, path.display())),
                    Err(err) => bad.push(format!("{}: {err}", path.display())),
                }
            }
        }
    }
    report.push("golden explanations", bad, format!("{compared} files compared"));

    let mut bad = Vec::new();
    let mut n = 0;
    for c in &cases {
        if c.problem.gold != Some(Label::Contradiction) {
            continue;
        }
        let Some(s) = c.problem.swapped() else { continue };
        n += 1;
        match classify(&s, kb, &config) {
            Ok(r) if r.label == Label::Contradiction => {}
            other => bad.push(format!("{}: {:?}", s.id, other.map(|r| r.label))),
        }
    }
    report.push("contradiction symmetry", bad, format!("{n} swapped problems"));

    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut bad = Vec::new();
    for i in 0..20 {
        let s = gen_sentence(&mut rng);
        let p = NliProblem::new(&format!("id-{i}"), &[&s], &s);
        match classify(&p, kb, &config) {
            Ok(r) if r.label == Label::Entailment => {}
            other => bad.push(format!("{s:?}: {:?}", other.map(|r| r.label))),
        }
    }
    report.push("identity", bad, "20 generated sentences".to_string());

    let problems = generate(DEFAULT_SEED, generated);
    let results = run_corpus(&problems, kb, &config, 0);
    let (checked, bad) = soundness_failures(&problems, &results, kb, DEFAULT_MAX_SIZE);
    report.push("oracle soundness", bad, format!("{checked} non-neutral results checked on {} problems", problems.len()));

    let mut bad = Vec::new();
    let again = run_sequential(&problems, kb, &config);
    let mut again = again;
    again.sort_by(|a, b| a.0.cmp(&b.0));
    if labels_jsonl(&results, &config, false) != labels_jsonl(&again, &config, false) {
        bad.push("labels differ between parallel and sequential runs".to_string());
    }
    for ((id, a), (_, b)) in results.iter().zip(&again) {
        let pa = a.as_ref().ok().and_then(|r| r.proof.as_ref()).map(|p| p.to_json());
        let pb = b.as_ref().ok().and_then(|r| r.proof.as_ref()).map(|p| p.to_json());
        if pa != pb {
            bad.push(format!("{id}: proofs differ"));
        }
    }
    report.push("determinism", bad, "parallel and sequential runs identical".to_string());

    let small = RunConfig {
        budget: Budget { max_entries: 40, ..Budget::default() },
        ..config.clone()
    };
    let mut bad = Vec::new();
    for (p, (_, big)) in problems.iter().zip(&results) {
        let (Ok(s), Ok(b)) = (classify(p, kb, &small), big) else { continue };
        if s.label != Label::Neutral && s.label != b.label && !b.flags.unsatisfiable_premise {
            bad.push(format!("{}: {:?} became {:?}", p.id, s.label, b.label));
        }
    }
    report.push("budget monotonicity", bad, "small vs default budget".to_string());
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_is_reproducible_and_parses() {
        let a = generate(7, 50);
        assert_eq!(a, generate(7, 50));
        assert_ne!(a, generate(8, 50));
        for p in &a {
            p.parse().unwrap_or_else(|e| panic!("{e}"));
        }
    }

    #[test]
    fn golden_labels_hold() {
        let kb = KnowledgeBase::default_kb();
        for c in golden_cases() {
            let r = classify(&c.problem, &kb, &RunConfig::default()).unwrap();
            assert_eq!(Some(r.label), c.problem.gold, "{}", c.problem.id);
        }
    }

    #[test]
    fn corpus_round_trip() {
        let ps = golden_problems();
        assert_eq!(parse_corpus(&write_corpus(&ps)).unwrap(), ps);
        assert!(parse_corpus("{\"id\":1}").is_err());
    }

    #[test]
    fn labels_have_config_header() {
        let kb = KnowledgeBase::default_kb();
        let ps = vec![
            NliProblem::new("a", &["some birds fly"], "some birds fly"),
            NliProblem::new("b", &["some birds fly"], "colorless green ideas"),
        ];
        let r = run_corpus(&ps, &kb, &RunConfig::default(), 2);
        let text = labels_jsonl(&r, &RunConfig::default(), false);
        assert!(text.starts_with("{\"config\""));
        let lines = parse_labels(&text).unwrap();
        assert_eq!(lines[0].label, Some(Label::Entailment));
        assert_eq!(lines[1].error.as_deref(), Some("parse"));
        assert!(!text.contains("millis"));
    }

    #[test]
    fn proof_names_are_safe() {
        assert_eq!(proof_file_name("a/b c"), "a_b_c.proof.json");
    }
}
