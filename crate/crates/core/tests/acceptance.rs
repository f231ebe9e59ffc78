//! The seven acceptance criteria. Runs without the test harness so that the
//! PASS/FAIL line of every criterion is always printed.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use natlog::corpus::{self, golden_cases, soundness_failures, DEFAULT_SEED};
use natlog::eval::{score_one, score_tree};
use natlog::explain::{explain, extract_lexrels, extract_rules, extract_unlabeled, lexrel_key, prune, Format, TreeBranch};
use natlog::lexicon::KnowledgeBase;
use natlog::oracle::DEFAULT_MAX_SIZE;
use natlog::proof::RunConfig;
use natlog::prover::{classify, Label, NliProblem, ProofResult};
use natlog::rules::RuleName;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn(&KnowledgeBase) -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn run(premise: &str, hypothesis: &str, kb: &KnowledgeBase) -> Result<(ProofResult, Duration), String> {
    let p = NliProblem::new("t", &[premise], hypothesis);
    let start = Instant::now();
    let r = classify(&p, kb, &RunConfig::default()).map_err(|e| e.to_string())?;
    Ok((r, start.elapsed()))
}

fn keys(p: &natlog::explain::PrunedProof) -> Vec<String> {
    extract_lexrels(p).iter().map(lexrel_key).collect()
}

fn texts(b: &TreeBranch) -> Vec<String> {
    b.nodes.iter().map(|n| format!("{} : {}", n.text, n.sign)).collect()
}

fn birds_hover(kb: &KnowledgeBase) -> Outcome {
    let (r, took) = run("many birds hover high", "few birds fly", kb)?;
    ensure(r.label == Label::Contradiction, format!("label {:?}", r.label))?;
    let pr = prune(r.proof.as_ref().ok_or("no proof")?).map_err(|e| e.to_string())?;
    ensure(pr.branch_count() == 2, format!("{} branches", pr.branch_count()))?;
    let t = extract_unlabeled(&pr);
    ensure(
        texts(&t) == ["many birds hover high : T", "few birds fly : T"],
        format!("trunk {:?}", texts(&t)),
    )?;
    let mut kids: Vec<Vec<String>> = t.children.iter().map(texts).collect();
    kids.sort();
    let want = vec![
        vec!["c hover high : T", "c fly : F", "c hover : T"],
        vec!["many birds fly : T", "few birds fly : T"],
    ];
    ensure(kids == want, format!("branches {kids:?}"))?;
    ensure(t.children.iter().all(|c| c.closure.is_some()), "unclosed branch")?;
    let lex = keys(&pr);
    ensure(lex == ["few|many", "hover⊑fly"], format!("lexrels {lex:?}"))?;
    let rules = extract_rules(&pr);
    let want = BTreeMap::from([("adj_sub_T".to_string(), 1), ("upDisCov".to_string(), 1)]);
    ensure(rules == want, format!("rules {rules:?}"))?;
    ensure(took < Duration::from_secs(1), format!("took {took:?}"))?;
    Ok(format!("contradiction, 2 branches, lexrels {lex:?}, {took:?}"))
}

fn drugs_treat(kb: &KnowledgeBase) -> Outcome {
    let (r, took) = run(corpus::DRUGS_PREMISE, corpus::DRUGS_HYPOTHESIS, kb)?;
    ensure(r.label == Label::Entailment, format!("label {:?}", r.label))?;
    let proof = r.proof.as_ref().ok_or("no proof")?;
    let pr = prune(proof).map_err(|e| e.to_string())?;
    ensure(pr.branch_count() == 2, format!("{} branches", pr.branch_count()))?;
    for leaf in pr.root.leaves() {
        let rule = leaf.closure.as_ref().map(|c| c.rule);
        ensure(rule == Some(RuleName::FrameAlt), format!("closed by {rule:?}"))?;
    }
    let lex = keys(&pr);
    ensure(
        lex == ["halt⊑treat (active/passive)", "slow down⊑treat (active/passive)"],
        format!("lexrels {lex:?}"),
    )?;
    let unused: Vec<u32> = proof
        .nodes
        .iter()
        .filter(|n| n.text.contains("work best") && n.produced_by.is_some())
        .map(|n| n.id)
        .collect();
    ensure(!unused.is_empty(), "premise body never decomposed")?;
    let kept: Vec<u32> = pr.root.all_nodes().iter().map(|n| n.id).collect();
    ensure(unused.iter().all(|id| !kept.contains(id)), "premise body kept in pruned proof")?;
    ensure(took < Duration::from_secs(1), format!("took {took:?}"))?;
    Ok(format!("entailment, 2 frame_alt branches, lexrels {lex:?}, {took:?}"))
}

fn quantifiers(kb: &KnowledgeBase) -> Outcome {
    let (r, _) = run("Not all birds fly", "Some bird does not fly", kb)?;
    ensure(r.label == Label::Entailment, format!("label {:?}", r.label))?;
    let pr = prune(r.proof.as_ref().ok_or("no proof")?).map_err(|e| e.to_string())?;
    ensure(keys(&pr).is_empty(), format!("lexrels {:?}", keys(&pr)))?;
    let rules = extract_rules(&pr);
    let want = BTreeMap::from([("exists_F".to_string(), 1), ("forall_F".to_string(), 1), ("not".to_string(), 2)]);
    ensure(rules == want, format!("rules {rules:?}"))?;
    Ok(format!("entailment, no lexrels, rules {rules:?}"))
}

fn soundness(kb: &KnowledgeBase) -> Outcome {
    let start = Instant::now();
    let problems = corpus::generate(DEFAULT_SEED, 200);
    let results = corpus::run_corpus(&problems, kb, &RunConfig::default(), 0);
    let (checked, bad) = soundness_failures(&problems, &results, kb, DEFAULT_MAX_SIZE);
    let took = start.elapsed();
    ensure(bad.is_empty(), format!("{} disagreements: {}", bad.len(), bad.join("; ")))?;
    ensure(checked > 0, "no non-neutral output to check")?;
    ensure(took < Duration::from_secs(60), format!("took {took:?}"))?;
    Ok(format!("200 problems, {checked} non-neutral outputs, 0 countermodels, {took:?}"))
}

fn symmetry(kb: &KnowledgeBase) -> Outcome {
    let config = RunConfig::default();
    let mut problems: Vec<NliProblem> = golden_cases().into_iter().map(|c| c.problem).collect();
    problems.extend(corpus::generate(DEFAULT_SEED, 200));
    let mut swapped = 0;
    for p in &problems {
        let Ok(r) = classify(p, kb, &config) else { continue };
        if r.label != Label::Contradiction {
            continue;
        }
        let Some(s) = p.swapped() else { continue };
        let back = classify(&s, kb, &config).map_err(|e| e.to_string())?;
        ensure(back.label == Label::Contradiction, format!("{}: swap is {:?}", p.id, back.label))?;
        swapped += 1;
    }
    ensure(swapped > 0, "no contradictions found")?;
    Ok(format!("{swapped} contradictions, all symmetric"))
}

fn prove_dir(corpus: &Path, out: &Path, jobs: &str) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_natlog"))
        .args(["prove", "--corpus"])
        .arg(corpus)
        .arg("--out")
        .arg(out)
        .args(["--jobs", jobs])
        .env_remove("NATLOG_KB")
        .stderr(Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    ensure(status.code() == Some(0), format!("prove exited with {status}"))
}

fn read_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for sub in ["", "proofs"] {
        let Ok(rd) = fs::read_dir(dir.join(sub)) else { continue };
        for e in rd.flatten() {
            if e.path().is_file() {
                out.insert(format!("{sub}/{}", e.file_name().to_string_lossy()), fs::read(e.path()).unwrap());
            }
        }
    }
    out
}

fn determinism(kb: &KnowledgeBase) -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut problems = corpus::golden_problems();
    problems.extend(corpus::generate(DEFAULT_SEED, 200));
    let budget = RunConfig::default().budget;
    for (id, r) in corpus::run_sequential(&problems, kb, &RunConfig::default()) {
        let r = r.map_err(|e| format!("{id}: {e}"))?;
        ensure(r.entries <= budget.max_entries, format!("{id}: {} entries", r.entries))?;
    }
    let path = tmp.path().join("corpus.jsonl");
    fs::write(&path, corpus::write_corpus(&problems)).map_err(|e| e.to_string())?;
    let runs: Vec<_> = ["1", "1", "4"]
        .iter()
        .enumerate()
        .map(|(i, jobs)| {
            let out = tmp.path().join(format!("run{i}"));
            prove_dir(&path, &out, jobs).map(|_| read_tree(&out))
        })
        .collect::<Result<_, _>>()?;
    ensure(runs[0].len() > 1, "no output files")?;
    ensure(runs[0] == runs[1], "two sequential runs differ")?;
    ensure(runs[0] == runs[2], "parallel run differs from sequential")?;
    Ok(format!("{} problems within budget, {} files byte-identical over 3 runs", problems.len(), runs[0].len()))
}

fn permute(t: &mut TreeBranch) {
    t.children.reverse();
    t.children.iter_mut().for_each(permute);
}

fn metric_sanity(kb: &KnowledgeBase) -> Outcome {
    let mut scored = 0;
    let mut permuted = 0;
    for c in golden_cases() {
        let r = classify(&c.problem, kb, &RunConfig::default()).map_err(|e| e.to_string())?;
        let Some(proof) = r.proof else { continue };
        for f in Format::ALL {
            let e = explain(&proof, f).map_err(|e| e.to_string())?;
            let s = score_one(f, &e, &e).map_err(|e| e.to_string())?;
            ensure(s.prf.f1 == 1.0 && s.exact, format!("{} {f}: {s:?}", c.problem.id))?;
            scored += 1;
            if let Some(tree) = &e.tree {
                if tree.leaf_count() > 1 {
                    let mut p = e.clone();
                    permute(p.tree.as_mut().unwrap());
                    ensure(p.tree != e.tree, "permutation had no effect")?;
                    ensure(score_tree(&e, &p).unwrap_or(false), format!("{} {f}: permuted tree mismatch", c.problem.id))?;
                    permuted += 1;
                }
            }
        }
    }
    Ok(format!("{scored} gold-vs-gold scores perfect, {permuted} permuted trees exact"))
}

fn main() {
    let kb = KnowledgeBase::default_kb();
    let criteria: [Criterion; 7] = [
        ("many birds vs few birds", birds_hover),
        ("drugs treat the disease", drugs_treat),
        ("quantifier example", quantifiers),
        ("soundness against the oracle", soundness),
        ("contradiction symmetry", symmetry),
        ("termination and determinism", determinism),
        ("metric sanity", metric_sanity),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check(&kb) {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(why) => {
                println!("FAIL criterion {}: {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
