use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use natlog::corpus::{self, labels_jsonl, parse_labels, proof_file_name, read_corpus};
use natlog::eval::{read_explanations, score_corpus};
use natlog::explain::{explain, explain_full_checked, Explanation, Format};
use natlog::lexicon::KnowledgeBase;
use natlog::oracle::{check_problem, OracleVerdict, DEFAULT_MAX_SIZE};
use natlog::proof::{Proof, RunConfig, SearchedRelation};
use natlog::prover::Label;
use natlog::tableau::Budget;

const EXIT_CORPUS: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "natlog", version, about = "Natural-logic tableau prover for NLI")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Label every problem of a JSONL corpus and write proofs.
    Prove {
        #[arg(long)]
        corpus: PathBuf,
        /// Knowledge base TSV; the built-in one when absent.
        #[arg(long, env = "NATLOG_KB")]
        kb: Option<PathBuf>,
        #[arg(long)]
        budget_entries: Option<usize>,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        out: PathBuf,
        /// Record wall-clock milliseconds in the labels (breaks byte-identity).
        #[arg(long)]
        timing: bool,
    },
    /// Extract an explanation from a proof file.
    Explain {
        #[arg(long)]
        proof: PathBuf,
        #[arg(long)]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "NATLOG_KB")]
        kb: Option<PathBuf>,
    },
    /// Score system explanations against gold ones.
    Evaluate {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        sys: PathBuf,
        #[arg(long)]
        format: String,
        #[arg(long)]
        json: bool,
    },
    /// Look for finite countermodels to every non-neutral label.
    OracleCheck {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_SIZE)]
        max_size: usize,
        #[arg(long, env = "NATLOG_KB")]
        kb: Option<PathBuf>,
    },
    /// Write a corpus: the golden cases, or seeded generated problems.
    Generate {
        #[arg(long)]
        golden: bool,
        #[arg(long, default_value_t = corpus::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the golden cases and the generated property suites.
    Regress {
        #[arg(long)]
        golden_dir: Option<PathBuf>,
        /// Rewrite the golden explanation files instead of comparing.
        #[arg(long)]
        bless: bool,
        #[arg(long, default_value_t = 200)]
        generated: usize,
        #[arg(long, env = "NATLOG_KB")]
        kb: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CORPUS)
        }
    }
}

fn load_kb(path: Option<&Path>) -> Result<(KnowledgeBase, String)> {
    match path {
        Some(p) => {
            let kb = KnowledgeBase::load(p).with_context(|| format!("knowledge base {}", p.display()))?;
            Ok((kb, p.display().to_string()))
        }
        None => Ok((KnowledgeBase::default_kb(), "builtin".to_string())),
    }
}

fn parse_format(s: &str) -> Option<Format> {
    match s.parse() {
        Ok(f) => Some(f),
        Err(_) => {
            eprintln!("error: unknown format `{s}` (expected lexrel, rules, unlabeled or full)");
            None
        }
    }
}

fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Prove {
            corpus,
            kb,
            budget_entries,
            jobs,
            out,
            timing,
        } => {
            let problems = match read_corpus(&corpus) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(EXIT_CORPUS);
                }
            };
            let (kb, kb_name) = load_kb(kb.as_deref())?;
            let mut budget = Budget::default();
            if let Some(n) = budget_entries {
                anyhow::ensure!(n >= 1, "--budget-entries must be at least 1");
                budget.max_entries = n;
            }
            let config = RunConfig { budget, kb: kb_name };
            let results = corpus::run_corpus(&problems, &kb, &config, jobs);

            let proofs_dir = out.join("proofs");
            fs::create_dir_all(&proofs_dir).with_context(|| format!("creating {}", proofs_dir.display()))?;
            fs::write(out.join("labels.jsonl"), labels_jsonl(&results, &config, timing))?;
            let mut parse_errors = 0;
            for (id, o) in &results {
                match o {
                    Ok(r) => {
                        if let Some(p) = &r.proof {
                            fs::write(proofs_dir.join(proof_file_name(id)), p.to_json() + "\n")?;
                        }
                    }
                    Err(e) => {
                        parse_errors += 1;
                        eprintln!("{id}: {e}");
                    }
                }
            }
            eprintln!("{} problems, {parse_errors} parse errors", results.len());
            Ok(if parse_errors > 0 { EXIT_PARSE } else { 0 })
        }
        Command::Explain { proof, format, out, kb } => {
            let Some(format) = parse_format(&format) else {
                return Ok(EXIT_USAGE);
            };
            let text = fs::read_to_string(&proof).with_context(|| format!("reading {}", proof.display()))?;
            let proof = Proof::from_json(&text)?;
            let e = if format == Format::Full {
                let (kb, _) = load_kb(kb.as_deref())?;
                explain_full_checked(&proof, &kb)?
            } else {
                explain(&proof, format)?
            };
            write_or_print(out.as_deref(), &(e.to_json() + "\n"))?;
            Ok(0)
        }
        Command::Evaluate { gold, sys, format, json } => {
            let Some(format) = parse_format(&format) else {
                return Ok(EXIT_USAGE);
            };
            let gold = load_explanations(&gold, format)?;
            let sys = load_explanations(&sys, format)?;
            let report = score_corpus(format, &gold, &sys)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{}", report.table());
            }
            Ok(0)
        }
        Command::OracleCheck {
            corpus,
            labels,
            max_size,
            kb,
        } => {
            let problems = match read_corpus(&corpus) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(EXIT_CORPUS);
                }
            };
            let (kb, _) = load_kb(kb.as_deref())?;
            let text = fs::read_to_string(&labels).with_context(|| format!("reading {}", labels.display()))?;
            let labels = parse_labels(&text)?;
            let (mut checked, mut abstained, mut disagreements) = (0, 0, 0);
            for line in &labels {
                let relation = match line.label {
                    Some(Label::Entailment) => SearchedRelation::Entailment,
                    Some(Label::Contradiction) => SearchedRelation::Contradiction,
                    _ => continue,
                };
                let Some(p) = problems.iter().find(|p| p.id == line.id) else {
                    eprintln!("{}: not in corpus", line.id);
                    continue;
                };
                match check_problem(p, relation, &kb, max_size) {
                    OracleVerdict::NoCountermodel => checked += 1,
                    OracleVerdict::Abstain { reason } => {
                        abstained += 1;
                        println!("{}: abstain ({reason})", line.id);
                    }
                    OracleVerdict::Countermodel { model } => {
                        disagreements += 1;
                        println!("{}: countermodel to {relation:?}: {model}", line.id);
                    }
                }
            }
            println!("checked {checked}, abstained {abstained}, disagreements {disagreements}");
            Ok(if disagreements > 0 { 1 } else { 0 })
        }
        Command::Generate { golden, seed, count, out } => {
            let problems = if golden {
                corpus::golden_problems()
            } else {
                corpus::generate(seed, count)
            };
            write_or_print(out.as_deref(), &corpus::write_corpus(&problems))?;
            Ok(0)
        }
        Command::Regress {
            golden_dir,
            bless,
            generated,
            kb,
        } => {
            let (kb, _) = load_kb(kb.as_deref())?;
            if bless {
                let dir = golden_dir.context("--bless needs --golden-dir")?;
                bless_golden(&dir, &kb)?;
                eprintln!("wrote golden explanations to {}", dir.display());
                return Ok(0);
            }
            let report = corpus::run_regressions(&kb, golden_dir.as_deref(), generated);
            for c in &report.checks {
                println!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
            }
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// A file of explanations, or every `*.<format>.json` file of a directory.
fn load_explanations(path: &Path, format: Format) -> Result<Vec<Explanation>> {
    let mut files = Vec::new();
    if path.is_dir() {
        let suffix = format!(".{format}.json");
        for entry in fs::read_dir(path)? {
            let p = entry?.path();
            if p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.ends_with(&suffix)) {
                files.push(p);
            }
        }
        files.sort();
    } else {
        files.push(path.to_path_buf());
    }
    let mut out = Vec::new();
    for f in files {
        let text = fs::read_to_string(&f).with_context(|| format!("reading {}", f.display()))?;
        out.extend(read_explanations(&text).with_context(|| f.display().to_string())?);
    }
    Ok(out)
}

fn bless_golden(dir: &Path, kb: &KnowledgeBase) -> Result<()> {
    fs::create_dir_all(dir)?;
    let config = RunConfig::default();
    for c in corpus::golden_cases() {
        let r = natlog::prover::classify(&c.problem, kb, &config)?;
        let Some(proof) = r.proof else { continue };
        for f in Format::ALL {
            let e = explain(&proof, f)?;
            fs::write(dir.join(format!("{}.{f}.json", c.problem.id)), e.to_json() + "\n")?;
        }
    }
    Ok(())
}
