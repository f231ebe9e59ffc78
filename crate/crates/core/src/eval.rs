//! Scoring system explanations against gold ones.
//!
//! Lexical relations get precision, recall and F1 over relation keys. Rule
//! multisets and trees are scored by exact match only.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::explain::{lexrel_key, Explanation, Format};
use crate::tableau::UsedRelation;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("gold is for problem {gold}, system output for {sys}")]
    ProblemMismatch { gold: String, sys: String },
    #[error("cannot compare a {gold} explanation with a {sys} one")]
    FormatMismatch { gold: Format, sys: Format },
    #[error("{0} explanation for {1} has no tree")]
    MissingTree(Format, String),
    #[error("explanation file: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    fn binary(ok: bool) -> Prf {
        let v = if ok { 1.0 } else { 0.0 };
        Prf { precision: v, recall: v, f1: v }
    }
}

/// Set-level P/R/F1. Empty gold gives recall 1, empty system output precision 1;
/// both empty is a perfect score.
pub fn lexrel_prf(gold: &[UsedRelation], sys: &[UsedRelation]) -> Prf {
    let g: BTreeSet<String> = gold.iter().map(lexrel_key).collect();
    let s: BTreeSet<String> = sys.iter().map(lexrel_key).collect();
    let hit = g.intersection(&s).count() as f64;
    let precision = if s.is_empty() { 1.0 } else { hit / s.len() as f64 };
    let recall = if g.is_empty() { 1.0 } else { hit / g.len() as f64 };
    let f1 = if g.is_empty() && s.is_empty() {
        1.0
    } else if precision + recall == 0.0 || (g.is_empty() != s.is_empty()) {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Prf { precision, recall, f1 }
}

fn same_problem(gold: &Explanation, sys: &Explanation) -> Result<(), EvalError> {
    if gold.problem_id != sys.problem_id {
        return Err(EvalError::ProblemMismatch {
            gold: gold.problem_id.clone(),
            sys: sys.problem_id.clone(),
        });
    }
    Ok(())
}

pub fn score_lexrels(gold: &Explanation, sys: &Explanation) -> Result<Prf, EvalError> {
    same_problem(gold, sys)?;
    let empty = Vec::new();
    Ok(lexrel_prf(
        gold.lexrels.as_ref().unwrap_or(&empty),
        sys.lexrels.as_ref().unwrap_or(&empty),
    ))
}

/// Exact equality of the rule multisets and of the relation sets.
pub fn score_rules(gold: &Explanation, sys: &Explanation) -> Result<bool, EvalError> {
    same_problem(gold, sys)?;
    let empty = BTreeMap::new();
    let rules_equal = gold.rules.as_ref().unwrap_or(&empty) == sys.rules.as_ref().unwrap_or(&empty);
    Ok(rules_equal && score_lexrels(gold, sys)?.f1 == 1.0)
}

/// Exact tree match after canonical branch ordering.
pub fn score_tree(gold: &Explanation, sys: &Explanation) -> Result<bool, EvalError> {
    same_problem(gold, sys)?;
    if gold.format != sys.format {
        return Err(EvalError::FormatMismatch {
            gold: gold.format,
            sys: sys.format,
        });
    }
    let tree = |e: &Explanation| {
        e.tree
            .as_ref()
            .map(|t| t.canonical())
            .ok_or_else(|| EvalError::MissingTree(e.format, e.problem_id.clone()))
    };
    Ok(tree(gold)? == tree(sys)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProblemScore {
    pub problem_id: String,
    #[serde(flatten)]
    pub prf: Prf,
    pub exact: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScoreReport {
    pub format: Format,
    pub problems: Vec<ProblemScore>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub exact_match: f64,
}

/// Score one system explanation against gold in the given format.
pub fn score_one(format: Format, gold: &Explanation, sys: &Explanation) -> Result<ProblemScore, EvalError> {
    let (prf, exact) = match format {
        Format::Lexrel => {
            let prf = score_lexrels(gold, sys)?;
            (prf, prf.f1 == 1.0 && prf.precision == 1.0)
        }
        Format::Rules => (score_lexrels(gold, sys)?, score_rules(gold, sys)?),
        Format::Unlabeled | Format::Full => {
            let ok = score_tree(gold, sys)?;
            (Prf::binary(ok), ok)
        }
    };
    Ok(ProblemScore {
        problem_id: gold.problem_id.clone(),
        prf,
        exact,
        note: None,
    })
}

/// Corpus scoring keyed by problem id. Gold problems without a system
/// explanation score zero.
pub fn score_corpus(format: Format, gold: &[Explanation], sys: &[Explanation]) -> Result<ScoreReport, EvalError> {
    let by_id: BTreeMap<&str, &Explanation> = sys.iter().map(|e| (e.problem_id.as_str(), e)).collect();
    let mut gold_sorted: Vec<&Explanation> = gold.iter().collect();
    gold_sorted.sort_by(|a, b| a.problem_id.cmp(&b.problem_id));
    let mut problems = Vec::new();
    for g in gold_sorted {
        let score = match by_id.get(g.problem_id.as_str()) {
            Some(s) => score_one(format, g, s)?,
            None => ProblemScore {
                problem_id: g.problem_id.clone(),
                prf: Prf::binary(false),
                exact: false,
                note: Some("no system explanation".to_string()),
            },
        };
        problems.push(score);
    }
    let n = problems.len().max(1) as f64;
    let mean = |f: &dyn Fn(&ProblemScore) -> f64| {
        if problems.is_empty() {
            1.0
        } else {
            problems.iter().map(f).sum::<f64>() / n
        }
    };
    Ok(ScoreReport {
        format,
        macro_precision: mean(&|p| p.prf.precision),
        macro_recall: mean(&|p| p.prf.recall),
        macro_f1: mean(&|p| p.prf.f1),
        exact_match: mean(&|p| if p.exact { 1.0 } else { 0.0 }),
        problems,
    })
}

impl ScoreReport {
    pub fn table(&self) -> String {
        let mut out = String::new();
        let width = self.problems.iter().map(|p| p.problem_id.len()).max().unwrap_or(7).max(7);
        let _ = writeln!(out, "format: {}", self.format);
        let _ = writeln!(out, "{:<width$}  {:>9}  {:>6}  {:>6}  exact", "problem", "precision", "recall", "f1");
        for p in &self.problems {
            let _ = writeln!(
                out,
                "{:<width$}  {:>9.3}  {:>6.3}  {:>6.3}  {}",
                p.problem_id,
                p.prf.precision,
                p.prf.recall,
                p.prf.f1,
                if p.exact { "yes" } else { "no" }
            );
        }
        let _ = writeln!(
            out,
            "{:<width$}  {:>9.3}  {:>6.3}  {:>6.3}  {:.3}",
            "macro", self.macro_precision, self.macro_recall, self.macro_f1, self.exact_match
        );
        out
    }
}

/// Read explanations from a single JSON object, a JSON array or JSON lines.
pub fn read_explanations(text: &str) -> Result<Vec<Explanation>, EvalError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        return Ok(serde_json::from_str(text)?);
    }
    if let Ok(one) = serde_json::from_str::<Explanation>(text) {
        return Ok(vec![one]);
    }
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Ok(serde_json::from_str(l)?))
        .collect()
}
