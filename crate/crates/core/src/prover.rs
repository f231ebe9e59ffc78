//! Three-way classification by two refutation searches.
//!
//! Entailment is searched first (premises T, hypothesis F), then contradiction
//! (premises T, hypothesis T). Both searches always run so that an
//! inconsistent premise set is reported.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::KnowledgeBase;
use crate::parser::{parse, FragmentSentence, ParseError};
use crate::proof::{Proof, RunConfig, SearchedRelation};
use crate::tableau::{Saturation, Sign, Tableau};

#[derive(Debug, Error)]
pub enum ProverError {
    #[error("problem {problem}: sentence {sentence} ({text:?}): {source}")]
    Parse {
        problem: String,
        sentence: usize,
        text: String,
        source: ParseError,
    },
    #[error("problem {0} has no premises")]
    NoPremises(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Entailment,
    Neutral,
    Contradiction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NliProblem {
    pub id: String,
    pub premises: Vec<String>,
    pub hypothesis: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold: Option<Label>,
}

impl NliProblem {
    pub fn new(id: &str, premises: &[&str], hypothesis: &str) -> Self {
        Self {
            id: id.to_string(),
            premises: premises.iter().map(|s| s.to_string()).collect(),
            hypothesis: hypothesis.to_string(),
            gold: None,
        }
    }

    /// The same problem with premise and hypothesis exchanged (single premise only).
    pub fn swapped(&self) -> Option<NliProblem> {
        let [p] = self.premises.as_slice() else {
            return None;
        };
        Some(NliProblem {
            id: format!("{}-swapped", self.id),
            premises: vec![self.hypothesis.clone()],
            hypothesis: p.clone(),
            gold: self.gold,
        })
    }

    /// Premises as sentences 1..n, the hypothesis last.
    pub fn parse(&self) -> Result<Vec<FragmentSentence>, ProverError> {
        if self.premises.is_empty() {
            return Err(ProverError::NoPremises(self.id.clone()));
        }
        self.premises
            .iter()
            .chain(std::iter::once(&self.hypothesis))
            .enumerate()
            .map(|(i, text)| {
                parse(text, i + 1).map_err(|source| ProverError::Parse {
                    problem: self.id.clone(),
                    sentence: i + 1,
                    text: text.clone(),
                    source,
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Flags {
    pub unsatisfiable_premise: bool,
    pub budget_exhausted: bool,
}

#[derive(Debug, Clone)]
pub struct ProofResult {
    pub label: Label,
    pub proof: Option<Proof>,
    pub flags: Flags,
    /// Entries built over both searches.
    pub entries: usize,
    pub millis: u128,
}

/// Saturate one search and return the tableau with its outcome.
pub fn search(
    sentences: &[FragmentSentence],
    relation: SearchedRelation,
    kb: &KnowledgeBase,
    config: &RunConfig,
) -> (Tableau, Saturation) {
    let (hyp, premises) = sentences.split_last().expect("parsed problems are non-empty");
    let mut roots: Vec<(&FragmentSentence, Sign)> = premises.iter().map(|p| (p, Sign::T)).collect();
    roots.push((hyp, relation.hypothesis_sign()));
    let mut t = Tableau::new(&roots).expect("roots are non-empty");
    let r = t.saturate(kb, &config.budget);
    (t, r)
}

pub fn classify(p: &NliProblem, kb: &KnowledgeBase, config: &RunConfig) -> Result<ProofResult, ProverError> {
    let start = Instant::now();
    let sentences = p.parse()?;
    let (te, re) = search(&sentences, SearchedRelation::Entailment, kb, config);
    let (tc, rc) = search(&sentences, SearchedRelation::Contradiction, kb, config);
    let entries = te.entries().len() + tc.entries().len();
    let flags = Flags {
        unsatisfiable_premise: re == Saturation::Closed && rc == Saturation::Closed,
        budget_exhausted: re == Saturation::BudgetExhausted || rc == Saturation::BudgetExhausted,
    };
    let (label, proof) = if re == Saturation::Closed {
        let proof = Proof::from_tableau(&p.id, SearchedRelation::Entailment, &te, config);
        (Label::Entailment, Some(proof))
    } else if rc == Saturation::Closed {
        let proof = Proof::from_tableau(&p.id, SearchedRelation::Contradiction, &tc, config);
        (Label::Contradiction, Some(proof))
    } else {
        (Label::Neutral, None)
    };
    Ok(ProofResult {
        label,
        proof,
        flags,
        entries,
        millis: start.elapsed().as_millis(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn label(p: &str, h: &str) -> Label {
        let kb = KnowledgeBase::default_kb();
        classify(&NliProblem::new("t", &[p], h), &kb, &RunConfig::default())
            .unwrap()
            .label
    }

    #[test]
    fn worked_examples() {
        assert_eq!(label("many birds hover high", "few birds fly"), Label::Contradiction);
        assert_eq!(label("few birds fly", "many birds hover high"), Label::Contradiction);
        assert_eq!(
            label(
                "Drugs that slow down or halt Alzheimer's disease work best the earlier you administer them",
                "Alzheimer's disease is treated using drugs"
            ),
            Label::Entailment
        );
        assert_eq!(label("Not all birds fly", "Some bird does not fly"), Label::Entailment);
    }

    #[test]
    fn neutral_and_identity() {
        assert_eq!(label("some birds fly", "all birds fly"), Label::Neutral);
        assert_eq!(label("every dog barks", "every dog barks"), Label::Entailment);
    }

    #[test]
    fn parse_errors_name_the_sentence() {
        let kb = KnowledgeBase::default_kb();
        let err = classify(&NliProblem::new("x", &["some birds fly"], "colorless ideas"), &kb, &RunConfig::default())
            .unwrap_err();
        assert!(matches!(err, ProverError::Parse { sentence: 2, .. }));
    }

    #[test]
    fn inconsistent_premises_are_flagged() {
        let kb = KnowledgeBase::default_kb();
        let p = NliProblem::new("u", &["some birds fly", "no birds fly"], "every dog barks");
        let r = classify(&p, &kb, &RunConfig::default()).unwrap();
        assert_eq!(r.label, Label::Entailment);
        assert!(r.flags.unsatisfiable_premise);
    }

    #[test]
    fn proofs_replay() {
        let kb = KnowledgeBase::default_kb();
        let p = NliProblem::new("f2", &["many birds hover high"], "few birds fly");
        let r = classify(&p, &kb, &RunConfig::default()).unwrap();
        let proof = r.proof.unwrap();
        assert!(proof.is_closed());
        let again = crate::proof::Proof::from_json(&proof.to_json()).unwrap();
        assert_eq!(again, proof);
        proof.replay(&kb).unwrap();
    }
}
