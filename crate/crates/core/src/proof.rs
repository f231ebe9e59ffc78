//! Serializable proofs: the on-disk form of a closed tableau.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::KnowledgeBase;
use crate::parser::{parse, FragmentSentence, ParseError};
use crate::rules::RuleName;
use crate::tableau::{Budget, NodeId, RuleApplication, Sign, Tableau, TableauError, UsedRelation};
use crate::terms::{Spine, SurfaceExpr, Term};

#[derive(Debug, Error)]
pub enum ProofError {
    #[error("proof file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("proof text does not parse: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error("replayed tableau differs from the recorded proof at node {0}")]
    Mismatch(NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchedRelation {
    Entailment,
    Contradiction,
}

impl SearchedRelation {
    /// Sign of the hypothesis root in the refutation search.
    pub fn hypothesis_sign(self) -> Sign {
        match self {
            SearchedRelation::Entailment => Sign::F,
            SearchedRelation::Contradiction => Sign::T,
        }
    }
}

/// Settings echoed into every output file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub budget: Budget,
    pub kb: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            budget: Budget::default(),
            kb: "builtin".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProducedBy {
    pub rule: RuleName,
    pub antecedents: Vec<NodeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProofNode {
    pub id: NodeId,
    pub formula: String,
    /// Machine form, e.g. `S2[0:36]␣d`.
    pub surface: String,
    pub pieces: SurfaceExpr,
    /// Human form, e.g. `Alzheimer's disease is treated using d`.
    pub text: String,
    pub sign: Sign,
    pub segment: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub produced_by: Option<ProducedBy>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub structural: bool,
    pub head: Term,
    pub args: Vec<Term>,
}

impl ProofNode {
    pub fn spine(&self) -> Spine {
        Spine::new(self.head.clone(), self.args.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofSegment {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub nodes: Vec<NodeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub application: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofClosure {
    pub id: NodeId,
    pub rule: RuleName,
    pub antecedents: Vec<NodeId>,
    /// Leaf segment of the closed branch.
    pub branch: usize,
    pub relations: Vec<UsedRelation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Proof {
    pub problem_id: String,
    pub searched_relation: SearchedRelation,
    /// Premises first, hypothesis last; root `k` comes from sentence `k`.
    pub texts: Vec<String>,
    pub nodes: Vec<ProofNode>,
    pub segments: Vec<ProofSegment>,
    pub applications: Vec<RuleApplication>,
    pub closures: Vec<ProofClosure>,
    pub config: RunConfig,
}

impl Proof {
    pub fn from_tableau(
        problem_id: &str,
        relation: SearchedRelation,
        t: &Tableau,
        config: &RunConfig,
    ) -> Proof {
        let apps = t.applications();
        let nodes = t
            .entries()
            .iter()
            .map(|e| {
                let produced_by = e.produced_by.map(|a| {
                    let app = &apps[a];
                    let antecedents = if app.rule == RuleName::ArgPush {
                        // one output per antecedent, in order
                        let seg = &t.segments()[e.segment];
                        let k = seg.entries.iter().position(|id| *id == e.id).unwrap();
                        vec![app.antecedents[k]]
                    } else {
                        app.antecedents.clone()
                    };
                    ProducedBy {
                        rule: app.rule,
                        antecedents,
                        witness: app.witness.clone(),
                        position: app.position,
                    }
                });
                ProofNode {
                    id: e.id,
                    formula: e.formula(),
                    surface: e.surface.to_string(),
                    pieces: e.surface.clone(),
                    text: e.text.clone(),
                    sign: e.sign,
                    segment: e.segment,
                    produced_by,
                    structural: e.structural,
                    head: e.spine.head.clone(),
                    args: e.spine.args.clone(),
                }
            })
            .collect();
        let segments = t
            .segments()
            .iter()
            .map(|s| ProofSegment {
                id: s.id,
                parent: s.parent,
                children: s.children.clone(),
                nodes: s.entries.clone(),
                application: s.application,
            })
            .collect();
        let closures = t
            .leaves()
            .into_iter()
            .filter_map(|(leaf, c)| {
                c.map(|c| ProofClosure {
                    id: c.id,
                    rule: c.rule,
                    antecedents: c.antecedents.clone(),
                    branch: leaf,
                    relations: c.relations.clone(),
                })
            })
            .collect();
        Proof {
            problem_id: problem_id.to_string(),
            searched_relation: relation,
            texts: t.texts().to_vec(),
            nodes,
            segments,
            applications: apps.to_vec(),
            closures,
            config: config.clone(),
        }
    }

    pub fn node(&self, id: NodeId) -> Option<&ProofNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Leaf segments in tree order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![0];
        while let Some(s) = stack.pop() {
            let seg = &self.segments[s];
            if seg.children.is_empty() {
                out.push(s);
            }
            stack.extend(seg.children.iter().rev());
        }
        out
    }

    pub fn is_closed(&self) -> bool {
        let leaves = self.leaves();
        leaves.iter().all(|l| self.closures.iter().any(|c| c.branch == *l))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("proofs serialize")
    }

    pub fn from_json(s: &str) -> Result<Proof, ProofError> {
        Ok(serde_json::from_str(s)?)
    }

    /// Root sentences re-parsed from the stored texts, with their signs.
    pub fn root_sentences(&self) -> Result<Vec<(FragmentSentence, Sign)>, ProofError> {
        let roots: Vec<&ProofNode> = self.nodes.iter().filter(|n| n.produced_by.is_none()).collect();
        self.texts
            .iter()
            .zip(roots)
            .enumerate()
            .map(|(i, (text, node))| Ok((parse(text, i + 1)?, node.sign)))
            .collect()
    }

    /// Re-run the recorded rule log and check it rebuilds this proof node for node.
    pub fn replay(&self, kb: &KnowledgeBase) -> Result<(), ProofError> {
        let roots = self.root_sentences()?;
        let refs: Vec<(&FragmentSentence, Sign)> = roots.iter().map(|(s, g)| (s, *g)).collect();
        let t = Tableau::replay(&refs, kb, &self.applications)?;
        let again = Proof::from_tableau(&self.problem_id, self.searched_relation, &t, &self.config);
        for (a, b) in self.nodes.iter().zip(&again.nodes) {
            if a != b {
                return Err(ProofError::Mismatch(a.id));
            }
        }
        if self.nodes.len() != again.nodes.len() {
            let id = self.nodes.len().min(again.nodes.len()) as NodeId + 1;
            return Err(ProofError::Mismatch(id));
        }
        if self.closures != again.closures {
            let id = self.closures.first().map_or(0, |c| c.id);
            return Err(ProofError::Mismatch(id));
        }
        Ok(())
    }
}
