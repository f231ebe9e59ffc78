//! Structured explanations derived from closed proofs.
//!
//! Pruning keeps closure antecedents and everything they were derived from,
//! drops a» intermediates (pointing their users at the pre-push entry) and
//! removes branching steps that no closure below them depends on.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{KnowledgeBase, RelKind};
use crate::parser::parse;
use crate::proof::{ProducedBy, Proof, ProofClosure, ProofNode, SearchedRelation};
use crate::rules::{apply_named, EntryRef, RuleName, SurfaceSource};
use crate::tableau::{close_pair, NodeId, Sign, UsedRelation};
use crate::terms::{canonical_form, render_surface, surface_of, Spine, SurfaceExpr, Term};

#[derive(Debug, Error)]
pub enum ExplainError {
    #[error("proof {0} is not closed: neutral problems carry no explanation")]
    Open(String),
    #[error("unknown explanation format {0:?} (expected lexrel, rules, unlabeled or full)")]
    UnknownFormat(String),
    #[error("{0} explanation lacks its {1}")]
    Missing(Format, &'static str),
    #[error("replay failed at node {0}: {1}")]
    Replay(NodeId, String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Lexrel,
    Rules,
    Unlabeled,
    Full,
}

impl Format {
    pub const ALL: [Format; 4] = [Format::Lexrel, Format::Rules, Format::Unlabeled, Format::Full];

    pub fn id(self) -> &'static str {
        match self {
            Format::Lexrel => "lexrel",
            Format::Rules => "rules",
            Format::Unlabeled => "unlabeled",
            Format::Full => "full",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Format {
    type Err = ExplainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Format::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| ExplainError::UnknownFormat(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrunedNode {
    pub id: NodeId,
    pub surface: String,
    pub text: String,
    pub sign: Sign,
    /// Antecedents point past a» intermediates.
    pub produced_by: Option<ProducedBy>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrunedBranch {
    pub nodes: Vec<PrunedNode>,
    pub children: Vec<PrunedBranch>,
    pub closure: Option<ProofClosure>,
}

impl PrunedBranch {
    pub fn leaves(&self) -> Vec<&PrunedBranch> {
        if self.children.is_empty() {
            return vec![self];
        }
        self.children.iter().flat_map(|c| c.leaves()).collect()
    }

    pub fn all_nodes(&self) -> Vec<&PrunedNode> {
        let mut out: Vec<&PrunedNode> = self.nodes.iter().collect();
        for c in &self.children {
            out.extend(c.all_nodes());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrunedProof {
    pub problem_id: String,
    pub searched_relation: SearchedRelation,
    pub texts: Vec<String>,
    pub root: PrunedBranch,
    /// Semantic rule applications with at least one surviving entry.
    pub rules: BTreeMap<RuleName, usize>,
}

impl PrunedProof {
    pub fn branch_count(&self) -> usize {
        self.root.leaves().len()
    }
}

struct Shape {
    segs: Vec<usize>,
    children: Vec<Shape>,
    leaf: Option<usize>,
}

impl Shape {
    fn leaves(&self) -> Vec<usize> {
        match self.leaf {
            Some(l) => vec![l],
            None => self.children.iter().flat_map(|c| c.leaves()).collect(),
        }
    }
}

struct Pruner<'a> {
    proof: &'a Proof,
    nodes: HashMap<NodeId, &'a ProofNode>,
    closures: HashMap<usize, &'a ProofClosure>,
}

impl<'a> Pruner<'a> {
    fn resolve(&self, mut id: NodeId) -> NodeId {
        while let Some(pb) = self.nodes.get(&id).and_then(|n| n.produced_by.as_ref()) {
            if pb.rule != RuleName::ArgPush {
                break;
            }
            id = pb.antecedents[0];
        }
        id
    }

    fn support(&self, leaf: usize) -> BTreeSet<NodeId> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<NodeId> = self.closures[&leaf]
            .antecedents
            .iter()
            .map(|a| self.resolve(*a))
            .collect();
        while let Some(id) = stack.pop() {
            if !out.insert(id) {
                continue;
            }
            if let Some(pb) = &self.nodes[&id].produced_by {
                stack.extend(pb.antecedents.iter().map(|a| self.resolve(*a)));
            }
        }
        out
    }

    fn build(&self, seg: usize) -> Shape {
        let mut segs = vec![seg];
        let mut cur = seg;
        loop {
            let children = &self.proof.segments[cur].children;
            match children.len() {
                0 => {
                    return Shape {
                        segs,
                        children: Vec::new(),
                        leaf: Some(cur),
                    }
                }
                1 => {
                    cur = children[0];
                    segs.push(cur);
                }
                _ => {
                    let kids: Vec<Shape> = children.iter().map(|c| self.build(*c)).collect();
                    let used = kids.iter().zip(children).any(|(k, c)| {
                        let produced = &self.proof.segments[*c].nodes;
                        k.leaves()
                            .into_iter()
                            .any(|l| produced.iter().any(|n| self.support(l).contains(n)))
                    });
                    if used {
                        return Shape {
                            segs,
                            children: kids,
                            leaf: None,
                        };
                    }
                    // no closure below depends on the split: keep the leftmost case only
                    let first = kids.into_iter().next().expect("split has children");
                    segs.extend(first.segs);
                    return Shape {
                        segs,
                        children: first.children,
                        leaf: first.leaf,
                    };
                }
            }
        }
    }

    fn emit(&self, shape: &Shape, kept: &BTreeSet<NodeId>) -> PrunedBranch {
        let nodes = shape
            .segs
            .iter()
            .flat_map(|s| self.proof.segments[*s].nodes.iter())
            .filter(|id| kept.contains(id))
            .map(|id| {
                let n = self.nodes[id];
                PrunedNode {
                    id: n.id,
                    surface: n.surface.clone(),
                    text: n.text.clone(),
                    sign: n.sign,
                    produced_by: n.produced_by.as_ref().map(|pb| ProducedBy {
                        antecedents: pb.antecedents.iter().map(|a| self.resolve(*a)).collect(),
                        ..pb.clone()
                    }),
                }
            })
            .collect();
        let closure = shape.leaf.map(|l| {
            let c = self.closures[&l];
            let mut antecedents: Vec<NodeId> = c.antecedents.iter().map(|a| self.resolve(*a)).collect();
            antecedents.sort_unstable();
            ProofClosure {
                antecedents,
                ..c.clone()
            }
        });
        PrunedBranch {
            nodes,
            children: shape.children.iter().map(|c| self.emit(c, kept)).collect(),
            closure,
        }
    }
}

/// Drop a» intermediates and entries no closure depends on.
pub fn prune(proof: &Proof) -> Result<PrunedProof, ExplainError> {
    if !proof.is_closed() {
        return Err(ExplainError::Open(proof.problem_id.clone()));
    }
    let p = Pruner {
        proof,
        nodes: proof.nodes.iter().map(|n| (n.id, n)).collect(),
        closures: proof.closures.iter().map(|c| (c.branch, c)).collect(),
    };
    let shape = p.build(0);
    let mut kept = BTreeSet::new();
    for l in shape.leaves() {
        kept.extend(p.support(l));
    }
    let mut apps = BTreeSet::new();
    for id in &kept {
        let n = p.nodes[id];
        if n.produced_by.is_some() {
            if let Some(a) = proof.segments[n.segment].application {
                apps.insert(a);
            }
        }
    }
    let mut rules = BTreeMap::new();
    for a in apps {
        let rule = proof.applications[a].rule;
        if !rule.is_structural() && !rule.is_closure() {
            *rules.entry(rule).or_insert(0) += 1;
        }
    }
    Ok(PrunedProof {
        problem_id: proof.problem_id.clone(),
        searched_relation: proof.searched_relation,
        texts: proof.texts.clone(),
        root: p.emit(&shape, &kept),
        rules,
    })
}

/// Alternation is symmetric: store it with the sides in lexicographic order.
pub fn canonical_lexrel(r: &UsedRelation) -> UsedRelation {
    let mut r = r.clone();
    if r.relation.rel == RelKind::Alt && r.relation.lhs > r.relation.rhs {
        std::mem::swap(&mut r.relation.lhs, &mut r.relation.rhs);
        std::mem::swap(&mut r.lhs_text, &mut r.rhs_text);
        r.relation.voices = r.relation.voices.map(|(a, b)| (b, a));
    }
    r
}

/// Matching key of a relation: lemma phrases, relation type and voices.
pub fn lexrel_key(r: &UsedRelation) -> String {
    let r = canonical_lexrel(r);
    r.relation.to_string()
}

/// Relations consulted by the closures of the pruned proof, deduplicated.
pub fn extract_lexrels(p: &PrunedProof) -> Vec<UsedRelation> {
    let mut seen = BTreeMap::new();
    for leaf in p.root.leaves() {
        if let Some(c) = &leaf.closure {
            for r in &c.relations {
                seen.entry(lexrel_key(r)).or_insert_with(|| canonical_lexrel(r));
            }
        }
    }
    seen.into_values().collect()
}

pub fn extract_rules(p: &PrunedProof) -> BTreeMap<String, usize> {
    p.rules.iter().map(|(r, n)| (r.id().to_string(), *n)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<NodeId>,
    pub surface: String,
    pub text: String,
    pub sign: Sign,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub antecedents: Option<Vec<NodeId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeClosure {
    pub mark: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub antecedents: Option<Vec<NodeId>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<UsedRelation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeBranch {
    pub nodes: Vec<TreeNode>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<TreeBranch>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure: Option<TreeClosure>,
}

impl TreeBranch {
    /// Children sorted by their serialized content, recursively.
    pub fn canonical(&self) -> TreeBranch {
        let mut children: Vec<TreeBranch> = self.children.iter().map(TreeBranch::canonical).collect();
        children.sort_by_cached_key(|c| serde_json::to_string(c).expect("trees serialize"));
        TreeBranch {
            nodes: self.nodes.clone(),
            children,
            closure: self.closure.clone(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        if self.children.is_empty() {
            1
        } else {
            self.children.iter().map(TreeBranch::leaf_count).sum()
        }
    }

    /// Human-readable rendering with indentation per branching level.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out
    }

    fn render_into(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        for n in &self.nodes {
            let label = match (&n.id, &n.rule, &n.antecedents) {
                (Some(id), Some(r), Some(a)) => {
                    let a: Vec<String> = a.iter().map(|x| x.to_string()).collect();
                    format!("{id} [{} {}] ", r.symbol(), a.join(","))
                }
                (Some(id), _, _) => format!("{id} "),
                _ => String::new(),
            };
            out.push_str(&format!("{pad}{label}{} : {}\n", n.text, n.sign));
        }
        for c in &self.children {
            c.render_into(out, depth + 1);
        }
        if let Some(c) = &self.closure {
            let rule = c.rule.map(|r| format!(" {}", r.symbol())).unwrap_or_default();
            out.push_str(&format!("{pad}{}{rule}\n", c.mark));
        }
    }
}

fn tree_of(b: &PrunedBranch, labelled: bool) -> TreeBranch {
    TreeBranch {
        nodes: b
            .nodes
            .iter()
            .map(|n| TreeNode {
                id: labelled.then_some(n.id),
                surface: n.surface.clone(),
                text: n.text.clone(),
                sign: n.sign,
                rule: labelled.then(|| n.produced_by.as_ref().map(|p| p.rule)).flatten(),
                antecedents: labelled
                    .then(|| n.produced_by.as_ref().map(|p| p.antecedents.clone()))
                    .flatten(),
                witness: labelled.then(|| n.produced_by.as_ref().and_then(|p| p.witness.clone())).flatten(),
                position: labelled.then(|| n.produced_by.as_ref().and_then(|p| p.position)).flatten(),
            })
            .collect(),
        children: b.children.iter().map(|c| tree_of(c, labelled)).collect(),
        closure: b.closure.as_ref().map(|c| TreeClosure {
            mark: "\u{00d7}".to_string(),
            rule: labelled.then_some(c.rule),
            antecedents: labelled.then(|| c.antecedents.clone()),
            relations: if labelled {
                c.relations.iter().map(canonical_lexrel).collect()
            } else {
                Vec::new()
            },
        }),
    }
    .canonical()
}

pub fn extract_unlabeled(p: &PrunedProof) -> TreeBranch {
    tree_of(&p.root, false)
}

pub fn extract_full(p: &PrunedProof) -> TreeBranch {
    tree_of(&p.root, true)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Explanation {
    pub problem_id: String,
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rules: Option<BTreeMap<String, usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lexrels: Option<Vec<UsedRelation>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub texts: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<TreeBranch>,
}

impl Explanation {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("explanations serialize")
    }
}

/// Build one explanation format from a closed proof.
pub fn explain(proof: &Proof, format: Format) -> Result<Explanation, ExplainError> {
    let p = prune(proof)?;
    let mut e = Explanation {
        problem_id: proof.problem_id.clone(),
        format,
        rules: None,
        lexrels: None,
        texts: None,
        tree: None,
    };
    match format {
        Format::Lexrel => e.lexrels = Some(extract_lexrels(&p)),
        Format::Rules => {
            e.rules = Some(extract_rules(&p));
            e.lexrels = Some(extract_lexrels(&p));
        }
        Format::Unlabeled => {
            e.texts = Some(p.texts.clone());
            e.tree = Some(extract_unlabeled(&p));
        }
        Format::Full => {
            e.texts = Some(p.texts.clone());
            e.tree = Some(extract_full(&p));
        }
    }
    Ok(e)
}

#[derive(Clone)]
struct Known {
    spine: Spine,
    sign: Sign,
    surface: SurfaceExpr,
}

fn canonical_spine(s: &Spine) -> Option<Spine> {
    let (h, a) = canonical_form(&s.head, &s.args).ok()?;
    Some(Spine::new(h, a))
}

fn find_individual(env: &HashMap<NodeId, Known>, name: &str) -> Term {
    let mut ids: Vec<&NodeId> = env.keys().collect();
    ids.sort();
    for id in ids {
        for a in &env[id].spine.args {
            if a.is_individual() && a.to_string() == name {
                return a.clone();
            }
        }
    }
    Term::entity(name)
}

/// Rebuild a full-format tree from its texts by re-applying every labelled
/// step, and check each closure. Returns the reconstructed tree.
pub fn replay_full(e: &Explanation, kb: &KnowledgeBase) -> Result<TreeBranch, ExplainError> {
    let texts = e.texts.as_ref().ok_or(ExplainError::Missing(e.format, "texts"))?;
    let tree = e.tree.as_ref().ok_or(ExplainError::Missing(e.format, "tree"))?;
    let rebuilt = replay_branch(tree, texts, kb, HashMap::new())?;
    Ok(rebuilt.canonical())
}

fn replay_branch(
    b: &TreeBranch,
    texts: &[String],
    kb: &KnowledgeBase,
    mut env: HashMap<NodeId, Known>,
) -> Result<TreeBranch, ExplainError> {
    let fail = |id: NodeId, msg: &str| ExplainError::Replay(id, msg.to_string());
    let mut nodes = Vec::new();
    for n in &b.nodes {
        let id = n.id.ok_or_else(|| fail(0, "unlabelled node"))?;
        let known = match (&n.rule, &n.antecedents) {
            (None, _) => {
                let text = texts.get(id as usize - 1).ok_or_else(|| fail(id, "no such sentence"))?;
                let s = parse(text, id as usize).map_err(|e| fail(id, &e.to_string()))?;
                let (h, a) = canonical_form(&s.root, &[]).map_err(|e| fail(id, &e.to_string()))?;
                Known {
                    spine: Spine::new(h, a),
                    sign: n.sign,
                    surface: surface_of(&s.root, texts),
                }
            }
            (Some(rule), Some(ants)) => {
                let known: Vec<&Known> = ants
                    .iter()
                    .map(|a| env.get(a).ok_or_else(|| fail(id, "antecedent not on the branch")))
                    .collect::<Result<_, _>>()?;
                let refs: Vec<EntryRef> = ants
                    .iter()
                    .zip(&known)
                    .map(|(a, k)| EntryRef {
                        id: *a,
                        spine: &k.spine,
                        sign: k.sign,
                    })
                    .collect();
                let witness = n.witness.as_deref().map(|w| find_individual(&env, w));
                let x = apply_named(*rule, &refs, witness.as_ref(), n.position, kb)
                    .ok_or_else(|| fail(id, "rule does not apply"))?;
                x.branches
                    .into_iter()
                    .flatten()
                    .filter(|ne| ne.sign == n.sign)
                    .filter_map(|ne| {
                        let surface = match &ne.surface {
                            SurfaceSource::Term(t) => surface_of(t, texts),
                            SurfaceSource::Copy(c) => env.get(c)?.surface.clone(),
                        };
                        (surface.to_string() == n.surface).then(|| {
                            Some(Known {
                                spine: canonical_spine(&ne.spine)?,
                                sign: ne.sign,
                                surface,
                            })
                        })?
                    })
                    .next()
                    .ok_or_else(|| fail(id, "no produced entry matches"))?
            }
            (Some(_), None) => return Err(fail(id, "rule without antecedents")),
        };
        nodes.push(TreeNode {
            id: Some(id),
            surface: known.surface.to_string(),
            text: render_surface(&known.surface, texts).map_err(|e| fail(id, &e.to_string()))?,
            sign: known.sign,
            rule: n.rule,
            antecedents: n.antecedents.clone(),
            witness: n.witness.clone(),
            position: n.position,
        });
        env.insert(id, known);
    }
    let closure = match &b.closure {
        None => None,
        Some(c) => {
            let ants = c.antecedents.as_ref().ok_or_else(|| fail(0, "closure without antecedents"))?;
            let [x, y] = ants.as_slice() else {
                return Err(fail(0, "closure needs two antecedents"));
            };
            let (kx, ky) = (
                env.get(x).ok_or_else(|| fail(*x, "closure antecedent missing"))?,
                env.get(y).ok_or_else(|| fail(*y, "closure antecedent missing"))?,
            );
            let rx = EntryRef { id: *x, spine: &kx.spine, sign: kx.sign };
            let ry = EntryRef { id: *y, spine: &ky.spine, sign: ky.sign };
            let (rule, relations) = close_pair(&rx, &ry, kb, texts).ok_or_else(|| fail(*y, "entries do not clash"))?;
            Some(TreeClosure {
                mark: c.mark.clone(),
                rule: Some(rule),
                antecedents: Some(ants.clone()),
                relations: relations.iter().map(canonical_lexrel).collect(),
            })
        }
    };
    let children = b
        .children
        .iter()
        .map(|c| replay_branch(c, texts, kb, env.clone()))
        .collect::<Result<_, _>>()?;
    Ok(TreeBranch { nodes, children, closure })
}

/// Full-format explanation whose replay must reproduce it node for node.
pub fn explain_full_checked(proof: &Proof, kb: &KnowledgeBase) -> Result<Explanation, ExplainError> {
    let e = explain(proof, Format::Full)?;
    let again = replay_full(&e, kb)?;
    if Some(&again) != e.tree.as_ref() {
        return Err(ExplainError::Replay(0, "replayed tree differs".to_string()));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::RunConfig;
    use crate::prover::{classify, NliProblem};

    fn proof(p: &str, h: &str) -> Proof {
        let kb = KnowledgeBase::default_kb();
        classify(&NliProblem::new("t", &[p], h), &kb, &RunConfig::default())
            .unwrap()
            .proof
            .unwrap()
    }

    fn keys(v: &[UsedRelation]) -> Vec<String> {
        v.iter().map(lexrel_key).collect()
    }

    #[test]
    fn pruned_birds_shape() {
        let pr = prune(&proof("many birds hover high", "few birds fly")).unwrap();
        assert_eq!(pr.branch_count(), 2);
        let t = extract_unlabeled(&pr);
        let texts = |b: &TreeBranch| -> Vec<String> {
            b.nodes.iter().map(|n| format!("{}:{}", n.text, n.sign)).collect()
        };
        assert_eq!(texts(&t), vec!["many birds hover high:T", "few birds fly:T"]);
        let mut kids: Vec<Vec<String>> = t.children.iter().map(texts).collect();
        kids.sort();
        assert_eq!(
            kids,
            vec![
                vec!["c hover high:T", "c fly:F", "c hover:T"],
                vec!["many birds fly:T", "few birds fly:T"],
            ]
        );
        assert!(t.children.iter().all(|c| c.closure.is_some()));
        assert_eq!(keys(&extract_lexrels(&pr)), vec!["few|many", "hover⊑fly"]);
        let rules = extract_rules(&pr);
        assert_eq!(rules, BTreeMap::from([("upDisCov".to_string(), 1), ("adj_sub_T".to_string(), 1)]));
    }

    #[test]
    fn quantifier_example_rules() {
        let pr = prune(&proof("Not all birds fly", "Some bird does not fly")).unwrap();
        assert!(extract_lexrels(&pr).is_empty());
        let rules = extract_rules(&pr);
        assert_eq!(
            rules,
            BTreeMap::from([("not".to_string(), 2), ("forall_F".to_string(), 1), ("exists_F".to_string(), 1)])
        );
    }

    #[test]
    fn unused_premise_body_is_pruned() {
        let p = proof(
            "Drugs that slow down or halt Alzheimer's disease work best the earlier you administer them",
            "Alzheimer's disease is treated using drugs",
        );
        let pr = prune(&p).unwrap();
        assert_eq!(pr.branch_count(), 2);
        let texts: Vec<&str> = pr.root.all_nodes().iter().map(|n| n.text.as_str()).collect();
        assert!(!texts.iter().any(|t| t.contains("work best") && t.starts_with("c ")));
        for leaf in pr.root.leaves() {
            assert_eq!(leaf.closure.as_ref().unwrap().rule, RuleName::FrameAlt);
        }
        assert_eq!(
            keys(&extract_lexrels(&pr)),
            vec!["halt⊑treat (active/passive)", "slow down⊑treat (active/passive)"]
        );
    }

    #[test]
    fn identity_has_empty_explanations() {
        let pr = prune(&proof("every dog barks", "every dog barks")).unwrap();
        assert!(extract_lexrels(&pr).is_empty());
        assert!(extract_rules(&pr).is_empty());
        let t = extract_unlabeled(&pr);
        assert_eq!(t.nodes.len(), 2);
        assert!(t.children.is_empty() && t.closure.is_some());
    }

    #[test]
    fn full_trees_replay() {
        let kb = KnowledgeBase::default_kb();
        for (p, h) in [
            ("many birds hover high", "few birds fly"),
            ("Not all birds fly", "Some bird does not fly"),
            (
                "Drugs that slow down or halt Alzheimer's disease work best the earlier you administer them",
                "Alzheimer's disease is treated using drugs",
            ),
        ] {
            let e = explain_full_checked(&proof(p, h), &kb).unwrap();
            let back: Explanation = serde_json::from_str(&e.to_json()).unwrap();
            assert_eq!(back, e);
        }
    }

    #[test]
    fn tampered_full_tree_fails_replay() {
        let kb = KnowledgeBase::default_kb();
        let mut e = explain(&proof("many birds hover high", "few birds fly"), Format::Full).unwrap();
        let tree = e.tree.as_mut().unwrap();
        tree.children[0].nodes[0].sign = tree.children[0].nodes[0].sign.flip();
        assert!(replay_full(&e, &kb).is_err() || replay_full(&e, &kb).ok() != e.tree);
    }

    #[test]
    fn formats_parse() {
        assert_eq!("rules".parse::<Format>().unwrap(), Format::Rules);
        assert!("dot".parse::<Format>().is_err());
    }

    #[test]
    fn open_proofs_have_no_explanation() {
        let mut p = proof("many birds hover high", "few birds fly");
        p.closures.pop();
        assert!(matches!(prune(&p), Err(ExplainError::Open(_))));
    }
}
