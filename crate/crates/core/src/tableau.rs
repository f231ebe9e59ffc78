//! Signed tableau and the saturation loop.
//!
//! Scheduling: after every change the extended branches are checked for closure;
//! then non-branching rules fire (¬, ∧, ∨ under F, adj⊂_T, a», linear
//! instantiation), then rules introducing a fresh entity, then branching rules
//! (boolean splits before instantiation before monotonicity).
//! Within a class the candidate with the lowest antecedent ids wins, then the
//! leftmost branch. a» rewrites all pending entries of a branch at once, and a
//! closure uses the most recent clashing pair. Node ids are shared by entries and closure marks.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{KnowledgeBase, LexicalRelation};
use crate::parser::FragmentSentence;
use crate::rules::{self, EntryRef, Expansion, RuleName, SurfaceSource};
use crate::terms::{canonical_form, render_surface, surface_of, Spine, SurfaceExpr, Term, TermType, Voice};

pub type NodeId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    T,
    F,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::T => Sign::F,
            Sign::F => Sign::T,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::T => "T",
            Sign::F => "F",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Budget {
    pub max_entries: usize,
    pub max_fresh_entities: usize,
    pub max_rule_applications: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_entries: 500,
            max_fresh_entities: 4,
            max_rule_applications: 2000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Entry {
    pub id: NodeId,
    pub spine: Spine,
    pub sign: Sign,
    pub surface: SurfaceExpr,
    pub text: String,
    pub segment: usize,
    pub produced_by: Option<usize>,
    pub structural: bool,
}

impl Entry {
    pub fn as_ref(&self) -> EntryRef<'_> {
        EntryRef {
            id: self.id,
            spine: &self.spine,
            sign: self.sign,
        }
    }

    /// `head : [args] : sign`
    pub fn formula(&self) -> String {
        let args: Vec<String> = self.spine.args.iter().map(|t| t.to_string()).collect();
        format!("{} : [{}] : {}", self.spine.head, args.join(", "), self.sign)
    }

    fn content_key(&self) -> String {
        self.formula()
    }
}

/// A lexical relation used by a closure, with the text of each side in the problem.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct UsedRelation {
    #[serde(flatten)]
    pub relation: LexicalRelation,
    pub lhs_text: String,
    pub rhs_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureRecord {
    pub id: NodeId,
    pub rule: RuleName,
    pub antecedents: Vec<NodeId>,
    pub relations: Vec<UsedRelation>,
}

#[derive(Debug, Clone)]
pub struct Segment {
    pub id: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub entries: Vec<NodeId>,
    pub application: Option<usize>,
    pub closure: Option<ClosureRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleApplication {
    pub id: usize,
    pub rule: RuleName,
    pub antecedents: Vec<NodeId>,
    /// Leaf segment that was extended.
    pub branch: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<usize>,
    pub produced: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Saturation {
    Closed,
    Open,
    BudgetExhausted,
}

#[derive(Debug, Error)]
pub enum TableauError {
    #[error("a tableau needs at least one root")]
    NoRoots,
    #[error("replay step {step}: no applicable {rule} on {antecedents:?} at segment {branch}")]
    Replay {
        step: usize,
        rule: RuleName,
        antecedents: Vec<NodeId>,
        branch: usize,
    },
}

#[derive(Debug, Clone)]
struct Branch {
    leaf: usize,
    closed: bool,
    entries: Vec<NodeId>,
    fired: HashSet<String>,
    facts: HashMap<(Spine, Sign), NodeId>,
    witnesses: Vec<Term>,
}

struct Candidate {
    key: Vec<NodeId>,
    fire_keys: Vec<String>,
    expansion: Expansion,
    antecedents: Vec<NodeId>,
    witness: Option<Term>,
    position: Option<usize>,
    fresh: bool,
}

#[derive(Debug, Clone)]
pub struct Tableau {
    texts: Vec<String>,
    entries: Vec<Entry>,
    segments: Vec<Segment>,
    applications: Vec<RuleApplication>,
    branches: Vec<Branch>,
    next_id: NodeId,
    entities: usize,
    fresh_blocked: bool,
}

/// Fresh entity names: c, d, …, z, c1, d1, …
pub fn entity_name(index: usize) -> String {
    let letter = (b'c' + (index % 24) as u8) as char;
    match index / 24 {
        0 => letter.to_string(),
        k => format!("{letter}{k}"),
    }
}

impl Tableau {
    /// Root entries 1..n in the order given, in one open segment.
    pub fn new(roots: &[(&FragmentSentence, Sign)]) -> Result<Tableau, TableauError> {
        if roots.is_empty() {
            return Err(TableauError::NoRoots);
        }
        let n_texts = roots.iter().map(|(s, _)| s.id).max().unwrap_or(0);
        let mut texts = vec![String::new(); n_texts];
        for (s, _) in roots {
            texts[s.id - 1] = s.text.clone();
        }
        let mut t = Tableau {
            texts,
            entries: Vec::new(),
            segments: vec![Segment {
                id: 0,
                parent: None,
                children: Vec::new(),
                entries: Vec::new(),
                application: None,
                closure: None,
            }],
            applications: Vec::new(),
            branches: vec![Branch {
                leaf: 0,
                closed: false,
                entries: Vec::new(),
                fired: HashSet::new(),
                facts: HashMap::new(),
                witnesses: Vec::new(),
            }],
            next_id: 1,
            entities: 0,
            fresh_blocked: false,
        };
        let mut new_ids = Vec::new();
        for (s, sign) in roots {
            let (h, a) = canonical_form(&s.root, &[]).expect("parser produces well-typed sentences");
            let id = t.push_entry(0, Spine::new(h, a), *sign, surface_of(&s.root, &t.texts), None, false);
            new_ids.push(id);
        }
        for id in &new_ids {
            t.add_to_branch(0, *id);
        }
        Ok(t)
    }

    pub fn texts(&self) -> &[String] {
        &self.texts
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn entry(&self, id: NodeId) -> &Entry {
        let i = self
            .entries
            .binary_search_by_key(&id, |e| e.id)
            .expect("entry ids are valid");
        &self.entries[i]
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn applications(&self) -> &[RuleApplication] {
        &self.applications
    }

    pub fn entity_count(&self) -> usize {
        self.entities
    }

    pub fn is_closed(&self) -> bool {
        self.branches.iter().all(|b| b.closed)
    }

    /// Leaf segments left to right, with their closure if any.
    pub fn leaves(&self) -> Vec<(usize, Option<&ClosureRecord>)> {
        self.branches
            .iter()
            .map(|b| (b.leaf, self.segments[b.leaf].closure.as_ref()))
            .collect()
    }

    /// Entry ids on the branch ending at `leaf`, root first.
    pub fn branch_entries(&self, leaf: usize) -> Vec<NodeId> {
        let mut segs = Vec::new();
        let mut cur = Some(leaf);
        while let Some(s) = cur {
            segs.push(s);
            cur = self.segments[s].parent;
        }
        segs.iter()
            .rev()
            .flat_map(|s| self.segments[*s].entries.iter().copied())
            .collect()
    }

    fn push_entry(
        &mut self,
        segment: usize,
        spine: Spine,
        sign: Sign,
        surface: SurfaceExpr,
        produced_by: Option<usize>,
        structural: bool,
    ) -> NodeId {
        let id = self.next_id;
        self.next_id += 1;
        let text = render_surface(&surface, &self.texts).unwrap_or_default();
        self.entries.push(Entry {
            id,
            spine,
            sign,
            surface,
            text,
            segment,
            produced_by,
            structural,
        });
        self.segments[segment].entries.push(id);
        id
    }

    fn add_to_branch(&mut self, b: usize, id: NodeId) {
        let i = self.entries.binary_search_by_key(&id, |e| e.id).unwrap();
        let e = &self.entries[i];
        let branch = &mut self.branches[b];
        branch.entries.push(id);
        if e.spine.is_canonical() {
            branch.facts.entry((e.spine.clone(), e.sign)).or_insert(id);
            for a in &e.spine.args {
                if a.is_individual() && !branch.witnesses.contains(a) {
                    branch.witnesses.push(a.clone());
                }
            }
        }
    }

    /// Run rules until every branch closes, no rule applies, or the budget runs out.
    pub fn saturate(&mut self, kb: &KnowledgeBase, budget: &Budget) -> Saturation {
        for b in 0..self.branches.len() {
            if !self.branches[b].closed {
                let all = self.branches[b].entries.clone();
                self.close_if_possible(b, &all, kb);
            }
        }
        loop {
            if self.is_closed() {
                return Saturation::Closed;
            }
            let fresh_ok = self.entities < budget.max_fresh_entities;
            let Some((b, cand)) = self.pick(kb, fresh_ok) else {
                return if self.fresh_blocked {
                    Saturation::BudgetExhausted
                } else {
                    Saturation::Open
                };
            };
            let produced: usize = cand.expansion.branches.iter().map(Vec::len).sum();
            if self.applications.len() >= budget.max_rule_applications
                || self.entries.len() + produced > budget.max_entries
            {
                return Saturation::BudgetExhausted;
            }
            self.apply(b, cand, kb);
        }
    }

    /// Reconstruct a tableau by re-applying a recorded rule log.
    pub fn replay(
        roots: &[(&FragmentSentence, Sign)],
        kb: &KnowledgeBase,
        log: &[RuleApplication],
    ) -> Result<Tableau, TableauError> {
        let mut t = Tableau::new(roots)?;
        let all = t.branches[0].entries.clone();
        t.close_if_possible(0, &all, kb);
        for (step, app) in log.iter().enumerate() {
            let err = || TableauError::Replay {
                step,
                rule: app.rule,
                antecedents: app.antecedents.clone(),
                branch: app.branch,
            };
            let b = t
                .branches
                .iter()
                .position(|br| br.leaf == app.branch && !br.closed)
                .ok_or_else(err)?;
            let found = [1u8, 2, 3].into_iter().find_map(|class| {
                t.candidates(b, class, kb, true).into_iter().find(|c| {
                    c.expansion.rule == app.rule
                        && c.antecedents == app.antecedents
                        && c.witness.as_ref().map(|w| w.to_string()) == app.witness
                        && c.position == app.position
                })
            });
            let cand = found.ok_or_else(err)?;
            t.apply(b, cand, kb);
        }
        Ok(t)
    }

    fn pick(&mut self, kb: &KnowledgeBase, fresh_ok: bool) -> Option<(usize, Candidate)> {
        for class in 1..=3u8 {
            let mut best: Option<(usize, Candidate)> = None;
            for b in 0..self.branches.len() {
                if self.branches[b].closed {
                    continue;
                }
                for c in self.candidates(b, class, kb, fresh_ok) {
                    let rank = |c: &Candidate| (Self::branching_rank(c.expansion.rule) * u8::from(class == 3), c.key.clone());
                    if best.as_ref().is_none_or(|(_, cur)| rank(&c) < rank(cur)) {
                        best = Some((b, c));
                    }
                }
            }
            if best.is_some() {
                return best;
            }
        }
        None
    }

    /// Branching rules: ∧/∨ splits first, then instantiation, then monotonicity.
    fn branching_rank(rule: RuleName) -> u8 {
        match rule {
            RuleName::And | RuleName::Or => 0,
            RuleName::UpDisCov | RuleName::DownSubst => 2,
            _ => 1,
        }
    }

    fn candidates(&mut self, b: usize, class: u8, kb: &KnowledgeBase, fresh_ok: bool) -> Vec<Candidate> {
        let branch = &self.branches[b];
        let fresh = Term::entity(entity_name(self.entities));
        let mut out = Vec::new();
        let mut blocked = false;
        let push = |out: &mut Vec<Candidate>,
                        key: Vec<NodeId>,
                        fire_key: String,
                        expansion: Option<Expansion>,
                        witness: Option<Term>,
                        position: Option<usize>,
                        is_fresh: bool| {
            if let Some(expansion) = expansion {
                if branch.fired.contains(&fire_key) {
                    return;
                }
                out.push(Candidate {
                    antecedents: key.clone(),
                    key,
                    fire_keys: vec![fire_key],
                    expansion,
                    witness,
                    position,
                    fresh: is_fresh,
                });
            }
        };
        let entries: Vec<&Entry> = branch.entries.iter().map(|id| self.entry(*id)).collect();
        if class == 1 {
            // a» normalizes every pending entry of the branch in one step
            let mut batch: Option<Candidate> = None;
            for e in &entries {
                let key = format!("a>|{}", e.content_key());
                if branch.fired.contains(&key) {
                    continue;
                }
                if let Some(x) = rules::normalize_args(&e.as_ref()) {
                    let c = batch.get_or_insert_with(|| Candidate {
                        key: Vec::new(),
                        fire_keys: Vec::new(),
                        expansion: Expansion { rule: RuleName::ArgPush, branches: vec![Vec::new()] },
                        antecedents: Vec::new(),
                        witness: None,
                        position: None,
                        fresh: false,
                    });
                    c.key.push(e.id);
                    c.antecedents.push(e.id);
                    c.fire_keys.push(key);
                    c.expansion.branches[0].extend(x.branches.into_iter().flatten());
                }
            }
            out.extend(batch);
        }
        for e in &entries {
            let er = e.as_ref();
            let content = e.content_key();
            match class {
                1 => {
                    if rules::boolean_branches(&er) == Some(false) {
                        push(&mut out, vec![e.id], format!("bool|{content}"), rules::apply_boolean(&er), None, None, false);
                    }
                    push(&mut out, vec![e.id], format!("mod|{content}"), rules::apply_modifier(&er, kb), None, None, false);
                    if let Some(noun) = rules::instantiation_noun(&er) {
                        for w in &branch.witnesses {
                            let Ok((h, a)) = canonical_form(noun, std::slice::from_ref(w)) else {
                                continue;
                            };
                            if let Some(nid) = branch.facts.get(&(Spine::new(h, a), Sign::T)) {
                                let x = rules::apply_quantifier_instantiate(&er, w, true);
                                push(&mut out, vec![e.id, *nid], format!("inst|{content}|{w}"), x, Some(w.clone()), None, false);
                            }
                        }
                    }
                }
                2 => {
                    if rules::is_fresh_target(&er) && !branch.fired.contains(&format!("fresh|{content}")) {
                        if fresh_ok {
                            let x = rules::apply_quantifier_fresh(&er, &fresh);
                            push(&mut out, vec![e.id], format!("fresh|{content}"), x, Some(fresh.clone()), None, true);
                        } else {
                            blocked = true;
                        }
                    }
                }
                _ => {
                    if rules::boolean_branches(&er) == Some(true) {
                        push(&mut out, vec![e.id], format!("bool|{content}"), rules::apply_boolean(&er), None, None, false);
                    }
                    if let Some(noun) = rules::instantiation_noun(&er) {
                        for w in &branch.witnesses {
                            let Ok((h, a)) = canonical_form(noun, std::slice::from_ref(w)) else {
                                continue;
                            };
                            if !branch.facts.contains_key(&(Spine::new(h, a), Sign::T)) {
                                let x = rules::apply_quantifier_instantiate(&er, w, false);
                                push(&mut out, vec![e.id], format!("inst|{content}|{w}"), x, Some(w.clone()), None, false);
                            }
                        }
                    }
                    if e.sign != Sign::T || !e.spine.is_canonical() || e.spine.args.is_empty() {
                        continue;
                    }
                    for e2 in &entries {
                        if e2.id == e.id || e2.sign != Sign::T || e2.spine.args.len() != e.spine.args.len() {
                            continue;
                        }
                        for pos in 1..=e.spine.args.len() {
                            let fire = format!("mono|{content}|{}|{pos}", e2.content_key());
                            if branch.fired.contains(&fire) {
                                continue;
                            }
                            let x = rules::apply_monotonicity(&er, &e2.as_ref(), pos, kb, &fresh);
                            if x.is_some() && !fresh_ok {
                                blocked = true;
                                continue;
                            }
                            push(&mut out, vec![e.id, e2.id], fire, x, Some(fresh.clone()), Some(pos), true);
                        }
                    }
                }
            }
        }
        if blocked {
            self.fresh_blocked = true;
        }
        out
    }

    fn apply(&mut self, b: usize, cand: Candidate, kb: &KnowledgeBase) {
        let app_id = self.applications.len();
        let leaf = self.branches[b].leaf;
        if cand.fresh {
            self.entities += 1;
        }
        let mut produced_segs = Vec::new();
        let mut produced_ids = Vec::new();
        for new_entries in &cand.expansion.branches {
            let seg = self.segments.len();
            self.segments.push(Segment {
                id: seg,
                parent: Some(leaf),
                children: Vec::new(),
                entries: Vec::new(),
                application: Some(app_id),
                closure: None,
            });
            produced_segs.push(seg);
            let mut ids = Vec::new();
            for ne in new_entries {
                let surface = match &ne.surface {
                    SurfaceSource::Term(t) => surface_of(t, &self.texts),
                    SurfaceSource::Copy(id) => self.entry(*id).surface.clone(),
                };
                ids.push(self.push_entry(seg, ne.spine.clone(), ne.sign, surface, Some(app_id), ne.structural));
            }
            produced_ids.push(ids);
        }
        self.segments[leaf].children = produced_segs.clone();
        self.applications.push(RuleApplication {
            id: app_id,
            rule: cand.expansion.rule,
            antecedents: cand.antecedents.clone(),
            branch: leaf,
            witness: cand.witness.as_ref().map(|w| w.to_string()),
            position: cand.position,
            produced: produced_segs.clone(),
        });
        self.branches[b].fired.extend(cand.fire_keys.iter().cloned());
        let base = self.branches[b].clone();
        let mut replacement = Vec::new();
        for seg in &produced_segs {
            let mut br = base.clone();
            br.leaf = *seg;
            replacement.push(br);
        }
        self.branches.splice(b..=b, replacement);
        for (k, ids) in produced_ids.iter().enumerate() {
            for id in ids {
                self.add_to_branch(b + k, *id);
            }
        }
        for (k, ids) in produced_ids.iter().enumerate() {
            self.close_if_possible(b + k, ids, kb);
        }
    }

    /// Close branch `b` on the most recent pair involving at least one of `fresh_ids`.
    fn close_if_possible(&mut self, b: usize, fresh_ids: &[NodeId], kb: &KnowledgeBase) {
        let ids = self.branches[b].entries.clone();
        let mut best: Option<((NodeId, NodeId), RuleName, Vec<UsedRelation>)> = None;
        for (i, &x) in ids.iter().enumerate() {
            for &y in &ids[i + 1..] {
                if !fresh_ids.contains(&x) && !fresh_ids.contains(&y) {
                    continue;
                }
                let pair = (x.min(y), x.max(y));
                if best.as_ref().is_some_and(|(p, _, _)| recency(*p) <= recency(pair)) {
                    continue;
                }
                if let Some((rule, rels)) = close_pair(&self.entry(pair.0).as_ref(), &self.entry(pair.1).as_ref(), kb, &self.texts) {
                    best = Some((pair, rule, rels));
                }
            }
        }
        if let Some(((x, y), rule, relations)) = best {
            let id = self.next_id;
            self.next_id += 1;
            let leaf = self.branches[b].leaf;
            self.segments[leaf].closure = Some(ClosureRecord {
                id,
                rule,
                antecedents: vec![x, y],
                relations,
            });
            self.branches[b].closed = true;
        }
    }

    /// The preferred closure available on the branch ending at `leaf`.
    pub fn check_closure(&self, leaf: usize, kb: &KnowledgeBase) -> Option<ClosureRecord> {
        let ids = self.branch_entries(leaf);
        let mut best = None;
        for (i, &x) in ids.iter().enumerate() {
            for &y in &ids[i + 1..] {
                let pair = (x.min(y), x.max(y));
                if let Some((rule, relations)) = close_pair(&self.entry(pair.0).as_ref(), &self.entry(pair.1).as_ref(), kb, &self.texts) {
                    let rec = ClosureRecord {
                        id: 0,
                        rule,
                        antecedents: vec![pair.0, pair.1],
                        relations,
                    };
                    match &best {
                        Some(b) if recency(closure_key(b)) <= recency(pair) => {}
                        _ => best = Some(rec),
                    }
                }
            }
        }
        best
    }
}

/// Closure preference: the pair whose older member is most recent, then the
/// lower newer member.
fn recency(pair: (NodeId, NodeId)) -> (std::cmp::Reverse<NodeId>, NodeId) {
    (std::cmp::Reverse(pair.0), pair.1)
}

fn closure_key(c: &ClosureRecord) -> (NodeId, NodeId) {
    (c.antecedents[0], c.antecedents[1])
}

/// Lemma phrase of a predicate: a constant, or a modifier applied to a phrase.
pub fn predicate_phrase(t: &Term) -> Option<(String, Voice)> {
    match t {
        Term::Const(c) if !c.covert && c.ty != TermType::E => Some((c.lemma.clone(), c.voice)),
        Term::App { head, args, .. } if args.len() == 1 => {
            let m = head.as_const()?;
            match &m.ty {
                TermType::Fn(p, r) if p.len() == 1 && p[0] == **r && r.is_property() => {
                    let (inner, v) = predicate_phrase(&args[0])?;
                    Some((format!("{} {inner}", m.lemma), v))
                }
                _ => None,
            }
        }
        _ => None,
    }
}

/// Closure between two canonical entries, lower id first.
pub fn close_pair(
    a: &EntryRef,
    b: &EntryRef,
    kb: &KnowledgeBase,
    texts: &[String],
) -> Option<(RuleName, Vec<UsedRelation>)> {
    if !a.spine.is_canonical() || !b.spine.is_canonical() {
        return None;
    }
    if a.sign != b.sign && a.spine == b.spine {
        return Some((RuleName::CloseSub, Vec::new()));
    }
    let (first, second) = match (a.sign, b.sign) {
        (Sign::T, Sign::F) | (Sign::T, Sign::T) => (a, b),
        (Sign::F, Sign::T) => (b, a),
        (Sign::F, Sign::F) => return None,
    };
    let (xs, ys) = (&first.spine.args, &second.spine.args);
    for s in (0..=xs.len().min(ys.len())).rev() {
        if xs[xs.len() - s..] != ys[ys.len() - s..] {
            continue;
        }
        let p1 = Term::app(first.spine.head.clone(), xs[..xs.len() - s].to_vec());
        let p2 = Term::app(second.spine.head.clone(), ys[..ys.len() - s].to_vec());
        let (Some((l1, v1)), Some((l2, v2))) = (predicate_phrase(&p1), predicate_phrase(&p2)) else {
            continue;
        };
        if p1.ty().ok() != p2.ty().ok() {
            continue;
        }
        let found = if first.sign == second.sign {
            if v1 != v2 {
                continue;
            }
            kb.alternation_path(&l1, &l2).map(|p| (RuleName::CloseAlt, p))
        } else if v1 == v2 {
            kb.subsumption_path(&l1, &l2).map(|p| (RuleName::CloseSub, p))
        } else {
            kb.frame_path((&l1, v1), (&l2, v2)).map(|p| (RuleName::FrameAlt, p))
        };
        if let Some((rule, path)) = found {
            let text = |t: &Term| render_surface(&surface_of(t, texts), texts).ok();
            let (t1, t2) = (text(&p1), text(&p2));
            let side = |phrase: &str| {
                if phrase == l1 {
                    t1.clone().unwrap_or_else(|| phrase.to_string())
                } else if phrase == l2 {
                    t2.clone().unwrap_or_else(|| phrase.to_string())
                } else {
                    phrase.to_string()
                }
            };
            let relations = path
                .into_iter()
                .map(|r| UsedRelation {
                    lhs_text: side(&r.lhs),
                    rhs_text: side(&r.rhs),
                    relation: r,
                })
                .collect();
            return Some((rule, relations));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn run(roots: &[(&str, Sign)], kb: &KnowledgeBase) -> (Tableau, Saturation) {
        let parsed: Vec<FragmentSentence> = roots
            .iter()
            .enumerate()
            .map(|(i, (s, _))| parse(s, i + 1).unwrap())
            .collect();
        let refs: Vec<(&FragmentSentence, Sign)> = parsed.iter().zip(roots).map(|(p, (_, s))| (p, *s)).collect();
        let mut t = Tableau::new(&refs).unwrap();
        let r = t.saturate(kb, &Budget::default());
        (t, r)
    }

    #[test]
    fn roots_get_ids_in_order() {
        let p = parse("Alzheimer's disease is treated using drugs", 1).unwrap();
        let h = parse("few birds fly", 2).unwrap();
        let t = Tableau::new(&[(&p, Sign::T), (&h, Sign::F)]).unwrap();
        let ids: Vec<_> = t.entries().iter().map(|e| (e.id, e.sign)).collect();
        assert_eq!(ids, vec![(1, Sign::T), (2, Sign::F)]);
        assert!(t.entries().iter().all(|e| e.produced_by.is_none()));
        assert!(Tableau::new(&[]).is_err());
    }

    #[test]
    fn identical_roots_close_without_expansion() {
        let p = parse("many birds hover high", 1).unwrap();
        let mut t = Tableau::new(&[(&p, Sign::T), (&p, Sign::F)]).unwrap();
        assert_eq!(t.saturate(&KnowledgeBase::new(), &Budget::default()), Saturation::Closed);
        assert!(t.applications().is_empty());
        let (_, c) = t.leaves()[0];
        assert_eq!(c.unwrap().antecedents, vec![1, 2]);
    }

    #[test]
    fn birds_hover_derivation() {
        let kb = KnowledgeBase::default_kb();
        let (t, r) = run(&[("many birds hover high", Sign::T), ("few birds fly", Sign::T)], &kb);
        assert_eq!(r, Saturation::Closed);
        let leaves = t.leaves();
        assert_eq!(leaves.len(), 2);
        let left = leaves[0].1.unwrap();
        let right = leaves[1].1.unwrap();
        assert_eq!((left.rule, left.antecedents.clone(), left.id), (RuleName::CloseSub, vec![4, 7], 8));
        assert_eq!((right.rule, right.antecedents.clone(), right.id), (RuleName::CloseAlt, vec![9, 10], 11));
        let formulas: Vec<String> = t.entries().iter().map(|e| format!("{} {}", e.id, e.formula())).collect();
        assert_eq!(
            formulas,
            vec![
                "1 many : [bird, (high hover)] : T",
                "2 few : [bird, fly] : T",
                "3 high : [hover, c] : T",
                "4 fly : [c] : F",
                "5 (many bird) : [fly] : T",
                "6 (few bird) : [fly] : T",
                "7 hover : [c] : T",
                "9 many : [bird, fly] : T",
                "10 few : [bird, fly] : T",
            ]
        );
        let texts: Vec<&str> = t.entries().iter().map(|e| e.text.as_str()).collect();
        assert_eq!(
            texts,
            vec![
                "many birds hover high",
                "few birds fly",
                "c hover high",
                "c fly",
                "many birds fly",
                "few birds fly",
                "c hover",
                "many birds fly",
                "few birds fly"
            ]
        );
    }

    #[test]
    fn no_spurious_closure_without_relations() {
        let (_, r) = run(&[("some bird flies", Sign::T), ("no bird flies", Sign::F)], &KnowledgeBase::new());
        assert_ne!(r, Saturation::Closed);
    }

    #[test]
    fn budget_is_respected() {
        let kb = KnowledgeBase::default_kb();
        let p = parse("every bird that flies sleeps or runs", 1).unwrap();
        let h = parse("some birds that sleep do not fly", 2).unwrap();
        for max in 1..12 {
            let mut t = Tableau::new(&[(&p, Sign::T), (&h, Sign::T)]).unwrap();
            let budget = Budget { max_entries: max, ..Budget::default() };
            t.saturate(&kb, &budget);
            assert!(t.entries().len() <= max.max(2));
        }
    }

    #[test]
    fn replay_reconstructs_ids() {
        let kb = KnowledgeBase::default_kb();
        let p = parse("many birds hover high", 1).unwrap();
        let h = parse("few birds fly", 2).unwrap();
        let roots = [(&p, Sign::T), (&h, Sign::T)];
        let mut t = Tableau::new(&roots).unwrap();
        t.saturate(&kb, &Budget::default());
        let r = Tableau::replay(&roots, &kb, t.applications()).unwrap();
        let a: Vec<String> = t.entries().iter().map(|e| format!("{} {} {}", e.id, e.formula(), e.surface)).collect();
        let b: Vec<String> = r.entries().iter().map(|e| format!("{} {} {}", e.id, e.formula(), e.surface)).collect();
        assert_eq!(a, b);
        assert_eq!(t.leaves().len(), r.leaves().len());
        assert!(r.is_closed());
    }

    #[test]
    fn entity_names() {
        assert_eq!(entity_name(0), "c");
        assert_eq!(entity_name(1), "d");
        assert_eq!(entity_name(23), "z");
        assert_eq!(entity_name(24), "c1");
    }
}
