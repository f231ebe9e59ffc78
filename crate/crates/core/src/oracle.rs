//! Brute-force finite-model checker for the fragment.
//!
//! Every noun, verb phrase and modified phrase is an atomic set over a small
//! universe; a transitive verb with its named object is one atom regardless of
//! voice. Names denote distinct elements. KB relations between the problem's
//! atoms become subset and disjointness constraints, and subsective modifiers
//! stay inside their head.
//!
//! Determiners: some/a/the = non-empty intersection, every/all = subset,
//! no = empty intersection, many = more than half of N, few = fewer than half.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lexicon::KnowledgeBase;
use crate::proof::SearchedRelation;
use crate::prover::NliProblem;
use crate::tableau::predicate_phrase;
use crate::terms::{Term, TermType, Voice};

pub const DEFAULT_MAX_SIZE: usize = 3;
/// Largest number of interpretation bits the search will enumerate.
pub const MAX_BITS: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteModel {
    pub size: usize,
    /// Atom key to its members, 1-based.
    pub sets: BTreeMap<String, Vec<usize>>,
    pub names: BTreeMap<String, usize>,
}

impl fmt::Display for FiniteModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .sets
            .iter()
            .map(|(k, v)| {
                let v: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                format!("{k}={{{}}}", v.join(","))
            })
            .collect();
        parts.extend(self.names.iter().map(|(k, v)| format!("{k}={v}")));
        f.write_str(&parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "verdict")]
pub enum OracleVerdict {
    Countermodel { model: FiniteModel },
    NoCountermodel,
    Abstain { reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Det {
    Some,
    Every,
    No,
    Many,
    Few,
}

#[derive(Debug, Clone)]
enum Pred {
    Atom(usize),
    Not(Box<Pred>),
    And(Box<Pred>, Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
}

#[derive(Debug, Clone)]
enum Sent {
    Quant(Det, Pred, Pred),
    Not(Box<Sent>),
    Holds(Pred, usize),
}

#[derive(Debug, Clone)]
struct Atom {
    key: String,
    /// Lemma phrase used for KB lookups.
    phrase: Option<String>,
    /// Named object of a transitive verb.
    object: Option<String>,
}

#[derive(Default)]
struct Compiler {
    atoms: Vec<Atom>,
    names: Vec<String>,
    subsective: Vec<(usize, Pred)>,
}

type Unsupported = String;

impl Compiler {
    fn atom(&mut self, key: String, phrase: Option<String>, object: Option<String>) -> usize {
        if let Some(i) = self.atoms.iter().position(|a| a.key == key) {
            return i;
        }
        self.atoms.push(Atom { key, phrase, object });
        self.atoms.len() - 1
    }

    fn name(&mut self, t: &Term) -> usize {
        let key = t.to_string();
        if let Some(i) = self.names.iter().position(|n| *n == key) {
            return i;
        }
        self.names.push(key);
        self.names.len() - 1
    }

    fn sentence(&mut self, t: &Term, kb: &KnowledgeBase) -> Result<Sent, Unsupported> {
        let Term::App { head, args, .. } = t else {
            return Err(format!("not a sentence: {t}"));
        };
        let c = head.as_const().ok_or_else(|| format!("complex head in {t}"))?;
        if c.ty == TermType::quantifier() {
            let det = match c.lemma.as_str() {
                "some" | "a" | "the" => Det::Some,
                "every" | "all" => Det::Every,
                "no" => Det::No,
                "many" => Det::Many,
                "few" => Det::Few,
                other => return Err(format!("determiner {other}")),
            };
            let [n, v] = args.as_slice() else {
                return Err(format!("quantifier arity in {t}"));
            };
            return Ok(Sent::Quant(det, self.pred(n, kb)?, self.pred(v, kb)?));
        }
        if c.lemma == "not" && c.ty == TermType::func(vec![TermType::S], TermType::S) {
            return Ok(Sent::Not(Box::new(self.sentence(&args[0], kb)?)));
        }
        let (subj, rest) = args.split_last().expect("applications carry arguments");
        if !subj.is_individual() {
            return Err(format!("no subject in {t}"));
        }
        let pred = Term::app((**head).clone(), rest.to_vec());
        let p = self.pred(&pred, kb)?;
        Ok(Sent::Holds(p, self.name(subj)))
    }

    fn pred(&mut self, t: &Term, kb: &KnowledgeBase) -> Result<Pred, Unsupported> {
        match t {
            Term::Const(c) if c.ty.is_property() => {
                Ok(Pred::Atom(self.atom(c.lemma.clone(), Some(c.lemma.clone()), None)))
            }
            Term::App { head, args, .. } => {
                let c = head.as_const().ok_or_else(|| format!("complex head in {t}"))?;
                let vp = TermType::Vp;
                match (&c.ty, args.as_slice()) {
                    (TermType::Fn(p, r), [obj]) if p[..] == [TermType::E] && **r == vp => {
                        if !obj.is_individual() {
                            return Err(format!("object of {t}"));
                        }
                        let key = format!("{} {obj}", c.lemma);
                        Ok(Pred::Atom(self.atom(key, Some(c.lemma.clone()), Some(obj.to_string()))))
                    }
                    (TermType::Fn(p, r), [a]) if c.lemma == "not" && p[..] == [vp.clone()] && **r == vp => {
                        Ok(Pred::Not(Box::new(self.pred(a, kb)?)))
                    }
                    (TermType::Fn(p, _), [a, b]) if p.len() == 2 && matches!(c.lemma.as_str(), "and" | "or" | "that") => {
                        let (a, b) = (Box::new(self.pred(a, kb)?), Box::new(self.pred(b, kb)?));
                        Ok(if c.lemma == "or" { Pred::Or(a, b) } else { Pred::And(a, b) })
                    }
                    (TermType::Fn(p, r), [h]) if p.len() == 1 && p[0] == **r && r.is_property() => {
                        let inner = self.pred(h, kb)?;
                        let phrase = predicate_phrase(t).map(|(p, _)| p);
                        let i = self.atom(t.to_string(), phrase, None);
                        if kb.is_subsective(&c.lemma) {
                            self.subsective.push((i, inner));
                        }
                        Ok(Pred::Atom(i))
                    }
                    _ => Err(format!("unsupported predicate {t}")),
                }
            }
            _ => Err(format!("unsupported predicate {t}")),
        }
    }
}

fn eval_pred(p: &Pred, masks: &[u32], full: u32) -> u32 {
    match p {
        Pred::Atom(i) => masks[*i],
        Pred::Not(a) => !eval_pred(a, masks, full) & full,
        Pred::And(a, b) => eval_pred(a, masks, full) & eval_pred(b, masks, full),
        Pred::Or(a, b) => eval_pred(a, masks, full) | eval_pred(b, masks, full),
    }
}

fn eval_sent(s: &Sent, masks: &[u32], full: u32) -> bool {
    match s {
        Sent::Not(a) => !eval_sent(a, masks, full),
        Sent::Holds(p, x) => eval_pred(p, masks, full) & (1 << x) != 0,
        Sent::Quant(det, n, v) => {
            let n = eval_pred(n, masks, full);
            let nv = (n & eval_pred(v, masks, full)).count_ones();
            let n = n.count_ones();
            match det {
                Det::Some => nv > 0,
                Det::Every => nv == n,
                Det::No => nv == 0,
                Det::Many => 2 * nv > n,
                Det::Few => 2 * nv < n,
            }
        }
    }
}

/// A compiled problem: sentences, atoms in alphabetical order and constraints.
struct Compiled {
    atoms: Vec<Atom>,
    names: Vec<String>,
    premises: Vec<Sent>,
    hypothesis: Sent,
    subset: Vec<(Pred, Pred)>,
    disjoint: Vec<(usize, usize)>,
}

fn remap_pred(p: &Pred, map: &[usize]) -> Pred {
    match p {
        Pred::Atom(i) => Pred::Atom(map[*i]),
        Pred::Not(a) => Pred::Not(Box::new(remap_pred(a, map))),
        Pred::And(a, b) => Pred::And(Box::new(remap_pred(a, map)), Box::new(remap_pred(b, map))),
        Pred::Or(a, b) => Pred::Or(Box::new(remap_pred(a, map)), Box::new(remap_pred(b, map))),
    }
}

fn remap_sent(s: &Sent, map: &[usize], names: &[usize]) -> Sent {
    match s {
        Sent::Quant(d, n, v) => Sent::Quant(*d, remap_pred(n, map), remap_pred(v, map)),
        Sent::Not(a) => Sent::Not(Box::new(remap_sent(a, map, names))),
        Sent::Holds(p, x) => Sent::Holds(remap_pred(p, map), names[*x]),
    }
}

fn related(kb: &KnowledgeBase, a: &Atom, b: &Atom) -> (bool, bool) {
    let (Some(pa), Some(pb)) = (&a.phrase, &b.phrase) else {
        return (false, false);
    };
    if a.object != b.object {
        return (false, false);
    }
    let voices = [Voice::Active, Voice::Passive];
    let sub = kb.is_subsumed(pa, pb)
        || (a.object.is_some()
            && voices
                .iter()
                .any(|va| voices.iter().any(|vb| kb.frame_subsumed((pa, *va), (pb, *vb)))));
    (sub, kb.is_alternative(pa, pb))
}

fn compile(premises: &[Term], hypothesis: &Term, kb: &KnowledgeBase) -> Result<Compiled, Unsupported> {
    let mut c = Compiler::default();
    let ps: Vec<Sent> = premises.iter().map(|p| c.sentence(p, kb)).collect::<Result<_, _>>()?;
    let h = c.sentence(hypothesis, kb)?;
    let mut order: Vec<usize> = (0..c.atoms.len()).collect();
    order.sort_by(|a, b| c.atoms[*a].key.cmp(&c.atoms[*b].key));
    let mut map = vec![0; order.len()];
    for (new, old) in order.iter().enumerate() {
        map[*old] = new;
    }
    let mut name_order: Vec<usize> = (0..c.names.len()).collect();
    name_order.sort_by(|a, b| c.names[*a].cmp(&c.names[*b]));
    let mut name_map = vec![0; name_order.len()];
    for (new, old) in name_order.iter().enumerate() {
        name_map[*old] = new;
    }
    let atoms: Vec<Atom> = order.iter().map(|i| c.atoms[*i].clone()).collect();
    let mut subset: Vec<(Pred, Pred)> = c
        .subsective
        .iter()
        .map(|(i, h)| (Pred::Atom(map[*i]), remap_pred(h, &map)))
        .collect();
    let mut disjoint = Vec::new();
    for (i, a) in atoms.iter().enumerate() {
        for (j, b) in atoms.iter().enumerate() {
            if i == j {
                continue;
            }
            let (sub, alt) = related(kb, a, b);
            if sub {
                subset.push((Pred::Atom(i), Pred::Atom(j)));
            }
            if alt && i < j {
                disjoint.push((i, j));
            }
        }
    }
    Ok(Compiled {
        atoms,
        names: name_order.iter().map(|i| c.names[*i].clone()).collect(),
        premises: ps.iter().map(|s| remap_sent(s, &map, &name_map)).collect(),
        hypothesis: remap_sent(&h, &map, &name_map),
        subset,
        disjoint,
    })
}

impl Compiled {
    fn masks(&self, index: u64, k: usize) -> Vec<u32> {
        let n = self.atoms.len();
        let low = (1u64 << k) - 1;
        (0..n)
            .map(|j| ((index >> (k * (n - 1 - j))) & low) as u32)
            .collect()
    }

    fn is_counter(&self, masks: &[u32], full: u32, relation: SearchedRelation) -> bool {
        if self.subset.iter().any(|(a, b)| eval_pred(a, masks, full) & !eval_pred(b, masks, full) != 0) {
            return false;
        }
        if self.disjoint.iter().any(|(a, b)| masks[*a] & masks[*b] != 0) {
            return false;
        }
        if !self.premises.iter().all(|p| eval_sent(p, masks, full)) {
            return false;
        }
        let h = eval_sent(&self.hypothesis, masks, full);
        match relation {
            SearchedRelation::Entailment => !h,
            SearchedRelation::Contradiction => h,
        }
    }

    fn model(&self, masks: &[u32], k: usize) -> FiniteModel {
        FiniteModel {
            size: k,
            sets: self
                .atoms
                .iter()
                .zip(masks)
                .map(|(a, m)| (a.key.clone(), (0..k).filter(|x| m & (1 << x) != 0).map(|x| x + 1).collect()))
                .collect(),
            names: self.names.iter().enumerate().map(|(i, n)| (n.clone(), i + 1)).collect(),
        }
    }
}

#[cfg(feature = "parallel")]
fn first_index(total: u64, f: impl Fn(u64) -> bool + Sync) -> Option<u64> {
    use rayon::prelude::*;
    (0..total).into_par_iter().find_first(|i| f(*i))
}

#[cfg(not(feature = "parallel"))]
fn first_index(total: u64, f: impl Fn(u64) -> bool) -> Option<u64> {
    (0..total).find(|i| f(*i))
}

/// Truth of a sentence in a model whose sets are keyed as in [`FiniteModel`].
pub fn holds(sentence: &Term, model: &FiniteModel, kb: &KnowledgeBase) -> Result<bool, String> {
    let mut c = Compiler::default();
    let s = c.sentence(sentence, kb)?;
    let masks = c
        .atoms
        .iter()
        .map(|a| {
            let members = model.sets.get(&a.key).ok_or_else(|| format!("model lacks {}", a.key))?;
            Ok(members.iter().fold(0u32, |m, x| m | 1 << (x - 1)))
        })
        .collect::<Result<Vec<u32>, String>>()?;
    let names: Vec<usize> = c
        .names
        .iter()
        .map(|n| model.names.get(n).map(|x| x - 1).ok_or_else(|| format!("model lacks {n}")))
        .collect::<Result<_, _>>()?;
    let s = remap_sent(&s, &(0..c.atoms.len()).collect::<Vec<_>>(), &names);
    Ok(eval_sent(&s, &masks, (1u32 << model.size) - 1))
}

/// First model (smallest universe, then enumeration order) in which the
/// premises hold and the searched relation fails.
pub fn countermodel_search(
    premises: &[Term],
    hypothesis: &Term,
    relation: SearchedRelation,
    kb: &KnowledgeBase,
    max_size: usize,
) -> OracleVerdict {
    let c = match compile(premises, hypothesis, kb) {
        Ok(c) => c,
        Err(reason) => return OracleVerdict::Abstain { reason },
    };
    for k in 1..=max_size.min(16) {
        if c.names.len() > k {
            continue;
        }
        let bits = k * c.atoms.len();
        if bits > MAX_BITS {
            return OracleVerdict::Abstain {
                reason: format!("{} atoms at size {k} exceed the enumeration limit", c.atoms.len()),
            };
        }
        let full = (1u32 << k) - 1;
        let found = first_index(1u64 << bits, |i| c.is_counter(&c.masks(i, k), full, relation));
        if let Some(i) = found {
            return OracleVerdict::Countermodel {
                model: c.model(&c.masks(i, k), k),
            };
        }
    }
    OracleVerdict::NoCountermodel
}

/// Parse a problem and search for a countermodel to the given relation.
pub fn check_problem(
    p: &NliProblem,
    relation: SearchedRelation,
    kb: &KnowledgeBase,
    max_size: usize,
) -> OracleVerdict {
    match p.parse() {
        Err(e) => OracleVerdict::Abstain { reason: e.to_string() },
        Ok(sentences) => {
            let (h, ps) = sentences.split_last().expect("parsed problems are non-empty");
            let ps: Vec<Term> = ps.iter().map(|s| s.root.clone()).collect();
            countermodel_search(&ps, &h.root, relation, kb, max_size)
        }
    }
}

/// Atom keys a problem would use; handy for inspecting countermodels.
pub fn atom_keys(p: &NliProblem, kb: &KnowledgeBase) -> Result<BTreeSet<String>, String> {
    let s = p.parse().map_err(|e| e.to_string())?;
    let (h, ps) = s.split_last().expect("parsed problems are non-empty");
    let ps: Vec<Term> = ps.iter().map(|s| s.root.clone()).collect();
    Ok(compile(&ps, &h.root, kb)?.atoms.into_iter().map(|a| a.key).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn model(size: usize, sets: &[(&str, &[usize])]) -> FiniteModel {
        FiniteModel {
            size,
            sets: sets.iter().map(|(k, v)| (k.to_string(), v.to_vec())).collect(),
            names: BTreeMap::new(),
        }
    }

    fn holds_in(s: &str, m: &FiniteModel) -> bool {
        holds(&parse(s, 1).unwrap().root, m, &KnowledgeBase::default_kb()).unwrap()
    }

    #[test]
    fn determiner_semantics() {
        assert!(holds_in("some bird flies", &model(1, &[("bird", &[1]), ("fly", &[1])])));
        assert!(!holds_in("many birds fly", &model(2, &[("bird", &[1, 2]), ("fly", &[1])])));
        assert!(holds_in("no birds fly", &model(1, &[("bird", &[]), ("fly", &[])])));
        assert!(holds_in("few birds fly", &model(3, &[("bird", &[1, 2, 3]), ("fly", &[1])])));
        assert!(!holds_in("few birds fly", &model(2, &[("bird", &[]), ("fly", &[])])));
    }

    fn verdict(p: &str, h: &str, r: SearchedRelation) -> OracleVerdict {
        check_problem(&NliProblem::new("o", &[p], h), r, &KnowledgeBase::default_kb(), DEFAULT_MAX_SIZE)
    }

    #[test]
    fn some_does_not_entail_all() {
        let OracleVerdict::Countermodel { model } = verdict("some birds fly", "all birds fly", SearchedRelation::Entailment)
        else {
            panic!("expected a countermodel");
        };
        assert_eq!(model.size, 2);
        assert_eq!(model.to_string(), "bird={1,2}, fly={1}");
    }

    #[test]
    fn proved_relations_have_no_countermodel() {
        use SearchedRelation::*;
        assert_eq!(verdict("many birds hover high", "few birds fly", Contradiction), OracleVerdict::NoCountermodel);
        assert_eq!(verdict("few birds fly", "many birds hover high", Contradiction), OracleVerdict::NoCountermodel);
        assert_eq!(verdict("every dog barks", "every dog barks", Entailment), OracleVerdict::NoCountermodel);
        assert_eq!(verdict("Not all birds fly", "Some bird does not fly", Entailment), OracleVerdict::NoCountermodel);
        assert_eq!(
            verdict(
                "Drugs that slow down or halt Alzheimer's disease work best the earlier you administer them",
                "Alzheimer's disease is treated using drugs",
                Entailment
            ),
            OracleVerdict::NoCountermodel
        );
        assert_eq!(verdict("no birds fly", "some birds hover", Contradiction), OracleVerdict::NoCountermodel);
    }

    #[test]
    fn names_and_abstention() {
        use SearchedRelation::*;
        let OracleVerdict::Countermodel { model } = verdict("John sleeps", "some dog barks", Entailment) else {
            panic!("expected a countermodel");
        };
        assert_eq!(model.names["John"], 1);
        let p = NliProblem::new("bad", &["some birds fly"], "zzz");
        assert!(matches!(
            check_problem(&p, Entailment, &KnowledgeBase::default_kb(), 3),
            OracleVerdict::Abstain { .. }
        ));
    }

    #[test]
    fn small_animal_phrase_constrains_mice() {
        use SearchedRelation::*;
        assert_eq!(verdict("some mice sleep", "some small animals sleep", Entailment), OracleVerdict::NoCountermodel);
    }
}
