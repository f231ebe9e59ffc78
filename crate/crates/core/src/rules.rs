//! Tableau expansion rules.
//!
//! Sign tables (x is a fresh entity or a witness already on the branch):
//!
//! | rule        | antecedent                 | produces                                   |
//! |-------------|----------------------------|--------------------------------------------|
//! | ¬           | not:[X, ā]:±               | X:[ā]:∓                                    |
//! | ∧           | and/that:[A, B, ā]:T       | A:[ā]:T, B:[ā]:T                           |
//! | ∧ (F)       | and/that:[A, B, ā]:F       | A:[ā]:F  ‖  B:[ā]:F                        |
//! | ∨           | or:[A, B, ā]:T             | A:[ā]:T  ‖  B:[ā]:T                        |
//! | ∨ (F)       | or:[A, B, ā]:F             | A:[ā]:F, B:[ā]:F                           |
//! | ∃_T         | some:[N, V]:T, no:[N, V]:F | N:[x]:T, V:[x]:T                           |
//! | ∀_F         | every:[N, V]:F             | N:[x]:T, V:[x]:F                           |
//! | ∃_F         | some:[N, V]:F              | V:[x]:F if N:[x]:T on branch, else N:[x]:F ‖ V:[x]:F |
//! | substitute  | ∃_F with a passive scope   | as ∃_F                                     |
//! | ∀_T         | every:[N, V]:T             | V:[x]:T if N:[x]:T on branch, else N:[x]:F ‖ V:[x]:T |
//! | ∀_T (no)    | no:[N, V]:T                | V:[x]:F if N:[x]:T on branch, else N:[x]:F ‖ V:[x]:F |
//! | upDisCov    | f↑:[..x..]:T, g:[..y..]:T  | x:[c]:T, y:[c]:F  ‖  f ..y.. :T, g ..y.. :T |
//! | downSubst   | f↓:[..x..]:T, g:[..y..]:T  | y:[c]:T, x:[c]:F  ‖  f ..y.. :T, g ..y.. :T |
//! | adj⊂_T      | M:[H, ā]:T, M subsective   | H:[ā]:T                                    |
//! | a»          | non-canonical entry        | the same entry, fully pushed               |
//!
//! `some` covers `a`, `the` and bare plurals; `every` covers `all`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lexicon::{Direction, KnowledgeBase};
use crate::tableau::{NodeId, Sign};
use crate::terms::{canonical_form, Spine, Term, TermType, Voice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleName {
    #[serde(rename = "not")]
    Neg,
    #[serde(rename = "and")]
    And,
    #[serde(rename = "or")]
    Or,
    #[serde(rename = "exists_T")]
    ExistsT,
    #[serde(rename = "forall_F")]
    ForallF,
    #[serde(rename = "exists_F")]
    ExistsF,
    #[serde(rename = "forall_T")]
    ForallT,
    #[serde(rename = "substitute")]
    Substitute,
    #[serde(rename = "upDisCov")]
    UpDisCov,
    #[serde(rename = "downSubst")]
    DownSubst,
    #[serde(rename = "adj_sub_T")]
    AdjSubT,
    #[serde(rename = "arg_push")]
    ArgPush,
    #[serde(rename = "close_sub")]
    CloseSub,
    #[serde(rename = "close_alt")]
    CloseAlt,
    #[serde(rename = "frame_alt")]
    FrameAlt,
}

impl RuleName {
    pub const ALL: [RuleName; 15] = [
        RuleName::Neg,
        RuleName::And,
        RuleName::Or,
        RuleName::ExistsT,
        RuleName::ForallF,
        RuleName::ExistsF,
        RuleName::ForallT,
        RuleName::Substitute,
        RuleName::UpDisCov,
        RuleName::DownSubst,
        RuleName::AdjSubT,
        RuleName::ArgPush,
        RuleName::CloseSub,
        RuleName::CloseAlt,
        RuleName::FrameAlt,
    ];

    /// Stable identifier used in files.
    pub fn id(self) -> &'static str {
        match self {
            RuleName::Neg => "not",
            RuleName::And => "and",
            RuleName::Or => "or",
            RuleName::ExistsT => "exists_T",
            RuleName::ForallF => "forall_F",
            RuleName::ExistsF => "exists_F",
            RuleName::ForallT => "forall_T",
            RuleName::Substitute => "substitute",
            RuleName::UpDisCov => "upDisCov",
            RuleName::DownSubst => "downSubst",
            RuleName::AdjSubT => "adj_sub_T",
            RuleName::ArgPush => "arg_push",
            RuleName::CloseSub => "close_sub",
            RuleName::CloseAlt => "close_alt",
            RuleName::FrameAlt => "frame_alt",
        }
    }

    pub fn from_id(s: &str) -> Option<RuleName> {
        Self::ALL.into_iter().find(|r| r.id() == s)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            RuleName::Neg => "\u{ac}",
            RuleName::And => "\u{2227}",
            RuleName::Or => "\u{2228}",
            RuleName::ExistsT => "\u{2203}_T",
            RuleName::ForallF => "\u{2200}_F",
            RuleName::ExistsF => "\u{2203}_F",
            RuleName::ForallT => "\u{2200}_T",
            RuleName::Substitute => "substitute",
            RuleName::UpDisCov => "upDisCov",
            RuleName::DownSubst => "downSubst",
            RuleName::AdjSubT => "adj\u{2282}_T",
            RuleName::ArgPush => "a\u{bb}",
            RuleName::CloseSub => "\u{d7}\u{2291}",
            RuleName::CloseAlt => "\u{d7}|",
            RuleName::FrameAlt => "\u{d7}frame_alt",
        }
    }

    pub fn is_closure(self) -> bool {
        matches!(self, RuleName::CloseSub | RuleName::CloseAlt | RuleName::FrameAlt)
    }

    pub fn is_structural(self) -> bool {
        self == RuleName::ArgPush
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Where a produced entry takes its surface form from.
#[derive(Debug, Clone)]
pub enum SurfaceSource {
    Term(Term),
    Copy(NodeId),
}

#[derive(Debug, Clone)]
pub struct NewEntry {
    pub spine: Spine,
    pub sign: Sign,
    pub surface: SurfaceSource,
    pub structural: bool,
}

impl NewEntry {
    /// Canonical entry for `head` applied to `args`.
    fn canonical(head: &Term, args: &[Term], sign: Sign) -> Option<NewEntry> {
        let (h, a) = canonical_form(head, args).ok()?;
        Some(NewEntry {
            spine: Spine::new(h, a),
            sign,
            surface: SurfaceSource::Term(surface_term(head, args)),
            structural: false,
        })
    }

    /// Entry laid out as `f a1 .. a(n-1) : [an]`.
    fn last_pushed(head: &Term, args: &[Term], sign: Sign) -> NewEntry {
        let (last, init) = args.split_last().expect("non-empty argument list");
        NewEntry {
            spine: Spine::new(Term::app(head.clone(), init.to_vec()), vec![last.clone()]),
            sign,
            surface: SurfaceSource::Term(surface_term(head, args)),
            structural: false,
        }
    }
}

/// Unflattened application, so an anchor on `head` survives into the surface.
fn surface_term(head: &Term, args: &[Term]) -> Term {
    if args.is_empty() {
        return head.clone();
    }
    Term::App {
        head: Box::new(head.clone()),
        args: args.to_vec(),
        anchor: None,
    }
}

/// One produced segment per branch: one for linear rules, two for branching ones.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub rule: RuleName,
    pub branches: Vec<Vec<NewEntry>>,
}

impl Expansion {
    pub fn is_branching(&self) -> bool {
        self.branches.len() > 1
    }
}

/// An entry as the rules see it.
#[derive(Debug, Clone, Copy)]
pub struct EntryRef<'a> {
    pub id: NodeId,
    pub spine: &'a Spine,
    pub sign: Sign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantKind {
    Exists,
    Forall,
    No,
}

pub fn quantifier_kind(lemma: &str) -> Option<QuantKind> {
    match lemma {
        "some" | "a" | "the" => Some(QuantKind::Exists),
        "every" | "all" => Some(QuantKind::Forall),
        "no" => Some(QuantKind::No),
        _ => None,
    }
}

/// `Q:[N, V]` with a quantifier head.
fn quantified<'a>(e: &EntryRef<'a>) -> Option<(QuantKind, &'a Term, &'a Term)> {
    let c = e.spine.head.as_const()?;
    if c.ty != TermType::quantifier() || e.spine.args.len() != 2 {
        return None;
    }
    Some((quantifier_kind(&c.lemma)?, &e.spine.args[0], &e.spine.args[1]))
}

fn boolean_head<'a>(e: &EntryRef<'a>) -> Option<&'a str> {
    let c = e.spine.head.as_const()?;
    matches!(c.ty, TermType::Fn(..)).then_some(())?;
    match c.lemma.as_str() {
        l @ ("not" | "and" | "that" | "or") => Some(l),
        _ => None,
    }
}

/// ¬, ∧ and ∨. Returns `None` for non-boolean heads.
pub fn apply_boolean(e: &EntryRef) -> Option<Expansion> {
    if !e.spine.is_canonical() {
        return None;
    }
    let head = boolean_head(e)?;
    let args = &e.spine.args;
    if head == "not" {
        let (body, rest) = args.split_first()?;
        let out = NewEntry::canonical(body, rest, e.sign.flip())?;
        return Some(Expansion { rule: RuleName::Neg, branches: vec![vec![out]] });
    }
    if args.len() < 2 {
        return None;
    }
    let rest = &args[2..];
    let a = NewEntry::canonical(&args[0], rest, e.sign)?;
    let b = NewEntry::canonical(&args[1], rest, e.sign)?;
    let conjunctive = head != "or";
    let rule = if conjunctive { RuleName::And } else { RuleName::Or };
    let linear = conjunctive == (e.sign == Sign::T);
    let branches = if linear { vec![vec![a, b]] } else { vec![vec![a], vec![b]] };
    Some(Expansion { rule, branches })
}

/// Whether [`apply_boolean`] would branch on this entry.
pub fn boolean_branches(e: &EntryRef) -> Option<bool> {
    let head = boolean_head(e)?;
    Some(match head {
        "not" => false,
        "or" => e.sign == Sign::T,
        _ => e.sign == Sign::F,
    })
}

/// Quantifier rules introducing a fresh entity: ∃_T (also `no` under F) and ∀_F.
pub fn apply_quantifier_fresh(e: &EntryRef, fresh: &Term) -> Option<Expansion> {
    if !e.spine.is_canonical() {
        return None;
    }
    let (kind, noun, scope) = quantified(e)?;
    let x = std::slice::from_ref(fresh);
    let (rule, scope_sign) = match (kind, e.sign) {
        (QuantKind::Exists, Sign::T) | (QuantKind::No, Sign::F) => (RuleName::ExistsT, Sign::T),
        (QuantKind::Forall, Sign::F) => (RuleName::ForallF, Sign::F),
        _ => return None,
    };
    let n = NewEntry::canonical(noun, x, Sign::T)?;
    let v = NewEntry::canonical(scope, x, scope_sign)?;
    Some(Expansion { rule, branches: vec![vec![n, v]] })
}

/// Instantiation of ∃_F, ∀_T and `no`:T with a witness already on the branch.
/// Linear when `noun_known` (N:[x]:T is on the branch), branching otherwise.
pub fn apply_quantifier_instantiate(e: &EntryRef, witness: &Term, noun_known: bool) -> Option<Expansion> {
    if !e.spine.is_canonical() {
        return None;
    }
    let (kind, noun, scope) = quantified(e)?;
    let x = std::slice::from_ref(witness);
    let (rule, scope_sign) = match (kind, e.sign) {
        (QuantKind::Exists, Sign::F) => {
            let passive = scope.head_const().is_some_and(|c| c.voice == Voice::Passive);
            (if passive { RuleName::Substitute } else { RuleName::ExistsF }, Sign::F)
        }
        (QuantKind::Forall, Sign::T) => (RuleName::ForallT, Sign::T),
        (QuantKind::No, Sign::T) => (RuleName::ForallT, Sign::F),
        _ => return None,
    };
    let v = NewEntry::canonical(scope, x, scope_sign)?;
    let branches = if noun_known {
        vec![vec![v]]
    } else {
        vec![vec![NewEntry::canonical(noun, x, Sign::F)?], vec![v]]
    };
    Some(Expansion { rule, branches })
}

/// Whether the entry is an instantiation target (∃_F, ∀_T, `no`:T); returns its noun.
pub fn instantiation_noun<'a>(e: &EntryRef<'a>) -> Option<&'a Term> {
    if !e.spine.is_canonical() {
        return None;
    }
    let (kind, noun, _) = quantified(e)?;
    matches!(
        (kind, e.sign),
        (QuantKind::Exists, Sign::F) | (QuantKind::Forall, Sign::T) | (QuantKind::No, Sign::T)
    )
    .then_some(noun)
}

pub fn is_fresh_target(e: &EntryRef) -> bool {
    e.spine.is_canonical()
        && quantified(e).is_some_and(|(k, _, _)| {
            matches!(
                (k, e.sign),
                (QuantKind::Exists, Sign::T) | (QuantKind::No, Sign::F) | (QuantKind::Forall, Sign::F)
            )
        })
}

/// upDisCov / downSubst on argument `position` (1-based) of `e1`'s functor.
pub fn apply_monotonicity(
    e1: &EntryRef,
    e2: &EntryRef,
    position: usize,
    kb: &KnowledgeBase,
    fresh: &Term,
) -> Option<Expansion> {
    if e1.sign != Sign::T || e2.sign != Sign::T || !e1.spine.is_canonical() || !e2.spine.is_canonical() {
        return None;
    }
    let f = e1.spine.head.as_const()?;
    let g = e2.spine.head.as_const()?;
    let (xs, ys) = (&e1.spine.args, &e2.spine.args);
    if xs.len() != ys.len() || position == 0 || position > xs.len() {
        return None;
    }
    let i = position - 1;
    let rule = match kb.monotonicity(&f.lemma, position) {
        Direction::Up => RuleName::UpDisCov,
        Direction::Down => RuleName::DownSubst,
        Direction::None => return None,
    };
    let param = |t: &TermType| match t {
        TermType::Fn(params, _) => params.get(i).cloned(),
        _ => None,
    };
    let pty = param(&f.ty)?;
    if !pty.is_property() || param(&g.ty)? != pty {
        return None;
    }
    let (x, y) = (&xs[i], &ys[i]);
    if x == y || (0..xs.len()).any(|j| j != i && xs[j] != ys[j]) {
        return None;
    }
    let c = std::slice::from_ref(fresh);
    let (sub, sup) = if rule == RuleName::UpDisCov { (x, y) } else { (y, x) };
    let left = vec![
        NewEntry::canonical(sub, c, Sign::T)?,
        NewEntry::canonical(sup, c, Sign::F)?,
    ];
    let mut moved = xs.clone();
    moved[i] = y.clone();
    let right = vec![
        NewEntry::last_pushed(&e1.spine.head, &moved, Sign::T),
        NewEntry::last_pushed(&e2.spine.head, ys, Sign::T),
    ];
    Some(Expansion { rule, branches: vec![left, right] })
}

/// Subsective modifier drop under T.
pub fn apply_modifier(e: &EntryRef, kb: &KnowledgeBase) -> Option<Expansion> {
    if e.sign != Sign::T || !e.spine.is_canonical() {
        return None;
    }
    let m = e.spine.head.as_const()?;
    let TermType::Fn(params, result) = &m.ty else {
        return None;
    };
    if params.len() != 1 || params[0] != **result || !result.is_property() || !kb.is_subsective(&m.lemma) {
        return None;
    }
    let (modified, rest) = e.spine.args.split_first()?;
    let out = NewEntry::canonical(modified, rest, Sign::T)?;
    Some(Expansion { rule: RuleName::AdjSubT, branches: vec![vec![out]] })
}

/// a»: rewrite a non-canonical entry into its fully pushed layout.
pub fn normalize_args(e: &EntryRef) -> Option<Expansion> {
    if e.spine.is_canonical() {
        return None;
    }
    let (h, a) = canonical_form(&e.spine.head, &e.spine.args).ok()?;
    Some(Expansion {
        rule: RuleName::ArgPush,
        branches: vec![vec![NewEntry {
            spine: Spine::new(h, a),
            sign: e.sign,
            surface: SurfaceSource::Copy(e.id),
            structural: true,
        }]],
    })
}

/// Re-apply a named rule to given antecedents, as recorded in a proof log.
/// `witness` is the fresh or instantiated individual, `position` the
/// monotone argument. Returns `None` if the rule does not apply as recorded.
pub fn apply_named(
    rule: RuleName,
    ants: &[EntryRef],
    witness: Option<&Term>,
    position: Option<usize>,
    kb: &KnowledgeBase,
) -> Option<Expansion> {
    let first = ants.first()?;
    let x = match rule {
        RuleName::Neg | RuleName::And | RuleName::Or => apply_boolean(first),
        RuleName::ExistsT | RuleName::ForallF => apply_quantifier_fresh(first, witness?),
        RuleName::ExistsF | RuleName::ForallT | RuleName::Substitute => {
            apply_quantifier_instantiate(first, witness?, ants.len() == 2)
        }
        RuleName::UpDisCov | RuleName::DownSubst => {
            apply_monotonicity(first, ants.get(1)?, position?, kb, witness?)
        }
        RuleName::AdjSubT => apply_modifier(first, kb),
        RuleName::ArgPush => normalize_args(first),
        RuleName::CloseSub | RuleName::CloseAlt | RuleName::FrameAlt => None,
    }?;
    (x.rule == rule).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn spine_of(text: &str) -> Spine {
        let p = parse(text, 1).unwrap();
        let (h, a) = canonical_form(&p.root, &[]).unwrap();
        Spine::new(h, a)
    }

    fn show(e: &NewEntry) -> String {
        let args: Vec<String> = e.spine.args.iter().map(|t| t.to_string()).collect();
        format!("{} : [{}] : {:?}", e.spine.head, args.join(", "), e.sign)
    }

    fn shows(x: &Expansion) -> Vec<Vec<String>> {
        x.branches.iter().map(|b| b.iter().map(show).collect()).collect()
    }

    fn r(id: NodeId, spine: &Spine, sign: Sign) -> EntryRef<'_> {
        EntryRef { id, spine, sign }
    }

    #[test]
    fn negation_flips_sign() {
        let s = spine_of("Not all birds fly");
        let x = apply_boolean(&r(1, &s, Sign::T)).unwrap();
        assert_eq!(x.rule, RuleName::Neg);
        assert_eq!(shows(&x), vec![vec!["all : [bird, fly] : F"]]);
    }

    #[test]
    fn relative_clause_is_conjunction() {
        let s = spine_of("The drugs that slow down or halt Alzheimer's disease work best the earlier you administer them");
        let d = Term::entity("d");
        let ex = apply_quantifier_fresh(&r(1, &s, Sign::T), &d).unwrap();
        assert_eq!(ex.rule, RuleName::ExistsT);
        let three = &ex.branches[0][0].spine;
        let x = apply_boolean(&r(3, three, Sign::T)).unwrap();
        assert_eq!(x.rule, RuleName::And);
        assert!(!x.is_branching());
        assert_eq!(show(&x.branches[0][0]), "drug : [d] : T");
        let five = &x.branches[0][1].spine;
        let y = apply_boolean(&r(5, five, Sign::T)).unwrap();
        assert_eq!(y.rule, RuleName::Or);
        assert_eq!(
            shows(&y),
            vec![
                vec!["slow_down : [Alzheimer's_disease, d] : T"],
                vec!["halt : [Alzheimer's_disease, d] : T"]
            ]
        );
    }

    #[test]
    fn forall_false_introduces_counterexample() {
        let s = spine_of("all birds fly");
        let x = apply_quantifier_fresh(&r(1, &s, Sign::F), &Term::entity("c")).unwrap();
        assert_eq!(x.rule, RuleName::ForallF);
        assert_eq!(shows(&x), vec![vec!["bird : [c] : T", "fly : [c] : F"]]);
        assert!(apply_quantifier_fresh(&r(1, &s, Sign::T), &Term::entity("c")).is_none());
    }

    #[test]
    fn exists_false_with_known_noun_is_linear() {
        let s = spine_of("some bird does not fly");
        let x = apply_quantifier_instantiate(&r(2, &s, Sign::F), &Term::entity("c"), true).unwrap();
        assert_eq!(x.rule, RuleName::ExistsF);
        assert_eq!(shows(&x), vec![vec!["not : [fly, c] : F"]]);
        let y = apply_quantifier_instantiate(&r(2, &s, Sign::F), &Term::entity("c"), false).unwrap();
        assert!(y.is_branching());
    }

    #[test]
    fn passive_scope_is_substitute() {
        let p = parse("Alzheimer's disease is treated using drugs", 2).unwrap();
        let (h, a) = canonical_form(&p.root, &[]).unwrap();
        let s = Spine::new(h, a);
        let x = apply_quantifier_instantiate(&r(2, &s, Sign::F), &Term::entity("d"), true).unwrap();
        assert_eq!(x.rule, RuleName::Substitute);
        assert_eq!(shows(&x), vec![vec!["treat@pass : [Alzheimer's_disease, d] : F"]]);
    }

    #[test]
    fn universal_instantiation() {
        let s = spine_of("all birds fly");
        let x = apply_quantifier_instantiate(&r(1, &s, Sign::T), &Term::entity("c"), true).unwrap();
        assert_eq!(x.rule, RuleName::ForallT);
        assert_eq!(shows(&x), vec![vec!["fly : [c] : T"]]);
    }

    #[test]
    fn up_monotonicity_figure() {
        let kb = KnowledgeBase::default_kb();
        let s1 = spine_of("many birds hover high");
        let s2 = spine_of("few birds fly");
        let x = apply_monotonicity(&r(1, &s1, Sign::T), &r(2, &s2, Sign::T), 2, &kb, &Term::entity("c")).unwrap();
        assert_eq!(x.rule, RuleName::UpDisCov);
        assert_eq!(
            shows(&x),
            vec![
                vec!["high : [hover, c] : T", "fly : [c] : F"],
                vec!["(many bird) : [fly] : T", "(few bird) : [fly] : T"]
            ]
        );
        // few is downward: the dual rule with roles swapped.
        let y = apply_monotonicity(&r(2, &s2, Sign::T), &r(1, &s1, Sign::T), 2, &kb, &Term::entity("c")).unwrap();
        assert_eq!(y.rule, RuleName::DownSubst);
        assert_eq!(show(&y.branches[0][0]), "high : [hover, c] : T");
        assert_eq!(show(&y.branches[0][1]), "fly : [c] : F");
    }

    #[test]
    fn monotonicity_needs_distinct_arguments() {
        let kb = KnowledgeBase::default_kb();
        let s1 = spine_of("many birds fly");
        let s2 = spine_of("few birds fly");
        assert!(apply_monotonicity(&r(1, &s1, Sign::T), &r(2, &s2, Sign::T), 2, &kb, &Term::entity("c")).is_none());
        let s3 = spine_of("few dogs hover");
        assert!(apply_monotonicity(&r(1, &s1, Sign::T), &r(2, &s3, Sign::T), 2, &kb, &Term::entity("c")).is_none());
        // unmarked position
        let s4 = spine_of("few dogs fly");
        assert!(apply_monotonicity(&r(1, &s1, Sign::T), &r(2, &s4, Sign::T), 1, &kb, &Term::entity("c")).is_none());
    }

    #[test]
    fn subsective_drop() {
        let kb = KnowledgeBase::default_kb();
        let hh = spine_of("many birds hover high").args[1].clone();
        let (h, a) = canonical_form(&hh, &[Term::entity("c")]).unwrap();
        let s = Spine::new(h, a);
        let x = apply_modifier(&r(3, &s, Sign::T), &kb).unwrap();
        assert_eq!(shows(&x), vec![vec!["hover : [c] : T"]]);
        assert!(apply_modifier(&r(3, &s, Sign::F), &kb).is_none());
    }

    #[test]
    fn non_subsective_modifier_is_kept() {
        let kb = KnowledgeBase::default_kb();
        let np = spine_of("some small animals sleep").args[0].clone();
        let (h, a) = canonical_form(&np, &[Term::entity("c")]).unwrap();
        let s = Spine::new(h, a);
        assert!(apply_modifier(&r(3, &s, Sign::T), &kb).is_none());
    }

    #[test]
    fn argument_push() {
        let s1 = spine_of("many birds fly");
        let pushed = s1.pop_arg().unwrap();
        let x = normalize_args(&r(5, &pushed, Sign::T)).unwrap();
        assert_eq!(shows(&x), vec![vec!["many : [bird, fly] : T"]]);
        assert!(x.branches[0][0].structural);
        assert!(normalize_args(&r(5, &s1, Sign::T)).is_none());
    }

    #[test]
    fn rule_ids_round_trip() {
        for r in RuleName::ALL {
            assert_eq!(RuleName::from_id(r.id()), Some(r));
            let json = serde_json::to_string(&r).unwrap();
            assert_eq!(json, format!("\"{}\"", r.id()));
        }
    }
}
