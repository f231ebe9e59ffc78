//! Typed natural-logic terms, surface anchors and the argument-list normal form.
//!
//! A tableau entry is a term paired with an argument list, e.g. `many : [bird, fly]`.
//! The same content can be written as `many bird fly : []` or `many bird : [fly]`;
//! [`Spine`] moves arguments across that boundary and [`canonical_form`] fixes the
//! fully pushed layout (bare constant head, every argument in the list).

use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("ill-typed term: cannot apply `{head}` of type {head_ty} to `{arg}` of type {arg_ty}")]
    IllTyped {
        head: String,
        head_ty: TermType,
        arg: String,
        arg_ty: TermType,
    },
    #[error("argument boundary reached: {0}")]
    Boundary(&'static str),
    #[error("anchor S{sentence}[{start}:{end}] is out of bounds or not on a character boundary")]
    BadAnchor {
        sentence: usize,
        start: usize,
        end: usize,
    },
}

/// Base and function types. `N` and `Vp` are properties: applied to an entity they
/// yield a truth value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TermType {
    E,
    S,
    N,
    Vp,
    Fn(Vec<TermType>, Box<TermType>),
}

impl TermType {
    pub fn func(params: Vec<TermType>, result: TermType) -> Self {
        assert!(!params.is_empty(), "function types take at least one argument");
        TermType::Fn(params, Box::new(result))
    }

    /// Quantifier type `(n, vp, s)`.
    pub fn quantifier() -> Self {
        Self::func(vec![TermType::N, TermType::Vp], TermType::S)
    }

    pub fn is_property(&self) -> bool {
        matches!(self, TermType::N | TermType::Vp)
    }

    /// Result of applying a term of this type to one argument of type `arg`.
    pub fn apply(&self, arg: &TermType) -> Option<TermType> {
        match self {
            TermType::Fn(params, result) => {
                if &params[0] != arg {
                    return None;
                }
                if params.len() == 1 {
                    Some((**result).clone())
                } else {
                    Some(TermType::Fn(params[1..].to_vec(), result.clone()))
                }
            }
            TermType::N | TermType::Vp if *arg == TermType::E => Some(TermType::S),
            _ => None,
        }
    }

    /// Expected type of the next argument, if any.
    pub fn next_param(&self) -> Option<&TermType> {
        match self {
            TermType::Fn(params, _) => params.first(),
            TermType::N | TermType::Vp => Some(&TermType::E),
            _ => None,
        }
    }
}

impl fmt::Display for TermType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermType::E => f.write_str("e"),
            TermType::S => f.write_str("s"),
            TermType::N => f.write_str("n"),
            TermType::Vp => f.write_str("vp"),
            TermType::Fn(params, result) => {
                f.write_str("(")?;
                for p in params {
                    write!(f, "{p},")?;
                }
                write!(f, "{result})")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Voice {
    #[default]
    Active,
    Passive,
}

impl fmt::Display for Voice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Voice::Active => "active",
            Voice::Passive => "passive",
        })
    }
}

/// Byte span `[start, end)` into sentence `sentence` (1-based: S1 is the first premise).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpanAnchor {
    pub sentence: usize,
    pub start: usize,
    pub end: usize,
}

impl SpanAnchor {
    pub fn new(sentence: usize, start: usize, end: usize) -> Self {
        Self { sentence, start, end }
    }

    pub fn slice<'a>(&self, texts: &'a [String]) -> Result<&'a str, TermError> {
        let bad = TermError::BadAnchor {
            sentence: self.sentence,
            start: self.start,
            end: self.end,
        };
        let text = self
            .sentence
            .checked_sub(1)
            .and_then(|i| texts.get(i))
            .ok_or(bad.clone())?;
        if self.start >= self.end {
            return Err(bad);
        }
        text.get(self.start..self.end).ok_or(bad)
    }
}

impl fmt::Display for SpanAnchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}[{}:{}]", self.sentence, self.start, self.end)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Constant {
    pub lemma: String,
    pub ty: TermType,
    #[serde(default, skip_serializing_if = "is_active")]
    pub voice: Voice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<SpanAnchor>,
    /// No surface realisation (the determiner of a bare plural).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub covert: bool,
}

fn is_active(v: &Voice) -> bool {
    *v == Voice::Active
}

/// Natural-logic term. Equality and hashing ignore anchors and the covert flag:
/// two terms are equal when they say the same thing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Term {
    Const(Constant),
    Entity(String),
    App {
        head: Box<Term>,
        args: Vec<Term>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        anchor: Option<SpanAnchor>,
    },
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Term::Const(a), Term::Const(b)) => {
                a.lemma == b.lemma && a.ty == b.ty && a.voice == b.voice
            }
            (Term::Entity(a), Term::Entity(b)) => a == b,
            (
                Term::App { head: h1, args: a1, .. },
                Term::App { head: h2, args: a2, .. },
            ) => h1 == h2 && a1 == a2,
            _ => false,
        }
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Term::Const(c) => {
                0u8.hash(state);
                c.lemma.hash(state);
                c.ty.hash(state);
                c.voice.hash(state);
            }
            Term::Entity(e) => {
                1u8.hash(state);
                e.hash(state);
            }
            Term::App { head, args, .. } => {
                2u8.hash(state);
                head.hash(state);
                args.hash(state);
            }
        }
    }
}

impl Term {
    pub fn constant(lemma: impl Into<String>, ty: TermType) -> Term {
        Term::Const(Constant {
            lemma: lemma.into(),
            ty,
            voice: Voice::Active,
            anchor: None,
            covert: false,
        })
    }

    pub fn anchored(lemma: impl Into<String>, ty: TermType, anchor: SpanAnchor) -> Term {
        Term::Const(Constant {
            lemma: lemma.into(),
            ty,
            voice: Voice::Active,
            anchor: Some(anchor),
            covert: false,
        })
    }

    pub fn entity(name: impl Into<String>) -> Term {
        Term::Entity(name.into())
    }

    /// Application that flattens nested heads: `app(app(f, [a]), [b]) == f a b`.
    /// No type check; use [`Term::apply`] for checked construction.
    pub fn app(head: Term, mut args: Vec<Term>) -> Term {
        if args.is_empty() {
            return head;
        }
        match head {
            Term::App { head: inner, args: mut first, .. } => {
                first.append(&mut args);
                Term::App { head: inner, args: first, anchor: None }
            }
            head => Term::App { head: Box::new(head), args, anchor: None },
        }
    }

    pub fn apply(head: Term, args: Vec<Term>) -> Result<Term, TermError> {
        let t = Term::app(head, args);
        t.ty()?;
        Ok(t)
    }

    pub fn with_anchor(mut self, span: SpanAnchor) -> Term {
        match &mut self {
            Term::Const(c) => c.anchor = Some(span),
            Term::App { anchor, .. } => *anchor = Some(span),
            Term::Entity(_) => {}
        }
        self
    }

    pub fn with_voice(mut self, v: Voice) -> Term {
        if let Term::Const(c) = &mut self {
            c.voice = v;
        }
        self
    }

    pub fn covert(mut self) -> Term {
        if let Term::Const(c) = &mut self {
            c.covert = true;
        }
        self
    }

    pub fn anchor(&self) -> Option<SpanAnchor> {
        match self {
            Term::Const(c) => c.anchor,
            Term::App { anchor, .. } => *anchor,
            Term::Entity(_) => None,
        }
    }

    pub fn as_const(&self) -> Option<&Constant> {
        match self {
            Term::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn lemma(&self) -> Option<&str> {
        self.as_const().map(|c| c.lemma.as_str())
    }

    /// The innermost head constant of an application, or the term itself.
    pub fn head_const(&self) -> Option<&Constant> {
        match self {
            Term::Const(c) => Some(c),
            Term::App { head, .. } => head.head_const(),
            Term::Entity(_) => None,
        }
    }

    pub fn is_individual(&self) -> bool {
        match self {
            Term::Entity(_) => true,
            Term::Const(c) => c.ty == TermType::E,
            Term::App { .. } => false,
        }
    }

    /// Type of the term; fails on the first ill-typed application.
    pub fn ty(&self) -> Result<TermType, TermError> {
        match self {
            Term::Const(c) => Ok(c.ty.clone()),
            Term::Entity(_) => Ok(TermType::E),
            Term::App { head, args, .. } => {
                let mut ty = head.ty()?;
                let mut so_far = (**head).clone();
                for a in args {
                    let at = a.ty()?;
                    ty = ty.apply(&at).ok_or_else(|| TermError::IllTyped {
                        head: so_far.to_string(),
                        head_ty: ty.clone(),
                        arg: a.to_string(),
                        arg_ty: at.clone(),
                    })?;
                    so_far = Term::app(so_far, vec![a.clone()]);
                }
                Ok(ty)
            }
        }
    }

    /// Entities occurring anywhere in the term, in order of first occurrence.
    pub fn collect_individuals(&self, out: &mut Vec<Term>) {
        match self {
            Term::Entity(_) => {
                if !out.contains(self) {
                    out.push(self.clone())
                }
            }
            Term::Const(c) if c.ty == TermType::E => {
                if !out.contains(self) {
                    out.push(self.clone())
                }
            }
            Term::Const(_) => {}
            Term::App { head, args, .. } => {
                head.collect_individuals(out);
                for a in args {
                    a.collect_individuals(out);
                }
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => {
                if c.lemma.contains(' ') {
                    write!(f, "{}", c.lemma.replace(' ', "_"))?;
                } else {
                    f.write_str(&c.lemma)?;
                }
                if c.voice == Voice::Passive {
                    f.write_str("@pass")?;
                }
                Ok(())
            }
            Term::Entity(e) => f.write_str(e),
            Term::App { head, args, .. } => {
                write!(f, "({head}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A term split into a head and an argument list: the layout of a tableau entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Spine {
    pub head: Term,
    pub args: Vec<Term>,
}

impl Spine {
    pub fn new(head: Term, args: Vec<Term>) -> Self {
        Self { head, args }
    }

    /// The whole content as a single term.
    pub fn to_term(&self) -> Term {
        Term::app(self.head.clone(), self.args.clone())
    }

    pub fn ty(&self) -> Result<TermType, TermError> {
        self.to_term().ty()
    }

    pub fn is_canonical(&self) -> bool {
        !matches!(self.head, Term::App { .. })
    }

    /// Move the last argument of the head into the front of the argument list:
    /// `many bird : [fly]` becomes `many : [bird, fly]`.
    pub fn push_arg(&self) -> Result<Spine, TermError> {
        self.ty()?;
        match &self.head {
            Term::App { head, args: hargs, .. } => {
                let (last, rest) = hargs.split_last().expect("applications carry arguments");
                let head = Term::app((**head).clone(), rest.to_vec());
                let mut args = Vec::with_capacity(self.args.len() + 1);
                args.push(last.clone());
                args.extend(self.args.iter().cloned());
                Ok(Spine { head, args })
            }
            _ => Err(TermError::Boundary("head is already a bare constant")),
        }
    }

    /// Inverse of [`Spine::push_arg`]: move the first listed argument into the head.
    pub fn pop_arg(&self) -> Result<Spine, TermError> {
        let Some((first, rest)) = self.args.split_first() else {
            return Err(TermError::Boundary("argument list is empty"));
        };
        let head = Term::apply(self.head.clone(), vec![first.clone()])?;
        let out = Spine { head, args: rest.to_vec() };
        out.ty()?;
        Ok(out)
    }
}

/// Fully pushed layout: bare head, all arguments listed. Idempotent.
pub fn canonical_form(t: &Term, args: &[Term]) -> Result<(Term, Vec<Term>), TermError> {
    let whole = Term::app(t.clone(), args.to_vec());
    whole.ty()?;
    Ok(match whole {
        Term::App { head, args, .. } => (*head, args),
        other => (other, Vec::new()),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Piece {
    Slice(SpanAnchor),
    Entity(String),
    Space,
    /// Fallback for constants without a surface anchor.
    Lemma(String),
}

/// Surface realisation of an entry as slices of the problem text, entity names and spaces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SurfaceExpr(pub Vec<Piece>);

impl SurfaceExpr {
    pub fn slices(&self) -> impl Iterator<Item = &SpanAnchor> {
        self.0.iter().filter_map(|p| match p {
            Piece::Slice(a) => Some(a),
            _ => None,
        })
    }
}

impl fmt::Display for SurfaceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            match p {
                Piece::Slice(a) => write!(f, "{a}")?,
                Piece::Entity(e) => f.write_str(e)?,
                Piece::Space => f.write_str("\u{2423}")?,
                Piece::Lemma(l) => write!(f, "'{l}'")?,
            }
        }
        Ok(())
    }
}

pub fn render_surface(e: &SurfaceExpr, texts: &[String]) -> Result<String, TermError> {
    let mut out = String::new();
    for p in &e.0 {
        match p {
            Piece::Slice(a) => out.push_str(a.slice(texts)?),
            Piece::Entity(name) | Piece::Lemma(name) => out.push_str(name),
            Piece::Space => out.push(' '),
        }
    }
    Ok(out)
}

/// Build the surface expression of a term from the anchors it carries.
///
/// Anchored nodes render as their slice. Predications on an individual put the
/// individual first, or last for passive predicates ("AD is treated using d").
/// Children taken from one sentence are ordered by text position, otherwise by
/// structure. Adjacent slices separated by one space in the source are merged.
pub fn surface_of(t: &Term, texts: &[String]) -> SurfaceExpr {
    let mut pieces = raw_pieces(t);
    merge_slices(&mut pieces, texts);
    SurfaceExpr(pieces)
}

fn raw_pieces(t: &Term) -> Vec<Piece> {
    if let Some(a) = t.anchor() {
        return vec![Piece::Slice(a)];
    }
    match t {
        Term::Entity(e) => vec![Piece::Entity(e.clone())],
        Term::Const(c) if c.covert => vec![],
        Term::Const(c) => vec![Piece::Lemma(c.lemma.clone())],
        Term::App { head, args, .. } => {
            let last = args.last().expect("applications carry arguments");
            if last.is_individual() && t.ty().ok() == Some(TermType::S) {
                let pred = Term::app((**head).clone(), args[..args.len() - 1].to_vec());
                let passive = pred.head_const().map(|c| c.voice) == Some(Voice::Passive);
                let pred = raw_pieces(&pred);
                let subj = raw_pieces(last);
                return if passive {
                    join(vec![pred, subj])
                } else {
                    join(vec![subj, pred])
                };
            }
            let mut children: Vec<Vec<Piece>> = std::iter::once(&**head)
                .chain(args.iter())
                .map(raw_pieces)
                .filter(|p| !p.is_empty())
                .collect();
            if let Some(keys) = single_sentence_keys(&children) {
                let mut keyed: Vec<_> = keys.into_iter().zip(children).collect();
                keyed.sort_by_key(|(k, _)| *k);
                children = keyed.into_iter().map(|(_, c)| c).collect();
            }
            join(children)
        }
    }
}

fn single_sentence_keys(children: &[Vec<Piece>]) -> Option<Vec<usize>> {
    let mut sentence = None;
    let mut keys = Vec::with_capacity(children.len());
    for c in children {
        let mut min = None;
        for p in c {
            match p {
                Piece::Slice(a) => {
                    if *sentence.get_or_insert(a.sentence) != a.sentence {
                        return None;
                    }
                    min = Some(min.map_or(a.start, |m: usize| m.min(a.start)));
                }
                Piece::Space => {}
                _ => return None,
            }
        }
        keys.push(min?);
    }
    Some(keys)
}

fn join(parts: Vec<Vec<Piece>>) -> Vec<Piece> {
    let mut out = Vec::new();
    for p in parts.into_iter().filter(|p| !p.is_empty()) {
        if !out.is_empty() {
            out.push(Piece::Space);
        }
        out.extend(p);
    }
    out
}

fn merge_slices(pieces: &mut Vec<Piece>, texts: &[String]) {
    let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
    for p in pieces.drain(..) {
        if let Piece::Slice(b) = &p {
            if let [.., Piece::Slice(a), Piece::Space] = out.as_slice() {
                let a = *a;
                let gap_is_space = texts
                    .get(a.sentence.wrapping_sub(1))
                    .and_then(|t| t.get(a.end..a.end + 1))
                    == Some(" ");
                if a.sentence == b.sentence && b.start == a.end + 1 && gap_is_space {
                    out.pop();
                    out.pop();
                    out.push(Piece::Slice(SpanAnchor::new(a.sentence, a.start, b.end)));
                    continue;
                }
            }
        }
        out.push(p);
    }
    *pieces = out;
}
