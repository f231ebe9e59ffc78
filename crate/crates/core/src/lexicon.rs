//! Lexical knowledge: phrase relations, monotonicity marks and subsective modifiers.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::terms::Voice;

/// Transitive ⊑ chains are followed at most this many stored links.
pub const MAX_CHAIN: usize = 4;

const DEFAULT_KB: &str = include_str!("../data/default_kb.tsv");

#[derive(Debug, Error)]
pub enum KbError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("contradictory entries `{first}` and `{second}`")]
    Contradiction { first: String, second: String },
    #[error("conflicting monotonicity marks for {functor} argument {position}")]
    MarkConflict { functor: String, position: usize },
    #[error("cannot read knowledge base: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelKind {
    Sub,
    Equ,
    Alt,
}

impl RelKind {
    pub fn symbol(self) -> &'static str {
        match self {
            RelKind::Sub => "\u{2291}",
            RelKind::Equ => "\u{2261}",
            RelKind::Alt => "|",
        }
    }

    fn tag(self) -> &'static str {
        match self {
            RelKind::Sub => "sub",
            RelKind::Equ => "equ",
            RelKind::Alt => "alt",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "sub" => Some(RelKind::Sub),
            "equ" => Some(RelKind::Equ),
            "alt" => Some(RelKind::Alt),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LexicalRelation {
    pub lhs: String,
    pub rel: RelKind,
    pub rhs: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub voices: Option<(Voice, Voice)>,
}

impl LexicalRelation {
    pub fn new(lhs: &str, rel: RelKind, rhs: &str) -> Self {
        Self {
            lhs: lhs.to_string(),
            rel,
            rhs: rhs.to_string(),
            voices: None,
        }
    }

    pub fn with_voices(mut self, lhs: Voice, rhs: Voice) -> Self {
        self.voices = Some((lhs, rhs));
        self
    }

    fn tsv(&self) -> String {
        let mut s = format!("{}\t{}\t{}", self.lhs, self.rel.tag(), self.rhs);
        if let Some((a, b)) = self.voices {
            s.push_str(&format!("\t{a},{b}"));
        }
        s
    }
}

impl fmt::Display for LexicalRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.lhs, self.rel.symbol(), self.rhs)?;
        if let Some((a, b)) = self.voices {
            write!(f, " ({a}/{b})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
    None,
}

impl Direction {
    fn tag(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
            Direction::None => "none",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    relations: BTreeSet<LexicalRelation>,
    marks: BTreeMap<(String, usize), Direction>,
    subsective: BTreeSet<String>,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    /// The knowledge base shipped with the crate.
    pub fn default_kb() -> Self {
        Self::parse(DEFAULT_KB).expect("shipped knowledge base is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, KbError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self, KbError> {
        let mut kb = KnowledgeBase::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let raw = raw.trim_end_matches('\r');
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let malformed = |msg: &str| KbError::Malformed {
                line,
                msg: msg.to_string(),
            };
            let fields: Vec<&str> = raw.split('\t').map(str::trim).collect();
            match fields.as_slice() {
                ["mono", lemma, pos, dir] => {
                    let position: usize = pos
                        .parse()
                        .ok()
                        .filter(|p| *p >= 1)
                        .ok_or_else(|| malformed("position must be a positive integer"))?;
                    let direction = match *dir {
                        "up" => Direction::Up,
                        "down" => Direction::Down,
                        "none" => Direction::None,
                        _ => return Err(malformed("direction must be up, down or none")),
                    };
                    kb.add_mark(lemma, position, direction)?;
                }
                ["subsective", lemma] => {
                    kb.subsective.insert(lemma.to_string());
                }
                [lhs, rel, rhs] | [lhs, rel, rhs, _] => {
                    let rel = RelKind::parse(rel)
                        .ok_or_else(|| malformed("relation must be sub, equ or alt"))?;
                    if lhs.is_empty() || rhs.is_empty() {
                        return Err(malformed("empty phrase"));
                    }
                    let mut r = LexicalRelation::new(lhs, rel, rhs);
                    if let Some(v) = fields.get(3) {
                        let (a, b) = v
                            .split_once(',')
                            .ok_or_else(|| malformed("voice pair must be `lhs,rhs`"))?;
                        let a = parse_voice(a.trim()).ok_or_else(|| malformed("bad voice"))?;
                        let b = parse_voice(b.trim()).ok_or_else(|| malformed("bad voice"))?;
                        r = r.with_voices(a, b);
                    }
                    kb.add_relation(r)?;
                }
                _ => return Err(malformed("unrecognised record")),
            }
        }
        Ok(kb)
    }

    pub fn add_relation(&mut self, r: LexicalRelation) -> Result<(), KbError> {
        for other in &self.relations {
            let same_pair = (other.lhs == r.lhs && other.rhs == r.rhs && other.voices == r.voices)
                || (other.lhs == r.rhs
                    && other.rhs == r.lhs
                    && other.voices == r.voices.map(|(a, b)| (b, a)));
            if same_pair && ((other.rel == RelKind::Alt) != (r.rel == RelKind::Alt)) {
                return Err(KbError::Contradiction {
                    first: other.to_string(),
                    second: r.to_string(),
                });
            }
        }
        self.relations.insert(r);
        Ok(())
    }

    pub fn add_mark(&mut self, functor: &str, position: usize, d: Direction) -> Result<(), KbError> {
        let key = (functor.to_string(), position);
        match self.marks.get(&key) {
            Some(old) if *old != d => Err(KbError::MarkConflict {
                functor: functor.to_string(),
                position,
            }),
            _ => {
                self.marks.insert(key, d);
                Ok(())
            }
        }
    }

    pub fn add_subsective(&mut self, lemma: &str) {
        self.subsective.insert(lemma.to_string());
    }

    pub fn relations(&self) -> impl Iterator<Item = &LexicalRelation> {
        self.relations.iter()
    }

    pub fn contains(&self, r: &LexicalRelation) -> bool {
        self.relations.contains(r)
    }

    /// Canonical TSV: relations, then marks, then subsective modifiers, each sorted.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for r in &self.relations {
            out.push_str(&r.tsv());
            out.push('\n');
        }
        for ((f, p), d) in &self.marks {
            out.push_str(&format!("mono\t{f}\t{p}\t{}\n", d.tag()));
        }
        for s in &self.subsective {
            out.push_str(&format!("subsective\t{s}\n"));
        }
        out
    }

    pub fn monotonicity(&self, functor: &str, position: usize) -> Direction {
        self.marks
            .get(&(functor.to_string(), position))
            .copied()
            .unwrap_or(Direction::None)
    }

    pub fn is_subsective(&self, lemma: &str) -> bool {
        self.subsective.contains(lemma)
    }

    pub fn is_subsumed(&self, a: &str, b: &str) -> bool {
        self.subsumption_path(a, b).is_some()
    }

    pub fn is_alternative(&self, a: &str, b: &str) -> bool {
        self.alternation_path(a, b).is_some()
    }

    pub fn frame_subsumed(&self, a: (&str, Voice), b: (&str, Voice)) -> bool {
        self.frame_path(a, b).is_some()
    }

    /// Stored relations witnessing `a ⊑ b` (empty for `a == b`), shortest chain first.
    pub fn subsumption_path(&self, a: &str, b: &str) -> Option<Vec<LexicalRelation>> {
        self.upward(a).remove(b)
    }

    /// Witness for `a | b`: `a ⊑ a'`, `a' | b'` (stored either way round), `b ⊑ b'`.
    pub fn alternation_path(&self, a: &str, b: &str) -> Option<Vec<LexicalRelation>> {
        let ups_a = self.upward(a);
        let ups_b = self.upward(b);
        let mut best: Option<Vec<LexicalRelation>> = None;
        for r in self.relations.iter().filter(|r| r.rel == RelKind::Alt && r.voices.is_none()) {
            for (x, y) in [(&r.lhs, &r.rhs), (&r.rhs, &r.lhs)] {
                if let (Some(pa), Some(pb)) = (ups_a.get(x), ups_b.get(y)) {
                    let mut path = pa.clone();
                    path.push(r.clone());
                    path.extend(pb.iter().cloned());
                    if best.as_ref().is_none_or(|b| path.len() < b.len()) {
                        best = Some(path);
                    }
                }
            }
        }
        best
    }

    /// Cross-voice subsumption. Same voice falls back to [`Self::subsumption_path`];
    /// the same lemma in both voices is always related.
    pub fn frame_path(&self, a: (&str, Voice), b: (&str, Voice)) -> Option<Vec<LexicalRelation>> {
        if a.1 == b.1 {
            return self.subsumption_path(a.0, b.0);
        }
        if a.0 == b.0 {
            return Some(Vec::new());
        }
        self.relations
            .iter()
            .find(|r| {
                let forward = r.lhs == a.0
                    && r.rhs == b.0
                    && r.voices == Some((a.1, b.1))
                    && matches!(r.rel, RelKind::Sub | RelKind::Equ);
                let backward = r.rel == RelKind::Equ
                    && r.lhs == b.0
                    && r.rhs == a.0
                    && r.voices == Some((b.1, a.1));
                forward || backward
            })
            .map(|r| vec![r.clone()])
    }

    /// Every phrase reachable from `a` by unannotated ⊑/≡ links within [`MAX_CHAIN`],
    /// with the shortest witnessing chain.
    fn upward(&self, a: &str) -> BTreeMap<String, Vec<LexicalRelation>> {
        let mut seen: BTreeMap<String, Vec<LexicalRelation>> = BTreeMap::new();
        seen.insert(a.to_string(), Vec::new());
        let mut queue = VecDeque::from([a.to_string()]);
        while let Some(cur) = queue.pop_front() {
            let path = seen[&cur].clone();
            if path.len() >= MAX_CHAIN {
                continue;
            }
            for r in self.relations.iter().filter(|r| r.voices.is_none()) {
                let next = match r.rel {
                    RelKind::Sub if r.lhs == cur => &r.rhs,
                    RelKind::Equ if r.lhs == cur => &r.rhs,
                    RelKind::Equ if r.rhs == cur => &r.lhs,
                    _ => continue,
                };
                if !seen.contains_key(next) {
                    let mut p = path.clone();
                    p.push(r.clone());
                    seen.insert(next.clone(), p);
                    queue.push_back(next.clone());
                }
            }
        }
        seen
    }
}

fn parse_voice(s: &str) -> Option<Voice> {
    match s {
        "active" => Some(Voice::Active),
        "passive" => Some(Voice::Passive),
        _ => None,
    }
}
