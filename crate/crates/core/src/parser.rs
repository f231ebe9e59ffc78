//! Deterministic parser for a controlled English fragment.
//!
//! ```text
//! S      := NP VP | Name VP | Name (is|are) Participle (using|by) AgentNP
//! NP     := [Det] Adj* Noun [that VP]        bare plurals get a covert existential
//! VP     := Core ((and|or) Core)*
//! Core   := [does not | do not] Verb [Obj] [Adv] | TVerb (and|or) TVerb Obj
//! ```
//!
//! Objects are names. Every constant carries the byte span of its token(s), and every
//! constituent carries the span it covers, so derived entries render back to text.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::terms::{SpanAnchor, Term, TermType, Voice};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("S{sentence}: empty sentence")]
    Empty { sentence: usize },
    #[error("S{sentence}: unexpected token `{token}` at byte {offset}")]
    Unexpected {
        sentence: usize,
        token: String,
        offset: usize,
    },
    #[error("S{sentence}: sentence ends early, expected {expected}")]
    Truncated { sentence: usize, expected: &'static str },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone)]
pub struct FragmentSentence {
    pub id: usize,
    pub text: String,
    pub tokens: Vec<Token>,
    pub root: Term,
    pub voice: Voice,
}

struct Noun {
    lemma: &'static str,
    singular: &'static str,
    plural: &'static str,
}

struct Verb {
    lemma: &'static str,
    base: &'static str,
    third: &'static str,
    participle: Option<&'static str>,
    transitive: bool,
}

const fn noun(lemma: &'static str, plural: &'static str) -> Noun {
    Noun { lemma, singular: lemma, plural }
}

const fn iv(lemma: &'static str, third: &'static str) -> Verb {
    Verb { lemma, base: lemma, third, participle: None, transitive: false }
}

const fn tv(lemma: &'static str, third: &'static str, participle: &'static str) -> Verb {
    Verb { lemma, base: lemma, third, participle: Some(participle), transitive: true }
}

const NOUNS: &[Noun] = &[
    noun("animal", "animals"),
    noun("bird", "birds"),
    noun("cat", "cats"),
    noun("dog", "dogs"),
    noun("drug", "drugs"),
    noun("fish", "fish"),
    noun("idea", "ideas"),
    noun("mouse", "mice"),
    noun("person", "people"),
    noun("sparrow", "sparrows"),
    noun("student", "students"),
    noun("worm", "worms"),
];

const VERBS: &[Verb] = &[
    iv("bark", "barks"),
    iv("dance", "dances"),
    iv("fly", "flies"),
    iv("hover", "hovers"),
    iv("move", "moves"),
    iv("run", "runs"),
    iv("sing", "sings"),
    iv("sleep", "sleeps"),
    iv("swim", "swims"),
    iv("walk", "walks"),
    Verb {
        lemma: "work best the earlier you administer them",
        base: "work best the earlier you administer them",
        third: "works best the earlier you administer them",
        participle: None,
        transitive: false,
    },
    tv("chase", "chases", "chased"),
    tv("cure", "cures", "cured"),
    tv("halt", "halts", "halted"),
    tv("see", "sees", "seen"),
    tv("slow down", "slows down", "slowed down"),
    tv("treat", "treats", "treated"),
];

const ADVERBS: &[&str] = &["high", "quickly", "slowly", "loudly", "furiously"];
const ADJECTIVES: &[&str] = &["small", "big", "young", "red", "fake"];
const NAMES: &[&str] = &["Alzheimer's disease", "John", "Mary", "Fido"];

/// Determiners; `not all` is handled separately.
const DETERMINERS: &[(&str, &str)] = &[
    ("a", "a"),
    ("an", "a"),
    ("some", "some"),
    ("every", "every"),
    ("all", "all"),
    ("no", "no"),
    ("few", "few"),
    ("many", "many"),
    ("the", "the"),
];

pub fn noun_lemmas() -> impl Iterator<Item = &'static str> {
    NOUNS.iter().map(|n| n.lemma)
}

/// Inflected forms used by the problem generator: (singular, plural).
pub fn noun_forms(lemma: &str) -> Option<(&'static str, &'static str)> {
    NOUNS.iter().find(|n| n.lemma == lemma).map(|n| (n.singular, n.plural))
}

/// (base, third person singular) of an intransitive verb.
pub fn verb_forms(lemma: &str) -> Option<(&'static str, &'static str)> {
    VERBS.iter().find(|v| v.lemma == lemma).map(|v| (v.base, v.third))
}

fn n_mod() -> TermType {
    TermType::func(vec![TermType::N], TermType::N)
}
fn vp_mod() -> TermType {
    TermType::func(vec![TermType::Vp], TermType::Vp)
}
fn tv_ty() -> TermType {
    TermType::func(vec![TermType::E], TermType::Vp)
}
fn vp_conj() -> TermType {
    TermType::func(vec![TermType::Vp, TermType::Vp], TermType::Vp)
}
fn rel_ty() -> TermType {
    TermType::func(vec![TermType::N, TermType::Vp], TermType::N)
}
fn sent_neg() -> TermType {
    TermType::func(vec![TermType::S], TermType::S)
}

pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, ch) in text.char_indices().chain(std::iter::once((text.len(), ' '))) {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(Token { text: text[s..i].to_string(), start: s, end: i });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(last) = tokens.last_mut() {
        let trimmed = last.text.trim_end_matches(['.', '!', '?']);
        if !trimmed.is_empty() && trimmed.len() < last.text.len() {
            last.end = last.start + trimmed.len();
            last.text = trimmed.to_string();
        }
    }
    tokens
}

struct Cursor<'a> {
    sentence: usize,
    tokens: &'a [Token],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek_lower(&self, k: usize) -> Option<String> {
        self.tokens.get(self.pos + k).map(|t| t.text.to_lowercase())
    }

    fn span(&self, from: usize, to: usize) -> SpanAnchor {
        SpanAnchor::new(self.sentence, self.tokens[from].start, self.tokens[to - 1].end)
    }

    fn error(&self, expected: &'static str) -> ParseError {
        match self.tokens.get(self.pos) {
            Some(t) => ParseError::Unexpected {
                sentence: self.sentence,
                token: t.text.clone(),
                offset: t.start,
            },
            None => ParseError::Truncated { sentence: self.sentence, expected },
        }
    }

    /// Length in tokens of `phrase` at the cursor, if it matches.
    fn matches(&self, phrase: &str, case_sensitive: bool) -> Option<usize> {
        let words: Vec<&str> = phrase.split(' ').collect();
        for (k, w) in words.iter().enumerate() {
            let t = self.tokens.get(self.pos + k)?;
            let ok = if case_sensitive {
                t.text == *w
            } else {
                t.text.eq_ignore_ascii_case(w)
            };
            if !ok {
                return None;
            }
        }
        Some(words.len())
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.matches(w, false).is_some() {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }
}

pub fn parse(text: &str, sentence: usize) -> Result<FragmentSentence, ParseError> {
    let tokens = tokenize(text);
    if tokens.is_empty() {
        return Err(ParseError::Empty { sentence });
    }
    let mut c = Cursor { sentence, tokens: &tokens, pos: 0 };
    let (root, voice) = parse_sentence(&mut c)?;
    if !c.at_end() {
        return Err(c.error("end of sentence"));
    }
    let whole = c.span(0, tokens.len());
    Ok(FragmentSentence {
        id: sentence,
        text: text.to_string(),
        root: root.with_anchor(whole),
        tokens,
        voice,
    })
}

fn parse_sentence(c: &mut Cursor) -> Result<(Term, Voice), ParseError> {
    if let Some((name, start)) = parse_name(c) {
        if matches!(c.peek_lower(0).as_deref(), Some("is" | "are")) {
            return parse_passive(c, name, start).map(|t| (t, Voice::Passive));
        }
        let vp = parse_vp(c)?;
        return Ok((Term::app(vp, vec![name]), Voice::Active));
    }
    let start = c.pos;
    if c.matches("not all", false).is_some() {
        let not = Term::anchored("not", sent_neg(), c.span(c.pos, c.pos + 1));
        c.pos += 1;
        let inner_start = c.pos;
        let all = Term::anchored("all", TermType::quantifier(), c.span(c.pos, c.pos + 1));
        c.pos += 1;
        let (noun, _) = parse_np_body(c, true)?;
        let vp = parse_vp(c)?;
        let inner = Term::app(all, vec![noun, vp]).with_anchor(c.span(inner_start, c.pos));
        return Ok((Term::app(not, vec![inner]).with_anchor(c.span(start, c.pos)), Voice::Active));
    }
    let det = parse_det(c);
    let (noun, plural) = parse_np_body(c, true)?;
    let det = match det {
        Some(d) => d,
        None if plural => Term::constant("some", TermType::quantifier()).covert(),
        None => {
            c.pos = start;
            return Err(c.error("a determiner"));
        }
    };
    let vp = parse_vp(c)?;
    Ok((Term::app(det, vec![noun, vp]), Voice::Active))
}

fn parse_passive(c: &mut Cursor, subject: Term, subj_start: usize) -> Result<Term, ParseError> {
    let aux = c.pos;
    c.pos += 1;
    let verb = VERBS
        .iter()
        .filter(|v| v.transitive)
        .filter_map(|v| v.participle.and_then(|p| c.matches(p, false)).map(|k| (v, k)))
        .max_by_key(|(_, k)| *k)
        .ok_or_else(|| c.error("a past participle"))?;
    c.pos += verb.1;
    if !(c.eat_word("using") || c.eat_word("by")) {
        return Err(c.error("`using` or `by`"));
    }
    let verb_const = Term::anchored(verb.0.lemma, tv_ty(), c.span(aux, c.pos)).with_voice(Voice::Passive);
    let frame = Term::app(verb_const, vec![subject]).with_anchor(c.span(subj_start, c.pos));
    if let Some((agent, _)) = parse_name(c) {
        return Ok(Term::app(frame, vec![agent]));
    }
    let det_start = c.pos;
    let det = parse_det(c);
    let (noun, plural) = parse_np_body(c, false)?;
    let det = match det {
        Some(d) => d,
        None if plural => Term::constant("some", TermType::quantifier()).covert(),
        None => {
            c.pos = det_start;
            return Err(c.error("a determiner"));
        }
    };
    Ok(Term::app(det, vec![noun, frame]))
}

fn parse_name(c: &mut Cursor) -> Option<(Term, usize)> {
    let (name, k) = NAMES
        .iter()
        .filter_map(|n| c.matches(n, true).map(|k| (*n, k)))
        .max_by_key(|(_, k)| *k)?;
    let start = c.pos;
    let t = Term::anchored(name, TermType::E, c.span(start, start + k));
    c.pos += k;
    Some((t, start))
}

fn parse_det(c: &mut Cursor) -> Option<Term> {
    let word = c.peek_lower(0)?;
    let (_, lemma) = DETERMINERS.iter().find(|(form, _)| *form == word)?;
    let t = Term::anchored(*lemma, TermType::quantifier(), c.span(c.pos, c.pos + 1));
    c.pos += 1;
    Some(t)
}

/// `Adj* Noun [that VP]`; returns the property term and whether the noun was plural.
fn parse_np_body(c: &mut Cursor, allow_relative: bool) -> Result<(Term, bool), ParseError> {
    let start = c.pos;
    let mut adjectives = Vec::new();
    while let Some(w) = c.peek_lower(0) {
        match ADJECTIVES.iter().find(|a| **a == w) {
            Some(a) => {
                adjectives.push((*a, c.pos));
                c.pos += 1;
            }
            None => break,
        }
    }
    let word = c.peek_lower(0).ok_or_else(|| c.error("a noun"))?;
    let noun = NOUNS
        .iter()
        .find(|n| n.singular == word || n.plural == word)
        .ok_or_else(|| c.error("a noun"))?;
    let plural = noun.plural == word;
    let noun_pos = c.pos;
    let mut term = Term::anchored(noun.lemma, TermType::N, c.span(noun_pos, noun_pos + 1));
    c.pos += 1;
    for (adj, pos) in adjectives.into_iter().rev() {
        let m = Term::anchored(adj, n_mod(), c.span(pos, pos + 1));
        term = Term::app(m, vec![term]).with_anchor(c.span(pos, c.pos));
    }
    if allow_relative && c.matches("that", false).is_some() {
        let that = Term::anchored("that", rel_ty(), c.span(c.pos, c.pos + 1));
        c.pos += 1;
        let vp = parse_vp(c)?;
        term = Term::app(that, vec![term, vp]).with_anchor(c.span(start, c.pos));
    }
    Ok((term, plural))
}

fn parse_vp(c: &mut Cursor) -> Result<Term, ParseError> {
    let start = c.pos;
    let mut vp = parse_vp_core(c)?;
    while let Some(w) = c.peek_lower(0) {
        if w != "and" && w != "or" {
            break;
        }
        let conj = Term::anchored(w, vp_conj(), c.span(c.pos, c.pos + 1));
        c.pos += 1;
        let rhs = parse_vp_core(c)?;
        vp = Term::app(conj, vec![vp, rhs]).with_anchor(c.span(start, c.pos));
    }
    Ok(vp)
}

fn match_verb(c: &Cursor, base_only: bool) -> Option<(&'static Verb, usize)> {
    VERBS
        .iter()
        .filter_map(|v| {
            let k = c.matches(v.base, false);
            let k = if base_only { k } else { k.or_else(|| c.matches(v.third, false)) };
            k.map(|k| (v, k))
        })
        .max_by_key(|(_, k)| *k)
}

fn parse_vp_core(c: &mut Cursor) -> Result<Term, ParseError> {
    let start = c.pos;
    let negated = c.matches("does not", false).or_else(|| c.matches("do not", false)).is_some();
    if negated {
        c.pos += 2;
    }
    let verb_start = c.pos;
    let (verb, k) = match_verb(c, negated).ok_or_else(|| c.error("a verb"))?;
    let verb_term = Term::anchored(
        verb.lemma,
        if verb.transitive { tv_ty() } else { TermType::Vp },
        c.span(c.pos, c.pos + k),
    );
    c.pos += k;
    let mut vp = if verb.transitive {
        if let Some((obj, _)) = parse_name(c) {
            Term::app(verb_term, vec![obj]).with_anchor(c.span(verb_start, c.pos))
        } else {
            // TV (and|or) TV Obj: the object is shared.
            let conj_word = c.peek_lower(0).filter(|w| w == "and" || w == "or");
            let Some(conj_word) = conj_word else {
                return Err(c.error("an object"));
            };
            let conj = Term::anchored(conj_word, vp_conj(), c.span(c.pos, c.pos + 1));
            c.pos += 1;
            let (verb2, k2) = match_verb(c, negated)
                .filter(|(v, _)| v.transitive)
                .ok_or_else(|| c.error("a transitive verb"))?;
            let verb2_term = Term::anchored(verb2.lemma, tv_ty(), c.span(c.pos, c.pos + k2));
            c.pos += k2;
            let (obj, _) = parse_name(c).ok_or_else(|| c.error("an object"))?;
            let left = Term::app(verb_term, vec![obj.clone()]);
            let right = Term::app(verb2_term, vec![obj]);
            Term::app(conj, vec![left, right]).with_anchor(c.span(verb_start, c.pos))
        }
    } else {
        verb_term
    };
    if let Some(w) = c.peek_lower(0) {
        if let Some(adv) = ADVERBS.iter().find(|a| **a == w) {
            let m = Term::anchored(*adv, vp_mod(), c.span(c.pos, c.pos + 1));
            c.pos += 1;
            vp = Term::app(m, vec![vp]).with_anchor(c.span(verb_start, c.pos));
        }
    }
    if negated {
        let not = Term::anchored("not", vp_mod(), c.span(start, start + 2));
        vp = Term::app(not, vec![vp]).with_anchor(c.span(start, c.pos));
    }
    Ok(vp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::{canonical_form, render_surface, surface_of};

    fn canon(s: &str) -> String {
        let p = parse(s, 1).unwrap();
        let (h, a) = canonical_form(&p.root, &[]).unwrap();
        format!("{h} : [{}]", a.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", "))
    }

    #[test]
    fn many_birds_hover_high() {
        assert_eq!(canon("many birds hover high"), "many : [bird, (high hover)]");
        let p = parse("many birds hover high", 1).unwrap();
        assert_eq!(p.voice, Voice::Active);
        assert_eq!(p.root.ty().unwrap(), TermType::S);
    }

    #[test]
    fn few_birds_fly() {
        assert_eq!(canon("few birds fly"), "few : [bird, fly]");
    }

    #[test]
    fn rejects_adverb_cluster() {
        let err = parse("Colorless ideas sleep furiously quickly badly", 1).unwrap_err();
        assert!(matches!(err, ParseError::Unexpected { .. }));
        let err = parse("ideas sleep furiously quickly", 1).unwrap_err();
        assert_eq!(
            err,
            ParseError::Unexpected { sentence: 1, token: "quickly".into(), offset: 22 }
        );
    }

    #[test]
    fn not_all_is_sentence_negation() {
        assert_eq!(canon("Not all birds fly"), "not : [(all bird fly)]");
        assert_eq!(canon("Some bird does not fly"), "some : [bird, (not fly)]");
    }

    #[test]
    fn bare_plural_gets_covert_existential() {
        assert_eq!(canon("birds fly"), "some : [bird, fly]");
        assert!(parse("bird flies", 1).is_err());
    }

    #[test]
    fn drugs_premise() {
        let text = "The drugs that slow down or halt Alzheimer's disease work best the earlier you administer them";
        let p = parse(text, 1).unwrap();
        let (h, a) = canonical_form(&p.root, &[]).unwrap();
        assert_eq!(h.lemma(), Some("the"));
        assert_eq!(a[0].anchor(), Some(SpanAnchor::new(1, 4, 52)));
        assert_eq!(
            a[0].to_string(),
            "(that drug (or (slow_down Alzheimer's_disease) (halt Alzheimer's_disease)))"
        );
        let texts = vec![text.to_string()];
        assert_eq!(
            render_surface(&surface_of(&a[1], &texts), &texts).unwrap(),
            "work best the earlier you administer them"
        );
    }

    #[test]
    fn drugs_hypothesis_is_passive() {
        let text = "Alzheimer's disease is treated using drugs";
        let p = parse(text, 2).unwrap();
        assert_eq!(p.voice, Voice::Passive);
        let (h, a) = canonical_form(&p.root, &[]).unwrap();
        assert_eq!(h.lemma(), Some("some"));
        assert_eq!(a[1].to_string(), "(treat@pass Alzheimer's_disease)");
        assert_eq!(a[1].anchor(), Some(SpanAnchor::new(2, 0, 36)));
    }

    #[test]
    fn names_as_subjects_and_objects() {
        assert_eq!(canon("John chases Fido"), "chase : [Fido, John]");
        assert_eq!(canon("Fido is chased by John"), "chase@pass : [Fido, John]");
        assert_eq!(canon("John does not fly"), "not : [fly, John]");
    }

    #[test]
    fn transitive_needs_object() {
        assert!(parse("some dogs chase", 1).is_err());
    }

    #[test]
    fn relative_clause_and_coordination() {
        assert_eq!(
            canon("every small bird that sings flies or swims"),
            "every : [(that (small bird) sing), (or fly swim)]"
        );
    }

    #[test]
    fn trailing_period_is_dropped() {
        let p = parse("few birds fly.", 1).unwrap();
        assert_eq!(p.tokens.last().unwrap().end, 13);
    }

    #[test]
    fn deterministic() {
        let a = parse("no dogs that bark sleep", 1).unwrap();
        let b = parse("no dogs that bark sleep", 1).unwrap();
        assert_eq!(a.root, b.root);
        assert_eq!(format!("{:?}", a.root), format!("{:?}", b.root));
    }
}
