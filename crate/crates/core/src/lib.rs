//! Refutation-based natural-logic tableau prover for NLI.

pub mod corpus;
pub mod eval;
pub mod explain;
pub mod lexicon;
pub mod oracle;
pub mod parser;
pub mod proof;
pub mod prover;
pub mod rules;
pub mod tableau;
pub mod terms;
