//! A satisfiability solver for quantifier-free formulas over the theory of
//! n-indexed sequences, with an SMT-LIB2 front-end, a Seq-to-NSeq translation,
//! a brute-force semantic oracle and a Seq+ADT axiomatization emitter.

pub mod encode;
pub mod euf;
pub mod fuzz;
pub mod lia;
pub mod oracle;
pub mod parser;
pub mod rules;
pub mod seq_translate;
pub mod solver;
pub mod sexp;
pub mod term;
