//! Seq + ADT encoding of the NSeq signature.
//!
//! An n-indexed sequence is represented as a pair of its first index and a
//! built-in 0-indexed sequence holding the contents; every NSeq symbol is a
//! defined function over that pair, except `nseq.const` which is declared and
//! constrained by the quantified `nseq_const` axiom. The polymorphic listing
//! is kept verbatim in a comment header; the emitted declarations are
//! monomorphized per element sort, since most solvers reject polymorphic
//! `define-fun`.

use std::collections::BTreeSet;
use std::fmt::Write;

use thiserror::Error;

use crate::parser::{Command, Script};
use crate::term::{Sort, Symbol, TermId, TermStore};

#[derive(Debug, Clone)]
pub struct EmitterConfig {
    /// Attach `:pattern ((nseq.const f l v))` to the const axiom.
    pub patterns_on: bool,
    /// First line of the emitted script.
    pub logic_line: String,
}

impl Default for EmitterConfig {
    fn default() -> EmitterConfig {
        EmitterConfig { patterns_on: true, logic_line: "(set-logic ALL)".into() }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("no encoding for {0}")]
    Unsupported(String),
}

/// The polymorphic listing, reproduced verbatim (modulo the pattern toggle)
/// in a comment header of every emitted file.
const LISTING: &str = r#"(declare-datatypes ((NSeq 1))
  ((par (T) ((nseq.mk (nseq.first Int) (nseq.seq (Seq T)))))))

(define-fun nseq.last (par (T) ((s (NSeq T))) Int
  (+ (- (seq.len (nseq.seq s)) 1) (nseq.first s))))

(define-fun nseq.get (par (T) ((s (NSeq T)) (i Int)) T
  (seq.nth (nseq.seq s) (- i (nseq.first s)))))

(define-fun nseq.set (par (T) ((s (NSeq T)) (i Int) (v T)) (NSeq T)
  (nseq.mk (nseq.first s)
    (seq.update (nseq.seq s) (- i (nseq.first s)) (seq.unit v)))))

(declare-fun nseq.const (par (T) (Int Int T) (NSeq T)))

;; "nseq_const"
(assert (par (T) (forall ((f Int) (l Int) (v T))
    (!
      (let ((s (nseq.const f l v)))
        (and
          (= (nseq.first s) f)
          (= (nseq.last s) l)
          (forall ((i Int))
            (=> (and (<= f i) (<= i l)) (= (nseq.get s i) v)))))
      :pattern ((nseq.const f l v))))))

(define-fun nseq.relocate (par (T) ((s (NSeq T)) (f Int)) (NSeq T)
     (nseq.mk f (nseq.seq s))))

(define-fun nseq.concat (par (T) ((s1 (NSeq T)) (s2 (NSeq T))) (NSeq T)
  (ite (< (nseq.last s1) (nseq.first s1))
    s2
    (ite
      (or
        (< (nseq.last s2) (nseq.first s2))
        (not (= (nseq.first s2) (+ (nseq.last s1) 1))))
      s1
      (nseq.mk
        (nseq.first s1)
        (seq.++ (nseq.seq s1) (nseq.seq s2)))))))

(define-fun nseq.slice (par (T) ((s (NSeq T)) (f Int) (l Int)) (NSeq T)
  (ite
    (and
      (<= f l)
      (and (<= (nseq.first s) f) (<= l (nseq.last s))))
    (nseq.mk f (seq.extract (nseq.seq s) (- f (nseq.first s)) (+ (- l f) 1)))
    s)))

(define-fun nseq.update (par (T) ((s1 (NSeq T)) (s2 (NSeq T))) (NSeq T)
  (ite
    (and
      (<= (nseq.first s2) (nseq.last s2))
      (<= (nseq.first s1) (nseq.first s2))
      (<= (nseq.last s2) (nseq.last s1)))
    (nseq.mk (nseq.first s1)
      (seq.update
        (nseq.seq s1)
        (- (nseq.first s2) (nseq.first s1))
        (nseq.seq s2)))
     s1)))"#;

/// Lower-case name component identifying a monomorphic instantiation.
fn sort_tag(elem: &Sort) -> String {
    match elem {
        Sort::Int => "int".into(),
        Sort::Bool => "bool".into(),
        Sort::Uninterpreted(n) => n.to_lowercase(),
        other => other.to_string().to_lowercase(),
    }
}

/// Datatype sort name of the instantiation for `elem`.
fn nseq_sort_name(elem: &Sort) -> String {
    match elem {
        Sort::Int => "NSeq_Int".into(),
        Sort::Bool => "NSeq_Bool".into(),
        Sort::Uninterpreted(n) => format!("NSeq_{n}"),
        other => format!("NSeq_{other}"),
    }
}

fn op_name(elem: &Sort, op: &str) -> String {
    format!("nseq_{}.{op}", sort_tag(elem))
}

fn comment_header(cfg: &EmitterConfig) -> String {
    let mut out = String::new();
    out.push_str(";; Pair representation of n-indexed sequences over built-in\n");
    out.push_str(";; sequences and a single-constructor datatype. Polymorphic\n");
    out.push_str(";; form (instantiated per element sort below):\n;;\n");
    for line in LISTING.lines() {
        if !cfg.patterns_on && line.contains(":pattern") {
            continue;
        }
        if line.is_empty() {
            out.push_str(";;\n");
        } else {
            let line = if !cfg.patterns_on && line.trim() == "(!" {
                line.replace("(!", "")
            } else {
                line.to_string()
            };
            if line.trim().is_empty() {
                continue;
            }
            out.push_str(";; ");
            out.push_str(&line);
            out.push('\n');
        }
    }
    out
}

/// Monomorphic instantiation of the listing for one element sort.
fn mono_block(cfg: &EmitterConfig, elem: &Sort) -> String {
    let s = nseq_sort_name(elem);
    let t = elem.to_string();
    let mk = op_name(elem, "mk");
    let first = op_name(elem, "first");
    let seq = op_name(elem, "seq");
    let last = op_name(elem, "last");
    let get = op_name(elem, "get");
    let set = op_name(elem, "set");
    let konst = op_name(elem, "const");
    let relocate = op_name(elem, "relocate");
    let concat = op_name(elem, "concat");
    let slice = op_name(elem, "slice");
    let update = op_name(elem, "update");

    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "(declare-datatypes (({s} 0))").unwrap();
    writeln!(w, "  ((({mk} ({first} Int) ({seq} (Seq {t}))))))").unwrap();
    writeln!(w).unwrap();
    writeln!(w, "(define-fun {last} ((s {s})) Int").unwrap();
    writeln!(w, "  (+ (- (seq.len ({seq} s)) 1) ({first} s)))").unwrap();
    writeln!(w).unwrap();
    writeln!(w, "(define-fun {get} ((s {s}) (i Int)) {t}").unwrap();
    writeln!(w, "  (seq.nth ({seq} s) (- i ({first} s))))").unwrap();
    writeln!(w).unwrap();
    writeln!(w, "(define-fun {set} ((s {s}) (i Int) (v {t})) {s}").unwrap();
    writeln!(w, "  ({mk} ({first} s)").unwrap();
    writeln!(w, "    (seq.update ({seq} s) (- i ({first} s)) (seq.unit v))))").unwrap();
    writeln!(w).unwrap();
    writeln!(w, "(declare-fun {konst} (Int Int {t}) {s})").unwrap();
    writeln!(w).unwrap();
    writeln!(w, ";; \"nseq_const\"").unwrap();
    writeln!(w, "(assert (forall ((f Int) (l Int) (v {t}))").unwrap();
    if cfg.patterns_on {
        writeln!(w, "    (!").unwrap();
    }
    writeln!(w, "      (let ((s ({konst} f l v)))").unwrap();
    writeln!(w, "        (and").unwrap();
    writeln!(w, "          (= ({first} s) f)").unwrap();
    writeln!(w, "          (= ({last} s) l)").unwrap();
    writeln!(w, "          (forall ((i Int))").unwrap();
    writeln!(w, "            (=> (and (<= f i) (<= i l)) (= ({get} s i) v)))))").unwrap();
    if cfg.patterns_on {
        writeln!(w, "      :pattern (({konst} f l v)))))").unwrap();
    } else {
        writeln!(w, "      ))").unwrap();
    }
    writeln!(w).unwrap();
    writeln!(w, "(define-fun {relocate} ((s {s}) (f Int)) {s}").unwrap();
    writeln!(w, "     ({mk} f ({seq} s)))").unwrap();
    writeln!(w).unwrap();
    writeln!(w, "(define-fun {concat} ((s1 {s}) (s2 {s})) {s}").unwrap();
    writeln!(w, "  (ite (< ({last} s1) ({first} s1))").unwrap();
    writeln!(w, "    s2").unwrap();
    writeln!(w, "    (ite").unwrap();
    writeln!(w, "      (or").unwrap();
    writeln!(w, "        (< ({last} s2) ({first} s2))").unwrap();
    writeln!(w, "        (not (= ({first} s2) (+ ({last} s1) 1))))").unwrap();
    writeln!(w, "      s1").unwrap();
    writeln!(w, "      ({mk}").unwrap();
    writeln!(w, "        ({first} s1)").unwrap();
    writeln!(w, "        (seq.++ ({seq} s1) ({seq} s2))))))").unwrap();
    writeln!(w).unwrap();
    writeln!(w, "(define-fun {slice} ((s {s}) (f Int) (l Int)) {s}").unwrap();
    writeln!(w, "  (ite").unwrap();
    writeln!(w, "    (and").unwrap();
    writeln!(w, "      (<= f l)").unwrap();
    writeln!(w, "      (and (<= ({first} s) f) (<= l ({last} s))))").unwrap();
    writeln!(w, "    ({mk} f (seq.extract ({seq} s) (- f ({first} s)) (+ (- l f) 1)))").unwrap();
    writeln!(w, "    s))").unwrap();
    writeln!(w).unwrap();
    writeln!(w, "(define-fun {update} ((s1 {s}) (s2 {s})) {s}").unwrap();
    writeln!(w, "  (ite").unwrap();
    writeln!(w, "    (and").unwrap();
    writeln!(w, "      (<= ({first} s2) ({last} s2))").unwrap();
    writeln!(w, "      (<= ({first} s1) ({first} s2))").unwrap();
    writeln!(w, "      (<= ({last} s2) ({last} s1)))").unwrap();
    writeln!(w, "    ({mk} ({first} s1)").unwrap();
    writeln!(w, "      (seq.update").unwrap();
    writeln!(w, "        ({seq} s1)").unwrap();
    writeln!(w, "        (- ({first} s2) ({first} s1))").unwrap();
    writeln!(w, "        ({seq} s2)))").unwrap();
    writeln!(w, "     s1))").unwrap();
    out
}

/// Declarations and definitions for scripts whose only element sort is `Int`.
pub fn emit_prelude(cfg: &EmitterConfig) -> String {
    emit_prelude_for(cfg, &[Sort::Int])
}

pub fn emit_prelude_for(cfg: &EmitterConfig, elems: &[Sort]) -> String {
    let mut out = String::new();
    out.push_str(&cfg.logic_line);
    out.push_str("\n\n");
    out.push_str(&comment_header(cfg));
    for elem in elems {
        out.push('\n');
        out.push_str(&mono_block(cfg, elem));
    }
    out
}

/// Whole-problem encoding: prelude over the element sorts the script uses,
/// the script's declarations, its assertions and a `(check-sat)`.
pub fn emit_problem(
    store: &TermStore,
    script: &Script,
    cfg: &EmitterConfig,
) -> Result<String, EncodeError> {
    // Element sorts actually used, and uninterpreted sorts to re-declare.
    let mut elems: BTreeSet<Sort> = BTreeSet::new();
    let mut usorts: BTreeSet<String> = BTreeSet::new();
    let note = |sort: &Sort, elems: &mut BTreeSet<Sort>, usorts: &mut BTreeSet<String>| {
        match sort {
            Sort::NSeq(e) => {
                elems.insert((**e).clone());
                if let Sort::Uninterpreted(n) = &**e {
                    usorts.insert(n.clone());
                }
            }
            Sort::Uninterpreted(n) => {
                usorts.insert(n.clone());
            }
            _ => {}
        }
    };
    for cmd in &script.commands {
        match cmd {
            Command::DeclareConst { sort, .. } => note(sort, &mut elems, &mut usorts),
            Command::DeclareFun { args, result, .. } => {
                for s in args.iter().chain([result]) {
                    note(s, &mut elems, &mut usorts);
                }
            }
            Command::DeclareSort(n) => {
                usorts.insert(n.clone());
            }
            _ => {}
        }
    }
    for a in script.assertions() {
        for t in store.subterms(a) {
            note(store.sort(t), &mut elems, &mut usorts);
        }
    }

    let elems: Vec<Sort> = elems.into_iter().collect();
    let mut out = String::new();
    out.push_str(&emit_prelude_for(cfg, &elems));
    out.push('\n');
    for n in &usorts {
        writeln!(out, "(declare-sort {n} 0)").unwrap();
    }
    for cmd in &script.commands {
        match cmd {
            Command::DeclareConst { name, sort, .. } => {
                writeln!(out, "(declare-const {name} {})", encoded_sort(sort)?).unwrap();
            }
            Command::DeclareFun { name, args, result } => {
                let args = args
                    .iter()
                    .map(encoded_sort)
                    .collect::<Result<Vec<_>, _>>()?
                    .join(" ");
                writeln!(out, "(declare-fun {name} ({args}) {})", encoded_sort(result)?).unwrap();
            }
            _ => {}
        }
    }
    for a in script.assertions() {
        writeln!(out, "(assert {})", print_term(store, a)?).unwrap();
    }
    out.push_str("(check-sat)\n");
    Ok(out)
}

fn encoded_sort(sort: &Sort) -> Result<String, EncodeError> {
    match sort {
        Sort::Bool | Sort::Int | Sort::Uninterpreted(_) => Ok(sort.to_string()),
        Sort::NSeq(e) => Ok(nseq_sort_name(e)),
        Sort::Seq(_) => Err(EncodeError::Unsupported(sort.to_string())),
    }
}

/// Print a term with NSeq symbols renamed to their monomorphic definitions.
fn print_term(store: &TermStore, t: TermId) -> Result<String, EncodeError> {
    let head = store.head(t);
    let args = store.args(t);
    let name = match head {
        Symbol::Var(n) => return Ok(n.clone()),
        Symbol::Numeral(n) => return Ok(n.to_string()),
        Symbol::BoolConst(b) => return Ok(b.to_string()),
        Symbol::NseqFirst => op_name(elem_of(store, args[0]), "first"),
        Symbol::NseqLast => op_name(elem_of(store, args[0]), "last"),
        Symbol::NseqGet => op_name(elem_of(store, args[0]), "get"),
        Symbol::NseqSet => op_name(elem_of(store, args[0]), "set"),
        Symbol::NseqConst => op_name(elem_of(store, t), "const"),
        Symbol::NseqRelocate => op_name(elem_of(store, args[0]), "relocate"),
        Symbol::NseqConcat => op_name(elem_of(store, args[0]), "concat"),
        Symbol::NseqSlice => op_name(elem_of(store, args[0]), "slice"),
        Symbol::NseqUpdate => op_name(elem_of(store, args[0]), "update"),
        Symbol::RelocEq => {
            // s1 =_reloc s2 holds exactly when the two pairs carry the same
            // contents, regardless of their first indices.
            let seq = op_name(elem_of(store, args[0]), "seq");
            return Ok(format!(
                "(= ({seq} {}) ({seq} {}))",
                print_term(store, args[0])?,
                print_term(store, args[1])?
            ));
        }
        Symbol::NormConcat => return Err(EncodeError::Unsupported("::".into())),
        Symbol::SeqEmpty
        | Symbol::SeqUnit
        | Symbol::SeqLen
        | Symbol::SeqNth
        | Symbol::SeqUpdate
        | Symbol::SeqExtract
        | Symbol::SeqConcat => {
            return Err(EncodeError::Unsupported(head.smtlib_name()))
        }
        other => other.smtlib_name(),
    };
    if args.is_empty() {
        return Ok(name);
    }
    let mut out = format!("({name}");
    for &a in args {
        out.push(' ');
        out.push_str(&print_term(store, a)?);
    }
    out.push(')');
    Ok(out)
}

fn elem_of<'a>(store: &'a TermStore, t: TermId) -> &'a Sort {
    store.sort(t).elem_sort().unwrap_or(&Sort::Int)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_script;

    #[test]
    fn prelude_mentions_the_polymorphic_datatype() {
        let text = emit_prelude(&EmitterConfig::default());
        assert!(text.contains("(declare-datatypes ((NSeq 1))"));
        assert!(text.contains("(declare-datatypes ((NSeq_Int 0))"));
    }

    #[test]
    fn pattern_toggle_strips_the_annotation() {
        let cfg = EmitterConfig { patterns_on: false, ..Default::default() };
        let text = emit_prelude(&cfg);
        assert!(!text.contains(":pattern"));
        assert!(emit_prelude(&EmitterConfig::default()).contains(":pattern"));
    }

    #[test]
    fn prelude_reparses() {
        let mut store = TermStore::new();
        let text = emit_prelude(&EmitterConfig::default());
        parse_script(&text, &mut store).unwrap();
        let cfg = EmitterConfig { patterns_on: false, ..Default::default() };
        let mut store = TermStore::new();
        parse_script(&emit_prelude_for(&cfg, &[Sort::Int, Sort::Bool]), &mut store).unwrap();
    }

    #[test]
    fn problem_round_trips_and_uses_definitions() {
        let src = "\
(declare-const s (NSeq Int))
(declare-const i Int)
(assert (= (nseq.first s) 0))
(assert (= (nseq.get (nseq.update s (nseq.const 1 2 5)) i) 5))
(check-sat)";
        let mut store = TermStore::new();
        let script = parse_script(src, &mut store).unwrap();
        let text = emit_problem(&store, &script, &EmitterConfig::default()).unwrap();
        assert!(text.contains("(define-fun nseq_int.update"));
        assert!(text.contains("(assert (= (nseq_int.first s) 0))"));
        assert!(text.ends_with("(check-sat)\n"));
        let mut store2 = TermStore::new();
        parse_script(&text, &mut store2).unwrap();
    }

    #[test]
    fn empty_script_is_prelude_plus_check_sat() {
        let mut store = TermStore::new();
        let script = parse_script("(check-sat)", &mut store).unwrap();
        let text = emit_problem(&store, &script, &EmitterConfig::default()).unwrap();
        assert!(text.ends_with("(check-sat)\n"));
        let mut store2 = TermStore::new();
        parse_script(&text, &mut store2).unwrap();
    }
}
