//! SMT-LIB 2 front end for the supported fragment.
//!
//! Handles the command subset needed for sequence problems: sort and
//! function declarations, assertions over the core/arithmetic/sequence
//! signatures, `let`, `ite`, `distinct`, and — for re-parsing emitted
//! encodings — `declare-datatypes`, `define-fun` and quantified assertions
//! with `!` annotations.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::sexp::{parse_sexps, Pos, Sexp};
use crate::term::{Sort, Symbol, TermId, TermStore};

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl ParseError {
    fn at(pos: Pos, msg: impl Into<String>) -> ParseError {
        ParseError { line: pos.line, col: pos.col, msg: msg.into() }
    }
}

#[derive(Debug, Clone)]
pub enum Command {
    SetLogic(String),
    DeclareSort(String),
    DeclareConst { name: String, sort: Sort, term: TermId },
    DeclareFun { name: String, args: Vec<Sort>, result: Sort },
    DeclareDatatype { sort: String, constructor: String, fields: Vec<(String, Sort)> },
    DefineFun { name: String, params: Vec<(String, Sort)>, result: Sort, body: TermId },
    Assert(TermId),
    AssertForall { binders: Vec<(String, Sort)>, body: TermId },
    CheckSat,
    GetModel,
    /// set-option / set-info, kept only for faithfulness.
    Ignored(String),
}

#[derive(Debug, Clone, Default)]
pub struct Script {
    pub commands: Vec<Command>,
}

impl Script {
    pub fn assertions(&self) -> Vec<TermId> {
        self.commands
            .iter()
            .filter_map(|c| match c {
                Command::Assert(t) => Some(*t),
                _ => None,
            })
            .collect()
    }

    pub fn declared_consts(&self) -> Vec<(String, Sort, TermId)> {
        self.commands
            .iter()
            .filter_map(|c| match c {
                Command::DeclareConst { name, sort, term } => {
                    Some((name.clone(), sort.clone(), *term))
                }
                _ => None,
            })
            .collect()
    }

    pub fn has_check_sat(&self) -> bool {
        self.commands.iter().any(|c| matches!(c, Command::CheckSat))
    }
}

struct Parser<'a> {
    store: &'a mut TermStore,
    sorts: BTreeMap<String, Sort>,
    funs: BTreeMap<String, (Vec<Sort>, Sort)>,
    defs: BTreeMap<String, (Vec<(String, Sort)>, Sort, TermId)>,
}

/// Scoped bindings for `let` bodies and quantifier binders.
type Bindings = BTreeMap<String, TermId>;

pub fn parse_script(input: &str, store: &mut TermStore) -> Result<Script, ParseError> {
    let sexps = parse_sexps(input)
        .map_err(|e| ParseError { line: e.pos.line, col: e.pos.col, msg: e.msg })?;
    let mut p = Parser {
        store,
        sorts: BTreeMap::new(),
        funs: BTreeMap::new(),
        defs: BTreeMap::new(),
    };
    let mut script = Script::default();
    for s in &sexps {
        script.commands.push(p.command(s)?);
    }
    Ok(script)
}

impl Parser<'_> {
    fn command(&mut self, s: &Sexp) -> Result<Command, ParseError> {
        let items = s
            .list()
            .ok_or_else(|| ParseError::at(s.pos(), "expected a command"))?;
        let head = items
            .first()
            .and_then(|h| h.atom())
            .ok_or_else(|| ParseError::at(s.pos(), "expected a command name"))?;
        match head {
            "set-logic" => {
                let name = self.atom(&items[1])?;
                Ok(Command::SetLogic(name.to_string()))
            }
            "set-option" | "set-info" => Ok(Command::Ignored(head.to_string())),
            "declare-sort" => {
                let name = self.atom(&items[1])?.to_string();
                if items.len() > 2 && self.atom(&items[2])? != "0" {
                    return Err(ParseError::at(items[2].pos(), "only arity-0 sorts supported"));
                }
                self.sorts.insert(name.clone(), Sort::Uninterpreted(name.clone()));
                Ok(Command::DeclareSort(name))
            }
            "declare-const" => {
                if items.len() != 3 {
                    return Err(ParseError::at(s.pos(), "declare-const takes a name and a sort"));
                }
                let name = self.atom(&items[1])?.to_string();
                let sort = self.sort(&items[2])?;
                self.funs.insert(name.clone(), (Vec::new(), sort.clone()));
                let term = self.store.var(&name, sort.clone());
                Ok(Command::DeclareConst { name, sort, term })
            }
            "declare-fun" => {
                if items.len() != 4 {
                    return Err(ParseError::at(s.pos(), "declare-fun takes name, args, result"));
                }
                let name = self.atom(&items[1])?.to_string();
                let arg_sorts = items[2]
                    .list()
                    .ok_or_else(|| ParseError::at(items[2].pos(), "expected an argument list"))?
                    .iter()
                    .map(|a| self.sort(a))
                    .collect::<Result<Vec<_>, _>>()?;
                let result = self.sort(&items[3])?;
                self.funs.insert(name.clone(), (arg_sorts.clone(), result.clone()));
                if arg_sorts.is_empty() {
                    let term = self.store.var(&name, result.clone());
                    return Ok(Command::DeclareConst { name, sort: result, term });
                }
                Ok(Command::DeclareFun { name, args: arg_sorts, result })
            }
            "declare-datatypes" => self.declare_datatypes(s, items),
            "define-fun" => {
                if items.len() != 5 {
                    return Err(ParseError::at(s.pos(), "define-fun takes name, params, result, body"));
                }
                let name = self.atom(&items[1])?.to_string();
                let params = self.binders(&items[2])?;
                let result = self.sort(&items[3])?;
                let mut scope = Bindings::new();
                for (pname, psort) in &params {
                    scope.insert(pname.clone(), self.store.var(pname, psort.clone()));
                }
                let body = self.term(&items[4], &scope)?;
                if self.store.sort(body) != &result {
                    return Err(ParseError::at(
                        items[4].pos(),
                        format!("body of {name} has sort {}, expected {result}", self.store.sort(body)),
                    ));
                }
                self.defs.insert(name.clone(), (params.clone(), result.clone(), body));
                Ok(Command::DefineFun { name, params, result, body })
            }
            "assert" => {
                if items.len() != 2 {
                    return Err(ParseError::at(s.pos(), "assert takes one term"));
                }
                if let Some(list) = items[1].list() {
                    if list.first().and_then(|h| h.atom()) == Some("forall") {
                        return self.assert_forall(&items[1], list);
                    }
                }
                let t = self.term(&items[1], &Bindings::new())?;
                if self.store.sort(t) != &Sort::Bool {
                    return Err(ParseError::at(items[1].pos(), "asserted term must be Bool"));
                }
                Ok(Command::Assert(t))
            }
            "check-sat" => Ok(Command::CheckSat),
            "get-model" => Ok(Command::GetModel),
            "exit" => Ok(Command::Ignored("exit".into())),
            other => Err(ParseError::at(s.pos(), format!("unsupported command {other}"))),
        }
    }

    fn declare_datatypes(&mut self, s: &Sexp, items: &[Sexp]) -> Result<Command, ParseError> {
        // ((Name 0)) (((ctor (sel Sort) ...)))  — single non-parametric datatype
        let decls = items
            .get(1)
            .and_then(|x| x.list())
            .ok_or_else(|| ParseError::at(s.pos(), "malformed declare-datatypes"))?;
        let bodies = items
            .get(2)
            .and_then(|x| x.list())
            .ok_or_else(|| ParseError::at(s.pos(), "malformed declare-datatypes"))?;
        if decls.len() != 1 || bodies.len() != 1 {
            return Err(ParseError::at(s.pos(), "only a single datatype is supported"));
        }
        let name = decls[0]
            .list()
            .and_then(|d| d.first())
            .and_then(|n| n.atom())
            .ok_or_else(|| ParseError::at(decls[0].pos(), "expected (Name arity)"))?
            .to_string();
        self.sorts.insert(name.clone(), Sort::Uninterpreted(name.clone()));
        let sort = Sort::Uninterpreted(name.clone());
        let ctors = bodies[0]
            .list()
            .ok_or_else(|| ParseError::at(bodies[0].pos(), "expected constructor list"))?;
        if ctors.len() != 1 {
            return Err(ParseError::at(bodies[0].pos(), "only one constructor is supported"));
        }
        let ctor = ctors[0]
            .list()
            .ok_or_else(|| ParseError::at(ctors[0].pos(), "expected (ctor fields...)"))?;
        let cname = self.atom(&ctor[0])?.to_string();
        let mut fields = Vec::new();
        let mut field_sorts = Vec::new();
        for f in &ctor[1..] {
            let fl = f
                .list()
                .ok_or_else(|| ParseError::at(f.pos(), "expected (selector Sort)"))?;
            let fname = self.atom(&fl[0])?.to_string();
            let fsort = self.sort(&fl[1])?;
            self.funs.insert(fname.clone(), (vec![sort.clone()], fsort.clone()));
            field_sorts.push(fsort.clone());
            fields.push((fname, fsort));
        }
        self.funs.insert(cname.clone(), (field_sorts, sort));
        Ok(Command::DeclareDatatype { sort: name, constructor: cname, fields })
    }

    fn assert_forall(&mut self, s: &Sexp, list: &[Sexp]) -> Result<Command, ParseError> {
        if list.len() != 3 {
            return Err(ParseError::at(s.pos(), "forall takes binders and a body"));
        }
        let mut binders = self.binders(&list[1])?;
        let mut scope = Bindings::new();
        for (name, sort) in &binders {
            scope.insert(name.clone(), self.store.var(name, sort.clone()));
        }
        let body = self.quant_body(&list[2], &scope, &mut binders)?;
        if self.store.sort(body) != &Sort::Bool {
            return Err(ParseError::at(list[2].pos(), "quantified body must be Bool"));
        }
        Ok(Command::AssertForall { binders, body })
    }

    /// Body of a universal assertion. Nested positive `forall`s (under `and`,
    /// `let` and annotations) are prenexed into the outer binder list.
    fn quant_body(
        &mut self,
        s: &Sexp,
        scope: &Bindings,
        binders: &mut Vec<(String, Sort)>,
    ) -> Result<TermId, ParseError> {
        let Some(items) = s.list() else {
            return self.term(s, scope);
        };
        match items.first().and_then(|h| h.atom()) {
            Some("forall") => {
                if items.len() != 3 {
                    return Err(ParseError::at(s.pos(), "forall takes binders and a body"));
                }
                let extra = self.binders(&items[1])?;
                let mut inner = scope.clone();
                for (name, sort) in &extra {
                    inner.insert(name.clone(), self.store.var(name, sort.clone()));
                }
                binders.extend(extra);
                self.quant_body(&items[2], &inner, binders)
            }
            Some("!") if items.len() >= 2 => self.quant_body(&items[1], scope, binders),
            Some("and") => {
                let parts: Vec<TermId> = items[1..]
                    .iter()
                    .map(|a| self.quant_body(a, scope, binders))
                    .collect::<Result<_, _>>()?;
                self.store
                    .and(parts)
                    .map_err(|e| ParseError::at(s.pos(), e.to_string()))
            }
            Some("let") => {
                // rebuild the let scope, then continue looking for quantifiers
                let bindings = items[1]
                    .list()
                    .ok_or_else(|| ParseError::at(items[1].pos(), "expected let bindings"))?;
                let mut inner = scope.clone();
                let mut bound = Vec::new();
                for b in bindings {
                    let pair = b
                        .list()
                        .ok_or_else(|| ParseError::at(b.pos(), "expected (name term)"))?;
                    if pair.len() != 2 {
                        return Err(ParseError::at(b.pos(), "expected (name term)"));
                    }
                    let name = self.atom(&pair[0])?.to_string();
                    let t = self.term(&pair[1], scope)?;
                    bound.push((name, t));
                }
                for (name, t) in bound {
                    inner.insert(name, t);
                }
                self.quant_body(&items[2], &inner, binders)
            }
            _ => self.term(s, scope),
        }
    }

    fn binders(&mut self, s: &Sexp) -> Result<Vec<(String, Sort)>, ParseError> {
        s.list()
            .ok_or_else(|| ParseError::at(s.pos(), "expected a binder list"))?
            .iter()
            .map(|b| {
                let pair = b
                    .list()
                    .ok_or_else(|| ParseError::at(b.pos(), "expected (name Sort)"))?;
                if pair.len() != 2 {
                    return Err(ParseError::at(b.pos(), "expected (name Sort)"));
                }
                Ok((self.atom(&pair[0])?.to_string(), self.sort(&pair[1])?))
            })
            .collect()
    }

    fn atom<'s>(&self, s: &'s Sexp) -> Result<&'s str, ParseError> {
        s.atom().ok_or_else(|| ParseError::at(s.pos(), "expected a symbol"))
    }

    fn sort(&self, s: &Sexp) -> Result<Sort, ParseError> {
        match s {
            Sexp::Atom(name, pos) => match name.as_str() {
                "Int" => Ok(Sort::Int),
                "Bool" => Ok(Sort::Bool),
                _ => self
                    .sorts
                    .get(name)
                    .cloned()
                    .ok_or_else(|| ParseError::at(*pos, format!("unknown sort {name}"))),
            },
            Sexp::List(items, pos) => {
                let head = items.first().and_then(|h| h.atom());
                match head {
                    Some("NSeq") if items.len() == 2 => Ok(Sort::nseq(self.sort(&items[1])?)),
                    Some("Seq") if items.len() == 2 => Ok(Sort::seq(self.sort(&items[1])?)),
                    _ => Err(ParseError::at(*pos, "malformed sort")),
                }
            }
        }
    }

    fn term(&mut self, s: &Sexp, scope: &Bindings) -> Result<TermId, ParseError> {
        match s {
            Sexp::Atom(a, pos) => self.atom_term(a, *pos, scope),
            Sexp::List(items, pos) => {
                if items.is_empty() {
                    return Err(ParseError::at(*pos, "empty application"));
                }
                // (as seq.empty (Seq T)) and other qualified constants
                if items[0].atom() == Some("as") {
                    if items.len() == 3 && items[1].atom() == Some("seq.empty") {
                        let sort = self.sort(&items[2])?;
                        let Some(elem) = sort.elem_sort().cloned() else {
                            return Err(ParseError::at(*pos, "seq.empty needs a Seq sort"));
                        };
                        return Ok(self.store.seq_empty(elem));
                    }
                    return Err(ParseError::at(*pos, "unsupported 'as' form"));
                }
                if items[0].atom() == Some("let") {
                    return self.let_term(s, items, scope);
                }
                if items[0].atom() == Some("!") {
                    // annotated term: keep the term, validate attribute shape
                    if items.len() < 2 {
                        return Err(ParseError::at(*pos, "malformed annotation"));
                    }
                    return self.term(&items[1], scope);
                }
                let head = self
                    .atom(&items[0])
                    .map_err(|_| ParseError::at(*pos, "expected a function symbol"))?
                    .to_string();
                let args: Vec<TermId> = items[1..]
                    .iter()
                    .map(|a| self.term(a, scope))
                    .collect::<Result<_, _>>()?;
                self.apply(&head, args, *pos)
            }
        }
    }

    fn atom_term(&mut self, a: &str, pos: Pos, scope: &Bindings) -> Result<TermId, ParseError> {
        if let Some(&t) = scope.get(a) {
            return Ok(t);
        }
        if a == "true" {
            return Ok(self.store.bool_const(true));
        }
        if a == "false" {
            return Ok(self.store.bool_const(false));
        }
        if let Ok(n) = a.parse::<BigInt>() {
            let mut id = self.store.numeral(n);
            if a.starts_with('-') {
                // SMT-LIB has no negative numerals; mirror (- n) instead.
                let n: BigInt = a[1..].parse().unwrap();
                let inner = self.store.numeral(n);
                id = self
                    .store
                    .mk(Symbol::Neg, vec![inner])
                    .map_err(|e| ParseError::at(pos, e.to_string()))?;
            }
            return Ok(id);
        }
        if let Some((args, sort)) = self.funs.get(a) {
            if args.is_empty() {
                return Ok(self.store.var(a, sort.clone()));
            }
            return Err(ParseError::at(pos, format!("{a} expects {} arguments", args.len())));
        }
        if let Some((params, _, _)) = self.defs.get(a) {
            if params.is_empty() {
                let (_, _, body) = self.defs[a].clone();
                return Ok(body);
            }
        }
        Err(ParseError::at(pos, format!("unknown symbol {a}")))
    }

    fn let_term(&mut self, s: &Sexp, items: &[Sexp], scope: &Bindings) -> Result<TermId, ParseError> {
        if items.len() != 3 {
            return Err(ParseError::at(s.pos(), "let takes bindings and a body"));
        }
        let bindings = items[1]
            .list()
            .ok_or_else(|| ParseError::at(items[1].pos(), "expected let bindings"))?;
        let mut inner = scope.clone();
        // simultaneous binding: evaluate all right-hand sides in the outer scope
        let mut bound = Vec::new();
        for b in bindings {
            let pair = b
                .list()
                .ok_or_else(|| ParseError::at(b.pos(), "expected (name term)"))?;
            if pair.len() != 2 {
                return Err(ParseError::at(b.pos(), "expected (name term)"));
            }
            let name = self.atom(&pair[0])?.to_string();
            let t = self.term(&pair[1], scope)?;
            bound.push((name, t));
        }
        for (name, t) in bound {
            inner.insert(name, t);
        }
        self.term(&items[2], &inner)
    }

    fn apply(&mut self, head: &str, args: Vec<TermId>, pos: Pos) -> Result<TermId, ParseError> {
        let sym = match head {
            "and" => Some(Symbol::And),
            "or" => Some(Symbol::Or),
            "not" => Some(Symbol::Not),
            "=>" => Some(Symbol::Implies),
            "ite" => Some(Symbol::Ite),
            "=" => Some(Symbol::Eq),
            "+" => Some(Symbol::Add),
            "*" => Some(Symbol::Mul),
            "<=" => Some(Symbol::Le),
            "<" => Some(Symbol::Lt),
            ">=" => Some(Symbol::Ge),
            ">" => Some(Symbol::Gt),
            "nseq.first" => Some(Symbol::NseqFirst),
            "nseq.last" => Some(Symbol::NseqLast),
            "nseq.get" => Some(Symbol::NseqGet),
            "nseq.set" => Some(Symbol::NseqSet),
            "nseq.const" => Some(Symbol::NseqConst),
            "nseq.relocate" => Some(Symbol::NseqRelocate),
            "nseq.releq" => Some(Symbol::RelocEq),
            "nseq.concat" => Some(Symbol::NseqConcat),
            "nseq.slice" => Some(Symbol::NseqSlice),
            "nseq.update" => Some(Symbol::NseqUpdate),
            "seq.unit" => Some(Symbol::SeqUnit),
            "seq.len" => Some(Symbol::SeqLen),
            "seq.nth" => Some(Symbol::SeqNth),
            "seq.update" => Some(Symbol::SeqUpdate),
            "seq.extract" => Some(Symbol::SeqExtract),
            "seq.++" => Some(Symbol::SeqConcat),
            _ => None,
        };
        let mk_err = |e: crate::term::SortError| ParseError::at(pos, e.to_string());
        if head == "-" {
            // unary negation or left-associated subtraction
            return match args.len() {
                1 => self.store.mk(Symbol::Neg, args).map_err(mk_err),
                0 => Err(ParseError::at(pos, "- needs arguments")),
                _ => {
                    let mut acc = args[0];
                    for &a in &args[1..] {
                        acc = self.store.mk(Symbol::Sub, vec![acc, a]).map_err(mk_err)?;
                    }
                    Ok(acc)
                }
            };
        }
        if head == "=" && args.len() > 2 {
            // chained equality
            let mut parts = Vec::new();
            for w in args.windows(2) {
                parts.push(self.store.mk(Symbol::Eq, vec![w[0], w[1]]).map_err(mk_err)?);
            }
            return self.store.mk(Symbol::And, parts).map_err(mk_err);
        }
        if head == "distinct" {
            let mut parts = Vec::new();
            for i in 0..args.len() {
                for j in i + 1..args.len() {
                    let eq = self.store.mk(Symbol::Eq, vec![args[i], args[j]]).map_err(mk_err)?;
                    parts.push(self.store.mk(Symbol::Not, vec![eq]).map_err(mk_err)?);
                }
            }
            return match parts.len() {
                0 => Ok(self.store.bool_const(true)),
                1 => Ok(parts[0]),
                _ => self.store.mk(Symbol::And, parts).map_err(mk_err),
            };
        }
        if head == "*" && args.len() > 2 {
            let mut acc = args[0];
            for &a in &args[1..] {
                acc = self.store.mk(Symbol::Mul, vec![acc, a]).map_err(mk_err)?;
            }
            return Ok(acc);
        }
        if let Some(sym) = sym {
            // single-argument and/or collapse to the argument
            if matches!(sym, Symbol::And | Symbol::Or) && args.len() == 1 {
                return Ok(args[0]);
            }
            return self.store.mk(sym, args).map_err(mk_err);
        }
        // defined functions: inline the body with parameters substituted
        if let Some((params, _, body)) = self.defs.get(head).cloned() {
            if params.len() != args.len() {
                return Err(ParseError::at(pos, format!("{head} expects {} arguments", params.len())));
            }
            let mut subst = BTreeMap::new();
            for ((pname, psort), &arg) in params.iter().zip(&args) {
                let pvar = self.store.var(pname, psort.clone());
                if self.store.sort(arg) != psort {
                    return Err(ParseError::at(pos, format!("argument sort mismatch for {head}")));
                }
                subst.insert(pvar, arg);
            }
            return self.substitute(body, &subst).map_err(mk_err);
        }
        // declared uninterpreted functions
        if let Some((arg_sorts, result)) = self.funs.get(head).cloned() {
            if arg_sorts.len() != args.len() {
                return Err(ParseError::at(pos, format!("{head} expects {} arguments", arg_sorts.len())));
            }
            for (i, (&a, expect)) in args.iter().zip(&arg_sorts).enumerate() {
                if self.store.sort(a) != expect {
                    return Err(ParseError::at(
                        pos,
                        format!("argument {i} of {head} has sort {}, expected {expect}", self.store.sort(a)),
                    ));
                }
            }
            return Ok(self.store.uf_app(head, args, result));
        }
        Err(ParseError::at(pos, format!("unknown symbol {head}")))
    }

    fn substitute(
        &mut self,
        t: TermId,
        subst: &BTreeMap<TermId, TermId>,
    ) -> Result<TermId, crate::term::SortError> {
        if let Some(&r) = subst.get(&t) {
            return Ok(r);
        }
        let data = self.store.get(t).clone();
        if data.args.is_empty() {
            return Ok(t);
        }
        let args = data
            .args
            .iter()
            .map(|&a| self.substitute(a, subst))
            .collect::<Result<Vec<_>, _>>()?;
        if let Symbol::Uf(name) = &data.head {
            return Ok(self.store.uf_app(name, args, data.sort));
        }
        self.store.mk(data.head, args)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_basic_nseq_problem() {
        let src = "\
(set-logic ALL)
(declare-sort E 0)
(declare-const s (NSeq E))
(declare-const v E)
(assert (= (nseq.get s 0) v))
(assert (<= (nseq.first s) 0))
(check-sat)";
        let mut st = TermStore::new();
        let script = parse_script(src, &mut st).unwrap();
        assert_eq!(script.assertions().len(), 2);
        assert!(script.has_check_sat());
        let a0 = script.assertions()[0];
        assert_eq!(st.display(a0), "(= (nseq.get s 0) v)");
    }

    #[test]
    fn rejects_ill_sorted_terms_with_position() {
        let src = "(declare-const x Int)\n(assert (nseq.get x 0))";
        let mut st = TermStore::new();
        let err = parse_script(src, &mut st).unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn let_and_ite_are_supported() {
        let src = "\
(declare-const x Int)
(assert (let ((y (+ x 1))) (= (ite (< x 0) y x) 3)))";
        let mut st = TermStore::new();
        let script = parse_script(src, &mut st).unwrap();
        assert_eq!(script.assertions().len(), 1);
    }

    #[test]
    fn distinct_expands_to_pairwise_diseqs() {
        let src = "\
(declare-const a Int)(declare-const b Int)(declare-const c Int)
(assert (distinct a b c))";
        let mut st = TermStore::new();
        let script = parse_script(src, &mut st).unwrap();
        let t = script.assertions()[0];
        assert_eq!(st.args(t).len(), 3);
    }

    #[test]
    fn seq_operations_parse() {
        let src = "\
(declare-const s (Seq Int))
(assert (= (seq.len s) 2))
(assert (= (seq.nth s 0) 7))
(assert (= (seq.++ s (seq.unit 1)) (seq.update s 0 (as seq.empty (Seq Int)))))";
        let mut st = TermStore::new();
        let script = parse_script(src, &mut st).unwrap();
        assert_eq!(script.assertions().len(), 3);
    }

    #[test]
    fn datatype_and_define_fun_round_trip_shapes() {
        let src = "\
(declare-datatypes ((NSI 0)) (((mk-nseq (first Int) (seq (Seq Int))))))
(define-fun last ((s NSI)) Int (- (+ (first s) (seq.len (seq s))) 1))
(declare-const a NSI)
(assert (= (last a) 3))
(assert (forall ((f Int) (v Int)) (! (>= f v) :pattern ((first a)))))";
        let mut st = TermStore::new();
        let script = parse_script(src, &mut st).unwrap();
        assert!(matches!(script.commands[0], Command::DeclareDatatype { .. }));
        assert!(matches!(script.commands[1], Command::DefineFun { .. }));
        // defined function was inlined at the call site
        let t = script.assertions()[0];
        assert!(st.display(t).contains("seq.len"));
        assert!(matches!(script.commands.last(), Some(Command::AssertForall { .. })));
    }

    #[test]
    fn negative_numerals_render_canonically() {
        let src = "(declare-const x Int)(assert (= x -3))";
        let mut st = TermStore::new();
        let script = parse_script(src, &mut st).unwrap();
        let t = script.assertions()[0];
        assert_eq!(st.display(t), "(= x (- 3))");
    }
}
