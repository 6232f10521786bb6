//! Sorts, hash-consed terms and literals.
//!
//! Terms live in a [`TermStore`] which interns them maximally: building the
//! same head over the same children twice yields the same [`TermId`].

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Bool,
    Int,
    Uninterpreted(String),
    NSeq(Box<Sort>),
    Seq(Box<Sort>),
}

impl Sort {
    pub fn nseq(elem: Sort) -> Sort {
        Sort::NSeq(Box::new(elem))
    }

    pub fn seq(elem: Sort) -> Sort {
        Sort::Seq(Box::new(elem))
    }

    pub fn is_nseq(&self) -> bool {
        matches!(self, Sort::NSeq(_))
    }

    pub fn elem_sort(&self) -> Option<&Sort> {
        match self {
            Sort::NSeq(e) | Sort::Seq(e) => Some(e),
            _ => None,
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Bool => write!(f, "Bool"),
            Sort::Int => write!(f, "Int"),
            Sort::Uninterpreted(n) => write!(f, "{n}"),
            Sort::NSeq(e) => write!(f, "(NSeq {e})"),
            Sort::Seq(e) => write!(f, "(Seq {e})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Symbol {
    /// Named variable or declared constant.
    Var(String),
    Numeral(BigInt),
    BoolConst(bool),

    And,
    Or,
    Not,
    Implies,
    Ite,
    Eq,

    Add,
    Sub,
    Neg,
    Mul,
    Le,
    Lt,
    Ge,
    Gt,

    NseqFirst,
    NseqLast,
    NseqGet,
    NseqSet,
    NseqConst,
    NseqRelocate,
    NseqConcat,
    NseqSlice,
    NseqUpdate,
    /// The `::` concatenation used for normal forms, n-ary (>= 2 children).
    NormConcat,
    /// Equivalence modulo relocation, an internal theory atom.
    RelocEq,

    SeqEmpty,
    SeqUnit,
    SeqLen,
    SeqNth,
    SeqUpdate,
    SeqExtract,
    SeqConcat,

    /// Uninterpreted function application.
    Uf(String),
}

impl Symbol {
    pub fn smtlib_name(&self) -> String {
        match self {
            Symbol::Var(n) | Symbol::Uf(n) => n.clone(),
            Symbol::Numeral(n) => n.to_string(),
            Symbol::BoolConst(b) => b.to_string(),
            Symbol::And => "and".into(),
            Symbol::Or => "or".into(),
            Symbol::Not => "not".into(),
            Symbol::Implies => "=>".into(),
            Symbol::Ite => "ite".into(),
            Symbol::Eq => "=".into(),
            Symbol::Add => "+".into(),
            Symbol::Sub => "-".into(),
            Symbol::Neg => "-".into(),
            Symbol::Mul => "*".into(),
            Symbol::Le => "<=".into(),
            Symbol::Lt => "<".into(),
            Symbol::Ge => ">=".into(),
            Symbol::Gt => ">".into(),
            Symbol::NseqFirst => "nseq.first".into(),
            Symbol::NseqLast => "nseq.last".into(),
            Symbol::NseqGet => "nseq.get".into(),
            Symbol::NseqSet => "nseq.set".into(),
            Symbol::NseqConst => "nseq.const".into(),
            Symbol::NseqRelocate => "nseq.relocate".into(),
            Symbol::NseqConcat => "nseq.concat".into(),
            Symbol::NseqSlice => "nseq.slice".into(),
            Symbol::NseqUpdate => "nseq.update".into(),
            Symbol::NormConcat => "nseq.++".into(),
            Symbol::RelocEq => "nseq.releq".into(),
            Symbol::SeqEmpty => "seq.empty".into(),
            Symbol::SeqUnit => "seq.unit".into(),
            Symbol::SeqLen => "seq.len".into(),
            Symbol::SeqNth => "seq.nth".into(),
            Symbol::SeqUpdate => "seq.update".into(),
            Symbol::SeqExtract => "seq.extract".into(),
            Symbol::SeqConcat => "seq.++".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(pub u32);

impl TermId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone)]
pub struct TermData {
    pub head: Symbol,
    pub args: Vec<TermId>,
    pub sort: Sort,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    pub atom: TermId,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: TermId) -> Literal {
        Literal { atom, positive: true }
    }

    pub fn neg(atom: TermId) -> Literal {
        Literal { atom, positive: false }
    }

    pub fn negate(self) -> Literal {
        Literal { atom: self.atom, positive: !self.positive }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SortError {
    #[error("symbol {0} applied to {1} arguments, expected {2}")]
    Arity(String, usize, String),
    #[error("argument {index} of {symbol} has sort {found}, expected {expected}")]
    Argument { symbol: String, index: usize, found: String, expected: String },
    #[error("{0}")]
    Other(String),
}

/// Append-only interned term DAG.
#[derive(Debug, Default, Clone)]
pub struct TermStore {
    terms: Vec<TermData>,
    intern: HashMap<(Symbol, Vec<TermId>, Sort), TermId>,
    fresh_counter: u64,
}

impl TermStore {
    pub fn new() -> TermStore {
        TermStore::default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, id: TermId) -> &TermData {
        &self.terms[id.index()]
    }

    pub fn head(&self, id: TermId) -> &Symbol {
        &self.terms[id.index()].head
    }

    pub fn args(&self, id: TermId) -> &[TermId] {
        &self.terms[id.index()].args
    }

    pub fn sort(&self, id: TermId) -> &Sort {
        &self.terms[id.index()].sort
    }

    pub fn ids(&self) -> impl Iterator<Item = TermId> {
        (0..self.terms.len() as u32).map(TermId)
    }

    fn intern(&mut self, head: Symbol, args: Vec<TermId>, sort: Sort) -> TermId {
        let key = (head, args, sort);
        if let Some(&id) = self.intern.get(&key) {
            return id;
        }
        let id = TermId(self.terms.len() as u32);
        let (head, args, sort) = key.clone();
        self.terms.push(TermData { head, args, sort });
        self.intern.insert(key, id);
        id
    }

    /// Build a term, checking arity and argument sorts against the signature.
    pub fn mk(&mut self, head: Symbol, args: Vec<TermId>) -> Result<TermId, SortError> {
        let sort = self.result_sort(&head, &args)?;
        Ok(self.intern(head, args, sort))
    }

    fn arg_sort(&self, args: &[TermId], i: usize) -> &Sort {
        self.sort(args[i])
    }

    fn expect(
        &self,
        head: &Symbol,
        args: &[TermId],
        i: usize,
        expected: &Sort,
    ) -> Result<(), SortError> {
        let found = self.arg_sort(args, i);
        if found != expected {
            return Err(SortError::Argument {
                symbol: head.smtlib_name(),
                index: i,
                found: found.to_string(),
                expected: expected.to_string(),
            });
        }
        Ok(())
    }

    fn expect_arity(&self, head: &Symbol, args: &[TermId], n: usize) -> Result<(), SortError> {
        if args.len() != n {
            return Err(SortError::Arity(head.smtlib_name(), args.len(), n.to_string()));
        }
        Ok(())
    }

    fn nseq_arg(&self, head: &Symbol, args: &[TermId], i: usize) -> Result<Sort, SortError> {
        match self.arg_sort(args, i) {
            s @ Sort::NSeq(_) => Ok(s.clone()),
            other => Err(SortError::Argument {
                symbol: head.smtlib_name(),
                index: i,
                found: other.to_string(),
                expected: "(NSeq _)".into(),
            }),
        }
    }

    fn seq_arg(&self, head: &Symbol, args: &[TermId], i: usize) -> Result<Sort, SortError> {
        match self.arg_sort(args, i) {
            s @ Sort::Seq(_) => Ok(s.clone()),
            other => Err(SortError::Argument {
                symbol: head.smtlib_name(),
                index: i,
                found: other.to_string(),
                expected: "(Seq _)".into(),
            }),
        }
    }

    fn result_sort(&self, head: &Symbol, args: &[TermId]) -> Result<Sort, SortError> {
        use Symbol::*;
        let int = Sort::Int;
        match head {
            Var(_) | Numeral(_) | BoolConst(_) | SeqEmpty | Uf(_) => Err(SortError::Other(
                format!("{} must be built with its dedicated constructor", head.smtlib_name()),
            )),
            And | Or => {
                if args.is_empty() {
                    return Err(SortError::Arity(head.smtlib_name(), 0, ">= 1".into()));
                }
                for i in 0..args.len() {
                    self.expect(head, args, i, &Sort::Bool)?;
                }
                Ok(Sort::Bool)
            }
            Not => {
                self.expect_arity(head, args, 1)?;
                self.expect(head, args, 0, &Sort::Bool)?;
                Ok(Sort::Bool)
            }
            Implies => {
                self.expect_arity(head, args, 2)?;
                self.expect(head, args, 0, &Sort::Bool)?;
                self.expect(head, args, 1, &Sort::Bool)?;
                Ok(Sort::Bool)
            }
            Ite => {
                self.expect_arity(head, args, 3)?;
                self.expect(head, args, 0, &Sort::Bool)?;
                let t = self.arg_sort(args, 1).clone();
                self.expect(head, args, 2, &t)?;
                Ok(t)
            }
            Eq => {
                self.expect_arity(head, args, 2)?;
                let t = self.arg_sort(args, 0).clone();
                self.expect(head, args, 1, &t)?;
                Ok(Sort::Bool)
            }
            Add => {
                if args.len() < 2 {
                    return Err(SortError::Arity(head.smtlib_name(), args.len(), ">= 2".into()));
                }
                for i in 0..args.len() {
                    self.expect(head, args, i, &int)?;
                }
                Ok(int)
            }
            Sub | Mul => {
                self.expect_arity(head, args, 2)?;
                self.expect(head, args, 0, &int)?;
                self.expect(head, args, 1, &int)?;
                Ok(int)
            }
            Neg => {
                self.expect_arity(head, args, 1)?;
                self.expect(head, args, 0, &int)?;
                Ok(int)
            }
            Le | Lt | Ge | Gt => {
                self.expect_arity(head, args, 2)?;
                self.expect(head, args, 0, &int)?;
                self.expect(head, args, 1, &int)?;
                Ok(Sort::Bool)
            }
            NseqFirst | NseqLast => {
                self.expect_arity(head, args, 1)?;
                self.nseq_arg(head, args, 0)?;
                Ok(int)
            }
            NseqGet => {
                self.expect_arity(head, args, 2)?;
                let s = self.nseq_arg(head, args, 0)?;
                self.expect(head, args, 1, &int)?;
                Ok(s.elem_sort().unwrap().clone())
            }
            NseqSet => {
                self.expect_arity(head, args, 3)?;
                let s = self.nseq_arg(head, args, 0)?;
                self.expect(head, args, 1, &int)?;
                let elem = s.elem_sort().unwrap().clone();
                self.expect(head, args, 2, &elem)?;
                Ok(s)
            }
            NseqConst => {
                self.expect_arity(head, args, 3)?;
                self.expect(head, args, 0, &int)?;
                self.expect(head, args, 1, &int)?;
                let elem = self.arg_sort(args, 2).clone();
                if elem == Sort::Bool {
                    return Err(SortError::Other("NSeq element sort cannot be Bool".into()));
                }
                Ok(Sort::nseq(elem))
            }
            NseqRelocate => {
                self.expect_arity(head, args, 2)?;
                let s = self.nseq_arg(head, args, 0)?;
                self.expect(head, args, 1, &int)?;
                Ok(s)
            }
            NseqConcat => {
                self.expect_arity(head, args, 2)?;
                let s = self.nseq_arg(head, args, 0)?;
                self.expect(head, args, 1, &s)?;
                Ok(s)
            }
            NseqSlice => {
                self.expect_arity(head, args, 3)?;
                let s = self.nseq_arg(head, args, 0)?;
                self.expect(head, args, 1, &int)?;
                self.expect(head, args, 2, &int)?;
                Ok(s)
            }
            NseqUpdate => {
                self.expect_arity(head, args, 2)?;
                let s = self.nseq_arg(head, args, 0)?;
                self.expect(head, args, 1, &s)?;
                Ok(s)
            }
            NormConcat => {
                if args.len() < 2 {
                    return Err(SortError::Arity(head.smtlib_name(), args.len(), ">= 2".into()));
                }
                let s = self.nseq_arg(head, args, 0)?;
                for i in 1..args.len() {
                    self.expect(head, args, i, &s)?;
                }
                Ok(s)
            }
            RelocEq => {
                self.expect_arity(head, args, 2)?;
                let s = self.nseq_arg(head, args, 0)?;
                self.expect(head, args, 1, &s)?;
                Ok(Sort::Bool)
            }
            SeqUnit => {
                self.expect_arity(head, args, 1)?;
                let elem = self.arg_sort(args, 0).clone();
                Ok(Sort::seq(elem))
            }
            SeqLen => {
                self.expect_arity(head, args, 1)?;
                self.seq_arg(head, args, 0)?;
                Ok(int)
            }
            SeqNth => {
                self.expect_arity(head, args, 2)?;
                let s = self.seq_arg(head, args, 0)?;
                self.expect(head, args, 1, &int)?;
                Ok(s.elem_sort().unwrap().clone())
            }
            SeqUpdate => {
                self.expect_arity(head, args, 3)?;
                let s = self.seq_arg(head, args, 0)?;
                self.expect(head, args, 1, &int)?;
                self.expect(head, args, 2, &s)?;
                Ok(s)
            }
            SeqExtract => {
                self.expect_arity(head, args, 3)?;
                let s = self.seq_arg(head, args, 0)?;
                self.expect(head, args, 1, &int)?;
                self.expect(head, args, 2, &int)?;
                Ok(s)
            }
            SeqConcat => {
                if args.len() < 2 {
                    return Err(SortError::Arity(head.smtlib_name(), args.len(), ">= 2".into()));
                }
                let s = self.seq_arg(head, args, 0)?;
                for i in 1..args.len() {
                    self.expect(head, args, i, &s)?;
                }
                Ok(s)
            }
        }
    }

    // ----- leaf constructors -----

    pub fn var(&mut self, name: &str, sort: Sort) -> TermId {
        self.intern(Symbol::Var(name.to_string()), vec![], sort)
    }

    pub fn numeral<T: Into<BigInt>>(&mut self, n: T) -> TermId {
        self.intern(Symbol::Numeral(n.into()), vec![], Sort::Int)
    }

    pub fn bool_const(&mut self, b: bool) -> TermId {
        self.intern(Symbol::BoolConst(b), vec![], Sort::Bool)
    }

    pub fn seq_empty(&mut self, elem: Sort) -> TermId {
        self.intern(Symbol::SeqEmpty, vec![], Sort::seq(elem))
    }

    pub fn uf_app(&mut self, name: &str, args: Vec<TermId>, result: Sort) -> TermId {
        self.intern(Symbol::Uf(name.to_string()), args, result)
    }

    /// A globally fresh variable of the given sort.
    pub fn fresh_var(&mut self, prefix: &str, sort: Sort) -> TermId {
        loop {
            let name = format!("_{prefix}!{}", self.fresh_counter);
            self.fresh_counter += 1;
            let key = (Symbol::Var(name.clone()), vec![], sort.clone());
            if !self.intern.contains_key(&key) {
                return self.intern(Symbol::Var(name), vec![], sort);
            }
        }
    }

    pub fn free_nseq_var(&mut self, sort: Sort) -> Result<TermId, SortError> {
        if !sort.is_nseq() {
            return Err(SortError::Other(format!("expected an NSeq sort, got {sort}")));
        }
        Ok(self.fresh_var("k", sort))
    }

    // ----- derived constructors -----

    pub fn first(&mut self, s: TermId) -> Result<TermId, SortError> {
        self.mk(Symbol::NseqFirst, vec![s])
    }

    pub fn last(&mut self, s: TermId) -> Result<TermId, SortError> {
        self.mk(Symbol::NseqLast, vec![s])
    }

    /// `(fst_s, lst_s)` for an NSeq-sorted term.
    pub fn bounds_terms(&mut self, s: TermId) -> Result<(TermId, TermId), SortError> {
        Ok((self.first(s)?, self.last(s)?))
    }

    pub fn eq(&mut self, a: TermId, b: TermId) -> Result<TermId, SortError> {
        self.mk(Symbol::Eq, vec![a, b])
    }

    pub fn not(&mut self, a: TermId) -> Result<TermId, SortError> {
        self.mk(Symbol::Not, vec![a])
    }

    pub fn and(&mut self, args: Vec<TermId>) -> Result<TermId, SortError> {
        if args.len() == 1 {
            return Ok(args[0]);
        }
        self.mk(Symbol::And, args)
    }

    pub fn or(&mut self, args: Vec<TermId>) -> Result<TermId, SortError> {
        if args.len() == 1 {
            return Ok(args[0]);
        }
        self.mk(Symbol::Or, args)
    }

    pub fn add(&mut self, a: TermId, b: TermId) -> Result<TermId, SortError> {
        self.mk(Symbol::Add, vec![a, b])
    }

    pub fn sub(&mut self, a: TermId, b: TermId) -> Result<TermId, SortError> {
        self.mk(Symbol::Sub, vec![a, b])
    }

    pub fn le(&mut self, a: TermId, b: TermId) -> Result<TermId, SortError> {
        self.mk(Symbol::Le, vec![a, b])
    }

    pub fn lt(&mut self, a: TermId, b: TermId) -> Result<TermId, SortError> {
        self.mk(Symbol::Lt, vec![a, b])
    }

    /// Integer value of a numeral term, if it is one.
    pub fn as_numeral(&self, id: TermId) -> Option<&BigInt> {
        match self.head(id) {
            Symbol::Numeral(n) => Some(n),
            _ => None,
        }
    }

    pub fn is_var(&self, id: TermId) -> bool {
        matches!(self.head(id), Symbol::Var(_))
    }

    /// Free variables (and zero-ary uninterpreted constants) of a term.
    pub fn free_vars(&self, id: TermId, out: &mut Vec<TermId>) {
        let mut seen = vec![false; self.terms.len()];
        let mut stack = vec![id];
        while let Some(t) = stack.pop() {
            if seen[t.index()] {
                continue;
            }
            seen[t.index()] = true;
            if self.is_var(t) {
                out.push(t);
            }
            stack.extend(self.args(t).iter().copied());
        }
        out.sort();
        out.dedup();
    }

    /// All subterms of `id`, each listed once, children before parents.
    pub fn subterms(&self, id: TermId) -> Vec<TermId> {
        let mut seen = vec![false; self.terms.len()];
        let mut order = Vec::new();
        let mut stack = vec![(id, false)];
        while let Some((t, expanded)) = stack.pop() {
            if expanded {
                order.push(t);
                continue;
            }
            if seen[t.index()] {
                continue;
            }
            seen[t.index()] = true;
            stack.push((t, true));
            for &a in self.args(t) {
                stack.push((a, false));
            }
        }
        order
    }

    /// SMT-LIB s-expression rendering.
    pub fn display(&self, id: TermId) -> String {
        let mut out = String::new();
        self.write_term(id, &mut out);
        out
    }

    fn write_term(&self, id: TermId, out: &mut String) {
        let data = self.get(id);
        if data.args.is_empty() {
            match &data.head {
                Symbol::Numeral(n) if n.sign() == num_bigint::Sign::Minus => {
                    out.push_str(&format!("(- {})", -n));
                }
                Symbol::SeqEmpty => {
                    out.push_str(&format!("(as seq.empty {})", data.sort));
                }
                h => out.push_str(&h.smtlib_name()),
            }
            return;
        }
        out.push('(');
        out.push_str(&data.head.smtlib_name());
        for &a in &data.args {
            out.push(' ');
            self.write_term(a, out);
        }
        out.push(')');
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nseq_int() -> Sort {
        Sort::nseq(Sort::Int)
    }

    #[test]
    fn interning_is_idempotent() {
        let mut st = TermStore::new();
        let z = st.numeral(0);
        let v = st.var("v", Sort::Int);
        let a = st.mk(Symbol::NseqConst, vec![z, z, v]).unwrap();
        let b = st.mk(Symbol::NseqConst, vec![z, z, v]).unwrap();
        assert_eq!(a, b);
        let n = st.len();
        let _ = st.mk(Symbol::NseqConst, vec![z, z, v]).unwrap();
        assert_eq!(st.len(), n);
    }

    #[test]
    fn first_has_int_sort() {
        let mut st = TermStore::new();
        let s = st.var("s", nseq_int());
        let f = st.mk(Symbol::NseqFirst, vec![s]).unwrap();
        assert_eq!(st.sort(f), &Sort::Int);
    }

    #[test]
    fn ill_sorted_get_is_rejected() {
        let mut st = TermStore::new();
        let s = st.var("s", nseq_int());
        let t = st.bool_const(true);
        assert!(st.mk(Symbol::NseqGet, vec![s, t]).is_err());
        assert!(st.mk(Symbol::NseqGet, vec![s]).is_err());
    }

    #[test]
    fn bounds_terms_are_shared() {
        let mut st = TermStore::new();
        let s = st.var("s", nseq_int());
        let (f1, l1) = st.bounds_terms(s).unwrap();
        let (f2, l2) = st.bounds_terms(s).unwrap();
        assert_eq!((f1, l1), (f2, l2));
        assert_eq!(st.sort(f1), &Sort::Int);
        assert_eq!(st.sort(l1), &Sort::Int);
    }

    #[test]
    fn fresh_vars_are_distinct() {
        let mut st = TermStore::new();
        let a = st.free_nseq_var(nseq_int()).unwrap();
        let b = st.free_nseq_var(nseq_int()).unwrap();
        assert_ne!(a, b);
        assert!(st.free_nseq_var(Sort::Int).is_err());
    }

    #[test]
    fn slice_signature_matches_table() {
        let mut st = TermStore::new();
        let s = st.var("s", nseq_int());
        let i = st.numeral(1);
        let j = st.numeral(2);
        let sl = st.mk(Symbol::NseqSlice, vec![s, i, j]).unwrap();
        assert_eq!(st.sort(sl), &nseq_int());
    }

    #[test]
    fn bool_elements_rejected() {
        let mut st = TermStore::new();
        let z = st.numeral(0);
        let b = st.bool_const(true);
        assert!(st.mk(Symbol::NseqConst, vec![z, z, b]).is_err());
    }

    #[test]
    fn store_size_counts_distinct_subtrees() {
        let mut st = TermStore::new();
        let before = st.len();
        let s = st.var("s", nseq_int());
        let i = st.numeral(3);
        let g1 = st.mk(Symbol::NseqGet, vec![s, i]).unwrap();
        let g2 = st.mk(Symbol::NseqGet, vec![s, i]).unwrap();
        assert_eq!(g1, g2);
        // s, 3, get(s, 3): three new nodes only.
        assert_eq!(st.len(), before + 3);
    }
}
