//! Reference semantics: a concrete evaluator and a brute-force enumerator.
//!
//! This module is the independent ground truth the solver is tested against.
//! It deliberately shares no reasoning code with the search engine.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::term::{Sort, Symbol, TermId, TermStore};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NSeqValue {
    pub first: BigInt,
    pub last: BigInt,
    pub elems: Vec<Value>,
}

impl NSeqValue {
    pub fn new(first: BigInt, last: BigInt, elems: Vec<Value>) -> NSeqValue {
        let len = nseq_len(&first, &last);
        assert_eq!(elems.len(), len, "element list does not match bounds");
        NSeqValue { first, last, elems }
    }

    pub fn empty(first: BigInt, last: BigInt) -> NSeqValue {
        assert!(last < first);
        NSeqValue { first, last, elems: vec![] }
    }

    pub fn is_empty(&self) -> bool {
        self.last < self.first
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn in_bounds(&self, i: &BigInt) -> bool {
        &self.first <= i && i <= &self.last
    }

    pub fn at(&self, i: &BigInt) -> &Value {
        let off = (i - &self.first).to_usize().expect("index out of bounds");
        &self.elems[off]
    }
}

pub fn nseq_len(first: &BigInt, last: &BigInt) -> usize {
    if last < first {
        0
    } else {
        (last - first + 1u8).to_usize().expect("bounds too large for a concrete value")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Int(BigInt),
    /// Member of the finite carrier of an uninterpreted sort.
    Elem(String, u32),
    NSeq(NSeqValue),
    Seq(Vec<Value>),
}

impl Value {
    pub fn int<T: Into<BigInt>>(n: T) -> Value {
        Value::Int(n.into())
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_nseq(&self) -> Option<&NSeqValue> {
        match self {
            Value::NSeq(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_seq(&self) -> Option<&[Value]> {
        match self {
            Value::Seq(s) => Some(s),
            _ => None,
        }
    }
}

/// Key for a value that the semantics leaves unconstrained: an out-of-bounds
/// read or an uninterpreted function application. The key is built from
/// argument *values*, so congruent reads share one key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ReadKey {
    /// `nseq.get` outside the bounds, keyed by the n-sequence value and index.
    NseqOob(NSeqValue, BigInt),
    /// `seq.nth` outside `[0, len)`, keyed by content and index.
    SeqOob(Vec<Value>, BigInt),
    /// Uninterpreted function application.
    Uf(String, Vec<Value>),
}

#[derive(Debug, Clone, Default)]
pub struct Model {
    pub assignment: BTreeMap<TermId, Value>,
    /// Chosen values for unconstrained reads (see [`ReadKey`]).
    pub reads: BTreeMap<ReadKey, Value>,
}

impl Model {
    pub fn assign(&mut self, var: TermId, v: Value) {
        self.assignment.insert(var, v);
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("unassigned variable {0}")]
    UnassignedVariable(String),
    #[error("sort {0} is not supported by the evaluator")]
    Unsupported(String),
    #[error("concrete bounds too large to evaluate")]
    TooLarge,
}

/// Which definition of the NSeq symbols to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Semantics {
    /// Direct n-indexed sequence semantics.
    Direct,
    /// The Seq+ADT pair representation: an n-sequence is a first index and a
    /// 0-indexed content list. Out-of-bounds reads are keyed on the content,
    /// and empty n-sequences always have `last = first - 1`.
    Appendix,
}

pub struct Evaluator<'a> {
    store: &'a TermStore,
    model: &'a Model,
    semantics: Semantics,
    partial: bool,
    /// Read keys that were consulted but had no assigned value.
    pub discovered: Vec<ReadKey>,
}

impl<'a> Evaluator<'a> {
    pub fn new(store: &'a TermStore, model: &'a Model) -> Evaluator<'a> {
        Evaluator { store, model, semantics: Semantics::Direct, partial: false, discovered: vec![] }
    }

    pub fn with_semantics(mut self, semantics: Semantics) -> Self {
        self.semantics = semantics;
        self
    }

    /// In partial mode unassigned variables and unconstrained reads yield
    /// `None` instead of an error, so partially built assignments can still
    /// refute assertions early.
    pub fn partial(mut self) -> Self {
        self.partial = true;
        self
    }

    fn read(&mut self, key: ReadKey, sort: &Sort) -> Result<Option<Value>, EvalError> {
        if let Some(v) = self.model.reads.get(&key) {
            return Ok(Some(v.clone()));
        }
        if self.partial {
            return Ok(None);
        }
        self.discovered.push(key);
        Ok(Some(default_value(sort)))
    }

    pub fn eval(&mut self, t: TermId) -> Result<Option<Value>, EvalError> {
        use Symbol::*;
        let data = self.store.get(t);
        match &data.head {
            Var(name) => match self.model.assignment.get(&t) {
                Some(v) => Ok(Some(v.clone())),
                None if self.partial => Ok(None),
                None => Err(EvalError::UnassignedVariable(name.clone())),
            },
            Numeral(n) => Ok(Some(Value::Int(n.clone()))),
            BoolConst(b) => Ok(Some(Value::Bool(*b))),
            SeqEmpty => Ok(Some(Value::Seq(vec![]))),

            And => {
                let mut unknown = false;
                for &a in &data.args {
                    match self.eval(a)? {
                        Some(Value::Bool(false)) => return Ok(Some(Value::Bool(false))),
                        Some(Value::Bool(true)) => {}
                        None => unknown = true,
                        _ => unreachable!("ill-sorted and"),
                    }
                }
                Ok(if unknown { None } else { Some(Value::Bool(true)) })
            }
            Or => {
                let mut unknown = false;
                for &a in &data.args {
                    match self.eval(a)? {
                        Some(Value::Bool(true)) => return Ok(Some(Value::Bool(true))),
                        Some(Value::Bool(false)) => {}
                        None => unknown = true,
                        _ => unreachable!("ill-sorted or"),
                    }
                }
                Ok(if unknown { None } else { Some(Value::Bool(false)) })
            }
            Not => Ok(self.eval(data.args[0])?.map(|v| Value::Bool(!v.as_bool().unwrap()))),
            Implies => {
                let a = self.eval(data.args[0])?;
                if a == Some(Value::Bool(false)) {
                    return Ok(Some(Value::Bool(true)));
                }
                let b = self.eval(data.args[1])?;
                if b == Some(Value::Bool(true)) {
                    return Ok(Some(Value::Bool(true)));
                }
                match (a, b) {
                    (Some(_), Some(_)) => Ok(Some(Value::Bool(false))),
                    _ => Ok(None),
                }
            }
            Ite => match self.eval(data.args[0])? {
                Some(Value::Bool(true)) => self.eval(data.args[1]),
                Some(Value::Bool(false)) => self.eval(data.args[2]),
                None => {
                    let x = self.eval(data.args[1])?;
                    let y = self.eval(data.args[2])?;
                    Ok(if x.is_some() && x == y { x } else { None })
                }
                _ => unreachable!("ill-sorted ite"),
            },
            Eq => {
                let a = self.eval(data.args[0])?;
                let b = self.eval(data.args[1])?;
                match (a, b) {
                    (Some(a), Some(b)) => Ok(Some(Value::Bool(a == b))),
                    _ => Ok(None),
                }
            }

            Add => {
                let mut acc = BigInt::zero();
                for &a in &data.args {
                    match self.eval(a)? {
                        Some(Value::Int(n)) => acc += n,
                        None => return Ok(None),
                        _ => unreachable!("ill-sorted +"),
                    }
                }
                Ok(Some(Value::Int(acc)))
            }
            Sub => self.int2(&data.args.clone(), |a, b| Value::Int(a - b)),
            Mul => self.int2(&data.args.clone(), |a, b| Value::Int(a * b)),
            Neg => Ok(self.eval(data.args[0])?.map(|v| Value::Int(-v.as_int().unwrap()))),
            Le => self.int2(&data.args.clone(), |a, b| Value::Bool(a <= b)),
            Lt => self.int2(&data.args.clone(), |a, b| Value::Bool(a < b)),
            Ge => self.int2(&data.args.clone(), |a, b| Value::Bool(a >= b)),
            Gt => self.int2(&data.args.clone(), |a, b| Value::Bool(a > b)),

            NseqFirst => Ok(self
                .eval(data.args[0])?
                .map(|v| Value::Int(v.as_nseq().unwrap().first.clone()))),
            NseqLast => Ok(self
                .eval(data.args[0])?
                .map(|v| Value::Int(v.as_nseq().unwrap().last.clone()))),
            NseqGet => {
                let sort = data.sort.clone();
                let (Some(s), Some(i)) = (self.eval(data.args[0])?, self.eval(data.args[1])?)
                else {
                    return Ok(None);
                };
                let s = s.as_nseq().unwrap();
                let i = i.as_int().unwrap();
                if s.in_bounds(i) {
                    match self.semantics {
                        Semantics::Direct => Ok(Some(s.at(i).clone())),
                        Semantics::Appendix => Ok(Some(s.at(i).clone())),
                    }
                } else {
                    let key = match self.semantics {
                        Semantics::Direct => ReadKey::NseqOob(s.clone(), i.clone()),
                        Semantics::Appendix => {
                            ReadKey::SeqOob(s.elems.clone(), i - &s.first)
                        }
                    };
                    self.read(key, &sort)
                }
            }
            NseqSet => {
                let (Some(s), Some(i), Some(v)) =
                    (self.eval(data.args[0])?, self.eval(data.args[1])?, self.eval(data.args[2])?)
                else {
                    return Ok(None);
                };
                let s = s.as_nseq().unwrap();
                let i = i.as_int().unwrap();
                if s.in_bounds(i) {
                    let mut out = s.clone();
                    let off = (i - &s.first).to_usize().unwrap();
                    out.elems[off] = v;
                    Ok(Some(Value::NSeq(out)))
                } else {
                    Ok(Some(Value::NSeq(s.clone())))
                }
            }
            NseqConst => {
                let (Some(f), Some(l), Some(v)) =
                    (self.eval(data.args[0])?, self.eval(data.args[1])?, self.eval(data.args[2])?)
                else {
                    return Ok(None);
                };
                let f = f.as_int().unwrap().clone();
                let mut l = l.as_int().unwrap().clone();
                if l < f && self.semantics == Semantics::Appendix {
                    // The pair representation cannot place the last index
                    // lower than first - 1.
                    l = &f - 1;
                }
                if (&l - &f).abs() > BigInt::from(1_000_000) && l >= f {
                    return Err(EvalError::TooLarge);
                }
                let elems = vec![v; nseq_len(&f, &l)];
                Ok(Some(Value::NSeq(NSeqValue { first: f, last: l, elems })))
            }
            NseqRelocate => {
                let (Some(s), Some(f)) = (self.eval(data.args[0])?, self.eval(data.args[1])?)
                else {
                    return Ok(None);
                };
                let s = s.as_nseq().unwrap();
                let f = f.as_int().unwrap().clone();
                let last = &f + &s.last - &s.first;
                Ok(Some(Value::NSeq(NSeqValue { first: f, last, elems: s.elems.clone() })))
            }
            NseqConcat => {
                let (Some(a), Some(b)) = (self.eval(data.args[0])?, self.eval(data.args[1])?)
                else {
                    return Ok(None);
                };
                let a = a.as_nseq().unwrap();
                let b = b.as_nseq().unwrap();
                Ok(Some(Value::NSeq(concat_value(a, b))))
            }
            NseqSlice => {
                let (Some(a), Some(f), Some(l)) =
                    (self.eval(data.args[0])?, self.eval(data.args[1])?, self.eval(data.args[2])?)
                else {
                    return Ok(None);
                };
                let a = a.as_nseq().unwrap();
                let f = f.as_int().unwrap();
                let l = l.as_int().unwrap();
                if &a.first <= f && f <= l && l <= &a.last {
                    let lo = (f - &a.first).to_usize().unwrap();
                    let hi = (l - &a.first).to_usize().unwrap();
                    Ok(Some(Value::NSeq(NSeqValue {
                        first: f.clone(),
                        last: l.clone(),
                        elems: a.elems[lo..=hi].to_vec(),
                    })))
                } else {
                    Ok(Some(Value::NSeq(a.clone())))
                }
            }
            NseqUpdate => {
                let (Some(a), Some(b)) = (self.eval(data.args[0])?, self.eval(data.args[1])?)
                else {
                    return Ok(None);
                };
                let a = a.as_nseq().unwrap();
                let b = b.as_nseq().unwrap();
                Ok(Some(Value::NSeq(update_value(a, b))))
            }
            NormConcat => {
                let mut frags = Vec::with_capacity(data.args.len());
                for &a in &data.args.clone() {
                    match self.eval(a)? {
                        Some(v) => frags.push(v.as_nseq().unwrap().clone()),
                        None => return Ok(None),
                    }
                }
                Ok(Some(Value::NSeq(norm_concat_value(&frags))))
            }
            RelocEq => {
                let (Some(a), Some(b)) = (self.eval(data.args[0])?, self.eval(data.args[1])?)
                else {
                    return Ok(None);
                };
                let a = a.as_nseq().unwrap();
                let b = b.as_nseq().unwrap();
                let same_span = &b.last - &b.first == &a.last - &a.first;
                Ok(Some(Value::Bool(same_span && a.elems == b.elems)))
            }

            SeqUnit => Ok(self.eval(data.args[0])?.map(|v| Value::Seq(vec![v]))),
            SeqLen => Ok(self
                .eval(data.args[0])?
                .map(|v| Value::Int(BigInt::from(v.as_seq().unwrap().len())))),
            SeqNth => {
                let sort = data.sort.clone();
                let (Some(s), Some(i)) = (self.eval(data.args[0])?, self.eval(data.args[1])?)
                else {
                    return Ok(None);
                };
                let s = s.as_seq().unwrap();
                let i = i.as_int().unwrap();
                if i.sign() != num_bigint::Sign::Minus && i < &BigInt::from(s.len()) {
                    Ok(Some(s[i.to_usize().unwrap()].clone()))
                } else {
                    let key = ReadKey::SeqOob(s.to_vec(), i.clone());
                    self.read(key, &sort)
                }
            }
            SeqUpdate => {
                let (Some(s), Some(i), Some(t)) =
                    (self.eval(data.args[0])?, self.eval(data.args[1])?, self.eval(data.args[2])?)
                else {
                    return Ok(None);
                };
                let s = s.as_seq().unwrap();
                let i = i.as_int().unwrap();
                let t = t.as_seq().unwrap();
                if i.sign() == num_bigint::Sign::Minus || i >= &BigInt::from(s.len()) {
                    return Ok(Some(Value::Seq(s.to_vec())));
                }
                let i = i.to_usize().unwrap();
                let mut out = s.to_vec();
                for (k, v) in t.iter().enumerate() {
                    if i + k >= out.len() {
                        break;
                    }
                    out[i + k] = v.clone();
                }
                Ok(Some(Value::Seq(out)))
            }
            SeqExtract => {
                let (Some(s), Some(i), Some(j)) =
                    (self.eval(data.args[0])?, self.eval(data.args[1])?, self.eval(data.args[2])?)
                else {
                    return Ok(None);
                };
                let s = s.as_seq().unwrap();
                let i = i.as_int().unwrap();
                let j = j.as_int().unwrap();
                if i.sign() == num_bigint::Sign::Minus
                    || i >= &BigInt::from(s.len())
                    || j <= &BigInt::zero()
                {
                    return Ok(Some(Value::Seq(vec![])));
                }
                let i = i.to_usize().unwrap();
                let take = j.to_usize().unwrap_or(usize::MAX).min(s.len() - i);
                Ok(Some(Value::Seq(s[i..i + take].to_vec())))
            }
            SeqConcat => {
                let mut out = Vec::new();
                for &a in &data.args.clone() {
                    match self.eval(a)? {
                        Some(v) => out.extend(v.as_seq().unwrap().iter().cloned()),
                        None => return Ok(None),
                    }
                }
                Ok(Some(Value::Seq(out)))
            }

            Uf(name) => {
                let sort = data.sort.clone();
                let name = name.clone();
                let mut vals = Vec::with_capacity(data.args.len());
                for &a in &data.args.clone() {
                    match self.eval(a)? {
                        Some(v) => vals.push(v),
                        None => return Ok(None),
                    }
                }
                self.read(ReadKey::Uf(name, vals), &sort)
            }
        }
    }

    fn int2(
        &mut self,
        args: &[TermId],
        f: impl Fn(&BigInt, &BigInt) -> Value,
    ) -> Result<Option<Value>, EvalError> {
        let (Some(a), Some(b)) = (self.eval(args[0])?, self.eval(args[1])?) else {
            return Ok(None);
        };
        Ok(Some(f(a.as_int().unwrap(), b.as_int().unwrap())))
    }
}

fn concat_value(a: &NSeqValue, b: &NSeqValue) -> NSeqValue {
    if a.is_empty() {
        return b.clone();
    }
    if b.is_empty() {
        return a.clone();
    }
    if b.first == &a.last + 1u8 {
        let mut elems = a.elems.clone();
        elems.extend(b.elems.iter().cloned());
        NSeqValue { first: a.first.clone(), last: b.last.clone(), elems }
    } else {
        a.clone()
    }
}

fn update_value(a: &NSeqValue, b: &NSeqValue) -> NSeqValue {
    if a.is_empty()
        || b.is_empty()
        || !(a.first <= b.first && b.first <= b.last && b.last <= a.last)
    {
        return a.clone();
    }
    let mut out = a.clone();
    let lo = (&b.first - &a.first).to_usize().unwrap();
    for (k, v) in b.elems.iter().enumerate() {
        out.elems[lo + k] = v.clone();
    }
    out
}

/// Value of a `::` chain. Assumes the contiguity invariant; when it is
/// violated the leftmost fragment is returned so evaluation stays total.
fn norm_concat_value(frags: &[NSeqValue]) -> NSeqValue {
    for w in frags.windows(2) {
        if w[1].first != &w[0].last + 1u8 {
            return frags[0].clone();
        }
    }
    let first = frags[0].first.clone();
    let last = frags[frags.len() - 1].last.clone();
    let mut elems = Vec::new();
    for f in frags {
        elems.extend(f.elems.iter().cloned());
    }
    NSeqValue::new(first, last, elems)
}

pub fn default_value(sort: &Sort) -> Value {
    match sort {
        Sort::Bool => Value::Bool(false),
        Sort::Int => Value::Int(BigInt::zero()),
        Sort::Uninterpreted(n) => Value::Elem(n.clone(), 0),
        Sort::NSeq(_) => Value::NSeq(NSeqValue::empty(BigInt::zero(), -BigInt::one())),
        Sort::Seq(_) => Value::Seq(vec![]),
    }
}

/// Evaluate one assertion under a model, treating any leftover unconstrained
/// read as its default. `true` means the assertion holds.
pub fn holds(store: &TermStore, model: &Model, assertion: TermId) -> Result<bool, EvalError> {
    let mut ev = Evaluator::new(store, model);
    Ok(ev.eval(assertion)?.and_then(|v| v.as_bool()).unwrap_or(false))
}

pub fn holds_with(
    store: &TermStore,
    model: &Model,
    assertion: TermId,
    semantics: Semantics,
) -> Result<bool, EvalError> {
    let mut ev = Evaluator::new(store, model).with_semantics(semantics);
    Ok(ev.eval(assertion)?.and_then(|v| v.as_bool()).unwrap_or(false))
}

// ---------------------------------------------------------------------------
// Brute-force enumeration
// ---------------------------------------------------------------------------

/// Finite search space for the enumerator.
#[derive(Debug, Clone)]
pub struct Domain {
    pub int_lo: i64,
    pub int_hi: i64,
    /// Carrier size for element sorts; for `Int` elements the carrier is
    /// `0..carrier`.
    pub carrier: u32,
    pub max_seq_len: usize,
    pub max_nodes: u64,
}

impl Default for Domain {
    fn default() -> Domain {
        Domain { int_lo: -3, int_hi: 4, carrier: 3, max_seq_len: 4, max_nodes: 20_000_000 }
    }
}

impl Domain {
    pub fn carrier_values(&self, sort: &Sort) -> Result<Vec<Value>, EvalError> {
        match sort {
            Sort::Bool => Ok(vec![Value::Bool(false), Value::Bool(true)]),
            Sort::Int => Ok((0..self.carrier).map(|k| Value::int(k)).collect()),
            Sort::Uninterpreted(n) => {
                Ok((0..self.carrier).map(|k| Value::Elem(n.clone(), k)).collect())
            }
            _ => Err(EvalError::Unsupported(sort.to_string())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("oracle budget of {0} nodes exceeded")]
pub struct BudgetError(pub u64);

#[derive(Debug, Clone)]
pub enum OracleVerdict {
    Sat(Model),
    Unsat,
}

impl OracleVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, OracleVerdict::Sat(_))
    }
}

struct Enumerator<'a> {
    store: &'a TermStore,
    assertions: &'a [TermId],
    dom: &'a Domain,
    vars: Vec<TermId>,
    /// For each var position, assertions whose free variables are all
    /// assigned once that position is filled.
    checks: Vec<Vec<TermId>>,
    /// Window for unconstrained `Int` reads.
    int_window: Vec<Value>,
    nodes: u64,
}

/// Exhaustively search for a model of the conjunction of `assertions` within
/// `dom`. Complete only relative to the domain: integers range over
/// `[int_lo, int_hi]` and elements over the carrier.
pub fn enumerate_sat(
    store: &TermStore,
    assertions: &[TermId],
    dom: &Domain,
) -> Result<OracleVerdict, BudgetError> {
    enumerate_with(store, assertions, dom, Semantics::Direct)
}

pub fn enumerate_with(
    store: &TermStore,
    assertions: &[TermId],
    dom: &Domain,
    semantics: Semantics,
) -> Result<OracleVerdict, BudgetError> {
    let mut vars = Vec::new();
    for &a in assertions {
        store.free_vars(a, &mut vars);
    }
    vars.sort();
    vars.dedup();
    // Assign scalar variables before sequence variables: cheap levels first.
    vars.sort_by_key(|v| match store.sort(*v) {
        Sort::Bool | Sort::Int | Sort::Uninterpreted(_) => 0u8,
        _ => 1,
    });

    let mut checks: Vec<Vec<TermId>> = vec![Vec::new(); vars.len() + 1];
    for &a in assertions {
        let mut fv = Vec::new();
        store.free_vars(a, &mut fv);
        let level = fv
            .iter()
            .map(|v| vars.iter().position(|w| w == v).unwrap() + 1)
            .max()
            .unwrap_or(0);
        checks[level].push(a);
    }

    let mut int_window: Vec<Value> = (0..dom.carrier).map(Value::int).collect();
    for &a in assertions {
        for t in store.subterms(a) {
            if let Some(n) = store.as_numeral(t) {
                int_window.push(Value::Int(n.clone()));
            }
        }
    }
    int_window.sort();
    int_window.dedup();

    let mut en = Enumerator { store, assertions, dom, vars, checks, int_window, nodes: 0 };
    let mut model = Model::default();
    // Assertions with no free variables at all.
    if !en.passes_partial(0, &model) {
        return Ok(OracleVerdict::Unsat);
    }
    match en.assign_from(0, &mut model, semantics)? {
        true => Ok(OracleVerdict::Sat(model)),
        false => Ok(OracleVerdict::Unsat),
    }
}

impl<'a> Enumerator<'a> {
    fn tick(&mut self) -> Result<(), BudgetError> {
        self.nodes += 1;
        if self.nodes > self.dom.max_nodes {
            return Err(BudgetError(self.dom.max_nodes));
        }
        Ok(())
    }

    fn passes_partial(&mut self, level: usize, model: &Model) -> bool {
        for &a in &self.checks[level] {
            let mut ev = Evaluator::new(self.store, model).partial();
            match ev.eval(a) {
                Ok(Some(Value::Bool(false))) => return false,
                Ok(_) => {}
                Err(_) => {}
            }
        }
        true
    }

    fn assign_from(
        &mut self,
        idx: usize,
        model: &mut Model,
        semantics: Semantics,
    ) -> Result<bool, BudgetError> {
        if idx == self.vars.len() {
            return self.finish(model, semantics);
        }
        let var = self.vars[idx];
        let sort = self.store.sort(var).clone();
        let values = self.values_for(&sort, semantics);
        for v in values {
            self.tick()?;
            model.assign(var, v);
            if self.passes_partial(idx + 1, model) && self.assign_from(idx + 1, model, semantics)? {
                return Ok(true);
            }
        }
        model.assignment.remove(&var);
        Ok(false)
    }

    /// Full-assignment check: enumerate values for unconstrained reads.
    fn finish(&mut self, model: &mut Model, semantics: Semantics) -> Result<bool, BudgetError> {
        self.tick()?;
        let mut all_true = true;
        let mut discovered = Vec::new();
        for &a in self.assertions {
            let mut ev = Evaluator::new(self.store, model).with_semantics(semantics);
            match ev.eval(a) {
                Ok(Some(Value::Bool(true))) => {}
                Ok(_) => all_true = false,
                Err(_) => all_true = false,
            }
            discovered.extend(ev.discovered);
        }
        discovered.sort();
        discovered.dedup();
        discovered.retain(|k| !model.reads.contains_key(k));
        if all_true {
            // Defaults already witness the remaining reads.
            for k in discovered {
                let sort = self.read_sort(&k);
                let v = default_value(&sort);
                model.reads.insert(k, v);
            }
            return Ok(true);
        }
        let Some(key) = discovered.into_iter().next() else {
            return Ok(false);
        };
        let sort = self.read_sort(&key);
        let window = match &sort {
            Sort::Int => self.int_window.clone(),
            other => match self.dom.carrier_values(other) {
                Ok(w) => w,
                Err(_) => return Ok(false),
            },
        };
        for v in window {
            self.tick()?;
            model.reads.insert(key.clone(), v);
            if self.finish(model, semantics)? {
                return Ok(true);
            }
        }
        model.reads.remove(&key);
        Ok(false)
    }

    /// Sort of the value an unconstrained read produces. Recovered from the
    /// key itself; element sorts are inferred from context terms.
    fn read_sort(&self, key: &ReadKey) -> Sort {
        match key {
            ReadKey::NseqOob(_, _) | ReadKey::SeqOob(_, _) => {
                // Find a get/nth term of matching shape to recover the sort.
                for &a in self.assertions {
                    for t in self.store.subterms(a) {
                        if matches!(self.store.head(t), Symbol::NseqGet | Symbol::SeqNth) {
                            return self.store.sort(t).clone();
                        }
                    }
                }
                Sort::Int
            }
            ReadKey::Uf(name, _) => {
                for &a in self.assertions {
                    for t in self.store.subterms(a) {
                        if let Symbol::Uf(n) = self.store.head(t) {
                            if n == name {
                                return self.store.sort(t).clone();
                            }
                        }
                    }
                }
                Sort::Int
            }
        }
    }

    fn values_for(&self, sort: &Sort, semantics: Semantics) -> Vec<Value> {
        match sort {
            Sort::Bool => vec![Value::Bool(false), Value::Bool(true)],
            Sort::Int => (self.dom.int_lo..=self.dom.int_hi).map(Value::int).collect(),
            Sort::Uninterpreted(_) => self.dom.carrier_values(sort).unwrap_or_default(),
            Sort::NSeq(elem) => {
                let carrier = match self.dom.carrier_values(elem) {
                    Ok(c) => c,
                    Err(_) => return vec![],
                };
                let mut out = Vec::new();
                for f in self.dom.int_lo..=self.dom.int_hi {
                    for l in self.dom.int_lo..=self.dom.int_hi {
                        if l < f {
                            // In the pair representation empties always sit at
                            // last = first - 1.
                            if semantics == Semantics::Appendix && l != f - 1 {
                                continue;
                            }
                            out.push(Value::NSeq(NSeqValue::empty(f.into(), l.into())));
                            continue;
                        }
                        let len = (l - f + 1) as usize;
                        for elems in tuples(&carrier, len) {
                            out.push(Value::NSeq(NSeqValue::new(f.into(), l.into(), elems)));
                        }
                    }
                }
                out
            }
            Sort::Seq(elem) => {
                let carrier = match self.dom.carrier_values(elem) {
                    Ok(c) => c,
                    Err(_) => return vec![],
                };
                let mut out = Vec::new();
                for len in 0..=self.dom.max_seq_len {
                    for elems in tuples(&carrier, len) {
                        out.push(Value::Seq(elems));
                    }
                }
                out
            }
        }
    }
}

/// All length-`n` tuples over `alphabet`, in lexicographic order.
pub fn tuples(alphabet: &[Value], n: usize) -> Vec<Vec<Value>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * alphabet.len());
        for prefix in &out {
            for v in alphabet {
                let mut p = prefix.clone();
                p.push(v.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Symbol::*;

    fn nseq_int() -> Sort {
        Sort::nseq(Sort::Int)
    }

    fn ev(store: &TermStore, model: &Model, t: TermId) -> Value {
        Evaluator::new(store, model).eval(t).unwrap().unwrap()
    }

    #[test]
    fn const_get_in_bounds() {
        let mut st = TermStore::new();
        let (two, five, seven, three) =
            (st.numeral(2), st.numeral(5), st.numeral(7), st.numeral(3));
        let c = st.mk(NseqConst, vec![two, five, seven]).unwrap();
        let g = st.mk(NseqGet, vec![c, three]).unwrap();
        let m = Model::default();
        assert_eq!(ev(&st, &m, g), Value::int(7));
    }

    #[test]
    fn concat_with_gap_returns_left() {
        let mut st = TermStore::new();
        let a = st.var("a", nseq_int());
        let b = st.var("b", nseq_int());
        let c = st.mk(NseqConcat, vec![a, b]).unwrap();
        let mut m = Model::default();
        let av = NSeqValue::new(0.into(), 1.into(), vec![Value::int(1), Value::int(2)]);
        let bv = NSeqValue::new(5.into(), 5.into(), vec![Value::int(9)]);
        m.assign(a, Value::NSeq(av.clone()));
        m.assign(b, Value::NSeq(bv));
        assert_eq!(ev(&st, &m, c), Value::NSeq(av));
    }

    #[test]
    fn update_with_empty_returns_left() {
        let mut st = TermStore::new();
        let a = st.var("a", nseq_int());
        let b = st.var("b", nseq_int());
        let u = st.mk(NseqUpdate, vec![a, b]).unwrap();
        let mut m = Model::default();
        let av = NSeqValue::new(0.into(), 1.into(), vec![Value::int(1), Value::int(2)]);
        m.assign(a, Value::NSeq(av.clone()));
        m.assign(b, Value::NSeq(NSeqValue::empty(0.into(), (-1).into())));
        assert_eq!(ev(&st, &m, u), Value::NSeq(av));
    }

    #[test]
    fn slice_in_bounds_restricts() {
        let mut st = TermStore::new();
        let a = st.var("a", nseq_int());
        let one = st.numeral(1);
        let two = st.numeral(2);
        let s = st.mk(NseqSlice, vec![a, one, two]).unwrap();
        let mut m = Model::default();
        let av = NSeqValue::new(
            0.into(),
            2.into(),
            vec![Value::int(10), Value::int(11), Value::int(12)],
        );
        m.assign(a, Value::NSeq(av));
        assert_eq!(
            ev(&st, &m, s),
            Value::NSeq(NSeqValue::new(1.into(), 2.into(), vec![Value::int(11), Value::int(12)]))
        );
    }

    #[test]
    fn oob_reads_are_congruent() {
        let mut st = TermStore::new();
        let a = st.var("a", nseq_int());
        let b = st.var("b", nseq_int());
        let nine = st.numeral(9);
        let ga = st.mk(NseqGet, vec![a, nine]).unwrap();
        let gb = st.mk(NseqGet, vec![b, nine]).unwrap();
        let mut m = Model::default();
        let v = NSeqValue::new(0.into(), 0.into(), vec![Value::int(1)]);
        m.assign(a, Value::NSeq(v.clone()));
        m.assign(b, Value::NSeq(v));
        // Same value, same index: the memoized read must coincide.
        assert_eq!(ev(&st, &m, ga), ev(&st, &m, gb));
    }

    #[test]
    fn empty_nseq_var_is_sat() {
        let mut st = TermStore::new();
        let s = st.var("s", nseq_int());
        let (f, l) = st.bounds_terms(s).unwrap();
        let zero = st.numeral(0);
        let minus_one = st.numeral(-1);
        let a1 = st.eq(f, zero).unwrap();
        let a2 = st.eq(l, minus_one).unwrap();
        let verdict = enumerate_sat(&st, &[a1, a2], &Domain::default()).unwrap();
        assert!(verdict.is_sat());
    }

    #[test]
    fn functional_consistency_unsat() {
        let mut st = TermStore::new();
        let s = st.var("s", nseq_int());
        let zero = st.numeral(0);
        let a = st.var("a", Sort::Int);
        let b = st.var("b", Sort::Int);
        let g = st.mk(NseqGet, vec![s, zero]).unwrap();
        let (f, l) = st.bounds_terms(s).unwrap();
        let asrt = vec![
            st.eq(g, a).unwrap(),
            st.eq(g, b).unwrap(),
            { let e = st.eq(a, b).unwrap(); st.not(e).unwrap() },
            st.eq(f, zero).unwrap(),
            st.eq(l, zero).unwrap(),
        ];
        let verdict = enumerate_sat(&st, &asrt, &Domain::default()).unwrap();
        assert!(!verdict.is_sat());
    }

    #[test]
    fn set_then_get_agrees_unsat() {
        // s = set(t,0,x), bounds of t = [0,1], get(s,1) != get(t,1) is unsat.
        let mut st = TermStore::new();
        let t = st.var("t", nseq_int());
        let x = st.var("x", Sort::Int);
        let zero = st.numeral(0);
        let one = st.numeral(1);
        let s = st.mk(NseqSet, vec![t, zero, x]).unwrap();
        let (ft, lt) = st.bounds_terms(t).unwrap();
        let gs = st.mk(NseqGet, vec![s, one]).unwrap();
        let gt = st.mk(NseqGet, vec![t, one]).unwrap();
        let dom = Domain { carrier: 2, int_lo: 0, int_hi: 1, ..Domain::default() };
        let asrt = vec![
            st.eq(ft, zero).unwrap(),
            st.eq(lt, one).unwrap(),
            { let e = st.eq(gs, gt).unwrap(); st.not(e).unwrap() },
        ];
        let verdict = enumerate_sat(&st, &asrt, &dom).unwrap();
        assert!(!verdict.is_sat());
    }

    #[test]
    fn model_soundness_example() {
        // s = const(0,1,5) and get(s,0) = 5 is sat; pinned model checks out.
        let mut st = TermStore::new();
        let s = st.var("s", nseq_int());
        let zero = st.numeral(0);
        let one = st.numeral(1);
        let five = st.numeral(5);
        let c = st.mk(NseqConst, vec![zero, one, five]).unwrap();
        let g = st.mk(NseqGet, vec![s, zero]).unwrap();
        let asrt = vec![st.eq(s, c).unwrap(), st.eq(g, five).unwrap()];
        let dom = Domain { int_lo: 0, int_hi: 1, carrier: 7, ..Domain::default() };
        let verdict = enumerate_sat(&st, &asrt, &dom).unwrap();
        let OracleVerdict::Sat(m) = verdict else { panic!("expected sat") };
        for &a in &asrt {
            assert!(holds(&st, &m, a).unwrap());
        }
        assert_eq!(
            m.assignment[&s],
            Value::NSeq(NSeqValue::new(0.into(), 1.into(), vec![Value::int(5), Value::int(5)]))
        );
    }

    #[test]
    fn get_const_conflict_unsat() {
        let mut st = TermStore::new();
        let s = st.var("s", nseq_int());
        let zero = st.numeral(0);
        let one = st.numeral(1);
        let five = st.numeral(5);
        let six = st.numeral(6);
        let c = st.mk(NseqConst, vec![zero, one, five]).unwrap();
        let g = st.mk(NseqGet, vec![s, zero]).unwrap();
        let asrt = vec![st.eq(s, c).unwrap(), st.eq(g, six).unwrap()];
        let dom = Domain { int_lo: 0, int_hi: 1, carrier: 7, ..Domain::default() };
        assert!(!enumerate_sat(&st, &asrt, &dom).unwrap().is_sat());
    }

    #[test]
    fn budget_is_enforced() {
        let mut st = TermStore::new();
        let a = st.var("a", nseq_int());
        let b = st.var("b", nseq_int());
        let e = st.eq(a, b).unwrap();
        let ne = st.not(e).unwrap();
        let dom = Domain { max_nodes: 3, ..Domain::default() };
        assert!(enumerate_sat(&st, &[ne], &dom).is_err());
    }
}
