//! Backtracking search over lemma branches.
//!
//! Literals are dispatched to the congruence closure and the linear integer
//! arithmetic solver; the rules engine turns the resulting state into lemmas
//! whose branches are explored in order with chronological backtracking.
//! There is no clause learning. A saturated conflict-free state is grounded
//! (every arithmetic variable pinned to a value) and turned into a model,
//! which is verified by the reference evaluator before `Sat` is reported.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::euf::Euf;
use crate::lia::{linearize, Feasibility, LiaSolver, LinConstraint};
use crate::oracle::{self, default_value, Model, NSeqValue, ReadKey, Value};
use crate::rules::{Calculus, Lemma, RuleConfig, RuleId, Rules};
use crate::term::{Sort, Symbol, TermId, TermStore};

#[derive(Debug, Clone)]
pub struct Budget {
    pub max_decisions: u64,
    pub max_lemmas: u64,
    pub wall_ms: u64,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget { max_decisions: 50_000, max_lemmas: 100_000, wall_ms: 10_000 }
    }
}

#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct Stats {
    pub decisions: u64,
    pub conflicts: u64,
    pub lemmas: BTreeMap<RuleId, u64>,
    pub wall_ms: u64,
}

impl Stats {
    pub fn lemmas_total(&self) -> u64 {
        self.lemmas.values().sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Sat(Model),
    Unsat,
    Unknown(String),
}

impl Verdict {
    pub fn word(&self) -> &'static str {
        match self {
            Verdict::Sat(_) => "sat",
            Verdict::Unsat => "unsat",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

struct Conflict;
type R = Result<(), Conflict>;

enum Search {
    Sat(Model),
    Closed,
    Out(String),
}

pub struct Solver<'a> {
    store: &'a mut TermStore,
    euf: Euf,
    lia: LiaSolver,
    rules: Rules,
    queue: VecDeque<Lemma>,
    asserted: BTreeSet<TermId>,
    /// `s1 =_reloc s2` atoms whose first-index offset is not yet fixed.
    reloc_pending: Vec<(TermId, TermId)>,
    /// Arithmetic variables already merged with their numeral.
    fixed_done: BTreeSet<TermId>,
    /// Some saturated branch produced no verifiable model; an exhausted
    /// search is then inconclusive instead of unsat.
    model_failed: bool,
    assertions: Vec<TermId>,
    budget: Budget,
    start: Instant,
    pub stats: Stats,
}

#[derive(Clone)]
struct Snapshot {
    euf: Euf,
    rules: Rules,
    queue: VecDeque<Lemma>,
    asserted: BTreeSet<TermId>,
    reloc_pending: Vec<(TermId, TermId)>,
    fixed_done: BTreeSet<TermId>,
}

pub fn solve(
    store: &mut TermStore,
    assertions: &[TermId],
    calculus: Calculus,
    config: RuleConfig,
    budget: &Budget,
) -> (Verdict, Stats) {
    // The branch search recurses once per nested decision, which outgrows
    // the default (and especially the 2 MiB test-thread) stack on deep
    // instances; run it on a dedicated worker with a roomy stack.
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .name("nseq-search".into())
            .stack_size(256 * 1024 * 1024)
            .spawn_scoped(scope, || solve_here(store, assertions, calculus, config, budget))
            .expect("spawn solver thread")
            .join()
            .expect("solver thread panicked")
    })
}

fn solve_here(
    store: &mut TermStore,
    assertions: &[TermId],
    calculus: Calculus,
    config: RuleConfig,
    budget: &Budget,
) -> (Verdict, Stats) {
    let mut solver = Solver {
        store,
        euf: Euf::new(),
        lia: LiaSolver::new(),
        rules: Rules::new(calculus, config),
        queue: VecDeque::new(),
        asserted: BTreeSet::new(),
        reloc_pending: Vec::new(),
        fixed_done: BTreeSet::new(),
        model_failed: false,
        assertions: assertions.to_vec(),
        budget: budget.clone(),
        start: Instant::now(),
        stats: Stats::default(),
    };
    let verdict = solver.run();
    solver.stats.wall_ms = solver.start.elapsed().as_millis() as u64;
    (verdict, solver.stats)
}

impl<'a> Solver<'a> {
    fn run(&mut self) -> Verdict {
        for a in self.assertions.clone() {
            if self.store.subterms(a).iter().any(|&t| is_seq_symbol(self.store.head(t))) {
                return Verdict::Unknown("untranslated Seq operator".into());
            }
        }
        let inputs = match self.purify_inputs() {
            Ok(v) => v,
            Err(Conflict) => return Verdict::Unsat,
        };
        self.assertions = inputs.clone();
        for a in inputs {
            if self.assert_true(a).is_err() {
                self.stats.conflicts += 1;
                return Verdict::Unsat;
            }
        }
        match self.search() {
            Search::Sat(m) => Verdict::Sat(m),
            Search::Closed if self.model_failed => {
                Verdict::Unknown("model construction failed".into())
            }
            Search::Closed => Verdict::Unsat,
            Search::Out(reason) => Verdict::Unknown(reason),
        }
    }

    /// Replace every non-Bool `ite` with a fresh variable defined by a split.
    fn purify_inputs(&mut self) -> Result<Vec<TermId>, Conflict> {
        let mut memo: BTreeMap<TermId, TermId> = BTreeMap::new();
        let inputs = self.assertions.clone();
        let mut out = Vec::new();
        for a in inputs {
            out.push(self.purify(a, &mut memo));
        }
        Ok(out)
    }

    fn purify(&mut self, t: TermId, memo: &mut BTreeMap<TermId, TermId>) -> TermId {
        if let Some(&r) = memo.get(&t) {
            return r;
        }
        let data = self.store.get(t).clone();
        let args: Vec<TermId> = data.args.iter().map(|&a| self.purify(a, memo)).collect();
        let rebuilt = if args == data.args {
            t
        } else {
            match &data.head {
                Symbol::Uf(name) => self.store.uf_app(name, args.clone(), data.sort.clone()),
                _ => self.store.mk(data.head.clone(), args.clone()).unwrap(),
            }
        };
        let result = if data.head == Symbol::Ite && data.sort != Sort::Bool {
            let f = self.store.fresh_var("ite", data.sort.clone());
            let (c, a, b) = (args[0], args[1], args[2]);
            let nc = self.store.not(c).unwrap();
            let ea = self.store.eq(f, a).unwrap();
            let eb = self.store.eq(f, b).unwrap();
            self.enqueue(Lemma { source: RuleId::Split, branches: vec![vec![c, ea], vec![nc, eb]] });
            f
        } else {
            rebuilt
        };
        memo.insert(t, result);
        result
    }

    fn enqueue(&mut self, lemma: Lemma) {
        *self.stats.lemmas.entry(lemma.source).or_insert(0) += 1;
        self.queue.push_back(lemma);
    }

    fn over_budget(&self) -> Option<String> {
        if self.stats.decisions >= self.budget.max_decisions {
            return Some("decision budget exhausted".into());
        }
        if self.stats.lemmas_total() >= self.budget.max_lemmas {
            return Some("lemma budget exhausted".into());
        }
        if self.start.elapsed().as_millis() as u64 >= self.budget.wall_ms {
            return Some("timeout".into());
        }
        None
    }

    // ---------------------------------------------------------------
    // Literal assertion
    // ---------------------------------------------------------------

    fn assert_true(&mut self, t: TermId) -> R {
        if *self.store.head(t) == Symbol::Not {
            let inner = self.store.args(t)[0];
            return self.assert_false(inner);
        }
        if !self.asserted.insert(t) {
            return Ok(());
        }
        match self.store.head(t).clone() {
            Symbol::BoolConst(true) => Ok(()),
            Symbol::BoolConst(false) => Err(Conflict),
            Symbol::And => {
                for a in self.store.args(t).to_vec() {
                    self.assert_true(a)?;
                }
                Ok(())
            }
            Symbol::Or => {
                let branches = self.store.args(t).iter().map(|&d| vec![d]).collect();
                self.enqueue(Lemma { source: RuleId::Split, branches });
                Ok(())
            }
            Symbol::Implies => {
                let (a, b) = (self.store.args(t)[0], self.store.args(t)[1]);
                let na = self.store.not(a).unwrap();
                self.enqueue(Lemma { source: RuleId::Split, branches: vec![vec![na], vec![b]] });
                Ok(())
            }
            Symbol::Ite => {
                let (c, a, b) = (
                    self.store.args(t)[0],
                    self.store.args(t)[1],
                    self.store.args(t)[2],
                );
                let nc = self.store.not(c).unwrap();
                self.enqueue(Lemma {
                    source: RuleId::Split,
                    branches: vec![vec![c, a], vec![nc, b]],
                });
                Ok(())
            }
            Symbol::Eq => {
                let (a, b) = (self.store.args(t)[0], self.store.args(t)[1]);
                self.assert_eq_atom(a, b)
            }
            Symbol::Le | Symbol::Lt | Symbol::Ge | Symbol::Gt => self.assert_ineq(t, false),
            Symbol::RelocEq => {
                let (s1, s2) = (self.store.args(t)[0], self.store.args(t)[1]);
                self.assert_releq(s1, s2)
            }
            Symbol::Var(_) | Symbol::Uf(_) | Symbol::NseqGet => {
                let tt = self.store.bool_const(true);
                self.register(t);
                self.euf.assert_eq(self.store, t, tt);
                self.check_euf()
            }
            other => unreachable!("boolean assertion with head {other:?}"),
        }
    }

    fn assert_false(&mut self, t: TermId) -> R {
        if *self.store.head(t) == Symbol::Not {
            let inner = self.store.args(t)[0];
            return self.assert_true(inner);
        }
        let nt = self.store.not(t).unwrap();
        if !self.asserted.insert(nt) {
            return Ok(());
        }
        match self.store.head(t).clone() {
            Symbol::BoolConst(b) => {
                if b {
                    Err(Conflict)
                } else {
                    Ok(())
                }
            }
            Symbol::Or => {
                for a in self.store.args(t).to_vec() {
                    self.assert_false(a)?;
                }
                Ok(())
            }
            Symbol::And => {
                let branches = self
                    .store
                    .args(t)
                    .to_vec()
                    .into_iter()
                    .map(|d| {
                        let nd = self.store.not(d).unwrap();
                        vec![nd]
                    })
                    .collect();
                self.enqueue(Lemma { source: RuleId::Split, branches });
                Ok(())
            }
            Symbol::Implies => {
                let (a, b) = (self.store.args(t)[0], self.store.args(t)[1]);
                self.assert_true(a)?;
                self.assert_false(b)
            }
            Symbol::Ite => {
                let (c, a, b) = (
                    self.store.args(t)[0],
                    self.store.args(t)[1],
                    self.store.args(t)[2],
                );
                let nc = self.store.not(c).unwrap();
                let na = self.store.not(a).unwrap();
                let nb = self.store.not(b).unwrap();
                self.enqueue(Lemma {
                    source: RuleId::Split,
                    branches: vec![vec![c, na], vec![nc, nb]],
                });
                Ok(())
            }
            Symbol::Eq => {
                let (a, b) = (self.store.args(t)[0], self.store.args(t)[1]);
                self.assert_diseq_atom(a, b)
            }
            Symbol::Le | Symbol::Lt | Symbol::Ge | Symbol::Gt => self.assert_ineq(t, true),
            Symbol::RelocEq => {
                let (s1, s2) = (self.store.args(t)[0], self.store.args(t)[1]);
                self.assert_not_releq(s1, s2)
            }
            Symbol::Var(_) | Symbol::Uf(_) | Symbol::NseqGet => {
                let ff = self.store.bool_const(false);
                self.register(t);
                self.euf.assert_eq(self.store, t, ff);
                self.check_euf()
            }
            other => unreachable!("negated assertion with head {other:?}"),
        }
    }

    fn assert_ineq(&mut self, t: TermId, negated: bool) -> R {
        let (a, b) = (self.store.args(t)[0], self.store.args(t)[1]);
        // normalize to lhs <= rhs
        let (lhs, rhs, strict) = match self.store.head(t) {
            Symbol::Le => (a, b, false),
            Symbol::Lt => (a, b, true),
            Symbol::Ge => (b, a, false),
            Symbol::Gt => (b, a, true),
            _ => unreachable!(),
        };
        let (lhs, rhs, strict) = if negated { (rhs, lhs, !strict) } else { (lhs, rhs, strict) };
        let mut e = linearize(self.store, lhs);
        e.sub(&linearize(self.store, rhs));
        if strict {
            e.constant += BigInt::one();
        }
        self.register(lhs);
        self.register(rhs);
        if self.lia.assert_constraint(LinConstraint::le(e)) == Feasibility::Infeasible {
            return Err(Conflict);
        }
        Ok(())
    }

    fn assert_eq_atom(&mut self, a: TermId, b: TermId) -> R {
        self.register(a);
        self.register(b);
        match self.store.sort(a).clone() {
            Sort::Int => {
                let mut e = linearize(self.store, a);
                e.sub(&linearize(self.store, b));
                if self.lia.assert_constraint(LinConstraint::eq(e)) == Feasibility::Infeasible {
                    return Err(Conflict);
                }
                self.euf.assert_eq(self.store, a, b);
                self.check_euf()
            }
            Sort::Bool => {
                let na = self.store.not(a).unwrap();
                let nb = self.store.not(b).unwrap();
                self.enqueue(Lemma {
                    source: RuleId::Split,
                    branches: vec![vec![a, b], vec![na, nb]],
                });
                Ok(())
            }
            Sort::NSeq(_) => {
                if *self.store.head(b) == Symbol::NormConcat {
                    self.assert_normal_form(a, b)
                } else if *self.store.head(a) == Symbol::NormConcat {
                    self.assert_normal_form(b, a)
                } else {
                    self.euf.assert_eq(self.store, a, b);
                    self.check_euf()
                }
            }
            _ => {
                self.euf.assert_eq(self.store, a, b);
                self.check_euf()
            }
        }
    }

    /// `owner = w_1 :: ... :: w_n`: record the normal form and assert the
    /// bound coupling that `::` requires.
    fn assert_normal_form(&mut self, owner: TermId, nc: TermId) -> R {
        let frags = self.store.args(nc).to_vec();
        self.euf.assert_eq(self.store, owner, nc);
        self.check_euf()?;
        self.rules.register_nf(owner, frags.clone());
        for &w in &frags {
            self.rules.activate(self.store, w);
        }
        let (fst_o, lst_o) = self.store.bounds_terms(owner).unwrap();
        let (fst_1, _) = self.store.bounds_terms(frags[0]).unwrap();
        let (_, lst_n) = self.store.bounds_terms(*frags.last().unwrap()).unwrap();
        let e1 = self.store.eq(fst_o, fst_1).unwrap();
        let e2 = self.store.eq(lst_o, lst_n).unwrap();
        self.assert_true(e1)?;
        self.assert_true(e2)?;
        let one = self.store.numeral(1);
        for pair in frags.windows(2) {
            let (_, lst_a) = self.store.bounds_terms(pair[0]).unwrap();
            let (fst_b, _) = self.store.bounds_terms(pair[1]).unwrap();
            let succ = self.store.add(lst_a, one).unwrap();
            let e = self.store.eq(fst_b, succ).unwrap();
            self.assert_true(e)?;
        }
        Ok(())
    }

    fn assert_diseq_atom(&mut self, a: TermId, b: TermId) -> R {
        self.register(a);
        self.register(b);
        self.euf.assert_diseq(self.store, a, b);
        self.check_euf()?;
        match self.store.sort(a).clone() {
            Sort::Int => {
                // lazy arithmetic split: a <= b-1 \/ b <= a-1
                let l1 = self.store.lt(a, b).unwrap();
                let l2 = self.store.lt(b, a).unwrap();
                self.enqueue(Lemma { source: RuleId::Split, branches: vec![vec![l1], vec![l2]] });
                Ok(())
            }
            Sort::NSeq(_) => {
                self.rules.register_diseq(a, b);
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn assert_releq(&mut self, s1: TermId, s2: TermId) -> R {
        self.register(s1);
        self.register(s2);
        // length coupling: lst_{s2} = lst_{s1} - fst_{s1} + fst_{s2}
        let (fst1, lst1) = self.store.bounds_terms(s1).unwrap();
        let (fst2, lst2) = self.store.bounds_terms(s2).unwrap();
        let d = self.store.sub(lst1, fst1).unwrap();
        let sum = self.store.add(d, fst2).unwrap();
        let e = self.store.eq(lst2, sum).unwrap();
        self.assert_true(e)?;
        self.reloc_pending.push((s1, s2));
        Ok(())
    }

    /// `¬(s1 =_reloc s2)`: either the spans differ, or some in-bounds
    /// position of `s1` disagrees with its shifted counterpart in `s2`.
    fn assert_not_releq(&mut self, s1: TermId, s2: TermId) -> R {
        self.register(s1);
        self.register(s2);
        let (fst1, lst1) = self.store.bounds_terms(s1).unwrap();
        let (fst2, lst2) = self.store.bounds_terms(s2).unwrap();
        let d1 = self.store.sub(lst1, fst1).unwrap();
        let d2 = self.store.sub(lst2, fst2).unwrap();
        let span_eq = self.store.eq(d1, d2).unwrap();
        let span_ne = self.store.not(span_eq).unwrap();
        let i = self.store.fresh_var("nreleq", Sort::Int);
        let lo = self.store.le(fst1, i).unwrap();
        let hi = self.store.le(i, lst1).unwrap();
        let shift = self.store.sub(i, fst1).unwrap();
        let j = self.store.add(shift, fst2).unwrap();
        let g1 = self.store.mk(Symbol::NseqGet, vec![s1, i]).unwrap();
        let g2 = self.store.mk(Symbol::NseqGet, vec![s2, j]).unwrap();
        let ge = self.store.eq(g1, g2).unwrap();
        let gne = self.store.not(ge).unwrap();
        self.enqueue(Lemma {
            source: RuleId::Split,
            branches: vec![vec![span_ne], vec![lo, hi, gne]],
        });
        Ok(())
    }

    fn register(&mut self, t: TermId) {
        self.euf.register(self.store, t);
        self.rules.activate(self.store, t);
    }

    fn check_euf(&self) -> R {
        if self.euf.in_conflict() {
            Err(Conflict)
        } else {
            Ok(())
        }
    }

    // ---------------------------------------------------------------
    // Theory synchronization
    // ---------------------------------------------------------------

    fn sync(&mut self) -> R {
        loop {
            let mut changed = false;
            self.euf.close(self.store);
            self.check_euf()?;
            // congruence merges feed arithmetic
            for (a, b) in self.euf.drain_merges() {
                if *self.store.sort(a) == Sort::Int {
                    let mut e = linearize(self.store, a);
                    e.sub(&linearize(self.store, b));
                    if self.lia.assert_constraint(LinConstraint::eq(e))
                        == Feasibility::Infeasible
                    {
                        return Err(Conflict);
                    }
                    changed = true;
                }
            }
            // fixed arithmetic variables feed congruence
            let vars: Vec<TermId> = self.lia.vars().collect();
            for v in vars {
                if self.fixed_done.contains(&v) {
                    continue;
                }
                if let Some(n) = self.lia.query_fixed(v) {
                    let num = self.store.numeral(n);
                    self.euf.register(self.store, num);
                    self.euf.assert_eq(self.store, v, num);
                    self.fixed_done.insert(v);
                    self.check_euf()?;
                    changed = true;
                }
            }
            // composite arithmetic terms whose linearization is fully fixed
            let composites: Vec<TermId> = self
                .euf
                .terms()
                .filter(|&t| {
                    matches!(self.store.head(t), Symbol::Add | Symbol::Sub | Symbol::Neg | Symbol::Mul)
                        && !self.fixed_done.contains(&t)
                })
                .collect();
            for t in composites {
                let lin = crate::lia::linearize(self.store, t);
                let mut value = lin.constant.clone();
                let mut fixed = true;
                for (v, c) in &lin.coeffs {
                    match self.lia.query_fixed(*v) {
                        Some(n) => value += c * n,
                        None => {
                            fixed = false;
                            break;
                        }
                    }
                }
                if fixed {
                    let num = self.store.numeral(value);
                    self.euf.register(self.store, num);
                    self.euf.assert_eq(self.store, t, num);
                    self.fixed_done.insert(t);
                    self.check_euf()?;
                    changed = true;
                }
            }
            // relocation pairs whose offset became fixed
            let pending = std::mem::take(&mut self.reloc_pending);
            for (s1, s2) in pending {
                let (fst1, _) = self.store.bounds_terms(s1).unwrap();
                let (fst2, _) = self.store.bounds_terms(s2).unwrap();
                match self.lia.query_fixed_diff(fst1, fst2) {
                    Some(off) => {
                        // s1 sits `off` above s2
                        self.euf.assert_reloc(self.store, s2, s1, off);
                        self.check_euf()?;
                        changed = true;
                    }
                    None => self.reloc_pending.push((s1, s2)),
                }
            }
            if !changed {
                break;
            }
        }
        if self.lia.quick_conflict() {
            return Err(Conflict);
        }
        Ok(())
    }

    // ---------------------------------------------------------------
    // Search
    // ---------------------------------------------------------------

    fn search(&mut self) -> Search {
        loop {
            if let Some(reason) = self.over_budget() {
                return Search::Out(reason);
            }
            if self.sync().is_err() {
                self.stats.conflicts += 1;
                return Search::Closed;
            }
            if let Some(lemma) = self.queue.pop_front() {
                if lemma.branches.len() == 1 {
                    if self.assert_branch(&lemma.branches[0]).is_err() {
                        self.stats.conflicts += 1;
                        return Search::Closed;
                    }
                    continue;
                }
                return self.split(lemma);
            }
            // saturate: ask the rules engine for new lemmas
            let lemmas = {
                let Solver { store, euf, lia, rules, .. } = self;
                rules.derive(store, euf, lia)
            };
            if !lemmas.is_empty() {
                for l in lemmas {
                    self.enqueue(l);
                }
                continue;
            }
            // saturated and conflict-free: integer completeness, then model
            match self.lia.check_int() {
                Feasibility::Infeasible => {
                    self.stats.conflicts += 1;
                    return Search::Closed;
                }
                Feasibility::Unknown => {
                    return Search::Out("arithmetic branch-and-bound budget".into())
                }
                Feasibility::Feasible => {}
            }
            if let Some(lemma) = self.grounding_lemma() {
                self.enqueue(lemma);
                continue;
            }
            return match self.build_and_verify() {
                Some(m) => Search::Sat(m),
                None => {
                    // Theory-consistent branch without a verified model:
                    // give up on this branch but keep searching; exhaustion
                    // is then inconclusive rather than unsat.
                    self.model_failed = true;
                    self.stats.conflicts += 1;
                    Search::Closed
                }
            };
        }
    }

    fn assert_branch(&mut self, branch: &[TermId]) -> R {
        for &lit in branch {
            self.assert_true(lit)?;
        }
        Ok(())
    }

    fn split(&mut self, lemma: Lemma) -> Search {
        self.stats.decisions += 1;
        let snap = Snapshot {
            euf: self.euf.clone(),
            rules: self.rules.clone(),
            queue: self.queue.clone(),
            asserted: self.asserted.clone(),
            reloc_pending: self.reloc_pending.clone(),
            fixed_done: self.fixed_done.clone(),
        };
        for branch in &lemma.branches {
            self.lia.push();
            if self.assert_branch(branch).is_ok() {
                match self.search() {
                    Search::Sat(m) => return Search::Sat(m),
                    Search::Closed => {}
                    Search::Out(r) => {
                        self.lia.pop();
                        self.restore(&snap);
                        return Search::Out(r);
                    }
                }
            } else {
                self.stats.conflicts += 1;
            }
            self.lia.pop();
            self.restore(&snap);
        }
        Search::Closed
    }

    fn restore(&mut self, snap: &Snapshot) {
        self.euf = snap.euf.clone();
        self.rules = snap.rules.clone();
        self.queue = snap.queue.clone();
        self.asserted = snap.asserted.clone();
        self.reloc_pending = snap.reloc_pending.clone();
        self.fixed_done = snap.fixed_done.clone();
    }

    /// Pin one unfixed arithmetic variable to its current model value.
    fn grounding_lemma(&mut self) -> Option<Lemma> {
        let vars: Vec<TermId> = self.lia.vars().collect();
        let model = self.lia.int_model().ok()?;
        for v in vars {
            if self.lia.query_fixed(v).is_some() {
                continue;
            }
            let m = model.get(&v)?.clone();
            let num = self.store.numeral(m.clone());
            let b1 = self.store.eq(v, num).unwrap();
            let below = self.store.numeral(m.clone() - 1);
            let b2 = self.store.le(v, below).unwrap();
            let above = self.store.numeral(m + 1);
            let b3 = self.store.le(above, v).unwrap();
            return Some(Lemma {
                source: RuleId::Split,
                branches: vec![vec![b1], vec![b2], vec![b3]],
            });
        }
        None
    }

    // ---------------------------------------------------------------
    // Model construction
    // ---------------------------------------------------------------

    fn build_and_verify(&mut self) -> Option<Model> {
        let debug = std::env::var_os("NSEQ_DEBUG_MODEL").is_some();
        for distinct in [false, true] {
            if let Some(model) = self.build_model(distinct) {
                let mut ok = true;
                for &a in &self.assertions.clone() {
                    if !oracle::holds(self.store, &model, a).unwrap_or(false) {
                        ok = false;
                        if debug {
                            eprintln!(
                                "model check (distinct={distinct}) fails: {}",
                                self.store.display(a)
                            );
                            for (&v, val) in &model.assignment {
                                eprintln!("  {} = {val:?}", self.store.display(v));
                            }
                        }
                        break;
                    }
                }
                if ok {
                    return Some(model);
                }
            } else if debug {
                eprintln!("model build (distinct={distinct}) returned none");
            }
        }
        None
    }

    fn int_value(&mut self, t: TermId) -> BigInt {
        if let Some(n) = self.store.as_numeral(t) {
            return n.clone();
        }
        if let Some(n) = self.lia.query_fixed(t) {
            return n;
        }
        if let Some(c) = self.euf.class_constant(self.store, t) {
            if let Some(n) = self.store.as_numeral(c) {
                return n.clone();
            }
        }
        BigInt::from(0)
    }

    fn bool_value(&mut self, t: TermId) -> bool {
        let tt = self.store.bool_const(true);
        self.euf.are_equal(t, tt)
    }

    /// Deterministic ordinal of `t`'s class among registered terms of its sort.
    fn class_ordinal(&mut self, t: TermId) -> usize {
        let sort = self.store.sort(t).clone();
        let mut roots = BTreeSet::new();
        for id in 0..self.store.len() as u32 {
            let u = TermId(id);
            if *self.store.sort(u) == sort {
                roots.insert(self.euf.find(u));
            }
        }
        roots.iter().position(|&r| r == self.euf.find(t)).unwrap_or(0)
    }

    fn elem_value(&mut self, t: TermId) -> Value {
        match self.store.sort(t).clone() {
            Sort::Int => Value::Int(self.int_value(t)),
            Sort::Bool => Value::Bool(self.bool_value(t)),
            Sort::Uninterpreted(name) => {
                let ord = self.class_ordinal(t) as u32;
                Value::Elem(name, ord)
            }
            other => unreachable!("element of sort {other:?}"),
        }
    }

    /// One concrete sequence value per congruence class, built from fixed
    /// bounds, constant members, known reads, and then propagated through
    /// normal forms and relocation classes to a fixpoint.
    fn seq_values(&mut self, distinct: bool) -> Option<BTreeMap<TermId, NSeqValue>> {
        let mut map: BTreeMap<TermId, NSeqValue> = BTreeMap::new();
        let nseq_terms: Vec<TermId> = (0..self.store.len() as u32)
            .map(TermId)
            .filter(|&t| self.store.sort(t).is_nseq())
            .collect();
        // base values: bounds + defaults
        for &t in &nseq_terms {
            let root = self.euf.find(t);
            if map.contains_key(&root) {
                continue;
            }
            let mut fixed = None;
            let mut members = self.euf.class_members(root);
            if members.is_empty() {
                members.push(t);
            }
            for m in &members {
                let (fst_t, lst_t) = self.store.bounds_terms(*m).unwrap();
                if let (Some(f), Some(l)) =
                    (self.lia.query_fixed(fst_t), self.lia.query_fixed(lst_t))
                {
                    fixed = Some((f, l));
                    break;
                }
            }
            let (fst, lst) = match fixed {
                Some(b) => b,
                None => {
                    // unconstrained: distinct empty sequences per class
                    let ord = BigInt::from(self.class_ordinal(root) as u32);
                    (ord.clone(), ord - 1)
                }
            };
            let len = oracle::nseq_len(&fst, &lst);
            if len > 4096 {
                if std::env::var_os("NSEQ_DEBUG_MODEL").is_some() {
                    eprintln!("seq_values: class of {} has len {len}", self.store.display(t));
                }
                return None;
            }
            let elem_sort = match self.store.sort(t) {
                Sort::NSeq(e) => (**e).clone(),
                _ => unreachable!(),
            };
            let mut elems = vec![default_value(&elem_sort); len];
            if distinct && elem_sort == Sort::Int {
                let ord = BigInt::from(self.class_ordinal(root) as u32);
                for e in elems.iter_mut() {
                    *e = Value::Int(ord.clone());
                }
            }
            map.insert(root, NSeqValue::new(fst, lst, elems));
        }
        // constant members fill their whole range
        for &c in &nseq_terms {
            if *self.store.head(c) != Symbol::NseqConst {
                continue;
            }
            let v = self.store.args(c)[2];
            let val = self.elem_value(v);
            let root = self.euf.find(c);
            if let Some(sv) = map.get_mut(&root) {
                for e in sv.elems.iter_mut() {
                    *e = val.clone();
                }
            }
        }
        // known reads overwrite single positions
        for id in 0..self.store.len() as u32 {
            let g = TermId(id);
            if *self.store.head(g) != Symbol::NseqGet {
                continue;
            }
            let (s, i) = (self.store.args(g)[0], self.store.args(g)[1]);
            let iv = self.int_value(i);
            let val = self.elem_value(g);
            let root = self.euf.find(s);
            if let Some(sv) = map.get_mut(&root) {
                if sv.in_bounds(&iv) {
                    let pos = (&iv - &sv.first).to_usize()?;
                    sv.elems[pos] = val;
                }
            }
        }
        // Propagate constrained positions through normal forms and
        // relocations. A position is "known" once a constant fill, a read,
        // or propagation reaches it; unknown positions keep their default
        // and never overwrite known ones.
        let mut known: BTreeMap<TermId, Vec<bool>> = map
            .iter()
            .map(|(&r, v)| (r, vec![false; v.len()]))
            .collect();
        for &c in &nseq_terms {
            if *self.store.head(c) == Symbol::NseqConst {
                let root = self.euf.find(c);
                if let Some(k) = known.get_mut(&root) {
                    k.iter_mut().for_each(|b| *b = true);
                }
            }
        }
        for id in 0..self.store.len() as u32 {
            let g = TermId(id);
            if *self.store.head(g) != Symbol::NseqGet {
                continue;
            }
            let (s, i) = (self.store.args(g)[0], self.store.args(g)[1]);
            let iv = self.int_value(i);
            let root = self.euf.find(s);
            if let Some(sv) = map.get(&root) {
                if sv.in_bounds(&iv) {
                    let pos = (&iv - &sv.first).to_usize()?;
                    known.get_mut(&root).unwrap()[pos] = true;
                }
            }
        }
        // index pairs (src_root, src_index, dst_root, dst_index) to keep equal
        let mut links: Vec<(TermId, BigInt, TermId, BigInt)> = Vec::new();
        for nf in self.rules.normal_forms() {
            let oroot = self.euf.find(nf.owner);
            for &w in &nf.fragments {
                let wroot = self.euf.find(w);
                if wroot == oroot {
                    continue;
                }
                let (Some(ov), Some(wv)) = (map.get(&oroot), map.get(&wroot)) else {
                    continue;
                };
                let mut i = wv.first.clone();
                let last = wv.last.clone();
                let ov = ov.clone();
                while i <= last {
                    if ov.in_bounds(&i) {
                        links.push((wroot, i.clone(), oroot, i.clone()));
                    }
                    i += 1;
                }
            }
        }
        for &t in &nseq_terms {
            if self.euf.find(t) != t {
                continue;
            }
            for (m, off) in self.euf.reloc_class(t) {
                let mroot = self.euf.find(m);
                if mroot == t {
                    continue;
                }
                let (Some(tv), Some(mv)) = (map.get(&t), map.get(&mroot)) else {
                    continue;
                };
                // position p in t corresponds to p + off in m
                let mut p = tv.first.clone();
                let last = tv.last.clone();
                let mv = mv.clone();
                while p <= last {
                    let q = &p + &off;
                    if mv.in_bounds(&q) {
                        links.push((t, p.clone(), mroot, q));
                    }
                    p += 1;
                }
            }
        }
        // Structural links mirror each operation's semantics, so the class
        // value of a compound term stays pointwise-consistent with the class
        // values of its arguments (equality assertions then tie variable
        // positions together through the compound's class).
        for &t in &nseq_terms {
            let troot = self.euf.find(t);
            let head = self.store.head(t).clone();
            let args = self.store.args(t).to_vec();
            let tv = match map.get(&troot) {
                Some(v) => v.clone(),
                None => continue,
            };
            let full_copy = |links: &mut Vec<(TermId, BigInt, TermId, BigInt)>,
                             tv: &NSeqValue,
                             sroot: TermId,
                             sv: &NSeqValue| {
                let mut p = tv.first.clone();
                while p <= tv.last {
                    if sv.in_bounds(&p) {
                        links.push((troot, p.clone(), sroot, p.clone()));
                    }
                    p += 1;
                }
            };
            match head {
                Symbol::NseqRelocate => {
                    let sroot = self.euf.find(args[0]);
                    let Some(sv) = map.get(&sroot).cloned() else { continue };
                    let f = tv.first.clone();
                    let mut p = f.clone();
                    while p <= tv.last {
                        let q = &sv.first + (&p - &f);
                        if sv.in_bounds(&q) {
                            links.push((troot, p.clone(), sroot, q));
                        }
                        p += 1;
                    }
                }
                Symbol::NseqConcat => {
                    let aroot = self.euf.find(args[0]);
                    let broot = self.euf.find(args[1]);
                    let (Some(av), Some(bv)) =
                        (map.get(&aroot).cloned(), map.get(&broot).cloned())
                    else {
                        continue;
                    };
                    if av.is_empty() {
                        full_copy(&mut links, &tv, broot, &bv);
                    } else if bv.is_empty() || bv.first != &av.last + 1 {
                        full_copy(&mut links, &tv, aroot, &av);
                    } else {
                        full_copy(&mut links, &tv, aroot, &av);
                        let mut p = bv.first.clone();
                        while p <= bv.last {
                            if tv.in_bounds(&p) {
                                links.push((troot, p.clone(), broot, p.clone()));
                            }
                            p += 1;
                        }
                    }
                }
                Symbol::NseqSlice => {
                    let sroot = self.euf.find(args[0]);
                    let Some(sv) = map.get(&sroot).cloned() else { continue };
                    let f = self.int_value(args[1]);
                    let l = self.int_value(args[2]);
                    if f <= l && sv.first <= f && l <= sv.last {
                        let mut p = f.clone();
                        while p <= l {
                            if tv.in_bounds(&p) {
                                links.push((troot, p.clone(), sroot, p.clone()));
                            }
                            p += 1;
                        }
                    } else {
                        full_copy(&mut links, &tv, sroot, &sv);
                    }
                }
                Symbol::NseqSet => {
                    let sroot = self.euf.find(args[0]);
                    let Some(sv) = map.get(&sroot).cloned() else { continue };
                    let i = self.int_value(args[1]);
                    if sv.in_bounds(&i) {
                        let mut p = sv.first.clone();
                        while p <= sv.last {
                            if p != i && tv.in_bounds(&p) {
                                links.push((troot, p.clone(), sroot, p.clone()));
                            }
                            p += 1;
                        }
                        if tv.in_bounds(&i) {
                            let val = self.elem_value(args[2]);
                            let pos = (&i - &tv.first).to_usize()?;
                            map.get_mut(&troot).unwrap().elems[pos] = val;
                            known.get_mut(&troot).unwrap()[pos] = true;
                        }
                    } else {
                        full_copy(&mut links, &tv, sroot, &sv);
                    }
                }
                Symbol::NseqUpdate => {
                    let aroot = self.euf.find(args[0]);
                    let broot = self.euf.find(args[1]);
                    let (Some(av), Some(bv)) =
                        (map.get(&aroot).cloned(), map.get(&broot).cloned())
                    else {
                        continue;
                    };
                    if !bv.is_empty() && av.first <= bv.first && bv.last <= av.last {
                        let mut p = av.first.clone();
                        while p <= av.last {
                            if tv.in_bounds(&p) {
                                if bv.in_bounds(&p) {
                                    links.push((troot, p.clone(), broot, p.clone()));
                                } else {
                                    links.push((troot, p.clone(), aroot, p.clone()));
                                }
                            }
                            p += 1;
                        }
                    } else {
                        full_copy(&mut links, &tv, aroot, &av);
                    }
                }
                _ => {}
            }
        }
        loop {
            let mut changed = false;
            for (a, i, b, j) in &links {
                let (Some(pa), Some(pb)) =
                    ((i - &map[a].first).to_usize(), (j - &map[b].first).to_usize())
                else {
                    if std::env::var_os("NSEQ_DEBUG_MODEL").is_some() {
                        eprintln!("seq_values: bad link {a:?}@{i} <-> {b:?}@{j}");
                    }
                    return None;
                };
                if pa >= map[a].len() || pb >= map[b].len() {
                    if std::env::var_os("NSEQ_DEBUG_MODEL").is_some() {
                        eprintln!("seq_values: out-of-range link {a:?}@{i} <-> {b:?}@{j}");
                    }
                    return None;
                }
                let (ka, kb) = (known[a][pa], known[b][pb]);
                if ka && !kb {
                    let v = map[a].elems[pa].clone();
                    map.get_mut(b).unwrap().elems[pb] = v;
                    known.get_mut(b).unwrap()[pb] = true;
                    changed = true;
                } else if kb && !ka {
                    let v = map[b].elems[pb].clone();
                    map.get_mut(a).unwrap().elems[pa] = v;
                    known.get_mut(a).unwrap()[pa] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Some(map)
    }

    fn build_model(&mut self, distinct: bool) -> Option<Model> {
        let seqs = self.seq_values(distinct)?;
        let mut model = Model::default();
        let mut vars = Vec::new();
        for &a in &self.assertions.clone() {
            self.store.free_vars(a, &mut vars);
        }
        vars.sort();
        vars.dedup();
        for v in vars {
            let value = match self.store.sort(v).clone() {
                Sort::Int => Value::Int(self.int_value(v)),
                Sort::Bool => Value::Bool(self.bool_value(v)),
                Sort::Uninterpreted(name) => {
                    Value::Elem(name, self.class_ordinal(v) as u32)
                }
                Sort::NSeq(_) => match seqs.get(&self.euf.find(v)) {
                    Some(s) => Value::NSeq(s.clone()),
                    None => {
                        if std::env::var_os("NSEQ_DEBUG_MODEL").is_some() {
                            eprintln!("build_model: no class value for {}", self.store.display(v));
                        }
                        return None;
                    }
                },
                Sort::Seq(_) => return None,
            };
            model.assign(v, value);
        }
        // out-of-bounds reads keep their solver values
        for id in 0..self.store.len() as u32 {
            let g = TermId(id);
            match self.store.head(g).clone() {
                Symbol::NseqGet => {
                    let (s, i) = (self.store.args(g)[0], self.store.args(g)[1]);
                    let Some(class_sv) = seqs.get(&self.euf.find(s)).cloned() else { continue };
                    // The oracle keys out-of-bounds reads on the *evaluated*
                    // argument; for compound arguments that can differ from
                    // the class value.
                    let sv = {
                        let mut ev = oracle::Evaluator::new(self.store, &model).partial();
                        match ev.eval(s) {
                            Ok(Some(Value::NSeq(v))) => v,
                            _ => class_sv,
                        }
                    };
                    let iv = self.int_value(i);
                    if sv.in_bounds(&iv) {
                        continue;
                    }
                    let key = ReadKey::NseqOob(sv, iv);
                    let val = self.elem_value(g);
                    // Two reads with the same key may sit in different EUF
                    // classes when nothing forced a merge; keep the first
                    // value and let verification reject genuine conflicts.
                    model.reads.entry(key).or_insert(val);
                }
                Symbol::Uf(name) => {
                    if !self.asserted_mentions(g) {
                        continue;
                    }
                    let mut arg_vals = Vec::new();
                    for &a in self.store.args(g).to_vec().iter() {
                        arg_vals.push(match self.store.sort(a).clone() {
                            Sort::NSeq(_) => Value::NSeq(seqs.get(&self.euf.find(a))?.clone()),
                            _ => self.elem_value(a),
                        });
                    }
                    let key = ReadKey::Uf(name, arg_vals);
                    let val = self.elem_value(g);
                    if let Some(prev) = model.reads.get(&key) {
                        if *prev != val {
                            return None;
                        }
                    }
                    model.reads.insert(key, val);
                }
                _ => {}
            }
        }
        Some(model)
    }

    fn asserted_mentions(&self, t: TermId) -> bool {
        self.assertions
            .iter()
            .any(|&a| self.store.subterms(a).contains(&t))
    }
}

fn is_seq_symbol(head: &Symbol) -> bool {
    matches!(
        head,
        Symbol::SeqEmpty
            | Symbol::SeqUnit
            | Symbol::SeqLen
            | Symbol::SeqNth
            | Symbol::SeqUpdate
            | Symbol::SeqExtract
            | Symbol::SeqConcat
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> Budget {
        Budget { max_decisions: 20_000, max_lemmas: 50_000, wall_ms: 30_000 }
    }

    fn solve_both(store: &mut TermStore, assertions: &[TermId]) -> (Verdict, Verdict) {
        let b = solve(store, assertions, Calculus::Base, RuleConfig::default(), &quick()).0;
        let e = solve(store, assertions, Calculus::Ext, RuleConfig::default(), &quick()).0;
        (b, e)
    }

    #[test]
    fn reflexivity_conflict() {
        let mut st = TermStore::new();
        let s = st.var("s", Sort::nseq(Sort::Int));
        let (fst, lst) = st.bounds_terms(s).unwrap();
        let zero = st.numeral(0);
        let one = st.numeral(1);
        let g = st.mk(Symbol::NseqGet, vec![s, zero]).unwrap();
        let a1 = st.eq(fst, zero).unwrap();
        let a2 = st.eq(lst, one).unwrap();
        let e = st.eq(g, g).unwrap();
        let a3 = st.not(e).unwrap();
        let (b, e) = solve_both(&mut st, &[a1, a2, a3]);
        assert!(matches!(b, Verdict::Unsat), "{b:?}");
        assert!(matches!(e, Verdict::Unsat), "{e:?}");
    }

    #[test]
    fn const_get_conflict() {
        // s = const(0,1,5) /\ get(s,0) = 6 is unsat
        let mut st = TermStore::new();
        let s = st.var("s", Sort::nseq(Sort::Int));
        let zero = st.numeral(0);
        let one = st.numeral(1);
        let five = st.numeral(5);
        let six = st.numeral(6);
        let c = st.mk(Symbol::NseqConst, vec![zero, one, five]).unwrap();
        let a1 = st.eq(s, c).unwrap();
        let g = st.mk(Symbol::NseqGet, vec![s, zero]).unwrap();
        let a2 = st.eq(g, six).unwrap();
        let (b, e) = solve_both(&mut st, &[a1, a2]);
        assert!(matches!(b, Verdict::Unsat), "{b:?}");
        assert!(matches!(e, Verdict::Unsat), "{e:?}");
    }

    #[test]
    fn const_get_sat_with_model() {
        // s = const(0,1,5) /\ get(s,0) = 5 is sat with elems [5,5]
        let mut st = TermStore::new();
        let s = st.var("s", Sort::nseq(Sort::Int));
        let zero = st.numeral(0);
        let one = st.numeral(1);
        let five = st.numeral(5);
        let c = st.mk(Symbol::NseqConst, vec![zero, one, five]).unwrap();
        let a1 = st.eq(s, c).unwrap();
        let g = st.mk(Symbol::NseqGet, vec![s, zero]).unwrap();
        let a2 = st.eq(g, five).unwrap();
        for calc in [Calculus::Base, Calculus::Ext] {
            let (v, _) = solve(&mut st, &[a1, a2], calc, RuleConfig::default(), &quick());
            let Verdict::Sat(m) = v else { panic!("expected sat, got {}", v.word()) };
            let Value::NSeq(sv) = &m.assignment[&s] else { panic!() };
            assert_eq!(sv.first, BigInt::from(0));
            assert_eq!(sv.last, BigInt::from(1));
            assert_eq!(sv.elems, vec![Value::int(5), Value::int(5)]);
        }
    }

    #[test]
    fn relocate_propagates_content() {
        // t = relocate(s, 10) /\ fst_s = 0 /\ lst_s = 1 /\ get(s,0) = 3
        //   /\ get(t,10) = 4 is unsat
        let mut st = TermStore::new();
        let s = st.var("s", Sort::nseq(Sort::Int));
        let ten = st.numeral(10);
        let t = st.mk(Symbol::NseqRelocate, vec![s, ten]).unwrap();
        let (fst, lst) = st.bounds_terms(s).unwrap();
        let zero = st.numeral(0);
        let one = st.numeral(1);
        let three = st.numeral(3);
        let four = st.numeral(4);
        let a1 = st.eq(fst, zero).unwrap();
        let a2 = st.eq(lst, one).unwrap();
        let g1 = st.mk(Symbol::NseqGet, vec![s, zero]).unwrap();
        let a3 = st.eq(g1, three).unwrap();
        let g2 = st.mk(Symbol::NseqGet, vec![t, ten]).unwrap();
        let a4 = st.eq(g2, four).unwrap();
        let (b, e) = solve_both(&mut st, &[a1, a2, a3, a4]);
        assert!(matches!(b, Verdict::Unsat), "{b:?}");
        assert!(matches!(e, Verdict::Unsat), "{e:?}");
    }

    #[test]
    fn set_then_get_same_index() {
        // t = set(s, 0, 7) /\ fst_s = 0 /\ lst_s = 2 /\ get(t, 0) = 8 unsat
        let mut st = TermStore::new();
        let s = st.var("s", Sort::nseq(Sort::Int));
        let zero = st.numeral(0);
        let two = st.numeral(2);
        let seven = st.numeral(7);
        let eight = st.numeral(8);
        let t = st.mk(Symbol::NseqSet, vec![s, zero, seven]).unwrap();
        let (fst, lst) = st.bounds_terms(s).unwrap();
        let a1 = st.eq(fst, zero).unwrap();
        let a2 = st.eq(lst, two).unwrap();
        let g = st.mk(Symbol::NseqGet, vec![t, zero]).unwrap();
        let a3 = st.eq(g, eight).unwrap();
        let (b, e) = solve_both(&mut st, &[a1, a2, a3]);
        assert!(matches!(b, Verdict::Unsat), "{b:?}");
        assert!(matches!(e, Verdict::Unsat), "{e:?}");
    }

    #[test]
    fn diseq_of_identical_bounds_singletons() {
        // fst/lst of a and b pinned to (0,0), get(a,0) = get(b,0) = 1, a /= b
        let mut st = TermStore::new();
        let a = st.var("a", Sort::nseq(Sort::Int));
        let b = st.var("b", Sort::nseq(Sort::Int));
        let zero = st.numeral(0);
        let one = st.numeral(1);
        let mut asserts = Vec::new();
        for s in [a, b] {
            let (fst, lst) = st.bounds_terms(s).unwrap();
            asserts.push(st.eq(fst, zero).unwrap());
            asserts.push(st.eq(lst, zero).unwrap());
            let g = st.mk(Symbol::NseqGet, vec![s, zero]).unwrap();
            asserts.push(st.eq(g, one).unwrap());
        }
        let e = st.eq(a, b).unwrap();
        asserts.push(st.not(e).unwrap());
        let (bv, ev) = solve_both(&mut st, &asserts);
        assert!(matches!(bv, Verdict::Unsat), "{bv:?}");
        assert!(matches!(ev, Verdict::Unsat), "{ev:?}");
    }

    #[test]
    fn concat_bounds_sat() {
        // s = a ++ b with a=[0..1], b=[2..2] gives lst_s = 2
        let mut st = TermStore::new();
        let a = st.var("a", Sort::nseq(Sort::Int));
        let b = st.var("b", Sort::nseq(Sort::Int));
        let zero = st.numeral(0);
        let one = st.numeral(1);
        let two = st.numeral(2);
        let s = st.mk(Symbol::NseqConcat, vec![a, b]).unwrap();
        let (fa, la) = st.bounds_terms(a).unwrap();
        let (fb, lb) = st.bounds_terms(b).unwrap();
        let (_, ls) = st.bounds_terms(s).unwrap();
        let asserts = vec![
            st.eq(fa, zero).unwrap(),
            st.eq(la, one).unwrap(),
            st.eq(fb, two).unwrap(),
            st.eq(lb, two).unwrap(),
            st.lt(ls, two).unwrap(),
        ];
        let (bv, ev) = solve_both(&mut st, &asserts);
        assert!(matches!(bv, Verdict::Unsat), "{bv:?}");
        assert!(matches!(ev, Verdict::Unsat), "{ev:?}");
    }

    #[test]
    fn determinism_of_stats() {
        let mut runs = Vec::new();
        for _ in 0..2 {
            let mut st = TermStore::new();
            let s = st.var("s", Sort::nseq(Sort::Int));
            let zero = st.numeral(0);
            let one = st.numeral(1);
            let five = st.numeral(5);
            let c = st.mk(Symbol::NseqConst, vec![zero, one, five]).unwrap();
            let a1 = st.eq(s, c).unwrap();
            let g = st.mk(Symbol::NseqGet, vec![s, zero]).unwrap();
            let a2 = st.eq(g, five).unwrap();
            let (v, stats) =
                solve(&mut st, &[a1, a2], Calculus::Ext, RuleConfig::default(), &quick());
            runs.push((v.word(), stats.decisions, stats.conflicts, stats.lemmas));
        }
        assert_eq!(runs[0], runs[1]);
    }

    #[test]
    fn empty_script_is_sat() {
        let mut st = TermStore::new();
        let (v, _) = solve(&mut st, &[], Calculus::Base, RuleConfig::default(), &quick());
        assert!(matches!(v, Verdict::Sat(_)));
    }
}
