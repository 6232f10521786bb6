//! Seeded generators for random NSeq and Seq goals, and the three-way
//! differential harness (brute-force oracle vs. both calculi).
//!
//! Instances carry explicit domain constraints — every free integer variable
//! and every generated read is pinned into the oracle's finite window — so a
//! disagreement is a genuine soundness signal rather than an artifact of the
//! oracle's bounded enumeration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::oracle::{enumerate_sat, Domain};
use crate::rules::{Calculus, RuleConfig};
use crate::solver::{solve, Budget, Verdict};
use crate::term::{Sort, Symbol, TermId, TermStore};

#[derive(Debug, Clone)]
pub struct FuzzConfig {
    pub seed: u64,
    pub count: u32,
    /// Depth bound for generated NSeq terms.
    pub max_depth: u32,
    /// Window for bounds and indices.
    pub int_lo: i64,
    pub int_hi: i64,
    /// Element values range over `0..carrier`.
    pub carrier: u32,
    pub max_nseq_vars: u32,
    pub max_assertions: u32,
    /// Length cap asserted on every NSeq variable (`lst ≤ fst + max_len − 1`);
    /// keeps the brute-force enumeration tractable.
    pub max_len: u32,
    /// Relative frequency of the NSeq operators
    /// (var, const, set, relocate, concat, slice, update).
    pub op_weights: [u32; 7],
}

impl Default for FuzzConfig {
    fn default() -> FuzzConfig {
        FuzzConfig {
            seed: 0,
            count: 100,
            max_depth: 3,
            int_lo: -3,
            int_hi: 4,
            carrier: 3,
            max_nseq_vars: 5,
            max_assertions: 12,
            max_len: 3,
            op_weights: [6, 2, 2, 2, 2, 1, 1],
        }
    }
}

impl FuzzConfig {
    pub fn domain(&self) -> Domain {
        Domain {
            int_lo: self.int_lo,
            int_hi: self.int_hi,
            carrier: self.carrier,
            max_nodes: 300_000,
            ..Domain::default()
        }
    }
}

/// One generated goal: a fresh store and a conjunction of assertions
/// (domain constraints first, then the random atoms).
pub struct Instance {
    pub store: TermStore,
    pub assertions: Vec<TermId>,
}

struct Gen<'a> {
    cfg: &'a FuzzConfig,
    store: TermStore,
    nseq_vars: Vec<TermId>,
    int_vars: Vec<TermId>,
    elem_vars: Vec<TermId>,
    /// Generated read terms, constrained into the carrier window afterwards.
    gets: Vec<TermId>,
}

/// Generate the `k`-th NSeq instance of a seeded stream.
pub fn gen_instance(cfg: &FuzzConfig, k: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(k.wrapping_mul(0x9e3779b97f4a7c15)));
    let mut g = Gen {
        cfg,
        store: TermStore::new(),
        nseq_vars: Vec::new(),
        int_vars: Vec::new(),
        elem_vars: Vec::new(),
        gets: Vec::new(),
    };
    let nv = rng.gen_range(1..=cfg.max_nseq_vars);
    for j in 0..nv {
        g.nseq_vars.push(g.store.var(&format!("s{j}"), Sort::nseq(Sort::Int)));
    }
    for j in 0..rng.gen_range(0..=2u32) {
        g.int_vars.push(g.store.var(&format!("i{j}"), Sort::Int));
    }
    for j in 0..rng.gen_range(0..=2u32) {
        g.elem_vars.push(g.store.var(&format!("e{j}"), Sort::Int));
    }
    let mut atoms = Vec::new();
    for _ in 0..rng.gen_range(1..=cfg.max_assertions) {
        let atom = g.atom(&mut rng);
        let atom = if rng.gen_bool(0.3) { g.store.not(atom).unwrap() } else { atom };
        atoms.push(atom);
    }
    let mut assertions = g.domain_constraints(&atoms);
    assertions.extend(atoms);
    Instance { store: g.store, assertions }
}

impl Gen<'_> {
    fn int_in_window(&mut self, rng: &mut ChaCha8Rng) -> TermId {
        let n = rng.gen_range(self.cfg.int_lo..=self.cfg.int_hi);
        numeral(&mut self.store, n)
    }

    /// Index or bound position: window numeral, integer variable, or a bound
    /// of an existing sequence term.
    fn index(&mut self, rng: &mut ChaCha8Rng, depth: u32) -> TermId {
        match rng.gen_range(0..4u32) {
            0 if !self.int_vars.is_empty() => {
                self.int_vars[rng.gen_range(0..self.int_vars.len())]
            }
            1 | 2 if depth > 0 => {
                let s = self.nseq(rng, depth - 1);
                let (fst, lst) = self.store.bounds_terms(s).unwrap();
                if rng.gen_bool(0.5) {
                    fst
                } else {
                    lst
                }
            }
            _ => self.int_in_window(rng),
        }
    }

    /// Element position: carrier numeral, element variable, or a read.
    fn elem(&mut self, rng: &mut ChaCha8Rng, depth: u32) -> TermId {
        match rng.gen_range(0..3u32) {
            0 if !self.elem_vars.is_empty() => {
                self.elem_vars[rng.gen_range(0..self.elem_vars.len())]
            }
            1 if depth > 0 => {
                let s = self.nseq(rng, depth - 1);
                let i = self.index(rng, 0);
                let g = self.store.mk(Symbol::NseqGet, vec![s, i]).unwrap();
                self.gets.push(g);
                g
            }
            _ => {
                let n = rng.gen_range(0..self.cfg.carrier) as i64;
                numeral(&mut self.store, n)
            }
        }
    }

    fn nseq(&mut self, rng: &mut ChaCha8Rng, depth: u32) -> TermId {
        let w = &self.cfg.op_weights;
        let total: u32 = if depth == 0 { w[0] + w[1] } else { w.iter().sum() };
        let mut pick = rng.gen_range(0..total);
        for (op, &weight) in w.iter().enumerate() {
            if pick < weight {
                return self.nseq_op(rng, op, depth);
            }
            pick -= weight;
        }
        unreachable!()
    }

    fn nseq_op(&mut self, rng: &mut ChaCha8Rng, op: usize, depth: u32) -> TermId {
        let d = depth.saturating_sub(1);
        match op {
            0 => self.nseq_vars[rng.gen_range(0..self.nseq_vars.len())],
            1 => {
                let f = self.index(rng, 0);
                let l = self.index(rng, 0);
                let v = self.elem(rng, 0);
                self.store.mk(Symbol::NseqConst, vec![f, l, v]).unwrap()
            }
            2 => {
                let s = self.nseq(rng, d);
                let i = self.index(rng, d);
                let v = self.elem(rng, d);
                self.store.mk(Symbol::NseqSet, vec![s, i, v]).unwrap()
            }
            3 => {
                let s = self.nseq(rng, d);
                let f = self.index(rng, d);
                self.store.mk(Symbol::NseqRelocate, vec![s, f]).unwrap()
            }
            4 => {
                let a = self.nseq(rng, d);
                let b = self.nseq(rng, d);
                self.store.mk(Symbol::NseqConcat, vec![a, b]).unwrap()
            }
            5 => {
                let s = self.nseq(rng, d);
                let f = self.index(rng, d);
                let l = self.index(rng, d);
                self.store.mk(Symbol::NseqSlice, vec![s, f, l]).unwrap()
            }
            _ => {
                let a = self.nseq(rng, d);
                let b = self.nseq(rng, d);
                self.store.mk(Symbol::NseqUpdate, vec![a, b]).unwrap()
            }
        }
    }

    fn atom(&mut self, rng: &mut ChaCha8Rng) -> TermId {
        let depth = self.cfg.max_depth;
        match rng.gen_range(0..4u32) {
            0 => {
                let a = self.nseq(rng, depth);
                let b = self.nseq(rng, depth);
                self.store.eq(a, b).unwrap()
            }
            1 => {
                let a = self.index(rng, depth);
                let b = self.index(rng, depth);
                if rng.gen_bool(0.5) {
                    self.store.eq(a, b).unwrap()
                } else {
                    self.store.le(a, b).unwrap()
                }
            }
            _ => {
                let a = self.elem(rng, depth);
                let b = self.elem(rng, depth);
                self.store.eq(a, b).unwrap()
            }
        }
    }

    /// Pin every variable and read the atoms mention into the finite window
    /// the oracle enumerates, so both sides decide the same bounded problem.
    /// Unused variables stay unconstrained — and therefore unenumerated.
    fn domain_constraints(&mut self, atoms: &[TermId]) -> Vec<TermId> {
        let mut used = Vec::new();
        for &a in atoms {
            self.store.free_vars(a, &mut used);
        }
        used.sort();
        used.dedup();
        let lo = numeral(&mut self.store, self.cfg.int_lo);
        let hi = numeral(&mut self.store, self.cfg.int_hi);
        let zero = numeral(&mut self.store, 0);
        let top = numeral(&mut self.store, self.cfg.carrier as i64 - 1);
        let cap = numeral(&mut self.store, self.cfg.max_len as i64 - 1);
        let mut out = Vec::new();
        for &s in &self.nseq_vars.clone() {
            if !used.contains(&s) {
                continue;
            }
            let (fst, lst) = self.store.bounds_terms(s).unwrap();
            out.push(self.store.le(lo, fst).unwrap());
            out.push(self.store.le(fst, hi).unwrap());
            out.push(self.store.le(lo, lst).unwrap());
            out.push(self.store.le(lst, hi).unwrap());
            // lst - fst <= max_len - 1
            let len = self.store.sub(lst, fst).unwrap();
            out.push(self.store.le(len, cap).unwrap());
        }
        for &v in &self.int_vars.clone() {
            if !used.contains(&v) {
                continue;
            }
            out.push(self.store.le(lo, v).unwrap());
            out.push(self.store.le(v, hi).unwrap());
        }
        for &v in &self.elem_vars.clone() {
            if !used.contains(&v) {
                continue;
            }
            out.push(self.store.le(zero, v).unwrap());
            out.push(self.store.le(v, top).unwrap());
        }
        let mut gets = std::mem::take(&mut self.gets);
        gets.sort();
        gets.dedup();
        for g in gets {
            out.push(self.store.le(zero, g).unwrap());
            out.push(self.store.le(g, top).unwrap());
        }
        out
    }
}

fn numeral(store: &mut TermStore, n: i64) -> TermId {
    if n < 0 {
        let inner = store.numeral(-n);
        store.mk(Symbol::Neg, vec![inner]).unwrap()
    } else {
        store.numeral(n)
    }
}

/// Random quantifier-free Seq formulas for the translation differential.
pub fn gen_seq_instance(cfg: &FuzzConfig, k: u64) -> Instance {
    let mut rng =
        ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(k.wrapping_mul(0xd1b54a32d192ed03)));
    let mut store = TermStore::new();
    let elem = Sort::Int;
    let nv = rng.gen_range(1..=3u32);
    let vars: Vec<TermId> =
        (0..nv).map(|j| store.var(&format!("x{j}"), Sort::seq(elem.clone()))).collect();
    let ivars: Vec<TermId> = (0..2).map(|j| store.var(&format!("i{j}"), Sort::Int)).collect();

    fn seq_term(
        store: &mut TermStore,
        rng: &mut ChaCha8Rng,
        cfg: &FuzzConfig,
        vars: &[TermId],
        ivars: &[TermId],
        depth: u32,
    ) -> TermId {
        let choice = if depth == 0 { rng.gen_range(0..3u32) } else { rng.gen_range(0..7u32) };
        match choice {
            0 => vars[rng.gen_range(0..vars.len())],
            1 => store.seq_empty(Sort::Int),
            2 => {
                let n = rng.gen_range(0..cfg.carrier) as i64;
                let v = store.numeral(n);
                store.mk(Symbol::SeqUnit, vec![v]).unwrap()
            }
            3 => {
                let a = seq_term(store, rng, cfg, vars, ivars, depth - 1);
                let b = seq_term(store, rng, cfg, vars, ivars, depth - 1);
                store.mk(Symbol::SeqConcat, vec![a, b]).unwrap()
            }
            4 => {
                let a = seq_term(store, rng, cfg, vars, ivars, depth - 1);
                let i = int_pos(store, rng, cfg, ivars);
                let n = rng.gen_range(0..cfg.carrier) as i64;
                let v = store.numeral(n);
                let unit = store.mk(Symbol::SeqUnit, vec![v]).unwrap();
                store.mk(Symbol::SeqUpdate, vec![a, i, unit]).unwrap()
            }
            5 => {
                let a = seq_term(store, rng, cfg, vars, ivars, depth - 1);
                let off = int_pos(store, rng, cfg, ivars);
                let len = int_pos(store, rng, cfg, ivars);
                store.mk(Symbol::SeqExtract, vec![a, off, len]).unwrap()
            }
            _ => {
                let a = seq_term(store, rng, cfg, vars, ivars, depth - 1);
                let b = seq_term(store, rng, cfg, vars, ivars, depth - 1);
                store.mk(Symbol::SeqConcat, vec![a, b]).unwrap()
            }
        }
    }

    fn int_pos(
        store: &mut TermStore,
        rng: &mut ChaCha8Rng,
        cfg: &FuzzConfig,
        ivars: &[TermId],
    ) -> TermId {
        if rng.gen_bool(0.3) {
            ivars[rng.gen_range(0..ivars.len())]
        } else {
            let n = rng.gen_range(0..=cfg.int_hi.max(1));
            store.numeral(n)
        }
    }

    let mut assertions = Vec::new();
    // Positions stay small and non-negative, as Seq indices are 0-based.
    let zero = store.numeral(0);
    let hi = store.numeral(cfg.int_hi.max(1));
    for &v in &ivars {
        assertions.push(store.le(zero, v).unwrap());
        assertions.push(store.le(v, hi).unwrap());
    }
    for _ in 0..rng.gen_range(1..=6u32) {
        let atom = match rng.gen_range(0..3u32) {
            0 => {
                let a = seq_term(&mut store, &mut rng, cfg, &vars, &ivars, 2);
                let b = seq_term(&mut store, &mut rng, cfg, &vars, &ivars, 2);
                store.eq(a, b).unwrap()
            }
            1 => {
                let a = seq_term(&mut store, &mut rng, cfg, &vars, &ivars, 2);
                let l = store.mk(Symbol::SeqLen, vec![a]).unwrap();
                let n = int_pos(&mut store, &mut rng, cfg, &ivars);
                if rng.gen_bool(0.5) {
                    store.eq(l, n).unwrap()
                } else {
                    store.le(l, n).unwrap()
                }
            }
            _ => {
                let a = seq_term(&mut store, &mut rng, cfg, &vars, &ivars, 2);
                let i = int_pos(&mut store, &mut rng, cfg, &ivars);
                let nth = store.mk(Symbol::SeqNth, vec![a, i]).unwrap();
                let n = rng.gen_range(0..cfg.carrier) as i64;
                let v = store.numeral(n);
                store.eq(nth, v).unwrap()
            }
        };
        let atom = if rng.gen_bool(0.25) { store.not(atom).unwrap() } else { atom };
        assertions.push(atom);
    }
    Instance { store, assertions }
}

/// Render an instance as an SMT-LIB2 script (reproducer format).
pub fn instance_script(inst: &Instance) -> String {
    let mut vars = Vec::new();
    for &a in &inst.assertions {
        inst.store.free_vars(a, &mut vars);
    }
    vars.sort();
    vars.dedup();
    let mut out = String::from("(set-logic ALL)\n");
    for v in vars {
        if let Symbol::Var(name) = inst.store.head(v) {
            out.push_str(&format!("(declare-const {name} {})\n", inst.store.sort(v)));
        }
    }
    for &a in &inst.assertions {
        out.push_str(&format!("(assert {})\n", inst.store.display(a)));
    }
    out.push_str("(check-sat)\n");
    out
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Finding {
    pub index: u64,
    pub oracle: String,
    pub base: String,
    pub ext: String,
    /// Shrunk reproducer script.
    pub script: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct Report {
    pub checked: u64,
    pub sat: u64,
    pub unsat: u64,
    /// Instances where the oracle or a calculus ran out of budget; no
    /// verdict comparison is possible there.
    pub skipped: u64,
    pub findings: Vec<Finding>,
}

impl Report {
    /// Fold another shard's report into this one (findings kept in
    /// instance order).
    pub fn merge(&mut self, other: Report) {
        self.checked += other.checked;
        self.sat += other.sat;
        self.unsat += other.unsat;
        self.skipped += other.skipped;
        self.findings.extend(other.findings);
        self.findings.sort_by_key(|f| f.index);
    }
}

/// Run the three-way differential over `cfg.count` instances.
pub fn fuzz_round(cfg: &FuzzConfig, budget: &Budget) -> Report {
    fuzz_range(cfg, budget, 0..cfg.count as u64)
}

/// One shard of a round: instances `range` of the stream defined by `cfg`.
/// Shards over disjoint ranges merge into exactly the full round's report.
pub fn fuzz_range(cfg: &FuzzConfig, budget: &Budget, range: std::ops::Range<u64>) -> Report {
    let mut report = Report::default();
    for k in range {
        let inst = gen_instance(cfg, k);
        report.checked += 1;
        match triple(&inst, cfg, budget) {
            Some((oracle, base, ext)) if base != oracle || ext != oracle => {
                let shrunk = shrink(inst, cfg, budget);
                report.findings.push(Finding {
                    index: k,
                    oracle,
                    base,
                    ext,
                    script: instance_script(&shrunk),
                });
            }
            Some((oracle, _, _)) => {
                if oracle == "sat" {
                    report.sat += 1;
                } else {
                    report.unsat += 1;
                }
            }
            None => report.skipped += 1,
        }
    }
    report
}

/// (oracle, base, ext) verdicts; `None` when the oracle or a calculus blew
/// its budget — a truncated run has no verdict worth comparing.
fn triple(
    inst: &Instance,
    cfg: &FuzzConfig,
    budget: &Budget,
) -> Option<(String, String, String)> {
    let oracle = match enumerate_sat(&inst.store, &inst.assertions, &cfg.domain()) {
        Ok(v) => if v.is_sat() { "sat" } else { "unsat" }.to_string(),
        Err(_) => return None,
    };
    let mut verdicts = Vec::new();
    for calculus in [Calculus::Base, Calculus::Ext] {
        let mut store = inst.store.clone();
        let (v, _) = solve(&mut store, &inst.assertions, calculus, RuleConfig::default(), budget);
        if let Verdict::Unknown(reason) = &v {
            if budget_reason(reason) {
                return None;
            }
        }
        verdicts.push(v.word().to_string());
    }
    Some((oracle, verdicts[0].clone(), verdicts[1].clone()))
}

/// Unknown reasons that mean "ran out of resources" rather than a genuine
/// incompleteness of the calculus.
fn budget_reason(reason: &str) -> bool {
    reason.contains("budget") || reason == "timeout"
}

/// Verdict triple when the three deciders disagree, `None` when they agree.
fn disagreement(
    inst: &Instance,
    cfg: &FuzzConfig,
    budget: &Budget,
) -> Option<(String, String, String)> {
    match triple(inst, cfg, budget) {
        Some((o, b, e)) if b != o || e != o => Some((o, b, e)),
        _ => None,
    }
}

/// Greedily drop assertions while the disagreement persists.
fn shrink(mut inst: Instance, cfg: &FuzzConfig, budget: &Budget) -> Instance {
    loop {
        let mut reduced = false;
        for i in 0..inst.assertions.len() {
            let mut trial = Instance {
                store: inst.store.clone(),
                assertions: inst.assertions.clone(),
            };
            trial.assertions.remove(i);
            if disagreement(&trial, cfg, budget).is_some() {
                inst = trial;
                reduced = true;
                break;
            }
        }
        if !reduced {
            return inst;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_script;

    #[test]
    fn generation_is_deterministic() {
        let cfg = FuzzConfig::default();
        let a = instance_script(&gen_instance(&cfg, 7));
        let b = instance_script(&gen_instance(&cfg, 7));
        assert_eq!(a, b);
        let c = instance_script(&gen_instance(&FuzzConfig { seed: 1, ..cfg }, 7));
        assert_ne!(a, c);
    }

    #[test]
    fn scripts_reparse() {
        let cfg = FuzzConfig::default();
        for k in 0..20 {
            let text = instance_script(&gen_instance(&cfg, k));
            let mut store = TermStore::new();
            let script = parse_script(&text, &mut store).unwrap();
            assert!(!script.assertions().is_empty());
        }
    }

    #[test]
    fn seq_scripts_reparse() {
        let cfg = FuzzConfig::default();
        for k in 0..20 {
            let text = instance_script(&gen_seq_instance(&cfg, k));
            let mut store = TermStore::new();
            parse_script(&text, &mut store).unwrap();
        }
    }

    #[test]
    fn small_round_agrees() {
        let cfg = FuzzConfig { count: 25, max_depth: 2, max_assertions: 5, ..Default::default() };
        let report = fuzz_round(&cfg, &Budget::default());
        assert_eq!(report.findings, vec![], "differential findings");
        assert_eq!(report.checked, 25);
        assert!(report.sat + report.unsat > 0);
    }

    #[test]
    fn round_is_reproducible() {
        let cfg = FuzzConfig { count: 10, max_depth: 2, max_assertions: 4, ..Default::default() };
        let a = fuzz_round(&cfg, &Budget::default());
        let b = fuzz_round(&cfg, &Budget::default());
        assert_eq!(a, b);
    }
}
