//! Normal forms, simplification rewrites and lemma generation for the
//! NS-BASE and NS-EXT calculi.
//!
//! Each derivation rule turns a matched premise into a [`Lemma`]: an
//! ordered disjunction of branches, each branch a conjunction of boolean
//! terms. Branch order follows the order the alternatives are written in
//! the calculus, and the search engine tries them in that order.

use std::collections::BTreeSet;

use num_bigint::BigInt;

use crate::euf::Euf;
use crate::lia::LiaSolver;
use crate::term::{Sort, Symbol, TermId, TermStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub enum RuleId {
    ConstBounds,
    RelocBounds,
    NSSlice,
    NSConcat,
    NSUpdate,
    NSSplit,
    NSCompReloc,
    RGet,
    RSet,
    GetConcat,
    SetConcat,
    SetConcatInv,
    GetConst,
    GetIntro,
    GetSet,
    SetBound,
    GetReloc,
    /// Artifact-added: extensionality case split for sequence disequalities.
    DiseqExt,
    /// Artifact-added: equal constant sequences share bounds and value.
    ConstMerge,
    /// Artifact-added: fragments of a constant's normal form are constant.
    ConstDecomp,
    /// Artifact-added: relocation-class members of a constant are constant.
    ConstReloc,
    Rewrite1,
    Rewrite2,
    Rewrite3,
    Rewrite4,
    /// Search-internal case split (input disjunctions, integer grounding).
    Split,
}

impl RuleId {
    pub fn name(self) -> &'static str {
        match self {
            RuleId::ConstBounds => "Const-Bounds",
            RuleId::RelocBounds => "Reloc-Bounds",
            RuleId::NSSlice => "NS-Slice",
            RuleId::NSConcat => "NS-Concat",
            RuleId::NSUpdate => "NS-Update",
            RuleId::NSSplit => "NS-Split",
            RuleId::NSCompReloc => "NS-Comp-Reloc",
            RuleId::RGet => "R-Get",
            RuleId::RSet => "R-Set",
            RuleId::GetConcat => "Get-Concat",
            RuleId::SetConcat => "Set-Concat",
            RuleId::SetConcatInv => "Set-Concat-Inv",
            RuleId::GetConst => "Get-Const",
            RuleId::GetIntro => "Get-Intro",
            RuleId::GetSet => "Get-Set",
            RuleId::SetBound => "Set-Bound",
            RuleId::GetReloc => "Get-Reloc",
            RuleId::DiseqExt => "Diseq-Ext",
            RuleId::ConstMerge => "Const-Merge",
            RuleId::ConstDecomp => "Const-Decomp",
            RuleId::ConstReloc => "Const-Reloc",
            RuleId::Rewrite1 => "Rewrite-1",
            RuleId::Rewrite2 => "Rewrite-2",
            RuleId::Rewrite3 => "Rewrite-3",
            RuleId::Rewrite4 => "Rewrite-4",
            RuleId::Split => "Split",
        }
    }
}

/// A disjunction of conjunctive branches, tried in order.
#[derive(Debug, Clone)]
pub struct Lemma {
    pub source: RuleId,
    pub branches: Vec<Vec<TermId>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Calculus {
    Base,
    Ext,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RuleConfig {
    /// Use the rule shapes exactly as printed, including the weaker
    /// Set-Concat frames and the printed Get-Set / Get-Reloc indices.
    pub strict: bool,
}

/// An owner term together with its `::`-joined fragments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    pub owner: TermId,
    pub fragments: Vec<TermId>,
}

#[derive(Debug, Clone)]
pub struct Rules {
    pub calculus: Calculus,
    pub config: RuleConfig,
    nfs: Vec<NormalForm>,
    active: BTreeSet<TermId>,
    guards: BTreeSet<(RuleId, Vec<TermId>)>,
    /// NSeq disequalities awaiting the extensionality split.
    diseqs: Vec<(TermId, TermId)>,
}

impl Rules {
    pub fn new(calculus: Calculus, config: RuleConfig) -> Rules {
        Rules {
            calculus,
            config,
            nfs: Vec::new(),
            active: BTreeSet::new(),
            guards: BTreeSet::new(),
            diseqs: Vec::new(),
        }
    }

    /// Make `t` and its subterms visible to premise matching.
    pub fn activate(&mut self, store: &TermStore, t: TermId) {
        for s in store.subterms(t) {
            self.active.insert(s);
        }
    }

    pub fn register_nf(&mut self, owner: TermId, fragments: Vec<TermId>) {
        let nf = NormalForm { owner, fragments };
        if !self.nfs.contains(&nf) {
            self.nfs.push(nf);
        }
    }

    pub fn register_diseq(&mut self, a: TermId, b: TermId) {
        if !self.diseqs.contains(&(a, b)) {
            self.diseqs.push((a, b));
        }
    }

    pub fn normal_forms(&self) -> &[NormalForm] {
        &self.nfs
    }

    /// True the first time this (rule, arguments) premise is seen on the
    /// current search branch.
    fn guard(&mut self, rule: RuleId, args: Vec<TermId>) -> bool {
        self.guards.insert((rule, args))
    }

    /// Emit all lemmas whose premises newly match the current state.
    pub fn derive(
        &mut self,
        store: &mut TermStore,
        euf: &Euf,
        lia: &mut LiaSolver,
    ) -> Vec<Lemma> {
        let mut out = Vec::new();
        self.rewrites(store, euf, lia, &mut out);
        self.derive_common(store, euf, lia, &mut out);
        match self.calculus {
            Calculus::Base => self.derive_base(store, &mut out),
            Calculus::Ext => self.derive_ext(store, euf, lia, &mut out),
        }
        self.derive_artifact(store, euf, &mut out);
        out
    }

    // ---------------------------------------------------------------
    // Assumption 1 rewrites
    // ---------------------------------------------------------------

    fn rewrites(
        &mut self,
        store: &mut TermStore,
        euf: &Euf,
        lia: &mut LiaSolver,
        out: &mut Vec<Lemma>,
    ) {
        let nfs = self.nfs.clone();
        // (1)/(2): drop fragments entailed to be empty.
        for nf in &nfs {
            for (j, &w) in nf.fragments.iter().enumerate() {
                if !known_empty(store, lia, w) {
                    continue;
                }
                let rule = if j == 0 { RuleId::Rewrite2 } else { RuleId::Rewrite1 };
                if !self.guard(rule, vec![nf.owner, w, TermId(j as u32)]) {
                    continue;
                }
                let rest: Vec<TermId> = nf
                    .fragments
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, &f)| f)
                    .collect();
                if rest.is_empty() {
                    continue;
                }
                // keep only the simplified form
                self.nfs.retain(|x| x != nf);
                out.push(Lemma {
                    source: rule,
                    branches: vec![vec![nf_equation(store, nf.owner, &rest)]],
                });
                break;
            }
        }
        // (3)/(4): inline a fragment's own normal form.
        for nf in &nfs {
            'outer: for (j, &w) in nf.fragments.iter().enumerate() {
                for inner in &nfs {
                    if inner.owner == nf.owner && inner.fragments == nf.fragments {
                        continue;
                    }
                    if !euf.are_equal(inner.owner, w) {
                        continue;
                    }
                    // self-referential forms cannot be inlined
                    if inner.fragments.iter().any(|&f| euf.are_equal(f, w)) {
                        continue;
                    }
                    let rule = if j == 0 { RuleId::Rewrite4 } else { RuleId::Rewrite3 };
                    let mut key = vec![nf.owner, w, TermId(j as u32)];
                    key.extend(&inner.fragments);
                    if !self.guard(rule, key) {
                        continue;
                    }
                    let mut frags = Vec::new();
                    frags.extend(&nf.fragments[..j]);
                    frags.extend(&inner.fragments);
                    frags.extend(&nf.fragments[j + 1..]);
                    // keep only the inlined form
                    self.nfs.retain(|x| x != nf);
                    out.push(Lemma {
                        source: rule,
                        branches: vec![vec![nf_equation(store, nf.owner, &frags)]],
                    });
                    break 'outer;
                }
            }
        }
    }

    // ---------------------------------------------------------------
    // Fig. 2: common rules
    // ---------------------------------------------------------------

    fn derive_common(
        &mut self,
        store: &mut TermStore,
        euf: &Euf,
        lia: &mut LiaSolver,
        out: &mut Vec<Lemma>,
    ) {
        let _ = lia;
        let active: Vec<TermId> = self.active.iter().copied().collect();
        for t in active {
            match store.head(t).clone() {
                Symbol::NseqConst => {
                    if self.guard(RuleId::ConstBounds, vec![t]) {
                        out.push(const_bounds(store, t));
                    }
                }
                Symbol::NseqRelocate => {
                    if self.guard(RuleId::RelocBounds, vec![t]) {
                        out.push(reloc_bounds(store, t));
                    }
                }
                Symbol::NseqSlice => {
                    if self.guard(RuleId::NSSlice, vec![t]) {
                        out.push(ns_slice(store, t));
                    }
                }
                Symbol::NseqConcat => {
                    if self.guard(RuleId::NSConcat, vec![t]) {
                        out.push(ns_concat(store, t));
                    }
                }
                Symbol::NseqUpdate => {
                    if self.guard(RuleId::NSUpdate, vec![t]) {
                        out.push(ns_update(store, t));
                    }
                }
                _ => {}
            }
        }
        self.ns_split(store, euf, out);
        self.ns_comp_reloc(store, euf, out);
    }

    fn ns_split(&mut self, store: &mut TermStore, euf: &Euf, out: &mut Vec<Lemma>) {
        let nfs = self.nfs.clone();
        for (a, nf1) in nfs.iter().enumerate() {
            for nf2 in nfs.iter().skip(a + 1) {
                if !euf.are_equal(nf1.owner, nf2.owner) {
                    continue;
                }
                // longest shared prefix modulo the closure
                let mut p = 0;
                while p < nf1.fragments.len()
                    && p < nf2.fragments.len()
                    && euf.are_equal(nf1.fragments[p], nf2.fragments[p])
                {
                    p += 1;
                }
                let (Some(&y1), Some(&y2)) = (nf1.fragments.get(p), nf2.fragments.get(p))
                else {
                    continue;
                };
                if euf.are_equal(y1, y2) {
                    continue;
                }
                let (lo, hi) = if y1 < y2 { (y1, y2) } else { (y2, y1) };
                if !self.guard(RuleId::NSSplit, vec![lo, hi]) {
                    continue;
                }
                out.push(ns_split_lemma(store, y1, y2));
            }
        }
    }

    fn ns_comp_reloc(&mut self, store: &mut TermStore, euf: &Euf, out: &mut Vec<Lemma>) {
        let nfs = self.nfs.clone();
        for nf in &nfs {
            // normal forms produced by this rule are relocation copies; the
            // original reaches every class member directly, so copies need
            // not propagate again
            if nf
                .fragments
                .iter()
                .all(|&w| *store.head(w) == Symbol::NseqRelocate)
            {
                continue;
            }
            for (s2, offset) in euf.reloc_class(nf.owner) {
                let _ = offset;
                if euf.are_equal(s2, nf.owner) {
                    continue;
                }
                // relocate terms are reached through their base term
                if *store.head(s2) == Symbol::NseqRelocate {
                    continue;
                }
                let mut key = vec![nf.owner, s2];
                key.extend(&nf.fragments);
                if !self.guard(RuleId::NSCompReloc, key) {
                    continue;
                }
                out.push(ns_comp_reloc_lemma(store, nf, s2));
            }
        }
    }

    // ---------------------------------------------------------------
    // Fig. 3: base rules
    // ---------------------------------------------------------------

    fn derive_base(&mut self, store: &mut TermStore, out: &mut Vec<Lemma>) {
        let active: Vec<TermId> = self.active.iter().copied().collect();
        for t in active {
            match store.head(t).clone() {
                Symbol::NseqGet => {
                    if const_elem_sort(store, t).is_some()
                        && self.guard(RuleId::RGet, vec![t])
                    {
                        out.push(r_get(store, t));
                    }
                }
                Symbol::NseqSet => {
                    if self.guard(RuleId::RSet, vec![t]) {
                        out.push(r_set(store, t));
                    }
                }
                _ => {}
            }
        }
    }

    // ---------------------------------------------------------------
    // Fig. 4: extended rules
    // ---------------------------------------------------------------

    fn derive_ext(
        &mut self,
        store: &mut TermStore,
        euf: &Euf,
        lia: &mut LiaSolver,
        out: &mut Vec<Lemma>,
    ) {
        let _ = lia;
        let active: Vec<TermId> = self.active.iter().copied().collect();
        let nfs = self.nfs.clone();
        for &g in &active {
            if *store.head(g) != Symbol::NseqGet {
                continue;
            }
            let s = store.args(g)[0];
            // Get-Concat over every normal form of s's class
            for nf in &nfs {
                if !euf.are_equal(nf.owner, s) {
                    continue;
                }
                let mut key = vec![g];
                key.extend(&nf.fragments);
                if self.guard(RuleId::GetConcat, key) {
                    out.push(get_concat(store, g, nf));
                }
            }
            // Get-Const against constant class members
            for c in euf.class_members(s) {
                if *store.head(c) == Symbol::NseqConst
                    && self.guard(RuleId::GetConst, vec![g, c])
                {
                    out.push(get_const(store, g, c));
                }
            }
            // Get-Set against set operations producing s
            for m in euf.class_members(s) {
                if *store.head(m) == Symbol::NseqSet
                    && self.guard(RuleId::GetSet, vec![g, m])
                {
                    out.push(get_set(store, g, m, self.config.strict));
                }
            }
            // Get-Reloc: route reads to a canonical class member so derived
            // reads do not bounce between members forever
            let class = euf.reloc_class(s);
            if let Some(hub) = class.iter().map(|&(m, _)| m).min() {
                if hub < s
                    && !euf.are_equal(hub, s)
                    && self.guard(RuleId::GetReloc, vec![g, hub])
                {
                    out.push(get_reloc(store, g, hub, self.config.strict));
                }
            }
        }
        for &t in &active {
            if *store.head(t) != Symbol::NseqSet {
                continue;
            }
            if self.guard(RuleId::GetIntro, vec![t]) {
                out.push(get_intro(store, t));
            }
            if self.guard(RuleId::SetBound, vec![t]) {
                out.push(set_bound(store, t));
            }
            let s2 = store.args(t)[0];
            for nf in &nfs {
                if euf.are_equal(nf.owner, s2) {
                    let mut key = vec![t];
                    key.extend(&nf.fragments);
                    if self.guard(RuleId::SetConcat, key) {
                        out.push(set_concat(store, t, nf, false, self.config.strict));
                    }
                }
                if euf.are_equal(nf.owner, t) {
                    let mut key = vec![t, t];
                    key.extend(&nf.fragments);
                    if self.guard(RuleId::SetConcatInv, key) {
                        out.push(set_concat(store, t, nf, true, self.config.strict));
                    }
                }
            }
        }
    }

    // ---------------------------------------------------------------
    // Artifact-added rules
    // ---------------------------------------------------------------

    fn derive_artifact(&mut self, store: &mut TermStore, euf: &Euf, out: &mut Vec<Lemma>) {
        let diseqs = self.diseqs.clone();
        for (a, b) in diseqs {
            if self.guard(RuleId::DiseqExt, vec![a, b]) {
                out.push(diseq_ext(store, a, b));
            }
        }
        // Const-Merge: two constant applications in one class.
        let consts: Vec<TermId> = self
            .active
            .iter()
            .copied()
            .filter(|&t| *store.head(t) == Symbol::NseqConst)
            .collect();
        for (i, &c1) in consts.iter().enumerate() {
            for &c2 in consts.iter().skip(i + 1) {
                if !euf.are_equal(c1, c2) {
                    continue;
                }
                // nothing to learn once bounds and value already coincide
                let (a1, a2) = (store.args(c1).to_vec(), store.args(c2).to_vec());
                if a1.iter().zip(&a2).all(|(&x, &y)| euf.are_equal(x, y)) {
                    continue;
                }
                if self.guard(RuleId::ConstMerge, vec![c1, c2]) {
                    out.push(const_merge(store, c1, c2));
                }
            }
        }
        // Const-Decomp: a constant's normal form fragments are constant.
        let nfs = self.nfs.clone();
        for nf in &nfs {
            for c in euf.class_members(nf.owner) {
                if *store.head(c) != Symbol::NseqConst {
                    continue;
                }
                let mut key = vec![c];
                key.extend(&nf.fragments);
                if self.guard(RuleId::ConstDecomp, key) {
                    out.push(const_decomp(store, c, nf));
                }
            }
        }
        // Const-Reloc: relocation-class members of a constant are constant.
        for &c in &consts {
            for (s, _off) in euf.reloc_class(c) {
                if euf.are_equal(s, c) {
                    continue;
                }
                // skip members whose class already holds a constant of the
                // same value; a different value must still surface the clash
                let v = store.args(c)[2];
                if euf.class_members(s).iter().any(|&m| {
                    *store.head(m) == Symbol::NseqConst
                        && euf.are_equal(store.args(m)[2], v)
                }) {
                    continue;
                }
                if self.guard(RuleId::ConstReloc, vec![c, s]) {
                    out.push(const_reloc(store, c, s));
                }
            }
        }
    }
}

// -------------------------------------------------------------------
// Term building helpers
// -------------------------------------------------------------------

fn bounds(store: &mut TermStore, s: TermId) -> (TermId, TermId) {
    store.bounds_terms(s).expect("NSeq-sorted term")
}

/// `i < fst_s \/ lst_s < i` as a single disjunction.
fn out_of_bounds(store: &mut TermStore, s: TermId, i: TermId) -> TermId {
    let (fst, lst) = bounds(store, s);
    let a = store.lt(i, fst).unwrap();
    let b = store.lt(lst, i).unwrap();
    store.or(vec![a, b]).unwrap()
}

/// `fst_s <= i` and `i <= lst_s` as two conjuncts.
fn in_bounds(store: &mut TermStore, s: TermId, i: TermId) -> Vec<TermId> {
    let (fst, lst) = bounds(store, s);
    vec![store.le(fst, i).unwrap(), store.le(i, lst).unwrap()]
}

/// `owner = w_1 :: ... :: w_n` (or a plain equation for a single fragment).
pub fn nf_equation(store: &mut TermStore, owner: TermId, frags: &[TermId]) -> TermId {
    assert!(!frags.is_empty());
    let rhs = if frags.len() == 1 {
        frags[0]
    } else {
        store.mk(Symbol::NormConcat, frags.to_vec()).unwrap()
    };
    store.eq(owner, rhs).unwrap()
}

fn diseq(store: &mut TermStore, a: TermId, b: TermId) -> TermId {
    let e = store.eq(a, b).unwrap();
    store.not(e).unwrap()
}

fn known_empty(store: &mut TermStore, lia: &mut LiaSolver, s: TermId) -> bool {
    // lst < fst by cheap bound reasoning only; full entailment is too
    // expensive to run on every fragment at every search node
    let (fst, lst) = bounds(store, s);
    if let Some(d) = lia.query_fixed_diff(lst, fst) {
        return d < BigInt::from(0);
    }
    match (lia.bounds_of(lst).1, lia.bounds_of(fst).0) {
        (Some(u), Some(l)) => u < l,
        _ => false,
    }
}

fn const_elem_sort(store: &TermStore, get: TermId) -> Option<Sort> {
    // nseq.const cannot hold Bool elements; R-Get skips those reads.
    let sort = store.sort(get);
    (sort != &Sort::Bool).then(|| sort.clone())
}

fn fresh_like(store: &mut TermStore, s: TermId) -> TermId {
    let sort = store.sort(s).clone();
    store.fresh_var("k", sort)
}

// -------------------------------------------------------------------
// Fig. 2 lemma builders
// -------------------------------------------------------------------

fn const_bounds(store: &mut TermStore, c: TermId) -> Lemma {
    let (f, l) = (store.args(c)[0], store.args(c)[1]);
    let (fst, lst) = bounds(store, c);
    let e1 = store.eq(fst, f).unwrap();
    let e2 = store.eq(lst, l).unwrap();
    Lemma { source: RuleId::ConstBounds, branches: vec![vec![e1, e2]] }
}

fn reloc_bounds(store: &mut TermStore, s1: TermId) -> Lemma {
    let (s2, i) = (store.args(s1)[0], store.args(s1)[1]);
    let (fst2, lst2) = bounds(store, s2);
    let (fst1, lst1) = bounds(store, s1);
    // i = fst_{s2} /\ s1 = s2
    let b1 = vec![store.eq(i, fst2).unwrap(), store.eq(s1, s2).unwrap()];
    // i /= fst_{s2} /\ fst_{s1} = i /\ lst_{s1} = i + lst_{s2} - fst_{s2} /\ s1 =_reloc s2
    let sum = store.add(i, lst2).unwrap();
    let shifted = store.sub(sum, fst2).unwrap();
    let b2 = vec![
        diseq(store, i, fst2),
        store.eq(fst1, i).unwrap(),
        store.eq(lst1, shifted).unwrap(),
        store.mk(Symbol::RelocEq, vec![s1, s2]).unwrap(),
    ];
    Lemma { source: RuleId::RelocBounds, branches: vec![b1, b2] }
}

fn ns_slice(store: &mut TermStore, s1: TermId) -> Lemma {
    let (s, f, l) = (store.args(s1)[0], store.args(s1)[1], store.args(s1)[2]);
    let (fst, lst) = bounds(store, s);
    // (f < fst_s \/ l < f \/ lst_s < l) /\ s1 = s
    let c1 = store.lt(f, fst).unwrap();
    let c2 = store.lt(l, f).unwrap();
    let c3 = store.lt(lst, l).unwrap();
    let b1 = vec![store.or(vec![c1, c2, c3]).unwrap(), store.eq(s1, s).unwrap()];
    // fst_s <= f <= l <= lst_s /\ s = k1 :: s1 :: k2  (slice bounds pinned)
    let k1 = fresh_like(store, s);
    let k2 = fresh_like(store, s);
    let (fst1, lst1) = bounds(store, s1);
    let b2 = vec![
        store.le(fst, f).unwrap(),
        store.le(f, l).unwrap(),
        store.le(l, lst).unwrap(),
        store.eq(fst1, f).unwrap(),
        store.eq(lst1, l).unwrap(),
        nf_equation(store, s, &[k1, s1, k2]),
    ];
    Lemma { source: RuleId::NSSlice, branches: vec![b1, b2] }
}

fn ns_concat(store: &mut TermStore, s: TermId) -> Lemma {
    let (s1, s2) = (store.args(s)[0], store.args(s)[1]);
    let (fst1, lst1) = bounds(store, s1);
    let (fst2, lst2) = bounds(store, s2);
    let one = store.numeral(1);
    let succ1 = store.add(lst1, one).unwrap();
    // lst_{s1} < fst_{s1} /\ s = s2
    let b1 = vec![store.lt(lst1, fst1).unwrap(), store.eq(s, s2).unwrap()];
    // (lst_{s2} < fst_{s2} \/ lst_{s1}+1 /= fst_{s2}) /\ s = s1
    let e1 = store.lt(lst2, fst2).unwrap();
    let e2 = diseq(store, succ1, fst2);
    let b2 = vec![store.or(vec![e1, e2]).unwrap(), store.eq(s, s1).unwrap()];
    // both nonempty, adjacent, s = s1 :: s2
    let b3 = vec![
        store.le(fst1, lst1).unwrap(),
        store.le(fst2, lst2).unwrap(),
        store.eq(fst2, succ1).unwrap(),
        nf_equation(store, s, &[s1, s2]),
    ];
    Lemma { source: RuleId::NSConcat, branches: vec![b1, b2, b3] }
}

fn ns_update(store: &mut TermStore, s1: TermId) -> Lemma {
    let (s2, s) = (store.args(s1)[0], store.args(s1)[1]);
    let (fst_s, lst_s) = bounds(store, s);
    let (fst2, lst2) = bounds(store, s2);
    // (lst_s < fst_s \/ fst_s < fst_{s2} \/ lst_{s2} < lst_s) /\ s1 = s2
    let c1 = store.lt(lst_s, fst_s).unwrap();
    let c2 = store.lt(fst_s, fst2).unwrap();
    let c3 = store.lt(lst2, lst_s).unwrap();
    let b1 = vec![store.or(vec![c1, c2, c3]).unwrap(), store.eq(s1, s2).unwrap()];
    // in range: s1 = k1 :: s :: k3 /\ s2 = k1 :: k2 :: k3
    let k1 = fresh_like(store, s2);
    let k2 = fresh_like(store, s2);
    let k3 = fresh_like(store, s2);
    let b2 = vec![
        store.le(fst2, fst_s).unwrap(),
        store.le(fst_s, lst_s).unwrap(),
        store.le(lst_s, lst2).unwrap(),
        nf_equation(store, s1, &[k1, s, k3]),
        nf_equation(store, s2, &[k1, k2, k3]),
    ];
    Lemma { source: RuleId::NSUpdate, branches: vec![b1, b2] }
}

fn ns_split_lemma(store: &mut TermStore, y1: TermId, y2: TermId) -> Lemma {
    let (_, lst_y1) = bounds(store, y1);
    let (_, lst_y2) = bounds(store, y2);
    let one = store.numeral(1);
    let k = fresh_like(store, y1);
    let (fst_k, lst_k) = bounds(store, k);
    // lst_{y1} = lst_{y2} /\ y1 = y2
    let b1 = vec![store.eq(lst_y1, lst_y2).unwrap(), store.eq(y1, y2).unwrap()];
    // lst_{y1} > lst_{y2} /\ y1 = y2 :: k /\ fst_k = lst_{y2}+1 /\ lst_k = lst_{y1}
    let succ2 = store.add(lst_y2, one).unwrap();
    let b2 = vec![
        store.lt(lst_y2, lst_y1).unwrap(),
        nf_equation(store, y1, &[y2, k]),
        store.eq(fst_k, succ2).unwrap(),
        store.eq(lst_k, lst_y1).unwrap(),
    ];
    // lst_{y1} < lst_{y2} /\ y2 = y1 :: k /\ fst_k = lst_{y1}+1 /\ lst_k = lst_{y2}
    let succ1 = store.add(lst_y1, one).unwrap();
    let b3 = vec![
        store.lt(lst_y1, lst_y2).unwrap(),
        nf_equation(store, y2, &[y1, k]),
        store.eq(fst_k, succ1).unwrap(),
        store.eq(lst_k, lst_y2).unwrap(),
    ];
    Lemma { source: RuleId::NSSplit, branches: vec![b1, b2, b3] }
}

fn ns_comp_reloc_lemma(store: &mut TermStore, nf: &NormalForm, s2: TermId) -> Lemma {
    let s1 = nf.owner;
    let (fst1, _) = bounds(store, s1);
    let (fst2, _) = bounds(store, s2);
    // fst_{s1} = fst_{s2} /\ s1 = s2
    let b1 = vec![store.eq(fst1, fst2).unwrap(), store.eq(s1, s2).unwrap()];
    // s2 = relocate(k_1, fst_{s2}) :: relocate(k_j, fst_{k_j} - fst_{s1} + fst_{s2}) :: ...
    let mut relocated = Vec::new();
    for (j, &k) in nf.fragments.iter().enumerate() {
        let target = if j == 0 {
            fst2
        } else {
            let (fst_k, _) = bounds(store, k);
            let d = store.sub(fst_k, fst1).unwrap();
            store.add(d, fst2).unwrap()
        };
        relocated.push(store.mk(Symbol::NseqRelocate, vec![k, target]).unwrap());
    }
    let b2 = vec![nf_equation(store, s2, &relocated)];
    Lemma { source: RuleId::NSCompReloc, branches: vec![b1, b2] }
}

// -------------------------------------------------------------------
// Fig. 3 lemma builders
// -------------------------------------------------------------------

fn r_get(store: &mut TermStore, g: TermId) -> Lemma {
    let (s, i) = (store.args(g)[0], store.args(g)[1]);
    let b1 = vec![out_of_bounds(store, s, i)];
    let k1 = fresh_like(store, s);
    let k2 = fresh_like(store, s);
    let c = store.mk(Symbol::NseqConst, vec![i, i, g]).unwrap();
    let mut b2 = in_bounds(store, s, i);
    b2.push(nf_equation(store, s, &[k1, c, k2]));
    Lemma { source: RuleId::RGet, branches: vec![b1, b2] }
}

fn r_set(store: &mut TermStore, s1: TermId) -> Lemma {
    let (s2, i, v) = (store.args(s1)[0], store.args(s1)[1], store.args(s1)[2]);
    let b1 = vec![out_of_bounds(store, s2, i), store.eq(s1, s2).unwrap()];
    let (fst1, lst1) = bounds(store, s1);
    let (fst2, lst2) = bounds(store, s2);
    let k1 = fresh_like(store, s2);
    let k2 = fresh_like(store, s2);
    let k3 = fresh_like(store, s2);
    let c = store.mk(Symbol::NseqConst, vec![i, i, v]).unwrap();
    let mut b2 = in_bounds(store, s2, i);
    b2.push(store.eq(fst1, fst2).unwrap());
    b2.push(store.eq(lst1, lst2).unwrap());
    b2.push(nf_equation(store, s1, &[k1, c, k3]));
    b2.push(nf_equation(store, s2, &[k1, k2, k3]));
    Lemma { source: RuleId::RSet, branches: vec![b1, b2] }
}

// -------------------------------------------------------------------
// Fig. 4 lemma builders
// -------------------------------------------------------------------

fn get_concat(store: &mut TermStore, g: TermId, nf: &NormalForm) -> Lemma {
    let (s, i) = (store.args(g)[0], store.args(g)[1]);
    let mut branches = vec![vec![out_of_bounds(store, s, i)]];
    for &w in &nf.fragments {
        let mut b = in_bounds(store, w, i);
        let gw = store.mk(Symbol::NseqGet, vec![w, i]).unwrap();
        b.push(store.eq(gw, g).unwrap());
        branches.push(b);
    }
    Lemma { source: RuleId::GetConcat, branches }
}

fn set_concat(
    store: &mut TermStore,
    s1: TermId,
    nf: &NormalForm,
    inverse: bool,
    strict: bool,
) -> Lemma {
    let (s2, i, v) = (store.args(s1)[0], store.args(s1)[1], store.args(s1)[2]);
    let n = nf.fragments.len();
    let mut branches = vec![vec![out_of_bounds(store, s2, i)]];
    for m in 0..n {
        let ks: Vec<TermId> = nf.fragments.iter().map(|&w| fresh_like(store, w)).collect();
        let w_m = nf.fragments[m];
        let mut b = Vec::new();
        // the `set` happens inside fragment m
        if inverse {
            // s1's fragments are known; solve for s2's: w_m = set(k_m, i, v)
            b.push(nf_equation(store, s2, &ks));
            b.extend(in_bounds(store, w_m, i));
            let set_t = store.mk(Symbol::NseqSet, vec![ks[m], i, v]).unwrap();
            b.push(store.eq(w_m, set_t).unwrap());
        } else {
            b.push(nf_equation(store, s1, &ks));
            b.extend(in_bounds(store, w_m, i));
            let set_t = store.mk(Symbol::NseqSet, vec![w_m, i, v]).unwrap();
            b.push(store.eq(ks[m], set_t).unwrap());
        }
        for (j, (&k, &w)) in ks.iter().zip(&nf.fragments).enumerate() {
            let (fst_k, lst_k) = bounds(store, k);
            let (fst_w, lst_w) = bounds(store, w);
            b.push(store.eq(fst_k, fst_w).unwrap());
            b.push(store.eq(lst_k, lst_w).unwrap());
            if j != m && !strict {
                // untouched fragments are unchanged (see design notes)
                b.push(store.eq(k, w).unwrap());
            }
        }
        branches.push(b);
    }
    let source = if inverse { RuleId::SetConcatInv } else { RuleId::SetConcat };
    Lemma { source, branches }
}

fn get_const(store: &mut TermStore, g: TermId, c: TermId) -> Lemma {
    let (s, i) = (store.args(g)[0], store.args(g)[1]);
    let v = store.args(c)[2];
    let b1 = vec![out_of_bounds(store, s, i)];
    let mut b2 = in_bounds(store, s, i);
    b2.push(store.eq(g, v).unwrap());
    Lemma { source: RuleId::GetConst, branches: vec![b1, b2] }
}

fn get_intro(store: &mut TermStore, s1: TermId) -> Lemma {
    let (_, i, v) = (store.args(s1)[0], store.args(s1)[1], store.args(s1)[2]);
    let b1 = vec![out_of_bounds(store, s1, i)];
    let mut b2 = in_bounds(store, s1, i);
    let g = store.mk(Symbol::NseqGet, vec![s1, i]).unwrap();
    b2.push(store.eq(v, g).unwrap());
    Lemma { source: RuleId::GetIntro, branches: vec![b1, b2] }
}

fn get_set(store: &mut TermStore, g: TermId, set_t: TermId, strict: bool) -> Lemma {
    let j = store.args(g)[1];
    let (s2, i, v) = (store.args(set_t)[0], store.args(set_t)[1], store.args(set_t)[2]);
    let s1 = set_t;
    if strict {
        // exactly as printed: bounds on i, inner read at i
        let b1 = vec![out_of_bounds(store, s1, i)];
        let mut b2 = vec![store.eq(i, j).unwrap()];
        b2.extend(in_bounds(store, s1, i));
        b2.push(store.eq(g, v).unwrap());
        let mut b3 = vec![diseq(store, i, j)];
        b3.extend(in_bounds(store, s1, i));
        let inner = store.mk(Symbol::NseqGet, vec![s2, i]).unwrap();
        b3.push(store.eq(g, inner).unwrap());
        return Lemma { source: RuleId::GetSet, branches: vec![b1, b2, b3] };
    }
    // definition-consistent form: the case split is on the read index j
    let b1 = vec![out_of_bounds(store, s1, j)];
    let mut b2 = vec![store.eq(i, j).unwrap()];
    b2.extend(in_bounds(store, s1, j));
    b2.push(store.eq(g, v).unwrap());
    let mut b3 = vec![diseq(store, i, j)];
    b3.extend(in_bounds(store, s1, j));
    let inner = store.mk(Symbol::NseqGet, vec![s2, j]).unwrap();
    b3.push(store.eq(g, inner).unwrap());
    Lemma { source: RuleId::GetSet, branches: vec![b1, b2, b3] }
}

fn set_bound(store: &mut TermStore, s1: TermId) -> Lemma {
    let (s2, i, v) = (store.args(s1)[0], store.args(s1)[1], store.args(s1)[2]);
    let b1 = vec![store.eq(s1, s2).unwrap()];
    let mut b2 = in_bounds(store, s1, i);
    let inner = store.mk(Symbol::NseqGet, vec![s2, i]).unwrap();
    b2.push(diseq(store, inner, v));
    Lemma { source: RuleId::SetBound, branches: vec![b1, b2] }
}

fn get_reloc(store: &mut TermStore, g: TermId, s2: TermId, strict: bool) -> Lemma {
    let (s1, i) = (store.args(g)[0], store.args(g)[1]);
    let (fst1, _) = bounds(store, s1);
    let (fst2, _) = bounds(store, s2);
    let b1 = vec![out_of_bounds(store, s1, i)];
    let mut b2 = in_bounds(store, s1, i);
    let d = store.sub(i, fst1).unwrap();
    let idx = if strict {
        // as printed: i - fst_{s1} - fst_{s2}
        store.sub(d, fst2).unwrap()
    } else {
        // per the =_reloc definition: i - fst_{s1} + fst_{s2}
        store.add(d, fst2).unwrap()
    };
    let inner = store.mk(Symbol::NseqGet, vec![s2, idx]).unwrap();
    b2.push(store.eq(g, inner).unwrap());
    Lemma { source: RuleId::GetReloc, branches: vec![b1, b2] }
}

// -------------------------------------------------------------------
// Artifact-added lemma builders
// -------------------------------------------------------------------

fn diseq_ext(store: &mut TermStore, a: TermId, b: TermId) -> Lemma {
    let (fst_a, lst_a) = bounds(store, a);
    let (fst_b, lst_b) = bounds(store, b);
    let b1 = vec![diseq(store, fst_a, fst_b)];
    let b2 = vec![diseq(store, lst_a, lst_b)];
    let w = store.fresh_var("w", Sort::Int);
    let ga = store.mk(Symbol::NseqGet, vec![a, w]).unwrap();
    let gb = store.mk(Symbol::NseqGet, vec![b, w]).unwrap();
    let b3 = vec![
        store.le(fst_a, w).unwrap(),
        store.le(w, lst_a).unwrap(),
        diseq(store, ga, gb),
    ];
    Lemma { source: RuleId::DiseqExt, branches: vec![b1, b2, b3] }
}

fn const_merge(store: &mut TermStore, c1: TermId, c2: TermId) -> Lemma {
    let (f1, l1, v1) = (store.args(c1)[0], store.args(c1)[1], store.args(c1)[2]);
    let (f2, l2, v2) = (store.args(c2)[0], store.args(c2)[1], store.args(c2)[2]);
    let ef = store.eq(f1, f2).unwrap();
    let el = store.eq(l1, l2).unwrap();
    // empty on both sides, or same value
    let b1 = vec![store.lt(l1, f1).unwrap(), ef, el];
    let b2 = vec![store.eq(v1, v2).unwrap(), ef, el];
    Lemma { source: RuleId::ConstMerge, branches: vec![b1, b2] }
}

fn const_decomp(store: &mut TermStore, c: TermId, nf: &NormalForm) -> Lemma {
    let v = store.args(c)[2];
    let mut b = Vec::new();
    for &w in &nf.fragments {
        let (fst_w, lst_w) = bounds(store, w);
        let cw = store.mk(Symbol::NseqConst, vec![fst_w, lst_w, v]).unwrap();
        b.push(store.eq(w, cw).unwrap());
    }
    Lemma { source: RuleId::ConstDecomp, branches: vec![b] }
}

fn const_reloc(store: &mut TermStore, c: TermId, s: TermId) -> Lemma {
    let v = store.args(c)[2];
    let (fst_s, lst_s) = bounds(store, s);
    let cs = store.mk(Symbol::NseqConst, vec![fst_s, lst_s, v]).unwrap();
    let b = vec![store.eq(s, cs).unwrap()];
    Lemma { source: RuleId::ConstReloc, branches: vec![b] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lia::LinConstraint;

    fn setup() -> (TermStore, Euf, LiaSolver) {
        (TermStore::new(), Euf::new(), LiaSolver::new())
    }

    fn nseq_var(st: &mut TermStore, name: &str) -> TermId {
        st.var(name, Sort::nseq(Sort::Int))
    }

    #[test]
    fn const_bounds_single_branch() {
        let (mut st, euf, mut lia) = setup();
        let (f, l, v) = (st.var("f", Sort::Int), st.var("l", Sort::Int), st.var("v", Sort::Int));
        let c = st.mk(Symbol::NseqConst, vec![f, l, v]).unwrap();
        let mut rules = Rules::new(Calculus::Base, RuleConfig::default());
        rules.activate(&st, c);
        let lemmas = rules.derive(&mut st, &euf, &mut lia);
        let cb: Vec<&Lemma> =
            lemmas.iter().filter(|l| l.source == RuleId::ConstBounds).collect();
        assert_eq!(cb.len(), 1);
        assert_eq!(cb[0].branches.len(), 1);
        let printed: Vec<String> =
            cb[0].branches[0].iter().map(|&t| st.display(t)).collect();
        assert_eq!(
            printed,
            vec![
                format!("(= (nseq.first {}) f)", st.display(c)),
                format!("(= (nseq.last {}) l)", st.display(c)),
            ]
        );
    }

    #[test]
    fn reloc_bounds_two_branches() {
        let (mut st, euf, mut lia) = setup();
        let s2 = nseq_var(&mut st, "s2");
        let i = st.var("i", Sort::Int);
        let r = st.mk(Symbol::NseqRelocate, vec![s2, i]).unwrap();
        let mut rules = Rules::new(Calculus::Base, RuleConfig::default());
        rules.activate(&st, r);
        let lemmas = rules.derive(&mut st, &euf, &mut lia);
        let l = lemmas.iter().find(|l| l.source == RuleId::RelocBounds).unwrap();
        assert_eq!(l.branches.len(), 2);
        // first branch: i = fst_{s2} /\ s1 = s2
        assert_eq!(st.display(l.branches[0][0]), "(= i (nseq.first s2))");
        // second branch contains the relocation-equivalence atom
        assert!(l.branches[1]
            .iter()
            .any(|&t| *st.head(t) == Symbol::RelocEq));
    }

    #[test]
    fn ns_concat_three_branches() {
        let (mut st, euf, mut lia) = setup();
        let s1 = nseq_var(&mut st, "a");
        let s2 = nseq_var(&mut st, "b");
        let c = st.mk(Symbol::NseqConcat, vec![s1, s2]).unwrap();
        let mut rules = Rules::new(Calculus::Ext, RuleConfig::default());
        rules.activate(&st, c);
        let lemmas = rules.derive(&mut st, &euf, &mut lia);
        let l = lemmas.iter().find(|l| l.source == RuleId::NSConcat).unwrap();
        assert_eq!(l.branches.len(), 3);
        // third branch introduces the normal form
        assert!(l.branches[2]
            .iter()
            .any(|&t| st.display(t).contains("nseq.++")));
    }

    #[test]
    fn ns_slice_and_update_branch_counts() {
        let (mut st, euf, mut lia) = setup();
        let s = nseq_var(&mut st, "s");
        let u = nseq_var(&mut st, "u");
        let (f, l) = (st.var("f", Sort::Int), st.var("l", Sort::Int));
        let slice = st.mk(Symbol::NseqSlice, vec![s, f, l]).unwrap();
        let update = st.mk(Symbol::NseqUpdate, vec![s, u]).unwrap();
        let mut rules = Rules::new(Calculus::Ext, RuleConfig::default());
        rules.activate(&st, slice);
        rules.activate(&st, update);
        let lemmas = rules.derive(&mut st, &euf, &mut lia);
        let sl = lemmas.iter().find(|l| l.source == RuleId::NSSlice).unwrap();
        assert_eq!(sl.branches.len(), 2);
        let up = lemmas.iter().find(|l| l.source == RuleId::NSUpdate).unwrap();
        assert_eq!(up.branches.len(), 2);
        // update second branch: two shared-variable normal forms
        let nfs = up.branches[1]
            .iter()
            .filter(|&&t| st.display(t).contains("nseq.++"))
            .count();
        assert_eq!(nfs, 2);
    }

    #[test]
    fn ns_split_three_branches_with_fresh_k() {
        let (mut st, mut euf, mut lia) = setup();
        let s = nseq_var(&mut st, "s");
        let y1 = nseq_var(&mut st, "y1");
        let y2 = nseq_var(&mut st, "y2");
        let z1 = nseq_var(&mut st, "z1");
        let z2 = nseq_var(&mut st, "z2");
        euf.register(&st, s);
        let mut rules = Rules::new(Calculus::Base, RuleConfig::default());
        rules.register_nf(s, vec![y1, z1]);
        rules.register_nf(s, vec![y2, z2]);
        let lemmas = rules.derive(&mut st, &euf, &mut lia);
        let l = lemmas.iter().find(|l| l.source == RuleId::NSSplit).unwrap();
        assert_eq!(l.branches.len(), 3);
        assert_eq!(st.display(l.branches[0][1]), "(= y1 y2)");
        assert!(l.branches[1].iter().any(|&t| st.display(t).contains("_k!")));
    }

    #[test]
    fn ns_split_skips_equal_aligned_fragments() {
        let (mut st, mut euf, mut lia) = setup();
        let s = nseq_var(&mut st, "s");
        let y1 = nseq_var(&mut st, "y1");
        let y2 = nseq_var(&mut st, "y2");
        let z1 = nseq_var(&mut st, "z1");
        let z2 = nseq_var(&mut st, "z2");
        euf.assert_eq(&st, y1, y2);
        let mut rules = Rules::new(Calculus::Base, RuleConfig::default());
        rules.register_nf(s, vec![y1, z1]);
        rules.register_nf(s, vec![y2, z2]);
        let lemmas = rules.derive(&mut st, &euf, &mut lia);
        let split = lemmas.iter().find(|l| l.source == RuleId::NSSplit).unwrap();
        // the prefix y1 ~ y2 is skipped; the split lands on z1 vs z2
        assert!(split.branches[0].iter().any(|&t| st.display(t) == "(= z1 z2)"));
    }

    #[test]
    fn ns_comp_reloc_two_branches() {
        let (mut st, mut euf, mut lia) = setup();
        let s1 = nseq_var(&mut st, "s1");
        let s2 = nseq_var(&mut st, "s2");
        let w1 = nseq_var(&mut st, "w1");
        let w2 = nseq_var(&mut st, "w2");
        euf.assert_reloc(&st, s1, s2, BigInt::from(3));
        let mut rules = Rules::new(Calculus::Base, RuleConfig::default());
        rules.register_nf(s1, vec![w1, w2]);
        let lemmas = rules.derive(&mut st, &euf, &mut lia);
        let l = lemmas.iter().find(|l| l.source == RuleId::NSCompReloc).unwrap();
        assert_eq!(l.branches.len(), 2);
        assert_eq!(
            st.display(l.branches[0][0]),
            "(= (nseq.first s1) (nseq.first s2))"
        );
        // second branch relocates the first fragment to fst_{s2}
        let b2 = st.display(l.branches[1][0]);
        assert!(b2.contains("(nseq.relocate w1 (nseq.first s2))"), "{b2}");
        assert!(b2.contains("(nseq.relocate w2 (+ (- (nseq.first w2) (nseq.first s1)) (nseq.first s2)))"), "{b2}");
    }

    #[test]
    fn r_get_two_branches_with_singleton_const() {
        let (mut st, euf, mut lia) = setup();
        let s = nseq_var(&mut st, "s");
        let i = st.var("i", Sort::Int);
        let g = st.mk(Symbol::NseqGet, vec![s, i]).unwrap();
        let mut rules = Rules::new(Calculus::Base, RuleConfig::default());
        rules.activate(&st, g);
        let lemmas = rules.derive(&mut st, &euf, &mut lia);
        let l = lemmas.iter().find(|l| l.source == RuleId::RGet).unwrap();
        assert_eq!(l.branches.len(), 2);
        assert_eq!(
            st.display(l.branches[0][0]),
            "(or (< i (nseq.first s)) (< (nseq.last s) i))"
        );
        let nf = st.display(*l.branches[1].last().unwrap());
        assert!(nf.contains("(nseq.const i i (nseq.get s i))"), "{nf}");
    }

    #[test]
    fn r_set_two_branches_with_shared_fragments() {
        let (mut st, euf, mut lia) = setup();
        let s2 = nseq_var(&mut st, "s2");
        let i = st.var("i", Sort::Int);
        let v = st.var("v", Sort::Int);
        let s1 = st.mk(Symbol::NseqSet, vec![s2, i, v]).unwrap();
        let mut rules = Rules::new(Calculus::Base, RuleConfig::default());
        rules.activate(&st, s1);
        let lemmas = rules.derive(&mut st, &euf, &mut lia);
        let l = lemmas.iter().find(|l| l.source == RuleId::RSet).unwrap();
        assert_eq!(l.branches.len(), 2);
        // the two normal forms share k1 and k3
        let nfs: Vec<String> = l.branches[1]
            .iter()
            .map(|&t| st.display(t))
            .filter(|p| p.contains("nseq.++"))
            .collect();
        assert_eq!(nfs.len(), 2);
        let k_names: Vec<&str> = nfs[0]
            .split_whitespace()
            .filter(|w| w.contains("_k!"))
            .collect();
        assert!(nfs[1].contains(k_names[0].trim_matches(')')));
    }

    #[test]
    fn ext_rules_branch_counts() {
        let (mut st, mut euf, mut lia) = setup();
        let s2 = nseq_var(&mut st, "s2");
        let i = st.var("i", Sort::Int);
        let j = st.var("j", Sort::Int);
        let v = st.var("v", Sort::Int);
        let s1 = st.mk(Symbol::NseqSet, vec![s2, i, v]).unwrap();
        let g = st.mk(Symbol::NseqGet, vec![s1, j]).unwrap();
        euf.register(&st, g);
        let mut rules = Rules::new(Calculus::Ext, RuleConfig::default());
        rules.activate(&st, g);
        let lemmas = rules.derive(&mut st, &euf, &mut lia);
        let get_set = lemmas.iter().find(|l| l.source == RuleId::GetSet).unwrap();
        assert_eq!(get_set.branches.len(), 3);
        let get_intro = lemmas.iter().find(|l| l.source == RuleId::GetIntro).unwrap();
        assert_eq!(get_intro.branches.len(), 2);
        let set_bound = lemmas.iter().find(|l| l.source == RuleId::SetBound).unwrap();
        assert_eq!(set_bound.branches.len(), 2);
        assert_eq!(st.display(set_bound.branches[0][0]), format!("(= {} s2)", st.display(s1)));
    }

    #[test]
    fn get_concat_has_fragment_plus_one_branches() {
        let (mut st, mut euf, mut lia) = setup();
        let s = nseq_var(&mut st, "s");
        let (w1, w2, w3) =
            (nseq_var(&mut st, "w1"), nseq_var(&mut st, "w2"), nseq_var(&mut st, "w3"));
        let i = st.var("i", Sort::Int);
        let g = st.mk(Symbol::NseqGet, vec![s, i]).unwrap();
        euf.register(&st, g);
        let mut rules = Rules::new(Calculus::Ext, RuleConfig::default());
        rules.activate(&st, g);
        rules.register_nf(s, vec![w1, w2, w3]);
        let lemmas = rules.derive(&mut st, &euf, &mut lia);
        let l = lemmas.iter().find(|l| l.source == RuleId::GetConcat).unwrap();
        assert_eq!(l.branches.len(), 4);
        assert!(l.branches[2].iter().any(|&t| st.display(t) == "(= (nseq.get w2 i) (nseq.get s i))"));
    }

    #[test]
    fn set_concat_strict_drops_frame_equalities() {
        let (mut st, mut euf, mut lia) = setup();
        let s2 = nseq_var(&mut st, "s2");
        let (w1, w2) = (nseq_var(&mut st, "w1"), nseq_var(&mut st, "w2"));
        let i = st.var("i", Sort::Int);
        let v = st.var("v", Sort::Int);
        let s1 = st.mk(Symbol::NseqSet, vec![s2, i, v]).unwrap();
        euf.register(&st, s1);
        for strict in [false, true] {
            let mut rules = Rules::new(Calculus::Ext, RuleConfig { strict });
            rules.activate(&st, s1);
            rules.register_nf(s2, vec![w1, w2]);
            let lemmas = rules.derive(&mut st, &euf, &mut lia);
            let l = lemmas.iter().find(|l| l.source == RuleId::SetConcat).unwrap();
            assert_eq!(l.branches.len(), 3);
            let frame = l.branches[1]
                .iter()
                .any(|&t| st.display(t).starts_with("(= _k!") && st.display(t).ends_with("w2)"));
            assert_eq!(frame, !strict);
        }
    }

    #[test]
    fn get_reloc_index_direction() {
        let (mut st, mut euf, mut lia) = setup();
        // reads are routed toward the oldest class member, so create s2 first
        let s2 = nseq_var(&mut st, "s2");
        let s1 = nseq_var(&mut st, "s1");
        let i = st.var("i", Sort::Int);
        let g = st.mk(Symbol::NseqGet, vec![s1, i]).unwrap();
        euf.assert_reloc(&st, s1, s2, BigInt::from(1));
        for strict in [false, true] {
            let mut rules = Rules::new(Calculus::Ext, RuleConfig { strict });
            rules.activate(&st, g);
            let lemmas = rules.derive(&mut st, &euf, &mut lia);
            let l = lemmas.iter().find(|l| l.source == RuleId::GetReloc).unwrap();
            assert_eq!(l.branches.len(), 2);
            let read = st.display(*l.branches[1].last().unwrap());
            if strict {
                assert!(read.contains("(- (- i (nseq.first s1)) (nseq.first s2))"), "{read}");
            } else {
                assert!(read.contains("(+ (- i (nseq.first s1)) (nseq.first s2))"), "{read}");
            }
        }
    }

    #[test]
    fn diseq_ext_three_branches() {
        let (mut st, euf, mut lia) = setup();
        let a = nseq_var(&mut st, "a");
        let b = nseq_var(&mut st, "b");
        let mut rules = Rules::new(Calculus::Base, RuleConfig::default());
        rules.register_diseq(a, b);
        let lemmas = rules.derive(&mut st, &euf, &mut lia);
        let l = lemmas.iter().find(|l| l.source == RuleId::DiseqExt).unwrap();
        assert_eq!(l.branches.len(), 3);
        assert_eq!(st.display(l.branches[0][0]), "(not (= (nseq.first a) (nseq.first b)))");
        let witness = st.display(*l.branches[2].last().unwrap());
        assert!(witness.contains("(not (= (nseq.get a _w!"), "{witness}");
    }

    #[test]
    fn rewrite_drops_entailed_empty_fragment() {
        let (mut st, euf, mut lia) = setup();
        let s = nseq_var(&mut st, "s");
        let (w1, w2) = (nseq_var(&mut st, "w1"), nseq_var(&mut st, "w2"));
        // lst_{w2} < fst_{w2} entailed via fixed bounds
        let (f2, l2) = st.bounds_terms(w2).unwrap();
        let mut e = crate::lia::LinExpr::var(f2);
        e.constant -= BigInt::from(5);
        lia.assert_constraint(LinConstraint::eq(e));
        let mut e = crate::lia::LinExpr::var(l2);
        e.constant -= BigInt::from(2);
        lia.assert_constraint(LinConstraint::eq(e));
        let mut rules = Rules::new(Calculus::Base, RuleConfig::default());
        rules.register_nf(s, vec![w1, w2]);
        let lemmas = rules.derive(&mut st, &euf, &mut lia);
        let l = lemmas.iter().find(|l| l.source == RuleId::Rewrite1).unwrap();
        assert_eq!(st.display(l.branches[0][0]), "(= s w1)");
    }

    #[test]
    fn rewrite_inlines_nested_normal_form() {
        let (mut st, mut euf, mut lia) = setup();
        let s = nseq_var(&mut st, "s");
        let (w1, w2) = (nseq_var(&mut st, "w1"), nseq_var(&mut st, "w2"));
        let (u1, u2) = (nseq_var(&mut st, "u1"), nseq_var(&mut st, "u2"));
        euf.register(&st, w1);
        let mut rules = Rules::new(Calculus::Base, RuleConfig::default());
        rules.register_nf(s, vec![w1, w2]);
        rules.register_nf(w1, vec![u1, u2]);
        let lemmas = rules.derive(&mut st, &euf, &mut lia);
        let l = lemmas.iter().find(|l| l.source == RuleId::Rewrite4).unwrap();
        assert_eq!(st.display(l.branches[0][0]), "(= s (nseq.++ u1 u2 w2))");
    }

    #[test]
    fn const_merge_and_decomp_shapes() {
        let (mut st, mut euf, mut lia) = setup();
        let (f1, l1, v1) = (st.var("f1", Sort::Int), st.var("l1", Sort::Int), st.var("v1", Sort::Int));
        let (f2, l2, v2) = (st.var("f2", Sort::Int), st.var("l2", Sort::Int), st.var("v2", Sort::Int));
        let c1 = st.mk(Symbol::NseqConst, vec![f1, l1, v1]).unwrap();
        let c2 = st.mk(Symbol::NseqConst, vec![f2, l2, v2]).unwrap();
        euf.assert_eq(&st, c1, c2);
        let mut rules = Rules::new(Calculus::Base, RuleConfig::default());
        rules.activate(&st, c1);
        rules.activate(&st, c2);
        let w = nseq_var(&mut st, "w");
        rules.register_nf(c1, vec![w]);
        let lemmas = rules.derive(&mut st, &euf, &mut lia);
        let merge = lemmas.iter().find(|l| l.source == RuleId::ConstMerge).unwrap();
        assert_eq!(merge.branches.len(), 2);
        assert_eq!(st.display(merge.branches[1][0]), "(= v1 v2)");
        let decomp = lemmas.iter().find(|l| l.source == RuleId::ConstDecomp).unwrap();
        assert_eq!(decomp.branches.len(), 1);
        assert_eq!(
            st.display(decomp.branches[0][0]),
            "(= w (nseq.const (nseq.first w) (nseq.last w) v1))"
        );
    }

    #[test]
    fn guards_fire_once() {
        let (mut st, euf, mut lia) = setup();
        let s = nseq_var(&mut st, "s");
        let i = st.var("i", Sort::Int);
        let g = st.mk(Symbol::NseqGet, vec![s, i]).unwrap();
        let mut rules = Rules::new(Calculus::Base, RuleConfig::default());
        rules.activate(&st, g);
        let first = rules.derive(&mut st, &euf, &mut lia);
        assert!(first.iter().any(|l| l.source == RuleId::RGet));
        let second = rules.derive(&mut st, &euf, &mut lia);
        assert!(second.is_empty());
        // a different index is a different premise
        let j = st.var("j", Sort::Int);
        let g2 = st.mk(Symbol::NseqGet, vec![s, j]).unwrap();
        rules.activate(&st, g2);
        let third = rules.derive(&mut st, &euf, &mut lia);
        assert!(third.iter().any(|l| l.source == RuleId::RGet));
    }
}
