//! Congruence closure over ground terms, plus relocation classes.
//!
//! A relocation class groups sequence terms known to carry the same content
//! at (possibly) different offsets. Each member stores its offset relative
//! to the class root; two members at the same offset denote the same
//! sequence and are merged in the congruence closure.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::term::{Symbol, TermId, TermStore};

#[derive(Debug, Clone, Default)]
pub struct Euf {
    parent: BTreeMap<TermId, TermId>,
    terms: BTreeSet<TermId>,
    diseqs: Vec<(TermId, TermId)>,
    reloc_parent: BTreeMap<TermId, (TermId, BigInt)>,
    /// Merges performed since the last drain, for arithmetic sync.
    pending: Vec<(TermId, TermId)>,
    conflict: bool,
}

impl Euf {
    pub fn new() -> Euf {
        Euf::default()
    }

    pub fn in_conflict(&self) -> bool {
        self.conflict
    }

    /// Register a term and all of its subterms.
    pub fn register(&mut self, store: &TermStore, t: TermId) {
        for s in store.subterms(t) {
            self.terms.insert(s);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = TermId> + '_ {
        self.terms.iter().copied()
    }

    pub fn find(&self, t: TermId) -> TermId {
        let mut cur = t;
        while let Some(&p) = self.parent.get(&cur) {
            cur = p;
        }
        cur
    }

    pub fn are_equal(&self, a: TermId, b: TermId) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn are_disequal(&self, a: TermId, b: TermId) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        self.diseqs
            .iter()
            .any(|(x, y)| {
                let (rx, ry) = (self.find(*x), self.find(*y));
                (rx == ra && ry == rb) || (rx == rb && ry == ra)
            })
    }

    pub fn class_members(&self, t: TermId) -> Vec<TermId> {
        let r = self.find(t);
        self.terms.iter().copied().filter(|&s| self.find(s) == r).collect()
    }

    pub fn assert_eq(&mut self, store: &TermStore, a: TermId, b: TermId) {
        self.register(store, a);
        self.register(store, b);
        self.merge(store, a, b);
        self.close(store);
    }

    pub fn assert_diseq(&mut self, store: &TermStore, a: TermId, b: TermId) {
        self.register(store, a);
        self.register(store, b);
        self.diseqs.push((a, b));
        self.close(store);
    }

    /// Record that `b` holds the same content as `a` shifted by `offset`
    /// (i.e. position p in `a` corresponds to p + offset in `b`).
    pub fn assert_reloc(&mut self, store: &TermStore, a: TermId, b: TermId, offset: BigInt) {
        self.register(store, a);
        self.register(store, b);
        self.reloc_union(a, b, offset);
        self.close(store);
    }

    /// Drain the merges performed since the last call.
    pub fn drain_merges(&mut self) -> Vec<(TermId, TermId)> {
        std::mem::take(&mut self.pending)
    }

    fn merge(&mut self, store: &TermStore, a: TermId, b: TermId) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        // Deterministic orientation: larger id points at smaller.
        let (root, child) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent.insert(child, root);
        self.pending.push((a, b));
        // Equal sequence terms share content at offset zero.
        if store.sort(a).is_nseq() {
            self.reloc_union(a, b, BigInt::zero());
        }
    }

    fn reloc_find(&self, t: TermId) -> (TermId, BigInt) {
        let mut cur = t;
        let mut off = BigInt::zero();
        while let Some((p, d)) = self.reloc_parent.get(&cur) {
            off += d;
            cur = *p;
        }
        (cur, off)
    }

    fn reloc_union(&mut self, a: TermId, b: TermId, offset: BigInt) {
        // b = a shifted by offset
        let (ra, oa) = self.reloc_find(a);
        let (rb, ob) = self.reloc_find(b);
        if ra == rb {
            return;
        }
        // rb's position relative to ra: b = ra + oa + offset, b = rb + ob
        self.reloc_parent.insert(rb, (ra, oa + offset - ob));
    }

    /// Members of `t`'s relocation class with their offsets relative to `t`.
    pub fn reloc_class(&self, t: TermId) -> Vec<(TermId, BigInt)> {
        let (root, base) = self.reloc_find(t);
        self.reloc_parent
            .keys()
            .copied()
            .chain(std::iter::once(root))
            .filter_map(|s| {
                let (r, o) = self.reloc_find(s);
                (r == root).then(|| (s, o - &base))
            })
            .collect()
    }

    /// Congruence closure to fixpoint, then conflict detection.
    pub fn close(&mut self, store: &TermStore) {
        loop {
            let mut changed = false;
            // Congruent applications collapse via a signature table.
            let mut sigs: HashMap<(Symbol, Vec<TermId>), TermId> = HashMap::new();
            let apps: Vec<TermId> =
                self.terms.iter().copied().filter(|&t| !store.args(t).is_empty()).collect();
            for t in apps {
                let key = (
                    store.head(t).clone(),
                    store.args(t).iter().map(|&a| self.find(a)).collect::<Vec<_>>(),
                );
                match sigs.get(&key) {
                    Some(&u) if !self.are_equal(t, u) => {
                        self.merge(store, t, u);
                        changed = true;
                    }
                    Some(_) => {}
                    None => {
                        sigs.insert(key, t);
                    }
                }
            }
            // Same relocation offset forces equality of sequence terms.
            let mut by_pos: HashMap<(TermId, BigInt), TermId> = HashMap::new();
            let members: Vec<TermId> = self
                .reloc_parent
                .keys()
                .copied()
                .chain(self.reloc_parent.values().map(|(p, _)| *p))
                .collect();
            for t in members {
                let (root, off) = self.reloc_find(t);
                match by_pos.get(&(root, off.clone())) {
                    Some(&u) if !self.are_equal(t, u) => {
                        self.merge(store, t, u);
                        changed = true;
                    }
                    Some(_) => {}
                    None => {
                        by_pos.insert((root, off), t);
                    }
                }
            }
            if !changed {
                break;
            }
        }
        self.detect_conflict(store);
    }

    fn detect_conflict(&mut self, store: &TermStore) {
        for (a, b) in &self.diseqs {
            if self.find(*a) == self.find(*b) {
                self.conflict = true;
                return;
            }
        }
        // Distinct interpreted constants may not share a class.
        let mut value_of: HashMap<TermId, TermId> = HashMap::new();
        for &t in &self.terms {
            let concrete = matches!(
                store.head(t),
                Symbol::Numeral(_) | Symbol::BoolConst(_)
            );
            if !concrete {
                continue;
            }
            let r = self.find(t);
            match value_of.get(&r) {
                Some(&u) if store.head(u) != store.head(t) => {
                    self.conflict = true;
                    return;
                }
                Some(_) => {}
                None => {
                    value_of.insert(r, t);
                }
            }
        }
        self.conflict = false;
    }

    /// Distinct interpreted constant (numeral / boolean) in `t`'s class.
    pub fn class_constant(&self, store: &TermStore, t: TermId) -> Option<TermId> {
        let r = self.find(t);
        self.terms.iter().copied().find(|&s| {
            self.find(s) == r
                && matches!(store.head(s), Symbol::Numeral(_) | Symbol::BoolConst(_))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Sort;

    #[test]
    fn congruence_of_unary_application() {
        let mut st = TermStore::new();
        let a = st.var("a", Sort::Int);
        let b = st.var("b", Sort::Int);
        let fa = st.uf_app("f", vec![a], Sort::Int);
        let fb = st.uf_app("f", vec![b], Sort::Int);
        let mut euf = Euf::new();
        euf.register(&st, fa);
        euf.register(&st, fb);
        assert!(!euf.are_equal(fa, fb));
        euf.assert_eq(&st, a, b);
        assert!(euf.are_equal(fa, fb));
    }

    #[test]
    fn transitivity_and_diseq_conflict() {
        let mut st = TermStore::new();
        let a = st.var("a", Sort::Int);
        let b = st.var("b", Sort::Int);
        let c = st.var("c", Sort::Int);
        let mut euf = Euf::new();
        euf.assert_diseq(&st, a, c);
        euf.assert_eq(&st, a, b);
        assert!(!euf.in_conflict());
        euf.assert_eq(&st, b, c);
        assert!(euf.in_conflict());
    }

    #[test]
    fn distinct_numerals_conflict() {
        let mut st = TermStore::new();
        let x = st.var("x", Sort::Int);
        let one = st.numeral(1);
        let two = st.numeral(2);
        let mut euf = Euf::new();
        euf.assert_eq(&st, x, one);
        assert!(!euf.in_conflict());
        euf.assert_eq(&st, x, two);
        assert!(euf.in_conflict());
    }

    #[test]
    fn snapshot_restore() {
        let mut st = TermStore::new();
        let a = st.var("a", Sort::Int);
        let b = st.var("b", Sort::Int);
        let mut euf = Euf::new();
        euf.assert_diseq(&st, a, b);
        let snap = euf.clone();
        euf.assert_eq(&st, a, b);
        assert!(euf.in_conflict());
        euf = snap;
        assert!(!euf.in_conflict());
        assert!(!euf.are_equal(a, b));
    }

    #[test]
    fn same_offset_reloc_members_merge() {
        let mut st = TermStore::new();
        let s = Sort::nseq(Sort::Int);
        let a = st.var("a", s.clone());
        let b = st.var("b", s.clone());
        let c = st.var("c", s.clone());
        let mut euf = Euf::new();
        // b = a shifted by 2, c = a shifted by 2  =>  b = c
        euf.assert_reloc(&st, a, b, BigInt::from(2));
        assert!(!euf.are_equal(b, c));
        euf.assert_reloc(&st, a, c, BigInt::from(2));
        assert!(euf.are_equal(b, c));
        // class of a sees both at offset 2
        let cls = euf.reloc_class(a);
        assert!(cls.iter().any(|(t, o)| *t == b && *o == BigInt::from(2)));
    }

    #[test]
    fn euf_merge_feeds_reloc_classes() {
        let mut st = TermStore::new();
        let s = Sort::nseq(Sort::Int);
        let a = st.var("a", s.clone());
        let b = st.var("b", s.clone());
        let c = st.var("c", s.clone());
        let d = st.var("d", s.clone());
        let mut euf = Euf::new();
        euf.assert_reloc(&st, a, b, BigInt::from(3));
        euf.assert_reloc(&st, c, d, BigInt::from(3));
        assert!(!euf.are_equal(b, d));
        // a = c aligns the two classes, so b and d share offset 3.
        euf.assert_eq(&st, a, c);
        assert!(euf.are_equal(b, d));
    }

    /// Random merge sequences agree with a naive reflexive-transitive-
    /// congruent closure computed by pair-matrix fixpoint.
    #[test]
    fn random_closure_agrees_with_naive_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _case in 0..120 {
            let mut st = TermStore::new();
            let n = rng.gen_range(2..=5usize);
            let mut terms: Vec<TermId> =
                (0..n).map(|i| st.var(&format!("c{i}"), Sort::Int)).collect();
            for _ in 0..rng.gen_range(0..=4usize) {
                let arg = terms[rng.gen_range(0..terms.len())];
                terms.push(st.uf_app("f", vec![arg], Sort::Int));
            }
            let mut euf = Euf::new();
            for &t in &terms {
                euf.register(&st, t);
            }
            let mut eqs = Vec::new();
            for _ in 0..rng.gen_range(1..=4usize) {
                let a = terms[rng.gen_range(0..terms.len())];
                let b = terms[rng.gen_range(0..terms.len())];
                eqs.push((a, b));
                euf.assert_eq(&st, a, b);
            }
            // Naive closure on the full term universe.
            let all: Vec<TermId> = euf.terms().collect();
            let idx = |t: TermId| all.iter().position(|&u| u == t).unwrap();
            let k = all.len();
            let mut eq = vec![vec![false; k]; k];
            for i in 0..k {
                eq[i][i] = true;
            }
            for &(a, b) in &eqs {
                eq[idx(a)][idx(b)] = true;
                eq[idx(b)][idx(a)] = true;
            }
            loop {
                let mut changed = false;
                for i in 0..k {
                    for j in 0..k {
                        if eq[i][j] {
                            continue;
                        }
                        let trans = (0..k).any(|m| eq[i][m] && eq[m][j]);
                        let cong = st.head(all[i]) == st.head(all[j])
                            && st.args(all[i]).len() == st.args(all[j]).len()
                            && !st.args(all[i]).is_empty()
                            && st
                                .args(all[i])
                                .iter()
                                .zip(st.args(all[j]))
                                .all(|(&x, &y)| eq[idx(x)][idx(y)]);
                        if trans || cong {
                            eq[i][j] = true;
                            eq[j][i] = true;
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
            for i in 0..k {
                for j in 0..k {
                    assert_eq!(
                        euf.are_equal(all[i], all[j]),
                        eq[i][j],
                        "closure mismatch on pair ({:?}, {:?})",
                        all[i],
                        all[j]
                    );
                }
            }
        }
    }
}
