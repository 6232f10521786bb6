//! Translation from the SMT-LIB theory of sequences (`Seq`) into n-indexed
//! sequences (`NSeq`).
//!
//! Every `Seq`-sorted term maps to an `NSeq`-sorted term whose first index
//! is 0 and whose last index is at least -1. `ite` and `min` introduced by
//! the translation (and any `ite` in the input) are eliminated with fresh
//! variables and defining clauses, so the output is purely conjunctive
//! below the boolean structure.

use std::collections::BTreeMap;

use crate::term::{Sort, SortError, Symbol, TermId, TermStore};

#[derive(Debug, Clone, Copy, Default)]
pub struct TranslateOptions {
    /// Post-compose `seq.extract` results with `relocate(_, 0)` so slices
    /// are re-anchored at zero.
    pub extract_relocate: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Translation {
    /// Translated assertions plus defining clauses and range constraints.
    pub assertions: Vec<TermId>,
    /// Original `Seq` variable to its `NSeq` counterpart.
    pub var_map: BTreeMap<TermId, TermId>,
}

struct Translator<'a> {
    store: &'a mut TermStore,
    opts: TranslateOptions,
    cache: BTreeMap<TermId, TermId>,
    empties: BTreeMap<Sort, TermId>,
    side: Vec<TermId>,
    var_map: BTreeMap<TermId, TermId>,
}

pub fn translate(
    store: &mut TermStore,
    assertions: &[TermId],
    opts: TranslateOptions,
) -> Result<Translation, SortError> {
    let mut tr = Translator {
        store,
        opts,
        cache: BTreeMap::new(),
        empties: BTreeMap::new(),
        side: Vec::new(),
        var_map: BTreeMap::new(),
    };
    let mut out = Vec::new();
    for &a in assertions {
        out.push(tr.tr(a)?);
    }
    let mut assertions = tr.side;
    assertions.extend(out);
    Ok(Translation { assertions, var_map: tr.var_map })
}

impl Translator<'_> {
    fn tr(&mut self, t: TermId) -> Result<TermId, SortError> {
        if let Some(&r) = self.cache.get(&t) {
            return Ok(r);
        }
        let data = self.store.get(t).clone();
        let r = match &data.head {
            Symbol::Var(name) => {
                if let Sort::Seq(elem) = &data.sort {
                    let ns = self.store.var(name, Sort::nseq((**elem).clone()));
                    self.range_constraints(ns, false)?;
                    self.var_map.insert(t, ns);
                    ns
                } else {
                    t
                }
            }
            Symbol::SeqEmpty => {
                let Sort::Seq(elem) = &data.sort else { unreachable!() };
                self.empty((**elem).clone())?
            }
            Symbol::SeqUnit => {
                let v = self.tr(data.args[0])?;
                let zero = self.store.numeral(0);
                self.store.mk(Symbol::NseqConst, vec![zero, zero, v])?
            }
            Symbol::SeqLen => {
                let s = self.tr(data.args[0])?;
                let (fst, lst) = self.store.bounds_terms(s)?;
                let diff = self.store.sub(lst, fst)?;
                let one = self.store.numeral(1);
                self.store.add(diff, one)?
            }
            Symbol::SeqNth => {
                let s = self.tr(data.args[0])?;
                let i = self.tr(data.args[1])?;
                self.store.mk(Symbol::NseqGet, vec![s, i])?
            }
            Symbol::SeqUpdate => self.tr_update(&data.args)?,
            Symbol::SeqExtract => self.tr_extract(&data.args)?,
            Symbol::SeqConcat => self.tr_concat(&data.args)?,
            Symbol::Ite => {
                let c = self.tr(data.args[0])?;
                let a = self.tr(data.args[1])?;
                let b = self.tr(data.args[2])?;
                if self.store.sort(a) == &Sort::Bool {
                    // (ite c a b) == (and (or (not c) a) (or c b))
                    let nc = self.store.not(c)?;
                    let l = self.store.or(vec![nc, a])?;
                    let r = self.store.or(vec![c, b])?;
                    self.store.and(vec![l, r])?
                } else {
                    self.ite_elim(c, a, b)?
                }
            }
            Symbol::Uf(name) => {
                let name = name.clone();
                let args = data
                    .args
                    .iter()
                    .map(|&a| self.tr(a))
                    .collect::<Result<Vec<_>, _>>()?;
                self.store.uf_app(&name, args, data.sort.clone())
            }
            _ => {
                if data.args.is_empty() {
                    t
                } else {
                    let args = data
                        .args
                        .iter()
                        .map(|&a| self.tr(a))
                        .collect::<Result<Vec<_>, _>>()?;
                    self.store.mk(data.head.clone(), args)?
                }
            }
        };
        self.cache.insert(t, r);
        Ok(r)
    }

    /// `fst_s = 0` and (unless exact) `lst_s >= -1`.
    fn range_constraints(&mut self, s: TermId, empty: bool) -> Result<(), SortError> {
        let (fst, lst) = self.store.bounds_terms(s)?;
        let zero = self.store.numeral(0);
        let c1 = self.store.eq(fst, zero)?;
        self.side.push(c1);
        let one = self.store.numeral(1);
        let minus_one = self.store.mk(Symbol::Neg, vec![one])?;
        let c2 = if empty {
            self.store.eq(lst, minus_one)?
        } else {
            self.store.le(minus_one, lst)?
        };
        self.side.push(c2);
        Ok(())
    }

    fn empty(&mut self, elem: Sort) -> Result<TermId, SortError> {
        if let Some(&e) = self.empties.get(&elem) {
            return Ok(e);
        }
        let e = self.store.fresh_var("eps", Sort::nseq(elem.clone()));
        self.range_constraints(e, true)?;
        self.empties.insert(elem, e);
        Ok(e)
    }

    /// Fresh variable defined to equal `ite(c, a, b)`.
    fn ite_elim(&mut self, c: TermId, a: TermId, b: TermId) -> Result<TermId, SortError> {
        let sort = self.store.sort(a).clone();
        let x = self.store.fresh_var("ite", sort);
        let nc = self.store.not(c)?;
        let ea = self.store.eq(x, a)?;
        let eb = self.store.eq(x, b)?;
        let then_clause = self.store.or(vec![nc, ea])?;
        let else_clause = self.store.or(vec![c, eb])?;
        self.side.push(then_clause);
        self.side.push(else_clause);
        Ok(x)
    }

    /// Fresh variable defined to equal `min(a, b)`.
    fn min_elim(&mut self, a: TermId, b: TermId) -> Result<TermId, SortError> {
        let m = self.store.fresh_var("min", Sort::Int);
        let la = self.store.le(m, a)?;
        let lb = self.store.le(m, b)?;
        let ea = self.store.eq(m, a)?;
        let eb = self.store.eq(m, b)?;
        let pick = self.store.or(vec![ea, eb])?;
        self.side.push(la);
        self.side.push(lb);
        self.side.push(pick);
        Ok(m)
    }

    fn tr_update(&mut self, args: &[TermId]) -> Result<TermId, SortError> {
        let s1 = self.tr(args[0])?;
        let i = self.tr(args[1])?;
        let s2 = self.tr(args[2])?;
        let r = self.store.mk(Symbol::NseqRelocate, vec![s2, i])?;
        let (fst1, lst1) = self.store.bounds_terms(s1)?;
        let lst_r = self.store.last(r)?;
        // fst_{s1} <= i <= lst_{s1} and lst_{s1} < lst_r
        let c1 = self.store.le(fst1, i)?;
        let c2 = self.store.le(i, lst1)?;
        let c3 = self.store.lt(lst1, lst_r)?;
        let cond = self.store.and(vec![c1, c2, c3])?;
        let sliced = self.store.mk(Symbol::NseqSlice, vec![r, i, lst1])?;
        let upd_trunc = self.store.mk(Symbol::NseqUpdate, vec![s1, sliced])?;
        let upd_full = self.store.mk(Symbol::NseqUpdate, vec![s1, r])?;
        self.ite_elim(cond, upd_trunc, upd_full)
    }

    fn tr_extract(&mut self, args: &[TermId]) -> Result<TermId, SortError> {
        let s = self.tr(args[0])?;
        let i = self.tr(args[1])?;
        let j = self.tr(args[2])?;
        let (fst, lst) = self.store.bounds_terms(s)?;
        let zero = self.store.numeral(0);
        let one = self.store.numeral(1);
        // i < fst \/ lst < i \/ j <= 0
        let c1 = self.store.lt(i, fst)?;
        let c2 = self.store.lt(lst, i)?;
        let c3 = self.store.le(j, zero)?;
        let cond = self.store.or(vec![c1, c2, c3])?;
        let elem = self
            .store
            .sort(s)
            .elem_sort()
            .cloned()
            .expect("slice argument is NSeq-sorted");
        let eps = self.empty(elem)?;
        let sum = self.store.add(i, j)?;
        let hi_cand = self.store.sub(sum, one)?;
        let hi = self.min_elim(lst, hi_cand)?;
        let sliced = self.store.mk(Symbol::NseqSlice, vec![s, i, hi])?;
        let sliced = if self.opts.extract_relocate {
            self.store.mk(Symbol::NseqRelocate, vec![sliced, zero])?
        } else {
            sliced
        };
        self.ite_elim(cond, eps, sliced)
    }

    fn tr_concat(&mut self, args: &[TermId]) -> Result<TermId, SortError> {
        let mut acc = self.tr(args[0])?;
        let one = self.store.numeral(1);
        for &next in &args[1..] {
            let n = self.tr(next)?;
            let lst = self.store.last(acc)?;
            let at = self.store.add(lst, one)?;
            let moved = self.store.mk(Symbol::NseqRelocate, vec![n, at])?;
            acc = self.store.mk(Symbol::NseqConcat, vec![acc, moved])?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_script;

    fn translate_src(src: &str, opts: TranslateOptions) -> (TermStore, Translation) {
        let mut st = TermStore::new();
        let script = parse_script(src, &mut st).unwrap();
        let tr = translate(&mut st, &script.assertions(), opts).unwrap();
        (st, tr)
    }

    #[test]
    fn unit_becomes_singleton_const() {
        let (st, tr) = translate_src(
            "(declare-const v Int)(declare-const s (Seq Int))(assert (= s (seq.unit v)))",
            TranslateOptions::default(),
        );
        let main = *tr.assertions.last().unwrap();
        assert_eq!(st.display(main), "(= s (nseq.const 0 0 v))");
    }

    #[test]
    fn len_is_bounds_difference() {
        let (st, tr) = translate_src(
            "(declare-const s (Seq Int))(assert (= (seq.len s) 3))",
            TranslateOptions::default(),
        );
        let main = *tr.assertions.last().unwrap();
        assert_eq!(
            st.display(main),
            "(= (+ (- (nseq.last s) (nseq.first s)) 1) 3)"
        );
    }

    #[test]
    fn variables_get_range_constraints() {
        let (st, tr) = translate_src(
            "(declare-const s (Seq Int))(assert (= (seq.nth s 0) 5))",
            TranslateOptions::default(),
        );
        let printed: Vec<String> = tr.assertions.iter().map(|&t| st.display(t)).collect();
        assert!(printed.contains(&"(= (nseq.first s) 0)".to_string()));
        assert!(printed.contains(&"(<= (- 1) (nseq.last s))".to_string()));
        assert!(printed.contains(&"(= (nseq.get s 0) 5)".to_string()));
    }

    #[test]
    fn empty_is_shared_and_pinned_at_zero_minus_one() {
        let (st, tr) = translate_src(
            "(declare-const s (Seq Int))
             (assert (= s (as seq.empty (Seq Int))))
             (assert (not (= s (as seq.empty (Seq Int)))))",
            TranslateOptions::default(),
        );
        // both occurrences share one epsilon variable
        let printed: Vec<String> = tr.assertions.iter().map(|&t| st.display(t)).collect();
        let mut eps_names: Vec<&str> = printed
            .iter()
            .flat_map(|p| p.split_whitespace())
            .filter(|w| w.contains("_eps!"))
            .map(|w| w.trim_matches(|c| c == '(' || c == ')'))
            .collect();
        eps_names.sort();
        eps_names.dedup();
        assert_eq!(eps_names.len(), 1, "{printed:?}");
        let eps = eps_names[0];
        assert!(printed.contains(&format!("(= (nseq.first {eps}) 0)")));
        assert!(printed.contains(&format!("(= (nseq.last {eps}) (- 1))")));
    }

    #[test]
    fn concat_folds_with_relocations() {
        let (st, tr) = translate_src(
            "(declare-const a (Seq Int))(declare-const b (Seq Int))(declare-const c (Seq Int))
             (assert (= a (seq.++ b c b)))",
            TranslateOptions::default(),
        );
        let main = *tr.assertions.last().unwrap();
        let printed = st.display(main);
        assert_eq!(
            printed,
            "(= a (nseq.concat (nseq.concat b (nseq.relocate c (+ (nseq.last b) 1))) \
             (nseq.relocate b (+ (nseq.last (nseq.concat b (nseq.relocate c (+ (nseq.last b) 1)))) 1))))"
        );
    }

    #[test]
    fn extract_produces_guarded_slice() {
        let (st, tr) = translate_src(
            "(declare-const s (Seq Int))(declare-const t (Seq Int))
             (assert (= t (seq.extract s 1 2)))",
            TranslateOptions::default(),
        );
        let printed: Vec<String> = tr.assertions.iter().map(|&t| st.display(t)).collect();
        // defining clauses for the ite variable mention both arms
        assert!(printed.iter().any(|p| p.contains("_eps!")), "{printed:?}");
        assert!(printed.iter().any(|p| p.contains("nseq.slice")), "{printed:?}");
        // min clauses pin the slice upper bound
        assert!(printed.iter().any(|p| p.contains("_min!")), "{printed:?}");
    }

    #[test]
    fn extract_relocate_option_reanchors() {
        let (st, tr) = translate_src(
            "(declare-const s (Seq Int))(declare-const t (Seq Int))
             (assert (= t (seq.extract s 1 2)))",
            TranslateOptions { extract_relocate: true },
        );
        let printed: Vec<String> = tr.assertions.iter().map(|&t| st.display(t)).collect();
        assert!(
            printed.iter().any(|p| p.contains("(nseq.relocate (nseq.slice")),
            "{printed:?}"
        );
    }

    #[test]
    fn update_splits_on_overflow() {
        let (st, tr) = translate_src(
            "(declare-const s (Seq Int))(declare-const t (Seq Int))(declare-const u (Seq Int))
             (assert (= u (seq.update s 2 t)))",
            TranslateOptions::default(),
        );
        let printed: Vec<String> = tr.assertions.iter().map(|&t| st.display(t)).collect();
        assert!(printed
            .iter()
            .any(|p| p.contains("(nseq.update s (nseq.slice (nseq.relocate t 2) 2 (nseq.last s)))")));
        assert!(printed.iter().any(|p| p.contains("(nseq.update s (nseq.relocate t 2))")));
    }
}
