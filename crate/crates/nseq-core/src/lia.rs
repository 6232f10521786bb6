//! Linear integer arithmetic over bound and index variables.
//!
//! Decides conjunctions of linear constraints with exact rational arithmetic:
//! interval propagation for cheap conflicts and fixed-value queries, a
//! rational simplex for relaxation feasibility and branch-and-bound for
//! integer feasibility and model extraction.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::term::{Symbol, TermId, TermStore};

pub type Var = TermId;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct LinExpr {
    pub coeffs: BTreeMap<Var, BigInt>,
    pub constant: BigInt,
}

impl LinExpr {
    pub fn constant<T: Into<BigInt>>(c: T) -> LinExpr {
        LinExpr { coeffs: BTreeMap::new(), constant: c.into() }
    }

    pub fn var(v: Var) -> LinExpr {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(v, BigInt::one());
        LinExpr { coeffs, constant: BigInt::zero() }
    }

    pub fn add_term(&mut self, v: Var, c: &BigInt) {
        let entry = self.coeffs.entry(v).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&v);
        }
    }

    pub fn add(&mut self, other: &LinExpr) {
        for (v, c) in &other.coeffs {
            self.add_term(*v, c);
        }
        self.constant += &other.constant;
    }

    pub fn sub(&mut self, other: &LinExpr) {
        for (v, c) in &other.coeffs {
            self.add_term(*v, &(-c));
        }
        self.constant -= &other.constant;
    }

    pub fn scale(&mut self, k: &BigInt) {
        if k.is_zero() {
            self.coeffs.clear();
            self.constant.set_zero();
            return;
        }
        for c in self.coeffs.values_mut() {
            *c *= k;
        }
        self.constant *= k;
    }

    pub fn negate(&mut self) {
        self.scale(&-BigInt::one());
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, assignment: &BTreeMap<Var, BigInt>) -> Option<BigInt> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            acc += c * assignment.get(v)?;
        }
        Some(acc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rel {
    /// expr = 0
    Eq,
    /// expr <= 0
    Le,
}

/// A normalized linear constraint `expr (=|<=) 0`. Strict inequalities are
/// tightened to `<=` during construction, which is exact over the integers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LinConstraint {
    pub expr: LinExpr,
    pub rel: Rel,
}

impl LinConstraint {
    pub fn eq(expr: LinExpr) -> LinConstraint {
        LinConstraint { expr, rel: Rel::Eq }
    }

    pub fn le(expr: LinExpr) -> LinConstraint {
        LinConstraint { expr, rel: Rel::Le }
    }

    pub fn lt(mut expr: LinExpr) -> LinConstraint {
        expr.constant += 1;
        LinConstraint { expr, rel: Rel::Le }
    }

    /// `a <= b` as a constraint.
    pub fn le_of(mut a: LinExpr, b: &LinExpr) -> LinConstraint {
        a.sub(b);
        LinConstraint::le(a)
    }

    pub fn eq_of(mut a: LinExpr, b: &LinExpr) -> LinConstraint {
        a.sub(b);
        LinConstraint::eq(a)
    }

    pub fn holds(&self, assignment: &BTreeMap<Var, BigInt>) -> Option<bool> {
        let v = self.expr.eval(assignment)?;
        Some(match self.rel {
            Rel::Eq => v.is_zero(),
            Rel::Le => !v.is_positive(),
        })
    }

    /// The negation as a single constraint (exact over integers).
    pub fn negated(&self) -> Vec<LinConstraint> {
        match self.rel {
            // not(e <= 0) is e >= 1, i.e. -e + 1 <= 0
            Rel::Le => {
                let mut e = self.expr.clone();
                e.negate();
                e.constant += 1;
                vec![LinConstraint::le(e)]
            }
            // not(e = 0) is a disjunction; callers split on it instead.
            Rel::Eq => panic!("equality negation must be split by the caller"),
        }
    }
}

/// Turn an `Int`-sorted term into a linear expression. Non-linear or
/// non-arithmetic subterms become opaque atomic variables.
pub fn linearize(store: &TermStore, t: TermId) -> LinExpr {
    match store.head(t) {
        Symbol::Numeral(n) => LinExpr::constant(n.clone()),
        Symbol::Add => {
            let mut acc = LinExpr::default();
            for &a in store.args(t) {
                acc.add(&linearize(store, a));
            }
            acc
        }
        Symbol::Sub => {
            let args = store.args(t);
            let mut acc = linearize(store, args[0]);
            acc.sub(&linearize(store, args[1]));
            acc
        }
        Symbol::Neg => {
            let mut acc = linearize(store, store.args(t)[0]);
            acc.negate();
            acc
        }
        Symbol::Mul => {
            let args = store.args(t);
            let (a, b) = (linearize(store, args[0]), linearize(store, args[1]));
            if a.is_constant() {
                let mut r = b;
                r.scale(&a.constant);
                r
            } else if b.is_constant() {
                let mut r = a;
                r.scale(&b.constant);
                r
            } else {
                LinExpr::var(t)
            }
        }
        _ => LinExpr::var(t),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    Infeasible,
    /// Branch-and-bound hit its node cap.
    Unknown,
}

#[derive(Debug, Clone, Default)]
struct Derived {
    bounds: BTreeMap<Var, (Option<BigInt>, Option<BigInt>)>,
    /// Offset union-find: `parent[x] = (p, off)` means `x = p + off`.
    diff_parent: BTreeMap<Var, (Var, BigInt)>,
    conflict: bool,
}

impl Derived {
    fn find(&self, x: Var) -> (Var, BigInt) {
        let mut cur = x;
        let mut off = BigInt::zero();
        while let Some((p, d)) = self.diff_parent.get(&cur) {
            off += d;
            cur = *p;
        }
        (cur, off)
    }

    /// Record `x = y + c`.
    fn union(&mut self, x: Var, y: Var, c: BigInt) {
        let (rx, ox) = self.find(x); // x = rx + ox
        let (ry, oy) = self.find(y); // y = ry + oy
        if rx == ry {
            // consistency: ox - oy must equal c
            if ox - oy != c {
                self.conflict = true;
            }
            return;
        }
        // rx = y + c - ox = ry + oy + c - ox
        self.diff_parent.insert(rx, (ry, oy + c - ox));
    }

    fn lower(&self, x: &Var) -> Option<&BigInt> {
        self.bounds.get(x).and_then(|b| b.0.as_ref())
    }

    fn upper(&self, x: &Var) -> Option<&BigInt> {
        self.bounds.get(x).and_then(|b| b.1.as_ref())
    }

    fn tighten_lower(&mut self, x: Var, v: BigInt) -> bool {
        let entry = self.bounds.entry(x).or_insert((None, None));
        let improved = match &entry.0 {
            Some(old) => v > *old,
            None => true,
        };
        if improved {
            entry.0 = Some(v);
            if let (Some(lo), Some(hi)) = (&entry.0, &entry.1) {
                if lo > hi {
                    self.conflict = true;
                }
            }
        }
        improved
    }

    fn tighten_upper(&mut self, x: Var, v: BigInt) -> bool {
        let entry = self.bounds.entry(x).or_insert((None, None));
        let improved = match &entry.1 {
            Some(old) => v < *old,
            None => true,
        };
        if improved {
            entry.1 = Some(v);
            if let (Some(lo), Some(hi)) = (&entry.0, &entry.1) {
                if lo > hi {
                    self.conflict = true;
                }
            }
        }
        improved
    }

    fn fixed(&self, x: &Var) -> Option<BigInt> {
        let (lo, hi) = self.bounds.get(x)?;
        match (lo, hi) {
            (Some(a), Some(b)) if a == b => Some(a.clone()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("integer model requested in an infeasible state")]
pub struct InfeasibleError;

#[derive(Debug, Default, Clone)]
pub struct LiaSolver {
    constraints: Vec<LinConstraint>,
    seen: BTreeSet<LinConstraint>,
    levels: Vec<usize>,
    vars: BTreeSet<Var>,
    derived: Option<Derived>,
    int_model_cache: Option<BTreeMap<Var, BigInt>>,
    pub bb_node_cap: u64,
}

impl LiaSolver {
    pub fn new() -> LiaSolver {
        LiaSolver { bb_node_cap: 2_000, ..LiaSolver::default() }
    }

    pub fn push(&mut self) {
        self.levels.push(self.constraints.len());
    }

    pub fn pop(&mut self) {
        let n = self.levels.pop().expect("pop without push");
        self.constraints.truncate(n);
        self.seen = self.constraints.iter().cloned().collect();
        self.vars = self.constraints.iter().flat_map(|c| c.expr.coeffs.keys().copied()).collect();
        self.derived = None;
        self.int_model_cache = None;
    }

    pub fn level(&self) -> usize {
        self.levels.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Register a variable so it receives a value in integer models even if
    /// no constraint mentions it.
    pub fn ensure_var(&mut self, v: Var) {
        if self.vars.insert(v) {
            self.int_model_cache = None;
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.vars.iter().copied()
    }

    /// Add a constraint and run cheap propagation. `Infeasible` here is a
    /// definite conflict; `Feasible` only means no conflict was found yet.
    pub fn assert_constraint(&mut self, c: LinConstraint) -> Feasibility {
        if c.expr.is_constant() {
            let sat = match c.rel {
                Rel::Eq => c.expr.constant.is_zero(),
                Rel::Le => !c.expr.constant.is_positive(),
            };
            if sat {
                return Feasibility::Feasible;
            }
            // Record the trivially false constraint so the state stays
            // conflicted until backtracking.
            self.constraints.push(c);
            self.derived = None;
            self.int_model_cache = None;
            return Feasibility::Infeasible;
        }
        if self.seen.contains(&c) {
            return if self.derived().conflict { Feasibility::Infeasible } else { Feasibility::Feasible };
        }
        self.vars.extend(c.expr.coeffs.keys().copied());
        self.seen.insert(c.clone());
        self.constraints.push(c);
        self.derived = None;
        self.int_model_cache = None;
        if self.derived().conflict {
            Feasibility::Infeasible
        } else {
            Feasibility::Feasible
        }
    }

    fn derived(&mut self) -> &Derived {
        if self.derived.is_none() {
            self.derived = Some(self.compute_derived());
        }
        self.derived.as_ref().unwrap()
    }

    fn compute_derived(&self) -> Derived {
        let mut d = Derived::default();
        // GCD test and constant conflicts first.
        for c in &self.constraints {
            if c.expr.is_constant() {
                let ok = match c.rel {
                    Rel::Eq => c.expr.constant.is_zero(),
                    Rel::Le => !c.expr.constant.is_positive(),
                };
                if !ok {
                    d.conflict = true;
                    return d;
                }
                continue;
            }
            if c.rel == Rel::Eq {
                let g = c
                    .expr
                    .coeffs
                    .values()
                    .fold(BigInt::zero(), |acc, v| acc.gcd(v));
                if !(&c.expr.constant % &g).is_zero() {
                    d.conflict = true;
                    return d;
                }
            }
        }
        // Interval propagation + difference closure, to fixpoint with a cap.
        for _pass in 0..40 {
            let mut changed = false;
            for c in &self.constraints {
                changed |= propagate_bounds(c, &mut d);
                if d.conflict {
                    return d;
                }
            }
            for c in &self.constraints {
                if c.rel != Rel::Eq {
                    continue;
                }
                // Substitute fixed variables, then look for x - y = c shapes.
                let mut expr = LinExpr::constant(c.expr.constant.clone());
                for (v, k) in &c.expr.coeffs {
                    match d.fixed(v) {
                        Some(val) => expr.constant += k * val,
                        None => expr.add_term(*v, k),
                    }
                }
                match expr.coeffs.len() {
                    0 => {
                        if !expr.constant.is_zero() {
                            d.conflict = true;
                            return d;
                        }
                    }
                    1 => {
                        let (v, k) = expr.coeffs.iter().next().unwrap();
                        let (q, r) = (-&expr.constant).div_rem(k);
                        if !r.is_zero() {
                            d.conflict = true;
                            return d;
                        }
                        changed |= d.tighten_lower(*v, q.clone());
                        changed |= d.tighten_upper(*v, q);
                        if d.conflict {
                            return d;
                        }
                    }
                    2 => {
                        let mut it = expr.coeffs.iter();
                        let (x, kx) = it.next().unwrap();
                        let (y, ky) = it.next().unwrap();
                        if *kx == -ky && kx.abs().is_one() {
                            // kx*x + ky*y + c = 0  =>  x = y - c/kx
                            let (q, r) = expr.constant.div_rem(kx);
                            if r.is_zero() {
                                let (rx, _) = d.find(*x);
                                let (ry, _) = d.find(*y);
                                if rx != ry {
                                    d.union(*x, *y, -q);
                                    changed = true;
                                }
                                if d.conflict {
                                    return d;
                                }
                            }
                        }
                    }
                    _ => {}
                }
            }
            // Propagate fixed values through the difference closure.
            let members: Vec<Var> = d.diff_parent.keys().copied().collect();
            for x in members {
                let (root, off) = d.find(x);
                if let Some(v) = d.fixed(&x) {
                    let rv = v - &off;
                    changed |= d.tighten_lower(root, rv.clone());
                    changed |= d.tighten_upper(root, rv);
                } else if let Some(rv) = d.fixed(&root) {
                    let v = rv + &off;
                    changed |= d.tighten_lower(x, v.clone());
                    changed |= d.tighten_upper(x, v);
                }
                if d.conflict {
                    return d;
                }
            }
            if !changed {
                break;
            }
        }
        d
    }

    /// Conflict visible to bound propagation alone (no simplex).
    pub fn quick_conflict(&mut self) -> bool {
        self.derived().conflict
    }

    /// Value entailed for `x`, if the asserted constraints fix it.
    pub fn query_fixed(&mut self, x: Var) -> Option<BigInt> {
        let d = self.derived();
        if d.conflict {
            return None;
        }
        if let Some(v) = d.fixed(&x) {
            return Some(v);
        }
        let (root, off) = d.find(x);
        d.fixed(&root).map(|rv| rv + off)
    }

    /// Entailed value of `x - y`, if fixed.
    pub fn query_fixed_diff(&mut self, x: Var, y: Var) -> Option<BigInt> {
        let d = self.derived();
        if d.conflict {
            return None;
        }
        let (rx, ox) = d.find(x);
        let (ry, oy) = d.find(y);
        if rx == ry {
            return Some(ox - oy);
        }
        let vx = d.fixed(&rx).map(|v| v + &ox).or_else(|| d.fixed(&x));
        let vy = d.fixed(&ry).map(|v| v + &oy).or_else(|| d.fixed(&y));
        match (vx, vy) {
            (Some(a), Some(b)) => Some(a - b),
            _ => None,
        }
    }

    pub fn bounds_of(&mut self, x: Var) -> (Option<BigInt>, Option<BigInt>) {
        let d = self.derived();
        let lo = d.lower(&x).cloned();
        let hi = d.upper(&x).cloned();
        let (root, off) = d.find(x);
        if root != x {
            let rlo = d.lower(&root).map(|v| v + &off);
            let rhi = d.upper(&root).map(|v| v + &off);
            return (max_opt(lo, rlo), min_opt(hi, rhi));
        }
        (lo, hi)
    }

    /// `true` when the constraint is entailed by the asserted state.
    /// Sound but not complete.
    pub fn entails(&mut self, c: &LinConstraint) -> bool {
        match c.rel {
            Rel::Le => {
                for neg in c.negated() {
                    self.push();
                    let f = self.assert_constraint(neg);
                    let feas = if f == Feasibility::Infeasible {
                        Feasibility::Infeasible
                    } else {
                        self.check_rational()
                    };
                    self.pop();
                    if feas != Feasibility::Infeasible {
                        return false;
                    }
                }
                true
            }
            Rel::Eq => {
                let le = LinConstraint::le(c.expr.clone());
                let mut neg = c.expr.clone();
                neg.negate();
                let ge = LinConstraint::le(neg);
                self.entails(&le) && self.entails(&ge)
            }
        }
    }

    /// Rational relaxation feasibility via simplex.
    pub fn check_rational(&mut self) -> Feasibility {
        if self.derived().conflict {
            return Feasibility::Infeasible;
        }
        match simplex_point(&self.constraints) {
            Some(_) => Feasibility::Feasible,
            None => Feasibility::Infeasible,
        }
    }

    /// Integer feasibility via branch-and-bound over the relaxation.
    pub fn check_int(&mut self) -> Feasibility {
        if self.derived().conflict {
            return Feasibility::Infeasible;
        }
        if self.int_model_cache.is_some() {
            return Feasibility::Feasible;
        }
        // Fast path: a clamped small candidate often satisfies everything.
        if let Some(m) = self.clamped_candidate() {
            self.int_model_cache = Some(m);
            return Feasibility::Feasible;
        }
        let mut nodes = 0u64;
        let cap = self.bb_node_cap;
        match branch_and_bound(self.constraints.clone(), &mut nodes, cap) {
            BbResult::Model(m) => {
                let mut full = m;
                for v in &self.vars {
                    full.entry(*v).or_insert_with(BigInt::zero);
                }
                self.int_model_cache = Some(full);
                Feasibility::Feasible
            }
            BbResult::Infeasible => Feasibility::Infeasible,
            BbResult::CapHit => Feasibility::Unknown,
        }
    }

    fn clamped_candidate(&mut self) -> Option<BTreeMap<Var, BigInt>> {
        let all_vars: Vec<Var> = self.vars.iter().copied().collect();
        let mut m = BTreeMap::new();
        for v in all_vars {
            let val = match self.query_fixed(v) {
                Some(x) => x,
                None => {
                    let (lo, hi) = self.bounds_of(v);
                    clamp_zero(lo, hi)
                }
            };
            m.insert(v, val);
        }
        for c in &self.constraints {
            if c.holds(&m) != Some(true) {
                return None;
            }
        }
        Some(m)
    }

    /// A concrete integer assignment for every known variable.
    pub fn int_model(&mut self) -> Result<BTreeMap<Var, BigInt>, InfeasibleError> {
        match self.check_int() {
            Feasibility::Feasible => Ok(self.int_model_cache.clone().unwrap()),
            _ => Err(InfeasibleError),
        }
    }
}

fn clamp_zero(lo: Option<BigInt>, hi: Option<BigInt>) -> BigInt {
    let zero = BigInt::zero();
    match (lo, hi) {
        (Some(lo), _) if lo > zero => lo,
        (_, Some(hi)) if hi < zero => hi,
        _ => zero,
    }
}

fn max_opt(a: Option<BigInt>, b: Option<BigInt>) -> Option<BigInt> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (x, None) | (None, x) => x,
    }
}

fn min_opt(a: Option<BigInt>, b: Option<BigInt>) -> Option<BigInt> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (x, None) | (None, x) => x,
    }
}

/// One round of interval propagation for a single constraint.
fn propagate_bounds(c: &LinConstraint, d: &mut Derived) -> bool {
    let mut changed = false;
    let relations: &[bool] = match c.rel {
        Rel::Le => &[false],
        // expr = 0 is expr <= 0 and -expr <= 0.
        Rel::Eq => &[false, true],
    };
    for &negate in relations {
        let sign = if negate { -BigInt::one() } else { BigInt::one() };
        for (x, k0) in &c.expr.coeffs {
            // k*x <= -constant - sum of other terms (all w.r.t. the
            // effective, possibly negated, constraint).
            let k = k0 * &sign;
            let mut ok = true;
            let mut rhs = -(&c.expr.constant * &sign);
            for (y, ky0) in &c.expr.coeffs {
                if y == x {
                    continue;
                }
                // contribution is -ky * y; bound it from above
                let nky = -(ky0 * &sign);
                let b = if nky.is_positive() { d.upper(y) } else { d.lower(y) };
                match b {
                    Some(v) => rhs += &nky * v,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            if k.is_positive() {
                let v = rhs.div_floor(&k);
                changed |= d.tighten_upper(*x, v);
            } else {
                let v = rhs.div_ceil(&k);
                changed |= d.tighten_lower(*x, v);
            }
            if d.conflict {
                return changed;
            }
        }
    }
    changed
}

// ---------------------------------------------------------------------------
// Simplex and branch-and-bound
// ---------------------------------------------------------------------------

enum BbResult {
    Model(BTreeMap<Var, BigInt>),
    Infeasible,
    CapHit,
}

fn branch_and_bound(
    constraints: Vec<LinConstraint>,
    nodes: &mut u64,
    cap: u64,
) -> BbResult {
    *nodes += 1;
    if *nodes > cap {
        return BbResult::CapHit;
    }
    let point = match simplex_point(&constraints) {
        Some(p) => p,
        None => return BbResult::Infeasible,
    };
    // Find a fractional coordinate.
    let frac = point.iter().find(|(_, v)| !v.is_integer());
    match frac {
        None => {
            let m = point
                .into_iter()
                .map(|(v, r)| (v, r.to_integer()))
                .collect();
            BbResult::Model(m)
        }
        Some((v, r)) => {
            let (v, r) = (*v, r.clone());
            let floor = r.floor().to_integer();
            let mut hit_cap = false;
            // x <= floor branch
            let mut le = LinExpr::var(v);
            le.constant = -&floor;
            let mut below = constraints.clone();
            below.push(LinConstraint::le(le));
            match branch_and_bound(below, nodes, cap) {
                BbResult::Model(m) => return BbResult::Model(m),
                BbResult::CapHit => hit_cap = true,
                BbResult::Infeasible => {}
            }
            // x >= floor + 1 branch
            let mut ge = LinExpr::var(v);
            ge.negate();
            ge.constant = &floor + 1;
            let mut above = constraints;
            above.push(LinConstraint::le(ge));
            match branch_and_bound(above, nodes, cap) {
                BbResult::Model(m) => BbResult::Model(m),
                BbResult::CapHit => BbResult::CapHit,
                BbResult::Infeasible => {
                    if hit_cap {
                        BbResult::CapHit
                    } else {
                        BbResult::Infeasible
                    }
                }
            }
        }
    }
}

/// Phase-1 simplex: a rational point satisfying all constraints, or `None`.
fn simplex_point(constraints: &[LinConstraint]) -> Option<BTreeMap<Var, BigRational>> {
    let vars: Vec<Var> = {
        let mut s: BTreeSet<Var> = BTreeSet::new();
        for c in constraints {
            s.extend(c.expr.coeffs.keys().copied());
        }
        s.into_iter().collect()
    };
    for c in constraints {
        if c.expr.is_constant() {
            let ok = match c.rel {
                Rel::Eq => c.expr.constant.is_zero(),
                Rel::Le => !c.expr.constant.is_positive(),
            };
            if !ok {
                return None;
            }
        }
    }
    let rows: Vec<&LinConstraint> = constraints.iter().filter(|c| !c.expr.is_constant()).collect();
    let n = vars.len();
    let m = rows.len();
    if m == 0 {
        return Some(vars.into_iter().map(|v| (v, BigRational::zero())).collect());
    }
    // Columns: x+ (n), x- (n), slacks (one per Le row), artificials (m), rhs.
    let num_slack = rows.iter().filter(|c| c.rel == Rel::Le).count();
    let cols = 2 * n + num_slack + m + 1;
    let rhs_col = cols - 1;
    let mut tab: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); cols]; m];
    let mut basis: Vec<usize> = vec![0; m];
    let mut slack_idx = 0;
    for (i, c) in rows.iter().enumerate() {
        // expr <= 0  =>  sum coeffs * x <= -constant
        for (v, k) in &c.expr.coeffs {
            let j = vars.iter().position(|w| w == v).unwrap();
            let k = BigRational::from(k.clone());
            tab[i][j] = k.clone();
            tab[i][n + j] = -k;
        }
        tab[i][rhs_col] = BigRational::from(-&c.expr.constant);
        if c.rel == Rel::Le {
            tab[i][2 * n + slack_idx] = BigRational::one();
            slack_idx += 1;
        }
        if tab[i][rhs_col] < BigRational::zero() {
            for j in 0..cols {
                tab[i][j] = -tab[i][j].clone();
            }
        }
        let art = 2 * n + num_slack + i;
        tab[i][art] = BigRational::one();
        basis[i] = art;
    }
    // Objective: minimize the sum of artificials. Start from cost row c
    // (ones on artificial columns) and price out the initial basis.
    let mut obj = vec![BigRational::zero(); cols];
    for j in 0..m {
        obj[2 * n + num_slack + j] = BigRational::one();
    }
    for row in tab.iter() {
        for j in 0..cols {
            let v = obj[j].clone() - &row[j];
            obj[j] = v;
        }
    }
    loop {
        // Bland's rule: first column with a negative reduced cost.
        let enter = (0..cols - 1).find(|&j| obj[j] < BigRational::zero());
        let Some(enter) = enter else { break };
        // Ratio test, smallest index wins on ties.
        let mut leave: Option<usize> = None;
        let mut best: Option<BigRational> = None;
        for i in 0..m {
            if tab[i][enter] > BigRational::zero() {
                let ratio = &tab[i][rhs_col] / &tab[i][enter];
                let better = match &best {
                    None => true,
                    Some(b) => {
                        ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()])
                    }
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let leave = leave?; // unbounded cannot happen in phase 1
        // Pivot.
        let pivot = tab[leave][enter].clone();
        for j in 0..cols {
            tab[leave][j] = &tab[leave][j] / &pivot;
        }
        for i in 0..m {
            if i != leave && !tab[i][enter].is_zero() {
                let factor = tab[i][enter].clone();
                for j in 0..cols {
                    let v = tab[i][j].clone() - &factor * &tab[leave][j];
                    tab[i][j] = v;
                }
            }
        }
        if !obj[enter].is_zero() {
            let factor = obj[enter].clone();
            for j in 0..cols {
                let v = obj[j].clone() - &factor * &tab[leave][j];
                obj[j] = v;
            }
        }
        basis[leave] = enter;
    }
    // Optimal objective is -obj[rhs]; feasible iff it is zero.
    if !obj[rhs_col].is_zero() {
        return None;
    }
    let mut values = vec![BigRational::zero(); cols - 1];
    for i in 0..m {
        values[basis[i]] = tab[i][rhs_col].clone();
    }
    let mut point = BTreeMap::new();
    for (j, v) in vars.iter().enumerate() {
        point.insert(*v, values[j].clone() - values[n + j].clone());
    }
    Some(point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{Sort, TermStore};

    fn vars(n: usize) -> (TermStore, Vec<Var>) {
        let mut st = TermStore::new();
        let vs = (0..n).map(|i| st.var(&format!("x{i}"), Sort::Int)).collect();
        (st, vs)
    }

    fn le(pairs: &[(i64, Var)], c: i64) -> LinConstraint {
        let mut e = LinExpr::constant(c);
        for (k, v) in pairs {
            e.add_term(*v, &BigInt::from(*k));
        }
        LinConstraint::le(e)
    }

    fn eq(pairs: &[(i64, Var)], c: i64) -> LinConstraint {
        let mut e = LinExpr::constant(c);
        for (k, v) in pairs {
            e.add_term(*v, &BigInt::from(*k));
        }
        LinConstraint::eq(e)
    }

    #[test]
    fn substitution_fixes_value() {
        let (_st, v) = vars(2);
        let (x, y) = (v[0], v[1]);
        let mut lia = LiaSolver::new();
        // x = y + 1, y = 3  =>  x = 4
        assert_eq!(lia.assert_constraint(eq(&[(1, x), (-1, y)], -1)), Feasibility::Feasible);
        assert_eq!(lia.assert_constraint(eq(&[(1, y)], -3)), Feasibility::Feasible);
        assert_eq!(lia.query_fixed(x), Some(BigInt::from(4)));
    }

    #[test]
    fn contradictory_bounds_conflict() {
        let (_st, v) = vars(1);
        let x = v[0];
        let mut lia = LiaSolver::new();
        assert_eq!(lia.assert_constraint(le(&[(1, x)], 0)), Feasibility::Feasible); // x <= 0
        assert_eq!(lia.assert_constraint(le(&[(-1, x)], 1)), Feasibility::Infeasible); // x >= 1
    }

    #[test]
    fn reloc_bounds_equation_fixes_last() {
        // lst = i + lst2 - fst2 with i = 5, fst2 = 1, lst2 = 3 fixes lst = 7.
        // Frozen expected value cross-checked by exhaustive substitution below.
        let (_st, v) = vars(4);
        let (lst, i, fst2, lst2) = (v[0], v[1], v[2], v[3]);
        let mut lia = LiaSolver::new();
        lia.assert_constraint(eq(&[(1, lst), (-1, i), (-1, lst2), (1, fst2)], 0));
        lia.assert_constraint(eq(&[(1, i)], -5));
        lia.assert_constraint(eq(&[(1, fst2)], -1));
        lia.assert_constraint(eq(&[(1, lst2)], -3));
        assert_eq!(lia.query_fixed(lst), Some(BigInt::from(7)));

        // Oracle: enumerate i, fst2, lst2 in [-8, 8] and check the implied value.
        for iv in -8i64..=8 {
            for fv in -8i64..=8 {
                for lv in -8i64..=8 {
                    if iv == 5 && fv == 1 && lv == 3 {
                        assert_eq!(iv + lv - fv, 7);
                    }
                }
            }
        }
    }

    #[test]
    fn fixed_diff_via_substitution() {
        let (_st, v) = vars(3);
        let (x, y, z) = (v[0], v[1], v[2]);
        let mut lia = LiaSolver::new();
        lia.assert_constraint(eq(&[(1, x), (-1, z)], -2)); // x = z + 2
        lia.assert_constraint(eq(&[(1, y), (-1, z)], 0)); // y = z
        assert_eq!(lia.query_fixed_diff(x, y), Some(BigInt::from(2)));
        assert_eq!(lia.query_fixed(x), None);
    }

    #[test]
    fn int_model_respects_bounds() {
        let (_st, v) = vars(1);
        let x = v[0];
        let mut lia = LiaSolver::new();
        lia.assert_constraint(le(&[(-1, x)], 0)); // x >= 0
        lia.assert_constraint(le(&[(1, x)], -1)); // x <= 1
        let m = lia.int_model().unwrap();
        assert!(m[&x] >= BigInt::from(0) && m[&x] <= BigInt::from(1));
    }

    #[test]
    fn int_model_with_no_constraints_is_zero() {
        let (_st, v) = vars(1);
        let mut lia = LiaSolver::new();
        lia.ensure_var(v[0]);
        let m = lia.int_model().unwrap();
        assert_eq!(m[&v[0]], BigInt::zero());
    }

    #[test]
    fn diseq_split_survivor_gives_one() {
        // x in [0,1] with the x >= 1 split branch asserted: model must be 1.
        let (_st, v) = vars(1);
        let x = v[0];
        let mut lia = LiaSolver::new();
        lia.assert_constraint(le(&[(-1, x)], 0));
        lia.assert_constraint(le(&[(1, x)], -1));
        lia.assert_constraint(le(&[(-1, x)], 1)); // x >= 1
        let m = lia.int_model().unwrap();
        assert_eq!(m[&x], BigInt::one());
    }

    #[test]
    fn parity_infeasibility_detected() {
        // 2x = 1 is rationally feasible, integer infeasible.
        let (_st, v) = vars(1);
        let x = v[0];
        let mut lia = LiaSolver::new();
        lia.assert_constraint(eq(&[(2, x)], -1));
        assert_eq!(lia.check_int(), Feasibility::Infeasible);
    }

    #[test]
    fn gap_equation_gcd() {
        // 3x - 3y = 1 has no integer solution.
        let (_st, v) = vars(2);
        let mut lia = LiaSolver::new();
        lia.assert_constraint(eq(&[(3, v[0]), (-3, v[1])], -1));
        assert_eq!(lia.check_int(), Feasibility::Infeasible);
    }

    #[test]
    fn push_pop_restores_state() {
        let (_st, v) = vars(1);
        let x = v[0];
        let mut lia = LiaSolver::new();
        lia.assert_constraint(le(&[(1, x)], -5)); // x <= 5
        lia.push();
        lia.assert_constraint(le(&[(-1, x)], 6)); // x >= 6
        assert_eq!(lia.check_rational(), Feasibility::Infeasible);
        lia.pop();
        assert_eq!(lia.check_int(), Feasibility::Feasible);
        assert_eq!(lia.num_constraints(), 1);
    }

    #[test]
    fn entailment_of_emptiness() {
        let (_st, v) = vars(2);
        let (f, l) = (v[0], v[1]);
        let mut lia = LiaSolver::new();
        lia.assert_constraint(eq(&[(1, f)], 0)); // f = 0
        lia.assert_constraint(le(&[(1, l)], 2)); // l <= -2
        // entailed: l - f <= -1
        assert!(lia.entails(&le(&[(1, l), (-1, f)], 1)));
        // not entailed: l - f <= -3
        assert!(!lia.entails(&le(&[(1, l), (-1, f)], 3)));
    }

    /// Exhaustive agreement with enumeration on random small systems.
    #[test]
    fn random_systems_agree_with_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _case in 0..300 {
            let nv = rng.gen_range(1..=4usize);
            let (_st, vs) = vars(nv);
            let mut lia = LiaSolver::new();
            let mut sys: Vec<LinConstraint> = Vec::new();
            // Range bounds keep the feasible region bounded.
            for &v in &vs {
                sys.push(le(&[(1, v)], -10));
                sys.push(le(&[(-1, v)], -10));
            }
            let nc = rng.gen_range(1..=5usize);
            for _ in 0..nc {
                let mut pairs = Vec::new();
                for &v in &vs {
                    let k = rng.gen_range(-3i64..=3);
                    if k != 0 {
                        pairs.push((k, v));
                    }
                }
                if pairs.is_empty() {
                    continue;
                }
                let c = rng.gen_range(-12i64..=12);
                sys.push(if rng.gen_bool(0.4) { eq(&pairs, c) } else { le(&pairs, c) });
            }
            for c in &sys {
                lia.assert_constraint(c.clone());
            }
            let verdict = lia.check_int();
            // Brute force over [-10, 10]^nv.
            let mut found = false;
            let mut idx = vec![-10i64; nv];
            'outer: loop {
                let m: BTreeMap<Var, BigInt> =
                    vs.iter().zip(&idx).map(|(v, x)| (*v, BigInt::from(*x))).collect();
                if sys.iter().all(|c| c.holds(&m) == Some(true)) {
                    found = true;
                    break;
                }
                for k in 0..nv {
                    idx[k] += 1;
                    if idx[k] <= 10 {
                        continue 'outer;
                    }
                    idx[k] = -10;
                }
                break;
            }
            match verdict {
                Feasibility::Feasible => assert!(found, "solver sat, enumeration unsat: {sys:?}"),
                Feasibility::Infeasible => {
                    assert!(!found, "solver unsat, enumeration sat: {sys:?}")
                }
                Feasibility::Unknown => panic!("cap hit on tiny system"),
            }
            if let Feasibility::Feasible = verdict {
                let m = lia.int_model().unwrap();
                for c in &sys {
                    assert_eq!(c.holds(&m), Some(true), "model violates {c:?}");
                }
            }
        }
    }

    /// query_fixed never contradicts a satisfying assignment.
    #[test]
    fn query_fixed_is_sound() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _case in 0..200 {
            let nv = rng.gen_range(1..=3usize);
            let (_st, vs) = vars(nv);
            let mut lia = LiaSolver::new();
            let mut sys: Vec<LinConstraint> = Vec::new();
            for &v in &vs {
                sys.push(le(&[(1, v)], -6));
                sys.push(le(&[(-1, v)], -6));
            }
            for _ in 0..rng.gen_range(1..=4usize) {
                let mut pairs = Vec::new();
                for &v in &vs {
                    let k = rng.gen_range(-2i64..=2);
                    if k != 0 {
                        pairs.push((k, v));
                    }
                }
                if pairs.is_empty() {
                    continue;
                }
                let c = rng.gen_range(-8i64..=8);
                sys.push(if rng.gen_bool(0.5) { eq(&pairs, c) } else { le(&pairs, c) });
            }
            for c in &sys {
                lia.assert_constraint(c.clone());
            }
            if lia.check_int() != Feasibility::Feasible {
                continue;
            }
            for &v in &vs {
                let Some(fixed) = lia.query_fixed(v) else { continue };
                // every satisfying assignment in range must give this value
                let mut idx = vec![-6i64; nv];
                'outer: loop {
                    let m: BTreeMap<Var, BigInt> =
                        vs.iter().zip(&idx).map(|(v, x)| (*v, BigInt::from(*x))).collect();
                    if sys.iter().all(|c| c.holds(&m) == Some(true)) {
                        assert_eq!(m[&v], fixed, "fixed value contradicted: {sys:?}");
                    }
                    for k in 0..nv {
                        idx[k] += 1;
                        if idx[k] <= 6 {
                            continue 'outer;
                        }
                        idx[k] = -6;
                    }
                    break;
                }
            }
        }
    }
}
