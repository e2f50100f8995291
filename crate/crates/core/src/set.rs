//! Definable sets: finite unions of guarded, binder-carrying entries.
//!
//! An entry `e : φ for x̄` denotes `{ e[v] | v a valuation of x̄ with φ[v] }`;
//! its binders scope over both the element and the guard. A set denotes the
//! union of its entries. Representations are not canonical, so semantic
//! equality is the formula [`DefinableSet::eq_set`], not `==`.
//!
//! Entries are kept in a normal form:
//!
//! * guards are quantifier-free and `⊥` entries are dropped;
//! * a binder fixed by a top-level equation `x = t` in the guard is replaced
//!   by `t`;
//! * binders absent from the element are quantified into the guard;
//! * binders are renamed `x, y, z, …` in order of first occurrence in the
//!   element, skipping the entry's free variables;
//! * entries with the same element and binders are merged by disjoining
//!   their guards.
//!
//! Before an entry is combined with anything from outside (a closure, a
//! context, another entry) its binders are replaced by fresh variables, so
//! capture cannot happen.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::env::Env;
use crate::error::{Error, Result};
use crate::formula::{Formula, Relation, Renaming, Variable};
use crate::nominal::{Atom, Conditional, Maybe, Nominal, Variants};
use crate::theory::{AtomTheory, Eliminator};

const BINDER_NAMES: &[&str] = &["x", "y", "z", "w", "v", "u", "s", "t", "p", "q", "r"];

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetEntry<T> {
    element: T,
    guard: Formula,
    binders: Vec<Variable>,
}

impl<T: Nominal> SetEntry<T> {
    /// Normalized entry; `None` when the guard is syntactically false.
    pub fn new(element: T, guard: Formula, binders: Vec<Variable>) -> Option<Self> {
        normalize(element, guard, binders)
    }

    pub fn element(&self) -> &T {
        &self.element
    }

    pub fn guard(&self) -> &Formula {
        &self.guard
    }

    pub fn binders(&self) -> &[Variable] {
        &self.binders
    }

    fn is_bound(&self, v: &Variable) -> bool {
        self.binders.contains(v)
    }

    pub fn free_variables(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.element.visit_variables(&mut |v| {
            if !self.is_bound(v) {
                out.insert(v.clone());
            }
        });
        self.guard.for_each_free(&mut |v| {
            if !self.is_bound(v) {
                out.insert(v.clone());
            }
        });
        out
    }

    /// Element, guard and binders with the binders replaced by fresh
    /// variables.
    pub fn open(&self) -> (T, Formula, Vec<Variable>) {
        if self.binders.is_empty() {
            return (self.element.clone(), self.guard.clone(), Vec::new());
        }
        let fresh: Vec<Variable> = self.binders.iter().map(|_| Variable::fresh()).collect();
        let renaming: Renaming = self.binders.iter().cloned().zip(fresh.iter().cloned()).collect();
        (
            self.element.map_variables(&renaming),
            self.guard.substitute(&renaming),
            fresh,
        )
    }

    /// `∃x̄. φ` for this entry.
    fn closed_guard(&self) -> Formula {
        Formula::exists_all(&self.binders, self.guard.clone())
    }

    fn map_variables(&self, renaming: &Renaming) -> Option<Self> {
        let free = self.free_variables();
        let relevant: Renaming = renaming
            .iter()
            .filter(|(k, _)| free.contains(*k))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        if relevant.is_empty() {
            return Some(self.clone());
        }
        let (element, guard, binders) = self.open();
        normalize(
            element.map_variables(&relevant),
            guard.substitute(&relevant),
            binders,
        )
    }

    fn fmt_entry(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.element.fmt_value(f)?;
        write!(f, " : {}", self.guard)?;
        if !self.binders.is_empty() {
            f.write_str(" for ")?;
            for (i, b) in self.binders.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{b}")?;
            }
        }
        Ok(())
    }
}

/// Eliminates quantifiers from a guard. Formulas without `≤` mean the same
/// in every infinite structure, so the relations used pick the procedure.
fn eliminate_in_guard(phi: &Formula) -> Formula {
    let theory = if phi.mentions_relation(Relation::Leq) {
        AtomTheory::Ordered
    } else {
        AtomTheory::Equality
    };
    Eliminator::new(theory).eliminate(phi)
}

fn normalize<T: Nominal>(
    mut element: T,
    guard: Formula,
    mut binders: Vec<Variable>,
) -> Option<SetEntry<T>> {
    let mut guard = guard.simplify();
    if !guard.is_quantifier_free() {
        guard = eliminate_in_guard(&guard);
    }
    let mut seen = BTreeSet::new();
    binders.retain(|b| seen.insert(b.clone()));

    // binders fixed by an equation
    loop {
        if guard.is_false() {
            return None;
        }
        let fixed = guard.conjuncts().iter().find_map(|c| match c {
            Formula::Rel(Relation::Eq, a, b) if binders.contains(a) => Some((a.clone(), b.clone())),
            Formula::Rel(Relation::Eq, a, b) if binders.contains(b) => Some((b.clone(), a.clone())),
            _ => None,
        });
        let Some((bound, term)) = fixed else { break };
        let renaming = Renaming::from([(bound.clone(), term)]);
        element = element.map_variables(&renaming);
        guard = guard.substitute(&renaming);
        binders.retain(|b| *b != bound);
    }

    let mut order = Vec::new();
    element.visit_variables(&mut |v| {
        if binders.contains(v) && !order.contains(v) {
            order.push(v.clone());
        }
    });
    let guard_only: Vec<Variable> = binders
        .iter()
        .filter(|b| !order.contains(b) && guard.has_free(b))
        .cloned()
        .collect();
    if !guard_only.is_empty() {
        guard = eliminate_in_guard(&Formula::exists_all(&guard_only, guard));
        if guard.is_false() {
            return None;
        }
    }
    let binders = order;

    let mut free = BTreeSet::new();
    element.visit_variables(&mut |v| {
        if !binders.contains(v) {
            free.insert(v.clone());
        }
    });
    guard.for_each_free(&mut |v| {
        if !binders.contains(v) {
            free.insert(v.clone());
        }
    });
    let names: Vec<Variable> = canonical_names()
        .filter(|n| !free.contains(n))
        .take(binders.len())
        .collect();
    let renaming: Renaming = binders
        .iter()
        .cloned()
        .zip(names.iter().cloned())
        .filter(|(b, n)| b != n)
        .collect();
    if !renaming.is_empty() {
        element = element.map_variables(&renaming);
        guard = guard.substitute(&renaming);
    }
    Some(SetEntry {
        element,
        guard,
        binders: names,
    })
}

fn canonical_names() -> impl Iterator<Item = Variable> {
    BINDER_NAMES
        .iter()
        .map(|n| Variable::named(n))
        .chain((1..).map(|i| Variable::named(&format!("x{i}"))))
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DefinableSet<T> {
    entries: Vec<SetEntry<T>>,
}

impl<T: Nominal> Default for DefinableSet<T> {
    fn default() -> Self {
        DefinableSet::empty()
    }
}

/// The set of all atoms, `{x : ⊤ for x}`.
pub fn atoms() -> DefinableSet<Atom> {
    let x = Variable::fresh();
    DefinableSet::build([(Atom::pure(x.clone()), Formula::True, vec![x])])
}

/// All lists of `n` atoms, built by nesting `map` and `sum` over [`atoms`].
pub fn atom_tuples(env: &Env, n: usize) -> Result<DefinableSet<Vec<Atom>>> {
    if n == 0 {
        return Ok(DefinableSet::singleton(Vec::new()));
    }
    let rest = atom_tuples(env, n - 1)?;
    let nested = atoms().map(env, |env, x| {
        rest.map(env, |_, tail| {
            let mut tuple = Vec::with_capacity(tail.len() + 1);
            tuple.push(x.clone());
            tuple.extend(tail.iter().cloned());
            Ok(tuple)
        })
    })?;
    Ok(DefinableSet::sum(&nested))
}

impl<T: Nominal> DefinableSet<T> {
    pub fn empty() -> Self {
        DefinableSet {
            entries: Vec::new(),
        }
    }

    /// Builds a set from raw entries, dissolving variants and normalizing.
    pub fn build(raw: impl IntoIterator<Item = (T, Formula, Vec<Variable>)>) -> Self {
        let mut normalized = Vec::new();
        for (element, guard, binders) in raw {
            for (part, condition) in element.split_variants() {
                let guard = Formula::and([guard.clone(), condition]);
                normalized.extend(normalize(part, guard, binders.clone()));
            }
        }
        DefinableSet::from_normalized(normalized)
    }

    fn from_normalized(entries: Vec<SetEntry<T>>) -> Self {
        let mut grouped: BTreeMap<(T, Vec<Variable>), Vec<Formula>> = BTreeMap::new();
        for entry in entries {
            grouped
                .entry((entry.element, entry.binders))
                .or_default()
                .push(entry.guard);
        }
        let mut entries: Vec<SetEntry<T>> = grouped
            .into_iter()
            .filter_map(|((element, binders), guards)| {
                let guard = Formula::or(guards);
                (!guard.is_false()).then_some(SetEntry {
                    element,
                    guard,
                    binders,
                })
            })
            .collect();
        entries.sort();
        DefinableSet { entries }
    }

    pub fn singleton(x: T) -> Self {
        DefinableSet::build([(x, Formula::True, Vec::new())])
    }

    pub fn from_list(xs: impl IntoIterator<Item = T>) -> Self {
        DefinableSet::build(xs.into_iter().map(|x| (x, Formula::True, Vec::new())))
    }

    pub fn entries(&self) -> &[SetEntry<T>] {
        &self.entries
    }

    pub fn insert(&self, x: T) -> Self {
        self.union(&DefinableSet::singleton(x))
    }

    pub fn union(&self, other: &Self) -> Self {
        DefinableSet::from_normalized(
            self.entries
                .iter()
                .chain(&other.entries)
                .cloned()
                .collect(),
        )
    }

    /// Drops the entries that are empty under the context.
    pub fn prune(&self, env: &Env) -> Result<Self> {
        let mut kept = Vec::new();
        for entry in &self.entries {
            if env.is_satisfiable(&entry.closed_guard())? {
                kept.push(entry.clone());
            }
        }
        Ok(DefinableSet { entries: kept })
    }

    /// Applies `f` to every element, evaluating it under the context extended
    /// by the entry guard.
    pub fn map<U: Nominal>(
        &self,
        env: &Env,
        mut f: impl FnMut(&Env, &T) -> Result<U>,
    ) -> Result<DefinableSet<U>> {
        let mut raw = Vec::new();
        for entry in &self.entries {
            let (element, guard, binders) = entry.open();
            let inner = env.assume(guard.clone());
            if !inner.is_consistent()? {
                continue;
            }
            raw.push((f(&inner, &element)?, guard, binders));
        }
        Ok(DefinableSet::build(raw))
    }

    /// The elements satisfying `p`, by conjoining `p` into each guard.
    pub fn filter(
        &self,
        env: &Env,
        mut p: impl FnMut(&Env, &T) -> Result<Formula>,
    ) -> Result<Self> {
        let mut raw = Vec::new();
        for entry in &self.entries {
            let (element, guard, binders) = entry.open();
            let inner = env.assume(guard.clone());
            if !inner.is_consistent()? {
                continue;
            }
            let condition = inner.resolve(&p(&inner, &element)?)?;
            if condition.is_false() {
                continue;
            }
            raw.push((element, Formula::and([guard, condition]), binders));
        }
        Ok(DefinableSet::build(raw))
    }

    /// Flattens a set of sets.
    pub fn sum(sets: &DefinableSet<DefinableSet<T>>) -> Self {
        let mut raw = Vec::new();
        for outer in &sets.entries {
            let (inner_set, outer_guard, outer_binders) = outer.open();
            for inner in &inner_set.entries {
                let (element, guard, mut binders) = inner.open();
                binders.extend(outer_binders.iter().cloned());
                raw.push((element, Formula::and([guard, outer_guard.clone()]), binders));
            }
        }
        DefinableSet::build(raw)
    }

    /// `⋀ᵢ ∀x̄ᵢ. ¬φᵢ`, without quantifiers and simplified under the context.
    pub fn is_empty(&self, env: &Env) -> Result<Formula> {
        env.resolve(&self.emptiness_formula())
    }

    fn emptiness_formula(&self) -> Formula {
        Formula::and(
            self.entries
                .iter()
                .map(|e| Formula::forall_all(&e.binders, e.guard.negate())),
        )
    }

    pub fn exists(&self, env: &Env, p: impl FnMut(&Env, &T) -> Result<Formula>) -> Result<Formula> {
        Ok(Formula::not(self.filter(env, p)?.is_empty(env)?))
    }

    pub fn for_all(
        &self,
        env: &Env,
        mut p: impl FnMut(&Env, &T) -> Result<Formula>,
    ) -> Result<Formula> {
        self.filter(env, |env, x| Ok(p(env, x)?.negate()))?
            .is_empty(env)
    }

    /// Quantified membership formula, before elimination.
    pub fn member_formula(&self, x: &T) -> Formula {
        Formula::or(self.entries.iter().map(|entry| {
            let (element, guard, binders) = entry.open();
            Formula::exists_all(&binders, Formula::and([guard, x.eq_formula(&element)]))
        }))
    }

    pub fn member(&self, env: &Env, x: &T) -> Result<Formula> {
        env.resolve(&self.member_formula(x))
    }

    /// Quantified inclusion formula, before elimination.
    pub fn subset_formula(&self, other: &Self) -> Formula {
        Formula::and(self.entries.iter().map(|entry| {
            let (element, guard, binders) = entry.open();
            Formula::forall_all(
                &binders,
                Formula::implies(guard, other.member_formula(&element)),
            )
        }))
    }

    pub fn is_subset_of(&self, env: &Env, other: &Self) -> Result<Formula> {
        env.resolve(&self.subset_formula(other))
    }

    pub fn eq_set(&self, env: &Env, other: &Self) -> Result<Formula> {
        env.resolve(&self.eq_formula(other))
    }

    pub fn intersection(&self, env: &Env, other: &Self) -> Result<Self> {
        self.filter(env, |env, x| other.member(env, x))
    }

    /// Whether the set has exactly one element.
    pub fn is_singleton(&self, env: &Env) -> Result<Formula> {
        let formula = Formula::or(self.entries.iter().map(|entry| {
            let (x, guard, binders) = entry.open();
            let all_equal = Formula::and(self.entries.iter().map(|other| {
                let (y, h, others) = other.open();
                Formula::forall_all(&others, Formula::implies(h, x.eq_formula(&y)))
            }));
            Formula::exists_all(&binders, Formula::and([guard, all_equal]))
        }));
        env.resolve(&formula)
    }

    pub fn pairs<U: Nominal>(&self, other: &DefinableSet<U>) -> DefinableSet<(T, U)> {
        let mut raw = Vec::new();
        for left in &self.entries {
            for right in &other.entries {
                let (a, g, mut binders) = left.open();
                let (b, h, more) = right.open();
                binders.extend(more);
                raw.push(((a, b), Formula::and([g, h]), binders));
            }
        }
        DefinableSet::build(raw)
    }

    pub fn pairs_with<U: Nominal, V: Nominal>(
        &self,
        env: &Env,
        other: &DefinableSet<U>,
        mut f: impl FnMut(&Env, &T, &U) -> Result<V>,
    ) -> Result<DefinableSet<V>> {
        self.pairs(other).map(env, |env, (a, b)| f(env, a, b))
    }

    /// Pairs mapped through `f`, keeping a result only where it is present.
    pub fn pairs_with_filter<U: Nominal, V: Nominal>(
        &self,
        env: &Env,
        other: &DefinableSet<U>,
        mut f: impl FnMut(&Env, &T, &U) -> Result<Maybe<V>>,
    ) -> Result<DefinableSet<V>> {
        let mut raw = Vec::new();
        for entry in &self.pairs(other).entries {
            let ((a, b), guard, binders) = entry.open();
            let inner = env.assume(guard.clone());
            if !inner.is_consistent()? {
                continue;
            }
            if let Some((value, condition)) = f(&inner, &a, &b)?.into_inner() {
                let condition = inner.resolve(&condition)?;
                if !condition.is_false() {
                    raw.push((value, Formula::and([guard, condition]), binders));
                }
            }
        }
        Ok(DefinableSet::build(raw))
    }

    /// All lists of length `n` with elements from this set.
    pub fn replicate(&self, n: usize) -> DefinableSet<Vec<T>> {
        let mut partial: Vec<(Vec<T>, Formula, Vec<Variable>)> =
            vec![(Vec::new(), Formula::True, Vec::new())];
        for _ in 0..n {
            let mut next = Vec::new();
            for (list, guard, binders) in &partial {
                for entry in &self.entries {
                    let (x, g, more) = entry.open();
                    let mut list = list.clone();
                    list.push(x);
                    let mut binders = binders.clone();
                    binders.extend(more);
                    next.push((list, Formula::and([guard.clone(), g]), binders));
                }
            }
            partial = next;
        }
        DefinableSet::build(partial)
    }

    /// Number of elements, as a variant over the possible cardinalities.
    ///
    /// Does not terminate for sets that may be infinite under the context.
    pub fn size(&self, env: &Env) -> Result<Variants<i64>> {
        self.size_bounded(env, None)
    }

    /// [`DefinableSet::size`], failing once more than `bound` candidate
    /// cardinalities have been tried.
    pub fn size_bounded(&self, env: &Env, bound: Option<usize>) -> Result<Variants<i64>> {
        let mut at_least = vec![Formula::True];
        for n in 1.. {
            if let Some(bound) = bound {
                if n > bound {
                    return Err(Error::StepBoundExceeded(bound));
                }
            }
            let formula = self.at_least(n);
            let resolved = env.resolve(&formula)?;
            if resolved.is_false() {
                break;
            }
            at_least.push(resolved);
        }
        let mut branches = Vec::new();
        for (n, lower) in at_least.iter().enumerate() {
            let upper = at_least.get(n + 1).cloned().unwrap_or(Formula::False);
            let exact = env.resolve(&Formula::and([lower.clone(), upper.negate()]))?;
            branches.push((n as i64, exact));
        }
        Ok(Variants::new(branches))
    }

    /// "At least `n` distinct elements": some choice of `n` entry instances
    /// whose guards hold and whose elements are pairwise distinct.
    fn at_least(&self, n: usize) -> Formula {
        let mut options = Vec::new();
        for choice in multisets(self.entries.len(), n) {
            let opened: Vec<_> = choice.iter().map(|&i| self.entries[i].open()).collect();
            let mut parts = Vec::new();
            let mut binders = Vec::new();
            for (p, (x, guard, bs)) in opened.iter().enumerate() {
                parts.push(guard.clone());
                binders.extend(bs.iter().cloned());
                for (y, _, _) in &opened[..p] {
                    parts.push(x.eq_formula(y).negate());
                }
            }
            options.push(Formula::exists_all(&binders, Formula::and(parts)));
        }
        Formula::or(options)
    }
}

/// Non-decreasing index sequences of length `n` over `0..m`.
fn multisets(m: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, m: usize, n: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for i in start..m {
            prefix.push(i);
            go(i, m, n, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(0, m, n, &mut Vec::new(), &mut out);
    out
}

impl<T: Nominal> Nominal for DefinableSet<T> {
    /// Mutual inclusion, before elimination.
    fn eq_formula(&self, other: &Self) -> Formula {
        Formula::and([self.subset_formula(other), other.subset_formula(self)])
    }

    fn map_variables(&self, renaming: &Renaming) -> Self {
        DefinableSet::from_normalized(
            self.entries
                .iter()
                .filter_map(|e| e.map_variables(renaming))
                .collect(),
        )
    }

    fn visit_variables(&self, f: &mut dyn FnMut(&Variable)) {
        for entry in &self.entries {
            entry.element.visit_variables(&mut |v| {
                if !entry.is_bound(v) {
                    f(v)
                }
            });
            entry.guard.for_each_free(&mut |v| {
                if !entry.is_bound(v) {
                    f(v)
                }
            });
        }
    }

    fn when(&self, env: &Env) -> Result<Self> {
        let mut raw = Vec::new();
        for entry in &self.entries {
            let (element, guard, binders) = entry.open();
            let guard = env.resolve(&guard)?;
            if guard.is_false() {
                continue;
            }
            let element = element.when(&env.assume(guard.clone()))?;
            raw.push((element, guard, binders));
        }
        Ok(DefinableSet::build(raw))
    }

    fn fmt_value(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, entry) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            entry.fmt_entry(f)?;
        }
        f.write_str("}")
    }
}

impl<T: Nominal> Conditional for DefinableSet<T> {
    fn cond(c: &Formula, then: Self, otherwise: Self) -> Result<Self> {
        let tagged = |set: &Self, condition: &Formula| -> Vec<(T, Formula, Vec<Variable>)> {
            set.entries
                .iter()
                .map(|entry| {
                    let (element, guard, binders) = entry.open();
                    (element, Formula::and([guard, condition.clone()]), binders)
                })
                .collect()
        };
        let mut raw = tagged(&then, c);
        raw.extend(tagged(&otherwise, &c.negate()));
        Ok(DefinableSet::build(raw))
    }
}

impl<T: Nominal> fmt::Display for DefinableSet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_value(f)
    }
}

impl<T: Nominal> fmt::Debug for DefinableSet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_value(f)
    }
}
