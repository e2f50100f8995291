//! Quantifier elimination for equality atoms and for dense linear order.
//!
//! Quantifiers are removed innermost first. A block `∃x̄. φ` is handled by
//! putting `φ` in negation normal form, splitting top-level disjunctions and
//! eliminating one variable at a time from each conjunction:
//!
//! * a positive equality `x = t` is used to substitute `t` for `x`;
//! * over equality atoms, remaining literals are disequalities, which an
//!   infinite domain can always satisfy;
//! * over ordered atoms, a conjunction of bounds is replaced by all pairwise
//!   comparisons of lower and upper bounds, plus the clauses excluding the
//!   case where the bounds pin `x` to a point ruled out by a disequality.
//!
//! Conjunctions that still contain disjunctions mentioning `x` are either
//! distributed (when the product of their widths is small) or handled by
//! virtual substitution of test points: every term `t` compared with `x`,
//! `t + ε` over ordered atoms, and `−∞` (or "an atom distinct from
//! everything" over equality atoms). The symbolic points never reach the
//! output; they are substituted atom by atom.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::formula::{Formula, Relation, Variable};

use super::AtomTheory;

const DISTRIBUTE_LIMIT: usize = 16;

/// Equivalent quantifier-free formula whose free variables are among those
/// of `phi`.
pub fn eliminate_quantifiers(phi: &Formula, theory: AtomTheory) -> Result<Formula> {
    theory.check_signature(phi)?;
    Ok(Eliminator::new(theory).eliminate(phi))
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Eliminator {
    theory: AtomTheory,
    distribute_limit: usize,
}

impl Eliminator {
    pub fn new(theory: AtomTheory) -> Eliminator {
        Eliminator {
            theory,
            distribute_limit: DISTRIBUTE_LIMIT,
        }
    }

    #[cfg(test)]
    pub fn with_distribute_limit(theory: AtomTheory, distribute_limit: usize) -> Eliminator {
        Eliminator {
            theory,
            distribute_limit,
        }
    }

    pub fn eliminate(&self, phi: &Formula) -> Formula {
        match phi {
            Formula::True | Formula::False => phi.clone(),
            Formula::Rel(rel, a, b) => Formula::relation(*rel, a, b),
            Formula::Not(inner) => Formula::not(self.eliminate(inner)),
            Formula::And(ps) => Formula::and(ps.iter().map(|p| self.eliminate(p))),
            Formula::Or(ps) => Formula::or(ps.iter().map(|p| self.eliminate(p))),
            Formula::Exists(..) => {
                let (vars, body) = quantifier_block(phi);
                let body = self.eliminate(body);
                self.exists(&vars, body)
            }
            Formula::ForAll(..) => {
                let (vars, body) = quantifier_block(phi);
                let body = self.eliminate(body);
                Formula::not(self.exists(&vars, Formula::not(body)))
            }
        }
    }

    /// Satisfiability of a quantifier-free formula: eliminate every free
    /// variable existentially, exploring disjuncts lazily.
    pub fn satisfiable(&self, phi: &Formula) -> bool {
        let phi = phi.nnf();
        match &phi {
            Formula::True => true,
            Formula::False => false,
            Formula::Or(ds) => ds.iter().any(|d| self.satisfiable(d)),
            other => {
                let vars: Vec<Variable> = other.free_variables().into_iter().collect();
                debug_assert!(!vars.is_empty(), "closed formula not folded: {other}");
                let x = pick_variable(&vars, other);
                self.satisfiable(&self.exists_one(&x, other.conjuncts().to_vec()))
            }
        }
    }

    /// `∃vars. phi` for quantifier-free `phi`.
    fn exists(&self, vars: &[Variable], phi: Formula) -> Formula {
        let phi = phi.nnf();
        let relevant: Vec<Variable> = vars.iter().filter(|v| phi.has_free(v)).cloned().collect();
        if relevant.is_empty() {
            return phi;
        }
        match phi {
            Formula::Or(ds) => Formula::or(ds.into_iter().map(|d| self.exists(&relevant, d))),
            other => {
                let x = pick_variable(&relevant, &other);
                let rest: Vec<Variable> = relevant.into_iter().filter(|v| *v != x).collect();
                let step = self.exists_one(&x, other.conjuncts().to_vec());
                self.exists(&rest, step)
            }
        }
    }

    /// `∃x. ⋀ conjuncts`, where the conjuncts are in negation normal form.
    fn exists_one(&self, x: &Variable, conjuncts: Vec<Formula>) -> Formula {
        let (dependent, mut independent): (Vec<_>, Vec<_>) =
            conjuncts.into_iter().partition(|c| c.has_free(x));
        if dependent.is_empty() {
            return Formula::and(independent);
        }
        let eliminated = if dependent.iter().all(Formula::is_literal) {
            self.eliminate_from_literals(x, &dependent)
        } else {
            let width = dependent
                .iter()
                .map(|d| match d {
                    Formula::Or(ds) => ds.len(),
                    _ => 1,
                })
                .fold(1usize, |acc, w| acc.saturating_mul(w));
            if width <= self.distribute_limit {
                self.distribute(x, dependent)
            } else {
                self.virtual_substitution(x, &Formula::and(dependent))
            }
        };
        independent.push(eliminated);
        Formula::and(independent)
    }

    fn distribute(&self, x: &Variable, mut dependent: Vec<Formula>) -> Formula {
        let index = dependent
            .iter()
            .position(|d| matches!(d, Formula::Or(_)))
            .expect("a non-literal conjunct in negation normal form is a disjunction");
        let Formula::Or(options) = dependent.swap_remove(index) else {
            unreachable!()
        };
        Formula::or(options.into_iter().map(|option| {
            let branch = Formula::and(dependent.iter().cloned().chain([option])).nnf();
            match branch {
                Formula::Or(_) => self.exists(std::slice::from_ref(x), branch),
                other => self.exists_one(x, other.conjuncts().to_vec()),
            }
        }))
    }

    fn eliminate_from_literals(&self, x: &Variable, literals: &[Formula]) -> Formula {
        // x = t: substitute
        for (i, lit) in literals.iter().enumerate() {
            if let Formula::Rel(Relation::Eq, a, b) = lit {
                let t = if a == x { b } else { a };
                return Formula::and(
                    literals
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, other)| other.rename(x, t)),
                );
            }
        }
        match self.theory {
            // only disequalities remain
            AtomTheory::Equality => Formula::True,
            AtomTheory::Ordered => eliminate_bounds(x, literals),
        }
    }

    fn virtual_substitution(&self, x: &Variable, phi: &Formula) -> Formula {
        let mut terms = BTreeSet::new();
        collect_comparands(phi, x, &mut terms);
        let mut disjuncts = Vec::new();
        for t in &terms {
            disjuncts.push(phi.rename(x, t));
            if self.theory == AtomTheory::Ordered {
                disjuncts.push(map_atoms(phi, x, &|rel, left_is_x, y| {
                    just_above(t, rel, left_is_x, y)
                }));
            }
        }
        disjuncts.push(map_atoms(phi, x, &far_below));
        Formula::or(disjuncts)
    }
}

fn quantifier_block(phi: &Formula) -> (Vec<Variable>, &Formula) {
    let mut vars = Vec::new();
    let mut current = phi;
    loop {
        match (phi, current) {
            (Formula::Exists(..), Formula::Exists(x, body))
            | (Formula::ForAll(..), Formula::ForAll(x, body)) => {
                vars.push(x.clone());
                current = body;
            }
            _ => return (vars, current),
        }
    }
}

/// Prefer a variable fixed by a positive equality, then the one occurring in
/// the fewest conjuncts.
fn pick_variable(vars: &[Variable], phi: &Formula) -> Variable {
    let conjuncts = phi.conjuncts();
    for c in conjuncts {
        if let Formula::Rel(Relation::Eq, a, b) = c {
            if let Some(v) = vars.iter().find(|v| *v == a || *v == b) {
                return v.clone();
            }
        }
    }
    vars.iter()
        .min_by_key(|v| conjuncts.iter().filter(|c| c.has_free(v)).count())
        .expect("at least one variable")
        .clone()
}

/// Fourier–Motzkin style elimination of `x` from order literals and
/// disequalities over a dense order without endpoints.
fn eliminate_bounds(x: &Variable, literals: &[Formula]) -> Formula {
    let mut lower: Vec<(Variable, bool)> = Vec::new();
    let mut upper: Vec<(Variable, bool)> = Vec::new();
    let mut distinct: Vec<Variable> = Vec::new();
    for lit in literals {
        match lit {
            Formula::Rel(Relation::Leq, a, b) if b == x => lower.push((a.clone(), false)),
            Formula::Rel(Relation::Leq, a, b) => {
                debug_assert_eq!(a, x);
                upper.push((b.clone(), false));
            }
            Formula::Not(inner) => match &**inner {
                // ¬(x ≤ b) is b < x
                Formula::Rel(Relation::Leq, a, b) if a == x => lower.push((b.clone(), true)),
                Formula::Rel(Relation::Leq, a, _) => upper.push((a.clone(), true)),
                Formula::Rel(Relation::Eq, a, b) => {
                    distinct.push(if a == x { b.clone() } else { a.clone() })
                }
                other => unreachable!("not a literal: {other}"),
            },
            other => unreachable!("unexpected literal {other}"),
        }
    }
    let mut parts = Vec::new();
    for (l, l_strict) in &lower {
        for (u, u_strict) in &upper {
            parts.push(if *l_strict || *u_strict {
                Formula::less(l, u)
            } else {
                Formula::leq(l, u)
            });
            if !l_strict && !u_strict {
                // x is pinned to l = u; it must avoid every excluded point
                for d in &distinct {
                    parts.push(Formula::or([
                        Formula::not_equal(l, u),
                        Formula::not_equal(l, d),
                    ]));
                }
            }
        }
    }
    Formula::and(parts)
}

fn collect_comparands(phi: &Formula, x: &Variable, out: &mut BTreeSet<Variable>) {
    match phi {
        Formula::Rel(_, a, b) => {
            if a == x && b != x {
                out.insert(b.clone());
            } else if b == x && a != x {
                out.insert(a.clone());
            }
        }
        Formula::Not(inner) => collect_comparands(inner, x, out),
        Formula::And(ps) | Formula::Or(ps) => {
            for p in ps {
                collect_comparands(p, x, out);
            }
        }
        _ => {}
    }
}

/// Rewrites every atom `r(x, y)` / `r(y, x)` of a quantifier-free formula;
/// `f` receives the relation, whether `x` is on the left, and the other side.
fn map_atoms(
    phi: &Formula,
    x: &Variable,
    f: &dyn Fn(Relation, bool, &Variable) -> Formula,
) -> Formula {
    match phi {
        Formula::Rel(rel, a, b) if a == x => f(*rel, true, b),
        Formula::Rel(rel, a, b) if b == x => f(*rel, false, a),
        Formula::Not(inner) => Formula::not(map_atoms(inner, x, f)),
        Formula::And(ps) => Formula::and(ps.iter().map(|p| map_atoms(p, x, f))),
        Formula::Or(ps) => Formula::or(ps.iter().map(|p| map_atoms(p, x, f))),
        other => other.clone(),
    }
}

/// `x := −∞` over ordered atoms; over equality atoms the `Leq` cases never
/// occur and this is "x differs from every named atom".
fn far_below(rel: Relation, left_is_x: bool, _other: &Variable) -> Formula {
    match rel {
        Relation::Eq => Formula::False,
        Relation::Leq => Formula::from(left_is_x),
    }
}

/// `x := t + ε` for an infinitesimal ε > 0.
fn just_above(t: &Variable, rel: Relation, left_is_x: bool, y: &Variable) -> Formula {
    match rel {
        Relation::Eq => Formula::False,
        // t + ε ≤ y  iff  t < y
        Relation::Leq if left_is_x => Formula::less(t, y),
        // y ≤ t + ε  iff  y ≤ t
        Relation::Leq => Formula::leq(y, t),
    }
}
