//! First-order formulas over atom variables.
//!
//! The signature is the one of the atom structure: equality, plus `≤` for
//! ordered atoms. Formulas are built through smart constructors that keep
//! them in a light canonical form: `∧`/`∨` operands are flattened, sorted
//! and deduplicated, constants are absorbed, double negations vanish and
//! reflexive atoms (`a = a`, `a ≤ a`) become `⊤`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

mod parse;
mod print;

pub use parse::parse_formula;

static NEXT_FRESH: AtomicU64 = AtomicU64::new(0);

/// An atom variable.
///
/// `Named` variables carry a user-chosen ASCII identifier. `Fresh` variables
/// come from the process-wide supply and print as `a` followed by subscript
/// digits, so the two kinds can never be confused.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variable {
    Named(Arc<str>),
    Fresh(u64),
}

const RESERVED: &[&str] = &["true", "false", "exists", "forall", "for"];

impl Variable {
    /// A named variable. Panics if `name` is not an ASCII identifier or is
    /// one of the reserved words of the formula syntax.
    pub fn named(name: &str) -> Variable {
        assert!(
            is_identifier(name),
            "`{name}` is not a valid atom variable name"
        );
        Variable::Named(Arc::from(name))
    }

    /// A variable never returned before by this function in this process.
    pub fn fresh() -> Variable {
        Variable::Fresh(NEXT_FRESH.fetch_add(1, Ordering::Relaxed))
    }
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'') && !RESERVED.contains(&name)
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variable::Named(name) => f.write_str(name),
            Variable::Fresh(n) => {
                f.write_str("a")?;
                for digit in n.to_string().chars() {
                    let sub = char::from_u32(0x2080 + digit.to_digit(10).unwrap()).unwrap();
                    write!(f, "{sub}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Relation symbols of the atom signature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Eq,
    Leq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Eq => "=",
            Relation::Leq => "≤",
        })
    }
}

/// Finite variable renaming; variables outside the domain map to themselves.
pub type Renaming = BTreeMap<Variable, Variable>;

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    #[default]
    True,
    False,
    Rel(Relation, Variable, Variable),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(Variable, Box<Formula>),
    ForAll(Variable, Box<Formula>),
}

impl From<bool> for Formula {
    fn from(value: bool) -> Self {
        if value {
            Formula::True
        } else {
            Formula::False
        }
    }
}

impl Formula {
    /// `a = b`, oriented so that the smaller variable comes first.
    pub fn equal(a: &Variable, b: &Variable) -> Formula {
        match a.cmp(b) {
            std::cmp::Ordering::Equal => Formula::True,
            std::cmp::Ordering::Less => Formula::Rel(Relation::Eq, a.clone(), b.clone()),
            std::cmp::Ordering::Greater => Formula::Rel(Relation::Eq, b.clone(), a.clone()),
        }
    }

    pub fn not_equal(a: &Variable, b: &Variable) -> Formula {
        Formula::not(Formula::equal(a, b))
    }

    pub fn leq(a: &Variable, b: &Variable) -> Formula {
        if a == b {
            Formula::True
        } else {
            Formula::Rel(Relation::Leq, a.clone(), b.clone())
        }
    }

    /// Strict order, encoded as `a ≤ b ∧ ¬(a = b)`.
    pub fn less(a: &Variable, b: &Variable) -> Formula {
        Formula::and([Formula::leq(a, b), Formula::not_equal(a, b)])
    }

    pub fn relation(rel: Relation, a: &Variable, b: &Variable) -> Formula {
        match rel {
            Relation::Eq => Formula::equal(a, b),
            Relation::Leq => Formula::leq(a, b),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(phi: Formula) -> Formula {
        match phi {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(inner) => *inner,
            other => Formula::Not(Box::new(other)),
        }
    }

    pub fn negate(&self) -> Formula {
        Formula::not(self.clone())
    }

    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Formula {
        Formula::connective(parts, true)
    }

    pub fn or(parts: impl IntoIterator<Item = Formula>) -> Formula {
        Formula::connective(parts, false)
    }

    fn connective(parts: impl IntoIterator<Item = Formula>, conjunction: bool) -> Formula {
        let (unit, zero) = if conjunction {
            (Formula::True, Formula::False)
        } else {
            (Formula::False, Formula::True)
        };
        let mut flat = Vec::new();
        for part in parts {
            match part {
                p if p == unit => {}
                p if p == zero => return zero,
                Formula::And(inner) if conjunction => flat.extend(inner),
                Formula::Or(inner) if !conjunction => flat.extend(inner),
                p => flat.push(p),
            }
        }
        flat.sort();
        flat.dedup();
        // φ together with ¬φ
        for p in &flat {
            if let Formula::Not(inner) = p {
                if flat.binary_search(inner).is_ok() {
                    return zero;
                }
            }
        }
        match flat.len() {
            0 => unit,
            1 => flat.pop().unwrap(),
            _ if conjunction => Formula::And(flat),
            _ => Formula::Or(flat),
        }
    }

    pub fn implies(premise: Formula, conclusion: Formula) -> Formula {
        Formula::or([Formula::not(premise), conclusion])
    }

    pub fn iff(left: Formula, right: Formula) -> Formula {
        match (&left, &right) {
            (Formula::True, _) => return right,
            (_, Formula::True) => return left,
            (Formula::False, _) => return Formula::not(right),
            (_, Formula::False) => return Formula::not(left),
            _ if left == right => return Formula::True,
            _ => {}
        }
        Formula::or([
            Formula::and([left.clone(), right.clone()]),
            Formula::and([Formula::not(left), Formula::not(right)]),
        ])
    }

    pub fn exists(var: Variable, body: Formula) -> Formula {
        if !body.has_free(&var) {
            return body;
        }
        Formula::Exists(var, Box::new(body))
    }

    pub fn forall(var: Variable, body: Formula) -> Formula {
        if !body.has_free(&var) {
            return body;
        }
        Formula::ForAll(var, Box::new(body))
    }

    pub fn exists_all<'a>(vars: impl IntoIterator<Item = &'a Variable>, body: Formula) -> Formula {
        let vars: Vec<_> = vars.into_iter().collect();
        vars.into_iter()
            .rev()
            .fold(body, |acc, v| Formula::exists(v.clone(), acc))
    }

    pub fn forall_all<'a>(vars: impl IntoIterator<Item = &'a Variable>, body: Formula) -> Formula {
        let vars: Vec<_> = vars.into_iter().collect();
        vars.into_iter()
            .rev()
            .fold(body, |acc, v| Formula::forall(v.clone(), acc))
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Formula::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Formula::False)
    }

    /// A relation atom or its negation.
    pub fn is_literal(&self) -> bool {
        match self {
            Formula::Rel(..) => true,
            Formula::Not(inner) => matches!(**inner, Formula::Rel(..)),
            _ => false,
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Rel(..) => true,
            Formula::Not(inner) => inner.is_quantifier_free(),
            Formula::And(ps) | Formula::Or(ps) => ps.iter().all(Formula::is_quantifier_free),
            Formula::Exists(..) | Formula::ForAll(..) => false,
        }
    }

    pub fn mentions_relation(&self, rel: Relation) -> bool {
        match self {
            Formula::True | Formula::False => false,
            Formula::Rel(r, _, _) => *r == rel,
            Formula::Not(inner) | Formula::Exists(_, inner) | Formula::ForAll(_, inner) => {
                inner.mentions_relation(rel)
            }
            Formula::And(ps) | Formula::Or(ps) => ps.iter().any(|p| p.mentions_relation(rel)),
        }
    }

    /// Operands of a top-level conjunction (the formula itself otherwise).
    pub fn conjuncts(&self) -> &[Formula] {
        match self {
            Formula::And(ps) => ps,
            Formula::True => &[],
            other => std::slice::from_ref(other),
        }
    }

    /// Visits free variable occurrences in syntactic order.
    pub fn for_each_free(&self, f: &mut impl FnMut(&Variable)) {
        fn go(phi: &Formula, bound: &mut Vec<Variable>, f: &mut impl FnMut(&Variable)) {
            match phi {
                Formula::True | Formula::False => {}
                Formula::Rel(_, a, b) => {
                    for v in [a, b] {
                        if !bound.contains(v) {
                            f(v);
                        }
                    }
                }
                Formula::Not(inner) => go(inner, bound, f),
                Formula::And(ps) | Formula::Or(ps) => {
                    for p in ps {
                        go(p, bound, f);
                    }
                }
                Formula::Exists(x, body) | Formula::ForAll(x, body) => {
                    bound.push(x.clone());
                    go(body, bound, f);
                    bound.pop();
                }
            }
        }
        go(self, &mut Vec::new(), f)
    }

    pub fn free_variables(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.for_each_free(&mut |v| {
            out.insert(v.clone());
        });
        out
    }

    pub fn has_free(&self, var: &Variable) -> bool {
        match self {
            Formula::True | Formula::False => false,
            Formula::Rel(_, a, b) => a == var || b == var,
            Formula::Not(inner) => inner.has_free(var),
            Formula::And(ps) | Formula::Or(ps) => ps.iter().any(|p| p.has_free(var)),
            Formula::Exists(x, body) | Formula::ForAll(x, body) => x != var && body.has_free(var),
        }
    }

    /// Capture-avoiding simultaneous substitution of free variables.
    pub fn substitute(&self, map: &Renaming) -> Formula {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Rel(rel, a, b) => {
                let a = map.get(a).unwrap_or(a);
                let b = map.get(b).unwrap_or(b);
                Formula::relation(*rel, a, b)
            }
            Formula::Not(inner) => Formula::not(inner.substitute(map)),
            Formula::And(ps) => Formula::and(ps.iter().map(|p| p.substitute(map))),
            Formula::Or(ps) => Formula::or(ps.iter().map(|p| p.substitute(map))),
            Formula::Exists(x, body) => {
                let (x, body) = substitute_under_binder(x, body, map);
                Formula::exists(x, body)
            }
            Formula::ForAll(x, body) => {
                let (x, body) = substitute_under_binder(x, body, map);
                Formula::forall(x, body)
            }
        }
    }

    pub fn rename(&self, from: &Variable, to: &Variable) -> Formula {
        self.substitute(&Renaming::from([(from.clone(), to.clone())]))
    }

    /// Rebuilds the formula bottom-up through the smart constructors.
    pub fn simplify(&self) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Rel(rel, a, b) => Formula::relation(*rel, a, b),
            Formula::Not(inner) => Formula::not(inner.simplify()),
            Formula::And(ps) => Formula::and(ps.iter().map(Formula::simplify)),
            Formula::Or(ps) => Formula::or(ps.iter().map(Formula::simplify)),
            Formula::Exists(x, body) => Formula::exists(x.clone(), body.simplify()),
            Formula::ForAll(x, body) => Formula::forall(x.clone(), body.simplify()),
        }
    }

    /// Negation normal form: negations only directly above relation atoms.
    /// Quantifiers are kept (and dualised under negation).
    pub fn nnf(&self) -> Formula {
        self.nnf_polarity(true)
    }

    fn nnf_polarity(&self, positive: bool) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Rel(..) => {
                if positive {
                    self.clone()
                } else {
                    Formula::not(self.clone())
                }
            }
            Formula::Not(inner) => inner.nnf_polarity(!positive),
            Formula::And(ps) if positive => Formula::and(ps.iter().map(|p| p.nnf_polarity(true))),
            Formula::And(ps) => Formula::or(ps.iter().map(|p| p.nnf_polarity(false))),
            Formula::Or(ps) if positive => Formula::or(ps.iter().map(|p| p.nnf_polarity(true))),
            Formula::Or(ps) => Formula::and(ps.iter().map(|p| p.nnf_polarity(false))),
            Formula::Exists(x, body) if positive => {
                Formula::exists(x.clone(), body.nnf_polarity(true))
            }
            Formula::Exists(x, body) => Formula::forall(x.clone(), body.nnf_polarity(false)),
            Formula::ForAll(x, body) if positive => {
                Formula::forall(x.clone(), body.nnf_polarity(true))
            }
            Formula::ForAll(x, body) => Formula::exists(x.clone(), body.nnf_polarity(false)),
        }
    }

    /// Structural equality up to renaming of bound variables and reordering
    /// of `∧`/`∨` operands.
    pub fn alpha_eq(&self, other: &Formula) -> bool {
        alpha_eq(self, other, &mut Vec::new())
    }

    /// Number of nodes; used for tie-breaking heuristics and diagnostics.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Rel(..) => 1,
            Formula::Not(inner) | Formula::Exists(_, inner) | Formula::ForAll(_, inner) => {
                1 + inner.size()
            }
            Formula::And(ps) | Formula::Or(ps) => 1 + ps.iter().map(Formula::size).sum::<usize>(),
        }
    }
}

fn substitute_under_binder(x: &Variable, body: &Formula, map: &Renaming) -> (Variable, Formula) {
    let free = body.free_variables();
    let mut inner: Renaming = map
        .iter()
        .filter(|(k, _)| *k != x && free.contains(*k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    if inner.is_empty() {
        return (x.clone(), body.clone());
    }
    if inner.values().any(|v| v == x) {
        let y = Variable::fresh();
        inner.insert(x.clone(), y.clone());
        (y, body.substitute(&inner))
    } else {
        (x.clone(), body.substitute(&inner))
    }
}

fn alpha_eq(a: &Formula, b: &Formula, bound: &mut Vec<(Variable, Variable)>) -> bool {
    fn same_var(x: &Variable, y: &Variable, bound: &[(Variable, Variable)]) -> bool {
        for (l, r) in bound.iter().rev() {
            if l == x || r == y {
                return l == x && r == y;
            }
        }
        x == y
    }
    match (a, b) {
        (Formula::True, Formula::True) | (Formula::False, Formula::False) => true,
        (Formula::Rel(r1, a1, b1), Formula::Rel(r2, a2, b2)) => {
            r1 == r2
                && ((same_var(a1, a2, bound) && same_var(b1, b2, bound))
                    || (*r1 == Relation::Eq && same_var(a1, b2, bound) && same_var(b1, a2, bound)))
        }
        (Formula::Not(x), Formula::Not(y)) => alpha_eq(x, y, bound),
        (Formula::And(xs), Formula::And(ys)) | (Formula::Or(xs), Formula::Or(ys)) => {
            xs.len() == ys.len() && match_operands(xs, ys, &mut vec![false; ys.len()], bound)
        }
        (Formula::Exists(x, p), Formula::Exists(y, q))
        | (Formula::ForAll(x, p), Formula::ForAll(y, q)) => {
            bound.push((x.clone(), y.clone()));
            let result = alpha_eq(p, q, bound);
            bound.pop();
            result
        }
        _ => false,
    }
}

fn match_operands(
    xs: &[Formula],
    ys: &[Formula],
    used: &mut Vec<bool>,
    bound: &mut Vec<(Variable, Variable)>,
) -> bool {
    let Some((first, rest)) = xs.split_first() else {
        return true;
    };
    for i in 0..ys.len() {
        if !used[i] && alpha_eq(first, &ys[i], bound) {
            used[i] = true;
            if match_operands(rest, ys, used, bound) {
                return true;
            }
            used[i] = false;
        }
    }
    false
}
