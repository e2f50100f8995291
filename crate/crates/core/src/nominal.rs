//! Values that can live inside definable sets.
//!
//! Every element type provides symbolic equality (a formula rather than a
//! boolean), renaming and traversal of its free atom variables, dissolution
//! of variants, and contextual simplification. Types that can be the result
//! of a conditional with an undetermined condition also implement
//! [`Conditional`].

use std::collections::BTreeMap;
use std::fmt;

use crate::env::Env;
use crate::error::{Error, Result};
use crate::formula::{Formula, Renaming, Variable};

pub trait Nominal: Clone + Ord + fmt::Debug + Send + Sync + 'static {
    /// The formula stating that `self` and `other` denote the same value.
    fn eq_formula(&self, other: &Self) -> Formula;

    /// Capture-avoiding renaming of free atom variables.
    fn map_variables(&self, renaming: &Renaming) -> Self;

    /// Visits free atom variables in occurrence order (repetitions included).
    fn visit_variables(&self, f: &mut dyn FnMut(&Variable));

    /// Alternatives this value stands for, each with the condition under
    /// which it is the one meant. Only variants have more than one.
    fn split_variants(&self) -> Vec<(Self, Formula)> {
        vec![(self.clone(), Formula::True)]
    }

    /// Simplifies the value under the ambient context of `env`.
    fn when(&self, _env: &Env) -> Result<Self> {
        Ok(self.clone())
    }

    fn fmt_value(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result;

    fn fold_variables<B>(&self, init: B, mut f: impl FnMut(B, &Variable) -> B) -> B
    where
        Self: Sized,
    {
        let mut acc = Some(init);
        self.visit_variables(&mut |v| {
            let current = acc.take().expect("accumulator present");
            acc = Some(f(current, v));
        });
        acc.expect("accumulator present")
    }
}

/// Merging of two values under a condition that cannot be settled.
pub trait Conditional: Sized {
    /// The value that is `then` where `c` holds and `otherwise` elsewhere.
    fn cond(c: &Formula, then: Self, otherwise: Self) -> Result<Self>;
}

/// Display adapter for any [`Nominal`] value.
pub struct Show<'a, T: ?Sized>(pub &'a T);

impl<T: Nominal> fmt::Display for Show<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt_value(f)
    }
}

/// Free atom variables of `x` without repetitions, in order of first
/// occurrence.
pub fn support<T: Nominal>(x: &T) -> Vec<Variable> {
    x.fold_variables(Vec::new(), |mut acc, v| {
        if !acc.contains(v) {
            acc.push(v.clone());
        }
        acc
    })
}

/// Applies the atom renaming `f` to every free variable of `x`. `f` should be
/// injective on the support of `x`.
pub fn group_action<T: Nominal>(x: &T, f: impl Fn(&Variable) -> Variable) -> T {
    let renaming: Renaming = support(x)
        .into_iter()
        .map(|v| {
            let image = f(&v);
            (v, image)
        })
        .filter(|(v, image)| v != image)
        .collect();
    x.map_variables(&renaming)
}

impl Nominal for Variable {
    fn eq_formula(&self, other: &Self) -> Formula {
        Formula::equal(self, other)
    }

    fn map_variables(&self, renaming: &Renaming) -> Self {
        renaming.get(self).unwrap_or(self).clone()
    }

    fn visit_variables(&self, f: &mut dyn FnMut(&Variable)) {
        f(self)
    }

    fn fmt_value(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Nominal for Formula {
    fn eq_formula(&self, other: &Self) -> Formula {
        Formula::iff(self.clone(), other.clone())
    }

    fn map_variables(&self, renaming: &Renaming) -> Self {
        self.substitute(renaming)
    }

    fn visit_variables(&self, f: &mut dyn FnMut(&Variable)) {
        self.for_each_free(&mut |v| f(v))
    }

    fn when(&self, env: &Env) -> Result<Self> {
        env.resolve(self)
    }

    fn fmt_value(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Conditional for Formula {
    fn cond(c: &Formula, then: Self, otherwise: Self) -> Result<Self> {
        Ok(Formula::or([
            Formula::and([c.clone(), then]),
            Formula::and([c.negate(), otherwise]),
        ]))
    }
}

macro_rules! base_value {
    ($t:ty) => {
        impl Nominal for $t {
            fn eq_formula(&self, other: &Self) -> Formula {
                Formula::from(self == other)
            }

            fn map_variables(&self, _renaming: &Renaming) -> Self {
                self.clone()
            }

            fn visit_variables(&self, _f: &mut dyn FnMut(&Variable)) {}

            fn fmt_value(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{self}")
            }
        }
    };
}

base_value!(i64);
base_value!(usize);
base_value!(String);

/// A single value whose identity depends on which guard holds.
///
/// Branch values are distinct and sorted; equal values are merged by
/// disjoining their guards. The guards are exhaustive and mutually exclusive
/// relative to the context the variant was built in. That is maintained by
/// construction and never re-checked.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variants<T> {
    branches: Vec<(T, Formula)>,
}

/// An atom: a variant over atom variables.
pub type Atom = Variants<Variable>;

impl<T: Nominal> Variants<T> {
    pub fn pure(value: T) -> Self {
        Variants {
            branches: vec![(value, Formula::True)],
        }
    }

    /// Builds a variant from guarded alternatives. Contradictory guards are
    /// dropped; a lone surviving branch gets the guard `⊤`.
    ///
    /// Panics on an empty iterator.
    pub fn new(branches: impl IntoIterator<Item = (T, Formula)>) -> Self {
        let mut merged: BTreeMap<T, Vec<Formula>> = BTreeMap::new();
        let mut first = None;
        for (value, guard) in branches {
            if first.is_none() {
                first = Some(value.clone());
            }
            if !guard.is_false() {
                merged.entry(value).or_default().push(guard);
            }
        }
        let first = first.expect("a variant has at least one branch");
        let mut branches: Vec<(T, Formula)> = merged
            .into_iter()
            .map(|(value, guards)| (value, Formula::or(guards)))
            .filter(|(_, guard)| !guard.is_false())
            .collect();
        match branches.len() {
            // unreachable branch of a dead context
            0 => Variants::pure(first),
            1 => Variants::pure(branches.pop().unwrap().0),
            _ => Variants { branches },
        }
    }

    /// `then : c | otherwise : ¬c`, folded when `c` is a constant.
    pub fn ite(c: &Formula, then: T, otherwise: T) -> Self {
        Variants::new([(then, c.clone()), (otherwise, c.negate())])
    }

    pub fn branches(&self) -> &[(T, Formula)] {
        &self.branches
    }

    /// The value when there is only one branch.
    pub fn single(&self) -> Option<&T> {
        match self.branches.as_slice() {
            [(value, _)] => Some(value),
            _ => None,
        }
    }

    pub fn map<U: Nominal>(&self, mut f: impl FnMut(&T) -> U) -> Variants<U> {
        Variants::new(self.branches.iter().map(|(v, g)| (f(v), g.clone())))
    }
}

impl<T: Nominal> From<T> for Variants<T> {
    fn from(value: T) -> Self {
        Variants::pure(value)
    }
}

impl From<&Variable> for Atom {
    fn from(value: &Variable) -> Self {
        Variants::pure(value.clone())
    }
}

impl<T: Nominal> Nominal for Variants<T> {
    fn eq_formula(&self, other: &Self) -> Formula {
        let mut options = Vec::new();
        for (a, phi) in &self.branches {
            for (b, theta) in &other.branches {
                options.push(Formula::and([a.eq_formula(b), phi.clone(), theta.clone()]));
            }
        }
        Formula::or(options)
    }

    fn map_variables(&self, renaming: &Renaming) -> Self {
        Variants::new(
            self.branches
                .iter()
                .map(|(v, g)| (v.map_variables(renaming), g.substitute(renaming))),
        )
    }

    fn visit_variables(&self, f: &mut dyn FnMut(&Variable)) {
        for (value, guard) in &self.branches {
            value.visit_variables(f);
            guard.for_each_free(&mut |v| f(v));
        }
    }

    fn split_variants(&self) -> Vec<(Self, Formula)> {
        let mut out = Vec::new();
        for (value, guard) in &self.branches {
            for (part, condition) in value.split_variants() {
                out.push((
                    Variants::pure(part),
                    Formula::and([guard.clone(), condition]),
                ));
            }
        }
        out
    }

    fn when(&self, env: &Env) -> Result<Self> {
        let mut kept = Vec::new();
        for (value, guard) in &self.branches {
            let guard = env.resolve(guard)?;
            if guard.is_false() {
                continue;
            }
            let inner = env.assume(guard.clone());
            kept.push((value.when(&inner)?, guard));
        }
        if kept.is_empty() {
            return Ok(self.clone());
        }
        Ok(Variants::new(kept))
    }

    fn fmt_value(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(value) = self.single() {
            return value.fmt_value(f);
        }
        for (i, (value, guard)) in self.branches.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            value.fmt_value(f)?;
            write!(f, " : {guard}")?;
        }
        Ok(())
    }
}

impl<T: Nominal> Conditional for Variants<T> {
    fn cond(c: &Formula, then: Self, otherwise: Self) -> Result<Self> {
        let not_c = c.negate();
        Ok(Variants::new(
            then.branches
                .into_iter()
                .map(|(v, g)| (v, Formula::and([c.clone(), g])))
                .chain(
                    otherwise
                        .branches
                        .into_iter()
                        .map(|(v, g)| (v, Formula::and([not_c.clone(), g]))),
                ),
        ))
    }
}

impl<T: Nominal> fmt::Display for Variants<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_value(f)
    }
}

impl<T: Nominal> fmt::Debug for Variants<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_value(f)
    }
}

/// Atom comparison `a ≤ b` lifted to variants.
pub fn atom_leq(a: &Atom, b: &Atom) -> Formula {
    lift(a, b, Formula::leq)
}

/// Strict atom comparison lifted to variants.
pub fn atom_less(a: &Atom, b: &Atom) -> Formula {
    lift(a, b, Formula::less)
}

fn lift(a: &Atom, b: &Atom, rel: fn(&Variable, &Variable) -> Formula) -> Formula {
    Formula::or(a.branches().iter().flat_map(|(x, phi)| {
        b.branches()
            .iter()
            .map(move |(y, theta)| Formula::and([rel(x, y), phi.clone(), theta.clone()]))
    }))
}

fn product_splits<A: Nominal, B: Nominal>(
    left: Vec<(A, Formula)>,
    right: &[(B, Formula)],
) -> Vec<((A, B), Formula)> {
    let mut out = Vec::new();
    for (a, g) in left {
        for (b, h) in right {
            out.push(((a.clone(), b.clone()), Formula::and([g.clone(), h.clone()])));
        }
    }
    out
}

impl<A: Nominal, B: Nominal> Nominal for (A, B) {
    fn eq_formula(&self, other: &Self) -> Formula {
        Formula::and([self.0.eq_formula(&other.0), self.1.eq_formula(&other.1)])
    }

    fn map_variables(&self, renaming: &Renaming) -> Self {
        (self.0.map_variables(renaming), self.1.map_variables(renaming))
    }

    fn visit_variables(&self, f: &mut dyn FnMut(&Variable)) {
        self.0.visit_variables(f);
        self.1.visit_variables(f);
    }

    fn split_variants(&self) -> Vec<(Self, Formula)> {
        product_splits(self.0.split_variants(), &self.1.split_variants())
    }

    fn when(&self, env: &Env) -> Result<Self> {
        Ok((self.0.when(env)?, self.1.when(env)?))
    }

    fn fmt_value(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        self.0.fmt_value(f)?;
        f.write_str(",")?;
        self.1.fmt_value(f)?;
        f.write_str(")")
    }
}

impl<A: Conditional, B: Conditional> Conditional for (A, B) {
    fn cond(c: &Formula, then: Self, otherwise: Self) -> Result<Self> {
        Ok((
            A::cond(c, then.0, otherwise.0)?,
            B::cond(c, then.1, otherwise.1)?,
        ))
    }
}

impl<A: Nominal, B: Nominal, C: Nominal> Nominal for (A, B, C) {
    fn eq_formula(&self, other: &Self) -> Formula {
        Formula::and([
            self.0.eq_formula(&other.0),
            self.1.eq_formula(&other.1),
            self.2.eq_formula(&other.2),
        ])
    }

    fn map_variables(&self, renaming: &Renaming) -> Self {
        (
            self.0.map_variables(renaming),
            self.1.map_variables(renaming),
            self.2.map_variables(renaming),
        )
    }

    fn visit_variables(&self, f: &mut dyn FnMut(&Variable)) {
        self.0.visit_variables(f);
        self.1.visit_variables(f);
        self.2.visit_variables(f);
    }

    fn split_variants(&self) -> Vec<(Self, Formula)> {
        product_splits(self.0.split_variants(), &self.1.split_variants())
            .into_iter()
            .flat_map(|((a, b), g)| {
                self.2.split_variants().into_iter().map(move |(c, h)| {
                    ((a.clone(), b.clone(), c), Formula::and([g.clone(), h]))
                })
            })
            .collect()
    }

    fn when(&self, env: &Env) -> Result<Self> {
        Ok((self.0.when(env)?, self.1.when(env)?, self.2.when(env)?))
    }

    fn fmt_value(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        self.0.fmt_value(f)?;
        f.write_str(",")?;
        self.1.fmt_value(f)?;
        f.write_str(",")?;
        self.2.fmt_value(f)?;
        f.write_str(")")
    }
}

impl<A: Conditional, B: Conditional, C: Conditional> Conditional for (A, B, C) {
    fn cond(c: &Formula, then: Self, otherwise: Self) -> Result<Self> {
        Ok((
            A::cond(c, then.0, otherwise.0)?,
            B::cond(c, then.1, otherwise.1)?,
            C::cond(c, then.2, otherwise.2)?,
        ))
    }
}

impl<T: Nominal> Nominal for Vec<T> {
    fn eq_formula(&self, other: &Self) -> Formula {
        if self.len() != other.len() {
            return Formula::False;
        }
        Formula::and(self.iter().zip(other).map(|(a, b)| a.eq_formula(b)))
    }

    fn map_variables(&self, renaming: &Renaming) -> Self {
        self.iter().map(|x| x.map_variables(renaming)).collect()
    }

    fn visit_variables(&self, f: &mut dyn FnMut(&Variable)) {
        for x in self {
            x.visit_variables(f);
        }
    }

    fn split_variants(&self) -> Vec<(Self, Formula)> {
        let mut out = vec![(Vec::with_capacity(self.len()), Formula::True)];
        for x in self {
            let parts = x.split_variants();
            out = out
                .into_iter()
                .flat_map(|(prefix, g)| {
                    parts.iter().map(move |(part, h)| {
                        let mut list = prefix.clone();
                        list.push(part.clone());
                        (list, Formula::and([g.clone(), h.clone()]))
                    })
                })
                .collect();
        }
        out
    }

    fn when(&self, env: &Env) -> Result<Self> {
        self.iter().map(|x| x.when(env)).collect()
    }

    fn fmt_value(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            x.fmt_value(f)?;
        }
        f.write_str("]")
    }
}

impl<T: Conditional> Conditional for Vec<T> {
    fn cond(c: &Formula, then: Self, otherwise: Self) -> Result<Self> {
        if then.len() != otherwise.len() {
            return Err(Error::LengthMismatch {
                left: then.len(),
                right: otherwise.len(),
            });
        }
        then.into_iter()
            .zip(otherwise)
            .map(|(x, y)| T::cond(c, x, y))
            .collect()
    }
}

/// An optional value present exactly when its guard holds.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Maybe<T>(Option<(T, Formula)>);

impl<T> Maybe<T> {
    pub fn just(value: T) -> Self {
        Maybe(Some((value, Formula::True)))
    }

    pub fn nothing() -> Self {
        Maybe(None)
    }

    pub fn value(&self) -> Option<(&T, &Formula)> {
        self.0.as_ref().map(|(v, g)| (v, g))
    }

    pub fn into_inner(self) -> Option<(T, Formula)> {
        self.0
    }
}

/// `value` where `c` holds, nothing elsewhere.
pub fn maybe_if<T>(c: Formula, value: T) -> Maybe<T> {
    if c.is_false() {
        Maybe::nothing()
    } else {
        Maybe(Some((value, c)))
    }
}

impl<T: Conditional> Conditional for Maybe<T> {
    fn cond(c: &Formula, then: Self, otherwise: Self) -> Result<Self> {
        let not_c = c.negate();
        Ok(match (then.0, otherwise.0) {
            (None, None) => Maybe(None),
            (Some((x, g)), None) => maybe_if(Formula::and([c.clone(), g]), x),
            (None, Some((y, h))) => maybe_if(Formula::and([not_c, h]), y),
            (Some((x, g)), Some((y, h))) => {
                let guard = Formula::or([
                    Formula::and([c.clone(), g]),
                    Formula::and([not_c, h]),
                ]);
                maybe_if(guard, T::cond(c, x, y)?)
            }
        })
    }
}
