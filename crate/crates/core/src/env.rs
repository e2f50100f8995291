//! The evaluation environment: a solver and the ambient context formula.
//!
//! Every operation that has to settle a condition does so relative to the
//! context. Entering the branch of a conditional, or the body of a set entry,
//! extends the context with the branch condition or the entry guard.

use std::sync::Arc;

use crate::error::Result;
use crate::formula::{Formula, Variable};
use crate::nominal::{Atom, Conditional, Nominal, Variants};
use crate::theory::{AtomTheory, Backend, Implication, Solver, Verdict};

#[derive(Clone, Debug)]
pub struct Env {
    solver: Arc<Solver>,
    context: Formula,
}

impl Env {
    /// Internal backend, empty context.
    pub fn new(theory: AtomTheory) -> Env {
        Env::with_backend(theory, Backend::Internal)
    }

    pub fn with_backend(theory: AtomTheory, backend: Backend) -> Env {
        Env::from_solver(Arc::new(Solver::new(theory, backend)))
    }

    pub fn from_solver(solver: Arc<Solver>) -> Env {
        Env {
            solver,
            context: Formula::True,
        }
    }

    pub fn theory(&self) -> AtomTheory {
        self.solver.theory()
    }

    pub fn solver(&self) -> &Arc<Solver> {
        &self.solver
    }

    pub fn context(&self) -> &Formula {
        &self.context
    }

    /// The same environment with `phi` added to the context.
    pub fn assume(&self, phi: Formula) -> Env {
        Env {
            solver: Arc::clone(&self.solver),
            context: Formula::and([self.context.clone(), phi]),
        }
    }

    /// Verdict on `phi` alone, ignoring the context.
    pub fn decide(&self, phi: &Formula) -> Result<Verdict> {
        self.solver.decide(phi)
    }

    pub fn implies(&self, phi: &Formula) -> Result<Implication> {
        self.solver.implies_under(&self.context, phi)
    }

    /// Whether `phi` holds in every valuation satisfying the context.
    pub fn entails(&self, phi: &Formula) -> Result<bool> {
        Ok(self.implies(phi)? == Implication::Yes)
    }

    /// Whether `phi` is compatible with the context.
    pub fn is_satisfiable(&self, phi: &Formula) -> Result<bool> {
        self.solver
            .is_satisfiable(&Formula::and([self.context.clone(), phi.clone()]))
    }

    /// Whether the context itself is satisfiable.
    pub fn is_consistent(&self) -> Result<bool> {
        self.solver.is_satisfiable(&self.context)
    }

    pub fn eliminate(&self, phi: &Formula) -> Result<Formula> {
        self.solver.eliminate_quantifiers(phi)
    }

    /// A quantifier-free formula equivalent to `phi` under the context:
    /// `⊤` or `⊥` when the context settles it.
    pub fn resolve(&self, phi: &Formula) -> Result<Formula> {
        let phi = if phi.is_quantifier_free() {
            phi.clone()
        } else {
            self.eliminate(phi)?
        };
        if phi.is_true() || phi.is_false() {
            return Ok(phi);
        }
        Ok(match self.implies(&phi)? {
            Implication::Yes => Formula::True,
            Implication::No => Formula::False,
            Implication::Undetermined => phi,
        })
    }

    /// `x` simplified under the context.
    pub fn when<T: Nominal>(&self, x: &T) -> Result<T> {
        x.when(self)
    }

    /// Conditional on a formula: the matching branch when the context
    /// settles `c`, their merge otherwise.
    pub fn ite<T: Conditional>(&self, c: &Formula, then: T, otherwise: T) -> Result<T> {
        match self.implies(c)? {
            Implication::Yes => Ok(then),
            Implication::No => Ok(otherwise),
            Implication::Undetermined => T::cond(c, then, otherwise),
        }
    }

    /// Like [`Env::ite`], but only computes the branches that are needed,
    /// each under the context extended by its branch condition.
    pub fn ite_with<T: Conditional>(
        &self,
        c: &Formula,
        then: impl FnOnce(&Env) -> Result<T>,
        otherwise: impl FnOnce(&Env) -> Result<T>,
    ) -> Result<T> {
        match self.implies(c)? {
            Implication::Yes => then(self),
            Implication::No => otherwise(self),
            Implication::Undetermined => {
                let x = then(&self.assume(c.clone()))?;
                let y = otherwise(&self.assume(c.negate()))?;
                T::cond(c, x, y)
            }
        }
    }

    /// Conditional producing a variant for any element type.
    pub fn ite_v<T: Nominal>(&self, c: &Formula, then: T, otherwise: T) -> Result<Variants<T>> {
        Ok(match self.implies(c)? {
            Implication::Yes => Variants::pure(then),
            Implication::No => Variants::pure(otherwise),
            Implication::Undetermined => Variants::ite(c, then, otherwise),
        })
    }

    /// Conditional on functions: the choice is delayed until the function
    /// is applied.
    pub fn ite_fn<A, B, F, G>(
        c: Formula,
        f: F,
        g: G,
    ) -> impl Fn(&Env, &A) -> Result<B>
    where
        B: Conditional,
        F: Fn(&Env, &A) -> Result<B>,
        G: Fn(&Env, &A) -> Result<B>,
    {
        move |env, a| env.ite_with(&c, |e| f(e, a), |e| g(e, a))
    }

    /// An atom over a variable never used before.
    pub fn fresh_atom(&self) -> Atom {
        Atom::pure(Variable::fresh())
    }
}
