//! Deciding formulas over the atom structure.
//!
//! Two structures are supported: equality atoms `(ℕ, =)` and ordered atoms
//! `(ℚ, ≤)`. Both have quantifier elimination, which is what the internal
//! backend runs; the SMT-LIB backend eliminates quantifiers the same way and
//! then hands the quantifier-free remainder to an external solver.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::formula::{Formula, Relation};

mod qe;
mod smtlib;

pub use qe::eliminate_quantifiers;
pub(crate) use qe::Eliminator;
pub use smtlib::{smt_check_sat, smt_script, SatResult, SmtLibSolver, SOLVER_ENV};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AtomTheory {
    /// Natural numbers with equality only.
    Equality,
    /// Rationals with their dense order without endpoints.
    Ordered,
}

impl AtomTheory {
    pub fn relations(self) -> &'static [Relation] {
        match self {
            AtomTheory::Equality => &[Relation::Eq],
            AtomTheory::Ordered => &[Relation::Eq, Relation::Leq],
        }
    }

    pub fn check_signature(self, phi: &Formula) -> Result<()> {
        if self == AtomTheory::Equality && phi.mentions_relation(Relation::Leq) {
            return Err(Error::Signature {
                relation: Relation::Leq,
                theory: self,
            });
        }
        Ok(())
    }

    /// SMT-LIB logic used to encode the structure.
    pub fn smt_logic(self) -> &'static str {
        match self {
            AtomTheory::Equality => "LIA",
            AtomTheory::Ordered => "LRA",
        }
    }

    pub fn smt_sort(self) -> &'static str {
        match self {
            AtomTheory::Equality => "Int",
            AtomTheory::Ordered => "Real",
        }
    }
}

impl fmt::Display for AtomTheory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AtomTheory::Equality => "equality atoms",
            AtomTheory::Ordered => "ordered atoms",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// Holds under every valuation.
    Valid,
    /// Fails under every valuation.
    Contradictory,
    Contingent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Implication {
    Yes,
    No,
    Undetermined,
}

#[derive(Clone, Debug, Default)]
pub enum Backend {
    #[default]
    Internal,
    SmtLib(SmtLibSolver),
}

#[derive(Debug, Default)]
struct Counters {
    queries: AtomicUsize,
    cache_hits: AtomicUsize,
    external_calls: AtomicUsize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub queries: usize,
    pub cache_hits: usize,
    pub external_calls: usize,
}

/// A decision procedure for one atom theory with a satisfiability cache.
///
/// Answers are cached by formula; for a fixed backend `decide` is a pure
/// function, so the cache never changes observable results.
#[derive(Debug)]
pub struct Solver {
    theory: AtomTheory,
    backend: Backend,
    cache: RwLock<HashMap<Formula, bool>>,
    counters: Counters,
}

impl Solver {
    pub fn new(theory: AtomTheory, backend: Backend) -> Solver {
        Solver {
            theory,
            backend,
            cache: RwLock::new(HashMap::new()),
            counters: Counters::default(),
        }
    }

    pub fn theory(&self) -> AtomTheory {
        self.theory
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn stats(&self) -> SolverStats {
        SolverStats {
            queries: self.counters.queries.load(Ordering::Relaxed),
            cache_hits: self.counters.cache_hits.load(Ordering::Relaxed),
            external_calls: self.counters.external_calls.load(Ordering::Relaxed),
        }
    }

    pub fn eliminate_quantifiers(&self, phi: &Formula) -> Result<Formula> {
        eliminate_quantifiers(phi, self.theory)
    }

    /// Whether some valuation of the free variables satisfies `phi`.
    pub fn is_satisfiable(&self, phi: &Formula) -> Result<bool> {
        match phi {
            Formula::True => return Ok(true),
            Formula::False => return Ok(false),
            _ => {}
        }
        self.counters.queries.fetch_add(1, Ordering::Relaxed);
        if let Some(&known) = self.cache.read().unwrap().get(phi) {
            self.counters.cache_hits.fetch_add(1, Ordering::Relaxed);
            return Ok(known);
        }
        self.theory.check_signature(phi)?;
        let eliminator = Eliminator::new(self.theory);
        let quantifier_free = eliminator.eliminate(phi);
        let answer = match (&quantifier_free, &self.backend) {
            (Formula::True, _) => true,
            (Formula::False, _) => false,
            (qf, Backend::Internal) => eliminator.satisfiable(qf),
            (qf, Backend::SmtLib(solver)) => {
                self.counters.external_calls.fetch_add(1, Ordering::Relaxed);
                smtlib::run_check_sat(qf, self.theory, solver)? == SatResult::Sat
            }
        };
        self.cache.write().unwrap().insert(phi.clone(), answer);
        Ok(answer)
    }

    pub fn decide(&self, phi: &Formula) -> Result<Verdict> {
        if !self.is_satisfiable(&phi.negate())? {
            Ok(Verdict::Valid)
        } else if !self.is_satisfiable(phi)? {
            Ok(Verdict::Contradictory)
        } else {
            Ok(Verdict::Contingent)
        }
    }

    /// Whether `context` settles `phi` one way or the other.
    pub fn implies_under(&self, context: &Formula, phi: &Formula) -> Result<Implication> {
        let with = Formula::and([context.clone(), phi.clone()]);
        let without = Formula::and([context.clone(), phi.negate()]);
        if !self.is_satisfiable(&without)? {
            Ok(Implication::Yes)
        } else if !self.is_satisfiable(&with)? {
            Ok(Implication::No)
        } else {
            Ok(Implication::Undetermined)
        }
    }
}

/// One-shot decision without a shared cache.
pub fn decide(phi: &Formula, theory: AtomTheory, backend: &Backend) -> Result<Verdict> {
    Solver::new(theory, backend.clone()).decide(phi)
}

pub fn implies_under(
    context: &Formula,
    phi: &Formula,
    theory: AtomTheory,
    backend: &Backend,
) -> Result<Implication> {
    Solver::new(theory, backend.clone()).implies_under(context, phi)
}
