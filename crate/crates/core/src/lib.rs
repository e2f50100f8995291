//! Infinite sets definable by first-order formulas over atoms.

pub mod env;
pub mod error;
pub mod formula;
pub mod graph;
pub mod nominal;
pub mod orbit;
pub mod set;
pub mod theory;

pub use env::Env;
pub use error::{Error, Result};
pub use graph::Graph;
pub use formula::{parse_formula, Formula, Relation, Renaming, Variable};
pub use nominal::{
    atom_leq, atom_less, group_action, maybe_if, support, Atom, Conditional, Maybe, Nominal, Show,
    Variants,
};
pub use set::{atom_tuples, atoms, DefinableSet, SetEntry};
pub use theory::{AtomTheory, Backend, Implication, SmtLibSolver, Solver, Verdict};
