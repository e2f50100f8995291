//! Definable graphs: relational composition, transitive closure, cycles and
//! equivariant colorings.

use std::collections::BTreeSet;
use std::fmt;

use crate::env::Env;
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::nominal::{maybe_if, Atom, Nominal, Variants};
use crate::orbit::orbit_list;
use crate::set::{atoms, DefinableSet};

/// A directed graph; an undirected edge is stored as both ordered pairs.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Graph<T> {
    pub vertices: DefinableSet<T>,
    pub edges: DefinableSet<(T, T)>,
}

impl<T: Nominal> fmt::Debug for Graph<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph {{ vertices: {:?}, edges: {:?} }}", self.vertices, self.edges)
    }
}

impl<T: Nominal> Graph<T> {
    pub fn new(vertices: DefinableSet<T>, edges: DefinableSet<(T, T)>) -> Self {
        Graph { vertices, edges }
    }

    /// Whether both endpoints of every edge are vertices.
    pub fn is_well_formed(&self, env: &Env) -> Result<Formula> {
        self.edges.for_all(env, |env, (a, b)| {
            Ok(Formula::and([
                self.vertices.member(env, a)?,
                self.vertices.member(env, b)?,
            ]))
        })
    }
}

/// Relational composition `{(a, d) | (a, b) ∈ r, (b, d) ∈ s}`.
pub fn compose<A: Nominal, B: Nominal, C: Nominal>(
    env: &Env,
    r: &DefinableSet<(A, B)>,
    s: &DefinableSet<(B, C)>,
) -> Result<DefinableSet<(A, C)>> {
    r.pairs_with_filter(env, s, |_, (a, b), (c, d)| {
        Ok(maybe_if(b.eq_formula(c), (a.clone(), d.clone())))
    })
}

/// A transitive closure together with the number of closure steps taken.
#[derive(Clone)]
pub struct Closure<T> {
    pub relation: DefinableSet<(T, T)>,
    pub iterations: usize,
}

/// Iterates `r ↦ r ∪ r∘r` until the relation no longer grows. Fails after
/// `bound` steps when one is given.
pub fn transitive_closure<T: Nominal>(
    env: &Env,
    r: &DefinableSet<(T, T)>,
    bound: Option<usize>,
) -> Result<Closure<T>> {
    let mut iterations = 0;
    let relation = closure_step(env, r, bound, &mut iterations)?;
    log::debug!("transitive closure stabilized after {iterations} iterations");
    Ok(Closure {
        relation,
        iterations,
    })
}

fn closure_step<T: Nominal>(
    env: &Env,
    r: &DefinableSet<(T, T)>,
    bound: Option<usize>,
    iterations: &mut usize,
) -> Result<DefinableSet<(T, T)>> {
    if let Some(bound) = bound {
        if *iterations >= bound {
            return Err(Error::StepBoundExceeded(bound));
        }
    }
    *iterations += 1;
    let next = r.union(&compose(env, r, r)?);
    let stable = r.eq_set(env, &next)?;
    env.ite_with(
        &stable,
        |_| Ok(r.clone()),
        |env| closure_step(env, &next, bound, iterations),
    )
}

pub fn has_cycle<T: Nominal>(env: &Env, g: &Graph<T>, bound: Option<usize>) -> Result<Formula> {
    transitive_closure(env, &g.edges, bound)?
        .relation
        .exists(env, |_, (a, b)| Ok(a.eq_formula(b)))
}

/// Some edge closes a path of even length, i.e. there is a cycle of odd
/// length.
pub fn has_odd_length_cycle<T: Nominal>(
    env: &Env,
    g: &Graph<T>,
    bound: Option<usize>,
) -> Result<Formula> {
    let reversed = g.edges.map(env, |_, (a, b)| Ok((b.clone(), a.clone())))?;
    let even = transitive_closure(env, &compose(env, &g.edges, &g.edges)?, bound)?.relation;
    Ok(Formula::not(reversed.intersection(env, &even)?.is_empty(env)?))
}

/// Whether adjacent vertices always get different colors.
pub fn is_coloring_of<T: Nominal, C: Nominal>(
    env: &Env,
    mut color: impl FnMut(&Env, &T) -> Result<C>,
    g: &Graph<T>,
) -> Result<Formula> {
    g.edges.for_all(env, |env, (a, b)| {
        Ok(color(env, a)?.eq_formula(&color(env, b)?).negate())
    })
}

/// Canonical assignments of exactly `k` colors to `n` positions: the first
/// occurrences of the colors appear in decreasing order.
pub fn partitions(n: usize, k: usize) -> BTreeSet<Vec<usize>> {
    if n == k {
        return BTreeSet::from([(0..n).collect()]);
    }
    if k == 1 {
        return BTreeSet::from([vec![0; n]]);
    }
    if k < 1 || n < k {
        return BTreeSet::new();
    }
    let mut out: BTreeSet<Vec<usize>> = partitions(n - 1, k - 1)
        .into_iter()
        .map(|p| prepend(k - 1, p))
        .collect();
    let rest = partitions(n - 1, k);
    for color in 0..k {
        for p in &rest {
            out.insert(prepend(color, p.clone()));
        }
    }
    out
}

fn prepend(head: usize, mut tail: Vec<usize>) -> Vec<usize> {
    tail.insert(0, head);
    tail
}

/// The color of the first orbit containing `x`, or `0` when none does.
pub fn coloring<T: Nominal>(
    env: &Env,
    orbits: &[DefinableSet<T>],
    assignment: &[usize],
    x: &T,
) -> Result<Variants<usize>> {
    if orbits.len() != assignment.len() {
        return Err(Error::LengthMismatch {
            left: orbits.len(),
            right: assignment.len(),
        });
    }
    match (orbits.split_first(), assignment.split_first()) {
        (Some((orbit, orbits)), Some((&color, assignment))) => {
            let inside = orbit.member(env, x)?;
            env.ite_with(
                &inside,
                |_| Ok(Variants::pure(color)),
                |env| coloring(env, orbits, assignment, x),
            )
        }
        _ => Ok(Variants::pure(0)),
    }
}

/// Whether some coloring with at most `k` colors that is constant on the
/// orbits of the vertices is proper.
pub fn has_equivariant_coloring<T: Nominal>(env: &Env, g: &Graph<T>, k: usize) -> Result<Formula> {
    let orbits = orbit_list(env, &g.vertices)?;
    let n = orbits.len();
    log::debug!("{n} vertex orbits");
    let color_counts = if n == 0 { 0..=0 } else { 1..=k.min(n) };
    let mut options = Vec::new();
    for colors in color_counts {
        for assignment in partitions(n, colors) {
            let proper = is_coloring_of(env, |env, x| coloring(env, &orbits, &assignment, x), g)?;
            if proper.is_true() {
                return Ok(Formula::True);
            }
            options.push(proper);
        }
    }
    env.resolve(&Formula::or(options))
}

/// `{(x, y) : x ≠ y for x,y}`.
pub fn distinct_pairs(env: &Env) -> Result<DefinableSet<(Atom, Atom)>> {
    atoms()
        .pairs(&atoms())
        .filter(env, |_, (x, y)| Ok(x.eq_formula(y).negate()))
}

/// Distinct pairs, each adjacent to its own swap.
pub fn swap_graph(env: &Env) -> Result<Graph<(Atom, Atom)>> {
    let vertices = distinct_pairs(env)?;
    let edges = vertices.map(env, |_, (x, y)| {
        Ok(((x.clone(), y.clone()), (y.clone(), x.clone())))
    })?;
    Ok(Graph::new(vertices, edges))
}

/// Distinct pairs, with `(a, b)` and `(b, c)` adjacent (in both directions)
/// for pairwise distinct `a, b, c`.
pub fn satan_graph(env: &Env) -> Result<Graph<(Atom, Atom)>> {
    let vertices = distinct_pairs(env)?;
    let triples = atoms().pairs(&atoms()).pairs(&atoms()).filter(env, |_, ((a, b), c)| {
        Ok(Formula::and([
            a.eq_formula(b).negate(),
            a.eq_formula(c).negate(),
            b.eq_formula(c).negate(),
        ]))
    })?;
    let forward = triples.map(env, |_, ((a, b), c)| {
        Ok(((a.clone(), b.clone()), (b.clone(), c.clone())))
    })?;
    let backward = forward.map(env, |_, (p, q)| Ok((q.clone(), p.clone())))?;
    Ok(Graph::new(vertices, forward.union(&backward)))
}
