//! Orbits under atom automorphisms, hulls and supports.
//!
//! Both atom structures are homogeneous, so two tuples lie in the same orbit
//! of the automorphisms fixing a finite set `S` exactly when they satisfy the
//! same relations among themselves and with the atoms of `S`. Orbits are
//! therefore definable by a conjunction of relation constraints, and the
//! orbits of a definable set correspond to the consistent atomic diagrams
//! of each entry.

use crate::env::Env;
use crate::error::Result;
use crate::formula::{Formula, Relation, Renaming, Variable};
use crate::nominal::{support, Nominal};
use crate::set::DefinableSet;
use crate::theory::AtomTheory;

/// The orbit of `x` under the automorphisms fixing every atom of `supp`.
pub fn orbit<T: Nominal>(env: &Env, supp: &[Variable], x: &T) -> Result<DefinableSet<T>> {
    let own = support(x);
    let copies: Vec<Variable> = own.iter().map(|_| Variable::fresh()).collect();
    let mut constraints = Vec::new();
    for &rel in env.theory().relations() {
        for i in 0..own.len() {
            for j in 0..own.len() {
                let ordered = rel == Relation::Leq && i != j;
                if ordered || i < j {
                    let pattern = env.resolve(&Formula::relation(rel, &own[i], &own[j]))?;
                    let image = Formula::relation(rel, &copies[i], &copies[j]);
                    constraints.push(Formula::iff(image, pattern));
                }
            }
            for a in supp {
                let pattern = env.resolve(&Formula::relation(rel, &own[i], a))?;
                let image = Formula::relation(rel, &copies[i], a);
                constraints.push(Formula::iff(image, pattern));
            }
        }
    }
    let renaming: Renaming = own.iter().cloned().zip(copies.iter().cloned()).collect();
    Ok(DefinableSet::build([(
        x.map_variables(&renaming),
        Formula::and(constraints),
        copies,
    )]))
}

/// Closure of `s` under the automorphisms fixing `supp`.
pub fn hull<T: Nominal>(env: &Env, supp: &[Variable], s: &DefinableSet<T>) -> Result<DefinableSet<T>> {
    let orbits = s.map(env, |env, x| orbit(env, supp, x))?;
    Ok(DefinableSet::sum(&orbits))
}

/// Whether every automorphism fixing `supp` fixes `x`.
pub fn supports<T: Nominal>(env: &Env, supp: &[Variable], x: &T) -> Result<Formula> {
    orbit(env, supp, x)?.is_singleton(env)
}

/// A minimal support of `x`, obtained by dropping atoms from its free
/// variables, last first, while what remains still supports `x`.
///
/// Over equality atoms this is the least support. Over ordered atoms least
/// supports exist too, but the greedy pass is only guaranteed to find a
/// minimal one relative to the context.
pub fn least_support<T: Nominal>(env: &Env, x: &T) -> Result<Vec<Variable>> {
    let mut current = support(x);
    for i in (0..current.len()).rev() {
        let mut candidate = current.clone();
        candidate.remove(i);
        if env.entails(&supports(env, &candidate, x)?)? {
            current = candidate;
        }
    }
    Ok(current)
}

/// The elements of `s` in the same orbit as `x`.
pub fn set_orbit<T: Nominal>(env: &Env, s: &DefinableSet<T>, x: &T) -> Result<DefinableSet<T>> {
    orbit(env, &[], x)?.intersection(env, s)
}

/// The orbits of `s`, as a list without repetitions. Free variables of `s`
/// are treated as fixed atoms.
pub fn orbit_list<T: Nominal>(env: &Env, s: &DefinableSet<T>) -> Result<Vec<DefinableSet<T>>> {
    let mut orbits: Vec<DefinableSet<T>> = Vec::new();
    for entry in s.entries() {
        let (element, guard, binders) = entry.open();
        let mut vars = binders.clone();
        vars.extend(entry.free_variables());
        for diagram in atomic_diagrams(env.theory(), &vars) {
            let guard = Formula::and([guard.clone(), diagram]);
            if !env.is_satisfiable(&guard)? {
                continue;
            }
            let candidate =
                DefinableSet::build([(element.clone(), guard, binders.clone())]);
            let mut known = false;
            for existing in &orbits {
                if *existing == candidate
                    || env.entails(&existing.eq_formula(&candidate))?
                {
                    known = true;
                    break;
                }
            }
            if !known {
                orbits.push(candidate);
            }
        }
    }
    Ok(orbits)
}

pub fn set_orbits<T: Nominal>(
    env: &Env,
    s: &DefinableSet<T>,
) -> Result<DefinableSet<DefinableSet<T>>> {
    Ok(DefinableSet::from_list(orbit_list(env, s)?))
}

/// Complete descriptions of how `vars` relate to each other: one formula per
/// equality type (set partition) or, over ordered atoms, per order type
/// (ordered set partition).
pub fn atomic_diagrams(theory: AtomTheory, vars: &[Variable]) -> Vec<Formula> {
    let mut out = Vec::new();
    for blocks in set_partitions(vars.len()) {
        let equalities: Vec<Formula> = blocks
            .iter()
            .flat_map(|block| block.windows(2).map(|w| Formula::equal(&vars[w[0]], &vars[w[1]])))
            .collect();
        match theory {
            AtomTheory::Equality => {
                let mut parts = equalities;
                for i in 0..blocks.len() {
                    for j in i + 1..blocks.len() {
                        parts.push(Formula::not_equal(&vars[blocks[i][0]], &vars[blocks[j][0]]));
                    }
                }
                out.push(Formula::and(parts));
            }
            AtomTheory::Ordered => {
                for order in permutations(blocks.len()) {
                    let mut parts = equalities.clone();
                    for w in order.windows(2) {
                        parts.push(Formula::less(
                            &vars[blocks[w[0]][0]],
                            &vars[blocks[w[1]][0]],
                        ));
                    }
                    out.push(Formula::and(parts));
                }
            }
        }
    }
    out
}

/// Set partitions of `0..n` as lists of blocks.
fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    fn go(i: usize, n: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            go(i + 1, n, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        go(i + 1, n, blocks, out);
        blocks.pop();
    }
    go(0, n, &mut blocks, &mut out);
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}
