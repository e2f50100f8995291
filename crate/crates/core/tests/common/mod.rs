//! Oracles and generators shared by the integration tests. Nothing here
//! calls into the library's decision procedures.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;
use std::process::{Command, Stdio};

use nlam::{AtomTheory, Formula, Relation, Variable, Verdict};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub type Valuation = BTreeMap<Variable, f64>;

pub fn v(name: &str) -> Variable {
    Variable::named(name)
}

/// Truth of `phi` in the atoms. Quantifiers range over finitely many
/// representatives: one per equality type (or order type) of a new atom
/// relative to the atoms already in play.
pub fn eval(phi: &Formula, val: &Valuation, theory: AtomTheory) -> bool {
    match phi {
        Formula::True => true,
        Formula::False => false,
        Formula::Rel(Relation::Eq, a, b) => val[a] == val[b],
        Formula::Rel(Relation::Leq, a, b) => val[a] <= val[b],
        Formula::Not(p) => !eval(p, val, theory),
        Formula::And(ps) => ps.iter().all(|p| eval(p, val, theory)),
        Formula::Or(ps) => ps.iter().any(|p| eval(p, val, theory)),
        Formula::Exists(x, body) => representatives(val, theory).into_iter().any(|c| {
            let mut inner = val.clone();
            inner.insert(x.clone(), c);
            eval(body, &inner, theory)
        }),
        Formula::ForAll(x, body) => representatives(val, theory).into_iter().all(|c| {
            let mut inner = val.clone();
            inner.insert(x.clone(), c);
            eval(body, &inner, theory)
        }),
    }
}

fn representatives(val: &Valuation, theory: AtomTheory) -> Vec<f64> {
    let mut points: Vec<f64> = val.values().copied().collect();
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup();
    let Some(&max) = points.last() else {
        return vec![0.0];
    };
    let mut out = points.clone();
    out.push(max + 1.0);
    if theory == AtomTheory::Ordered {
        out.push(points[0] - 1.0);
        out.extend(points.windows(2).map(|w| (w[0] + w[1]) / 2.0));
    }
    out
}

/// One valuation per equality type (set partition) or order type (ordered
/// set partition) of `vars`.
pub fn type_valuations(vars: &[Variable], theory: AtomTheory) -> Vec<Valuation> {
    let n = vars.len();
    let mut out = Vec::new();
    let mut codes = vec![0usize; n];
    loop {
        let used: BTreeSet<usize> = codes.iter().copied().collect();
        let initial_segment = used.iter().enumerate().all(|(i, &c)| i == c);
        let keep = match theory {
            AtomTheory::Ordered => initial_segment,
            AtomTheory::Equality => is_restricted_growth(&codes),
        };
        if keep {
            out.push(
                vars.iter()
                    .cloned()
                    .zip(codes.iter().map(|&c| c as f64))
                    .collect(),
            );
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            codes[i] += 1;
            if codes[i] < n {
                break;
            }
            codes[i] = 0;
            i += 1;
        }
    }
}

/// Whether each value first appears right after all smaller ones.
pub fn is_restricted_growth(codes: &[usize]) -> bool {
    let mut next = 0;
    for &c in codes {
        if c > next {
            return false;
        }
        if c == next {
            next += 1;
        }
    }
    true
}

/// Verdict by enumerating the types of the free variables.
pub fn oracle_verdict(phi: &Formula, theory: AtomTheory) -> Verdict {
    let vars: Vec<Variable> = phi.free_variables().into_iter().collect();
    let values: Vec<bool> = type_valuations(&vars, theory)
        .iter()
        .map(|val| eval(phi, val, theory))
        .collect();
    if values.iter().all(|&b| b) {
        Verdict::Valid
    } else if values.iter().any(|&b| b) {
        Verdict::Contingent
    } else {
        Verdict::Contradictory
    }
}

/// Random formula over `free` with quantifier nesting at most `depth`.
pub fn random_formula(
    rng: &mut StdRng,
    theory: AtomTheory,
    free: &[Variable],
    depth: usize,
    size: usize,
) -> Formula {
    let bound = [v("x"), v("y")];
    gen(rng, theory, free.to_vec(), &bound, depth, size)
}

fn gen(
    rng: &mut StdRng,
    theory: AtomTheory,
    scope: Vec<Variable>,
    bound: &[Variable],
    depth: usize,
    size: usize,
) -> Formula {
    if size <= 1 || scope.is_empty() && depth == 0 {
        return random_atom(rng, theory, &scope);
    }
    let choice = rng.gen_range(0..11);
    match choice {
        0..=3 if depth > 0 => {
            let x = bound[rng.gen_range(0..bound.len())].clone();
            let mut inner = scope.clone();
            inner.push(x.clone());
            let body = gen(rng, theory, inner, bound, depth - 1, size - 1);
            if rng.gen_bool(0.5) {
                Formula::exists(x, body)
            } else {
                Formula::forall(x, body)
            }
        }
        4 => Formula::not(gen(rng, theory, scope, bound, depth, size - 1)),
        5..=7 => {
            let split = rng.gen_range(1..size);
            Formula::and([
                gen(rng, theory, scope.clone(), bound, depth, split),
                gen(rng, theory, scope, bound, depth, size - split),
            ])
        }
        _ => {
            let split = rng.gen_range(1..size);
            Formula::or([
                gen(rng, theory, scope.clone(), bound, depth, split),
                gen(rng, theory, scope, bound, depth, size - split),
            ])
        }
    }
}

/// A relation between variables of `scope`, or a constant when it is empty.
pub fn random_atom(rng: &mut StdRng, theory: AtomTheory, scope: &[Variable]) -> Formula {
    if scope.is_empty() {
        return if rng.gen_bool(0.5) { Formula::True } else { Formula::False };
    }
    let a = scope.choose(rng).unwrap();
    let b = scope.choose(rng).unwrap();
    let atom = if theory == AtomTheory::Ordered && rng.gen_bool(0.5) {
        Formula::leq(a, b)
    } else {
        Formula::equal(a, b)
    };
    if rng.gen_bool(0.3) {
        atom.negate()
    } else {
        atom
    }
}

/// Random quantifier-free formula over `scope`.
pub fn random_guard(rng: &mut StdRng, theory: AtomTheory, scope: &[Variable], size: usize) -> Formula {
    if rng.gen_bool(0.2) {
        return Formula::True;
    }
    gen(rng, theory, scope.to_vec(), &[], 0, size)
}

pub fn z3_path() -> Option<&'static Path> {
    ["/usr/local/bin/z3", "/usr/bin/z3"]
        .into_iter()
        .map(Path::new)
        .find(|p| p.is_file())
}

/// Satisfiability by handing the quantified script straight to z3.
pub fn z3_satisfiable(z3: &Path, phi: &Formula, theory: AtomTheory) -> bool {
    let script = nlam::theory::smt_script(phi, theory);
    let mut child = Command::new(z3)
        .arg("-in")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .expect("z3 starts");
    child.stdin.take().unwrap().write_all(script.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    match text.lines().map(str::trim).find(|l| !l.is_empty()) {
        Some("sat") => true,
        Some("unsat") => false,
        other => panic!("z3 answered {other:?} on\n{script}"),
    }
}

pub fn z3_verdict(z3: &Path, phi: &Formula, theory: AtomTheory) -> Verdict {
    if !z3_satisfiable(z3, &phi.negate(), theory) {
        Verdict::Valid
    } else if !z3_satisfiable(z3, phi, theory) {
        Verdict::Contradictory
    } else {
        Verdict::Contingent
    }
}

/// Number of ways to split `n` labelled items into `k` unlabelled blocks,
/// counted by canonicalizing every map `n → k`.
pub fn brute_force_stirling(n: usize, k: usize) -> usize {
    let mut seen = BTreeSet::new();
    for code in 0..k.pow(n as u32).max(1) {
        let mut c = code;
        let colors: Vec<usize> = (0..n)
            .map(|_| {
                let d = c % k.max(1);
                c /= k.max(1);
                d
            })
            .collect();
        let used: BTreeSet<usize> = colors.iter().copied().collect();
        if used.len() == k {
            seen.insert(canonical_coloring(&colors));
        }
    }
    seen.len()
}

/// Relabels colors in order of first occurrence.
pub fn canonical_coloring(colors: &[usize]) -> Vec<usize> {
    let mut names = BTreeMap::new();
    colors
        .iter()
        .map(|c| {
            let next = names.len();
            *names.entry(*c).or_insert(next)
        })
        .collect()
}

/// Equality or order types of `n` atoms: the canonical forms of maps
/// `n → n` up to relabeling (equality) or up to monotone relabeling (order).
pub fn count_types(n: usize, theory: AtomTheory) -> usize {
    let mut seen = BTreeSet::new();
    for code in 0..n.pow(n as u32).max(1) {
        let mut c = code;
        let values: Vec<usize> = (0..n)
            .map(|_| {
                let d = c % n;
                c /= n;
                d
            })
            .collect();
        let canon = match theory {
            AtomTheory::Equality => canonical_coloring(&values),
            AtomTheory::Ordered => {
                let distinct: BTreeSet<usize> = values.iter().copied().collect();
                let rank: BTreeMap<usize, usize> =
                    distinct.into_iter().enumerate().map(|(i, x)| (x, i)).collect();
                values.iter().map(|x| rank[x]).collect()
            }
        };
        seen.insert(canon);
    }
    seen.len()
}

/// Reflexive-free transitive closure of a finite relation on `0..n`.
pub fn finite_closure(n: usize, edges: &BTreeSet<(usize, usize)>) -> BTreeSet<(usize, usize)> {
    let mut reach = vec![vec![false; n]; n];
    for &(i, j) in edges {
        reach[i][j] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    for (i, row) in reach.iter().enumerate() {
        for (j, &r) in row.iter().enumerate() {
            if r {
                out.insert((i, j));
            }
        }
    }
    out
}
