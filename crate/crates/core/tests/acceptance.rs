//! Acceptance checks, one PASS/FAIL line each. Runs without the libtest
//! harness so the report is always printed.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::*;
use nlam::graph;
use nlam::nominal::Conditional;
use nlam::orbit;
use nlam::{
    atom_leq, atom_tuples, atoms, Atom, AtomTheory, Backend, DefinableSet, Env, Formula,
    Nominal, Solver, SmtLibSolver, Variable, Verdict,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

const THEORIES: [AtomTheory; 2] = [AtomTheory::Equality, AtomTheory::Ordered];

fn main() {
    let criteria: [Criterion; 8] = [
        ("coloring and cycle outcomes", 60, golden_outcomes),
        ("partitions and Stirling numbers", 5, partition_counts),
        ("quantifier elimination against finite models and SMT", 120, qe_correctness),
        ("set algebra laws", 120, set_laws),
        ("orbit counts", 10, orbit_counts),
        ("compact tuple representation", 1, compact_tuples),
        ("transitive closure against finite closure", 30, closure_oracle),
        ("evaluation order independence", 60, evaluation_order),
    ];
    let mut failures = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(*budget);
        let (status, detail) = match (&outcome, over) {
            (Ok(detail), false) => ("PASS", detail.clone()),
            (Ok(detail), true) => ("FAIL", format!("{detail}; over time budget")),
            (Err(detail), _) => ("FAIL", detail.clone()),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!(
            "{status} {}. {name}: {detail} [{:.2} s of {budget} s]",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    if failures > 0 {
        println!("{failures} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}

fn check(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn lib<T>(r: nlam::Result<T>) -> Result<T, String> {
    r.map_err(|e| format!("library error: {e}"))
}

fn valid(env: &Env, phi: &Formula) -> Result<bool, String> {
    Ok(lib(env.decide(phi))? == Verdict::Valid)
}

fn atom(name: &str) -> Atom {
    Atom::from(&v(name))
}

fn golden_outcomes() -> Outcome {
    let mut seen = Vec::new();
    for theory in THEORIES {
        let env = Env::new(theory);
        let g = lib(graph::swap_graph(&env))?;
        let colorable = lib(graph::has_equivariant_coloring(&env, &g, 2))?;
        let expected = theory == AtomTheory::Ordered;
        check(colorable == Formula::from(expected), || {
            format!("2-coloring over {theory} gave {colorable}")
        })?;
        let odd = lib(graph::has_odd_length_cycle(&env, &g, None))?;
        check(odd.is_false(), || format!("odd cycle over {theory} gave {odd}"))?;
        let satan = lib(graph::satan_graph(&env))?;
        let three = lib(graph::has_equivariant_coloring(&env, &satan, 3))?;
        check(three.is_false(), || format!("3-coloring over {theory} gave {three}"))?;
        seen.push(format!("{theory}: 2-colorable {colorable}, odd cycle {odd}, 3-colorable {three}"));
    }
    Ok(seen.join("; "))
}

fn partition_counts() -> Outcome {
    let expected: BTreeSet<Vec<usize>> = [vec![0, 0, 1], vec![1, 0, 0], vec![1, 0, 1]].into();
    let got = graph::partitions(3, 2);
    check(got == expected, || format!("partitions(3,2) = {got:?}"))?;
    let mut checked = 0;
    for n in 0..=6 {
        for k in 0..=n {
            let parts = graph::partitions(n, k);
            let oracle = brute_force_stirling(n, k);
            check(parts.len() == oracle, || {
                format!("partitions({n},{k}) has {} elements, expected {oracle}", parts.len())
            })?;
            let canonical: BTreeSet<Vec<usize>> =
                parts.iter().map(|p| canonical_coloring(p)).collect();
            let surjective = parts.iter().all(|p| {
                p.len() == n && p.iter().copied().collect::<BTreeSet<_>>() == (0..k).collect()
            });
            check(canonical.len() == parts.len() && surjective, || {
                format!("partitions({n},{k}) repeats a partition or misuses colors")
            })?;
            checked += 1;
        }
    }
    Ok(format!("partitions(3,2) exact, {checked} Stirling numbers match"))
}

fn qe_correctness() -> Outcome {
    let Some(z3) = z3_path() else {
        return Err("no z3 executable found for the SMT-LIB comparison".into());
    };
    let pool = [v("a"), v("b"), v("c"), v("d")];
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    let mut count = 0;
    let mut quantified = 0;
    for theory in THEORIES {
        let internal = Solver::new(theory, Backend::Internal);
        let external = Solver::new(theory, Backend::SmtLib(SmtLibSolver::new(z3)));
        for _ in 0..500 {
            let nfree = rng.gen_range(1..=4);
            let size = rng.gen_range(2..=9);
            let phi = random_formula(&mut rng, theory, &pool[..nfree], 2, size);
            if !phi.is_quantifier_free() {
                quantified += 1;
            }
            let qf = lib(nlam::theory::eliminate_quantifiers(&phi, theory))?;
            check(qf.is_quantifier_free(), || format!("{phi} gave quantified {qf}"))?;
            let vars: Vec<Variable> = pool[..nfree].to_vec();
            for val in type_valuations(&vars, theory) {
                check(eval(&phi, &val, theory) == eval(&qf, &val, theory), || {
                    format!("{theory}: {phi} and its elimination {qf} differ at {val:?}")
                })?;
            }
            let oracle = oracle_verdict(&phi, theory);
            let verdicts = [
                ("internal", lib(internal.decide(&phi))?),
                ("smtlib backend", lib(external.decide(&phi))?),
                ("z3 on the quantified script", z3_verdict(z3, &phi, theory)),
            ];
            for (name, verdict) in verdicts {
                check(verdict == oracle, || {
                    format!("{theory}: {name} says {verdict:?}, finite models say {oracle:?} for {phi}")
                })?;
            }
            count += 1;
        }
    }
    Ok(format!(
        "{count} formulas ({quantified} quantified), zero disagreements"
    ))
}

fn random_atom_set(rng: &mut StdRng, theory: AtomTheory) -> DefinableSet<Atom> {
    let params = [v("a"), v("b")];
    let mut raw = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let x = v("x");
        let scope = [x.clone(), params[0].clone(), params[1].clone()];
        let size = rng.gen_range(1..=4);
        let guard = random_guard(rng, theory, &scope, size);
        match rng.gen_range(0..4) {
            0 => raw.push((atom("a"), guard, vec![x])),
            1 => raw.push((
                Atom::ite(&Formula::equal(&x, &params[0]), v("b"), x.clone()),
                guard,
                vec![x],
            )),
            _ => raw.push((Atom::from(&x), guard, vec![x])),
        }
    }
    DefinableSet::build(raw)
}

type Pred = fn(&Env, &Atom) -> nlam::Result<Formula>;
type Fun = fn(&Env, &Atom) -> nlam::Result<Atom>;

fn predicates(theory: AtomTheory) -> Vec<Pred> {
    let mut out: Vec<Pred> = vec![
        |_, x| Ok(x.eq_formula(&atom("a"))),
        |_, x| Ok(x.eq_formula(&atom("b")).negate()),
        |_, _| Ok(Formula::True),
    ];
    if theory == AtomTheory::Ordered {
        out.push(|_, x| Ok(atom_leq(x, &atom("a"))));
        out.push(|_, x| Ok(atom_leq(&atom("b"), x)));
    }
    out
}

fn functions(theory: AtomTheory) -> Vec<Fun> {
    let mut out: Vec<Fun> = vec![
        |_, x| Ok(x.clone()),
        |_, _| Ok(atom("a")),
        |env, x| env.ite(&x.eq_formula(&atom("a")), atom("b"), x.clone()),
    ];
    if theory == AtomTheory::Ordered {
        out.push(|env, x| env.ite(&atom_leq(x, &atom("a")), atom("a"), x.clone()));
    }
    out
}

fn set_laws() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    let mut total = 0;
    let mut sets = 0;
    for theory in THEORIES {
        let env = Env::new(theory);
        let preds = predicates(theory);
        let funs = functions(theory);
        let c = atom("c");
        for _ in 0..200 {
            let a = random_atom_set(&mut rng, theory);
            let b = random_atom_set(&mut rng, theory);
            let d = random_atom_set(&mut rng, theory);
            sets += 3;
            let p = preds[rng.gen_range(0..preds.len())];
            let q = preds[rng.gen_range(0..preds.len())];
            let f = funs[rng.gen_range(0..funs.len())];
            let g = funs[rng.gen_range(0..funs.len())];
            let e = &env;
            let same = |x: &DefinableSet<Atom>, y: &DefinableSet<Atom>| lib(x.eq_set(e, y));
            let sub = |x: &DefinableSet<Atom>, y: &DefinableSet<Atom>| lib(x.is_subset_of(e, y));
            let filt = |s: &DefinableSet<Atom>, p: Pred| lib(s.filter(e, p));
            let map = |s: &DefinableSet<Atom>, f: Fun| lib(s.map(e, f));
            let ab = a.union(&b);
            let a_and_b = lib(a.intersection(e, &b))?;
            let laws: Vec<(&str, Formula)> = vec![
                ("union commutes", same(&ab, &b.union(&a))?),
                ("union associates", same(&ab.union(&d), &a.union(&b.union(&d)))?),
                ("empty is a unit", same(&a.union(&DefinableSet::empty()), &a)?),
                ("intersection commutes", same(&a_and_b, &lib(b.intersection(e, &a))?)?),
                ("intersection is idempotent", same(&lib(a.intersection(e, &a))?, &a)?),
                (
                    "intersection distributes over union",
                    same(
                        &lib(a.intersection(e, &b.union(&d)))?,
                        &a_and_b.union(&lib(a.intersection(e, &d))?),
                    )?,
                ),
                (
                    "filters fuse",
                    same(
                        &filt(&filt(&a, q)?, p)?,
                        &lib(a.filter(e, |env, x| Ok(Formula::and([p(env, x)?, q(env, x)?]))))?,
                    )?,
                ),
                (
                    "filter distributes over union",
                    same(&filt(&ab, p)?, &filt(&a, p)?.union(&filt(&b, p)?))?,
                ),
                ("filter shrinks", sub(&filt(&a, p)?, &a)?),
                ("map distributes over union", same(&map(&ab, f)?, &map(&a, f)?.union(&map(&b, f)?))?),
                (
                    "maps fuse",
                    same(&map(&map(&a, f)?, g)?, &lib(a.map(e, |env, x| g(env, &f(env, x)?)))?)?,
                ),
                ("identity map", same(&map(&a, |_, x| Ok(x.clone()))?, &a)?),
                (
                    "sum of singletons",
                    same(
                        &DefinableSet::sum(&lib(a.map(e, |_, x| Ok(DefinableSet::singleton(x.clone()))))?),
                        &a,
                    )?,
                ),
                (
                    "sum of a pair of sets",
                    same(&DefinableSet::sum(&DefinableSet::from_list([a.clone(), b.clone()])), &ab)?,
                ),
                ("subset is reflexive", sub(&a, &a)?),
                ("union is an upper bound", Formula::and([sub(&a, &ab)?, sub(&b, &ab)?])),
                ("intersection is a lower bound", sub(&a_and_b, &a)?),
                (
                    "subset is antisymmetric",
                    Formula::implies(Formula::and([sub(&a, &b)?, sub(&b, &a)?]), same(&a, &b)?),
                ),
                (
                    "subset is transitive",
                    Formula::implies(Formula::and([sub(&a, &b)?, sub(&b, &d)?]), sub(&a, &d)?),
                ),
                (
                    "membership in a union",
                    Formula::iff(
                        lib(ab.member(e, &c))?,
                        Formula::or([lib(a.member(e, &c))?, lib(b.member(e, &c))?]),
                    ),
                ),
                (
                    "membership in an intersection",
                    Formula::iff(
                        lib(a_and_b.member(e, &c))?,
                        Formula::and([lib(a.member(e, &c))?, lib(b.member(e, &c))?]),
                    ),
                ),
                (
                    "membership in a filter",
                    Formula::iff(
                        lib(filt(&a, p)?.member(e, &c))?,
                        Formula::and([lib(a.member(e, &c))?, lib(p(e, &c))?]),
                    ),
                ),
                (
                    "exists is dual to for all",
                    Formula::iff(
                        lib(a.exists(e, p))?,
                        Formula::not(lib(a.for_all(e, |env, x| Ok(p(env, x)?.negate())))?),
                    ),
                ),
            ];
            for (name, law) in laws {
                check(valid(e, &law)?, || {
                    format!("{theory}: {name} fails for A = {a}, B = {b}, C = {d}: {law}")
                })?;
                total += 1;
            }
        }
    }
    Ok(format!("{total} law instances Valid over {sets} random sets"))
}

fn orbit_counts() -> Outcome {
    let mut report = Vec::new();
    for theory in THEORIES {
        let env = Env::new(theory);
        let pairs = atoms().pairs(&atoms());
        let orbits = lib(orbit::set_orbits(&env, &pairs))?;
        let want = if theory == AtomTheory::Equality { 2 } else { 3 };
        check(orbits.entries().len() == want, || {
            format!("{theory}: {} orbits of pairs: {orbits}", orbits.entries().len())
        })?;
        for n in 1..=4 {
            let tuples = lib(atom_tuples(&env, n))?;
            let count = lib(orbit::orbit_list(&env, &tuples))?.len();
            let oracle = count_types(n, theory);
            check(count == oracle, || {
                format!("{theory}: {count} orbits of {n}-tuples, {oracle} types")
            })?;
            report.push(format!("{theory} {n}-tuples: {count}"));
        }
    }
    Ok(format!("pairs 2 and 3; {}", report.join(", ")))
}

fn compact_tuples() -> Outcome {
    for theory in THEORIES {
        let env = Env::new(theory);
        for n in 0..=6 {
            let tuples = lib(atom_tuples(&env, n))?;
            let [entry] = tuples.entries() else {
                return Err(format!("{n}-tuples have {} entries", tuples.entries().len()));
            };
            check(entry.binders().len() == n && entry.guard().is_true(), || {
                format!("{n}-tuples represented as {tuples}")
            })?;
        }
    }
    Ok("one entry with n binders and guard ⊤ for n ≤ 6".into())
}

const SAMPLE: usize = 5;

fn closure_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    let names: Vec<Variable> = (1..=SAMPLE).map(|i| v(&format!("s{i}"))).collect();
    let mut relations = 0;
    for theory in THEORIES {
        let context = Formula::and((0..SAMPLE).flat_map(|i| {
            let names = &names;
            (i + 1..SAMPLE).map(move |j| match theory {
                AtomTheory::Equality => Formula::not_equal(&names[i], &names[j]),
                AtomTheory::Ordered => Formula::less(&names[i], &names[j]),
            })
        }));
        let env = Env::new(theory).assume(context);
        let sample = DefinableSet::from_list(names.iter().map(Atom::from));
        for _ in 0..15 {
            let (x, y) = (v("x"), v("y"));
            let entries: Vec<(bool, Formula)> = (0..rng.gen_range(1..=2))
                .map(|_| {
                    let size = rng.gen_range(1..=4);
                    let guard = random_guard(&mut rng, theory, &[x.clone(), y.clone()], size);
                    (rng.gen_bool(0.3), guard)
                })
                .collect();
            let r = DefinableSet::build(entries.iter().map(|(flip, guard)| {
                let (p, q) = if *flip { (&y, &x) } else { (&x, &y) };
                ((Atom::from(p), Atom::from(q)), guard.clone(), vec![x.clone(), y.clone()])
            }));
            let on_sample = lib(r.filter(&env, |env, (p, q)| {
                Ok(Formula::and([sample.member(env, p)?, sample.member(env, q)?]))
            }))?;
            let closure = lib(graph::transitive_closure(&env, &on_sample, Some(16)))?.relation;

            let mut edges = BTreeSet::new();
            for i in 0..SAMPLE {
                for j in 0..SAMPLE {
                    for (flip, guard) in &entries {
                        let (vx, vy) = if *flip { (j, i) } else { (i, j) };
                        let val: Valuation = [(x.clone(), vx as f64), (y.clone(), vy as f64)].into();
                        if eval(guard, &val, theory) {
                            edges.insert((i, j));
                        }
                    }
                }
            }
            let expected = finite_closure(SAMPLE, &edges);
            for i in 0..SAMPLE {
                for j in 0..SAMPLE {
                    let pair = (Atom::from(&names[i]), Atom::from(&names[j]));
                    let member = lib(closure.member(&env, &pair))?;
                    let want = expected.contains(&(i, j));
                    check(member == Formula::from(want), || {
                        format!("{theory}: ({i},{j}) membership {member}, expected {want} for {r}")
                    })?;
                }
            }
            relations += 1;
        }
        let plain = Env::new(theory);
        let distinct = lib(graph::distinct_pairs(&plain))?;
        let tc = lib(graph::transitive_closure(&plain, &distinct, None))?;
        let square = atoms().pairs(&atoms());
        check(valid(&plain, &lib(tc.relation.eq_set(&plain, &square))?)?, || {
            format!("{theory}: closure of distinct pairs is {}", tc.relation)
        })?;
        check(tc.iterations == 2, || {
            format!("{theory}: distinct pairs took {} iterations", tc.iterations)
        })?;
    }
    Ok(format!(
        "{relations} random relations match on a {SAMPLE}-atom sample; distinct pairs close to the square in 2 iterations"
    ))
}

#[derive(Clone)]
enum Expr {
    Base(DefinableSet<Atom>),
    Union(Box<Expr>, Box<Expr>),
    Inter(Box<Expr>, Box<Expr>),
    Filter(Pred, Box<Expr>),
    Map(Fun, Box<Expr>),
    If(Formula, Box<Expr>, Box<Expr>),
    Pairs(Box<Expr>),
}

fn random_expr(rng: &mut StdRng, theory: AtomTheory, depth: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.2) {
        return Expr::Base(random_atom_set(rng, theory));
    }
    let sub = |rng: &mut StdRng| Box::new(random_expr(rng, theory, depth - 1));
    match rng.gen_range(0..7) {
        0 => Expr::Union(sub(rng), sub(rng)),
        1 => Expr::Inter(sub(rng), sub(rng)),
        2 => {
            let preds = predicates(theory);
            Expr::Filter(preds[rng.gen_range(0..preds.len())], sub(rng))
        }
        3 => {
            let funs = functions(theory);
            Expr::Map(funs[rng.gen_range(0..funs.len())], sub(rng))
        }
        4 | 5 => {
            let c = random_guard(rng, theory, &[v("a"), v("b")], 2);
            Expr::If(c, sub(rng), sub(rng))
        }
        _ => Expr::Pairs(sub(rng)),
    }
}

/// The set of first components of pairs `(x, f(x))`, summed back: exercises
/// nested maps and sums.
fn pairs_then_flatten(env: &Env, s: &DefinableSet<Atom>) -> nlam::Result<DefinableSet<Atom>> {
    let nested = s.map(env, |env, x| {
        Ok(DefinableSet::from_list([x.clone(), env.ite(&x.eq_formula(&atom("b")), atom("a"), x.clone())?]))
    })?;
    Ok(DefinableSet::sum(&nested))
}

/// Innermost first, left to right, settling conditionals under the context
/// and pruning every intermediate result.
fn eval_eager(env: &Env, e: &Expr) -> nlam::Result<DefinableSet<Atom>> {
    let out = match e {
        Expr::Base(s) => s.clone(),
        Expr::Union(l, r) => eval_eager(env, l)?.union(&eval_eager(env, r)?),
        Expr::Inter(l, r) => eval_eager(env, l)?.intersection(env, &eval_eager(env, r)?)?,
        Expr::Filter(p, s) => eval_eager(env, s)?.filter(env, p)?,
        Expr::Map(f, s) => eval_eager(env, s)?.map(env, f)?,
        Expr::If(c, l, r) => env.ite_with(c, |env| eval_eager(env, l), |env| eval_eager(env, r))?,
        Expr::Pairs(s) => pairs_then_flatten(env, &eval_eager(env, s)?)?,
    };
    out.prune(env)
}

/// Rewrites filters and maps inward first, then evaluates right to left,
/// computing both sides of every conditional without consulting the
/// context.
fn eval_rewriting(env: &Env, e: &Expr) -> nlam::Result<DefinableSet<Atom>> {
    match e {
        Expr::Base(s) => Ok(s.clone()),
        Expr::Union(l, r) => {
            let right = eval_rewriting(env, r)?;
            Ok(eval_rewriting(env, l)?.union(&right))
        }
        Expr::Inter(l, r) => {
            let right = eval_rewriting(env, r)?;
            right.intersection(env, &eval_rewriting(env, l)?)
        }
        Expr::Filter(p, inner) => match &**inner {
            Expr::Union(l, r) => eval_rewriting(
                env,
                &Expr::Union(Box::new(Expr::Filter(*p, r.clone())), Box::new(Expr::Filter(*p, l.clone()))),
            ),
            Expr::If(c, l, r) => eval_rewriting(
                env,
                &Expr::If(
                    c.clone(),
                    Box::new(Expr::Filter(*p, l.clone())),
                    Box::new(Expr::Filter(*p, r.clone())),
                ),
            ),
            Expr::Filter(q, s) => {
                let (p, q) = (*p, *q);
                eval_rewriting(env, s)?
                    .filter(env, |env, x| Ok(Formula::and([q(env, x)?, p(env, x)?])))
            }
            _ => eval_rewriting(env, inner)?.filter(env, p),
        },
        Expr::Map(f, inner) => match &**inner {
            Expr::Union(l, r) => eval_rewriting(
                env,
                &Expr::Union(Box::new(Expr::Map(*f, r.clone())), Box::new(Expr::Map(*f, l.clone()))),
            ),
            Expr::Map(g, s) => {
                let (f, g) = (*f, *g);
                eval_rewriting(env, s)?.map(env, |env, x| f(env, &g(env, x)?))
            }
            _ => eval_rewriting(env, inner)?.map(env, f),
        },
        Expr::If(c, l, r) => {
            let otherwise = eval_rewriting(env, r)?;
            let then = eval_rewriting(env, l)?;
            DefinableSet::cond(c, then, otherwise)
        }
        Expr::Pairs(s) => pairs_then_flatten(env, &eval_rewriting(env, s)?),
    }
}

fn evaluation_order() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0004);
    let mut trees = 0;
    for theory in THEORIES {
        let env = Env::new(theory);
        for _ in 0..60 {
            let e = random_expr(&mut rng, theory, 3);
            let eager = lib(eval_eager(&env, &e))?;
            let rewriting = lib(eval_rewriting(&env, &e))?;
            let same = lib(eager.eq_set(&env, &rewriting))?;
            check(valid(&env, &same)?, || {
                format!("{theory}: {eager} and {rewriting} differ")
            })?;
            trees += 1;
        }
    }
    Ok(format!("{trees} random expression trees, both orders agree"))
}
