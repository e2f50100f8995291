//! `nlam`: runs the demo catalog over equality or ordered atoms.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use nlam::graph::{self, Graph};
use nlam::orbit;
use nlam::{
    atom_less, atoms, parse_formula, Atom, AtomTheory, Backend, DefinableSet, Env, Error,
    Formula, Nominal, Show, SmtLibSolver, Variable,
};

#[derive(Parser, Debug)]
#[command(name = "nlam", version, about = "Demos of computation with definable sets of atoms")]
struct Args {
    /// Atom structure to compute over.
    #[arg(long, value_enum, default_value_t = TheoryArg::Equality)]
    theory: TheoryArg,

    /// How formulas are decided.
    #[arg(long, value_enum, default_value_t = BackendArg::Internal)]
    backend: BackendArg,

    /// SMT-LIB solver executable for `--backend smtlib` (default: `z3` on PATH).
    #[arg(long, env = "NLAM_SOLVER")]
    solver_path: Option<PathBuf>,

    #[arg(long, value_enum)]
    demo: Demo,

    /// Number of colors for the coloring demos.
    #[arg(long)]
    k: Option<usize>,

    /// Cap on closure iterations and on cardinalities tried by `size`.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    step_bound: Option<u64>,

    #[arg(long, short)]
    verbose: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TheoryArg {
    Equality,
    Ordered,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BackendArg {
    Internal,
    Smtlib,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[allow(clippy::enum_variant_names)]
enum Demo {
    AtomPairs,
    TransitiveClosure,
    HasCycle,
    OddCycle,
    Orbits,
    Hull,
    EquivariantColoring,
    SatanGraph,
    SizeDemo,
}

const EXIT_USAGE: u8 = 1;
const EXIT_SOLVER: u8 = 2;
const EXIT_STEP_BOUND: u8 = 3;

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    env_logger::Builder::new()
        .filter_level(if args.verbose {
            log::LevelFilter::Debug
        } else {
            log::LevelFilter::Warn
        })
        .format_timestamp(None)
        .init();

    let theory = match args.theory {
        TheoryArg::Equality => AtomTheory::Equality,
        TheoryArg::Ordered => AtomTheory::Ordered,
    };
    let backend = match args.backend {
        BackendArg::Internal => Backend::Internal,
        BackendArg::Smtlib => {
            let solver = match &args.solver_path {
                Some(path) => SmtLibSolver::new(path),
                None => match SmtLibSolver::locate() {
                    Some(solver) => solver,
                    None => {
                        eprintln!(
                            "error: --backend smtlib needs --solver-path, {} or z3 on PATH",
                            nlam::theory::SOLVER_ENV
                        );
                        return ExitCode::from(EXIT_USAGE);
                    }
                },
            };
            if !solver.executable.is_file() {
                eprintln!(
                    "error: solver `{}` is not an executable file",
                    solver.executable.display()
                );
                return ExitCode::from(EXIT_USAGE);
            }
            Backend::SmtLib(solver)
        }
    };
    let env = Env::with_backend(theory, backend);
    let bound = args.step_bound.map(|b| b as usize);

    let result = run(&env, args.demo, args.k, bound);
    if args.verbose {
        let stats = env.solver().stats();
        log::debug!(
            "{} satisfiability queries, {} cache hits, {} solver calls",
            stats.queries,
            stats.cache_hits,
            stats.external_calls
        );
    }
    match result {
        Ok(lines) => {
            for line in lines {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(match err {
                Error::Solver(_) => EXIT_SOLVER,
                Error::StepBoundExceeded(_) => EXIT_STEP_BOUND,
                _ => EXIT_USAGE,
            })
        }
    }
}

fn truth(phi: &Formula) -> String {
    match phi {
        Formula::True => "true".into(),
        Formula::False => "false".into(),
        other => other.to_string(),
    }
}

fn show<T: Nominal>(x: &T) -> String {
    Show(x).to_string()
}

fn atom(name: &str) -> Atom {
    Atom::from(&Variable::named(name))
}

fn run(env: &Env, demo: Demo, k: Option<usize>, bound: Option<usize>) -> Result<Vec<String>, Error> {
    match demo {
        Demo::AtomPairs => {
            let nested = atoms().map(env, |env, x| {
                atoms().map(env, |_, y| Ok((x.clone(), y.clone())))
            })?;
            Ok(vec![show(&DefinableSet::sum(&nested))])
        }
        Demo::TransitiveClosure => {
            let distinct = graph::distinct_pairs(env)?;
            let closure = graph::transitive_closure(env, &distinct, bound)?;
            Ok(vec![
                format!("relation = {}", show(&distinct)),
                format!("closure = {}", show(&closure.relation)),
                format!("iterations = {}", closure.iterations),
            ])
        }
        Demo::HasCycle => {
            let complete = Graph::new(atoms(), graph::distinct_pairs(env)?);
            let edgeless = Graph::new(atoms(), DefinableSet::empty());
            Ok(vec![
                format!(
                    "complete graph: {}",
                    truth(&graph::has_cycle(env, &complete, bound)?)
                ),
                format!(
                    "edgeless graph: {}",
                    truth(&graph::has_cycle(env, &edgeless, bound)?)
                ),
            ])
        }
        Demo::OddCycle => {
            let g = graph::swap_graph(env)?;
            Ok(vec![truth(&graph::has_odd_length_cycle(env, &g, bound)?)])
        }
        Demo::Orbits => {
            let pairs = atoms().pairs(&atoms());
            let orbits = orbit::orbit_list(env, &pairs)?;
            let mut lines = vec![format!("{} orbits of {}", orbits.len(), show(&pairs))];
            lines.extend(orbits.iter().map(show));
            Ok(lines)
        }
        Demo::Hull => match env.theory() {
            AtomTheory::Equality => {
                let context = parse_formula("a ≠ b").expect("valid formula");
                let inner = env.assume(context.clone());
                let hull = orbit::hull(&inner, &[Variable::named("b")], &DefinableSet::singleton(atom("a")))?;
                Ok(vec![
                    format!("when {context}: hull [b] {{a}} = {}", show(&inner.when(&hull)?)),
                    format!(
                        "hull [] {{a}} = {}",
                        show(&orbit::hull(env, &[], &DefinableSet::singleton(atom("a")))?)
                    ),
                ])
            }
            AtomTheory::Ordered => {
                let context = parse_formula("a < b").expect("valid formula");
                let inner = env.assume(context.clone());
                let pair = DefinableSet::singleton((atom("a"), atom("b")));
                let hull = orbit::hull(&inner, &[], &pair)?;
                Ok(vec![format!(
                    "when {context}: hull [] {{(a,b)}} = {}",
                    show(&inner.when(&hull)?)
                )])
            }
        },
        Demo::EquivariantColoring => {
            let g = graph::swap_graph(env)?;
            let verdict = graph::has_equivariant_coloring(env, &g, k.unwrap_or(2))?;
            if env.theory() == AtomTheory::Ordered {
                let by_order = graph::is_coloring_of(env, |_, (x, y)| Ok(atom_less(x, y)), &g)?;
                log::debug!("order test is a coloring: {}", truth(&by_order));
            }
            Ok(vec![truth(&verdict)])
        }
        Demo::SatanGraph => {
            let g = graph::satan_graph(env)?;
            let k = k.unwrap_or(3);
            Ok(vec![truth(&graph::has_equivariant_coloring(env, &g, k)?)])
        }
        Demo::SizeDemo => {
            let abc = DefinableSet::from_list([atom("a"), atom("b"), atom("c")]);
            let context = parse_formula("a ≠ b ∧ a ≠ c ∧ b ≠ c").expect("valid formula");
            let distinct = env.assume(context.clone());
            Ok(vec![
                format!("size {} = {}", show(&abc), show(&abc.size_bounded(env, bound)?)),
                format!(
                    "when {context}: size {} = {}",
                    show(&abc),
                    show(&abc.size_bounded(&distinct, bound)?)
                ),
            ])
        }
    }
}
