//! Satisfiability through an external SMT-LIB v2 solver.
//!
//! Atoms are encoded as `Int` constants for equality atoms and `Real`
//! constants for ordered atoms. Only `=` and `<=` occur in the scripts, so
//! the encoding is faithful: the integers are an infinite model of pure
//! equality and the reals a dense order without endpoints.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;

use crate::error::{Error, Result};
use crate::formula::{Formula, Relation, Variable};

use super::{eliminate_quantifiers, AtomTheory};

/// Environment variable naming the default solver executable.
pub const SOLVER_ENV: &str = "NLAM_SOLVER";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmtLibSolver {
    pub executable: PathBuf,
    /// Extra arguments placed before the script path.
    pub args: Vec<String>,
}

impl SmtLibSolver {
    pub fn new(executable: impl Into<PathBuf>) -> SmtLibSolver {
        SmtLibSolver {
            executable: executable.into(),
            args: Vec::new(),
        }
    }

    /// `$NLAM_SOLVER` if set, otherwise `z3` when it is on `PATH`.
    pub fn locate() -> Option<SmtLibSolver> {
        if let Some(path) = std::env::var_os(SOLVER_ENV).filter(|p| !p.is_empty()) {
            return Some(SmtLibSolver::new(path));
        }
        let path = std::env::var_os("PATH")?;
        std::env::split_paths(&path)
            .map(|dir| dir.join("z3"))
            .find(|candidate| candidate.is_file())
            .map(SmtLibSolver::new)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SatResult {
    Sat,
    Unsat,
}

/// The script asking whether `phi` is satisfiable. Free variables become
/// constants `v0, v1, …` in variable order.
pub fn smt_script(phi: &Formula, theory: AtomTheory) -> String {
    let names: BTreeMap<Variable, String> = phi
        .free_variables()
        .into_iter()
        .enumerate()
        .map(|(i, v)| (v, format!("v{i}")))
        .collect();
    let mut script = String::new();
    writeln!(script, "(set-logic {})", theory.smt_logic()).unwrap();
    for name in names.values() {
        writeln!(script, "(declare-const {name} {})", theory.smt_sort()).unwrap();
    }
    let mut body = String::new();
    write_term(&mut body, phi, &names, theory, &mut 0);
    writeln!(script, "(assert {body})").unwrap();
    writeln!(script, "(check-sat)").unwrap();
    script
}

fn write_term(
    out: &mut String,
    phi: &Formula,
    names: &BTreeMap<Variable, String>,
    theory: AtomTheory,
    depth: &mut usize,
) {
    match phi {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Rel(rel, a, b) => {
            let op = match rel {
                Relation::Eq => "=",
                Relation::Leq => "<=",
            };
            write!(out, "({op} {} {})", names[a], names[b]).unwrap();
        }
        Formula::Not(inner) => {
            out.push_str("(not ");
            write_term(out, inner, names, theory, depth);
            out.push(')');
        }
        Formula::And(ps) | Formula::Or(ps) => {
            out.push_str(if matches!(phi, Formula::And(_)) {
                "(and"
            } else {
                "(or"
            });
            for p in ps {
                out.push(' ');
                write_term(out, p, names, theory, depth);
            }
            out.push(')');
        }
        Formula::Exists(x, body) | Formula::ForAll(x, body) => {
            let keyword = if matches!(phi, Formula::Exists(..)) {
                "exists"
            } else {
                "forall"
            };
            let name = format!("b{depth}");
            *depth += 1;
            let mut inner = names.clone();
            inner.insert(x.clone(), name.clone());
            write!(out, "({keyword} (({name} {})) ", theory.smt_sort()).unwrap();
            write_term(out, body, &inner, theory, depth);
            out.push(')');
        }
    }
}

/// Eliminates quantifiers, then asks `solver` about the remainder.
pub fn smt_check_sat(phi: &Formula, theory: AtomTheory, solver: &SmtLibSolver) -> Result<SatResult> {
    let quantifier_free = eliminate_quantifiers(phi, theory)?;
    match quantifier_free {
        Formula::True => Ok(SatResult::Sat),
        Formula::False => Ok(SatResult::Unsat),
        qf => run_check_sat(&qf, theory, solver),
    }
}

pub(super) fn run_check_sat(
    phi: &Formula,
    theory: AtomTheory,
    solver: &SmtLibSolver,
) -> Result<SatResult> {
    let script = smt_script(phi, theory);
    log::debug!("solver script:\n{script}");
    let mut file = tempfile::Builder::new()
        .prefix("nlam-")
        .suffix(".smt2")
        .tempfile()
        .map_err(|e| Error::Solver(format!("cannot create script file: {e}")))?;
    file.write_all(script.as_bytes())
        .and_then(|_| file.flush())
        .map_err(|e| Error::Solver(format!("cannot write script file: {e}")))?;
    run_solver(solver, file.path())
}

fn run_solver(solver: &SmtLibSolver, script: &Path) -> Result<SatResult> {
    let output = Command::new(&solver.executable)
        .args(&solver.args)
        .arg(script)
        .output()
        .map_err(|e| {
            Error::Solver(format!(
                "cannot run `{}`: {e}",
                solver.executable.display()
            ))
        })?;
    let stdout = String::from_utf8_lossy(&output.stdout);
    let stderr = String::from_utf8_lossy(&output.stderr);
    let first = stdout.lines().map(str::trim).find(|l| !l.is_empty());
    match (output.status.success(), first) {
        (true, Some("sat")) => Ok(SatResult::Sat),
        (true, Some("unsat")) => Ok(SatResult::Unsat),
        (true, Some("unknown")) => Err(Error::Solver("solver answered `unknown`".into())),
        _ => Err(Error::Solver(format!(
            "`{}` exited with {}; stdout: {}; stderr: {}",
            solver.executable.display(),
            output.status,
            stdout.trim(),
            stderr.trim()
        ))),
    }
}
