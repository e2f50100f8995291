use std::path::Path;
use std::process::{Command, Output};

fn nlam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlam"))
        .args(args)
        .env_remove("NLAM_SOLVER")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn run_ok(args: &[&str]) -> String {
    let out = nlam(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    stdout(&out)
}

fn z3() -> Option<&'static str> {
    ["/usr/local/bin/z3", "/usr/bin/z3"]
        .into_iter()
        .find(|p| Path::new(p).is_file())
}

#[test]
fn coloring_outcomes() {
    assert_eq!(
        run_ok(&["--theory", "equality", "--demo", "equivariant-coloring", "--k", "2"]),
        "false\n"
    );
    assert_eq!(
        run_ok(&["--theory", "ordered", "--demo", "equivariant-coloring", "--k", "2"]),
        "true\n"
    );
}

#[test]
fn atom_pairs_output() {
    assert_eq!(
        run_ok(&["--theory", "equality", "--demo", "atom-pairs"]),
        "{(x,y) : ⊤ for x,y}\n"
    );
}

#[test]
fn odd_cycle_and_satan_graph() {
    for theory in ["equality", "ordered"] {
        assert_eq!(run_ok(&["--theory", theory, "--demo", "odd-cycle"]), "false\n");
        assert_eq!(run_ok(&["--theory", theory, "--demo", "satan-graph"]), "false\n");
    }
}

#[test]
fn closure_report() {
    let text = run_ok(&["--demo", "transitive-closure"]);
    assert!(text.contains("closure = {(x,y) : ⊤ for x,y}"), "{text}");
    assert!(text.contains("iterations = 2"), "{text}");
}

#[test]
fn orbit_report() {
    assert!(run_ok(&["--theory", "equality", "--demo", "orbits"]).starts_with("2 orbits"));
    assert!(run_ok(&["--theory", "ordered", "--demo", "orbits"]).starts_with("3 orbits"));
}

#[test]
fn remaining_demos_succeed() {
    for theory in ["equality", "ordered"] {
        for demo in ["has-cycle", "hull", "size-demo"] {
            assert!(!run_ok(&["--theory", theory, "--demo", demo]).is_empty());
        }
    }
    let size = run_ok(&["--demo", "size-demo"]);
    assert!(size.lines().last().unwrap().ends_with("= 3"), "{size}");
}

#[test]
fn output_is_deterministic() {
    for demo in ["orbits", "hull", "size-demo", "transitive-closure"] {
        let args = ["--theory", "ordered", "--demo", demo];
        assert_eq!(run_ok(&args), run_ok(&args));
    }
}

#[test]
fn exit_codes() {
    assert_eq!(nlam(&["--demo", "no-such-demo"]).status.code(), Some(1));
    assert_eq!(nlam(&["--demo", "hull", "--k", "x"]).status.code(), Some(1));
    assert_eq!(nlam(&["--demo", "hull", "--step-bound", "0"]).status.code(), Some(1));
    assert_eq!(nlam(&["--help"]).status.code(), Some(0));
    assert_eq!(
        nlam(&["--demo", "transitive-closure", "--step-bound", "1"]).status.code(),
        Some(3)
    );
    assert_eq!(
        nlam(&["--demo", "satan-graph", "--backend", "smtlib", "--solver-path", "/bin/false"])
            .status
            .code(),
        Some(2)
    );
    let missing = nlam(&["--demo", "satan-graph", "--backend", "smtlib", "--solver-path", "/no/such/solver"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(!missing.stderr.is_empty());
}

#[test]
fn solver_path_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_nlam"))
        .args(["--demo", "odd-cycle", "--backend", "smtlib"])
        .env("NLAM_SOLVER", "/bin/false")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn backends_agree_on_verdicts() {
    let Some(z3) = z3() else {
        eprintln!("z3 not found, skipping");
        return;
    };
    for theory in ["equality", "ordered"] {
        for demo in ["equivariant-coloring", "odd-cycle", "satan-graph", "transitive-closure"] {
            let internal = run_ok(&["--theory", theory, "--demo", demo]);
            let external = run_ok(&[
                "--theory", theory, "--demo", demo, "--backend", "smtlib", "--solver-path", z3,
            ]);
            assert_eq!(internal, external, "{theory} {demo}");
        }
    }
}
