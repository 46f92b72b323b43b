use std::path::PathBuf;
use std::process::{Command, Output};

use padp_core::complexity::Complexity;
use padp_core::proof::{check_soundness_bookkeeping, from_json};

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

fn padp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padp")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("padp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn analyze(file: &str, extra: &[&str]) -> Output {
    let path = corpus(file);
    let mut args = vec!["analyze", path.to_str().unwrap(), "--timeout", "30"];
    args.extend_from_slice(extra);
    padp(&args)
}

#[test]
fn corpus_bounds_and_exit_codes() {
    let expect = [
        ("leading.ptrs", Some("Pol_1")),
        ("geo.ptrs", Some("Pol_0")),
        ("quot.ptrs", Some("Pol_1")),
        ("plus.ptrs", Some("Pol_1")),
        ("overlap.ptrs", Some("Pol_0")),
        ("biased_walk.ptrs", Some("Pol_1")),
        ("coin_double.ptrs", Some("Pol_1")),
        ("times.ptrs", Some("Pol_2")),
        ("nonsast.ptrs", None),
        ("branching.ptrs", None),
    ];
    for (file, bound) in expect {
        let o = analyze(file, &[]);
        let text = stdout(&o);
        match bound {
            Some(b) => {
                assert_eq!(o.status.code(), Some(0), "{}", file);
                assert!(text.starts_with(&format!("BOUND: {}\nSAST: YES\n", b)), "{}: {}", file, text);
            }
            None => {
                assert_eq!(o.status.code(), Some(1), "{}", file);
                assert!(text.starts_with("BOUND: MAYBE\nSAST: MAYBE\n"), "{}: {}", file, text);
            }
        }
    }
}

#[test]
fn reports_are_deterministic() {
    let a = analyze("leading.ptrs", &[]);
    let b = analyze("leading.ptrs", &[]);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("* DG"));
}

#[test]
fn sast_goal_agrees_with_complexity_goal() {
    let a = analyze("quot.ptrs", &["--goal", "sast"]);
    let b = analyze("quot.ptrs", &[]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_proof_reloads_and_checks() {
    let out = scratch("leading.json");
    let o = analyze("leading.ptrs", &["--json", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["schema"], "padp-proof/1");
    assert_eq!(v["bound"], "Pol_1");
    let tree = from_json(&v).unwrap();
    assert!(tree.is_solved());
    assert_eq!(tree.bound(), Complexity::Pol(1));
    assert_eq!(check_soundness_bookkeeping(&tree), vec![]);
}

#[test]
fn disabling_overlap_instantiation() {
    let o = analyze("overlap.ptrs", &["--roi-budget", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("BOUND: MAYBE"));
}

#[test]
fn oracle_prints_exact_and_decimal_values() {
    let f = corpus("geo.ptrs");
    let o = padp(&["oracle", f.to_str().unwrap(), "--term", "geo(0)", "--depth", "12"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "4095/2048\n1.999512\n");
    let f = corpus("quot.ptrs");
    let o = padp(&["oracle", f.to_str().unwrap(), "--term", "start(s(0),s(0))", "--depth", "10"]);
    assert_eq!(stdout(&o).lines().next(), Some("4"));
}

#[test]
fn simulation_is_seeded() {
    let f = corpus("geo.ptrs");
    let run = |seed: &str| padp(&["simulate", f.to_str().unwrap(), "--term", "geo(0)", "--samples", "2000", "--seed", seed]);
    let (a, b, c) = (run("3"), run("3"), run("4"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert!(stdout(&a).starts_with("samples: 2000\nmean: "));
}

#[test]
fn usage_and_input_errors_exit_with_two() {
    let f = corpus("geo.ptrs");
    let f = f.to_str().unwrap();
    assert_eq!(padp(&["simulate", f, "--term", "geo(0)", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(padp(&["analyze", f, "--timeout", "0"]).status.code(), Some(2));
    let o = padp(&["oracle", f, "--term", "s(geo(0))", "--depth", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not basic"));
    let o = padp(&["analyze", "/nonexistent/file.ptrs"]);
    assert_eq!(o.status.code(), Some(2));

    let bad = scratch("bad.ptrs");
    std::fs::write(&bad, "(VAR x)\n(RULES\n f(x) -> {1/2: x, 1/3: x}\n)\n").unwrap();
    let o = padp(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.starts_with("error: ") && err.contains("3:2"), "{}", err);
}
