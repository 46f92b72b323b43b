//! SMT-LIB (QF_NIA) encoding of a constraint problem, solved by an external process.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use super::solver::{CspOutcome, CspProblem, IntPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmtConfig {
    /// Solver command line, e.g. `z3 -in`; split on whitespace.
    pub command: String,
    pub timeout: Duration,
}

fn term(p: &IntPoly) -> String {
    if p.terms.is_empty() {
        return "0".into();
    }
    let parts: Vec<String> = p
        .terms
        .iter()
        .map(|(c, m)| {
            let c = if *c < 0 { format!("(- {})", -c) } else { c.to_string() };
            if m.is_empty() {
                c
            } else {
                let vars: Vec<String> = m.iter().map(|u| format!("c{}", u)).collect();
                format!("(* {} {})", c, vars.join(" "))
            }
        })
        .collect();
    if parts.len() == 1 {
        parts[0].clone()
    } else {
        format!("(+ {})", parts.join(" "))
    }
}

pub fn to_smtlib(p: &CspProblem) -> String {
    let mut s = String::from("(set-logic QF_NIA)\n");
    for (u, (lo, hi)) in p.domains.iter().enumerate() {
        s += &format!("(declare-fun c{u} () Int)\n(assert (and (<= {lo} c{u}) (<= c{u} {hi})))\n");
    }
    for c in &p.constraints {
        s += &format!("(assert (>= {} 0))\n", term(c));
    }
    for (i, q) in p.strict.iter().enumerate() {
        s += &format!("(declare-fun b{i} () Int)\n(assert (and (<= 0 b{i}) (<= b{i} 1)))\n(assert (>= (- {} b{i}) 0))\n", term(q));
    }
    if !p.strict.is_empty() {
        let bs: Vec<String> = (0..p.strict.len()).map(|i| format!("b{}", i)).collect();
        s += &format!("(assert (>= (+ 0 {}) {}))\n", bs.join(" "), p.min_strict);
    }
    s += "(check-sat)\n";
    if !p.domains.is_empty() {
        let cs: Vec<String> = (0..p.domains.len()).map(|u| format!("c{}", u)).collect();
        s += &format!("(get-value ({}))\n", cs.join(" "));
    }
    s
}

/// Reads `sat` plus a `get-value` answer; anything else gives up.
pub fn parse_answer(out: &str, p: &CspProblem) -> CspOutcome {
    let mut toks = out.split_whitespace();
    match toks.next() {
        Some("unsat") => return CspOutcome::Infeasible,
        Some("sat") => {}
        _ => return CspOutcome::GaveUp,
    }
    let rest: String = out.trim_start().trim_start_matches("sat").replace(['(', ')'], " ");
    let mut values = p.domains.iter().map(|d| d.0).collect::<Vec<_>>();
    let words: Vec<&str> = rest.split_whitespace().collect();
    for w in words.windows(2) {
        if let (Some(u), Ok(v)) = (w[0].strip_prefix('c').and_then(|u| u.parse::<usize>().ok()), w[1].parse::<i64>()) {
            if u < values.len() {
                values[u] = v;
            }
        }
    }
    if !p.constraints.iter().all(|c| c.eval(&values) >= 0) {
        return CspOutcome::GaveUp;
    }
    let strict: Vec<bool> = p.strict.iter().map(|q| q.eval(&values) >= 1).collect();
    if strict.iter().filter(|b| **b).count() < p.min_strict {
        return CspOutcome::GaveUp;
    }
    CspOutcome::Solved { values, strict }
}

pub fn solve_smt(p: &CspProblem, cfg: &SmtConfig) -> CspOutcome {
    let mut parts = cfg.command.split_whitespace();
    let Some(prog) = parts.next() else { return CspOutcome::GaveUp };
    let child = Command::new(prog).args(parts).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::null()).spawn();
    let Ok(mut child) = child else { return CspOutcome::GaveUp };
    let script = to_smtlib(p);
    if let Some(mut stdin) = child.stdin.take() {
        if stdin.write_all(script.as_bytes()).is_err() {
            let _ = child.kill();
            return CspOutcome::GaveUp;
        }
    }
    let start = Instant::now();
    loop {
        match child.try_wait() {
            Ok(Some(_)) => break,
            Ok(None) if start.elapsed() < cfg.timeout => std::thread::sleep(Duration::from_millis(5)),
            _ => {
                let _ = child.kill();
                let _ = child.wait();
                return CspOutcome::GaveUp;
            }
        }
    }
    let mut out = String::new();
    if let Some(mut so) = child.stdout.take() {
        let _ = so.read_to_string(&mut out);
    }
    parse_answer(&out, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem() -> CspProblem {
        CspProblem {
            domains: vec![(0, 3), (0, 1)],
            constraints: vec![IntPoly { terms: vec![(1, vec![0, 1]), (-2, vec![])] }],
            strict: vec![IntPoly { terms: vec![(1, vec![0])] }],
            min_strict: 1,
        }
    }

    #[test]
    fn script_shape() {
        let s = to_smtlib(&problem());
        assert!(s.contains("(assert (>= (+ (* 1 c0 c1) (- 2)) 0))"));
        assert!(s.contains("(check-sat)"));
    }

    #[test]
    fn answers() {
        let p = problem();
        assert_eq!(parse_answer("sat\n((c0 2)\n (c1 1))\n", &p), CspOutcome::Solved { values: vec![2, 1], strict: vec![true] });
        assert_eq!(parse_answer("unsat\n", &p), CspOutcome::Infeasible);
        assert_eq!(parse_answer("sat\n((c0 0) (c1 0))", &p), CspOutcome::GaveUp);
        assert_eq!(parse_answer("unknown", &p), CspOutcome::GaveUp);
    }

    #[test]
    fn missing_solver_gives_up() {
        let cfg = SmtConfig { command: "/nonexistent/solver -in".into(), timeout: Duration::from_secs(1) };
        assert_eq!(solve_smt(&problem(), &cfg), CspOutcome::GaveUp);
    }

    #[cfg(unix)]
    #[test]
    fn external_process_round_trip() {
        let dir = std::env::temp_dir().join(format!("padp-smt-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("fake-solver.sh");
        std::fs::write(&path, "#!/bin/sh\ncat >/dev/null\nprintf 'sat\\n((c0 3) (c1 1))\\n'\n").unwrap();
        let cfg = SmtConfig { command: format!("sh {}", path.display()), timeout: Duration::from_secs(5) };
        assert_eq!(solve_smt(&problem(), &cfg), CspOutcome::Solved { values: vec![3, 1], strict: vec![true] });
    }
}
