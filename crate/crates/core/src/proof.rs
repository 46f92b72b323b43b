//! Proof trees: rendering, JSON, bound extraction and witness replay.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::adp::{Adp, AdpId, AdpProblem, Dp, Dt};
use crate::complexity::Complexity;
use crate::parse::parse_term;
use crate::poly::Poly;
use crate::processors::depgraph::{dep_graph, pre_set, split_by_prefixes, DepGraph, SccPrefix};
use crate::processors::interp::{check_interpretation, classify_interpretation, Interpretation};
use crate::processors::pr::{dt_problem, solve_dt, PrStep};
use crate::processors::roi::proc_roi;
use crate::processors::rp::{constructors_of, RpConfig};
use crate::processors::usable::{apply_usable, usable_rules};
use crate::processors::{Processor, Witness};
use crate::term::{Position, Subst, Symbol, Term, Var};
use crate::Rational;

pub const SCHEMA: &str = "padp-proof/1";

#[derive(Clone, PartialEq, Debug)]
pub struct Step {
    pub processor: Processor,
    pub witness: Witness,
}

#[derive(Clone, PartialEq, Debug)]
pub struct ProofNode {
    pub problem: AdpProblem,
    pub label: Complexity,
    pub step: Option<Step>,
    pub children: Vec<ProofNode>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    /// Child indices from the root.
    pub path: Vec<usize>,
    pub processor: Option<Processor>,
    pub message: String,
}

impl ProofNode {
    /// A leaf: Pol_0 when solved, ω otherwise.
    pub fn leaf(problem: AdpProblem) -> Self {
        let label = if problem.is_solved() { Complexity::ZERO } else { Complexity::Omega };
        ProofNode { problem, label, step: None, children: vec![] }
    }

    pub fn is_solved(&self) -> bool {
        if self.step.is_none() {
            self.problem.is_solved()
        } else {
            self.children.iter().all(ProofNode::is_solved)
        }
    }

    /// Maximum over all labels.
    pub fn bound(&self) -> Complexity {
        self.children.iter().fold(self.label, |c, n| c.oplus(n.bound()))
    }

    pub fn labels(&self) -> Vec<Complexity> {
        let mut out = vec![self.label];
        self.children.iter().for_each(|c| out.extend(c.labels()));
        out
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ProofNode::size).sum::<usize>()
    }

    /// Processor names in preorder, e.g. "DG(2)" for a split into two.
    pub fn processor_sequence(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(st) = &self.step {
            if self.children.len() > 1 {
                out.push(format!("{}({})", st.processor, self.children.len()));
            } else {
                out.push(format!("{}[{}]", st.processor, self.label));
            }
        }
        self.children.iter().for_each(|c| out.extend(c.processor_sequence()));
        out
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        self.render_into(&mut s, 0);
        s
    }

    fn render_into(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        let head = match &self.step {
            Some(st) => format!("{} ({})", st.processor, self.label),
            None if self.problem.is_solved() => "solved".to_string(),
            None => "open".to_string(),
        };
        let _ = writeln!(out, "{}* {}", pad, head);
        for line in self.problem.to_string().lines() {
            let _ = writeln!(out, "{}  {}", pad, line);
        }
        if let Some(Step { witness, .. }) = &self.step {
            if let Some(w) = witness_summary(witness) {
                let _ = writeln!(out, "{}  {}", pad, w);
            }
        }
        for c in &self.children {
            c.render_into(out, depth + 1);
        }
    }
}

fn witness_summary(w: &Witness) -> Option<String> {
    let ids = |s: &BTreeSet<AdpId>| s.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
    Some(match w {
        Witness::UsableRules { usable } => format!("usable: {{{}}}", ids(usable)),
        Witness::DependencyGraph { prefixes, .. } => format!("{} SCC-prefix(es)", prefixes.len()),
        Witness::ReductionPair { interpretation, strict } => format!("{}; strict: {}", interpretation, ids(strict)),
        Witness::KnowledgePropagation { alpha, pre } => format!("removed {} with Pre = {{{}}}", alpha, ids(pre)),
        Witness::ProbabilityRemoval { steps } => format!("{} DT reduction pair step(s)", steps.len()),
        Witness::RuleOverlap { alpha, pos, deltas, .. } => {
            let ds: Vec<String> = deltas.iter().map(|d| d.to_string()).collect();
            format!("{} at {}: {}", alpha, pos, ds.join(", "))
        }
    })
}

pub fn extract_bound(t: &ProofNode) -> Complexity {
    t.bound()
}

/// Replays every witness; an empty result means every step re-validates.
pub fn check_soundness_bookkeeping(t: &ProofNode) -> Vec<Violation> {
    let mut out = Vec::new();
    check_node(t, &mut Vec::new(), &mut out);
    out
}

fn check_node(n: &ProofNode, path: &mut Vec<usize>, out: &mut Vec<Violation>) {
    let proc = n.step.as_ref().map(|s| s.processor);
    let mut fail = |msg: String| out.push(Violation { path: path.clone(), processor: proc, message: msg });
    match &n.step {
        None => {
            let expect = if n.problem.is_solved() { Complexity::ZERO } else { Complexity::Omega };
            if n.label != expect {
                fail(format!("leaf labelled {} but expected {}", n.label, expect));
            }
        }
        Some(st) => {
            let kids: Vec<AdpProblem> = n.children.iter().map(|c| c.problem.clone()).collect();
            if let Err(e) = check_step(&n.problem, n.label, st, &kids) {
                fail(e);
            }
        }
    }
    for (i, c) in n.children.iter().enumerate() {
        path.push(i);
        check_node(c, path, out);
        path.pop();
    }
}

fn expect_children(actual: &[AdpProblem], expected: &[AdpProblem]) -> Result<(), String> {
    if actual != expected {
        return Err(format!("children do not match the processor result ({} recorded, {} expected)", actual.len(), expected.len()));
    }
    Ok(())
}

fn check_step(p: &AdpProblem, label: Complexity, st: &Step, kids: &[AdpProblem]) -> Result<(), String> {
    let zero = |c: Complexity| if c == Complexity::ZERO { Ok(()) } else { Err(format!("label {} should be Pol_0", c)) };
    match (&st.processor, &st.witness) {
        (Processor::Ur, Witness::UsableRules { usable }) => {
            zero(label)?;
            let needed = usable_rules(&p.adps);
            if let Some(id) = needed.difference(usable).next() {
                return Err(format!("{} is usable but missing from the witness", id));
            }
            expect_children(kids, &[apply_usable(p, usable)])
        }
        (Processor::Dg, Witness::DependencyGraph { graph, prefixes }) => {
            zero(label)?;
            check_graph(p, graph)?;
            check_prefixes(graph, prefixes)?;
            expect_children(kids, &split_by_prefixes(p, graph, prefixes))
        }
        (Processor::Kp, Witness::KnowledgePropagation { alpha, pre }) => {
            zero(label)?;
            if !p.s.contains(alpha) {
                return Err(format!("{} is not in S", alpha));
            }
            let actual = pre_set(&dep_graph(&p.adps), *alpha);
            if !actual.is_subset(pre) {
                return Err(format!("Pre({}) is larger than recorded", alpha));
            }
            if let Some(b) = pre.intersection(&p.s).next() {
                return Err(format!("Pre({}) contains {} from S", alpha, b));
            }
            let mut s = p.s.clone();
            s.remove(alpha);
            expect_children(kids, &[AdpProblem::new(p.adps.clone(), s)])
        }
        (Processor::Rp, Witness::ReductionPair { interpretation, strict }) => {
            check_interpretation(&p.adps, &p.s, interpretation, strict)?;
            let c = classify_interpretation(interpretation, &constructors_of(p));
            if c != label {
                return Err(format!("interpretation gives {} but node is labelled {}", c, label));
            }
            expect_children(kids, &[AdpProblem::new(p.adps.clone(), p.s.difference(strict).copied().collect())])
        }
        (Processor::Pr, Witness::ProbabilityRemoval { steps }) => {
            let d = dt_problem(p).ok_or("some ADP is probabilistic")?;
            let (c, _) = solve_dt(&d, &RpConfig::default(), Some(steps))?;
            if c != label {
                return Err(format!("DT steps give {} but node is labelled {}", c, label));
            }
            expect_children(kids, &[])
        }
        (Processor::Roi, Witness::RuleOverlap { alpha, branch, pos, deltas }) => {
            zero(label)?;
            let r = proc_roi(p, *alpha, *branch, pos).map_err(|e| e.to_string())?;
            match &r.witness {
                Witness::RuleOverlap { deltas: d, .. } if d == deltas => {}
                _ => return Err("narrowing substitutions differ".into()),
            }
            expect_children(kids, &r.subproblems)
        }
        (proc, _) => Err(format!("witness does not belong to {}", proc)),
    }
}

fn check_graph(p: &AdpProblem, g: &DepGraph) -> Result<(), String> {
    let fresh = dep_graph(&p.adps);
    if fresh.nodes != g.nodes || fresh.owners != g.owners {
        return Err("graph nodes differ from dp⊥(P)".into());
    }
    if let Some((i, j)) = fresh.edges.difference(&g.edges).next() {
        return Err(format!("graph misses the edge {} -> {}", g.nodes[*i], g.nodes[*j]));
    }
    Ok(())
}

fn check_prefixes(g: &DepGraph, prefixes: &[SccPrefix]) -> Result<(), String> {
    let r = g.reach_plus();
    let reaches = |a: usize, b: usize| a == b || r[a][b];
    let sccs = g.sccs();
    for j in prefixes {
        if !sccs.contains(&j.scc) || !j.scc.is_subset(&j.nodes) {
            return Err("prefix is not anchored at an SCC".into());
        }
        let anchor = *j.scc.iter().next().expect("nonempty scc");
        for &a in &j.nodes {
            if !reaches(a, anchor) {
                return Err(format!("node {} does not reach its SCC", g.nodes[a]));
            }
            if j.nodes.iter().any(|&b| !reaches(a, b) && !reaches(b, a)) {
                return Err("prefix contains incomparable nodes".into());
            }
        }
        let extendable = (0..g.nodes.len())
            .filter(|v| !j.nodes.contains(v))
            .any(|v| reaches(v, anchor) && j.nodes.iter().all(|&b| reaches(v, b) || reaches(b, v)));
        if extendable {
            return Err("prefix is not maximal".into());
        }
    }
    for scc in sccs {
        if !prefixes.iter().any(|j| scc.is_subset(&j.nodes)) {
            return Err("an SCC is covered by no prefix".into());
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- JSON

fn ids_json(s: &BTreeSet<AdpId>) -> Value {
    json!(s.iter().map(|i| i.0).collect::<Vec<_>>())
}

fn term_json(t: &Term) -> Value {
    Value::String(t.to_string())
}

fn problem_json(p: &AdpProblem) -> Value {
    let mut vars = BTreeSet::new();
    for a in &p.adps {
        a.lhs.collect_vars(&mut vars);
        a.rhs.iter().for_each(|(_, r)| r.collect_vars(&mut vars));
    }
    json!({
        "vars": vars.iter().map(|v| v.name().to_string()).collect::<Vec<_>>(),
        "adps": p.adps.iter().map(|a| json!({
            "id": a.id.0,
            "lhs": term_json(&a.lhs),
            "rhs": a.rhs.iter().map(|(q, r)| json!([q.to_string(), term_json(r)])).collect::<Vec<_>>(),
            "m": a.m,
        })).collect::<Vec<_>>(),
        "s": ids_json(&p.s),
    })
}

pub fn interpretation_json(i: &Interpretation) -> Value {
    json!(i
        .polys
        .iter()
        .map(|((f, ann), p)| json!({
            "symbol": f.name(),
            "arity": f.arity(),
            "annotated": ann,
            "monomials": p.terms.iter().map(|(m, c)| json!([c.to_string(), m.iter().map(|(v, e)| json!([v, e])).collect::<Vec<_>>()])).collect::<Vec<_>>(),
        }))
        .collect::<Vec<_>>())
}

fn dp_json(d: &Dp) -> Value {
    json!({"lhs": term_json(&d.lhs), "rhs": d.rhs.as_ref().map(term_json)})
}

fn dt_json(d: &Dt) -> Value {
    json!({"lhs": term_json(&d.lhs), "rhs": d.rhs.iter().map(term_json).collect::<Vec<_>>()})
}

fn witness_json(w: &Witness) -> Value {
    match w {
        Witness::UsableRules { usable } => json!({"usable": ids_json(usable)}),
        Witness::DependencyGraph { graph, prefixes } => json!({
            "nodes": graph.nodes.iter().zip(&graph.owners).map(|(d, o)| {
                let mut v = dp_json(d);
                v["owners"] = ids_json(o);
                v
            }).collect::<Vec<_>>(),
            "edges": graph.edges.iter().map(|(i, j)| json!([i, j])).collect::<Vec<_>>(),
            "prefixes": prefixes.iter().map(|j| json!({"scc": j.scc, "nodes": j.nodes})).collect::<Vec<_>>(),
        }),
        Witness::ReductionPair { interpretation, strict } => {
            json!({"interpretation": interpretation_json(interpretation), "strict": ids_json(strict)})
        }
        Witness::KnowledgePropagation { alpha, pre } => json!({"alpha": alpha.0, "pre": ids_json(pre)}),
        Witness::ProbabilityRemoval { steps } => json!({"steps": steps.iter().map(|s| json!({
            "dts": s.dts.iter().map(dt_json).collect::<Vec<_>>(),
            "s": s.s,
            "interpretation": interpretation_json(&s.interpretation),
            "strict": s.strict,
            "complexity": s.complexity.to_string(),
        })).collect::<Vec<_>>()}),
        Witness::RuleOverlap { alpha, branch, pos, deltas } => json!({
            "alpha": alpha.0,
            "branch": branch,
            "pos": pos.to_string(),
            "deltas": deltas.iter().map(|d| d.0.iter().map(|(k, t)| (k.name().to_string(), term_json(t))).collect::<BTreeMap<_, _>>()).collect::<Vec<_>>(),
        }),
    }
}

fn node_json(n: &ProofNode) -> Value {
    json!({
        "problem": problem_json(&n.problem),
        "complexity": n.label.to_string(),
        "processor": n.step.as_ref().map(|s| s.processor.name()),
        "witness": n.step.as_ref().map(|s| witness_json(&s.witness)),
        "children": n.children.iter().map(node_json).collect::<Vec<_>>(),
    })
}

pub fn to_json(root: &ProofNode) -> Value {
    json!({"schema": SCHEMA, "bound": root.bound().to_string(), "solved": root.is_solved(), "root": node_json(root)})
}

// ---------------------------------------------------------------- JSON reading

type R<T> = Result<T, String>;

fn field<'a>(v: &'a Value, k: &str) -> R<&'a Value> {
    v.get(k).ok_or_else(|| format!("missing field '{}'", k))
}

fn as_str<'a>(v: &'a Value, k: &str) -> R<&'a str> {
    field(v, k)?.as_str().ok_or_else(|| format!("'{}' is not a string", k))
}

fn as_arr<'a>(v: &'a Value, k: &str) -> R<&'a Vec<Value>> {
    field(v, k)?.as_array().ok_or_else(|| format!("'{}' is not an array", k))
}

fn as_u64(v: &Value) -> R<u64> {
    v.as_u64().ok_or_else(|| format!("expected a number, got {}", v))
}

fn ids_from(v: &Value, k: &str) -> R<BTreeSet<AdpId>> {
    as_arr(v, k)?.iter().map(|x| as_u64(x).map(|n| AdpId(n as u32))).collect()
}

fn usizes_from(v: &Value, k: &str) -> R<BTreeSet<usize>> {
    as_arr(v, k)?.iter().map(|x| as_u64(x).map(|n| n as usize)).collect()
}

fn rational(s: &str) -> R<Rational> {
    s.parse::<Rational>().map_err(|e| format!("bad rational '{}': {}", s, e))
}

struct Ctx {
    vars: BTreeSet<Var>,
}

impl Ctx {
    fn term(&self, v: &Value) -> R<Term> {
        let s = v.as_str().ok_or("term is not a string")?;
        parse_term(s, &self.vars, &BTreeSet::new(), false).map_err(|e| format!("term '{}': {}", s, e))
    }
}

fn problem_from(v: &Value) -> R<(AdpProblem, Ctx)> {
    let vars = as_arr(v, "vars")?.iter().map(|x| x.as_str().map(Var::new).ok_or("var is not a string")).collect::<Result<_, _>>()?;
    let ctx = Ctx { vars };
    let mut adps = Vec::new();
    for a in as_arr(v, "adps")? {
        let rhs = as_arr(a, "rhs")?
            .iter()
            .map(|b| {
                let q = b.get(0).and_then(Value::as_str).ok_or("branch probability")?;
                Ok((rational(q)?, ctx.term(b.get(1).ok_or("branch term")?)?))
            })
            .collect::<R<Vec<_>>>()?;
        adps.push(Adp {
            id: AdpId(as_u64(field(a, "id")?)? as u32),
            lhs: ctx.term(field(a, "lhs")?)?,
            rhs,
            m: field(a, "m")?.as_bool().ok_or("m is not a bool")?,
        });
    }
    Ok((AdpProblem::new(adps, ids_from(v, "s")?), ctx))
}

pub fn interpretation_from(v: &Value) -> R<Interpretation> {
    let mut out = Interpretation::default();
    for e in v.as_array().ok_or("interpretation is not an array")? {
        let sym = Symbol::new(as_str(e, "symbol")?, as_u64(field(e, "arity")?)? as usize);
        let ann = field(e, "annotated")?.as_bool().ok_or("annotated is not a bool")?;
        let mut p: Poly<usize> = Poly::zero();
        for m in as_arr(e, "monomials")? {
            let c = rational(m.get(0).and_then(Value::as_str).ok_or("coefficient")?)?;
            let mono = m
                .get(1)
                .and_then(Value::as_array)
                .ok_or("monomial")?
                .iter()
                .map(|ve| Ok((as_u64(&ve[0])? as usize, as_u64(&ve[1])? as u32)))
                .collect::<R<Vec<_>>>()?;
            p.add_term(mono, c);
        }
        out.set(sym, ann, p);
    }
    Ok(out)
}

fn witness_from(proc: Processor, v: &Value, ctx: &Ctx) -> R<Witness> {
    Ok(match proc {
        Processor::Ur => Witness::UsableRules { usable: ids_from(v, "usable")? },
        Processor::Dg => {
            let mut nodes = Vec::new();
            let mut owners = Vec::new();
            for n in as_arr(v, "nodes")? {
                let rhs = match field(n, "rhs")? {
                    Value::Null => None,
                    t => Some(ctx.term(t)?),
                };
                nodes.push(Dp { lhs: ctx.term(field(n, "lhs")?)?, rhs });
                owners.push(ids_from(n, "owners")?);
            }
            let edges = as_arr(v, "edges")?.iter().map(|e| Ok((as_u64(&e[0])? as usize, as_u64(&e[1])? as usize))).collect::<R<_>>()?;
            let prefixes = as_arr(v, "prefixes")?
                .iter()
                .map(|j| Ok(SccPrefix { scc: usizes_from(j, "scc")?, nodes: usizes_from(j, "nodes")? }))
                .collect::<R<_>>()?;
            Witness::DependencyGraph { graph: DepGraph { nodes, owners, edges }, prefixes }
        }
        Processor::Rp => Witness::ReductionPair { interpretation: interpretation_from(field(v, "interpretation")?)?, strict: ids_from(v, "strict")? },
        Processor::Kp => Witness::KnowledgePropagation { alpha: AdpId(as_u64(field(v, "alpha")?)? as u32), pre: ids_from(v, "pre")? },
        Processor::Pr => {
            let steps = as_arr(v, "steps")?
                .iter()
                .map(|s| {
                    let dts = as_arr(s, "dts")?
                        .iter()
                        .map(|d| Ok(Dt { lhs: ctx.term(field(d, "lhs")?)?, rhs: as_arr(d, "rhs")?.iter().map(|t| ctx.term(t)).collect::<R<_>>()? }))
                        .collect::<R<_>>()?;
                    Ok(PrStep {
                        dts,
                        s: usizes_from(s, "s")?,
                        interpretation: interpretation_from(field(s, "interpretation")?)?,
                        strict: usizes_from(s, "strict")?,
                        complexity: as_str(s, "complexity")?.parse()?,
                    })
                })
                .collect::<R<_>>()?;
            Witness::ProbabilityRemoval { steps }
        }
        Processor::Roi => {
            let deltas = as_arr(v, "deltas")?
                .iter()
                .map(|d| {
                    let obj = d.as_object().ok_or("substitution is not an object")?;
                    let mut vars = ctx.vars.clone();
                    for t in obj.values() {
                        // Range variables of a narrowing substitution are not problem variables.
                        for w in t.as_str().unwrap_or("").split(|c: char| !(c.is_alphanumeric() || c == '_')) {
                            if w.starts_with('_') {
                                vars.insert(Var::new(w));
                            }
                        }
                    }
                    let c2 = Ctx { vars };
                    Ok(Subst(obj.iter().map(|(k, t)| Ok((Var::new(k), c2.term(t)?))).collect::<R<_>>()?))
                })
                .collect::<R<_>>()?;
            let pos = Position::parse(as_str(v, "pos")?).ok_or("bad position")?;
            Witness::RuleOverlap { alpha: AdpId(as_u64(field(v, "alpha")?)? as u32), branch: as_u64(field(v, "branch")?)? as usize, pos, deltas }
        }
    })
}

fn node_from(v: &Value) -> R<ProofNode> {
    let (problem, ctx) = problem_from(field(v, "problem")?)?;
    let label: Complexity = as_str(v, "complexity")?.parse()?;
    let step = match field(v, "processor")? {
        Value::Null => None,
        p => {
            let processor = Processor::from_name(p.as_str().unwrap_or("")).ok_or_else(|| format!("unknown processor {}", p))?;
            Some(Step { processor, witness: witness_from(processor, field(v, "witness")?, &ctx)? })
        }
    };
    let children = as_arr(v, "children")?.iter().map(node_from).collect::<R<_>>()?;
    Ok(ProofNode { problem, label, step, children })
}

pub fn from_json(v: &Value) -> R<ProofNode> {
    if as_str(v, "schema")? != SCHEMA {
        return Err(format!("unsupported schema, expected {}", SCHEMA));
    }
    node_from(field(v, "root")?)
}
