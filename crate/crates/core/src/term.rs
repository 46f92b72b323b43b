//! First-order terms with per-occurrence annotation flags.
//!
//! An annotated occurrence of a defined symbol `f` stands for its twin `f#`.
//! Matching and unification always look at the flattened structure.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("invalid position {0} in {1}")]
    InvalidPosition(Position, String),
}

/// A function symbol. Whether it is defined or a constructor depends on the system it lives in.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Symbol {
    name: Arc<str>,
    arity: usize,
}

impl Symbol {
    pub fn new(name: &str, arity: usize) -> Self {
        assert!(!name.is_empty(), "symbol name must be nonempty");
        Symbol { name: Arc::from(name), arity }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Path of 1-based argument indices; the empty path is the root.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Self {
        let mut p = self.0.clone();
        p.push(i);
        Position(p)
    }

    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    pub fn is_strictly_above(&self, other: &Position) -> bool {
        self.0.len() < other.0.len() && self.is_prefix_of(other)
    }

    pub fn parse(s: &str) -> Option<Self> {
        if s == "e" || s == "ε" || s.is_empty() {
            return Some(Position::root());
        }
        s.split('.').map(|p| p.parse::<usize>().ok().filter(|&i| i > 0)).collect::<Option<Vec<_>>>().map(Position)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Var(Var),
    App { sym: Symbol, annotated: bool, args: Vec<Term> },
}

/// The set of defined symbols of a system.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Defined(pub BTreeSet<Symbol>);

impl Defined {
    pub fn contains(&self, s: &Symbol) -> bool {
        self.0.contains(s)
    }
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Var::new(name))
    }

    pub fn app(sym: Symbol, args: Vec<Term>) -> Term {
        assert_eq!(sym.arity(), args.len(), "arity mismatch for {}", sym);
        Term::App { sym, annotated: false, args }
    }

    pub fn app_annotated(sym: Symbol, args: Vec<Term>) -> Term {
        assert_eq!(sym.arity(), args.len(), "arity mismatch for {}", sym);
        Term::App { sym, annotated: true, args }
    }

    /// Convenience constructor: the symbol's arity is taken from `args`.
    pub fn fun(name: &str, args: Vec<Term>) -> Term {
        Term::App { sym: Symbol::new(name, args.len()), annotated: false, args }
    }

    pub fn constant(name: &str) -> Term {
        Term::fun(name, Vec::new())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn root(&self) -> Option<&Symbol> {
        match self {
            Term::Var(_) => None,
            Term::App { sym, .. } => Some(sym),
        }
    }

    pub fn is_annotated(&self) -> bool {
        matches!(self, Term::App { annotated: true, .. })
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App { args, .. } => args,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App { args, .. } => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// All positions in leftmost-outermost (pre-)order.
    pub fn positions(&self) -> Vec<Position> {
        self.positions_where(|_| true)
    }

    /// Positions whose occurrence satisfies `pred`, in leftmost-outermost order.
    pub fn positions_where(&self, pred: impl Fn(&Term) -> bool) -> Vec<Position> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect_positions(&pred, &mut path, &mut out);
        out
    }

    fn collect_positions(&self, pred: &impl Fn(&Term) -> bool, path: &mut Vec<usize>, out: &mut Vec<Position>) {
        if pred(self) {
            out.push(Position(path.clone()));
        }
        for (i, a) in self.args().iter().enumerate() {
            path.push(i + 1);
            a.collect_positions(pred, path, out);
            path.pop();
        }
    }

    pub fn function_positions(&self) -> Vec<Position> {
        self.positions_where(|t| !t.is_var())
    }

    pub fn defined_positions(&self, defined: &Defined) -> Vec<Position> {
        self.positions_where(|t| t.root().is_some_and(|s| defined.contains(s)))
    }

    pub fn annotated_positions(&self) -> Vec<Position> {
        self.positions_where(Term::is_annotated)
    }

    pub fn subterm_at(&self, pos: &Position) -> Result<&Term, TermError> {
        let mut t = self;
        for &i in &pos.0 {
            match t.args().get(i.wrapping_sub(1)) {
                Some(a) if i > 0 => t = a,
                _ => return Err(TermError::InvalidPosition(pos.clone(), self.to_string())),
            }
        }
        Ok(t)
    }

    pub fn replace_at(&self, pos: &Position, r: Term) -> Result<Term, TermError> {
        self.map_at(pos, |_| r)
    }

    fn map_at(&self, pos: &Position, f: impl FnOnce(&Term) -> Term) -> Result<Term, TermError> {
        fn go(t: &Term, path: &[usize], f: impl FnOnce(&Term) -> Term) -> Option<Term> {
            match path.split_first() {
                None => Some(f(t)),
                Some((&i, rest)) => match t {
                    Term::App { sym, annotated, args } if i >= 1 && i <= args.len() => {
                        let mut args = args.clone();
                        args[i - 1] = go(&args[i - 1], rest, f)?;
                        Some(Term::App { sym: sym.clone(), annotated: *annotated, args })
                    }
                    _ => None,
                },
            }
        }
        go(self, &pos.0, f).ok_or_else(|| TermError::InvalidPosition(pos.clone(), self.to_string()))
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Variables in order of first occurrence.
    pub fn vars_ordered(&self) -> Vec<Var> {
        fn go(t: &Term, seen: &mut Vec<Var>) {
            match t {
                Term::Var(v) => {
                    if !seen.contains(v) {
                        seen.push(v.clone())
                    }
                }
                Term::App { args, .. } => args.iter().for_each(|a| go(a, seen)),
            }
        }
        let mut seen = Vec::new();
        go(self, &mut seen);
        seen
    }

    pub fn symbols(&self, out: &mut BTreeSet<Symbol>) {
        if let Term::App { sym, args, .. } = self {
            out.insert(sym.clone());
            args.iter().for_each(|a| a.symbols(out));
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App { args, .. } => args.iter().all(Term::is_ground),
        }
    }

    /// Applies σ; flags on this term's occurrences survive, bindings are inserted flattened.
    pub fn apply(&self, sigma: &Subst) -> Term {
        match self {
            Term::Var(v) => match sigma.get(v) {
                Some(t) => t.flat(),
                None => self.clone(),
            },
            Term::App { sym, annotated, args } => Term::App {
                sym: sym.clone(),
                annotated: *annotated,
                args: args.iter().map(|a| a.apply(sigma)).collect(),
            },
        }
    }

    /// ♭: clears every flag.
    pub fn flat(&self) -> Term {
        match self {
            Term::Var(_) => self.clone(),
            Term::App { sym, args, .. } => {
                Term::App { sym: sym.clone(), annotated: false, args: args.iter().map(Term::flat).collect() }
            }
        }
    }

    pub fn has_annotations(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App { annotated, args, .. } => *annotated || args.iter().any(Term::has_annotations),
        }
    }

    /// The same term with the root flag set to `on` (no-op on variables).
    pub fn with_root_flag(&self, on: bool) -> Term {
        match self {
            Term::Var(_) => self.clone(),
            Term::App { sym, args, .. } => Term::App { sym: sym.clone(), annotated: on, args: args.clone() },
        }
    }

    /// ♭↑_π: clears flags strictly above π.
    pub fn flat_above(&self, pos: &Position) -> Result<Term, TermError> {
        self.subterm_at(pos)?;
        fn go(t: &Term, path: &[usize]) -> Term {
            match (t, path.split_first()) {
                (Term::App { sym, args, .. }, Some((&i, rest))) => {
                    let args = args.iter().enumerate().map(|(j, a)| if j + 1 == i { go(a, rest) } else { a.clone() }).collect();
                    Term::App { sym: sym.clone(), annotated: false, args }
                }
                _ => t.clone(),
            }
        }
        Ok(go(self, &pos.0))
    }

    /// ♯_Φ: exactly the occurrences in Φ carry the flag.
    pub fn annotate(&self, phi: &BTreeSet<Position>, defined: &Defined) -> Result<Term, TermError> {
        for p in phi {
            let s = self.subterm_at(p)?;
            let ok = match s {
                Term::App { sym, annotated, .. } => *annotated || defined.contains(sym),
                Term::Var(_) => false,
            };
            if !ok {
                return Err(TermError::InvalidPosition(p.clone(), self.to_string()));
            }
        }
        fn go(t: &Term, path: &mut Vec<usize>, phi: &BTreeSet<Position>) -> Term {
            match t {
                Term::Var(_) => t.clone(),
                Term::App { sym, args, .. } => {
                    let annotated = phi.iter().any(|p| p.0 == *path);
                    let args = args
                        .iter()
                        .enumerate()
                        .map(|(i, a)| {
                            path.push(i + 1);
                            let r = go(a, path, phi);
                            path.pop();
                            r
                        })
                        .collect();
                    Term::App { sym: sym.clone(), annotated, args }
                }
            }
        }
        Ok(go(self, &mut Vec::new(), phi))
    }

    /// ♯_D: flags every defined occurrence.
    pub fn annotate_all_defined(&self, defined: &Defined) -> Term {
        match self {
            Term::Var(_) => self.clone(),
            Term::App { sym, args, .. } => Term::App {
                sym: sym.clone(),
                annotated: defined.contains(sym),
                args: args.iter().map(|a| a.annotate_all_defined(defined)).collect(),
            },
        }
    }

    /// One entry per annotated position, paired with the flattened subterm there.
    pub fn annotated_subterms(&self) -> Vec<(Position, Term)> {
        self.annotated_positions()
            .into_iter()
            .map(|p| {
                let t = self.subterm_at(&p).expect("position from enumeration").flat();
                (p, t)
            })
            .collect()
    }

    pub fn rename(&self, f: &impl Fn(&Var) -> Var) -> Term {
        match self {
            Term::Var(v) => Term::Var(f(v)),
            Term::App { sym, annotated, args } => {
                Term::App { sym: sym.clone(), annotated: *annotated, args: args.iter().map(|a| a.rename(f)).collect() }
            }
        }
    }

    /// Most general matcher σ with pattern·σ = ♭(subject).
    pub fn match_term(pattern: &Term, subject: &Term) -> Option<Subst> {
        let mut sigma = Subst::new();
        if match_into(pattern, subject, &mut sigma) {
            Some(sigma)
        } else {
            None
        }
    }

    pub fn matches(pattern: &Term, subject: &Term) -> bool {
        match_into(pattern, subject, &mut Subst::new())
    }

    /// Most general unifier with occurs check; flags are ignored.
    pub fn unify(s: &Term, t: &Term) -> Option<Subst> {
        unify_all(vec![(s.flat(), t.flat())])
    }
}

/// Extends σ so that pattern·σ = ♭(subject); returns false on clash.
pub fn match_into(pattern: &Term, subject: &Term, sigma: &mut Subst) -> bool {
    match (pattern, subject) {
        (Term::Var(v), _) => match sigma.get(v) {
            Some(b) => eq_flat(b, subject),
            None => {
                sigma.insert(v.clone(), subject.flat());
                true
            }
        },
        (Term::App { sym: f, args: a, .. }, Term::App { sym: g, args: b, .. }) => {
            f == g && a.iter().zip(b).all(|(x, y)| match_into(x, y, sigma))
        }
        _ => false,
    }
}

/// Structural equality ignoring flags.
pub fn eq_flat(a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => x == y,
        (Term::App { sym: f, args: a, .. }, Term::App { sym: g, args: b, .. }) => {
            f == g && a.iter().zip(b).all(|(x, y)| eq_flat(x, y))
        }
        _ => false,
    }
}

fn occurs(v: &Var, t: &Term) -> bool {
    match t {
        Term::Var(w) => v == w,
        Term::App { args, .. } => args.iter().any(|a| occurs(v, a)),
    }
}

/// Unifies all pairs simultaneously.
pub fn unify_all(mut eqs: Vec<(Term, Term)>) -> Option<Subst> {
    let mut sigma = Subst::new();
    while let Some((s, t)) = eqs.pop() {
        let s = s.apply(&sigma);
        let t = t.apply(&sigma);
        match (s, t) {
            (Term::Var(x), Term::Var(y)) if x == y => {}
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if occurs(&x, &t) {
                    return None;
                }
                let single = Subst::single(x.clone(), t.clone());
                for b in sigma.0.values_mut() {
                    *b = b.apply(&single);
                }
                sigma.insert(x, t);
            }
            (Term::App { sym: f, args: a, .. }, Term::App { sym: g, args: b, .. }) => {
                if f != g {
                    return None;
                }
                eqs.extend(a.into_iter().zip(b));
            }
        }
    }
    Some(sigma)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Subst(pub BTreeMap<Var, Term>);

impl Subst {
    pub fn new() -> Self {
        Subst(BTreeMap::new())
    }

    pub fn single(v: Var, t: Term) -> Self {
        let mut s = Subst::new();
        s.insert(v, t);
        s
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.0.get(v)
    }

    pub fn insert(&mut self, v: Var, t: Term) {
        self.0.insert(v, t);
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Restriction to the given variables, dropping trivial bindings x ↦ x.
    pub fn restrict(&self, vars: &BTreeSet<Var>) -> Subst {
        Subst(
            self.0
                .iter()
                .filter(|(v, t)| vars.contains(*v) && **t != Term::Var((*v).clone()))
                .map(|(v, t)| (v.clone(), t.clone()))
                .collect(),
        )
    }

    /// Whether σ maps the given variables injectively to variables.
    pub fn is_renaming_on(&self, vars: &BTreeSet<Var>) -> bool {
        let mut images = BTreeSet::new();
        for v in vars {
            match self.get(v) {
                None => {
                    if !images.insert(v.clone()) {
                        return false;
                    }
                }
                Some(Term::Var(w)) => {
                    if !images.insert(w.clone()) {
                        return false;
                    }
                }
                Some(_) => return false,
            }
        }
        true
    }
}

impl fmt::Display for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(v, t)| format!("{} -> {}", v, t)).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Generates variable names that cannot clash with parsed input.
#[derive(Debug, Default)]
pub struct VarGen {
    next: usize,
}

impl VarGen {
    pub fn new() -> Self {
        VarGen { next: 0 }
    }

    pub fn fresh(&mut self) -> Var {
        self.next += 1;
        Var::new(&format!("?{}", self.next))
    }

    /// Renames every variable of `t` to a fresh one.
    pub fn rename_apart(&mut self, t: &Term) -> Term {
        let map: BTreeMap<Var, Var> = t.vars_ordered().into_iter().map(|v| (v, self.fresh())).collect();
        t.rename(&|v| map[v].clone())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{}", v),
            Term::App { sym, annotated, args } => {
                write!(f, "{}", sym)?;
                if *annotated {
                    f.write_str("#")?;
                }
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{}", a)?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(t: Term) -> Term {
        Term::fun("s", vec![t])
    }
    fn zero() -> Term {
        Term::constant("0")
    }
    fn x() -> Term {
        Term::var("x")
    }

    #[test]
    fn sizes() {
        let t = Term::fun("start", vec![s(zero()), s(zero())]);
        assert_eq!(t.size(), 5);
        assert_eq!(x().size(), 1);
        assert_eq!(Term::fun("q", vec![zero(), x(), x()]).size(), 4);
    }

    #[test]
    fn positions_and_replacement() {
        let t = Term::fun("q", vec![zero(), x(), x()]);
        let ps: Vec<String> = t.positions().iter().map(|p| p.to_string()).collect();
        assert_eq!(ps, ["ε", "1", "2", "3"]);
        assert_eq!(t.subterm_at(&Position(vec![2])).unwrap(), &x());
        let r = t.replace_at(&Position(vec![2]), s(x())).unwrap();
        assert_eq!(r.to_string(), "q(0,s(x),x)");
        assert!(t.subterm_at(&Position(vec![4])).is_err());
        assert!(t.subterm_at(&Position(vec![1, 1])).is_err());
    }

    #[test]
    fn annotation_algebra() {
        let f = Symbol::new("f", 1);
        let defined = Defined([f.clone()].into_iter().collect());
        let t = Term::fun("f", vec![Term::fun("f", vec![x()])]);
        let one: BTreeSet<_> = [Position(vec![1])].into_iter().collect();
        assert_eq!(t.annotate(&one, &defined).unwrap().to_string(), "f(f#(x))");
        let both: BTreeSet<_> = [Position::root(), Position(vec![1])].into_iter().collect();
        let ff = t.annotate(&both, &defined).unwrap();
        assert_eq!(ff.to_string(), "f#(f#(x))");
        assert_eq!(ff.flat(), t);
        assert_eq!(ff.flat_above(&Position(vec![1])).unwrap().to_string(), "f(f#(x))");
        assert_eq!(t.annotate_all_defined(&defined), ff);
        let bad: BTreeSet<_> = [Position(vec![1, 1])].into_iter().collect();
        assert!(t.annotate(&bad, &defined).is_err());
        let subs = t.annotate(&one, &defined).unwrap().annotated_subterms();
        assert_eq!(subs, vec![(Position(vec![1]), Term::fun("f", vec![x()]))]);
    }

    #[test]
    fn matching_and_unification() {
        let pat = Term::fun("q", vec![s(x()), s(Term::var("y")), Term::var("z")]);
        let subj = Term::fun("q", vec![s(zero()), s(zero()), s(zero())]);
        let sigma = Term::match_term(&pat, &subj).unwrap();
        assert_eq!(pat.apply(&sigma), subj);
        let nonlin = Term::fun("f", vec![x(), x()]);
        assert!(Term::match_term(&nonlin, &Term::fun("f", vec![zero(), s(zero())])).is_none());
        assert!(Term::unify(&x(), &s(x())).is_none());
        let u = Term::unify(&Term::fun("g", vec![x()]), &Term::fun("g", vec![s(Term::var("y"))])).unwrap();
        assert_eq!(u.get(&Var::new("x")), Some(&s(Term::var("y"))));
    }
}
