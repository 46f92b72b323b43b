//! Reader for the PTRS text format and for standalone terms.
//!
//! ```text
//! (VAR x y)
//! (RULES
//!   geo(x) -> {1/2: geo(s(x)), 1/2: x}
//! )
//! ```
//! `#` directly after an identifier marks an annotated occurrence; anywhere else it starts a comment.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::ptrs::{ProbRule, Ptrs, PtrsError};
use crate::term::{Symbol, Term, Var};
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Slash,
    Arrow,
    Word(String, bool),
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '.'
}

fn lex(text: &str) -> Result<Vec<Spanned>, PtrsError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            '/' => Some(Tok::Slash),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned { tok, line: l0, col: c0 });
            i += 1;
            col += 1;
        } else if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            i += 1;
            col += 1;
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(Spanned { tok: Tok::Arrow, line: l0, col: c0 });
            i += 2;
            col += 2;
        } else if is_ident_char(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            let annotated = chars.get(i) == Some(&'#');
            if annotated {
                i += 1;
                col += 1;
            }
            out.push(Spanned { tok: Tok::Word(word, annotated), line: l0, col: c0 });
        } else {
            return Err(PtrsError::Syntax { line, col, msg: format!("unexpected character '{}'", c) });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    vars: BTreeSet<String>,
    arities: BTreeMap<String, usize>,
    allow_annotations: bool,
    end: (usize, usize),
}

impl Parser {
    fn new(text: &str, vars: BTreeSet<String>, allow_annotations: bool) -> Result<Self, PtrsError> {
        let toks = lex(text)?;
        let lines: Vec<&str> = text.split('\n').collect();
        let end = (lines.len(), lines.last().map_or(0, |l| l.chars().count()) + 1);
        Ok(Parser { toks, pos: 0, vars, arities: BTreeMap::new(), allow_annotations, end })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |s| (s.line, s.col))
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PtrsError> {
        let (line, col) = self.here();
        Err(PtrsError::Syntax { line, col, msg: msg.into() })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), PtrsError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {}", what))
        }
    }

    fn word(&mut self) -> Result<(String, bool, usize, usize), PtrsError> {
        match self.toks.get(self.pos) {
            Some(Spanned { tok: Tok::Word(w, a), line, col }) => {
                let r = (w.clone(), *a, *line, *col);
                self.pos += 1;
                Ok(r)
            }
            _ => self.err("expected identifier"),
        }
    }

    fn term(&mut self) -> Result<Term, PtrsError> {
        let (name, annotated, line, col) = self.word()?;
        if annotated && !self.allow_annotations {
            return Err(PtrsError::Syntax { line, col, msg: "annotations are not allowed here".into() });
        }
        let mut args = Vec::new();
        let has_parens = self.peek() == Some(&Tok::LParen);
        if has_parens {
            self.pos += 1;
            loop {
                args.push(self.term()?);
                match self.peek() {
                    Some(Tok::Comma) => self.pos += 1,
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        break;
                    }
                    _ => return self.err("expected ',' or ')'"),
                }
            }
        }
        if self.vars.contains(&name) {
            if has_parens || annotated {
                return Err(PtrsError::Arity { symbol: name, line, col, msg: "variable used as function symbol".into() });
            }
            return Ok(Term::Var(Var::new(&name)));
        }
        match self.arities.get(&name) {
            Some(&k) if k != args.len() => {
                return Err(PtrsError::Arity {
                    symbol: name.clone(),
                    line,
                    col,
                    msg: format!("used with {} arguments, previously with {}", args.len(), k),
                })
            }
            None => {
                self.arities.insert(name.clone(), args.len());
            }
            _ => {}
        }
        let sym = Symbol::new(&name, args.len());
        Ok(Term::App { sym, annotated, args })
    }

    fn int(&mut self) -> Result<BigInt, PtrsError> {
        let (w, a, line, col) = self.word()?;
        match w.parse::<BigInt>() {
            Ok(n) if !a && w.chars().all(|c| c.is_ascii_digit()) => Ok(n),
            _ => Err(PtrsError::Syntax { line, col, msg: format!("expected a number, found '{}'", w) }),
        }
    }

    fn rational(&mut self) -> Result<Rational, PtrsError> {
        let (line, col) = self.here();
        let num = self.int()?;
        let den = if self.peek() == Some(&Tok::Slash) {
            self.pos += 1;
            self.int()?
        } else {
            BigInt::one()
        };
        if den.is_zero() {
            return Err(PtrsError::Syntax { line, col, msg: "zero denominator".into() });
        }
        Ok(Rational::new(num, den))
    }
}

/// Parses a PTRS file; checks probabilities, variables and arities.
pub fn parse_ptrs(text: &str) -> Result<Ptrs, PtrsError> {
    let mut p = Parser::new(text, BTreeSet::new(), false)?;
    p.expect(Tok::LParen, "'('")?;
    let (kw, _, line, col) = p.word()?;
    if kw != "VAR" {
        return Err(PtrsError::Syntax { line, col, msg: "expected VAR".into() });
    }
    let mut vars = BTreeSet::new();
    while let Some(Tok::Word(..)) = p.peek() {
        let (v, _, _, _) = p.word()?;
        vars.insert(v);
    }
    p.expect(Tok::RParen, "')'")?;
    p.vars = vars.clone();
    p.expect(Tok::LParen, "'('")?;
    let (kw, _, line, col) = p.word()?;
    if kw != "RULES" {
        return Err(PtrsError::Syntax { line, col, msg: "expected RULES".into() });
    }
    let mut rules = Vec::new();
    while p.peek() != Some(&Tok::RParen) {
        if p.peek().is_none() {
            return p.err("unterminated RULES block");
        }
        let (line, col) = p.here();
        let lhs = p.term()?;
        p.expect(Tok::Arrow, "'->'")?;
        let rhs = if p.peek() == Some(&Tok::LBrace) {
            p.pos += 1;
            let mut branches = Vec::new();
            loop {
                let (pl, pc) = p.here();
                let prob = p.rational()?;
                if prob <= Rational::zero() || prob > Rational::one() {
                    return Err(PtrsError::Probability { line: pl, col: pc, msg: format!("probability {} outside (0,1]", prob) });
                }
                p.expect(Tok::Colon, "':'")?;
                branches.push((prob, p.term()?));
                match p.peek() {
                    Some(Tok::Comma) => p.pos += 1,
                    Some(Tok::RBrace) => {
                        p.pos += 1;
                        break;
                    }
                    _ => return p.err("expected ',' or '}'"),
                }
            }
            branches
        } else {
            vec![(Rational::one(), p.term()?)]
        };
        rules.push(ProbRule::new(lhs, rhs).map_err(|e| e.at(line, col))?);
    }
    p.expect(Tok::RParen, "')'")?;
    if p.peek().is_some() {
        return p.err("trailing input after RULES block");
    }
    let vars = vars.into_iter().map(|v| Var::new(&v)).collect();
    Ptrs::new(vars, rules)
}

/// Parses a term; identifiers in `vars` are variables. `#` suffixes are accepted.
/// Symbols of `known` fix arities; unknown symbols are rejected when `strict`.
pub fn parse_term(text: &str, vars: &BTreeSet<Var>, known: &BTreeSet<Symbol>, strict: bool) -> Result<Term, PtrsError> {
    let names: BTreeSet<String> = vars.iter().map(|v| v.name().to_string()).collect();
    let mut p = Parser::new(text, names, true)?;
    for s in known {
        p.arities.insert(s.name().to_string(), s.arity());
    }
    let t = p.term()?;
    if p.peek().is_some() {
        return p.err("trailing input after term");
    }
    if strict {
        let mut syms = BTreeSet::new();
        t.symbols(&mut syms);
        if let Some(s) = syms.iter().find(|s| !known.contains(*s)) {
            return Err(PtrsError::Syntax { line: 1, col: 1, msg: format!("unknown symbol '{}'", s) });
        }
    }
    Ok(t)
}
