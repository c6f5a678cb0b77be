//! First-order formulas over polarities: sort atoms `X(v)`, `Y(v)`, the
//! relation `R(v,w)`, unary expansion symbols, connectives and quantifiers.
//!
//! Concrete syntax, loosest binding last: `~`, `&`, `|`, `->` (right
//! associative). `forall v0 . φ` scopes as far right as possible, while
//! `forall v0 φ` binds only the unary formula `φ`.

use std::collections::BTreeSet;
use std::fmt;

use super::lex::{Cursor, Tok};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    X(Var),
    Y(Var),
    R(Var, Var),
    Pred(String, Var),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(Var, Box<Formula>),
    Exists(Var, Box<Formula>),
}

impl Formula {
    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(v: u32, a: Formula) -> Formula {
        Formula::Forall(Var(v), Box::new(a))
    }

    pub fn exists(v: u32, a: Formula) -> Formula {
        Formula::Exists(Var(v), Box::new(a))
    }

    pub fn pred(name: &str, v: u32) -> Formula {
        Formula::Pred(name.to_string(), Var(v))
    }

    pub fn r(a: u32, b: u32) -> Formula {
        Formula::R(Var(a), Var(b))
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        let mut see = |v: &Var, bound: &Vec<Var>| {
            if !bound.contains(v) {
                out.insert(*v);
            }
        };
        match self {
            Formula::X(v) | Formula::Y(v) | Formula::Pred(_, v) => see(v, bound),
            Formula::R(a, b) => {
                see(a, bound);
                see(b, bound);
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(v, a) | Formula::Exists(v, a) => {
                bound.push(*v);
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Names of the expansion symbols, sorted.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Pred(s, _) = f {
                out.insert(s.clone());
            }
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => a.visit(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            _ => 4,
        }
    }
}

struct Wrapped<'a>(&'a Formula, bool);

fn w(g: &Formula, min: u8) -> Wrapped<'_> {
    Wrapped(g, g.precedence() < min)
}

impl fmt::Display for Wrapped<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::X(v) => write!(f, "X({v})"),
            Formula::Y(v) => write!(f, "Y({v})"),
            Formula::R(a, b) => write!(f, "R({a},{b})"),
            Formula::Pred(s, v) => write!(f, "{s}({v})"),
            Formula::Not(a) => write!(f, "~{}", w(a, 4)),
            Formula::And(a, b) => write!(f, "{} & {}", w(a, 3), w(b, 4)),
            Formula::Or(a, b) => write!(f, "{} | {}", w(a, 2), w(b, 3)),
            Formula::Implies(a, b) => write!(f, "{} -> {}", w(a, 2), w(b, 1)),
            Formula::Forall(v, a) => write!(f, "forall {v} {}", w(a, 4)),
            Formula::Exists(v, a) => write!(f, "exists {v} {}", w(a, 4)),
        }
    }
}

/// Parses a formula, accepting any unary expansion symbol.
pub fn parse_formula(text: &str) -> Result<Formula> {
    parse(text, None)
}

/// Parses a formula whose expansion symbols must come from `declared`.
pub fn parse_formula_with(text: &str, declared: &[&str]) -> Result<Formula> {
    parse(text, Some(declared))
}

fn parse(text: &str, declared: Option<&[&str]>) -> Result<Formula> {
    let mut p = Parser { cur: Cursor::new(text)?, declared };
    let f = p.implication()?;
    p.cur.expect_end()?;
    Ok(f)
}

struct Parser<'a> {
    cur: Cursor,
    declared: Option<&'a [&'a str]>,
}

fn parse_var(name: &str) -> Option<Var> {
    let digits = name.strip_prefix('v')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || (digits.len() > 1 && digits.starts_with('0')) {
        return None;
    }
    digits.parse().ok().map(Var)
}

impl Parser<'_> {
    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.cur.eat(&Tok::Arrow) {
            Ok(Formula::implies(lhs, self.implication()?))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut acc = self.conjunction()?;
        while self.cur.eat(&Tok::Bar) {
            acc = Formula::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut acc = self.unary()?;
        while self.cur.eat(&Tok::Amp) {
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn var(&mut self) -> Result<Var> {
        let t = self.cur.peek().clone();
        match &t.tok {
            Tok::Ident(s) => match parse_var(s) {
                Some(v) => {
                    self.cur.next();
                    Ok(v)
                }
                None => Err(self.cur.error_here(format!("expected a variable v0, v1, ..., found `{s}`"))),
            },
            other => Err(self.cur.error_here(format!("expected a variable, found {}", other.describe()))),
        }
    }

    fn unary(&mut self) -> Result<Formula> {
        let t = self.cur.peek().clone();
        match &t.tok {
            Tok::Tilde => {
                self.cur.next();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.cur.next();
                let f = self.implication()?;
                self.cur.expect(&Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(s) if s == "forall" || s == "exists" => {
                let universal = s == "forall";
                self.cur.next();
                let v = self.var()?;
                let body = if self.cur.eat(&Tok::Dot) {
                    self.implication()?
                } else {
                    self.unary()?
                };
                Ok(if universal {
                    Formula::Forall(v, Box::new(body))
                } else {
                    Formula::Exists(v, Box::new(body))
                })
            }
            Tok::Ident(s) => {
                let name = s.clone();
                self.cur.next();
                if self.cur.peek().tok != Tok::LParen {
                    return Err(Error::Syntax {
                        line: t.line,
                        column: t.column,
                        message: format!("expected `(` after `{name}`"),
                    });
                }
                self.cur.next();
                let mut args = vec![self.var()?];
                while self.cur.eat(&Tok::Comma) {
                    args.push(self.var()?);
                }
                self.cur.expect(&Tok::RParen)?;
                let expected = if name == "R" { 2 } else { 1 };
                if args.len() != expected {
                    return Err(Error::ArityMismatch {
                        name,
                        expected,
                        found: args.len(),
                    });
                }
                match name.as_str() {
                    "X" => Ok(Formula::X(args[0])),
                    "Y" => Ok(Formula::Y(args[0])),
                    "R" => Ok(Formula::R(args[0], args[1])),
                    _ => {
                        if let Some(decl) = self.declared {
                            if !decl.contains(&name.as_str()) {
                                return Err(Error::UnknownSymbol {
                                    name,
                                    line: t.line,
                                    column: t.column,
                                });
                            }
                        }
                        Ok(Formula::Pred(name, args[0]))
                    }
                }
            }
            other => Err(self.cur.error_here(format!("expected a formula, found {}", other.describe()))),
        }
    }
}

/// `ρS(v1) = ∀v0 (S(v0) → R(v0,v1))`.
pub fn rho_formula(s: &str) -> Formula {
    Formula::forall(0, Formula::implies(Formula::pred(s, 0), Formula::r(0, 1)))
}

/// `λρS(v2) = ∀v1 (ρS(v1) → R(v2,v1))`.
pub fn lambda_rho_formula(s: &str) -> Formula {
    Formula::forall(1, Formula::implies(rho_formula(s), Formula::r(2, 1)))
}

/// The sentence `∀v2 (λρS(v2) → S(v2))`.
///
/// Because `v1` also ranges over `X`, an empty `S` makes `ρS` hold on `X`
/// and `λρS` define the empty set; see [`sorted_stable_formula`] for the
/// variant that matches stability for every `S ⊆ X`.
pub fn stable_formula(s: &str) -> Formula {
    Formula::forall(2, Formula::implies(lambda_rho_formula(s), Formula::pred(s, 2)))
}

/// `Y(v1) & ρS(v1)`: defines exactly `ρA` for every `A`.
pub fn sorted_rho_formula(s: &str) -> Formula {
    Formula::and(Formula::Y(Var(1)), rho_formula(s))
}

/// `X(v2) & ∀v1 (Y(v1) & ρS(v1) → R(v2,v1))`: defines exactly `λρA`.
pub fn sorted_lambda_rho_formula(s: &str) -> Formula {
    Formula::and(
        Formula::X(Var(2)),
        Formula::forall(1, Formula::implies(sorted_rho_formula(s), Formula::r(2, 1))),
    )
}

/// `∀v2 (sorted λρS(v2) → S(v2))`: holds iff `S` is stable.
pub fn sorted_stable_formula(s: &str) -> Formula {
    Formula::forall(2, Formula::implies(sorted_lambda_rho_formula(s), Formula::pred(s, 2)))
}

/// `v0 ∈ λρ(S1 ∪ S2)`: `∀v1 (∀v2 (S1(v2) | S2(v2) → R(v2,v1)) → R(v0,v1))`.
pub fn join_formula(s1: &str, s2: &str) -> Formula {
    let union = Formula::or(Formula::pred(s1, 2), Formula::pred(s2, 2));
    let rho = Formula::forall(2, Formula::implies(union, Formula::r(2, 1)));
    Formula::forall(1, Formula::implies(rho, Formula::r(0, 1)))
}

/// `∀v1 (Y(v1) → R(v0,v1))`: defines `λY`, the least stable set.
pub fn bottom_formula() -> Formula {
    Formula::forall(1, Formula::implies(Formula::Y(Var(1)), Formula::r(0, 1)))
}
