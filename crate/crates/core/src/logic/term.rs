//! Bounded-lattice terms and equations over lattice-based algebras.
//!
//! Syntax: constants `0` and `1`, variables (identifiers other than `v`),
//! `s ^ t` for meet, `s v t` for join (`^` binds tighter, both associate to
//! the left), and named operations `f(t1, ..., tk)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::lex::{Cursor, Tok};
use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::order::LatticeBasedAlgebra;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Zero,
    One,
    Meet(Box<Term>, Box<Term>),
    Join(Box<Term>, Box<Term>),
    Op(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn meet(a: Term, b: Term) -> Term {
        Term::Meet(Box::new(a), Box::new(b))
    }

    pub fn join(a: Term, b: Term) -> Term {
        Term::Join(Box::new(a), Box::new(b))
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Zero | Term::One => {}
            Term::Meet(a, b) | Term::Join(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::Op(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Term::Join(..) => 1,
            Term::Meet(..) => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |f: &mut fmt::Formatter<'_>, t: &Term, min: u8| {
            if t.precedence() < min {
                write!(f, "({t})")
            } else {
                write!(f, "{t}")
            }
        };
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Zero => write!(f, "0"),
            Term::One => write!(f, "1"),
            Term::Meet(a, b) => {
                side(f, a, 2)?;
                write!(f, " ^ ")?;
                side(f, b, 3)
            }
            Term::Join(a, b) => {
                side(f, a, 1)?;
                write!(f, " v ")?;
                side(f, b, 2)
            }
            Term::Op(name, args) => {
                write!(f, "{name}(")?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// An equation `lhs = rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Equation { lhs, rhs }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut v = self.lhs.vars();
        v.extend(self.rhs.vars());
        v
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

pub fn parse_term(text: &str) -> Result<Term> {
    let mut cur = Cursor::new(text)?;
    let t = join_expr(&mut cur)?;
    cur.expect_end()?;
    Ok(t)
}

pub fn parse_equation(text: &str) -> Result<Equation> {
    let mut cur = Cursor::new(text)?;
    let lhs = join_expr(&mut cur)?;
    cur.expect(&Tok::Eq)?;
    let rhs = join_expr(&mut cur)?;
    cur.expect_end()?;
    Ok(Equation { lhs, rhs })
}

fn is_join_token(t: &Tok) -> bool {
    matches!(t, Tok::Ident(s) if s == "v")
}

fn join_expr(cur: &mut Cursor) -> Result<Term> {
    let mut acc = meet_expr(cur)?;
    while is_join_token(&cur.peek().tok) {
        cur.next();
        acc = Term::join(acc, meet_expr(cur)?);
    }
    Ok(acc)
}

fn meet_expr(cur: &mut Cursor) -> Result<Term> {
    let mut acc = atom(cur)?;
    while cur.eat(&Tok::Caret) {
        acc = Term::meet(acc, atom(cur)?);
    }
    Ok(acc)
}

fn atom(cur: &mut Cursor) -> Result<Term> {
    let t = cur.peek().clone();
    match &t.tok {
        Tok::Digit('0') => {
            cur.next();
            Ok(Term::Zero)
        }
        Tok::Digit(_) => {
            cur.next();
            Ok(Term::One)
        }
        Tok::LParen => {
            cur.next();
            let inner = join_expr(cur)?;
            cur.expect(&Tok::RParen)?;
            Ok(inner)
        }
        Tok::Ident(s) if s != "v" => {
            let name = s.clone();
            cur.next();
            if !cur.eat(&Tok::LParen) {
                return Ok(Term::Var(name));
            }
            let mut args = Vec::new();
            if !cur.eat(&Tok::RParen) {
                args.push(join_expr(cur)?);
                while cur.eat(&Tok::Comma) {
                    args.push(join_expr(cur)?);
                }
                cur.expect(&Tok::RParen)?;
            }
            Ok(Term::Op(name, args))
        }
        other => Err(cur.error_here(format!("expected a term, found {}", other.describe()))),
    }
}

/// Checks that every operation symbol exists in `a` with the arity used.
pub fn check_signature(a: &LatticeBasedAlgebra, t: &Term) -> Result<()> {
    match t {
        Term::Var(_) | Term::Zero | Term::One => Ok(()),
        Term::Meet(x, y) | Term::Join(x, y) => {
            check_signature(a, x)?;
            check_signature(a, y)
        }
        Term::Op(name, args) => {
            let op = a.op(name).ok_or_else(|| Error::Uninterpreted(name.clone()))?;
            if op.arity != args.len() {
                return Err(Error::ArityMismatch {
                    name: name.clone(),
                    expected: op.arity,
                    found: args.len(),
                });
            }
            args.iter().try_for_each(|x| check_signature(a, x))
        }
    }
}

fn eval_checked(a: &LatticeBasedAlgebra, t: &Term, env: &BTreeMap<String, usize>) -> Result<usize> {
    let l = &a.lattice;
    Ok(match t {
        Term::Var(v) => *env.get(v).ok_or_else(|| Error::UnknownElement(format!("variable {v} is unassigned")))?,
        Term::Zero => l.bottom(),
        Term::One => l.top(),
        Term::Meet(x, y) => l.meet(eval_checked(a, x, env)?, eval_checked(a, y, env)?),
        Term::Join(x, y) => l.join(eval_checked(a, x, env)?, eval_checked(a, y, env)?),
        Term::Op(name, args) => {
            let vals = args.iter().map(|x| eval_checked(a, x, env)).collect::<Result<Vec<_>>>()?;
            a.op(name).expect("signature checked").apply(l.len(), &vals)
        }
    })
}

/// The value of `t` under `assignment`, which maps variable names to elements.
pub fn eval_term(a: &LatticeBasedAlgebra, t: &Term, assignment: &BTreeMap<String, usize>) -> Result<usize> {
    check_signature(a, t)?;
    if let Some((v, &x)) = assignment.iter().find(|(_, &x)| x >= a.lattice.len()) {
        return Err(Error::UnknownElement(format!("{v} = {x}")));
    }
    eval_checked(a, t, assignment)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquationOutcome {
    Holds { assignments: u128 },
    Fails {
        witness: BTreeMap<String, usize>,
        lhs: usize,
        rhs: usize,
    },
}

impl EquationOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, EquationOutcome::Holds { .. })
    }
}

/// Tries every assignment, variables in name order with the first one most
/// significant, and returns the first failure.
pub fn check_equation(a: &LatticeBasedAlgebra, eq: &Equation, bounds: &Bounds) -> Result<EquationOutcome> {
    check_signature(a, &eq.lhs)?;
    check_signature(a, &eq.rhs)?;
    let vars: Vec<String> = eq.vars().into_iter().collect();
    let n = a.lattice.len() as u128;
    let assignments = vars
        .iter()
        .try_fold(1u128, |acc, _| acc.checked_mul(n))
        .unwrap_or(u128::MAX);
    let needed = assignments.saturating_mul(2);
    if needed > bounds.eval_budget {
        return Err(Error::BudgetExceeded {
            what: "equation check",
            needed,
            budget: bounds.eval_budget,
        });
    }
    let mut digits = vec![0usize; vars.len()];
    let mut env: BTreeMap<String, usize> = vars.iter().map(|v| (v.clone(), 0)).collect();
    for _ in 0..assignments {
        for (v, &d) in vars.iter().zip(&digits) {
            *env.get_mut(v).expect("present") = d;
        }
        let lhs = eval_checked(a, &eq.lhs, &env)?;
        let rhs = eval_checked(a, &eq.rhs, &env)?;
        if lhs != rhs {
            return Ok(EquationOutcome::Fails { witness: env, lhs, rhs });
        }
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < n as usize {
                break;
            }
            *d = 0;
        }
    }
    Ok(EquationOutcome::Holds { assignments })
}

pub const DISTRIBUTIVE: &str = "x ^ (y v z) = (x ^ y) v (x ^ z)";
pub const MODULAR: &str = "x ^ (y v (x ^ z)) = (x ^ y) v (x ^ z)";
