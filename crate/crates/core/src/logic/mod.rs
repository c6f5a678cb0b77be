//! The first-order language of polarities and the equational language of
//! lattice-based algebras.

mod eval;
mod formula;
mod lex;
mod los;
mod term;

pub use eval::{definable_set, definable_set_with, evaluate, x_part, y_part, Assignment, ExpandedPolarity, Point, Side};
pub use formula::{
    bottom_formula, join_formula, lambda_rho_formula, parse_formula, parse_formula_with, rho_formula,
    sorted_lambda_rho_formula, sorted_rho_formula, sorted_stable_formula, stable_formula, Formula, Var,
};
pub use los::{check_definability, check_los, DefinabilityReport, Element, LosReport, UltraExpansion};
pub use term::{
    check_equation, check_signature, eval_term, parse_equation, parse_term, Equation, EquationOutcome, Term,
    DISTRIBUTIVE, MODULAR,
};
