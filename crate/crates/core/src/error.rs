use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("not a partial order: {axiom} fails at ({a}, {b}{})", .c.as_ref().map(|c| format!(", {c}")).unwrap_or_default())]
    NotAPartialOrder {
        axiom: &'static str,
        a: String,
        b: String,
        c: Option<String>,
    },

    #[error("not a lattice: {0}")]
    NotALattice(String),

    #[error("relation is not square: {rows} rows for {names} names")]
    NotSquare { rows: usize, names: usize },

    #[error("duplicate name `{0}`")]
    NameClash(String),

    #[error("unknown element `{0}`")]
    UnknownElement(String),

    #[error("{what} has size {size}, above the bound {bound}")]
    SizeExceeded {
        what: &'static str,
        size: usize,
        bound: usize,
    },

    #[error("search exceeded its node budget of {budget}")]
    Timeout { budget: u64 },

    #[error("{what} needs {needed} steps, above the budget {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        budget: u128,
    },

    #[error("set {0} is not stable")]
    NotStable(String),

    #[error("map is not isotone: {a} <= {b} but f({a}) is not below f({b})")]
    NotIsotone { a: String, b: String },

    #[error("not a lattice embedding: {0}")]
    NotEmbedding(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("invalid operation `{name}`: {reason}")]
    InvalidOperation { name: String, reason: String },

    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown symbol `{name}` at {line}:{column}")]
    UnknownSymbol {
        name: String,
        line: usize,
        column: usize,
    },

    #[error("arity mismatch for `{name}`: expected {expected}, found {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("symbol `{0}` has no interpretation")]
    Uninterpreted(String),

    #[error("unbound variable v{0}")]
    UnboundVariable(u32),

    #[error("formula has {found} free variables, expected {expected}")]
    FreeVariableCount { expected: usize, found: usize },

    #[error("malformed context at line {line}: {message}")]
    MalformedContext { line: usize, message: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("invalid ultraproduct context: {0}")]
    InvalidContext(String),
}
