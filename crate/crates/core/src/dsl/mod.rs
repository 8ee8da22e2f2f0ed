//! A many-sorted coherent logic: parser, sort checker, and an interpreter
//! generic over the hyperdoctrine providing the semantics.
//!
//! Theory files hold one declaration or sequent per line:
//!
//! ```text
//! sort S, T
//! func f : S, T -> S
//! func c : -> S
//! rel R : S, T
//! conn neg(x) := 1-x
//! [x:S, y:T] R(x, y) /\ top |- E z:S. R(z, y) \/ x = f(x, y)   # comment
//! [x:S] R(x, x) -||- R(c, x)
//! ```

mod ast;
mod interp;
mod model;
mod parser;

pub use ast::{ConnDecl, Formula, FuncDecl, Pos, SequentAst, Signature, Term, Theory, Warning};
pub use interp::{
    check_sequent, check_theory, context_carrier, interpret_formula, interpret_term, Hyperdoctrine,
    Interpretation, SequentVerdict, UBackend,
};
pub use model::{load_model, FunctionJson, MetricJson, Model, ModelJson, RelationJson};
pub use parser::{parse_formula, parse_sequent, parse_theory, ParseError, ParseErrorKind};
