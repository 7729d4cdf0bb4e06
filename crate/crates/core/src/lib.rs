//! Compositional semantics for pure Prolog.
//!
//! A procedural program is evaluated with three operations on tables:
//! *filtering* turns a relation and an argument tuple into a table, the
//! *product* combines the tables of a body, and *projection* turns a table
//! back into a relation through a parameter tuple. Iterating this meaning
//! function from the empty interpretation yields the least fixpoint, which
//! [`oracle`] recomputes with the immediate-consequence operator.
//!
//! Everything is computed over a depth-bounded Herbrand universe
//! ([`universe::Universe`]), with the same clipping rule on both sides.

pub mod cli;
pub mod laws;
pub mod oracle;
pub mod relation;
pub mod semantics;
pub mod syntax;
pub mod table;
pub mod term;
pub mod unify;
pub mod universe;

pub use relation::{
    Atom, HerbrandInterpretation, IntRelation, RelationalInterpretation, VarRelation,
};
pub use semantics::{EvalContext, FixpointReport};
pub use syntax::{Body, Call, ClausalSentence, Clause, ProceduralProgram, Procedure};
pub use table::{Table, TableTuple};
pub use term::{Signature, Sym, Term, TermEquation, TermTuple, Var};
pub use unify::{SolvedForm, UnifyError};
pub use universe::Universe;
