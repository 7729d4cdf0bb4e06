//! The compositional meaning function `M_I` and its least fixpoint.
//!
//! Meanings are built bottom-up from the table algebra: a call filters the
//! relation `I(p)` by its arguments, a body is the product of its calls, a
//! clause projects its body onto its parameter tuple, and a procedure is the
//! union of its clauses.

use std::collections::BTreeSet;
use std::fmt;

use crate::relation::{IntRelation, RelationalInterpretation};
use crate::syntax::{infer_signature, Body, Call, Clause, ProceduralProgram, Procedure};
use crate::table::{filter, product_all, project, Table, TableError};
use crate::term::{Sym, Var};
use crate::universe::Universe;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("no relation for procedure {0}")]
    UnknownSymbol(Sym),
    #[error("{symbol} has arity {expected}, but is called with {found} arguments")]
    Arity {
        symbol: Sym,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Table(#[from] TableError),
}

/// Everything `M_I` depends on: the program, the interpretation `I` of its
/// procedure symbols, and the universe used for projection.
#[derive(Clone, Copy)]
pub struct EvalContext<'a> {
    pub program: &'a ProceduralProgram,
    pub interpretation: &'a RelationalInterpretation,
    pub universe: &'a Universe,
}

impl<'a> EvalContext<'a> {
    pub fn new(
        program: &'a ProceduralProgram,
        interpretation: &'a RelationalInterpretation,
        universe: &'a Universe,
    ) -> Self {
        EvalContext {
            program,
            interpretation,
            universe,
        }
    }
}

pub fn eval_call(ctx: &EvalContext<'_>, c: &Call) -> Result<Table, EvalError> {
    let rel = ctx
        .interpretation
        .get(&c.symbol)
        .ok_or_else(|| EvalError::UnknownSymbol(c.symbol.clone()))?;
    Ok(filter(rel, &c.args)?)
}

pub fn eval_body(ctx: &EvalContext<'_>, b: &Body) -> Result<Table, EvalError> {
    let tables = b
        .calls()
        .iter()
        .map(|c| eval_call(ctx, c))
        .collect::<Result<Vec<_>, _>>()?;
    if tables.iter().any(Table::is_bottom) {
        let index: BTreeSet<Var> = tables
            .iter()
            .flat_map(|t| t.index().iter().cloned())
            .collect();
        return Ok(Table::bottom(index));
    }
    Ok(product_all(&tables))
}

pub fn eval_clause(ctx: &EvalContext<'_>, cl: &Clause) -> Result<IntRelation, EvalError> {
    let body = eval_body(ctx, &cl.body)?;
    Ok(project(&cl.params, &body, ctx.universe))
}

pub fn eval_procedure(ctx: &EvalContext<'_>, proc: &Procedure) -> Result<IntRelation, EvalError> {
    let mut out = IntRelation::empty(proc.arity());
    for cl in proc.clauses() {
        out.union_with(&eval_clause(ctx, cl)?);
    }
    Ok(out)
}

/// `M_I(P)`: the meaning of every procedure of the program under `I`.
pub fn eval_program(ctx: &EvalContext<'_>) -> Result<RelationalInterpretation, EvalError> {
    let mut out = RelationalInterpretation::default();
    for (symbol, proc) in ctx.program.procedures() {
        out.set(symbol.clone(), eval_procedure(ctx, proc)?);
    }
    Ok(out)
}

/// The outcome of a fixpoint iteration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixpointReport {
    pub result: RelationalInterpretation,
    /// Number of applications of the operator.
    pub iterations: usize,
    /// Whether the last application left the interpretation unchanged.
    pub converged: bool,
    /// Total number of tuples after each application.
    pub sizes: Vec<usize>,
}

/// Structured text: `key: value` header lines followed by the relation dump.
impl fmt::Display for FixpointReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "converged: {}", self.converged)?;
        writeln!(f, "iterations: {}", self.iterations)?;
        let sizes: Vec<String> = self.sizes.iter().map(usize::to_string).collect();
        writeln!(f, "sizes: {}", sizes.join(" "))?;
        f.write_str(&self.result.dump())
    }
}

/// The starting interpretation: every procedure empty, except the symbols
/// bound in `externs`, which keep their given relations.
pub fn initial_interpretation(
    p: &ProceduralProgram,
    externs: &RelationalInterpretation,
) -> RelationalInterpretation {
    let mut i = RelationalInterpretation::empty(&infer_signature(p));
    for (symbol, rel) in externs.relations() {
        i.set(symbol.clone(), rel.clone());
    }
    i
}

/// Iterates `I ↦ M_I(P)` from the empty interpretation.
pub fn lfp_m(
    p: &ProceduralProgram,
    u: &Universe,
    max_iters: usize,
) -> Result<FixpointReport, EvalError> {
    lfp_m_with(p, u, max_iters, &RelationalInterpretation::default())
}

/// Like [`lfp_m`], with some procedure symbols bound to fixed relations.
/// Those symbols keep their relation in every iterate.
pub fn lfp_m_with(
    p: &ProceduralProgram,
    u: &Universe,
    max_iters: usize,
    externs: &RelationalInterpretation,
) -> Result<FixpointReport, EvalError> {
    let max_iters = max_iters.max(1);
    let mut current = initial_interpretation(p, externs);
    let mut sizes = Vec::new();
    for iteration in 1..=max_iters {
        let mut next = eval_program(&EvalContext::new(p, &current, u))?;
        for (symbol, rel) in externs.relations() {
            next.set(symbol.clone(), rel.clone());
        }
        sizes.push(next.total_size());
        if next == current {
            return Ok(FixpointReport {
                result: next,
                iterations: iteration,
                converged: true,
                sizes,
            });
        }
        current = next;
    }
    Ok(FixpointReport {
        result: current,
        iterations: max_iters,
        converged: false,
        sizes,
    })
}

/// Answers to a goal, evaluated at the (last) fixpoint iterate.
#[derive(Clone, Debug)]
pub struct QueryAnswer {
    pub answers: Table,
    pub report: FixpointReport,
}

pub fn query(
    p: &ProceduralProgram,
    goal: &Body,
    u: &Universe,
    max_iters: usize,
    externs: &RelationalInterpretation,
) -> Result<QueryAnswer, EvalError> {
    for call in goal.calls() {
        let arity = p
            .arity(&call.symbol)
            .ok_or_else(|| EvalError::UnknownSymbol(call.symbol.clone()))?;
        if arity != call.arity() {
            return Err(EvalError::Arity {
                symbol: call.symbol.clone(),
                expected: arity,
                found: call.arity(),
            });
        }
    }
    let report = lfp_m_with(p, u, max_iters, externs)?;
    let answers = eval_body(&EvalContext::new(p, &report.result, u), goal)?;
    Ok(QueryAnswer { answers, report })
}
