//! The immediate-consequence operator `T_P` over a truncated Herbrand
//! universe, by direct enumeration of ground clause instances.
//!
//! Nothing here goes through tables, unification or the grounding helpers
//! of [`crate::universe`]; it is the reference the table semantics is
//! checked against.

use std::collections::HashMap;

use crate::relation::{Atom, HerbrandInterpretation};
use crate::syntax::{Call, ClausalSentence, HornClause};
use crate::term::{Term, TermTuple, Var};
use crate::universe::Universe;

fn instantiate(t: &Term, theta: &HashMap<Var, Term>) -> Term {
    match t {
        Term::Var(v) => theta
            .get(v)
            .cloned()
            .expect("every clause variable is assigned"),
        Term::App(f, args) => Term::App(
            f.clone(),
            args.iter().map(|a| instantiate(a, theta)).collect(),
        ),
    }
}

fn ground_atom(c: &Call, theta: &HashMap<Var, Term>) -> Atom {
    Atom::new(
        c.symbol.clone(),
        TermTuple::new(
            c.args
                .terms()
                .iter()
                .map(|t| instantiate(t, theta))
                .collect(),
        ),
    )
}

fn call_vars(c: &Call, out: &mut Vec<Var>) {
    for t in c.args.terms() {
        t.variables_in_order(out);
    }
}

struct ClauseSearch<'a> {
    clause: &'a HornClause,
    vars: Vec<Var>,
    // body atoms whose variables are all assigned once vars[..=k] are
    // bound, grouped by k; atoms without variables sit in `ground_checks`
    checks: Vec<Vec<&'a Call>>,
    ground_checks: Vec<&'a Call>,
}

impl<'a> ClauseSearch<'a> {
    fn new(clause: &'a HornClause) -> Self {
        let mut vars = Vec::new();
        for call in clause.body.calls() {
            call_vars(call, &mut vars);
        }
        call_vars(&clause.head, &mut vars);
        let mut checks = vec![Vec::new(); vars.len()];
        let mut ground_checks = Vec::new();
        for call in clause.body.calls() {
            let mut mine = Vec::new();
            call_vars(call, &mut mine);
            match mine
                .iter()
                .map(|v| vars.iter().position(|w| w == v).unwrap())
                .max()
            {
                Some(k) => checks[k].push(call),
                None => ground_checks.push(call),
            }
        }
        ClauseSearch {
            clause,
            vars,
            checks,
            ground_checks,
        }
    }

    fn run(&self, i: &HerbrandInterpretation, u: &Universe, out: &mut HerbrandInterpretation) {
        let mut theta = HashMap::new();
        if self
            .ground_checks
            .iter()
            .all(|c| i.contains(&ground_atom(c, &theta)))
        {
            self.assign(0, &mut theta, i, u, out);
        }
    }

    fn assign(
        &self,
        k: usize,
        theta: &mut HashMap<Var, Term>,
        i: &HerbrandInterpretation,
        u: &Universe,
        out: &mut HerbrandInterpretation,
    ) {
        if k == self.vars.len() {
            let head = ground_atom(&self.clause.head, theta);
            if head.args.terms().iter().all(|t| t.depth() <= u.depth()) {
                out.insert(head);
            }
            return;
        }
        for value in u.ground_terms() {
            theta.insert(self.vars[k].clone(), value.clone());
            if self.checks[k]
                .iter()
                .all(|c| i.contains(&ground_atom(c, theta)))
            {
                self.assign(k + 1, theta, i, u, out);
            }
        }
        theta.remove(&self.vars[k]);
    }
}

/// `T_P(I)`: the heads of all ground instances (over `Herb_d`) of clauses of
/// `s` whose body atoms are all in `i`, keeping heads within depth `d`.
pub fn tp_step(
    s: &ClausalSentence,
    i: &HerbrandInterpretation,
    u: &Universe,
) -> HerbrandInterpretation {
    let mut out = HerbrandInterpretation::new();
    for clause in s.clauses() {
        ClauseSearch::new(clause).run(i, u, &mut out);
    }
    out
}

/// Result of iterating `T_P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TpReport {
    pub result: HerbrandInterpretation,
    pub iterations: usize,
    pub converged: bool,
    pub sizes: Vec<usize>,
}

/// Iterates `T_P` from the empty interpretation (plus the fixed atoms in
/// `externs`, added back after every step).
pub fn lfp_t(
    s: &ClausalSentence,
    u: &Universe,
    max_iters: usize,
    externs: &HerbrandInterpretation,
) -> TpReport {
    let max_iters = max_iters.max(1);
    let mut current = externs.clone();
    let mut sizes = Vec::new();
    for iteration in 1..=max_iters {
        let mut next = tp_step(s, &current, u);
        for a in externs.atoms() {
            next.insert(a.clone());
        }
        sizes.push(next.len());
        if next == current {
            return TpReport {
                result: next,
                iterations: iteration,
                converged: true,
                sizes,
            };
        }
        current = next;
    }
    TpReport {
        result: current,
        iterations: max_iters,
        converged: false,
        sizes,
    }
}
