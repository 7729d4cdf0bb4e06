//! Tables: sets of substitutions over a common index set of variables, and
//! the operations that combine them.
//!
//! A [`TableTuple`] is total on its index set `V`; variables left
//! unconstrained map to themselves. Right-hand sides only mention variables
//! of `V`, and the non-identity entries form a canonical solved form, so two
//! tuples denote the same substitution iff they are structurally equal.
//!
//! The product does not rename variables apart. Shared names are how two
//! calls in a body coordinate, so hand-built tables that reuse a name
//! unintentionally will be joined on it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::relation::{render_grid, IntRelation, VarRelation};
use crate::term::{Term, TermTuple, Var};
use crate::unify::{unify_tuples, SolvedForm, UnifyError};
use crate::universe::{ground_instances, Universe};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableError {
    #[error("tuple entry for {0} lies outside the index set")]
    OutsideIndex(Var),
    #[error("tuple has no entry for index variable {0}")]
    NotTotal(Var),
    #[error("tuple mentions variable {0}, which is not in the index set")]
    ForeignVariable(Var),
    #[error("tuple is not a consistent substitution: {0}")]
    Unsolvable(#[from] UnifyError),
    #[error("index set is not contained in the cylinder's variable set")]
    NotSubset,
    #[error("relation of order {relation} filtered by a tuple of order {args}")]
    Arity { relation: usize, args: usize },
}

/// A substitution `V → T_V` in canonical form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TableTuple {
    entries: BTreeMap<Var, Term>,
}

impl TableTuple {
    /// Builds a tuple on `index` from bindings. Missing variables get
    /// identity entries; the bindings are solved so the result is canonical.
    pub fn new<I>(index: &BTreeSet<Var>, bindings: I) -> Result<TableTuple, TableError>
    where
        I: IntoIterator<Item = (Var, Term)>,
    {
        let mut s = SolvedForm::empty();
        for (v, t) in bindings {
            if !index.contains(&v) {
                return Err(TableError::OutsideIndex(v));
            }
            if let Some(w) = t.variables().into_iter().find(|w| !index.contains(w)) {
                return Err(TableError::ForeignVariable(w));
            }
            s.bind(&Term::Var(v), &t)?;
        }
        Ok(TableTuple::from_solved(index, s))
    }

    // `s` is canonical and only mentions variables of `index`.
    fn from_solved(index: &BTreeSet<Var>, s: SolvedForm) -> TableTuple {
        let mut bindings = s.into_bindings();
        let entries = index
            .iter()
            .map(|v| {
                let t = bindings.remove(v).unwrap_or_else(|| Term::Var(v.clone()));
                (v.clone(), t)
            })
            .collect();
        TableTuple { entries }
    }

    pub fn entries(&self) -> &BTreeMap<Var, Term> {
        &self.entries
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.entries.get(v)
    }

    pub fn index(&self) -> impl Iterator<Item = &Var> {
        self.entries.keys()
    }

    /// Entries other than `v ↦ v`.
    pub fn non_identity(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.entries.iter().filter(|(v, t)| t.as_var() != Some(v))
    }

    pub fn is_ground(&self) -> bool {
        self.entries.values().all(Term::is_ground)
    }
}

impl fmt::Debug for TableTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self
            .entries
            .iter()
            .map(|(v, t)| format!("{v}↦{t}"))
            .collect();
        write!(f, "{{{}}}", pairs.join(","))
    }
}

/// A set of [`TableTuple`]s on a common index set.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Table {
    index: BTreeSet<Var>,
    tuples: BTreeSet<TableTuple>,
}

impl Table {
    /// The null table on `index`.
    pub fn bottom(index: BTreeSet<Var>) -> Table {
        Table {
            index,
            tuples: BTreeSet::new(),
        }
    }

    /// `⊤ = {⟨⟩}`, the table on the empty index set with one (empty) tuple.
    pub fn top() -> Table {
        Table {
            index: BTreeSet::new(),
            tuples: BTreeSet::from([TableTuple {
                entries: BTreeMap::new(),
            }]),
        }
    }

    pub fn new<I>(index: BTreeSet<Var>, tuples: I) -> Result<Table, TableError>
    where
        I: IntoIterator<Item = TableTuple>,
    {
        let mut out = Table::bottom(index);
        for t in tuples {
            if let Some(v) = out.index.iter().find(|v| !t.entries.contains_key(*v)) {
                return Err(TableError::NotTotal(v.clone()));
            }
            if let Some(v) = t.entries.keys().find(|v| !out.index.contains(*v)) {
                return Err(TableError::OutsideIndex(v.clone()));
            }
            out.tuples.insert(t);
        }
        Ok(out)
    }

    /// Convenience constructor from rows of bindings; each row is solved and
    /// totalized over `index`.
    pub fn from_rows<R, I>(index: &[&str], rows: R) -> Result<Table, TableError>
    where
        R: IntoIterator<Item = I>,
        I: IntoIterator<Item = (Var, Term)>,
    {
        let index: BTreeSet<Var> = index.iter().map(|v| Var::new(v)).collect();
        let tuples = rows
            .into_iter()
            .map(|row| TableTuple::new(&index, row))
            .collect::<Result<Vec<_>, _>>()?;
        Table::new(index, tuples)
    }

    pub fn index(&self) -> &BTreeSet<Var> {
        &self.index
    }

    pub fn tuples(&self) -> &BTreeSet<TableTuple> {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn is_bottom(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn is_top(&self) -> bool {
        self.index.is_empty() && !self.tuples.is_empty()
    }

    /// The transposed layout: one row per index variable, one column per
    /// tuple.
    pub fn render_transposed(&self) -> String {
        let labels: Vec<String> = self.index.iter().map(|v| v.to_string()).collect();
        let columns: Vec<Vec<String>> = self
            .tuples
            .iter()
            .map(|t| t.entries.values().map(Term::to_string).collect())
            .collect();
        render_grid(&labels, &columns)
    }

    /// One line per tuple with `var=term` pairs sorted by variable.
    pub fn render_records(&self) -> String {
        let mut out = String::new();
        for t in &self.tuples {
            let pairs: Vec<String> = t.entries.iter().map(|(v, x)| format!("{v}={x}")).collect();
            out.push_str(&pairs.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Table{:?}{:?}", self.index, self.tuples)
    }
}

/// Joins one pair of tuples; `None` if their equations have no solution.
fn join_tuples(index: &BTreeSet<Var>, a: &TableTuple, b: &TableTuple) -> Option<TableTuple> {
    let mut s = SolvedForm::empty();
    for (v, t) in a.non_identity().chain(b.non_identity()) {
        s.bind(&Term::Var(v.clone()), t).ok()?;
    }
    Some(TableTuple::from_solved(index, s))
}

/// `t0 ∗ t1`: every solvable union of a tuple of `t0` with a tuple of `t1`,
/// in solved form, on the index set `V0 ∪ V1`.
pub fn product(t0: &Table, t1: &Table) -> Table {
    let index: BTreeSet<Var> = t0.index.union(&t1.index).cloned().collect();
    let mut tuples = BTreeSet::new();
    for a in &t0.tuples {
        for b in &t1.tuples {
            if let Some(t) = join_tuples(&index, a, b) {
                tuples.insert(t);
            }
        }
    }
    Table { index, tuples }
}

/// `∗S`, with `∗{} = ⊤`.
pub fn product_all<'a, I>(tables: I) -> Table
where
    I: IntoIterator<Item = &'a Table>,
{
    tables
        .into_iter()
        .fold(Table::top(), |acc, t| product(&acc, t))
}

/// `r : args`: the solved forms of `{args_i = row_i}` for every row of `r`
/// that matches.
pub fn filter(r: &IntRelation, args: &TermTuple) -> Result<Table, TableError> {
    if r.order() != args.order() {
        return Err(TableError::Arity {
            relation: r.order(),
            args: args.order(),
        });
    }
    let index = args.variables();
    let mut tuples = BTreeSet::new();
    for row in r.tuples() {
        if let Ok(s) = unify_tuples(args, row) {
            tuples.insert(TableTuple::from_solved(&index, s));
        }
    }
    Ok(Table { index, tuples })
}

/// `params / t`: every ground instance (within `Herb_d`) of `params` under
/// some tuple of `t`.
pub fn project(params: &TermTuple, t: &Table, u: &Universe) -> IntRelation {
    let mut out = IntRelation::empty(params.order());
    for theta in &t.tuples {
        let inst = params.substitute(&theta.entries);
        for g in ground_instances(&inst, u) {
            out.insert_unchecked(g);
        }
    }
    out
}

/// Extends every tuple of `t` to `big` with identity entries.
pub fn cylinder_table(t: &Table, big: &BTreeSet<Var>) -> Result<Table, TableError> {
    if !t.index.is_subset(big) {
        return Err(TableError::NotSubset);
    }
    let tuples = t
        .tuples
        .iter()
        .map(|tuple| {
            let mut entries = tuple.entries.clone();
            for v in big.difference(&t.index) {
                entries.insert(v.clone(), Term::Var(v.clone()));
            }
            TableTuple { entries }
        })
        .collect();
    Ok(Table {
        index: big.clone(),
        tuples,
    })
}

/// `Γ(t)`: the ground instances of the tuples of `t` over `Herb_d`, dropping
/// any instance with an entry deeper than `d`.
pub fn ground_table(t: &Table, u: &Universe) -> VarRelation {
    let mut out = VarRelation::empty(t.index.clone());
    for tuple in &t.tuples {
        if tuple.is_ground() {
            if tuple.entries.values().all(|x| x.depth() <= u.depth()) {
                out.insert_unchecked(tuple.entries.clone());
            }
            continue;
        }
        u.for_each_grounding(tuple.entries.values(), |theta| {
            let row = tuple
                .entries
                .iter()
                .map(|(v, x)| (v.clone(), x.substitute(theta)))
                .collect();
            out.insert_unchecked(row);
        });
    }
    out
}

/// Whether `t0` and `t1` have the same grounding once both are extended to
/// the union of their index sets.
pub fn tables_equivalent(t0: &Table, t1: &Table, u: &Universe) -> bool {
    let union: BTreeSet<Var> = t0.index.union(&t1.index).cloned().collect();
    // both index sets are subsets of their union
    let g0 = ground_table(&cylinder_table(t0, &union).expect("subset"), u);
    let g1 = ground_table(&cylinder_table(t1, &union).expect("subset"), u);
    g0 == g1
}
