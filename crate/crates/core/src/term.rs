//! First-order terms over a signature.
//!
//! Constants are compounds of arity zero. Variables and symbols are
//! interned as `Arc<str>` so terms are cheap to clone and safe to share
//! between threads.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// A function, constant or procedure symbol.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(Arc<str>);

impl Sym {
    pub fn new(name: &str) -> Self {
        Sym(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if needs_quotes(&self.0) {
            write!(f, "'{}'", self.0.replace('\'', "''"))
        } else {
            f.write_str(&self.0)
        }
    }
}

impl From<&str> for Sym {
    fn from(s: &str) -> Self {
        Sym::new(s)
    }
}

fn needs_quotes(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_lowercase() => !chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        Some(c) if c.is_ascii_digit() => !chars.all(|c| c.is_ascii_digit()),
        Some(_) => true,
    }
}

/// A logic variable. Variables are totally ordered by name; that order picks
/// the representative whenever two variables are equated.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

/// A first-order term.
///
/// The derived ordering (variables first, then compounds by functor and
/// arguments) is the lexicographic order used for enumeration and for
/// canonical printing of sets.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    App(Sym, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Var::new(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::App(Sym::new(name), Vec::new())
    }

    pub fn app(functor: &str, args: Vec<Term>) -> Term {
        Term::App(Sym::new(functor), args)
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::App(..) => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Nesting depth: constants (and variables) have depth 0, and
    /// `f(t1..tk)` has depth one more than its deepest argument.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => args.iter().map(|a| a.depth() + 1).max().unwrap_or(0),
        }
    }

    pub fn occurs(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::App(_, args) => args.iter().any(|a| a.occurs(v)),
        }
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    pub fn collect_variables(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_variables(out)),
        }
    }

    /// Variables in order of first occurrence (left to right, depth first).
    pub fn variables_in_order(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.variables_in_order(out)),
        }
    }

    /// Simultaneous substitution. Variables without a binding are kept.
    pub fn substitute(&self, bindings: &BTreeMap<Var, Term>) -> Term {
        match self {
            Term::Var(v) => bindings.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, args) if args.is_empty() => Term::App(f.clone(), Vec::new()),
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter().map(|a| a.substitute(bindings)).collect(),
            ),
        }
    }

    /// Calls `visit` with every compound symbol and its arity.
    pub fn for_each_symbol(&self, visit: &mut impl FnMut(&Sym, usize)) {
        if let Term::App(f, args) = self {
            visit(f, args.len());
            args.iter().for_each(|a| a.for_each_symbol(visit));
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(s, args) if args.is_empty() => write!(f, "{s}"),
            Term::App(s, args) => {
                write!(f, "{s}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// An ordered tuple of terms: a parameter tuple, an argument tuple, or a
/// row of an integer-indexed relation.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermTuple(pub Vec<Term>);

impl TermTuple {
    pub fn new(terms: Vec<Term>) -> Self {
        TermTuple(terms)
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn terms(&self) -> &[Term] {
        &self.0
    }

    pub fn is_ground(&self) -> bool {
        self.0.iter().all(Term::is_ground)
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for t in &self.0 {
            t.collect_variables(&mut out);
        }
        out
    }

    pub fn variables_in_order(&self) -> Vec<Var> {
        let mut out = Vec::new();
        for t in &self.0 {
            t.variables_in_order(&mut out);
        }
        out
    }

    pub fn substitute(&self, bindings: &BTreeMap<Var, Term>) -> TermTuple {
        TermTuple(self.0.iter().map(|t| t.substitute(bindings)).collect())
    }

    pub fn max_depth(&self) -> usize {
        self.0.iter().map(Term::depth).max().unwrap_or(0)
    }
}

impl fmt::Debug for TermTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for TermTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

impl From<Vec<Term>> for TermTuple {
    fn from(v: Vec<Term>) -> Self {
        TermTuple(v)
    }
}

/// Anything whose variables can be listed.
pub trait HasVariables {
    fn variables_of(&self) -> BTreeSet<Var>;
}

impl HasVariables for Term {
    fn variables_of(&self) -> BTreeSet<Var> {
        self.variables()
    }
}

impl HasVariables for TermTuple {
    fn variables_of(&self) -> BTreeSet<Var> {
        self.variables()
    }
}

pub fn variables_of<T: HasVariables + ?Sized>(t: &T) -> BTreeSet<Var> {
    t.variables_of()
}

/// An equation `lhs = rhs` between two terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermEquation {
    pub lhs: Term,
    pub rhs: Term,
}

impl TermEquation {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        TermEquation { lhs, rhs }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SignatureError {
    #[error("symbol {0} is used both as a constant and as a function symbol")]
    ConstantFunctionOverlap(Sym),
    #[error("function symbol {symbol} is used with arities {first} and {second}")]
    FunctionArity {
        symbol: Sym,
        first: usize,
        second: usize,
    },
    #[error("procedure symbol {symbol} is used with arities {first} and {second}")]
    PredicateArity {
        symbol: Sym,
        first: usize,
        second: usize,
    },
}

/// Constants, function symbols (arity ≥ 1) and procedure symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    constants: BTreeSet<Sym>,
    functions: BTreeMap<Sym, usize>,
    predicates: BTreeMap<Sym, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    pub fn constants(&self) -> &BTreeSet<Sym> {
        &self.constants
    }

    pub fn functions(&self) -> &BTreeMap<Sym, usize> {
        &self.functions
    }

    pub fn predicates(&self) -> &BTreeMap<Sym, usize> {
        &self.predicates
    }

    pub fn add_constant(&mut self, c: &str) -> Result<(), SignatureError> {
        self.add_term_symbol(Sym::new(c), 0)
    }

    pub fn add_function(&mut self, f: &str, arity: usize) -> Result<(), SignatureError> {
        self.add_term_symbol(Sym::new(f), arity)
    }

    /// Registers a term symbol; arity 0 means a constant.
    pub fn add_term_symbol(&mut self, s: Sym, arity: usize) -> Result<(), SignatureError> {
        if arity == 0 {
            if self.functions.contains_key(&s) {
                return Err(SignatureError::ConstantFunctionOverlap(s));
            }
            self.constants.insert(s);
            return Ok(());
        }
        if self.constants.contains(&s) {
            return Err(SignatureError::ConstantFunctionOverlap(s));
        }
        match self.functions.get(&s) {
            Some(&a) if a != arity => Err(SignatureError::FunctionArity {
                symbol: s,
                first: a,
                second: arity,
            }),
            _ => {
                self.functions.insert(s, arity);
                Ok(())
            }
        }
    }

    pub fn add_predicate(&mut self, p: Sym, arity: usize) -> Result<(), SignatureError> {
        match self.predicates.get(&p) {
            Some(&a) if a != arity => Err(SignatureError::PredicateArity {
                symbol: p,
                first: a,
                second: arity,
            }),
            _ => {
                self.predicates.insert(p, arity);
                Ok(())
            }
        }
    }

    pub fn predicate_arity(&self, p: &Sym) -> Option<usize> {
        self.predicates.get(p).copied()
    }

    /// Checks that every compound in `t` is declared with its arity.
    pub fn admits(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::App(f, args) if args.is_empty() => self.constants.contains(f),
            Term::App(f, args) => {
                self.functions.get(f) == Some(&args.len()) && args.iter().all(|a| self.admits(a))
            }
        }
    }
}
