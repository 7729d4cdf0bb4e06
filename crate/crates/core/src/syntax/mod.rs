//! Clausal and procedural abstract syntax, and the correspondence between
//! them.
//!
//! A clausal sentence is a set of Horn clauses `head :- body`. The same
//! program read procedurally is a map from each procedure symbol to a
//! procedure: a set of clauses, each a parameter tuple and a body, where the
//! body is a *set* of calls.

mod parser;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::term::{Signature, SignatureError, Sym, TermTuple};

pub use parser::{
    parse_goal, parse_interpretation, parse_program, parse_program_linted, parse_relation,
    parse_term, Lint, ParseError, LIST_CONS, LIST_NIL,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProgramError {
    #[error("procedure {symbol} has arity {expected}, but is used with {found} arguments")]
    Arity {
        symbol: Sym,
        expected: usize,
        found: usize,
    },
    #[error("call to {0}, which is not a procedure of the program")]
    UnknownProcedure(Sym),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("renaming does not map procedure {0}")]
    RenamingNotTotal(Sym),
    #[error("renaming maps {0}, which is not a procedure of the program")]
    RenamingUnknown(Sym),
    #[error("renaming maps both {0} and {1} to {2}")]
    RenamingNotInjective(Sym, Sym, Sym),
}

/// A procedure call (or, in clausal reading, an atom): a symbol applied to a
/// tuple of terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Call {
    pub symbol: Sym,
    pub args: TermTuple,
}

impl Call {
    pub fn new(symbol: Sym, args: TermTuple) -> Self {
        Call { symbol, args }
    }

    pub fn arity(&self) -> usize {
        self.args.order()
    }
}

impl fmt::Display for Call {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.order() == 0 {
            write!(f, "{}", self.symbol)
        } else {
            write!(f, "{}{}", self.symbol, self.args)
        }
    }
}

impl fmt::Debug for Call {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A set of calls. Order and duplicates in the source are irrelevant.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Body(BTreeSet<Call>);

impl Body {
    pub fn new(calls: BTreeSet<Call>) -> Self {
        Body(calls)
    }

    pub fn calls(&self) -> &BTreeSet<Call> {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<Call> for Body {
    fn from_iter<T: IntoIterator<Item = Call>>(iter: T) -> Self {
        Body(iter.into_iter().collect())
    }
}

impl fmt::Debug for Body {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

/// A parameter tuple and a body.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause {
    pub params: TermTuple,
    pub body: Body,
}

impl Clause {
    pub fn new(params: TermTuple, body: Body) -> Self {
        Clause { params, body }
    }
}

/// A set of clauses of one arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Procedure {
    arity: usize,
    clauses: BTreeSet<Clause>,
}

impl Procedure {
    pub fn empty(arity: usize) -> Self {
        Procedure {
            arity,
            clauses: BTreeSet::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn clauses(&self) -> &BTreeSet<Clause> {
        &self.clauses
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }
}

/// A procedural program: one procedure per symbol in `Pred`. Every called
/// symbol is in `Pred`; symbols that are called but have no clauses map to
/// the empty procedure and take their meaning from the interpretation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProceduralProgram {
    procedures: BTreeMap<Sym, Procedure>,
}

impl ProceduralProgram {
    /// Builds a program, checking arities and that every call names a
    /// procedure of the program.
    pub fn new(procedures: BTreeMap<Sym, Procedure>) -> Result<Self, ProgramError> {
        let p = ProceduralProgram { procedures };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<(), ProgramError> {
        for (symbol, proc) in &self.procedures {
            for clause in &proc.clauses {
                if clause.params.order() != proc.arity {
                    return Err(ProgramError::Arity {
                        symbol: symbol.clone(),
                        expected: proc.arity,
                        found: clause.params.order(),
                    });
                }
                for call in clause.body.calls() {
                    let callee = self
                        .procedures
                        .get(&call.symbol)
                        .ok_or_else(|| ProgramError::UnknownProcedure(call.symbol.clone()))?;
                    if callee.arity != call.arity() {
                        return Err(ProgramError::Arity {
                            symbol: call.symbol.clone(),
                            expected: callee.arity,
                            found: call.arity(),
                        });
                    }
                }
            }
        }
        build_signature(self)?;
        Ok(())
    }

    pub fn procedures(&self) -> &BTreeMap<Sym, Procedure> {
        &self.procedures
    }

    pub fn get(&self, p: &Sym) -> Option<&Procedure> {
        self.procedures.get(p)
    }

    /// The symbol set `Pred`.
    pub fn symbols(&self) -> impl Iterator<Item = &Sym> {
        self.procedures.keys()
    }

    pub fn arity(&self, p: &Sym) -> Option<usize> {
        self.procedures.get(p).map(Procedure::arity)
    }

    /// Adds `symbol` to `Pred` as an empty procedure if absent. Used for
    /// relations supplied from outside the program.
    pub fn declare(&mut self, symbol: Sym, arity: usize) -> Result<(), ProgramError> {
        match self.procedures.get(&symbol) {
            Some(p) if p.arity != arity => Err(ProgramError::Arity {
                symbol,
                expected: p.arity,
                found: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.procedures.insert(symbol, Procedure::empty(arity));
                Ok(())
            }
        }
    }
}

/// A Horn clause `head :- body` in the clausal reading.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HornClause {
    pub head: Call,
    pub body: Body,
}

impl HornClause {
    pub fn new(head: Call, body: Body) -> Self {
        HornClause { head, body }
    }
}

impl fmt::Display for HornClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        for (i, call) in self.body.calls().iter().enumerate() {
            f.write_str(if i == 0 { " :- " } else { ", " })?;
            write!(f, "{call}")?;
        }
        f.write_str(".")
    }
}

/// A set of positive Horn clauses.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClausalSentence {
    clauses: BTreeSet<HornClause>,
}

impl ClausalSentence {
    pub fn new(clauses: BTreeSet<HornClause>) -> Self {
        ClausalSentence { clauses }
    }

    pub fn clauses(&self) -> &BTreeSet<HornClause> {
        &self.clauses
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }
}

/// Canonical source text: one clause per line, in set order.
impl fmt::Display for ClausalSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Groups clauses by head symbol. Symbols that are only called become
/// empty procedures.
pub fn to_procedural(s: &ClausalSentence) -> Result<ProceduralProgram, ProgramError> {
    let mut procedures: BTreeMap<Sym, Procedure> = BTreeMap::new();
    let mut note = |symbol: &Sym, arity: usize| -> Result<(), ProgramError> {
        let proc = procedures
            .entry(symbol.clone())
            .or_insert_with(|| Procedure::empty(arity));
        if proc.arity != arity {
            return Err(ProgramError::Arity {
                symbol: symbol.clone(),
                expected: proc.arity,
                found: arity,
            });
        }
        Ok(())
    };
    for hc in &s.clauses {
        note(&hc.head.symbol, hc.head.arity())?;
        for call in hc.body.calls() {
            note(&call.symbol, call.arity())?;
        }
    }
    for hc in &s.clauses {
        let proc = procedures.get_mut(&hc.head.symbol).expect("noted above");
        proc.clauses
            .insert(Clause::new(hc.head.args.clone(), hc.body.clone()));
    }
    ProceduralProgram::new(procedures)
}

pub fn to_clausal(p: &ProceduralProgram) -> ClausalSentence {
    let clauses = p
        .procedures
        .iter()
        .flat_map(|(symbol, proc)| {
            proc.clauses.iter().map(move |c| {
                HornClause::new(Call::new(symbol.clone(), c.params.clone()), c.body.clone())
            })
        })
        .collect();
    ClausalSentence { clauses }
}

fn build_signature(p: &ProceduralProgram) -> Result<Signature, SignatureError> {
    let mut sig = Signature::new();
    for (symbol, proc) in &p.procedures {
        sig.add_predicate(symbol.clone(), proc.arity)?;
    }
    let mut result = Ok(());
    let mut visit = |s: &Sym, n: usize| {
        if result.is_ok() {
            result = sig.add_term_symbol(s.clone(), n);
        }
    };
    for proc in p.procedures.values() {
        for clause in &proc.clauses {
            for t in clause.params.terms() {
                t.for_each_symbol(&mut visit);
            }
            for call in clause.body.calls() {
                for t in call.args.terms() {
                    t.for_each_symbol(&mut visit);
                }
            }
        }
    }
    result.map(|_| sig)
}

/// Constants, function symbols and procedure symbols of the program.
pub fn infer_signature(p: &ProceduralProgram) -> Signature {
    // programs are validated on construction, so the symbols are consistent
    build_signature(p).expect("validated program has a consistent signature")
}

/// Renames procedure symbols by the injective map `rho`, which must be
/// defined on exactly the symbols of `p`.
pub fn rename_predicates(
    p: &ProceduralProgram,
    rho: &BTreeMap<Sym, Sym>,
) -> Result<ProceduralProgram, ProgramError> {
    if let Some(s) = p.procedures.keys().find(|s| !rho.contains_key(*s)) {
        return Err(ProgramError::RenamingNotTotal(s.clone()));
    }
    if let Some(s) = rho.keys().find(|s| !p.procedures.contains_key(*s)) {
        return Err(ProgramError::RenamingUnknown(s.clone()));
    }
    let mut seen: BTreeMap<&Sym, &Sym> = BTreeMap::new();
    for (from, to) in rho {
        if let Some(prev) = seen.insert(to, from) {
            return Err(ProgramError::RenamingNotInjective(
                prev.clone(),
                from.clone(),
                to.clone(),
            ));
        }
    }
    let rename_call = |c: &Call| Call::new(rho[&c.symbol].clone(), c.args.clone());
    let procedures = p
        .procedures
        .iter()
        .map(|(symbol, proc)| {
            let clauses = proc
                .clauses
                .iter()
                .map(|c| {
                    Clause::new(
                        c.params.clone(),
                        c.body.calls().iter().map(rename_call).collect(),
                    )
                })
                .collect();
            (
                rho[symbol].clone(),
                Procedure {
                    arity: proc.arity,
                    clauses,
                },
            )
        })
        .collect();
    ProceduralProgram::new(procedures)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Term;
    use proptest::prelude::*;

    const APP_MEM: &str = "
        app(nil, Y, Y).
        app('.'(X, U), Y, '.'(X, V)) :- app(U, Y, V).
        mem(X, Y) :- app(U, '.'(X, V), Y).
    ";

    fn sym(s: &str) -> Sym {
        Sym::new(s)
    }

    #[test]
    fn parses_facts_and_rules() {
        let s = parse_program("app(nil,Y,Y).").unwrap();
        let c = s.clauses().iter().next().unwrap();
        assert!(c.body.is_empty());
        assert_eq!(c.head.to_string(), "app(nil,Y,Y)");

        let s = parse_program("mem(X,Y) :- app(U,'.'(X,V),Y).").unwrap();
        let c = s.clauses().iter().next().unwrap();
        assert_eq!(c.body.calls().len(), 1);
    }

    #[test]
    fn arity_conflict_is_its_own_error() {
        let err = parse_program("p(X) :- q(X,Y). q(a,b). q(a,b,c).").unwrap_err();
        assert!(
            matches!(err, ParseError::ArityConflict { ref symbol, expected: 2, found: 3, .. } if symbol.as_str() == "q")
        );
    }

    #[test]
    fn duplicate_body_atoms_collapse_with_a_warning() {
        let (s, lints) = parse_program_linted("p(X) :- q(X), q(X).\nq(a).").unwrap();
        assert_eq!(lints.len(), 1);
        assert_eq!(lints[0].line, 1);
        let p = s
            .clauses()
            .iter()
            .find(|c| c.head.symbol == sym("p"))
            .unwrap();
        assert_eq!(p.body.calls().len(), 1);
    }

    #[test]
    fn app_mem_procedural_form() {
        let p = to_procedural(&parse_program(APP_MEM).unwrap()).unwrap();
        assert_eq!(
            p.symbols().cloned().collect::<Vec<_>>(),
            vec![sym("app"), sym("mem")]
        );
        assert_eq!(p.get(&sym("app")).unwrap().clauses().len(), 2);
        assert_eq!(p.get(&sym("mem")).unwrap().clauses().len(), 1);
        let fact = Clause::new(
            TermTuple::new(vec![Term::constant("nil"), Term::var("Y"), Term::var("Y")]),
            Body::default(),
        );
        assert!(p.get(&sym("app")).unwrap().clauses().contains(&fact));
    }

    #[test]
    fn called_only_symbols_are_empty_procedures() {
        let p = to_procedural(&parse_program("p(X) :- e(X).").unwrap()).unwrap();
        assert!(p.get(&sym("e")).unwrap().is_empty());
        assert_eq!(p.arity(&sym("e")), Some(1));
    }

    #[test]
    fn empty_sentence() {
        let p = to_procedural(&ClausalSentence::default()).unwrap();
        assert_eq!(p.symbols().count(), 0);
        assert_eq!(to_clausal(&p), ClausalSentence::default());
        assert_eq!(infer_signature(&p), Signature::new());
    }

    #[test]
    fn signature_of_app_mem() {
        let p = to_procedural(&parse_program(APP_MEM).unwrap()).unwrap();
        let sig = infer_signature(&p);
        assert_eq!(
            sig.constants().iter().map(Sym::as_str).collect::<Vec<_>>(),
            vec!["nil"]
        );
        assert_eq!(
            sig.functions()
                .iter()
                .map(|(f, &n)| (f.as_str(), n))
                .collect::<Vec<_>>(),
            vec![(".", 2)]
        );
        assert_eq!(
            sig.predicates()
                .iter()
                .map(|(f, &n)| (f.as_str(), n))
                .collect::<Vec<_>>(),
            vec![("app", 3), ("mem", 2)]
        );
        let p = to_procedural(&parse_program("p(f(a, g(b))).").unwrap()).unwrap();
        let sig = infer_signature(&p);
        assert_eq!(sig.constants().len(), 2);
        assert_eq!(sig.functions().get(&sym("f")), Some(&2));
        assert_eq!(sig.functions().get(&sym("g")), Some(&1));
    }

    #[test]
    fn renaming() {
        let p = to_procedural(&parse_program(APP_MEM).unwrap()).unwrap();
        let id: BTreeMap<Sym, Sym> = p.symbols().map(|s| (s.clone(), s.clone())).collect();
        assert_eq!(rename_predicates(&p, &id).unwrap(), p);

        let swap = BTreeMap::from([(sym("app"), sym("mem")), (sym("mem"), sym("app"))]);
        let swapped = rename_predicates(&p, &swap).unwrap();
        assert_ne!(swapped, p);
        assert_eq!(swapped.arity(&sym("mem")), Some(3));
        assert_eq!(rename_predicates(&swapped, &swap).unwrap(), p);

        let conc = BTreeMap::from([(sym("app"), sym("conc")), (sym("mem"), sym("mem"))]);
        let renamed = rename_predicates(&p, &conc).unwrap();
        let mem = renamed
            .get(&sym("mem"))
            .unwrap()
            .clauses()
            .iter()
            .next()
            .unwrap();
        assert_eq!(mem.body.calls().iter().next().unwrap().symbol, sym("conc"));
    }

    #[test]
    fn renaming_errors() {
        let p = to_procedural(&parse_program(APP_MEM).unwrap()).unwrap();
        let partial = BTreeMap::from([(sym("app"), sym("conc"))]);
        assert!(matches!(
            rename_predicates(&p, &partial),
            Err(ProgramError::RenamingNotTotal(_))
        ));
        let clash = BTreeMap::from([(sym("app"), sym("x")), (sym("mem"), sym("x"))]);
        assert!(matches!(
            rename_predicates(&p, &clash),
            Err(ProgramError::RenamingNotInjective(..))
        ));
        let extra = BTreeMap::from([
            (sym("app"), sym("app")),
            (sym("mem"), sym("mem")),
            (sym("zz"), sym("q")),
        ]);
        assert!(matches!(
            rename_predicates(&p, &extra),
            Err(ProgramError::RenamingUnknown(_))
        ));
    }

    #[test]
    fn canonical_print_reparses() {
        let s = parse_program(APP_MEM).unwrap();
        assert_eq!(parse_program(&s.to_string()).unwrap(), s);
    }

    fn arb_term_text() -> impl Strategy<Value = String> {
        let leaf =
            prop::sample::select(vec!["a", "b", "nil", "X", "Y", "'.'(a,nil)", "[X|Y]", "[]"])
                .prop_map(String::from);
        leaf.prop_recursive(2, 8, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|t| format!("f({t})")),
                (inner.clone(), inner).prop_map(|(a, b)| format!("g({a}, {b})")),
            ]
        })
    }

    fn arb_atom_text() -> impl Strategy<Value = String> {
        prop_oneof![
            Just("r".to_string()),
            arb_term_text().prop_map(|t| format!("p({t})")),
            (arb_term_text(), arb_term_text()).prop_map(|(a, b)| format!("q({a},{b})")),
        ]
    }

    fn arb_clauses() -> impl Strategy<Value = Vec<(String, Vec<String>)>> {
        prop::collection::vec(
            (
                arb_atom_text(),
                prop::collection::vec(arb_atom_text(), 0..3),
            ),
            0..5,
        )
    }

    fn render(clauses: &[(String, Vec<String>)]) -> String {
        clauses
            .iter()
            .map(|(h, b)| {
                if b.is_empty() {
                    format!("{h}.\n")
                } else {
                    format!("{h} :- {}.\n", b.join(", "))
                }
            })
            .collect()
    }

    proptest! {
        #[test]
        fn source_order_is_irrelevant(clauses in arb_clauses(), seed in any::<u64>()) {
            let mut shuffled = clauses.clone();
            shuffled.reverse();
            for (i, (_, body)) in shuffled.iter_mut().enumerate() {
                if (seed >> (i % 64)) & 1 == 1 {
                    body.reverse();
                }
            }
            let a = to_procedural(&parse_program(&render(&clauses)).unwrap()).unwrap();
            let b = to_procedural(&parse_program(&render(&shuffled)).unwrap()).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn clausal_procedural_roundtrip(clauses in arb_clauses()) {
            let s = parse_program(&render(&clauses)).unwrap();
            let p = to_procedural(&s).unwrap();
            prop_assert_eq!(&to_clausal(&p), &s);
            prop_assert_eq!(to_procedural(&to_clausal(&p)).unwrap(), p);
            prop_assert_eq!(parse_program(&s.to_string()).unwrap(), s);
        }
    }
}
