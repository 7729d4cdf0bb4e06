//! Ground relations, integer-indexed and variable-indexed, and the two views
//! of an interpretation (a set of ground atoms, or one relation per
//! procedure symbol).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::term::{Signature, Sym, Term, TermTuple, Var};
use crate::universe::Universe;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RelationError {
    #[error("tuple {tuple} has order {found}, expected {expected}")]
    Order {
        tuple: TermTuple,
        expected: usize,
        found: usize,
    },
    #[error("tuple {0} is not ground")]
    NotGround(TermTuple),
    #[error("index set {{{}}} is not contained in {{{}}}", join(.sub), join(.sup))]
    NotSubset { sub: Vec<Var>, sup: Vec<Var> },
    #[error("unknown procedure symbol {0}")]
    UnknownSymbol(Sym),
    #[error("{symbol} has arity {expected}, but an atom with {found} arguments was given")]
    Arity {
        symbol: Sym,
        expected: usize,
        found: usize,
    },
}

fn join(vs: &[Var]) -> String {
    vs.iter()
        .map(|v| v.name().to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// An n-ary relation: a set of ground n-tuples.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntRelation {
    order: usize,
    tuples: BTreeSet<TermTuple>,
}

impl IntRelation {
    pub fn empty(order: usize) -> Self {
        IntRelation {
            order,
            tuples: BTreeSet::new(),
        }
    }

    pub fn new<I>(order: usize, tuples: I) -> Result<Self, RelationError>
    where
        I: IntoIterator<Item = TermTuple>,
    {
        let mut r = IntRelation::empty(order);
        for t in tuples {
            r.insert(t)?;
        }
        Ok(r)
    }

    pub fn insert(&mut self, t: TermTuple) -> Result<bool, RelationError> {
        if t.order() != self.order {
            return Err(RelationError::Order {
                expected: self.order,
                found: t.order(),
                tuple: t,
            });
        }
        if !t.is_ground() {
            return Err(RelationError::NotGround(t));
        }
        Ok(self.tuples.insert(t))
    }

    // Callers guarantee order and groundness.
    pub(crate) fn insert_unchecked(&mut self, t: TermTuple) {
        debug_assert!(t.order() == self.order && t.is_ground());
        self.tuples.insert(t);
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn tuples(&self) -> &BTreeSet<TermTuple> {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &TermTuple) -> bool {
        self.tuples.contains(t)
    }

    pub fn is_subset(&self, other: &IntRelation) -> bool {
        self.order == other.order && self.tuples.is_subset(&other.tuples)
    }

    pub fn union_with(&mut self, other: &IntRelation) {
        debug_assert_eq!(self.order, other.order);
        self.tuples.extend(other.tuples.iter().cloned());
    }

    /// Renders the relation in the transposed layout: one row
    /// per index `0..n`, one column per tuple.
    pub fn render_transposed(&self) -> String {
        let labels: Vec<String> = (0..self.order).map(|i| i.to_string()).collect();
        let columns: Vec<Vec<String>> = self
            .tuples
            .iter()
            .map(|t| t.terms().iter().map(Term::to_string).collect())
            .collect();
        render_grid(&labels, &columns)
    }
}

/// One tuple per line, in parenthesized term syntax.
impl fmt::Display for IntRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.tuples {
            writeln!(f, "{t}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for IntRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntRelation/{}{:?}", self.order, self.tuples)
    }
}

/// Lays out labelled rows with aligned columns:
///
/// ```text
/// X || a | f(a)
/// Y || b | b
/// ```
pub(crate) fn render_grid(labels: &[String], columns: &[Vec<String>]) -> String {
    let label_width = labels.iter().map(|l| l.chars().count()).max().unwrap_or(0);
    let widths: Vec<usize> = columns
        .iter()
        .map(|c| c.iter().map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (row, label) in labels.iter().enumerate() {
        let cells: Vec<String> = columns
            .iter()
            .zip(&widths)
            .map(|(col, width)| format!("{:<width$}", col[row]))
            .collect();
        let line = format!("{label:<label_width$} || {}", cells.join(" | "));
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// A variable-indexed ground relation: a set of total maps `V → Herb`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarRelation {
    index: BTreeSet<Var>,
    tuples: BTreeSet<BTreeMap<Var, Term>>,
}

impl VarRelation {
    pub fn empty(index: BTreeSet<Var>) -> Self {
        VarRelation {
            index,
            tuples: BTreeSet::new(),
        }
    }

    /// The relation `{⟨⟩}` on the empty index set.
    pub fn unit() -> Self {
        VarRelation {
            index: BTreeSet::new(),
            tuples: BTreeSet::from([BTreeMap::new()]),
        }
    }

    pub fn new<I>(index: BTreeSet<Var>, tuples: I) -> Result<Self, RelationError>
    where
        I: IntoIterator<Item = BTreeMap<Var, Term>>,
    {
        let mut r = VarRelation::empty(index);
        for t in tuples {
            let keys: BTreeSet<Var> = t.keys().cloned().collect();
            if keys != r.index {
                return Err(RelationError::NotSubset {
                    sub: keys.into_iter().collect(),
                    sup: r.index.iter().cloned().collect(),
                });
            }
            if let Some(bad) = t.values().find(|v| !v.is_ground()) {
                return Err(RelationError::NotGround(TermTuple::new(vec![bad.clone()])));
            }
            r.tuples.insert(t);
        }
        Ok(r)
    }

    pub(crate) fn insert_unchecked(&mut self, t: BTreeMap<Var, Term>) {
        debug_assert!(t.keys().eq(self.index.iter()));
        self.tuples.insert(t);
    }

    pub fn index(&self) -> &BTreeSet<Var> {
        &self.index
    }

    pub fn tuples(&self) -> &BTreeSet<BTreeMap<Var, Term>> {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Set intersection of two relations on the same index set.
    pub fn intersect(&self, other: &VarRelation) -> Result<VarRelation, RelationError> {
        if self.index != other.index {
            return Err(RelationError::NotSubset {
                sub: other.index.iter().cloned().collect(),
                sup: self.index.iter().cloned().collect(),
            });
        }
        Ok(VarRelation {
            index: self.index.clone(),
            tuples: self.tuples.intersection(&other.tuples).cloned().collect(),
        })
    }
}

impl fmt::Debug for VarRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VarRelation{:?}{{", self.index)?;
        for (i, t) in self.tuples.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            let pairs: Vec<String> = t.iter().map(|(v, x)| format!("{v}={x}")).collect();
            f.write_str(&pairs.join(","))?;
        }
        f.write_str("}")
    }
}

fn check_subset(sub: &BTreeSet<Var>, sup: &BTreeSet<Var>) -> Result<(), RelationError> {
    if sub.is_subset(sup) {
        Ok(())
    } else {
        Err(RelationError::NotSubset {
            sub: sub.iter().cloned().collect(),
            sup: sup.iter().cloned().collect(),
        })
    }
}

/// Restricts every tuple of `r` to `sub`.
pub fn rel_project(r: &VarRelation, sub: &BTreeSet<Var>) -> Result<VarRelation, RelationError> {
    check_subset(sub, &r.index)?;
    let tuples = r
        .tuples
        .iter()
        .map(|t| {
            t.iter()
                .filter(|(v, _)| sub.contains(*v))
                .map(|(v, x)| (v.clone(), x.clone()))
                .collect()
        })
        .collect();
    Ok(VarRelation {
        index: sub.clone(),
        tuples,
    })
}

/// The cylinder on `r` in `big`: the largest relation on `big` over `Herb_d`
/// whose projection onto `r`'s index set is `r`.
pub fn rel_cylinder(
    r: &VarRelation,
    big: &BTreeSet<Var>,
    u: &Universe,
) -> Result<VarRelation, RelationError> {
    check_subset(&r.index, big)?;
    let extra: Vec<Var> = big.difference(&r.index).cloned().collect();
    let herb = u.ground_terms();
    let mut out = VarRelation::empty(big.clone());
    if extra.is_empty() {
        out.tuples = r.tuples.clone();
        return Ok(out);
    }
    for t in &r.tuples {
        let mut idx = vec![0usize; extra.len()];
        'odometer: loop {
            let mut row = t.clone();
            for (v, &i) in extra.iter().zip(&idx) {
                row.insert(v.clone(), herb[i].clone());
            }
            out.tuples.insert(row);
            for slot in idx.iter_mut().rev() {
                *slot += 1;
                if *slot < herb.len() {
                    continue 'odometer;
                }
                *slot = 0;
            }
            break;
        }
    }
    Ok(out)
}

/// A ground atom `p(a0, …, an-1)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub symbol: Sym,
    pub args: TermTuple,
}

impl Atom {
    pub fn new(symbol: Sym, args: TermTuple) -> Self {
        Atom { symbol, args }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.order() == 0 {
            write!(f, "{}", self.symbol)
        } else {
            write!(f, "{}{}", self.symbol, self.args)
        }
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A set of ground atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HerbrandInterpretation {
    atoms: BTreeSet<Atom>,
}

impl HerbrandInterpretation {
    pub fn new() -> Self {
        HerbrandInterpretation::default()
    }

    pub fn atoms(&self) -> &BTreeSet<Atom> {
        &self.atoms
    }

    pub fn insert(&mut self, a: Atom) -> bool {
        self.atoms.insert(a)
    }

    pub fn contains(&self, a: &Atom) -> bool {
        self.atoms.contains(a)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_subset(&self, other: &HerbrandInterpretation) -> bool {
        self.atoms.is_subset(&other.atoms)
    }
}

impl FromIterator<Atom> for HerbrandInterpretation {
    fn from_iter<T: IntoIterator<Item = Atom>>(iter: T) -> Self {
        HerbrandInterpretation {
            atoms: iter.into_iter().collect(),
        }
    }
}

/// One relation per procedure symbol, each of the symbol's arity.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct RelationalInterpretation {
    relations: BTreeMap<Sym, IntRelation>,
}

impl RelationalInterpretation {
    /// Every predicate of `sig` mapped to the empty relation.
    pub fn empty(sig: &Signature) -> Self {
        RelationalInterpretation {
            relations: sig
                .predicates()
                .iter()
                .map(|(p, &n)| (p.clone(), IntRelation::empty(n)))
                .collect(),
        }
    }

    pub fn from_relations<I>(relations: I) -> Self
    where
        I: IntoIterator<Item = (Sym, IntRelation)>,
    {
        RelationalInterpretation {
            relations: relations.into_iter().collect(),
        }
    }

    pub fn get(&self, p: &Sym) -> Option<&IntRelation> {
        self.relations.get(p)
    }

    pub fn set(&mut self, p: Sym, r: IntRelation) {
        self.relations.insert(p, r);
    }

    pub fn relations(&self) -> &BTreeMap<Sym, IntRelation> {
        &self.relations
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Sym> {
        self.relations.keys()
    }

    pub fn total_size(&self) -> usize {
        self.relations.values().map(IntRelation::len).sum()
    }

    /// Componentwise inclusion over the same symbols.
    pub fn is_subset(&self, other: &RelationalInterpretation) -> bool {
        self.relations.len() == other.relations.len()
            && self
                .relations
                .iter()
                .all(|(p, r)| other.relations.get(p).is_some_and(|o| r.is_subset(o)))
    }

    /// The `symbol/arity:` block dump used for diffable output.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (p, r) in &self.relations {
            out.push_str(&format!("{p}/{}:\n{r}", r.order()));
        }
        out
    }
}

impl fmt::Debug for RelationalInterpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.relations.iter()).finish()
    }
}

pub fn herbrand_to_relational(
    i: &HerbrandInterpretation,
    sig: &Signature,
) -> Result<RelationalInterpretation, RelationError> {
    let mut r = RelationalInterpretation::empty(sig);
    for atom in &i.atoms {
        let rel = r
            .relations
            .get_mut(&atom.symbol)
            .ok_or_else(|| RelationError::UnknownSymbol(atom.symbol.clone()))?;
        if rel.order() != atom.args.order() {
            return Err(RelationError::Arity {
                symbol: atom.symbol.clone(),
                expected: rel.order(),
                found: atom.args.order(),
            });
        }
        rel.insert(atom.args.clone())?;
    }
    Ok(r)
}

pub fn relational_to_herbrand(r: &RelationalInterpretation) -> HerbrandInterpretation {
    r.relations
        .iter()
        .flat_map(|(p, rel)| {
            rel.tuples()
                .iter()
                .map(move |t| Atom::new(p.clone(), t.clone()))
        })
        .collect()
}

/// Whether `i` and `r` denote the same interpretation. The signature's
/// predicates are taken from `r`.
pub fn correspond(i: &HerbrandInterpretation, r: &RelationalInterpretation) -> bool {
    let mut sig = Signature::new();
    for (p, rel) in &r.relations {
        // symbols in a relational interpretation carry one arity each
        let _ = sig.add_predicate(p.clone(), rel.order());
    }
    herbrand_to_relational(i, &sig).is_ok_and(|converted| &converted == r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(n: &str) -> Term {
        Term::constant(n)
    }
    fn f(t: Term) -> Term {
        Term::app("f", vec![t])
    }
    fn row(pairs: &[(&str, Term)]) -> BTreeMap<Var, Term> {
        pairs
            .iter()
            .map(|(v, t)| (Var::new(v), t.clone()))
            .collect()
    }
    fn vars(names: &[&str]) -> BTreeSet<Var> {
        names.iter().map(|n| Var::new(n)).collect()
    }
    fn universe(d: usize) -> Universe {
        let mut s = Signature::new();
        s.add_constant("a").unwrap();
        s.add_constant("b").unwrap();
        s.add_function("f", 1).unwrap();
        Universe::new(s, d).unwrap()
    }
    fn example_p() -> IntRelation {
        IntRelation::new(
            2,
            [
                vec![c("a"), f(c("b"))],
                vec![f(c("a")), c("b")],
                vec![f(c("a")), f(c("b"))],
                vec![f(c("b")), f(c("a"))],
            ]
            .map(TermTuple::new),
        )
        .unwrap()
    }
    fn sig_p() -> Signature {
        let mut s = Signature::new();
        s.add_predicate(Sym::new("p"), 2).unwrap();
        s.add_predicate(Sym::new("q"), 0).unwrap();
        s
    }

    #[test]
    fn project_examples() {
        let r = VarRelation::new(
            vars(&["X", "Y"]),
            [
                row(&[("X", c("a")), ("Y", c("b"))]),
                row(&[("X", c("a")), ("Y", c("c"))]),
            ],
        )
        .unwrap();
        assert_eq!(rel_project(&r, r.index()).unwrap(), r);
        assert_eq!(
            rel_project(&r, &BTreeSet::new()).unwrap(),
            VarRelation::unit()
        );
        let px = rel_project(&r, &vars(&["X"])).unwrap();
        assert_eq!(px.tuples().len(), 1);
        assert!(rel_project(&r, &vars(&["Z"])).is_err());
    }

    #[test]
    fn cylinder_examples() {
        let u = universe(1);
        let r = VarRelation::new(vars(&["X"]), [row(&[("X", c("a"))])]).unwrap();
        assert_eq!(rel_cylinder(&r, r.index(), &u).unwrap(), r);
        let big = vars(&["X", "Y"]);
        let cyl = rel_cylinder(&r, &big, &u).unwrap();
        assert_eq!(cyl.len(), 4);
        assert_eq!(rel_project(&cyl, r.index()).unwrap(), r);
        assert!(rel_cylinder(&VarRelation::empty(vars(&["X"])), &big, &u)
            .unwrap()
            .is_empty());
        assert!(rel_cylinder(&r, &vars(&["Y"]), &u).is_err());
    }

    #[test]
    fn herbrand_correspondence() {
        let sig = sig_p();
        let empty = herbrand_to_relational(&HerbrandInterpretation::new(), &sig).unwrap();
        assert!(empty.relations().values().all(IntRelation::is_empty));
        assert_eq!(
            relational_to_herbrand(&empty),
            HerbrandInterpretation::new()
        );
        assert!(correspond(&HerbrandInterpretation::new(), &empty));

        let i: HerbrandInterpretation = [vec![c("a"), f(c("b"))], vec![f(c("a")), c("b")]]
            .into_iter()
            .map(|args| Atom::new(Sym::new("p"), TermTuple::new(args)))
            .collect();
        let r = herbrand_to_relational(&i, &sig).unwrap();
        assert_eq!(r.get(&Sym::new("p")).unwrap().len(), 2);
        assert_eq!(relational_to_herbrand(&r), i);

        let single: HerbrandInterpretation = [Atom::new(Sym::new("q"), TermTuple::default())]
            .into_iter()
            .collect();
        assert!(!correspond(&single, &empty));

        let full = RelationalInterpretation::from_relations([
            (Sym::new("p"), example_p()),
            (Sym::new("q"), IntRelation::empty(0)),
        ]);
        let atoms: HerbrandInterpretation = example_p()
            .tuples()
            .iter()
            .map(|t| Atom::new(Sym::new("p"), t.clone()))
            .collect();
        assert!(correspond(&atoms, &full));
    }

    #[test]
    fn conversion_errors() {
        let sig = sig_p();
        let unknown: HerbrandInterpretation = [Atom::new(Sym::new("z"), TermTuple::default())]
            .into_iter()
            .collect();
        assert!(matches!(
            herbrand_to_relational(&unknown, &sig),
            Err(RelationError::UnknownSymbol(_))
        ));
        let wrong: HerbrandInterpretation =
            [Atom::new(Sym::new("p"), TermTuple::new(vec![c("a")]))]
                .into_iter()
                .collect();
        assert!(matches!(
            herbrand_to_relational(&wrong, &sig),
            Err(RelationError::Arity { .. })
        ));
    }

    #[test]
    fn transposed_rendering() {
        let text = example_p().render_transposed();
        assert_eq!(
            text,
            "0 || a    | f(a) | f(a) | f(b)\n1 || f(b) | b    | f(b) | f(a)\n"
        );
    }

    #[test]
    fn dump_format() {
        let r = RelationalInterpretation::from_relations([(Sym::new("p"), example_p())]);
        assert_eq!(
            r.dump(),
            "p/2:\n(a,f(b))\n(f(a),b)\n(f(a),f(b))\n(f(b),f(a))\n"
        );
    }

    fn arb_ground() -> impl Strategy<Value = Term> {
        prop::sample::select(vec![c("a"), c("b"), f(c("a")), f(c("b"))])
    }

    fn arb_var_relation() -> impl Strategy<Value = VarRelation> {
        prop::sample::subsequence(vec!["X", "Y", "Z"], 0..=2).prop_flat_map(|names| {
            let idx = vars(&names);
            let n = names.len();
            prop::collection::vec(prop::collection::vec(arb_ground(), n), 0..4).prop_map(
                move |rows| {
                    let tuples = rows
                        .into_iter()
                        .map(|vals| idx.iter().cloned().zip(vals).collect());
                    VarRelation::new(idx.clone(), tuples).unwrap()
                },
            )
        })
    }

    fn arb_interpretation() -> impl Strategy<Value = HerbrandInterpretation> {
        let atom = prop_oneof![
            (arb_ground(), arb_ground())
                .prop_map(|(x, y)| Atom::new(Sym::new("p"), TermTuple::new(vec![x, y]))),
            Just(Atom::new(Sym::new("q"), TermTuple::default())),
        ];
        prop::collection::btree_set(atom, 0..6).prop_map(|atoms| atoms.into_iter().collect())
    }

    proptest! {
        #[test]
        fn project_after_cylinder_is_identity(r in arb_var_relation()) {
            let u = universe(1);
            let cyl = rel_cylinder(&r, &vars(&["X", "Y", "Z", "W"]), &u).unwrap();
            prop_assert_eq!(rel_project(&cyl, r.index()).unwrap(), r);
        }

        #[test]
        fn correspondence_is_a_bijection(i in arb_interpretation()) {
            let sig = sig_p();
            let r = herbrand_to_relational(&i, &sig).unwrap();
            prop_assert_eq!(&relational_to_herbrand(&r), &i);
            prop_assert_eq!(herbrand_to_relational(&relational_to_herbrand(&r), &sig).unwrap(), r);
        }

        #[test]
        fn inclusion_order_is_preserved(i in arb_interpretation(), j in arb_interpretation()) {
            let sig = sig_p();
            let ri = herbrand_to_relational(&i, &sig).unwrap();
            let rj = herbrand_to_relational(&j, &sig).unwrap();
            prop_assert_eq!(i.is_subset(&j), ri.is_subset(&rj));
        }
    }
}
