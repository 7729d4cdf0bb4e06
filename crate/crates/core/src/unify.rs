//! Martelli–Montanari unification with occurs check, producing canonical
//! solved forms.
//!
//! Canonical means: every binding is fully resolved (the solved form is
//! idempotent), and whenever two unbound variables are equated the larger
//! one (in name order) is bound to the smaller. Together these make the
//! result a function of the equation *set*, independent of the order in
//! which the equations are processed.

use std::collections::BTreeMap;
use std::fmt;

use crate::term::{Term, TermEquation, TermTuple, Var};

/// Why a set of equations has no solution.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UnifyError {
    #[error("cannot unify {left} with {right}: functor clash")]
    Clash { left: Term, right: Term },
    #[error("cannot bind {var} to {term}: occurs check")]
    Occurs { var: Var, term: Term },
    #[error("tuples of order {left} and {right} cannot be unified")]
    Order { left: usize, right: usize },
}

/// An idempotent substitution `x1 ↦ t1, …, xk ↦ tk` where no `xi` occurs in
/// any `tj`.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SolvedForm {
    bindings: BTreeMap<Var, Term>,
}

impl SolvedForm {
    pub fn empty() -> Self {
        SolvedForm::default()
    }

    pub fn bindings(&self) -> &BTreeMap<Var, Term> {
        &self.bindings
    }

    pub fn into_bindings(self) -> BTreeMap<Var, Term> {
        self.bindings
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.bindings.get(v)
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn apply(&self, t: &Term) -> Term {
        t.substitute(&self.bindings)
    }

    pub fn apply_tuple(&self, t: &TermTuple) -> TermTuple {
        t.substitute(&self.bindings)
    }

    /// Adds `x = t` to the solved form, keeping it canonical.
    pub fn bind(&mut self, lhs: &Term, rhs: &Term) -> Result<(), UnifyError> {
        let mut stack = vec![(lhs.clone(), rhs.clone())];
        while let Some((l, r)) = stack.pop() {
            let l = self.apply(&l);
            let r = self.apply(&r);
            match (l, r) {
                (l, r) if l == r => {}
                (Term::Var(x), Term::Var(y)) => {
                    if x < y {
                        self.extend(y, Term::Var(x));
                    } else {
                        self.extend(x, Term::Var(y));
                    }
                }
                (Term::Var(x), t) | (t, Term::Var(x)) => {
                    if t.occurs(&x) {
                        return Err(UnifyError::Occurs { var: x, term: t });
                    }
                    self.extend(x, t);
                }
                (Term::App(f, fa), Term::App(g, ga)) => {
                    if f != g || fa.len() != ga.len() {
                        return Err(UnifyError::Clash {
                            left: Term::App(f, fa),
                            right: Term::App(g, ga),
                        });
                    }
                    stack.extend(fa.into_iter().zip(ga));
                }
            }
        }
        Ok(())
    }

    // `x` is unbound and does not occur in `t`; `t` is already resolved.
    fn extend(&mut self, x: Var, t: Term) {
        let single = BTreeMap::from([(x.clone(), t.clone())]);
        for rhs in self.bindings.values_mut() {
            if rhs.occurs(&x) {
                *rhs = rhs.substitute(&single);
            }
        }
        self.bindings.insert(x, t);
    }

    /// Builds a solved form from explicit bindings, solving them as equations.
    pub fn from_bindings<I>(bindings: I) -> Result<SolvedForm, UnifyError>
    where
        I: IntoIterator<Item = (Var, Term)>,
    {
        let mut s = SolvedForm::empty();
        for (v, t) in bindings {
            s.bind(&Term::Var(v), &t)?;
        }
        Ok(s)
    }
}

impl fmt::Debug for SolvedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SolvedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}↦{t}")?;
        }
        f.write_str("}")
    }
}

/// Solves a set of equations.
pub fn solve<'a, I>(eqs: I) -> Result<SolvedForm, UnifyError>
where
    I: IntoIterator<Item = &'a TermEquation>,
{
    let mut s = SolvedForm::empty();
    for eq in eqs {
        s.bind(&eq.lhs, &eq.rhs)?;
    }
    Ok(s)
}

pub fn unify(t0: &Term, t1: &Term) -> Result<SolvedForm, UnifyError> {
    let mut s = SolvedForm::empty();
    s.bind(t0, t1)?;
    Ok(s)
}

/// Componentwise unification of two tuples of the same order.
pub fn unify_tuples(t0: &TermTuple, t1: &TermTuple) -> Result<SolvedForm, UnifyError> {
    if t0.order() != t1.order() {
        return Err(UnifyError::Order {
            left: t0.order(),
            right: t1.order(),
        });
    }
    let mut s = SolvedForm::empty();
    for (a, b) in t0.terms().iter().zip(t1.terms()) {
        s.bind(a, b)?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Term;
    use proptest::prelude::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }
    fn c(n: &str) -> Term {
        Term::constant(n)
    }
    fn f(t: Term) -> Term {
        Term::app("f", vec![t])
    }
    fn eq(l: Term, r: Term) -> TermEquation {
        TermEquation::new(l, r)
    }
    fn sf(pairs: &[(&str, Term)]) -> SolvedForm {
        SolvedForm {
            bindings: pairs
                .iter()
                .map(|(n, t)| (Var::new(n), t.clone()))
                .collect(),
        }
    }

    #[test]
    fn solve_resolves_chains() {
        let s = solve(&[eq(v("X"), f(v("Y"))), eq(v("Y"), c("a"))]).unwrap();
        assert_eq!(s, sf(&[("X", f(c("a"))), ("Y", c("a"))]));
    }

    #[test]
    fn occurs_check_fails() {
        let err = solve(&[eq(v("X"), f(v("X")))]).unwrap_err();
        assert!(matches!(err, UnifyError::Occurs { .. }));
    }

    #[test]
    fn union_of_two_ground_rows() {
        let eqs = [
            eq(v("X"), c("a")),
            eq(v("Y"), c("b")),
            eq(v("X"), c("a")),
            eq(v("Z"), c("b")),
        ];
        let s = solve(&eqs).unwrap();
        assert_eq!(s, sf(&[("X", c("a")), ("Y", c("b")), ("Z", c("b"))]));
    }

    #[test]
    fn unify_basic_cases() {
        assert!(unify(&v("X"), &v("X")).unwrap().is_empty());
        let err = unify(&f(v("X")), &Term::app("g", vec![v("X")])).unwrap_err();
        assert!(matches!(err, UnifyError::Clash { .. }));
        let args = TermTuple::new(vec![v("X"), f(v("Y"))]);
        let row = TermTuple::new(vec![f(c("b")), f(c("a"))]);
        assert_eq!(
            unify_tuples(&args, &row).unwrap(),
            sf(&[("X", f(c("b"))), ("Y", c("a"))])
        );
    }

    #[test]
    fn apply_examples() {
        let s = sf(&[("X", c("a"))]);
        let t = Term::app("f", vec![v("X"), v("Y")]);
        assert_eq!(s.apply(&t), Term::app("f", vec![c("a"), v("Y")]));
        assert_eq!(SolvedForm::empty().apply(&t), t);
        let s = sf(&[("Y", c("b")), ("Z", f(c("b")))]);
        let tup = TermTuple::new(vec![f(v("Y")), v("Z")]);
        assert_eq!(
            s.apply_tuple(&tup),
            TermTuple::new(vec![f(c("b")), f(c("b"))])
        );
    }

    #[test]
    fn variable_equations_pick_smallest_representative() {
        let s = solve(&[eq(v("Z"), v("Y")), eq(v("Y"), v("X"))]).unwrap();
        assert_eq!(s, sf(&[("Y", v("X")), ("Z", v("X"))]));
        let s = solve(&[eq(v("X"), v("Z")), eq(v("Y"), v("Z"))]).unwrap();
        assert_eq!(s, sf(&[("Y", v("X")), ("Z", v("X"))]));
    }

    #[test]
    fn clash_inside_arguments() {
        let l = Term::app("g", vec![v("X"), c("a")]);
        let r = Term::app("g", vec![c("b"), c("b")]);
        assert!(matches!(unify(&l, &r), Err(UnifyError::Clash { .. })));
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            prop::sample::select(vec!["U", "V", "W", "X"]).prop_map(Term::var),
            prop::sample::select(vec!["a", "b"]).prop_map(Term::constant),
        ];
        leaf.prop_recursive(3, 12, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|t| Term::app("f", vec![t])),
                (inner.clone(), inner).prop_map(|(a, b)| Term::app("g", vec![a, b])),
            ]
        })
    }

    fn arb_eqs() -> impl Strategy<Value = Vec<TermEquation>> {
        prop::collection::vec((arb_term(), arb_term()).prop_map(|(l, r)| eq(l, r)), 0..5)
    }

    proptest! {
        #[test]
        fn solution_unifies_every_equation(eqs in arb_eqs()) {
            if let Ok(s) = solve(&eqs) {
                for e in &eqs {
                    prop_assert_eq!(s.apply(&e.lhs), s.apply(&e.rhs));
                }
            }
        }

        #[test]
        fn solved_forms_are_idempotent(eqs in arb_eqs(), t in arb_term()) {
            if let Ok(s) = solve(&eqs) {
                let once = s.apply(&t);
                prop_assert_eq!(s.apply(&once), once);
                for (x, rhs) in s.bindings() {
                    prop_assert!(!rhs.occurs(x));
                    for y in s.bindings().keys() {
                        prop_assert!(!rhs.occurs(y));
                    }
                }
            }
        }

        #[test]
        fn solve_ignores_equation_order(eqs in arb_eqs(), seed in any::<u64>()) {
            let mut shuffled = eqs.clone();
            // deterministic permutation derived from the seed
            let n = shuffled.len();
            let mut state = seed;
            for i in (1..n).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                shuffled.swap(i, (state >> 33) as usize % (i + 1));
            }
            let swapped: Vec<_> = shuffled.iter().map(|e| eq(e.rhs.clone(), e.lhs.clone())).collect();
            let a = solve(&eqs).ok();
            prop_assert_eq!(&a, &solve(&shuffled).ok());
            prop_assert_eq!(&a, &solve(&swapped).ok());
        }
    }
}
