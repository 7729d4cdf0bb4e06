//! The list program against hand-rolled list oracles over `{nil, a, b, '.'/2}`.

use std::collections::BTreeSet;

use tabsem::relation::relational_to_herbrand;
use tabsem::semantics::{lfp_m, query};
use tabsem::syntax::{parse_goal, parse_program, to_procedural};
use tabsem::{HerbrandInterpretation, ProceduralProgram, Term, TermTuple, Universe};

const APP_MEM: &str = include_str!("../examples/appmem.pl");

fn program() -> ProceduralProgram {
    to_procedural(&parse_program(APP_MEM).unwrap()).unwrap()
}

fn universe(d: usize) -> Universe {
    let mut sig = tabsem::syntax::infer_signature(&program());
    sig.add_constant("a").unwrap();
    sig.add_constant("b").unwrap();
    Universe::new(sig, d).unwrap()
}

/// Elements of a proper list, or `None` if `t` does not end in `nil`.
fn as_list(t: &Term) -> Option<Vec<Term>> {
    match t {
        Term::App(s, args) if s.as_str() == "nil" && args.is_empty() => Some(Vec::new()),
        Term::App(s, args) if s.as_str() == "." && args.len() == 2 => {
            let mut rest = as_list(&args[1])?;
            rest.insert(0, args[0].clone());
            Some(rest)
        }
        _ => None,
    }
}

/// Heads along the chain of conses, whatever the tail.
fn spine(t: &Term) -> Vec<&Term> {
    match t {
        Term::App(s, args) if s.as_str() == "." && args.len() == 2 => {
            let mut out = vec![&args[0]];
            out.extend(spine(&args[1]));
            out
        }
        _ => Vec::new(),
    }
}

/// `prefix ++ tail` built with conses.
fn append(prefix: &[Term], tail: &Term) -> Term {
    prefix
        .iter()
        .rev()
        .fold(tail.clone(), |acc, h| Term::app(".", vec![h.clone(), acc]))
}

fn atoms(h: &HerbrandInterpretation, name: &str) -> BTreeSet<TermTuple> {
    h.atoms()
        .iter()
        .filter(|a| a.symbol.as_str() == name)
        .map(|a| a.args.clone())
        .collect()
}

#[test]
fn universe_at_depth_two_has_147_terms() {
    // 3 constants, 9 conses of constants, 135 conses with a depth-1 argument
    assert_eq!(universe(2).ground_terms().len(), 3 + 9 + (12 * 12 - 9));
}

#[test]
fn mem_is_spine_membership() {
    let u = universe(2);
    let report = lfp_m(&program(), &u, 100).unwrap();
    assert!(report.converged);
    let got = atoms(&relational_to_herbrand(&report.result), "mem");
    let mut expected = BTreeSet::new();
    for y in u.ground_terms() {
        for x in spine(y) {
            expected.insert(TermTuple::new(vec![x.clone(), y.clone()]));
        }
    }
    assert_eq!(got, expected);
}

#[test]
fn app_is_concatenation() {
    let u = universe(2);
    let report = lfp_m(&program(), &u, 100).unwrap();
    let got = atoms(&relational_to_herbrand(&report.result), "app");
    // every proper list x, any y, with x ++ y inside the universe
    let mut expected = BTreeSet::new();
    for x in u.ground_terms() {
        let Some(xs) = as_list(x) else { continue };
        for y in u.ground_terms() {
            let z = append(&xs, y);
            if u.contains(&z) {
                expected.insert(TermTuple::new(vec![x.clone(), y.clone(), z]));
            }
        }
    }
    assert_eq!(got, expected);

    // and exhaustively over list-shaped triples
    let lists: Vec<(&Term, Vec<Term>)> = u
        .ground_terms()
        .iter()
        .filter_map(|t| as_list(t).map(|l| (t, l)))
        .collect();
    for (x, xs) in &lists {
        for (y, ys) in &lists {
            for (z, zs) in &lists {
                let member = got.contains(&TermTuple::new(vec![
                    (*x).clone(),
                    (*y).clone(),
                    (*z).clone(),
                ]));
                assert_eq!(
                    member,
                    [xs.clone(), ys.clone()].concat() == *zs,
                    "app({x},{y},{z})"
                );
            }
        }
    }
}

#[test]
fn splitting_a_singleton_list() {
    let u = universe(2);
    let goal = parse_goal("app(X, Y, '.'(a, nil))").unwrap();
    let answer = query(&program(), &goal, &u, 100, &Default::default()).unwrap();
    assert_eq!(
        answer.answers.render_records(),
        "X='.'(a,nil) Y=nil\nX=nil Y='.'(a,nil)\n"
    );
}

#[test]
fn ground_goals_answer_yes_or_no() {
    let u = universe(2);
    let yes = parse_goal("mem(b, [a, b])").unwrap();
    assert!(query(&program(), &yes, &u, 100, &Default::default())
        .unwrap()
        .answers
        .is_top());
    let no = parse_goal("mem(b, [a, a])").unwrap();
    assert!(query(&program(), &no, &u, 100, &Default::default())
        .unwrap()
        .answers
        .is_bottom());
}

#[test]
fn unknown_goal_predicate_is_an_error() {
    let goal = parse_goal("len(X)").unwrap();
    assert!(query(&program(), &goal, &universe(1), 100, &Default::default()).is_err());
}

#[test]
fn membership_in_a_two_element_list_at_depth_three() {
    let u = universe(3);
    let goal = parse_goal("mem(X, [a, b])").unwrap();
    let answer = query(&program(), &goal, &u, 100, &Default::default()).unwrap();
    assert!(answer.report.converged);
    assert_eq!(answer.answers.render_records(), "X=a\nX=b\n");
}
