//! Randomized checks of the algebraic laws of tables and of the agreement
//! between the table semantics and the immediate-consequence operator.
//!
//! Every law draws its instances from its own ChaCha stream derived from the
//! run seed, so a fixed seed reproduces the same instances and output. A
//! failing instance is shrunk greedily (dropping tuples, clauses and body
//! atoms while the failure persists) before it is reported.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::oracle::{lfp_t, tp_step};
use crate::relation::{
    herbrand_to_relational, rel_cylinder, rel_project, relational_to_herbrand,
    HerbrandInterpretation, IntRelation, RelationalInterpretation,
};
use crate::semantics::{eval_program, lfp_m, EvalContext};
use crate::syntax::{
    rename_predicates, to_clausal, to_procedural, Body, Call, ClausalSentence, HornClause,
    ProceduralProgram,
};
use crate::table::{
    cylinder_table, filter, ground_table, project, tables_equivalent, Table, TableTuple,
};
use crate::term::{Signature, Sym, Term, TermTuple, Var};
use crate::universe::Universe;

/// Iteration cap for fixpoint laws; far above the height of any lattice the
/// generators can produce.
pub const LAW_MAX_ITERS: usize = 10_000;

pub type ProductFn = fn(&Table, &Table) -> Table;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LawConfig {
    pub seed: u64,
    pub cases: usize,
    pub depth: usize,
}

impl Default for LawConfig {
    fn default() -> Self {
        LawConfig {
            seed: 0,
            cases: 500,
            depth: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// The instance is outside the law's hypotheses (e.g. clipped by the
    /// depth bound).
    Skip,
    Fail(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub passed: usize,
    pub skipped: usize,
    pub failed: usize,
    /// The first failing instance, minimized, with the failure reason.
    pub counterexample: Option<String>,
}

impl LawOutcome {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

/// Renders the per-law table and any counterexamples.
pub fn render_summary(config: &LawConfig, outcomes: &[LawOutcome]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "seed: {}  cases: {}  depth: {}",
        config.seed, config.cases, config.depth
    );
    let width = outcomes
        .iter()
        .map(|o| o.name.len())
        .max()
        .unwrap_or(3)
        .max(3);
    let _ = writeln!(
        out,
        "{:<width$}  {:>6}  {:>6}  {:>7}  {:>6}",
        "law", "cases", "passed", "skipped", "failed"
    );
    for o in outcomes {
        let _ = writeln!(
            out,
            "{:<width$}  {:>6}  {:>6}  {:>7}  {:>6}",
            o.name, o.cases, o.passed, o.skipped, o.failed
        );
    }
    for o in outcomes {
        if let Some(cx) = &o.counterexample {
            let _ = writeln!(out, "\ncounterexample for {}:\n{}", o.name, cx.trim_end());
        }
    }
    let failed: usize = outcomes.iter().map(|o| o.failed).sum();
    let verdict = if failed == 0 {
        "all laws hold".to_string()
    } else {
        format!("{failed} violation(s)")
    };
    let _ = writeln!(out, "\n{verdict}");
    out
}

// ---------------------------------------------------------------------------
// Generators

/// Constants `a`, `b` and the unary function `f`.
pub fn law_signature() -> Signature {
    let mut s = Signature::new();
    s.add_constant("a").expect("fresh signature");
    s.add_constant("b").expect("fresh signature");
    s.add_function("f", 1).expect("fresh signature");
    s
}

pub fn law_universe(depth: usize) -> Universe {
    Universe::new(law_signature(), depth).expect("signature has constants")
}

const TABLE_VARS: [&str; 4] = ["W", "X", "Y", "Z"];
const CLAUSE_VARS: [&str; 3] = ["X", "Y", "Z"];

pub fn random_term<R: Rng>(rng: &mut R, vars: &[Var], max_depth: usize) -> Term {
    let leaf_only = max_depth == 0 || rng.gen_bool(0.45);
    if leaf_only {
        if !vars.is_empty() && rng.gen_bool(0.5) {
            return Term::Var(vars.choose(rng).expect("non-empty").clone());
        }
        return Term::constant(if rng.gen_bool(0.5) { "a" } else { "b" });
    }
    Term::app("f", vec![random_term(rng, vars, max_depth - 1)])
}

fn random_subset<R: Rng>(rng: &mut R, pool: &[&str], max: usize) -> Vec<Var> {
    let n = rng.gen_range(0..=max.min(pool.len()));
    let mut vars: Vec<Var> = pool.choose_multiple(rng, n).map(|v| Var::new(v)).collect();
    vars.sort();
    vars
}

/// A table on at most four variables with at most four tuples, entries of
/// depth at most two.
pub fn random_table<R: Rng>(rng: &mut R) -> Table {
    let vars = random_subset(rng, &TABLE_VARS, 4);
    let index: BTreeSet<Var> = vars.iter().cloned().collect();
    let n = rng.gen_range(0..=4);
    let mut tuples = Vec::new();
    for _ in 0..n {
        let mut bindings = Vec::new();
        for v in &vars {
            if rng.gen_bool(0.6) {
                bindings.push((v.clone(), random_term(rng, &vars, 2)));
            }
        }
        // an occurs-check failure just means one tuple fewer
        if let Ok(t) = TableTuple::new(&index, bindings) {
            tuples.push(t);
        }
    }
    Table::new(index, tuples).expect("tuples are built on the index")
}

/// A relation of the given order with up to six tuples drawn from `Herb_d`.
pub fn random_relation<R: Rng>(rng: &mut R, u: &Universe, order: usize) -> IntRelation {
    let herb = u.ground_terms();
    let n = rng.gen_range(0..=6);
    let mut r = IntRelation::empty(order);
    for _ in 0..n {
        let row: Vec<Term> = (0..order)
            .map(|_| herb.choose(rng).expect("non-empty").clone())
            .collect();
        r.insert_unchecked(TermTuple::new(row));
    }
    r
}

pub fn random_tuple<R: Rng>(rng: &mut R, vars: &[Var], order: usize) -> TermTuple {
    TermTuple::new((0..order).map(|_| random_term(rng, vars, 2)).collect())
}

/// A tuple whose variables are exactly `vars` (each wrapped in up to two
/// `f`s), padded with extra random components.
pub fn covering_tuple<R: Rng>(rng: &mut R, vars: &[Var]) -> TermTuple {
    let mut terms: Vec<Term> = vars
        .iter()
        .map(|v| {
            let mut t = Term::Var(v.clone());
            for _ in 0..rng.gen_range(0..=2) {
                t = Term::app("f", vec![t]);
            }
            t
        })
        .collect();
    let extra = if terms.is_empty() {
        rng.gen_range(1..=2)
    } else {
        rng.gen_range(0..=1)
    };
    for _ in 0..extra {
        terms.push(random_term(rng, vars, 2));
    }
    terms.shuffle(rng);
    TermTuple::new(terms)
}

/// A program over `p`, `q`, `r` (random arities 0 to 2) with one to four
/// clauses of at most two body atoms and three variables each.
pub fn random_program<R: Rng>(rng: &mut R) -> ProceduralProgram {
    let preds: Vec<(Sym, usize)> = ["p", "q", "r"]
        .iter()
        .map(|p| (Sym::new(p), rng.gen_range(0..=2)))
        .collect();
    let vars: Vec<Var> = CLAUSE_VARS.iter().map(|v| Var::new(v)).collect();
    let atom = |rng: &mut R| {
        let (s, n) = preds.choose(rng).expect("non-empty").clone();
        Call::new(
            s,
            TermTuple::new((0..n).map(|_| random_term(rng, &vars, 1)).collect()),
        )
    };
    let n = rng.gen_range(1..=4);
    let mut clauses = BTreeSet::new();
    for _ in 0..n {
        let head = atom(rng);
        let body: Body = (0..rng.gen_range(0..=2)).map(|_| atom(rng)).collect();
        clauses.insert(HornClause::new(head, body));
    }
    to_procedural(&ClausalSentence::new(clauses)).expect("generated program is arity-consistent")
}

/// Each procedure of `p` gets a random subset of `Herb_d^n` (each tuple kept
/// with probability 0.3).
pub fn random_interpretation<R: Rng>(
    rng: &mut R,
    p: &ProceduralProgram,
    u: &Universe,
) -> RelationalInterpretation {
    let mut out = RelationalInterpretation::default();
    for (s, proc) in p.procedures() {
        let mut rel = IntRelation::empty(proc.arity());
        let mut rows: Vec<Vec<Term>> = vec![Vec::new()];
        for _ in 0..proc.arity() {
            rows = rows
                .into_iter()
                .flat_map(|row| {
                    u.ground_terms()
                        .iter()
                        .map(move |t| [row.clone(), vec![t.clone()]].concat())
                })
                .collect();
        }
        for row in rows {
            if rng.gen_bool(0.3) {
                rel.insert_unchecked(TermTuple::new(row));
            }
        }
        out.set(s.clone(), rel);
    }
    out
}

// ---------------------------------------------------------------------------
// Shrinking and description

fn shrink_table(t: &Table) -> Vec<Table> {
    t.tuples()
        .iter()
        .map(|drop| {
            Table::new(
                t.index().clone(),
                t.tuples().iter().filter(|x| *x != drop).cloned(),
            )
            .expect("subset of a table")
        })
        .collect()
}

fn shrink_tables(ts: &[Table]) -> Vec<Vec<Table>> {
    let mut out = Vec::new();
    for (i, t) in ts.iter().enumerate() {
        for smaller in shrink_table(t) {
            let mut v = ts.to_vec();
            v[i] = smaller;
            out.push(v);
        }
    }
    out
}

fn shrink_relation(r: &IntRelation) -> Vec<IntRelation> {
    r.tuples()
        .iter()
        .map(|drop| {
            IntRelation::new(r.order(), r.tuples().iter().filter(|x| *x != drop).cloned())
                .expect("subset")
        })
        .collect()
}

fn shrink_program(p: &ProceduralProgram) -> Vec<ProceduralProgram> {
    let s = to_clausal(p);
    let mut out = Vec::new();
    for c in s.clauses() {
        let fewer: BTreeSet<HornClause> = s.clauses().iter().filter(|x| *x != c).cloned().collect();
        out.push(fewer.clone());
        for atom in c.body.calls() {
            let body: Body = c
                .body
                .calls()
                .iter()
                .filter(|x| *x != atom)
                .cloned()
                .collect();
            let mut v = fewer.clone();
            v.insert(HornClause::new(c.head.clone(), body));
            out.push(v);
        }
    }
    out.into_iter()
        .filter_map(|clauses| to_procedural(&ClausalSentence::new(clauses)).ok())
        .map(|mut q| {
            // keep every original symbol so interpretations still cover Pred
            for (sym, proc) in p.procedures() {
                let _ = q.declare(sym.clone(), proc.arity());
            }
            q
        })
        .collect()
}

fn shrink_interpretation(i: &RelationalInterpretation) -> Vec<RelationalInterpretation> {
    let mut out = Vec::new();
    for (s, r) in i.relations() {
        for smaller in shrink_relation(r) {
            let mut j = i.clone();
            j.set(s.clone(), smaller);
            out.push(j);
        }
    }
    out
}

fn describe_table(t: &Table) -> String {
    let vars: Vec<&str> = t.index().iter().map(Var::name).collect();
    let mut out = format!(
        "table on {{{}}} with {} tuple(s)\n",
        vars.join(","),
        t.len()
    );
    if t.is_empty() {
        out.push_str("  (null table)\n");
    }
    for line in t.render_records().lines() {
        let _ = writeln!(out, "  [{line}]");
    }
    out
}

fn describe_program(p: &ProceduralProgram) -> String {
    let mut out = String::from("program:\n");
    for line in to_clausal(p).to_string().lines() {
        let _ = writeln!(out, "  {line}");
    }
    let called_only: Vec<String> = p
        .procedures()
        .iter()
        .filter(|(_, pr)| pr.is_empty())
        .map(|(s, pr)| format!("{s}/{}", pr.arity()))
        .collect();
    if !called_only.is_empty() {
        let _ = writeln!(out, "  (no clauses: {})", called_only.join(", "));
    }
    out
}

fn describe_interpretation(i: &RelationalInterpretation) -> String {
    let mut out = String::from("interpretation:\n");
    for line in i.dump().lines() {
        let _ = writeln!(out, "  {line}");
    }
    out
}

fn minimize<C: Clone>(
    case: C,
    check: &dyn Fn(&C) -> Verdict,
    shrink: &dyn Fn(&C) -> Vec<C>,
) -> (C, String) {
    let mut current = case;
    let mut reason = match check(&current) {
        Verdict::Fail(r) => r,
        _ => unreachable!("minimize is only called on failing cases"),
    };
    'outer: loop {
        for candidate in shrink(&current) {
            if let Verdict::Fail(r) = check(&candidate) {
                current = candidate;
                reason = r;
                continue 'outer;
            }
        }
        return (current, reason);
    }
}

// ---------------------------------------------------------------------------
// The suite

/// The law suite, parameterized by the product it checks so that a faulty
/// product can be injected in tests.
#[derive(Clone, Copy)]
pub struct LawSuite {
    pub product: ProductFn,
}

impl Default for LawSuite {
    fn default() -> Self {
        LawSuite {
            product: crate::table::product,
        }
    }
}

type Shrinker<'a, C> = Box<dyn Fn(&C) -> Vec<C> + 'a>;

struct Law<'a, C> {
    name: &'static str,
    generate: Box<dyn FnMut(&mut ChaCha8Rng) -> C + 'a>,
    check: Box<dyn Fn(&C) -> Verdict + 'a>,
    shrink: Shrinker<'a, C>,
    describe: Box<dyn Fn(&C) -> String + 'a>,
}

fn stream(seed: u64, name: &str) -> ChaCha8Rng {
    // FNV-1a of the law name, mixed into the seed
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

fn run<C: Clone>(law: Law<'_, C>, seed: u64, cases: usize) -> LawOutcome {
    let mut rng = stream(seed, law.name);
    let mut generate = law.generate;
    let mut outcome = LawOutcome {
        name: law.name,
        cases,
        passed: 0,
        skipped: 0,
        failed: 0,
        counterexample: None,
    };
    for _ in 0..cases {
        let case = generate(&mut rng);
        match (law.check)(&case) {
            Verdict::Pass => outcome.passed += 1,
            Verdict::Skip => outcome.skipped += 1,
            Verdict::Fail(_) => {
                outcome.failed += 1;
                if outcome.counterexample.is_none() {
                    let (small, reason) = minimize(case, &*law.check, &*law.shrink);
                    outcome.counterexample = Some(format!("{}{}", (law.describe)(&small), reason));
                }
            }
        }
    }
    outcome
}

fn expect(holds: bool, reason: impl FnOnce() -> String) -> Verdict {
    if holds {
        Verdict::Pass
    } else {
        Verdict::Fail(reason())
    }
}

fn describe_tables(ts: &[Table]) -> String {
    ts.iter()
        .enumerate()
        .map(|(i, t)| format!("t{i}: {}", describe_table(t)))
        .collect()
}

impl LawSuite {
    pub fn new(product: ProductFn) -> Self {
        LawSuite { product }
    }

    /// Runs every law and returns one outcome per law, in a fixed order.
    pub fn run_all(&self, config: &LawConfig) -> Vec<LawOutcome> {
        let mut out = self.run_table_laws(config);
        out.extend(self.run_semantic_laws(config));
        out
    }

    /// Product laws, projection/filtering inverse laws, and the cylinder
    /// laws.
    pub fn run_table_laws(&self, config: &LawConfig) -> Vec<LawOutcome> {
        let u = law_universe(config.depth);
        let (seed, k) = (config.seed, config.cases);
        vec![
            self.commutativity(seed, k),
            self.associativity(&u, seed, k),
            self.bottom_absorbing(seed, k),
            self.top_unit(seed, k),
            self.self_product_equivalence(&u, seed, k),
            run(inverse_counterexample(&u), seed, 1),
            self.exact_inverse(&u, seed, k),
            run(inclusion(&u), seed, k),
            run(distinct_variables(&u), seed, k),
            self.tab_cyl(&u, seed, k),
            run(cylinder_lemma(&u), seed, k),
        ]
    }

    /// The one-step and fixpoint agreement with `T_P`, and renaming
    /// invariance.
    pub fn run_semantic_laws(&self, config: &LawConfig) -> Vec<LawOutcome> {
        let u = law_universe(config.depth);
        let (seed, k) = (config.seed, config.cases);
        vec![
            run(one_step_law(&u), seed, k),
            run(fixpoint_law(&u), seed, k),
            run(renaming(&u), seed, k),
        ]
    }

    fn commutativity(&self, seed: u64, cases: usize) -> LawOutcome {
        let product = self.product;
        run(
            Law {
                name: "product-commutative",
                generate: Box::new(|rng| vec![random_table(rng), random_table(rng)]),
                check: Box::new(move |ts: &Vec<Table>| {
                    let (ab, ba) = (product(&ts[0], &ts[1]), product(&ts[1], &ts[0]));
                    expect(ab == ba, || format!("t0*t1 = {ab:?}\nt1*t0 = {ba:?}\n"))
                }),
                shrink: Box::new(|ts| shrink_tables(ts)),
                describe: Box::new(|ts| describe_tables(ts)),
            },
            seed,
            cases,
        )
    }

    fn associativity(&self, u: &Universe, seed: u64, cases: usize) -> LawOutcome {
        let product = self.product;
        let u = u.clone();
        run(
            Law {
                name: "product-associative",
                generate: Box::new(|rng| {
                    vec![random_table(rng), random_table(rng), random_table(rng)]
                }),
                check: Box::new(move |ts: &Vec<Table>| {
                    let left = product(&product(&ts[0], &ts[1]), &ts[2]);
                    let right = product(&ts[0], &product(&ts[1], &ts[2]));
                    if left != right {
                        return Verdict::Fail(format!(
                            "(t0*t1)*t2 = {left:?}\nt0*(t1*t2) = {right:?}\n"
                        ));
                    }
                    expect(tables_equivalent(&left, &right, &u), || {
                        "groundings differ\n".to_string()
                    })
                }),
                shrink: Box::new(|ts| shrink_tables(ts)),
                describe: Box::new(|ts| describe_tables(ts)),
            },
            seed,
            cases,
        )
    }

    fn bottom_absorbing(&self, seed: u64, cases: usize) -> LawOutcome {
        let product = self.product;
        run(
            Law {
                name: "bottom-absorbing",
                generate: Box::new(|rng| {
                    let vars = random_subset(rng, &TABLE_VARS, 2);
                    vec![random_table(rng), Table::bottom(vars.into_iter().collect())]
                }),
                check: Box::new(move |ts: &Vec<Table>| {
                    let (l, r) = (product(&ts[1], &ts[0]), product(&ts[0], &ts[1]));
                    expect(l.is_bottom() && r.is_bottom(), || {
                        format!("⊥*t = {l:?}\nt*⊥ = {r:?}\n")
                    })
                }),
                shrink: Box::new(|ts| shrink_tables(ts)),
                describe: Box::new(|ts| describe_tables(ts)),
            },
            seed,
            cases,
        )
    }

    fn top_unit(&self, seed: u64, cases: usize) -> LawOutcome {
        let product = self.product;
        run(
            Law {
                name: "top-unit",
                generate: Box::new(|rng| vec![random_table(rng)]),
                check: Box::new(move |ts: &Vec<Table>| {
                    let (l, r) = (
                        product(&Table::top(), &ts[0]),
                        product(&ts[0], &Table::top()),
                    );
                    expect(l == ts[0] && r == ts[0], || {
                        format!("⊤*t = {l:?}\nt*⊤ = {r:?}\n")
                    })
                }),
                shrink: Box::new(|ts| shrink_tables(ts)),
                describe: Box::new(|ts| describe_tables(ts)),
            },
            seed,
            cases,
        )
    }

    fn self_product_equivalence(&self, u: &Universe, seed: u64, cases: usize) -> LawOutcome {
        let product = self.product;
        let u = u.clone();
        run(
            Law {
                name: "self-product-equivalent",
                generate: Box::new(|rng| vec![random_table(rng)]),
                check: Box::new(move |ts: &Vec<Table>| {
                    let tt = product(&ts[0], &ts[0]);
                    expect(tables_equivalent(&tt, &ts[0], &u), || {
                        format!("t*t = {tt:?}\n")
                    })
                }),
                shrink: Box::new(|ts| shrink_tables(ts)),
                describe: Box::new(|ts| describe_tables(ts)),
            },
            seed,
            cases,
        )
    }

    fn exact_inverse(&self, u: &Universe, seed: u64, cases: usize) -> LawOutcome {
        let u = u.clone();
        run(
            Law {
                name: "filter-after-project-equivalent",
                generate: Box::new(|rng| {
                    let t = random_table(rng);
                    let vars: Vec<Var> = t.index().iter().cloned().collect();
                    let params = covering_tuple(rng, &vars);
                    (t, params)
                }),
                check: Box::new(move |(t, params): &(Table, TermTuple)| {
                    // clipping in the projection loses tuples that filtering
                    // cannot recover; such instances are outside the law
                    let clipped = ground_table(t, &u)
                        .tuples()
                        .iter()
                        .any(|row| params.substitute(row).max_depth() > u.depth());
                    if clipped {
                        return Verdict::Skip;
                    }
                    let rel = project(params, t, &u);
                    let back = filter(&rel, params).expect("same order");
                    expect(tables_equivalent(&back, t, &u), || {
                        format!("params {params}\nprojection:\n{rel}filtered back: {back:?}\n")
                    })
                }),
                shrink: Box::new(|(t, p)| {
                    shrink_table(t)
                        .into_iter()
                        .map(|s| (s, p.clone()))
                        .collect()
                }),
                describe: Box::new(|(t, p)| format!("{}params: {p}\n", describe_table(t))),
            },
            seed,
            cases,
        )
    }

    fn tab_cyl(&self, u: &Universe, seed: u64, cases: usize) -> LawOutcome {
        let product = self.product;
        let u = u.clone();
        run(
            Law {
                name: "product-is-cylinder-intersection",
                generate: Box::new(|rng| vec![random_table(rng), random_table(rng)]),
                check: Box::new(move |ts: &Vec<Table>| {
                    let both: BTreeSet<Var> = ts[0].index().union(ts[1].index()).cloned().collect();
                    let mut big = both.clone();
                    big.insert(Var::new("V"));
                    let lhs = ground_table(&product(&ts[0], &ts[1]), &u);
                    let c0 = rel_cylinder(&ground_table(&ts[0], &u), &big, &u).expect("subset");
                    let c1 = rel_cylinder(&ground_table(&ts[1], &u), &big, &u).expect("subset");
                    let rhs = rel_project(&c0.intersect(&c1).expect("same index"), &both)
                        .expect("subset");
                    expect(lhs == rhs, || {
                        format!("Γ(t0*t1) = {lhs:?}\ncylinder side = {rhs:?}\n")
                    })
                }),
                shrink: Box::new(|ts| shrink_tables(ts)),
                describe: Box::new(|ts| describe_tables(ts)),
            },
            seed,
            cases,
        )
    }
}

fn inverse_counterexample(u: &Universe) -> Law<'static, ()> {
    let u = u.clone();
    Law {
        name: "ground-params-counterexample",
        generate: Box::new(|_| ()),
        check: Box::new(move |_| {
            let cd = TermTuple::new(vec![Term::constant("c"), Term::constant("d")]);
            let ab = IntRelation::new(
                2,
                [TermTuple::new(vec![
                    Term::constant("a"),
                    Term::constant("b"),
                ])],
            )
            .expect("ground");
            let r = project(&cd, &filter(&ab, &cd).expect("same order"), &u);
            expect(r.is_empty(), || {
                format!("(c,d)/({{(a,b)}}:(c,d)) = {r:?}\n")
            })
        }),
        shrink: Box::new(|_| Vec::new()),
        describe: Box::new(|_| String::new()),
    }
}

fn inclusion(u: &Universe) -> Law<'static, (IntRelation, TermTuple)> {
    let (u, g) = (u.clone(), u.clone());
    Law {
        name: "project-after-filter-included",
        generate: Box::new(move |rng| {
            let order = rng.gen_range(0..=3);
            let r = random_relation(rng, &g, order);
            let vars = random_subset(rng, &CLAUSE_VARS, 3);
            (r, random_tuple(rng, &vars, order))
        }),
        check: Box::new(move |(r, t)| {
            let back = project(t, &filter(r, t).expect("same order"), &u);
            expect(back.is_subset(r), || format!("t/(r:t) = {back:?}\n"))
        }),
        shrink: Box::new(|(r, t)| {
            shrink_relation(r)
                .into_iter()
                .map(|s| (s, t.clone()))
                .collect()
        }),
        describe: Box::new(|(r, t)| format!("r:\n{r}t: {t}\n")),
    }
}

fn distinct_variables(u: &Universe) -> Law<'static, IntRelation> {
    let (u, g) = (u.clone(), u.clone());
    Law {
        name: "project-after-filter-distinct-vars",
        generate: Box::new(move |rng| {
            let order = rng.gen_range(0..=3);
            random_relation(rng, &g, order)
        }),
        check: Box::new(move |r| {
            let xs = TermTuple::new(
                (0..r.order())
                    .map(|i| Term::var(&format!("X{i}")))
                    .collect(),
            );
            let back = project(&xs, &filter(r, &xs).expect("same order"), &u);
            expect(&back == r, || format!("x/(r:x) = {back:?}\n"))
        }),
        shrink: Box::new(shrink_relation),
        describe: Box::new(|r| format!("r:\n{r}")),
    }
}

fn cylinder_lemma(u: &Universe) -> Law<'static, Vec<Table>> {
    let u = u.clone();
    Law {
        name: "table-cylinder-grounding",
        generate: Box::new(|rng| vec![random_table(rng)]),
        check: Box::new(move |ts| {
            let mut big = ts[0].index().clone();
            big.insert(Var::new("V"));
            big.insert(Var::new("X"));
            let lhs = ground_table(&cylinder_table(&ts[0], &big).expect("subset"), &u);
            let rhs = rel_cylinder(&ground_table(&ts[0], &u), &big, &u).expect("subset");
            expect(lhs == rhs, || {
                format!("Γ(π⁻¹ t) = {lhs:?}\nπ⁻¹(Γ t) = {rhs:?}\n")
            })
        }),
        shrink: Box::new(|ts| shrink_tables(ts)),
        describe: Box::new(|ts| describe_tables(ts)),
    }
}

type ProgramCase = (ProceduralProgram, RelationalInterpretation);

fn one_step_law(u: &Universe) -> Law<'static, ProgramCase> {
    let (u, g) = (u.clone(), u.clone());
    Law {
        name: "one-step-agrees-with-tp",
        generate: Box::new(move |rng| {
            let p = random_program(rng);
            let i = random_interpretation(rng, &p, &g);
            (p, i)
        }),
        check: Box::new(move |(p, i)| {
            let m = match eval_program(&EvalContext::new(p, i, &u)) {
                Ok(m) => relational_to_herbrand(&m),
                Err(e) => return Verdict::Fail(format!("evaluation failed: {e}\n")),
            };
            let t = tp_step(&to_clausal(p), &relational_to_herbrand(i), &u);
            expect(m == t, || herbrand_diff("M_I(P)", &m, "T_P(I)", &t))
        }),
        shrink: Box::new(|(p, i)| {
            let mut out: Vec<ProgramCase> = shrink_program(p)
                .into_iter()
                .map(|q| (q, i.clone()))
                .collect();
            out.extend(shrink_interpretation(i).into_iter().map(|j| (p.clone(), j)));
            out
        }),
        describe: Box::new(|(p, i)| {
            format!("{}{}", describe_program(p), describe_interpretation(i))
        }),
    }
}

fn herbrand_diff(
    ln: &str,
    l: &HerbrandInterpretation,
    rn: &str,
    r: &HerbrandInterpretation,
) -> String {
    let only_l: Vec<String> = l
        .atoms()
        .difference(r.atoms())
        .map(|a| a.to_string())
        .collect();
    let only_r: Vec<String> = r
        .atoms()
        .difference(l.atoms())
        .map(|a| a.to_string())
        .collect();
    format!(
        "only in {ln}: {}\nonly in {rn}: {}\n",
        only_l.join(" "),
        only_r.join(" ")
    )
}

fn fixpoint_law(u: &Universe) -> Law<'static, ProceduralProgram> {
    let u = u.clone();
    Law {
        name: "fixpoint-agrees-with-lfp-tp",
        generate: Box::new(random_program),
        check: Box::new(move |p| {
            let m = match lfp_m(p, &u, LAW_MAX_ITERS) {
                Ok(m) => m,
                Err(e) => return Verdict::Fail(format!("evaluation failed: {e}\n")),
            };
            let t = lfp_t(
                &to_clausal(p),
                &u,
                LAW_MAX_ITERS,
                &HerbrandInterpretation::new(),
            );
            if !m.converged || !t.converged {
                return Verdict::Fail(format!(
                    "no convergence (M: {}, T: {})\n",
                    m.converged, t.converged
                ));
            }
            let image = relational_to_herbrand(&m.result);
            if image != t.result {
                return Verdict::Fail(herbrand_diff("lfp M", &image, "lfp T", &t.result));
            }
            let back = herbrand_to_relational(&t.result, &crate::syntax::infer_signature(p));
            expect(back.as_ref() == Ok(&m.result), || {
                "correspondence is not a bijection here\n".to_string()
            })
        }),
        shrink: Box::new(shrink_program),
        describe: Box::new(describe_program),
    }
}

type RenamingCase = (ProceduralProgram, BTreeMap<Sym, Sym>);

fn renaming(u: &Universe) -> Law<'static, RenamingCase> {
    let u = u.clone();
    Law {
        name: "renaming-invariance",
        generate: Box::new(|rng| {
            let p = random_program(rng);
            let symbols: Vec<Sym> = p.symbols().cloned().collect();
            let mut targets: Vec<Sym> = symbols.clone();
            targets.extend(["s", "t", "u"].map(Sym::new));
            targets.shuffle(rng);
            let rho = symbols.into_iter().zip(targets).collect();
            (p, rho)
        }),
        check: Box::new(move |(p, rho)| {
            let renamed = match rename_predicates(p, rho) {
                Ok(q) => q,
                Err(e) => return Verdict::Fail(format!("renaming rejected: {e}\n")),
            };
            let (a, b) = match (
                lfp_m(p, &u, LAW_MAX_ITERS),
                lfp_m(&renamed, &u, LAW_MAX_ITERS),
            ) {
                (Ok(a), Ok(b)) => (a, b),
                _ => return Verdict::Fail("evaluation failed\n".into()),
            };
            for (q, rel) in a.result.relations() {
                if b.result.get(&rho[q]) != Some(rel) {
                    return Verdict::Fail(format!(
                        "meaning of {q} differs from meaning of {}\n",
                        rho[q]
                    ));
                }
            }
            expect(
                a.result.relations().len() == b.result.relations().len(),
                || "symbol sets differ\n".into(),
            )
        }),
        shrink: Box::new(|_| Vec::new()),
        describe: Box::new(|(p, rho)| {
            let pairs: Vec<String> = rho.iter().map(|(k, v)| format!("{k}->{v}")).collect();
            format!("{}renaming: {}\n", describe_program(p), pairs.join(" "))
        }),
    }
}
