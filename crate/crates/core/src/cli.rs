//! The command implementations behind the `tabsem` binary.
//!
//! Each command returns its full standard output together with the exit
//! code, so the binary only prints and exits. Errors carry exit code 1.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::laws::{render_summary, LawConfig, LawSuite};
use crate::relation::{IntRelation, RelationalInterpretation};
use crate::semantics::{lfp_m_with, query, EvalError, FixpointReport};
use crate::syntax::{
    parse_goal, parse_program_linted, parse_relation, parse_term, to_procedural, Body, ParseError,
    ProceduralProgram, ProgramError,
};
use crate::table::{filter, product, project, Table};
use crate::term::{Signature, SignatureError, Sym, Term, TermTuple};
use crate::universe::{Universe, UniverseError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_LAW_VIOLATION: i32 = 3;

/// Columns per block in the transposed layout; wider relations are split
/// into several blocks.
const COLUMNS_PER_BLOCK: usize = 8;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{0}")]
    Program(#[from] ProgramError),
    #[error("{0}")]
    Signature(#[from] SignatureError),
    #[error("{0}")]
    Universe(#[from] UniverseError),
    #[error("{0}")]
    Eval(#[from] EvalError),
    #[error("bad extern binding `{0}`: expected SYMBOL=FILE")]
    ExternSyntax(String),
    #[error("extern `{0}` has clauses in the program")]
    ExternDefined(Sym),
    #[error("extern `{symbol}`: tuple {tuple} is outside the universe of depth {depth}")]
    ExternOutside {
        symbol: Sym,
        tuple: TermTuple,
        depth: usize,
    },
    #[error("bad symbol `{0}`: expected NAME or NAME/ARITY")]
    SymbolSyntax(String),
    #[error("--max-iters must be at least 1")]
    ZeroIterations,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_USAGE
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// One row per variable (or argument position), one column per tuple.
    #[default]
    Pretty,
    /// One tuple per line.
    Records,
}

/// Settings shared by the program-evaluating commands.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub program: PathBuf,
    pub depth: usize,
    pub max_iters: usize,
    /// `(symbol, file)` pairs binding undefined procedures to fixed
    /// relations.
    pub externs: Vec<(Sym, PathBuf)>,
    /// Extra term symbols (`NAME` or `NAME/ARITY`) added to the signature.
    pub symbols: Vec<String>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(program: impl Into<PathBuf>) -> Self {
        RunConfig {
            program: program.into(),
            depth: 2,
            max_iters: 1000,
            externs: Vec::new(),
            symbols: Vec::new(),
            format: Format::Pretty,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses `SYMBOL=FILE`.
pub fn parse_extern(s: &str) -> Result<(Sym, PathBuf), CliError> {
    match s.split_once('=') {
        Some((sym, file)) if !sym.is_empty() && !file.is_empty() => {
            Ok((Sym::new(sym.trim()), PathBuf::from(file)))
        }
        _ => Err(CliError::ExternSyntax(s.to_string())),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

struct Loaded {
    program: ProceduralProgram,
    externs: RelationalInterpretation,
    universe: Universe,
    lints: Vec<String>,
}

fn add_symbols(sig: &mut Signature, t: &Term) -> Result<(), SignatureError> {
    let mut result = Ok(());
    t.for_each_symbol(&mut |s, n| {
        if result.is_ok() {
            result = sig.add_term_symbol(s.clone(), n);
        }
    });
    result
}

fn load(config: &RunConfig, goal: Option<&Body>) -> Result<Loaded, CliError> {
    if config.max_iters == 0 {
        return Err(CliError::ZeroIterations);
    }
    let path = config.program.display().to_string();
    let (sentence, lints) =
        parse_program_linted(&read(&config.program)?).map_err(|source| CliError::Parse {
            path: path.clone(),
            source,
        })?;
    let mut program = to_procedural(&sentence)?;

    let mut externs = RelationalInterpretation::default();
    for (symbol, file) in &config.externs {
        if program.get(symbol).is_some_and(|p| !p.is_empty()) {
            return Err(CliError::ExternDefined(symbol.clone()));
        }
        let rel = parse_relation(&read(file)?, program.arity(symbol)).map_err(|source| {
            CliError::Parse {
                path: file.display().to_string(),
                source,
            }
        })?;
        program.declare(symbol.clone(), rel.order())?;
        externs.set(symbol.clone(), rel);
    }

    let mut sig = crate::syntax::infer_signature(&program);
    for rel in externs.relations().values() {
        for t in rel.tuples() {
            for term in t.terms() {
                add_symbols(&mut sig, term)?;
            }
        }
    }
    if let Some(goal) = goal {
        for call in goal.calls() {
            for term in call.args.terms() {
                add_symbols(&mut sig, term)?;
            }
        }
    }
    for s in &config.symbols {
        let (name, arity) = match s.split_once('/') {
            Some((name, n)) => (
                name,
                n.parse().map_err(|_| CliError::SymbolSyntax(s.clone()))?,
            ),
            None => (s.as_str(), 0),
        };
        if name.is_empty() {
            return Err(CliError::SymbolSyntax(s.clone()));
        }
        sig.add_term_symbol(Sym::new(name), arity)?;
    }
    let universe = Universe::new(sig, config.depth)?;
    for (symbol, rel) in externs.relations() {
        if let Some(t) = rel.tuples().iter().find(|t| !universe.contains_tuple(t)) {
            return Err(CliError::ExternOutside {
                symbol: symbol.clone(),
                tuple: t.clone(),
                depth: config.depth,
            });
        }
    }
    Ok(Loaded {
        program,
        externs,
        universe,
        lints: lints.iter().map(|l| format!("{path}:{l}")).collect(),
    })
}

fn header(out: &mut String, command: &str, config: &RunConfig, u: &Universe) {
    let _ = writeln!(out, "command: {command}");
    let _ = writeln!(out, "program: {}", config.program.display());
    let _ = writeln!(out, "depth: {}", config.depth);
    let _ = writeln!(out, "max-iters: {}", config.max_iters);
    let _ = writeln!(out, "universe: {} ground terms", u.ground_terms().len());
}

fn report_header(out: &mut String, report: &FixpointReport) {
    let _ = writeln!(out, "converged: {}", report.converged);
    let _ = writeln!(out, "iterations: {}", report.iterations);
    let sizes: Vec<String> = report.sizes.iter().map(usize::to_string).collect();
    let _ = writeln!(out, "sizes: {}", sizes.join(" "));
}

/// The transposed layout, split into blocks of at most
/// [`COLUMNS_PER_BLOCK`] tuples separated by blank lines.
pub fn render_relation_pretty(r: &IntRelation) -> String {
    if r.is_empty() {
        return "(empty)\n".to_string();
    }
    if r.order() == 0 {
        return "()\n".to_string();
    }
    let tuples: Vec<&TermTuple> = r.tuples().iter().collect();
    let blocks: Vec<String> = tuples
        .chunks(COLUMNS_PER_BLOCK)
        .map(|chunk| {
            IntRelation::new(r.order(), chunk.iter().map(|t| (*t).clone()))
                .expect("subset")
                .render_transposed()
        })
        .collect();
    blocks.join("\n")
}

pub fn render_table_pretty(t: &Table) -> String {
    let tuples: Vec<_> = t.tuples().iter().collect();
    let blocks: Vec<String> = tuples
        .chunks(COLUMNS_PER_BLOCK)
        .map(|chunk| {
            Table::new(t.index().clone(), chunk.iter().map(|x| (*x).clone()))
                .expect("subset")
                .render_transposed()
        })
        .collect();
    blocks.join("\n")
}

fn render_interpretation(i: &RelationalInterpretation, format: Format) -> String {
    match format {
        Format::Records => i.dump(),
        Format::Pretty => {
            let mut out = String::new();
            for (symbol, rel) in i.relations() {
                let _ = writeln!(out, "{symbol}/{}: {} tuple(s)", rel.order(), rel.len());
                out.push_str(&render_relation_pretty(rel));
            }
            out
        }
    }
}

/// Computes the least fixpoint of the program and prints every relation.
pub fn cmd_fixpoint(config: &RunConfig) -> Result<Output, CliError> {
    let loaded = load(config, None)?;
    let report = lfp_m_with(
        &loaded.program,
        &loaded.universe,
        config.max_iters,
        &loaded.externs,
    )?;
    let mut out = String::new();
    header(&mut out, "fixpoint", config, &loaded.universe);
    report_header(&mut out, &report);
    out.push('\n');
    out.push_str(&render_interpretation(&report.result, config.format));
    let code = if report.converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    };
    Ok(Output {
        stdout: out,
        stderr: lints(&loaded.lints),
        code,
    })
}

fn lints(lints: &[String]) -> String {
    lints.iter().map(|l| format!("warning: {l}\n")).collect()
}

/// Answers a goal against the least fixpoint: `no` for the null table,
/// `yes` for the unit table, the answer table otherwise.
pub fn cmd_query(config: &RunConfig, goal_text: &str) -> Result<Output, CliError> {
    let goal = parse_goal(goal_text).map_err(|source| CliError::Parse {
        path: "goal".into(),
        source,
    })?;
    let loaded = load(config, Some(&goal))?;
    let answer = query(
        &loaded.program,
        &goal,
        &loaded.universe,
        config.max_iters,
        &loaded.externs,
    )?;
    let mut out = String::new();
    header(&mut out, "query", config, &loaded.universe);
    let calls: Vec<String> = goal.calls().iter().map(|c| c.to_string()).collect();
    let _ = writeln!(out, "goal: {}", calls.join(", "));
    report_header(&mut out, &answer.report);
    let t = &answer.answers;
    let _ = writeln!(out, "answers: {}", t.len());
    out.push('\n');
    if t.is_bottom() {
        out.push_str("no\n");
    } else if t.is_top() {
        out.push_str("yes\n");
    } else {
        match config.format {
            Format::Pretty => out.push_str(&render_table_pretty(t)),
            Format::Records => out.push_str(&t.render_records()),
        }
    }
    let code = if answer.report.converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    };
    Ok(Output {
        stdout: out,
        stderr: lints(&loaded.lints),
        code,
    })
}

/// Runs the randomized law suite.
pub fn cmd_check_laws(config: &LawConfig) -> Output {
    let outcomes = LawSuite::default().run_all(config);
    let code = if outcomes.iter().all(|o| o.ok()) {
        EXIT_OK
    } else {
        EXIT_LAW_VIOLATION
    };
    Output {
        stdout: format!("command: check-laws\n{}", render_summary(config, &outcomes)),
        stderr: String::new(),
        code,
    }
}

/// The artifacts of the worked example, as computed.
#[derive(Clone, Debug)]
pub struct WorkedExample {
    pub meaning_of_p: IntRelation,
    pub first_filter: Table,
    pub second_filter: Table,
    pub product: Table,
    pub projection: IntRelation,
}

/// Evaluates the body of `q(f(Y), Z) :- p(X, f(Y)), p(f(X), Z)` against the
/// relation `{(a,f(b)), (f(a),b), (f(a),f(b)), (f(b),f(a))}` for `p`.
pub fn worked_example() -> WorkedExample {
    let t = |s: &str| parse_term(s).expect("well-formed term");
    let tuple = |xs: &[&str]| TermTuple::new(xs.iter().map(|x| t(x)).collect());
    let meaning_of_p = IntRelation::new(
        2,
        [
            ["a", "f(b)"],
            ["f(a)", "b"],
            ["f(a)", "f(b)"],
            ["f(b)", "f(a)"],
        ]
        .iter()
        .map(|r| tuple(r)),
    )
    .expect("ground");
    let mut sig = Signature::new();
    sig.add_constant("a").expect("fresh");
    sig.add_constant("b").expect("fresh");
    sig.add_function("f", 1).expect("fresh");
    let u = Universe::new(sig, 2).expect("has constants");
    let first_filter = filter(&meaning_of_p, &tuple(&["X", "f(Y)"])).expect("order 2");
    let second_filter = filter(&meaning_of_p, &tuple(&["f(X)", "Z"])).expect("order 2");
    let prod = product(&first_filter, &second_filter);
    let projection = project(&tuple(&["f(Y)", "Z"]), &prod, &u);
    WorkedExample {
        meaning_of_p,
        first_filter,
        second_filter,
        product: prod,
        projection,
    }
}

/// Prints the worked example in the transposed layout.
pub fn cmd_example() -> Output {
    let ex = worked_example();
    let mut out = String::new();
    out.push_str("command: example\ndepth: 2\nclause: q(f(Y), Z) :- p(X, f(Y)), p(f(X), Z).\n\n");
    let _ = write!(
        out,
        "meaning of p:\n{}\n",
        ex.meaning_of_p.render_transposed()
    );
    let _ = write!(
        out,
        "filter p(X, f(Y)):\n{}\n",
        ex.first_filter.render_transposed()
    );
    let _ = write!(
        out,
        "filter p(f(X), Z):\n{}\n",
        ex.second_filter.render_transposed()
    );
    let _ = write!(out, "product:\n{}\n", ex.product.render_transposed());
    let _ = write!(
        out,
        "projection on (f(Y), Z):\n{}",
        ex.projection.render_transposed()
    );
    Output {
        stdout: out,
        stderr: String::new(),
        code: EXIT_OK,
    }
}
