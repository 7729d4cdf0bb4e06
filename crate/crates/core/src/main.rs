use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tabsem::cli::{self, CliError, Format, Output, RunConfig};
use tabsem::laws::LawConfig;

#[derive(Parser)]
#[command(
    name = "tabsem",
    version,
    about = "Table semantics for pure Prolog programs"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ProgramArgs {
    /// Program source file.
    file: PathBuf,
    /// Depth bound of the Herbrand universe (changes the semantics).
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Give up after this many iterations.
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
    /// Bind an undefined procedure to a relation file: SYMBOL=FILE.
    #[arg(long = "extern", value_name = "SYMBOL=FILE", value_parser = cli::parse_extern)]
    externs: Vec<(tabsem::Sym, PathBuf)>,
    /// Add a term symbol to the signature: NAME (constant) or NAME/ARITY.
    #[arg(long = "symbol", value_name = "NAME[/ARITY]")]
    symbols: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Pretty)]
    format: Format,
}

impl From<ProgramArgs> for RunConfig {
    fn from(a: ProgramArgs) -> Self {
        RunConfig {
            program: a.file,
            depth: a.depth,
            max_iters: a.max_iters,
            externs: a.externs,
            symbols: a.symbols,
            format: a.format,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the least fixpoint and print every relation.
    Fixpoint(ProgramArgs),
    /// Answer a goal against the least fixpoint.
    Query {
        #[command(flatten)]
        program: ProgramArgs,
        /// Goal, e.g. "app(X, Y, [a])".
        goal: String,
    },
    /// Check the algebraic and semantic laws on random instances.
    CheckLaws {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        cases: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Replay the worked example of a single clause evaluation.
    Example,
}

fn emit(out: Output) -> ExitCode {
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(out.code as u8)
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            // clap uses 2 for usage errors, which here means "not converged"
            return ExitCode::from(if e.use_stderr() {
                cli::EXIT_USAGE as u8
            } else {
                0
            });
        }
    };
    let result = match args.command {
        Command::Fixpoint(p) => cli::cmd_fixpoint(&p.into()),
        Command::Query { program, goal } => cli::cmd_query(&program.into(), &goal),
        Command::CheckLaws { seed, cases, depth } => {
            Ok(cli::cmd_check_laws(&LawConfig { seed, cases, depth }))
        }
        Command::Example => Ok(cli::cmd_example()),
    };
    match result {
        Ok(out) => emit(out),
        Err(e) => fail(e),
    }
}
