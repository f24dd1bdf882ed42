use std::io::Read;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use livehole::dynamics::{EvalError, Outcome};
use livehole::engine::{self, Diagnostic, FragmentError, Options, Program, RunError, Severity};
use livehole::service;
use livehole::surface::{print_hole_ctx, print_int, print_ty};
use livehole::syntax::HoleName;

const STATIC_ERROR: u8 = 1;
const FUEL_EXHAUSTED: u8 = 2;
const INVARIANT: u8 = 3;
const OVERFLOW: u8 = 4;

#[derive(Parser)]
#[command(name = "livehole", version, about = "Typed holes with live evaluation")]
struct Cli {
    /// Treat free variables as empty holes named after them.
    #[arg(long, global = true)]
    free_vars_as_holes: bool,
    /// Step budget for evaluation.
    #[arg(long, global = true, default_value_t = engine::DEFAULT_FUEL)]
    fuel: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the type of a program.
    Check { file: PathBuf },
    /// Print the elaborated program and its hole context.
    Elaborate { file: PathBuf },
    /// Evaluate a program.
    Eval {
        file: PathBuf,
        /// Print every step with the rule applied.
        #[arg(long)]
        trace: bool,
    },
    /// Evaluate a program, fill a hole in the result and resume.
    Fill {
        file: PathBuf,
        #[arg(long)]
        hole: String,
        /// Source text of the filler.
        #[arg(long = "with")]
        with: String,
        /// Also run the filled program from scratch and compare.
        #[arg(long)]
        verify: bool,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, env = "PORT", default_value_t = 8080)]
        port: u16,
    },
}

struct Failure(u8, String);

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Eval(EvalError::Overflow(_)) => Failure(OVERFLOW, e.to_string()),
            e => Failure(INVARIANT, e.to_string()),
        }
    }
}

fn read_source(file: &PathBuf) -> Result<String, Failure> {
    let mut src = String::new();
    let res = if file.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut src).map(|_| ())
    } else {
        std::fs::read_to_string(file).map(|s| src = s)
    };
    res.map_err(|e| Failure(STATIC_ERROR, format!("{}: {e}", file.display())))?;
    Ok(src)
}

fn report(diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("{d}");
    }
}

fn load(file: &PathBuf, opts: &Options) -> Result<Program, Failure> {
    let src = read_source(file)?;
    match engine::load(&src, opts) {
        Ok(p) => {
            report(&p.warnings);
            Ok(p)
        }
        Err(diags) => {
            report(&diags);
            let n = diags.iter().filter(|d| d.severity == Severity::Error).count();
            Err(Failure(STATIC_ERROR, format!("{n} error(s)")))
        }
    }
}

fn outcome_code(outcome: Outcome) -> Result<(), Failure> {
    match outcome {
        Outcome::FuelExhausted => Err(Failure(FUEL_EXHAUSTED, "fuel exhausted".into())),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let opts = Options { free_vars_as_holes: cli.free_vars_as_holes };
    match cli.command {
        Command::Check { file } => {
            let p = load(&file, &opts)?;
            println!("{}", print_ty(&p.elab.ty));
            Ok(())
        }
        Command::Elaborate { file } => {
            let p = load(&file, &opts)?;
            println!("{}", print_int(&p.elab.expr));
            print!("{}", print_hole_ctx(&p.elab.holes));
            Ok(())
        }
        Command::Eval { file, trace } => {
            let p = load(&file, &opts)?;
            let ev = if trace {
                let (ev, steps) = engine::evaluate_traced(&p.elab, cli.fuel)?;
                for (i, (rule, d)) in steps.iter().enumerate() {
                    println!("[{}] {rule}: {}", i + 1, print_int(d));
                }
                ev
            } else {
                engine::evaluate(&p.elab, cli.fuel)?
            };
            println!("{}", print_int(&ev.run.expr));
            println!("outcome: {} ({} steps)", ev.run.outcome, ev.run.steps);
            outcome_code(ev.run.outcome)
        }
        Command::Fill { file, hole, with, verify } => {
            let p = load(&file, &opts)?;
            let ev = engine::evaluate(&p.elab, cli.fuel)?;
            let u = HoleName::new(hole);
            let filled = engine::fill_fragment(&p, &ev.run.expr, &u, &with, cli.fuel, &opts).map_err(|e| match e {
                FragmentError::Run(e) => e.into(),
                e => Failure(STATIC_ERROR, e.to_string()),
            })?;
            let run = &filled.evaluation.run;
            println!("{}", print_int(&run.expr));
            println!("outcome: {} ({} catch-up steps)", run.outcome, run.steps);
            println!("program: {}", filled.program.source);
            if verify {
                let v = engine::verify(&filled.program.elab, run, cli.fuel)?;
                if v.violated() {
                    return Err(Failure(INVARIANT, format!("verify: fresh run gives {}", print_int(&v.fresh.expr))));
                }
                match v.agree {
                    Some(true) => println!("verify: agrees with a fresh run ({} steps)", v.fresh.steps),
                    Some(false) => println!("verify: fresh run gives {}", print_int(&v.fresh.expr)),
                    None => println!("verify: skipped, fuel exhausted"),
                }
            }
            outcome_code(run.outcome)
        }
        Command::Serve { port } => {
            let config = service::Config { fuel: cli.fuel, options: opts, ..Default::default() };
            let addr = SocketAddr::from(([127, 0, 0, 1], port));
            let rt = tokio::runtime::Runtime::new().map_err(|e| Failure(INVARIANT, e.to_string()))?;
            rt.block_on(service::serve(addr, config)).map_err(|e| Failure(INVARIANT, e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
