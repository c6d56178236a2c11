//! Command-line front end. [`run`] is the whole program minus process exit,
//! so it can be driven from tests with in-memory streams.
//!
//! Exit codes: 0 ok, 1 property failure, 2 usage or parse error, 3 resource
//! cap, 4 inconsistent theory.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::axioms::{self, HarnessConfig};
use crate::complex::MAX_KUHN_DIM;
use crate::formula::{parse, Formula};
use crate::linearize::{linearizing_triangulation, restrict_to_theory, LinearizeError, DEFAULT_BLOWUP_CAP};
use crate::numeric::{format_rational, parse_point};
use crate::valuation::{
    evaluate_with, Method, MethodChoice, Options, ValuationError, AUTO_BOTH_MAX_HATS, DEFAULT_REDUCTION_CAP,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_INCONSISTENT: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "mveuler", version, about = "Euler characteristic of elements of finitely presented MV-algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a formula at a rational point.
    Eval(EvalArgs),
    /// Compute E(φ), optionally modulo a theory θ.
    Chi(ChiArgs),
    /// Check E(0)=0, E(hat)=1, idempotency, additivity and method agreement on random formulas.
    CheckAxioms(AxiomArgs),
    /// Print the linearizing triangulation of one or more formulas as JSON.
    EmitTriangulation(EmitArgs),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Formula text, or @path to read it from a file.
    pub formula: String,
    /// Comma-separated exact fractions, e.g. 3/4,1/2.
    #[arg(long, allow_hyphen_values = true)]
    pub at: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Geometric,
    Recursive,
    Both,
    /// Both up to the hat threshold, geometric beyond.
    Auto,
}

#[derive(Debug, Args)]
pub struct Caps {
    /// Maximum number of blow-ups per refinement.
    #[arg(long, default_value_t = DEFAULT_BLOWUP_CAP)]
    pub cap_blowups: usize,
    /// Maximum number of basis reductions in the recursive method.
    #[arg(long, default_value_t = DEFAULT_REDUCTION_CAP)]
    pub cap_reductions: usize,
}

impl Caps {
    fn options(&self) -> Options {
        Options { blowup_cap: self.cap_blowups, reduction_cap: self.cap_reductions, ..Options::default() }
    }
}

#[derive(Debug, Args)]
pub struct ChiArgs {
    /// Formula text, or @path.
    pub formula: String,
    /// Theory θ; E is computed on oneset(θ).
    #[arg(long)]
    pub theory: Option<String>,
    /// Ambient dimension; defaults to the largest variable index.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    /// Hat count up to which `auto` runs both methods.
    #[arg(long, default_value_t = AUTO_BOTH_MAX_HATS)]
    pub auto_threshold: usize,
    /// Write the basis-reduction traces of the recursive method (JSON array).
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Write the triangulation of P carrying φ (JSON).
    #[arg(long)]
    pub emit_triangulation: Option<PathBuf>,
    #[command(flatten)]
    pub caps: Caps,
}

#[derive(Debug, Args)]
pub struct AxiomArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..=MAX_KUHN_DIM as u64))]
    pub vars: u64,
    /// Maximum AST depth of generated formulas.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    pub depth: u64,
    /// Maximum AST size of generated formulas.
    #[arg(long, default_value_t = 25, value_parser = clap::value_parser!(u64).range(1..))]
    pub size: u64,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub caps: Caps,
}

#[derive(Debug, Args)]
pub struct EmitArgs {
    /// Formulas to linearize jointly (text or @path).
    #[arg(required = true)]
    pub formulas: Vec<String>,
    /// Also linearize θ and emit only the triangulation of oneset(θ).
    #[arg(long)]
    pub theory: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_BLOWUP_CAP)]
    pub cap_blowups: usize,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<ValuationError> for Failure {
    fn from(e: ValuationError) -> Self {
        let code = if e.is_resource_cap() {
            EXIT_RESOURCE
        } else {
            match &e {
                ValuationError::Linearize(LinearizeError::DimensionTooSmall { .. }) => EXIT_USAGE,
                ValuationError::InconsistentTheory { .. } => EXIT_INCONSISTENT,
                _ => EXIT_PROPERTY,
            }
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<LinearizeError> for Failure {
    fn from(e: LinearizeError) -> Self {
        ValuationError::from(e).into()
    }
}

/// Runs the program on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let help = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let text = e.render().to_string();
            let _ = if help { write!(out, "{text}") } else { write!(err, "{text}") };
            return if help { EXIT_OK } else { EXIT_USAGE };
        }
    };
    let result = match cli.command {
        Command::Eval(a) => cmd_eval(&a, out),
        Command::Chi(a) => cmd_chi(&a, out),
        Command::CheckAxioms(a) => cmd_check_axioms(&a, out, err),
        Command::EmitTriangulation(a) => cmd_emit(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read_formula(arg: &str) -> Result<Formula, Failure> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {path}: {e}")))?,
        None => arg.to_string(),
    };
    parse(text.trim()).map_err(|e| Failure::usage(format!("{e} in {:?}", text.trim())))
}

fn ambient_dim(dim: Option<usize>, fs: &[&Formula]) -> Result<usize, Failure> {
    let needed = fs.iter().map(|f| f.max_var()).max().unwrap_or(0);
    let d = dim.unwrap_or(needed.max(1));
    if d < needed {
        return Err(Failure::usage(format!("--dim {d} is smaller than the largest variable index x{needed}")));
    }
    if d == 0 || d > MAX_KUHN_DIM {
        return Err(Failure::usage(format!("dimension must lie in 1..={MAX_KUHN_DIM}, got {d}")));
    }
    Ok(d)
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    writeln!(out, "{text}").map_err(|e| Failure { code: EXIT_USAGE, message: e.to_string() })
}

fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    std::fs::write(path, text + "\n").map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn cmd_eval(a: &EvalArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let f = read_formula(&a.formula)?;
    let p = parse_point(&a.at).map_err(|e| Failure::usage(e.to_string()))?;
    let v = f.evaluate(&p).map_err(|e| Failure::usage(e.to_string()))?;
    writeln!(out, "{}", format_rational(&v)).map_err(|e| Failure::usage(e.to_string()))?;
    Ok(EXIT_OK)
}

fn cmd_chi(a: &ChiArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let phi = read_formula(&a.formula)?;
    let theory = a.theory.as_deref().map(read_formula).transpose()?;
    let mut fs = vec![&phi];
    fs.extend(theory.as_ref());
    let d = ambient_dim(a.dim, &fs)?;
    let choice = match a.method {
        MethodArg::Geometric => MethodChoice::Fixed(Method::Geometric),
        MethodArg::Recursive => MethodChoice::Fixed(Method::Recursive),
        MethodArg::Both => MethodChoice::Fixed(Method::Both),
        MethodArg::Auto => MethodChoice::Auto { max_hats: a.auto_threshold },
    };
    match evaluate_with(&phi, theory.as_ref(), d, choice, &a.caps.options(), a.trace.is_some()) {
        Ok(ev) => {
            if let Some(path) = &a.trace {
                write_json_file(path, &ev.traces)?;
            }
            if let Some(path) = &a.emit_triangulation {
                write_json_file(path, &ev.presentation.rep.triangulation)?;
            }
            write_json(out, &ev.report)?;
            Ok(EXIT_OK)
        }
        Err(ValuationError::InconsistentTheory { report }) => {
            write_json(out, &report)?;
            Err(Failure { code: EXIT_INCONSISTENT, message: "the theory has no models; reporting E = 0".into() })
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_check_axioms(a: &AxiomArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let config = HarnessConfig {
        trials: a.trials as usize,
        vars: a.vars as usize,
        max_depth: a.depth as usize,
        max_size: a.size as usize,
        seed: a.seed,
        options: a.caps.options(),
    };
    let summary = axioms::run(&config);
    write_json(out, &summary)?;
    if let Some(c) = &summary.first_counterexample {
        let _ = writeln!(
            err,
            "property {} failed at trial {} (seed {}): p = {}, q = {}: {}",
            c.property, c.trial, c.seed, c.p, c.q, c.detail
        );
    }
    Ok(if summary.all_passed() { EXIT_OK } else { EXIT_PROPERTY })
}

fn cmd_emit(a: &EmitArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let mut fs = a.formulas.iter().map(|s| read_formula(s)).collect::<Result<Vec<_>, _>>()?;
    let theory = a.theory.as_deref().map(read_formula).transpose()?;
    fs.extend(theory.iter().cloned());
    let d = ambient_dim(a.dim, &fs.iter().collect::<Vec<_>>())?;
    let lin = linearizing_triangulation(&fs, d, a.cap_blowups)?;
    if theory.is_some() {
        match restrict_to_theory(&lin, fs.len() - 1) {
            Ok(r) => write_json(out, &r.polyhedron.triangulation)?,
            Err(LinearizeError::InconsistentTheory) => {
                return Err(Failure { code: EXIT_INCONSISTENT, message: "the theory has no models".into() })
            }
            Err(e) => return Err(e.into()),
        }
    } else {
        write_json(out, &lin.triangulation)?;
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("mveuler").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn eval_examples() {
        assert_eq!(call(&["eval", "x1 + !x1", "--at", "1/3"]).1, "1\n");
        assert_eq!(call(&["eval", "x1 * x2", "--at", "3/4,1/2"]).1, "1/4\n");
        assert_eq!(call(&["eval", "2.x1", "--at", "1/3"]).1, "2/3\n");
    }

    #[test]
    fn eval_rejects_decimals_and_bad_points() {
        assert_eq!(call(&["eval", "x1", "--at", "0.5"]).0, EXIT_USAGE);
        assert_eq!(call(&["eval", "x1", "--at", "3/2"]).0, EXIT_USAGE);
        assert_eq!(call(&["eval", "x2", "--at", "1/2"]).0, EXIT_USAGE);
        assert_eq!(call(&["eval", "x1 +", "--at", "1/2"]).0, EXIT_USAGE);
    }

    #[test]
    fn chi_reports() {
        let (code, out, _) = call(&["chi", "(x1*x1)|!(x1+x1)", "--method", "both"]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["E"], 2);
        assert_eq!(v["method"], "both");
        let (code, out, _) = call(&["chi", "x1", "--theory", "x1|!x1"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(serde_json::from_str::<serde_json::Value>(&out).unwrap()["E"], 1);
    }

    #[test]
    fn chi_exit_codes() {
        let (code, out, _) = call(&["chi", "x1", "--theory", "x1 * !x1"]);
        assert_eq!(code, EXIT_INCONSISTENT);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["E"], 0);
        assert_eq!(v["flags"][0], "inconsistent_theory");
        assert_eq!(call(&["chi", "x2", "--dim", "1"]).0, EXIT_USAGE);
        assert_eq!(call(&["chi", "x1", "--dim", "9"]).0, EXIT_USAGE);
        assert_eq!(call(&["chi", "x1 & !x1 | x1", "--cap-blowups", "0"]).0, EXIT_RESOURCE);
        assert_eq!(call(&["chi", "(x1*x1)|!(x1+x1)", "--method", "recursive", "--cap-reductions", "0"]).0, EXIT_RESOURCE);
        assert_eq!(call(&["chi", "x1", "--method", "fast"]).0, EXIT_USAGE);
    }

    #[test]
    fn harness_usage() {
        assert_eq!(call(&["check-axioms", "--trials", "0", "--seed", "1"]).0, EXIT_USAGE);
        assert_eq!(call(&["check-axioms", "--trials", "1"]).0, EXIT_USAGE);
        let (code, out, _) = call(&["check-axioms", "--trials", "1", "--vars", "1", "--depth", "1", "--seed", "7"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(serde_json::from_str::<serde_json::Value>(&out).unwrap()["failed"], 0);
    }

    #[test]
    fn help_is_not_an_error() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("check-axioms"));
        assert_eq!(call(&[]).0, EXIT_USAGE);
    }

    #[test]
    fn emit_triangulation_json() {
        let (code, out, _) = call(&["emit-triangulation", "(x1*x1)|!(x1+x1)"]);
        assert_eq!(code, EXIT_OK);
        let t: crate::Triangulation = serde_json::from_str(&out).unwrap();
        assert_eq!(t.simplices().len(), 2);
        let (code, out, _) = call(&["emit-triangulation", "x1", "--theory", "x1|!x1"]);
        assert_eq!(code, EXIT_OK);
        let t: crate::Triangulation = serde_json::from_str(&out).unwrap();
        assert_eq!(t.num_vertices(), 2);
    }
}
