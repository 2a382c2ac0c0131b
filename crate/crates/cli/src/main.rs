//! `probsat`: decide, check and explore probabilistic and modal formulas.
//!
//! Exit codes: 0 for SAT / HOLDS / clean fuzz run, 1 for UNSAT / FAILS /
//! mismatches, 2 for any error.

use clap::{Parser, Subcommand, ValueEnum};
use probsat::base::ClassicalBase;
use probsat::fuzz;
use probsat::modald::{d_sat_with, translate};
use probsat::oracle::Profile;
use probsat::parser::{parse_formula, parse_modal, ParseError, ParseErrorKind};
use probsat::plsolver::{solve_pl, MAX_PROPOSITIONS};
use probsat::pplsolver::{tableau_solve_with, TableauOptions};
use probsat::semantics::{holds_kripke, holds_pl, holds_ppl, Model};
use probsat::syntax::{cpnb_generators, enumerate_atoms, Formula, Fragment, ModalFormula};
use std::fmt;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "probsat", version, about = "Satisfiability for probabilistic logics and modal logic D")]
struct Cli {
    /// Log every simplex pivot and solver step to stderr.
    #[arg(long, global = true)]
    debug: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Logic {
    /// Non-iterated probabilistic logic.
    Pl,
    /// Iterated probabilistic logic.
    Ppl,
    /// Modal logic D.
    D,
}

#[derive(Subcommand)]
enum Command {
    /// Decide satisfiability; prints SAT or UNSAT.
    Solve {
        /// Formula file; standard input when omitted.
        input: Option<PathBuf>,
        /// Defaults to the smallest logic the formula belongs to.
        #[arg(long, value_enum)]
        logic: Option<Logic>,
        /// Write the witness model here on SAT.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Write the tableau trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Disable memoization of realizable world paths.
        #[arg(long)]
        no_memo: bool,
    },
    /// Evaluate a formula in a model; prints HOLDS or FAILS.
    Check {
        input: Option<PathBuf>,
        #[arg(long)]
        model: PathBuf,
        /// Defaults to the first world of the model.
        #[arg(long)]
        world: Option<String>,
    },
    /// Rewrite a modal formula with `[]` read as `P>=1`.
    Translate { input: Option<PathBuf> },
    /// Compare the solvers with the reference oracles on random formulas.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, value_parser = ["pl", "ppl", "modal"], default_value = "pl")]
        profile: String,
    },
    /// List the basic generators of a formula and every atom over them.
    Atoms { input: Option<PathBuf> },
}

/// A reported failure; always exit code 2.
struct Failure(String);

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn read_input(path: Option<&Path>) -> Result<String, Failure> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Failure(format!("{}: {e}", p.display())))?,
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    Ok(text.trim_end().to_string())
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

/// The error message followed by the offending line with a caret marker.
fn render(text: &str, e: &ParseError) -> Failure {
    let start = e.span.start.min(text.len());
    let line_start = text[..start].rfind('\n').map_or(0, |i| i + 1);
    let line_end = text[start..].find('\n').map_or(text.len(), |i| start + i);
    let line = &text[line_start..line_end];
    let col = text[line_start..start].chars().count();
    let width = text[start..e.span.end.clamp(start, line_end)].chars().count().max(1);
    Failure(format!("{e}\n  {line}\n  {}{}", " ".repeat(col), "^".repeat(width)))
}

enum Input {
    Prob(Formula),
    Modal(ModalFormula),
}

fn parse_any(text: &str) -> Result<Input, Failure> {
    match parse_formula(text) {
        Ok(f) => Ok(Input::Prob(f)),
        Err(e) if e.kind == ParseErrorKind::ModalOperator => {
            parse_modal(text).map(Input::Modal).map_err(|m| render(text, &m))
        }
        Err(e) => Err(render(text, &e)),
    }
}

fn solve(
    text: &str,
    logic: Option<Logic>,
    model_out: Option<&Path>,
    trace_out: Option<&Path>,
    no_memo: bool,
) -> Result<ExitCode, Failure> {
    let input = match logic {
        Some(Logic::D) => Input::Modal(parse_modal(text).map_err(|e| render(text, &e))?),
        Some(_) => Input::Prob(parse_formula(text).map_err(|e| render(text, &e))?),
        None => parse_any(text)?,
    };
    let logic = logic.unwrap_or(match &input {
        Input::Modal(_) => Logic::D,
        Input::Prob(f) if f.fragment() == Fragment::Ppl => Logic::Ppl,
        Input::Prob(_) => Logic::Pl,
    });
    let options = TableauOptions {
        memoize: !no_memo,
        trace: trace_out.is_some(),
    };
    let (witness, trace) = match (&input, logic) {
        (Input::Prob(f), Logic::Pl) => {
            let verdict = solve_pl(f)?;
            (verdict.witness().map(|w| Model::Pl(w.model.clone())), Vec::new())
        }
        (Input::Prob(f), Logic::Ppl) => {
            let run = tableau_solve_with(f, &ClassicalBase, &options);
            (run.verdict.witness().map(|w| Model::Ppl(w.model.clone())), run.trace)
        }
        (Input::Modal(a), Logic::D) => {
            let (verdict, trace) = d_sat_with(a, &options);
            (verdict.witness().map(|w| Model::Kripke(w.model.clone())), trace)
        }
        _ => unreachable!("the input was parsed for the selected logic"),
    };
    if let Some(path) = trace_out {
        if logic == Logic::Pl {
            eprintln!("warning: the PL solver keeps no tableau trace; pass --logic ppl for one");
        }
        let mut lines = trace.join("\n");
        if !lines.is_empty() {
            lines.push('\n');
        }
        write_file(path, &lines)?;
    }
    match witness {
        Some(model) => {
            if let Some(path) = model_out {
                write_file(path, &format!("{}\n", model.to_json()))?;
            }
            println!("SAT");
            Ok(ExitCode::SUCCESS)
        }
        None => {
            println!("UNSAT");
            Ok(ExitCode::from(1))
        }
    }
}

fn check(text: &str, model_path: &Path, world: Option<&str>) -> Result<ExitCode, Failure> {
    let json = read_input(Some(model_path))?;
    let model = Model::from_json(&json)?;
    let violations = model.validate();
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(|v| format!("  {v}")).collect();
        return Err(Failure(format!("invalid {} model:\n{}", model.kind(), list.join("\n"))));
    }
    let pick = |first: Option<&String>| world.map(str::to_string).or(first.cloned()).unwrap_or_default();
    let holds = match &model {
        Model::Pl(m) => holds_pl(m, &parse_formula(text).map_err(|e| render(text, &e))?)?,
        Model::Ppl(m) => {
            let w = pick(m.worlds.first().map(|w| &w.id));
            holds_ppl(m, &w, &parse_formula(text).map_err(|e| render(text, &e))?)?
        }
        Model::Kripke(m) => {
            let w = pick(m.worlds.first());
            let a = parse_modal(text).map_err(|e| match e.kind {
                ParseErrorKind::ProbOperator => Failure("a Kripke model needs a modal formula".into()),
                _ => render(text, &e),
            })?;
            holds_kripke(m, &w, &a)?
        }
    };
    println!("{}", if holds { "HOLDS" } else { "FAILS" });
    Ok(if holds { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn atoms(text: &str) -> Result<ExitCode, Failure> {
    let generators = match parse_any(text)? {
        Input::Prob(f) => cpnb_generators(&f),
        Input::Modal(a) => cpnb_generators(&translate(&a)),
    };
    if generators.len() > MAX_PROPOSITIONS {
        return Err(Failure(format!(
            "{} generators; listing atoms is limited to {MAX_PROPOSITIONS}",
            generators.len()
        )));
    }
    let names: Vec<String> = generators.iter().map(ToString::to_string).collect();
    println!("generators: {}", names.join(", "));
    for (i, atom) in enumerate_atoms(&generators).iter().enumerate() {
        let f = atom.to_formula().expect("at least one generator");
        println!("a{}: {f}", i + 1);
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Solve {
            input,
            logic,
            model,
            trace,
            no_memo,
        } => solve(
            &read_input(input.as_deref())?,
            logic,
            model.as_deref(),
            trace.as_deref(),
            no_memo,
        ),
        Command::Check { input, model, world } => check(&read_input(input.as_deref())?, &model, world.as_deref()),
        Command::Translate { input } => {
            let text = read_input(input.as_deref())?;
            let a = parse_modal(&text).map_err(|e| render(&text, &e))?;
            println!("{}", translate(&a));
            Ok(ExitCode::SUCCESS)
        }
        Command::Fuzz { seed, count, profile } => {
            let profile: Profile = profile.parse().map_err(Failure)?;
            let report = fuzz::run(&profile, seed, count);
            for m in &report.mismatches {
                println!("MISMATCH seed={} {}: {}", m.seed, m.detail, m.formula);
            }
            println!(
                "{profile}: {} cases, {} sat, {} beyond oracle guards, {} mismatches",
                report.cases,
                report.sat,
                report.skipped,
                report.mismatches.len()
            );
            Ok(if report.is_clean() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Atoms { input } => atoms(&read_input(input.as_deref())?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.debug {
            log::LevelFilter::Trace
        } else {
            log::LevelFilter::Warn
        })
        .init();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
