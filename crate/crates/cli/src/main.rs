use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fotlx::decision::{
    bounded_model_oracle, build_behaviour_graph, check_validity, formula_satisfiability,
    DecisionOptions, OracleBounds, OracleResult,
};
use fotlx::logic::{parse_formula, Formula, Signature};
use fotlx::normal_form::{to_dsnf, TemporalProblem};
use fotlx::protocol::{check_run, simulate, Protocol, Scheduler};
use fotlx::translator::{self, Bookkeeping, Delivery, TranslationOptions, VerificationTask};
use fotlx::Error;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "fotlx",
    version,
    about = "Monodic temporal logic with XOR sets: decision procedure and protocol verification"
)]
struct Cli {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for graph construction.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FormulaInput {
    /// Signature file.
    #[arg(long)]
    sig: PathBuf,
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    formula: Option<String>,
    /// File holding the formula.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Print the clausal normal form of the formula checked.
    #[arg(long)]
    dsnf_dump: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Satisfiability of a formula.
    Sat(FormulaInput),
    /// Validity of a formula.
    Valid(FormulaInput),
    /// Translates a protocol into a temporal problem.
    Translate {
        #[arg(long)]
        protocol: PathBuf,
        #[arg(long)]
        deterministic: bool,
        #[arg(long, default_value = "guaranteed")]
        delivery: Delivery,
        /// `run-faithful` or `as-printed`.
        #[arg(long, default_value = "run-faithful", value_parser = parse_bookkeeping)]
        bookkeeping: Bookkeeping,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulates a protocol and checks the run conditions on the prefix.
    Simulate {
        #[arg(long)]
        protocol: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "fair-random")]
        scheduler: Scheduler,
        #[arg(long, default_value_t = 20)]
        horizon: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decides a verification task.
    Verify {
        #[arg(long)]
        task: PathBuf,
    },
    /// Writes the behaviour graph of a temporal problem.
    Graph {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Bounded search for a lasso model.
    Oracle {
        /// Signature file.
        #[arg(long)]
        sig: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long, default_value_t = 2)]
        max_domain: usize,
        #[arg(long, default_value_t = 3)]
        max_prefix: usize,
        #[arg(long, default_value_t = 3)]
        max_loop: usize,
    },
}

fn parse_bookkeeping(s: &str) -> Result<Bookkeeping, String> {
    match s {
        "run-faithful" => Ok(Bookkeeping::RunFaithful),
        "as-printed" => Ok(Bookkeeping::AsPrinted),
        _ => Err(format!(
            "unknown bookkeeping `{s}`; expected run-faithful or as-printed"
        )),
    }
}

/// Exit status and report of one invocation.
struct Report {
    code: u8,
    text: String,
    json: serde_json::Value,
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidRun(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text)
        .map_err(|e| Error::InvalidRun(format!("cannot write {}: {e}", path.display())))
}

fn load_formula(input: &FormulaInput) -> Result<(Formula, Signature), Error> {
    let sig = Signature::parse(&read(&input.sig)?)?;
    let text = match (&input.formula, &input.file) {
        (Some(f), _) => f.clone(),
        (None, Some(path)) => read(path)?,
        (None, None) => unreachable!("clap requires one of --formula and --file"),
    };
    let f = parse_formula(text.trim(), &sig)?;
    Ok((f, sig))
}

fn undecided(e: Error) -> Result<Report, Error> {
    match e {
        Error::Undecided(why) => Ok(Report {
            code: 3,
            text: format!("UNDECIDED\n{why}\n"),
            json: json!({ "verdict": "undecided", "reason": why }),
        }),
        e => Err(e),
    }
}

fn dsnf_text(
    f: &Formula,
    sig: &Signature,
    on: bool,
) -> Result<(String, Option<TemporalProblem>), Error> {
    if !on {
        return Ok((String::new(), None));
    }
    let p = to_dsnf(f, sig)?;
    Ok((format!("{p}\n"), Some(p)))
}

fn run(cli: &Cli) -> Result<Report, Error> {
    let opts = DecisionOptions {
        jobs: cli.jobs.max(1),
    };
    match &cli.command {
        Command::Sat(input) => {
            let (f, sig) = load_formula(input)?;
            let (mut text, dsnf) = dsnf_text(&f, &sig, input.dsnf_dump)?;
            let v = match formula_satisfiability(&f, &sig, &opts) {
                Ok(v) => v,
                Err(e) => return undecided(e),
            };
            match &v.witness {
                Some(m) => {
                    let _ = write!(text, "SAT\n{m}");
                }
                None => text.push_str("UNSAT\n"),
            }
            Ok(Report {
                code: if v.satisfiable { 0 } else { 1 },
                text,
                json: json!({
                    "verdict": if v.satisfiable { "sat" } else { "unsat" },
                    "witness": v.witness,
                    "dsnf": dsnf,
                }),
            })
        }
        Command::Valid(input) => {
            let (f, sig) = load_formula(input)?;
            let (mut text, dsnf) = dsnf_text(&Formula::not(f.clone()), &sig, input.dsnf_dump)?;
            let v = match check_validity(&f, &sig, &opts) {
                Ok(v) => v,
                Err(e) => return undecided(e),
            };
            match &v.countermodel {
                Some(m) => {
                    let _ = write!(text, "INVALID\ncountermodel:\n{m}");
                }
                None => text.push_str("VALID\n"),
            }
            Ok(Report {
                code: if v.valid { 0 } else { 1 },
                text,
                json: json!({
                    "verdict": if v.valid { "valid" } else { "invalid" },
                    "countermodel": v.countermodel,
                    "dsnf": dsnf,
                }),
            })
        }
        Command::Translate {
            protocol,
            deterministic,
            delivery,
            bookkeeping,
            out,
        } => {
            let p = Protocol::parse(&read(protocol)?)?;
            let topts = TranslationOptions {
                deterministic: *deterministic,
                delivery: *delivery,
                bookkeeping: *bookkeeping,
                extra_axioms: Vec::new(),
            };
            let axioms = translator::axioms(&p, &topts)?;
            let problem = translator::translate(&p, &topts)?;
            write(out, &problem.to_string())?;
            let mut text = String::new();
            for a in &axioms {
                let _ = writeln!(text, "{}: {}", a.label, a.formula);
            }
            let _ = writeln!(
                text,
                "{} axioms; wrote {} universal, {} initial, {} step clauses and {} eventualities to {}",
                axioms.len(),
                problem.universal.len(),
                problem.initial.len(),
                problem.step.len(),
                problem.eventualities.len(),
                out.display()
            );
            let labelled: Vec<_> = axioms
                .iter()
                .map(|a| json!({ "label": a.label, "formula": a.formula.to_string() }))
                .collect();
            Ok(Report {
                code: 0,
                text,
                json: json!({ "axioms": labelled, "problem": problem.to_string(), "out": out }),
            })
        }
        Command::Simulate {
            protocol,
            n,
            scheduler,
            horizon,
            seed,
        } => {
            let p = Protocol::parse(&read(protocol)?)?;
            let r = simulate(&p, *n, *scheduler, *horizon, *seed)?;
            let violations = check_run(&p, &r, None)?;
            let mut text = r.trace();
            for v in &violations {
                if v.unverifiable {
                    let _ = writeln!(text, "note: {}", v.message);
                } else {
                    let _ = writeln!(text, "violation: {v}");
                }
            }
            let clean = violations.iter().all(|v| v.unverifiable);
            Ok(Report {
                code: if clean { 0 } else { 1 },
                text,
                json: json!({ "run": r, "violations": violations }),
            })
        }
        Command::Verify { task } => {
            let base = task.parent().unwrap_or(Path::new("."));
            let t = VerificationTask::parse(&read(task)?, base)?;
            let r = match translator::verify(&t, &opts) {
                Ok(r) => r,
                Err(e) => return undecided(e),
            };
            let mut text = String::from(if r.valid { "VALID\n" } else { "INVALID\n" });
            if let Some((run, start)) = &r.run {
                let _ = write!(
                    text,
                    "countermodel run, looping back to step {}:\n{}",
                    start + 1,
                    run.trace()
                );
            } else if let Some(m) = &r.countermodel {
                let _ = write!(text, "countermodel:\n{m}");
                if let Some(e) = &r.run_error {
                    let _ = writeln!(text, "no run read off the countermodel: {e}");
                }
            }
            Ok(Report {
                code: if r.valid { 0 } else { 1 },
                text,
                json: json!({ "verdict": if r.valid { "valid" } else { "invalid" }, "report": r }),
            })
        }
        Command::Graph { problem, out } => {
            let p = TemporalProblem::parse(&read(problem)?)?;
            let g = build_behaviour_graph(&p, &opts)?;
            write(out, &g.dump())?;
            Ok(Report {
                code: 0,
                text: format!(
                    "{} nodes, {} edges, {} initial; wrote {}\n",
                    g.nodes.len(),
                    g.edges.len(),
                    g.initial.len(),
                    out.display()
                ),
                json: json!({ "graph": g, "out": out }),
            })
        }
        Command::Oracle {
            sig,
            formula,
            max_domain,
            max_prefix,
            max_loop,
        } => {
            let sig = Signature::parse(&read(sig)?)?;
            let f = parse_formula(formula, &sig)?;
            let bounds = OracleBounds {
                max_domain: *max_domain,
                max_prefix: *max_prefix,
                max_loop: *max_loop,
            };
            let r = bounded_model_oracle(&f, &sig, bounds)?;
            Ok(match r {
                OracleResult::Model(m) => Report {
                    code: 0,
                    text: format!("MODEL\n{m}"),
                    json: json!({ "verdict": "model", "model": m }),
                },
                OracleResult::Exhausted => Report {
                    code: 3,
                    text: "EXHAUSTED\nno model within the bounds\n".into(),
                    json: json!({ "verdict": "exhausted", "bounds": bounds }),
                },
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(r) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&r.json).expect("reports serialise")
                );
            } else {
                print!("{}", r.text);
            }
            ExitCode::from(r.code)
        }
        Err(e) => {
            if cli.json {
                println!("{}", json!({ "error": e.to_string() }));
            }
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
