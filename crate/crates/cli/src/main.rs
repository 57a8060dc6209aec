//! `evlogic`: evidence spaces, weights of evidence, model checking,
//! satisfiability and proof checking from the command line.
//!
//! Exit status: 0 for an affirmative answer, 1 for a negative one, 2 for
//! invalid input or an evaluation error, 64 for a usage error.

mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use evlogic::evidence::{
    check_weight_table, combine, reconstruct, Realizability, Rejection, WitnessVector,
};
use evlogic::io::{
    proof_lines, to_json, DistributionDoc, ProofDoc, SpaceDoc, StructureDoc, TableDoc, VerdictDoc,
    WorldDoc,
};
use evlogic::proofcheck::check_proof_text;
use evlogic::scalar::{decimal_expansion, format_rational};
use evlogic::semantics::{SemanticsError, Valuation};
use evlogic::solver::{decide_sat_with, SolverConfig};
use evlogic::{classify, ProofVerdict, Rational, Signature, Validity, Verdict, World};

use input::{Input, InputError};

const USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "evlogic", version, about = "Reason about weights of evidence")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    /// Also print a decimal approximation with this many digits (human
    /// format only).
    #[arg(long, value_name = "DIGITS", global = true)]
    decimal: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Measure {
    /// Normalized likelihood of the hypothesis set.
    Weight,
    /// Best likelihood in the set over the best overall.
    Shafer,
    /// log2 of the likelihood ratio against the other hypothesis.
    Loglik,
}

#[derive(clap::Args)]
struct FormulaArg {
    /// Formula text.
    #[arg(required_unless_present = "file", conflicts_with = "file")]
    formula: Option<String>,
    /// Read the formula from a file instead.
    #[arg(long, short = 'f')]
    file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the canonical form and the language class of a formula.
    Parse {
        /// `NxM` or a signature JSON file.
        #[arg(long)]
        sig: String,
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Weight of evidence an observation lends a hypothesis formula.
    Weight {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        ob: String,
        /// Hypothesis formula, e.g. `fair` or `h1 | h2`.
        #[arg(long)]
        hyp: String,
        #[arg(long, value_enum, default_value_t = Measure::Weight)]
        measure: Measure,
    },
    /// Dempster combination of two distribution files.
    Combine { first: PathBuf, second: PathBuf },
    /// Posterior after an observation.
    Posterior {
        #[arg(long)]
        space: PathBuf,
        /// Comma-separated prior masses in hypothesis order.
        #[arg(
            long,
            required_unless_present = "prior_file",
            conflicts_with = "prior_file"
        )]
        prior: Option<String>,
        /// Prior distribution file.
        #[arg(long)]
        prior_file: Option<PathBuf>,
        #[arg(long)]
        ob: String,
    },
    /// Decide whether a weight table comes from some evidence space.
    WfCheck { table: PathBuf },
    /// Build an evidence space with the given weight table.
    Reconstruct {
        table: PathBuf,
        /// Comma-separated witness; computed when omitted.
        #[arg(long)]
        witness: Option<String>,
    },
    /// Check that a formula holds at every world of a structure.
    Check {
        #[arg(long)]
        structure: PathBuf,
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Evaluate a term at one world of a structure.
    Eval {
        #[arg(long)]
        structure: PathBuf,
        /// `hypothesis,observation[,prior index]`.
        #[arg(long)]
        world: String,
        term: String,
    },
    /// Decide satisfiability of a quantifier-free linear formula.
    Sat {
        #[arg(long)]
        sig: String,
        /// Robustness of an unsatisfiability verdict.
        #[arg(long, default_value = "1/1000000")]
        delta: String,
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Check a proof file.
    ProveCheck {
        #[arg(long)]
        sig: String,
        proof: PathBuf,
    },
}

/// What to print and the exit status.
struct Report {
    human: String,
    json: Value,
    code: u8,
}

impl Report {
    fn new(code: u8, human: impl Into<String>, json: Value) -> Self {
        Report {
            human: human.into(),
            json,
            code,
        }
    }
}

struct Ctx {
    decimal: Option<usize>,
}

impl Ctx {
    fn q(&self, q: &Rational) -> String {
        match self.decimal {
            Some(d) => format!("{} (~{})", format_rational(q), decimal_expansion(q, d)),
            None => format_rational(q),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let ctx = Ctx {
        decimal: cli.decimal,
    };
    match run(&cli.command, &ctx) {
        Ok(report) => {
            match cli.format {
                Format::Human => println!("{}", report.human),
                Format::Json => print!("{}", to_json(&report.json)),
            }
            ExitCode::from(report.code)
        }
        Err(InputError(msg)) => {
            match cli.format {
                Format::Human => eprintln!("error: {msg}"),
                Format::Json => print!("{}", to_json(&json!({ "error": msg }))),
            }
            ExitCode::from(2)
        }
    }
}

fn q(v: &Rational) -> Value {
    Value::String(format_rational(v))
}

fn run(cmd: &Command, ctx: &Ctx) -> Input<Report> {
    match cmd {
        Command::Parse { sig, formula } => {
            let sig = input::signature(sig)?;
            let f = input::formula(&input::text(&formula.formula, &formula.file)?, &sig)?;
            let class = classify(&f);
            Ok(Report::new(
                0,
                format!("{f}\n{class}"),
                json!({ "formula": f.to_string(), "language": class.name() }),
            ))
        }
        Command::Weight {
            space,
            ob,
            hyp,
            measure,
        } => weight(ctx, space, ob, hyp, *measure),
        Command::Combine { first, second } => {
            let a: DistributionDoc = input::document(first)?;
            let b: DistributionDoc = input::document(second)?;
            let names = a.hypotheses.clone();
            let a = a.into_distribution(&names)?;
            let b = b.into_distribution(&names)?;
            let d = combine(&a, &b)?;
            Ok(distribution_report(ctx, &names, &d))
        }
        Command::Posterior {
            space,
            prior,
            prior_file,
            ob,
        } => {
            let space = input::document::<SpaceDoc>(space)?.into_space()?;
            let names = space.signature().hypotheses().to_vec();
            let prior = match (prior, prior_file) {
                (Some(p), _) => input::distribution(p)?,
                (None, Some(path)) => {
                    input::document::<DistributionDoc>(path)?.into_distribution(&names)?
                }
                (None, None) => return Err(InputError("no prior given".into())),
            };
            let o = input::observation(space.signature(), ob)?;
            let d = space.posterior(&prior, o)?;
            Ok(distribution_report(ctx, &names, &d))
        }
        Command::WfCheck { table } => {
            let table = input::document::<TableDoc>(table)?.into_table()?;
            Ok(match check_weight_table(&table) {
                Realizability::Realizable(w) => {
                    let xs: Vec<String> = w.x.iter().map(|x| ctx.q(x)).collect();
                    Report::new(
                        0,
                        format!("realizable\nwitness: {}", xs.join(" ")),
                        json!({
                            "realizable": true,
                            "witness": w.x.iter().map(q).collect::<Vec<_>>(),
                        }),
                    )
                }
                Realizability::NotRealizable(r) => {
                    let mut j = json!({ "realizable": false, "reason": r.to_string() });
                    if let Rejection::NoPositiveSolution { certificate } = &r {
                        j["certificate"] = certificate.iter().map(q).collect();
                    }
                    Report::new(1, format!("not realizable\nreason: {r}"), j)
                }
            })
        }
        Command::Reconstruct { table, witness } => {
            let table = input::document::<TableDoc>(table)?.into_table()?;
            let witness = match witness {
                Some(text) => WitnessVector {
                    x: input::rationals(text)?,
                },
                None => match check_weight_table(&table) {
                    Realizability::Realizable(w) => w,
                    Realizability::NotRealizable(r) => {
                        return Ok(Report::new(
                            1,
                            format!("not realizable\nreason: {r}"),
                            json!({ "realizable": false, "reason": r.to_string() }),
                        ))
                    }
                },
            };
            let space = reconstruct(&table, &witness)?;
            let doc = SpaceDoc::from_space(&space);
            let value = serde_json::to_value(&doc).expect("documents serialize");
            Ok(Report::new(0, to_json(&doc).trim_end(), value))
        }
        Command::Check { structure, formula } => {
            let m = input::document::<StructureDoc>(structure)?.into_structure()?;
            let f = input::formula(
                &input::text(&formula.formula, &formula.file)?,
                m.signature(),
            )?;
            let sig = m.signature();
            Ok(match m.valid_in(&f)? {
                Validity::Valid => Report::new(0, "valid", json!({ "valid": true })),
                Validity::Refuted(w) => Report::new(
                    1,
                    format!("not valid\nfails at {}", world_text(sig, w)),
                    json!({ "valid": false, "world": WorldDoc::new(sig, w) }),
                ),
                Validity::Undefined(w) => Report::new(
                    2,
                    format!("undefined\nposterior undefined at {}", world_text(sig, w)),
                    json!({ "valid": null, "undefined_at": WorldDoc::new(sig, w) }),
                ),
            })
        }
        Command::Eval {
            structure,
            world,
            term,
        } => {
            let m = input::document::<StructureDoc>(structure)?.into_structure()?;
            let sig = m.signature();
            let parts: Vec<&str> = world.split(',').map(str::trim).collect();
            let (h, o, k) = match parts.as_slice() {
                [h, o] => (*h, *o, "0"),
                [h, o, k] => (*h, *o, *k),
                _ => return Err(InputError("--world takes h,ob[,prior]".into())),
            };
            let w = World {
                h: input::hypothesis(sig, h)?,
                ob: input::observation(sig, o)?,
                prior: k
                    .parse()
                    .map_err(|_| InputError(format!("bad prior index {k:?}")))?,
            };
            if w.prior >= m.priors().len() {
                return Err(InputError(format!("no prior with index {}", w.prior)));
            }
            if !m.states().contains(&(w.h, w.ob)) {
                return Err(InputError(format!(
                    "({h}, {o}) is not a state of the structure"
                )));
            }
            let t = input::term(term, sig)?;
            match m.eval_term(w, &Valuation::new(), &t) {
                Ok(v) => Ok(Report::new(0, ctx.q(&v), json!({ "value": q(&v) }))),
                Err(e @ SemanticsError::UndefinedPosterior(_)) => Err(InputError(e.to_string())),
                Err(e) => Err(e.into()),
            }
        }
        Command::Sat {
            sig,
            delta,
            formula,
        } => {
            let sig = input::signature(sig)?;
            let delta = input::rational(delta)?;
            let f = input::formula(&input::text(&formula.formula, &formula.file)?, &sig)?;
            let v = decide_sat_with(&f, &sig, &SolverConfig::with_delta(delta.clone()))?;
            let doc = serde_json::to_value(VerdictDoc::new(&v, &delta)).expect("serializes");
            Ok(match &v {
                Verdict::Sat(m) => {
                    let s = m.space.signature();
                    let mut lines = vec![
                        "SAT".to_string(),
                        format!("world: {}", world_text(s, m.world())),
                    ];
                    let prior: Vec<String> = m.prior.masses().iter().map(|x| ctx.q(x)).collect();
                    lines.push(format!("prior: {}", prior.join(" ")));
                    for (h, row) in s.hypotheses().iter().zip(m.space.likelihoods()) {
                        let row: Vec<String> = row.iter().map(|x| ctx.q(x)).collect();
                        lines.push(format!("likelihood {h}: {}", row.join(" ")));
                    }
                    Report::new(0, lines.join("\n"), doc)
                }
                Verdict::Unsat(d) => {
                    Report::new(1, format!("UNSAT(δ={})", format_rational(d)), doc)
                }
                Verdict::Undecided(d) => {
                    Report::new(2, format!("UNDECIDED(δ={})", format_rational(d)), doc)
                }
            })
        }
        Command::ProveCheck { sig, proof } => {
            let sig = input::signature(sig)?;
            let doc: ProofDoc = input::document(proof)?;
            let lines = proof_lines(&doc)?;
            let verdict = check_proof_text(&lines, &sig);
            Ok(match &verdict {
                ProofVerdict::Accepted => Report::new(0, "accepted", json!({ "accepted": true })),
                ProofVerdict::Rejected { line, reason } => Report::new(
                    1,
                    verdict.to_string(),
                    json!({ "accepted": false, "line": line, "reason": reason }),
                ),
            })
        }
    }
}

fn weight(ctx: &Ctx, space: &PathBuf, ob: &str, hyp: &str, measure: Measure) -> Input<Report> {
    let space = input::document::<SpaceDoc>(space)?.into_space()?;
    let sig = space.signature();
    let o = input::observation(sig, ob)?;
    match measure {
        Measure::Weight | Measure::Shafer => {
            let set = input::hyp(hyp, sig)?.denote(sig)?;
            let v = if measure == Measure::Weight {
                space.weight(o, &set)
            } else {
                space.shafer_weight(o, &set)?
            };
            Ok(Report::new(0, ctx.q(&v), json!({ "value": q(&v) })))
        }
        Measure::Loglik => {
            let h = input::hypothesis(sig, hyp.trim())?;
            let l = space.log_likelihood(o, h)?;
            let j = match &l {
                evlogic::LogLikelihood::Finite(r) => json!({ "log2_of": q(r) }),
                evlogic::LogLikelihood::PosInfinity => json!({ "value": "+inf" }),
                evlogic::LogLikelihood::NegInfinity => json!({ "value": "-inf" }),
            };
            Ok(Report::new(0, l.to_string(), j))
        }
    }
}

fn distribution_report(
    ctx: &Ctx,
    names: &[String],
    d: &evlogic::evidence::Distribution<Rational>,
) -> Report {
    let human: Vec<String> = names
        .iter()
        .zip(d.masses())
        .map(|(n, m)| format!("{n}: {}", ctx.q(m)))
        .collect();
    let doc = DistributionDoc::new(names, d);
    Report::new(
        0,
        human.join("\n"),
        serde_json::to_value(doc).expect("documents serialize"),
    )
}

fn world_text(sig: &Signature, w: World) -> String {
    format!(
        "({}, {}, prior {})",
        sig.hypotheses()[w.h],
        sig.observations()[w.ob],
        w.prior
    )
}
