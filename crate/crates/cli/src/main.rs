//! `relift`: command-line front end for lifting, law and bisimulation checks.

mod model;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relift::bisim::{greatest_bisim, kripke_bisim_oracle};
use relift::distlaw::{
    check_distlaw_axioms, law_from_lifting, law_round_trip, lifting_from_law, lifting_round_trip, parse_law, LawAxiom,
};
use relift::lifting::{barr_lift, check_cospan, check_lifting_axioms, parse_lifting, Condition, Counterexample, Verdict};
use relift::verify::{run_suites, Bounds, Suite, DEFAULT_SEED};
use relift::{Coalgebra, FiniteSet, Functor, LawRef, Relation};

use model::{parse_model, Model, ModelDocument};
use report::{CheckJson, Report};

#[derive(Parser, Debug)]
#[command(name = "relift", version, about = "Relation liftings, lax distributive laws and bisimilarity on finite sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the report to this path instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Add wall-clock time to the report (makes it non-deterministic).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Direction {
    ToLaw,
    ToLifting,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Audit a lifting against the five lifting conditions.
    CheckLifting {
        /// One of Id, Const(k), P, N, M.
        #[arg(long)]
        functor: Functor,
        /// Lifting expression, e.g. barr, sim, mtilde, LJ:5, twiddle(sim), meet(LJ:1,LJ:2).
        #[arg(long)]
        lifting: String,
        /// Universe bound (default 3 for P, 2 otherwise).
        #[arg(long)]
        bound: Option<usize>,
        /// Also check the cospan equality.
        #[arg(long)]
        cospan: bool,
        /// Count diagonal and symmetry failures as failures.
        #[arg(long)]
        strict: bool,
    },
    /// Audit the distributive law of a lifting, given as `law(<lifting>)` or `<lifting>`.
    CheckLaw {
        /// One of Id, Const(k), P, N, M.
        #[arg(long)]
        functor: Functor,
        /// Lifting expression, e.g. barr, sim, mtilde, LJ:5, twiddle(sim), meet(LJ:1,LJ:2).
        #[arg(long)]
        lifting: String,
        /// Largest set size audited (default 2 for P and M, 1 for N).
        #[arg(long)]
        bound: Option<usize>,
        /// Count extensionality and symmetry failures as failures.
        #[arg(long)]
        strict: bool,
    },
    /// Convert a lifting to its distributive law or back.
    Convert {
        /// One of Id, Const(k), P, N, M.
        #[arg(long)]
        functor: Functor,
        /// Lifting expression, e.g. barr, sim, mtilde, LJ:5, twiddle(sim), meet(LJ:1,LJ:2).
        #[arg(long)]
        lifting: String,
        /// to-law converts a lifting; to-lifting converts a law(...).
        #[arg(long, value_enum)]
        direction: Direction,
        /// Verify that converting back gives the input.
        #[arg(long)]
        roundtrip: bool,
        /// Largest set size used by the round trip check.
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Greatest bisimulation between one or two coalgebras.
    Bisim {
        /// Lifting expression, e.g. barr, sim, mtilde, LJ:5, twiddle(sim), meet(LJ:1,LJ:2).
        #[arg(long)]
        lifting: String,
        /// Model file; give one for a self-comparison or two.
        #[arg(long, required = true, num_args = 1)]
        model: Vec<PathBuf>,
        /// Functor the models must have.
        #[arg(long)]
        functor: Option<Functor>,
    },
    /// Run verification suites over the registered liftings and laws.
    VerifyTheorems {
        /// Comma-separated list of lattice, cospan, barr-minimal, mtilde-minimal,
        /// lj-classification, distlaw-bijection, transport, bisim, or all.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Override every universe bound.
        #[arg(long)]
        bound: Option<usize>,
        /// Seed for sampled instances.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Compare barr bisimilarity with the Kripke oracle.
    OracleCompare {
        /// Seed for sampled instances.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Number of random instances.
        #[arg(long, default_value_t = 50)]
        count: usize,
        /// Largest number of states per random model.
        #[arg(long, default_value_t = 4)]
        max_states: u32,
        /// Compare two given P-models instead of random ones.
        #[arg(long, num_args = 1)]
        model: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli.command) {
        Ok(mut report) => {
            if cli.timing {
                report.elapsed_ms = Some(start.elapsed().as_millis());
            }
            if let Err(e) = emit(&report, cli.out.as_deref()) {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            ExitCode::from(if report.failed() { 1 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(report: &Report, out: Option<&Path>) -> anyhow::Result<()> {
    let text = report.to_json();
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn default_bound(f: Functor) -> usize {
    Bounds::default().lifting_bound(f)
}

fn default_law_bound(f: Functor) -> usize {
    Bounds::default().law_bound(f)
}

fn parse_law_expr(f: Functor, text: &str) -> relift::Result<LawRef> {
    if text.trim().starts_with("law(") {
        parse_law(f, text)
    } else {
        Ok(law_from_lifting(parse_lifting(f, text)?))
    }
}

fn load_model(path: &Path) -> anyhow::Result<Model> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_model(&text).with_context(|| format!("in {}", path.display()))
}

fn run(command: &Command) -> anyhow::Result<Report> {
    match command {
        Command::CheckLifting { functor, lifting, bound, cospan, strict } => {
            let bound = bound.unwrap_or_else(|| default_bound(*functor));
            let l = parse_lifting(*functor, lifting)?;
            let mut report = Report::new("check-lifting");
            report.arg("functor", functor.to_string());
            report.arg("lifting", l.name());
            report.arg("bound", bound);
            let axioms = check_lifting_axioms(&*l, bound)?;
            for (c, v) in &axioms.verdicts {
                report.checks.push(CheckJson::new(c.name(), v).informational(!strict && !c.is_required()));
            }
            if *cospan {
                let v = if axioms.is_lifting() {
                    check_cospan(&*l, bound)?
                } else {
                    Verdict::Skipped("fails conditions 1-3".into())
                };
                report.checks.push(CheckJson::new("cospan", &v));
            }
            report.result("is_lifting", axioms.is_lifting());
            report.result("failed_conditions", axioms.failed().iter().map(Condition::name).collect::<Vec<_>>());
            report.finish();
            Ok(report)
        }
        Command::CheckLaw { functor, lifting, bound, strict } => {
            let bound = bound.unwrap_or_else(|| default_law_bound(*functor));
            let law = parse_law_expr(*functor, lifting)?;
            let mut report = Report::new("check-law");
            report.arg("functor", functor.to_string());
            report.arg("law", law.name());
            report.arg("bound", bound);
            let axioms = check_distlaw_axioms(&*law, bound)?;
            for (a, v) in &axioms.verdicts {
                report.checks.push(CheckJson::new(a.name(), v).informational(!strict && !a.is_required()));
            }
            report.result("failed_axioms", axioms.failed().iter().map(LawAxiom::name).collect::<Vec<_>>());
            report.finish();
            Ok(report)
        }
        Command::Convert { functor, lifting, direction, roundtrip, bound } => convert(*functor, lifting, *direction, *roundtrip, *bound),
        Command::Bisim { lifting, model, functor } => bisim(lifting, model, *functor),
        Command::VerifyTheorems { suite, bound, seed } => {
            let suites = Suite::parse_list(suite)?;
            let bounds = match bound {
                Some(b) => Bounds::uniform(*b, *seed),
                None => Bounds { seed: *seed, ..Bounds::default() },
            };
            let mut report = Report::new("verify-theorems");
            report.arg("suite", suite.trim());
            report.arg("seed", seed);
            report.arg(
                "bounds",
                serde_json::json!({
                    "P": bounds.powerset,
                    "N/M": bounds.neighbourhood,
                    "N law": bounds.neighbourhood_law,
                }),
            );
            for c in run_suites(&suites, &bounds)? {
                report.checks.push(CheckJson::new(c.name.clone(), &c.verdict).suite(c.suite.name()).informational(c.informational));
            }
            report.finish();
            Ok(report)
        }
        Command::OracleCompare { seed, count, max_states, model } => oracle_compare(*seed, *count, *max_states, model),
    }
}

fn convert(functor: Functor, input: &str, direction: Direction, roundtrip: bool, bound: Option<usize>) -> anyhow::Result<Report> {
    let mut report = Report::new("convert");
    report.arg("functor", functor.to_string());
    report.arg("input", input.trim());
    report.arg("direction", match direction {
        Direction::ToLaw => "to-law",
        Direction::ToLifting => "to-lifting",
    });
    match direction {
        Direction::ToLaw => {
            let bound = bound.unwrap_or_else(|| default_law_bound(functor));
            report.arg("bound", bound);
            let l = parse_lifting(functor, input)?;
            let law = law_from_lifting(l.clone());
            report.result("output", law.name());
            let mut components = Vec::new();
            for n in 0..=bound as u32 {
                let z = FiniteSet::atoms(n);
                components.push(serde_json::json!({ "Z": z.to_string(), "relation": law.component_relation(&z)?.to_string() }));
            }
            report.result("components", components);
            if roundtrip {
                let v = Verdict::from_option(lifting_round_trip(&l, bound)?);
                report.checks.push(CheckJson::new("lifting of the law equals the input", &v));
            }
        }
        Direction::ToLifting => {
            let bound = bound.unwrap_or_else(|| default_bound(functor));
            report.arg("bound", bound);
            let law = parse_law_expr(functor, input)?;
            let l = lifting_from_law(law.clone());
            report.result("output", l.name());
            let mut samples = Vec::new();
            for n in 0..=bound.min(2) as u32 {
                let x = FiniteSet::atoms(n);
                for (what, r) in [("diagonal", relift::relation::diagonal(&x)), ("full", Relation::full(x.clone(), x.clone()))] {
                    samples.push(serde_json::json!({ "X": x.to_string(), "R": what, "lift": l.lift(&r)?.to_string() }));
                }
            }
            report.result("samples", samples);
            if roundtrip {
                let law_bound = bound.min(default_law_bound(functor));
                let v = Verdict::from_option(law_round_trip(&law, law_bound)?);
                report.checks.push(CheckJson::new("law of the lifting equals the input", &v));
            }
        }
    }
    report.finish();
    Ok(report)
}

fn pairs(r: &Relation, left: &Model, right: &Model) -> Vec<[String; 2]> {
    r.pairs().map(|(x, y)| [left.label(x), right.label(y)]).collect()
}

fn bisim(lifting: &str, paths: &[PathBuf], functor: Option<Functor>) -> anyhow::Result<Report> {
    if paths.len() > 2 {
        bail!("bisim takes one or two --model files, got {}", paths.len());
    }
    let left = load_model(&paths[0])?;
    let right = match paths.get(1) {
        Some(p) => load_model(p)?,
        None => left.clone(),
    };
    let f = left.coalgebra.functor();
    if right.coalgebra.functor() != f {
        bail!("models have different functors: {} and {}", f, right.coalgebra.functor());
    }
    if let Some(g) = functor.filter(|&g| g != f) {
        bail!("--functor {g} does not match the models' functor {f}");
    }
    let l = parse_lifting(f, lifting)?;
    let g = greatest_bisim(&*l, &left.coalgebra, &right.coalgebra)?;
    let mut report = Report::new("bisim");
    report.arg("functor", f.to_string());
    report.arg("lifting", l.name());
    report.arg("models", paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>());
    report.result("greatest_bisimulation", pairs(&g, &left, &right));
    report.result("relation", g.to_string());
    report.result("size", g.len());
    report.finish();
    Ok(report)
}

fn compare(c: &Coalgebra, d: &Coalgebra) -> anyhow::Result<Option<Counterexample>> {
    let engine = greatest_bisim(&*barr_lift(Functor::Powerset), c, d)?;
    let oracle = kripke_bisim_oracle(c, d)?;
    Ok((engine != oracle).then(|| {
        Counterexample::new("engine and oracle disagree")
            .relation("engine", &engine)
            .relation("oracle", &oracle)
    }))
}

fn oracle_compare(seed: u64, count: usize, max_states: u32, paths: &[PathBuf]) -> anyhow::Result<Report> {
    let mut report = Report::new("oracle-compare");
    match paths {
        [] => {
            if max_states == 0 {
                bail!("--max-states must be at least 1");
            }
            report.arg("seed", seed);
            report.arg("count", count);
            report.arg("max_states", max_states);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut failing = Vec::new();
            for k in 0..count {
                let (n, m) = (rng.gen_range(1..=max_states), rng.gen_range(1..=max_states));
                let c = Coalgebra::random(Functor::Powerset, n, &mut rng)?;
                let d = Coalgebra::random(Functor::Powerset, m, &mut rng)?;
                let ce = compare(&c, &d)?;
                if ce.is_some() {
                    failing.push([c.clone(), d.clone()].map(|c| ModelDocument::from_model(&Model::unlabelled(c))));
                }
                report.checks.push(CheckJson::new(format!("instance {k}: {n} and {m} states"), &Verdict::from_option(ce)));
            }
            if !failing.is_empty() {
                report.result("failing_instances", failing);
            }
        }
        [a, b] => {
            let (left, right) = (load_model(a)?, load_model(b)?);
            report.arg("models", [a.display().to_string(), b.display().to_string()]);
            let v = Verdict::from_option(compare(&left.coalgebra, &right.coalgebra)?);
            report.checks.push(CheckJson::new("engine agrees with the oracle", &v));
            report.result("bisimilar", pairs(&kripke_bisim_oracle(&left.coalgebra, &right.coalgebra)?, &left, &right));
        }
        _ => bail!("oracle-compare takes no --model or exactly two"),
    }
    report.finish();
    Ok(report)
}
