use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use resplan::pddl::{export_attribution_problems, export_cpr_anticipation_problem, Export};
use resplan::report::{render_coordination, render_plan_choice, render_verdict};
use resplan::theorems::{run_corpus, Check, DomainBounds};
use resplan::{
    anticipate, attribute, coordinate, find_plan_avoiding_anticipated, generate_history,
    parse_domain, parse_ltl, parse_plan, parse_state, satisfies, Error, Formula, JointPlan, Ppd,
    ResponsibilityKind, State,
};

#[derive(Parser)]
#[command(
    name = "resplan",
    version,
    about = "Responsibility attribution and anticipation for multi-agent plans"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an LTLf formula at t=0 on a plan's history.
    Check {
        domain: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        formula: String,
        /// Start state such as `{p q}`; defaults to the domain's initial state.
        #[arg(long)]
        start: Option<String>,
    },
    /// Does an agent bear responsibility for an outcome in a full plan?
    Attribute {
        kind: ResponsibilityKind,
        domain: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        agent: String,
        #[arg(long)]
        outcome: String,
        /// Start state such as `{p q}`; defaults to the domain's initial state.
        #[arg(long)]
        start: Option<String>,
    },
    /// Does an agent committing to an individual plan anticipate responsibility?
    Anticipate {
        kind: ResponsibilityKind,
        domain: PathBuf,
        #[arg(long)]
        agent_plan: PathBuf,
        #[arg(long)]
        agent: String,
        #[arg(long)]
        outcome: String,
    },
    /// First individual plan that does not anticipate the given responsibility.
    FindPlan {
        domain: PathBuf,
        #[arg(long)]
        avoid: ResponsibilityKind,
        #[arg(long)]
        agent: String,
        #[arg(long)]
        outcome: String,
        #[arg(long)]
        horizon: usize,
    },
    /// Each agent picks the first plan not anticipating CPR for the outcome's
    /// negation; the choices are composed and the outcome checked.
    Coordinate {
        domain: PathBuf,
        #[arg(long)]
        outcome: String,
        #[arg(long)]
        horizon: usize,
    },
    /// Write PDDL files and a manifest for an attribution or CPR anticipation query.
    ExportPddl {
        /// CAR, CPR, AAR or cpr-anticipation
        kind: String,
        domain: PathBuf,
        /// Full plan (attribution) or the agent's plan (anticipation).
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        agent: String,
        #[arg(long)]
        outcome: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "query")]
        name: String,
    },
    /// Run the structural property checks over a seeded random corpus.
    Verify {
        #[arg(long, default_value_t = 200)]
        seeds: u64,
        /// First seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        max_agents: usize,
        #[arg(long, default_value_t = 3)]
        max_props: usize,
        /// Counts skip.
        #[arg(long, default_value_t = 3)]
        max_actions: usize,
        #[arg(long, default_value_t = 2)]
        max_horizon: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Only run this check. With `--seeds 1` this replays one
        /// reported counterexample.
        #[arg(long)]
        check: Option<String>,
    },
    /// Print a packaged example domain.
    Fixture { name: String },
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn load_domain(path: &Path) -> Result<Ppd, Error> {
    let name = path.display().to_string();
    let parsed = parse_domain(&read(path)?, &name)?;
    for w in &parsed.warnings {
        eprintln!("{name}:{}: warning: {}", w.line, w.message);
    }
    Ok(parsed.ppd)
}

fn load_plan(path: &Path, ppd: &Ppd) -> Result<JointPlan, Error> {
    parse_plan(&read(path)?, &path.display().to_string(), ppd.symbols())
}

fn formula(flag: &str, text: &str, ppd: &Ppd) -> Result<Formula, Error> {
    parse_ltl(text, ppd.symbols()).map_err(|e| Error::Invalid(format!("--{flag}: {e}")))
}

fn start_state(text: Option<&str>, ppd: &Ppd) -> Result<State, Error> {
    match text {
        None => Ok(ppd.s0()),
        Some(t) => {
            parse_state(t, ppd.symbols()).map_err(|e| Error::Invalid(format!("--start: {e}")))
        }
    }
}

fn write_export(export: &Export, dir: &Path) -> Result<String, Error> {
    let io = |e: std::io::Error| Error::Invalid(format!("cannot write to {}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let mut out = String::new();
    for (file, text) in export.files() {
        fs::write(dir.join(&file), text).map_err(io)?;
        out += &format!("wrote {file}\n");
    }
    fs::write(dir.join("manifest.txt"), export.manifest()).map_err(io)?;
    out += "wrote manifest.txt\n";
    Ok(out)
}

fn run(cmd: Command) -> Result<String, Error> {
    match cmd {
        Command::Check {
            domain,
            plan,
            formula: text,
            start,
        } => {
            let ppd = load_domain(&domain)?;
            let plan = load_plan(&plan, &ppd)?;
            let f = formula("formula", &text, &ppd)?;
            let h = generate_history(&plan, start_state(start.as_deref(), &ppd)?, ppd.theory())?;
            Ok(format!("{}\n", satisfies(&h, &f)?))
        }
        Command::Attribute {
            kind,
            domain,
            plan,
            agent,
            outcome,
            start,
        } => {
            let ppd = load_domain(&domain)?;
            let plan = load_plan(&plan, &ppd)?;
            let agent = ppd.symbols().agent(&agent)?;
            let omega = formula("outcome", &outcome, &ppd)?;
            let s = start_state(start.as_deref(), &ppd)?;
            let v = attribute(kind, agent, &plan, s, &ppd, &omega)?;
            Ok(render_verdict(kind, agent, &v, ppd.symbols()))
        }
        Command::Anticipate {
            kind,
            domain,
            agent_plan,
            agent,
            outcome,
        } => {
            let ppd = load_domain(&domain)?;
            let plan = load_plan(&agent_plan, &ppd)?;
            let agent = ppd.symbols().agent(&agent)?;
            let omega = formula("outcome", &outcome, &ppd)?;
            let v = anticipate(kind, agent, &plan, &ppd, &omega)?;
            Ok(render_verdict(kind, agent, &v, ppd.symbols()))
        }
        Command::FindPlan {
            domain,
            avoid,
            agent,
            outcome,
            horizon,
        } => {
            let ppd = load_domain(&domain)?;
            let agent = ppd.symbols().agent(&agent)?;
            let omega = formula("outcome", &outcome, &ppd)?;
            let plan = find_plan_avoiding_anticipated(avoid, agent, &ppd, &omega, horizon)?;
            Ok(render_plan_choice(plan.as_ref(), ppd.symbols()))
        }
        Command::Coordinate {
            domain,
            outcome,
            horizon,
        } => {
            let ppd = load_domain(&domain)?;
            let omega = formula("outcome", &outcome, &ppd)?;
            Ok(render_coordination(
                &coordinate(&ppd, &omega, horizon)?,
                ppd.symbols(),
            ))
        }
        Command::ExportPddl {
            kind,
            domain,
            plan,
            agent,
            outcome,
            out,
            name,
        } => {
            let ppd = load_domain(&domain)?;
            let plan = load_plan(&plan, &ppd)?;
            let agent = ppd.symbols().agent(&agent)?;
            let omega = formula("outcome", &outcome, &ppd)?;
            let export = if kind.eq_ignore_ascii_case("cpr-anticipation") {
                export_cpr_anticipation_problem(&ppd, &plan, agent, &omega, &name)?
            } else {
                let kind: ResponsibilityKind = kind.parse()?;
                export_attribution_problems(kind, &ppd, &plan, agent, &omega, &name)?
            };
            write_export(&export, &out)
        }
        Command::Verify {
            seeds,
            seed,
            max_agents,
            max_props,
            max_actions,
            max_horizon,
            density,
            depth,
            check,
        } => {
            let bounds = DomainBounds {
                max_agents,
                max_props,
                max_actions,
                max_horizon,
                effect_density: density,
                formula_depth: depth,
                rng_seed: seed,
            };
            bounds.validate()?;
            let checks = match &check {
                Some(name) => vec![Check::from_name(name)
                    .ok_or_else(|| Error::Invalid(format!("unknown check `{name}`")))?],
                None => Check::ALL.to_vec(),
            };
            Ok(run_corpus(&bounds, seed, seeds, &checks)?.render())
        }
        Command::Fixture { name } => resplan::fixtures::text(&name)
            .map(str::to_string)
            .ok_or_else(|| {
                Error::Invalid(format!(
                    "unknown fixture `{name}` (available: {})",
                    resplan::fixtures::NAMES.join(", ")
                ))
            }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_unsupported() { 2 } else { 1 })
        }
    }
}
