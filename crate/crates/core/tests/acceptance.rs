//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::time::{Duration, Instant};

use rayon::prelude::*;
use resplan::fixtures::{junction, tables};
use resplan::pddl::{
    check_domain, check_export, export_attribution_problems, export_cpr_anticipation_problem,
    export_domain,
};
use resplan::theorems::{corpus, run_corpus, Check, DomainBounds, Status};
use resplan::{
    anticipate, attribute, enumerate_completions, parse_ltl, parse_plan, ActionId, AgentId,
    CompiledLtl, Formula, History, JointPlan, Judge, PlanSpace, PropId, ResponsibilityKind, State,
    Symbols,
};

use ResponsibilityKind::{Aar, Car, Ccr, Cpr};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

const SEEDS: u64 = 1000;

fn junction_golden() -> Outcome {
    let start = Instant::now();
    let d = junction();
    let sym = d.symbols();
    let a1 = AgentId(0);
    let ltl = |t: &str| parse_ltl(t, sym).unwrap();
    let plan = |t: &str| parse_plan(t, "plan", sym).unwrap();

    let pi1 = plan("A1: F F\nA2: F F");
    let collided = ltl("!(G !collision)");
    let pi2 = plan("A1: skip skip\nA2: skip skip");
    let never_crossed = ltl("!(F crossed1)");
    let collide = ltl("F collision");

    let attributions = [
        (Cpr, &pi1, &collided, true),
        (Ccr, &pi1, &collided, true),
        (Car, &pi1, &collided, false),
        (Car, &pi2, &never_crossed, true),
        (Aar, &pi2, &never_crossed, true),
    ];
    for (kind, pi, omega, expected) in attributions {
        let got = attribute(kind, a1, pi, d.s0(), &d, omega)
            .map_err(|e| e.to_string())?
            .holds;
        let oracle = common::attribute(kind, a1, pi, d.s0(), &d, omega);
        ensure(got == expected && oracle == expected, || {
            format!("{kind} for A1: engine {got}, oracle {oracle}, expected {expected}")
        })?;
    }
    for (text, expected) in [("A1: F F", true), ("A1: skip skip", false)] {
        let mine = plan(text);
        let got = anticipate(Cpr, a1, &mine, &d, &collide)
            .map_err(|e| e.to_string())?
            .holds;
        let oracle = common::anticipate(Cpr, a1, &mine, &d, &collide);
        ensure(got == expected && oracle == expected, || {
            format!("anticipated CPR in {text}: engine {got}, oracle {oracle}")
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("7 verdicts exact, {elapsed:.2?}"))
}

fn theorem_suite() -> Outcome {
    let start = Instant::now();
    let report =
        run_corpus(&DomainBounds::default(), 0, SEEDS, &Check::ALL).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    for line in report.summary().lines() {
        println!("    {line}");
    }
    if !report.all_passed() {
        let rendered = report.render();
        let blocks = rendered.split_once("=== ").map(|(_, b)| b).unwrap_or("");
        return Err(format!(
            "{} failures\n=== {blocks}",
            report.failures().count()
        ));
    }
    ensure(elapsed < Duration::from_secs(300), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("{SEEDS} seeds, 0 counterexamples, {elapsed:.2?}"))
}

/// Every formula over `atoms` built from ¬, X, ∧ and U with at most
/// `max_size` nodes, grouped by size.
fn formulas(atoms: &[Formula], max_size: usize) -> Vec<Formula> {
    let mut by_size: Vec<Vec<Formula>> = vec![Vec::new(), atoms.to_vec()];
    for n in 2..=max_size {
        let mut here = Vec::new();
        for f in &by_size[n - 1] {
            here.push(Formula::not(f.clone()));
            here.push(Formula::next(f.clone()));
        }
        for left in 1..n - 1 {
            let right = n - 1 - left;
            for a in &by_size[left] {
                for b in &by_size[right] {
                    here.push(Formula::and(a.clone(), b.clone()));
                    here.push(Formula::until(a.clone(), b.clone()));
                }
            }
        }
        by_size.push(here);
    }
    by_size.into_iter().flatten().collect()
}

/// All histories whose states range over `props` propositions and whose
/// joint actions range over `rows`, for every horizon up to `max_k`.
fn histories(
    symbols: &Symbols,
    props: usize,
    rows: &[Vec<ActionId>],
    max_k: usize,
) -> Vec<History> {
    let mut out = Vec::new();
    let n_states = 1usize << props;
    for k in 0..=max_k {
        let states_total = n_states.pow(k as u32 + 1);
        let rows_total = rows.len().pow(k as u32);
        for sc in 0..states_total {
            let mut c = sc;
            let states: Vec<State> = (0..=k)
                .map(|_| {
                    let s = State::from_bits((c % n_states) as u64);
                    c /= n_states;
                    s
                })
                .collect();
            for rc in 0..rows_total {
                let mut c = rc;
                let hrows: Vec<Vec<ActionId>> = (0..k)
                    .map(|_| {
                        let r = rows[c % rows.len()].clone();
                        c /= rows.len();
                        r
                    })
                    .collect();
                out.push(History::new(states.clone(), hrows, symbols).unwrap());
            }
        }
    }
    out
}

/// Number of (formula, history, time) disagreements.
fn sweep(fs: &[Formula], hs: &[History]) -> usize {
    fs.par_iter()
        .map(|f| {
            let compiled = CompiledLtl::new(f);
            hs.iter()
                .map(|h| {
                    let fast = compiled.eval_all(h);
                    (0..=h.horizon())
                        .filter(|&t| fast[t] != common::naive_eval(h, t, f))
                        .count()
                })
                .sum::<usize>()
        })
        .sum()
}

fn ltlf_oracle() -> Outcome {
    let start = Instant::now();
    let sym = Symbols::new(&["p", "q"], &["A"], &[]).unwrap();
    let atoms = [
        Formula::prop(PropId(0)),
        Formula::prop(PropId(1)),
        Formula::True,
    ];
    let fs = formulas(&atoms, 8);
    let hs = histories(&sym, 2, &[vec![ActionId::SKIP]], 3);
    let bad = sweep(&fs, &hs);
    ensure(bad == 0, || {
        format!("{bad} disagreements on proposition formulas")
    })?;

    // action atoms: one proposition, one agent with skip and `go`
    let sym = Symbols::new(&["p"], &["A"], &["go"]).unwrap();
    let atoms = [
        Formula::prop(PropId(0)),
        Formula::does(AgentId(0), ActionId(1)),
        Formula::True,
    ];
    let afs = formulas(&atoms, 6);
    let ahs = histories(&sym, 1, &[vec![ActionId::SKIP], vec![ActionId(1)]], 3);
    let abad = sweep(&afs, &ahs);
    ensure(abad == 0, || {
        format!("{abad} disagreements on action formulas")
    })?;
    Ok(format!(
        "{} formulas x {} histories and {} x {} with action atoms, 0 disagreements, {:.2?}",
        fs.len(),
        hs.len(),
        afs.len(),
        ahs.len(),
        start.elapsed()
    ))
}

fn exclusion() -> Outcome {
    let report = run_corpus(&DomainBounds::default(), 0, SEEDS, &[Check::Exclusion])
        .map_err(|e| e.to_string())?;
    let violations = report.count(Check::Exclusion, Status::Fail);
    ensure(violations == 0, || {
        format!("{violations} violations\n{}", report.render())
    })?;
    let premised = report.count(Check::Exclusion, Status::Pass);

    // independent re-check on the smaller items with the reference oracle
    let mut rechecked = 0;
    for item in corpus(&DomainBounds::default(), 0, 200).map_err(|e| e.to_string())? {
        let (ppd, omega, k) = (&item.ppd, &item.omega, item.horizon);
        let plans = enumerate_completions(None, k, ppd.symbols()).unwrap();
        if plans.len() > 81 || !common::inevitable(ppd, ppd.s0(), k, omega) {
            continue;
        }
        rechecked += 1;
        for plan in &plans {
            for i in ppd.symbols().agents() {
                for kind in ResponsibilityKind::ALL {
                    ensure(
                        !common::attribute(kind, i, plan, ppd.s0(), ppd, omega),
                        || {
                            format!(
                                "seed {}: oracle attributes {kind} for an inevitable outcome",
                                item.seed
                            )
                        },
                    )?;
                }
            }
        }
    }
    Ok(format!(
        "{premised} of {SEEDS} items with an inevitable outcome, 0 violations; {rechecked} re-checked by the oracle"
    ))
}

fn pddl_bridge() -> Outcome {
    let queries = common::bridge_queries(200);
    let (mut agree, mut holds) = (0, 0);
    for q in &queries {
        let export = match q.kind {
            Some(kind) => {
                export_attribution_problems(kind, &q.ppd, &q.plan, q.agent, &q.omega, "q")
            }
            None => export_cpr_anticipation_problem(&q.ppd, &q.plan, q.agent, &q.omega, "q"),
        }
        .map_err(|e| format!("seed {}: {e}", q.seed))?;
        check_export(&export).map_err(|e| format!("seed {}: {e}", q.seed))?;
        let bridged = export.evaluate().map_err(|e| e.to_string())?;
        let native = match q.kind {
            Some(kind) => attribute(kind, q.agent, &q.plan, q.ppd.s0(), &q.ppd, &q.omega),
            None => anticipate(Cpr, q.agent, &q.plan, &q.ppd, &q.omega),
        }
        .map_err(|e| e.to_string())?
        .holds;
        ensure(bridged == native && native == q.oracle(), || {
            format!("seed {}: bridge {bridged}, native {native}", q.seed)
        })?;
        agree += 1;
        holds += native as usize;
    }

    // the table example, section by section
    let d = tables();
    let sym = d.symbols();
    let omega = parse_ltl("!(F G (lifted.table1 & lifted.table2))", sym).unwrap();
    let pi = parse_plan("A1: skip\nA2: lift", "plan", sym).unwrap();
    let domain = export_domain(&d, "responsibility-attribution").map_err(|e| e.to_string())?;
    let sig = check_domain(&domain).map_err(|e| e.to_string())?;
    let has = |text: &str, parts: &[&str]| parts.iter().all(|p| text.contains(p));
    ensure(
        has(
            &domain,
            &[
                "(:types act agent step table)",
                "(lifted ?x0 - table)",
                "(at ?x0 - agent ?x1 - table)",
            ],
        ) && sig.actions == ["lift", "skip", "tick"],
        || "table domain declarations".into(),
    )?;
    let cpr = export_attribution_problems(Cpr, &d, &pi, AgentId(0), &omega, "t")
        .map_err(|e| e.to_string())?;
    let car = export_attribution_problems(Car, &d, &pi, AgentId(0), &omega, "t")
        .map_err(|e| e.to_string())?;
    let aar = export_attribution_problems(Aar, &d, &pi, AgentId(0), &omega, "t")
        .map_err(|e| e.to_string())?;
    let mine = parse_plan("A1: skip", "plan", sym).unwrap();
    let ant = export_cpr_anticipation_problem(&d, &mine, AgentId(0), &omega, "t")
        .map_err(|e| e.to_string())?;
    let both_lifted = "(and (lifted table1) (lifted table2))";
    let goal = |t: &str| t[t.find("(:goal").unwrap()..].to_string();
    ensure(
        has(
            &goal(&cpr.problems[0].text),
            &["(do A1 skip t0)", "(do A2 lift t0)"],
        ) && has(
            &goal(&cpr.problems[1].text),
            &["(do A2 lift t0)", both_lifted],
        ) && !goal(&cpr.problems[1].text).contains("(do A1"),
        || "CPR problems".into(),
    )?;
    ensure(
        [&cpr, &car, &aar, &ant]
            .iter()
            .all(|e| check_export(e).is_ok()),
        || "table exports are not well formed".into(),
    )?;
    ensure(
        has(&goal(&car.problems[0].text), &[both_lifted])
            && !goal(&car.problems[0].text).contains("(do ")
            && has(
                &goal(&car.problems[1].text),
                &[both_lifted, "(do A1 skip t0)"],
            ),
        || "CAR problems".into(),
    )?;
    ensure(
        aar.problems.len() == 3
            && aar.problems[2]
                .text
                .contains("(at A1 table1)\n    (at A2 table1)"),
        || "AAR problems".into(),
    )?;
    ensure(
        ant.problems.len() == 2
            && has(
                &ant.domain_text,
                &[
                    "A1 A1-1 A2 A2-1 - agent",
                    "table1 table1-1 table2 table2-1 - table",
                ],
            )
            && has(
                &ant.problems[0].text,
                &[
                    "(at A1-1 table1-1)",
                    "(at A2-1 table2-1)",
                    "(imply (do A2 lift ?t) (do A2-1 lift ?t))",
                ],
            ),
        || "CPR anticipation problem".into(),
    )?;
    Ok(format!(
        "{agree}/{} queries agree ({holds} hold), all files well formed, table exports match",
        queries.len()
    ))
}

fn enumeration_counts() -> Outcome {
    let mut checked = 0;
    for agents in 1..=3usize {
        for actions in 1..=3usize {
            for k in 0..=3usize {
                let expected = (actions as u64).pow((agents * k) as u32);
                let names =
                    |p: &str, n: usize| (0..n).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
                let sym = Symbols::new(
                    &names("p", 1),
                    &names("A", agents),
                    &names("act", actions - 1),
                )
                .unwrap();
                let all = enumerate_completions(None, k, &sym).map_err(|e| e.to_string())?;
                let space = PlanSpace::new(agents, actions, k);
                ensure(
                    all.len() as u64 == expected && space.size() == Some(expected),
                    || {
                        format!(
                            "{agents} agents, {actions} actions, k={k}: {} plans",
                            all.len()
                        )
                    },
                )?;
                let individual = space.individual_size();
                ensure(individual == Some((actions as u64).pow(k as u32)), || {
                    "individual size".into()
                })?;
                // fixing one agent leaves the others' plans
                let fixed = JointPlan::individual(AgentId(0), vec![ActionId::SKIP; k]);
                let rest =
                    enumerate_completions(Some(&fixed), k, &sym).map_err(|e| e.to_string())?;
                ensure(
                    rest.len() as u64 == (actions as u64).pow(((agents - 1) * k) as u32),
                    || format!("completions of one agent: {}", rest.len()),
                )?;
                checked += 1;
            }
        }
    }
    let d = junction();
    let omega = parse_ltl("F collision", d.symbols()).unwrap();
    let judge = Judge::new(&d, &omega, 2, &[]).map_err(|e| e.to_string())?;
    ensure(judge.plan_count() == 16, || {
        "junction has 16 joint plans at k=2".into()
    })?;
    Ok(format!(
        "{checked} (agents, actions, horizon) triples match |Act|^(|Agt|*k) exactly"
    ))
}

fn main() {
    let criteria: [Criterion; 6] = [
        ("junction golden suite", junction_golden),
        ("theorem property suite", theorem_suite),
        ("LTLf oracle equivalence", ltlf_oracle),
        ("inevitability excludes responsibility", exclusion),
        ("PDDL bridge consistency", pddl_bridge),
        ("plan-space enumeration counts", enumeration_counts),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(run) {
            Ok(Ok(detail)) => println!("criterion {}: PASS {name}: {detail}", n + 1),
            Ok(Err(why)) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", n + 1);
            }
            Err(_) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: panicked", n + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
