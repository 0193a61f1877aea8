//! Export of responsibility queries as multi-agent PDDL.
//!
//! Encoding. Steps `t0 .. tk` form a clock (`now`, `succ`). In each step
//! every agent performs exactly one domain action, which only records
//! `(acted ?a ?t)` and `(do ?a <action> ?t)`. Once all agents have acted,
//! the grounded `tick` action applies the effects of the joint action as
//! conditional effects and advances the clock. A proposition is set when
//! some executed action's positive condition holds and no executed action's
//! negative condition does, and symmetrically for deletion, so conflicting
//! effects leave it unchanged.
//!
//! Propositions named `pred.x.y` become `(pred x y)`; others become
//! nullary predicates. Outcomes must be boolean combinations of state
//! formulas, `G φ`, `F φ`, `F G φ` and `G F φ` with `φ` free of temporal
//! operators and action atoms. The last two hold iff `φ` holds in the final
//! state. Every emitted problem is paired with the [`PlanQuery`] it encodes,
//! so the decision rule can be evaluated without an external planner.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::model::{ActionTheory, Sign, State};
use crate::plan::JointPlan;
use crate::ppd::Ppd;
use crate::responsibility::ResponsibilityKind;
use crate::search::{exists_plan, PlanQuery};
use crate::symbols::{ActionId, AgentId, ObjectDecl, PropId, Symbols};

const RESERVED_PREDICATES: [&str; 4] = ["now", "succ", "acted", "do"];
const RESERVED_TYPES: [&str; 4] = ["agent", "step", "act", "object"];
const TICK: &str = "tick";
const TWIN_SUFFIX: &str = "-1";
const ANTICIPATION_TAG: &str = "cpr-anticipation";

fn unsupported(msg: impl Into<String>) -> Error {
    Error::Unsupported(msg.into())
}

/// Splits `pred.x.y` into `("pred", ["x", "y"])`.
fn atom_parts(name: &str) -> (&str, Vec<&str>) {
    let mut parts = name.split('.');
    let pred = parts.next().unwrap_or(name);
    (pred, parts.collect())
}

fn render_atom(name: &str) -> String {
    let (pred, args) = atom_parts(name);
    if args.is_empty() {
        format!("({pred})")
    } else {
        format!("({pred} {})", args.join(" "))
    }
}

/// Declared vocabulary of an exported domain.
struct Vocabulary {
    /// predicate -> argument types
    predicates: BTreeMap<String, Vec<String>>,
    /// object name -> type, including agents
    constants: BTreeMap<String, String>,
    types: BTreeSet<String>,
}

fn vocabulary(sym: &Symbols) -> Result<Vocabulary> {
    let mut constants = BTreeMap::new();
    let mut types = BTreeSet::new();
    for a in sym.agents() {
        constants.insert(sym.agent_name(a).to_string(), "agent".to_string());
    }
    for ObjectDecl { name, ty } in sym.objects() {
        if RESERVED_TYPES.contains(&ty.as_str()) {
            return Err(unsupported(format!(
                "object type `{ty}` is reserved by the encoding"
            )));
        }
        types.insert(ty.clone());
        constants.insert(name.clone(), ty.clone());
    }
    let mut predicates: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for p in sym.props() {
        let (pred, args) = atom_parts(sym.prop_name(p));
        if RESERVED_PREDICATES.contains(&pred) {
            return Err(unsupported(format!(
                "predicate `{pred}` is reserved by the encoding"
            )));
        }
        let mut arg_types = Vec::new();
        for arg in args {
            let ty = constants
                .entry(arg.to_string())
                .or_insert_with(|| "object".to_string())
                .clone();
            arg_types.push(ty);
        }
        match predicates.get(pred) {
            Some(existing) if *existing != arg_types => {
                return Err(unsupported(format!(
                    "predicate `{pred}` is used with inconsistent arguments"
                )))
            }
            _ => {
                predicates.insert(pred.to_string(), arg_types);
            }
        }
    }
    if constants.values().any(|t| t == "object") {
        types.insert("object".to_string());
    }
    for a in sym.actions() {
        let name = sym.action_name(a);
        if name == TICK {
            return Err(unsupported(
                "action name `tick` is reserved by the encoding",
            ));
        }
        if constants.contains_key(name) {
            return Err(unsupported(format!(
                "`{name}` names both an action and an object"
            )));
        }
    }
    // PDDL names are case-insensitive
    let mut seen = BTreeSet::new();
    let names = constants
        .keys()
        .cloned()
        .chain(sym.actions().map(|a| sym.action_name(a).to_string()));
    for n in names {
        if !seen.insert(n.to_ascii_lowercase()) {
            return Err(unsupported(format!(
                "`{n}` clashes with another name up to case"
            )));
        }
    }
    Ok(Vocabulary {
        predicates,
        constants,
        types,
    })
}

fn step(t: usize) -> String {
    format!("t{t}")
}

/// Renders an action-language formula as a PDDL condition. `t` is the
/// step term used by action atoms.
fn render_condition(f: &Formula, sym: &Symbols, t: &str) -> String {
    if let Some((a, b)) = f.as_or() {
        return format!(
            "(or {} {})",
            render_condition(a, sym, t),
            render_condition(b, sym, t)
        );
    }
    match f {
        Formula::True => "(and)".into(),
        Formula::False => "(or)".into(),
        Formula::Prop(p) => render_atom(sym.prop_name(*p)),
        Formula::Does(i, a) => format!("(do {} {} {t})", sym.agent_name(*i), sym.action_name(*a)),
        Formula::Not(g) => format!("(not {})", render_condition(g, sym, t)),
        Formula::And(a, b) => format!(
            "(and {} {})",
            render_condition(a, sym, t),
            render_condition(b, sym, t)
        ),
        Formula::Next(_) | Formula::Until(..) => unreachable!("action-language formula"),
    }
}

fn header(lines: &[&str]) -> String {
    lines.iter().map(|l| format!("; {l}\n")).collect()
}

/// The domain file for `ppd`.
pub fn export_domain(ppd: &Ppd, name: &str) -> Result<String> {
    let sym = ppd.symbols();
    let vocab = vocabulary(sym)?;
    let mut out = header(&[
        "Generated by resplan. Steps t0..tk form a clock: each agent performs one",
        "action per step, recorded as (do agent action step), and the grounded",
        "tick action applies the joint effects and advances (now).",
    ]);
    writeln!(out, "(define (domain {name})").unwrap();
    writeln!(
        out,
        "  (:requirements :typing :negative-preconditions :disjunctive-preconditions\n    :universal-preconditions :conditional-effects :constraints :multi-agent)"
    )
    .unwrap();
    let mut types: Vec<String> = vec!["act".into(), "agent".into(), "step".into()];
    types.extend(vocab.types.iter().cloned());
    types.sort();
    types.dedup();
    writeln!(out, "  (:types {})", types.join(" ")).unwrap();

    let mut by_type: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (c, ty) in &vocab.constants {
        by_type.entry(ty).or_default().push(c);
    }
    let mut acts: Vec<&str> = sym.actions().map(|a| sym.action_name(a)).collect();
    acts.sort();
    by_type.entry("act").or_default().extend(acts);
    writeln!(out, "  (:constants").unwrap();
    for (ty, names) in &by_type {
        writeln!(out, "    {} - {ty}", names.join(" ")).unwrap();
    }
    writeln!(out, "  )").unwrap();

    let mut predicates: Vec<String> = vec![
        "(acted ?a - agent ?t - step)".into(),
        "(do ?a - agent ?x - act ?t - step)".into(),
        "(now ?t - step)".into(),
        "(succ ?t ?u - step)".into(),
    ];
    for (pred, args) in &vocab.predicates {
        let params: Vec<String> = args
            .iter()
            .enumerate()
            .map(|(i, ty)| format!("?x{i} - {ty}"))
            .collect();
        if params.is_empty() {
            predicates.push(format!("({pred})"));
        } else {
            predicates.push(format!("({pred} {})", params.join(" ")));
        }
    }
    predicates.sort();
    writeln!(out, "  (:predicates").unwrap();
    for p in &predicates {
        writeln!(out, "    {p}").unwrap();
    }
    writeln!(out, "  )").unwrap();

    let mut action_names: Vec<&str> = sym.actions().map(|a| sym.action_name(a)).collect();
    action_names.sort();
    for a in action_names {
        writeln!(out, "  (:action {a}").unwrap();
        writeln!(out, "    :agent ?a - agent").unwrap();
        writeln!(out, "    :parameters (?t - step)").unwrap();
        writeln!(out, "    :precondition (and (now ?t) (not (acted ?a ?t)))").unwrap();
        writeln!(out, "    :effect (and (acted ?a ?t) (do ?a {a} ?t)))").unwrap();
    }
    out += &render_tick(ppd.theory(), sym);
    out += ")\n";
    Ok(out)
}

fn render_tick(theory: &ActionTheory, sym: &Symbols) -> String {
    let mut conds: BTreeMap<(String, Sign), Vec<String>> = BTreeMap::new();
    for sign in [Sign::Pos, Sign::Neg] {
        for (key, f) in theory.entries(sign) {
            let c = format!(
                "(and (do {} {} ?t) {})",
                sym.agent_name(key.agent),
                sym.action_name(key.action),
                render_condition(f.as_formula(), sym, "?t")
            );
            conds
                .entry((sym.prop_name(key.prop).to_string(), sign))
                .or_default()
                .push(c);
        }
    }
    let props: BTreeSet<&String> = conds.keys().map(|(p, _)| p).collect();
    let mut effects = vec!["(not (now ?t))".to_string(), "(now ?u)".to_string()];
    let any = |cs: Option<&Vec<String>>| match cs {
        None => None,
        Some(cs) if cs.len() == 1 => Some(cs[0].clone()),
        Some(cs) => Some(format!("(or {})", cs.join(" "))),
    };
    for p in props {
        let add = any(conds.get(&(p.clone(), Sign::Pos)));
        let del = any(conds.get(&(p.clone(), Sign::Neg)));
        let atom = render_atom(p);
        let when = |yes: &Option<String>, no: &Option<String>, eff: String| -> Option<String> {
            let yes = yes.as_ref()?;
            Some(match no {
                None => format!("(when {yes} {eff})"),
                Some(no) => format!("(when (and {yes} (not {no})) {eff})"),
            })
        };
        effects.extend(when(&add, &del, atom.clone()));
        effects.extend(when(&del, &add, format!("(not {atom})")));
    }
    let mut out = String::new();
    writeln!(out, "  (:action {TICK}").unwrap();
    writeln!(out, "    :agent ?a - agent").unwrap();
    writeln!(out, "    :parameters (?t ?u - step)").unwrap();
    writeln!(
        out,
        "    :precondition (and (now ?t) (succ ?t ?u) (forall (?b - agent) (acted ?b ?t)))"
    )
    .unwrap();
    writeln!(out, "    :effect (and").unwrap();
    for e in &effects {
        writeln!(out, "      {e}").unwrap();
    }
    writeln!(out, "    ))").unwrap();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Leaf {
    Initially,
    Always,
    Sometime,
    AtEnd,
}

/// Outcome in negation normal form over state-constraint leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Nnf {
    Const(bool),
    Leaf(Leaf, Formula),
    And(Box<Nnf>, Box<Nnf>),
    Or(Box<Nnf>, Box<Nnf>),
}

fn is_state_formula(f: &Formula) -> bool {
    !f.is_temporal() && !f.mentions_actions()
}

fn neg(f: &Formula, positive: bool) -> Formula {
    if positive {
        f.clone()
    } else {
        Formula::not(f.clone())
    }
}

fn classify(f: &Formula, positive: bool) -> Result<Nnf> {
    if f.mentions_actions() {
        return Err(unsupported("action atoms in outcomes cannot be exported"));
    }
    if is_state_formula(f) {
        return Ok(Nnf::Leaf(Leaf::Initially, neg(f, positive)));
    }
    if let Some(g) = f.as_globally() {
        if is_state_formula(g) {
            let leaf = if positive {
                Leaf::Always
            } else {
                Leaf::Sometime
            };
            return Ok(Nnf::Leaf(leaf, neg(g, positive)));
        }
        if let Some(h) = g.as_eventually().filter(|h| is_state_formula(h)) {
            return Ok(Nnf::Leaf(Leaf::AtEnd, neg(h, positive)));
        }
        return Err(unsupported("nested temporal operators cannot be exported"));
    }
    if let Some(g) = f.as_eventually() {
        if is_state_formula(g) {
            let leaf = if positive {
                Leaf::Sometime
            } else {
                Leaf::Always
            };
            return Ok(Nnf::Leaf(leaf, neg(g, positive)));
        }
        if let Some(h) = g.as_globally().filter(|h| is_state_formula(h)) {
            return Ok(Nnf::Leaf(Leaf::AtEnd, neg(h, positive)));
        }
        return Err(unsupported("nested temporal operators cannot be exported"));
    }
    match f {
        Formula::Not(g) => classify(g, !positive),
        Formula::And(a, b) => {
            let (a, b) = (classify(a, positive)?, classify(b, positive)?);
            Ok(if positive {
                Nnf::And(Box::new(a), Box::new(b))
            } else {
                Nnf::Or(Box::new(a), Box::new(b))
            })
        }
        Formula::Next(_) => Err(unsupported("`X` cannot be exported")),
        Formula::Until(..) => Err(unsupported("`U` other than `F` cannot be exported")),
        _ => unreachable!("atoms are state formulas"),
    }
}

/// Replaces `Initially` leaves by their value in `init` and simplifies.
fn fold(n: Nnf, init: State) -> Nnf {
    match n {
        Nnf::Leaf(Leaf::Initially, f) => Nnf::Const(crate::model::holds_at(init, None, &f)),
        Nnf::And(a, b) => match (fold(*a, init), fold(*b, init)) {
            (Nnf::Const(false), _) | (_, Nnf::Const(false)) => Nnf::Const(false),
            (Nnf::Const(true), x) | (x, Nnf::Const(true)) => x,
            (a, b) => Nnf::And(Box::new(a), Box::new(b)),
        },
        Nnf::Or(a, b) => match (fold(*a, init), fold(*b, init)) {
            (Nnf::Const(true), _) | (_, Nnf::Const(true)) => Nnf::Const(true),
            (Nnf::Const(false), x) | (x, Nnf::Const(false)) => x,
            (a, b) => Nnf::Or(Box::new(a), Box::new(b)),
        },
        other => other,
    }
}

fn needs_constraints(n: &Nnf) -> bool {
    match n {
        Nnf::Leaf(Leaf::Always | Leaf::Sometime, _) => true,
        Nnf::And(a, b) | Nnf::Or(a, b) => needs_constraints(a) || needs_constraints(b),
        _ => false,
    }
}

/// The LTLf meaning of a folded outcome, used by the internal planner.
fn semantics(n: &Nnf) -> Formula {
    match n {
        Nnf::Const(true) => Formula::True,
        Nnf::Const(false) => Formula::False,
        Nnf::Leaf(Leaf::Initially, f) => f.clone(),
        Nnf::Leaf(Leaf::Always, f) => Formula::globally(f.clone()),
        Nnf::Leaf(Leaf::Sometime, f) => Formula::eventually(f.clone()),
        Nnf::Leaf(Leaf::AtEnd, f) => Formula::eventually(Formula::globally(f.clone())),
        Nnf::And(a, b) => Formula::and(semantics(a), semantics(b)),
        Nnf::Or(a, b) => Formula::or(semantics(a), semantics(b)),
    }
}

fn render_nnf(n: &Nnf, sym: &Symbols, as_constraint: bool) -> String {
    let state = |f: &Formula| render_condition(f, sym, "?t");
    match n {
        Nnf::Const(true) => "(and)".into(),
        Nnf::Const(false) => "(or)".into(),
        Nnf::Leaf(Leaf::Initially, f) => state(f),
        Nnf::Leaf(Leaf::Always, f) => format!("(always {})", state(f)),
        Nnf::Leaf(Leaf::Sometime, f) => format!("(sometime {})", state(f)),
        Nnf::Leaf(Leaf::AtEnd, f) if as_constraint => format!("(at end {})", state(f)),
        Nnf::Leaf(Leaf::AtEnd, f) => state(f),
        Nnf::And(a, b) => format!(
            "(and {} {})",
            render_nnf(a, sym, as_constraint),
            render_nnf(b, sym, as_constraint)
        ),
        Nnf::Or(a, b) => format!(
            "(or {} {})",
            render_nnf(a, sym, as_constraint),
            render_nnf(b, sym, as_constraint)
        ),
    }
}

/// Checks that `omega` lies in the exportable fragment.
pub fn check_fragment(omega: &Formula) -> Result<()> {
    classify(omega, true).map(|_| ())
}

/// One exported problem and the expectation the decision rule places on it.
#[derive(Debug, Clone)]
pub struct ExportedProblem {
    pub file: String,
    pub text: String,
    pub expect_solvable: bool,
    pub query: PlanQuery,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combine {
    /// The verdict holds iff every problem meets its expectation.
    AllOf,
    /// The verdict holds iff some problem meets its expectation.
    AnyOf,
}

#[derive(Debug, Clone)]
pub struct Export {
    pub description: String,
    pub domain_file: String,
    pub domain_text: String,
    pub problems: Vec<ExportedProblem>,
    pub combine: Combine,
}

impl Export {
    /// All files, domain first.
    pub fn files(&self) -> Vec<(String, String)> {
        let mut out = vec![(self.domain_file.clone(), self.domain_text.clone())];
        out.extend(
            self.problems
                .iter()
                .map(|p| (p.file.clone(), p.text.clone())),
        );
        out
    }

    /// Line-oriented sidecar listing the files and the decision rule.
    pub fn manifest(&self) -> String {
        let mut out = format!("# {}\n", self.description);
        writeln!(out, "domain {}", self.domain_file).unwrap();
        for p in &self.problems {
            let expect = if p.expect_solvable {
                "solvable"
            } else {
                "unsolvable"
            };
            writeln!(out, "problem {} expect={expect}", p.file).unwrap();
        }
        let rule = match self.combine {
            Combine::AllOf => "all-of",
            Combine::AnyOf => "any-of",
        };
        writeln!(out, "rule {rule}").unwrap();
        out
    }

    /// Applies the decision rule, solving each problem with the internal
    /// bounded planner.
    pub fn evaluate(&self) -> Result<bool> {
        let mut met = Vec::new();
        for p in &self.problems {
            met.push(exists_plan(&p.query)?.is_some() == p.expect_solvable);
        }
        Ok(match self.combine {
            Combine::AllOf => met.iter().all(|m| *m),
            Combine::AnyOf => met.iter().any(|m| *m),
        })
    }
}

struct Probe {
    init: State,
    pins: Vec<(AgentId, Vec<ActionId>)>,
    agreements: Vec<(AgentId, AgentId)>,
    outcome: Formula,
    expect_solvable: bool,
}

fn render_problem(
    ppd: &Ppd,
    domain_name: &str,
    problem_name: &str,
    horizon: usize,
    probe: &Probe,
) -> Result<String> {
    let sym = ppd.symbols();
    let nnf = fold(classify(&probe.outcome, true)?, probe.init);
    let mut out = header(&["Generated by resplan; see the domain file for the encoding."]);
    writeln!(out, "(define (problem {problem_name})").unwrap();
    writeln!(out, "  (:domain {domain_name})").unwrap();
    let steps: Vec<String> = (0..=horizon).map(step).collect();
    writeln!(out, "  (:objects {} - step)", steps.join(" ")).unwrap();
    let mut init: Vec<String> = probe
        .init
        .props()
        .map(|p| render_atom(sym.prop_name(p)))
        .collect();
    init.sort();
    init.push(format!("(now {})", step(0)));
    init.extend((0..horizon).map(|t| format!("(succ {} {})", step(t), step(t + 1))));
    writeln!(out, "  (:init").unwrap();
    for fact in &init {
        writeln!(out, "    {fact}").unwrap();
    }
    writeln!(out, "  )").unwrap();

    let mut goal = vec![format!("(now {})", step(horizon))];
    for (agent, seq) in &probe.pins {
        for (t, a) in seq.iter().enumerate() {
            goal.push(format!(
                "(do {} {} {})",
                sym.agent_name(*agent),
                sym.action_name(*a),
                step(t)
            ));
        }
    }
    for (leader, follower) in &probe.agreements {
        let implications: Vec<String> = sym
            .actions()
            .map(|a| {
                let a = sym.action_name(a);
                format!(
                    "(imply (do {} {a} ?t) (do {} {a} ?t))",
                    sym.agent_name(*leader),
                    sym.agent_name(*follower)
                )
            })
            .collect();
        goal.push(format!(
            "(forall (?t - step) (and {}))",
            implications.join(" ")
        ));
    }
    let constraints = needs_constraints(&nnf);
    if !constraints {
        goal.push(render_nnf(&nnf, sym, false));
    }
    writeln!(out, "  (:goal (and").unwrap();
    for g in &goal {
        writeln!(out, "    {g}").unwrap();
    }
    writeln!(out, "  ))").unwrap();
    if constraints {
        writeln!(out, "  (:constraints {})", render_nnf(&nnf, sym, true)).unwrap();
    }
    out += ")\n";
    Ok(out)
}

fn build_export(
    ppd: &Ppd,
    name: &str,
    horizon: usize,
    probes: Vec<Probe>,
    combine: Combine,
    description: String,
    tag: &str,
) -> Result<Export> {
    let domain_name = if tag == ANTICIPATION_TAG {
        format!("{name}-twin-domain")
    } else {
        format!("{name}-domain")
    };
    let domain_text = export_domain(ppd, &domain_name)?;
    let mut problems = Vec::new();
    for (n, probe) in probes.into_iter().enumerate() {
        let problem_name = format!("{name}-{tag}-{}", n + 1);
        let text = render_problem(ppd, &domain_name, &problem_name, horizon, &probe)?;
        let goal = semantics(&fold(classify(&probe.outcome, true)?, probe.init));
        problems.push(ExportedProblem {
            file: format!("{problem_name}.pddl"),
            text,
            expect_solvable: probe.expect_solvable,
            query: PlanQuery {
                domain: ppd.clone(),
                init: probe.init,
                horizon,
                pins: probe.pins,
                agreements: probe.agreements,
                goal,
            },
        });
    }
    Ok(Export {
        description,
        domain_file: format!("{domain_name}.pddl"),
        domain_text,
        problems,
        combine,
    })
}

fn check_query(ppd: &Ppd, agent: AgentId, omega: &Formula) -> Result<()> {
    ppd.check_agent(agent)?;
    omega.validate(ppd.symbols())?;
    check_fragment(omega)
}

/// Problems deciding whether `agent` bears `kind` for `omega` in the full
/// plan `plan` from the domain's initial state.
pub fn export_attribution_problems(
    kind: ResponsibilityKind,
    ppd: &Ppd,
    plan: &JointPlan,
    agent: AgentId,
    omega: &Formula,
    name: &str,
) -> Result<Export> {
    check_query(ppd, agent, omega)?;
    plan.validate(ppd.symbols())?;
    if !plan.is_full(ppd.num_agents()) {
        return Err(Error::invalid("attribution needs a full joint plan"));
    }
    let k = plan.horizon();
    let seq = |a: AgentId| plan.seq(a).unwrap_or_default().to_vec();
    let not_omega = Formula::not(omega.clone());
    let s0 = ppd.s0();
    let sym = ppd.symbols();
    let agent_name = sym.agent_name(agent);
    let (probes, tag, description) = match kind {
        ResponsibilityKind::Cpr => (
            vec![
                Probe {
                    init: s0,
                    pins: sym.agents().map(|a| (a, seq(a))).collect(),
                    agreements: vec![],
                    outcome: omega.clone(),
                    expect_solvable: true,
                },
                Probe {
                    init: s0,
                    pins: sym
                        .agents()
                        .filter(|a| *a != agent)
                        .map(|a| (a, seq(a)))
                        .collect(),
                    agreements: vec![],
                    outcome: not_omega,
                    expect_solvable: true,
                },
            ],
            "cpr",
            format!("CPR for {agent_name}: the outcome occurs, and deviating alone can avoid it"),
        ),
        ResponsibilityKind::Car | ResponsibilityKind::Aar => {
            let mut probes = vec![Probe {
                init: s0,
                pins: vec![],
                agreements: vec![],
                outcome: not_omega.clone(),
                expect_solvable: true,
            }];
            let starts = if kind == ResponsibilityKind::Car {
                vec![s0]
            } else {
                ppd.epistemic(agent).to_vec()
            };
            for s in starts {
                probes.push(Probe {
                    init: s,
                    pins: vec![(agent, seq(agent))],
                    agreements: vec![],
                    outcome: not_omega.clone(),
                    expect_solvable: false,
                });
            }
            let what = if kind == ResponsibilityKind::Car {
                "the outcome is avoidable, and no completion of the agent's actions avoids it"
            } else {
                "the outcome is avoidable, and no completion of the agent's actions avoids it from any start the agent considers possible"
            };
            let tag = if kind == ResponsibilityKind::Car {
                "car"
            } else {
                "aar"
            };
            (probes, tag, format!("{kind} for {agent_name}: {what}"))
        }
        ResponsibilityKind::Ccr => {
            return Err(unsupported(
                "CCR attribution is not exported; export CPR anticipation instead",
            ))
        }
    };
    build_export(ppd, name, k, probes, Combine::AllOf, description, tag)
}

fn twin_prop(name: &str) -> String {
    let (pred, args) = atom_parts(name);
    if args.is_empty() {
        format!("{pred}{TWIN_SUFFIX}")
    } else {
        let args: Vec<String> = args.iter().map(|a| format!("{a}{TWIN_SUFFIX}")).collect();
        format!("{pred}.{}", args.join("."))
    }
}

/// Two independent copies of `ppd` side by side. Agent `j` of the copy is
/// `j + n` and proposition `p` of the copy is `p + m`.
pub fn twin_domain(ppd: &Ppd, s0: State) -> Result<Ppd> {
    let sym = ppd.symbols();
    let n = sym.num_agents();
    let m = sym.num_props();
    let mut props: Vec<String> = sym.props().map(|p| sym.prop_name(p).to_string()).collect();
    props.extend(sym.props().map(|p| twin_prop(sym.prop_name(p))));
    let mut agents: Vec<String> = sym
        .agents()
        .map(|a| sym.agent_name(a).to_string())
        .collect();
    agents.extend(
        sym.agents()
            .map(|a| format!("{}{TWIN_SUFFIX}", sym.agent_name(a))),
    );
    let actions: Vec<String> = sym
        .actions()
        .map(|a| sym.action_name(a).to_string())
        .collect();
    let mut objects = sym.objects().to_vec();
    objects.extend(sym.objects().iter().map(|o| ObjectDecl {
        name: format!("{}{TWIN_SUFFIX}", o.name),
        ty: o.ty.clone(),
    }));
    if 2 * m > crate::symbols::MAX_PROPS {
        return Err(unsupported("too many propositions to duplicate the domain"));
    }
    let twin_sym = Symbols::new_unchecked(&props, &agents, &actions, objects)?;

    let mut theory = ActionTheory::new(&twin_sym);
    let copy_prop = |p: PropId| PropId(p.0 + m as u16);
    let copy_does = |i: AgentId, a: ActionId| (AgentId(i.0 + n as u16), a);
    for sign in [Sign::Pos, Sign::Neg] {
        for (key, f) in ppd.theory().entries(sign) {
            theory.set(sign, key.agent, key.action, key.prop, f.clone())?;
            let copied = f.as_formula().map_atoms(&copy_prop, &copy_does);
            let (agent, action) = copy_does(key.agent, key.action);
            theory.set(sign, agent, action, copy_prop(key.prop), copied.try_into()?)?;
        }
    }
    let init = State::from_bits(s0.bits() | (s0.bits() << m));
    Ppd::with_known_start(twin_sym, theory, init)
}

/// Problems deciding whether `agent`, committed to the individual plan
/// `plan`, anticipates CPR for `omega`: one per start state the agent
/// considers possible, over two copies of the domain that share every other
/// agent's actions.
pub fn export_cpr_anticipation_problem(
    ppd: &Ppd,
    plan: &JointPlan,
    agent: AgentId,
    omega: &Formula,
    name: &str,
) -> Result<Export> {
    check_query(ppd, agent, omega)?;
    plan.validate(ppd.symbols())?;
    let seq = match (plan.coalition().count(), plan.seq(agent)) {
        (1, Some(seq)) => seq.to_vec(),
        _ => {
            return Err(Error::invalid(
                "anticipation needs an individual plan for the agent",
            ))
        }
    };
    let n = ppd.num_agents();
    let m = ppd.symbols().num_props();
    let twin = twin_domain(ppd, ppd.s0())?;
    let copy = omega.map_atoms(&|p: PropId| PropId(p.0 + m as u16), &|i, a| (i, a));
    let outcome = Formula::and(omega.clone(), Formula::not(copy));
    let agreements: Vec<(AgentId, AgentId)> = (0..n as u16)
        .map(AgentId)
        .filter(|a| *a != agent)
        .map(|a| (a, AgentId(a.0 + n as u16)))
        .collect();
    let probes = ppd
        .epistemic(agent)
        .iter()
        .map(|s| Probe {
            init: State::from_bits(s.bits() | (s.bits() << m)),
            pins: vec![(agent, seq.clone())],
            agreements: agreements.clone(),
            outcome: outcome.clone(),
            expect_solvable: true,
        })
        .collect();
    let agent_name = ppd.symbols().agent_name(agent);
    let description = format!(
        "anticipated CPR for {agent_name}: from some possible start, the plan leads to the outcome while a deviation with the same other actions avoids it"
    );
    build_export(
        &twin,
        name,
        plan.horizon(),
        probes,
        Combine::AnyOf,
        description,
        ANTICIPATION_TAG,
    )
}

/// A parsed s-expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    fn head(&self) -> Option<&str> {
        match self {
            Sexp::List(items) => match items.first() {
                Some(Sexp::Atom(a)) => Some(a),
                _ => None,
            },
            Sexp::Atom(_) => None,
        }
    }

    fn items(&self) -> &[Sexp] {
        match self {
            Sexp::List(items) => items,
            Sexp::Atom(_) => &[],
        }
    }

    fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a) => Some(a),
            Sexp::List(_) => None,
        }
    }
}

/// Parses PDDL text into one top-level s-expression, ignoring `;` comments.
pub fn parse_sexp(text: &str) -> Result<Sexp> {
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    for line in text.lines() {
        let line = line.split(';').next().unwrap_or("");
        let spaced = line.replace('(', " ( ").replace(')', " ) ");
        for tok in spaced.split_whitespace() {
            match tok {
                "(" => stack.push(Vec::new()),
                ")" => {
                    let done = stack
                        .pop()
                        .filter(|_| !stack.is_empty())
                        .ok_or_else(|| Error::invalid("unbalanced `)`"))?;
                    stack.last_mut().unwrap().push(Sexp::List(done));
                }
                t => stack
                    .last_mut()
                    .unwrap()
                    .push(Sexp::Atom(t.to_ascii_lowercase())),
            }
        }
    }
    if stack.len() != 1 {
        return Err(Error::invalid("unbalanced `(`"));
    }
    let mut top = stack.pop().unwrap();
    if top.len() != 1 {
        return Err(Error::invalid("expected exactly one top-level form"));
    }
    Ok(top.remove(0))
}

/// Names and arities declared by a domain, as read back from its text.
#[derive(Debug, Clone, Default)]
pub struct DomainSignature {
    pub name: String,
    pub predicates: BTreeMap<String, usize>,
    pub constants: BTreeSet<String>,
    pub actions: Vec<String>,
}

fn typed_names(items: &[Sexp]) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut expect_type = false;
    for it in items {
        let a = it
            .atom()
            .ok_or_else(|| Error::invalid("expected a name in a typed list"))?;
        if expect_type {
            expect_type = false;
        } else if a == "-" {
            expect_type = true;
        } else {
            out.push(a.to_string());
        }
    }
    if expect_type {
        return Err(Error::invalid("`-` without a type"));
    }
    Ok(out)
}

const CONNECTIVES: [&str; 9] = [
    "and", "or", "not", "imply", "forall", "exists", "when", "always", "sometime",
];

/// Checks a condition or effect: every atom uses a declared predicate with
/// the right arity and declared or bound arguments.
fn check_expr(e: &Sexp, sig: &DomainSignature, scope: &BTreeSet<String>) -> Result<()> {
    let items = e.items();
    let Some(head) = e.head() else {
        return Err(Error::invalid("expected a parenthesised expression"));
    };
    match head {
        "forall" | "exists" => {
            let vars = items
                .get(1)
                .ok_or_else(|| Error::invalid("quantifier without variables"))?;
            let mut inner = scope.clone();
            inner.extend(typed_names(vars.items())?);
            for body in &items[2..] {
                check_expr(body, sig, &inner)?;
            }
            Ok(())
        }
        "at" if items.get(1).and_then(Sexp::atom) == Some("end") => {
            for body in &items[2..] {
                check_expr(body, sig, scope)?;
            }
            Ok(())
        }
        h if CONNECTIVES.contains(&h) => {
            for body in &items[1..] {
                check_expr(body, sig, scope)?;
            }
            Ok(())
        }
        pred => {
            let arity = sig
                .predicates
                .get(pred)
                .ok_or_else(|| Error::invalid(format!("undeclared predicate `{pred}`")))?;
            if items.len() - 1 != *arity {
                return Err(Error::invalid(format!(
                    "`{pred}` takes {arity} arguments, got {}",
                    items.len() - 1
                )));
            }
            for arg in &items[1..] {
                let a = arg
                    .atom()
                    .ok_or_else(|| Error::invalid(format!("nested term in `{pred}`")))?;
                if !(scope.contains(a) || sig.constants.contains(a)) {
                    return Err(Error::invalid(format!("undeclared object `{a}`")));
                }
            }
            Ok(())
        }
    }
}

fn section<'a>(items: &'a [Sexp], key: &str) -> Vec<&'a Sexp> {
    items.iter().filter(|s| s.head() == Some(key)).collect()
}

/// Checks a domain file and returns its signature.
pub fn check_domain(text: &str) -> Result<DomainSignature> {
    let top = parse_sexp(text)?;
    let items = top.items();
    if top.head() != Some("define") || items.get(1).and_then(Sexp::head) != Some("domain") {
        return Err(Error::invalid("expected `(define (domain ...) ...)`"));
    }
    let mut sig = DomainSignature {
        name: items[1]
            .items()
            .get(1)
            .and_then(Sexp::atom)
            .unwrap_or("")
            .to_string(),
        ..DomainSignature::default()
    };
    for c in section(items, ":constants") {
        sig.constants.extend(typed_names(&c.items()[1..])?);
    }
    for p in section(items, ":predicates") {
        for decl in &p.items()[1..] {
            let name = decl
                .head()
                .ok_or_else(|| Error::invalid("bad predicate declaration"))?;
            let arity = typed_names(&decl.items()[1..])?.len();
            sig.predicates.insert(name.to_string(), arity);
        }
    }
    for action in section(items, ":action") {
        let parts = action.items();
        let name = parts
            .get(1)
            .and_then(Sexp::atom)
            .ok_or_else(|| Error::invalid("unnamed action"))?;
        let mut fields: BTreeMap<&str, Vec<&Sexp>> = BTreeMap::new();
        let mut i = 2;
        while i < parts.len() {
            let key = parts[i]
                .atom()
                .ok_or_else(|| Error::invalid(format!("malformed action `{name}`")))?;
            let mut vals = Vec::new();
            i += 1;
            while i < parts.len() && !parts[i].atom().is_some_and(|a| a.starts_with(':')) {
                vals.push(&parts[i]);
                i += 1;
            }
            fields.insert(key, vals);
        }
        for key in [":agent", ":parameters", ":precondition", ":effect"] {
            if !fields.contains_key(key) {
                return Err(Error::invalid(format!("action `{name}` lacks {key}")));
            }
        }
        let mut scope: BTreeSet<String> = fields[":agent"]
            .iter()
            .filter_map(|s| s.atom())
            .filter(|a| a.starts_with('?'))
            .map(str::to_string)
            .collect();
        for p in &fields[":parameters"] {
            scope.extend(typed_names(p.items())?);
        }
        for key in [":precondition", ":effect"] {
            for e in &fields[key] {
                check_expr(e, &sig, &scope)?;
            }
        }
        sig.actions.push(name.to_string());
    }
    if sig.actions.is_empty() {
        return Err(Error::invalid("domain declares no actions"));
    }
    Ok(sig)
}

/// Checks a problem file against the signature of its domain.
pub fn check_problem(text: &str, domain: &DomainSignature) -> Result<()> {
    let top = parse_sexp(text)?;
    let items = top.items();
    if top.head() != Some("define") || items.get(1).and_then(Sexp::head) != Some("problem") {
        return Err(Error::invalid("expected `(define (problem ...) ...)`"));
    }
    let dom = section(items, ":domain");
    if dom.len() != 1 || dom[0].items().get(1).and_then(Sexp::atom) != Some(domain.name.as_str()) {
        return Err(Error::invalid("problem does not name its domain"));
    }
    let mut sig = domain.clone();
    for o in section(items, ":objects") {
        sig.constants.extend(typed_names(&o.items()[1..])?);
    }
    let empty = BTreeSet::new();
    for init in section(items, ":init") {
        for fact in &init.items()[1..] {
            check_expr(fact, &sig, &empty)?;
        }
    }
    let goals = section(items, ":goal");
    if goals.len() != 1 {
        return Err(Error::invalid("problem needs exactly one goal"));
    }
    for key in [":goal", ":constraints"] {
        for s in section(items, key) {
            for e in &s.items()[1..] {
                check_expr(e, &sig, &empty)?;
            }
        }
    }
    Ok(())
}

/// Checks every file of an export.
pub fn check_export(export: &Export) -> Result<()> {
    let sig = check_domain(&export.domain_text)?;
    for p in &export.problems {
        check_problem(&p.text, &sig).map_err(|e| Error::invalid(format!("{}: {e}", p.file)))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{junction, tables};
    use crate::parse::parse_ltl;

    #[test]
    fn fragment_classification() {
        let d = junction();
        let ok = [
            "G !collision",
            "F crossed1 & !collision",
            "!(F G collision)",
            "G F crossed2 | crossed1",
        ];
        for text in ok {
            check_fragment(&parse_ltl(text, d.symbols()).unwrap()).unwrap();
        }
        let bad = [
            "X crossed1",
            "crossed1 U crossed2",
            "F (crossed1 & F crossed2)",
            "G do(A1,F)",
            "F G F crossed1",
        ];
        for text in bad {
            let err = check_fragment(&parse_ltl(text, d.symbols()).unwrap()).unwrap_err();
            assert!(err.is_unsupported(), "{text}");
        }
    }

    #[test]
    fn domain_is_well_formed_and_stable() {
        for d in [junction(), tables()] {
            let text = export_domain(&d, "dom").unwrap();
            check_domain(&text).unwrap();
            assert_eq!(text, export_domain(&d, "dom").unwrap());
        }
    }

    #[test]
    fn skip_only_domain() {
        let sym = Symbols::new(&["p"], &["A"], &[]).unwrap();
        let theory = ActionTheory::new(&sym);
        let d = Ppd::with_known_start(sym, theory, State::EMPTY).unwrap();
        let text = export_domain(&d, "idle").unwrap();
        let sig = check_domain(&text).unwrap();
        assert_eq!(sig.actions, vec!["skip".to_string(), "tick".to_string()]);
    }

    #[test]
    fn reserved_names_rejected() {
        let sym = Symbols::new(&["now"], &["A"], &[]).unwrap();
        let d = Ppd::with_known_start(sym.clone(), ActionTheory::new(&sym), State::EMPTY).unwrap();
        assert!(export_domain(&d, "x").unwrap_err().is_unsupported());
        let sym = Symbols::new(&["p"], &["A"], &["tick"]).unwrap();
        let d = Ppd::with_known_start(sym.clone(), ActionTheory::new(&sym), State::EMPTY).unwrap();
        assert!(export_domain(&d, "x").unwrap_err().is_unsupported());
    }

    #[test]
    fn twin_runs_both_copies() {
        let d = junction();
        let twin = twin_domain(&d, d.s0()).unwrap();
        assert_eq!(twin.num_agents(), 4);
        assert_eq!(twin.symbols().prop_name(PropId(3)), "crossed1-1");
        assert_eq!(twin_prop("at.A1.table1"), "at.A1-1.table1-1");
        let f = ActionId(1);
        let h =
            crate::model::successor_state(State::EMPTY, &[f, ActionId::SKIP, f, f], twin.theory())
                .unwrap();
        let names = h.names(twin.symbols());
        assert_eq!(names, vec!["collision-1", "crossed1"]);
    }

    #[test]
    fn sexp_checks_catch_errors() {
        assert!(parse_sexp("(a (b)").is_err());
        assert!(parse_sexp("(a))").is_err());
        let d = junction();
        let sig = check_domain(&export_domain(&d, "j").unwrap()).unwrap();
        let bad =
            "(define (problem p) (:domain j) (:objects t0 - step) (:init (now t9)) (:goal (and)))";
        assert!(check_problem(bad, &sig).is_err());
        let bad = "(define (problem p) (:domain j) (:objects t0 - step) (:init (now t0 t0)) (:goal (and)))";
        assert!(check_problem(bad, &sig).is_err());
        let good = "(define (problem p) (:domain j) (:objects t0 - step) (:init (now t0)) (:goal (and (now t0))))";
        check_problem(good, &sig).unwrap();
    }
}
