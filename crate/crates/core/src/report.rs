//! Text rendering of verdicts and plan-search results.
//!
//! A verdict renders as a header line followed by `--- <field>` sections,
//! plans in plan-file format so they can be fed back as input.

use std::fmt::Write as _;

use crate::plan::JointPlan;
use crate::responsibility::{ResponsibilityKind, Verdict};
use crate::search::Coordination;
use crate::symbols::{AgentId, Symbols};

pub fn render_verdict(
    kind: ResponsibilityKind,
    agent: AgentId,
    verdict: &Verdict,
    symbols: &Symbols,
) -> String {
    let mut out = format!(
        "{kind} agent={} holds={}\n",
        symbols.agent_name(agent),
        verdict.holds
    );
    if let Some(w) = &verdict.witness {
        if let Some(s) = w.state {
            writeln!(out, "--- start\n{}", s.display(symbols)).unwrap();
        }
        if let Some(p) = &w.plan {
            write!(out, "--- plan\n{}", p.display(symbols)).unwrap();
        }
        if let Some(c) = &w.coalition {
            let names: Vec<&str> = c.iter().map(|a| symbols.agent_name(*a)).collect();
            writeln!(out, "--- coalition\n{}", names.join(" ")).unwrap();
        }
        if let Some(p) = &w.counter_plan {
            write!(out, "--- counter-plan\n{}", p.display(symbols)).unwrap();
        }
    }
    out
}

pub fn render_plan_choice(plan: Option<&JointPlan>, symbols: &Symbols) -> String {
    match plan {
        Some(p) => p.display(symbols).to_string(),
        None => "none\n".to_string(),
    }
}

pub fn render_coordination(c: &Coordination, symbols: &Symbols) -> String {
    let mut out = String::new();
    for (agent, choice) in symbols.agents().zip(&c.choices) {
        let line = match choice {
            Some(p) => p.display(symbols).to_string(),
            None => format!("{}: none\n", symbols.agent_name(agent)),
        };
        write!(out, "choice {line}").unwrap();
    }
    match (&c.joint, c.omega_holds) {
        (Some(joint), Some(holds)) => {
            write!(out, "--- joint\n{}", joint.display(symbols)).unwrap();
            writeln!(out, "omega holds={holds}").unwrap();
        }
        _ => out += "joint none\n",
    }
    out
}

/// Splits rendered output into its `--- <field>` sections.
pub fn sections(text: &str) -> Vec<(&str, String)> {
    let mut out: Vec<(&str, String)> = Vec::new();
    for line in text.lines() {
        if let Some(name) = line.strip_prefix("--- ") {
            out.push((name, String::new()));
        } else if let Some((_, body)) = out.last_mut() {
            body.push_str(line);
            body.push('\n');
        }
    }
    out
}
