//! Text formats for domains and plans.
//!
//! A domain file is line oriented:
//!
//! ```text
//! # comment
//! agents: A1 A2
//! props: crossed1 crossed2 collision
//! actions: F
//! objects table: table1 table2
//! init: {}
//! epistemic A1: {} {crossed2}
//! effect+ A1 F crossed1: !(!crossed2 & do(A2,F)) & !collision
//! effect- A1 F crossed1: false
//! ```
//!
//! Declarations may appear in any order; they are read before the other
//! lines. `skip` is implicit. An agent without an `epistemic` line knows the
//! initial state. `objects` lines only matter for PDDL export.
//!
//! A plan file has one `AGENT: act act ...` line per agent.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{ActionTheory, Sign, State};
use crate::parse::parse_pl;
use crate::plan::JointPlan;
use crate::ppd::Ppd;
use crate::symbols::{AgentId, ObjectDecl, Symbols};

/// A non-fatal remark about a domain file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct ParsedDomain {
    pub ppd: Ppd,
    pub warnings: Vec<Warning>,
}

struct Line<'a> {
    number: usize,
    head: &'a str,
    body: &'a str,
}

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("").trim();
        (!content.is_empty()).then_some((i + 1, content))
    })
}

fn split_line<'a>(number: usize, content: &'a str, path: &str) -> Result<Line<'a>> {
    let (head, body) = content
        .split_once(':')
        .ok_or_else(|| Error::invalid("expected `section: ...`").at_line(path, number))?;
    Ok(Line {
        number,
        head: head.trim(),
        body: body.trim(),
    })
}

/// Parses a domain file. `path` is only used in messages.
pub fn parse_domain(text: &str, path: &str) -> Result<ParsedDomain> {
    let mut parsed = Vec::new();
    for (number, content) in lines(text) {
        parsed.push(split_line(number, content, path)?);
    }

    let mut agents: Option<(usize, Vec<&str>)> = None;
    let mut props: Option<(usize, Vec<&str>)> = None;
    let mut actions: Option<(usize, Vec<&str>)> = None;
    let mut objects = Vec::new();
    let mut rest = Vec::new();
    for line in &parsed {
        let words: Vec<&str> = line.body.split_whitespace().collect();
        let slot = match line.head {
            "agents" => &mut agents,
            "props" => &mut props,
            "actions" => &mut actions,
            h if h.starts_with("objects") => {
                let ty = h["objects".len()..].trim();
                if ty.is_empty() || ty.contains(char::is_whitespace) {
                    return Err(
                        Error::invalid("expected `objects <type>: ...`").at_line(path, line.number)
                    );
                }
                objects.extend(words.iter().map(|w| {
                    (
                        line.number,
                        ObjectDecl {
                            name: w.to_string(),
                            ty: ty.to_string(),
                        },
                    )
                }));
                continue;
            }
            _ => {
                rest.push(line);
                continue;
            }
        };
        if slot.is_some() {
            return Err(Error::invalid(format!("`{}` declared twice", line.head))
                .at_line(path, line.number));
        }
        *slot = Some((line.number, words));
    }

    let decl_line = |d: &Option<(usize, Vec<&str>)>| d.as_ref().map_or(1, |d| d.0);
    fn names<'a>(d: &Option<(usize, Vec<&'a str>)>) -> Vec<&'a str> {
        d.as_ref().map(|d| d.1.clone()).unwrap_or_default()
    }
    let (props_v, agents_v, actions_v) = (names(&props), names(&agents), names(&actions));
    let symbols = Symbols::new(&props_v, &agents_v, &actions_v).map_err(|e| {
        let line = match &e {
            Error::Undeclared { kind, .. } | Error::Duplicate { kind, .. } => match kind {
                crate::error::SymbolKind::Prop => decl_line(&props),
                crate::error::SymbolKind::Action => decl_line(&actions),
                _ => decl_line(&agents),
            },
            _ => decl_line(&agents),
        };
        e.at_line(path, line)
    })?;
    let first_object_line = objects.first().map_or(1, |o| o.0);
    let symbols = symbols
        .with_objects(objects.into_iter().map(|o| o.1).collect())
        .map_err(|e| e.at_line(path, first_object_line))?;

    let mut warnings = Vec::new();
    let mut theory = ActionTheory::new(&symbols);
    let mut init: Option<State> = None;
    let mut epistemic: BTreeMap<AgentId, (usize, Vec<State>)> = BTreeMap::new();
    for line in rest {
        let at = |e: Error| e.at_line(path, line.number);
        let words: Vec<&str> = line.head.split_whitespace().collect();
        match words.as_slice() {
            ["init"] => {
                if init.is_some() {
                    return Err(at(Error::invalid("`init` declared twice")));
                }
                let sets = parse_state_sets(line.body, &symbols).map_err(at)?;
                if sets.len() != 1 {
                    return Err(at(Error::invalid("`init` takes exactly one `{...}` set")));
                }
                init = Some(sets[0]);
            }
            ["epistemic", agent] => {
                let id = symbols.agent(agent).map_err(at)?;
                if epistemic.contains_key(&id) {
                    return Err(at(Error::invalid(format!(
                        "second epistemic line for {agent}"
                    ))));
                }
                let sets = parse_state_sets(line.body, &symbols).map_err(at)?;
                if sets.is_empty() {
                    return Err(at(Error::invalid(
                        "an epistemic set needs at least one state",
                    )));
                }
                epistemic.insert(id, (line.number, sets));
            }
            [sign @ ("effect+" | "effect-"), agent, action, prop] => {
                let sign = if *sign == "effect+" {
                    Sign::Pos
                } else {
                    Sign::Neg
                };
                let agent = symbols.agent(agent).map_err(at)?;
                let action = symbols.action(action).map_err(at)?;
                let prop = symbols.prop(prop).map_err(at)?;
                if theory.get(sign, agent, action, prop).is_some() {
                    return Err(at(Error::invalid("effect entry given twice")));
                }
                let f = parse_pl(line.body, &symbols).map_err(at)?;
                theory.set(sign, agent, action, prop, f).map_err(at)?;
            }
            _ => {
                return Err(at(Error::invalid(format!(
                    "unknown section `{}`",
                    line.head
                ))))
            }
        }
    }

    let s0 = init.ok_or_else(|| Error::invalid("missing `init` line").at_line(path, 1))?;
    let mut sets = Vec::new();
    for agent in symbols.agents() {
        let Some((number, states)) = epistemic.remove(&agent) else {
            sets.push(vec![s0]);
            continue;
        };
        let mut unique: Vec<State> = Vec::new();
        for s in states {
            if unique.contains(&s) {
                warnings.push(Warning {
                    line: number,
                    message: format!(
                        "state {} listed twice; keeping the first",
                        s.display(&symbols)
                    ),
                });
            } else {
                unique.push(s);
            }
        }
        if !unique.contains(&s0) {
            warnings.push(Warning {
                line: number,
                message: format!(
                    "epistemic set of {} lacks the initial state; adding it",
                    symbols.agent_name(agent)
                ),
            });
            unique.push(s0);
        }
        sets.push(unique);
    }
    let ppd = Ppd::new(symbols, theory, s0, sets).map_err(|e| e.at_line(path, 1))?;
    Ok(ParsedDomain { ppd, warnings })
}

/// Parses a single state written `{a b}`.
pub fn parse_state(text: &str, symbols: &Symbols) -> Result<State> {
    match parse_state_sets(text, symbols)?[..] {
        [s] => Ok(s),
        _ => Err(Error::invalid("expected exactly one `{...}` state")),
    }
}

/// Parses `{a b} {} {c}`; commas between names are allowed.
fn parse_state_sets(text: &str, symbols: &Symbols) -> Result<Vec<State>> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let inner = rest
            .strip_prefix('{')
            .and_then(|r| r.split_once('}'))
            .ok_or_else(|| Error::invalid(format!("expected `{{...}}` at `{rest}`")))?;
        let mut s = State::EMPTY;
        for name in inner
            .0
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|w| !w.is_empty())
        {
            let p = symbols.prop(name)?;
            if s.contains(p) {
                return Err(Error::invalid(format!("`{name}` repeated in a state")));
            }
            s = s.with(p);
        }
        out.push(s);
        rest = inner.1.trim_start();
    }
    Ok(out)
}

/// Canonical text of a domain; parsing it gives back the same domain.
pub fn serialize_domain(ppd: &Ppd) -> String {
    let sym = ppd.symbols();
    let mut out = String::new();
    let join = |it: Vec<&str>| it.join(" ");
    writeln!(
        out,
        "agents: {}",
        join(sym.agents().map(|a| sym.agent_name(a)).collect())
    )
    .unwrap();
    writeln!(
        out,
        "props: {}",
        join(sym.props().map(|p| sym.prop_name(p)).collect())
    )
    .unwrap();
    writeln!(
        out,
        "actions: {}",
        join(sym.actions().skip(1).map(|a| sym.action_name(a)).collect())
    )
    .unwrap();
    let mut types: Vec<&str> = Vec::new();
    for o in sym.objects() {
        if !types.contains(&o.ty.as_str()) {
            types.push(&o.ty);
        }
    }
    for ty in types {
        let names: Vec<&str> = sym
            .objects()
            .iter()
            .filter(|o| o.ty == ty)
            .map(|o| o.name.as_str())
            .collect();
        writeln!(out, "objects {ty}: {}", names.join(" ")).unwrap();
    }
    writeln!(out, "init: {}", ppd.s0().display(sym)).unwrap();
    for agent in sym.agents() {
        let sets: Vec<String> = ppd
            .epistemic(agent)
            .iter()
            .map(|s| s.display(sym).to_string())
            .collect();
        writeln!(
            out,
            "epistemic {}: {}",
            sym.agent_name(agent),
            sets.join(" ")
        )
        .unwrap();
    }
    for (sign, tag) in [(Sign::Pos, "effect+"), (Sign::Neg, "effect-")] {
        for (key, f) in ppd.theory().entries(sign) {
            writeln!(
                out,
                "{tag} {} {} {}: {}",
                sym.agent_name(key.agent),
                sym.action_name(key.action),
                sym.prop_name(key.prop),
                f.as_formula().display(sym)
            )
            .unwrap();
        }
    }
    out
}

/// Parses a plan file. Listed agents form the coalition.
pub fn parse_plan(text: &str, path: &str, symbols: &Symbols) -> Result<JointPlan> {
    let mut seqs = BTreeMap::new();
    let mut first_len: Option<usize> = None;
    for (number, content) in lines(text) {
        let line = split_line(number, content, path)?;
        let at = |e: Error| e.at_line(path, number);
        let agent = symbols.agent(line.head).map_err(at)?;
        let seq = line
            .body
            .split_whitespace()
            .map(|a| symbols.action(a))
            .collect::<Result<Vec<_>>>()
            .map_err(at)?;
        if *first_len.get_or_insert(seq.len()) != seq.len() {
            return Err(at(Error::invalid(
                "all plan lines must have the same length",
            )));
        }
        if seqs.insert(agent, seq).is_some() {
            return Err(at(Error::invalid(format!("second line for {}", line.head))));
        }
    }
    JointPlan::new(seqs).map_err(|e| e.at_line(path, 1))
}

pub fn serialize_plan(plan: &JointPlan, symbols: &Symbols) -> String {
    plan.display(symbols).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOMAIN: &str = "\
# two agents
agents: A B
props: p q
actions: go
init: {p}
epistemic B: {q} {p, q}
effect+ A go q: p & !do(B,go)
effect- B go p: true
";

    #[test]
    fn parse_and_warn() {
        let d = parse_domain(DOMAIN, "d.dom").unwrap();
        let sym = d.ppd.symbols();
        assert_eq!(sym.num_actions(), 2);
        assert_eq!(d.ppd.epistemic(AgentId(0)), &[d.ppd.s0()]);
        assert_eq!(d.ppd.epistemic(AgentId(1)).len(), 3);
        assert_eq!(d.warnings.len(), 1);
        assert_eq!(d.warnings[0].line, 6);
    }

    #[test]
    fn serialization_is_a_fixed_point() {
        let d = parse_domain(DOMAIN, "d.dom").unwrap();
        let text = serialize_domain(&d.ppd);
        let again = parse_domain(&text, "d.dom").unwrap();
        assert_eq!(again.ppd, d.ppd);
        assert!(again.warnings.is_empty());
        assert_eq!(serialize_domain(&again.ppd), text);
    }

    #[test]
    fn errors_carry_lines() {
        let bad = DOMAIN.replace("effect- B go p: true", "effect- B go r: true");
        let err = parse_domain(&bad, "d.dom").unwrap_err();
        assert!(matches!(err, Error::File { line: 8, .. }), "{err}");
        let bad = DOMAIN.replace("p & !do(B,go)", "p & X q");
        assert!(matches!(
            parse_domain(&bad, "d.dom").unwrap_err(),
            Error::File { line: 7, .. }
        ));
        let bad = DOMAIN.replace("effect- B go p", "effect- B skip p");
        assert!(matches!(
            parse_domain(&bad, "d.dom").unwrap_err(),
            Error::File { line: 8, .. }
        ));
        let bad = DOMAIN.replace("init: {p}", "");
        assert!(parse_domain(&bad, "d.dom").is_err());
    }

    #[test]
    fn plans_round_trip() {
        let d = parse_domain(DOMAIN, "d.dom").unwrap();
        let sym = d.ppd.symbols();
        let plan = parse_plan("A: go skip\nB: skip go # tail\n", "p.plan", sym).unwrap();
        assert_eq!(plan.horizon(), 2);
        let text = serialize_plan(&plan, sym);
        assert_eq!(text, "A: go skip\nB: skip go\n");
        assert_eq!(parse_plan(&text, "p.plan", sym).unwrap(), plan);
        assert!(parse_plan("A: go\nB: go go\n", "p.plan", sym).is_err());
        assert!(parse_plan("C: go\n", "p.plan", sym).is_err());
    }
}
