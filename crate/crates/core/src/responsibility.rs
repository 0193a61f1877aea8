//! Attribution and anticipation of responsibility.
//!
//! Every quantifier ranges over plans of the horizon under analysis.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::judge::{agents_of, Coalition, Judge};
use crate::model::State;
use crate::plan::JointPlan;
use crate::ppd::Ppd;
use crate::symbols::AgentId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ResponsibilityKind {
    Car,
    Cpr,
    Ccr,
    Aar,
}

impl ResponsibilityKind {
    pub const ALL: [ResponsibilityKind; 4] = [
        ResponsibilityKind::Car,
        ResponsibilityKind::Cpr,
        ResponsibilityKind::Ccr,
        ResponsibilityKind::Aar,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ResponsibilityKind::Car => "CAR",
            ResponsibilityKind::Cpr => "CPR",
            ResponsibilityKind::Ccr => "CCR",
            ResponsibilityKind::Aar => "AAR",
        }
    }
}

impl fmt::Display for ResponsibilityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ResponsibilityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ResponsibilityKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown responsibility kind `{s}`")))
    }
}

/// Evidence for a verdict. Which fields are set depends on the query:
/// anticipation fills `state` and `plan`, the inner attribution fills
/// `coalition` and `counter_plan`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Witness {
    pub state: Option<State>,
    pub plan: Option<JointPlan>,
    pub coalition: Option<Vec<AgentId>>,
    /// A full plan on which the outcome fails.
    pub counter_plan: Option<JointPlan>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn no() -> Self {
        Verdict {
            holds: false,
            witness: None,
        }
    }

    pub fn yes(witness: Witness) -> Self {
        Verdict {
            holds: true,
            witness: Some(witness),
        }
    }
}

fn counter(judge: &Judge, idx: u64) -> Witness {
    Witness {
        counter_plan: Some(judge.decode(idx)),
        ..Witness::default()
    }
}

impl Judge<'_> {
    /// Attribution for `agent` on the full plan `idx` from `s`.
    pub fn attribute(
        &self,
        kind: ResponsibilityKind,
        agent: AgentId,
        idx: u64,
        s: State,
    ) -> Result<Verdict> {
        self.check_agent(agent)?;
        let me: Coalition = 1 << agent.index();
        match kind {
            ResponsibilityKind::Car => self.car(me, idx, s),
            ResponsibilityKind::Aar => {
                let car = self.car(me, idx, s)?;
                if !car.holds {
                    return Ok(car);
                }
                for &s1 in self.epistemic(agent) {
                    if !self.all_satisfy(s1, idx, me)? {
                        return Ok(Verdict::no());
                    }
                }
                Ok(car)
            }
            ResponsibilityKind::Cpr => {
                if !self.holds(s, idx)? {
                    return Ok(Verdict::no());
                }
                let others = self.all_agents() & !me;
                Ok(match self.first_violation(s, idx, others)? {
                    Some(v) => Verdict::yes(counter(self, v)),
                    None => Verdict::no(),
                })
            }
            ResponsibilityKind::Ccr => {
                if !self.holds(s, idx)? {
                    return Ok(Verdict::no());
                }
                for j in coalitions_containing(self.num_agents(), agent) {
                    if !self.all_satisfy(s, idx, j)? {
                        continue;
                    }
                    if let Some(v) = self.first_violation(s, idx, j & !me)? {
                        return Ok(Verdict::yes(Witness {
                            coalition: Some(agents_of(j)),
                            ..counter(self, v)
                        }));
                    }
                }
                Ok(Verdict::no())
            }
        }
    }

    fn car(&self, me: Coalition, idx: u64, s: State) -> Result<Verdict> {
        if !self.all_satisfy(s, idx, me)? {
            return Ok(Verdict::no());
        }
        Ok(match self.first_violation(s, 0, 0)? {
            Some(v) => Verdict::yes(counter(self, v)),
            None => Verdict::no(),
        })
    }

    /// Anticipation for `agent` committing to its sequence number `seq`.
    pub fn anticipate(
        &self,
        kind: ResponsibilityKind,
        agent: AgentId,
        seq: u64,
    ) -> Result<Verdict> {
        self.check_agent(agent)?;
        let me: Coalition = 1 << agent.index();
        let base = self.individual_base(agent, seq);
        // CAR and AAR depend only on the agent's own sequence, so the first
        // completion decides them.
        let only_first = matches!(kind, ResponsibilityKind::Car | ResponsibilityKind::Aar);
        for &s1 in self.epistemic(agent) {
            for idx in self.space().completions(base, me) {
                let v = self.attribute(kind, agent, idx, s1)?;
                if v.holds {
                    let inner = v.witness.unwrap_or_default();
                    return Ok(Verdict::yes(Witness {
                        state: Some(s1),
                        plan: Some(self.decode(idx)),
                        ..inner
                    }));
                }
                if only_first {
                    break;
                }
            }
        }
        Ok(Verdict::no())
    }

    /// The one-shot form of anticipated AAR: the outcome is guaranteed from
    /// every possible start state and avoidable from one of them.
    pub fn anticipate_aar_direct(&self, agent: AgentId, seq: u64) -> Result<Verdict> {
        self.check_agent(agent)?;
        let me: Coalition = 1 << agent.index();
        let base = self.individual_base(agent, seq);
        for &s1 in self.epistemic(agent) {
            if !self.all_satisfy(s1, base, me)? {
                return Ok(Verdict::no());
            }
        }
        for &s2 in self.epistemic(agent) {
            if let Some(v) = self.first_violation(s2, 0, 0)? {
                return Ok(Verdict::yes(Witness {
                    state: Some(s2),
                    ..counter(self, v)
                }));
            }
        }
        Ok(Verdict::no())
    }

    /// Whether the outcome holds on every full plan from `s`; otherwise the
    /// first violating plan.
    pub fn inevitable(&self, s: State) -> Result<Verdict> {
        Ok(match self.first_violation(s, 0, 0)? {
            None => Verdict::yes(Witness::default()),
            Some(v) => Verdict {
                holds: false,
                witness: Some(counter(self, v)),
            },
        })
    }

    /// Whether no change to `agent`'s own actions in plan `idx` changes the
    /// outcome from `s`.
    pub fn powerless(&self, agent: AgentId, idx: u64, s: State) -> Result<bool> {
        self.check_agent(agent)?;
        let others = self.all_agents() & !(1 << agent.index());
        let value = self.holds(s, idx)?;
        for alt in self.space().completions(idx, others) {
            if self.holds(s, alt)? != value {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// First sequence number for `agent` that does not anticipate `kind`.
    pub fn find_plan_avoiding(
        &self,
        kind: ResponsibilityKind,
        agent: AgentId,
    ) -> Result<Option<u64>> {
        let count = self.space().individual_size().unwrap_or(0);
        for seq in 0..count {
            if !self.anticipate(kind, agent, seq)?.holds {
                return Ok(Some(seq));
            }
        }
        Ok(None)
    }

    pub(crate) fn check_agent(&self, agent: AgentId) -> Result<()> {
        if agent.index() >= self.num_agents() {
            return Err(crate::symbols::undeclared_id(
                crate::error::SymbolKind::Agent,
                agent.0,
            ));
        }
        Ok(())
    }
}

/// Coalitions containing `agent`, by size and then lexicographically by
/// their sorted member lists.
pub(crate) fn coalitions_containing(n: usize, agent: AgentId) -> Vec<Coalition> {
    let me = 1u64 << agent.index();
    let mut out: Vec<Coalition> = (0..1u64 << n).filter(|m| m & me != 0).collect();
    out.sort_by_key(|&m| (m.count_ones(), agents_of(m)));
    out
}

fn individual(plan: &JointPlan, agent: AgentId) -> Result<&[crate::symbols::ActionId]> {
    let mut coalition = plan.coalition();
    match (coalition.next(), coalition.next()) {
        (Some(a), None) if a == agent => Ok(plan.seq(a).unwrap_or_default()),
        _ => Err(Error::invalid(
            "an individual plan for the queried agent is required",
        )),
    }
}

/// Does `agent` bear `kind` for `omega` in the full plan `plan` from `s0`?
pub fn attribute(
    kind: ResponsibilityKind,
    agent: AgentId,
    plan: &JointPlan,
    s0: State,
    ppd: &Ppd,
    omega: &Formula,
) -> Result<Verdict> {
    ppd.check_agent(agent)?;
    let judge = Judge::new(ppd, omega, plan.horizon(), &[s0])?;
    let idx = judge.index_of(plan)?;
    judge.attribute(kind, agent, idx, s0)
}

/// Does `agent` anticipate `kind` for `omega` when committing to the
/// individual plan `plan`?
pub fn anticipate(
    kind: ResponsibilityKind,
    agent: AgentId,
    plan: &JointPlan,
    ppd: &Ppd,
    omega: &Formula,
) -> Result<Verdict> {
    ppd.check_agent(agent)?;
    let seq = individual(plan, agent)?;
    let judge = Judge::new(ppd, omega, plan.horizon(), &[])?;
    judge.partial_index(plan)?;
    judge.anticipate(kind, agent, judge.space().individual_index(seq))
}

pub fn anticipate_aar_direct(
    agent: AgentId,
    plan: &JointPlan,
    ppd: &Ppd,
    omega: &Formula,
) -> Result<Verdict> {
    ppd.check_agent(agent)?;
    let seq = individual(plan, agent)?;
    let judge = Judge::new(ppd, omega, plan.horizon(), &[])?;
    judge.partial_index(plan)?;
    judge.anticipate_aar_direct(agent, judge.space().individual_index(seq))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coalition_order() {
        let order = coalitions_containing(3, AgentId(1));
        assert_eq!(order, vec![0b010, 0b011, 0b110, 0b111]);
        assert_eq!(coalitions_containing(1, AgentId(0)), vec![1]);
    }

    #[test]
    fn kind_names() {
        for k in ResponsibilityKind::ALL {
            assert_eq!(k.as_str().parse::<ResponsibilityKind>().unwrap(), k);
        }
        assert_eq!(
            "cpr".parse::<ResponsibilityKind>().unwrap(),
            ResponsibilityKind::Cpr
        );
        assert!("XYZ".parse::<ResponsibilityKind>().is_err());
    }
}
