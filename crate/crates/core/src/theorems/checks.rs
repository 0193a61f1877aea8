//! Exhaustive per-item checks of the structural properties of
//! responsibility.

use std::fmt;

use crate::error::Result;
use crate::format::{serialize_domain, serialize_plan};
use crate::judge::Judge;
use crate::model::State;
use crate::plan::JointPlan;
use crate::responsibility::ResponsibilityKind::{self, Aar, Car, Ccr, Cpr};
use crate::symbols::AgentId;

use super::generate::CorpusItem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    /// An outcome that occurs but was avoidable has a contributor.
    CcrCompleteness,
    /// The implication diagram between attribution and anticipation.
    Implications,
    /// Every agent has a plan that does not anticipate AAR.
    AarAvoidable,
    /// Once AAR is anticipatable, avoiding anticipated CPR for `¬ω` is the
    /// same as anticipating AAR for `ω`.
    AarCprDuality,
    /// Plans that avoid anticipated CPR for `¬ω` compose into a plan that
    /// achieves `ω` unless `¬ω` is inevitable.
    Coordination,
    /// Anticipated AAR matches its one-shot definition.
    AarDirect,
    /// Anticipated CCR and anticipated CPR coincide.
    CcrCpr,
    /// Inevitable outcomes carry no responsibility.
    Exclusion,
    /// With one agent who knows the start, anticipation is attribution.
    SingleAgent,
}

impl Check {
    pub const ALL: [Check; 9] = [
        Check::CcrCompleteness,
        Check::Implications,
        Check::AarAvoidable,
        Check::AarCprDuality,
        Check::Coordination,
        Check::AarDirect,
        Check::CcrCpr,
        Check::Exclusion,
        Check::SingleAgent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::CcrCompleteness => "ccr-completeness",
            Check::Implications => "implications",
            Check::AarAvoidable => "aar-avoidable",
            Check::AarCprDuality => "aar-cpr-duality",
            Check::Coordination => "coordination",
            Check::AarDirect => "aar-direct",
            Check::CcrCpr => "ccr-cpr",
            Check::Exclusion => "exclusion",
            Check::SingleAgent => "single-agent",
        }
    }

    pub fn from_name(name: &str) -> Option<Check> {
        Check::ALL.into_iter().find(|c| c.name() == name)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    /// The property's premise never held on this item.
    Vacuous,
    Fail,
}

/// The tuple on which a check failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub reason: String,
    pub agent: Option<AgentId>,
    pub state: Option<State>,
    pub plan: Option<JointPlan>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub check: Check,
    pub seed: u64,
    pub status: Status,
    pub counterexample: Option<Counterexample>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Renders a counterexample as replayable text: the domain and plan in
/// their file formats plus the query parameters.
pub fn render_counterexample(item: &CorpusItem, cx: &Counterexample) -> String {
    let sym = item.ppd.symbols();
    let mut out = format!("reason: {}\n", cx.reason);
    if let Some(a) = cx.agent {
        out += &format!("agent: {}\n", sym.agent_name(a));
    }
    if let Some(s) = cx.state {
        out += &format!("start: {}\n", s.display(sym));
    }
    out += &format!("outcome: {}\n", item.omega.display(sym));
    out += &format!("horizon: {}\n", item.horizon);
    out += "--- domain\n";
    out += &serialize_domain(&item.ppd);
    if let Some(p) = &cx.plan {
        out += "--- plan\n";
        out += &serialize_plan(p, sym);
    }
    out
}

/// Anticipation verdicts for every kind, agent and individual sequence.
struct Anticipations {
    // [kind][agent][seq]
    table: Vec<Vec<Vec<bool>>>,
}

impl Anticipations {
    fn get(&self, kind: ResponsibilityKind, agent: usize, seq: u64) -> bool {
        self.table[kind as usize][agent][seq as usize]
    }
}

struct Ctx<'a> {
    item: &'a CorpusItem,
    judge: Judge<'a>,
    not_judge: Judge<'a>,
    ant: Anticipations,
    /// Anticipated CPR for `¬ω`, per agent and sequence.
    ant_not_cpr: Vec<Vec<bool>>,
    seqs: u64,
}

impl<'a> Ctx<'a> {
    fn new(item: &'a CorpusItem) -> Result<Self> {
        let judge = Judge::new(&item.ppd, &item.omega, item.horizon, &[])?;
        let not_judge = judge.negated();
        let n = judge.num_agents();
        let seqs = judge.space().individual_size().unwrap_or(0);
        let mut table = Vec::new();
        for kind in ResponsibilityKind::ALL {
            let mut per_agent = Vec::new();
            for i in 0..n {
                let row = (0..seqs)
                    .map(|s| {
                        judge
                            .anticipate(kind, AgentId(i as u16), s)
                            .map(|v| v.holds)
                    })
                    .collect::<Result<Vec<_>>>()?;
                per_agent.push(row);
            }
            table.push(per_agent);
        }
        let ant_not_cpr = (0..n)
            .map(|i| {
                (0..seqs)
                    .map(|s| {
                        not_judge
                            .anticipate(Cpr, AgentId(i as u16), s)
                            .map(|v| v.holds)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Ctx {
            item,
            judge,
            not_judge,
            ant: Anticipations { table },
            ant_not_cpr,
            seqs,
        })
    }

    fn agents(&self) -> impl Iterator<Item = AgentId> {
        (0..self.judge.num_agents() as u16).map(AgentId)
    }

    fn s0(&self) -> State {
        self.item.ppd.s0()
    }

    fn seq_of(&self, idx: u64, agent: AgentId) -> u64 {
        self.judge.space().agent_part(idx, agent)
    }

    fn individual(&self, agent: AgentId, seq: u64) -> JointPlan {
        JointPlan::individual(agent, self.judge.space().individual_seq(seq))
    }

    fn result(&self, check: Check, status: Status) -> CheckResult {
        CheckResult {
            check,
            seed: self.item.seed,
            status,
            counterexample: None,
        }
    }

    fn fail(
        &self,
        check: Check,
        reason: String,
        agent: Option<AgentId>,
        state: Option<State>,
        plan: Option<JointPlan>,
    ) -> CheckResult {
        CheckResult {
            check,
            seed: self.item.seed,
            status: Status::Fail,
            counterexample: Some(Counterexample {
                reason,
                agent,
                state,
                plan,
            }),
        }
    }

    fn ccr_completeness(&self) -> Result<CheckResult> {
        let c = Check::CcrCompleteness;
        let s0 = self.s0();
        if self.judge.inevitable(s0)?.holds {
            return Ok(self.result(c, Status::Vacuous));
        }
        let all = self.judge.all_agents();
        let mut premise = false;
        for idx in 0..self.judge.plan_count() {
            if !self.judge.holds(s0, idx)? {
                continue;
            }
            premise = true;
            let plan = || Some(self.judge.decode(idx));
            let mut someone = false;
            for i in self.agents() {
                someone |= self.judge.attribute(Ccr, i, idx, s0)?.holds;
            }
            if !someone {
                return Ok(self.fail(
                    c,
                    "outcome occurred and was avoidable, but nobody bears CCR".into(),
                    None,
                    Some(s0),
                    plan(),
                ));
            }
            // dropping agents one at a time, sufficiency is lost at some
            // step and the dropped agent is a contributor
            let n = self.judge.num_agents();
            let mut switched = false;
            for m in 0..n {
                let j = all & !((1u64 << m) - 1);
                let rest = j & !(1 << m);
                if self.judge.all_satisfy(s0, idx, j)? && !self.judge.all_satisfy(s0, idx, rest)? {
                    let agent = AgentId(m as u16);
                    if !self.judge.attribute(Ccr, agent, idx, s0)?.holds {
                        return Ok(self.fail(
                            c,
                            "agent at the sufficiency switch does not bear CCR".into(),
                            Some(agent),
                            Some(s0),
                            plan(),
                        ));
                    }
                    switched = true;
                    break;
                }
            }
            if !switched {
                return Ok(self.fail(
                    c,
                    "no sufficiency switch along the coalition chain".into(),
                    None,
                    Some(s0),
                    plan(),
                ));
            }
        }
        Ok(self.result(
            c,
            if premise {
                Status::Pass
            } else {
                Status::Vacuous
            },
        ))
    }

    fn implications(&self) -> Result<CheckResult> {
        let c = Check::Implications;
        let s0 = self.s0();
        for idx in 0..self.judge.plan_count() {
            for i in self.agents() {
                let mut attr = [false; 4];
                for kind in ResponsibilityKind::ALL {
                    attr[kind as usize] = self.judge.attribute(kind, i, idx, s0)?.holds;
                }
                let bad = |reason: &str| {
                    Ok(self.fail(
                        c,
                        reason.to_string(),
                        Some(i),
                        Some(s0),
                        Some(self.judge.decode(idx)),
                    ))
                };
                if attr[Aar as usize] && !attr[Car as usize] {
                    return bad("AAR without CAR");
                }
                if attr[Car as usize] && !attr[Ccr as usize] {
                    return bad("CAR without CCR");
                }
                if attr[Cpr as usize] && !attr[Ccr as usize] {
                    return bad("CPR without CCR");
                }
                let seq = self.seq_of(idx, i);
                for kind in ResponsibilityKind::ALL {
                    if attr[kind as usize] && !self.ant.get(kind, i.index(), seq) {
                        return bad(&format!("{kind} attributed but not anticipated"));
                    }
                }
            }
        }
        for i in self.agents() {
            for seq in 0..self.seqs {
                let a = |k| self.ant.get(k, i.index(), seq);
                let arrows = [(Aar, Car), (Car, Ccr), (Cpr, Ccr), (Ccr, Cpr)];
                for (from, to) in arrows {
                    if a(from) && !a(to) {
                        return Ok(self.fail(
                            c,
                            format!("anticipated {from} without anticipated {to}"),
                            Some(i),
                            None,
                            Some(self.individual(i, seq)),
                        ));
                    }
                }
            }
        }
        Ok(self.result(c, Status::Pass))
    }

    fn aar_avoidable(&self) -> Result<CheckResult> {
        let c = Check::AarAvoidable;
        for i in self.agents() {
            if (0..self.seqs).all(|s| self.ant.get(Aar, i.index(), s)) {
                return Ok(self.fail(c, "every plan anticipates AAR".into(), Some(i), None, None));
            }
        }
        Ok(self.result(c, Status::Pass))
    }

    fn aar_cpr_duality(&self) -> Result<CheckResult> {
        let c = Check::AarCprDuality;
        let mut premise = false;
        for i in self.agents() {
            if !(0..self.seqs).any(|s| self.ant.get(Aar, i.index(), s)) {
                continue;
            }
            premise = true;
            for seq in 0..self.seqs {
                let avoids_cpr = !self.ant_not_cpr[i.index()][seq as usize];
                if avoids_cpr != self.ant.get(Aar, i.index(), seq) {
                    return Ok(self.fail(
                        c,
                        format!(
                            "not anticipating CPR for the negation is {avoids_cpr}, anticipating AAR is {}",
                            !avoids_cpr
                        ),
                        Some(i),
                        None,
                        Some(self.individual(i, seq)),
                    ));
                }
            }
        }
        Ok(self.result(
            c,
            if premise {
                Status::Pass
            } else {
                Status::Vacuous
            },
        ))
    }

    fn coordination(&self) -> Result<CheckResult> {
        let c = Check::Coordination;
        let s0 = self.s0();
        if self.not_judge.inevitable(s0)?.holds {
            return Ok(self.result(c, Status::Vacuous));
        }
        let mut premise = false;
        for idx in 0..self.judge.plan_count() {
            let careful = self
                .agents()
                .all(|i| !self.ant_not_cpr[i.index()][self.seq_of(idx, i) as usize]);
            if !careful {
                continue;
            }
            premise = true;
            if !self.judge.holds(s0, idx)? {
                return Ok(self.fail(
                    c,
                    "no agent anticipates CPR for the negation, yet the outcome fails".into(),
                    None,
                    Some(s0),
                    Some(self.judge.decode(idx)),
                ));
            }
        }
        Ok(self.result(
            c,
            if premise {
                Status::Pass
            } else {
                Status::Vacuous
            },
        ))
    }

    fn aar_direct(&self) -> Result<CheckResult> {
        let c = Check::AarDirect;
        for i in self.agents() {
            for seq in 0..self.seqs {
                let direct = self.judge.anticipate_aar_direct(i, seq)?.holds;
                if direct != self.ant.get(Aar, i.index(), seq) {
                    return Ok(self.fail(
                        c,
                        format!("direct form says {direct}, modular form says {}", !direct),
                        Some(i),
                        None,
                        Some(self.individual(i, seq)),
                    ));
                }
            }
        }
        Ok(self.result(c, Status::Pass))
    }

    fn ccr_cpr(&self) -> Result<CheckResult> {
        let c = Check::CcrCpr;
        for i in self.agents() {
            for seq in 0..self.seqs {
                let ccr = self.ant.get(Ccr, i.index(), seq);
                if ccr != self.ant.get(Cpr, i.index(), seq) {
                    return Ok(self.fail(
                        c,
                        format!("anticipated CCR is {ccr}, anticipated CPR is {}", !ccr),
                        Some(i),
                        None,
                        Some(self.individual(i, seq)),
                    ));
                }
            }
        }
        Ok(self.result(c, Status::Pass))
    }

    fn exclusion(&self) -> Result<CheckResult> {
        let c = Check::Exclusion;
        let mut premise = false;
        for s in self.item.ppd.start_states() {
            if !self.judge.inevitable(s)?.holds {
                continue;
            }
            premise = true;
            for idx in 0..self.judge.plan_count() {
                for i in self.agents() {
                    for kind in ResponsibilityKind::ALL {
                        if self.judge.attribute(kind, i, idx, s)?.holds {
                            return Ok(self.fail(
                                c,
                                format!("{kind} attributed for an inevitable outcome"),
                                Some(i),
                                Some(s),
                                Some(self.judge.decode(idx)),
                            ));
                        }
                    }
                }
            }
        }
        Ok(self.result(
            c,
            if premise {
                Status::Pass
            } else {
                Status::Vacuous
            },
        ))
    }

    fn single_agent(&self) -> Result<CheckResult> {
        let c = Check::SingleAgent;
        let lone = AgentId(0);
        if self.judge.num_agents() != 1 || self.judge.epistemic(lone) != [self.s0()] {
            return Ok(self.result(c, Status::Vacuous));
        }
        for idx in 0..self.judge.plan_count() {
            for kind in ResponsibilityKind::ALL {
                let attr = self.judge.attribute(kind, lone, idx, self.s0())?.holds;
                if attr != self.ant.get(kind, 0, idx) {
                    return Ok(self.fail(
                        c,
                        format!("{kind}: attribution is {attr}, anticipation is {}", !attr),
                        Some(lone),
                        Some(self.s0()),
                        Some(self.judge.decode(idx)),
                    ));
                }
            }
        }
        Ok(self.result(c, Status::Pass))
    }

    fn run(&self, check: Check) -> Result<CheckResult> {
        match check {
            Check::CcrCompleteness => self.ccr_completeness(),
            Check::Implications => self.implications(),
            Check::AarAvoidable => self.aar_avoidable(),
            Check::AarCprDuality => self.aar_cpr_duality(),
            Check::Coordination => self.coordination(),
            Check::AarDirect => self.aar_direct(),
            Check::CcrCpr => self.ccr_cpr(),
            Check::Exclusion => self.exclusion(),
            Check::SingleAgent => self.single_agent(),
        }
    }
}

/// Runs the given checks on one item.
pub fn check_item(item: &CorpusItem, checks: &[Check]) -> Result<Vec<CheckResult>> {
    let ctx = Ctx::new(item)?;
    checks.iter().map(|c| ctx.run(*c)).collect()
}
