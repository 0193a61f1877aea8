//! Bounded plan search: inevitability, powerlessness, plan selection that
//! avoids anticipated responsibility, and coordination.

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::judge::Judge;
use crate::ltlf::CompiledLtl;
use crate::model::{ActionTheory, History, State};
use crate::plan::{JointPlan, PlanSpace, MAX_PLAN_SPACE};
use crate::ppd::Ppd;
use crate::responsibility::{ResponsibilityKind, Verdict};
use crate::symbols::{ActionId, AgentId};

/// Does `omega` hold on the history of every full `k`-plan from `s0`? When
/// it does not, the witness carries the first violating plan.
pub fn is_inevitable(
    omega: &Formula,
    s0: State,
    k: usize,
    theory: &ActionTheory,
) -> Result<Verdict> {
    Judge::from_theory(theory, omega, k, s0)?.inevitable(s0)
}

/// Is the truth of `omega` on `plan` independent of `agent`'s actions?
pub fn is_powerless(
    agent: AgentId,
    plan: &JointPlan,
    s0: State,
    theory: &ActionTheory,
    omega: &Formula,
) -> Result<bool> {
    let judge = Judge::from_theory(theory, omega, plan.horizon(), s0)?;
    let idx = judge.index_of(plan)?;
    judge.powerless(agent, idx, s0)
}

/// The first `k`-sequence for `agent` that does not anticipate `kind` for
/// `omega`, if any.
pub fn find_plan_avoiding_anticipated(
    kind: ResponsibilityKind,
    agent: AgentId,
    ppd: &Ppd,
    omega: &Formula,
    k: usize,
) -> Result<Option<JointPlan>> {
    ppd.check_agent(agent)?;
    let judge = Judge::new(ppd, omega, k, &[])?;
    Ok(judge
        .find_plan_avoiding(kind, agent)?
        .map(|seq| JointPlan::individual(agent, judge.space().individual_seq(seq))))
}

/// Result of letting every agent pick the first plan that does not
/// anticipate passive responsibility for `¬ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coordination {
    /// Per agent, in declaration order.
    pub choices: Vec<Option<JointPlan>>,
    /// Union of the choices, when every agent found one.
    pub joint: Option<JointPlan>,
    /// Truth of `ω` on the joint plan's history from `s0`.
    pub omega_holds: Option<bool>,
}

pub fn coordinate(ppd: &Ppd, omega: &Formula, k: usize) -> Result<Coordination> {
    let judge = Judge::new(ppd, omega, k, &[])?;
    judge.coordinate(ppd.s0())
}

impl Judge<'_> {
    pub fn coordinate(&self, s0: State) -> Result<Coordination> {
        let not_omega = self.negated();
        let mut choices = Vec::new();
        let mut seqs = Vec::new();
        for i in 0..self.num_agents() {
            let agent = AgentId(i as u16);
            let seq = not_omega.find_plan_avoiding(ResponsibilityKind::Cpr, agent)?;
            choices.push(seq.map(|s| JointPlan::individual(agent, self.space().individual_seq(s))));
            seqs.push(seq);
        }
        if seqs.iter().any(Option::is_none) {
            return Ok(Coordination {
                choices,
                joint: None,
                omega_holds: None,
            });
        }
        let idx: u64 = seqs
            .iter()
            .enumerate()
            .map(|(i, s)| self.individual_base(AgentId(i as u16), s.unwrap()))
            .sum();
        Ok(Coordination {
            choices,
            joint: Some(self.decode(idx)),
            omega_holds: Some(self.holds(s0, idx)?),
        })
    }
}

/// A planning problem over a domain's own semantics: find a full plan from
/// `init` that follows the pinned sequences, gives each follower the same
/// sequence as its leader, and whose history satisfies `goal`.
#[derive(Debug, Clone)]
pub struct PlanQuery {
    pub domain: Ppd,
    pub init: State,
    pub horizon: usize,
    pub pins: Vec<(AgentId, Vec<ActionId>)>,
    /// `(leader, follower)` pairs; followers must come after their leader
    /// in agent order.
    pub agreements: Vec<(AgentId, AgentId)>,
    pub goal: Formula,
}

/// The lexicographically least plan solving `query`, if any.
pub fn exists_plan(query: &PlanQuery) -> Result<Option<JointPlan>> {
    let theory = query.domain.theory();
    crate::judge::check_dims(&query.goal, theory)?;
    if !query.init.fits(query.domain.symbols()) {
        return Err(Error::invalid(
            "initial state mentions undeclared propositions",
        ));
    }
    let n = query.domain.num_agents();
    let space = PlanSpace::new(n, theory.num_actions(), query.horizon);
    let block = space
        .individual_size()
        .ok_or_else(|| Error::invalid("plan space too large"))?;

    let mut fixed: Vec<Option<Vec<ActionId>>> = vec![None; n];
    for (agent, seq) in &query.pins {
        query.domain.check_agent(*agent)?;
        if seq.len() != query.horizon || seq.iter().any(|a| a.index() >= theory.num_actions()) {
            return Err(Error::invalid("pinned sequence does not fit the query"));
        }
        fixed[agent.index()] = Some(seq.clone());
    }
    let mut leader: Vec<Option<usize>> = vec![None; n];
    for (l, f) in &query.agreements {
        query.domain.check_agent(*l)?;
        query.domain.check_agent(*f)?;
        if l.index() >= f.index() || fixed[f.index()].is_some() {
            return Err(Error::invalid(
                "an agreement follower must be free and come after its leader",
            ));
        }
        leader[f.index()] = Some(l.index());
    }
    let free: Vec<usize> = (0..n)
        .filter(|&a| fixed[a].is_none() && leader[a].is_none())
        .collect();
    let total = u32::try_from(free.len())
        .ok()
        .and_then(|e| block.checked_pow(e))
        .filter(|t| *t <= MAX_PLAN_SPACE)
        .ok_or_else(|| Error::invalid("plan space too large for exhaustive search"))?;

    let compiled = CompiledLtl::new(&query.goal);
    let mut table = Vec::new();
    for counter in 0..total {
        let mut seqs = fixed.clone();
        let mut rest = counter;
        for &a in free.iter().rev() {
            seqs[a] = Some(space.individual_seq(rest % block));
            rest /= block;
        }
        for f in 0..n {
            if let Some(l) = leader[f] {
                seqs[f] = seqs[l].clone();
            }
        }
        let plan = JointPlan::full(seqs.into_iter().map(Option::unwrap).collect())?;
        let h = History::from_rows(query.init, plan.rows(), theory);
        compiled.fill(h.states(), |t| h.row(t), &mut table);
        if table[(compiled.len() - 1) * h.states().len()] {
            return Ok(Some(plan));
        }
    }
    Ok(None)
}
