//! Joint plans, their algebra, and lexicographic plan enumeration.
//!
//! Enumeration order is part of the contract: full plans are ordered by
//! (agent declaration order, step, action declaration order), i.e. agent 0's
//! first action is the most significant digit. Witnesses everywhere are the
//! least plan in this order.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::symbols::{ActionId, AgentId, Symbols};

/// Equal-length action sequences for a nonempty coalition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JointPlan {
    horizon: usize,
    seqs: BTreeMap<AgentId, Vec<ActionId>>,
}

impl JointPlan {
    pub fn new(seqs: BTreeMap<AgentId, Vec<ActionId>>) -> Result<Self> {
        let mut lens = seqs.values().map(Vec::len);
        let Some(horizon) = lens.next() else {
            return Err(Error::invalid("a joint plan needs a nonempty coalition"));
        };
        if lens.any(|l| l != horizon) {
            return Err(Error::invalid(
                "all action sequences of a plan must have the same length",
            ));
        }
        Ok(JointPlan { horizon, seqs })
    }

    pub fn individual(agent: AgentId, seq: Vec<ActionId>) -> Self {
        JointPlan {
            horizon: seq.len(),
            seqs: BTreeMap::from([(agent, seq)]),
        }
    }

    /// Builds a full plan from per-agent sequences in agent order.
    pub fn full(seqs: Vec<Vec<ActionId>>) -> Result<Self> {
        JointPlan::new(
            seqs.into_iter()
                .enumerate()
                .map(|(i, s)| (AgentId(i as u16), s))
                .collect(),
        )
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn coalition(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.seqs.keys().copied()
    }

    pub fn contains(&self, agent: AgentId) -> bool {
        self.seqs.contains_key(&agent)
    }

    pub fn seq(&self, agent: AgentId) -> Option<&[ActionId]> {
        self.seqs.get(&agent).map(Vec::as_slice)
    }

    pub fn action(&self, agent: AgentId, t: usize) -> Option<ActionId> {
        self.seqs.get(&agent).and_then(|s| s.get(t)).copied()
    }

    pub fn is_full(&self, num_agents: usize) -> bool {
        self.seqs.len() == num_agents && self.seqs.keys().all(|a| a.index() < num_agents)
    }

    /// The action rows of a full plan, one per step.
    pub fn rows(&self) -> Vec<Vec<ActionId>> {
        (0..self.horizon)
            .map(|t| self.seqs.values().map(|s| s[t]).collect())
            .collect()
    }

    /// Restriction to `coalition`, which must be a nonempty subset.
    pub fn subplan(&self, coalition: &[AgentId]) -> Result<JointPlan> {
        if coalition.is_empty() {
            return Err(Error::invalid("sub-plan coalition is empty"));
        }
        let mut seqs = BTreeMap::new();
        for agent in coalition {
            let seq = self.seqs.get(agent).ok_or_else(|| {
                Error::invalid(format!("agent #{} is not in the plan's coalition", agent.0))
            })?;
            seqs.insert(*agent, seq.clone());
        }
        Ok(JointPlan {
            horizon: self.horizon,
            seqs,
        })
    }

    /// Restriction to the coalition minus `excluded`.
    pub fn complement(&self, excluded: &[AgentId]) -> Result<JointPlan> {
        if let Some(a) = excluded.iter().find(|a| !self.contains(**a)) {
            return Err(Error::invalid(format!(
                "agent #{} is not in the plan's coalition",
                a.0
            )));
        }
        let rest: Vec<AgentId> = self.coalition().filter(|a| !excluded.contains(a)).collect();
        self.subplan(&rest)
    }

    pub fn union(&self, other: &JointPlan) -> Result<JointPlan> {
        if self.horizon != other.horizon {
            return Err(Error::invalid(format!(
                "cannot join plans of lengths {} and {}",
                self.horizon, other.horizon
            )));
        }
        if let Some(a) = other.coalition().find(|a| self.contains(*a)) {
            return Err(Error::invalid(format!(
                "coalitions overlap on agent #{}",
                a.0
            )));
        }
        let mut seqs = self.seqs.clone();
        seqs.extend(other.seqs.iter().map(|(a, s)| (*a, s.clone())));
        Ok(JointPlan {
            horizon: self.horizon,
            seqs,
        })
    }

    /// True iff `other = self ∪ rest` for some plan `rest` (or `other = self`).
    pub fn is_compatible_with(&self, other: &JointPlan) -> bool {
        self.horizon == other.horizon && self.seqs.iter().all(|(a, s)| other.seqs.get(a) == Some(s))
    }

    /// Checks agent and action ids against a symbol table.
    pub fn validate(&self, symbols: &Symbols) -> Result<()> {
        for (agent, seq) in &self.seqs {
            symbols.check_agent(*agent)?;
            for a in seq {
                symbols.check_action(*a)?;
            }
        }
        Ok(())
    }

    pub fn display<'a>(&'a self, symbols: &'a Symbols) -> PlanDisplay<'a> {
        PlanDisplay {
            plan: self,
            symbols,
        }
    }
}

/// Renders a plan in plan-file format: one `AGENT: act act ...` line per agent.
pub struct PlanDisplay<'a> {
    plan: &'a JointPlan,
    symbols: &'a Symbols,
}

impl fmt::Display for PlanDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (agent, seq) in &self.plan.seqs {
            write!(f, "{}:", self.symbols.agent_name(*agent))?;
            for a in seq {
                write!(f, " {}", self.symbols.action_name(*a))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Largest plan space the exhaustive engines accept.
pub const MAX_PLAN_SPACE: u64 = 1 << 26;

/// Mixed-radix indexing of full joint plans: digit `agent * k + t` holds the
/// action of `agent` at step `t`, digit 0 most significant. Index order is the
/// lexicographic plan order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlanSpace {
    agents: usize,
    actions: usize,
    horizon: usize,
}

impl PlanSpace {
    pub fn new(agents: usize, actions: usize, horizon: usize) -> Self {
        PlanSpace {
            agents,
            actions,
            horizon,
        }
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn digits(&self) -> usize {
        self.agents * self.horizon
    }

    /// |Act|^(|Agt|·k), or `None` on overflow.
    pub fn size(&self) -> Option<u64> {
        let digits = u32::try_from(self.digits()).ok()?;
        (self.actions as u64).checked_pow(digits)
    }

    /// Number of sequences for one agent: |Act|^k.
    pub fn individual_size(&self) -> Option<u64> {
        (self.actions as u64).checked_pow(u32::try_from(self.horizon).ok()?)
    }

    pub(crate) fn checked_size(&self) -> Result<u64> {
        match self.size() {
            Some(n) if n <= MAX_PLAN_SPACE => Ok(n),
            _ => Err(Error::invalid(format!(
                "plan space of {}^({}x{}) plans is too large for exhaustive search",
                self.actions, self.agents, self.horizon
            ))),
        }
    }

    fn weight(&self, digit: usize) -> u64 {
        (self.actions as u64).pow((self.digits() - 1 - digit) as u32)
    }

    pub fn encode(&self, plan: &JointPlan) -> u64 {
        debug_assert!(plan.is_full(self.agents) && plan.horizon == self.horizon);
        let mut idx = 0u64;
        for seq in plan.seqs.values() {
            for a in seq {
                idx = idx * self.actions as u64 + a.0 as u64;
            }
        }
        idx
    }

    pub fn decode(&self, idx: u64) -> JointPlan {
        let seqs = self.decode_seqs(idx);
        JointPlan {
            horizon: self.horizon,
            seqs: seqs
                .into_iter()
                .enumerate()
                .map(|(i, s)| (AgentId(i as u16), s))
                .collect(),
        }
    }

    fn decode_seqs(&self, mut idx: u64) -> Vec<Vec<ActionId>> {
        let mut digits = vec![ActionId(0); self.digits()];
        for d in digits.iter_mut().rev() {
            *d = ActionId((idx % self.actions as u64) as u16);
            idx /= self.actions as u64;
        }
        digits
            .chunks(self.horizon.max(1))
            .take(self.agents)
            .map(|c| {
                if self.horizon == 0 {
                    Vec::new()
                } else {
                    c.to_vec()
                }
            })
            .chain(std::iter::repeat_with(Vec::new))
            .take(self.agents)
            .collect()
    }

    /// Action rows of the plan at `idx`.
    pub fn rows(&self, idx: u64) -> Vec<Vec<ActionId>> {
        let seqs = self.decode_seqs(idx);
        (0..self.horizon)
            .map(|t| seqs.iter().map(|s| s[t]).collect())
            .collect()
    }

    /// The action `agent` takes at step `t` in the plan at `idx`.
    pub fn action_at(&self, idx: u64, agent: AgentId, t: usize) -> ActionId {
        let digit = agent.index() * self.horizon + t;
        ActionId(((idx / self.weight(digit)) % self.actions as u64) as u16)
    }

    /// Index of a single agent's sequence in the |Act|^k individual order.
    pub fn individual_index(&self, seq: &[ActionId]) -> u64 {
        seq.iter()
            .fold(0u64, |acc, a| acc * self.actions as u64 + a.0 as u64)
    }

    pub fn individual_seq(&self, mut idx: u64) -> Vec<ActionId> {
        let mut seq = vec![ActionId(0); self.horizon];
        for a in seq.iter_mut().rev() {
            *a = ActionId((idx % self.actions as u64) as u16);
            idx /= self.actions as u64;
        }
        seq
    }

    /// Splits a full index into the part owned by `agent`.
    pub fn agent_part(&self, idx: u64, agent: AgentId) -> u64 {
        let block = (self.actions as u64).pow(self.horizon as u32);
        let after = (self.agents - 1 - agent.index()) as u32;
        (idx / block.pow(after)) % block
    }

    /// Completions of the agents in `fixed` (a bitmask over agents) taken from
    /// the plan `base`, in increasing index order.
    pub fn completions(&self, base: u64, fixed: u64) -> Completions {
        let block = (self.actions as u64).pow(self.horizon as u32);
        let mut free_blocks = Vec::new();
        let mut start = 0u64;
        for agent in 0..self.agents {
            let weight = block.pow((self.agents - 1 - agent) as u32);
            if fixed >> agent & 1 == 1 {
                start += (base / weight % block) * weight;
            } else {
                free_blocks.push(weight);
            }
        }
        Completions {
            block,
            free_blocks,
            counters: None,
            start,
        }
    }

    /// Enumerates every full plan compatible with `partial` (all plans when
    /// `partial` is `None`).
    pub fn enumerate(self, partial: Option<&JointPlan>) -> Result<impl Iterator<Item = JointPlan>> {
        self.checked_size()?;
        let (base, fixed) = match partial {
            None => (0, 0),
            Some(p) => {
                if p.horizon != self.horizon {
                    return Err(Error::invalid(format!(
                        "partial plan has length {}, expected {}",
                        p.horizon, self.horizon
                    )));
                }
                let mut base = 0u64;
                let mut fixed = 0u64;
                let block = (self.actions as u64).pow(self.horizon as u32);
                for (agent, seq) in &p.seqs {
                    if agent.index() >= self.agents {
                        return Err(Error::invalid(format!("unknown agent #{}", agent.0)));
                    }
                    if let Some(a) = seq.iter().find(|a| a.index() >= self.actions) {
                        return Err(Error::invalid(format!("unknown action #{}", a.0)));
                    }
                    fixed |= 1 << agent.index();
                    base += self.individual_index(seq)
                        * block.pow((self.agents - 1 - agent.index()) as u32);
                }
                (base, fixed)
            }
        };
        Ok(self.completions(base, fixed).map(move |i| self.decode(i)))
    }
}

/// Odometer over the free agents' sequence blocks.
pub struct Completions {
    block: u64,
    free_blocks: Vec<u64>,
    counters: Option<Vec<u64>>,
    start: u64,
}

impl Iterator for Completions {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        match &mut self.counters {
            None => {
                self.counters = Some(vec![0; self.free_blocks.len()]);
                Some(self.start)
            }
            Some(counters) => {
                // increment the least significant free block first
                let mut i = counters.len();
                loop {
                    if i == 0 {
                        return None;
                    }
                    i -= 1;
                    counters[i] += 1;
                    if counters[i] < self.block {
                        break;
                    }
                    counters[i] = 0;
                }
                Some(
                    self.start
                        + counters
                            .iter()
                            .zip(&self.free_blocks)
                            .map(|(c, w)| c * w)
                            .sum::<u64>(),
                )
            }
        }
    }
}

/// Every full joint `k`-plan compatible with `partial`, in lexicographic
/// order.
pub fn enumerate_completions(
    partial: Option<&JointPlan>,
    horizon: usize,
    symbols: &Symbols,
) -> Result<Vec<JointPlan>> {
    let space = PlanSpace::new(symbols.num_agents(), symbols.num_actions(), horizon);
    Ok(space.enumerate(partial)?.collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SKIP: ActionId = ActionId(0);
    const F: ActionId = ActionId(1);
    const A1: AgentId = AgentId(0);
    const A2: AgentId = AgentId(1);

    fn pi1() -> JointPlan {
        JointPlan::full(vec![vec![F, F], vec![F, F]]).unwrap()
    }

    #[test]
    fn subplan_and_complement() {
        let p = pi1();
        assert_eq!(
            p.subplan(&[A1]).unwrap(),
            JointPlan::individual(A1, vec![F, F])
        );
        assert_eq!(
            p.complement(&[A1]).unwrap(),
            JointPlan::individual(A2, vec![F, F])
        );
        assert_eq!(p.subplan(&[A1, A2]).unwrap(), p);
        assert!(p.subplan(&[]).is_err());
        assert!(p.subplan(&[AgentId(5)]).is_err());
        assert!(p.complement(&[A1, A2]).is_err());
    }

    #[test]
    fn union_rebuilds_plan() {
        let a = JointPlan::individual(A1, vec![F, F]);
        let b = JointPlan::individual(A2, vec![F, F]);
        assert_eq!(a.union(&b).unwrap(), pi1());
        assert!(a.union(&a).is_err());
        assert!(JointPlan::individual(A1, vec![F]).union(&b).is_err());
    }

    #[test]
    fn compatibility() {
        let p = pi1();
        assert!(JointPlan::individual(A1, vec![F, F]).is_compatible_with(&p));
        assert!(p.is_compatible_with(&p));
        assert!(!JointPlan::individual(A1, vec![F]).is_compatible_with(&p));
        assert!(!JointPlan::individual(A1, vec![SKIP, F]).is_compatible_with(&p));
        assert!(!p.is_compatible_with(&JointPlan::individual(A1, vec![F, F])));
    }

    #[test]
    fn mixed_lengths_rejected() {
        assert!(JointPlan::full(vec![vec![F], vec![F, F]]).is_err());
        assert!(JointPlan::new(BTreeMap::new()).is_err());
    }

    #[test]
    fn encode_decode_and_order() {
        let space = PlanSpace::new(2, 2, 2);
        assert_eq!(space.size(), Some(16));
        let all: Vec<JointPlan> = space.enumerate(None).unwrap().collect();
        assert_eq!(all.len(), 16);
        for (i, p) in all.iter().enumerate() {
            assert_eq!(space.encode(p), i as u64);
        }
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(
            all[0],
            JointPlan::full(vec![vec![SKIP, SKIP], vec![SKIP, SKIP]]).unwrap()
        );
        assert_eq!(
            all[1],
            JointPlan::full(vec![vec![SKIP, SKIP], vec![SKIP, F]]).unwrap()
        );
        assert_eq!(space.action_at(space.encode(&pi1()), A2, 1), F);
    }

    #[test]
    fn completions_of_partial() {
        let space = PlanSpace::new(2, 2, 2);
        let partial = JointPlan::individual(A1, vec![F, F]);
        let plans: Vec<JointPlan> = space.enumerate(Some(&partial)).unwrap().collect();
        assert_eq!(plans.len(), 4);
        assert!(plans.iter().all(|p| partial.is_compatible_with(p)));
        assert!(plans.windows(2).all(|w| w[0] < w[1]));
        let full: Vec<JointPlan> = space.enumerate(Some(&pi1())).unwrap().collect();
        assert_eq!(full, vec![pi1()]);
        let one_step = PlanSpace::new(2, 2, 1);
        assert_eq!(one_step.enumerate(None).unwrap().count(), 4);
    }

    #[test]
    fn horizon_zero_has_one_plan() {
        let space = PlanSpace::new(3, 2, 0);
        let plans: Vec<JointPlan> = space.enumerate(None).unwrap().collect();
        assert_eq!(plans.len(), 1);
        assert_eq!(plans[0].horizon(), 0);
        assert!(plans[0].is_full(3));
    }

    #[test]
    fn agent_part_matches_individual_index() {
        let space = PlanSpace::new(3, 3, 2);
        for idx in [0, 17, 200, 728] {
            let p = space.decode(idx);
            for a in 0..3u16 {
                let seq = p.seq(AgentId(a)).unwrap();
                assert_eq!(
                    space.agent_part(idx, AgentId(a)),
                    space.individual_index(seq)
                );
                assert_eq!(space.individual_seq(space.individual_index(seq)), seq);
            }
        }
    }
}
