//! Outcome tables for one (domain, outcome, horizon) triple.
//!
//! The truth of the outcome is computed once for every full joint plan from
//! each start state of interest. All responsibility quantifiers are then
//! sweeps over plan indices: a coalition's plan fixes some agents' digit
//! blocks and the completions are the indices sharing those blocks. Sweeps
//! run in index order, so the first hit is the lexicographically least
//! witness.

use std::sync::{Arc, OnceLock};

use rayon::prelude::*;

use crate::error::{Error, Result, SymbolKind};
use crate::formula::Formula;
use crate::ltlf::CompiledLtl;
use crate::model::{step, ActionTheory, State};
use crate::plan::{JointPlan, PlanSpace};
use crate::ppd::Ppd;
use crate::symbols::{undeclared_id, ActionId, AgentId};

type Bits = Vec<u64>;

/// Agents as a bitmask; bit `i` is agent `i`.
pub type Coalition = u64;

pub(crate) fn mask_of(agents: impl IntoIterator<Item = AgentId>) -> Coalition {
    agents.into_iter().fold(0, |m, a| m | 1 << a.index())
}

pub(crate) fn agents_of(mask: Coalition) -> Vec<AgentId> {
    (0..64)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| AgentId(i as u16))
        .collect()
}

#[derive(Debug)]
struct Tables {
    starts: Vec<State>,
    bits: Vec<OnceLock<Bits>>,
}

/// Precomputed outcome truth over the plan space of one horizon.
#[derive(Debug, Clone)]
pub struct Judge<'a> {
    theory: &'a ActionTheory,
    omega: Formula,
    compiled: Arc<CompiledLtl>,
    space: PlanSpace,
    size: u64,
    tables: Arc<Tables>,
    epistemic: Vec<Vec<State>>,
    negate: bool,
}

impl<'a> Judge<'a> {
    /// Judge over all start states of `ppd`, plus `extra` ones.
    pub fn new(ppd: &'a Ppd, omega: &Formula, horizon: usize, extra: &[State]) -> Result<Self> {
        let mut starts = ppd.start_states();
        for s in extra {
            if !s.fits(ppd.symbols()) {
                return Err(Error::invalid(
                    "start state mentions undeclared propositions",
                ));
            }
            if !starts.contains(s) {
                starts.push(*s);
            }
        }
        Judge::build(
            ppd.theory(),
            omega,
            horizon,
            starts,
            ppd.epistemic_sets().to_vec(),
        )
    }

    /// Judge from a single known start state; every agent's epistemic set is
    /// `{s0}`.
    pub fn from_theory(
        theory: &'a ActionTheory,
        omega: &Formula,
        horizon: usize,
        s0: State,
    ) -> Result<Self> {
        if theory.num_props() < 64 && s0.bits() >> theory.num_props() != 0 {
            return Err(Error::invalid(
                "start state mentions undeclared propositions",
            ));
        }
        Judge::build(
            theory,
            omega,
            horizon,
            vec![s0],
            vec![vec![s0]; theory.num_agents()],
        )
    }

    fn build(
        theory: &'a ActionTheory,
        omega: &Formula,
        horizon: usize,
        starts: Vec<State>,
        epistemic: Vec<Vec<State>>,
    ) -> Result<Self> {
        check_dims(omega, theory)?;
        let space = PlanSpace::new(theory.num_agents(), theory.num_actions(), horizon);
        let size = space.checked_size()?;
        let bits = starts.iter().map(|_| OnceLock::new()).collect();
        Ok(Judge {
            theory,
            omega: omega.clone(),
            compiled: Arc::new(CompiledLtl::new(omega)),
            space,
            size,
            tables: Arc::new(Tables { starts, bits }),
            epistemic,
            negate: false,
        })
    }

    /// The same tables read for `¬ω`.
    pub fn negated(&self) -> Judge<'a> {
        Judge {
            omega: Formula::not(self.omega.clone()),
            negate: !self.negate,
            ..self.clone()
        }
    }

    pub fn omega(&self) -> &Formula {
        &self.omega
    }

    pub fn space(&self) -> PlanSpace {
        self.space
    }

    pub fn horizon(&self) -> usize {
        self.space.horizon()
    }

    pub fn num_agents(&self) -> usize {
        self.space.agents()
    }

    /// Number of full joint plans.
    pub fn plan_count(&self) -> u64 {
        self.size
    }

    pub fn epistemic(&self, agent: AgentId) -> &[State] {
        &self.epistemic[agent.index()]
    }

    pub(crate) fn all_agents(&self) -> Coalition {
        (1u64 << self.num_agents()) - 1
    }

    fn table(&self, s: State) -> Result<&Bits> {
        let pos = self
            .tables
            .starts
            .iter()
            .position(|x| *x == s)
            .ok_or_else(|| Error::invalid("start state not prepared for this query"))?;
        Ok(self.tables.bits[pos].get_or_init(|| self.compute(s)))
    }

    fn compute(&self, s0: State) -> Bits {
        let n = self.space.agents();
        let k = self.space.horizon();
        let words = self.size.div_ceil(64) as usize;
        (0..words)
            .into_par_iter()
            .map_init(
                || (Vec::new(), vec![ActionId::SKIP; n * k], Vec::new()),
                |(states, rows, scratch): &mut (Vec<State>, Vec<ActionId>, Vec<bool>), w| {
                    let mut word = 0u64;
                    let lo = w as u64 * 64;
                    for idx in lo..(lo + 64).min(self.size) {
                        self.history(idx, s0, states, rows);
                        let holds = self.compiled.holds_initially(
                            states,
                            |t| (t < k).then(|| &rows[t * n..(t + 1) * n]),
                            scratch,
                        );
                        if holds {
                            word |= 1 << (idx - lo);
                        }
                    }
                    word
                },
            )
            .collect()
    }

    /// Writes the history of plan `idx` into the buffers; rows are stored
    /// row-major.
    fn history(&self, idx: u64, s0: State, states: &mut Vec<State>, rows: &mut [ActionId]) {
        let n = self.space.agents();
        let k = self.space.horizon();
        let m = self.space.actions() as u64;
        let mut rest = idx;
        for agent in (0..n).rev() {
            for t in (0..k).rev() {
                rows[t * n + agent] = ActionId((rest % m) as u16);
                rest /= m;
            }
        }
        states.clear();
        states.push(s0);
        for t in 0..k {
            let next = step(states[t], &rows[t * n..(t + 1) * n], self.theory);
            states.push(next);
        }
    }

    /// Outcome truth for the plan at `idx` from `s`.
    pub fn holds(&self, s: State, idx: u64) -> Result<bool> {
        let table = self.table(s)?;
        Ok(bit(table, idx) != self.negate)
    }

    /// First completion of `base` on `fixed` that violates the outcome.
    pub fn first_violation(&self, s: State, base: u64, fixed: Coalition) -> Result<Option<u64>> {
        self.first_with(s, base, fixed, false)
    }

    /// First completion of `base` on `fixed` that satisfies the outcome.
    pub fn first_success(&self, s: State, base: u64, fixed: Coalition) -> Result<Option<u64>> {
        self.first_with(s, base, fixed, true)
    }

    /// Whether every completion of `base` on `fixed` satisfies the outcome.
    pub fn all_satisfy(&self, s: State, base: u64, fixed: Coalition) -> Result<bool> {
        Ok(self.first_violation(s, base, fixed)?.is_none())
    }

    fn first_with(&self, s: State, base: u64, fixed: Coalition, want: bool) -> Result<Option<u64>> {
        let table = self.table(s)?;
        let want_bit = want != self.negate;
        if fixed == 0 {
            return Ok(first_bit(table, self.size, want_bit));
        }
        Ok(self
            .space
            .completions(base, fixed)
            .find(|&i| bit(table, i) == want_bit))
    }

    /// Index of a full plan, after checking it belongs to this plan space.
    pub fn index_of(&self, plan: &JointPlan) -> Result<u64> {
        if !plan.is_full(self.num_agents()) {
            return Err(Error::invalid("a full joint plan is required"));
        }
        self.check_plan(plan)?;
        Ok(self.space.encode(plan))
    }

    /// Base index and agent mask of a partial plan.
    pub fn partial_index(&self, plan: &JointPlan) -> Result<(u64, Coalition)> {
        self.check_plan(plan)?;
        let block = self.space.individual_size().unwrap_or(0);
        let mut base = 0u64;
        for agent in plan.coalition() {
            let seq = plan.seq(agent).unwrap_or_default();
            let after = (self.num_agents() - 1 - agent.index()) as u32;
            base += self.space.individual_index(seq) * block.pow(after);
        }
        Ok((base, mask_of(plan.coalition())))
    }

    fn check_plan(&self, plan: &JointPlan) -> Result<()> {
        if plan.horizon() != self.horizon() {
            return Err(Error::invalid(format!(
                "plan has length {}, the query horizon is {}",
                plan.horizon(),
                self.horizon()
            )));
        }
        for agent in plan.coalition() {
            if agent.index() >= self.num_agents() {
                return Err(undeclared_id(SymbolKind::Agent, agent.0));
            }
            if let Some(a) = plan
                .seq(agent)
                .unwrap_or_default()
                .iter()
                .find(|a| a.index() >= self.space.actions())
            {
                return Err(undeclared_id(SymbolKind::Action, a.0));
            }
        }
        Ok(())
    }

    pub fn decode(&self, idx: u64) -> JointPlan {
        self.space.decode(idx)
    }

    /// Plan index of `agent`'s sequence number `seq` with everyone else
    /// skipping.
    pub(crate) fn individual_base(&self, agent: AgentId, seq: u64) -> u64 {
        let block = self.space.individual_size().unwrap_or(0);
        seq * block.pow((self.num_agents() - 1 - agent.index()) as u32)
    }
}

fn bit(table: &Bits, idx: u64) -> bool {
    table[(idx / 64) as usize] >> (idx % 64) & 1 == 1
}

fn first_bit(table: &Bits, size: u64, want: bool) -> Option<u64> {
    table.iter().enumerate().find_map(|(w, &word)| {
        let word = if want { word } else { !word };
        let lo = w as u64 * 64;
        let valid = if size - lo >= 64 {
            !0
        } else {
            (1u64 << (size - lo)) - 1
        };
        let hits = word & valid;
        (hits != 0).then(|| lo + hits.trailing_zeros() as u64)
    })
}

pub(crate) fn check_dims(f: &Formula, theory: &ActionTheory) -> Result<()> {
    match f {
        Formula::True | Formula::False => Ok(()),
        Formula::Prop(p) if p.index() >= theory.num_props() => {
            Err(undeclared_id(SymbolKind::Prop, p.0))
        }
        Formula::Does(i, _) if i.index() >= theory.num_agents() => {
            Err(undeclared_id(SymbolKind::Agent, i.0))
        }
        Formula::Does(_, a) if a.index() >= theory.num_actions() => {
            Err(undeclared_id(SymbolKind::Action, a.0))
        }
        Formula::Prop(_) | Formula::Does(..) => Ok(()),
        Formula::Not(g) | Formula::Next(g) => check_dims(g, theory),
        Formula::And(a, b) | Formula::Until(a, b) => {
            check_dims(a, theory)?;
            check_dims(b, theory)
        }
    }
}
