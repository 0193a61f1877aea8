//! States, the action theory and histories.
//!
//! A history of horizon `k` has states `0..=k` and action rows `0..k`;
//! `do(i,a)` at time `t` reads the action agent `i` takes between `t` and
//! `t + 1`, so it is false at the final time point.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result, SymbolKind};
use crate::formula::{Formula, PlFormula};
use crate::plan::JointPlan;
use crate::symbols::{undeclared_id, ActionId, AgentId, PropId, Symbols};

/// A set of propositions over the declared (at most 64) propositions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(u64);

impl State {
    pub const EMPTY: State = State(0);

    pub fn from_props(props: impl IntoIterator<Item = PropId>) -> Self {
        props.into_iter().fold(State::EMPTY, |s, p| s.with(p))
    }

    pub fn from_bits(bits: u64) -> Self {
        State(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, p: PropId) -> bool {
        self.0 >> p.0 & 1 == 1
    }

    pub fn with(self, p: PropId) -> Self {
        State(self.0 | 1 << p.0)
    }

    pub fn without(self, p: PropId) -> Self {
        State(self.0 & !(1 << p.0))
    }

    pub fn props(self) -> impl Iterator<Item = PropId> {
        (0..64u16).filter(move |i| self.0 >> i & 1 == 1).map(PropId)
    }

    pub fn is_subset_of(self, other: State) -> bool {
        self.0 & !other.0 == 0
    }

    /// True when every proposition is declared in `symbols`.
    pub fn fits(self, symbols: &Symbols) -> bool {
        let n = symbols.num_props();
        n >= 64 || self.0 >> n == 0
    }

    /// Proposition names, sorted alphabetically.
    pub fn names(self, symbols: &Symbols) -> Vec<&str> {
        let mut names: Vec<&str> = self.props().map(|p| symbols.prop_name(p)).collect();
        names.sort_unstable();
        names
    }

    pub fn display(self, symbols: &Symbols) -> StateDisplay<'_> {
        StateDisplay {
            state: self,
            symbols,
        }
    }
}

pub struct StateDisplay<'a> {
    state: State,
    symbols: &'a Symbols,
}

impl fmt::Display for StateDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.state.names(self.symbols).join(" "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

/// Key of an effect-precondition entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EffectKey {
    pub agent: AgentId,
    pub action: ActionId,
    pub prop: PropId,
}

/// Positive and negative effect preconditions. Entries are sparse; a missing
/// entry is the constant `false`. `skip` never has entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionTheory {
    num_props: usize,
    num_agents: usize,
    num_actions: usize,
    pos: BTreeMap<EffectKey, PlFormula>,
    neg: BTreeMap<EffectKey, PlFormula>,
}

impl ActionTheory {
    pub fn new(symbols: &Symbols) -> Self {
        ActionTheory {
            num_props: symbols.num_props(),
            num_agents: symbols.num_agents(),
            num_actions: symbols.num_actions(),
            pos: BTreeMap::new(),
            neg: BTreeMap::new(),
        }
    }

    /// Adds an entry, replacing any previous formula for the same key.
    /// Entries whose formula is literally `false` are dropped.
    pub fn set(
        &mut self,
        sign: Sign,
        agent: AgentId,
        action: ActionId,
        prop: PropId,
        formula: PlFormula,
    ) -> Result<()> {
        if agent.index() >= self.num_agents {
            return Err(undeclared_id(SymbolKind::Agent, agent.0));
        }
        if action.index() >= self.num_actions {
            return Err(undeclared_id(SymbolKind::Action, action.0));
        }
        if prop.index() >= self.num_props {
            return Err(undeclared_id(SymbolKind::Prop, prop.0));
        }
        if action == ActionId::SKIP {
            return Err(Error::invalid("`skip` cannot have effects"));
        }
        self.check_formula(formula.as_formula())?;
        let key = EffectKey {
            agent,
            action,
            prop,
        };
        let map = match sign {
            Sign::Pos => &mut self.pos,
            Sign::Neg => &mut self.neg,
        };
        if *formula.as_formula() == Formula::False {
            map.remove(&key);
        } else {
            map.insert(key, formula);
        }
        Ok(())
    }

    fn check_formula(&self, f: &Formula) -> Result<()> {
        match f {
            Formula::True | Formula::False => Ok(()),
            Formula::Prop(p) if p.index() < self.num_props => Ok(()),
            Formula::Prop(p) => Err(undeclared_id(SymbolKind::Prop, p.0)),
            Formula::Does(i, a) => {
                if i.index() >= self.num_agents {
                    Err(undeclared_id(SymbolKind::Agent, i.0))
                } else if a.index() >= self.num_actions {
                    Err(undeclared_id(SymbolKind::Action, a.0))
                } else {
                    Ok(())
                }
            }
            Formula::Not(g) | Formula::Next(g) => self.check_formula(g),
            Formula::And(a, b) | Formula::Until(a, b) => {
                self.check_formula(a)?;
                self.check_formula(b)
            }
        }
    }

    pub fn get(
        &self,
        sign: Sign,
        agent: AgentId,
        action: ActionId,
        prop: PropId,
    ) -> Option<&PlFormula> {
        let key = EffectKey {
            agent,
            action,
            prop,
        };
        match sign {
            Sign::Pos => self.pos.get(&key),
            Sign::Neg => self.neg.get(&key),
        }
    }

    /// All entries of one sign, in (agent, action, prop) order.
    pub fn entries(&self, sign: Sign) -> impl Iterator<Item = (&EffectKey, &PlFormula)> {
        match sign {
            Sign::Pos => self.pos.iter(),
            Sign::Neg => self.neg.iter(),
        }
    }

    fn entries_for(
        &self,
        sign: Sign,
        agent: AgentId,
        action: ActionId,
    ) -> impl Iterator<Item = (&EffectKey, &PlFormula)> {
        let lo = EffectKey {
            agent,
            action,
            prop: PropId(0),
        };
        let hi = EffectKey {
            agent,
            action,
            prop: PropId(u16::MAX),
        };
        let map = match sign {
            Sign::Pos => &self.pos,
            Sign::Neg => &self.neg,
        };
        map.range(lo..=hi)
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty() && self.neg.is_empty()
    }

    pub fn num_agents(&self) -> usize {
        self.num_agents
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn num_props(&self) -> usize {
        self.num_props
    }
}

/// Truth of an action-language formula at a state, given the actions taken
/// from it (`None` at the final time point of a history).
pub(crate) fn holds_at(state: State, row: Option<&[ActionId]>, f: &Formula) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Prop(p) => state.contains(*p),
        Formula::Does(i, a) => row.is_some_and(|r| r[i.index()] == *a),
        Formula::Not(g) => !holds_at(state, row, g),
        Formula::And(a, b) => holds_at(state, row, a) && holds_at(state, row, b),
        Formula::Next(_) | Formula::Until(..) => {
            unreachable!("temporal operator in an action-language formula")
        }
    }
}

/// Computes the next state. Only executed actions contribute; a proposition
/// pushed both ways in the same step keeps its value.
pub fn successor_state(state: State, joint: &[ActionId], theory: &ActionTheory) -> Result<State> {
    if joint.len() != theory.num_agents {
        return Err(Error::invalid(format!(
            "joint action covers {} agents, expected {}",
            joint.len(),
            theory.num_agents
        )));
    }
    if let Some(a) = joint.iter().find(|a| a.index() >= theory.num_actions) {
        return Err(undeclared_id(SymbolKind::Action, a.0));
    }
    Ok(step(state, joint, theory))
}

pub(crate) fn step(state: State, joint: &[ActionId], theory: &ActionTheory) -> State {
    let mut add = 0u64;
    let mut del = 0u64;
    for (i, &a) in joint.iter().enumerate() {
        let agent = AgentId(i as u16);
        for (key, f) in theory.entries_for(Sign::Pos, agent, a) {
            if holds_at(state, Some(joint), f.as_formula()) {
                add |= 1 << key.prop.0;
            }
        }
        for (key, f) in theory.entries_for(Sign::Neg, agent, a) {
            if holds_at(state, Some(joint), f.as_formula()) {
                del |= 1 << key.prop.0;
            }
        }
    }
    State((state.0 & !(del & !add)) | (add & !del))
}

/// A finite history: states `0..=k` and one joint action row per step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct History {
    states: Vec<State>,
    rows: Vec<Vec<ActionId>>,
    num_props: usize,
    num_agents: usize,
    num_actions: usize,
}

impl History {
    /// Builds a history from explicit states and rows; no consistency with an
    /// action theory is implied (see [`History::is_consistent_with`]).
    pub fn new(states: Vec<State>, rows: Vec<Vec<ActionId>>, symbols: &Symbols) -> Result<Self> {
        let num_agents = symbols.num_agents();
        if states.is_empty() {
            return Err(Error::invalid("a history needs at least one state"));
        }
        if rows.len() + 1 != states.len() {
            return Err(Error::invalid(format!(
                "{} states need {} action rows, got {}",
                states.len(),
                states.len() - 1,
                rows.len()
            )));
        }
        if rows.iter().any(|r| r.len() != num_agents) {
            return Err(Error::invalid("every action row must cover every agent"));
        }
        if let Some(a) = rows
            .iter()
            .flatten()
            .find(|a| a.index() >= symbols.num_actions())
        {
            return Err(undeclared_id(SymbolKind::Action, a.0));
        }
        if states.iter().any(|s| !s.fits(symbols)) {
            return Err(Error::invalid("state mentions undeclared propositions"));
        }
        Ok(History {
            states,
            rows,
            num_props: symbols.num_props(),
            num_agents,
            num_actions: symbols.num_actions(),
        })
    }

    pub(crate) fn from_rows(s0: State, rows: Vec<Vec<ActionId>>, theory: &ActionTheory) -> Self {
        let mut states = Vec::with_capacity(rows.len() + 1);
        states.push(s0);
        for row in &rows {
            let next = step(*states.last().unwrap(), row, theory);
            states.push(next);
        }
        History {
            states,
            rows,
            num_props: theory.num_props,
            num_agents: theory.num_agents,
            num_actions: theory.num_actions,
        }
    }

    pub fn horizon(&self) -> usize {
        self.rows.len()
    }

    pub fn state(&self, t: usize) -> State {
        self.states[t]
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    /// Actions taken between `t` and `t + 1`; `None` at the final point.
    pub fn row(&self, t: usize) -> Option<&[ActionId]> {
        self.rows.get(t).map(Vec::as_slice)
    }

    pub fn action(&self, agent: AgentId, t: usize) -> Option<ActionId> {
        self.rows.get(t).and_then(|r| r.get(agent.index())).copied()
    }

    pub fn num_agents(&self) -> usize {
        self.num_agents
    }

    /// Re-derives every state from its predecessor and action row.
    pub fn is_consistent_with(&self, theory: &ActionTheory) -> bool {
        self.num_agents == theory.num_agents
            && self
                .rows
                .iter()
                .enumerate()
                .all(|(t, row)| step(self.states[t], row, theory) == self.states[t + 1])
    }

    pub(crate) fn check_formula(&self, f: &Formula) -> Result<()> {
        match f {
            Formula::True | Formula::False => Ok(()),
            Formula::Prop(p) if p.index() < self.num_props => Ok(()),
            Formula::Prop(p) => Err(undeclared_id(SymbolKind::Prop, p.0)),
            Formula::Does(i, _) if i.index() >= self.num_agents => {
                Err(undeclared_id(SymbolKind::Agent, i.0))
            }
            Formula::Does(_, a) if a.index() >= self.num_actions => {
                Err(undeclared_id(SymbolKind::Action, a.0))
            }
            Formula::Does(..) => Ok(()),
            Formula::Not(g) | Formula::Next(g) => self.check_formula(g),
            Formula::And(a, b) | Formula::Until(a, b) => {
                self.check_formula(a)?;
                self.check_formula(b)
            }
        }
    }

    fn check_time(&self, t: usize) -> Result<()> {
        if t > self.horizon() {
            return Err(Error::invalid(format!(
                "time {t} is past the horizon {}",
                self.horizon()
            )));
        }
        Ok(())
    }
}

/// Evaluates an action-language formula at time `t`.
pub fn eval_pl(h: &History, t: usize, f: &PlFormula) -> Result<bool> {
    h.check_time(t)?;
    h.check_formula(f.as_formula())?;
    Ok(holds_at(h.state(t), h.row(t), f.as_formula()))
}

/// The history generated by executing a full joint plan from `s0`.
pub fn generate_history(plan: &JointPlan, s0: State, theory: &ActionTheory) -> Result<History> {
    let n = theory.num_agents;
    if !plan.is_full(n) {
        return Err(Error::invalid(format!(
            "plan covers {} of {n} agents; a full joint plan is required",
            plan.coalition().count()
        )));
    }
    for agent in plan.coalition() {
        for &a in plan.seq(agent).unwrap_or_default() {
            if a.index() >= theory.num_actions {
                return Err(undeclared_id(SymbolKind::Action, a.0));
            }
        }
    }
    Ok(History::from_rows(s0, plan.rows(), theory))
}
