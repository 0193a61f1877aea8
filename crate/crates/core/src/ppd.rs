//! Planning domains with partial information about the initial state.

use crate::error::{Error, Result};
use crate::model::{ActionTheory, State};
use crate::symbols::{AgentId, Symbols};

/// Action theory, true initial state and, per agent, the ordered list of
/// initial states the agent considers possible. Every list contains `s0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ppd {
    symbols: Symbols,
    theory: ActionTheory,
    s0: State,
    epistemic: Vec<Vec<State>>,
}

impl Ppd {
    pub fn new(
        symbols: Symbols,
        theory: ActionTheory,
        s0: State,
        epistemic: Vec<Vec<State>>,
    ) -> Result<Self> {
        if theory.num_agents() != symbols.num_agents()
            || theory.num_props() != symbols.num_props()
            || theory.num_actions() != symbols.num_actions()
        {
            return Err(Error::invalid(
                "action theory was built for different symbols",
            ));
        }
        if !s0.fits(&symbols) {
            return Err(Error::invalid(
                "initial state mentions undeclared propositions",
            ));
        }
        if epistemic.len() != symbols.num_agents() {
            return Err(Error::invalid(format!(
                "{} epistemic sets given for {} agents",
                epistemic.len(),
                symbols.num_agents()
            )));
        }
        for (i, set) in epistemic.iter().enumerate() {
            let name = symbols.agent_name(AgentId(i as u16));
            if !set.contains(&s0) {
                return Err(Error::invalid(format!(
                    "epistemic set of {name} does not contain the initial state"
                )));
            }
            if set.iter().any(|s| !s.fits(&symbols)) {
                return Err(Error::invalid(format!(
                    "epistemic set of {name} mentions undeclared propositions"
                )));
            }
            for (j, s) in set.iter().enumerate() {
                if set[..j].contains(s) {
                    return Err(Error::invalid(format!(
                        "epistemic set of {name} lists {} twice",
                        s.display(&symbols)
                    )));
                }
            }
        }
        Ok(Ppd {
            symbols,
            theory,
            s0,
            epistemic,
        })
    }

    /// A domain where every agent knows the initial state: `E_i = {s0}`.
    pub fn with_known_start(symbols: Symbols, theory: ActionTheory, s0: State) -> Result<Self> {
        let epistemic = vec![vec![s0]; symbols.num_agents()];
        Ppd::new(symbols, theory, s0, epistemic)
    }

    pub fn symbols(&self) -> &Symbols {
        &self.symbols
    }

    pub fn theory(&self) -> &ActionTheory {
        &self.theory
    }

    pub fn s0(&self) -> State {
        self.s0
    }

    pub fn epistemic(&self, agent: AgentId) -> &[State] {
        &self.epistemic[agent.index()]
    }

    pub fn epistemic_sets(&self) -> &[Vec<State>] {
        &self.epistemic
    }

    pub fn num_agents(&self) -> usize {
        self.symbols.num_agents()
    }

    pub(crate) fn check_agent(&self, agent: AgentId) -> Result<()> {
        self.symbols.check_agent(agent)
    }

    /// `s0` followed by every other state of some epistemic set, first
    /// occurrence order.
    pub fn start_states(&self) -> Vec<State> {
        let mut out = vec![self.s0];
        for s in self.epistemic.iter().flatten() {
            if !out.contains(s) {
                out.push(*s);
            }
        }
        out
    }
}
