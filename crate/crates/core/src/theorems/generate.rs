//! Seeded random domains and outcomes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::formula::{Formula, PlFormula};
use crate::model::{ActionTheory, Sign, State};
use crate::ppd::Ppd;
use crate::symbols::{ActionId, AgentId, PropId, Symbols};

/// Size limits for generated domains. `max_actions` counts `skip`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainBounds {
    pub max_agents: usize,
    pub max_props: usize,
    pub max_actions: usize,
    pub max_horizon: usize,
    pub effect_density: f64,
    pub formula_depth: usize,
    pub rng_seed: u64,
}

impl Default for DomainBounds {
    fn default() -> Self {
        DomainBounds {
            max_agents: 3,
            max_props: 3,
            max_actions: 3,
            max_horizon: 2,
            effect_density: 0.5,
            formula_depth: 3,
            rng_seed: 0,
        }
    }
}

impl DomainBounds {
    pub fn validate(&self) -> Result<()> {
        if self.max_agents == 0
            || self.max_props == 0
            || self.max_actions == 0
            || self.formula_depth == 0
        {
            return Err(Error::invalid("domain bounds must be at least 1"));
        }
        if self.max_agents > 8 || self.max_props > 16 || self.max_actions > 8 {
            return Err(Error::invalid(
                "domain bounds are too large for exhaustive checking",
            ));
        }
        if !(0.0..=1.0).contains(&self.effect_density) {
            return Err(Error::invalid("effect density must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn with_seed(self, rng_seed: u64) -> Self {
        DomainBounds { rng_seed, ..self }
    }
}

/// One generated query: a domain, an outcome and a horizon.
#[derive(Debug, Clone)]
pub struct CorpusItem {
    pub seed: u64,
    pub ppd: Ppd,
    pub omega: Formula,
    pub horizon: usize,
}

pub fn random_ppd(bounds: &DomainBounds) -> Result<Ppd> {
    bounds.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(bounds.rng_seed);
    Ok(gen_ppd(bounds, &mut rng))
}

/// The item for `bounds.rng_seed`: domain, then outcome, then horizon, all
/// drawn from one stream.
pub fn corpus_item(bounds: &DomainBounds) -> Result<CorpusItem> {
    bounds.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(bounds.rng_seed);
    let ppd = gen_ppd(bounds, &mut rng);
    let omega = random_outcome(ppd.symbols(), bounds.formula_depth, &mut rng);
    let horizon = rng.gen_range(0..=bounds.max_horizon);
    Ok(CorpusItem {
        seed: bounds.rng_seed,
        ppd,
        omega,
        horizon,
    })
}

/// Items for seeds `first..first + count`.
pub fn corpus(bounds: &DomainBounds, first: u64, count: u64) -> Result<Vec<CorpusItem>> {
    (first..first + count)
        .map(|s| corpus_item(&bounds.with_seed(s)))
        .collect()
}

fn gen_ppd(bounds: &DomainBounds, rng: &mut ChaCha8Rng) -> Ppd {
    let n_agents = rng.gen_range(1..=bounds.max_agents);
    let n_props = rng.gen_range(1..=bounds.max_props);
    let n_actions = if bounds.max_actions > 1 {
        rng.gen_range(1..bounds.max_actions)
    } else {
        0
    };
    let props: Vec<String> = (0..n_props).map(|i| format!("p{i}")).collect();
    let agents: Vec<String> = (0..n_agents).map(|i| format!("A{i}")).collect();
    let actions: Vec<String> = (0..n_actions).map(|i| format!("act{}", i + 1)).collect();
    let symbols = Symbols::new(&props, &agents, &actions).expect("generated names are valid");

    let mut theory = ActionTheory::new(&symbols);
    for sign in [Sign::Pos, Sign::Neg] {
        for agent in symbols.agents() {
            for action in symbols.actions().skip(1) {
                for prop in symbols.props() {
                    if rng.gen_bool(bounds.effect_density) {
                        let f = random_pl(&symbols, 2, rng);
                        theory
                            .set(
                                sign,
                                agent,
                                action,
                                prop,
                                PlFormula::new(f).expect("no temporal operators"),
                            )
                            .expect("generated entry is valid");
                    }
                }
            }
        }
    }

    let all_states = 1u64 << n_props;
    let s0 = State::from_bits(rng.gen_range(0..all_states));
    let epistemic = (0..n_agents)
        .map(|_| {
            let mut set = Vec::new();
            for _ in 0..rng.gen_range(0..=2) {
                let s = State::from_bits(rng.gen_range(0..all_states));
                if s != s0 && !set.contains(&s) {
                    set.push(s);
                }
            }
            let at = rng.gen_range(0..=set.len());
            set.insert(at, s0);
            set
        })
        .collect();
    Ppd::new(symbols, theory, s0, epistemic).expect("generated domain is valid")
}

fn random_atom(symbols: &Symbols, rng: &mut ChaCha8Rng) -> Formula {
    if rng.gen_bool(0.3) {
        let agent = AgentId(rng.gen_range(0..symbols.num_agents()) as u16);
        let action = ActionId(rng.gen_range(0..symbols.num_actions()) as u16);
        Formula::does(agent, action)
    } else {
        Formula::prop(PropId(rng.gen_range(0..symbols.num_props()) as u16))
    }
}

/// A random action-language formula of depth at most `depth`.
pub fn random_pl(symbols: &Symbols, depth: usize, rng: &mut ChaCha8Rng) -> Formula {
    if depth == 0 || rng.gen_bool(0.35) {
        return if rng.gen_bool(0.1) {
            Formula::True
        } else {
            random_atom(symbols, rng)
        };
    }
    match rng.gen_range(0..3) {
        0 => Formula::not(random_pl(symbols, depth - 1, rng)),
        1 => Formula::and(
            random_pl(symbols, depth - 1, rng),
            random_pl(symbols, depth - 1, rng),
        ),
        _ => Formula::or(
            random_pl(symbols, depth - 1, rng),
            random_pl(symbols, depth - 1, rng),
        ),
    }
}

/// A random LTLf outcome. Half the time a constant at the root is
/// rejected and redrawn.
pub fn random_outcome(symbols: &Symbols, depth: usize, rng: &mut ChaCha8Rng) -> Formula {
    let allow_constant = rng.gen_bool(0.5);
    loop {
        let f = random_ltl(symbols, depth, rng);
        if allow_constant || !matches!(f, Formula::True | Formula::False) {
            return f;
        }
    }
}

fn random_ltl(symbols: &Symbols, depth: usize, rng: &mut ChaCha8Rng) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..20) {
            0 => Formula::True,
            1 => Formula::False,
            _ => random_atom(symbols, rng),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..7) {
        0 => Formula::not(random_ltl(symbols, d, rng)),
        1 => Formula::and(random_ltl(symbols, d, rng), random_ltl(symbols, d, rng)),
        2 => Formula::or(random_ltl(symbols, d, rng), random_ltl(symbols, d, rng)),
        3 => Formula::next(random_ltl(symbols, d, rng)),
        4 => Formula::until(random_ltl(symbols, d, rng), random_ltl(symbols, d, rng)),
        5 => Formula::eventually(random_ltl(symbols, d, rng)),
        _ => Formula::globally(random_ltl(symbols, d, rng)),
    }
}
