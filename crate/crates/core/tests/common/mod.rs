//! Reference implementations used as test oracles. They transcribe the
//! definitions literally: recursive evaluation, explicit plan enumeration,
//! no sharing with the engine's tables.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resplan::{
    enumerate_completions, generate_history, ActionId, AgentId, Formula, History, JointPlan, Ppd,
    PropId, ResponsibilityKind, State,
};

/// Recursive LTLf semantics with no memoisation.
pub fn naive_eval(h: &History, t: usize, f: &Formula) -> bool {
    let k = h.horizon();
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Prop(p) => h.state(t).contains(*p),
        Formula::Does(i, a) => t < k && h.action(*i, t) == Some(*a),
        Formula::Not(g) => !naive_eval(h, t, g),
        Formula::And(a, b) => naive_eval(h, t, a) && naive_eval(h, t, b),
        Formula::Next(g) => t < k && naive_eval(h, t + 1, g),
        Formula::Until(a, b) => {
            (t..=k).any(|t2| naive_eval(h, t2, b) && (t..t2).all(|t1| naive_eval(h, t1, a)))
        }
    }
}

pub fn outcome(ppd: &Ppd, s: State, plan: &JointPlan, omega: &Formula) -> bool {
    let h = generate_history(plan, s, ppd.theory()).unwrap();
    naive_eval(&h, 0, omega)
}

fn completions(ppd: &Ppd, partial: Option<&JointPlan>, k: usize) -> Vec<JointPlan> {
    enumerate_completions(partial, k, ppd.symbols()).unwrap()
}

fn restrict(plan: &JointPlan, keep: impl Fn(AgentId) -> bool) -> Option<JointPlan> {
    let agents: Vec<AgentId> = plan.coalition().filter(|a| keep(*a)).collect();
    if agents.is_empty() {
        None
    } else {
        Some(plan.subplan(&agents).unwrap())
    }
}

/// Every completion of `partial` satisfies `omega` from `s`.
pub fn sufficient(
    ppd: &Ppd,
    s: State,
    partial: Option<&JointPlan>,
    k: usize,
    omega: &Formula,
) -> bool {
    completions(ppd, partial, k)
        .iter()
        .all(|p| outcome(ppd, s, p, omega))
}

pub fn inevitable(ppd: &Ppd, s: State, k: usize, omega: &Formula) -> bool {
    sufficient(ppd, s, None, k, omega)
}

pub fn attribute(
    kind: ResponsibilityKind,
    i: AgentId,
    plan: &JointPlan,
    s: State,
    ppd: &Ppd,
    omega: &Formula,
) -> bool {
    let k = plan.horizon();
    let mine = plan.subplan(&[i]).unwrap();
    let car = sufficient(ppd, s, Some(&mine), k, omega) && !inevitable(ppd, s, k, omega);
    match kind {
        ResponsibilityKind::Car => car,
        ResponsibilityKind::Aar => {
            car && ppd
                .epistemic(i)
                .iter()
                .all(|s1| sufficient(ppd, *s1, Some(&mine), k, omega))
        }
        ResponsibilityKind::Cpr => {
            let others = restrict(plan, |a| a != i);
            outcome(ppd, s, plan, omega) && !sufficient(ppd, s, others.as_ref(), k, omega)
        }
        ResponsibilityKind::Ccr => {
            if !outcome(ppd, s, plan, omega) {
                return false;
            }
            let n = ppd.num_agents();
            (0u32..1 << n).filter(|m| m >> i.0 & 1 == 1).any(|m| {
                let j = restrict(plan, |a| m >> a.0 & 1 == 1);
                let j_minus = restrict(plan, |a| a != i && m >> a.0 & 1 == 1);
                sufficient(ppd, s, j.as_ref(), k, omega)
                    && !sufficient(ppd, s, j_minus.as_ref(), k, omega)
            })
        }
    }
}

pub fn anticipate(
    kind: ResponsibilityKind,
    i: AgentId,
    mine: &JointPlan,
    ppd: &Ppd,
    omega: &Formula,
) -> bool {
    let k = mine.horizon();
    ppd.epistemic(i).iter().any(|s1| {
        completions(ppd, Some(mine), k)
            .iter()
            .any(|p| attribute(kind, i, p, *s1, ppd, omega))
    })
}

/// All individual `k`-sequences for `i`, in lexicographic order.
pub fn individual_plans(ppd: &Ppd, i: AgentId, k: usize) -> Vec<JointPlan> {
    completions(ppd, None, k)
        .into_iter()
        .filter_map(|p| {
            let others_skip = p
                .coalition()
                .filter(|a| *a != i)
                .all(|a| p.seq(a).unwrap().iter().all(|x| x.0 == 0));
            others_skip.then(|| p.subplan(&[i]).unwrap())
        })
        .collect()
}

/// A random outcome inside the exportable fragment: boolean combinations of
/// state formulas under at most one `G`, `F`, `F G` or `G F`.
pub fn fragment_outcome(ppd: &Ppd, depth: usize, rng: &mut impl Rng) -> Formula {
    if depth == 0 || rng.gen_bool(0.4) {
        let f = state_formula(ppd, 2, rng);
        return match rng.gen_range(0..5) {
            0 => f,
            1 => Formula::globally(f),
            2 => Formula::eventually(f),
            3 => Formula::eventually(Formula::globally(f)),
            _ => Formula::globally(Formula::eventually(f)),
        };
    }
    match rng.gen_range(0..3) {
        0 => Formula::not(fragment_outcome(ppd, depth - 1, rng)),
        1 => Formula::and(
            fragment_outcome(ppd, depth - 1, rng),
            fragment_outcome(ppd, depth - 1, rng),
        ),
        _ => Formula::or(
            fragment_outcome(ppd, depth - 1, rng),
            fragment_outcome(ppd, depth - 1, rng),
        ),
    }
}

fn state_formula(ppd: &Ppd, depth: usize, rng: &mut impl Rng) -> Formula {
    if depth == 0 || rng.gen_bool(0.5) {
        let p = rng.gen_range(0..ppd.symbols().num_props());
        return Formula::prop(PropId(p as u16));
    }
    match rng.gen_range(0..3) {
        0 => Formula::not(state_formula(ppd, depth - 1, rng)),
        1 => Formula::and(
            state_formula(ppd, depth - 1, rng),
            state_formula(ppd, depth - 1, rng),
        ),
        _ => Formula::or(
            state_formula(ppd, depth - 1, rng),
            state_formula(ppd, depth - 1, rng),
        ),
    }
}

/// A query for the PDDL bridge. `plan` is full for attribution and
/// individual for CPR anticipation.
#[derive(Debug, Clone)]
pub struct BridgeQuery {
    pub seed: u64,
    pub ppd: Ppd,
    pub omega: Formula,
    pub agent: AgentId,
    pub plan: JointPlan,
    /// `None` means CPR anticipation.
    pub kind: Option<ResponsibilityKind>,
}

impl BridgeQuery {
    pub fn oracle(&self) -> bool {
        match self.kind {
            Some(kind) => attribute(
                kind,
                self.agent,
                &self.plan,
                self.ppd.s0(),
                &self.ppd,
                &self.omega,
            ),
            None => anticipate(
                ResponsibilityKind::Cpr,
                self.agent,
                &self.plan,
                &self.ppd,
                &self.omega,
            ),
        }
    }
}

/// Random bridge queries. On even seeds up to 30 draws are tried and the
/// first whose verdict holds is kept, so both verdicts are well represented.
pub fn bridge_queries(count: u64) -> Vec<BridgeQuery> {
    use resplan::theorems::{corpus_item, DomainBounds};
    use ResponsibilityKind::{Aar, Car, Cpr};
    (0..count)
        .map(|seed| {
            let item = corpus_item(&DomainBounds::default().with_seed(seed)).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let kind = [Some(Car), Some(Cpr), Some(Aar), None][(seed % 4) as usize];
            let tries = if seed % 2 == 0 { 30 } else { 1 };
            let mut first = None;
            for _ in 0..tries {
                let q = draw_query(seed, &item.ppd, item.horizon, kind, &mut rng);
                if q.oracle() {
                    return q;
                }
                first.get_or_insert(q);
            }
            first.unwrap()
        })
        .collect()
}

fn draw_query(
    seed: u64,
    ppd: &Ppd,
    horizon: usize,
    kind: Option<ResponsibilityKind>,
    rng: &mut ChaCha8Rng,
) -> BridgeQuery {
    let omega = fragment_outcome(ppd, 2, rng);
    let n = ppd.num_agents();
    let agent = AgentId(rng.gen_range(0..n) as u16);
    let acts = ppd.symbols().num_actions();
    let seqs: Vec<Vec<ActionId>> = (0..n)
        .map(|_| {
            (0..horizon)
                .map(|_| ActionId(rng.gen_range(0..acts) as u16))
                .collect()
        })
        .collect();
    let full = JointPlan::full(seqs).unwrap();
    let plan = match kind {
        Some(_) => full,
        None => full.subplan(&[agent]).unwrap(),
    };
    BridgeQuery {
        seed,
        ppd: ppd.clone(),
        omega,
        agent,
        plan,
        kind,
    }
}
