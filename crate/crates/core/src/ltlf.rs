//! LTLf over finite histories.
//!
//! `X` is the strong next: it is false at the last time point. Formulas are
//! compiled once into a list of distinct subformulas in dependency order and
//! evaluated with a (subformula x time) table filled from the end of the
//! history backwards, so each cell is computed exactly once.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::model::{History, State};
use crate::symbols::{ActionId, AgentId, PropId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Node {
    True,
    False,
    Prop(PropId),
    Does(AgentId, ActionId),
    Not(usize),
    And(usize, usize),
    Next(usize),
    Until(usize, usize),
}

/// A formula flattened into shared subformulas; children always precede
/// their parents and the root is the last node.
#[derive(Debug, Clone)]
pub struct CompiledLtl {
    nodes: Vec<Node>,
}

impl CompiledLtl {
    pub fn new(f: &Formula) -> Self {
        let mut nodes = Vec::new();
        let mut seen = HashMap::new();
        intern(f, &mut nodes, &mut seen);
        CompiledLtl { nodes }
    }

    /// Number of distinct subformulas.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Fills `table[node * (k + 1) + t]` for every node and time point.
    /// `row(t)` gives the joint action taken at `t`, `None` at the end.
    pub(crate) fn fill<'r>(
        &self,
        states: &[State],
        row: impl Fn(usize) -> Option<&'r [ActionId]>,
        table: &mut Vec<bool>,
    ) {
        let points = states.len();
        table.clear();
        table.resize(self.nodes.len() * points, false);
        for (n, node) in self.nodes.iter().enumerate() {
            let base = n * points;
            for t in (0..points).rev() {
                let v = match *node {
                    Node::True => true,
                    Node::False => false,
                    Node::Prop(p) => states[t].contains(p),
                    Node::Does(i, a) => row(t).is_some_and(|r| r[i.index()] == a),
                    Node::Not(c) => !table[c * points + t],
                    Node::And(a, b) => table[a * points + t] && table[b * points + t],
                    Node::Next(c) => t + 1 < points && table[c * points + t + 1],
                    Node::Until(a, b) => {
                        table[b * points + t]
                            || (table[a * points + t] && t + 1 < points && table[base + t + 1])
                    }
                };
                table[base + t] = v;
            }
        }
    }

    /// Truth of the root at time 0.
    pub(crate) fn holds_initially<'r>(
        &self,
        states: &[State],
        row: impl Fn(usize) -> Option<&'r [ActionId]>,
        table: &mut Vec<bool>,
    ) -> bool {
        self.fill(states, row, table);
        table[(self.nodes.len() - 1) * states.len()]
    }

    /// Truth of the root at every time point of `h`.
    pub fn eval_all(&self, h: &History) -> Vec<bool> {
        let mut table = Vec::new();
        self.fill(h.states(), |t| h.row(t), &mut table);
        let points = h.states().len();
        table.split_off((self.nodes.len() - 1) * points)
    }
}

fn intern(f: &Formula, nodes: &mut Vec<Node>, seen: &mut HashMap<Formula, usize>) -> usize {
    if let Some(&i) = seen.get(f) {
        return i;
    }
    let node = match f {
        Formula::True => Node::True,
        Formula::False => Node::False,
        Formula::Prop(p) => Node::Prop(*p),
        Formula::Does(i, a) => Node::Does(*i, *a),
        Formula::Not(g) => Node::Not(intern(g, nodes, seen)),
        Formula::Next(g) => Node::Next(intern(g, nodes, seen)),
        Formula::And(a, b) => {
            let a = intern(a, nodes, seen);
            Node::And(a, intern(b, nodes, seen))
        }
        Formula::Until(a, b) => {
            let a = intern(a, nodes, seen);
            Node::Until(a, intern(b, nodes, seen))
        }
    };
    nodes.push(node);
    seen.insert(f.clone(), nodes.len() - 1);
    nodes.len() - 1
}

/// `H, t ⊨ φ`.
pub fn eval_ltlf(h: &History, t: usize, f: &Formula) -> Result<bool> {
    if t > h.horizon() {
        return Err(Error::invalid(format!(
            "time {t} is past the horizon {}",
            h.horizon()
        )));
    }
    h.check_formula(f)?;
    Ok(CompiledLtl::new(f).eval_all(h)[t])
}

/// `H ⊨ φ`, i.e. truth at time 0.
pub fn satisfies(h: &History, f: &Formula) -> Result<bool> {
    eval_ltlf(h, 0, f)
}
