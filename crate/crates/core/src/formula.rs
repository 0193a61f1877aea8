//! Formula syntax shared by the propositional action language and LTLf.
//!
//! The AST keeps only the primitive connectives. Disjunction, implication,
//! eventually and globally are smart constructors:
//!
//! * `a | b` is `!(!a & !b)`, `a -> b` is `!a | b`
//! * `F φ` is `true U φ`, `G φ` is `!F !φ`
//!
//! The printer recognises these shapes again, so printed formulas stay
//! readable and re-parse to the same tree.

use std::fmt;

use crate::error::{Error, Result};
use crate::symbols::{ActionId, AgentId, PropId, Symbols};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Prop(PropId),
    Does(AgentId, ActionId),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
}

/// LTLf outcomes use the full AST.
pub type LtlFormula = Formula;

impl Formula {
    pub fn prop(p: PropId) -> Self {
        Formula::Prop(p)
    }

    pub fn does(agent: AgentId, action: ActionId) -> Self {
        Formula::Does(agent, action)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::or(Formula::not(a), b)
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn eventually(f: Formula) -> Self {
        Formula::until(Formula::True, f)
    }

    pub fn globally(f: Formula) -> Self {
        Formula::not(Formula::eventually(Formula::not(f)))
    }

    /// Conjunction of all items; `true` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    pub fn is_temporal(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Prop(_) | Formula::Does(..) => false,
            Formula::Not(f) => f.is_temporal(),
            Formula::And(a, b) => a.is_temporal() || b.is_temporal(),
            Formula::Next(_) | Formula::Until(..) => true,
        }
    }

    pub fn mentions_actions(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Prop(_) => false,
            Formula::Does(..) => true,
            Formula::Not(f) | Formula::Next(f) => f.mentions_actions(),
            Formula::And(a, b) | Formula::Until(a, b) => {
                a.mentions_actions() || b.mentions_actions()
            }
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Prop(_) | Formula::Does(..) => 1,
            Formula::Not(f) | Formula::Next(f) => 1 + f.size(),
            Formula::And(a, b) | Formula::Until(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Checks that every atom refers to a declared symbol.
    pub fn validate(&self, symbols: &Symbols) -> Result<()> {
        match self {
            Formula::True | Formula::False => Ok(()),
            Formula::Prop(p) => symbols.check_prop(*p),
            Formula::Does(i, a) => {
                symbols.check_agent(*i)?;
                symbols.check_action(*a)
            }
            Formula::Not(f) | Formula::Next(f) => f.validate(symbols),
            Formula::And(a, b) | Formula::Until(a, b) => {
                a.validate(symbols)?;
                b.validate(symbols)
            }
        }
    }

    /// Rewrites every atom through the given maps; used to build renamed
    /// copies of a domain.
    pub fn map_atoms(
        &self,
        prop: &impl Fn(PropId) -> PropId,
        does: &impl Fn(AgentId, ActionId) -> (AgentId, ActionId),
    ) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Prop(p) => Formula::Prop(prop(*p)),
            Formula::Does(i, a) => {
                let (i, a) = does(*i, *a);
                Formula::Does(i, a)
            }
            Formula::Not(f) => Formula::not(f.map_atoms(prop, does)),
            Formula::Next(f) => Formula::next(f.map_atoms(prop, does)),
            Formula::And(a, b) => Formula::and(a.map_atoms(prop, does), b.map_atoms(prop, does)),
            Formula::Until(a, b) => {
                Formula::until(a.map_atoms(prop, does), b.map_atoms(prop, does))
            }
        }
    }

    pub fn display<'a>(&'a self, symbols: &'a Symbols) -> FormulaDisplay<'a> {
        FormulaDisplay {
            formula: self,
            symbols,
        }
    }

    /// `Some(φ)` when this is `true U φ`.
    pub(crate) fn as_eventually(&self) -> Option<&Formula> {
        match self {
            Formula::Until(a, b) if **a == Formula::True => Some(b),
            _ => None,
        }
    }

    /// `Some(φ)` when this is `!(true U !φ)`.
    pub(crate) fn as_globally(&self) -> Option<&Formula> {
        match self {
            Formula::Not(inner) => match inner.as_eventually() {
                Some(Formula::Not(f)) => Some(f),
                _ => None,
            },
            _ => None,
        }
    }

    /// `Some((a, b))` when this is `!(!a & !b)`.
    pub(crate) fn as_or(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Not(inner) => match &**inner {
                Formula::And(a, b) => match (&**a, &**b) {
                    (Formula::Not(a), Formula::Not(b)) => Some((a, b)),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }
}

/// A formula of the action language: no temporal operators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlFormula(Formula);

impl PlFormula {
    pub fn new(f: Formula) -> Result<Self> {
        if f.is_temporal() {
            return Err(Error::invalid(
                "temporal operators are not allowed in action-language formulas",
            ));
        }
        Ok(PlFormula(f))
    }

    pub fn as_formula(&self) -> &Formula {
        &self.0
    }

    pub fn into_formula(self) -> Formula {
        self.0
    }
}

impl TryFrom<Formula> for PlFormula {
    type Error = Error;

    fn try_from(f: Formula) -> Result<Self> {
        PlFormula::new(f)
    }
}

pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    symbols: &'a Symbols,
}

impl FormulaDisplay<'_> {
    fn write(&self, f: &mut fmt::Formatter<'_>, node: &Formula) -> fmt::Result {
        if let Some(g) = node.as_globally() {
            f.write_str("G ")?;
            return self.write(f, g);
        }
        if let Some((a, b)) = node.as_or() {
            f.write_str("(")?;
            self.write(f, a)?;
            f.write_str(" | ")?;
            self.write(f, b)?;
            return f.write_str(")");
        }
        if let Some(g) = node.as_eventually() {
            f.write_str("F ")?;
            return self.write(f, g);
        }
        match node {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Prop(p) => f.write_str(self.symbols.prop_name(*p)),
            Formula::Does(i, a) => write!(
                f,
                "do({},{})",
                self.symbols.agent_name(*i),
                self.symbols.action_name(*a)
            ),
            Formula::Not(g) => {
                f.write_str("!")?;
                self.write(f, g)
            }
            Formula::Next(g) => {
                f.write_str("X ")?;
                self.write(f, g)
            }
            Formula::And(a, b) => {
                f.write_str("(")?;
                self.write(f, a)?;
                f.write_str(" & ")?;
                self.write(f, b)?;
                f.write_str(")")
            }
            Formula::Until(a, b) => {
                f.write_str("(")?;
                self.write(f, a)?;
                f.write_str(" U ")?;
                self.write(f, b)?;
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.formula)
    }
}
