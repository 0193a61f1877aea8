//! Responsibility reasoning for multi-agent planning domains with LTLf
//! outcomes.

pub mod error;
pub mod fixtures;
pub mod format;
pub mod formula;
pub mod judge;
pub mod ltlf;
pub mod model;
pub mod parse;
pub mod pddl;
pub mod plan;
pub mod ppd;
pub mod report;
pub mod responsibility;
pub mod search;
pub mod symbols;
pub mod theorems;

pub use error::{Error, Result, SymbolKind};
pub use format::{
    parse_domain, parse_plan, parse_state, serialize_domain, serialize_plan, ParsedDomain, Warning,
};
pub use formula::{Formula, LtlFormula, PlFormula};
pub use judge::Judge;
pub use ltlf::{eval_ltlf, satisfies, CompiledLtl};
pub use model::{eval_pl, generate_history, successor_state, ActionTheory, History, Sign, State};
pub use parse::{parse_ltl, parse_pl};
pub use plan::{enumerate_completions, JointPlan, PlanSpace};
pub use ppd::Ppd;
pub use responsibility::{
    anticipate, anticipate_aar_direct, attribute, ResponsibilityKind, Verdict, Witness,
};
pub use search::{
    coordinate, exists_plan, find_plan_avoiding_anticipated, is_inevitable, is_powerless,
    Coordination, PlanQuery,
};
pub use symbols::{ActionId, AgentId, PropId, Symbols};
