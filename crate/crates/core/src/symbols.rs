//! Interned names for propositions, agents and actions.
//!
//! Every table assigns dense ids in declaration order. The action table
//! always starts with the reserved `skip` action.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result, SymbolKind};

pub const SKIP: &str = "skip";

/// Largest number of propositions a [`State`](crate::State) can hold.
pub const MAX_PROPS: usize = 64;

macro_rules! id_type {
    ($name:ident) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub u16);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

id_type!(PropId);
id_type!(AgentId);
id_type!(ActionId);

impl ActionId {
    pub const SKIP: ActionId = ActionId(0);
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Table {
    names: Vec<String>,
    index: HashMap<String, u16>,
}

impl Table {
    fn push(&mut self, kind: SymbolKind, name: &str) -> Result<u16> {
        if self.index.contains_key(name) {
            return Err(Error::Duplicate {
                kind,
                name: name.to_string(),
            });
        }
        let id = u16::try_from(self.names.len())
            .map_err(|_| Error::invalid(format!("too many {kind} symbols")))?;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        Ok(id)
    }

    fn get(&self, name: &str) -> Option<u16> {
        self.index.get(name).copied()
    }
}

/// A typed domain object, used only when exporting to PDDL.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectDecl {
    pub name: String,
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symbols {
    props: Table,
    agents: Table,
    actions: Table,
    objects: Vec<ObjectDecl>,
}

impl Symbols {
    /// Builds the symbol tables. `skip` is inserted as action 0 whether or not
    /// it appears in `actions`; the remaining actions keep their order.
    pub fn new<S: AsRef<str>>(props: &[S], agents: &[S], actions: &[S]) -> Result<Self> {
        let mut symbols = Symbols {
            props: Table::default(),
            agents: Table::default(),
            actions: Table::default(),
            objects: Vec::new(),
        };
        symbols.actions.push(SymbolKind::Action, SKIP)?;
        for p in props {
            check_name(p.as_ref())?;
            if RESERVED.contains(&p.as_ref()) {
                return Err(Error::invalid(format!(
                    "`{}` is reserved and cannot name a proposition",
                    p.as_ref()
                )));
            }
            symbols.props.push(SymbolKind::Prop, p.as_ref())?;
        }
        for a in agents {
            check_name(a.as_ref())?;
            symbols.agents.push(SymbolKind::Agent, a.as_ref())?;
        }
        for a in actions {
            let a = a.as_ref();
            if a == SKIP {
                continue;
            }
            check_name(a)?;
            symbols.actions.push(SymbolKind::Action, a)?;
        }
        if symbols.props.names.len() > MAX_PROPS {
            return Err(Error::invalid(format!(
                "at most {MAX_PROPS} propositions are supported, got {}",
                symbols.props.names.len()
            )));
        }
        if symbols.agents.names.is_empty() {
            return Err(Error::invalid("at least one agent must be declared"));
        }
        Ok(symbols)
    }

    /// Builds tables without identifier checks, for derived domains whose
    /// names only need to be valid in an export target.
    pub(crate) fn new_unchecked(
        props: &[String],
        agents: &[String],
        actions: &[String],
        objects: Vec<ObjectDecl>,
    ) -> Result<Self> {
        let mut symbols = Symbols {
            props: Table::default(),
            agents: Table::default(),
            actions: Table::default(),
            objects,
        };
        symbols.actions.push(SymbolKind::Action, SKIP)?;
        for p in props {
            symbols.props.push(SymbolKind::Prop, p)?;
        }
        for a in agents {
            symbols.agents.push(SymbolKind::Agent, a)?;
        }
        for a in actions.iter().filter(|a| *a != SKIP) {
            symbols.actions.push(SymbolKind::Action, a)?;
        }
        if symbols.num_props() > MAX_PROPS {
            return Err(Error::invalid(format!(
                "at most {MAX_PROPS} propositions are supported"
            )));
        }
        Ok(symbols)
    }

    pub fn with_objects(mut self, objects: Vec<ObjectDecl>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for o in &objects {
            if !seen.insert(o.name.as_str()) || self.agents.get(&o.name).is_some() {
                return Err(Error::Duplicate {
                    kind: SymbolKind::Object,
                    name: o.name.clone(),
                });
            }
        }
        self.objects = objects;
        Ok(self)
    }

    pub fn num_props(&self) -> usize {
        self.props.names.len()
    }

    pub fn num_agents(&self) -> usize {
        self.agents.names.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.names.len()
    }

    pub fn prop(&self, name: &str) -> Result<PropId> {
        self.props
            .get(name)
            .map(PropId)
            .ok_or_else(|| Error::Undeclared {
                kind: SymbolKind::Prop,
                name: name.to_string(),
            })
    }

    pub fn agent(&self, name: &str) -> Result<AgentId> {
        self.agents
            .get(name)
            .map(AgentId)
            .ok_or_else(|| Error::Undeclared {
                kind: SymbolKind::Agent,
                name: name.to_string(),
            })
    }

    pub fn action(&self, name: &str) -> Result<ActionId> {
        self.actions
            .get(name)
            .map(ActionId)
            .ok_or_else(|| Error::Undeclared {
                kind: SymbolKind::Action,
                name: name.to_string(),
            })
    }

    pub fn prop_name(&self, id: PropId) -> &str {
        &self.props.names[id.index()]
    }

    pub fn agent_name(&self, id: AgentId) -> &str {
        &self.agents.names[id.index()]
    }

    pub fn action_name(&self, id: ActionId) -> &str {
        &self.actions.names[id.index()]
    }

    pub fn props(&self) -> impl Iterator<Item = PropId> + '_ {
        (0..self.props.names.len() as u16).map(PropId)
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> + '_ {
        (0..self.agents.names.len() as u16).map(AgentId)
    }

    pub fn actions(&self) -> impl Iterator<Item = ActionId> + '_ {
        (0..self.actions.names.len() as u16).map(ActionId)
    }

    pub fn objects(&self) -> &[ObjectDecl] {
        &self.objects
    }

    pub(crate) fn check_prop(&self, id: PropId) -> Result<()> {
        if id.index() < self.num_props() {
            Ok(())
        } else {
            Err(undeclared_id(SymbolKind::Prop, id.0))
        }
    }

    pub(crate) fn check_agent(&self, id: AgentId) -> Result<()> {
        if id.index() < self.num_agents() {
            Ok(())
        } else {
            Err(undeclared_id(SymbolKind::Agent, id.0))
        }
    }

    pub(crate) fn check_action(&self, id: ActionId) -> Result<()> {
        if id.index() < self.num_actions() {
            Ok(())
        } else {
            Err(undeclared_id(SymbolKind::Action, id.0))
        }
    }
}

pub(crate) fn undeclared_id(kind: SymbolKind, id: u16) -> Error {
    Error::Undeclared {
        kind,
        name: format!("#{id}"),
    }
}

/// Words with a fixed meaning in formulas.
pub const RESERVED: [&str; 7] = ["X", "U", "G", "F", "do", "true", "false"];

/// Identifiers: a letter or `_`, then letters, digits, `_`; dot-separated
/// segments (`at.A1.table1`) are allowed after the first.
pub fn is_identifier(name: &str) -> bool {
    let mut segments = name.split('.');
    let Some(first) = segments.next() else {
        return false;
    };
    let head_ok = first
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    head_ok
        && first.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && segments
            .all(|s| !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'))
}

fn check_name(name: &str) -> Result<()> {
    if !is_identifier(name) {
        return Err(Error::invalid(format!(
            "`{name}` is not a valid identifier"
        )));
    }
    Ok(())
}

impl fmt::Display for Symbols {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} props, {} agents, {} actions",
            self.num_props(),
            self.num_agents(),
            self.num_actions()
        )
    }
}
