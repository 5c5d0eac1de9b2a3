//! Formula language: agents, groups, families, the formula AST, and the
//! transformations on it (desugaring, subformulas, free agents).
//!
//! The concrete grammar lives in [`parser`]; [`render`] prints formulas back
//! in the same grammar so that `parse(render(f)) == f`.

mod lexer;
pub mod parser;
pub mod render;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parser::{parse_formula, parse_action, EventCatalog};

/// Errors raised while reading or constructing formulas.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("parse error at byte {pos}: expected {expected}, found {found}")]
    Parse {
        pos: usize,
        expected: String,
        found: String,
    },
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("invalid agent name `{0}`")]
    InvalidAgent(String),
    #[error("invalid proposition name `{0}`")]
    InvalidProp(String),
    #[error("empty group")]
    EmptyGroup,
    #[error("empty group family")]
    EmptyFamily,
    #[error("unknown event model `{0}`")]
    UnknownEventModel(String),
    #[error("unknown event `{event}` in event model `{model}`")]
    UnknownEvent { model: String, event: String },
}

fn is_agent_token(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('a'..='z'))
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

fn is_prop_token(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('p'..='z'))
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

/// An agent name, `[a-z][a-z0-9_]*`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Agent(String);

impl Agent {
    pub fn new(name: impl Into<String>) -> Result<Agent, SyntaxError> {
        let name = name.into();
        if is_agent_token(&name) && !parser::is_reserved(&name) {
            Ok(Agent(name))
        } else {
            Err(SyntaxError::InvalidAgent(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Agent {
    type Error = SyntaxError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        Agent::new(value)
    }
}

impl From<Agent> for String {
    fn from(a: Agent) -> String {
        a.0
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The finite agent universe a formula or model is interpreted over.
pub type AgentSet = BTreeSet<Agent>;

/// Parses a comma separated agent list such as `a,b,c`.
pub fn parse_agent_list(text: &str) -> Result<AgentSet, SyntaxError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(Agent::new)
        .collect()
}

/// An atomic proposition, `[p-z][a-z0-9_]*`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Prop(String);

impl Prop {
    pub fn new(name: impl Into<String>) -> Result<Prop, SyntaxError> {
        let name = name.into();
        if is_prop_token(&name) && !parser::is_reserved(&name) {
            Ok(Prop(name))
        } else {
            Err(SyntaxError::InvalidProp(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Prop {
    type Error = SyntaxError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        Prop::new(value)
    }
}

impl From<Prop> for String {
    fn from(p: Prop) -> String {
        p.0
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A nonempty set of agents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Group(BTreeSet<Agent>);

impl Group {
    pub fn new(members: impl IntoIterator<Item = Agent>) -> Result<Group, SyntaxError> {
        let members: BTreeSet<Agent> = members.into_iter().collect();
        if members.is_empty() {
            Err(SyntaxError::EmptyGroup)
        } else {
            Ok(Group(members))
        }
    }

    pub fn singleton(agent: Agent) -> Group {
        Group(BTreeSet::from([agent]))
    }

    /// Builds a group from agent names, panicking on invalid input. Meant for
    /// fixtures and tests.
    pub fn of(names: &[&str]) -> Group {
        Group::new(names.iter().map(|n| Agent::new(*n).expect("valid agent name")))
            .expect("nonempty group")
    }

    pub fn members(&self) -> &BTreeSet<Agent> {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &Agent> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, agent: &Agent) -> bool {
        self.0.contains(agent)
    }

    pub fn union(&self, other: &Group) -> Group {
        Group(self.0.union(&other.0).cloned().collect())
    }

    pub fn intersects(&self, other: &Group) -> bool {
        self.0.iter().any(|a| other.0.contains(a))
    }

    pub fn is_subset(&self, other: &Group) -> bool {
        self.0.is_subset(&other.0)
    }

    /// Sorted comma-joined member names, the key used in documents.
    pub fn key(&self) -> String {
        self.0.iter().map(Agent::as_str).collect::<Vec<_>>().join(",")
    }

    pub fn from_key(key: &str) -> Result<Group, SyntaxError> {
        Group::new(
            key.split(',')
                .map(str::trim)
                .map(Agent::new)
                .collect::<Result<Vec<_>, _>>()?,
        )
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.key())
    }
}

/// All nonempty subsets of `agents`, ordered by size and then by members.
pub fn all_groups(agents: &AgentSet) -> Vec<Group> {
    let list: Vec<&Agent> = agents.iter().collect();
    let n = list.len();
    assert!(n < 20, "agent universe too large to enumerate groups");
    let mut groups: Vec<Group> = (1u32..(1 << n))
        .map(|mask| {
            Group(
                (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| list[i].clone())
                    .collect(),
            )
        })
        .collect();
    groups.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    groups
}

/// A nonempty set of groups.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupFamily(BTreeSet<Group>);

impl GroupFamily {
    pub fn new(groups: impl IntoIterator<Item = Group>) -> Result<GroupFamily, SyntaxError> {
        let groups: BTreeSet<Group> = groups.into_iter().collect();
        if groups.is_empty() {
            Err(SyntaxError::EmptyFamily)
        } else {
            Ok(GroupFamily(groups))
        }
    }

    pub fn singleton(group: Group) -> GroupFamily {
        GroupFamily(BTreeSet::from([group]))
    }

    pub fn groups(&self) -> &BTreeSet<Group> {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &Group> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The single member of a one-group family.
    pub fn as_single(&self) -> Option<&Group> {
        if self.0.len() == 1 {
            self.0.iter().next()
        } else {
            None
        }
    }

    /// Applies `f` to every member, re-canonicalizing the result.
    pub fn map(&self, mut f: impl FnMut(&Group) -> Group) -> GroupFamily {
        GroupFamily(self.0.iter().map(&mut f).collect())
    }
}

impl fmt::Display for GroupFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner: Vec<String> = self.0.iter().map(Group::to_string).collect();
        write!(f, "{{{}}}", inner.join(","))
    }
}

/// A reading map as written in a formula. The sugar is kept so that
/// formulas print back the way they were entered; [`ReadMapExpr::lift`]
/// gives its action on groups without needing the agent universe.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ReadMapExpr {
    /// Everybody reads the group's bases: `b ↦ G ∪ {b}`.
    Pub(Group),
    /// Resolution inside the group: members read the group, others themselves.
    Res(Group),
    /// Sharing within each listed group (groups may overlap).
    Grp(Vec<Group>),
    /// Members of the first group read the second group.
    Share(Group, Group),
    /// Explicit assignment; the reader is always added to its own read set.
    Map(Vec<(Agent, Group)>),
}

impl ReadMapExpr {
    /// The union of the read sets of the members of `group`.
    pub fn lift(&self, group: &Group) -> Group {
        match self {
            ReadMapExpr::Pub(g) => group.union(g),
            ReadMapExpr::Res(g) => {
                if group.intersects(g) {
                    group.union(g)
                } else {
                    group.clone()
                }
            }
            ReadMapExpr::Grp(gs) => gs
                .iter()
                .filter(|g| g.intersects(group))
                .fold(group.clone(), |acc, g| acc.union(g)),
            ReadMapExpr::Share(readers, read) => {
                if readers.intersects(group) {
                    group.union(read)
                } else {
                    group.clone()
                }
            }
            ReadMapExpr::Map(entries) => entries
                .iter()
                .filter(|(a, _)| group.contains(a))
                .fold(group.clone(), |acc, (_, g)| acc.union(g)),
        }
    }

    pub fn agents(&self) -> AgentSet {
        let mut out = AgentSet::new();
        match self {
            ReadMapExpr::Pub(g) | ReadMapExpr::Res(g) => out.extend(g.iter().cloned()),
            ReadMapExpr::Grp(gs) => gs.iter().for_each(|g| out.extend(g.iter().cloned())),
            ReadMapExpr::Share(a, b) => {
                out.extend(a.iter().cloned());
                out.extend(b.iter().cloned());
            }
            ReadMapExpr::Map(entries) => {
                for (a, g) in entries {
                    out.insert(a.clone());
                    out.extend(g.iter().cloned());
                }
            }
        }
        out
    }
}

/// Reference to an event inside a named reading event model.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventRef {
    pub model: String,
    pub event: String,
}

impl EventRef {
    pub fn new(model: impl Into<String>, event: impl Into<String>) -> EventRef {
        EventRef {
            model: model.into(),
            event: event.into(),
        }
    }
}

/// Formula AST. `Or`, `Implies`, `Iff`, `K`, `D` and `C` are sugar and are
/// removed by [`Formula::desugar`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Prop),
    /// `B <= C`: group B knows at least as much as group C.
    Comp(Group, Group),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    K(Agent, Box<Formula>),
    D(Group, Box<Formula>),
    C(Group, Box<Formula>),
    Cd(GroupFamily, Box<Formula>),
    SemiPub(ReadMapExpr, Box<Formula>),
    Event(EventRef, Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(Prop::new(name).expect("valid proposition name"))
    }

    pub fn comp(b: Group, c: Group) -> Formula {
        Formula::Comp(b, c)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn k(agent: Agent, f: Formula) -> Formula {
        Formula::K(agent, Box::new(f))
    }

    pub fn d(group: Group, f: Formula) -> Formula {
        Formula::D(group, Box::new(f))
    }

    pub fn c(group: Group, f: Formula) -> Formula {
        Formula::C(group, Box::new(f))
    }

    pub fn cd(family: GroupFamily, f: Formula) -> Formula {
        Formula::Cd(family, Box::new(f))
    }

    /// Distributed knowledge written directly as `Cd{{B}}`.
    pub fn dist(group: Group, f: Formula) -> Formula {
        Formula::Cd(GroupFamily::singleton(group), Box::new(f))
    }

    pub fn semi(map: ReadMapExpr, f: Formula) -> Formula {
        Formula::SemiPub(map, Box::new(f))
    }

    pub fn event(r: EventRef, f: Formula) -> Formula {
        Formula::Event(r, Box::new(f))
    }

    /// Left-nested conjunction; `True` for an empty list.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Single negation: strips one outer `Not`, otherwise adds one.
    pub fn negated(&self) -> Formula {
        match self {
            Formula::Not(inner) => (**inner).clone(),
            other => Formula::not(other.clone()),
        }
    }

    /// Immediate subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::Comp(..) => vec![],
            Formula::Not(a)
            | Formula::K(_, a)
            | Formula::D(_, a)
            | Formula::C(_, a)
            | Formula::Cd(_, a)
            | Formula::SemiPub(_, a)
            | Formula::Event(_, a) => vec![a],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                vec![a, b]
            }
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    /// Nesting depth of modal operators (epistemic and dynamic).
    pub fn modal_depth(&self) -> usize {
        let below = self
            .children()
            .into_iter()
            .map(Formula::modal_depth)
            .max()
            .unwrap_or(0);
        match self {
            Formula::K(..)
            | Formula::D(..)
            | Formula::C(..)
            | Formula::Cd(..)
            | Formula::SemiPub(..)
            | Formula::Event(..) => below + 1,
            _ => below,
        }
    }

    /// Number of `[!α]` and `[E.e]` nodes.
    pub fn dynamic_count(&self) -> usize {
        let own = matches!(self, Formula::SemiPub(..) | Formula::Event(..)) as usize;
        own + self
            .children()
            .into_iter()
            .map(Formula::dynamic_count)
            .sum::<usize>()
    }

    pub fn is_static(&self) -> bool {
        self.dynamic_count() == 0
    }

    pub fn has_events(&self) -> bool {
        matches!(self, Formula::Event(..)) || self.children().into_iter().any(Formula::has_events)
    }

    pub fn has_semipublic(&self) -> bool {
        matches!(self, Formula::SemiPub(..))
            || self.children().into_iter().any(Formula::has_semipublic)
    }

    /// True if no sugar node (`Or`, `Implies`, `Iff`, `K`, `D`, `C`) occurs.
    pub fn is_desugared(&self) -> bool {
        !matches!(
            self,
            Formula::Or(..)
                | Formula::Implies(..)
                | Formula::Iff(..)
                | Formula::K(..)
                | Formula::D(..)
                | Formula::C(..)
        ) && self.children().into_iter().all(Formula::is_desugared)
    }

    /// Every agent mentioned anywhere in the formula, including inside
    /// reading maps.
    pub fn agents(&self) -> AgentSet {
        let mut out = AgentSet::new();
        self.collect_agents(&mut out);
        out
    }

    fn collect_agents(&self, out: &mut AgentSet) {
        match self {
            Formula::Comp(b, c) => {
                out.extend(b.iter().cloned());
                out.extend(c.iter().cloned());
            }
            Formula::K(a, _) => {
                out.insert(a.clone());
            }
            Formula::D(g, _) | Formula::C(g, _) => out.extend(g.iter().cloned()),
            Formula::Cd(fam, _) => fam.iter().for_each(|g| out.extend(g.iter().cloned())),
            Formula::SemiPub(map, _) => out.extend(map.agents()),
            _ => {}
        }
        for child in self.children() {
            child.collect_agents(out);
        }
    }

    pub fn props(&self) -> BTreeSet<Prop> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom(p) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    pub fn event_refs(&self) -> BTreeSet<EventRef> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Event(r, _) = f {
                out.insert(r.clone());
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        for child in self.children() {
            child.visit(f);
        }
    }

    /// Rewrites `K`, `D`, `C` into `Cd` and the derived connectives into
    /// `Not`/`And`. Idempotent.
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::Comp(..) => self.clone(),
            Formula::Not(a) => Formula::not(a.desugar()),
            Formula::And(a, b) => Formula::and(a.desugar(), b.desugar()),
            Formula::Or(a, b) => Formula::not(Formula::and(
                Formula::not(a.desugar()),
                Formula::not(b.desugar()),
            )),
            Formula::Implies(a, b) => {
                Formula::not(Formula::and(a.desugar(), Formula::not(b.desugar())))
            }
            Formula::Iff(a, b) => {
                let (a, b) = (a.desugar(), b.desugar());
                Formula::and(
                    Formula::not(Formula::and(a.clone(), Formula::not(b.clone()))),
                    Formula::not(Formula::and(b, Formula::not(a))),
                )
            }
            Formula::K(agent, a) => {
                Formula::dist(Group::singleton(agent.clone()), a.desugar())
            }
            Formula::D(g, a) => Formula::dist(g.clone(), a.desugar()),
            Formula::C(g, a) => Formula::cd(
                GroupFamily::new(g.iter().cloned().map(Group::singleton))
                    .expect("groups are nonempty"),
                a.desugar(),
            ),
            Formula::Cd(fam, a) => Formula::cd(fam.clone(), a.desugar()),
            Formula::SemiPub(map, a) => Formula::semi(map.clone(), a.desugar()),
            Formula::Event(r, a) => Formula::event(r.clone(), a.desugar()),
        }
    }

    /// All syntactic subformulas, including the formula itself.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            out.insert(f.clone());
        });
        out
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render::render_formula(self))
    }
}

/// Desugars `f`; see [`Formula::desugar`].
pub fn desugar(f: &Formula) -> Formula {
    f.desugar()
}

/// All subformulas of `f`; see [`Formula::subformulas`].
pub fn subformulas(f: &Formula) -> BTreeSet<Formula> {
    f.subformulas()
}
