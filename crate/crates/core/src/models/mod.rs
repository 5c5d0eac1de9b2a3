//! Finite epistemic models and pseudo-models.
//!
//! Relations are [`Partition`]s over state indices. An [`EpistemicModel`]
//! stores one partition per agent and derives group relations as meets; a
//! [`PseudoModel`] stores a partition per group directly together with an
//! explicit valuation of comparatives.

mod doc;
mod partition;
mod pseudo;

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::syntax::{Agent, AgentSet, Group, GroupFamily, Prop, SyntaxError};

pub use doc::{load_model, load_pseudo, ModelDoc, PseudoDoc};
pub use partition::{BlockIssue, Partition, UnionFind};
pub use pseudo::{model_as_pseudo, validate_pseudo, PseudoModel, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("relation for `{owner}` is not a partition: {detail}")]
    Partition { owner: String, detail: String },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("no relation stored for group {0}")]
    UnknownGroup(String),
    #[error("agent universes differ")]
    UniverseMismatch,
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

/// Anything that can answer "what is the relation of group B".
pub trait GroupRelations {
    fn num_states(&self) -> usize;
    fn group_partition(&self, group: &Group) -> Result<Cow<'_, Partition>, ModelError>;
}

/// Reflexive-transitive closure of the union of the family's group relations.
pub fn family_rel<M: GroupRelations + ?Sized>(
    m: &M,
    family: &GroupFamily,
) -> Result<Partition, ModelError> {
    let parts = family
        .iter()
        .map(|g| m.group_partition(g))
        .collect::<Result<Vec<_>, _>>()?;
    if let [only] = parts.as_slice() {
        return Ok(only.clone().into_owned());
    }
    Ok(Partition::join_all(parts.iter().map(|p| p.as_ref())))
}

pub(crate) fn index_states(states: &[String]) -> Result<HashMap<String, usize>, ModelError> {
    let mut index = HashMap::with_capacity(states.len());
    for (i, s) in states.iter().enumerate() {
        if index.insert(s.clone(), i).is_some() {
            return Err(ModelError::DuplicateState(s.clone()));
        }
    }
    Ok(index)
}

fn truth_vector(n: usize, states: &BTreeSet<usize>) -> Result<Vec<bool>, ModelError> {
    let mut v = vec![false; n];
    for &s in states {
        *v.get_mut(s)
            .ok_or_else(|| ModelError::UnknownState(format!("#{s}")))? = true;
    }
    Ok(v)
}

/// A finite S5 model: states, one partition per agent, and a valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpistemicModel {
    agents: AgentSet,
    states: Vec<String>,
    index: HashMap<String, usize>,
    rel: BTreeMap<Agent, Partition>,
    valuation: BTreeMap<Prop, Vec<bool>>,
}

impl EpistemicModel {
    pub fn new(
        agents: AgentSet,
        states: Vec<String>,
        rel: BTreeMap<Agent, Partition>,
        valuation: BTreeMap<Prop, BTreeSet<usize>>,
    ) -> Result<EpistemicModel, ModelError> {
        if states.is_empty() {
            return Err(ModelError::Schema("a model needs at least one state".into()));
        }
        let index = index_states(&states)?;
        let n = states.len();
        for a in rel.keys() {
            if !agents.contains(a) {
                return Err(ModelError::UnknownAgent(a.to_string()));
            }
        }
        for a in &agents {
            match rel.get(a) {
                None => {
                    return Err(ModelError::Partition {
                        owner: a.to_string(),
                        detail: "missing".into(),
                    })
                }
                Some(p) if p.len() != n => {
                    return Err(ModelError::Partition {
                        owner: a.to_string(),
                        detail: format!("covers {} states, model has {n}", p.len()),
                    })
                }
                Some(_) => {}
            }
        }
        let valuation = valuation
            .into_iter()
            .map(|(p, set)| Ok((p, truth_vector(n, &set)?)))
            .collect::<Result<_, ModelError>>()?;
        Ok(EpistemicModel {
            agents,
            states,
            index,
            rel,
            valuation,
        })
    }

    pub fn agents(&self) -> &AgentSet {
        &self.agents
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_index(&self, name: &str) -> Result<usize, ModelError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::UnknownState(name.to_string()))
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn agent_rel(&self, a: &Agent) -> Result<&Partition, ModelError> {
        self.rel
            .get(a)
            .ok_or_else(|| ModelError::UnknownAgent(a.to_string()))
    }

    pub fn relations(&self) -> &BTreeMap<Agent, Partition> {
        &self.rel
    }

    /// Propositions that occur in the valuation.
    pub fn props(&self) -> impl Iterator<Item = &Prop> {
        self.valuation.keys()
    }

    pub fn holds(&self, p: &Prop, s: usize) -> bool {
        self.valuation.get(p).is_some_and(|v| v[s])
    }

    pub fn truth(&self, p: &Prop) -> Cow<'_, [bool]> {
        match self.valuation.get(p) {
            Some(v) => Cow::Borrowed(v),
            None => Cow::Owned(vec![false; self.len()]),
        }
    }

    pub(crate) fn valuation(&self) -> &BTreeMap<Prop, Vec<bool>> {
        &self.valuation
    }

    /// Intersection of the members' relations.
    pub fn group_rel(&self, group: &Group) -> Result<Partition, ModelError> {
        let mut iter = group.iter();
        let first = iter.next().expect("groups are nonempty");
        let mut acc = self.agent_rel(first)?.clone();
        for a in iter {
            acc = acc.meet(self.agent_rel(a)?);
        }
        Ok(acc)
    }

    /// States where `B <= C` holds: the B-class is inside the C-class.
    pub fn comparative(&self, b: &Group, c: &Group) -> Result<Vec<bool>, ModelError> {
        Ok(self.group_rel(b)?.contained_in(&self.group_rel(c)?))
    }

    /// A copy with the given relations replaced, same states and valuation.
    pub(crate) fn with_relations(&self, rel: BTreeMap<Agent, Partition>) -> EpistemicModel {
        EpistemicModel {
            rel,
            ..self.clone()
        }
    }

    pub(crate) fn from_parts(
        agents: AgentSet,
        states: Vec<String>,
        rel: BTreeMap<Agent, Partition>,
        valuation: BTreeMap<Prop, Vec<bool>>,
    ) -> EpistemicModel {
        let index = index_states(&states).expect("generated state names are distinct");
        EpistemicModel {
            agents,
            states,
            index,
            rel,
            valuation,
        }
    }
}

impl GroupRelations for EpistemicModel {
    fn num_states(&self) -> usize {
        self.len()
    }

    fn group_partition(&self, group: &Group) -> Result<Cow<'_, Partition>, ModelError> {
        if let Some(a) = group.iter().next().filter(|_| group.len() == 1) {
            return self.agent_rel(a).map(Cow::Borrowed);
        }
        self.group_rel(group).map(Cow::Owned)
    }
}

/// Checks that `map` (state of `a` to state of `b`) is an isomorphism of
/// epistemic models: a bijection preserving every agent's relation and the
/// truth of every proposition either model mentions.
pub fn is_isomorphism(a: &EpistemicModel, b: &EpistemicModel, map: &[usize]) -> bool {
    if a.agents != b.agents || a.len() != b.len() || map.len() != a.len() {
        return false;
    }
    let mut hit = vec![false; b.len()];
    for &t in map {
        if t >= b.len() || std::mem::replace(&mut hit[t], true) {
            return false;
        }
    }
    let props: BTreeSet<&Prop> = a.valuation.keys().chain(b.valuation.keys()).collect();
    let atoms_ok = props
        .iter()
        .all(|p| (0..a.len()).all(|s| a.holds(p, s) == b.holds(p, map[s])));
    atoms_ok
        && a
            .agents
            .iter()
            .all(|ag| a.rel[ag].permuted(map) == b.rel[ag])
}
