//! Reading maps, semi-public updates, reading event models and product
//! update.

mod events;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::models::{EpistemicModel, ModelError, Partition};
use crate::syntax::{Agent, AgentSet, Group, ReadMapExpr, SyntaxError};

pub use events::{
    compose_events, load_event_model, product_update, EventDoc, EventRegistry, Product,
    ReadingEventModel,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("agent universes differ")]
    UniverseMismatch,
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("agent `{agent}` does not read its own base")]
    MissingSelfRead { agent: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("events `{e}` and `{f}` are {agent}-indistinguishable but assign {agent} different reads")]
    InconsistentReads { agent: String, e: String, f: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

/// A total assignment of read sets to the agents of a universe, with every
/// agent reading at least itself.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReadingMap {
    reads: BTreeMap<Agent, Group>,
}

impl ReadingMap {
    pub fn new(reads: BTreeMap<Agent, Group>) -> Result<ReadingMap, DynamicsError> {
        for (a, g) in &reads {
            if !g.contains(a) {
                return Err(DynamicsError::MissingSelfRead {
                    agent: a.to_string(),
                });
            }
            if let Some(b) = g.iter().find(|b| !reads.contains_key(*b)) {
                return Err(DynamicsError::UnknownAgent(b.to_string()));
            }
        }
        Ok(ReadingMap { reads })
    }

    pub fn identity(universe: &AgentSet) -> ReadingMap {
        ReadingMap {
            reads: universe
                .iter()
                .map(|a| (a.clone(), Group::singleton(a.clone())))
                .collect(),
        }
    }

    /// Interprets a written map over `universe`.
    pub fn from_expr(expr: &ReadMapExpr, universe: &AgentSet) -> Result<ReadingMap, DynamicsError> {
        if let Some(a) = expr.agents().iter().find(|a| !universe.contains(*a)) {
            return Err(DynamicsError::UnknownAgent(a.to_string()));
        }
        let reads = universe
            .iter()
            .map(|a| {
                let own = Group::singleton(a.clone());
                (a.clone(), expr.lift(&own))
            })
            .collect();
        ReadingMap::new(reads)
    }

    pub fn universe(&self) -> AgentSet {
        self.reads.keys().cloned().collect()
    }

    pub fn read(&self, a: &Agent) -> Result<&Group, DynamicsError> {
        self.reads
            .get(a)
            .ok_or_else(|| DynamicsError::UnknownAgent(a.to_string()))
    }

    pub fn reads(&self) -> &BTreeMap<Agent, Group> {
        &self.reads
    }

    /// Union of the read sets of the group's members.
    pub fn lift(&self, group: &Group) -> Result<Group, DynamicsError> {
        let mut members = BTreeSet::new();
        for a in group.iter() {
            members.extend(self.read(a)?.iter().cloned());
        }
        Ok(Group::new(members).expect("read sets are nonempty"))
    }

    /// `(self ∘ other)(a) = self(other(a))`.
    pub fn compose(&self, other: &ReadingMap) -> Result<ReadingMap, DynamicsError> {
        if self.universe() != other.universe() {
            return Err(DynamicsError::UniverseMismatch);
        }
        let reads = other
            .reads
            .iter()
            .map(|(a, g)| Ok((a.clone(), self.lift(g)?)))
            .collect::<Result<_, DynamicsError>>()?;
        Ok(ReadingMap { reads })
    }

    pub fn is_identity(&self) -> bool {
        self.reads.iter().all(|(a, g)| g.len() == 1 && g.contains(a))
    }
}

/// Least set containing `maps` and closed under composition.
pub fn reading_closure(maps: &[ReadingMap]) -> Result<BTreeSet<ReadingMap>, DynamicsError> {
    let mut closed: BTreeSet<ReadingMap> = maps.iter().cloned().collect();
    let mut frontier: Vec<ReadingMap> = closed.iter().cloned().collect();
    while !frontier.is_empty() {
        let mut fresh = Vec::new();
        let current: Vec<ReadingMap> = closed.iter().cloned().collect();
        for x in &frontier {
            for y in &current {
                for z in [x.compose(y)?, y.compose(x)?] {
                    if !closed.contains(&z) {
                        closed.insert(z.clone());
                        fresh.push(z);
                    }
                }
            }
        }
        frontier = fresh;
    }
    Ok(closed)
}

/// Every agent `b` comes to have the relation of the group it reads.
pub fn semi_public_update(
    m: &EpistemicModel,
    alpha: &ReadingMap,
) -> Result<EpistemicModel, DynamicsError> {
    if &alpha.universe() != m.agents() {
        return Err(DynamicsError::UniverseMismatch);
    }
    let mut cache: BTreeMap<&Group, Partition> = BTreeMap::new();
    let mut rel = BTreeMap::new();
    for (b, g) in &alpha.reads {
        if !cache.contains_key(g) {
            cache.insert(g, m.group_rel(g)?);
        }
        rel.insert(b.clone(), cache[g].clone());
    }
    Ok(m.with_relations(rel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{is_isomorphism, load_model};
    use crate::syntax::parse_agent_list;

    const EX1: &str = r#"{
        "agents": ["a","b","c"],
        "states": ["sp","sq","sr","sw"],
        "relations": {
            "a": [["sp","sr"],["sq","sw"]],
            "b": [["sp","sq"],["sr","sw"]],
            "c": [["sp","sw"],["sq","sr"]]
        },
        "valuation": {"p":["sp"],"q":["sq"],"r":["sr"],"w":["sw"]}
    }"#;

    fn abc() -> AgentSet {
        parse_agent_list("a,b,c").unwrap()
    }

    fn map(expr: ReadMapExpr) -> ReadingMap {
        ReadingMap::from_expr(&expr, &abc()).unwrap()
    }

    fn ag(n: &str) -> Agent {
        Agent::new(n).unwrap()
    }

    #[test]
    fn lifting() {
        let pub_a = map(ReadMapExpr::Pub(Group::of(&["a"])));
        assert_eq!(pub_a.lift(&Group::of(&["b"])).unwrap(), Group::of(&["a", "b"]));
        let id = ReadingMap::identity(&abc());
        assert_eq!(id.lift(&Group::of(&["a", "c"])).unwrap(), Group::of(&["a", "c"]));
        let grp = map(ReadMapExpr::Grp(vec![Group::of(&["a", "b"]), Group::of(&["c"])]));
        assert_eq!(grp.lift(&Group::of(&["b"])).unwrap(), Group::of(&["a", "b"]));
        assert!(pub_a.lift(&Group::of(&["z"])).is_err());
    }

    #[test]
    fn self_read_is_required() {
        let reads = BTreeMap::from([(ag("a"), Group::of(&["b"])), (ag("b"), Group::of(&["b"]))]);
        assert!(matches!(
            ReadingMap::new(reads),
            Err(DynamicsError::MissingSelfRead { .. })
        ));
    }

    #[test]
    fn composition() {
        let g = map(ReadMapExpr::Pub(Group::of(&["a"])));
        let h = map(ReadMapExpr::Pub(Group::of(&["b"])));
        assert_eq!(
            g.compose(&h).unwrap(),
            map(ReadMapExpr::Pub(Group::of(&["a", "b"])))
        );
        let id = ReadingMap::identity(&abc());
        assert_eq!(g.compose(&id).unwrap(), g);
        assert_eq!(g.compose(&g).unwrap(), g);

        let r1 = map(ReadMapExpr::Res(Group::of(&["a", "b"])));
        let r2 = map(ReadMapExpr::Res(Group::of(&["b", "c"])));
        let c = Group::of(&["c"]);
        assert_eq!(r2.lift(&c).unwrap(), Group::of(&["b", "c"]));
        assert_eq!(r1.compose(&r2).unwrap().lift(&c).unwrap(), Group::of(&["a", "b", "c"]));

        let other = ReadingMap::identity(&parse_agent_list("a,b").unwrap());
        assert_eq!(g.compose(&other), Err(DynamicsError::UniverseMismatch));
    }

    #[test]
    fn closures() {
        let pa = map(ReadMapExpr::Pub(Group::of(&["a"])));
        let pb = map(ReadMapExpr::Pub(Group::of(&["b"])));
        let pab = map(ReadMapExpr::Pub(Group::of(&["a", "b"])));
        assert_eq!(
            reading_closure(&[pa.clone(), pb.clone()]).unwrap(),
            BTreeSet::from([pa, pb, pab])
        );
        let id = ReadingMap::identity(&abc());
        assert_eq!(reading_closure(std::slice::from_ref(&id)).unwrap(), BTreeSet::from([id]));
        let ab = parse_agent_list("a,b").unwrap();
        let res = ReadingMap::from_expr(&ReadMapExpr::Res(Group::of(&["a", "b"])), &ab).unwrap();
        assert_eq!(reading_closure(std::slice::from_ref(&res)).unwrap(), BTreeSet::from([res]));
    }

    #[test]
    fn public_sharing_by_b() {
        let m = load_model(EX1).unwrap();
        let up = semi_public_update(&m, &map(ReadMapExpr::Pub(Group::of(&["b"])))).unwrap();
        assert_eq!(up.agent_rel(&ag("a")).unwrap(), &Partition::discrete(4));
        assert_eq!(up.agent_rel(&ag("c")).unwrap(), &Partition::discrete(4));
        assert_eq!(up.agent_rel(&ag("b")).unwrap(), m.agent_rel(&ag("b")).unwrap());
    }

    #[test]
    fn public_sharing_by_a_and_b() {
        let m = load_model(EX1).unwrap();
        let up = semi_public_update(&m, &map(ReadMapExpr::Pub(Group::of(&["a", "b"])))).unwrap();
        for a in ["a", "b", "c"] {
            assert_eq!(up.agent_rel(&ag(a)).unwrap(), &Partition::discrete(4));
        }
    }

    #[test]
    fn identity_update_changes_nothing() {
        let m = load_model(EX1).unwrap();
        let up = semi_public_update(&m, &ReadingMap::identity(&abc())).unwrap();
        assert_eq!(up, m);
        assert!(is_isomorphism(&up, &m, &[0, 1, 2, 3]));
        let wrong = ReadingMap::identity(&parse_agent_list("a,b").unwrap());
        assert_eq!(semi_public_update(&m, &wrong), Err(DynamicsError::UniverseMismatch));
    }
}
