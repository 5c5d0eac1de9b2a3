use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{DynamicsError, ReadingMap};
use crate::models::{EpistemicModel, Partition};
use crate::syntax::{Agent, AgentSet, EventCatalog, Group, SyntaxError};

/// Events with per-agent indistinguishability and a reading map per event.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReadingEventModel {
    agents: AgentSet,
    events: Vec<String>,
    index: HashMap<String, usize>,
    erel: BTreeMap<Agent, Partition>,
    reads: Vec<ReadingMap>,
}

fn valid_event_name(name: &str) -> bool {
    name.split(';').all(|part| {
        let mut chars = part.chars();
        matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
    })
}

impl ReadingEventModel {
    pub fn new(
        agents: AgentSet,
        events: Vec<String>,
        erel: BTreeMap<Agent, Partition>,
        reads: Vec<ReadingMap>,
    ) -> Result<ReadingEventModel, DynamicsError> {
        if events.is_empty() {
            return Err(DynamicsError::Schema("an event model needs at least one event".into()));
        }
        let mut index = HashMap::new();
        for (i, e) in events.iter().enumerate() {
            if !valid_event_name(e) {
                return Err(DynamicsError::Schema(format!("invalid event id `{e}`")));
            }
            if index.insert(e.clone(), i).is_some() {
                return Err(DynamicsError::Schema(format!("event `{e}` listed twice")));
            }
        }
        if reads.len() != events.len() {
            return Err(DynamicsError::Schema("one reading map per event required".into()));
        }
        if reads.iter().any(|r| r.universe() != agents) {
            return Err(DynamicsError::UniverseMismatch);
        }
        for a in &agents {
            let p = erel.get(a).ok_or_else(|| {
                DynamicsError::Schema(format!("no event relation for agent `{a}`"))
            })?;
            if p.len() != events.len() {
                return Err(DynamicsError::Schema(format!(
                    "event relation for `{a}` has the wrong size"
                )));
            }
            for e in 0..events.len() {
                for f in (e + 1)..events.len() {
                    if p.same(e, f) && reads[e].read(a)? != reads[f].read(a)? {
                        return Err(DynamicsError::InconsistentReads {
                            agent: a.to_string(),
                            e: events[e].clone(),
                            f: events[f].clone(),
                        });
                    }
                }
            }
        }
        if let Some(a) = erel.keys().find(|a| !agents.contains(*a)) {
            return Err(DynamicsError::UnknownAgent(a.to_string()));
        }
        Ok(ReadingEventModel {
            agents,
            events,
            index,
            erel,
            reads,
        })
    }

    /// The one-event model whose only event carries `alpha`.
    pub fn single(name: &str, alpha: ReadingMap) -> Result<ReadingEventModel, DynamicsError> {
        let agents = alpha.universe();
        let erel = agents
            .iter()
            .map(|a| (a.clone(), Partition::total(1)))
            .collect();
        ReadingEventModel::new(agents, vec![name.to_string()], erel, vec![alpha])
    }

    pub fn agents(&self) -> &AgentSet {
        &self.agents
    }

    pub fn events(&self) -> &[String] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn event_index(&self, name: &str) -> Result<usize, DynamicsError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| DynamicsError::UnknownEvent(name.to_string()))
    }

    pub fn event_name(&self, e: usize) -> &str {
        &self.events[e]
    }

    pub fn erel(&self, a: &Agent) -> Result<&Partition, DynamicsError> {
        self.erel
            .get(a)
            .ok_or_else(|| DynamicsError::UnknownAgent(a.to_string()))
    }

    pub fn reads(&self, e: usize) -> &ReadingMap {
        &self.reads[e]
    }

    /// Intersection of the members' event relations.
    pub fn group_rel(&self, group: &Group) -> Result<Partition, DynamicsError> {
        let mut acc = Partition::total(self.len());
        for a in group.iter() {
            acc = acc.meet(self.erel(a)?);
        }
        Ok(acc)
    }

    pub fn to_doc(&self) -> EventDoc {
        EventDoc {
            agents: self.agents.iter().map(|a| a.to_string()).collect(),
            events: self.events.clone(),
            relations: self
                .erel
                .iter()
                .map(|(a, p)| {
                    let blocks = p
                        .blocks()
                        .into_iter()
                        .map(|b| b.into_iter().map(|e| self.events[e].clone()).collect())
                        .collect();
                    (a.to_string(), blocks)
                })
                .collect(),
            reads: self
                .events
                .iter()
                .zip(&self.reads)
                .map(|(e, r)| {
                    let delta = r
                        .reads()
                        .iter()
                        .filter(|(a, g)| g.len() > 1 || !g.contains(a))
                        .map(|(a, g)| (a.to_string(), g.iter().map(|b| b.to_string()).collect()))
                        .collect();
                    (e.clone(), delta)
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("event documents serialize")
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct EventDoc {
    pub agents: Vec<String>,
    pub events: Vec<String>,
    pub relations: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    pub reads: BTreeMap<String, BTreeMap<String, Vec<String>>>,
}

/// Reads an event-model document. Listed read sets that omit their reader
/// get the reader added and a warning, or fail when `strict`.
pub fn load_event_model(
    json: &str,
    strict: bool,
) -> Result<(ReadingEventModel, Vec<String>), DynamicsError> {
    let doc: EventDoc =
        serde_json::from_str(json).map_err(|e| DynamicsError::Schema(e.to_string()))?;
    let mut warnings = Vec::new();
    let agents: AgentSet = doc
        .agents
        .iter()
        .map(|a| Agent::new(a.as_str()))
        .collect::<Result<_, SyntaxError>>()?;
    if agents.len() != doc.agents.len() {
        return Err(DynamicsError::Schema("agent listed twice".into()));
    }
    let index: HashMap<&str, usize> = doc
        .events
        .iter()
        .enumerate()
        .map(|(i, e)| (e.as_str(), i))
        .collect();
    let lookup = |e: &str| {
        index
            .get(e)
            .copied()
            .ok_or_else(|| DynamicsError::UnknownEvent(e.to_string()))
    };

    let mut erel = BTreeMap::new();
    for (name, blocks) in &doc.relations {
        let a = Agent::new(name.as_str())?;
        if !agents.contains(&a) {
            return Err(DynamicsError::UnknownAgent(name.clone()));
        }
        let blocks = blocks
            .iter()
            .map(|b| b.iter().map(|e| lookup(e)).collect())
            .collect::<Result<Vec<Vec<usize>>, _>>()?;
        let p = Partition::from_blocks(doc.events.len(), &blocks).map_err(|issue| {
            DynamicsError::Schema(format!("event relation for `{name}` is not a partition: {issue:?}"))
        })?;
        erel.insert(a, p);
    }

    let mut reads = vec![ReadingMap::identity(&agents); doc.events.len()];
    for (event, delta) in &doc.reads {
        let e = lookup(event)?;
        let mut map = reads[e].reads().clone();
        for (reader, group) in delta {
            let a = Agent::new(reader.as_str())?;
            if !agents.contains(&a) {
                return Err(DynamicsError::UnknownAgent(reader.clone()));
            }
            let mut members = group
                .iter()
                .map(|b| {
                    let b = Agent::new(b.as_str())?;
                    if agents.contains(&b) {
                        Ok(b)
                    } else {
                        Err(DynamicsError::UnknownAgent(b.to_string()))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            if !members.contains(&a) {
                if strict {
                    return Err(DynamicsError::MissingSelfRead {
                        agent: a.to_string(),
                    });
                }
                warnings.push(format!(
                    "event `{event}`: agent `{a}` added to its own read set"
                ));
                members.push(a.clone());
            }
            map.insert(a, Group::new(members)?);
        }
        reads[e] = ReadingMap::new(map)?;
    }
    let em = ReadingEventModel::new(agents, doc.events.clone(), erel, reads)?;
    Ok((em, warnings))
}

/// Event models by id.
#[derive(Clone, Debug, Default)]
pub struct EventRegistry {
    models: BTreeMap<String, ReadingEventModel>,
}

impl EventRegistry {
    pub fn new() -> EventRegistry {
        EventRegistry::default()
    }

    pub fn insert(&mut self, id: &str, em: ReadingEventModel) -> Result<(), DynamicsError> {
        if id.contains(';') || !valid_event_name(id) {
            return Err(DynamicsError::Schema(format!("invalid event model id `{id}`")));
        }
        self.models.insert(id.to_string(), em);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Result<&ReadingEventModel, SyntaxError> {
        self.models
            .get(id)
            .ok_or_else(|| SyntaxError::UnknownEventModel(id.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = &String> {
        self.models.keys()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }
}

impl EventCatalog for EventRegistry {
    fn has_model(&self, model: &str) -> bool {
        self.models.contains_key(model)
    }

    fn has_event(&self, model: &str, event: &str) -> bool {
        self.models
            .get(model)
            .is_some_and(|m| m.index.contains_key(event))
    }
}

/// Result of a product update, with the pairing of its states.
#[derive(Clone, Debug)]
pub struct Product {
    pub model: EpistemicModel,
    events: usize,
}

impl Product {
    /// Index of the product state `(s, e)`.
    pub fn state(&self, s: usize, e: usize) -> usize {
        s * self.events + e
    }

    /// The `(state, event)` pair of a product state.
    pub fn pair(&self, i: usize) -> (usize, usize) {
        (i / self.events, i % self.events)
    }
}

/// `(s,e) ~a (t,f)` iff `s` and `t` are related by the group `e` lets `a`
/// read, and `e ~a f`. States are named `s@e`.
pub fn product_update(
    m: &EpistemicModel,
    em: &ReadingEventModel,
) -> Result<Product, DynamicsError> {
    if m.agents() != em.agents() {
        return Err(DynamicsError::UniverseMismatch);
    }
    let (n, k) = (m.len(), em.len());
    let mut cache: BTreeMap<Group, Partition> = BTreeMap::new();
    let mut rel = BTreeMap::new();
    for a in m.agents() {
        let ea = em.erel(a)?;
        let mut keys = Vec::with_capacity(n * k);
        for s in 0..n {
            for e in 0..k {
                let g = em.reads(e).read(a)?;
                if !cache.contains_key(g) {
                    cache.insert(g.clone(), m.group_rel(g)?);
                }
                // Events `a` confuses give `a` the same reads, so the group
                // label is comparable across the block.
                keys.push((ea.label(e), cache[g].label(s)));
            }
        }
        rel.insert(a.clone(), Partition::from_keys(keys));
    }
    let mut states = Vec::with_capacity(n * k);
    for s in m.states() {
        for e in em.events() {
            states.push(format!("{s}@{e}"));
        }
    }
    let valuation = m
        .valuation()
        .iter()
        .map(|(p, v)| {
            let lifted = (0..n * k).map(|i| v[i / k]).collect();
            (p.clone(), lifted)
        })
        .collect();
    Ok(Product {
        model: EpistemicModel::from_parts(m.agents().clone(), states, rel, valuation),
        events: k,
    })
}

/// Sequential composition: first `e1`'s event, then `e2`'s. The composite
/// of `e` and `f` is named `e;f` and has index `e * |E2| + f`.
pub fn compose_events(
    e1: &ReadingEventModel,
    e2: &ReadingEventModel,
) -> Result<ReadingEventModel, DynamicsError> {
    if e1.agents != e2.agents {
        return Err(DynamicsError::UniverseMismatch);
    }
    let (k1, k2) = (e1.len(), e2.len());
    let mut cache: BTreeMap<Group, Partition> = BTreeMap::new();
    let mut erel = BTreeMap::new();
    for a in &e1.agents {
        let fa = e2.erel(a)?;
        let mut keys = Vec::with_capacity(k1 * k2);
        for e in 0..k1 {
            for f in 0..k2 {
                let g = e2.reads(f).read(a)?;
                if !cache.contains_key(g) {
                    cache.insert(g.clone(), e1.group_rel(g)?);
                }
                keys.push((fa.label(f), cache[g].label(e)));
            }
        }
        erel.insert(a.clone(), Partition::from_keys(keys));
    }
    let mut events = Vec::with_capacity(k1 * k2);
    let mut reads = Vec::with_capacity(k1 * k2);
    for e in 0..k1 {
        for f in 0..k2 {
            events.push(format!("{};{}", e1.events[e], e2.events[f]));
            reads.push(e1.reads(e).compose(e2.reads(f))?);
        }
    }
    ReadingEventModel::new(e1.agents.clone(), events, erel, reads)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::semi_public_update;
    use crate::models::{is_isomorphism, load_model};
    use crate::syntax::{parse_agent_list, ReadMapExpr};

    const HACK: &str = r#"{
        "agents": ["a","b"],
        "events": ["hack","skip"],
        "relations": {"a": [["hack","skip"]], "b": [["hack"],["skip"]]},
        "reads": {"hack": {"b": ["a","b"]}, "skip": {}}
    }"#;

    const TWO: &str = r#"{
        "agents": ["a","b"],
        "states": ["s","t"],
        "relations": {"a": [["s"],["t"]], "b": [["s","t"]]},
        "valuation": {"p": ["s"]}
    }"#;

    fn ag(n: &str) -> Agent {
        Agent::new(n).unwrap()
    }

    #[test]
    fn loads_hacking_model() {
        let (em, warnings) = load_event_model(HACK, true).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(em.len(), 2);
        let hack = em.event_index("hack").unwrap();
        assert_eq!(em.reads(hack).read(&ag("b")).unwrap(), &Group::of(&["a", "b"]));
        assert_eq!(em.reads(hack).read(&ag("a")).unwrap(), &Group::of(&["a"]));
    }

    #[test]
    fn reader_is_added_unless_strict() {
        let doc = HACK.replace(r#""b": ["a","b"]"#, r#""b": ["a"]"#);
        let (em, warnings) = load_event_model(&doc, false).unwrap();
        assert_eq!(warnings.len(), 1);
        assert_eq!(em.reads(0).read(&ag("b")).unwrap(), &Group::of(&["a", "b"]));
        assert!(matches!(
            load_event_model(&doc, true),
            Err(DynamicsError::MissingSelfRead { .. })
        ));
    }

    #[test]
    fn indistinguishable_events_must_agree_on_reads() {
        let doc = HACK.replace(r#""b": [["hack"],["skip"]]"#, r#""b": [["hack","skip"]]"#);
        assert!(matches!(
            load_event_model(&doc, false),
            Err(DynamicsError::InconsistentReads { .. })
        ));
    }

    #[test]
    fn hacking_product() {
        let m = load_model(TWO).unwrap();
        let (em, _) = load_event_model(HACK, true).unwrap();
        let prod = product_update(&m, &em).unwrap();
        assert_eq!(prod.model.len(), 4);
        assert_eq!(prod.model.states()[0], "s@hack");
        let sh = prod.state(0, 0);
        assert_eq!(prod.pair(sh), (0, 0));
        let b = prod.model.agent_rel(&ag("b")).unwrap();
        let a = prod.model.agent_rel(&ag("a")).unwrap();
        // b reads a's base at (s,hack): only (s,hack) remains for b.
        assert_eq!(b.block_of(sh), vec![sh]);
        // a cannot tell hack from skip.
        assert_eq!(a.block_of(sh), vec![prod.state(0, 0), prod.state(0, 1)]);
        // at (s,skip), b still confuses s and t.
        assert_eq!(b.block_of(prod.state(0, 1)), vec![prod.state(0, 1), prod.state(1, 1)]);
    }

    #[test]
    fn single_event_product_is_the_semi_public_update() {
        let m = load_model(TWO).unwrap();
        let agents = parse_agent_list("a,b").unwrap();
        let alpha = ReadingMap::from_expr(&ReadMapExpr::Pub(Group::of(&["a"])), &agents).unwrap();
        let em = ReadingEventModel::single("e", alpha.clone()).unwrap();
        let prod = product_update(&m, &em).unwrap();
        let direct = semi_public_update(&m, &alpha).unwrap();
        assert!(is_isomorphism(&direct, &prod.model, &[0, 1]));
        let id = ReadingEventModel::single("e", ReadingMap::identity(&agents)).unwrap();
        assert!(is_isomorphism(&m, &product_update(&m, &id).unwrap().model, &[0, 1]));
    }

    #[test]
    fn composing_single_events_composes_maps() {
        let agents = parse_agent_list("a,b,c").unwrap();
        let alpha = ReadingMap::from_expr(&ReadMapExpr::Res(Group::of(&["a", "b"])), &agents).unwrap();
        let beta = ReadingMap::from_expr(&ReadMapExpr::Res(Group::of(&["b", "c"])), &agents).unwrap();
        let e1 = ReadingEventModel::single("e", alpha.clone()).unwrap();
        let e2 = ReadingEventModel::single("f", beta.clone()).unwrap();
        let c = compose_events(&e1, &e2).unwrap();
        assert_eq!(c.events(), &["e;f".to_string()]);
        assert_eq!(c.reads(0), &alpha.compose(&beta).unwrap());
    }

    #[test]
    fn composed_products_are_isomorphic() {
        let m = load_model(TWO).unwrap();
        let (em, _) = load_event_model(HACK, true).unwrap();
        let c = compose_events(&em, &em).unwrap();
        let direct = product_update(&m, &c).unwrap();
        let p1 = product_update(&m, &em).unwrap();
        let p2 = product_update(&p1.model, &em).unwrap();
        let map: Vec<usize> = (0..direct.model.len())
            .map(|i| {
                let (s, ef) = direct.pair(i);
                let (e, f) = (ef / em.len(), ef % em.len());
                p2.state(p1.state(s, e), f)
            })
            .collect();
        assert!(is_isomorphism(&direct.model, &p2.model, &map));
    }

    #[test]
    fn registry_lookup() {
        let (em, _) = load_event_model(HACK, true).unwrap();
        let mut reg = EventRegistry::new();
        reg.insert("hack", em).unwrap();
        assert!(reg.has_event("hack", "skip"));
        assert!(!reg.has_event("hack", "nope"));
        assert!(reg.get("other").is_err());
        let again = load_event_model(&reg.get("hack").unwrap().to_json(), true).unwrap().0;
        assert_eq!(&again, reg.get("hack").unwrap());
    }
}
