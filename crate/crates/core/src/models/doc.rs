//! JSON documents for models and pseudo-models.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{index_states, EpistemicModel, ModelError, Partition, PseudoModel};
use crate::syntax::{Agent, AgentSet, Group, Prop};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub agents: Vec<String>,
    pub states: Vec<String>,
    pub relations: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PseudoDoc {
    pub agents: Vec<String>,
    pub states: Vec<String>,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    pub groups: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    pub comparatives: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
}

pub fn load_model(json: &str) -> Result<EpistemicModel, ModelError> {
    let doc: ModelDoc =
        serde_json::from_str(json).map_err(|e| ModelError::Schema(e.to_string()))?;
    EpistemicModel::from_doc(&doc)
}

pub fn load_pseudo(json: &str) -> Result<PseudoModel, ModelError> {
    let doc: PseudoDoc =
        serde_json::from_str(json).map_err(|e| ModelError::Schema(e.to_string()))?;
    PseudoModel::from_doc(&doc)
}

fn parse_agents(names: &[String]) -> Result<AgentSet, ModelError> {
    let mut agents = AgentSet::new();
    for n in names {
        if !agents.insert(Agent::new(n.as_str())?) {
            return Err(ModelError::Schema(format!("agent `{n}` listed twice")));
        }
    }
    Ok(agents)
}

fn parse_group(key: &str, agents: &AgentSet) -> Result<Group, ModelError> {
    let g = Group::from_key(key)?;
    if let Some(a) = g.iter().find(|a| !agents.contains(*a)) {
        return Err(ModelError::UnknownAgent(a.to_string()));
    }
    Ok(g)
}

fn lookup(index: &HashMap<String, usize>, name: &str) -> Result<usize, ModelError> {
    index
        .get(name)
        .copied()
        .ok_or_else(|| ModelError::UnknownState(name.to_string()))
}

fn parse_partition(
    owner: &str,
    blocks: &[Vec<String>],
    index: &HashMap<String, usize>,
) -> Result<Partition, ModelError> {
    let blocks = blocks
        .iter()
        .map(|b| b.iter().map(|s| lookup(index, s)).collect())
        .collect::<Result<Vec<Vec<usize>>, _>>()?;
    Partition::from_blocks(index.len(), &blocks).map_err(|issue| ModelError::Partition {
        owner: owner.to_string(),
        detail: format!("{issue:?}"),
    })
}

fn parse_valuation(
    val: &BTreeMap<String, Vec<String>>,
    index: &HashMap<String, usize>,
) -> Result<BTreeMap<Prop, BTreeSet<usize>>, ModelError> {
    val.iter()
        .map(|(p, states)| {
            let set = states
                .iter()
                .map(|s| lookup(index, s))
                .collect::<Result<_, _>>()?;
            Ok((Prop::new(p.as_str())?, set))
        })
        .collect()
}

fn render_blocks(p: &Partition, states: &[String]) -> Vec<Vec<String>> {
    p.blocks()
        .into_iter()
        .map(|b| b.into_iter().map(|s| states[s].clone()).collect())
        .collect()
}

fn render_set(v: &[bool], states: &[String]) -> Vec<String> {
    v.iter()
        .enumerate()
        .filter(|(_, &t)| t)
        .map(|(s, _)| states[s].clone())
        .collect()
}

impl EpistemicModel {
    pub fn from_doc(doc: &ModelDoc) -> Result<EpistemicModel, ModelError> {
        let agents = parse_agents(&doc.agents)?;
        let index = index_states(&doc.states)?;
        let mut rel = BTreeMap::new();
        for (name, blocks) in &doc.relations {
            let a = Agent::new(name.as_str())?;
            if !agents.contains(&a) {
                return Err(ModelError::UnknownAgent(name.clone()));
            }
            rel.insert(a, parse_partition(name, blocks, &index)?);
        }
        let valuation = parse_valuation(&doc.valuation, &index)?;
        EpistemicModel::new(agents, doc.states.clone(), rel, valuation)
    }

    pub fn to_doc(&self) -> ModelDoc {
        ModelDoc {
            agents: self.agents().iter().map(|a| a.to_string()).collect(),
            states: self.states().to_vec(),
            relations: self
                .relations()
                .iter()
                .map(|(a, p)| (a.to_string(), render_blocks(p, self.states())))
                .collect(),
            valuation: self
                .valuation()
                .iter()
                .map(|(p, v)| (p.to_string(), render_set(v, self.states())))
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("model documents serialize")
    }
}

fn comparative_key(b: &Group, c: &Group) -> String {
    format!("{}<={}", b.key(), c.key())
}

impl PseudoModel {
    pub fn from_doc(doc: &PseudoDoc) -> Result<PseudoModel, ModelError> {
        let agents = parse_agents(&doc.agents)?;
        let index = index_states(&doc.states)?;
        let mut grel = BTreeMap::new();
        for (key, blocks) in doc.relations.iter().chain(&doc.groups) {
            let g = parse_group(key, &agents)?;
            let p = parse_partition(key, blocks, &index)?;
            if grel.insert(g, p).is_some() {
                return Err(ModelError::Schema(format!("relation for `{key}` given twice")));
            }
        }
        let mut comps = BTreeMap::new();
        for (key, states) in &doc.comparatives {
            let (b, c) = key
                .split_once("<=")
                .ok_or_else(|| ModelError::Schema(format!("bad comparative key `{key}`")))?;
            let pair = (parse_group(b, &agents)?, parse_group(c, &agents)?);
            let set: BTreeSet<usize> = states
                .iter()
                .map(|s| lookup(&index, s))
                .collect::<Result<_, _>>()?;
            comps.insert(pair, set);
        }
        let valuation = parse_valuation(&doc.valuation, &index)?;
        PseudoModel::new(agents, doc.states.clone(), grel, valuation, comps)
    }

    pub fn to_doc(&self) -> PseudoDoc {
        let states = self.states();
        let mut relations = BTreeMap::new();
        let mut groups = BTreeMap::new();
        for (g, p) in self.group_relations() {
            let target = if g.len() == 1 { &mut relations } else { &mut groups };
            target.insert(g.key(), render_blocks(p, states));
        }
        PseudoDoc {
            agents: self.agents().iter().map(|a| a.to_string()).collect(),
            states: states.to_vec(),
            relations,
            groups,
            comparatives: self
                .comparatives()
                .map(|((b, c), v)| (comparative_key(b, c), render_set(v, states)))
                .collect(),
            valuation: self
                .valuation()
                .iter()
                .map(|(p, v)| (p.to_string(), render_set(v, states)))
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("pseudo-model documents serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_round_trip() {
        let text = r#"{"agents":["a","b"],"states":["s","t"],
            "relations":{"a":[["s","t"]],"b":[["s"],["t"]]},"valuation":{"p":["s"]}}"#;
        let m = load_model(text).unwrap();
        let again = load_model(&m.to_json()).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(load_model("{}"), Err(ModelError::Schema(_))));
        assert!(matches!(
            load_model(r#"{"agents":["a"],"states":["s"],"relations":{}}"#),
            Err(ModelError::Partition { .. })
        ));
        assert!(matches!(
            load_model(r#"{"agents":["a"],"states":["s"],"relations":{"a":[["s"]],"b":[["s"]]}}"#),
            Err(ModelError::UnknownAgent(_))
        ));
        assert!(matches!(
            load_model(r#"{"agents":["a"],"states":["s","s"],"relations":{"a":[["s"]]}}"#),
            Err(ModelError::DuplicateState(_))
        ));
    }

    #[test]
    fn pseudo_round_trip() {
        let text = r#"{"agents":["a","b"],"states":["s","t"],
            "relations":{"a":[["s","t"]],"b":[["s","t"]]},
            "groups":{"a,b":[["s"],["t"]]},
            "comparatives":{"a,b<=a":["s","t"]},
            "valuation":{"p":["s"]}}"#;
        let pm = load_pseudo(text).unwrap();
        let again = load_pseudo(&pm.to_json()).unwrap();
        assert_eq!(pm, again);
    }
}
