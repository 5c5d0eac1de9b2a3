use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use super::{index_states, truth_vector, EpistemicModel, GroupRelations, ModelError, Partition};
use crate::syntax::{all_groups, AgentSet, Group, Prop};

/// A structure with a primitive relation per stored group and an explicit
/// valuation of comparatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudoModel {
    agents: AgentSet,
    states: Vec<String>,
    index: HashMap<String, usize>,
    grel: BTreeMap<Group, Partition>,
    valuation: BTreeMap<Prop, Vec<bool>>,
    comps: BTreeMap<(Group, Group), Vec<bool>>,
}

impl PseudoModel {
    /// Comparatives between stored groups that are not listed hold nowhere.
    pub fn new(
        agents: AgentSet,
        states: Vec<String>,
        grel: BTreeMap<Group, Partition>,
        valuation: BTreeMap<Prop, BTreeSet<usize>>,
        comps: BTreeMap<(Group, Group), BTreeSet<usize>>,
    ) -> Result<PseudoModel, ModelError> {
        if states.is_empty() {
            return Err(ModelError::Schema("a pseudo-model needs at least one state".into()));
        }
        let n = states.len();
        for (g, p) in &grel {
            if let Some(a) = g.iter().find(|a| !agents.contains(*a)) {
                return Err(ModelError::UnknownAgent(a.to_string()));
            }
            if p.len() != n {
                return Err(ModelError::Partition {
                    owner: g.key(),
                    detail: format!("covers {} states, model has {n}", p.len()),
                });
            }
        }
        let mut full = BTreeMap::new();
        for ((b, c), set) in comps {
            for g in [&b, &c] {
                if !grel.contains_key(g) {
                    return Err(ModelError::UnknownGroup(g.to_string()));
                }
            }
            full.insert((b, c), truth_vector(n, &set)?);
        }
        let valuation = valuation
            .into_iter()
            .map(|(p, set)| Ok((p, truth_vector(n, &set)?)))
            .collect::<Result<_, ModelError>>()?;
        Ok(PseudoModel::from_parts(agents, states, grel, valuation, full))
    }

    pub(crate) fn from_parts(
        agents: AgentSet,
        states: Vec<String>,
        grel: BTreeMap<Group, Partition>,
        valuation: BTreeMap<Prop, Vec<bool>>,
        mut comps: BTreeMap<(Group, Group), Vec<bool>>,
    ) -> PseudoModel {
        let n = states.len();
        let index = index_states(&states).expect("distinct state names");
        let groups: Vec<&Group> = grel.keys().collect();
        for b in &groups {
            for c in &groups {
                comps
                    .entry(((*b).clone(), (*c).clone()))
                    .or_insert_with(|| vec![false; n]);
            }
        }
        PseudoModel {
            agents,
            states,
            index,
            grel,
            valuation,
            comps,
        }
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

    pub fn grel(&self, g: &Group) -> Result<&Partition, ModelError> {
        self.grel
            .get(g)
            .ok_or_else(|| ModelError::UnknownGroup(g.to_string()))
    }

    pub fn group_relations(&self) -> impl Iterator<Item = (&Group, &Partition)> {
        self.grel.iter()
    }

    pub fn groups(&self) -> impl Iterator<Item = &Group> {
        self.grel.keys()
    }

    pub fn holds(&self, p: &Prop, s: usize) -> bool {
        self.valuation.get(p).is_some_and(|v| v[s])
    }

    pub(crate) fn valuation(&self) -> &BTreeMap<Prop, Vec<bool>> {
        &self.valuation
    }

    pub fn props(&self) -> impl Iterator<Item = &Prop> {
        self.valuation.keys()
    }

    /// Extension of `B <= C`.
    pub fn comp(&self, b: &Group, c: &Group) -> Result<&[bool], ModelError> {
        match self.comps.get(&(b.clone(), c.clone())) {
            Some(v) => Ok(v),
            None => {
                let missing = if self.grel.contains_key(b) { c } else { b };
                Err(ModelError::UnknownGroup(missing.to_string()))
            }
        }
    }

    pub fn comparatives(&self) -> impl Iterator<Item = (&(Group, Group), &Vec<bool>)> {
        self.comps.iter()
    }

    pub fn set_comp(&mut self, b: &Group, c: &Group, s: usize, value: bool) {
        if let Some(v) = self.comps.get_mut(&(b.clone(), c.clone())) {
            v[s] = value;
        }
    }

    pub fn set_atom(&mut self, p: &Prop, s: usize, value: bool) {
        let n = self.len();
        self.valuation.entry(p.clone()).or_insert_with(|| vec![false; n])[s] = value;
    }

    pub fn set_grel(&mut self, g: &Group, p: Partition) {
        assert_eq!(p.len(), self.len());
        self.grel.insert(g.clone(), p);
    }
}

impl GroupRelations for PseudoModel {
    fn num_states(&self) -> usize {
        self.len()
    }

    fn group_partition(&self, group: &Group) -> Result<Cow<'_, Partition>, ModelError> {
        self.grel(group).map(Cow::Borrowed)
    }
}

/// The pseudo-model induced by a model: every nonempty group gets its
/// intersection relation, every comparative its semantic extension.
pub fn model_as_pseudo(m: &EpistemicModel) -> PseudoModel {
    let groups = all_groups(m.agents());
    let grel: BTreeMap<Group, Partition> = groups
        .iter()
        .map(|g| (g.clone(), m.group_rel(g).expect("groups drawn from the universe")))
        .collect();
    let mut comps = BTreeMap::new();
    for b in &groups {
        for c in &groups {
            comps.insert((b.clone(), c.clone()), grel[b].contained_in(&grel[c]));
        }
    }
    PseudoModel::from_parts(
        m.agents().clone(),
        m.states().to_vec(),
        grel,
        m.valuation().clone(),
        comps,
    )
}

/// First violated well-formedness condition of a pseudo-model. Condition 1
/// (each relation is an equivalence) holds by representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `s` satisfies `B <= C` and `s ~B t`, yet not `s ~C t`.
    NotInherited { b: Group, c: Group, s: String, t: String },
    /// `s` satisfies `B <= C` and `s ~B t`, yet `t` does not.
    NotUniform { b: Group, c: Group, s: String, t: String },
    /// `C ⊆ B` but `B <= C` fails at `s`.
    Inclusion { b: Group, c: Group, s: String },
    /// `B <= C` and `B <= E` at `s` without `B <= C∪E`.
    Additivity { b: Group, c: Group, e: Group, s: String },
    /// `B <= C` and `C <= E` at `s` without `B <= E`.
    Transitivity { b: Group, c: Group, e: Group, s: String },
}

impl Violation {
    pub fn condition(&self) -> u8 {
        match self {
            Violation::NotInherited { .. } | Violation::NotUniform { .. } => 2,
            Violation::Inclusion { .. } => 3,
            Violation::Additivity { .. } => 4,
            Violation::Transitivity { .. } => 5,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition {}: ", self.condition())?;
        match self {
            Violation::NotInherited { b, c, s, t } => {
                write!(f, "{s} satisfies {b} <= {c} and {s} ~{b} {t} but not {s} ~{c} {t}")
            }
            Violation::NotUniform { b, c, s, t } => {
                write!(f, "{s} satisfies {b} <= {c} and {s} ~{b} {t} but {t} does not")
            }
            Violation::Inclusion { b, c, s } => write!(f, "{b} <= {c} fails at {s}"),
            Violation::Additivity { b, c, e, s } => {
                write!(f, "{b} <= {c} and {b} <= {e} hold at {s} but {b} <= {} fails", c.union(e))
            }
            Violation::Transitivity { b, c, e, s } => {
                write!(f, "{b} <= {c} and {c} <= {e} hold at {s} but {b} <= {e} fails")
            }
        }
    }
}

/// Checks conditions 2 to 5 over the stored groups. Condition 4 is only
/// checked where the union group is stored as well.
pub fn validate_pseudo(pm: &PseudoModel) -> Result<(), Violation> {
    let groups: Vec<&Group> = pm.grel.keys().collect();
    let name = |s: usize| pm.states[s].clone();
    let n = pm.len();

    let blocks: BTreeMap<&Group, Vec<Vec<usize>>> =
        pm.grel.iter().map(|(g, p)| (g, p.blocks())).collect();
    for ((b, c), ext) in &pm.comps {
        let rc = &pm.grel[c];
        for block in &blocks[b] {
            let Some(&s) = block.iter().find(|&&s| ext[s]) else {
                continue;
            };
            for &t in block {
                if !rc.same(s, t) {
                    return Err(Violation::NotInherited {
                        b: b.clone(),
                        c: c.clone(),
                        s: name(s),
                        t: name(t),
                    });
                }
                if !ext[t] {
                    return Err(Violation::NotUniform {
                        b: b.clone(),
                        c: c.clone(),
                        s: name(s),
                        t: name(t),
                    });
                }
            }
        }
    }

    for ((b, c), ext) in &pm.comps {
        if c.is_subset(b) {
            if let Some(s) = (0..n).find(|&s| !ext[s]) {
                return Err(Violation::Inclusion {
                    b: b.clone(),
                    c: c.clone(),
                    s: name(s),
                });
            }
        }
    }

    let comp = |x: &Group, y: &Group| &pm.comps[&(x.clone(), y.clone())];
    for &b in &groups {
        for &c in &groups {
            for &e in &groups {
                let ce = c.union(e);
                if !pm.grel.contains_key(&ce) {
                    continue;
                }
                let (bc, be, bce) = (comp(b, c), comp(b, e), comp(b, &ce));
                if let Some(s) = (0..n).find(|&s| bc[s] && be[s] && !bce[s]) {
                    return Err(Violation::Additivity {
                        b: b.clone(),
                        c: c.clone(),
                        e: e.clone(),
                        s: name(s),
                    });
                }
            }
        }
    }

    for &b in &groups {
        for &c in &groups {
            for &e in &groups {
                let (bc, ce, be) = (comp(b, c), comp(c, e), comp(b, e));
                if let Some(s) = (0..n).find(|&s| bc[s] && ce[s] && !be[s]) {
                    return Err(Violation::Transitivity {
                        b: b.clone(),
                        c: c.clone(),
                        e: e.clone(),
                        s: name(s),
                    });
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::load_model;
    use crate::models::tests::{EX1, EX3};

    fn g(names: &[&str]) -> Group {
        Group::of(names)
    }

    #[test]
    fn induced_pseudo_models_are_valid() {
        for text in [EX1, EX3] {
            let pm = model_as_pseudo(&load_model(text).unwrap());
            assert_eq!(validate_pseudo(&pm), Ok(()));
        }
    }

    #[test]
    fn example_two_superiority_is_global() {
        let pm = model_as_pseudo(&load_model(EX1).unwrap());
        assert!(pm.comp(&g(&["a", "b"]), &g(&["c"])).unwrap().iter().all(|&x| x));
        assert!(!pm.comp(&g(&["c"]), &g(&["a", "b"])).unwrap().iter().any(|&x| x));
    }

    #[test]
    fn example_three_comparative_only_at_r() {
        let m = load_model(EX3).unwrap();
        let pm = model_as_pseudo(&m);
        let r = m.state_index("sr").unwrap();
        let ext = pm.comp(&g(&["a", "c"]), &g(&["b", "d"])).unwrap();
        assert_eq!(ext, (0..3).map(|s| s == r).collect::<Vec<_>>().as_slice());
    }

    #[test]
    fn single_state_comparatives_hold() {
        let m = load_model(
            r#"{"agents":["a","b"],"states":["s"],"relations":{"a":[["s"]],"b":[["s"]]}}"#,
        )
        .unwrap();
        let pm = model_as_pseudo(&m);
        assert!(pm.comparatives().all(|(_, v)| v[0]));
    }

    #[test]
    fn broken_inclusion_is_reported() {
        let mut pm = model_as_pseudo(&load_model(EX1).unwrap());
        pm.set_comp(&g(&["a"]), &g(&["a"]), 1, false);
        pm.set_comp(&g(&["a"]), &g(&["a"]), 3, false);
        let v = validate_pseudo(&pm).unwrap_err();
        assert_eq!(v.condition(), 3);
    }

    #[test]
    fn broken_inheritance_is_reported() {
        let mut pm = model_as_pseudo(&load_model(EX1).unwrap());
        // sp ~a sr, but sp and sr are b-distinguishable.
        pm.set_comp(&g(&["a"]), &g(&["b"]), 0, true);
        pm.set_comp(&g(&["a"]), &g(&["b"]), 2, true);
        let v = validate_pseudo(&pm).unwrap_err();
        assert!(matches!(v, Violation::NotInherited { .. }));
    }

    #[test]
    fn broken_transitivity_is_reported() {
        let text = r#"{"agents":["a","b","c"],"states":["s"],
            "relations":{"a":[["s"]],"b":[["s"]],"c":[["s"]]},
            "groups":{"a,b":[["s"]],"a,c":[["s"]],"b,c":[["s"]],"a,b,c":[["s"]]}}"#;
        let mut pm = crate::models::load_pseudo(text).unwrap();
        for (key, _) in pm.clone().comparatives() {
            pm.set_comp(&key.0, &key.1, 0, true);
        }
        assert_eq!(validate_pseudo(&pm), Ok(()));
        pm.set_comp(&g(&["a"]), &g(&["c"]), 0, false);
        let v = validate_pseudo(&pm).unwrap_err();
        assert_eq!(v.condition(), 5, "{v}");
    }
}
