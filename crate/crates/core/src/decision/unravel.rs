use std::collections::BTreeMap;

use super::DecisionError;
use crate::models::{ModelError, PseudoModel};
use crate::syntax::{Group, Prop};

pub const DEFAULT_DEPTH: usize = 3;
/// Largest number of histories materialized.
pub const MAX_HISTORIES: usize = 1_000_000;

/// A path `s0, B1, s1, …, Bn, sn` through a pseudo-model.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct History {
    pub states: Vec<usize>,
    pub groups: Vec<Group>,
}

impl History {
    pub fn root(s: usize) -> History {
        History {
            states: vec![s],
            groups: Vec::new(),
        }
    }

    pub fn last(&self) -> usize {
        *self.states.last().expect("histories are nonempty")
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn extend(&self, g: Group, s: usize) -> History {
        let mut h = self.clone();
        h.groups.push(g);
        h.states.push(s);
        h
    }
}

/// A bounded prefix of the forest of histories from one root.
#[derive(Clone, Debug)]
pub struct Unravelling {
    pub histories: Vec<History>,
    /// One-step extensions `(h, B, h')`, by history index.
    pub steps: Vec<(usize, Group, usize)>,
}

impl Unravelling {
    pub fn last(&self, h: usize) -> usize {
        self.histories[h].last()
    }

    /// Truth of each proposition at each history, copied from its last state.
    pub fn valuation(&self, pm: &PseudoModel) -> BTreeMap<Prop, Vec<bool>> {
        pm.props()
            .map(|p| {
                let row = (0..self.histories.len()).map(|h| pm.holds(p, self.last(h))).collect();
                (p.clone(), row)
            })
            .collect()
    }

    /// `h ~→_B h'` holds when `h →_{B'} h'` for some `B'` with
    /// `last(h) ⊨ B' <= B`. Returned for every stored group `B`.
    pub fn tilde_steps(&self, pm: &PseudoModel) -> Result<Vec<(usize, Group, usize)>, ModelError> {
        let groups: Vec<Group> = pm.groups().cloned().collect();
        let mut out = Vec::new();
        for (h, b1, h2) in &self.steps {
            let s = self.last(*h);
            for b in &groups {
                if pm.comp(b1, b)?[s] {
                    out.push((*h, b.clone(), *h2));
                }
            }
        }
        Ok(out)
    }
}

/// All histories from `root` with at most `depth` steps, where each step
/// `B, t` follows `last ~B t` for a stored group `B`.
pub fn unravel(pm: &PseudoModel, root: usize, depth: usize) -> Result<Unravelling, DecisionError> {
    if root >= pm.len() {
        return Err(ModelError::UnknownState(format!("#{root}")).into());
    }
    let rels: Vec<(Group, Vec<Vec<usize>>)> = pm
        .group_relations()
        .map(|(g, p)| (g.clone(), (0..pm.len()).map(|s| p.block_of(s)).collect()))
        .collect();
    let mut histories = vec![History::root(root)];
    let mut steps = Vec::new();
    let mut frontier = vec![0usize];
    for _ in 0..depth {
        let mut next = Vec::new();
        for h in frontier {
            let s = histories[h].last();
            for (g, blocks) in &rels {
                for &t in &blocks[s] {
                    if histories.len() >= MAX_HISTORIES {
                        return Err(DecisionError::ResourceCap(format!(
                            "more than {MAX_HISTORIES} histories"
                        )));
                    }
                    let id = histories.len();
                    histories.push(histories[h].extend(g.clone(), t));
                    steps.push((h, g.clone(), id));
                    next.push(id);
                }
            }
        }
        frontier = next;
    }
    Ok(Unravelling { histories, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{load_pseudo, Partition};
    use crate::syntax::Group;

    const TWO: &str = r#"{
        "agents": ["a"],
        "states": ["s","t"],
        "relations": {"a": [["s","t"]]},
        "valuation": {"p": ["s"]}
    }"#;

    #[test]
    fn depth_zero_is_the_root() {
        let pm = load_pseudo(TWO).unwrap();
        let u = unravel(&pm, 1, 0).unwrap();
        assert_eq!(u.histories, vec![History::root(1)]);
        assert!(u.steps.is_empty());
    }

    #[test]
    fn counts_by_hand() {
        // one group, two successors per step: 1 + 2 + 4
        let pm = load_pseudo(TWO).unwrap();
        assert_eq!(unravel(&pm, 0, 2).unwrap().histories.len(), 7);

        // groups a, b, ab with only a total: 4 successors per step
        let two = r#"{
            "agents": ["a","b"],
            "states": ["s","t"],
            "relations": {"a": [["s","t"]], "b": [["s"],["t"]]},
            "groups": {"a,b": [["s"],["t"]]},
            "comparatives": {"a,b<=a": ["s","t"], "a,b<=b": ["s","t"], "a,b<=a,b": ["s","t"],
                             "a<=a": ["s","t"], "b<=b": ["s","t"]},
            "valuation": {}
        }"#;
        let pm = load_pseudo(two).unwrap();
        let u = unravel(&pm, 0, 2).unwrap();
        assert_eq!(u.histories.len(), 21);
        for (h, g, h2) in &u.steps {
            assert!(pm.grel(g).unwrap().same(u.last(*h), u.last(*h2)));
            assert_eq!(u.histories[*h2].len(), u.histories[*h].len() + 1);
        }
        let tilde = u.tilde_steps(&pm).unwrap();
        // every a,b-step also counts as an a-step and a b-step
        let ab = Group::of(&["a", "b"]);
        let via_ab = u.steps.iter().filter(|(_, g, _)| *g == ab).count();
        assert_eq!(tilde.len(), u.steps.len() + 2 * via_ab);
        assert_eq!(pm.grel(&ab).unwrap(), &Partition::discrete(2));
    }
}
