use std::collections::BTreeSet;

use super::DecisionError;
use crate::syntax::{all_groups, AgentSet, Formula, GroupFamily};

/// Bound on the number of formulas a closure may hold.
pub const CLOSURE_LIMIT: usize = 50_000;

/// A finite formula set closed under the closure conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlClosure {
    pub seed: Formula,
    pub agents: AgentSet,
    /// Members ordered by size, then by rendering.
    pub members: Vec<Formula>,
}

impl FlClosure {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.members.contains(f)
    }
}

/// `~φ`: drops one outer negation, otherwise adds one.
pub fn single_negation(f: &Formula) -> Formula {
    f.negated()
}

fn all_families(agents: &AgentSet) -> Result<Vec<GroupFamily>, DecisionError> {
    let groups = all_groups(agents);
    if groups.len() > 16 {
        return Err(DecisionError::ResourceCap(format!(
            "{} groups give too many families to enumerate",
            groups.len()
        )));
    }
    Ok((1u32..(1 << groups.len()))
        .map(|mask| {
            GroupFamily::new(
                (0..groups.len())
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| groups[i].clone()),
            )
            .expect("nonempty mask")
        })
        .collect())
}

struct Builder<'a> {
    agents: &'a AgentSet,
    members: BTreeSet<Formula>,
    queue: Vec<Formula>,
    families: Option<Vec<GroupFamily>>,
    full: bool,
}

impl Builder<'_> {
    fn add(&mut self, f: Formula) -> Result<(), DecisionError> {
        if !self.members.contains(&f) {
            if self.members.len() >= CLOSURE_LIMIT {
                return Err(DecisionError::ResourceCap(format!(
                    "closure exceeds {CLOSURE_LIMIT} formulas"
                )));
            }
            self.members.insert(f.clone());
            self.queue.push(f);
        }
        Ok(())
    }

    fn families(&mut self) -> Result<Vec<GroupFamily>, DecisionError> {
        if self.families.is_none() {
            self.families = Some(all_families(self.agents)?);
        }
        Ok(self.families.clone().expect("just filled"))
    }

    fn run(mut self, seed: &Formula) -> Result<Vec<Formula>, DecisionError> {
        self.add(seed.clone())?;
        let groups = all_groups(self.agents);
        for b in &groups {
            for c in &groups {
                self.add(Formula::Comp(b.clone(), c.clone()))?;
            }
        }
        while let Some(f) = self.queue.pop() {
            for child in f.children() {
                self.add(child.clone())?;
            }
            self.add(f.negated())?;
            if let Formula::Cd(fam, body) = &f {
                if fam.len() > 1 {
                    if self.full {
                        for other in self.families()? {
                            self.add(Formula::cd(other, (**body).clone()))?;
                        }
                        for c in &groups {
                            self.add(Formula::dist(c.clone(), f.clone()))?;
                        }
                    } else {
                        for b in fam.iter() {
                            self.add(Formula::dist(b.clone(), f.clone()))?;
                        }
                    }
                } else if self.full {
                    for c in &groups {
                        self.add(Formula::dist(c.clone(), (**body).clone()))?;
                    }
                }
            }
        }
        let mut members: Vec<(usize, String, Formula)> = self
            .members
            .into_iter()
            .map(|f| (f.size(), f.to_string(), f))
            .collect();
        members.sort();
        Ok(members.into_iter().map(|(_, _, f)| f).collect())
    }
}

fn check_seed(seed: &Formula, agents: &AgentSet) -> Result<(), DecisionError> {
    if !seed.is_static() {
        return Err(DecisionError::NotStatic);
    }
    if let Some(a) = seed.agents().iter().find(|a| !agents.contains(*a)) {
        return Err(DecisionError::UnknownAgent(a.to_string()));
    }
    Ok(())
}

/// The closure of a desugared static formula: the seed, every comparative
/// over `agents`, subformulas, single negations; a common distributed
/// knowledge formula over several groups brings in the same body under
/// every family and under `D_C` for every group `C`; a distributed
/// knowledge formula brings in the same body under every `D_C`.
pub fn fl_closure(seed: &Formula, agents: &AgentSet) -> Result<FlClosure, DecisionError> {
    let seed = seed.desugar();
    check_seed(&seed, agents)?;
    let members = Builder {
        agents,
        members: BTreeSet::new(),
        queue: Vec::new(),
        families: None,
        full: true,
    }
    .run(&seed)?;
    Ok(FlClosure {
        seed,
        agents: agents.clone(),
        members,
    })
}

/// The smaller closure the satisfiability search works over: the seed, all
/// comparatives, subformulas, single negations, and `D_B Cd_𝓑 ψ` for each
/// `B ∈ 𝓑` of every multi-group `Cd_𝓑 ψ`.
pub fn lean_closure(seed: &Formula, agents: &AgentSet) -> Result<FlClosure, DecisionError> {
    let seed = seed.desugar();
    check_seed(&seed, agents)?;
    let members = Builder {
        agents,
        members: BTreeSet::new(),
        queue: Vec::new(),
        families: None,
        full: false,
    }
    .run(&seed)?;
    Ok(FlClosure {
        seed,
        agents: agents.clone(),
        members,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_agent_list, parse_formula};

    fn f(text: &str) -> Formula {
        parse_formula(text, None, None).unwrap().desugar()
    }

    #[test]
    fn atom_over_two_agents() {
        let ab = parse_agent_list("a,b").unwrap();
        let cl = fl_closure(&f("p"), &ab).unwrap();
        assert_eq!(cl.len(), 20);
        assert_eq!(cl.members[0], f("p"));
        assert!(cl.contains(&f("~({a,b} <= {b})")));
    }

    #[test]
    fn comparative_seed_adds_nothing_new() {
        let ab = parse_agent_list("a,b").unwrap();
        assert_eq!(fl_closure(&f("{a} <= {b}"), &ab).unwrap().len(), 18);
        assert_eq!(fl_closure(&f("~({a} <= {b})"), &ab).unwrap().len(), 18);
    }

    #[test]
    fn no_iterated_distributed_knowledge() {
        let a = parse_agent_list("a").unwrap();
        let cl = fl_closure(&f("D{a} p"), &a).unwrap();
        assert_eq!(cl.len(), 6);
        assert!(!cl.contains(&f("D{a} D{a} p")));
    }

    #[test]
    fn common_distributed_knowledge_unfolds() {
        let ab = parse_agent_list("a,b").unwrap();
        let cd = f("Cd{{a},{b}} p");
        let full = fl_closure(&cd, &ab).unwrap();
        // p, seven families, D_C over four multi-group families, nine comparatives
        assert_eq!(full.len(), 2 * (1 + 7 + 4 * 3 + 9));
        assert!(full.contains(&f("D{a,b} Cd{{a},{a,b}} p")));
        let lean = lean_closure(&cd, &ab).unwrap();
        assert!(lean.contains(&f("D{a} Cd{{a},{b}} p")));
        assert!(lean.contains(&f("~D{b} Cd{{a},{b}} p")));
        assert!(!lean.contains(&f("D{a,b} Cd{{a},{b}} p")));
        assert_eq!(lean.len(), 2 * (1 + 1 + 2 + 9));
    }

    #[test]
    fn closure_rejects_dynamic_and_foreign_agents() {
        let a = parse_agent_list("a").unwrap();
        assert_eq!(
            fl_closure(&f("[!pub{a}] p"), &a),
            Err(DecisionError::NotStatic)
        );
        assert!(matches!(
            fl_closure(&f("K b p"), &a),
            Err(DecisionError::UnknownAgent(_))
        ));
    }

    #[test]
    fn ordering_is_by_size_then_text() {
        let ab = parse_agent_list("a,b").unwrap();
        let cl = fl_closure(&f("K a p & q"), &ab).unwrap();
        for w in cl.members.windows(2) {
            let key = |g: &Formula| (g.size(), g.to_string());
            assert!(key(&w[0]) < key(&w[1]));
        }
    }
}
