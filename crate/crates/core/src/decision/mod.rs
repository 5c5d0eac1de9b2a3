//! Satisfiability and validity through closures, atoms and elimination,
//! with every satisfiable verdict backed by a checked pseudo-model.

mod atoms;
mod axioms;
mod closure;
mod unravel;

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap, VecDeque};

use thiserror::Error;

use crate::checker::{check_pseudo, CheckError};
use crate::dynamics::EventRegistry;
use crate::models::{validate_pseudo, ModelError, PseudoModel};
use crate::reducer::{reduce, ReduceError};
use crate::syntax::{AgentSet, Formula};

pub use atoms::{
    atoms, closure_patterns, eliminate, AtomSet, Elimination, HAtom, MAX_AGENTS, MAX_ATOMS,
    MAX_VARIABLES,
};
pub use axioms::{instantiate_axioms, AxiomInstance, Axioms, Schema};
pub use closure::{fl_closure, lean_closure, single_negation, FlClosure, CLOSURE_LIMIT};
pub use unravel::{unravel, History, Unravelling, DEFAULT_DEPTH, MAX_HISTORIES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecisionError {
    #[error("formula still contains dynamic operators")]
    NotStatic,
    #[error("agent `{0}` is outside the agent set")]
    UnknownAgent(String),
    #[error("resource cap: {0}")]
    ResourceCap(String),
    #[error("witness verification failed: {0}")]
    WitnessVerificationFailed(String),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A pseudo-model together with the state where the formula holds.
#[derive(Clone, Debug)]
pub struct Witness {
    pub model: PseudoModel,
    pub state: usize,
}

#[derive(Clone, Debug)]
pub enum SatResult {
    Unsat,
    Sat(Box<Witness>),
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }
}

/// Full outcome of a satisfiability run.
#[derive(Clone, Debug)]
pub struct Decision {
    pub result: SatResult,
    /// The static, desugared formula actually decided.
    pub formula: Formula,
    pub closure_size: usize,
    pub atoms: usize,
    pub survivors: usize,
    pub rounds: usize,
}

pub fn sat(
    f: &Formula,
    agents: &AgentSet,
    registry: Option<&EventRegistry>,
) -> Result<SatResult, DecisionError> {
    Ok(decide(f, agents, registry)?.result)
}

/// `f` is valid iff `~f` is unsatisfiable.
pub fn valid(
    f: &Formula,
    agents: &AgentSet,
    registry: Option<&EventRegistry>,
) -> Result<bool, DecisionError> {
    Ok(!sat(&Formula::not(f.clone()), agents, registry)?.is_sat())
}

pub fn decide(
    f: &Formula,
    agents: &AgentSet,
    registry: Option<&EventRegistry>,
) -> Result<Decision, DecisionError> {
    if let Some(a) = f.agents().iter().find(|a| !agents.contains(*a)) {
        return Err(DecisionError::UnknownAgent(a.to_string()));
    }
    let target = reduce(f, registry)?.desugar();
    let closure = lean_closure(&target, agents)?;
    let set = atoms(&closure)?;
    let elim = eliminate(&set);
    let chosen =
        (0..set.len()).find(|&i| elim.alive[i] && set.contains(i, &target) == Some(true));
    let result = match chosen {
        None => SatResult::Unsat,
        Some(i) => {
            let model = witness_model(&set, &elim, i);
            verify_witness(&model, 0, &target)?;
            SatResult::Sat(Box::new(Witness { model, state: 0 }))
        }
    };
    Ok(Decision {
        result,
        formula: target,
        closure_size: closure.len(),
        atoms: set.len(),
        survivors: elim.survivors(),
        rounds: elim.rounds(),
    })
}

/// Surviving atoms reachable from `root`, named `t0, t1, …` in breadth-first
/// order with `root` as `t0`.
fn witness_model(set: &AtomSet, elim: &Elimination, root: usize) -> PseudoModel {
    let groups = &set.groups;
    let mut members: Vec<HashMap<u32, Vec<usize>>> = vec![HashMap::new(); groups.len()];
    for i in (0..set.len()).filter(|&i| elim.alive[i]) {
        for (g, by_class) in members.iter_mut().enumerate() {
            by_class.entry(elim.classes[g][i]).or_default().push(i);
        }
    }
    let mut order = vec![root];
    let mut seen = HashMap::from([(root, 0usize)]);
    let mut queue = VecDeque::from([root]);
    while let Some(i) = queue.pop_front() {
        for (g, by_class) in members.iter().enumerate() {
            for &j in &by_class[&elim.classes[g][i]] {
                if let Entry::Vacant(slot) = seen.entry(j) {
                    slot.insert(order.len());
                    order.push(j);
                    queue.push_back(j);
                }
            }
        }
    }

    let n = order.len();
    let states: Vec<String> = (0..n).map(|k| format!("t{k}")).collect();
    let grel = groups
        .iter()
        .enumerate()
        .map(|(g, (_, group))| (group.clone(), elim.partition(g, &order)))
        .collect();
    let mut valuation = BTreeMap::new();
    for (v, f) in set.vars.iter().enumerate() {
        if let Formula::Atom(p) = f {
            valuation.insert(p.clone(), order.iter().map(|&i| set.atoms[i].values[v]).collect());
        }
    }
    let mut comps = BTreeMap::new();
    for (bm, b) in groups {
        for (cm, c) in groups {
            let ext = order
                .iter()
                .map(|&i| cm & set.cl(i)[*bm as usize] == *cm)
                .collect();
            comps.insert((b.clone(), c.clone()), ext);
        }
    }
    PseudoModel::from_parts(set.agents.iter().cloned().collect(), states, grel, valuation, comps)
}

/// Confirms that `pm` meets the pseudo-model conditions and that the
/// static formula `f` holds at `state`.
pub fn verify_witness(pm: &PseudoModel, state: usize, f: &Formula) -> Result<(), DecisionError> {
    validate_pseudo(pm).map_err(|v| DecisionError::WitnessVerificationFailed(v.to_string()))?;
    if !check_pseudo(pm, state, f)? {
        return Err(DecisionError::WitnessVerificationFailed(format!(
            "{f} is false at {}",
            pm.state_name(state)
        )));
    }
    Ok(())
}
