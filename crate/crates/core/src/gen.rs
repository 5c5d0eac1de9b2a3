//! Seeded random models, pseudo-models, event models and formulas.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::decision::closure_patterns;
use crate::dynamics::{ReadingEventModel, ReadingMap};
use crate::models::{validate_pseudo, EpistemicModel, Partition, PseudoModel, Violation};
use crate::syntax::{
    all_groups, Agent, AgentSet, EventRef, Formula, Group, GroupFamily, Prop, ReadMapExpr,
};

pub fn agents(names: &[&str]) -> AgentSet {
    names.iter().map(|n| Agent::new(*n).expect("valid agent")).collect()
}

pub fn props(names: &[&str]) -> Vec<Prop> {
    names.iter().map(|n| Prop::new(*n).expect("valid prop")).collect()
}

pub fn partition<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Partition {
    let blocks = rng.random_range(1..=n.max(1));
    Partition::from_keys((0..n).map(|_| rng.random_range(0..blocks)))
}

pub fn group<R: Rng + ?Sized>(rng: &mut R, agents: &AgentSet) -> Group {
    let all: Vec<&Agent> = agents.iter().collect();
    loop {
        let members: BTreeSet<Agent> = all
            .iter()
            .filter(|_| rng.random_bool(0.5))
            .map(|a| (*a).clone())
            .collect();
        if let Ok(g) = Group::new(members) {
            return g;
        }
    }
}

pub fn family<R: Rng + ?Sized>(rng: &mut R, agents: &AgentSet, max_len: usize) -> GroupFamily {
    let len = rng.random_range(1..=max_len.max(1));
    GroupFamily::new((0..len).map(|_| group(rng, agents))).expect("nonempty")
}

/// A model with `1..=max_states` states named `s0, s1, …`.
pub fn model<R: Rng + ?Sized>(
    rng: &mut R,
    agents: &AgentSet,
    props: &[Prop],
    max_states: usize,
) -> EpistemicModel {
    let n = rng.random_range(1..=max_states.max(1));
    let states = (0..n).map(|i| format!("s{i}")).collect();
    let rel = agents.iter().map(|a| (a.clone(), partition(rng, n))).collect();
    let valuation = props
        .iter()
        .map(|p| (p.clone(), (0..n).filter(|_| rng.random_bool(0.5)).collect()))
        .collect();
    EpistemicModel::new(agents.clone(), states, rel, valuation).expect("well-formed")
}

pub fn readmap<R: Rng + ?Sized>(rng: &mut R, agents: &AgentSet) -> ReadMapExpr {
    match rng.random_range(0..5) {
        0 => ReadMapExpr::Pub(group(rng, agents)),
        1 => ReadMapExpr::Res(group(rng, agents)),
        2 => {
            let k = rng.random_range(1..=2);
            ReadMapExpr::Grp((0..k).map(|_| group(rng, agents)).collect())
        }
        3 => ReadMapExpr::Share(group(rng, agents), group(rng, agents)),
        _ => {
            let mut entries = Vec::new();
            for a in agents {
                if rng.random_bool(0.5) {
                    entries.push((a.clone(), group(rng, agents)));
                }
            }
            if entries.is_empty() {
                let pick: Vec<&Agent> = agents.iter().collect();
                let a = pick[rng.random_range(0..pick.len())].clone();
                entries.push((a, group(rng, agents)));
            }
            ReadMapExpr::Map(entries)
        }
    }
}

/// An event model with `events` events named `e0, e1, …`; each agent's
/// reads are constant on its indistinguishability blocks.
pub fn event_model<R: Rng + ?Sized>(
    rng: &mut R,
    agents: &AgentSet,
    events: usize,
) -> ReadingEventModel {
    let names: Vec<String> = (0..events).map(|i| format!("e{i}")).collect();
    let erel: BTreeMap<Agent, Partition> =
        agents.iter().map(|a| (a.clone(), partition(rng, events))).collect();
    let mut reads: Vec<BTreeMap<Agent, Group>> = vec![BTreeMap::new(); events];
    for (a, p) in &erel {
        for block in p.blocks() {
            let g = group(rng, agents).union(&Group::singleton(a.clone()));
            for e in block {
                reads[e].insert(a.clone(), g.clone());
            }
        }
    }
    let reads = reads
        .into_iter()
        .map(|r| ReadingMap::new(r).expect("self reads"))
        .collect();
    ReadingEventModel::new(agents.clone(), names, erel, reads).expect("well-formed")
}

/// A pseudo-model over every group, with a random closure pattern at each
/// state for the comparatives, repaired by splitting blocks until the
/// comparatives are respected by the relations.
pub fn pseudo<R: Rng + ?Sized>(
    rng: &mut R,
    agents: &AgentSet,
    props: &[Prop],
    max_states: usize,
) -> PseudoModel {
    let n = rng.random_range(1..=max_states.max(1));
    let list: Vec<&Agent> = agents.iter().collect();
    let mask = |g: &Group| {
        g.iter()
            .map(|a| 1usize << list.iter().position(|x| *x == a).expect("known"))
            .sum::<usize>()
    };
    let groups = all_groups(agents);
    let patterns = closure_patterns(agents.len());
    let chosen: Vec<&Vec<u16>> = (0..n)
        .map(|_| patterns.choose(rng).expect("at least one pattern"))
        .collect();
    let grel = groups.iter().map(|g| (g.clone(), partition(rng, n))).collect();
    let valuation = props
        .iter()
        .map(|p| (p.clone(), (0..n).filter(|_| rng.random_bool(0.5)).collect()))
        .collect();
    let mut comps = BTreeMap::new();
    for b in &groups {
        for c in &groups {
            let (bm, cm) = (mask(b), mask(c) as u16);
            let ext: BTreeSet<usize> =
                (0..n).filter(|&s| cm & chosen[s][bm] == cm).collect();
            comps.insert((b.clone(), c.clone()), ext);
        }
    }
    let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut pm = PseudoModel::new(agents.clone(), states, grel, valuation, comps)
        .expect("well-formed");
    loop {
        let (b, t) = match validate_pseudo(&pm) {
            Ok(()) => return pm,
            Err(Violation::NotInherited { b, t, .. } | Violation::NotUniform { b, t, .. }) => {
                (b, t)
            }
            Err(other) => unreachable!("patterns satisfy {other}"),
        };
        let t = pm.state_index(&t).expect("known state");
        let old = pm.grel(&b).expect("stored").clone();
        let split = Partition::from_keys((0..n).map(|s| (old.label(s), s == t)));
        pm.set_grel(&b, split);
    }
}

/// Shape of random formulas.
#[derive(Clone, Debug)]
pub struct FormulaConfig {
    pub agents: AgentSet,
    pub props: Vec<Prop>,
    /// Bound on nested modal and dynamic operators.
    pub depth: usize,
    /// Bound on connectives and operators.
    pub size: usize,
    pub comparatives: bool,
    /// Allow `C` and `Cd`.
    pub common: bool,
    pub semi_public: bool,
    /// Events that may appear in `[E.e]` modalities.
    pub events: Vec<EventRef>,
}

impl FormulaConfig {
    pub fn new(agents: AgentSet, props: Vec<Prop>) -> FormulaConfig {
        FormulaConfig {
            agents,
            props,
            depth: 2,
            size: 6,
            comparatives: true,
            common: true,
            semi_public: false,
            events: Vec::new(),
        }
    }
}

pub fn formula<R: Rng + ?Sized>(rng: &mut R, cfg: &FormulaConfig) -> Formula {
    let mut budget = rng.random_range(0..=cfg.size);
    build(rng, cfg, cfg.depth, &mut budget, false)
}

fn leaf<R: Rng + ?Sized>(rng: &mut R, cfg: &FormulaConfig) -> Formula {
    let roll = rng.random_range(0..10);
    if cfg.comparatives && roll < 2 {
        Formula::Comp(group(rng, &cfg.agents), group(rng, &cfg.agents))
    } else if roll == 2 {
        if rng.random_bool(0.5) {
            Formula::True
        } else {
            Formula::False
        }
    } else {
        Formula::Atom(cfg.props.choose(rng).expect("some prop").clone())
    }
}

fn build<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &FormulaConfig,
    depth: usize,
    budget: &mut usize,
    under_event: bool,
) -> Formula {
    if *budget == 0 || rng.random_range(0..8) == 0 {
        return leaf(rng, cfg);
    }
    *budget -= 1;
    let modal = depth > 0 && rng.random_bool(0.5);
    if !modal {
        return match rng.random_range(0..5) {
            0 => Formula::not(build(rng, cfg, depth, budget, under_event)),
            k => {
                let a = build(rng, cfg, depth, budget, under_event);
                let b = build(rng, cfg, depth, budget, under_event);
                match k {
                    1 => Formula::and(a, b),
                    2 => Formula::or(a, b),
                    3 => Formula::implies(a, b),
                    _ => Formula::iff(a, b),
                }
            }
        };
    }
    let mut options = vec![0, 1];
    if cfg.common {
        options.extend([2, 3]);
    }
    if cfg.semi_public {
        options.push(4);
    }
    if !cfg.events.is_empty() {
        options.push(5);
    }
    let d = depth - 1;
    match *options.choose(rng).expect("nonempty") {
        0 => {
            let a = cfg.agents.iter().collect::<Vec<_>>();
            let a = (*a.choose(rng).expect("some agent")).clone();
            Formula::k(a, build(rng, cfg, d, budget, under_event))
        }
        1 => Formula::d(group(rng, &cfg.agents), build(rng, cfg, d, budget, under_event)),
        2 => {
            let g = if under_event {
                Group::singleton(group(rng, &cfg.agents).iter().next().expect("nonempty").clone())
            } else {
                group(rng, &cfg.agents)
            };
            Formula::c(g, build(rng, cfg, d, budget, under_event))
        }
        3 => {
            let fam = if under_event {
                GroupFamily::singleton(group(rng, &cfg.agents))
            } else {
                family(rng, &cfg.agents, 3)
            };
            Formula::cd(fam, build(rng, cfg, d, budget, under_event))
        }
        4 => Formula::semi(readmap(rng, &cfg.agents), build(rng, cfg, d, budget, under_event)),
        _ => {
            let r = cfg.events.choose(rng).expect("some event").clone();
            Formula::event(r, build(rng, cfg, d, budget, true))
        }
    }
}
