use std::collections::HashMap;

use super::closure::FlClosure;
use super::DecisionError;
use crate::models::{Partition, UnionFind};
use crate::syntax::{Agent, Formula, Group};

/// Largest agent universe the search enumerates comparative patterns for.
pub const MAX_AGENTS: usize = 4;
/// Largest number of non-comparative choice variables.
pub const MAX_VARIABLES: usize = 64;
/// Largest number of atoms built before giving up.
pub const MAX_ATOMS: usize = 2_000_000;

/// Every closure operator on the nonempty subsets of `n` agents, as a table
/// `cl[mask]` (index 0 unused). `B <= C` holds under a pattern iff
/// `C ⊆ cl[B]`.
pub fn closure_patterns(n: usize) -> Vec<Vec<u16>> {
    assert!(n <= MAX_AGENTS, "too many agents for pattern enumeration");
    if n == 0 {
        return vec![vec![0]];
    }
    let full: u16 = (1 << n) - 1;
    let proper: Vec<u16> = (1..full).collect();
    let mut out = Vec::new();
    for pick in 0u32..(1 << proper.len()) {
        let mut closed = vec![false; full as usize + 1];
        closed[full as usize] = true;
        for (i, &m) in proper.iter().enumerate() {
            if pick & (1 << i) != 0 {
                closed[m as usize] = true;
            }
        }
        let members: Vec<u16> = (1..=full).filter(|&m| closed[m as usize]).collect();
        let meets = members.iter().all(|&x| {
            members
                .iter()
                .all(|&y| x & y == 0 || closed[(x & y) as usize])
        });
        if !meets {
            continue;
        }
        let mut cl = vec![0u16; full as usize + 1];
        for b in 1..=full {
            cl[b as usize] = members
                .iter()
                .filter(|&&m| m & b == b)
                .fold(full, |acc, &m| acc & m);
        }
        out.push(cl);
    }
    out
}

/// A variable reference with polarity.
pub(crate) type Lit = (usize, bool);

#[derive(Clone, Debug)]
pub(crate) enum Kind {
    Const(bool),
    Prop,
    Comp(u16, u16),
    And(Lit, Lit),
    Dist { group: u16, body: Lit },
    Multi { family: Vec<u16>, body: Lit },
}

/// A maximal consistent valuation of the closure: a comparative pattern
/// plus the truth of every positive member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HAtom {
    pub pattern: usize,
    pub values: Vec<bool>,
}

/// All atoms of a closure.
#[derive(Clone, Debug)]
pub struct AtomSet {
    pub(crate) agents: Vec<Agent>,
    pub(crate) groups: Vec<(u16, Group)>,
    pub(crate) patterns: Vec<Vec<u16>>,
    pub(crate) vars: Vec<Formula>,
    pub(crate) kinds: Vec<Kind>,
    pub(crate) lits: HashMap<Formula, Lit>,
    pub(crate) atoms: Vec<HAtom>,
}

impl AtomSet {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[HAtom] {
        &self.atoms
    }

    pub fn num_patterns(&self) -> usize {
        self.patterns.len()
    }

    /// Positive closure members, in evaluation order.
    pub fn variables(&self) -> &[Formula] {
        &self.vars
    }

    fn lit(&self, atom: &HAtom, (v, pos): Lit) -> bool {
        atom.values[v] == pos
    }

    /// Whether atom `i` contains `f`; `None` when `f` is not in the closure.
    pub fn contains(&self, i: usize, f: &Formula) -> Option<bool> {
        self.lits.get(f).map(|&l| self.lit(&self.atoms[i], l))
    }

    /// The closure members contained in atom `i`.
    pub fn members(&self, i: usize) -> Vec<Formula> {
        let mut out: Vec<(usize, String, Formula)> = self
            .lits
            .iter()
            .filter(|(_, &l)| self.lit(&self.atoms[i], l))
            .map(|(f, _)| (f.size(), f.to_string(), f.clone()))
            .collect();
        out.sort();
        out.into_iter().map(|(_, _, f)| f).collect()
    }

    pub(crate) fn cl(&self, i: usize) -> &[u16] {
        &self.patterns[self.atoms[i].pattern]
    }
}

struct Search<'a> {
    kinds: &'a [Kind],
    cl: &'a [u16],
    same_body: &'a [Vec<usize>],
    values: Vec<bool>,
    out: &'a mut Vec<Vec<bool>>,
    budget: usize,
}

impl Search<'_> {
    fn lit(&self, (v, pos): Lit) -> bool {
        self.values[v] == pos
    }

    fn run(&mut self, i: usize) -> Result<(), DecisionError> {
        if i == self.kinds.len() {
            if self.out.len() >= self.budget {
                return Err(DecisionError::ResourceCap(format!(
                    "more than {MAX_ATOMS} atoms"
                )));
            }
            self.out.push(self.values.clone());
            return Ok(());
        }
        let (can_false, can_true) = match &self.kinds[i] {
            Kind::Const(v) => (!v, *v),
            Kind::Comp(b, c) => {
                let v = c & self.cl[*b as usize] == *c;
                (!v, v)
            }
            Kind::And(l, r) => {
                let v = self.lit(*l) && self.lit(*r);
                (!v, v)
            }
            Kind::Prop => (true, true),
            Kind::Multi { body, .. } => (true, self.lit(*body)),
            Kind::Dist { group, body } => {
                let g = *group;
                let mut must_true = match &self.kinds[body.0] {
                    Kind::Multi { family, .. } if body.1 => {
                        family.contains(&g) && self.values[body.0]
                    }
                    _ => false,
                };
                let mut must_false = false;
                for &j in &self.same_body[i] {
                    let Kind::Dist { group: h, .. } = self.kinds[j] else {
                        unreachable!()
                    };
                    if self.values[j] && h & self.cl[g as usize] == h {
                        must_true = true;
                    }
                    if !self.values[j] && g & self.cl[h as usize] == g {
                        must_false = true;
                    }
                }
                (!must_true, self.lit(*body) && !must_false)
            }
        };
        if can_false {
            self.values[i] = false;
            self.run(i + 1)?;
        }
        if can_true {
            self.values[i] = true;
            self.run(i + 1)?;
        }
        Ok(())
    }
}

/// Builds every atom of `closure`: each comparative pattern combined with
/// every assignment that respects veracity, the fixed point of common
/// distributed knowledge and knowledge transfer.
pub fn atoms(closure: &FlClosure) -> Result<AtomSet, DecisionError> {
    let agents: Vec<Agent> = closure.agents.iter().cloned().collect();
    if agents.len() > MAX_AGENTS {
        return Err(DecisionError::ResourceCap(format!(
            "{} agents, at most {MAX_AGENTS} supported",
            agents.len()
        )));
    }
    let mask_of = |g: &Group| -> u16 {
        g.iter()
            .map(|a| 1u16 << agents.iter().position(|x| x == a).expect("known agent"))
            .fold(0, |acc, b| acc | b)
    };
    let groups: Vec<(u16, Group)> = crate::syntax::all_groups(&closure.agents)
        .into_iter()
        .map(|g| (mask_of(&g), g))
        .collect();

    let vars: Vec<Formula> = closure
        .members
        .iter()
        .filter(|f| !matches!(f, Formula::Not(_)))
        .cloned()
        .collect();
    let index: HashMap<&Formula, usize> = vars.iter().enumerate().map(|(i, f)| (f, i)).collect();
    fn lit_of(index: &HashMap<&Formula, usize>, f: &Formula) -> Lit {
        match f {
            Formula::Not(inner) => {
                let (v, pos) = lit_of(index, inner);
                (v, !pos)
            }
            other => (index[other], true),
        }
    }
    let lit_of = |f: &Formula| lit_of(&index, f);
    let mut kinds = Vec::with_capacity(vars.len());
    for f in &vars {
        kinds.push(match f {
            Formula::True => Kind::Const(true),
            Formula::False => Kind::Const(false),
            Formula::Atom(_) => Kind::Prop,
            Formula::Comp(b, c) => Kind::Comp(mask_of(b), mask_of(c)),
            Formula::And(l, r) => Kind::And(lit_of(l), lit_of(r)),
            Formula::Cd(fam, body) => match fam.as_single() {
                Some(g) => Kind::Dist {
                    group: mask_of(g),
                    body: lit_of(body),
                },
                None => Kind::Multi {
                    family: fam.iter().map(mask_of).collect(),
                    body: lit_of(body),
                },
            },
            other => unreachable!("closure of a desugared formula holds {other}"),
        });
    }
    let choices = kinds
        .iter()
        .filter(|k| matches!(k, Kind::Prop | Kind::Dist { .. } | Kind::Multi { .. }))
        .count();
    if choices > MAX_VARIABLES {
        return Err(DecisionError::ResourceCap(format!(
            "{choices} variables, at most {MAX_VARIABLES} supported"
        )));
    }
    let mut same_body: Vec<Vec<usize>> = vec![Vec::new(); kinds.len()];
    for i in 0..kinds.len() {
        if let Kind::Dist { body, .. } = kinds[i] {
            for j in 0..i {
                if matches!(kinds[j], Kind::Dist { body: b, .. } if b == body) {
                    same_body[i].push(j);
                }
            }
        }
    }

    let patterns = closure_patterns(agents.len());
    let mut atoms = Vec::new();
    for (p, cl) in patterns.iter().enumerate() {
        let mut found = Vec::new();
        Search {
            kinds: &kinds,
            cl,
            same_body: &same_body,
            values: vec![false; kinds.len()],
            out: &mut found,
            budget: MAX_ATOMS - atoms.len(),
        }
        .run(0)?;
        atoms.extend(found.into_iter().map(|values| HAtom { pattern: p, values }));
    }
    let lits = closure.members.iter().map(|f| (f.clone(), lit_of(f))).collect();
    Ok(AtomSet {
        agents,
        groups,
        patterns,
        vars,
        kinds,
        lits,
        atoms,
    })
}

/// Outcome of repeatedly removing atoms whose negative knowledge formulas
/// lack a witness.
#[derive(Clone, Debug)]
pub struct Elimination {
    pub alive: Vec<bool>,
    /// Surviving atoms before the first round and after each round.
    pub history: Vec<usize>,
    /// Class of each atom under each group's relation, groups in
    /// [`crate::syntax::all_groups`] order.
    pub(crate) classes: Vec<Vec<u32>>,
}

impl Elimination {
    pub fn survivors(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    pub fn rounds(&self) -> usize {
        self.history.len() - 1
    }

    /// The relation of group number `g` on the given atoms.
    pub(crate) fn partition(&self, g: usize, atoms: &[usize]) -> Partition {
        Partition::from_keys(atoms.iter().map(|&i| self.classes[g][i]))
    }
}

/// Two atoms are related for `B` when they agree on the closure of `B`, on
/// the closure of every group inside it, and on distributed knowledge of
/// every group inside it.
fn classes(set: &AtomSet) -> Vec<Vec<u32>> {
    let dists: Vec<(usize, u16)> = set
        .kinds
        .iter()
        .enumerate()
        .filter_map(|(i, k)| match k {
            Kind::Dist { group, .. } => Some((i, *group)),
            _ => None,
        })
        .collect();
    let mut out = Vec::with_capacity(set.groups.len());
    for &(g, _) in &set.groups {
        let pattern_keys: Vec<Vec<u16>> = set
            .patterns
            .iter()
            .map(|cl| {
                let top = cl[g as usize];
                let mut key = vec![top];
                key.extend((1..cl.len() as u16).filter(|&c| c & top == c).map(|c| cl[c as usize]));
                key
            })
            .collect();
        let mut ids: HashMap<(&[u16], Vec<bool>), u32> = HashMap::new();
        let row = set
            .atoms
            .iter()
            .map(|atom| {
                let top = set.patterns[atom.pattern][g as usize];
                let dvals: Vec<bool> = dists
                    .iter()
                    .filter(|&&(_, h)| h & top == h)
                    .map(|&(i, _)| atom.values[i])
                    .collect();
                let next = ids.len() as u32;
                *ids.entry((&pattern_keys[atom.pattern], dvals)).or_insert(next)
            })
            .collect();
        out.push(row);
    }
    out
}

/// Round-synchronous elimination: in each round every atom holding some
/// `~D_B ψ` with no surviving `B`-related atom holding `~ψ`, or some
/// `~Cd_𝓑 ψ` with no such atom reachable along the family's relations, is
/// removed.
pub fn eliminate(set: &AtomSet) -> Elimination {
    let classes = classes(set);
    let group_pos: HashMap<u16, usize> = set
        .groups
        .iter()
        .enumerate()
        .map(|(i, (m, _))| (*m, i))
        .collect();
    let n = set.atoms.len();
    let mut alive = vec![true; n];
    let mut history = vec![n];
    loop {
        let mut doomed = vec![false; n];
        for (v, kind) in set.kinds.iter().enumerate() {
            match kind {
                Kind::Dist { group, body } => {
                    let cls = &classes[group_pos[group]];
                    let mut seen: HashMap<u32, bool> = HashMap::new();
                    for i in (0..n).filter(|&i| alive[i]) {
                        let found = seen.entry(cls[i]).or_insert(false);
                        *found |= !set.lit(&set.atoms[i], *body);
                    }
                    for i in (0..n).filter(|&i| alive[i] && !set.atoms[i].values[v]) {
                        if !seen[&cls[i]] {
                            doomed[i] = true;
                        }
                    }
                }
                Kind::Multi { family, body } => {
                    let mut uf = UnionFind::new(n);
                    for g in family {
                        let cls = &classes[group_pos[g]];
                        let mut rep: HashMap<u32, usize> = HashMap::new();
                        for i in (0..n).filter(|&i| alive[i]) {
                            let r = *rep.entry(cls[i]).or_insert(i);
                            uf.union(r, i);
                        }
                    }
                    let mut found = vec![false; n];
                    for i in (0..n).filter(|&i| alive[i]) {
                        if !set.lit(&set.atoms[i], *body) {
                            let r = uf.find(i);
                            found[r] = true;
                        }
                    }
                    for i in (0..n).filter(|&i| alive[i] && !set.atoms[i].values[v]) {
                        if !found[uf.find(i)] {
                            doomed[i] = true;
                        }
                    }
                }
                _ => {}
            }
        }
        let mut changed = false;
        for i in 0..n {
            if doomed[i] {
                alive[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        history.push(alive.iter().filter(|&&a| a).count());
    }
    Elimination {
        alive,
        history,
        classes,
    }
}
