//! Brute-force semantics over tiny models, written without the library's
//! checker, partitions or reading maps.

#![allow(dead_code)]

use episteme::syntax::{Agent, Formula, Group, ReadMapExpr};

#[derive(Clone, Debug)]
pub struct Tiny {
    pub agents: Vec<Agent>,
    /// Block label of every state, per agent.
    pub rel: Vec<Vec<usize>>,
    /// States where `p` holds.
    pub p: Vec<bool>,
}

fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let top = prefix.iter().copied().max().map_or(0, |m| m + 1);
        for label in 0..=top {
            prefix.push(label);
            grow(prefix, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::new(), n, &mut out);
    out
}

/// Every model over `agents` with one proposition `p` and `1..=max` states.
pub fn all_tiny_models(agents: &[&str], max: usize) -> Vec<Tiny> {
    let agents: Vec<Agent> = agents.iter().map(|a| Agent::new(*a).unwrap()).collect();
    let mut out = Vec::new();
    for n in 1..=max {
        let parts = set_partitions(n);
        let mut rels: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
        for _ in &agents {
            rels = rels
                .into_iter()
                .flat_map(|prefix| {
                    parts.iter().map(move |p| {
                        let mut next = prefix.clone();
                        next.push(p.clone());
                        next
                    })
                })
                .collect();
        }
        for rel in rels {
            for bits in 0..(1u32 << n) {
                out.push(Tiny {
                    agents: agents.clone(),
                    rel: rel.clone(),
                    p: (0..n).map(|s| bits & (1 << s) != 0).collect(),
                });
            }
        }
    }
    out
}

impl Tiny {
    pub fn len(&self) -> usize {
        self.p.len()
    }

    fn idx(&self, a: &Agent) -> usize {
        self.agents.iter().position(|x| x == a).expect("agent in model")
    }

    fn same(&self, g: &Group, s: usize, t: usize) -> bool {
        g.iter().all(|a| {
            let r = &self.rel[self.idx(a)];
            r[s] == r[t]
        })
    }

    fn reads(expr: &ReadMapExpr, b: &Agent) -> Vec<Agent> {
        let mut out = vec![b.clone()];
        let mut add = |g: &Group| out.extend(g.iter().cloned());
        match expr {
            ReadMapExpr::Pub(g) => add(g),
            ReadMapExpr::Res(g) => {
                if g.contains(b) {
                    add(g)
                }
            }
            ReadMapExpr::Grp(gs) => gs.iter().filter(|g| g.contains(b)).for_each(add),
            ReadMapExpr::Share(r, h) => {
                if r.contains(b) {
                    add(h)
                }
            }
            ReadMapExpr::Map(entries) => entries
                .iter()
                .filter(|(a, _)| a == b)
                .for_each(|(_, g)| add(g)),
        }
        out
    }

    fn updated(&self, expr: &ReadMapExpr) -> Tiny {
        let n = self.len();
        let rel = self
            .agents
            .iter()
            .map(|b| {
                let g = Group::new(Tiny::reads(expr, b)).unwrap();
                (0..n)
                    .map(|t| (0..n).find(|&u| self.same(&g, t, u)).unwrap())
                    .collect()
            })
            .collect();
        Tiny {
            agents: self.agents.clone(),
            rel,
            p: self.p.clone(),
        }
    }

    fn reach(&self, groups: &[Group], s: usize) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for t in 0..self.len() {
                if !seen[t] && groups.iter().any(|g| self.same(g, u, t)) {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        (0..self.len()).filter(|&t| seen[t]).collect()
    }

    pub fn eval(&self, s: usize, f: &Formula) -> bool {
        let n = self.len();
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(q) => {
                assert_eq!(q.as_str(), "p", "tiny models only know p");
                self.p[s]
            }
            Formula::Comp(b, c) => (0..n).all(|t| !self.same(b, s, t) || self.same(c, s, t)),
            Formula::Not(x) => !self.eval(s, x),
            Formula::And(x, y) => self.eval(s, x) && self.eval(s, y),
            Formula::Or(x, y) => self.eval(s, x) || self.eval(s, y),
            Formula::Implies(x, y) => !self.eval(s, x) || self.eval(s, y),
            Formula::Iff(x, y) => self.eval(s, x) == self.eval(s, y),
            Formula::K(a, x) => {
                let g = Group::singleton(a.clone());
                (0..n).all(|t| !self.same(&g, s, t) || self.eval(t, x))
            }
            Formula::D(g, x) => (0..n).all(|t| !self.same(g, s, t) || self.eval(t, x)),
            Formula::C(g, x) => {
                let singles: Vec<Group> = g.iter().cloned().map(Group::singleton).collect();
                self.reach(&singles, s).into_iter().all(|t| self.eval(t, x))
            }
            Formula::Cd(fam, x) => {
                let groups: Vec<Group> = fam.iter().cloned().collect();
                self.reach(&groups, s).into_iter().all(|t| self.eval(t, x))
            }
            Formula::SemiPub(expr, x) => self.updated(expr).eval(s, x),
            Formula::Event(..) => panic!("tiny models do not run event models"),
        }
    }
}

/// Whether some model in `pool` satisfies `f` somewhere.
pub fn oracle_sat(pool: &[Tiny], f: &Formula) -> bool {
    pool.iter().any(|m| (0..m.len()).any(|s| m.eval(s, f)))
}

/// Number of binary and unary connectives and operators.
pub fn connectives(f: &Formula) -> usize {
    let own = !matches!(
        f,
        Formula::True | Formula::False | Formula::Atom(_) | Formula::Comp(..)
    ) as usize;
    own + f.children().into_iter().map(connectives).sum::<usize>()
}

#[test]
fn partition_counts_are_bell_numbers() {
    let counts: Vec<usize> = (1..=4).map(|n| set_partitions(n).len()).collect();
    assert_eq!(counts, vec![1, 2, 5, 15]);
    // 2 + 4·4 + 25·8
    assert_eq!(all_tiny_models(&["a", "b"], 3).len(), 218);
}
