use std::collections::HashMap;

/// An equivalence relation on `0..n`, stored as one block label per element.
/// Labels are canonical (numbered by first occurrence), so two partitions
/// are equal exactly when they describe the same relation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    labels: Vec<u32>,
}

/// Why a list of blocks does not form a partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockIssue {
    Missing(usize),
    Duplicate(usize),
    OutOfRange(usize),
}

impl Partition {
    /// Builds a partition from arbitrary per-element keys: elements with equal
    /// keys share a block.
    pub fn from_keys<K: std::hash::Hash + Eq>(keys: impl IntoIterator<Item = K>) -> Partition {
        let mut seen: HashMap<K, u32> = HashMap::new();
        let labels = keys
            .into_iter()
            .map(|k| {
                let next = seen.len() as u32;
                *seen.entry(k).or_insert(next)
            })
            .collect();
        Partition { labels }
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Partition, BlockIssue> {
        let mut labels: Vec<Option<usize>> = vec![None; n];
        for (i, block) in blocks.iter().enumerate() {
            for &s in block {
                match labels.get_mut(s) {
                    None => return Err(BlockIssue::OutOfRange(s)),
                    Some(Some(_)) => return Err(BlockIssue::Duplicate(s)),
                    Some(slot) => *slot = Some(i),
                }
            }
        }
        let keys: Vec<usize> = labels
            .iter()
            .enumerate()
            .map(|(s, l)| l.ok_or(BlockIssue::Missing(s)))
            .collect::<Result<_, _>>()?;
        Ok(Partition::from_keys(keys))
    }

    pub fn discrete(n: usize) -> Partition {
        Partition {
            labels: (0..n as u32).collect(),
        }
    }

    pub fn total(n: usize) -> Partition {
        Partition {
            labels: vec![0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, s: usize) -> u32 {
        self.labels[s]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn num_blocks(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| *m as usize + 1)
    }

    pub fn same(&self, s: usize, t: usize) -> bool {
        self.labels[s] == self.labels[t]
    }

    /// Blocks in order of their smallest element; members ascending.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.num_blocks()];
        for (s, &l) in self.labels.iter().enumerate() {
            blocks[l as usize].push(s);
        }
        blocks
    }

    pub fn block_of(&self, s: usize) -> Vec<usize> {
        let l = self.labels[s];
        (0..self.len()).filter(|&t| self.labels[t] == l).collect()
    }

    /// Common refinement: `s ~ t` iff related in both.
    pub fn meet(&self, other: &Partition) -> Partition {
        assert_eq!(self.len(), other.len(), "partitions over different carriers");
        Partition::from_keys(self.labels.iter().zip(&other.labels))
    }

    /// Finest partition coarser than both.
    pub fn join(&self, other: &Partition) -> Partition {
        Partition::join_all([self, other])
    }

    /// Join of any number of partitions over the same carrier, by union-find.
    pub fn join_all<'a>(parts: impl IntoIterator<Item = &'a Partition>) -> Partition {
        let mut parts = parts.into_iter().peekable();
        let n = parts.peek().map_or(0, |p| p.len());
        let mut uf = UnionFind::new(n);
        for p in parts {
            assert_eq!(p.len(), n, "partitions over different carriers");
            let mut first: Vec<Option<usize>> = vec![None; p.num_blocks()];
            for (s, &l) in p.labels.iter().enumerate() {
                match first[l as usize] {
                    Some(r) => uf.union(r, s),
                    None => first[l as usize] = Some(s),
                }
            }
        }
        uf.into_partition()
    }

    /// True if every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        assert_eq!(self.len(), other.len(), "partitions over different carriers");
        let mut image: Vec<Option<u32>> = vec![None; self.num_blocks()];
        self.labels.iter().zip(&other.labels).all(|(&a, &b)| {
            let slot = &mut image[a as usize];
            match *slot {
                Some(prev) => prev == b,
                None => {
                    *slot = Some(b);
                    true
                }
            }
        })
    }

    /// For every element `s`: whether the block of `s` in `self` is contained
    /// in the block of `s` in `other`.
    pub fn contained_in(&self, other: &Partition) -> Vec<bool> {
        let mut image: Vec<Option<u32>> = vec![None; self.num_blocks()];
        let mut mixed = vec![false; self.num_blocks()];
        for (&a, &b) in self.labels.iter().zip(&other.labels) {
            match image[a as usize] {
                Some(prev) if prev != b => mixed[a as usize] = true,
                Some(_) => {}
                None => image[a as usize] = Some(b),
            }
        }
        self.labels.iter().map(|&a| !mixed[a as usize]).collect()
    }

    /// The partition obtained by renaming element `s` to `map[s]`.
    pub fn permuted(&self, map: &[usize]) -> Partition {
        let mut labels = vec![0u32; self.len()];
        for (s, &t) in map.iter().enumerate() {
            labels[t] = self.labels[s];
        }
        Partition::from_keys(labels)
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }

    pub fn into_partition(mut self) -> Partition {
        let n = self.parent.len();
        let roots: Vec<usize> = (0..n).map(|x| self.find(x)).collect();
        Partition::from_keys(roots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, blocks: &[&[usize]]) -> Partition {
        let blocks: Vec<Vec<usize>> = blocks.iter().map(|b| b.to_vec()).collect();
        Partition::from_blocks(n, &blocks).unwrap()
    }

    #[test]
    fn canonical_labels() {
        assert_eq!(p(4, &[&[2, 3], &[0, 1]]), p(4, &[&[0, 1], &[3, 2]]));
        assert_eq!(p(3, &[&[1], &[0, 2]]).labels(), &[0, 1, 0]);
    }

    #[test]
    fn block_errors() {
        assert_eq!(
            Partition::from_blocks(3, &[vec![0, 1], vec![1, 2]]),
            Err(BlockIssue::Duplicate(1))
        );
        assert_eq!(
            Partition::from_blocks(3, &[vec![0, 1]]),
            Err(BlockIssue::Missing(2))
        );
        assert_eq!(
            Partition::from_blocks(2, &[vec![0, 1, 5]]),
            Err(BlockIssue::OutOfRange(5))
        );
    }

    #[test]
    fn meet_and_join() {
        let a = p(4, &[&[0, 2], &[1, 3]]);
        let b = p(4, &[&[0, 1], &[2, 3]]);
        assert_eq!(a.meet(&b), Partition::discrete(4));
        assert_eq!(a.join(&b), Partition::total(4));
        let c = p(4, &[&[0, 1], &[2], &[3]]);
        assert_eq!(a.join(&c), p(4, &[&[0, 1, 2, 3]]));
        assert_eq!(c.join(&Partition::discrete(4)), c);
    }

    #[test]
    fn refinement_and_containment() {
        let fine = p(3, &[&[0], &[1, 2]]);
        let coarse = Partition::total(3);
        assert!(fine.refines(&coarse));
        assert!(!coarse.refines(&fine));
        assert_eq!(coarse.contained_in(&fine), vec![false, false, false]);
        let other = p(3, &[&[0, 1], &[2]]);
        assert_eq!(fine.contained_in(&other), vec![true, false, false]);
    }

    #[test]
    fn permutation() {
        let a = p(3, &[&[0, 1], &[2]]);
        assert_eq!(a.permuted(&[2, 1, 0]), p(3, &[&[2, 1], &[0]]));
    }
}
