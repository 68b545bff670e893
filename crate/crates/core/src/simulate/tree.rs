use std::collections::HashMap;

use serde::Serialize;

use crate::models::{enumerate_types, SmallTreeType};
use crate::{Error, Result};

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
struct Node {
    keys: u32,
    /// Gaps in the subtree, i.e. keys below and including this node plus one.
    gaps: u64,
    parent: u32,
    /// Index of the first of `m` child slots, `NONE` until the node is full.
    child_base: u32,
}

/// Random m-ary search tree driven by gap ranks. Keys are never stored; only
/// their counts matter for the shape.
#[derive(Clone, Debug)]
pub struct MSTree {
    m: usize,
    nodes: Vec<Node>,
    /// Child slots; `NONE` is an external node.
    slots: Vec<u32>,
    root: u32,
    n: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TreeStats {
    pub n: u64,
    pub two_protected: u64,
    pub one_protected: u64,
    pub leaves: u64,
    pub internal: u64,
    /// `V_0` external nodes, `V_i` nodes with `i` keys.
    pub key_count_profile: Vec<u64>,
}

impl TreeStats {
    pub fn get(&self, stat: Statistic) -> u64 {
        match stat {
            Statistic::TwoProtected => self.two_protected,
            Statistic::OneProtected => self.one_protected,
            Statistic::Leaves => self.leaves,
            Statistic::Internal => self.internal,
        }
    }
}

/// Tree statistics available to the simulators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    TwoProtected,
    OneProtected,
    Leaves,
    Internal,
}

impl Statistic {
    pub const ALL: [Statistic; 4] = [
        Statistic::TwoProtected,
        Statistic::OneProtected,
        Statistic::Leaves,
        Statistic::Internal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::TwoProtected => "two_protected",
            Statistic::OneProtected => "one_protected",
            Statistic::Leaves => "leaves",
            Statistic::Internal => "internal",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown statistic '{s}' (expected two_protected, one_protected, leaves or internal)")))
    }
}

impl std::fmt::Display for Statistic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl MSTree {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::Domain(format!("arity m = {m}, need m >= 2")));
        }
        Ok(Self {
            m,
            nodes: Vec::new(),
            slots: Vec::new(),
            root: NONE,
            n: 0,
        })
    }

    pub fn with_capacity(m: usize, n: usize) -> Result<Self> {
        let mut t = Self::new(m)?;
        t.nodes.reserve(n);
        t.slots.reserve(n / (m - 1).max(1) * m + m);
        Ok(t)
    }

    pub fn clear(&mut self) {
        self.nodes.clear();
        self.slots.clear();
        self.root = NONE;
        self.n = 0;
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Total gaps, always `n + 1`.
    pub fn gaps(&self) -> u64 {
        if self.root == NONE {
            1
        } else {
            self.nodes[self.root as usize].gaps
        }
    }

    fn new_node(&mut self, parent: u32) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(Node {
            keys: 1,
            gaps: 2,
            parent,
            child_base: NONE,
        });
        if self.m == 2 {
            self.make_full(id);
        }
        id
    }

    fn make_full(&mut self, id: u32) {
        self.nodes[id as usize].child_base = self.slots.len() as u32;
        self.slots.extend(std::iter::repeat_n(NONE, self.m));
    }

    fn child_gaps(&self, slot: u32) -> u64 {
        if slot == NONE {
            1
        } else {
            self.nodes[slot as usize].gaps
        }
    }

    /// Inserts a key into gap `rank` (0-based in key order).
    pub fn insert_key(&mut self, rank: u64) -> Result<()> {
        if rank > self.n {
            return Err(Error::Domain(format!(
                "gap rank {rank} outside [0, {}]",
                self.n
            )));
        }
        self.n += 1;
        if self.root == NONE {
            self.root = self.new_node(NONE);
            return Ok(());
        }
        let m = self.m;
        let mut v = self.root;
        let mut r = rank;
        loop {
            let node = &mut self.nodes[v as usize];
            node.gaps += 1;
            if node.child_base == NONE {
                node.keys += 1;
                if node.keys as usize == m - 1 {
                    self.make_full(v);
                }
                return Ok(());
            }
            let base = node.child_base as usize;
            let mut i = 0;
            loop {
                let g = self.child_gaps(self.slots[base + i]);
                if r < g {
                    break;
                }
                r -= g;
                i += 1;
            }
            let c = self.slots[base + i];
            if c == NONE {
                let id = self.new_node(v);
                self.slots[base + i] = id;
                return Ok(());
            }
            v = c;
        }
    }

    fn is_leaf(&self, id: u32) -> bool {
        let b = self.nodes[id as usize].child_base;
        b == NONE
            || self.slots[b as usize..b as usize + self.m]
                .iter()
                .all(|&c| c == NONE)
    }

    fn children(&self, id: u32) -> &[u32] {
        let b = self.nodes[id as usize].child_base;
        if b == NONE {
            &[]
        } else {
            &self.slots[b as usize..b as usize + self.m]
        }
    }

    pub fn count_stats(&self) -> TreeStats {
        let mut s = TreeStats {
            n: self.n,
            key_count_profile: vec![0; self.m],
            ..Default::default()
        };
        if self.root == NONE {
            s.key_count_profile[0] = 1;
            return s;
        }
        let leaf: Vec<bool> = (0..self.nodes.len() as u32)
            .map(|i| self.is_leaf(i))
            .collect();
        s.internal = self.nodes.len() as u64;
        for (i, node) in self.nodes.iter().enumerate() {
            s.key_count_profile[node.keys as usize] += 1;
            let ch = self.children(i as u32);
            s.key_count_profile[0] += ch.iter().filter(|&&c| c == NONE).count() as u64;
            if leaf[i] {
                s.leaves += 1;
            } else {
                s.one_protected += 1;
                if ch.iter().all(|&c| c == NONE || !leaf[c as usize]) {
                    s.two_protected += 1;
                }
            }
        }
        s
    }

    /// Small tree rooted at a non-leaf `id`.
    fn small_tree(&self, id: u32) -> Vec<u32> {
        let mut k = vec![0u32; self.m];
        for &c in self.children(id) {
            if c == NONE {
                k[0] += 1;
            } else if self.is_leaf(c) {
                k[self.nodes[c as usize].keys as usize] += 1;
            }
        }
        k
    }

    /// Ball counts of the forest obtained by cutting every edge between two
    /// non-leaves, indexed like `index`.
    pub fn forest_decompose(&self, index: &TypeIndex) -> Result<Vec<u64>> {
        if index.m != self.m {
            return Err(Error::Domain(format!(
                "type index for m = {} used with m = {}",
                index.m, self.m
            )));
        }
        if self.n < self.m as u64 {
            return Err(Error::Domain(format!(
                "forest decomposition needs n >= m = {}, got n = {}",
                self.m, self.n
            )));
        }
        let mut x = vec![0u64; index.types.len()];
        for id in 0..self.nodes.len() as u32 {
            if !self.is_leaf(id) {
                x[index.get(&self.small_tree(id))?] += 1;
            }
        }
        Ok(x)
    }

    /// The type of the small tree that contains gap `rank`.
    pub fn gap_owner(&self, rank: u64, index: &TypeIndex) -> Result<usize> {
        if rank > self.n || self.root == NONE {
            return Err(Error::Domain(format!(
                "gap rank {rank} outside [0, {}]",
                self.n
            )));
        }
        let mut owner = None;
        let mut v = self.root;
        let mut r = rank;
        loop {
            if !self.is_leaf(v) {
                owner = Some(v);
            }
            let ch = self.children(v);
            if ch.is_empty() {
                break;
            }
            let mut i = 0;
            while r >= self.child_gaps(ch[i]) {
                r -= self.child_gaps(ch[i]);
                i += 1;
            }
            if ch[i] == NONE {
                break;
            }
            v = ch[i];
        }
        let owner =
            owner.ok_or_else(|| Error::Domain("gap lies in a tree whose root is a leaf".into()))?;
        index.get(&self.small_tree(owner))
    }

    /// Depth-first check of the gap counters and key bounds.
    pub fn check_invariants(&self) -> bool {
        if self.gaps() != self.n + 1 {
            return false;
        }
        self.nodes.iter().enumerate().all(|(i, node)| {
            let ch = self.children(i as u32);
            let full = node.keys as usize == self.m - 1;
            let gaps_ok = if ch.is_empty() {
                node.gaps == node.keys as u64 + 1
            } else {
                node.gaps == ch.iter().map(|&c| self.child_gaps(c)).sum::<u64>()
            };
            let parent_ok = node.parent == NONE || self.children(node.parent).contains(&(i as u32));
            gaps_ok
                && parent_ok
                && (full == !ch.is_empty())
                && node.keys >= 1
                && (node.keys as usize) < self.m
        })
    }
}

/// Canonical type list with a lookup from composition to index.
#[derive(Clone, Debug)]
pub struct TypeIndex {
    pub m: usize,
    pub types: Vec<SmallTreeType>,
    map: HashMap<Vec<u32>, usize>,
}

impl TypeIndex {
    pub fn new(m: usize) -> Result<Self> {
        let types = enumerate_types(m)?;
        let map = types
            .iter()
            .enumerate()
            .map(|(i, t)| (t.k.clone(), i))
            .collect();
        Ok(Self { m, types, map })
    }

    pub fn get(&self, k: &[u32]) -> Result<usize> {
        self.map.get(k).copied().ok_or_else(|| {
            Error::Domain(format!(
                "composition {k:?} is not a type for m = {}",
                self.m
            ))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(m: usize, ranks: &[u64]) -> MSTree {
        let mut t = MSTree::new(m).unwrap();
        for &r in ranks {
            t.insert_key(r).unwrap();
        }
        assert!(t.check_invariants());
        t
    }

    #[test]
    fn first_key() {
        let t = build(3, &[0]);
        let s = t.count_stats();
        assert_eq!((s.leaves, s.internal), (1, 1));
    }

    #[test]
    fn binary_balanced_and_chain() {
        // keys 2, 1, 3: ranks 0, 0, 2
        let s = build(2, &[0, 0, 2]).count_stats();
        assert_eq!((s.leaves, s.two_protected, s.one_protected), (2, 0, 1));
        // increasing keys: always the last gap
        let s = build(2, &[0, 1, 2]).count_stats();
        assert_eq!((s.leaves, s.two_protected, s.one_protected), (1, 1, 2));
    }

    #[test]
    fn perfect_binary_tree() {
        // keys 4, 2, 6, 1, 3, 5, 7
        let s = build(2, &[0, 0, 2, 0, 2, 4, 6]).count_stats();
        assert_eq!((s.leaves, s.one_protected, s.two_protected), (4, 3, 1));
    }

    #[test]
    fn ternary_small() {
        let s = build(3, &[0, 0]).count_stats();
        assert_eq!((s.leaves, s.one_protected, s.two_protected), (1, 0, 0));
        assert_eq!(s.key_count_profile, vec![3, 0, 1]);
        let s = build(3, &[0, 0, 1]).count_stats();
        assert_eq!(
            (s.internal, s.leaves, s.one_protected, s.two_protected),
            (2, 1, 1, 0)
        );
    }

    #[test]
    fn start_ball() {
        let idx = TypeIndex::new(3).unwrap();
        let t = build(3, &[0, 0, 1]);
        let x = t.forest_decompose(&idx).unwrap();
        let fresh = idx.get(&[2, 1, 0]).unwrap();
        assert_eq!(x.iter().sum::<u64>(), 1);
        assert_eq!(x[fresh], 1);
        assert!(build(3, &[0, 0]).forest_decompose(&idx).is_err());
    }

    #[test]
    fn rank_out_of_range() {
        let mut t = MSTree::new(2).unwrap();
        assert!(t.insert_key(1).is_err());
    }
}
