//! Uniform attachment trees and the label-hiding view handed to seed finders.
//!
//! Labels are 1-based throughout: vertex `1` is the first seed vertex and
//! arrival `i` joined the tree at time `i`. Per-vertex arrays keep an unused
//! slot at index 0 so they can be indexed by label directly.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngHandle;

/// The seed tree a uniform attachment process starts from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SeedSpec {
    /// Path `1 - 2 - ... - size`.
    Path { size: usize },
    /// Star centred at vertex `1`.
    Star { size: usize },
    /// Uniform random recursive tree on `size` vertices.
    Urrt { size: usize },
    /// Recursive parent array: `parents[j]` is the parent of vertex `j + 2`.
    Custom { parents: Vec<usize> },
}

impl SeedSpec {
    pub fn size(&self) -> usize {
        match self {
            SeedSpec::Path { size } | SeedSpec::Star { size } | SeedSpec::Urrt { size } => *size,
            SeedSpec::Custom { parents } => parents.len() + 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SeedSpec::Path { .. } => "path",
            SeedSpec::Star { .. } => "star",
            SeedSpec::Urrt { .. } => "urrt",
            SeedSpec::Custom { .. } => "custom",
        }
    }
}

/// A recursive tree with its arrival order intact: the ground truth.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArrivalTree {
    seed_size: usize,
    // parent[v] for v in 2..=n; parent[0] and parent[1] are 0.
    parent: Vec<usize>,
}

impl ArrivalTree {
    /// A single vertex.
    pub fn singleton() -> Self {
        Self {
            seed_size: 1,
            parent: vec![0, 0],
        }
    }

    /// Builds a tree from `parents`, where `parents[j]` is the parent of
    /// vertex `j + 2`. The first `seed_size` vertices are the seed.
    pub fn from_parents(seed_size: usize, parents: &[usize]) -> Result<Self> {
        let n = parents.len() + 1;
        if seed_size == 0 || seed_size > n {
            return Err(Error::arg(format!(
                "seed size {seed_size} must be in 1..={n}"
            )));
        }
        let mut parent = Vec::with_capacity(n + 1);
        parent.extend([0, 0]);
        for (j, &p) in parents.iter().enumerate() {
            let vertex = j + 2;
            if p == 0 || p >= vertex {
                return Err(Error::InvalidSeed {
                    vertex,
                    parent: p,
                    max: vertex - 1,
                });
            }
            parent.push(p);
        }
        Ok(Self { seed_size, parent })
    }

    pub fn n(&self) -> usize {
        self.parent.len() - 1
    }

    pub fn seed_size(&self) -> usize {
        self.seed_size
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        match v {
            2.. if v <= self.n() => Some(self.parent[v]),
            _ => None,
        }
    }

    /// Parents of vertices `2..=n`, in arrival order.
    pub fn parents(&self) -> &[usize] {
        &self.parent[2..]
    }

    pub fn children(&self) -> Children {
        let n = self.n();
        let mut offsets = vec![0usize; n + 2];
        for v in 2..=n {
            offsets[self.parent[v] + 1] += 1;
        }
        for v in 1..=n + 1 {
            offsets[v] += offsets[v - 1];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0usize; n.saturating_sub(1)];
        for v in 2..=n {
            let p = self.parent[v];
            targets[fill[p]] = v;
            fill[p] += 1;
        }
        Children { offsets, targets }
    }

    pub fn child_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n() + 1];
        for v in 2..=self.n() {
            counts[self.parent[v]] += 1;
        }
        counts
    }

    pub fn degree(&self, v: usize) -> usize {
        let children = self.parents().iter().filter(|&&p| p == v).count();
        children + usize::from(v != 1)
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = self.child_counts();
        for d in deg.iter_mut().skip(2) {
            *d += 1;
        }
        deg
    }

    /// Subtree sizes with the tree rooted at vertex 1, indexed by label.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let n = self.n();
        let mut size = vec![1usize; n + 1];
        size[0] = 0;
        for v in (2..=n).rev() {
            size[self.parent[v]] += size[v];
        }
        size
    }

    /// The tree `T_m` formed by the first `m` arrivals.
    pub fn prefix(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.n() {
            return Err(Error::arg(format!(
                "prefix size {m} must be in 1..={}",
                self.n()
            )));
        }
        Ok(Self {
            seed_size: self.seed_size.min(m),
            parent: self.parent[..=m].to_vec(),
        })
    }

    /// The same tree with a different seed boundary.
    pub fn with_seed_size(mut self, seed_size: usize) -> Result<Self> {
        if seed_size == 0 || seed_size > self.n() {
            return Err(Error::arg(format!(
                "seed size {seed_size} must be in 1..={}",
                self.n()
            )));
        }
        self.seed_size = seed_size;
        Ok(self)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (2..=self.n()).map(|v| (v, self.parent[v]))
    }
}

/// Children lists in compressed form.
#[derive(Debug, Clone)]
pub struct Children {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Children {
    pub fn of(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }
}

/// Builds the seed tree itself (`n = size`).
pub fn build_seed(spec: &SeedSpec, rng: &mut RngHandle) -> Result<ArrivalTree> {
    let size = spec.size();
    if size == 0 {
        return Err(Error::arg("seed size must be at least 1"));
    }
    let parents: Vec<usize> = match spec {
        SeedSpec::Path { .. } => (2..=size).map(|v| v - 1).collect(),
        SeedSpec::Star { .. } => vec![1; size - 1],
        SeedSpec::Urrt { .. } => (2..=size).map(|v| rng.between(1, v - 1)).collect(),
        SeedSpec::Custom { parents } => parents.clone(),
    };
    ArrivalTree::from_parents(size, &parents)
}

/// Extends `tree` to `n` vertices by uniform attachment.
pub fn grow(tree: &ArrivalTree, n: usize, rng: &mut RngHandle) -> Result<ArrivalTree> {
    if n < tree.n() {
        return Err(Error::arg(format!(
            "cannot grow a tree of {} vertices to {n}",
            tree.n()
        )));
    }
    let mut parent = Vec::with_capacity(n + 1);
    parent.extend_from_slice(&tree.parent);
    for v in tree.n() + 1..=n {
        parent.push(rng.between(1, v - 1));
    }
    Ok(ArrivalTree {
        seed_size: tree.seed_size,
        parent,
    })
}

/// Seed construction followed by growth to `n` vertices.
pub fn generate(spec: &SeedSpec, n: usize, rng: &mut RngHandle) -> Result<ArrivalTree> {
    let seed = build_seed(spec, rng)?;
    grow(&seed, n, rng)
}

/// An unlabeled tree: adjacency under arbitrary labels `1..=n`.
///
/// This is everything a seed finder gets to see.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeView {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl ShapeView {
    /// Builds a view from an undirected edge list, checking that it is a tree
    /// on `1..=n`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n > 0 && edges.len() != n - 1 {
            return Err(Error::arg(format!(
                "a tree on {n} vertices has {} edges, got {}",
                n - 1,
                edges.len()
            )));
        }
        if n == 0 && !edges.is_empty() {
            return Err(Error::arg("edges given for an empty tree"));
        }
        for &(a, b) in edges {
            if a == 0 || b == 0 || a > n || b > n || a == b {
                return Err(Error::arg(format!("invalid edge {a} {b} for n = {n}")));
            }
        }
        let view = Self::build(n, edges);
        if n > 0 && view.reachable_from(1) != n {
            return Err(Error::arg("edge list is not connected"));
        }
        Ok(view)
    }

    /// The tree under its own arrival labels, unscrambled.
    pub fn of_tree(tree: &ArrivalTree) -> Self {
        Self::build(tree.n(), &tree.edges().collect::<Vec<_>>())
    }

    fn build(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut offsets = vec![0usize; n + 2];
        for &(a, b) in edges {
            offsets[a + 1] += 1;
            offsets[b + 1] += 1;
        }
        for v in 1..offsets.len() {
            offsets[v] += offsets[v - 1];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0usize; offsets[n + 1]];
        for &(a, b) in edges {
            targets[fill[a]] = b;
            fill[a] += 1;
            targets[fill[b]] = a;
            fill[b] += 1;
        }
        for v in 1..=n {
            targets[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Self { offsets, targets }
    }

    fn reachable_from(&self, start: usize) -> usize {
        let mut seen = vec![false; self.n() + 1];
        let mut stack = vec![start];
        seen[start] = true;
        let mut count = 0;
        while let Some(v) = stack.pop() {
            count += 1;
            for &u in self.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        count
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn contains(&self, v: usize) -> bool {
        (1..=self.n()).contains(&v)
    }

    /// Each edge once, as `(smaller, larger)` label pairs in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..=self.n()).flat_map(move |v| {
            self.neighbors(v)
                .iter()
                .filter(move |&&u| u > v)
                .map(move |&u| (v, u))
        })
    }

    /// Parent of each vertex when the view is rooted at `root`, plus a
    /// preorder of the vertices. `parent[root] == 0`.
    pub fn rooted(&self, root: usize) -> (Vec<usize>, Vec<usize>) {
        let n = self.n();
        let mut parent = vec![0usize; n + 1];
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![root];
        let mut seen = vec![false; n + 1];
        seen[root] = true;
        while let Some(v) = stack.pop() {
            order.push(v);
            for &u in self.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = v;
                    stack.push(u);
                }
            }
        }
        (parent, order)
    }
}

/// The hidden bijection from shape labels back to arrival labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelKey {
    to_arrival: Vec<usize>,
    to_shape: Vec<usize>,
}

impl LabelKey {
    /// Builds a key from `to_arrival[s - 1]` = arrival label of shape label `s`.
    pub fn from_arrivals(to_arrival: Vec<usize>) -> Result<Self> {
        let n = to_arrival.len();
        let mut to_shape = vec![0usize; n + 1];
        for (i, &a) in to_arrival.iter().enumerate() {
            if a == 0 || a > n || to_shape[a] != 0 {
                return Err(Error::arg(format!("not a permutation of 1..={n}")));
            }
            to_shape[a] = i + 1;
        }
        let mut padded = Vec::with_capacity(n + 1);
        padded.push(0);
        padded.extend(to_arrival);
        Ok(Self {
            to_arrival: padded,
            to_shape,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            to_arrival: (0..=n).collect(),
            to_shape: (0..=n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.to_arrival.len() - 1
    }

    pub fn arrival_of(&self, shape: usize) -> usize {
        self.to_arrival[shape]
    }

    pub fn shape_of(&self, arrival: usize) -> usize {
        self.to_shape[arrival]
    }

    /// `(shape, arrival)` pairs in shape-label order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..=self.n()).map(|s| (s, self.to_arrival[s]))
    }
}

/// A scrambled tree: the public view plus the key the scorer keeps back.
#[derive(Debug, Clone)]
pub struct Scrambled {
    pub view: ShapeView,
    pub key: LabelKey,
}

/// Relabels `tree` by a uniformly random permutation.
pub fn scramble(tree: &ArrivalTree, rng: &mut RngHandle) -> Scrambled {
    let n = tree.n();
    let mut to_arrival: Vec<usize> = (1..=n).collect();
    to_arrival.shuffle(rng);
    let key = LabelKey::from_arrivals(to_arrival).expect("shuffle yields a permutation");
    let edges = tree
        .edges()
        .map(|(child, parent)| (key.shape_of(child), key.shape_of(parent)))
        .collect::<Vec<_>>();
    let view = ShapeView::build(n, &edges);
    Scrambled { view, key }
}
