//! Anti-centrality: `psi(v)` is the size of the largest component left after
//! deleting `v`. Small `psi` means central.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::RngHandle;
use crate::tree::ShapeView;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralityProfile {
    psi: Vec<usize>,
    subtree_size: Vec<usize>,
    // parent in the rooting at label 1
    parent: Vec<usize>,
    centroids: Vec<usize>,
}

impl CentralityProfile {
    pub fn n(&self) -> usize {
        self.psi.len() - 1
    }

    pub fn psi(&self, v: usize) -> usize {
        self.psi[v]
    }

    /// `psi` indexed by label; slot 0 is unused.
    pub fn psi_by_label(&self) -> &[usize] {
        &self.psi
    }

    /// Subtree size of `v` with the view rooted at label 1.
    pub fn subtree_size(&self, v: usize) -> usize {
        self.subtree_size[v]
    }

    /// Vertices attaining the minimum `psi` (one, or two adjacent ones).
    pub fn centroids(&self) -> &[usize] {
        &self.centroids
    }

    pub fn is_centroid(&self, v: usize) -> bool {
        self.centroids.contains(&v)
    }

    /// `(neighbor, size of the component of T - v containing neighbor)`.
    fn branch_sizes(&self, view: &ShapeView, v: usize) -> Vec<(usize, usize)> {
        let n = self.n();
        view.neighbors(v)
            .iter()
            .map(|&u| {
                let size = if self.parent[u] == v {
                    self.subtree_size[u]
                } else {
                    n - self.subtree_size[v]
                };
                (u, size)
            })
            .collect()
    }
}

/// Computes `psi` for every vertex with two linear passes: subtree sizes from
/// label 1, then `psi(v) = max(largest child subtree, n - size(v))`.
pub fn anti_centrality(view: &ShapeView) -> Result<CentralityProfile> {
    let n = view.n();
    if n == 0 {
        return Err(Error::arg("anti-centrality of an empty tree"));
    }
    let (parent, order) = view.rooted(1);
    let mut size = vec![1usize; n + 1];
    size[0] = 0;
    let mut largest_child = vec![0usize; n + 1];
    for &v in order.iter().rev() {
        let p = parent[v];
        if p != 0 {
            size[p] += size[v];
            largest_child[p] = largest_child[p].max(size[v]);
        }
    }
    let mut psi = vec![0usize; n + 1];
    for v in 1..=n {
        psi[v] = largest_child[v].max(n - size[v]);
    }
    let min = psi[1..].iter().copied().min().unwrap_or(0);
    let centroids = (1..=n).filter(|&v| psi[v] == min).collect();
    Ok(CentralityProfile {
        psi,
        subtree_size: size,
        parent,
        centroids,
    })
}

/// The `k` most central vertices, `H_psi(k)`, in ascending label order.
/// Ties at the boundary value are broken uniformly at random.
pub fn select_most_central(
    profile: &CentralityProfile,
    k: usize,
    rng: &mut RngHandle,
) -> Result<Vec<usize>> {
    let n = profile.n();
    if k == 0 || k > n {
        return Err(Error::arg(format!("k = {k} must be in 1..={n}")));
    }
    let labels: Vec<usize> = (1..=n).collect();
    Ok(smallest_with_random_ties(
        &labels,
        |v| profile.psi[v],
        k,
        rng,
    ))
}

/// Sizes of the branches hanging off `v`, one per neighbor. They sum to `n - 1`.
pub fn branch_sizes_at(view: &ShapeView, v: usize) -> Result<Vec<(usize, usize)>> {
    if !view.contains(v) {
        return Err(Error::arg(format!("vertex {v} is not in 1..={}", view.n())));
    }
    let profile = anti_centrality(view)?;
    Ok(profile.branch_sizes(view, v))
}

pub(crate) fn branch_sizes_with(
    profile: &CentralityProfile,
    view: &ShapeView,
    v: usize,
) -> Vec<(usize, usize)> {
    profile.branch_sizes(view, v)
}

/// Selects `k` of `items` with the smallest `key`; among items tied at the
/// boundary key, a uniformly random subset of the right size is taken.
/// Returns the selection sorted ascending. Requires `k <= items.len()`.
pub(crate) fn smallest_with_random_ties<K: Ord + Copy>(
    items: &[usize],
    key: impl Fn(usize) -> K,
    k: usize,
    rng: &mut RngHandle,
) -> Vec<usize> {
    debug_assert!(k <= items.len());
    if k == 0 {
        return Vec::new();
    }
    let mut sorted = items.to_vec();
    sorted.sort_by_key(|&v| (key(v), v));
    let boundary = key(sorted[k - 1]);
    let mut chosen: Vec<usize> = sorted
        .iter()
        .copied()
        .filter(|&v| key(v) < boundary)
        .collect();
    let mut tied: Vec<usize> = sorted
        .iter()
        .copied()
        .filter(|&v| key(v) == boundary)
        .collect();
    let need = k - chosen.len();
    if need < tied.len() {
        let (picked, _) = tied.partial_shuffle(rng, need);
        chosen.extend_from_slice(picked);
    } else {
        chosen.append(&mut tied);
    }
    chosen.sort_unstable();
    chosen
}
