//! Exact counters on arrival trees and the analytic quantities they are
//! compared against: descendant counts, singletons, camouflaging vertices,
//! Pólya urns, and the probability of the symmetric-path event.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::proportion_std_error;
use crate::rng::RngHandle;
use crate::scalar::{Real, Scalar};
use crate::tree::{generate, grow, ArrivalTree, SeedSpec};

/// Counts of vertices by number of descendants, tree rooted at vertex 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DescendantHistogram {
    n: usize,
    exactly: Vec<u64>,
    at_least: Vec<u64>,
}

impl DescendantHistogram {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of vertices with exactly `k` descendants.
    pub fn exactly(&self, k: usize) -> u64 {
        self.exactly.get(k).copied().unwrap_or(0)
    }

    /// Number of vertices with at least `k` descendants.
    pub fn at_least(&self, k: usize) -> u64 {
        self.at_least.get(k).copied().unwrap_or(0)
    }

    /// `(k, exactly k, at least k)` for `k` in `0..n`.
    pub fn rows(&self) -> impl Iterator<Item = (usize, u64, u64)> + '_ {
        (0..self.n).map(|k| (k, self.exactly[k], self.at_least[k]))
    }
}

/// Descendants of every vertex (subtree size minus one), indexed by label.
pub fn descendants(tree: &ArrivalTree) -> Vec<usize> {
    let mut sizes = tree.subtree_sizes();
    for s in sizes.iter_mut().skip(1) {
        *s -= 1;
    }
    sizes
}

pub fn descendant_histogram(tree: &ArrivalTree) -> DescendantHistogram {
    let n = tree.n();
    let mut exactly = vec![0u64; n];
    for &d in &descendants(tree)[1..] {
        exactly[d] += 1;
    }
    let mut at_least = vec![0u64; n + 1];
    for k in (0..n).rev() {
        at_least[k] = at_least[k + 1] + exactly[k];
    }
    DescendantHistogram {
        n,
        exactly,
        at_least,
    }
}

/// Vertices with at least `a` descendants, ascending.
pub fn deep_vertices<S: Scalar>(tree: &ArrivalTree, a: S) -> Result<Vec<usize>> {
    if a < S::zero() {
        return Err(Error::arg(format!("depth threshold {a:?} is negative")));
    }
    let d = descendants(tree);
    Ok((1..=tree.n())
        .filter(|&v| S::from_count(d[v] as u64) >= a)
        .collect())
}

/// Singleton parents and camouflaging vertices of a tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CamouflageReport {
    pub seed_size: usize,
    pub singleton_parents: Vec<usize>,
    pub camouflaging: Vec<usize>,
}

impl CamouflageReport {
    /// Number of camouflaging vertices.
    pub fn g(&self) -> usize {
        self.camouflaging.len()
    }

    /// Number of singleton parents.
    pub fn s(&self) -> usize {
        self.singleton_parents.len()
    }
}

// (parent, its only child) for every parent of a singleton.
fn singleton_pairs(tree: &ArrivalTree) -> Vec<(usize, usize)> {
    let counts = tree.child_counts();
    let mut only_child = vec![0usize; tree.n() + 1];
    for (child, parent) in tree.edges() {
        only_child[parent] = child;
    }
    (1..=tree.n())
        .filter(|&v| counts[v] == 1 && counts[only_child[v]] == 0)
        .map(|v| (v, only_child[v]))
        .collect()
}

/// Vertices with exactly one child, that child having no children itself.
pub fn singleton_parents(tree: &ArrivalTree) -> Result<CamouflageReport> {
    if tree.n() < 2 {
        return Err(Error::arg("singletons need at least two vertices"));
    }
    Ok(CamouflageReport {
        seed_size: tree.n(),
        singleton_parents: singleton_pairs(tree).into_iter().map(|(v, _)| v).collect(),
        camouflaging: Vec::new(),
    })
}

/// Camouflaging vertices of the seed `T_l`, judged on the prefix `T_{2l}`.
///
/// `v` qualifies when, in `T_l`, it is the parent of a singleton `d`, and in
/// `T_{2l}` both `d` is still childless and some arrival `w` in `l+1..=2l`
/// hangs off `v` with no children of its own.
pub fn count_camouflaging(tree: &ArrivalTree, seed_size: usize) -> Result<CamouflageReport> {
    if seed_size == 0 || tree.n() < 2 * seed_size {
        return Err(Error::arg(format!(
            "camouflage needs n >= 2l with l >= 1, got n = {}, l = {seed_size}",
            tree.n()
        )));
    }
    let seed = tree.prefix(seed_size)?;
    let pairs = singleton_pairs(&seed);
    let horizon = tree.prefix(2 * seed_size)?;
    let counts = horizon.child_counts();
    let mut has_late_leaf = vec![false; seed_size + 1];
    for (w, &c) in counts.iter().enumerate().skip(seed_size + 1) {
        let p = horizon.parent(w).expect("w > 1");
        if p <= seed_size && c == 0 {
            has_late_leaf[p] = true;
        }
    }
    let camouflaging = pairs
        .iter()
        .filter(|&&(v, d)| counts[d] == 0 && has_late_leaf[v])
        .map(|&(v, _)| v)
        .collect();
    Ok(CamouflageReport {
        seed_size,
        singleton_parents: pairs.into_iter().map(|(v, _)| v).collect(),
        camouflaging,
    })
}

/// `G_l` for a fresh random recursive tree grown to `2l` vertices.
pub fn sample_camouflage_count(seed_size: usize, rng: &mut RngHandle) -> Result<usize> {
    let tree = generate(&SeedSpec::Urrt { size: seed_size }, 2 * seed_size, rng)?;
    Ok(count_camouflaging(&tree, seed_size)?.g())
}

/// A uniform random recursive tree on `n` vertices.
pub fn sample_urrt(n: usize, rng: &mut RngHandle) -> Result<ArrivalTree> {
    grow(&ArrivalTree::singleton(), n, rng)
}

/// Ball counts of a Pólya urn, one entry per colour.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UrnState {
    counts: Vec<u64>,
}

impl UrnState {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.iter().sum::<u64>() == 0 {
            return Err(Error::arg("an urn needs at least one ball"));
        }
        Ok(Self { counts })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn fraction(&self, colour: usize) -> f64 {
        self.counts[colour] as f64 / self.total() as f64
    }
}

/// Draws `draws` balls, each time returning it with one more of its colour.
pub fn polya_draw(state: &UrnState, draws: u64, rng: &mut RngHandle) -> UrnState {
    let mut counts = state.counts.clone();
    for total in (state.total()..).take(draws as usize) {
        let mut ball = rng.below(total as usize) as u64;
        let mut colour = 0;
        while ball >= counts[colour] {
            ball -= counts[colour];
            colour += 1;
        }
        counts[colour] += 1;
    }
    UrnState { counts }
}

fn falling_product<S: Scalar>(from: u64, to: u64) -> S {
    (from..=to).fold(S::one(), |acc, i| acc * S::from_count(i))
}

/// Probability that a path seed `P_l` ends up, at time `2l`, at one end of a
/// path on `2l` vertices: `2 / (l (l+1) ... (2l-1))`.
pub fn path_collision_probability<S: Scalar>(seed_size: usize) -> Result<S> {
    if seed_size < 2 {
        return Err(Error::arg("path collision needs l >= 2"));
    }
    let l = seed_size as u64;
    Ok(S::from_count(2) / falling_product::<S>(l, 2 * l - 1))
}

/// Natural log and value of a probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogProbability {
    pub ln: f64,
    pub value: f64,
}

/// [`path_collision_probability`] evaluated in `f64`, switching to a log-sum
/// once the direct product would lose range (`l > 20`).
pub fn path_collision_log_probability(seed_size: usize) -> Result<LogProbability> {
    if seed_size < 2 {
        return Err(Error::arg("path collision needs l >= 2"));
    }
    if seed_size <= 20 {
        let value = path_collision_probability::<f64>(seed_size)?;
        return Ok(LogProbability {
            ln: value.ln(),
            value,
        });
    }
    let l = seed_size as u64;
    let ln = std::f64::consts::LN_2 - (l..2 * l).map(|i| (i as f64).ln()).sum::<f64>();
    Ok(LogProbability {
        ln,
        value: ln.exp(),
    })
}

/// Probability that a star seed `E_l` grows into a balanced double star at
/// time `2l` (arrival `l+1` joins the centre, the rest join `l+1`):
/// `1 / (l (l+1) ... (2l-1))`.
pub fn double_star_probability<S: Scalar>(seed_size: usize) -> Result<S> {
    if seed_size < 2 {
        return Err(Error::arg("double star needs l >= 2"));
    }
    let l = seed_size as u64;
    Ok(S::one() / falling_product::<S>(l, 2 * l - 1))
}

/// Whether the first `2l` arrivals form a path with the seed at one end.
pub fn path_seed_at_extreme(tree: &ArrivalTree, seed_size: usize) -> Result<bool> {
    if seed_size < 2 || tree.n() < 2 * seed_size {
        return Err(Error::arg("need l >= 2 and n >= 2l"));
    }
    let horizon = tree.prefix(2 * seed_size)?;
    let deg = horizon.degrees();
    if deg[1..].iter().any(|&d| d > 2) {
        return Ok(false);
    }
    Ok((1..=seed_size).any(|v| deg[v] == 1))
}

/// Whether the first `2l` arrivals form two stars of `l` vertices whose
/// centres are vertex 1 and a post-seed arrival.
pub fn star_seed_doubled(tree: &ArrivalTree, seed_size: usize) -> Result<bool> {
    if seed_size < 2 || tree.n() < 2 * seed_size {
        return Err(Error::arg("need l >= 2 and n >= 2l"));
    }
    let horizon = tree.prefix(2 * seed_size)?;
    let deg = horizon.degrees();
    if deg[1] != seed_size {
        return Ok(false);
    }
    let twin = (seed_size + 1..=2 * seed_size)
        .find(|&w| horizon.parent(w) == Some(1) && deg[w] == seed_size);
    let Some(twin) = twin else {
        return Ok(false);
    };
    Ok((1..=2 * seed_size).all(|v| v == 1 || v == twin || deg[v] == 1))
}

/// Monte Carlo frequency of an event on trees grown from `spec` to `n`.
pub fn event_frequency(
    spec: &SeedSpec,
    n: usize,
    trials: u64,
    rng: &mut RngHandle,
    mut event: impl FnMut(&ArrivalTree) -> Result<bool>,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::arg("trials must be positive"));
    }
    let mut hits = 0u64;
    for _ in 0..trials {
        let tree = generate(spec, n, rng)?;
        if event(&tree)? {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}

/// Exact mean number of vertices with exactly `k` descendants in a uniform
/// random recursive tree on `n` vertices.
pub fn expected_with_exactly<S: Scalar>(n: usize, k: usize) -> S {
    if n == 0 || k >= n {
        S::zero()
    } else if k == n - 1 {
        S::one()
    } else {
        S::from_count(n as u64) / S::from_count(((k + 1) * (k + 2)) as u64)
    }
}

/// Exact mean number of vertices with at least `k` descendants in a uniform
/// random recursive tree on `n` vertices.
pub fn expected_with_at_least<S: Scalar>(n: usize, k: usize) -> S {
    if k == 0 {
        S::from_count(n as u64)
    } else if k >= n {
        S::zero()
    } else {
        S::from_count(n as u64) / S::from_count((k + 1) as u64)
    }
}

/// The closed form `(n+1)/((k+1)(k+2))`. It is the exact mean on `n + 1`
/// vertices, and overshoots the `n`-vertex mean by `1/((k+1)(k+2))`.
pub fn closed_form_mean_exactly<S: Scalar>(n: usize, k: usize) -> S {
    S::from_count(n as u64 + 1) / S::from_count(((k + 1) * (k + 2)) as u64)
}

/// The closed form `(n+1)/(k+1) - 1`.
pub fn closed_form_mean_at_least<S: Scalar>(n: usize, k: usize) -> S {
    S::from_count(n as u64 + 1) / S::from_count(k as u64 + 1) - S::one()
}

/// Mean number of singleton parents in a random recursive tree on `l`
/// vertices: `0, 1` for `l = 1, 2`, then `l / 6`.
pub fn expected_singleton_parents<S: Scalar>(seed_size: usize) -> S {
    match seed_size {
        0 | 1 => S::zero(),
        2 => S::one(),
        l => S::from_count(l as u64) / S::from_count(6),
    }
}

/// Lower bound `l / 384` on the mean number of camouflaging vertices.
pub fn camouflage_mean_lower_bound<S: Scalar>(seed_size: usize) -> S {
    S::from_count(seed_size as u64) / S::from_count(384)
}

/// `exp(-t^2 / (2l))`.
pub fn camouflage_tail_bound<F: Real>(seed_size: usize, t: F) -> F {
    (-(t * t) / F::from_count(2 * seed_size as u64)).exp()
}

/// `k exp(-n / (32 k^2))`.
pub fn deep_tail_bound<F: Real>(n: usize, k: usize) -> F {
    let k_f = F::from_count(k as u64);
    k_f * (-F::from_count(n as u64) / (F::from_count(32) * k_f * k_f)).exp()
}

/// An empirical tail frequency against its theoretical upper bound.
///
/// `std_error` is the binomial standard error at `p = min(bound, 1)`, and the
/// check passes when `empirical <= bound + 3 * std_error`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailCheck {
    pub empirical: f64,
    pub theoretical: f64,
    pub std_error: f64,
    pub trials: u64,
    pub passed: bool,
}

impl TailCheck {
    fn new(hits: u64, trials: u64, bound: f64) -> Self {
        let empirical = hits as f64 / trials as f64;
        let std_error = proportion_std_error(bound.min(1.0), trials);
        Self {
            empirical,
            theoretical: bound,
            std_error,
            trials,
            passed: empirical <= bound + 3.0 * std_error,
        }
    }
}

/// Frequency of `{G_l <= l/384 - t}` over `trials` independent trees.
pub fn mcdiarmid_tail_check<F: Real>(
    seed_size: usize,
    t: F,
    trials: u64,
    rng: &mut RngHandle,
) -> Result<TailCheck> {
    if t.is_nan() || t < F::zero() {
        return Err(Error::arg("t must be non-negative"));
    }
    if seed_size == 0 || trials == 0 {
        return Err(Error::arg("need l >= 1 and trials >= 1"));
    }
    let threshold = camouflage_mean_lower_bound::<F>(seed_size) - t;
    let mut hits = 0u64;
    for _ in 0..trials {
        let g = sample_camouflage_count(seed_size, rng)?;
        if F::from_count(g as u64) <= threshold {
            hits += 1;
        }
    }
    Ok(TailCheck::new(
        hits,
        trials,
        camouflage_tail_bound(seed_size, t).to_f64(),
    ))
}

/// Frequency of `{M_{k,n} <= n/(3k)}` over `trials` random recursive trees.
pub fn deep_tail_check(n: usize, k: usize, trials: u64, rng: &mut RngHandle) -> Result<TailCheck> {
    if k < 1 || n <= k + 1 {
        return Err(Error::arg(format!(
            "need n > k + 1 >= 2, got n = {n}, k = {k}"
        )));
    }
    if trials == 0 {
        return Err(Error::arg("trials must be positive"));
    }
    let threshold = n as f64 / (3.0 * k as f64);
    let mut hits = 0u64;
    for _ in 0..trials {
        let tree = sample_urrt(n, rng)?;
        if (descendant_histogram(&tree).at_least(k) as f64) <= threshold {
            hits += 1;
        }
    }
    Ok(TailCheck::new(hits, trials, deep_tail_bound::<f64>(n, k)))
}
