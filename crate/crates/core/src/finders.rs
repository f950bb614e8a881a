//! Seed finders for path, star and random recursive seeds.
//!
//! Every finder sees only a [`ShapeView`]; arrival labels never reach this
//! module. Outputs are shape labels.

use std::cmp::Reverse;

use serde::{Deserialize, Serialize};

use crate::centrality::{
    anti_centrality, branch_sizes_with, select_most_central, smallest_with_random_ties,
};
use crate::error::{Error, Result};
use crate::rng::RngHandle;
use crate::scalar::{snapped_ceil, snapped_floor, Real};
use crate::tree::ShapeView;

/// Tuning shared by all finders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinderParams<F = f64> {
    /// Number of seed vertices.
    pub seed_size: usize,
    /// Recovery slack in (0, 1).
    pub gamma: F,
    /// Target failure probability in (0, 1).
    pub epsilon: F,
    /// The unspecified numerical constant of the star threshold.
    pub star_constant: F,
}

impl<F: Real> FinderParams<F> {
    pub fn new(seed_size: usize, gamma: F, epsilon: F) -> Result<Self> {
        let params = Self {
            seed_size,
            gamma,
            epsilon,
            star_constant: F::one(),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_star_constant(mut self, c: F) -> Result<Self> {
        self.star_constant = c;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |x: F| x > F::zero() && x < F::one();
        if self.seed_size == 0 {
            return Err(Error::arg("seed size must be at least 1"));
        }
        if !unit(self.gamma) {
            return Err(Error::arg(format!(
                "gamma = {:?} must lie in (0, 1)",
                self.gamma
            )));
        }
        if !unit(self.epsilon) {
            return Err(Error::arg(format!(
                "epsilon = {:?} must lie in (0, 1)",
                self.epsilon
            )));
        }
        if self.star_constant.is_nan() || self.star_constant <= F::zero() {
            return Err(Error::arg("star_constant must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FinderKind {
    Path,
    Star,
    Urrt,
}

impl FinderKind {
    pub fn name(self) -> &'static str {
        match self {
            FinderKind::Path => "path",
            FinderKind::Star => "star",
            FinderKind::Urrt => "urrt",
        }
    }
}

/// Which containment the estimate aims for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedKind {
    /// Output is (w.h.p.) a subset of the seed.
    FirstKind,
    /// Output (w.h.p.) covers the seed.
    SecondKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedEstimate {
    /// Shape labels, ascending.
    pub vertices: Vec<usize>,
    pub kind: SeedKind,
    pub target_size: usize,
    /// Set when fewer than `target_size` vertices could be returned.
    pub deficit: bool,
    /// The most central vertex the star finder anchored on.
    pub anchor: Option<usize>,
}

/// `max(1, floor((1 - gamma) * l))`.
pub fn path_target_size<F: Real>(seed_size: usize, gamma: F) -> usize {
    let raw = snapped_floor((F::one() - gamma) * F::from_count(seed_size as u64));
    float_to_count(raw).max(1)
}

/// `ceil((1 + gamma) * l)`.
pub fn star_target_size<F: Real>(seed_size: usize, gamma: F) -> usize {
    let raw = snapped_ceil((F::one() + gamma) * F::from_count(seed_size as u64));
    float_to_count(raw)
}

/// `a = 2 ln(4 l^2 / epsilon) + 1`.
pub fn urrt_depth_scale<F: Real>(seed_size: usize, epsilon: F) -> F {
    let l = F::from_count(seed_size as u64);
    let two = F::from_count(2);
    two * (F::from_count(4) * l * l / epsilon).ln() + F::one()
}

/// `max(1, floor(l / (3a)))`.
pub fn urrt_target_size<F: Real>(seed_size: usize, epsilon: F) -> usize {
    let a = urrt_depth_scale(seed_size, epsilon);
    let raw = snapped_floor(F::from_count(seed_size as u64) / (F::from_count(3) * a));
    float_to_count(raw).max(1)
}

fn float_to_count<F: Real>(x: F) -> usize {
    if x <= F::zero() {
        0
    } else {
        x.to_f64() as usize
    }
}

fn require_seed_fits(view: &ShapeView, seed_size: usize, min_seed: usize) -> Result<()> {
    if seed_size < min_seed || view.n() < seed_size {
        return Err(Error::arg(format!(
            "need n >= l >= {min_seed}, got n = {}, l = {seed_size}",
            view.n()
        )));
    }
    Ok(())
}

/// First-kind estimate for a path seed: the `(1 - gamma) l` most central vertices.
pub fn find_path_seed<F: Real>(
    view: &ShapeView,
    params: &FinderParams<F>,
    rng: &mut RngHandle,
) -> Result<SeedEstimate> {
    params.validate()?;
    require_seed_fits(view, params.seed_size, 2)?;
    let target = path_target_size(params.seed_size, params.gamma);
    if target > view.n() {
        return Err(Error::arg(format!(
            "target size {target} exceeds n = {}",
            view.n()
        )));
    }
    let profile = anti_centrality(view)?;
    Ok(SeedEstimate {
        vertices: select_most_central(&profile, target, rng)?,
        kind: SeedKind::FirstKind,
        target_size: target,
        deficit: false,
        anchor: None,
    })
}

/// Second-kind estimate for a star seed: the most central vertex together
/// with its neighbors whose branches (away from it) are largest.
pub fn find_star_seed<F: Real>(
    view: &ShapeView,
    params: &FinderParams<F>,
    rng: &mut RngHandle,
) -> Result<SeedEstimate> {
    params.validate()?;
    require_seed_fits(view, params.seed_size, 2)?;
    let target = star_target_size(params.seed_size, params.gamma);
    let profile = anti_centrality(view)?;
    let centroids = profile.centroids();
    let anchor = if centroids.len() == 1 {
        centroids[0]
    } else {
        centroids[rng.below(centroids.len())]
    };

    let branches = branch_sizes_with(&profile, view, anchor);
    let wanted = target - 1;
    let deficit = branches.len() < wanted;
    let indices: Vec<usize> = (0..branches.len()).collect();
    let picked = smallest_with_random_ties(
        &indices,
        |i| Reverse(branches[i].1),
        wanted.min(branches.len()),
        rng,
    );
    let mut vertices: Vec<usize> = picked.into_iter().map(|i| branches[i].0).collect();
    vertices.push(anchor);
    vertices.sort_unstable();
    Ok(SeedEstimate {
        vertices,
        kind: SeedKind::SecondKind,
        target_size: target,
        deficit,
        anchor: Some(anchor),
    })
}

/// First-kind estimate for a random recursive seed: the `l / (3a)` most
/// central vertices.
pub fn find_urrt_seed<F: Real>(
    view: &ShapeView,
    params: &FinderParams<F>,
    rng: &mut RngHandle,
) -> Result<SeedEstimate> {
    params.validate()?;
    require_seed_fits(view, params.seed_size, 1)?;
    let target = urrt_target_size(params.seed_size, params.epsilon);
    let profile = anti_centrality(view)?;
    Ok(SeedEstimate {
        vertices: select_most_central(&profile, target, rng)?,
        kind: SeedKind::FirstKind,
        target_size: target,
        deficit: false,
        anchor: None,
    })
}

pub fn find_seed<F: Real>(
    kind: FinderKind,
    view: &ShapeView,
    params: &FinderParams<F>,
    rng: &mut RngHandle,
) -> Result<SeedEstimate> {
    match kind {
        FinderKind::Path => find_path_seed(view, params, rng),
        FinderKind::Star => find_star_seed(view, params, rng),
        FinderKind::Urrt => find_urrt_seed(view, params, rng),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Threshold<F> {
    /// Smallest admissible seed size: `min_size = max(1, ceil(bound))`.
    MinimalSeed { bound: F, min_size: usize },
    /// Implicit condition `l >= rhs`, evaluated for the given `l`.
    Condition { holds: bool, rhs: F },
}

/// Seed-size requirement of the recovery guarantee for each seed family.
///
/// * path: `l >= (2e^2/gamma) * max(ln(1/eps), ln(4e^2))`
/// * star: `l >= max(C, 8/gamma) * ln(1/eps)`
/// * urrt: `l >= 64 a^2 ln(22 a l^2 / eps)` with `a = 2 ln(4 l^2/eps) + 1`
pub fn theorem_threshold<F: Real>(kind: FinderKind, params: &FinderParams<F>) -> Threshold<F> {
    let e2 = F::one().exp().powi(2);
    let two = F::from_count(2);
    let log_inv_eps = params.epsilon.recip().ln();
    let minimal = |bound: F| Threshold::MinimalSeed {
        bound,
        min_size: float_to_count(snapped_ceil(bound)).max(1),
    };
    match kind {
        FinderKind::Path => {
            let scale = two * e2 / params.gamma;
            let bound = (scale * log_inv_eps).max(scale * (F::from_count(4) * e2).ln());
            minimal(bound)
        }
        FinderKind::Star => {
            let factor = params.star_constant.max(F::from_count(8) / params.gamma);
            minimal(factor * log_inv_eps)
        }
        FinderKind::Urrt => {
            let l = F::from_count(params.seed_size as u64);
            let a = urrt_depth_scale(params.seed_size, params.epsilon);
            let rhs =
                F::from_count(64) * a * a * (F::from_count(22) * a * l * l / params.epsilon).ln();
            Threshold::Condition {
                holds: l >= rhs,
                rhs,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{build_seed, grow, ArrivalTree, SeedSpec};

    fn bare(spec: SeedSpec) -> ShapeView {
        ShapeView::of_tree(&build_seed(&spec, &mut RngHandle::new(0, 0)).unwrap())
    }

    #[test]
    fn params_validation() {
        assert!(FinderParams::new(5, 0.4, 0.1).is_ok());
        assert!(FinderParams::new(0, 0.4, 0.1).is_err());
        assert!(FinderParams::new(5, 0.0, 0.1).is_err());
        assert!(FinderParams::new(5, 1.0, 0.1).is_err());
        assert!(FinderParams::new(5, 0.4, 1.0).is_err());
        assert!(FinderParams::new(5, 0.4, f64::NAN).is_err());
        let p = FinderParams::new(5, 0.4, 0.1).unwrap();
        assert!(p.with_star_constant(0.0).is_err());
        assert_eq!(p.with_star_constant(3.0).unwrap().star_constant, 3.0);
    }

    #[test]
    fn target_sizes() {
        assert_eq!(path_target_size(5, 0.4), 3);
        assert_eq!(path_target_size(50, 0.5), 25);
        assert_eq!(path_target_size(2, 0.9), 1);
        assert_eq!(star_target_size(5, 0.2), 6);
        assert_eq!(star_target_size(100, 0.3), 130);
        assert_eq!(star_target_size(100, 0.3_f32), 130);
        assert_eq!(urrt_target_size(300, 0.1), 3);
        assert_eq!(urrt_target_size(1, 0.5), 1);
        let a = urrt_depth_scale(300, 0.1_f64);
        assert!((a - (2.0 * 3.6e6_f64.ln() + 1.0)).abs() < 1e-12);
        assert!((a - 31.1929).abs() < 1e-3);
    }

    #[test]
    fn path_on_bare_path_takes_middle() {
        let view = bare(SeedSpec::Path { size: 5 });
        let params = FinderParams::new(5, 0.4, 0.1).unwrap();
        let est = find_path_seed(&view, &params, &mut RngHandle::new(1, 0)).unwrap();
        assert_eq!(est.vertices, vec![2, 3, 4]);
        assert_eq!(est.kind, SeedKind::FirstKind);
        assert_eq!(est.target_size, 3);

        let params = FinderParams::new(5, 1e-17, 0.1).unwrap();
        let est = find_path_seed(&view, &params, &mut RngHandle::new(1, 0)).unwrap();
        assert_eq!(est.vertices, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn path_preconditions() {
        let view = bare(SeedSpec::Path { size: 5 });
        let mut rng = RngHandle::new(1, 0);
        let too_big = FinderParams::new(6, 0.4, 0.1).unwrap();
        assert!(find_path_seed(&view, &too_big, &mut rng).is_err());
        let too_small = FinderParams::new(1, 0.4, 0.1).unwrap();
        assert!(find_path_seed(&view, &too_small, &mut rng).is_err());
        assert!(find_star_seed(&view, &too_small, &mut rng).is_err());
    }

    #[test]
    fn star_on_bare_star_flags_deficit() {
        let view = bare(SeedSpec::Star { size: 5 });
        let params = FinderParams::new(5, 0.2, 0.1).unwrap();
        let est = find_star_seed(&view, &params, &mut RngHandle::new(1, 0)).unwrap();
        assert_eq!(est.target_size, 6);
        assert!(est.deficit);
        assert_eq!(est.vertices, vec![1, 2, 3, 4, 5]);
        assert_eq!(est.anchor, Some(1));
        assert_eq!(est.kind, SeedKind::SecondKind);
    }

    #[test]
    fn star_ranks_neighbors_by_branch_size() {
        // E_4 plus vertex 5 on leaf 2
        let tree = ArrivalTree::from_parents(4, &[1, 1, 1, 2]).unwrap();
        let view = ShapeView::of_tree(&tree);
        let mut rng = RngHandle::new(2, 0);

        let params = FinderParams::new(4, 0.25, 0.1).unwrap();
        let est = find_star_seed(&view, &params, &mut rng).unwrap();
        assert_eq!(est.anchor, Some(1));
        assert_eq!(est.target_size, 5);
        assert!(est.deficit);
        assert_eq!(est.vertices, vec![1, 2, 3, 4]);

        // target 2: the anchor plus the neighbor with the size-2 branch
        let params = FinderParams::new(2, 0.25, 0.1).unwrap();
        for _ in 0..20 {
            let est = find_star_seed(&view, &params, &mut rng).unwrap();
            assert_eq!(est.target_size, 3);
            assert!(!est.deficit);
            assert_eq!(est.vertices.len(), 3);
            assert!(est.vertices.contains(&1) && est.vertices.contains(&2));
        }
    }

    #[test]
    fn urrt_single_vertex_seed_returns_centroid() {
        let mut rng = RngHandle::new(4, 0);
        let t = grow(&ArrivalTree::singleton(), 31, &mut rng).unwrap();
        let view = ShapeView::of_tree(&t);
        let params = FinderParams::new(1, 0.5, 0.3).unwrap();
        let est = find_urrt_seed(&view, &params, &mut rng).unwrap();
        assert_eq!(est.target_size, 1);
        let profile = anti_centrality(&view).unwrap();
        assert!(profile.is_centroid(est.vertices[0]));
    }

    #[test]
    fn path_threshold_value() {
        let params = FinderParams::new(10, 0.5, 0.1).unwrap();
        let Threshold::MinimalSeed { bound, min_size } =
            theorem_threshold(FinderKind::Path, &params)
        else {
            panic!("path threshold is explicit");
        };
        let e2 = std::f64::consts::E.powi(2);
        let expected = (2.0 * e2 / 0.5) * (4.0 * e2).ln();
        assert!((bound - expected).abs() < 1e-9);
        assert!((bound - 100.0861).abs() < 1e-3);
        assert_eq!(min_size, 101);
    }

    #[test]
    fn star_threshold_vanishes_as_epsilon_approaches_one() {
        let params = FinderParams::new(1, 0.999_999, 1.0 - 1e-12).unwrap();
        let Threshold::MinimalSeed { bound, min_size } =
            theorem_threshold(FinderKind::Star, &params)
        else {
            panic!()
        };
        assert!(bound < 1e-9);
        assert_eq!(min_size, 1);

        let params = FinderParams::new(1, 0.5, 0.1)
            .unwrap()
            .with_star_constant(40.0)
            .unwrap();
        let Threshold::MinimalSeed { bound, .. } = theorem_threshold(FinderKind::Star, &params)
        else {
            panic!()
        };
        assert!((bound - 40.0 * 10f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn urrt_condition_fails_for_small_seed() {
        let params = FinderParams::new(10, 0.5, 0.1).unwrap();
        let Threshold::Condition { holds, rhs } = theorem_threshold(FinderKind::Urrt, &params)
        else {
            panic!()
        };
        assert!(!holds);
        assert!(rhs > 10.0);
    }
}
