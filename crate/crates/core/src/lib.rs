//! Uniform attachment trees grown from a seed, and recovering that seed.
//!
//! A tree starts from a seed on vertices `1..=l`; each later vertex `i`
//! attaches to one of `1..i` uniformly at random. The observer sees the
//! final tree without labels ([`ShapeView`]) and tries to point at the seed
//! using anti-centrality ([`centrality`]). [`finders`] implements the path,
//! star and random-recursive-seed strategies; [`archeology`] holds the exact
//! counters and closed forms used to check the probabilistic analysis;
//! [`experiment`] and [`validate`] drive reproducible Monte Carlo runs.

pub mod archeology;
pub mod centrality;
pub mod error;
pub mod estimate;
pub mod experiment;
pub mod finders;
pub mod format;
pub mod rng;
pub mod scalar;
pub mod tree;
pub mod validate;

pub use centrality::{anti_centrality, branch_sizes_at, select_most_central, CentralityProfile};
pub use error::{Error, Result};
pub use finders::{
    find_path_seed, find_seed, find_star_seed, find_urrt_seed, theorem_threshold, FinderKind,
    SeedEstimate, SeedKind, Threshold,
};
pub use rng::RngHandle;
pub use scalar::{Real, Scalar};
pub use tree::{
    build_seed, generate, grow, scramble, ArrivalTree, LabelKey, Scrambled, SeedSpec, ShapeView,
};

/// Exact rational arithmetic for closed-form probabilities.
pub type Exact = num_rational::BigRational;

/// Finder parameters in double precision.
pub type FinderParams = finders::FinderParams<f64>;

/// Finder parameters in single precision.
pub type FinderParamsF32 = finders::FinderParams<f32>;

/// Sample moments in double precision.
pub type Moments = estimate::Moments<f64>;
