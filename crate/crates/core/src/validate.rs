//! Monte Carlo checks of the closed-form quantities in [`crate::archeology`].
//!
//! Each suite samples at fixed sizes and returns one [`CheckResult`] per
//! quantity. Checks marked `asserted: false` are informational and do not
//! count towards [`ValidationReport::passed`].

use serde::{Deserialize, Serialize};

use crate::archeology::{
    camouflage_mean_lower_bound, closed_form_mean_at_least, closed_form_mean_exactly,
    deep_tail_check, descendant_histogram, double_star_probability, event_frequency,
    expected_singleton_parents, expected_with_at_least, expected_with_exactly,
    mcdiarmid_tail_check, path_collision_probability, path_seed_at_extreme, polya_draw,
    sample_camouflage_count, sample_urrt, singleton_parents, star_seed_doubled, TailCheck,
    UrnState,
};
use crate::error::{Error, Result};
use crate::estimate::{proportion_std_error, Moments};
use crate::rng::RngHandle;
use crate::tree::SeedSpec;

/// Tree size of the descendant suite.
pub const DESCENDANT_TREE_SIZE: usize = 50;
pub const DESCENDANT_EXACTLY_KS: [usize; 4] = [0, 1, 2, 3];
pub const DESCENDANT_AT_LEAST_KS: [usize; 4] = [1, 2, 4, 8];
pub const SINGLETON_SEED_SIZES: [usize; 4] = [3, 6, 12, 60];
pub const CAMOUFLAGE_SEED_SIZE: usize = 60;
pub const CAMOUFLAGE_TAIL_TS: [f64; 3] = [0.0, 5.0, 30.0];
pub const DEEP_TAIL_N: usize = 64;
pub const DEEP_TAIL_KS: [usize; 2] = [1, 2];
pub const POLYA_DRAWS: u64 = 1_000;
pub const COLLISION_SEED_SIZE: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Descendants,
    Singletons,
    Camouflage,
    Polya,
    Tails,
    Collision,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Descendants,
        Suite::Singletons,
        Suite::Camouflage,
        Suite::Polya,
        Suite::Tails,
        Suite::Collision,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Descendants => "descendants",
            Suite::Singletons => "singletons",
            Suite::Camouflage => "camouflage",
            Suite::Polya => "polya",
            Suite::Tails => "tails",
            Suite::Collision => "collision",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| Error::arg(format!("unknown suite `{name}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub empirical: f64,
    pub theoretical: f64,
    #[serde(rename = "SE")]
    pub std_error: f64,
    pub passed: bool,
    pub asserted: bool,
}

impl CheckResult {
    /// Two-sided: `|empirical - theoretical| <= 3 SE`.
    pub fn within(name: impl Into<String>, empirical: f64, theoretical: f64, se: f64) -> Self {
        Self {
            name: name.into(),
            empirical,
            theoretical,
            std_error: se,
            passed: (empirical - theoretical).abs() <= 3.0 * se,
            asserted: true,
        }
    }

    /// One-sided: `empirical - 3 SE >= theoretical`.
    pub fn at_least(name: impl Into<String>, empirical: f64, theoretical: f64, se: f64) -> Self {
        Self {
            name: name.into(),
            empirical,
            theoretical,
            std_error: se,
            passed: empirical - 3.0 * se >= theoretical,
            asserted: true,
        }
    }

    pub fn from_tail(name: impl Into<String>, tail: &TailCheck) -> Self {
        Self {
            name: name.into(),
            empirical: tail.empirical,
            theoretical: tail.theoretical,
            std_error: tail.std_error,
            passed: tail.passed,
            asserted: true,
        }
    }

    pub fn informational(mut self) -> Self {
        self.asserted = false;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub suite: Suite,
    pub trials: u64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl ValidationReport {
    fn new(suite: Suite, trials: u64, checks: Vec<CheckResult>) -> Self {
        let passed = checks.iter().filter(|c| c.asserted).all(|c| c.passed);
        Self {
            suite,
            trials,
            checks,
            passed,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Runs one suite with `trials` samples per sub-check.
pub fn validate_formulas(
    suite: Suite,
    trials: u64,
    rng: &mut RngHandle,
) -> Result<ValidationReport> {
    if trials < 2 {
        return Err(Error::arg("validation needs at least two trials"));
    }
    let checks = match suite {
        Suite::Descendants => descendants(trials, rng)?,
        Suite::Singletons => singletons(trials, rng)?,
        Suite::Camouflage => camouflage(trials, rng)?,
        Suite::Polya => polya(trials, rng)?,
        Suite::Tails => tails(trials, rng)?,
        Suite::Collision => collision(trials, rng)?,
    };
    Ok(ValidationReport::new(suite, trials, checks))
}

fn descendants(trials: u64, rng: &mut RngHandle) -> Result<Vec<CheckResult>> {
    let n = DESCENDANT_TREE_SIZE;
    let mut exactly = vec![Moments::<f64>::new(); n];
    let mut at_least = vec![Moments::<f64>::new(); n];
    for _ in 0..trials {
        let h = descendant_histogram(&sample_urrt(n, rng)?);
        for k in DESCENDANT_EXACTLY_KS {
            exactly[k].push(h.exactly(k) as f64);
        }
        for k in DESCENDANT_AT_LEAST_KS {
            at_least[k].push(h.at_least(k) as f64);
        }
    }
    let mut checks = Vec::new();
    for k in DESCENDANT_EXACTLY_KS {
        let m = &exactly[k];
        checks.push(CheckResult::within(
            format!("L[{k}] vs (n+1)/((k+1)(k+2))"),
            m.mean(),
            closed_form_mean_exactly::<f64>(n, k),
            m.std_error(),
        ));
        checks.push(CheckResult::within(
            format!("L[{k}] vs exact n/((k+1)(k+2))"),
            m.mean(),
            expected_with_exactly::<f64>(n, k),
            m.std_error(),
        ));
    }
    for k in DESCENDANT_AT_LEAST_KS {
        let m = &at_least[k];
        checks.push(CheckResult::within(
            format!("M[{k}] vs (n+1)/(k+1)-1"),
            m.mean(),
            closed_form_mean_at_least::<f64>(n, k),
            m.std_error(),
        ));
        checks.push(CheckResult::within(
            format!("M[{k}] vs exact n/(k+1)"),
            m.mean(),
            expected_with_at_least::<f64>(n, k),
            m.std_error(),
        ));
    }
    Ok(checks)
}

fn singletons(trials: u64, rng: &mut RngHandle) -> Result<Vec<CheckResult>> {
    SINGLETON_SEED_SIZES
        .iter()
        .map(|&l| {
            let mut m = Moments::<f64>::new();
            for _ in 0..trials {
                m.push(singleton_parents(&sample_urrt(l, rng)?)?.s() as f64);
            }
            Ok(CheckResult::within(
                format!("E S[{l}] = l/6"),
                m.mean(),
                expected_singleton_parents::<f64>(l),
                m.std_error(),
            ))
        })
        .collect()
}

fn camouflage(trials: u64, rng: &mut RngHandle) -> Result<Vec<CheckResult>> {
    let l = CAMOUFLAGE_SEED_SIZE;
    let mut m = Moments::<f64>::new();
    for _ in 0..trials {
        m.push(sample_camouflage_count(l, rng)? as f64);
    }
    Ok(vec![CheckResult::at_least(
        format!("E G[{l}] >= l/384"),
        m.mean(),
        camouflage_mean_lower_bound::<f64>(l),
        m.std_error(),
    )])
}

/// Red fractions of `runs` independent urns after `draws` draws each.
pub fn polya_fractions(
    red: u64,
    blue: u64,
    draws: u64,
    runs: u64,
    rng: &mut RngHandle,
) -> Result<Moments<f64>> {
    let urn = UrnState::new(vec![red, blue])?;
    Ok((0..runs)
        .map(|_| polya_draw(&urn, draws, rng).fraction(0))
        .collect())
}

/// Variance of the red fraction after `draws` draws from `(red, blue)`.
pub fn polya_finite_variance(red: u64, blue: u64, draws: u64) -> f64 {
    let (a, b, d) = (red as f64, blue as f64, draws as f64);
    let s = a + b;
    d * a * b / (s * s * (s + 1.0) * (s + d))
}

fn polya(trials: u64, rng: &mut RngHandle) -> Result<Vec<CheckResult>> {
    let fair = polya_fractions(1, 1, POLYA_DRAWS, trials, rng)?;
    let skew = polya_fractions(3, 7, POLYA_DRAWS, trials, rng)?;
    let beta_var = 0.3 * 0.7 / 11.0;
    Ok(vec![
        CheckResult::within(
            "urn(1,1) mean red fraction",
            fair.mean(),
            0.5,
            fair.std_error(),
        ),
        CheckResult::within(
            "urn(3,7) mean red fraction",
            skew.mean(),
            0.3,
            skew.std_error(),
        ),
        CheckResult::within(
            "urn(3,7) red fraction variance vs Beta(3,7)",
            skew.variance(),
            beta_var,
            skew.variance_std_error(),
        ),
        CheckResult::within(
            "urn(3,7) red fraction variance vs finite-draw value",
            skew.variance(),
            polya_finite_variance(3, 7, POLYA_DRAWS),
            skew.variance_std_error(),
        )
        .informational(),
    ])
}

fn tails(trials: u64, rng: &mut RngHandle) -> Result<Vec<CheckResult>> {
    let l = CAMOUFLAGE_SEED_SIZE;
    let mut checks = Vec::new();
    let ts = CAMOUFLAGE_TAIL_TS
        .into_iter()
        .chain([camouflage_mean_lower_bound::<f64>(l)]);
    for t in ts {
        let tail = mcdiarmid_tail_check(l, t, trials, rng)?;
        checks.push(CheckResult::from_tail(
            format!("P(G[{l}] <= l/384 - {t}) <= exp(-t^2/2l)"),
            &tail,
        ));
    }
    for k in DEEP_TAIL_KS {
        let n = DEEP_TAIL_N;
        let tail = deep_tail_check(n, k, trials, rng)?;
        checks.push(CheckResult::from_tail(
            format!("P(M[{k},{n}] <= n/3k) <= k exp(-n/32k^2)"),
            &tail,
        ));
    }
    Ok(checks)
}

fn collision(trials: u64, rng: &mut RngHandle) -> Result<Vec<CheckResult>> {
    let l = COLLISION_SEED_SIZE;
    let exact = path_collision_probability::<f64>(l)?;
    let freq = event_frequency(&SeedSpec::Path { size: l }, 2 * l, trials, rng, |t| {
        path_seed_at_extreme(t, l)
    })?;
    let star_exact = double_star_probability::<f64>(l)?;
    let star_freq = event_frequency(&SeedSpec::Star { size: l }, 2 * l, trials, rng, |t| {
        star_seed_doubled(t, l)
    })?;
    Ok(vec![
        CheckResult::within(
            format!("P(path seed P_{l} at an end of a {}-path)", 2 * l),
            freq,
            exact,
            proportion_std_error(exact, trials),
        ),
        CheckResult::within(
            format!("P(star seed E_{l} doubled at time {})", 2 * l),
            star_freq,
            star_exact,
            proportion_std_error(star_exact, trials),
        )
        .informational(),
    ])
}
