//! Verification scenarios, one per theorem id, each combining positive
//! property checks with the matching counterexamples.

mod centers;
pub use centers::{planted_instances, planted_pair, reference_representations, DISPERSION_TOL};
mod geometry;

use serde::Serialize;
use serde_json::Value;

use crate::circumcenter::SolverOptions;
use crate::error::{Error, Result};
use crate::matrix::{child_rng, FinslerRng};
use crate::report::{to_value, ReportEnvelope};

pub const SCENARIO_IDS: [&str; 17] = [
    "p2.1", "t2.2", "t3.1", "t3.2", "p3.3", "p3.4", "p3.5", "c3.6", "p3.8", "t3.9", "l4.2", "t4.7", "t4.10", "t4.12", "t4.13", "t5.2", "t5.4",
];

/// Options shared by all scenarios. `None` selects the scenario's own default
/// sweep over dimensions, exponents or trial counts.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyConfig {
    pub n: Option<usize>,
    pub p: Option<u32>,
    pub trials: Option<usize>,
    pub seed: u64,
    pub eps: f64,
    pub solver: SolverOptions,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { n: None, p: None, trials: None, seed: 0, eps: 0.1, solver: SolverOptions::default() }
    }
}

impl VerifyConfig {
    pub(crate) fn dims(&self, default: &[usize]) -> Vec<usize> {
        self.n.map_or_else(|| default.to_vec(), |n| vec![n])
    }

    pub(crate) fn exponents(&self, default: &[u32]) -> Vec<u32> {
        self.p.map_or_else(|| default.to_vec(), |p| vec![p])
    }

    pub(crate) fn trials_or(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }

    /// Independent stream for sub-test `k`.
    pub(crate) fn rng(&self, k: u64) -> FinslerRng {
        child_rng(self.seed, k)
    }

    pub(crate) fn stream_seed(&self, k: u64) -> u64 {
        self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(k)
    }
}

/// One named check inside a scenario.
#[derive(Clone, Debug, Serialize)]
pub struct SubTest {
    pub name: String,
    pub pass: bool,
    pub details: Value,
}

impl SubTest {
    pub fn new(name: impl Into<String>, pass: bool, details: impl Serialize) -> Self {
        Self { name: name.into(), pass, details: to_value(&details) }
    }
}

/// CSV artifact produced by a scenario.
#[derive(Clone, Debug)]
pub struct Dump {
    pub name: String,
    pub csv: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioOutcome {
    pub id: String,
    pub pass: bool,
    pub subtests: Vec<SubTest>,
    #[serde(skip)]
    pub dumps: Vec<Dump>,
}

impl ScenarioOutcome {
    pub fn subtest(&self, name: &str) -> Option<&SubTest> {
        self.subtests.iter().find(|s| s.name == name)
    }

    pub fn envelope(&self, cfg: &VerifyConfig) -> ReportEnvelope {
        ReportEnvelope::new(format!("verify:{}", self.id), cfg, cfg.seed, self, self.pass)
    }
}

pub(crate) type Parts = (Vec<SubTest>, Vec<Dump>);

pub fn run_verify(id: &str, cfg: &VerifyConfig) -> Result<ScenarioOutcome> {
    let (subtests, dumps) = match id {
        "p2.1" => geometry::norm_chain(cfg)?,
        "t2.2" => geometry::geodesics(cfg)?,
        "t3.1" => geometry::schatten_convexity(cfg)?,
        "t3.2" => geometry::operator_convexity(cfg)?,
        "p3.3" => geometry::eigenangles(cfg)?,
        "p3.4" => geometry::schatten_balls(cfg)?,
        "p3.5" => geometry::operator_balls(cfg)?,
        "c3.6" => geometry::numerical_range(cfg)?,
        "p3.8" => geometry::symmetry_geodesics(cfg)?,
        "t3.9" => geometry::strong_convexity(cfg)?,
        "l4.2" => centers::subspace_balls(cfg)?,
        "t4.7" => centers::schatten_centers(cfg)?,
        "t4.10" => centers::perturbed_operator_centers(cfg)?,
        "t4.12" => centers::perturbed_schatten_centers(cfg)?,
        "t4.13" => centers::fixed_points(cfg)?,
        "t5.2" => centers::rigidity(cfg)?,
        "t5.4" => centers::grassmann(cfg)?,
        other => return Err(Error::InvalidArgument(format!("unknown scenario '{other}'; expected one of {}", SCENARIO_IDS.join(", ")))),
    };
    let pass = !subtests.is_empty() && subtests.iter().all(|s| s.pass);
    Ok(ScenarioOutcome { id: id.to_string(), pass, subtests, dumps })
}

/// Running minimum with the index where it occurred.
#[derive(Clone, Copy, Debug, Serialize)]
pub(crate) struct Worst {
    pub value: f64,
    pub at: Option<usize>,
}

impl Worst {
    pub fn new() -> Self {
        Self { value: f64::INFINITY, at: None }
    }

    pub fn for_max() -> Self {
        Self { value: f64::NEG_INFINITY, at: None }
    }

    pub fn min(&mut self, x: f64, i: usize) {
        if x < self.value {
            self.value = x;
            self.at = Some(i);
        }
    }

    pub fn max(&mut self, x: f64, i: usize) {
        if x > self.value {
            self.value = x;
            self.at = Some(i);
        }
    }
}
