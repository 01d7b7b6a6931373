//! Batch verification driver behind the `whlab` binary.

pub mod report;
pub mod suites;

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fell::{fell_limit, DiscreteSet, FellOutcome};
use crate::io::SetSequenceJson;
use report::{Case, ConfigEcho, SuiteReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Moebius,
    Jordan,
    Fell,
    Toeplitz,
    Groupoid,
    Fibers,
    Homotopy,
    All,
}

impl Suite {
    pub const MEMBERS: [Suite; 7] = [
        Suite::Moebius,
        Suite::Jordan,
        Suite::Fell,
        Suite::Toeplitz,
        Suite::Groupoid,
        Suite::Fibers,
        Suite::Homotopy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Moebius => "moebius",
            Suite::Jordan => "jordan",
            Suite::Fell => "fell",
            Suite::Toeplitz => "toeplitz",
            Suite::Groupoid => "groupoid",
            Suite::Fibers => "fibers",
            Suite::Homotopy => "homotopy",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum ModelChoice {
    Halfline,
    Unitary,
    #[default]
    Both,
}

impl ModelChoice {
    fn name(self) -> &'static str {
        match self {
            Self::Halfline => "halfline",
            Self::Unitary => "unitary",
            Self::Both => "both",
        }
    }
}

pub const DEFAULT_TRIALS: usize = 50;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_N: usize = 32;
pub const DEFAULT_GRID_STEP: f64 = 0.25;

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub suite: Suite,
    /// A single dimension; `None` runs each suite's default range.
    pub dim: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub n: usize,
    pub grid_step: f64,
    pub model: ModelChoice,
}

impl SuiteConfig {
    pub fn new(suite: Suite) -> Self {
        Self {
            suite,
            dim: None,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            tol: DEFAULT_TOL,
            n: DEFAULT_N,
            grid_step: DEFAULT_GRID_STEP,
            model: ModelChoice::Both,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidInput("trials must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidInput("tol must be positive".into()));
        }
        if self.dim == Some(0) {
            return Err(Error::InvalidInput("dim must be at least 1".into()));
        }
        if self.n < 8 {
            return Err(Error::InvalidInput("N must be at least 8".into()));
        }
        if !(self.grid_step > 0.0 && self.grid_step <= 1.0) {
            return Err(Error::InvalidInput("grid step must lie in (0, 1]".into()));
        }
        Ok(())
    }

    /// The configured dimension, or the suite's own range.
    pub fn dim_range(&self, lo: usize, hi: usize) -> (usize, usize) {
        self.dim.map_or((lo, hi), |d| (d, d))
    }

    fn echo(&self) -> ConfigEcho {
        let dims = self.dim.map_or([0, 0], |d| [d, d]);
        ConfigEcho {
            dims,
            grid_step: self.grid_step,
            model: self.model.name().into(),
            n: self.n,
            seed: self.seed,
            tol: self.tol,
            trials: self.trials,
        }
    }
}

fn run_suite(suite: Suite, cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Vec<Case> {
    match suite {
        Suite::Moebius => suites::moebius(cfg, rng),
        Suite::Jordan => suites::jordan(cfg, rng),
        Suite::Fell => suites::fell(cfg, rng),
        Suite::Toeplitz => suites::toeplitz(cfg, rng),
        Suite::Groupoid => suites::groupoid(cfg, rng),
        Suite::Fibers => suites::fibers(cfg, rng),
        Suite::Homotopy => suites::homotopy(cfg, rng),
        Suite::All => Suite::MEMBERS
            .iter()
            .flat_map(|&s| {
                run_suite(s, cfg, rng).into_iter().map(move |mut c| {
                    c.name = format!("{}.{}", s.name(), c.name);
                    c
                })
            })
            .collect(),
    }
}

/// Runs the configured suite with one generator seeded from `cfg.seed`.
pub fn run(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let cases = run_suite(cfg.suite, cfg, &mut rng);
    Ok(SuiteReport::new(cfg.suite.name(), cfg.echo(), cases))
}

/// Summary of a Fell-limit computation for `whlab fell converge`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergeReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub liminf: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limsup: Option<Vec<Vec<f64>>>,
    pub status: String,
}

impl ConvergeReport {
    pub fn converged(&self) -> bool {
        self.limit.is_some()
    }
}

fn points(s: &DiscreteSet) -> Option<Vec<Vec<f64>>> {
    Some(s.points())
}

pub fn converge(seq: &SetSequenceJson) -> Result<ConvergeReport> {
    let models = seq.to_models()?;
    Ok(match fell_limit(&models)? {
        FellOutcome::Limit(l) => ConvergeReport {
            liminf: None,
            limit: points(&l),
            limsup: None,
            status: "converges".into(),
        },
        FellOutcome::Diverges { liminf, limsup } => ConvergeReport {
            liminf: points(&liminf),
            limit: None,
            limsup: points(&limsup),
            status: "diverges".into(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(suite: Suite) -> SuiteConfig {
        SuiteConfig {
            trials: 8,
            n: 12,
            ..SuiteConfig::new(suite)
        }
    }

    #[test]
    fn every_suite_passes_on_small_sizes() {
        for s in Suite::MEMBERS {
            let r = run(&small(s)).unwrap();
            let failed: Vec<_> = r.failures().map(|c| (&c.name, &c.details)).collect();
            assert!(failed.is_empty(), "{s}: {failed:?}");
            assert!(r.cases.iter().any(|c| c.name.starts_with("mutant_")), "{s} has no mutant");
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let cfg = small(Suite::Moebius);
        let a = report::to_json_bytes(&run(&cfg).unwrap()).unwrap();
        let b = report::to_json_bytes(&run(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad = [
            SuiteConfig { trials: 0, ..small(Suite::Jordan) },
            SuiteConfig { tol: 0.0, ..small(Suite::Jordan) },
            SuiteConfig { dim: Some(0), ..small(Suite::Jordan) },
        ];
        for cfg in bad {
            assert!(matches!(run(&cfg), Err(Error::InvalidInput(_))));
        }
    }

    #[test]
    fn homotopy_model_selection_skips_the_other() {
        let cfg = SuiteConfig {
            model: ModelChoice::Halfline,
            ..small(Suite::Homotopy)
        };
        let r = run(&cfg).unwrap();
        assert!(r.passed());
        assert!(r
            .cases
            .iter()
            .filter(|c| c.name.starts_with("unitary"))
            .all(|c| c.status == report::Status::Skipped));
    }
}
