//! Seeded Monte-Carlo runs of the truncated process.
//!
//! Trial `t` draws from its own ChaCha8 stream (`seed`, stream `t`), so a
//! trial's outcome depends only on `(seed, t)` and never on which worker ran
//! it or in what order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{Ball, ChainPrefix};
use crate::enumerate::Engine;
use crate::error::{Error, Result};
use crate::event::{EventSpec, Predicate};
use crate::par;
use crate::rational::{self, Rational};
use crate::target::TargetSet;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x005E_ED0F_60D5;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub chain: ChainPrefix,
    pub trials: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetSet>,
}

impl SimulationConfig {
    pub fn new(chain: ChainPrefix, trials: u64, seed: u64) -> Result<Self> {
        let cfg = Self { chain, trials, seed, target: None };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_target(mut self, target: TargetSet) -> Self {
        self.target = Some(target);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.chain.is_empty() {
            return Err(Error::Config("cannot simulate an empty chain".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallCount {
    pub ball: Ball,
    pub count: u64,
}

/// Empirical outcome of a simulation. Frequencies are sampled, not exact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    /// Final-ball counts, by ball label.
    pub counts: Vec<BallCount>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub in_target: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_frequency: Option<f64>,
}

impl SimulationReport {
    pub fn frequency(&self, ball: Ball) -> Option<f64> {
        self.counts
            .iter()
            .find(|c| c.ball == ball)
            .map(|c| c.count as f64 / self.trials as f64)
    }

    /// Pearson statistic against the uniform law on the `n` balls.
    pub fn chi_square_uniform(&self) -> f64 {
        let expected = self.trials as f64 / self.n as f64;
        self.counts
            .iter()
            .map(|c| {
                let d = c.count as f64 - expected;
                d * d / expected
            })
            .sum()
    }
}

fn trial_rng(base: &ChaCha8Rng, trial: u64) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(trial);
    rng.set_word_pos(0);
    rng
}

/// One trial: gods `n-1, …, 1` each take a uniformly chosen ball.
/// Returns the index (into `balls`) of the survivor.
fn run_trial(rng: &mut ChaCha8Rng, urn: &mut Vec<usize>, n: usize) -> usize {
    urn.clear();
    urn.extend(0..n);
    for god in (1..n).rev() {
        // god `god` finds god + 1 balls
        let pick = rng.random_range(0..=god);
        urn.swap_remove(pick);
    }
    urn[0]
}

pub fn simulate(config: &SimulationConfig) -> Result<SimulationReport> {
    simulate_with_workers(config, par::default_workers())
}

pub fn simulate_with_workers(config: &SimulationConfig, workers: usize) -> Result<SimulationReport> {
    config.validate()?;
    let n = config.chain.len();
    let mut balls = config.chain.added().to_vec();
    balls.sort_unstable();
    let base = ChaCha8Rng::seed_from_u64(config.seed);

    let counts = par::map_blocks(config.trials, workers, |trials| {
        let mut counts = vec![0u64; n];
        let mut urn = Vec::with_capacity(n);
        for t in trials {
            let mut rng = trial_rng(&base, t);
            counts[run_trial(&mut rng, &mut urn, n)] += 1;
        }
        counts
    })
    .into_iter()
    .fold(vec![0u64; n], |mut acc, block| {
        acc.iter_mut().zip(block).for_each(|(a, b)| *a += b);
        acc
    });

    let in_target = config.target.as_ref().map(|t| {
        balls.iter().zip(&counts).filter(|(b, _)| t.member(**b)).map(|(_, c)| *c).sum::<u64>()
    });
    Ok(SimulationReport {
        n,
        trials: config.trials,
        seed: config.seed,
        counts: balls.iter().zip(&counts).map(|(&ball, &count)| BallCount { ball, count }).collect(),
        target: config.target.clone(),
        in_target,
        target_frequency: in_target.map(|c| c as f64 / config.trials as f64),
    })
}

/// Binomial standard deviation of a frequency over `trials` draws.
pub fn binomial_sigma(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckRow {
    pub ball: Ball,
    #[serde(with = "rational::serde_str")]
    pub exact: Rational,
    pub sampled: f64,
    pub deviation: f64,
    /// Four binomial standard deviations at the exact probability.
    pub bound: f64,
    pub pass: bool,
}

/// Monte-Carlo final-ball frequencies against exact enumeration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crosscheck {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub rows: Vec<CrosscheckRow>,
    pub max_deviation: f64,
    pub pass: bool,
}

pub fn crosscheck(chain: &ChainPrefix, n: usize, trials: u64, seed: u64) -> Result<Crosscheck> {
    crosscheck_with(chain, n, trials, seed, Engine::default())
}

pub fn crosscheck_with(chain: &ChainPrefix, n: usize, trials: u64, seed: u64, engine: Engine) -> Result<Crosscheck> {
    if n > engine.cap {
        return Err(Error::Capacity { n, cap: engine.cap });
    }
    let zn = chain.truncate(n)?;
    let report = simulate_with_workers(&SimulationConfig::new(zn.clone(), trials, seed)?, engine.workers)?;
    let mut rows = Vec::with_capacity(n);
    for bc in &report.counts {
        let event = EventSpec::tight(1, Predicate::final_is(bc.ball))?;
        let exact = engine.density(&zn, &event, n)?.value;
        let p = rational::to_f64(&exact);
        let sampled = bc.count as f64 / trials as f64;
        let deviation = (sampled - p).abs();
        let bound = 4.0 * binomial_sigma(p, trials);
        rows.push(CrosscheckRow { ball: bc.ball, exact, sampled, deviation, bound, pass: deviation <= bound });
    }
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let pass = rows.iter().all(|r| r.pass);
    Ok(Crosscheck { n, trials, seed, rows, max_deviation, pass })
}
