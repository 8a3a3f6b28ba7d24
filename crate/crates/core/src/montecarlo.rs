//! Monte-Carlo estimate of a fusion rule's detection and false-alarm rates.
//!
//! Random stream: xoshiro256++ seeded from a `u64` through SplitMix64. Each
//! draw is `u = (next_u64() >> 11) * 2^-53` and sensor `i` fires iff
//! `u < p_i`. All `trials` cycles under `H_1` are drawn first, then all cycles
//! under `H_0`; within a cycle sensors draw in order `0..N`.

use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{invalid, Result};
use crate::sensor::{CountFusionRule, FusionRule, SensorProfile};

pub const DEFAULT_TRIALS: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    /// Sensing cycles per hypothesis.
    pub trials: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(trials: u64, seed: u64) -> Result<Self> {
        if trials == 0 {
            return invalid("at least one trial is required");
        }
        Ok(Self { trials, seed })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    pub pd_hat: f64,
    pub pf_hat: f64,
    pub trials: u64,
    pub stderr_pd: f64,
    pub stderr_pf: f64,
    /// Cycles under `H_1` where the fused decision was `H_1`.
    pub detections: u64,
    /// Cycles under `H_0` where the fused decision was `H_1`.
    pub false_alarms: u64,
}

impl SimResult {
    fn from_tallies(detections: u64, false_alarms: u64, trials: u64) -> Self {
        let rate = |hits: u64| hits as f64 / trials as f64;
        let stderr = |p: f64| (p * (1.0 - p) / trials as f64).sqrt();
        let (pd_hat, pf_hat) = (rate(detections), rate(false_alarms));
        Self {
            pd_hat,
            pf_hat,
            trials,
            stderr_pd: stderr(pd_hat),
            stderr_pf: stderr(pf_hat),
            detections,
            false_alarms,
        }
    }
}

struct Stream(Xoshiro256PlusPlus);

impl Stream {
    fn new(seed: u64) -> Self {
        Self(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    fn fires(&mut self, p: f64) -> bool {
        let u = (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        u < p
    }
}

/// Tallies fused `H_1` decisions under each hypothesis. `cycle` draws one
/// sensing cycle from the stream and returns the fused decision.
fn run<F>(profile: &SensorProfile, config: &SimConfig, mut cycle: F) -> SimResult
where
    F: FnMut(&mut Stream, &[f64]) -> bool,
{
    let mut stream = Stream::new(config.seed);
    let mut tally = |probs: &[f64]| {
        (0..config.trials)
            .filter(|_| cycle(&mut stream, probs))
            .count() as u64
    };
    let detections = tally(profile.pd());
    let false_alarms = tally(profile.pf());
    SimResult::from_tallies(detections, false_alarms, config.trials)
}

/// Simulates a general rule: the sensors' reports form the decision index.
pub fn simulate(profile: &SensorProfile, rule: &FusionRule, config: &SimConfig) -> Result<SimResult> {
    let m_count = profile.decision_count()?;
    if rule.len() != m_count {
        return invalid(format!(
            "rule has {} entries but {} sensors need {m_count}",
            rule.len(),
            profile.len()
        ));
    }
    Ok(run(profile, config, |stream, probs| {
        let m = probs
            .iter()
            .enumerate()
            .fold(0usize, |m, (i, &p)| if stream.fires(p) { m | 1 << i } else { m });
        rule.get(m)
    }))
}

/// Simulates a count rule by tallying votes directly. Consumes the stream
/// exactly as [`simulate`] does, so both agree on the expanded rule.
pub fn simulate_count(
    profile: &SensorProfile,
    rule: &CountFusionRule,
    config: &SimConfig,
) -> Result<SimResult> {
    if rule.len() != profile.len() + 1 {
        return invalid(format!(
            "count rule has {} entries but {} sensors need {}",
            rule.len(),
            profile.len(),
            profile.len() + 1
        ));
    }
    Ok(run(profile, config, |stream, probs| {
        let votes = probs.iter().filter(|&&p| stream.fires(p)).count();
        rule.get(votes)
    }))
}
