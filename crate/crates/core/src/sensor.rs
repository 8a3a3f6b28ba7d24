//! Sensor bank model and per-decision-vector quantities.
//!
//! A bank of `N` conditionally independent binary sensors produces one of
//! `M = 2^N` decision vectors per sensing cycle. A vector is identified by its
//! integer index `m`, where bit `i` of `m` is the report of sensor `i`
//! (sensor 0 is the least significant bit). Profiles are stored in natural
//! sensor order, so `pd()[i]` and `pf()[i]` belong to the sensor behind bit `i`.

use crate::error::{invalid, too_large, Result};

/// Largest bank size for which the `2^N` decision vectors are enumerated.
pub const MAX_SENSORS: usize = 20;

fn check_probability(name: &str, p: f64) -> Result<()> {
    if p.is_finite() && (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        invalid(format!("{name} = {p} is not a probability in [0, 1]"))
    }
}

/// Per-sensor detection and false-alarm probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorProfile {
    pd: Vec<f64>,
    pf: Vec<f64>,
}

impl SensorProfile {
    pub fn new(pd: Vec<f64>, pf: Vec<f64>) -> Result<Self> {
        if pd.is_empty() {
            return invalid("a sensor profile needs at least one sensor");
        }
        if pd.len() != pf.len() {
            return invalid(format!(
                "pd has {} entries but pf has {}",
                pd.len(),
                pf.len()
            ));
        }
        for (i, (&d, &f)) in pd.iter().zip(&pf).enumerate() {
            check_probability(&format!("pd[{i}]"), d)?;
            check_probability(&format!("pf[{i}]"), f)?;
        }
        Ok(Self { pd, pf })
    }

    /// Builds a profile from lists written most-significant sensor first,
    /// `[p_{N-1}, ..., p_0]`, the order in which decision vectors are usually
    /// printed.
    pub fn from_msb_first(mut pd: Vec<f64>, mut pf: Vec<f64>) -> Result<Self> {
        pd.reverse();
        pf.reverse();
        Self::new(pd, pf)
    }

    /// `n` identical sensors operating at `(pd, pf)`.
    pub fn homogeneous(n: usize, pd: f64, pf: f64) -> Result<Self> {
        Self::new(vec![pd; n], vec![pf; n])
    }

    pub fn len(&self) -> usize {
        self.pd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pd.is_empty()
    }

    pub fn pd(&self) -> &[f64] {
        &self.pd
    }

    pub fn pf(&self) -> &[f64] {
        &self.pf
    }

    /// The common operating point when every sensor shares the same `(pd, pf)`.
    pub fn homogeneous_point(&self) -> Option<(f64, f64)> {
        let (d0, f0) = (self.pd[0], self.pf[0]);
        let same = self.pd.iter().all(|&d| d == d0) && self.pf.iter().all(|&f| f == f0);
        same.then_some((d0, f0))
    }

    /// Number of distinct decision vectors, `2^N`. Fails above [`MAX_SENSORS`].
    pub fn decision_count(&self) -> Result<usize> {
        check_enumerable(self.len())?;
        Ok(1usize << self.len())
    }
}

pub(crate) fn check_enumerable(n: usize) -> Result<()> {
    if n > MAX_SENSORS {
        too_large(format!(
            "{n} sensors exceeds the enumeration cap of {MAX_SENSORS}"
        ))
    } else {
        Ok(())
    }
}

/// Objective coefficients and false-alarm cap of one fusion problem:
/// maximize `cd * P_D - cf * P_F` subject to `P_F <= alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSpec {
    pub cd: f64,
    pub cf: f64,
    pub alpha: f64,
}

impl ProblemSpec {
    pub fn new(cd: f64, cf: f64, alpha: f64) -> Result<Self> {
        let spec = Self { cd, cf, alpha };
        spec.validate()?;
        Ok(spec)
    }

    /// Maximize detection probability under a false-alarm cap.
    pub fn neyman_pearson(alpha: f64) -> Result<Self> {
        Self::new(1.0, 0.0, alpha)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cd.is_finite() && self.cd >= 0.0) {
            return invalid(format!("cd = {} must be a nonnegative real", self.cd));
        }
        if !(self.cf.is_finite() && self.cf >= 0.0) {
            return invalid(format!("cf = {} must be a nonnegative real", self.cf));
        }
        check_probability("alpha", self.alpha)
    }
}

/// Priors and decision costs of the Bayesian criterion. `cij` is the cost of
/// deciding `H_i` when `H_j` is true.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BayesParams {
    pub p0: f64,
    pub p1: f64,
    pub c00: f64,
    pub c01: f64,
    pub c10: f64,
    pub c11: f64,
}

impl BayesParams {
    pub fn new(p1: f64, c00: f64, c01: f64, c10: f64, c11: f64) -> Result<Self> {
        let params = Self {
            p0: 1.0 - p1,
            p1,
            c00,
            c01,
            c10,
            c11,
        };
        params.validate()?;
        Ok(params)
    }

    /// Minimum probability of error: unit cost for each wrong decision.
    pub fn min_error(p1: f64) -> Result<Self> {
        Self::new(p1, 0.0, 1.0, 1.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("p0", self.p0)?;
        check_probability("p1", self.p1)?;
        if (self.p0 + self.p1 - 1.0).abs() > 1e-12 {
            return invalid(format!(
                "priors p0 = {} and p1 = {} do not sum to 1",
                self.p0, self.p1
            ));
        }
        for (name, c) in [
            ("c00", self.c00),
            ("c01", self.c01),
            ("c10", self.c10),
            ("c11", self.c11),
        ] {
            if !(c.is_finite() && c >= 0.0) {
                return invalid(format!("{name} = {c} must be a nonnegative real"));
            }
        }
        if self.c01 < self.c11 {
            return invalid("c01 must be at least c11");
        }
        if self.c10 < self.c00 {
            return invalid("c10 must be at least c00");
        }
        Ok(())
    }

    /// `(cd, cf) = (p1 (c01 - c11), p0 (c10 - c00))`.
    pub fn coefficients(&self) -> (f64, f64) {
        (
            self.p1 * (self.c01 - self.c11),
            self.p0 * (self.c10 - self.c00),
        )
    }

    /// The equivalent unconstrained problem.
    pub fn problem_spec(&self) -> ProblemSpec {
        let (cd, cf) = self.coefficients();
        ProblemSpec {
            cd,
            cf,
            alpha: 1.0,
        }
    }
}

/// Deterministic fusion rule over all `2^N` decision vectors: `x[m]` is the
/// fused decision when vector `m` is received.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FusionRule(Vec<bool>);

impl FusionRule {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn constant(len: usize, value: bool) -> Self {
        Self(vec![value; len])
    }

    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut bits = vec![false; len];
        for &m in indices {
            bits[m] = true;
        }
        Self(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, m: usize) -> bool {
        self.0[m]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn selected_indices(&self) -> Vec<usize> {
        selected(&self.0)
    }

    /// Hexadecimal mask with bit `m` set iff `x[m] = 1`, most significant
    /// nibble first.
    pub fn to_hex(&self) -> String {
        let digits = self.0.len().div_ceil(4).max(1);
        let mut out = String::with_capacity(digits + 2);
        out.push_str("0x");
        for d in (0..digits).rev() {
            let nibble = (0..4)
                .filter(|&b| self.0.get(4 * d + b).copied().unwrap_or(false))
                .fold(0u32, |acc, b| acc | (1 << b));
            out.push(char::from_digit(nibble, 16).unwrap());
        }
        out
    }
}

/// Fusion rule that depends only on the vote count: `y[k]` is the fused
/// decision when exactly `k` sensors report `H_1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CountFusionRule(Vec<bool>);

impl CountFusionRule {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// The K-out-of-N rule: fire when at least `k` of `n` sensors fire.
    pub fn at_least(n: usize, k: usize) -> Self {
        Self((0..=n).map(|c| c >= k).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, k: usize) -> bool {
        self.0[k]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn selected_counts(&self) -> Vec<usize> {
        selected(&self.0)
    }
}

fn selected(bits: &[bool]) -> Vec<usize> {
    bits.iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i))
        .collect()
}

/// Number of sensors reporting `H_1` in decision vector `m` of an `n`-sensor bank.
pub fn vote_count(m: usize, n: usize) -> Result<usize> {
    if n >= usize::BITS as usize || m >> n != 0 {
        return invalid(format!("decision index {m} is out of range for {n} sensors"));
    }
    Ok(m.count_ones() as usize)
}

/// Probability of decision vector `m` when sensor `i` fires with probability `p[i]`.
///
/// # Panics
///
/// If `m` has bits set at or above `p.len()`.
pub fn joint_prob(p: &[f64], m: usize) -> f64 {
    assert!(
        p.len() >= usize::BITS as usize || m >> p.len() == 0,
        "decision index {m} is out of range for {} sensors",
        p.len()
    );
    p.iter()
        .enumerate()
        .map(|(i, &pi)| if (m >> i) & 1 == 1 { pi } else { 1.0 - pi })
        .product()
}

/// `joint_prob(p, m)` for every `m`, built by doubling one sensor at a time.
/// Factors are multiplied in the same order as [`joint_prob`], so entries
/// agree with it exactly.
pub fn joint_table(p: &[f64]) -> Result<Vec<f64>> {
    check_enumerable(p.len())?;
    let mut table = Vec::with_capacity(1 << p.len());
    table.push(1.0);
    for &pi in p {
        let half = table.len();
        table.extend_from_within(..);
        for m in 0..half {
            table[m] *= 1.0 - pi;
            table[m + half] *= pi;
        }
    }
    Ok(table)
}

/// Per-index objective contribution `cd * g(pd, m) - cf * g(pf, m)`.
pub fn item_value(profile: &SensorProfile, spec: &ProblemSpec, m: usize) -> f64 {
    spec.cd * joint_prob(profile.pd(), m) - spec.cf * joint_prob(profile.pf(), m)
}

/// Per-index false-alarm contribution `g(pf, m)`.
pub fn item_weight(profile: &SensorProfile, m: usize) -> f64 {
    joint_prob(profile.pf(), m)
}

/// [`item_value`] for every decision index.
pub fn item_values(profile: &SensorProfile, spec: &ProblemSpec) -> Result<Vec<f64>> {
    let gd = joint_table(profile.pd())?;
    let gf = joint_table(profile.pf())?;
    Ok(gd
        .iter()
        .zip(&gf)
        .map(|(d, f)| spec.cd * d - spec.cf * f)
        .collect())
}

/// [`item_weight`] for every decision index.
pub fn item_weights(profile: &SensorProfile) -> Result<Vec<f64>> {
    joint_table(profile.pf())
}

/// System `(P_D, P_F)` of a general fusion rule.
pub fn rule_performance(profile: &SensorProfile, rule: &FusionRule) -> Result<(f64, f64)> {
    let m_count = profile.decision_count()?;
    if rule.len() != m_count {
        return invalid(format!(
            "rule has {} entries but {} sensors need {m_count}",
            rule.len(),
            profile.len()
        ));
    }
    let gd = joint_table(profile.pd())?;
    let gf = joint_table(profile.pf())?;
    let pd = compensated_sum(rule.bits().iter().zip(&gd).filter(|(x, _)| **x).map(|(_, g)| *g));
    let pf = compensated_sum(rule.bits().iter().zip(&gf).filter(|(x, _)| **x).map(|(_, g)| *g));
    Ok((pd, pf))
}

/// Per-vote-count aggregates of the per-index quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct CountAggregates {
    /// Summed objective contribution of all vectors with `k` votes.
    pub rk: Vec<f64>,
    /// Probability of `k` votes under `H_1`.
    pub pdk: Vec<f64>,
    /// Probability of `k` votes under `H_0`.
    pub pfk: Vec<f64>,
}

/// Aggregates per vote count. The count distributions are computed directly
/// (Poisson-binomial recursion), without enumerating the `2^N` vectors.
pub fn count_aggregates(profile: &SensorProfile, spec: &ProblemSpec) -> CountAggregates {
    let pdk = count_distribution(profile.pd());
    let pfk = count_distribution(profile.pf());
    let rk = pdk
        .iter()
        .zip(&pfk)
        .map(|(d, f)| spec.cd * d - spec.cf * f)
        .collect();
    CountAggregates { rk, pdk, pfk }
}

/// Distribution of the number of firing sensors, `Pr{cnt = k}` for `k = 0..=N`.
pub fn count_distribution(p: &[f64]) -> Vec<f64> {
    let mut dist = vec![0.0; p.len() + 1];
    dist[0] = 1.0;
    for (i, &pi) in p.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            dist[k] = dist[k] * (1.0 - pi) + dist[k - 1] * pi;
        }
        dist[0] *= 1.0 - pi;
    }
    dist
}

/// The general rule equivalent to a count rule: `x[m] = y[cnt(m)]`.
pub fn expand_count_rule(y: &CountFusionRule, n: usize) -> Result<FusionRule> {
    if y.len() != n + 1 {
        return invalid(format!(
            "count rule has {} entries but {n} sensors need {}",
            y.len(),
            n + 1
        ));
    }
    check_enumerable(n)?;
    Ok(FusionRule(
        (0..1usize << n)
            .map(|m| y.get(m.count_ones() as usize))
            .collect(),
    ))
}

/// Neumaier-compensated summation.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}
