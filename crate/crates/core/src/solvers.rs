//! Optimal fusion rules for the general problem and its special cases.
//!
//! The general problem maximizes `cd * P_D - cf * P_F` subject to
//! `P_F <= alpha` over deterministic rules. Each decision index is a knapsack
//! item whose value is its objective contribution and whose weight is its
//! false-alarm probability; the cap `alpha` is the knapsack limit.

use std::fmt;

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::knapsack::{solve_knapsack, KnapsackInstance};
use crate::sensor::{
    check_enumerable, compensated_sum, count_aggregates, expand_count_rule, joint_table,
    BayesParams, CountFusionRule, FusionRule, ProblemSpec, SensorProfile,
};

/// Default grid resolution for rules over all decision vectors.
pub const GDFP_SCALE: u64 = 100_000;
/// Default grid resolution for count-based rules.
pub const COUNT_SCALE: u64 = 1_000;

/// Slack allowed when comparing an achieved false-alarm sum against `alpha`.
const FEASIBILITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Gdfp,
    CountGdfp,
    Np,
    Bayes,
    HmBayes,
    KOutOfN,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Gdfp => "gdfp",
            Method::CountGdfp => "count_gdfp",
            Method::Np => "np",
            Method::Bayes => "bayes",
            Method::HmBayes => "hm_bayes",
            Method::KOutOfN => "k_out_of_n",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SelectedRule {
    General(FusionRule),
    Count(CountFusionRule),
}

impl SelectedRule {
    /// The rule over all decision vectors of an `n`-sensor bank.
    pub fn expand(&self, n: usize) -> Result<FusionRule> {
        match self {
            SelectedRule::General(x) => Ok(x.clone()),
            SelectedRule::Count(y) => expand_count_rule(y, n),
        }
    }
}

/// Outcome of one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub rule: SelectedRule,
    /// `cd * pd - cf * pf` at the returned rule.
    pub objective: f64,
    pub pd: f64,
    pub pf: f64,
    pub flops: u64,
    /// The integerized false-alarm sum fits the integerized cap.
    pub feasible_scaled: bool,
    /// The exact false-alarm probability respects `alpha`.
    pub feasible_true: bool,
    pub method: Method,
}

impl SolveReport {
    pub fn pm(&self) -> f64 {
        1.0 - self.pd
    }
}

fn selected_sum(selection: &[bool], terms: &[f64]) -> f64 {
    compensated_sum(
        selection
            .iter()
            .zip(terms)
            .filter(|(s, _)| **s)
            .map(|(_, &t)| t),
    )
}

fn solve_general(
    profile: &SensorProfile,
    spec: &ProblemSpec,
    scale: u64,
    method: Method,
) -> Result<SolveReport> {
    spec.validate()?;
    check_enumerable(profile.len())?;
    let gd = joint_table(profile.pd())?;
    let gf = joint_table(profile.pf())?;
    let values = gd
        .iter()
        .zip(&gf)
        .map(|(d, f)| spec.cd * d - spec.cf * f)
        .collect();
    let inst = KnapsackInstance::new(values, gf, spec.alpha, scale)?;
    let sol = solve_knapsack(&inst)?;
    let pd = selected_sum(&sol.selection, &gd);
    Ok(SolveReport {
        objective: sol.objective,
        pd,
        pf: sol.true_weight,
        flops: sol.flops,
        feasible_scaled: sol.scaled_weight <= sol.budget,
        feasible_true: sol.true_weight <= spec.alpha + FEASIBILITY_TOL,
        rule: SelectedRule::General(FusionRule::new(sol.selection)),
        method,
    })
}

/// Optimal rule over all `2^N` decision vectors, exact for the integerized
/// false-alarm weights at grid resolution `1 / scale`.
pub fn solve_gdfp(profile: &SensorProfile, spec: &ProblemSpec, scale: u64) -> Result<SolveReport> {
    solve_general(profile, spec, scale, Method::Gdfp)
}

/// Maximum detection probability subject to `P_F <= alpha`.
pub fn solve_np(profile: &SensorProfile, alpha: f64, scale: u64) -> Result<SolveReport> {
    solve_general(profile, &ProblemSpec::neyman_pearson(alpha)?, scale, Method::Np)
}

/// Bayes-optimal rule: with no false-alarm cap, fire exactly on the decision
/// vectors whose objective contribution is strictly positive. Costs one flop
/// per decision vector.
pub fn solve_bayes(profile: &SensorProfile, params: &BayesParams) -> Result<SolveReport> {
    params.validate()?;
    check_enumerable(profile.len())?;
    let spec = params.problem_spec();
    let gd = joint_table(profile.pd())?;
    let gf = joint_table(profile.pf())?;
    let values: Vec<f64> = gd
        .iter()
        .zip(&gf)
        .map(|(d, f)| spec.cd * d - spec.cf * f)
        .collect();
    let selection: Vec<bool> = values.iter().map(|&v| v > 0.0).collect();
    Ok(SolveReport {
        objective: selected_sum(&selection, &values),
        pd: selected_sum(&selection, &gd),
        pf: selected_sum(&selection, &gf),
        flops: values.len() as u64,
        feasible_scaled: true,
        feasible_true: true,
        rule: SelectedRule::General(FusionRule::new(selection)),
        method: Method::Bayes,
    })
}

/// Optimal rule among those that depend only on the vote count. The knapsack
/// has `N + 1` items, one per count.
pub fn solve_count_gdfp(
    profile: &SensorProfile,
    spec: &ProblemSpec,
    scale: u64,
) -> Result<SolveReport> {
    spec.validate()?;
    check_enumerable(profile.len())?;
    let agg = count_aggregates(profile, spec);
    let inst = KnapsackInstance::new(agg.rk, agg.pfk, spec.alpha, scale)?;
    let sol = solve_knapsack(&inst)?;
    Ok(SolveReport {
        objective: sol.objective,
        pd: selected_sum(&sol.selection, &agg.pdk),
        pf: sol.true_weight,
        flops: sol.flops,
        feasible_scaled: sol.scaled_weight <= sol.budget,
        feasible_true: sol.true_weight <= spec.alpha + FEASIBILITY_TOL,
        rule: SelectedRule::Count(CountFusionRule::new(sol.selection)),
        method: Method::CountGdfp,
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check_operating_point(pd: f64, pf: f64, n: usize) -> Result<()> {
    if n == 0 {
        return invalid("at least one sensor is required");
    }
    check_enumerable(n)?;
    for (name, p) in [("pd", pd), ("pf", pf)] {
        if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
            return invalid(format!("{name} = {p} is not a probability in [0, 1]"));
        }
    }
    Ok(())
}

/// `Pr{k of n identical sensors fire}` when each fires with probability `p`.
fn binomial_pmf(p: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|k| binomial(n, k) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32))
        .collect()
}

/// Per-count objective for `n` identical sensors:
/// `R_K(k) = C(n, k) * (cd pd^k (1-pd)^(n-k) - cf pf^k (1-pf)^(n-k))`.
pub fn homogeneous_count_values(pd: f64, pf: f64, n: usize, cd: f64, cf: f64) -> Vec<f64> {
    (0..=n)
        .map(|k| {
            let (k_i, rest) = (k as i32, (n - k) as i32);
            let per_vector = cd * pd.powi(k_i) * (1.0 - pd).powi(rest)
                - cf * pf.powi(k_i) * (1.0 - pf).powi(rest);
            binomial(n, k) * per_vector
        })
        .collect()
}

/// Bayes-optimal rule for `n` identical sensors. Every decision vector with
/// the same vote count shares one objective contribution, so the rule is a
/// count rule found with one flop per count.
pub fn solve_hm_bayes(pd: f64, pf: f64, n: usize, params: &BayesParams) -> Result<SolveReport> {
    check_operating_point(pd, pf, n)?;
    params.validate()?;
    let (cd, cf) = params.coefficients();
    let rk = homogeneous_count_values(pd, pf, n, cd, cf);
    let y: Vec<bool> = rk.iter().map(|&r| r > 0.0).collect();
    let (pdk, pfk) = (binomial_pmf(pd, n), binomial_pmf(pf, n));
    Ok(SolveReport {
        objective: selected_sum(&y, &rk),
        pd: selected_sum(&y, &pdk),
        pf: selected_sum(&y, &pfk),
        flops: (n + 1) as u64,
        feasible_scaled: true,
        feasible_true: true,
        rule: SelectedRule::Count(CountFusionRule::new(y)),
        method: Method::HmBayes,
    })
}

/// Smallest vote count at which equal-prior, unit-cost Bayesian fusion of `n`
/// identical sensors declares `H_1`: `ceil(n / (1 + beta))` with
/// `beta = ln(pf / pd) / ln((1 - pd) / (1 - pf))`. Requires `0 < pf < pd < 1`.
pub fn k_star(pd: f64, pf: f64, n: usize) -> Result<usize> {
    check_operating_point(pd, pf, n)?;
    if !(0.0 < pf && pf < pd && pd < 1.0) {
        return invalid(format!(
            "closed-form threshold needs 0 < pf < pd < 1, got pd = {pd}, pf = {pf}"
        ));
    }
    let beta = (pf / pd).ln() / ((1.0 - pd) / (1.0 - pf)).ln();
    let k = (n as f64 / (1.0 + beta)).ceil() as usize;
    Ok(k.clamp(1, n))
}

/// The K-out-of-N rule at the closed-form threshold [`k_star`]. The report's
/// objective uses equal priors and unit error costs; no table is built, so no
/// flops are charged.
pub fn solve_k_out_of_n(pd: f64, pf: f64, n: usize) -> Result<SolveReport> {
    let k = k_star(pd, pf, n)?;
    let y = CountFusionRule::at_least(n, k);
    let (pdk, pfk) = (binomial_pmf(pd, n), binomial_pmf(pf, n));
    let (sys_pd, sys_pf) = (selected_sum(y.bits(), &pdk), selected_sum(y.bits(), &pfk));
    Ok(SolveReport {
        objective: 0.5 * sys_pd - 0.5 * sys_pf,
        pd: sys_pd,
        pf: sys_pf,
        flops: 0,
        feasible_scaled: true,
        feasible_true: true,
        rule: SelectedRule::Count(y),
        method: Method::KOutOfN,
    })
}

/// One point of an operating-characteristic sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    /// Requested false-alarm cap.
    pub alpha: f64,
    /// Achieved false-alarm probability.
    pub pf_star: f64,
    /// Achieved miss probability `1 - P_D`.
    pub pm_star: f64,
    pub flops: u64,
}

/// Solves the Neyman-Pearson problem at every `alpha`, over general rules or
/// over count rules. Points come back in the order of `alphas`.
pub fn roc_sweep(
    profile: &SensorProfile,
    alphas: &[f64],
    scale: u64,
    use_count_rule: bool,
) -> Result<Vec<RocPoint>> {
    alphas
        .par_iter()
        .map(|&alpha| {
            let report = if use_count_rule {
                solve_count_gdfp(profile, &ProblemSpec::neyman_pearson(alpha)?, scale)?
            } else {
                solve_np(profile, alpha, scale)?
            };
            Ok(RocPoint {
                alpha,
                pf_star: report.pf,
                pm_star: report.pm(),
                flops: report.flops,
            })
        })
        .collect()
}

/// `start, start + step, ...` up to `stop` inclusive, rounded to 12 decimals.
pub fn alpha_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0) {
        return invalid(format!("alpha step {step} must be positive"));
    }
    for (name, a) in [("start", start), ("stop", stop)] {
        if !(a.is_finite() && (0.0..=1.0).contains(&a)) {
            return invalid(format!("alpha {name} {a} is not in [0, 1]"));
        }
    }
    if stop < start {
        return invalid(format!("empty alpha range {start}..{stop}"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}
