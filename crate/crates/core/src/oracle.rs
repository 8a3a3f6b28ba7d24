//! Exhaustive search over every fusion rule of small banks.
//!
//! Used as ground truth for the DP solvers. Rules are enumerated as integers
//! in ascending order (bit `m` of the integer is `x[m]`); the first rule seen
//! wins ties on objective and false-alarm probability.

use crate::error::{too_large, Result};
use crate::knapsack::KnapsackInstance;
use crate::sensor::{
    item_values, item_weights, joint_table, CountFusionRule, FusionRule, ProblemSpec,
    SensorProfile,
};
use crate::solvers::SelectedRule;

/// General-rule enumeration visits `2^(2^N)` rules.
pub const MAX_ORACLE_SENSORS: usize = 4;
/// Count-rule enumeration visits `2^(N+1)` rules.
pub const MAX_COUNT_ORACLE_SENSORS: usize = 14;

const FEASIBILITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub best_rule: SelectedRule,
    pub objective: f64,
    pub pd: f64,
    pub pf: f64,
    pub n_evaluated: u64,
}

struct Items {
    values: Vec<f64>,
    detect: Vec<f64>,
    false_alarm: Vec<f64>,
}

/// Returns the winning mask, its objective, pd and pf.
fn enumerate(items: &Items, spec: &ProblemSpec, quantized: bool, scale: u64) -> Result<(u64, f64, f64, f64)> {
    let len = items.values.len();
    // Same integer grid and budget as the DP.
    let grid = KnapsackInstance::new(items.values.clone(), items.false_alarm.clone(), spec.alpha, scale)?;
    let scaled = grid.scaled_weights()?;
    let budget = grid.budget()?;

    let mut best: Option<(u64, f64, f64)> = None;
    for mask in 0u64..1 << len {
        let members = || (0..len).filter(move |i| mask >> i & 1 == 1);
        let pf: f64 = members().map(|i| items.false_alarm[i]).sum();
        let feasible = if quantized {
            members().map(|i| scaled[i]).sum::<u64>() <= budget
        } else {
            pf <= spec.alpha + FEASIBILITY_TOL
        };
        if !feasible {
            continue;
        }
        let objective: f64 = members().map(|i| items.values[i]).sum();
        let better = match best {
            None => true,
            Some((_, obj, best_pf)) => objective > obj || (objective == obj && pf < best_pf),
        };
        if better {
            best = Some((mask, objective, pf));
        }
    }
    // The empty rule is always feasible.
    let (mask, objective, pf) = best.expect("the empty rule is feasible");
    let pd = (0..len)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| items.detect[i])
        .sum();
    Ok((mask, objective, pd, pf))
}

fn mask_bits(mask: u64, len: usize) -> Vec<bool> {
    (0..len).map(|i| mask >> i & 1 == 1).collect()
}

/// Best general rule by enumerating all `2^(2^N)` candidates. Feasibility uses
/// exact false-alarm sums, or the same integerized weights as the DP when
/// `quantized` is set.
pub fn brute_force_gdfp(
    profile: &SensorProfile,
    spec: &ProblemSpec,
    quantized: bool,
    scale: u64,
) -> Result<OracleResult> {
    spec.validate()?;
    if profile.len() > MAX_ORACLE_SENSORS {
        return too_large(format!(
            "exhaustive search over general rules supports at most {MAX_ORACLE_SENSORS} sensors, got {}",
            profile.len()
        ));
    }
    let items = Items {
        values: item_values(profile, spec)?,
        detect: joint_table(profile.pd())?,
        false_alarm: item_weights(profile)?,
    };
    let len = items.values.len();
    let (mask, objective, pd, pf) = enumerate(&items, spec, quantized, scale)?;
    Ok(OracleResult {
        best_rule: SelectedRule::General(FusionRule::new(mask_bits(mask, len))),
        objective,
        pd,
        pf,
        n_evaluated: 1 << len,
    })
}

/// Best count rule by enumerating all `2^(N+1)` candidates. Per-count
/// quantities are summed directly over the decision vectors of each count.
pub fn brute_force_count(
    profile: &SensorProfile,
    spec: &ProblemSpec,
    quantized: bool,
    scale: u64,
) -> Result<OracleResult> {
    spec.validate()?;
    let n = profile.len();
    if n > MAX_COUNT_ORACLE_SENSORS {
        return too_large(format!(
            "exhaustive search over count rules supports at most {MAX_COUNT_ORACLE_SENSORS} sensors, got {n}"
        ));
    }
    let by_count = |per_index: Vec<f64>| {
        let mut out = vec![0.0; n + 1];
        for (m, v) in per_index.into_iter().enumerate() {
            out[m.count_ones() as usize] += v;
        }
        out
    };
    let items = Items {
        values: by_count(item_values(profile, spec)?),
        detect: by_count(joint_table(profile.pd())?),
        false_alarm: by_count(item_weights(profile)?),
    };
    let (mask, objective, pd, pf) = enumerate(&items, spec, quantized, scale)?;
    Ok(OracleResult {
        best_rule: SelectedRule::Count(CountFusionRule::new(mask_bits(mask, n + 1))),
        objective,
        pd,
        pf,
        n_evaluated: 1 << (n + 1),
    })
}

/// True iff raising any sensor's report from 0 to 1 never lowers the fused
/// decision. Checking single-bit raises suffices since the subset order is
/// their transitive closure.
///
/// # Panics
///
/// If `rule.len() != 2^n`.
pub fn check_positive_unate(rule: &FusionRule, n: usize) -> bool {
    assert_eq!(rule.len(), 1 << n, "rule length must be 2^n");
    (0..rule.len()).filter(|&m| rule.get(m)).all(|m| {
        (0..n)
            .filter(|i| m >> i & 1 == 0)
            .all(|i| rule.get(m | 1 << i))
    })
}
