//! Optimal hard-decision fusion for banks of conditionally independent binary
//! sensors.
//!
//! A fusion rule maps each of the `2^N` possible sensor decision vectors to a
//! global decision. Maximizing `cd * P_D - cf * P_F` under a false-alarm cap
//! `P_F <= alpha` is a 0-1 knapsack over the decision vectors, solved here by
//! scaled-integer dynamic programming. Neyman-Pearson, Bayesian, count-based
//! and K-out-of-N fusion are special cases with cheaper solvers.
//!
//! ```
//! use fusion_core::{solve_np, SensorProfile, GDFP_SCALE};
//!
//! let profile = SensorProfile::new(vec![0.8, 0.9], vec![0.2, 0.1]).unwrap();
//! let report = solve_np(&profile, 0.25, GDFP_SCALE).unwrap();
//! assert!((report.pd - 0.9).abs() < 1e-12);
//! ```

pub mod error;
pub mod knapsack;
pub mod montecarlo;
pub mod oracle;
pub mod sensor;
pub mod solvers;

pub use error::{FusionError, Result};
pub use knapsack::{flop_estimate, quantize, solve_knapsack, KnapsackInstance, KnapsackSolution};
pub use montecarlo::{simulate, simulate_count, SimConfig, SimResult};
pub use oracle::{brute_force_count, brute_force_gdfp, check_positive_unate, OracleResult};
pub use sensor::{
    count_aggregates, expand_count_rule, item_value, item_values, item_weight, item_weights,
    joint_prob, joint_table, rule_performance, vote_count, BayesParams, CountAggregates,
    CountFusionRule, FusionRule, ProblemSpec, SensorProfile, MAX_SENSORS,
};
pub use solvers::{
    alpha_grid, homogeneous_count_values, k_star, roc_sweep, solve_bayes, solve_count_gdfp,
    solve_gdfp, solve_hm_bayes, solve_k_out_of_n, solve_np, Method, RocPoint, SelectedRule,
    SolveReport, COUNT_SCALE, GDFP_SCALE,
};
