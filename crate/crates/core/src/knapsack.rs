//! Scaled-integer 0-1 knapsack by dynamic programming.
//!
//! Real weights and the weight limit are mapped onto an integer grid with
//! `I_b = floor(C * b + 1/2)`. The table `T[a, b]` holds the best selection of
//! items `0..=a` whose integerized weight is at most `b`; it is swept one item
//! at a time over a single value row, and one "take" bit per cell is kept for
//! backtracking.
//!
//! Ties are broken toward the lighter selection: a cell prefers the larger
//! value, then the smaller integerized weight, then skipping the item. The
//! returned selection therefore has minimal integerized weight among all
//! optimal selections of the integerized instance.
//!
//! When the exact weights of all items together fit the limit, the constraint
//! cannot bind and the integer budget is widened to the total integerized
//! weight, so that rounding alone never excludes an item.
//!
//! Flops are tallied the way the textbook recursion is costed: three per
//! evaluated cell of the loop `a = 1..M-1`, `I_b = 1..I_alpha`, and none for
//! cells where the item does not fit (a plain copy) or for backtracking.

use crate::error::{invalid, too_large, Result};
use crate::sensor::compensated_sum;

/// Upper bound on `M * (I_alpha + 1)`, the number of backtracking bits.
pub const MAX_TABLE_CELLS: u64 = 1 << 32;

/// Slack for deciding that the exact weight limit admits every item.
pub const VACUOUS_TOL: f64 = 1e-12;

/// Flops charged per evaluated table cell.
pub const FLOPS_PER_CELL: u64 = 3;

/// Maps a nonnegative real onto the integer grid of resolution `1 / scale`,
/// rounding half up.
pub fn quantize(b: f64, scale: u64) -> Result<u64> {
    if !(b.is_finite() && b >= 0.0) {
        return invalid(format!("cannot quantize {b}: expected a nonnegative real"));
    }
    if scale == 0 {
        return invalid("scale must be a positive integer");
    }
    let scaled = (scale as f64 * b + 0.5).floor();
    if scaled >= (1u64 << 62) as f64 {
        return too_large(format!("{b} at scale {scale} overflows the integer grid"));
    }
    Ok(scaled as u64)
}

/// A 0-1 knapsack with real values (possibly negative) and real weights.
#[derive(Debug, Clone, PartialEq)]
pub struct KnapsackInstance {
    values: Vec<f64>,
    weights: Vec<f64>,
    w_lim: f64,
    scale: u64,
}

impl KnapsackInstance {
    pub fn new(values: Vec<f64>, weights: Vec<f64>, w_lim: f64, scale: u64) -> Result<Self> {
        if values.is_empty() {
            return invalid("a knapsack instance needs at least one item");
        }
        if values.len() != weights.len() {
            return invalid(format!(
                "{} values but {} weights",
                values.len(),
                weights.len()
            ));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return invalid(format!("item value {v} is not finite"));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return invalid(format!("item weight {w} is not a nonnegative real"));
        }
        if !(w_lim.is_finite() && w_lim >= 0.0) {
            return invalid(format!("weight limit {w_lim} is not a nonnegative real"));
        }
        if scale == 0 {
            return invalid("scale must be a positive integer");
        }
        Ok(Self {
            values,
            weights,
            w_lim,
            scale,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn w_lim(&self) -> f64 {
        self.w_lim
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    /// True when every selection satisfies the exact weight limit.
    pub fn constraint_is_vacuous(&self) -> bool {
        compensated_sum(self.weights.iter().copied()) <= self.w_lim + VACUOUS_TOL
    }

    /// The integer budget of the DP: `I_alpha = quantize(w_lim)`, widened to
    /// the total integerized weight when the constraint is vacuous.
    pub fn budget(&self) -> Result<u64> {
        let nominal = quantize(self.w_lim, self.scale)?;
        if self.constraint_is_vacuous() {
            Ok(nominal.max(self.scaled_weights()?.iter().sum()))
        } else {
            Ok(nominal)
        }
    }

    /// Integerized item weights.
    pub fn scaled_weights(&self) -> Result<Vec<u64>> {
        self.weights.iter().map(|&w| quantize(w, self.scale)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnapsackSolution {
    pub selection: Vec<bool>,
    /// Sum of the selected values.
    pub objective: f64,
    /// Sum of the selected integerized weights; never exceeds `budget`.
    pub scaled_weight: u64,
    /// Sum of the selected exact weights.
    pub true_weight: f64,
    /// The integer budget, see [`KnapsackInstance::budget`].
    pub budget: u64,
    pub flops: u64,
}

impl KnapsackSolution {
    pub fn selected(&self) -> Vec<usize> {
        self.selection
            .iter()
            .enumerate()
            .filter_map(|(i, &s)| s.then_some(i))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Cell {
    value: f64,
    weight: u64,
}

impl Cell {
    fn beats(&self, other: &Cell) -> bool {
        self.value > other.value || (self.value == other.value && self.weight < other.weight)
    }
}

struct TakeBits {
    words: Vec<u64>,
    stride: usize,
}

impl TakeBits {
    fn new(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64);
        Self {
            words: vec![0; rows * stride],
            stride,
        }
    }

    fn set(&mut self, row: usize, col: usize) {
        self.words[row * self.stride + col / 64] |= 1 << (col % 64);
    }

    fn get(&self, row: usize, col: usize) -> bool {
        self.words[row * self.stride + col / 64] >> (col % 64) & 1 == 1
    }
}

/// Solves the integerized instance exactly.
pub fn solve_knapsack(inst: &KnapsackInstance) -> Result<KnapsackSolution> {
    let budget = inst.budget()?;
    let iw = inst.scaled_weights()?;
    let items = inst.len();
    let cells = (items as u64).saturating_mul(budget.saturating_add(1));
    if cells > MAX_TABLE_CELLS {
        return too_large(format!(
            "DP table of {items} items x {} budget columns exceeds {MAX_TABLE_CELLS} cells",
            budget + 1
        ));
    }
    let cap = budget as usize;
    let mut row = vec![Cell::default(); cap + 1];
    let mut take = TakeBits::new(items, cap + 1);

    let (v0, w0) = (inst.values[0], iw[0]);
    if v0 > 0.0 && w0 <= budget {
        for (b, cell) in row.iter_mut().enumerate().skip(w0 as usize) {
            *cell = Cell {
                value: v0,
                weight: w0,
            };
            take.set(0, b);
        }
    }

    let mut flops = 0u64;
    for (a, &w) in iw.iter().enumerate().skip(1) {
        if w > budget {
            continue;
        }
        let (v, w) = (inst.values[a], w as usize);
        for b in (w..=cap).rev() {
            let prev = row[b - w];
            let cand = Cell {
                value: prev.value + v,
                weight: prev.weight + w as u64,
            };
            if cand.beats(&row[b]) {
                row[b] = cand;
                take.set(a, b);
            }
        }
        let first = w.max(1);
        if cap >= first {
            flops += FLOPS_PER_CELL * (cap - first + 1) as u64;
        }
    }

    let mut selection = vec![false; items];
    let mut b = cap;
    for a in (0..items).rev() {
        if take.get(a, b) {
            selection[a] = true;
            b -= iw[a] as usize;
        }
    }

    let picked = || selection.iter().enumerate().filter(|(_, &s)| s).map(|(i, _)| i);
    let objective = compensated_sum(picked().map(|i| inst.values[i]));
    let true_weight = compensated_sum(picked().map(|i| inst.weights[i]));
    let scaled_weight = picked().map(|i| iw[i]).sum();
    debug_assert!(scaled_weight <= budget);

    Ok(KnapsackSolution {
        selection,
        objective,
        scaled_weight,
        true_weight,
        budget,
        flops,
    })
}

/// Worst-case flop count `3 * I_alpha * L`, where the item loop length `L` is
/// `m_items - 1` unless overridden.
pub fn flop_estimate(
    m_items: usize,
    w_lim: f64,
    scale: u64,
    item_loop_override: Option<usize>,
) -> Result<u64> {
    let budget = quantize(w_lim, scale)?;
    let loop_len = item_loop_override.unwrap_or(m_items.saturating_sub(1)) as u64;
    Ok(FLOPS_PER_CELL * budget * loop_len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Exhaustive search over the integerized instance; returns the best
    /// objective and, among optimal subsets, the least integerized weight.
    fn brute_force(inst: &KnapsackInstance) -> (f64, u64) {
        let iw = inst.scaled_weights().unwrap();
        let budget = inst.budget().unwrap();
        let mut best = (0.0, 0u64);
        for mask in 0u32..1 << inst.len() {
            let members = (0..inst.len()).filter(|i| mask >> i & 1 == 1);
            let weight: u64 = members.clone().map(|i| iw[i]).sum();
            if weight > budget {
                continue;
            }
            let value = compensated_sum(members.map(|i| inst.values[i]));
            if value > best.0 + 1e-12 || ((value - best.0).abs() <= 1e-12 && weight < best.1) {
                best = (value, weight);
            }
        }
        best
    }

    #[test]
    fn quantize_examples() {
        assert_eq!(quantize(0.0, 7).unwrap(), 0);
        assert_eq!(quantize(0.1, 100_000).unwrap(), 10_000);
        assert_eq!(quantize(0.0000049, 100_000).unwrap(), 0);
        assert_eq!(quantize(0.000005, 100_000).unwrap(), 1);
        assert!(quantize(-0.1, 10).is_err());
        assert!(quantize(0.1, 0).is_err());
    }

    #[test]
    fn classic_instance() {
        let inst = KnapsackInstance::new(vec![60.0, 100.0, 120.0], vec![10.0, 20.0, 30.0], 50.0, 1)
            .unwrap();
        let sol = solve_knapsack(&inst).unwrap();
        assert_eq!(sol.objective, 220.0);
        assert_eq!(sol.selected(), vec![1, 2]);
        assert_eq!(sol.scaled_weight, 50);
    }

    #[test]
    fn negative_values_are_never_taken() {
        let inst =
            KnapsackInstance::new(vec![-1.0, -0.5, -2.0], vec![0.0, 0.1, 0.2], 1.0, 10).unwrap();
        let sol = solve_knapsack(&inst).unwrap();
        assert!(sol.selected().is_empty());
        assert_eq!(sol.objective, 0.0);
    }

    #[test]
    fn probability_scale_instance() {
        let inst = KnapsackInstance::new(vec![0.72, 0.18], vec![0.02, 0.08], 0.10, 100_000).unwrap();
        let sol = solve_knapsack(&inst).unwrap();
        assert_eq!(sol.selected(), vec![0, 1]);
        assert!((sol.objective - 0.90).abs() < 1e-12);
        assert_eq!(sol.budget, 10_000);
        assert_eq!(sol.scaled_weight, 10_000);
    }

    #[test]
    fn zero_budget_keeps_only_weightless_items() {
        let inst =
            KnapsackInstance::new(vec![0.3, 0.2, 0.4], vec![0.000001, 0.5, 0.3], 0.0, 1000).unwrap();
        let sol = solve_knapsack(&inst).unwrap();
        assert_eq!(sol.selected(), vec![0]);
        assert_eq!(sol.flops, 0);
    }

    #[test]
    fn ties_prefer_the_lighter_selection() {
        // Skipping item 1 on the tie would keep the heavier item 0.
        let inst = KnapsackInstance::new(vec![1.0, 1.0], vec![2.0, 1.0], 2.0, 1).unwrap();
        let sol = solve_knapsack(&inst).unwrap();
        assert_eq!(sol.selected(), vec![1]);
        // A zero-value item never adds weight.
        let inst = KnapsackInstance::new(vec![1.0, 0.0], vec![1.0, 0.0], 1.0, 1).unwrap();
        assert_eq!(solve_knapsack(&inst).unwrap().selected(), vec![0]);
    }

    #[test]
    fn vacuous_limit_admits_every_item() {
        // Rounded weights 34 + 34 + 33 = 101 exceed round(1.0 * 100) = 100.
        let inst = KnapsackInstance::new(vec![1.0; 3], vec![0.335, 0.335, 0.33], 1.0, 100).unwrap();
        assert!(inst.constraint_is_vacuous());
        let sol = solve_knapsack(&inst).unwrap();
        assert_eq!(sol.selected(), vec![0, 1, 2]);
        assert_eq!(sol.budget, 101);
        // Just below the exact total, the nominal budget applies.
        let tight = KnapsackInstance::new(vec![1.0; 3], vec![0.335, 0.335, 0.33], 0.99, 100).unwrap();
        assert!(!tight.constraint_is_vacuous());
        assert_eq!(solve_knapsack(&tight).unwrap().selected().len(), 2);
    }

    #[test]
    fn flop_estimate_examples() {
        assert_eq!(flop_estimate(1 << 11, 0.1, 1_000, Some(11)).unwrap(), 3_300);
        assert_eq!(flop_estimate(1 << 11, 0.1, 100_000, None).unwrap(), 61_410_000);
        assert_eq!(flop_estimate(2, 1.0, 1, None).unwrap(), 3);
    }

    #[test]
    fn worst_case_flops_match_estimate() {
        let inst = KnapsackInstance::new(vec![0.1; 6], vec![0.001; 6], 0.5, 1000).unwrap();
        let sol = solve_knapsack(&inst).unwrap();
        assert_eq!(sol.flops, flop_estimate(6, 0.5, 1000, None).unwrap());
    }

    #[test]
    fn input_errors() {
        assert!(KnapsackInstance::new(vec![], vec![], 1.0, 1).is_err());
        assert!(KnapsackInstance::new(vec![1.0], vec![1.0, 2.0], 1.0, 1).is_err());
        assert!(KnapsackInstance::new(vec![1.0], vec![-1.0], 1.0, 1).is_err());
        assert!(KnapsackInstance::new(vec![1.0], vec![1.0], 1.0, 0).is_err());
        let huge = KnapsackInstance::new(vec![1.0; 1 << 20], vec![0.5; 1 << 20], 1.0, 1 << 20)
            .unwrap();
        assert!(matches!(
            solve_knapsack(&huge),
            Err(crate::FusionError::ResourceLimit(_))
        ));
    }

    fn instance_strategy() -> impl Strategy<Value = KnapsackInstance> {
        (1usize..=10).prop_flat_map(|m| {
            (
                proptest::collection::vec(-1.0..1.0f64, m),
                proptest::collection::vec(0.0..0.5f64, m),
                0.0..1.0f64,
                prop_oneof![Just(10u64), Just(100), Just(1000)],
            )
                .prop_map(|(v, w, lim, scale)| KnapsackInstance::new(v, w, lim, scale).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn optimal_on_integerized_instance(inst in instance_strategy()) {
            let sol = solve_knapsack(&inst).unwrap();
            let (best, _) = brute_force(&inst);
            prop_assert!((sol.objective - best).abs() <= 1e-12);
            let recomputed = compensated_sum(sol.selected().into_iter().map(|i| inst.values()[i]));
            prop_assert!((sol.objective - recomputed).abs() <= 1e-9);
            prop_assert!(sol.scaled_weight <= sol.budget);
        }

        #[test]
        fn integer_valued_ties_resolve_to_least_weight(
            values in proptest::collection::vec(0u8..4, 1..9),
            weights in proptest::collection::vec(0u8..5, 9),
            lim in 0u8..12,
        ) {
            let m = values.len();
            let inst = KnapsackInstance::new(
                values.iter().map(|&v| v as f64).collect(),
                weights[..m].iter().map(|&w| w as f64).collect(),
                lim as f64,
                1,
            ).unwrap();
            let sol = solve_knapsack(&inst).unwrap();
            let (best, lightest) = brute_force(&inst);
            prop_assert_eq!(sol.objective, best);
            prop_assert_eq!(sol.scaled_weight, lightest);
        }

        #[test]
        fn structural_properties(inst in instance_strategy()) {
            let sol = solve_knapsack(&inst).unwrap();
            let iw = inst.scaled_weights().unwrap();
            let slack = inst.len() as f64 * 0.5 / inst.scale() as f64;
            prop_assert!(sol.true_weight <= inst.w_lim() + slack + 1e-12);
            for (i, &s) in sol.selection.iter().enumerate() {
                if inst.values()[i] < 0.0 {
                    prop_assert!(!s);
                }
                if iw[i] == 0 && inst.values()[i] > 0.0 {
                    prop_assert!(s);
                }
            }
            let nominal = quantize(inst.w_lim(), inst.scale()).unwrap();
            let bound = 3 * sol.budget * (inst.len() as u64 - 1);
            prop_assert!(sol.flops <= bound);
            if !inst.constraint_is_vacuous() {
                prop_assert_eq!(sol.budget, nominal);
                prop_assert!(
                    sol.flops <= flop_estimate(inst.len(), inst.w_lim(), inst.scale(), None).unwrap()
                );
            }
            if iw.iter().skip(1).all(|&w| w <= 1) {
                prop_assert_eq!(sol.flops, bound);
            }
        }

        #[test]
        fn objective_grows_with_budget(inst in instance_strategy(), extra in 0.0..0.5f64) {
            let wider = KnapsackInstance::new(
                inst.values().to_vec(),
                inst.weights().to_vec(),
                inst.w_lim() + extra,
                inst.scale(),
            ).unwrap();
            let a = solve_knapsack(&inst).unwrap().objective;
            let b = solve_knapsack(&wider).unwrap().objective;
            prop_assert!(b >= a - 1e-12);
        }
    }
}
