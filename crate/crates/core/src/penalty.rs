//! Arc penalty functions and the objective they integrate to.
//!
//! The penalty of an arc is zero while flow stays within capacity and grows
//! with the overflow past it; the solver minimizes the sum over arcs of
//! `integral from 0 to f_a of h`. The min-cost variant offsets the penalty
//! by the arc cost and scales the overflow by a big-M factor, turning the
//! same program into an approximate minimum-cost solver.

use crate::flow::AggregateFlow;
use crate::instance::Instance;

/// Shape of the overflow penalty beyond capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverflowFn {
    /// g(x) = x; identical to `Feasibility`.
    Linear,
    /// g(x) = x^2.
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PenaltyModel {
    /// h = 0 within capacity, overflow beyond it.
    Feasibility,
    /// h = 0 within capacity, g(overflow) beyond it.
    Generalized(OverflowFn),
    /// h = cost within capacity, cost + M * overflow beyond it. Requires
    /// `big_m > 0`.
    MinCost { big_m: f64 },
}

impl PenaltyModel {
    /// True for the variants where h vanishes inside capacity, so a zero
    /// objective is equivalent to capacity feasibility and a positive
    /// lower bound proves infeasibility.
    pub fn vanishes_within_capacity(&self) -> bool {
        !matches!(self, PenaltyModel::MinCost { .. })
    }
}

/// h(f) for one arc. The kink takes the left value: h(u) is 0 for the
/// feasibility variants and `cost` for min-cost.
pub fn penalty_value(model: &PenaltyModel, flow: f64, capacity: f64, cost: f64) -> f64 {
    let over = flow - capacity;
    match model {
        PenaltyModel::Feasibility | PenaltyModel::Generalized(OverflowFn::Linear) => {
            if over > 0.0 {
                over
            } else {
                0.0
            }
        }
        PenaltyModel::Generalized(OverflowFn::Quadratic) => {
            if over > 0.0 {
                over * over
            } else {
                0.0
            }
        }
        PenaltyModel::MinCost { big_m } => {
            if over > 0.0 {
                cost + big_m * over
            } else {
                cost
            }
        }
    }
}

/// Closed form of `integral from 0 to flow of h`.
pub fn arc_integral(model: &PenaltyModel, flow: f64, capacity: f64, cost: f64) -> f64 {
    let over = flow - capacity;
    match model {
        PenaltyModel::Feasibility | PenaltyModel::Generalized(OverflowFn::Linear) => {
            if over > 0.0 {
                over * over / 2.0
            } else {
                0.0
            }
        }
        PenaltyModel::Generalized(OverflowFn::Quadratic) => {
            if over > 0.0 {
                over * over * over / 3.0
            } else {
                0.0
            }
        }
        PenaltyModel::MinCost { big_m } => {
            let base = cost * flow;
            if over > 0.0 {
                base + big_m * over * over / 2.0
            } else {
                base
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveValue {
    pub total: f64,
    pub per_arc: Vec<f64>,
}

/// Objective z: arc integrals summed in ascending arc id order.
pub fn objective(model: &PenaltyModel, instance: &Instance, agg: &AggregateFlow) -> ObjectiveValue {
    let mut per_arc = Vec::with_capacity(instance.num_arcs());
    let mut total = 0.0;
    for (a, &f) in agg.per_arc.iter().enumerate() {
        let v = arc_integral(model, f, instance.capacity_f64(a), instance.cost_f64(a));
        per_arc.push(v);
        total += v;
    }
    ObjectiveValue { total, per_arc }
}

/// Current penalty weights {h(f_a)} per arc.
pub fn arc_weights(model: &PenaltyModel, instance: &Instance, agg: &AggregateFlow) -> Vec<f64> {
    agg.per_arc
        .iter()
        .enumerate()
        .map(|(a, &f)| penalty_value(model, f, instance.capacity_f64(a), instance.cost_f64(a)))
        .collect()
}

/// Largest per-arc overflow (f_a - u_a)+ of an aggregate flow.
pub fn max_overflow(instance: &Instance, agg: &AggregateFlow) -> f64 {
    agg.per_arc
        .iter()
        .enumerate()
        .map(|(a, &f)| (f - instance.capacity_f64(a)).max(0.0))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Instance;

    #[test]
    fn penalty_branches() {
        let m = PenaltyModel::Feasibility;
        assert_eq!(penalty_value(&m, 3.0, 5.0, 0.0), 0.0);
        assert_eq!(penalty_value(&m, 7.0, 5.0, 0.0), 2.0);
        assert_eq!(penalty_value(&m, 5.0, 5.0, 0.0), 0.0);

        let m = PenaltyModel::MinCost { big_m: 10.0 };
        assert_eq!(penalty_value(&m, 7.0, 5.0, 1.0), 21.0);
        assert_eq!(penalty_value(&m, 5.0, 5.0, 1.0), 1.0);

        let m = PenaltyModel::Generalized(OverflowFn::Quadratic);
        assert_eq!(penalty_value(&m, 7.0, 5.0, 0.0), 4.0);
        assert_eq!(
            penalty_value(&PenaltyModel::Generalized(OverflowFn::Linear), 7.0, 5.0, 0.0),
            penalty_value(&PenaltyModel::Feasibility, 7.0, 5.0, 0.0)
        );
    }

    #[test]
    fn integral_closed_forms() {
        // Hand integration: 0 below capacity, (f-u)^2/2 past it.
        assert_eq!(arc_integral(&PenaltyModel::Feasibility, 3.0, 5.0, 0.0), 0.0);
        assert_eq!(arc_integral(&PenaltyModel::Feasibility, 7.0, 5.0, 0.0), 2.0);
        // Min-cost: c*f + M*(f-u)^2/2 = 7 + 10*4/2 = 27.
        assert_eq!(arc_integral(&PenaltyModel::MinCost { big_m: 10.0 }, 7.0, 5.0, 1.0), 27.0);
        // Quadratic: (f-u)^3/3.
        assert_eq!(
            arc_integral(&PenaltyModel::Generalized(OverflowFn::Quadratic), 7.0, 5.0, 0.0),
            8.0 / 3.0
        );
    }

    #[test]
    fn objective_sums_arc_integrals() {
        let single = Instance::from_parts(
            &["s", "t"],
            &[("a0", "s", "t", 5.0, 0.0)],
            &[("k0", "s", "t", 3.0)],
        )
        .unwrap();
        let z = objective(&PenaltyModel::Feasibility, &single, &AggregateFlow { per_arc: vec![3.0] });
        assert_eq!(z.total, 0.0);

        let tight = Instance::from_parts(
            &["s", "t"],
            &[("a0", "s", "t", 2.0, 0.0)],
            &[("k0", "s", "t", 3.0)],
        )
        .unwrap();
        let z = objective(&PenaltyModel::Feasibility, &tight, &AggregateFlow { per_arc: vec![3.0] });
        assert_eq!(z.total, 0.5);

        let diamond = Instance::from_parts(
            &["s", "t"],
            &[("a0", "s", "t", 2.0, 0.0), ("a1", "s", "t", 2.0, 0.0)],
            &[("k0", "s", "t", 3.0)],
        )
        .unwrap();
        let z = objective(
            &PenaltyModel::Feasibility,
            &diamond,
            &AggregateFlow { per_arc: vec![3.0, 0.0] },
        );
        assert_eq!(z.total, 0.5);
        assert_eq!(z.per_arc, vec![0.5, 0.0]);
    }

    #[test]
    fn zero_objective_iff_within_capacity() {
        let diamond = Instance::from_parts(
            &["s", "t"],
            &[("a0", "s", "t", 2.0, 0.0), ("a1", "s", "t", 2.0, 0.0)],
            &[("k0", "s", "t", 3.0)],
        )
        .unwrap();
        let inside = AggregateFlow { per_arc: vec![2.0, 1.0] };
        assert_eq!(objective(&PenaltyModel::Feasibility, &diamond, &inside).total, 0.0);
        assert_eq!(max_overflow(&diamond, &inside), 0.0);

        let outside = AggregateFlow { per_arc: vec![2.5, 0.5] };
        assert!(objective(&PenaltyModel::Feasibility, &diamond, &outside).total > 0.0);
        assert_eq!(max_overflow(&diamond, &outside), 0.5);
    }
}
