//! Static gate-complexity accounting.
//!
//! Everything here is recomputed from plan structure and widths alone,
//! without evaluating any data; tests assert it agrees bit-for-bit with the
//! tallies the instrumented evaluator produces while actually multiplying.

use std::ops::{Add, AddAssign};

use super::plan::{split2, split3, LeafMethod, MultiplierPlan, PlanNode, Segmentation, PM_WIDTH};
use crate::error::{Error, Result};

/// Exact count of two-input AND and XOR gates one multiplication spends.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct GateComplexity {
    pub and_count: u64,
    pub xor_count: u64,
}

impl GateComplexity {
    pub fn new(and_count: u64, xor_count: u64) -> Self {
        GateComplexity {
            and_count,
            xor_count,
        }
    }

    pub fn total(&self) -> u64 {
        self.and_count + self.xor_count
    }
}

impl Add for GateComplexity {
    type Output = GateComplexity;
    fn add(self, rhs: GateComplexity) -> GateComplexity {
        GateComplexity::new(self.and_count + rhs.and_count, self.xor_count + rhs.xor_count)
    }
}

impl AddAssign for GateComplexity {
    fn add_assign(&mut self, rhs: GateComplexity) {
        self.and_count += rhs.and_count;
        self.xor_count += rhs.xor_count;
    }
}

/// XOR gates spent merging shifted terms `(offset, width)` into one bus,
/// lowest offset first: a position costs a gate once it is already driven.
fn join_xor(terms: &[(usize, usize)]) -> u64 {
    let mut defined = 0usize;
    let mut gates = 0u64;
    for &(off, w) in terms {
        debug_assert!(off <= defined || defined == 0);
        let end = off + w;
        if defined > off {
            gates += (defined.min(end) - off) as u64;
        }
        defined = defined.max(end);
    }
    gates
}

fn classical_gc(w: usize) -> GateComplexity {
    let w = w as u64;
    GateComplexity::new(w * w, w * w - (2 * w - 1))
}

fn k2_gc(w: usize, child: impl Fn(usize, usize) -> GateComplexity) -> GateComplexity {
    let (m, h) = split2(w);
    let mut gc = child(0, m) + child(1, h) + child(2, m);
    gc.xor_count += 2 * h as u64; // operand half sums
    gc.xor_count += (2 * h - 1) as u64 + (2 * m - 1) as u64; // middle term
    gc.xor_count += join_xor(&[(0, 2 * m - 1), (m, 2 * m - 1), (2 * m, 2 * h - 1)]);
    gc
}

fn w3_gc(w: usize, child: impl Fn(usize, usize) -> GateComplexity) -> GateComplexity {
    let (m, r) = split3(w);
    let s = m.max(r);
    let widths = [m, m, r, m, s, s];
    let mut gc = GateComplexity::default();
    for (i, &cw) in widths.iter().enumerate() {
        gc += child(i, cw);
    }
    gc.xor_count += 2 * (m + 2 * m.min(r)) as u64; // pairwise segment sums
    let (pm, pr, ps) = (2 * m - 1, 2 * r - 1, 2 * s - 1);
    gc.xor_count += (2 * pm) as u64; // c1 = d01+d0+d1
    gc.xor_count += (2 * pm + pr) as u64; // c2 = d02+d0+d1+d2
    gc.xor_count += (pm + pr) as u64; // c3 = d12+d1+d2
    gc.xor_count += join_xor(&[(0, pm), (m, pm), (2 * m, ps), (3 * m, ps), (4 * m, pr)]);
    gc
}

fn c2_gc(w: usize, child: impl Fn(usize, usize) -> GateComplexity) -> GateComplexity {
    let (m, h) = split2(w);
    let widths = [m, m, m, h];
    let mut gc = GateComplexity::default();
    for (i, &cw) in widths.iter().enumerate() {
        gc += child(i, cw);
    }
    gc.xor_count += (2 * m - 1) as u64; // p01 + p10
    gc.xor_count += join_xor(&[(0, 2 * m - 1), (m, 2 * m - 1), (2 * m, 2 * h - 1)]);
    gc
}

fn node_gc(plan: &MultiplierPlan) -> GateComplexity {
    let classical_child = |_: usize, cw: usize| classical_gc(cw);
    match &plan.node {
        PlanNode::Leaf(LeafMethod::Classical) => classical_gc(plan.width),
        PlanNode::Leaf(LeafMethod::Karatsuba2) => k2_gc(plan.width, classical_child),
        PlanNode::Leaf(LeafMethod::Winograd3) => w3_gc(plan.width, classical_child),
        PlanNode::Split { seg, children } => {
            let plan_child = |i: usize, _cw: usize| node_gc(&children[i]);
            match seg {
                Segmentation::Karatsuba2 => k2_gc(plan.width, plan_child),
                Segmentation::Winograd3 => w3_gc(plan.width, plan_child),
                Segmentation::Classical2 => c2_gc(plan.width, plan_child),
            }
        }
    }
}

/// Gate complexity of one partial multiplication under `plan` at width `n`.
///
/// The width parameter is redundant with the plan's declared width and is
/// checked against it.
pub fn gate_complexity(plan: &MultiplierPlan, n: usize) -> Result<GateComplexity> {
    plan.validate()?;
    if n != plan.width {
        return Err(Error::plan(format!(
            "plan is declared for width {}, not {n}",
            plan.width
        )));
    }
    Ok(node_gc(plan))
}

/// Gate complexity of one full 233-bit field multiplication: nine partial
/// multiplications plus the segment sums and recombination XORs of the
/// two-level schedule.
pub fn seg4_gate_complexity(plan: &MultiplierPlan) -> Result<GateComplexity> {
    let pm = gate_complexity(plan, PM_WIDTH)?;
    let mut gc = GateComplexity::default();
    for _ in 0..9 {
        gc += pm;
    }
    let out = 2 * PM_WIDTH - 1; // 117-bit PM output bus

    // outer operand sums (118 over 115) and per-group segment sums
    gc.xor_count += 2 * 115;
    gc.xor_count += 2 * (59 + 56 + 59);

    // per-group inner recombination over three 117-bit buses
    let group_join = join_xor(&[(0, out), (59, out), (118, out)]);
    gc.xor_count += 3 * ((out + out) as u64 + group_join);

    // outer recombination over three 235-bit group buses
    let group_bus = 118 + out;
    gc.xor_count += (group_bus + group_bus) as u64;
    gc.xor_count += join_xor(&[(0, group_bus), (118, group_bus), (236, group_bus)]);
    Ok(gc)
}
