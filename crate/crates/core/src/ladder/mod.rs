//! Cycle-scheduled Montgomery scalar multiplication over B-233 in
//! Lopez-Dahab projective coordinates.
//!
//! [`kp`] returns both the affine result and the per-clock-cycle
//! [`ActivityLog`] the power model consumes. The most significant key bit
//! is absorbed by initialization, the next one by the shortened 45-cycle
//! init slot, and each remaining bit by a 54-cycle slot holding exactly six
//! field multiplications.

mod activity;
mod curve;
mod engine;

pub use activity::{
    ActivityLog, AluEvent, AluOp, CycleRecord, Phase, PmEvent, Reg, RegEvent,
};
pub use curve::{base_point, curve_b, AffinePoint, Scalar, B_HEX, GX_HEX, GY_HEX, ORDER_HEX};

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::polymul::MultiplierPlan;
use engine::Engine;

pub const INIT_SLOT_CYCLES: usize = 45;
pub const MAIN_SLOT_CYCLES: usize = 54;
pub const MULTS_PER_SLOT: usize = 6;
pub const CYCLES_PER_MULT: usize = 9;

/// The projective x-coordinate pair carried through the ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LadderState {
    pub x1: FieldElement,
    pub z1: FieldElement,
    pub x2: FieldElement,
    pub z2: FieldElement,
}

/// Cycle layout of one kP run for a scalar of length l.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduleLayout {
    pub init_slot_cycles: usize,
    pub main_slot_cycles: usize,
    pub mults_per_slot: usize,
    pub cycles_per_mult: usize,
    /// One slot per main-loop key bit: l - 2.
    pub slot_count: usize,
}

impl ScheduleLayout {
    pub fn for_scalar_len(l: usize) -> Result<Self> {
        if l < 3 {
            return Err(Error::validation(format!(
                "slot layout needs a scalar of at least 3 bits, got {l}"
            )));
        }
        Ok(ScheduleLayout {
            init_slot_cycles: INIT_SLOT_CYCLES,
            main_slot_cycles: MAIN_SLOT_CYCLES,
            mults_per_slot: MULTS_PER_SLOT,
            cycles_per_mult: CYCLES_PER_MULT,
            slot_count: l - 2,
        })
    }

    pub fn scalar_len(&self) -> usize {
        self.slot_count + 2
    }

    pub fn main_loop_cycles(&self) -> usize {
        self.slot_count * self.main_slot_cycles
    }

    /// Cycles covered by the init slot plus all main-loop slots; a trace
    /// must be at least this long to be attackable.
    pub fn min_trace_len(&self) -> usize {
        self.init_slot_cycles + self.main_loop_cycles()
    }

    /// Key-bit index processed by temporal slot `t` (MSB-first order).
    pub fn key_bit_of_slot(&self, t: usize) -> usize {
        debug_assert!(t < self.slot_count);
        self.scalar_len() - 3 - t
    }
}

pub fn layout_of(k: &Scalar) -> Result<ScheduleLayout> {
    ScheduleLayout::for_scalar_len(k.bit_len())
}

/// Scalar multiplication k*P with full activity logging.
pub fn kp(
    k: &Scalar,
    p: &AffinePoint,
    plan: &MultiplierPlan,
) -> Result<(AffinePoint, ActivityLog)> {
    let (x, y) = match p {
        AffinePoint::Infinity => {
            return Err(Error::validation("input point must have affine coordinates"))
        }
        AffinePoint::Point { x, y } => (*x, *y),
    };
    if !p.on_curve() {
        return Err(Error::validation("point is not on B-233"));
    }
    let l = k.bit_len();
    let mut engine = Engine::new(x, y, curve_b(), plan)?;
    if l == 1 {
        engine.run_base_init()?;
    } else {
        engine.run_init_slot(k.bit(l - 2))?;
        for t in 0..l - 2 {
            let key_bit = l - 3 - t;
            engine.run_main_slot(k.bit(key_bit), t, key_bit)?;
        }
    }
    let result = engine.run_postamble()?;
    Ok((result, engine.into_log()))
}

/// One main-loop ladder iteration in conditional-swap form; consumes
/// exactly six field multiplications.
pub fn ladder_step(
    state: &LadderState,
    key_bit: bool,
    x_p: &FieldElement,
    b: &FieldElement,
    plan: &MultiplierPlan,
) -> Result<LadderState> {
    let mut engine = Engine::new(*x_p, FieldElement::ZERO, *b, plan)?;
    engine.load_ladder_state(state);
    engine.run_main_slot(key_bit, 0, 0)?;
    Ok(engine.ladder_state())
}

/// Textbook MSB-first double-and-add over the affine group law; the
/// scheduling-free oracle the ladder is checked against.
pub fn reference_double_and_add(k: &Scalar, p: &AffinePoint) -> Result<AffinePoint> {
    if !p.on_curve() {
        return Err(Error::validation("point is not on B-233"));
    }
    let l = k.bit_len();
    let mut acc = *p;
    for i in (0..l - 1).rev() {
        acc = acc.double();
        if k.bit(i) {
            acc = acc.add(p);
        }
    }
    Ok(acc)
}
