//! The cycle-scheduled kP datapath.
//!
//! One field multiplication occupies the partial multiplier for 9 clock
//! cycles (one scheduled partial product per cycle); ALU operations and
//! register writes run in parallel at fixed cycle offsets. Every main-loop
//! slot issues the identical opcode sequence for both key-bit values, so
//! only data values distinguish the two cases.

use super::activity::{
    ActivityLog, AluEvent, AluOp, CycleRecord, Phase, PmEvent, Reg, RegEvent, REG_COUNT,
};
use super::curve::AffinePoint;
use super::LadderState;
use crate::error::Result;
use crate::field::{reduce, FieldElement, RawPolynomial};
use crate::polymul::{seg4_mul, seg4_schedule, BitPoly, MultiplierPlan};

/// Operand source: a register or one of the constant inputs held in ROM.
#[derive(Debug, Clone, Copy)]
enum Src {
    R(Reg),
    Xp,
    Yp,
    B,
    One,
}

#[derive(Debug, Clone, Copy)]
enum Op {
    /// Latch operands and occupy the multiplier for the next 9 cycles.
    Mult { dst: Reg, a: Src, b: Src },
    Add { dst: Reg, x: Src, y: Src },
    Sqr { dst: Reg, x: Src },
    /// Rewrite all four ladder registers, exchanged when `swap` is set.
    CSwap { swap: bool },
    /// Route the initialization products into the ladder registers.
    RouteInit { high: bool },
    /// Load the affine inputs into (X1, Z1).
    LoadBase,
}

/// A multiplication in flight: result and per-cycle PM operands were
/// latched at the start cycle.
struct Flight {
    dst: Reg,
    started: usize,
    product: FieldElement,
    pm_inputs: Vec<(BitPoly, BitPoly)>,
}

pub(super) struct Engine<'a> {
    plan: &'a MultiplierPlan,
    xp: FieldElement,
    yp: FieldElement,
    b: FieldElement,
    regs: [FieldElement; REG_COUNT],
    log: ActivityLog,
}

impl<'a> Engine<'a> {
    pub(super) fn new(
        xp: FieldElement,
        yp: FieldElement,
        b: FieldElement,
        plan: &'a MultiplierPlan,
    ) -> Result<Self> {
        seg4_schedule(plan)?; // reject plans the field multiplier cannot run
        Ok(Engine {
            plan,
            xp,
            yp,
            b,
            regs: [FieldElement::ZERO; REG_COUNT],
            log: ActivityLog::default(),
        })
    }

    pub(super) fn into_log(self) -> ActivityLog {
        self.log
    }

    pub(super) fn load_ladder_state(&mut self, s: &LadderState) {
        self.regs[Reg::X1.index()] = s.x1;
        self.regs[Reg::Z1.index()] = s.z1;
        self.regs[Reg::X2.index()] = s.x2;
        self.regs[Reg::Z2.index()] = s.z2;
    }

    pub(super) fn ladder_state(&self) -> LadderState {
        LadderState {
            x1: self.regs[Reg::X1.index()],
            z1: self.regs[Reg::Z1.index()],
            x2: self.regs[Reg::X2.index()],
            z2: self.regs[Reg::Z2.index()],
        }
    }

    fn read(&self, s: Src) -> FieldElement {
        match s {
            Src::R(r) => self.regs[r.index()],
            Src::Xp => self.xp,
            Src::Yp => self.yp,
            Src::B => self.b,
            Src::One => FieldElement::ONE,
        }
    }

    fn write_reg(&mut self, rec: &mut CycleRecord, reg: Reg, new: FieldElement) {
        rec.reg_events.push(RegEvent {
            reg,
            old: self.regs[reg.index()],
            new,
        });
        self.regs[reg.index()] = new;
    }

    /// Runs `cycles` clock cycles executing `ops` (sorted by cycle offset).
    /// Per cycle: the running multiplication advances first (operand pair
    /// into the PM; writeback on its 9th cycle), then scheduled ops fire in
    /// listed order, reading forwarded results of the same cycle.
    fn run_window(&mut self, phase: Phase, cycles: usize, ops: &[(usize, Op)]) -> Result<()> {
        debug_assert!(ops.windows(2).all(|w| w[0].0 <= w[1].0));
        let mut op_idx = 0;
        let mut flight: Option<Flight> = None;
        for rel in 0..cycles {
            let mut rec = CycleRecord::new(phase);
            if let Some(f) = flight.as_ref() {
                let job = rel - f.started;
                debug_assert!(job < 9);
                rec.pm_event = Some(PmEvent {
                    a: f.pm_inputs[job].0.clone(),
                    b: f.pm_inputs[job].1.clone(),
                });
                if job == 8 {
                    rec.bus_events.push(f.product);
                    let (dst, v) = (f.dst, f.product);
                    self.write_reg(&mut rec, dst, v);
                    flight = None;
                }
            }
            while op_idx < ops.len() && ops[op_idx].0 == rel {
                let op = ops[op_idx].1;
                op_idx += 1;
                match op {
                    Op::Mult { dst, a, b } => {
                        assert!(flight.is_none(), "multiplier is busy");
                        let av = self.read(a);
                        let bv = self.read(b);
                        rec.bus_events.push(av);
                        rec.bus_events.push(bv);
                        let out = seg4_mul(&av.to_bits(), &bv.to_bits(), self.plan)?;
                        let product = reduce(&RawPolynomial::from_bits(&out.product)?);
                        debug_assert!(rec.pm_event.is_none());
                        rec.pm_event = Some(PmEvent {
                            a: out.pm_inputs[0].0.clone(),
                            b: out.pm_inputs[0].1.clone(),
                        });
                        flight = Some(Flight {
                            dst,
                            started: rel,
                            product,
                            pm_inputs: out.pm_inputs,
                        });
                    }
                    Op::Add { dst, x, y } => {
                        let xv = self.read(x);
                        let yv = self.read(y);
                        debug_assert!(rec.alu_event.is_none());
                        rec.alu_event = Some(AluEvent {
                            op: AluOp::Add,
                            x: xv,
                            y: yv,
                        });
                        self.write_reg(&mut rec, dst, xv.add(&yv));
                    }
                    Op::Sqr { dst, x } => {
                        let xv = self.read(x);
                        debug_assert!(rec.alu_event.is_none());
                        rec.alu_event = Some(AluEvent {
                            op: AluOp::Sqr,
                            x: xv,
                            y: xv,
                        });
                        self.write_reg(&mut rec, dst, xv.sqr());
                    }
                    Op::CSwap { swap } => {
                        let (x1, z1) = (self.regs[Reg::X1.index()], self.regs[Reg::Z1.index()]);
                        let (x2, z2) = (self.regs[Reg::X2.index()], self.regs[Reg::Z2.index()]);
                        let (nx1, nz1, nx2, nz2) =
                            if swap { (x2, z2, x1, z1) } else { (x1, z1, x2, z2) };
                        self.write_reg(&mut rec, Reg::X1, nx1);
                        self.write_reg(&mut rec, Reg::Z1, nz1);
                        self.write_reg(&mut rec, Reg::X2, nx2);
                        self.write_reg(&mut rec, Reg::Z2, nz2);
                    }
                    Op::RouteInit { high } => {
                        let t = |r: Reg| self.regs[r.index()];
                        let (nx1, nz1, nx2, nz2) = if high {
                            (t(Reg::T6), t(Reg::T5), t(Reg::T10), t(Reg::T7))
                        } else {
                            (t(Reg::T2), t(Reg::T1), t(Reg::T6), t(Reg::T5))
                        };
                        self.write_reg(&mut rec, Reg::X1, nx1);
                        self.write_reg(&mut rec, Reg::Z1, nz1);
                        self.write_reg(&mut rec, Reg::X2, nx2);
                        self.write_reg(&mut rec, Reg::Z2, nz2);
                    }
                    Op::LoadBase => {
                        let (xp, one) = (self.xp, FieldElement::ONE);
                        self.write_reg(&mut rec, Reg::X1, xp);
                        self.write_reg(&mut rec, Reg::Z1, one);
                    }
                }
            }
            self.log.cycles.push(rec);
        }
        debug_assert_eq!(op_idx, ops.len(), "ops scheduled past the window");
        debug_assert!(flight.is_none(), "multiplication spills past the window");
        Ok(())
    }

    /// Degenerate initialization for a one-bit scalar: the ladder pair is
    /// (P, 2P) with no key bit left to process.
    pub(super) fn run_base_init(&mut self) -> Result<()> {
        use Reg::*;
        let ops = [
            (0, Op::LoadBase),
            (0, Op::Sqr { dst: Z2, x: Src::Xp }),
            (1, Op::Sqr { dst: X2, x: Src::R(Z2) }),
            (2, Op::Add { dst: X2, x: Src::R(X2), y: Src::B }),
        ];
        self.run_window(Phase::Init, 3, &ops)
    }

    /// The 45-cycle initialization slot: computes the projective x-lines of
    /// 2P, 3P and 4P from x alone in five multiplications, then routes
    /// (2P, 3P) or (3P, 4P) into the ladder registers depending on the
    /// second key bit. Both paths execute the same operation sequence.
    pub(super) fn run_init_slot(&mut self, second_bit: bool) -> Result<()> {
        use Reg::*;
        use Src::{R, Xp, B};
        let ops = [
            (0, Op::Sqr { dst: T1, x: Xp }), // x^2, the z-line of 2P
            (0, Op::Mult { dst: T3, a: Xp, b: R(T1) }), // x*x^2 (forwarded)
            (1, Op::Sqr { dst: T2, x: R(T1) }), // x^4
            (2, Op::Add { dst: T2, x: R(T2), y: B }), // x-line of 2P
            (3, Op::Sqr { dst: T8, x: R(T1) }),
            (4, Op::Sqr { dst: T8, x: R(T8) }), // x^8
            (5, Op::Sqr { dst: T10, x: R(T2) }),
            (6, Op::Sqr { dst: T10, x: R(T10) }), // (x^4+b)^4
            (9, Op::Mult { dst: T4, a: R(T2), b: R(T3) }), // product of the two sum factors
            (9, Op::Add { dst: T5, x: R(T2), y: R(T3) }),
            (10, Op::Sqr { dst: T5, x: R(T5) }), // z-line of 3P
            (18, Op::Mult { dst: T6, a: Xp, b: R(T5) }),
            (26, Op::Add { dst: T6, x: R(T6), y: R(T4) }), // x-line of 3P
            (27, Op::Mult { dst: T7, a: R(T2), b: R(T1) }),
            (35, Op::Sqr { dst: T7, x: R(T7) }), // z-line of 4P
            (36, Op::Mult { dst: T9, a: B, b: R(T8) }),
            (44, Op::Add { dst: T10, x: R(T10), y: R(T9) }), // x-line of 4P
            (44, Op::RouteInit { high: second_bit }),
        ];
        self.run_window(Phase::Init, super::INIT_SLOT_CYCLES, &ops)
    }

    /// One 54-cycle main-loop slot: conditional swap, the six-multiplication
    /// combined add-and-double, conditional swap back.
    pub(super) fn run_main_slot(&mut self, bit: bool, slot: usize, key_bit: usize) -> Result<()> {
        use Reg::*;
        use Src::{R, Xp, B};
        let ops = [
            (0, Op::CSwap { swap: bit }),
            (0, Op::Mult { dst: T1, a: R(X1), b: R(Z2) }), // XU*ZV
            (9, Op::Mult { dst: T2, a: R(X2), b: R(Z1) }), // XV*ZU
            (18, Op::Mult { dst: T3, a: R(T1), b: R(T2) }),
            (18, Op::Add { dst: T4, x: R(T1), y: R(T2) }),
            (19, Op::Sqr { dst: Z2, x: R(T4) }), // z-line of the sum
            (27, Op::Mult { dst: T5, a: Xp, b: R(Z2) }),
            (27, Op::Sqr { dst: T6, x: R(X1) }), // XU^2
            (28, Op::Sqr { dst: T7, x: R(Z1) }), // ZU^2
            (29, Op::Sqr { dst: T8, x: R(T6) }), // XU^4
            (36, Op::Mult { dst: Z1, a: R(T6), b: R(T7) }), // z-line of the double
            (37, Op::Sqr { dst: T7, x: R(T7) }), // ZU^4
            (38, Op::Add { dst: X2, x: R(T5), y: R(T3) }), // x-line of the sum
            (45, Op::Mult { dst: T2, a: B, b: R(T7) }),
            (53, Op::Add { dst: X1, x: R(T8), y: R(T2) }), // x-line of the double
            (53, Op::CSwap { swap: bit }),
        ];
        self.run_window(Phase::Slot { slot, key_bit }, super::MAIN_SLOT_CYCLES, &ops)
    }

    /// Back-conversion to affine coordinates: one Fermat inversion plus a
    /// handful of multiplications, run sequentially after the last slot.
    pub(super) fn run_postamble(&mut self) -> Result<AffinePoint> {
        use Reg::*;
        use Src::{R, Xp, Yp};
        let z1 = self.regs[Z1.index()];
        let z2 = self.regs[Z2.index()];
        if z1.is_zero() {
            return Ok(AffinePoint::Infinity);
        }
        if z2.is_zero() {
            // the pair degenerated to (kP, infinity), so kP = -P
            let ops = [(0, Op::Add { dst: T1, x: Xp, y: Yp })];
            self.run_window(Phase::Post, 1, &ops)?;
            return Ok(AffinePoint::Point {
                x: self.xp,
                y: self.xp.add(&self.yp),
            });
        }

        let mut ops: Vec<(usize, Op)> = Vec::with_capacity(490);
        let mut at = 0usize;
        let mut mult = |ops: &mut Vec<(usize, Op)>, at: &mut usize, dst, a, b| {
            ops.push((*at, Op::Mult { dst, a, b }));
            *at += super::CYCLES_PER_MULT;
        };
        let mut alu = |ops: &mut Vec<(usize, Op)>, at: &mut usize, op| {
            ops.push((*at, op));
            *at += 1;
        };

        mult(&mut ops, &mut at, T3, R(Z1), R(Z2));
        mult(&mut ops, &mut at, T4, Xp, R(Z1));
        mult(&mut ops, &mut at, T5, Xp, R(Z2));
        alu(&mut ops, &mut at, Op::Add { dst: T4, x: R(X1), y: R(T4) });
        alu(&mut ops, &mut at, Op::Add { dst: T5, x: R(X2), y: R(T5) });
        mult(&mut ops, &mut at, T6, R(T4), R(T5));
        alu(&mut ops, &mut at, Op::Sqr { dst: T7, x: Xp });
        alu(&mut ops, &mut at, Op::Add { dst: T7, x: R(T7), y: Yp });
        mult(&mut ops, &mut at, T7, R(T7), R(T3));
        alu(&mut ops, &mut at, Op::Add { dst: T6, x: R(T6), y: R(T7) });
        mult(&mut ops, &mut at, T8, Xp, R(T3));
        // Fermat chain: (x*Z1*Z2)^(2^233 - 2) into T9
        for i in 0..232 {
            let src = if i == 0 { T8 } else { T9 };
            alu(&mut ops, &mut at, Op::Sqr { dst: T9, x: R(src) });
            if i < 231 {
                mult(&mut ops, &mut at, T9, R(T9), R(T8));
            }
        }
        mult(&mut ops, &mut at, T10, R(X1), R(Z2));
        mult(&mut ops, &mut at, T10, R(T10), Xp);
        mult(&mut ops, &mut at, T10, R(T10), R(T9)); // affine x
        mult(&mut ops, &mut at, T6, R(T6), R(T9));
        alu(&mut ops, &mut at, Op::Add { dst: T5, x: Xp, y: R(T10) });
        mult(&mut ops, &mut at, T5, R(T5), R(T6));
        alu(&mut ops, &mut at, Op::Add { dst: T5, x: R(T5), y: Yp });

        self.run_window(Phase::Post, at, &ops)?;
        let point = AffinePoint::Point {
            x: self.regs[T10.index()],
            y: self.regs[T5.index()],
        };
        debug_assert!(point.on_curve());
        Ok(point)
    }
}
