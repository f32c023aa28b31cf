//! Per-clock-cycle switching activity of one kP run: the observable the
//! power model consumes, standing in for a netlist's toggle report.

use std::io::Write;

use crate::field::FieldElement;
use crate::polymul::BitPoly;

/// Writable registers of the accelerator. The four ladder registers hold
/// the projective pair between slots; the T registers hold intermediates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reg {
    X1,
    Z1,
    X2,
    Z2,
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    T7,
    T8,
    T9,
    T10,
}

pub const REG_COUNT: usize = 14;

impl Reg {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Reg::X1 => "X1",
            Reg::Z1 => "Z1",
            Reg::X2 => "X2",
            Reg::Z2 => "Z2",
            Reg::T1 => "T1",
            Reg::T2 => "T2",
            Reg::T3 => "T3",
            Reg::T4 => "T4",
            Reg::T5 => "T5",
            Reg::T6 => "T6",
            Reg::T7 => "T7",
            Reg::T8 => "T8",
            Reg::T9 => "T9",
            Reg::T10 => "T10",
        }
    }
}

/// One register update: the flip from `old` to `new` is what leaks.
#[derive(Debug, Clone, Copy)]
pub struct RegEvent {
    pub reg: Reg,
    pub old: FieldElement,
    pub new: FieldElement,
}

/// The operand pair latched by the partial multiplier this cycle.
#[derive(Debug, Clone)]
pub struct PmEvent {
    pub a: BitPoly,
    pub b: BitPoly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AluOp {
    Add,
    Sqr,
}

/// One ALU operation; squarings carry the operand twice.
#[derive(Debug, Clone, Copy)]
pub struct AluEvent {
    pub op: AluOp,
    pub x: FieldElement,
    pub y: FieldElement,
}

/// Which part of the run a cycle belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Initialization, including the shortened first key-bit slot.
    Init,
    /// Main-loop slot `slot` processing key bit `key_bit`.
    Slot { slot: usize, key_bit: usize },
    /// Back-conversion to affine coordinates.
    Post,
}

/// Everything that switched in one clock cycle.
#[derive(Debug, Clone)]
pub struct CycleRecord {
    pub phase: Phase,
    pub reg_events: Vec<RegEvent>,
    pub bus_events: Vec<FieldElement>,
    pub pm_event: Option<PmEvent>,
    pub alu_event: Option<AluEvent>,
}

impl CycleRecord {
    pub fn new(phase: Phase) -> Self {
        CycleRecord {
            phase,
            reg_events: Vec::new(),
            bus_events: Vec::new(),
            pm_event: None,
            alu_event: None,
        }
    }

    /// Value-free shape of the cycle, for balance checks: which registers
    /// were written, how many bus transfers ran, whether the multiplier
    /// latched operands, and which ALU opcode fired.
    pub fn opcode_signature(&self) -> (Vec<&'static str>, usize, bool, Option<AluOp>) {
        (
            self.reg_events.iter().map(|e| e.reg.name()).collect(),
            self.bus_events.len(),
            self.pm_event.is_some(),
            self.alu_event.map(|e| e.op),
        )
    }
}

/// Ordered per-cycle switching records of one kP run; cycle indices are the
/// vector positions, contiguous from 0.
#[derive(Debug, Clone, Default)]
pub struct ActivityLog {
    pub cycles: Vec<CycleRecord>,
}

impl ActivityLog {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Diagnostic text dump, one line per cycle.
    pub fn dump_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (i, c) in self.cycles.iter().enumerate() {
            let phase = match c.phase {
                Phase::Init => "init".to_string(),
                Phase::Slot { slot, key_bit } => format!("slot={slot} bit=k{key_bit}"),
                Phase::Post => "post".to_string(),
            };
            write!(w, "cycle {i:5} {phase:16}")?;
            for e in &c.reg_events {
                let hd = hamming_distance_fe(&e.old, &e.new);
                write!(w, " reg:{}~{hd}", e.reg.name())?;
            }
            if !c.bus_events.is_empty() {
                let hw: u64 = c.bus_events.iter().map(hamming_weight_fe).sum();
                write!(w, " bus:{}x~{hw}", c.bus_events.len())?;
            }
            if c.pm_event.is_some() {
                write!(w, " pm")?;
            }
            if let Some(alu) = &c.alu_event {
                write!(
                    w,
                    " alu:{}",
                    match alu.op {
                        AluOp::Add => "add",
                        AluOp::Sqr => "sqr",
                    }
                )?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

pub(crate) fn hamming_weight_fe(v: &FieldElement) -> u64 {
    v.limbs().iter().map(|l| l.count_ones() as u64).sum()
}

pub(crate) fn hamming_distance_fe(a: &FieldElement, b: &FieldElement) -> u64 {
    a.limbs()
        .iter()
        .zip(b.limbs())
        .map(|(x, y)| (x ^ y).count_ones() as u64)
        .sum()
}
