//! Block-level power model: compresses an [`ActivityLog`] into one power
//! value per clock cycle.
//!
//! Register writes leak their Hamming distance, bus transfers the Hamming
//! weight of their payload, and the partial multiplier and ALU the Hamming
//! distance between the operands they latch in consecutive active cycles.
//! The multiplier term is scaled by the plan's gate count relative to the
//! schoolbook plan, so structurally different multipliers produce visibly
//! different traces.

use std::io::{BufRead, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::ladder::{ActivityLog, ScheduleLayout};
use crate::polymul::{gate_complexity, BitPoly, GateComplexity, MultiplierPlan, PM_WIDTH};

/// Number of set bits.
pub fn hamming_weight(v: &BitPoly) -> u64 {
    v.count_ones()
}

/// Number of differing bits between two equal-width vectors.
pub fn hamming_distance(a: &BitPoly, b: &BitPoly) -> Result<u64> {
    if a.width() != b.width() {
        return Err(Error::argument(format!(
            "hamming distance needs equal widths, got {} vs {}",
            a.width(),
            b.width()
        )));
    }
    Ok(a.limbs()
        .iter()
        .zip(b.limbs())
        .map(|(x, y)| (x ^ y).count_ones() as u64)
        .sum())
}

fn hw_fe(v: &FieldElement) -> u64 {
    v.limbs().iter().map(|l| l.count_ones() as u64).sum()
}

fn hd_fe(a: &FieldElement, b: &FieldElement) -> u64 {
    a.limbs()
        .iter()
        .zip(b.limbs())
        .map(|(x, y)| (x ^ y).count_ones() as u64)
        .sum()
}

/// Per-block leakage weights, in arbitrary power units per switched bit.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerProfile {
    pub name: String,
    /// Power per flipped register bit.
    pub weight_register: f64,
    /// Power per set bit transferred over the bus.
    pub weight_bus: f64,
    /// Power per estimated multiplier input toggle, before gate scaling.
    pub weight_pm: f64,
    /// Power per flipped ALU operand bit.
    pub weight_alu: f64,
    /// Static power per cycle.
    pub baseline: f64,
    /// Standard deviation of optional additive Gaussian noise; 0 keeps the
    /// trace noiseless.
    pub noise_sigma: f64,
}

impl PowerProfile {
    /// Multiplier activity scaling: the plan's gate count relative to the
    /// schoolbook partial multiplier.
    pub fn pm_gc_scale(&self, plan_gc: &GateComplexity) -> f64 {
        let classical = gate_complexity(&MultiplierPlan::pm1(), PM_WIDTH)
            .expect("schoolbook plan is always valid");
        plan_gc.total() as f64 / classical.total() as f64
    }
}

/// The built-in profiles.
///
/// "low-bus" buries the bus under the multiplier's switching; "high-bus"
/// makes bus transfers dominate the cycle power instead.
pub fn profile_library() -> Vec<PowerProfile> {
    vec![
        PowerProfile {
            name: "low-bus".into(),
            weight_register: 0.04,
            weight_bus: 0.25,
            weight_pm: 1.0,
            weight_alu: 0.25,
            baseline: 40.0,
            noise_sigma: 0.0,
        },
        PowerProfile {
            name: "high-bus".into(),
            weight_register: 0.04,
            weight_bus: 2.0,
            weight_pm: 0.5,
            weight_alu: 0.5,
            baseline: 40.0,
            noise_sigma: 0.0,
        },
    ]
}

pub fn profile_by_name(name: &str) -> Result<PowerProfile> {
    profile_library()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::validation(format!("unknown power profile {name:?}")))
}

/// Trace metadata carried alongside the per-cycle values.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceMeta {
    pub design: String,
    pub plan: String,
    pub profile: String,
    pub seed: u64,
    pub scalar_len: usize,
}

/// One power value per clock cycle plus the slot layout of the run.
#[derive(Debug, Clone)]
pub struct PowerTrace {
    pub values: Vec<f64>,
    pub layout: ScheduleLayout,
    pub meta: TraceMeta,
}

/// Maps an activity log to a compressed trace under `profile`.
///
/// Deterministic for a fixed `noise_seed`; with `noise_sigma == 0` the seed
/// has no effect on the values.
pub fn simulate(
    log: &ActivityLog,
    profile: &PowerProfile,
    plan_gc: &GateComplexity,
    layout: ScheduleLayout,
    meta: TraceMeta,
    noise_seed: u64,
) -> PowerTrace {
    let pm_scale = profile.pm_gc_scale(plan_gc);
    let mut rng = ChaCha8Rng::seed_from_u64(noise_seed);
    let normal = Normal::new(0.0, profile.noise_sigma.max(f64::MIN_POSITIVE)).unwrap();

    let mut prev_pm: Option<(BitPoly, BitPoly)> = None;
    let mut prev_alu: Option<(FieldElement, FieldElement)> = None;
    let mut values = Vec::with_capacity(log.len());
    for cycle in &log.cycles {
        let mut v = profile.baseline;
        for e in &cycle.reg_events {
            v += profile.weight_register * hd_fe(&e.old, &e.new) as f64;
        }
        for payload in &cycle.bus_events {
            v += profile.weight_bus * hw_fe(payload) as f64;
        }
        if let Some(pm) = &cycle.pm_event {
            let toggles = match &prev_pm {
                Some((pa, pb)) => {
                    hamming_distance(pa, &pm.a).unwrap() + hamming_distance(pb, &pm.b).unwrap()
                }
                None => hamming_weight(&pm.a) + hamming_weight(&pm.b),
            };
            v += profile.weight_pm * pm_scale * toggles as f64;
            prev_pm = Some((pm.a.clone(), pm.b.clone()));
        }
        if let Some(alu) = &cycle.alu_event {
            let toggles = match &prev_alu {
                Some((px, py)) => hd_fe(px, &alu.x) + hd_fe(py, &alu.y),
                None => hw_fe(&alu.x) + hw_fe(&alu.y),
            };
            v += profile.weight_alu * toggles as f64;
            prev_alu = Some((alu.x, alu.y));
        }
        if profile.noise_sigma > 0.0 {
            v += normal.sample(&mut rng);
        }
        values.push(v);
    }
    PowerTrace {
        values,
        layout,
        meta,
    }
}

// ---------------------------------------------------------------------------
// Trace file format: `# key=value` metadata lines, a `cycle,power` header,
// then one row per clock cycle. Power values are printed with 17 significant
// digits so the decimal form round-trips f64 bit-exactly.
// ---------------------------------------------------------------------------

/// Formats a power value with 17 significant digits.
pub fn format_power(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_trace<W: Write>(trace: &PowerTrace, mut w: W) -> Result<()> {
    writeln!(w, "# design={}", trace.meta.design)?;
    writeln!(w, "# plan={}", trace.meta.plan)?;
    writeln!(w, "# profile={}", trace.meta.profile)?;
    writeln!(w, "# seed={}", trace.meta.seed)?;
    writeln!(w, "# l={}", trace.meta.scalar_len)?;
    writeln!(w, "# init_slot_cycles={}", trace.layout.init_slot_cycles)?;
    writeln!(w, "# main_slot_cycles={}", trace.layout.main_slot_cycles)?;
    writeln!(w, "# slot_count={}", trace.layout.slot_count)?;
    writeln!(w, "cycle,power")?;
    for (i, v) in trace.values.iter().enumerate() {
        writeln!(w, "{i},{}", format_power(*v))?;
    }
    Ok(())
}

pub fn read_trace<R: BufRead>(r: R) -> Result<PowerTrace> {
    let mut meta_pairs = Vec::new();
    let mut values = Vec::new();
    let mut header_seen = false;
    for (idx, line) in r.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            let (k, v) = rest
                .split_once('=')
                .ok_or_else(|| Error::format(line_no, "metadata line is not key=value"))?;
            meta_pairs.push((k.to_string(), v.to_string()));
            continue;
        }
        if !header_seen {
            if line != "cycle,power" {
                return Err(Error::format(line_no, "expected header 'cycle,power'"));
            }
            header_seen = true;
            continue;
        }
        let (cycle, power) = line
            .split_once(',')
            .ok_or_else(|| Error::format(line_no, "expected 'cycle,power' row"))?;
        let cycle: usize = cycle
            .parse()
            .map_err(|_| Error::format(line_no, format!("bad cycle index {cycle:?}")))?;
        if cycle != values.len() {
            return Err(Error::format(
                line_no,
                format!("cycle {cycle} out of order, expected {}", values.len()),
            ));
        }
        let power: f64 = power
            .parse()
            .map_err(|_| Error::format(line_no, format!("bad power value {power:?}")))?;
        values.push(power);
    }
    if !header_seen {
        return Err(Error::format(0, "missing 'cycle,power' header"));
    }
    let lookup = |key: &str| -> Result<&str> {
        meta_pairs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Error::format(0, format!("missing metadata key {key:?}")))
    };
    let scalar_len: usize = lookup("l")?
        .parse()
        .map_err(|_| Error::format(0, "bad l metadata"))?;
    let layout = ScheduleLayout::for_scalar_len(scalar_len)
        .map_err(|e| Error::format(0, format!("unusable scalar length: {e}")))?;
    let check = |key: &str, want: usize| -> Result<()> {
        let got: usize = lookup(key)?
            .parse()
            .map_err(|_| Error::format(0, format!("bad {key} metadata")))?;
        if got != want {
            return Err(Error::format(
                0,
                format!("{key}={got} contradicts scalar length {scalar_len} (expected {want})"),
            ));
        }
        Ok(())
    };
    check("init_slot_cycles", layout.init_slot_cycles)?;
    check("main_slot_cycles", layout.main_slot_cycles)?;
    check("slot_count", layout.slot_count)?;
    let meta = TraceMeta {
        design: lookup("design")?.to_string(),
        plan: lookup("plan")?.to_string(),
        profile: lookup("profile")?.to_string(),
        seed: lookup("seed")?
            .parse()
            .map_err(|_| Error::format(0, "bad seed metadata"))?,
        scalar_len,
    };
    Ok(PowerTrace {
        values,
        layout,
        meta,
    })
}
