//! Instrumented evaluation of multiplier plans.
//!
//! Every function here both computes the carry-free product and tallies the
//! two-input AND/XOR gates the corresponding combinational circuit spends on
//! it. The tallies depend only on operand widths and the plan shape, never
//! on operand values; `gc` recomputes the same counts from the plan alone,
//! and the two routes are cross-checked in tests.

use super::bits::BitPoly;
use super::gc::GateComplexity;
use super::plan::{split2, split3, LeafMethod, MultiplierPlan, PlanNode, Segmentation, PM_WIDTH};
use crate::error::{Error, Result};

/// XOR of two segment buses; the narrow one rides the wide bus zero-padded,
/// so only `min(width)` gate positions see both inputs.
fn xor_counted(a: &BitPoly, b: &BitPoly, t: &mut GateComplexity) -> BitPoly {
    t.xor_count += a.width().min(b.width()) as u64;
    BitPoly::xor_padded(a, b)
}

/// Output accumulator for shifted partial products.
///
/// Terms must arrive lowest offset first with no coverage gaps; a position
/// only costs an XOR gate once a previous term has already driven it. The
/// internal bus may run wider than the semantic product (segment-sum buses
/// carry structurally cancelling top bits); `finish` trims it back.
struct Accum {
    bits: BitPoly,
    defined: usize,
}

impl Accum {
    fn new(capacity: usize) -> Self {
        Accum {
            bits: BitPoly::zeros(capacity),
            defined: 0,
        }
    }

    fn add_term(&mut self, src: &BitPoly, shift: usize, t: &mut GateComplexity) {
        assert!(shift <= self.defined, "gap in recombination coverage");
        let end = shift + src.width();
        if self.defined > shift {
            t.xor_count += (self.defined.min(end) - shift) as u64;
        }
        self.bits.xor_in_place(src, shift);
        self.defined = self.defined.max(end);
    }

    fn finish(self, width: usize) -> BitPoly {
        if self.bits.width() == width {
            return self.bits;
        }
        debug_assert!(
            self.bits.extract(width, self.bits.width() - width).is_zero(),
            "recombination bits above the product width must cancel"
        );
        self.bits.extract(0, width)
    }
}

/// Schoolbook product: `wa*wb` AND gates and one XOR gate per column entry
/// past the first, i.e. `wa*wb - (wa+wb-1)` of them.
fn classical_raw(a: &BitPoly, b: &BitPoly, t: &mut GateComplexity) -> BitPoly {
    let (wa, wb) = (a.width(), b.width());
    debug_assert!(wa >= 1 && wb >= 1);
    t.and_count += (wa * wb) as u64;
    t.xor_count += (wa * wb - (wa + wb - 1)) as u64;
    let mut out = BitPoly::zeros(wa + wb - 1);
    for i in 0..wa {
        if a.bit(i) {
            out.xor_in_place(b, i);
        }
    }
    out
}

type Child<'a> = &'a mut dyn FnMut(usize, &BitPoly, &BitPoly, &mut GateComplexity) -> BitPoly;

/// One Karatsuba level: split at m = ceil(w/2), three partial products,
/// recombine as d0 + (d0+d1+d2)*x^m + d1*x^2m.
fn eval_k2(a: &BitPoly, b: &BitPoly, t: &mut GateComplexity, child: Child) -> BitPoly {
    let w = a.width();
    let (m, h) = split2(w);
    let a0 = a.extract(0, m);
    let a1 = a.extract(m, h);
    let b0 = b.extract(0, m);
    let b1 = b.extract(m, h);
    let asum = xor_counted(&a0, &a1, t);
    let bsum = xor_counted(&b0, &b1, t);
    let d0 = child(0, &a0, &b0, t);
    let d1 = child(1, &a1, &b1, t);
    let d2 = child(2, &asum, &bsum, t);
    let mid = xor_counted(&xor_counted(&d0, &d1, t), &d2, t);
    let mut out = Accum::new((2 * w - 1).max(m + mid.width()));
    out.add_term(&d0, 0, t);
    out.add_term(&mid, m, t);
    out.add_term(&d1, 2 * m, t);
    out.finish(2 * w - 1)
}

/// One Winograd level: three segments, six partial products
/// d_i = a_i*b_i and d_ij = (a_i+a_j)(b_i+b_j), recombined as
/// c0 + c1*x^m + c2*x^2m + c3*x^3m + c4*x^4m with
/// c1 = d01+d0+d1, c2 = d02+d0+d1+d2, c3 = d12+d1+d2.
fn eval_w3(a: &BitPoly, b: &BitPoly, t: &mut GateComplexity, child: Child) -> BitPoly {
    let w = a.width();
    let (m, r) = split3(w);
    let a0 = a.extract(0, m);
    let a1 = a.extract(m, m);
    let a2 = a.extract(2 * m, r);
    let b0 = b.extract(0, m);
    let b1 = b.extract(m, m);
    let b2 = b.extract(2 * m, r);
    let a01 = xor_counted(&a0, &a1, t);
    let a02 = xor_counted(&a0, &a2, t);
    let a12 = xor_counted(&a1, &a2, t);
    let b01 = xor_counted(&b0, &b1, t);
    let b02 = xor_counted(&b0, &b2, t);
    let b12 = xor_counted(&b1, &b2, t);
    let d0 = child(0, &a0, &b0, t);
    let d1 = child(1, &a1, &b1, t);
    let d2 = child(2, &a2, &b2, t);
    let d01 = child(3, &a01, &b01, t);
    let d02 = child(4, &a02, &b02, t);
    let d12 = child(5, &a12, &b12, t);
    let c1 = xor_counted(&xor_counted(&d01, &d0, t), &d1, t);
    let c2 = xor_counted(&xor_counted(&xor_counted(&d02, &d0, t), &d1, t), &d2, t);
    let c3 = xor_counted(&xor_counted(&d12, &d1, t), &d2, t);
    let capacity = (2 * w - 1)
        .max(2 * m + c2.width())
        .max(3 * m + c3.width());
    let mut out = Accum::new(capacity);
    out.add_term(&d0, 0, t);
    out.add_term(&c1, m, t);
    out.add_term(&c2, 2 * m, t);
    out.add_term(&c3, 3 * m, t);
    out.add_term(&d2, 4 * m, t);
    out.finish(2 * w - 1)
}

/// Classical two-segment split: all four cross products, recombined as
/// p00 + (p01+p10)*x^m + p11*x^2m.
fn eval_c2(a: &BitPoly, b: &BitPoly, t: &mut GateComplexity, child: Child) -> BitPoly {
    let w = a.width();
    let (m, _h) = split2(w);
    let a0 = a.extract(0, m);
    let a1 = a.extract(m, w - m);
    let b0 = b.extract(0, m);
    let b1 = b.extract(m, w - m);
    let p00 = child(0, &a0, &b0, t);
    let p01 = child(1, &a0, &b1, t);
    let p10 = child(2, &a1, &b0, t);
    let p11 = child(3, &a1, &b1, t);
    let mid = xor_counted(&p01, &p10, t);
    let mut out = Accum::new((2 * w - 1).max(m + mid.width()));
    out.add_term(&p00, 0, t);
    out.add_term(&mid, m, t);
    out.add_term(&p11, 2 * m, t);
    out.finish(2 * w - 1)
}

/// Evaluates `plan` on equal-width operands matching the plan width.
pub(crate) fn eval_node(
    plan: &MultiplierPlan,
    a: &BitPoly,
    b: &BitPoly,
    t: &mut GateComplexity,
) -> BitPoly {
    debug_assert_eq!(a.width(), plan.width);
    debug_assert_eq!(b.width(), plan.width);
    let mut classical_child =
        |_: usize, x: &BitPoly, y: &BitPoly, t: &mut GateComplexity| classical_raw(x, y, t);
    match &plan.node {
        PlanNode::Leaf(LeafMethod::Classical) => classical_raw(a, b, t),
        PlanNode::Leaf(LeafMethod::Karatsuba2) => eval_k2(a, b, t, &mut classical_child),
        PlanNode::Leaf(LeafMethod::Winograd3) => eval_w3(a, b, t, &mut classical_child),
        PlanNode::Split { seg, children } => {
            let mut plan_child =
                |i: usize, x: &BitPoly, y: &BitPoly, t: &mut GateComplexity| {
                    let c = &children[i];
                    // cross products of a classical2 split run on the wider bus
                    let xp = x.zero_extended(c.width);
                    let yp = y.zero_extended(c.width);
                    eval_node(c, &xp, &yp, t)
                };
            match seg {
                Segmentation::Karatsuba2 => eval_k2(a, b, t, &mut plan_child),
                Segmentation::Winograd3 => eval_w3(a, b, t, &mut plan_child),
                Segmentation::Classical2 => eval_c2(a, b, t, &mut plan_child),
            }
        }
    }
}

fn check_equal_widths(a: &BitPoly, b: &BitPoly) -> Result<()> {
    if a.width() != b.width() {
        return Err(Error::argument(format!(
            "operand widths differ: {} vs {}",
            a.width(),
            b.width()
        )));
    }
    Ok(())
}

/// Schoolbook carry-free product; the oracle every other formula is
/// checked against.
pub fn classical_mul(a: &BitPoly, b: &BitPoly) -> Result<BitPoly> {
    check_equal_widths(a, b)?;
    if a.width() < 1 {
        return Err(Error::argument("classical needs width >= 1"));
    }
    Ok(classical_raw(a, b, &mut GateComplexity::default()))
}

/// One-level Karatsuba with schoolbook partial products.
pub fn karatsuba2_mul(a: &BitPoly, b: &BitPoly) -> Result<BitPoly> {
    check_equal_widths(a, b)?;
    if a.width() < 2 {
        return Err(Error::argument("karatsuba2 needs width >= 2"));
    }
    let mut child =
        |_: usize, x: &BitPoly, y: &BitPoly, t: &mut GateComplexity| classical_raw(x, y, t);
    Ok(eval_k2(a, b, &mut GateComplexity::default(), &mut child))
}

/// One-level Winograd with schoolbook partial products.
pub fn winograd3_mul(a: &BitPoly, b: &BitPoly) -> Result<BitPoly> {
    check_equal_widths(a, b)?;
    if a.width() < 3 {
        return Err(Error::argument("winograd3 needs width >= 3"));
    }
    let mut child =
        |_: usize, x: &BitPoly, y: &BitPoly, t: &mut GateComplexity| classical_raw(x, y, t);
    Ok(eval_w3(a, b, &mut GateComplexity::default(), &mut child))
}

/// Runs a full multiplier plan on operands of exactly the plan width and
/// returns the product together with the exact gate tally of the run.
pub fn pm_apply(
    plan: &MultiplierPlan,
    a: &BitPoly,
    b: &BitPoly,
) -> Result<(BitPoly, GateComplexity)> {
    plan.validate()?;
    if a.width() != plan.width || b.width() != plan.width {
        return Err(Error::plan(format!(
            "operand widths {}/{} do not match plan width {}",
            a.width(),
            b.width(),
            plan.width
        )));
    }
    let mut t = GateComplexity::default();
    let product = eval_node(plan, a, b, &mut t);
    Ok((product, t))
}

// ---------------------------------------------------------------------------
// 4-segment field-multiplier schedule: 233-bit products out of 9 partial
// products on the 59-bit partial-multiplier bus, one per clock cycle.
// ---------------------------------------------------------------------------

pub const FIELD_WIDTH: usize = 233;
/// Split point of the outer Karatsuba level (two 59-bit segments).
const HALF: usize = 118;
/// Width of the high half: segments a3 (56 bits) and a2 (59 bits).
const HI_WIDTH: usize = 115;
/// Output bus of one partial multiplication.
const PM_OUT: usize = 2 * PM_WIDTH - 1;

/// A 233-bit operand cut into the widths of the field multiplier:
/// 56 bits for the top segment and 59 for the rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentedOperand {
    pub a0: BitPoly,
    pub a1: BitPoly,
    pub a2: BitPoly,
    pub a3: BitPoly,
}

pub fn seg4_split(a: &BitPoly) -> Result<SegmentedOperand> {
    if a.width() != FIELD_WIDTH {
        return Err(Error::argument(format!(
            "segmentation needs a {FIELD_WIDTH}-bit operand, got {}",
            a.width()
        )));
    }
    Ok(SegmentedOperand {
        a0: a.extract(0, 59),
        a1: a.extract(59, 59),
        a2: a.extract(118, 59),
        a3: a.extract(177, 56),
    })
}

pub fn seg4_rejoin(s: &SegmentedOperand) -> BitPoly {
    let mut out = BitPoly::zeros(FIELD_WIDTH);
    out.xor_in_place(&s.a0, 0);
    out.xor_in_place(&s.a1, 59);
    out.xor_in_place(&s.a2, 118);
    out.xor_in_place(&s.a3, 177);
    out
}

/// Which partial product of a Karatsuba level a job computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartialSel {
    Low,
    High,
    Mix,
}

const SELS: [PartialSel; 3] = [PartialSel::Low, PartialSel::High, PartialSel::Mix];

/// One partial multiplication of the fixed field-multiplier calculation
/// plan; job `index` executes in clock cycle `index` of the 9-cycle field
/// multiplication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Seg4Job {
    pub index: usize,
    pub level1: PartialSel,
    pub level2: PartialSel,
}

/// The fixed 9-job schedule: outer-level products in Low, High, Mix order,
/// each expanded into its inner-level Low, High, Mix products.
pub fn seg4_schedule(plan: &MultiplierPlan) -> Result<Vec<Seg4Job>> {
    check_pm_plan(plan)?;
    let mut jobs = Vec::with_capacity(9);
    for (i1, &level1) in SELS.iter().enumerate() {
        for (i2, &level2) in SELS.iter().enumerate() {
            jobs.push(Seg4Job {
                index: i1 * 3 + i2,
                level1,
                level2,
            });
        }
    }
    Ok(jobs)
}

fn check_pm_plan(plan: &MultiplierPlan) -> Result<()> {
    plan.validate()?;
    if plan.width != PM_WIDTH {
        return Err(Error::plan(format!(
            "field multiplication needs a {PM_WIDTH}-bit partial multiplier, got width {}",
            plan.width
        )));
    }
    Ok(())
}

/// Result of one scheduled 233-bit polynomial multiplication.
pub struct Seg4Product {
    /// The unreduced 465-bit product.
    pub product: BitPoly,
    /// Gate tally: 9 partial multiplications plus all recombination XORs.
    pub gc: GateComplexity,
    /// The operand pair latched by the partial multiplier in each of the
    /// nine clock cycles, zero-extended to the PM bus width.
    pub pm_inputs: Vec<(BitPoly, BitPoly)>,
}

/// Multiplies two 233-bit polynomials through the 4-segment schedule.
pub fn seg4_mul(a: &BitPoly, b: &BitPoly, plan: &MultiplierPlan) -> Result<Seg4Product> {
    check_pm_plan(plan)?;
    let sa = seg4_split(a)?;
    let sb = seg4_split(b)?;
    let mut t = GateComplexity::default();

    let al = a.extract(0, HALF);
    let ah = a.extract(HALF, HI_WIDTH);
    let bl = b.extract(0, HALF);
    let bh = b.extract(HALF, HI_WIDTH);
    let amid = xor_counted(&al, &ah, &mut t);
    let bmid = xor_counted(&bl, &bh, &mut t);

    // inner-level segment pairs per outer product, in schedule order
    let pad = |p: &BitPoly| p.zero_extended(PM_WIDTH);
    let groups: [[(BitPoly, BitPoly); 3]; 3] = [
        [
            (sa.a0.clone(), sb.a0.clone()),
            (sa.a1.clone(), sb.a1.clone()),
            (
                xor_counted(&sa.a0, &sa.a1, &mut t),
                xor_counted(&sb.a0, &sb.a1, &mut t),
            ),
        ],
        [
            (sa.a2.clone(), sb.a2.clone()),
            (sa.a3.clone(), sb.a3.clone()),
            (
                xor_counted(&sa.a2, &sa.a3, &mut t),
                xor_counted(&sb.a2, &sb.a3, &mut t),
            ),
        ],
        [
            (amid.extract(0, 59), bmid.extract(0, 59)),
            (amid.extract(59, 59), bmid.extract(59, 59)),
            (
                xor_counted(&amid.extract(0, 59), &amid.extract(59, 59), &mut t),
                xor_counted(&bmid.extract(0, 59), &bmid.extract(59, 59), &mut t),
            ),
        ],
    ];

    let mut pm_inputs = Vec::with_capacity(9);
    let mut outer = Vec::with_capacity(3);
    for group in &groups {
        let mut prods = Vec::with_capacity(3);
        for (pa, pb) in group {
            let pa = pad(pa);
            let pb = pad(pb);
            prods.push(eval_node(plan, &pa, &pb, &mut t));
            pm_inputs.push((pa, pb));
        }
        // inner Karatsuba recombination at m = 59 over the 117-bit PM buses
        let mid = xor_counted(&xor_counted(&prods[0], &prods[1], &mut t), &prods[2], &mut t);
        let mut buf = Accum::new(HALF + PM_OUT);
        buf.add_term(&prods[0], 0, &mut t);
        buf.add_term(&mid, 59, &mut t);
        buf.add_term(&prods[1], HALF, &mut t);
        outer.push(buf.finish(HALF + PM_OUT));
    }

    // outer Karatsuba recombination at m = 118; the high-group bus keeps the
    // zero wires of its padded top segment, so the raw bus runs 6 bits wider
    // than the 465-bit product and gets trimmed by `finish`.
    let mid = xor_counted(&xor_counted(&outer[0], &outer[1], &mut t), &outer[2], &mut t);
    let mut buf = Accum::new(2 * HALF + outer[1].width());
    buf.add_term(&outer[0], 0, &mut t);
    buf.add_term(&mid, HALF, &mut t);
    buf.add_term(&outer[1], 2 * HALF, &mut t);
    let product = buf.finish(2 * FIELD_WIDTH - 1);

    Ok(Seg4Product {
        product,
        gc: t,
        pm_inputs,
    })
}
