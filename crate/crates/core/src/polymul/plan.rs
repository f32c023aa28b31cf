use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Operand width of the partial-multiplier block: the widest of the four
/// segments a 233-bit operand is cut into.
pub const PM_WIDTH: usize = 59;

/// Atomic multiplication routine evaluated at a plan leaf. The segmented
/// methods perform one level of segmentation and compute their partial
/// products with the schoolbook method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafMethod {
    Classical,
    Karatsuba2,
    Winograd3,
}

impl LeafMethod {
    pub fn name(self) -> &'static str {
        match self {
            LeafMethod::Classical => "classical",
            LeafMethod::Karatsuba2 => "karatsuba2",
            LeafMethod::Winograd3 => "winograd3",
        }
    }

    /// Narrowest operand the method is defined for.
    pub fn min_width(self) -> usize {
        match self {
            LeafMethod::Classical => 1,
            LeafMethod::Karatsuba2 => 2,
            LeafMethod::Winograd3 => 3,
        }
    }
}

/// How an internal plan node cuts its operands, and therefore how many
/// partial products (children) it has.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segmentation {
    /// Two segments, three products: lo*lo, hi*hi, (lo+hi)*(lo+hi).
    Karatsuba2,
    /// Three segments, six products: the three squares-of-segments plus
    /// the three pairwise sum products.
    Winograd3,
    /// Two segments, all four cross products.
    Classical2,
}

impl Segmentation {
    pub fn name(self) -> &'static str {
        match self {
            Segmentation::Karatsuba2 => "karatsuba2",
            Segmentation::Winograd3 => "winograd3",
            Segmentation::Classical2 => "classical2",
        }
    }

    pub fn child_count(self) -> usize {
        match self {
            Segmentation::Karatsuba2 => 3,
            Segmentation::Winograd3 => 6,
            Segmentation::Classical2 => 4,
        }
    }

    pub fn min_width(self) -> usize {
        match self {
            Segmentation::Karatsuba2 | Segmentation::Classical2 => 2,
            Segmentation::Winograd3 => 3,
        }
    }

    /// Widths of the partial products' operands, in evaluation order.
    ///
    /// Cross products of unequal segments run on a bus as wide as the wider
    /// segment, with the narrow operand zero-extended.
    pub fn child_widths(self, width: usize) -> Vec<usize> {
        match self {
            Segmentation::Karatsuba2 => {
                let (m, h) = split2(width);
                vec![m, h, m]
            }
            Segmentation::Winograd3 => {
                let (m, r) = split3(width);
                let s = m.max(r);
                vec![m, m, r, m, s, s]
            }
            Segmentation::Classical2 => {
                let (m, h) = split2(width);
                vec![m, m, m, h]
            }
        }
    }
}

/// `width -> (low-segment width m, high-segment width h)`, m >= h.
pub fn split2(width: usize) -> (usize, usize) {
    let m = width.div_ceil(2);
    (m, width - m)
}

/// `width -> (low-segment width m, top-segment width r)`; the two low
/// segments are m bits each. Width 4 is the one case where the ceiling
/// rule would leave an empty top segment, so it falls back to m = 1.
pub fn split3(width: usize) -> (usize, usize) {
    let mut m = width.div_ceil(3);
    if width <= 2 * m {
        // only width 4 hits this among widths >= 3
        m = width / 3;
    }
    (m, width - 2 * m)
}

/// A recursive description of a partial-multiplication formula.
///
/// Leaves name an atomic routine; internal nodes segment their operands and
/// hand each partial product to a child plan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplierPlan {
    pub width: usize,
    pub node: PlanNode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanNode {
    Leaf(LeafMethod),
    Split {
        seg: Segmentation,
        children: Vec<MultiplierPlan>,
    },
}

/// Which of the paper-style partial-multiplier designs to build at random.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixedStyle {
    /// One segmentation level with four sub-multipliers of random method.
    Pm4,
    /// Two segmentation levels, both chosen at random, with random leaves.
    Pm5,
}

impl MultiplierPlan {
    pub fn leaf(method: LeafMethod, width: usize) -> Self {
        MultiplierPlan {
            width,
            node: PlanNode::Leaf(method),
        }
    }

    /// Builds a segmentation node with the given child plans.
    pub fn split(seg: Segmentation, width: usize, children: Vec<MultiplierPlan>) -> Self {
        MultiplierPlan {
            width,
            node: PlanNode::Split { seg, children },
        }
    }

    /// Segmentation node whose children are all leaves of one method.
    pub fn split_over(seg: Segmentation, width: usize, method: LeafMethod) -> Self {
        let children = seg
            .child_widths(width)
            .into_iter()
            .map(|w| MultiplierPlan::leaf(method, w))
            .collect();
        MultiplierPlan::split(seg, width, children)
    }

    /// PM1: the plain schoolbook multiplier.
    pub fn pm1() -> Self {
        MultiplierPlan::leaf(LeafMethod::Classical, PM_WIDTH)
    }

    /// PM2: one Karatsuba level over schoolbook sub-multipliers.
    pub fn pm2() -> Self {
        MultiplierPlan::split_over(Segmentation::Karatsuba2, PM_WIDTH, LeafMethod::Classical)
    }

    /// PM3: one Winograd level over schoolbook sub-multipliers.
    pub fn pm3() -> Self {
        MultiplierPlan::split_over(Segmentation::Winograd3, PM_WIDTH, LeafMethod::Classical)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.node {
            PlanNode::Leaf(method) => {
                if self.width < method.min_width() {
                    return Err(Error::plan(format!(
                        "{} leaf needs width >= {}, got {}",
                        method.name(),
                        method.min_width(),
                        self.width
                    )));
                }
            }
            PlanNode::Split { seg, children } => {
                if self.width < seg.min_width() {
                    return Err(Error::plan(format!(
                        "{} segmentation needs width >= {}, got {}",
                        seg.name(),
                        seg.min_width(),
                        self.width
                    )));
                }
                if children.len() != seg.child_count() {
                    return Err(Error::plan(format!(
                        "{} segmentation takes {} children, got {}",
                        seg.name(),
                        seg.child_count(),
                        children.len()
                    )));
                }
                let widths = seg.child_widths(self.width);
                for (child, expect) in children.iter().zip(widths) {
                    if child.width != expect {
                        return Err(Error::plan(format!(
                            "child of {}:{} has width {}, expected {}",
                            seg.name(),
                            self.width,
                            child.width,
                            expect
                        )));
                    }
                    child.validate()?;
                }
            }
        }
        Ok(())
    }

    /// Number of leaves, i.e. atomic multiplier blocks, in the plan.
    pub fn leaf_count(&self) -> usize {
        match &self.node {
            PlanNode::Leaf(_) => 1,
            PlanNode::Split { children, .. } => children.iter().map(|c| c.leaf_count()).sum(),
        }
    }
}

/// Deterministically builds a randomized mixed plan for 59-bit operands.
///
/// Draw order is depth-first: an internal node draws its segmentation
/// before descending, and each leaf draws its method, so a fixed seed
/// always reproduces the same tree.
pub fn mixed_plan_random(seed: u64, style: MixedStyle) -> MultiplierPlan {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plan = match style {
        MixedStyle::Pm4 => {
            let children = Segmentation::Classical2
                .child_widths(PM_WIDTH)
                .into_iter()
                .map(|w| MultiplierPlan::leaf(random_method(&mut rng), w))
                .collect();
            MultiplierPlan::split(Segmentation::Classical2, PM_WIDTH, children)
        }
        MixedStyle::Pm5 => {
            let top = random_seg(&mut rng);
            let children = top
                .child_widths(PM_WIDTH)
                .into_iter()
                .map(|w| {
                    let seg = random_seg(&mut rng);
                    let grandchildren = seg
                        .child_widths(w)
                        .into_iter()
                        .map(|gw| MultiplierPlan::leaf(random_method(&mut rng), gw))
                        .collect();
                    MultiplierPlan::split(seg, w, grandchildren)
                })
                .collect();
            MultiplierPlan::split(top, PM_WIDTH, children)
        }
    };
    debug_assert!(plan.validate().is_ok());
    plan
}

fn random_method<R: Rng>(rng: &mut R) -> LeafMethod {
    match rng.gen_range(0..3u8) {
        0 => LeafMethod::Classical,
        1 => LeafMethod::Karatsuba2,
        _ => LeafMethod::Winograd3,
    }
}

fn random_seg<R: Rng>(rng: &mut R) -> Segmentation {
    match rng.gen_range(0..3u8) {
        0 => Segmentation::Karatsuba2,
        1 => Segmentation::Winograd3,
        _ => Segmentation::Classical2,
    }
}

// Text form: a leaf is `method:width`; a segmentation node is
// `segmentation:width(child,child,...)`.
impl fmt::Display for MultiplierPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.node {
            PlanNode::Leaf(m) => write!(f, "{}:{}", m.name(), self.width),
            PlanNode::Split { seg, children } => {
                write!(f, "{}:{}(", seg.name(), self.width)?;
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FromStr for MultiplierPlan {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parser = PlanParser { s, pos: 0 };
        let plan = parser.parse_plan()?;
        parser.skip_ws();
        if parser.pos != parser.s.len() {
            return Err(Error::plan(format!(
                "trailing input in plan at byte {}",
                parser.pos
            )));
        }
        plan.validate()?;
        Ok(plan)
    }
}

struct PlanParser<'a> {
    s: &'a str,
    pos: usize,
}

impl PlanParser<'_> {
    fn skip_ws(&mut self) {
        while self.s[self.pos..].starts_with(|c: char| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn parse_plan(&mut self) -> Result<MultiplierPlan> {
        self.skip_ws();
        let rest = &self.s[self.pos..];
        let name_len = rest
            .find(|c: char| !c.is_ascii_alphanumeric())
            .unwrap_or(rest.len());
        let name = &rest[..name_len];
        self.pos += name_len;
        if !self.eat(':') {
            return Err(Error::plan(format!("expected ':' after '{name}'")));
        }
        let width = self.parse_number()?;
        if self.eat('(') {
            let seg = match name {
                "karatsuba2" => Segmentation::Karatsuba2,
                "winograd3" => Segmentation::Winograd3,
                "classical2" => Segmentation::Classical2,
                other => return Err(Error::plan(format!("unknown segmentation '{other}'"))),
            };
            let mut children = Vec::new();
            loop {
                children.push(self.parse_plan()?);
                self.skip_ws();
                if self.eat(',') {
                    continue;
                }
                if self.eat(')') {
                    break;
                }
                return Err(Error::plan("expected ',' or ')' in plan".to_string()));
            }
            Ok(MultiplierPlan::split(seg, width, children))
        } else {
            let method = match name {
                "classical" => LeafMethod::Classical,
                "karatsuba2" => LeafMethod::Karatsuba2,
                "winograd3" => LeafMethod::Winograd3,
                other => return Err(Error::plan(format!("unknown method '{other}'"))),
            };
            Ok(MultiplierPlan::leaf(method, width))
        }
    }

    fn parse_number(&mut self) -> Result<usize> {
        let rest = &self.s[self.pos..];
        let len = rest
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(Error::plan("expected a width".to_string()));
        }
        let n = rest[..len]
            .parse()
            .map_err(|_| Error::plan("width out of range".to_string()))?;
        self.pos += len;
        Ok(n)
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.s[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }
}
