//! Carry-free polynomial multiplication formulae and their gate accounting.
//!
//! A [`MultiplierPlan`] describes how the 59-bit partial multiplier of the
//! field multiplication is wired: schoolbook, one Karatsuba or Winograd
//! level, or a randomized mix of methods. [`seg4_mul`] runs the fixed
//! 4-segment schedule that turns nine partial products into one 233-bit
//! polynomial product.

mod bits;
mod eval;
mod gc;
mod plan;

pub use bits::BitPoly;
pub use eval::{
    classical_mul, karatsuba2_mul, pm_apply, seg4_mul, seg4_rejoin, seg4_schedule, seg4_split,
    winograd3_mul, PartialSel, Seg4Job, Seg4Product, SegmentedOperand, FIELD_WIDTH,
};
pub use gc::{gate_complexity, seg4_gate_complexity, GateComplexity};
pub use plan::{
    mixed_plan_random, split2, split3, LeafMethod, MixedStyle, MultiplierPlan, PlanNode,
    Segmentation, PM_WIDTH,
};

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn all_fixed_plans() -> Vec<(String, MultiplierPlan)> {
        let mut plans = vec![
            ("pm1".into(), MultiplierPlan::pm1()),
            ("pm2".into(), MultiplierPlan::pm2()),
            ("pm3".into(), MultiplierPlan::pm3()),
        ];
        for seed in [0u64, 1, 2] {
            plans.push((format!("pm4:{seed}"), mixed_plan_random(seed, MixedStyle::Pm4)));
            plans.push((format!("pm5:{seed}"), mixed_plan_random(seed, MixedStyle::Pm5)));
        }
        plans
    }

    #[test]
    fn classical_small_cases() {
        // (t+1)^2 = t^2 + 1
        let t1 = BitPoly::from_u64(0b11, 2);
        let sq = classical_mul(&t1, &t1).unwrap();
        assert_eq!(sq, BitPoly::from_u64(0b101, 3));
        let zero = BitPoly::zeros(2);
        assert!(classical_mul(&t1, &zero).unwrap().is_zero());
        let wide = BitPoly::zeros(3);
        assert!(classical_mul(&t1, &wide).is_err());
    }

    #[test]
    fn karatsuba_small_cases() {
        let one = BitPoly::from_u64(1, 2);
        assert_eq!(karatsuba2_mul(&one, &one).unwrap(), BitPoly::from_u64(1, 3));
        assert!(karatsuba2_mul(&BitPoly::from_u64(1, 1), &BitPoly::from_u64(1, 1)).is_err());
    }

    #[test]
    fn winograd_small_cases() {
        // x^2 * x^2 = x^4 at width 3
        let x2 = BitPoly::from_u64(0b100, 3);
        assert_eq!(
            winograd3_mul(&x2, &x2).unwrap(),
            BitPoly::from_u64(0b10000, 5)
        );
        assert!(winograd3_mul(&BitPoly::from_u64(1, 2), &BitPoly::from_u64(1, 2)).is_err());
    }

    #[test]
    fn one_level_formulas_match_schoolbook() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for w in [2usize, 3, 4, 5, 6, 7, 8, 13, 31, 59, 64, 97] {
            for _ in 0..200 {
                let a = BitPoly::random(&mut rng, w);
                let b = BitPoly::random(&mut rng, w);
                let want = classical_mul(&a, &b).unwrap();
                assert_eq!(karatsuba2_mul(&a, &b).unwrap(), want, "k2 width {w}");
                if w >= 3 {
                    assert_eq!(winograd3_mul(&a, &b).unwrap(), want, "w3 width {w}");
                }
            }
        }
    }

    #[test]
    fn every_plan_matches_schoolbook() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for (name, plan) in all_fixed_plans() {
            for _ in 0..500 {
                let a = BitPoly::random(&mut rng, PM_WIDTH);
                let b = BitPoly::random(&mut rng, PM_WIDTH);
                let want = classical_mul(&a, &b).unwrap();
                let (got, _) = pm_apply(&plan, &a, &b).unwrap();
                assert_eq!(got, want, "plan {name}");
            }
        }
    }

    #[test]
    fn pm_apply_rejects_width_mismatch() {
        let a = BitPoly::zeros(58);
        assert!(pm_apply(&MultiplierPlan::pm1(), &a, &a).is_err());
    }

    #[test]
    fn different_plans_same_product_different_tallies() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = BitPoly::random(&mut rng, PM_WIDTH);
        let b = BitPoly::random(&mut rng, PM_WIDTH);
        let (p1, gc1) = pm_apply(&MultiplierPlan::pm1(), &a, &b).unwrap();
        let (p2, gc2) = pm_apply(&MultiplierPlan::pm2(), &a, &b).unwrap();
        assert_eq!(p1, p2);
        assert_ne!(gc1, gc2);
    }

    #[test]
    fn static_gc_equals_instrumented_gc() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let mut plans = all_fixed_plans();
        // some odd-width hand-built trees as well
        for w in [5usize, 9, 16, 21, 33, 59] {
            plans.push((
                format!("k2c:{w}"),
                MultiplierPlan::split_over(Segmentation::Karatsuba2, w, LeafMethod::Classical),
            ));
            plans.push((
                format!("w3k:{w}"),
                MultiplierPlan::split_over(Segmentation::Winograd3, w, LeafMethod::Karatsuba2),
            ));
            plans.push((
                format!("c2w:{w}"),
                MultiplierPlan::split_over(Segmentation::Classical2, w, LeafMethod::Winograd3),
            ));
        }
        for (name, plan) in plans {
            if plan.validate().is_err() {
                continue; // leaf width too small at this node width
            }
            let a = BitPoly::random(&mut rng, plan.width);
            let b = BitPoly::random(&mut rng, plan.width);
            let (_, dynamic) = pm_apply(&plan, &a, &b).unwrap();
            let stat = gate_complexity(&plan, plan.width).unwrap();
            assert_eq!(stat, dynamic, "plan {name}");
        }
    }

    #[test]
    fn tallies_are_input_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let plan = mixed_plan_random(3, MixedStyle::Pm5);
        let mut seen = None;
        for _ in 0..20 {
            let a = BitPoly::random(&mut rng, PM_WIDTH);
            let b = BitPoly::random(&mut rng, PM_WIDTH);
            let (_, gc) = pm_apply(&plan, &a, &b).unwrap();
            if let Some(prev) = seen {
                assert_eq!(prev, gc);
            }
            seen = Some(gc);
        }
    }

    /// Bit-level gate simulator: multiplies by literally evaluating one AND
    /// per partial-product bit and one XOR per column reduction step. Used
    /// only to validate the analytic schoolbook tally.
    fn schoolbook_gate_sim(a: &BitPoly, b: &BitPoly) -> (BitPoly, GateComplexity) {
        let (wa, wb) = (a.width(), b.width());
        let mut out = BitPoly::zeros(wa + wb - 1);
        let mut driven = vec![false; wa + wb - 1];
        let mut gc = GateComplexity::default();
        for i in 0..wa {
            for j in 0..wb {
                let partial = a.bit(i) & b.bit(j);
                gc.and_count += 1;
                let col = i + j;
                if driven[col] {
                    gc.xor_count += 1;
                    out.set_bit(col, out.bit(col) ^ partial);
                } else {
                    out.set_bit(col, partial);
                    driven[col] = true;
                }
            }
        }
        (out, gc)
    }

    #[test]
    fn classical_formula_matches_bit_level_instrumentation() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for n in 1usize..=64 {
            let a = BitPoly::random(&mut rng, n);
            let b = BitPoly::random(&mut rng, n);
            let (product, gc) = schoolbook_gate_sim(&a, &b);
            assert_eq!(product, classical_mul(&a, &b).unwrap());
            let plan = MultiplierPlan::leaf(LeafMethod::Classical, n);
            assert_eq!(gc, gate_complexity(&plan, n).unwrap(), "n = {n}");
            assert_eq!(gc.and_count, (n * n) as u64);
            assert_eq!(gc.xor_count, ((n - 1) * (n - 1)) as u64);
        }
    }

    #[test]
    fn segment_split_roundtrips() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let zero = seg4_split(&BitPoly::zeros(FIELD_WIDTH)).unwrap();
        assert!(zero.a0.is_zero() && zero.a1.is_zero() && zero.a2.is_zero() && zero.a3.is_zero());
        for _ in 0..1000 {
            let a = BitPoly::random(&mut rng, FIELD_WIDTH);
            let s = seg4_split(&a).unwrap();
            assert_eq!(s.a0.width(), 59);
            assert_eq!(s.a3.width(), 56);
            assert_eq!(seg4_rejoin(&s), a);
        }
        // t^232 sits in the top bit of the 56-bit top segment
        let mut top = BitPoly::zeros(FIELD_WIDTH);
        top.set_bit(232, true);
        let s = seg4_split(&top).unwrap();
        assert!(s.a3.bit(55));
        assert_eq!(s.a3.count_ones(), 1);
        assert!(s.a0.is_zero() && s.a1.is_zero() && s.a2.is_zero());
    }

    #[test]
    fn schedule_is_nine_fixed_jobs() {
        let jobs = seg4_schedule(&MultiplierPlan::pm1()).unwrap();
        assert_eq!(jobs.len(), 9);
        assert_eq!(jobs, seg4_schedule(&MultiplierPlan::pm1()).unwrap());
        for (i, job) in jobs.iter().enumerate() {
            assert_eq!(job.index, i);
        }
        assert_eq!(jobs[0].level1, PartialSel::Low);
        assert_eq!(jobs[8].level2, PartialSel::Mix);
        // a 30-bit plan cannot drive the field multiplier
        let narrow = MultiplierPlan::leaf(LeafMethod::Classical, 30);
        assert!(seg4_schedule(&narrow).is_err());
    }

    #[test]
    fn seg4_matches_schoolbook_at_233_bits() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        for (name, plan) in all_fixed_plans() {
            for _ in 0..50 {
                let a = BitPoly::random(&mut rng, FIELD_WIDTH);
                let b = BitPoly::random(&mut rng, FIELD_WIDTH);
                let got = seg4_mul(&a, &b, &plan).unwrap();
                let want = classical_mul(&a, &b).unwrap();
                assert_eq!(got.product, want, "plan {name}");
                assert_eq!(got.pm_inputs.len(), 9);
                for (pa, pb) in &got.pm_inputs {
                    assert_eq!(pa.width(), PM_WIDTH);
                    assert_eq!(pb.width(), PM_WIDTH);
                }
            }
        }
    }

    #[test]
    fn seg4_static_gc_matches_instrumented() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for (name, plan) in all_fixed_plans() {
            let a = BitPoly::random(&mut rng, FIELD_WIDTH);
            let b = BitPoly::random(&mut rng, FIELD_WIDTH);
            let got = seg4_mul(&a, &b, &plan).unwrap();
            let stat = seg4_gate_complexity(&plan).unwrap();
            assert_eq!(stat, got.gc, "plan {name}");
        }
    }

    #[test]
    fn random_plan_products_stay_correct() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for seed in 0..20u64 {
            for style in [MixedStyle::Pm4, MixedStyle::Pm5] {
                let plan = mixed_plan_random(seed, style);
                let a = BitPoly::random(&mut rng, PM_WIDTH);
                let b = BitPoly::random(&mut rng, PM_WIDTH);
                let (got, _) = pm_apply(&plan, &a, &b).unwrap();
                assert_eq!(got, classical_mul(&a, &b).unwrap());
            }
        }
    }

    #[test]
    fn winograd_width_four_fallback_split() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..500 {
            let a = BitPoly::random(&mut rng, 4);
            let b = BitPoly::random(&mut rng, 4);
            assert_eq!(
                winograd3_mul(&a, &b).unwrap(),
                classical_mul(&a, &b).unwrap()
            );
        }
        let plan = MultiplierPlan::leaf(LeafMethod::Winograd3, 4);
        let a = BitPoly::random(&mut rng, 4);
        let (_, dynamic) = pm_apply(&plan, &a, &a).unwrap();
        assert_eq!(dynamic, gate_complexity(&plan, 4).unwrap());
    }

    proptest::proptest! {
        #[test]
        fn prop_plan_product_equals_schoolbook(seed in 0u64..500, a0 in 0u64.., a1 in 0u64.., b0 in 0u64.., b1 in 0u64..) {
            let style = if seed % 2 == 0 { MixedStyle::Pm4 } else { MixedStyle::Pm5 };
            let plan = mixed_plan_random(seed, style);
            let mut a = BitPoly::zeros(PM_WIDTH);
            let mut b = BitPoly::zeros(PM_WIDTH);
            for i in 0..PM_WIDTH {
                let (wa, wb) = if i < 32 { (a0, b0) } else { (a1, b1) };
                a.set_bit(i, (wa >> (i % 32)) & 1 == 1);
                b.set_bit(i, (wb >> (i % 32)) & 1 == 1);
            }
            let (got, _) = pm_apply(&plan, &a, &b).unwrap();
            proptest::prop_assert_eq!(got, classical_mul(&a, &b).unwrap());
        }
    }
}
