use cubic_melnikov::charts::{alpha_transforms, Chart, LoopSide};
use cubic_melnikov::homoclinic::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// 30-digit tanh-sinh values of the same integrals over the whole branch.
const ORACLE_A: [f64; 7] = [
    0.530116646135371858449,
    0.293966627827080764975,
    0.054380497948369057248,
    0.191264580766921482306,
    2.518927046809653430432,
    1.155305954819163117368,
    1.445335277210464747873,
];

#[test]
fn loop_constants_match_the_oracle() {
    let c = loop_constants().unwrap();
    for k in 0..7 {
        assert!((c.a[k] - ORACLE_A[k]).abs() < 1e-12, "A{k}: {} vs {}", c.a[k], ORACLE_A[k]);
    }
    for (k, p) in c.pieces.iter().enumerate() {
        assert!((p.iter().sum::<f64>() - c.a[4 + k]).abs() < 1e-15);
        assert!(p.iter().all(|v| *v > 0.0));
    }
}

#[test]
fn loop_constants_do_not_depend_on_the_split() {
    let base = loop_constants().unwrap();
    for (x1, x2) in [(0.02, 0.8), (0.2, 0.95), (0.5, 0.75)] {
        let c = loop_constants_with(LoopGeometry::new(x1, x2).unwrap(), 1e-13).unwrap();
        for k in 0..7 {
            assert!((c.a[k] - base.a[k]).abs() < 1e-10, "split ({x1}, {x2}) A{k}");
        }
    }
    assert!(LoopGeometry::new(0.8, 0.9).is_err());
}

#[test]
fn area_constants_match_traced_loop_limit() {
    // ∮ y dx, ∮ xy dx, ... on orbits just inside the right loop tend to A0..A3
    let c = loop_constants().unwrap();
    let h = -1e-9;
    for k in 0..4 {
        let mut e = [0.0; 4];
        e[k] = 1.0;
        let v = loop_integral(LoopSide::Right, e, h).unwrap();
        let want = c.a[k];
        assert!((v - want).abs() < 1e-7, "k={k}: {v} vs {want}");
    }
}

#[test]
fn saddle_constant_oracle() {
    let q = saddle_constant().unwrap();
    assert!((q + 2.386294361119890618).abs() < 1e-7, "q = {q}");
}

fn random_bar(rng: &mut ChaCha8Rng) -> [f64; 4] {
    [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]
}

#[test]
fn truncated_expansion_error_is_second_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let bar = random_bar(&mut rng);
        let e = default_expansion(bar).unwrap();
        for side in [LoopSide::Right, LoopSide::Left, LoopSide::Outer] {
            let sgn = if side == LoopSide::Outer { 1.0 } else { -1.0 };
            let mut ratios = Vec::new();
            for k in 2..=5 {
                let h = sgn * 10f64.powi(-k);
                let direct = loop_integral(side, bar, h).unwrap();
                let res = direct - e.eval(side, h);
                ratios.push(res.abs() / (h * h * h.abs().ln()).abs());
                // the neglected term is O(h²)
                assert!(res.abs() < 20.0 * h * h, "{side:?} h={h} res={res:e}");
            }
            assert!(ratios.windows(2).all(|w| w[1] < w[0] + 1e-3), "{side:?} {ratios:?}");
        }
    }
}

#[test]
fn reflected_alpha1_swaps_loop_integrals() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let bar = random_bar(&mut rng);
        let mirror = [bar[0], -bar[1], bar[2], bar[3]];
        for h in [-0.05, -1e-3] {
            let a = loop_integral(LoopSide::Right, bar, h).unwrap();
            let b = loop_integral(LoopSide::Left, mirror, h).unwrap();
            assert!((a - b).abs() < 1e-12, "{a} {b}");
        }
    }
}

#[test]
fn outer_integral_is_the_sum_of_the_loops_at_the_separatrix() {
    let bar = [0.3, -0.4, 0.7, 1.0];
    let e = default_expansion(bar).unwrap();
    let out = loop_integral(LoopSide::Outer, bar, 1e-10).unwrap();
    assert!((out - e.c0).abs() < 1e-7);
    assert!((e.c0 - e.c0_1 - e.c0_2).abs() < 1e-15);
    assert!((e.c2 - e.c2_1 - e.c2_2).abs() < 1e-15);
}

#[test]
fn mu_zero_c3_with_printed_and_computed_constants() {
    let printed = mu_zero_c3(&PRINTED_A).unwrap();
    assert!((printed - 0.2718858872).abs() < 1e-8, "{printed}");
    let ours = mu_zero_c3(&loop_constants().unwrap().a).unwrap();
    assert!((ours - 0.0788027642).abs() < 1e-8, "{ours}");
}

#[test]
fn three_zeros_inside_the_right_loop() {
    let d = design_homoclinic_three(1.0, None).unwrap();
    assert_eq!(d.scan.count(), 3);
    let zs: Vec<f64> = d.scan.zeros.iter().map(|z| z.h).collect();
    for (z, t) in zs.iter().zip(d.target_h.iter()) {
        assert!((z / t - 1.0).abs() < 1e-6, "{z} vs {t}");
    }
    let [m1, m2, m3] = d.expansion.mu;
    assert!(m1.abs() < m2.abs() && m2.abs() < m3.abs() && m3.abs() < d.expansion.c3.abs());
    assert!(d.outer_count <= 2);
    println!("alpha_bar = {:?}, mu = {:?}, zeros = {zs:?}", d.alpha_bar, d.expansion.mu);
}

#[test]
fn distributions_with_both_loops_follow_the_symmetric_constraint() {
    let out = distribution_search(DistributionTuple([0, 0, 2, 2, 1]), 1.0, None).unwrap();
    assert_eq!(out.realized, out.target);
    assert!(out.alpha_bar[1].abs() < 1e-12);
    // ᾱ1 = 0 is α1 = √2 α3
    assert!((out.alpha[1] - std::f64::consts::SQRT_2 * out.alpha[3]).abs() < 1e-12);
    let back = alpha_transforms(out.alpha_bar, Chart::AlphaBar, Chart::Alpha);
    assert!(back.iter().zip(&out.alpha).all(|(a, b)| (a - b).abs() < 1e-12));
}

#[test]
fn unlisted_tuples_are_rejected() {
    assert!(distribution_search(DistributionTuple([3, 3, 0, 0, 0]), 1.0, None).is_err());
    assert!(distribution_search(DistributionTuple([3, 0, 0, 0, 0]), 0.0, None).is_err());
}

#[test]
#[ignore = "all eighteen distributions; about a minute in release"]
fn all_eighteen_distributions() {
    for t in DISTRIBUTIONS {
        let out = distribution_search(DistributionTuple(t), 1.0, None).unwrap();
        println!("{} attempts={} scale={:e} alpha={:?}", out.realized, out.attempts, out.scale, out.alpha);
        assert_eq!(out.realized.0, t);
    }
}

#[test]
fn loop_constants_are_stable_under_tighter_tolerance() {
    let g = LoopGeometry::default();
    let coarse = loop_constants_with(g, 1e-10).unwrap();
    let fine = loop_constants_with(g, 5e-11).unwrap();
    for k in 0..7 {
        let bound = if k < 4 { 1e-8 } else { 1e-6 };
        assert!((coarse.a[k] - fine.a[k]).abs() < bound, "A{k}");
    }
}
