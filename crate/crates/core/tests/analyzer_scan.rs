use cubic_melnikov::abelian::{melnikov_eval, PerturbationPoly};
use cubic_melnikov::analyzer::*;
use cubic_melnikov::family::{annuli, classify_region, HamiltonianParams};
use cubic_melnikov::poly::Poly2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p(a: f64, b: f64, c: f64) -> HamiltonianParams {
    HamiltonianParams::new(a, b, c).unwrap()
}

/// `g = y·Π(H − h_k)`, so that `I(h) = I01(h)·Π(h − h_k)`.
fn planted(q: &HamiltonianParams, roots: &[f64]) -> PerturbationPoly {
    let h = q.as_poly();
    let mut g = Poly2::new(vec![(0, 1, 1.0)]);
    for &r in roots {
        let shifted = &h + &Poly2::new(vec![(0, 0, -r)]);
        g = &g * &shifted;
    }
    let n = g.degree();
    PerturbationPoly { n, f: Poly2::default(), g }
}

#[test]
fn zero_perturbation_is_identically_zero() {
    let q = p(3.0, -3.0, 1.0);
    for an in annuli(&q).unwrap() {
        let r = zero_scan(&q, &PerturbationPoly::zero(3), &an, 32, None).unwrap();
        assert!(r.identically_zero && r.zeros.is_empty());
        assert!(r.warnings.iter().any(|w| w.contains("identically zero")));
    }
}

#[test]
fn area_perturbation_has_no_zeros() {
    for (a, b, c) in [(3.0, -3.0, 1.0), (1.0, -1.0, 1.0), (-1.0, 1.0, 2.0), (0.0, 1.0, 1.0), (-1.0, 0.5, -2.0)] {
        let q = p(a, b, c);
        let pert = PerturbationPoly::new(1, &[], &[(0, 1, 1.0)]).unwrap();
        for an in annuli(&q).unwrap() {
            let r = zero_scan(&q, &pert, &an, 48, None).unwrap();
            assert!(r.zeros.is_empty(), "({a},{b},{c}) {}: {:?}", an.name, r.zeros);
            assert!(r.ceiling_respected);
        }
    }
}

#[test]
fn planted_zeros_are_recovered() {
    let q = p(3.0, -3.0, 1.0);
    let ans = annuli(&q).unwrap();
    for an in &ans {
        let (lo, hi) = scan_range(an, None).unwrap();
        let roots: Vec<f64> = [0.2, 0.45, 0.8].iter().map(|t| lo + t * (hi - lo)).collect();
        let pert = planted(&q, &roots);
        let r = zero_scan(&q, &pert, an, 64, None).unwrap();
        assert_eq!(r.zeros.len(), 3, "{}: {:?}", an.name, r.zeros);
        // the expanded product y·Π(H − h_k) cancels in floating point, which
        // limits how well the planted roots can be located
        for (z, want) in r.zeros.iter().zip(&roots) {
            assert!((z.h - want).abs() < 1e-8 * (1.0 + want.abs()), "{}: {} vs {want}", an.name, z.h);
            assert!(z.width <= 1e-10);
            let v = melnikov_eval(&q, &pert, an, z.h).unwrap();
            assert!(v.abs() < 1e-8 * r.scale, "{}: I({})={v:e} scale {:e}", an.name, z.h, r.scale);
        }
        assert!(r.zeros.windows(2).all(|w| w[0].h < w[1].h));
        // slopes alternate
        assert!(r.zeros.windows(2).all(|w| w[0].slope == -w[1].slope));
    }
}

#[test]
fn refined_zeros_are_small_relative_to_the_grid_maximum() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let q = p(3.0, -3.0, 1.0);
    let mut seen = 0;
    for an in annuli(&q).unwrap() {
        for _ in 0..12 {
            let n = rng.gen_range(3..=7);
            let pert = PerturbationPoly::random(n, || rng.gen_range(-1.0..1.0));
            let r = zero_scan(&q, &pert, &an, 48, None).unwrap();
            for z in &r.zeros {
                let v = melnikov_eval(&q, &pert, &an, z.h).unwrap();
                assert!(v.abs() < 1e-9 * r.scale, "{}: I({})={v:e} scale {:e}", an.name, z.h, r.scale);
                seen += 1;
            }
        }
    }
    assert!(seen >= 3, "{seen}");
}

#[test]
fn zero_near_an_end_is_found() {
    let q = p(1.0, -1.0, 1.0);
    let an = annuli(&q).unwrap().into_iter().find(|a| a.name.starts_with("y-loop upper")).unwrap();
    let (lo, hi) = scan_range(&an, None).unwrap();
    let root = hi - 1e-3 * (hi - lo);
    let r = zero_scan(&q, &planted(&q, &[root]), &an, 64, None).unwrap();
    assert_eq!(r.zeros.len(), 1);
    assert!((r.zeros[0].h - root).abs() < 1e-9);
}

#[test]
fn double_zero_is_suspected_not_counted() {
    let q = p(3.0, -3.0, 1.0);
    let an = annuli(&q).unwrap().into_iter().find(|a| a.name.starts_with("exterior")).unwrap();
    let grid = ScanGrid::new(&q, &an, 9, 64, None).unwrap();
    // double root just off a grid point: |I| there is ~1e-12 of the scale
    let h0 = grid.hs[30] + 1e-6;
    let r = zero_scan_on(&q, &planted(&q, &[h0, h0]), &grid, true).unwrap();
    assert!(r.zeros.is_empty(), "{:?}", r.zeros);
    assert!(r.suspected_even.iter().any(|&h| (h - h0).abs() < 1e-5), "{:?}", r.suspected_even);
}

#[test]
fn small_grid_is_rejected() {
    let q = p(3.0, -3.0, 1.0);
    let an = &annuli(&q).unwrap()[0];
    assert!(zero_scan(&q, &PerturbationPoly::zero(1), an, 16, None).is_err());
}

#[test]
fn random_perturbations_respect_the_ceiling() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for (a, b, c) in [(3.0, -3.0, 1.0), (1.0, -1.0, 1.0)] {
        let q = p(a, b, c);
        let label = classify_region(&q).unwrap();
        let grids: Vec<ScanGrid> = annuli(&q).unwrap().iter().map(|an| ScanGrid::new(&q, an, 5, 64, None).unwrap()).collect();
        for _ in 0..500 {
            let n = rng.gen_range(1..=5);
            let pert = PerturbationPoly::random(n, || rng.gen_range(-1.0..1.0));
            let total: usize = grids.iter().map(|g| zero_scan_on(&q, &pert, g, false).unwrap().zeros.len()).sum();
            let ceiling = region_ceiling(&label, n).unwrap();
            assert!((total as i64) <= ceiling, "({a},{b},{c}) n={n}: {total} zeros > {ceiling}");
        }
    }
}
