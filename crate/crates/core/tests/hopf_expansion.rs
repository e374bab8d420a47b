use cubic_melnikov::abelian::moments_at;
use cubic_melnikov::charts::{alpha_transforms, h1_center_annulus, h1_poly, h2_poly, quad_perturbation, Center, Chart};
use cubic_melnikov::hopf::*;
use cubic_melnikov::poly::Poly2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, SQRT_2};

#[test]
fn closed_forms_match_theta_quadrature_for_random_deltas() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let d = HopfDelta::new([0; 4].map(|_| rng.gen_range(-1.0..1.0)));
        for c in [Center::First, Center::Second] {
            let s = hopf_coefficients(&d, c);
            assert!(!s.flagged, "{c:?} {:?}", s);
            assert!(s.odd_residual < 1e-12);
            worst = worst.max(s.max_discrepancy);
        }
    }
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn second_center_from_the_translated_chart() {
    // translate H1 by −√2 and the perturbation with it, then expand directly
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let alpha = [0; 4].map(|_| rng.gen_range(-1.0..1.0));
        let h1 = h1_poly().shift_x(-SQRT_2);
        let diff: f64 = [(0.3, 0.2), (-0.4, 0.7)]
            .iter()
            .map(|&(x, y)| (h1.eval(x, y) - h2_poly().eval(x, y)).abs())
            .sum();
        assert!(diff < 1e-13);
        let g = quad_perturbation(alpha).g.shift_x(-SQRT_2);
        let s = series_numeric(&h1, &g, 4, 96);
        let d = d_closed(alpha);
        for l in 0..4 {
            assert!((-s[2 * l + 2] - d[l]).abs() < 1e-8, "d{} {} {}", l + 1, -s[2 * l + 2], d[l]);
        }
        let hat = alpha_transforms(alpha, Chart::Alpha, Chart::AlphaHat);
        let gh = quad_perturbation(hat).g;
        for &(x, y) in &[(0.1, 0.2), (-0.3, 0.5)] {
            assert!((g.eval(x, y) - gh.eval(x, y)).abs() < 1e-13);
        }
    }
}

#[test]
fn radius_series_residual_order() {
    let h1 = h1_poly();
    for order in 2..=6usize {
        let mut ratios = Vec::new();
        for m in [0.02, 0.01] {
            let worst = (0..64)
                .map(|k| {
                    let t = k as f64 * std::f64::consts::TAU / 64.0;
                    let r = radius_series(t, m, order).unwrap();
                    (h1.eval(r * t.cos(), r * t.sin()) + 2.0 * m * m).abs()
                })
                .fold(0.0f64, f64::max);
            ratios.push(worst);
        }
        // halving m divides the residual by about 2^(order+2)
        let slope = (ratios[0] / ratios[1]).log2();
        assert!(slope > order as f64 + 1.5, "order {order}: slope {slope}");
    }
}

#[test]
fn series_matches_direct_quadrature_near_both_centers() {
    let alpha = [0.3, -0.5, 0.8, 0.6];
    for c in [Center::First, Center::Second] {
        let an = h1_center_annulus(c).unwrap();
        let pert = quad_perturbation(alpha);
        let gap = |u: f64| {
            let (_, m) = moments_at(&h1_poly(), &an, -2.0 * u, 3).unwrap();
            m.melnikov(&pert) - series_value(c, alpha, u)
        };
        // the remainder is O(u^5): halving u divides it by about 32
        let (g1, g2) = (gap(4e-3), gap(2e-3));
        let slope = (g1 / g2).log2();
        assert!((slope - 5.0).abs() < 0.3, "{c:?}: {g1} {g2} slope {slope}");
    }
}

#[test]
fn three_zero_designs_at_both_centers() {
    for c in [Center::First, Center::Second] {
        let d = design_hopf_three(c, 1.0).unwrap();
        assert_eq!(d.scan.count(), 3, "{c:?}");
        assert!(d.window.0 < d.window.1 && d.window.1 < 0.0);
        // the realized zeros sit near the designed u = w/4, w/2, w
        for (z, u) in d.zeros.iter().zip(d.target_u.iter().rev()) {
            let rel = (-z / 2.0 - u).abs() / u;
            eprintln!("{c:?}: zero u={} target {u}", -z / 2.0);
            assert!(rel < 0.4, "{c:?}: zero {z} vs target {u}");
        }
        // alternating staircase b1 << b2 << b3 in magnitude
        let b = d.coefficients;
        assert!(b[0].abs() < b[1].abs() && b[1].abs() < b[2].abs());
        assert!(b[0] * b[1] < 0.0 && b[1] * b[2] < 0.0);
    }
}

#[test]
fn zero_alpha3_is_rejected() {
    assert!(design_hopf_three(Center::First, 0.0).is_err());
}

#[test]
fn a4_oracle_from_the_enclosed_area() {
    // α = (1,0,0,0): I = ∮ y dx = −area, so area/π = m² + 11/8 m⁴ + 259/64 m⁶ + 16235/1024 m⁸ + …
    let an = h1_center_annulus(Center::First).unwrap();
    let pert = quad_perturbation([1.0, 0.0, 0.0, 0.0]);
    let mut prev = f64::NAN;
    for u in [4e-3, 2e-3, 1e-3] {
        let (_, m) = moments_at(&h1_poly(), &an, -2.0 * u, 1).unwrap();
        let area = -m.melnikov(&pert) / PI;
        let rest = (area - u - 11.0 / 8.0 * u * u - 259.0 / 64.0 * u.powi(3)) / u.powi(4);
        prev = rest;
    }
    assert!((prev - 16235.0 / 1024.0).abs() < 0.5, "{prev}");
    assert!((prev - PRINTED_A4_ALPHA0).abs() > 5.0);
    let _ = Poly2::default();
}
