use cubic_melnikov::family::{annuli, classify_region, critical_points, AnnulusKind, Hamiltonian, HamiltonianParams};
use cubic_melnikov::tracer::{trace_orbit, Orbit};

const SAMPLES: &[(&str, [f64; 3])] = &[
    ("D1+(1)", [-2.0, -3.0, 1.0]),
    ("D1+(2)", [-1.0, -3.0, 1.0]),
    ("D1+(3)", [-0.5, -3.0, 1.0]),
    ("l1+", [-1.0, 2.0, 1.0]),
    ("D2+", [-1.0, 3.0, 1.0]),
    ("l2+", [-1.0, -2.0, 1.0]),
    ("D3+", [-1.0, 1.0, 1.0]),
    ("D3+", [-1.0, -1.5, 1.0]),
    ("D3+", [-1.0, 0.0, 1.0]),
    ("D4+(1)", [0.1, -1.0, 1.0]),
    ("D4+(2)", [0.5, -1.5, 1.0]),
    ("D4+(3)", [0.1, -1.5, 1.0]),
    ("D4+(1)", [0.0, -0.5, 1.0]),
    ("D5+", [1.0, 0.0, 0.5]),
    ("D5+", [0.5, -1.0, 1.0]),
    ("l3+", [2.0, -2.0, 1.0]),
    ("D6+", [3.0, -3.0, 1.0]),
    ("D1-(1)", [-4.0, 7.0, -1.0]),
    ("D1-(2)", [-4.0, 5.0, -1.0]),
    ("D1-(3)", [-4.0, 4.5, -1.0]),
    ("D2-", [-1.0, -1.0, -1.0]),
    ("l1-", [-1.0, 2.0, -2.0]),
    ("D3-", [-1.0, 3.0, -3.0]),
];

fn winding(o: &Orbit, c: [f64; 2]) -> f64 {
    let mut total = 0.0;
    for w in o.points.windows(2) {
        let a0 = (w[0][1] - c[1]).atan2(w[0][0] - c[0]);
        let a1 = (w[1][1] - c[1]).atan2(w[1][0] - c[0]);
        let mut d = a1 - a0;
        while d > std::f64::consts::PI {
            d -= 2.0 * std::f64::consts::PI;
        }
        while d < -std::f64::consts::PI {
            d += 2.0 * std::f64::consts::PI;
        }
        total += d;
    }
    total / (2.0 * std::f64::consts::PI)
}

#[test]
fn labels_match_samples() {
    for (label, [a, b, c]) in SAMPLES {
        let p = HamiltonianParams::new(*a, *b, *c).unwrap();
        assert_eq!(classify_region(&p).unwrap().region.to_string(), *label, "{a} {b} {c}");
    }
}

#[test]
fn every_annulus_traces_closed_orbits() {
    for (label, [a, b, c]) in SAMPLES {
        let p = HamiltonianParams::new(*a, *b, *c).unwrap();
        let ann = annuli(&p).unwrap_or_else(|e| panic!("{label}: {e}"));
        assert!(!ann.is_empty(), "{label}");
        let crit = critical_points(&p).unwrap();
        for s in &ann {
            for end in [s.h_lo, s.h_hi] {
                if end.is_finite() {
                    assert!(
                        crit.points.iter().any(|q| (q.level - end).abs() < 1e-12),
                        "{label} annulus {} endpoint {end} is not a critical level",
                        s.name
                    );
                }
            }
            let (lo, hi) = s.capped_range(3.0);
            for f in [0.01, 0.25, 0.5, 0.75, 0.99] {
                let h = lo + f * (hi - lo);
                let o = trace_orbit(&p, s, h, 64).unwrap_or_else(|e| panic!("{label} {} h={h}: {e}", s.name));
                assert!(o.closure_gap < 1e-10, "{label} {} gap {}", s.name, o.closure_gap);
                assert!(o.max_level_error(&p) <= 1e-12 * h.abs().max(1.0) * 4.0, "{label} {}", s.name);
                assert!(o.area() > 0.0);
                let c = match s.kind {
                    AnnulusKind::Exterior => Some([0.0, 0.0]),
                    _ => s.center,
                };
                if let Some(c) = c {
                    let w = winding(&o, c);
                    assert!((w - 1.0).abs() < 1e-9, "{label} {} h={h} winding {w}", s.name);
                }
                if s.kind == AnnulusKind::PairLoop {
                    // the enclosed saddle sits on the seed ray's origin
                    let w = winding(&o, s.ray.origin);
                    assert!((w - 1.0).abs() < 1e-9, "{label} {} h={h} pair winding {w}", s.name);
                }
            }
        }
    }
}

#[test]
fn area_converges_under_refinement() {
    let p = HamiltonianParams::new(3.0, -3.0, 1.0).unwrap();
    for s in annuli(&p).unwrap() {
        let (lo, hi) = s.capped_range(2.0);
        let h = 0.5 * (lo + hi);
        let a1 = trace_orbit(&p, &s, h, 64).unwrap().area();
        let a4 = trace_orbit(&p, &s, h, 256).unwrap().area();
        assert!((a1 - a4).abs() < 1e-9 * a4.abs(), "{} {a1} {a4}", s.name);
    }
}

#[test]
fn area_is_monotone_across_annuli() {
    let p = HamiltonianParams::new(-1.0, -3.0, 1.0).unwrap();
    for s in annuli(&p).unwrap() {
        let (lo, hi) = s.capped_range(2.0);
        let areas: Vec<f64> = (1..20)
            .map(|k| trace_orbit(&p, &s, lo + (hi - lo) * k as f64 / 20.0, 64).unwrap().area())
            .collect();
        let inc = areas.windows(2).all(|w| w[1] > w[0]);
        let dec = areas.windows(2).all(|w| w[1] < w[0]);
        assert!(inc || dec, "{}", s.name);
    }
}

#[test]
fn orbits_near_a_saddle_level_close() {
    let p = HamiltonianParams::new(-1.0, -2.0, 1.0).unwrap();
    let s = annuli(&p).unwrap().into_iter().find(|s| s.kind == AnnulusKind::XLoop).unwrap();
    for h in [1e-4, 1e-7, 1e-9] {
        let o = trace_orbit(&p, &s, h, 64).unwrap();
        assert!(o.closure_gap < 1e-10);
        assert!(o.max_level_error(&p) < 1e-12);
        let (hx, hy) = p.grad(o.points[0][0], o.points[0][1]);
        assert!(hx.hypot(hy) > 0.0);
    }
}
