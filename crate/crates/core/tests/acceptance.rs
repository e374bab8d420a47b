//! One line per acceptance criterion. Lines listed in `EXPECTED_RED` are
//! known not to hold as stated; the test fails if any other line is red, or
//! if a red line turns green without the list being updated.

use cubic_melnikov::abelian::{decompose_melnikov, generator_vector, moments_at, reduce_monomial, GeneratorVector, PerturbationPoly};
use cubic_melnikov::analyzer::{region_ceiling, zero_scan_on, ScanGrid};
use cubic_melnikov::charts::Center;
use cubic_melnikov::family::{annuli, classify_region, g1_zeros, HamiltonianParams, PeriodAnnulus, Region};
use cubic_melnikov::homoclinic::{design_homoclinic_three, distribution_search, loop_constants, DistributionTuple, DISTRIBUTIONS, PRINTED_A};
use cubic_melnikov::hopf::{a_closed, b_jacobian_det, delta0, design_hopf_three, hopf_coefficients, HopfDelta, PRINTED_A4_ALPHA0};
use cubic_melnikov::picard_fuchs::{pf_residual, PfWhich};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, SQRT_2};
use std::io::Write;
use std::time::Instant;

const EXPECTED_RED: [&str; 3] = ["1b", "3b", "4d"];

// pinned tolerances
const TOL_A_FIRST: f64 = 1e-4;
const TOL_A_LAST: f64 = 1e-2;
const TOL_PF: f64 = 1e-5;
const TOL_REDUCTION: f64 = 1e-7;
const TOL_HOPF_SERIES: f64 = 1e-8;
const TOL_HOPF_EXACT: f64 = 1e-12;
const TOL_SYMMETRY: f64 = 1e-10;
const TOL_ORACLE: f64 = 1e-7;
// integrals forced to zero by symmetry are compared in absolute terms
const SCALE_FLOOR: f64 = 1e-6;

struct Line {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn p(a: f64, b: f64, c: f64) -> HamiltonianParams {
    HamiltonianParams::new(a, b, c).unwrap()
}

fn interior(an: &PeriodAnnulus, n: usize) -> Vec<f64> {
    let (lo, hi) = an.capped_range(3.0);
    (1..=n).map(|k| lo + (k as f64) / (n as f64 + 1.0) * (hi - lo)).collect()
}

fn split_points(q: &HamiltonianParams) -> Vec<f64> {
    if q.a == 0.0 {
        return Vec::new();
    }
    g1_zeros(q).unwrap().iter().filter(|z| z.inside_annulus).filter_map(|z| z.value).collect()
}

fn homoclinic_constants() -> Vec<Line> {
    let c = loop_constants().unwrap();
    let rel: Vec<f64> = (0..7).map(|k| (c.a[k] - PRINTED_A[k]).abs() / PRINTED_A[k]).collect();
    let first = rel[..4].iter().cloned().fold(0.0, f64::max);
    let last = rel[4..].iter().cloned().fold(0.0, f64::max);
    vec![
        Line { id: "1a", pass: first < TOL_A_FIRST, detail: format!("A0..A3 max rel diff {first:.2e} (tol {TOL_A_FIRST:e})") },
        Line {
            id: "1b",
            pass: last < TOL_A_LAST,
            detail: format!(
                "A4..A6 = {:.6}, {:.6}, {:.6} vs printed {:.4}, {:.4}, {:.4}; max rel diff {last:.2e} (tol {TOL_A_LAST:e})",
                c.a[4], c.a[5], c.a[6], PRINTED_A[4], PRINTED_A[5], PRINTED_A[6]
            ),
        },
    ]
}

fn picard_fuchs() -> Vec<Line> {
    // D6+, D1+, D5+ with a ≠ 0, and an a = 0 sample for V5/V6
    let samples = [(3.0, -3.0, 1.0, Region::D6Plus), (-1.0, -3.0, 1.0, Region::D1Plus(0)), (1.0, 1.0, 1.0, Region::D5Plus), (0.0, -1.0, 2.0, Region::D5Plus)];
    let mut worst = 0.0f64;
    let mut checks = 0;
    let mut regions_ok = true;
    for (a, b, c, want) in samples {
        let q = p(a, b, c);
        let got = classify_region(&q).unwrap().region;
        regions_ok &= std::mem::discriminant(&got) == std::mem::discriminant(&want) || a == 0.0;
        let splits = split_points(&q);
        for an in annuli(&q).unwrap() {
            let (lo, hi) = an.capped_range(3.0);
            let hs: Vec<f64> = interior(&an, 11).into_iter().filter(|h| splits.iter().all(|s| (h - s).abs() > 1e-3 * (hi - lo))).collect();
            for w in PfWhich::ALL.iter().filter(|w| w.a_zero() == (a == 0.0)) {
                for &h in &hs {
                    worst = worst.max(pf_residual(&q, *w, &an, h).unwrap());
                    checks += 1;
                }
            }
        }
    }
    vec![Line {
        id: "2",
        pass: regions_ok && worst < TOL_PF && checks > 0,
        detail: format!("{checks} residuals over 4 parameter sets, max {worst:.2e} (tol {TOL_PF:e})"),
    }]
}

fn reduction_closure() -> Vec<Line> {
    let q = p(3.0, -3.0, 1.0);
    let (b, c, a) = (q.b, q.c, q.a);
    let mut worst_printed = [0.0f64; 4];
    let mut worst_i05_fixed = 0.0f64;
    let mut worst_reducer = 0.0f64;
    let rel = |lhs: f64, terms: &[f64]| {
        let rhs: f64 = terms.iter().sum();
        let scale = terms.iter().map(|t| t.abs()).sum::<f64>().max(lhs.abs());
        (lhs - rhs).abs() / scale.max(SCALE_FLOOR)
    };
    let targets = [(0u32, 5u32), (4, 1), (1, 4), (3, 2)];
    for an in annuli(&q).unwrap() {
        for h in interior(&an, 5) {
            let (_, m) = moments_at(&q, &an, h, 5).unwrap();
            let i = |i, j| m.dx(i, j);
            let k5 = 5.0 / (12.0 * c);
            let k4 = 1.0 / (12.0 * a);
            let checks = [
                rel(i(0, 5), &[k5 * 2.0 * h * i(0, 1), -k5 * 7.0 / 3.0 * i(0, 3), -k5 * i(2, 1), -k5 * 2.0 * b * i(2, 3)]),
                rel(i(4, 1), &[k4 * 2.0 * h * i(0, 1), k4 / 3.0 * i(0, 3), -k4 * 7.0 * i(2, 1), -k4 * 2.0 * b * i(2, 3)]),
                rel(i(1, 4), &[i(1, 2) / c, -b / c * i(3, 2)]),
                rel(i(3, 2), &[-6.0 * k4 * i(1, 2), -3.0 * b * k4 * i(1, 4)]),
            ];
            for k in 0..4 {
                worst_printed[k] = worst_printed[k].max(checks[k]);
            }
            worst_i05_fixed = worst_i05_fixed
                .max(rel(i(0, 5), &[k5 * 2.0 * h * i(0, 1), k5 * 7.0 / 3.0 * i(0, 3), -k5 * i(2, 1), -k5 * 2.0 * b * i(2, 3)]));
            let v = GeneratorVector::from_moments(h, &m, Default::default());
            for (ti, tj) in targets {
                let r = reduce_monomial(&q, ti, tj).unwrap();
                let scale: f64 = r.coeffs.iter().zip(&v.values).map(|(c, g)| (c.eval(h) * g).abs()).sum::<f64>().max(m.dx(ti, tj).abs());
                worst_reducer = worst_reducer.max((m.dx(ti, tj) - r.eval(&v)).abs() / scale.max(SCALE_FLOOR));
            }
        }
    }
    let rest = worst_printed[1].max(worst_printed[2]).max(worst_printed[3]);
    vec![
        Line {
            id: "3a",
            pass: rest < TOL_REDUCTION && worst_i05_fixed < TOL_REDUCTION && worst_reducer < TOL_REDUCTION,
            detail: format!(
                "I41, I14, I32 as printed {rest:.2e}; I05 with +7/3 I03 {worst_i05_fixed:.2e}; general reduction {worst_reducer:.2e} (tol {TOL_REDUCTION:e})"
            ),
        },
        Line { id: "3b", pass: worst_printed[0] < TOL_REDUCTION, detail: format!("I05 as printed (-7/3 I03): {:.2e} (tol {TOL_REDUCTION:e})", worst_printed[0]) },
    ]
}

fn hopf() -> Vec<Line> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let d = HopfDelta::new([0; 4].map(|_| rng.gen_range(-1.0..1.0)));
        for c in [Center::First, Center::Second] {
            worst = worst.max(hopf_coefficients(&d, c).max_discrepancy);
        }
    }
    let b = a_closed(delta0(1.0).alpha).map(|v| -v);
    let b_err = b[0].abs().max(b[1].abs()).max(b[2].abs()).max((b[3] + 5.0 * PI / 16.0).abs());
    let det = b_jacobian_det();
    let want = 15.0 * SQRT_2 / 32.0 * PI.powi(3);
    let det_rel = (det - want).abs() / want;
    let numeric_a4 = hopf_coefficients(&HopfDelta::new([1.0, 0.0, 0.0, 0.0]), Center::First).numeric[3];
    let printed_a4 = -PRINTED_A4_ALPHA0 * PI;
    vec![
        Line { id: "4a", pass: worst < TOL_HOPF_SERIES, detail: format!("a1..a4, d1..d4 vs quadrature, 100 random deltas: {worst:.2e} (tol {TOL_HOPF_SERIES:e})") },
        Line { id: "4b", pass: b_err < TOL_HOPF_EXACT, detail: format!("delta0 gives b = {b:?}, max error {b_err:.2e}") },
        Line { id: "4c", pass: det_rel < TOL_HOPF_EXACT, detail: format!("Jacobian {det:.15} vs 15 sqrt2 pi^3/32, rel {det_rel:.2e}") },
        Line {
            id: "4d",
            pass: (numeric_a4 - printed_a4).abs() < TOL_HOPF_SERIES,
            detail: format!("printed a4 at alpha = (1,0,0,0): {printed_a4:.6} vs quadrature {numeric_a4:.6}"),
        },
    ]
}

fn designs() -> Vec<Line> {
    let mut counts = Vec::new();
    for c in [Center::First, Center::Second] {
        let d = design_hopf_three(c, 1.0).unwrap();
        counts.push(format!("{c:?} {} in ({:.1e}, {:.1e})", d.scan.count(), d.window.0, d.window.1));
        if d.scan.count() != 3 {
            return vec![Line { id: "5", pass: false, detail: counts.join("; ") }];
        }
    }
    let d = design_homoclinic_three(1.0, None).unwrap();
    let inside = d.scan.zeros.iter().all(|z| d.window.0 < z.h && z.h < 0.0);
    counts.push(format!("loop {} in ({:.1e}, {:.1e})", d.scan.count(), d.window.0, d.window.1));
    vec![Line { id: "5", pass: d.scan.count() == 3 && inside, detail: counts.join("; ") }]
}

fn distributions() -> Vec<Line> {
    let required = [[3, 0, 0, 0, 0], [0, 3, 0, 0, 0], [0, 0, 2, 2, 1]];
    let mut realized = Vec::new();
    let mut missing = Vec::new();
    for t in DISTRIBUTIONS {
        match distribution_search(DistributionTuple(t), 1.0, None) {
            Ok(o) if o.realized.0 == t => realized.push(t),
            _ => missing.push(DistributionTuple(t).to_string()),
        }
    }
    let has_required = required.iter().all(|r| realized.contains(r));
    vec![Line {
        id: "6",
        pass: realized.len() >= 6 && has_required,
        detail: format!("{} of {} tuples realized, verified by direct zero counts; missing: {missing:?}", realized.len(), DISTRIBUTIONS.len()),
    }]
}

fn ceilings() -> Vec<Line> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    let mut worst_margin = i64::MAX;
    let mut tested = 0;
    for (a, b, c) in [(3.0, -3.0, 1.0), (-1.0, -3.0, 1.0)] {
        let q = p(a, b, c);
        let label = classify_region(&q).unwrap();
        let grids: Vec<ScanGrid> = annuli(&q).unwrap().iter().map(|an| ScanGrid::new(&q, an, 5, 64, None).unwrap()).collect();
        for _ in 0..500 {
            let n = rng.gen_range(1..=5);
            let pert = PerturbationPoly::random(n, || rng.gen_range(-1.0..1.0));
            let total: usize = grids.iter().map(|g| zero_scan_on(&q, &pert, g, false).unwrap().zeros.len()).sum();
            worst_margin = worst_margin.min(region_ceiling(&label, n).unwrap() - total as i64);
            tested += 1;
        }
    }
    let mut worst_sym = 0.0f64;
    let mut sym_checks = 0;
    for (a, b, c) in [(3.0, -3.0, 1.0), (-1.0, -2.0, 1.0), (1.0, 1.0, 1.0), (-1.0, 1.0, 2.0)] {
        let q = p(a, b, c);
        for an in annuli(&q).unwrap() {
            for h in interior(&an, 3) {
                let (_, m) = moments_at(&q, &an, h, 5).unwrap();
                for d in 1..=5u32 {
                    for i in 0..=d {
                        if an.symmetry.kills(i, d - i) {
                            worst_sym = worst_sym.max(m.dx(i, d - i).abs());
                            sym_checks += 1;
                        }
                    }
                }
            }
        }
    }
    vec![
        Line { id: "7a", pass: worst_margin >= 0, detail: format!("{tested} random perturbations, smallest ceiling margin {worst_margin}") },
        Line { id: "7b", pass: worst_sym < TOL_SYMMETRY && sym_checks > 0, detail: format!("{sym_checks} symmetry-forced integrals, max {worst_sym:.2e} (tol {TOL_SYMMETRY:e})") },
    ]
}

fn oracle_equivalence() -> Vec<Line> {
    let q = p(3.0, -3.0, 1.0);
    let ans = annuli(&q).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let mut points = 0;
    for n in [1u32, 2, 3, 5, 7] {
        let pert = PerturbationPoly::random(n, || rng.gen_range(-1.0..1.0));
        let d = decompose_melnikov(&q, &pert).unwrap();
        for k in 0..5 {
            let an = &ans[k % ans.len()];
            let h = interior(an, 5)[k];
            let direct = cubic_melnikov::abelian::melnikov_eval(&q, &pert, an, h).unwrap();
            let v = generator_vector(&q, an, h).unwrap();
            let via = d.eval(&v);
            let scale: f64 = d.coeffs.iter().zip(&v.values).map(|(c, g)| (c.eval(h) * g).abs()).sum::<f64>().max(direct.abs());
            worst = worst.max((direct - via).abs() / scale.max(1e-300));
            points += 1;
        }
    }
    vec![Line { id: "8", pass: worst < TOL_ORACLE, detail: format!("{points} lattice points, max rel {worst:.2e} (tol {TOL_ORACLE:e})") }]
}

#[test]
fn acceptance() {
    let sections: [(&str, fn() -> Vec<Line>); 8] = [
        ("homoclinic constants", homoclinic_constants),
        ("Picard-Fuchs residuals", picard_fuchs),
        ("reduction closure", reduction_closure),
        ("Hopf coefficients", hopf),
        ("three-zero designs", designs),
        ("distributions", distributions),
        ("sanity ceilings", ceilings),
        ("oracle equivalence", oracle_equivalence),
    ];
    let mut lines = Vec::new();
    for (name, f) in sections {
        let t = Instant::now();
        for l in f() {
            // written past the test harness capture so the lines always show
            let line = format!("[{}] {:<3} {name}: {} ({:.1}s)\n", if l.pass { "PASS" } else { "FAIL" }, l.id, l.detail, t.elapsed().as_secs_f64());
            std::io::stderr().write_all(line.as_bytes()).unwrap();
            lines.push(l);
        }
    }
    let red: Vec<&str> = lines.iter().filter(|l| !l.pass).map(|l| l.id).collect();
    assert_eq!(red, EXPECTED_RED, "red lines differ from the documented set");
}
