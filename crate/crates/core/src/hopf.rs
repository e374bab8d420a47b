//! Small-amplitude expansion of the Melnikov integral near the two centers
//! of `H1`, and a three-zero Hopf design.
//!
//! Near a center the level `H1 = h` is written `r = φ(θ, m)` with
//! `m = √(−h/2)`, and `I(h) = ∮ g dx = Σ a_j m^{2j}` over the
//! counterclockwise orbit.

use crate::analyzer::{scan_window, Spacing, WindowScan};
use crate::charts::{alpha_transforms, h1_center_annulus, h1_poly, h2_poly, quad_perturbation, Center, Chart};
use crate::error::{domain, numerical, Result};
use crate::poly::Poly2;
use nalgebra::{Matrix3, Vector3};
use serde::Serialize;
use std::f64::consts::{PI, SQRT_2};

/// Perturbation coefficients `(α0, α1, α2, α3)` of `g = α0 y + α1 xy + α2 y³ + α3 x²y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HopfDelta {
    pub alpha: [f64; 4],
}

impl HopfDelta {
    pub fn new(alpha: [f64; 4]) -> Self {
        HopfDelta { alpha }
    }

    /// Coefficients of the same field in coordinates centered at `(−√2, 0)`.
    pub fn hat(&self) -> [f64; 4] {
        alpha_transforms(self.alpha, Chart::Alpha, Chart::AlphaHat)
    }
}

/// The `α0` coefficient of `a4/(−π)` as printed; the expansion gives 16235/1024.
pub const PRINTED_A4_ALPHA0: f64 = 50185.0 / 8192.0;

/// `−a_j/π` as linear forms in `α`, `j = 1..4`.
const B_OVER_PI: [[f64; 4]; 4] = [
    [1.0, 0.0, 0.0, 0.0],
    [11.0 / 8.0, -SQRT_2 / 2.0, 3.0 / 4.0, 1.0 / 4.0],
    [259.0 / 64.0, -7.0 * SQRT_2 / 4.0, 27.0 / 16.0, 21.0 / 16.0],
    [16235.0 / 1024.0, -1885.0 * SQRT_2 / 256.0, 2505.0 / 512.0, 3195.0 / 512.0],
];

/// `a1..a4` at the first center.
pub fn a_closed(alpha: [f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (j, row) in B_OVER_PI.iter().enumerate() {
        out[j] = -PI * row.iter().zip(&alpha).map(|(c, a)| c * a).sum::<f64>();
    }
    out
}

/// `d1..d4` at the second center: `I = −Σ d_l m^{2l}` there, and reflecting
/// `x ↦ −x` carries the second center onto the first, so
/// `d_l(δ) = −a_l(α̂0, −α̂1, α̂2, α̂3)`.
pub fn d_closed(alpha: [f64; 4]) -> [f64; 4] {
    let h = alpha_transforms(alpha, Chart::Alpha, Chart::AlphaHat);
    a_closed([h[0], -h[1], h[2], h[3]]).map(|v| -v)
}

/// Linear map `α ↦ (b1..b4)` with `b_j = −a_j` (first center) or
/// `α ↦ (d1..d4)` (second center).
pub fn coefficient_matrix(center: Center) -> [[f64; 4]; 4] {
    let mut m = [[0.0; 4]; 4];
    for k in 0..4 {
        let mut e = [0.0; 4];
        e[k] = 1.0;
        let col = match center {
            Center::First => a_closed(e).map(|v| -v),
            Center::Second => d_closed(e),
        };
        for j in 0..4 {
            m[j][k] = col[j];
        }
    }
    m
}

/// `det ∂(b1, b2, b3)/∂(α0, α1, α2)`; constant because the map is linear.
pub fn b_jacobian_det() -> f64 {
    let m = coefficient_matrix(Center::First);
    Matrix3::from_fn(|i, j| m[i][j]).determinant()
}

/// The point where `b1 = b2 = b3 = 0` for a given `α3`.
pub fn delta0(alpha3: f64) -> HopfDelta {
    HopfDelta::new([0.0, 3.0 * SQRT_2 / 5.0 * alpha3, 7.0 / 15.0 * alpha3, alpha3])
}

fn e_closed(k: usize, theta: f64) -> f64 {
    let c = theta.cos();
    let c2 = c * c;
    let c4 = c2 * c2;
    match k {
        1 => 1.0,
        2 => -SQRT_2 / 2.0 * c,
        3 => 0.5 * c4 + 0.25 * c2 + 0.25,
        4 => -SQRT_2 / 4.0 * (6.0 * c4 - 4.0 * c2 + 3.0) * c,
        5 => 7.0 / 8.0 * c4 * c4 + 35.0 / 8.0 * c4 * c2 - 133.0 / 32.0 * c4 + 35.0 / 16.0 * c2 + 7.0 / 32.0,
        6 => -SQRT_2 / 4.0 * (20.0 * c4 * c4 - 4.0 * c4 + 5.0) * c,
        _ => 0.0,
    }
}

/// `φ(θ, m) = m + e2(θ)m² + … + e_order(θ)m^order` for the first center of `H1`.
pub fn radius_series(theta: f64, m: f64, order: usize) -> Result<f64> {
    if order > 6 {
        return domain(format!("radius series order {order} > 6"));
    }
    if !(m >= 0.0) {
        return domain(format!("m = {m} must be nonnegative"));
    }
    Ok((1..=order).map(|k| e_closed(k, theta) * m.powi(k as i32)).sum())
}

type Series = Vec<f64>;

fn s_mul(a: &[f64], b: &[f64], n: usize) -> Series {
    let mut out = vec![0.0; n + 1];
    for (i, &x) in a.iter().enumerate().take(n + 1) {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn s_sqrt(a: &[f64], n: usize) -> Series {
    let mut s = vec![0.0; n + 1];
    s[0] = a[0].sqrt();
    for k in 1..=n {
        let cross: f64 = (1..k).map(|i| s[i] * s[k - i]).sum();
        s[k] = (a.get(k).copied().unwrap_or(0.0) - cross) / (2.0 * s[0]);
    }
    s
}

/// Composition `F(R(m))` with `R(0) = 0`.
fn s_compose(f: &[f64], r: &[f64], n: usize) -> Series {
    let mut out = vec![0.0; n + 1];
    let mut pow = vec![0.0; n + 1];
    pow[0] = 1.0;
    for &fk in f.iter().take(n + 1) {
        for i in 0..=n {
            out[i] += fk * pow[i];
        }
        pow = s_mul(&pow, r, n);
    }
    out
}

/// Coefficients `e_1..e_n` of `r(m)` solving `−H(r cos θ, r sin θ)/2 = m²`,
/// for a Hamiltonian with `H(0) = ∇H(0) = 0` and negative definite Hessian
/// at the origin.
pub fn radius_coefficients(ham: &Poly2, theta: f64, n: usize) -> Series {
    let (c, s) = (theta.cos(), theta.sin());
    // P(r) = −H/(2r²) as a series in r
    let mut p = vec![0.0; n + 1];
    for &(i, j, coef) in &ham.terms {
        let k = (i + j) as usize;
        if k >= 2 && k - 2 <= n {
            p[k - 2] += -0.5 * coef * c.powi(i as i32) * s.powi(j as i32);
        }
    }
    // F(r) = r √P(r)
    let sq = s_sqrt(&p, n);
    let mut f = vec![0.0; n + 1];
    f[1..=n].copy_from_slice(&sq[..n]);
    let mut r = vec![0.0; n + 1];
    for k in 1..=n {
        let cur = s_compose(&f, &r, n);
        let target = if k == 1 { 1.0 } else { 0.0 };
        r[k] = (target - cur[k]) / f[1];
    }
    r
}

/// Coefficients of `m^k`, `k = 0..=2·order`, in `∮ g dx` over the
/// counterclockwise level `H = −2m²` around the origin, by the periodic
/// trapezoid rule on `−∬ g_y dA` in polar form.
pub fn series_numeric(ham: &Poly2, g: &Poly2, order: usize, nodes: usize) -> Series {
    let n = 2 * order;
    let terms: Vec<(u32, u32, f64)> = g.terms.iter().copied().filter(|t| t.1 > 0).collect();
    let mut out = vec![0.0; n + 1];
    let per_theta = |theta: f64| -> Series {
        let r = radius_coefficients(ham, theta, n);
        let (c, s) = (theta.cos(), theta.sin());
        let mut acc = vec![0.0; n + 1];
        let mut powers: Vec<Series> = vec![{
            let mut one = vec![0.0; n + 1];
            one[0] = 1.0;
            one
        }];
        for &(i, j, coef) in &terms {
            let p = (i + j + 1) as usize;
            while powers.len() <= p {
                let next = s_mul(powers.last().expect("nonempty"), &r, n);
                powers.push(next);
            }
            // −c_ij · j · cos^i sin^(j−1) φ^p / p
            let w = -coef * j as f64 * c.powi(i as i32) * s.powi(j as i32 - 1) / p as f64;
            for k in 0..=n {
                acc[k] += w * powers[p][k];
            }
        }
        acc
    };
    let step = std::f64::consts::TAU / nodes as f64;
    for q in 0..nodes {
        let v = per_theta(q as f64 * step);
        for k in 0..=n {
            out[k] += v[k] * step;
        }
    }
    out
}

/// `a1..a4` (first center) or `d1..d4` (second center) with the
/// independent quadrature path alongside.
#[derive(Clone, Debug, Serialize)]
pub struct HopfSeries {
    pub center: Center,
    pub delta: HopfDelta,
    /// `a_j` at the first center, `d_l` at the second.
    pub coefficients: [f64; 4],
    pub numeric: [f64; 4],
    /// Largest odd-power coefficient of the numeric series (zero by symmetry).
    pub odd_residual: f64,
    pub max_discrepancy: f64,
    /// Closed form and quadrature disagree by more than 1e−8.
    pub flagged: bool,
    pub m_domain: String,
}

pub fn hopf_coefficients(delta: &HopfDelta, center: Center) -> HopfSeries {
    let (closed, ham, g, sign) = match center {
        Center::First => (a_closed(delta.alpha), h1_poly(), quad_perturbation(delta.alpha).g, 1.0),
        Center::Second => (d_closed(delta.alpha), h2_poly(), quad_perturbation(delta.hat()).g, -1.0),
    };
    let s = series_numeric(&ham, &g, 4, 96);
    let numeric = [1, 2, 3, 4].map(|j| sign * s[2 * j]);
    let odd_residual = s.iter().skip(1).step_by(2).fold(0.0f64, |m, v| m.max(v.abs()));
    let max_discrepancy = closed.iter().zip(&numeric).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    HopfSeries {
        center,
        delta: *delta,
        coefficients: closed,
        numeric,
        odd_residual,
        max_discrepancy,
        flagged: max_discrepancy > 1e-8 || s[0].abs() > 1e-12,
        m_domain: "m = sqrt(-h/2), 0 < -h << 1 on H1 levels".into(),
    }
}

/// `I(h)` near a center from the closed coefficients, `u = m² = −h/2`.
pub fn series_value(center: Center, alpha: [f64; 4], u: f64) -> f64 {
    let c = match center {
        Center::First => a_closed(alpha),
        Center::Second => d_closed(alpha).map(|v| -v),
    };
    c.iter().enumerate().map(|(j, v)| v * u.powi(j as i32 + 1)).sum()
}

/// A three-zero design at one center together with its verification.
#[derive(Clone, Debug, Serialize)]
pub struct HopfDesign {
    pub center: Center,
    pub alpha3: f64,
    pub delta: HopfDelta,
    /// `b1..b4` (first center) or `d1..d4` (second center).
    pub coefficients: [f64; 4],
    /// Design roots in `u = m²`.
    pub target_u: [f64; 3],
    /// Verified level window `(−h_w, 0)` on `H1`, lower end excluded by the grid.
    pub window: (f64, f64),
    pub zeros: Vec<f64>,
    pub scan: WindowScan,
    pub attempts: usize,
}

/// Staircase roots `u_k = w·{1/4, 1/2, 1}` of `b1 + b2u + b3u² + b4u³`.
const ROOT_PATTERN: [f64; 3] = [0.25, 0.5, 1.0];
pub const DEFAULT_SCALE: f64 = 1e-2;
const SCAN_POINTS: usize = 160;

/// `(α0, α1, α2)` with `α3` fixed so the cubic `Σ_j b_{j+1} u^j` has the given roots.
pub fn place_roots(center: Center, alpha3: f64, roots: [f64; 3]) -> Result<HopfDelta> {
    let m = coefficient_matrix(center);
    let [u1, u2, u3] = roots;
    let r = [-u1 * u2 * u3, u1 * u2 + u1 * u3 + u2 * u3, -(u1 + u2 + u3)];
    // (row_j − r_j row_4)·α = 0
    let row = |j: usize, k: usize| m[j][k] - r[j] * m[3][k];
    let a = Matrix3::from_fn(|j, k| row(j, k));
    let rhs = Vector3::from_fn(|j, _| -row(j, 3) * alpha3);
    let sol = a.lu().solve(&rhs).ok_or_else(|| crate::Error::Numerical("singular Hopf design system".into()))?;
    Ok(HopfDelta::new([sol[0], sol[1], sol[2], alpha3]))
}

/// Places three zeros at `u = w/4, w/2, w` and checks by direct quadrature
/// on `H1` orbits that `I` has exactly three zeros for `u ∈ (10⁻³w, 2w)`;
/// the scale is halved until it does.
pub fn design_hopf_three(center: Center, alpha3_star: f64) -> Result<HopfDesign> {
    design_hopf_three_with(center, alpha3_star, DEFAULT_SCALE, 6)
}

pub fn design_hopf_three_with(center: Center, alpha3_star: f64, scale: f64, max_attempts: usize) -> Result<HopfDesign> {
    if alpha3_star == 0.0 || !alpha3_star.is_finite() {
        return domain("alpha3_star must be nonzero");
    }
    let annulus = h1_center_annulus(center)?;
    let ham = h1_poly();
    let mut w = scale;
    let mut last = None;
    for attempt in 1..=max_attempts {
        let target_u = ROOT_PATTERN.map(|t| t * w);
        let delta = place_roots(center, alpha3_star, target_u)?;
        let pert = quad_perturbation(delta.alpha);
        let window = (-4.0 * w, -2e-3 * w);
        let scan = scan_window(&ham, &annulus, &pert, window, SCAN_POINTS, Spacing::Geometric { boundary: 0.0 }, true)?;
        let coefficients = match center {
            Center::First => a_closed(delta.alpha).map(|v| -v),
            Center::Second => d_closed(delta.alpha),
        };
        let zeros = scan.zeros.iter().map(|z| z.h).collect();
        let design = HopfDesign { center, alpha3: alpha3_star, delta, coefficients, target_u, window, zeros, scan, attempts: attempt };
        if design.scan.count() == 3 {
            return Ok(design);
        }
        last = Some(design);
        w *= 0.5;
    }
    let d = last.expect("at least one attempt");
    numerical(format!(
        "Hopf design at {:?} found {} zeros (want 3) in window ({:.3e}, {:.3e}) after {} attempts",
        center,
        d.scan.count(),
        d.window.0,
        d.window.1,
        d.attempts
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_radius_terms_match_reversion() {
        for k in 0..16 {
            let theta = 0.37 + k as f64 * 0.4;
            let r = radius_coefficients(&h1_poly(), theta, 8);
            for j in 1..=6 {
                assert!((r[j] - e_closed(j, theta)).abs() < 1e-12, "e{j}({theta})");
            }
        }
    }

    #[test]
    fn radius_examples() {
        let m = 0.01;
        assert!((radius_series(PI / 2.0, m, 2).unwrap() - m).abs() < 1e-18);
        let want = m - SQRT_2 / 2.0 * m * m + m.powi(3);
        assert!((radius_series(0.0, m, 3).unwrap() - want).abs() < 1e-18);
        assert!(radius_series(0.0, m, 7).is_err());
    }

    #[test]
    fn first_center_examples() {
        let a = a_closed([1.0, 0.0, 0.0, 0.0]);
        assert!((a[0] + PI).abs() < 1e-15);
        assert!((a[1] + 11.0 / 8.0 * PI).abs() < 1e-14);
        assert!((a[2] + 259.0 / 64.0 * PI).abs() < 1e-13);
        assert!((a_closed([0.0, 0.0, 1.0, 0.0])[1] + 0.75 * PI).abs() < 1e-15);
        let d = d_closed([1.0, 0.0, 0.0, 0.0]);
        assert!((d[0] - PI).abs() < 1e-15);
    }

    #[test]
    fn delta0_kills_three_coefficients() {
        let b = a_closed(delta0(1.0).alpha).map(|v| -v);
        for v in &b[..3] {
            assert!(v.abs() < 1e-14);
        }
        assert!((b[3] + 5.0 / 16.0 * PI).abs() < 1e-13);
        assert!((b_jacobian_det() - 15.0 * SQRT_2 / 32.0 * PI.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn printed_a4_is_the_truncated_value() {
        let s = series_numeric(&h1_poly(), &quad_perturbation([1.0, 0.0, 0.0, 0.0]).g, 4, 96);
        assert!((s[8] / -PI - 16235.0 / 1024.0).abs() < 1e-10);
        assert!((s[8] / -PI - PRINTED_A4_ALPHA0).abs() > 9.0);
    }

    #[test]
    fn placed_roots_are_roots() {
        for c in [Center::First, Center::Second] {
            let d = place_roots(c, 1.0, [0.1, 0.2, 0.4]).unwrap();
            for u in [0.1, 0.2, 0.4] {
                let v = series_value(c, d.alpha, u) / u;
                assert!(v.abs() < 1e-13, "{c:?} {u} {v}");
            }
        }
    }
}
