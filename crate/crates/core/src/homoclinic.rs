//! Expansions of the Melnikov integral near the double homoclinic loop of
//! `H3 = ½y² − ½x² + x²y² − ½y⁴ + ½x⁴`, and the zero-distribution designs
//! that combine them with the two Hopf centers.
//!
//! Loop integrals here follow the flow of `ẋ = H3_y, ẏ = −H3_x`, which runs
//! clockwise around every orbit near the loop. With that orientation, for
//! `g = ᾱ0 y + ᾱ1 xy + ᾱ2 y³ + ᾱ3 x²y`,
//!
//! ```text
//! I_j(h) = c0_j + c1 h ln|h| + c2_j h + c3 h² ln|h| + O(h²),   h → 0⁻
//! I_3(h) = c0 + 2c1 h ln h + c2 h + 2c3 h² ln h + O(h²),        h → 0⁺
//! ```
//!
//! with `c1 = −ᾱ0` and `c3 = (ᾱ3 − 3ᾱ2 − ᾱ0)/2`.

use crate::abelian::moments_at;
use crate::analyzer::{scan_window, Spacing, WindowScan};
use crate::charts::{alpha_transforms, h1_center_annulus, h1_poly, h3_annulus, h3_poly, quad_perturbation, transform_matrix, Center, Chart, LoopSide};
use crate::error::{domain, numerical, Error, Result};
use crate::hopf::{a_closed, d_closed};
use crate::quadrature::adaptive;
use nalgebra::{Matrix3, Vector3};
use serde::Serialize;
use std::sync::OnceLock;

/// The right loop `L10` as graphs over `x ∈ [0, 1]` and, near `(1, 0)`, over `y`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LoopGeometry {
    pub x1_star: f64,
    pub x2_star: f64,
    pub y2_star: f64,
}

impl Default for LoopGeometry {
    fn default() -> Self {
        LoopGeometry::new(0.05, 0.9).expect("valid split points")
    }
}

impl LoopGeometry {
    /// Split points with `0 < x1* < 1/√2 < x2* < 1`.
    pub fn new(x1_star: f64, x2_star: f64) -> Result<Self> {
        let c = std::f64::consts::FRAC_1_SQRT_2;
        if !(0.0 < x1_star && x1_star < c && c < x2_star && x2_star < 1.0) {
            return domain(format!("split points need 0 < x1* < 1/sqrt2 < x2* < 1, got {x1_star}, {x2_star}"));
        }
        Ok(LoopGeometry { x1_star, x2_star, y2_star: y_plus(x2_star) })
    }
}

/// Upper branch of `L10`: `½√(2 + 4x² − 2√(8x⁴+1))`, evaluated in the
/// cancellation-free form `x √(2(1 − x²)/(1 + 2x² + √(8x⁴+1)))`.
pub fn y_plus(x: f64) -> f64 {
    let x2 = x * x;
    x.abs() * (2.0 * (1.0 - x2) / (1.0 + 2.0 * x2 + (8.0 * x2 * x2 + 1.0).sqrt())).max(0.0).sqrt()
}

pub fn y_minus(x: f64) -> f64 {
    -y_plus(x)
}

/// `x / y⁺(x)` without the `0/0` at the saddle.
fn x_over_y_plus(x: f64) -> f64 {
    let x2 = x * x;
    ((1.0 + 2.0 * x2 + (8.0 * x2 * x2 + 1.0).sqrt()) / (2.0 * (1.0 - x2))).sqrt()
}

/// Right half of the loop as a graph over `y`: `½√(2 − 4y² + 2√(8y⁴ − 8y² + 1))`.
pub fn x_of_y(y: f64) -> f64 {
    let y2 = y * y;
    0.5 * (2.0 - 4.0 * y2 + 2.0 * (8.0 * y2 * y2 - 8.0 * y2 + 1.0).sqrt()).sqrt()
}

/// `A0..A6` and how they were obtained.
#[derive(Clone, Debug, Serialize)]
pub struct HomoclinicConstants {
    /// `A0..A3 = ∮ (y, xy, y³, x²y) dx` and `A4..A6 = ∮ (x, 3y², x²) dt` over `L10`.
    pub a: [f64; 7],
    /// `(J1, J2, J3)` for `A4, A5, A6`.
    pub pieces: [[f64; 3]; 3],
    pub geometry: LoopGeometry,
    pub tolerance: f64,
    pub method: String,
}

/// The decimals printed for `A0..A6`.
pub const PRINTED_A: [f64; 7] = [0.5301166457, 0.2939666274, 0.0543804979, 0.1912645804, 4.4879224539, 1.1424442577, 2.8725107531];

fn quad<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    adaptive(f, a, b, tol, tol, 4000).map(|r| r.value).map_err(|e| match e {
        Error::Numerical(m) => Error::Numerical(format!("loop constant quadrature: {m}")),
        other => other,
    })
}

pub fn loop_constants() -> Result<HomoclinicConstants> {
    static CACHE: OnceLock<std::result::Result<HomoclinicConstants, Error>> = OnceLock::new();
    CACHE.get_or_init(|| loop_constants_with(LoopGeometry::default(), 1e-14)).clone()
}

pub fn loop_constants_with(geom: LoopGeometry, tol: f64) -> Result<HomoclinicConstants> {
    let mut a = [0.0; 7];
    // x = 1 − t² removes the square-root endpoint at (1, 0); the upper and
    // lower branches contribute equally.
    let forms: [fn(f64, f64) -> f64; 4] = [|_, y| y, |x, y| x * y, |_, y| y * y * y, |x, y| x * x * y];
    for (k, form) in forms.iter().enumerate() {
        a[k] = 2.0 * quad(|t| {
            let x = 1.0 - t * t;
            form(x, y_plus(x)) * 2.0 * t
        }, 0.0, 1.0, tol)?;
    }
    // ∮ ω dt with dt = dx/H3_y and H3_y = y√(8x⁴+1) on the loop
    let s8 = |x: f64| (8.0 * x.powi(4) + 1.0).sqrt();
    // ω/y⁺: x/y⁺, 3y⁺, x²/y⁺
    let over_y = [|x: f64| x_over_y_plus(x), |x: f64| 3.0 * y_plus(x), |x: f64| x * x_over_y_plus(x)];
    let omega = [|x: f64, _y: f64| x, |_x: f64, y: f64| 3.0 * y * y, |x: f64, _y: f64| x * x];
    let sd = |y: f64| (8.0 * y.powi(4) - 8.0 * y * y + 1.0).sqrt();
    let mut pieces = [[0.0; 3]; 3];
    for k in 0..3 {
        let f = over_y[k];
        let j1 = 2.0 * quad(|x| f(x) / s8(x), 0.0, geom.x1_star, tol)?;
        let j2 = 2.0 * quad(|x| f(x) / s8(x), geom.x1_star, geom.x2_star, tol)?;
        let w = omega[k];
        let j3 = 2.0 * quad(|y| {
            let x = x_of_y(y);
            w(x, y) / (x * sd(y))
        }, 0.0, geom.y2_star, tol)?;
        pieces[k] = [j1, j2, j3];
        a[4 + k] = j1 + j2 + j3;
    }
    Ok(HomoclinicConstants {
        a,
        pieces,
        geometry: geom,
        tolerance: tol,
        method: format!(
            "A0-A3: 2*int_0^1 over the upper branch with x = 1 - t^2; A4-A6: J1 on [0, {}] and J2 on [{}, {}] in x, J3 in y on [0, {:.10}]; adaptive Gauss-Kronrod, tol {tol:e}",
            geom.x1_star, geom.x1_star, geom.x2_star, geom.y2_star
        ),
    })
}

/// `∮ g dx` along the flow on the `H3` orbit at level `h`, by tracing.
pub fn loop_integral(side: LoopSide, bar: [f64; 4], h: f64) -> Result<f64> {
    let an = h3_annulus(side)?;
    let (_, m) = moments_at(&h3_poly(), &an, h, 3)?;
    Ok(-m.melnikov(&quad_perturbation(bar)))
}

/// Regular `h` coefficient of `∮ y dx` inside the loop:
/// `∮ y dx = A0 − h ln|h| + κ h + O(h² ln|h|)`. Returned as `q = −κ`, the
/// constant multiplying `c1 = −ᾱ0` in `c2_j`.
pub fn saddle_constant() -> Result<f64> {
    static CACHE: OnceLock<std::result::Result<f64, Error>> = OnceLock::new();
    CACHE
        .get_or_init(|| {
            let a0 = loop_constants()?.a[0];
            // fit κ + β h ln|h| + γ h on three small levels
            let hs = [-1e-6, -2e-6, -4e-6];
            let mut m = Matrix3::zeros();
            let mut rhs = Vector3::zeros();
            for (i, &h) in hs.iter().enumerate() {
                let v = loop_integral(LoopSide::Right, [1.0, 0.0, 0.0, 0.0], h)?;
                let l = h.abs().ln();
                m[(i, 0)] = 1.0;
                m[(i, 1)] = h * l;
                m[(i, 2)] = h;
                rhs[i] = (v - a0 + h * l) / h;
            }
            let sol = m.lu().solve(&rhs).ok_or_else(|| Error::Numerical("saddle constant fit is singular".into()))?;
            Ok(-sol[0])
        })
        .clone()
}

/// Expansion coefficients at the double loop.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HomoclinicExpansion {
    pub bar: [f64; 4],
    pub c0_1: f64,
    pub c0_2: f64,
    pub c1: f64,
    pub c2_1: f64,
    pub c2_2: f64,
    pub c3: f64,
    pub c0: f64,
    pub c2: f64,
    pub q: f64,
    /// `(c0_1, c1, c2_1)`: the leading coefficients of `I1`.
    pub mu: [f64; 3],
}

pub fn expansion_coefficients(bar: [f64; 4], q: f64, consts: &HomoclinicConstants) -> HomoclinicExpansion {
    let a = consts.a;
    let [b0, b1, b2, b3] = bar;
    let c0_1 = b0 * a[0] + b1 * a[1] + b2 * a[2] + b3 * a[3];
    let c0_2 = b0 * a[0] - b1 * a[1] + b2 * a[2] + b3 * a[3];
    let c1 = -b0;
    let c2_1 = b1 * a[4] + b2 * a[5] + b3 * a[6] + q * c1;
    let c2_2 = -b1 * a[4] + b2 * a[5] + b3 * a[6] + q * c1;
    let c3 = 0.5 * (b3 - 3.0 * b2) + 0.5 * c1;
    HomoclinicExpansion { bar, c0_1, c0_2, c1, c2_1, c2_2, c3, c0: c0_1 + c0_2, c2: c2_1 + c2_2, q, mu: [c0_1, c1, c2_1] }
}

impl HomoclinicExpansion {
    /// The truncated expansion on one side of the loop.
    pub fn eval(&self, side: LoopSide, h: f64) -> f64 {
        let l = h.abs().ln();
        match side {
            LoopSide::Right => self.c0_1 + self.c1 * h * l + self.c2_1 * h + self.c3 * h * h * l,
            LoopSide::Left => self.c0_2 + self.c1 * h * l + self.c2_2 * h + self.c3 * h * h * l,
            LoopSide::Outer => self.c0 + 2.0 * self.c1 * h * l + self.c2 * h + 2.0 * self.c3 * h * h * l,
        }
    }
}

/// Expansion with the module's constants and saddle constant.
pub fn default_expansion(bar: [f64; 4]) -> Result<HomoclinicExpansion> {
    Ok(expansion_coefficients(bar, saddle_constant()?, &loop_constants()?))
}

/// `c3` on the surface `μ = 0` for `ᾱ3 = 1`, given constants `A1..A6`.
/// Nonzero means the loop can carry three small zeros and no more.
pub fn mu_zero_c3(a: &[f64; 7]) -> Result<f64> {
    let det = a[1] * a[5] - a[2] * a[4];
    if det.abs() < 1e-14 {
        return numerical("mu = 0 does not determine alpha_bar1, alpha_bar2");
    }
    // ᾱ0 = 0 from μ2; μ1 = μ3 = 0 fix ᾱ1, ᾱ2
    let b2 = (-a[1] * a[6] + a[3] * a[4]) / det;
    Ok(0.5 * (1.0 - 3.0 * b2))
}

/// The five places where small zeros can appear.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Center1,
    Center2,
    LoopRight,
    LoopLeft,
    Outer,
}

impl Boundary {
    pub const ALL: [Boundary; 5] = [Boundary::Center1, Boundary::Center2, Boundary::LoopRight, Boundary::LoopLeft, Boundary::Outer];

    fn side(self) -> Option<LoopSide> {
        match self {
            Boundary::LoopRight => Some(LoopSide::Right),
            Boundary::LoopLeft => Some(LoopSide::Left),
            Boundary::Outer => Some(LoopSide::Outer),
            _ => None,
        }
    }

    /// Design zeros in the level variable of the boundary's chart for scale `w`:
    /// `H1` levels `−2u` near the centers, `H3` levels near the loop.
    fn targets(self, k: usize, w: f64) -> Vec<f64> {
        let ladder = |base: [f64; 3], s: f64| base[..k].iter().map(|t| s * t * w).collect();
        match self {
            Boundary::Center1 | Boundary::Center2 => ladder([1.0, 0.5, 0.25], -2.0),
            Boundary::LoopRight | Boundary::LoopLeft => ladder([1.0, 0.1, 0.01], -1.0),
            Boundary::Outer => ladder([1.0, 0.1, 0.01], 1.0),
        }
    }

    fn index(self) -> usize {
        Boundary::ALL.iter().position(|b| *b == self).expect("listed")
    }

    /// Verification window for scale `w`.
    fn window(self, w: f64) -> (f64, f64) {
        match self {
            Boundary::Center1 | Boundary::Center2 => (-4.0 * w, -2e-3 * w),
            Boundary::Outer => (2e-4 * w, 2.0 * w),
            _ => (-2.0 * w, -2e-4 * w),
        }
    }

    /// Linear functional `α ↦ I(h)` in the α chart: the Hopf series near the
    /// centers, the traced integral near the loop.
    fn functional(self, h: f64) -> Result<[f64; 4]> {
        let mut row = [0.0; 4];
        match self {
            Boundary::Center1 | Boundary::Center2 => {
                let u = -h / 2.0;
                for k in 0..4 {
                    let mut e = [0.0; 4];
                    e[k] = 1.0;
                    let c = if self == Boundary::Center1 { a_closed(e) } else { d_closed(e).map(|v| -v) };
                    // I/u
                    row[k] = c.iter().enumerate().map(|(j, v)| v * u.powi(j as i32)).sum();
                }
            }
            _ => {
                let side = self.side().expect("loop boundary");
                let an = h3_annulus(side)?;
                let (_, m) = moments_at(&h3_poly(), &an, h, 3)?;
                for k in 0..4 {
                    let mut e = [0.0; 4];
                    e[k] = 1.0;
                    row[k] = -m.melnikov(&quad_perturbation(alpha_transforms(e, Chart::Alpha, Chart::AlphaBar)));
                }
            }
        }
        Ok(row)
    }

    /// Direct-quadrature zero count of the α-perturbation on the window.
    fn scan(self, alpha: [f64; 4], window: (f64, f64)) -> Result<WindowScan> {
        const POINTS: usize = 160;
        let boundary_level = 0.0;
        let spacing = Spacing::Geometric { boundary: boundary_level };
        match self {
            Boundary::Center1 | Boundary::Center2 => {
                let c = if self == Boundary::Center1 { Center::First } else { Center::Second };
                scan_window(&h1_poly(), &h1_center_annulus(c)?, &quad_perturbation(alpha), window, POINTS, spacing, true)
            }
            _ => {
                let bar = alpha_transforms(alpha, Chart::Alpha, Chart::AlphaBar);
                let an = h3_annulus(self.side().expect("loop boundary"))?;
                scan_window(&h3_poly(), &an, &quad_perturbation(bar), window, POINTS, spacing, true)
            }
        }
    }
}

/// `(N_M1, N_M2, N_I1, N_I2, N_I3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DistributionTuple(pub [usize; 5]);

impl DistributionTuple {
    pub fn is_listed(&self) -> bool {
        DISTRIBUTIONS.contains(&self.0)
    }
}

impl std::fmt::Display for DistributionTuple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let v = self.0;
        write!(f, "({},{},{},{},{})", v[0], v[1], v[2], v[3], v[4])
    }
}

impl std::str::FromStr for DistributionTuple {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.trim().trim_start_matches('(').trim_end_matches(')').split(',').collect();
        if parts.len() != 5 {
            return Err(format!("expected five counts, got '{s}'"));
        }
        let mut v = [0; 5];
        for (k, p) in parts.iter().enumerate() {
            v[k] = p.trim().parse().map_err(|e| format!("bad count '{p}': {e}"))?;
        }
        Ok(DistributionTuple(v))
    }
}

/// The eighteen target distributions.
pub const DISTRIBUTIONS: [[usize; 5]; 18] = [
    [3, 0, 0, 0, 0],
    [0, 3, 0, 0, 0],
    [0, 0, 3, 0, 0],
    [0, 0, 0, 3, 0],
    [1, 2, 0, 0, 0],
    [2, 1, 0, 0, 0],
    [2, 0, 1, 0, 0],
    [2, 0, 0, 1, 0],
    [0, 2, 0, 1, 0],
    [0, 2, 1, 0, 0],
    [1, 1, 1, 0, 0],
    [1, 1, 0, 1, 0],
    [1, 0, 1, 1, 0],
    [0, 1, 1, 1, 0],
    [1, 0, 0, 0, 2],
    [0, 1, 0, 0, 2],
    [0, 0, 1, 1, 2],
    [0, 0, 2, 2, 1],
];

/// One verified window.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryCount {
    pub boundary: Boundary,
    pub target: usize,
    pub count: usize,
    pub window: (f64, f64),
    pub zeros: Vec<f64>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DistributionOutcome {
    pub target: DistributionTuple,
    pub realized: DistributionTuple,
    pub success: bool,
    pub alpha: [f64; 4],
    pub alpha_bar: [f64; 4],
    pub q: f64,
    /// Conditions imposed on `(α0, α1, α2)`.
    pub constraints: Vec<String>,
    pub scale: f64,
    pub ladder: Ladder,
    pub attempts: usize,
    pub counts: Vec<BoundaryCount>,
    pub mu: [f64; 3],
    pub b1: f64,
    pub d1: f64,
}

/// Linear conditions realizing a target at scale `w`.
fn design_rows(target: [usize; 5], w: f64, ladder: &Ladder) -> Result<(Vec<[f64; 4]>, Vec<String>)> {
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    let place = |b: Boundary, k: usize, rows: &mut Vec<[f64; 4]>, notes: &mut Vec<String>| -> Result<()> {
        for h in b.targets(k, w * ladder.targets[b.index()]) {
            rows.push(b.functional(h)?);
            notes.push(format!("{b:?} zero at level {h:.3e}"));
        }
        Ok(())
    };
    let total: usize = target.iter().sum();
    let [n1, n2, i1, i2, i3] = target;
    if total > 3 && i1 == i2 && i1 > 0 {
        // ᾱ1 = 0 makes both loops carry the same integral; then I1 and I3
        // share (ᾱ0, ᾱ2) and one of them takes the placed zeros.
        let m = transform_matrix(Chart::Alpha, Chart::AlphaBar);
        rows.push(m[1]);
        notes.push("alpha_bar1 = 0 (symmetric loops)".into());
        if i1 >= i3 {
            place(Boundary::LoopRight, i1, &mut rows, &mut notes)?;
        } else {
            place(Boundary::Outer, i3, &mut rows, &mut notes)?;
        }
        place(Boundary::Center1, n1, &mut rows, &mut notes)?;
        place(Boundary::Center2, n2, &mut rows, &mut notes)?;
    } else {
        for (b, k) in Boundary::ALL.iter().zip(target) {
            place(*b, k, &mut rows, &mut notes)?;
        }
    }
    if rows.len() != 3 {
        return domain(format!("target {:?} gives {} conditions; the design needs exactly 3", target, rows.len()));
    }
    Ok((rows, notes))
}

fn solve_rows(rows: &[[f64; 4]], alpha3: f64) -> Result<[f64; 4]> {
    let a = Matrix3::from_fn(|i, j| rows[i][j]);
    let rhs = Vector3::from_fn(|i, _| -rows[i][3] * alpha3);
    let sol = a.lu().solve(&rhs).ok_or_else(|| Error::Numerical("singular design system".into()))?;
    Ok([sol[0], sol[1], sol[2], alpha3])
}

pub const DEFAULT_DESIGN_SCALE: f64 = 1e-2;

/// Relative scales of the five boundaries: where the design zeros go and
/// how wide each verification window is.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Ladder {
    pub targets: [f64; 5],
    pub windows: [f64; 5],
}

/// Ladders tried in turn. Mirrored boundaries never share targets: equal
/// zeros at both centers (or both loops) force a perturbation that is
/// symmetric under the swap. The last two put the loop windows two decades
/// below the centers, where the loops can tell apart an odd part fixed by
/// the centers.
pub const LADDERS: [Ladder; 5] = [
    Ladder { targets: [1.0, 0.7, 1.0, 0.5, 1.0], windows: [1.0; 5] },
    Ladder { targets: [1.0, 0.1, 1.0, 0.1, 1.0], windows: [1.0; 5] },
    Ladder { targets: [0.1, 1.0, 0.1, 1.0, 1.0], windows: [1.0; 5] },
    Ladder { targets: [1.0, 0.1, 0.01, 0.005, 1.0], windows: [1.0, 1.0, 0.01, 0.01, 1.0] },
    Ladder { targets: [0.1, 1.0, 0.005, 0.01, 1.0], windows: [1.0, 1.0, 0.01, 0.01, 1.0] },
];

/// Realizes one of the eighteen distributions with `α3` fixed and verifies
/// every count by direct quadrature; the scale shrinks by 4 on mismatch.
pub fn distribution_search(target: DistributionTuple, alpha3: f64, q: Option<f64>) -> Result<DistributionOutcome> {
    let out = distribution_attempt(target, alpha3, q, DEFAULT_DESIGN_SCALE, 3 * LADDERS.len())?;
    if out.success {
        Ok(out)
    } else {
        let detail: Vec<String> = out.counts.iter().map(|c| format!("{:?}: {} of {} in ({:.2e}, {:.2e})", c.boundary, c.count, c.target, c.window.0, c.window.1)).collect();
        numerical(format!("target {} realized as {} after {} attempts; {}", out.target, out.realized, out.attempts, detail.join("; ")))
    }
}

/// Like `distribution_search` but returns the last attempt instead of failing.
/// Attempts cycle through `LADDERS`, dividing the scale by 4 after each cycle.
pub fn distribution_attempt(target: DistributionTuple, alpha3: f64, q: Option<f64>, scale: f64, max_attempts: usize) -> Result<DistributionOutcome> {
    if !target.is_listed() {
        return domain(format!("{target} is not one of the eighteen listed distributions"));
    }
    if alpha3 == 0.0 || !alpha3.is_finite() {
        return domain("alpha3 anchor must be nonzero");
    }
    let consts = loop_constants()?;
    let q = match q {
        Some(v) => v,
        None => saddle_constant()?,
    };
    let mut last = None;
    for attempt in 1..=max_attempts.max(1) {
        let ladder = LADDERS[(attempt - 1) % LADDERS.len()];
        let w = scale * 0.25f64.powi(((attempt - 1) / LADDERS.len()) as i32);
        let (rows, constraints) = design_rows(target.0, w, &ladder)?;
        let alpha = solve_rows(&rows, alpha3)?;
        let mut counts = Vec::new();
        for (b, &k) in Boundary::ALL.iter().zip(&target.0) {
            let window = b.window(w * ladder.windows[b.index()]);
            let scan = b.scan(alpha, window)?;
            counts.push(BoundaryCount {
                boundary: *b,
                target: k,
                count: scan.count(),
                window,
                zeros: scan.zeros.iter().map(|z| z.h).collect(),
                warnings: scan.warnings,
            });
        }
        let realized = DistributionTuple([0, 1, 2, 3, 4].map(|i| counts[i].count));
        let bar = alpha_transforms(alpha, Chart::Alpha, Chart::AlphaBar);
        let e = expansion_coefficients(bar, q, &consts);
        let out = DistributionOutcome {
            target,
            realized,
            success: realized == target,
            alpha,
            alpha_bar: bar,
            q,
            constraints,
            scale: w,
            ladder,
            attempts: attempt,
            counts,
            mu: e.mu,
            b1: -a_closed(alpha)[0],
            d1: d_closed(alpha)[0],
        };
        if out.success {
            return Ok(out);
        }
        last = Some(out);
    }
    Ok(last.expect("one attempt"))
}

/// Three zeros of `I1` just inside the right loop.
#[derive(Clone, Debug, Serialize)]
pub struct HomoclinicDesign {
    pub alpha_bar: [f64; 4],
    pub expansion: HomoclinicExpansion,
    /// `H3` levels where the truncated expansion vanishes.
    pub target_h: [f64; 3],
    pub window: (f64, f64),
    pub scan: WindowScan,
    /// Zero count of `I3` on the mirrored window outside the loop.
    pub outer_count: usize,
    pub attempts: usize,
}

/// Makes the traced `I1` vanish at `h = −w, −w/10, −w/100` with `ᾱ3` fixed,
/// then counts its zeros on `(−2w, −2·10⁻⁴w)`. The scale shrinks by 4 on
/// mismatch. The expansion of the result shows the `μ` staircase.
pub fn design_homoclinic_three(bar3_star: f64, q: Option<f64>) -> Result<HomoclinicDesign> {
    if bar3_star == 0.0 || !bar3_star.is_finite() {
        return domain("alpha_bar3_star must be nonzero");
    }
    let consts = loop_constants()?;
    let q = match q {
        Some(v) => v,
        None => saddle_constant()?,
    };
    let mut w = DEFAULT_DESIGN_SCALE;
    let mut last = None;
    for attempt in 1..=4 {
        let hs = [-w, -0.1 * w, -0.01 * w];
        let mut rows = Vec::with_capacity(3);
        for &h in &hs {
            let mut r = [0.0; 4];
            for (k, v) in r.iter_mut().enumerate() {
                let mut e = [0.0; 4];
                e[k] = 1.0;
                *v = loop_integral(LoopSide::Right, e, h)?;
            }
            rows.push(r);
        }
        let bar = solve_rows(&rows, bar3_star)?;
        let window = (-2.0 * w, -2e-4 * w);
        let pert = quad_perturbation(bar);
        let scan = scan_window(&h3_poly(), &h3_annulus(LoopSide::Right)?, &pert, window, 160, Spacing::Geometric { boundary: 0.0 }, true)?;
        let outer = scan_window(&h3_poly(), &h3_annulus(LoopSide::Outer)?, &pert, (2e-4 * w, 2.0 * w), 160, Spacing::Geometric { boundary: 0.0 }, false)?;
        let d = HomoclinicDesign {
            alpha_bar: bar,
            expansion: expansion_coefficients(bar, q, &consts),
            target_h: hs,
            window,
            outer_count: outer.count(),
            scan,
            attempts: attempt,
        };
        if d.scan.count() == 3 {
            return Ok(d);
        }
        last = Some(d);
        w *= 0.25;
    }
    let d = last.expect("one attempt");
    numerical(format!("homoclinic design found {} zeros (want 3) in ({:.3e}, {:.3e})", d.scan.count(), d.window.0, d.window.1))
}
