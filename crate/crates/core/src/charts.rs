//! The `(a, b, c) = (−1, −2, 1)` system in the coordinates used for its
//! local bifurcation analysis, and the coefficient maps between them.
//!
//! Every chart carries the same cubic perturbation shape
//! `g = y (c0 + c1 x + c2 y² + c3 x²)` added to `ẏ`:
//!
//! * `Q`: the family's own coordinates, Hamiltonian `H = x² − y² − x⁴ − 2x²y² + y⁴`;
//! * `Alpha`: `x ↦ x + 1/√2`, Hamiltonian `H1 = H(x + 1/√2, y) − 1/4` with centers
//!   at `(0, 0)` and `(−√2, 0)`;
//! * `AlphaHat`: `x ↦ x − 1/√2`, Hamiltonian `H2`, center `(−√2, 0)` moved to the origin;
//! * `AlphaBar`: the family coordinates with `H3 = −H/2` and time rescaled by `−1/2`,
//!   so the perturbation is multiplied by `−1/2`.

use crate::abelian::PerturbationPoly;
use crate::error::Result;
use crate::family::{make_annulus, AnnulusKind, HamiltonianParams, PeriodAnnulus, Ray, Symmetry};
use crate::poly::Poly2;
use serde::Serialize;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    Q,
    Alpha,
    AlphaHat,
    AlphaBar,
}

impl Chart {
    pub const ALL: [Chart; 4] = [Chart::Q, Chart::Alpha, Chart::AlphaHat, Chart::AlphaBar];

    /// `(s, k)` such that a chart coefficient quadruple describes
    /// `g_family(X, y) = k · g_chart(X − s, y)`.
    fn shape(self) -> (f64, f64) {
        match self {
            Chart::Q => (0.0, 1.0),
            Chart::Alpha => (FRAC_1_SQRT_2, 1.0),
            Chart::AlphaHat => (-FRAC_1_SQRT_2, 1.0),
            Chart::AlphaBar => (0.0, -2.0),
        }
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Chart::Q => "q",
            Chart::Alpha => "alpha",
            Chart::AlphaHat => "alpha_hat",
            Chart::AlphaBar => "alpha_bar",
        })
    }
}

impl FromStr for Chart {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "q" => Ok(Chart::Q),
            "alpha" => Ok(Chart::Alpha),
            "alpha_hat" | "hat" => Ok(Chart::AlphaHat),
            "alpha_bar" | "bar" | "baralpha" => Ok(Chart::AlphaBar),
            _ => Err(format!("unknown chart '{s}' (q, alpha, alpha_hat, alpha_bar)")),
        }
    }
}

/// `(c0, c1, c2, c3)` of `y (c0 + c1 x + c2 y² + c3 x²)` after `x ↦ x − s`.
fn translate(v: [f64; 4], s: f64) -> [f64; 4] {
    [v[0] - s * v[1] + s * s * v[3], v[1] - 2.0 * s * v[3], v[2], v[3]]
}

fn to_family(v: [f64; 4], chart: Chart) -> [f64; 4] {
    let (s, k) = chart.shape();
    translate(v, s).map(|c| k * c)
}

fn from_family(v: [f64; 4], chart: Chart) -> [f64; 4] {
    let (s, k) = chart.shape();
    translate(v.map(|c| c / k), -s)
}

/// Re-expresses a coefficient quadruple given in chart `from` in chart `to`.
pub fn alpha_transforms(v: [f64; 4], from: Chart, to: Chart) -> [f64; 4] {
    from_family(to_family(v, from), to)
}

/// `det ∂(to)/∂(from)` of the linear map above.
pub fn jacobian_det(from: Chart, to: Chart) -> f64 {
    let k = |c: Chart| c.shape().1;
    // translations are unipotent; only the scale contributes
    (k(from) / k(to)).powi(4)
}

/// Matrix of `alpha_transforms(·, from, to)` (row i = output component i).
pub fn transform_matrix(from: Chart, to: Chart) -> [[f64; 4]; 4] {
    let mut m = [[0.0; 4]; 4];
    for j in 0..4 {
        let mut e = [0.0; 4];
        e[j] = 1.0;
        let col = alpha_transforms(e, from, to);
        for i in 0..4 {
            m[i][j] = col[i];
        }
    }
    m
}

/// `g = y (c0 + c1 x + c2 y² + c3 x²)` as a degree-3 perturbation.
pub fn quad_perturbation(v: [f64; 4]) -> PerturbationPoly {
    PerturbationPoly {
        n: 3,
        f: Poly2::default(),
        g: Poly2::new(vec![(0, 1, v[0]), (1, 1, v[1]), (0, 3, v[2]), (2, 1, v[3])]),
    }
}

pub fn family_params() -> HamiltonianParams {
    HamiltonianParams { a: -1.0, b: -2.0, c: 1.0 }
}

/// `H1 = −2x² − 2y² − 2√2x³ − 2√2xy² − 2x²y² + y⁴ − x⁴`.
pub fn h1_poly() -> Poly2 {
    let r = 2.0 * SQRT_2;
    Poly2::new(vec![(2, 0, -2.0), (0, 2, -2.0), (3, 0, -r), (1, 2, -r), (2, 2, -2.0), (0, 4, 1.0), (4, 0, -1.0)])
}

/// `H2(x, y) = H1(x − √2, y) = H1(−x, y)`.
pub fn h2_poly() -> Poly2 {
    let r = 2.0 * SQRT_2;
    Poly2::new(vec![(2, 0, -2.0), (0, 2, -2.0), (3, 0, r), (1, 2, r), (2, 2, -2.0), (0, 4, 1.0), (4, 0, -1.0)])
}

/// `H3 = ½y² − ½x² + x²y² − ½y⁴ + ½x⁴`.
pub fn h3_poly() -> Poly2 {
    Poly2::new(vec![(0, 2, 0.5), (2, 0, -0.5), (2, 2, 1.0), (0, 4, -0.5), (4, 0, 0.5)])
}

/// The two centers of `H1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Center {
    First,
    Second,
}

impl Center {
    pub fn position(self) -> [f64; 2] {
        match self {
            Center::First => [0.0, 0.0],
            Center::Second => [-SQRT_2, 0.0],
        }
    }
}

impl FromStr for Center {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "first" | "1" => Ok(Center::First),
            "second" | "2" => Ok(Center::Second),
            _ => Err(format!("unknown center '{s}' (first, second)")),
        }
    }
}

/// Orbits of `H1` around one of its centers, `h ∈ (−1/4, 0)`. The seed ray
/// runs vertically from the center, where `H1 = −2y² + y⁴`.
pub fn h1_center_annulus(center: Center) -> Result<PeriodAnnulus> {
    let origin = center.position();
    let ray = Ray { origin, dir: [0.0, 1.0], r_lo: 0.0, r_hi: 1.0 };
    let name = match center {
        Center::First => "H1 center (0,0)",
        Center::Second => "H1 center (-sqrt2,0)",
    };
    make_annulus(&h1_poly(), 0, name, AnnulusKind::XLoop, (-0.25, 0.0), ray, Symmetry::Y, Some(origin))
}

/// Which side of the double homoclinic loop of `H3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopSide {
    /// Inside the right loop, `h ∈ (−1/8, 0)`.
    Right,
    /// Inside the left loop, `h ∈ (−1/8, 0)`.
    Left,
    /// Outside both loops, `h ∈ (0, 1/8)`.
    Outer,
}

/// Period annuli of `H3` bordering the double homoclinic loop.
pub fn h3_annulus(side: LoopSide) -> Result<PeriodAnnulus> {
    let h3 = h3_poly();
    let xc = FRAC_1_SQRT_2;
    match side {
        LoopSide::Right | LoopSide::Left => {
            let sgn = if side == LoopSide::Right { 1.0 } else { -1.0 };
            let ray = Ray { origin: [sgn * xc, 0.0], dir: [sgn, 0.0], r_lo: 0.0, r_hi: 1.0 - xc };
            let (id, name) = if sgn > 0.0 { (1, "H3 right loop") } else { (2, "H3 left loop") };
            make_annulus(&h3, id, name, AnnulusKind::XLoop, (-0.125, 0.0), ray, Symmetry::Y, Some([sgn * xc, 0.0]))
        }
        LoopSide::Outer => {
            // H3(x, 0) = 1/8 at x² = (1 + √2)/2
            let x_hi = ((1.0 + SQRT_2) / 2.0).sqrt();
            let ray = Ray { origin: [1.0, 0.0], dir: [1.0, 0.0], r_lo: 0.0, r_hi: x_hi - 1.0 };
            make_annulus(&h3, 3, "H3 outer", AnnulusKind::Exterior, (0.0, 0.125), ray, Symmetry::BOTH, None)
        }
    }
}
