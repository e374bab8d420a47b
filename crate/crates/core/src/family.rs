//! The Hamiltonian family `H = x² − y² + a x⁴ + b x² y² + c y⁴`: region
//! labels, critical points and period annuli.

use crate::error::{domain, numerical, Result};
use crate::roots::bisect;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// Anything with a value, gradient and Hessian in the plane.
pub trait Hamiltonian: Sync {
    fn value(&self, x: f64, y: f64) -> f64;
    fn grad(&self, x: f64, y: f64) -> (f64, f64);
    /// `(H_xx, H_xy, H_yy)`
    fn hessian(&self, x: f64, y: f64) -> (f64, f64, f64);
}

impl Hamiltonian for crate::poly::Poly2 {
    fn value(&self, x: f64, y: f64) -> f64 {
        self.eval(x, y)
    }
    fn grad(&self, x: f64, y: f64) -> (f64, f64) {
        let mut gx = 0.0;
        let mut gy = 0.0;
        for &(i, j, c) in &self.terms {
            if i > 0 {
                gx += c * i as f64 * x.powi(i as i32 - 1) * y.powi(j as i32);
            }
            if j > 0 {
                gy += c * j as f64 * x.powi(i as i32) * y.powi(j as i32 - 1);
            }
        }
        (gx, gy)
    }
    fn hessian(&self, x: f64, y: f64) -> (f64, f64, f64) {
        let (mut hxx, mut hxy, mut hyy) = (0.0, 0.0, 0.0);
        for &(i, j, c) in &self.terms {
            let (fi, fj) = (i as f64, j as f64);
            if i > 1 {
                hxx += c * fi * (fi - 1.0) * x.powi(i as i32 - 2) * y.powi(j as i32);
            }
            if i > 0 && j > 0 {
                hxy += c * fi * fj * x.powi(i as i32 - 1) * y.powi(j as i32 - 1);
            }
            if j > 1 {
                hyy += c * fj * (fj - 1.0) * x.powi(i as i32) * y.powi(j as i32 - 2);
            }
        }
        (hxx, hxy, hyy)
    }
}

/// Coefficients `(a, b, c)` of the family. Derived quantities are
/// recomputed on demand.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HamiltonianParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl HamiltonianParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if c == 0.0 || !c.is_finite() {
            return domain("family requires c ≠ 0");
        }
        if !a.is_finite() || !b.is_finite() {
            return domain("coefficients must be finite");
        }
        Ok(HamiltonianParams { a, b, c })
    }

    /// `b² − 4ac`
    pub fn disc(&self) -> f64 {
        self.b * self.b - 4.0 * self.a * self.c
    }

    /// `b + 2a`
    pub fn s_a(&self) -> f64 {
        self.b + 2.0 * self.a
    }

    /// `b + 2c`
    pub fn s_c(&self) -> f64 {
        self.b + 2.0 * self.c
    }

    /// Level of the off-axis critical points, `(a+b+c)/disc`.
    pub fn h4(&self) -> Option<f64> {
        let d = self.disc();
        (d != 0.0).then(|| (self.a + self.b + self.c) / d)
    }

    /// The same family with x and y exchanged, `y² − x² + … `, as a
    /// bivariate polynomial.
    pub fn swapped_poly(&self) -> crate::poly::Poly2 {
        self.as_poly().swapped()
    }

    pub fn as_poly(&self) -> crate::poly::Poly2 {
        crate::poly::Poly2::new(vec![
            (2, 0, 1.0),
            (0, 2, -1.0),
            (4, 0, self.a),
            (2, 2, self.b),
            (0, 4, self.c),
        ])
    }
}

impl Hamiltonian for HamiltonianParams {
    fn value(&self, x: f64, y: f64) -> f64 {
        eval_h(self, x, y)
    }
    fn grad(&self, x: f64, y: f64) -> (f64, f64) {
        let (x2, y2) = (x * x, y * y);
        (
            2.0 * x * (1.0 + 2.0 * self.a * x2 + self.b * y2),
            2.0 * y * (-1.0 + self.b * x2 + 2.0 * self.c * y2),
        )
    }
    fn hessian(&self, x: f64, y: f64) -> (f64, f64, f64) {
        let (x2, y2) = (x * x, y * y);
        (
            2.0 + 12.0 * self.a * x2 + 2.0 * self.b * y2,
            4.0 * self.b * x * y,
            -2.0 + 2.0 * self.b * x2 + 12.0 * self.c * y2,
        )
    }
}

pub fn eval_h(p: &HamiltonianParams, x: f64, y: f64) -> f64 {
    let (x2, y2) = (x * x, y * y);
    x2 - y2 + p.a * x2 * x2 + p.b * x2 * y2 + p.c * y2 * y2
}

/// Phase-portrait regions of the parameter plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Region {
    D1Plus(u8),
    L1Plus,
    D2Plus,
    L2Plus,
    D3Plus,
    D4Plus(u8),
    D5Plus,
    L3Plus,
    D6Plus,
    D1Minus(u8),
    D2Minus,
    L1Minus,
    D3Minus,
    NoAnnulus,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::D1Plus(k) => write!(f, "D1+({k})"),
            Region::L1Plus => write!(f, "l1+"),
            Region::D2Plus => write!(f, "D2+"),
            Region::L2Plus => write!(f, "l2+"),
            Region::D3Plus => write!(f, "D3+"),
            Region::D4Plus(k) => write!(f, "D4+({k})"),
            Region::D5Plus => write!(f, "D5+"),
            Region::L3Plus => write!(f, "l3+"),
            Region::D6Plus => write!(f, "D6+"),
            Region::D1Minus(k) => write!(f, "D1-({k})"),
            Region::D2Minus => write!(f, "D2-"),
            Region::L1Minus => write!(f, "l1-"),
            Region::D3Minus => write!(f, "D3-"),
            Region::NoAnnulus => write!(f, "NoAnnulus"),
        }
    }
}

impl FromStr for Region {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().replace('−', "-");
        let sub = |prefix: &str| -> Option<u8> {
            let rest = t.strip_prefix(prefix)?;
            let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
            inner.parse::<u8>().ok().filter(|k| (1..=3).contains(k))
        };
        if let Some(k) = sub("D1+") {
            return Ok(Region::D1Plus(k));
        }
        if let Some(k) = sub("D4+") {
            return Ok(Region::D4Plus(k));
        }
        if let Some(k) = sub("D1-") {
            return Ok(Region::D1Minus(k));
        }
        Ok(match t.as_str() {
            "l1+" => Region::L1Plus,
            "D2+" => Region::D2Plus,
            "l2+" => Region::L2Plus,
            "D3+" => Region::D3Plus,
            "D5+" => Region::D5Plus,
            "l3+" => Region::L3Plus,
            "D6+" => Region::D6Plus,
            "D2-" => Region::D2Minus,
            "l1-" => Region::L1Minus,
            "D3-" => Region::D3Minus,
            "NoAnnulus" => Region::NoAnnulus,
            _ => return domain(format!("unknown region label '{s}'")),
        })
    }
}

impl Serialize for RegionLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("RegionLabel", 2)?;
        st.serialize_field("region", &self.region.to_string())?;
        st.serialize_field("a_zero", &self.a_zero)?;
        st.end()
    }
}

/// A region together with the `a = 0` flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegionLabel {
    pub region: Region,
    pub a_zero: bool,
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.a_zero {
            write!(f, "{} (a=0)", self.region)
        } else {
            write!(f, "{}", self.region)
        }
    }
}

fn sgn(v: f64, tol: f64) -> i8 {
    if v.abs() <= tol {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    }
}

/// Classifies with exact signs.
pub fn classify_region(p: &HamiltonianParams) -> Result<RegionLabel> {
    classify_region_tol(p, 0.0)
}

/// Classifies treating any signed quantity with magnitude `≤ tol` as zero,
/// which snaps near-boundary inputs onto the boundary labels.
pub fn classify_region_tol(p: &HamiltonianParams, tol: f64) -> Result<RegionLabel> {
    if p.c == 0.0 {
        return domain("family requires c ≠ 0");
    }
    let (a, b, c) = (p.a, p.b, p.c);
    let sa = sgn(a, tol);
    let sb = sgn(b, tol);
    let sd = sgn(p.disc(), tol);
    let s_a = sgn(p.s_a(), tol);
    let s_c = sgn(p.s_c(), tol);
    let sabc = sgn(a + b + c, tol);
    let region = if c > 0.0 {
        if sa < 0 {
            match s_a {
                1 => Region::D2Plus,
                0 => Region::L1Plus,
                _ => match s_c {
                    1 => Region::D3Plus,
                    0 => Region::L2Plus,
                    _ => Region::D1Plus((sgn(a + c, tol) + 2) as u8),
                },
            }
        } else if sb < 0 && s_c > 0 && sd > 0 {
            Region::D4Plus((2 - sabc) as u8)
        } else if sb >= 0 || (sd <= 0 && s_c > 0) {
            Region::D5Plus
        } else if sd < 0 && s_c == 0 {
            Region::L3Plus
        } else if sd < 0 && s_c < 0 {
            Region::D6Plus
        } else {
            Region::NoAnnulus
        }
    } else if sd > 0 && s_c > 0 && s_a < 0 {
        Region::D1Minus((2 - sabc) as u8)
    } else if (sa < 0 && sb < 0) || (sd <= 0 && s_a < 0) {
        Region::D2Minus
    } else if sd < 0 && s_a == 0 {
        Region::L1Minus
    } else if sd < 0 && s_a > 0 {
        Region::D3Minus
    } else {
        Region::NoAnnulus
    };
    Ok(RegionLabel { region, a_zero: sa == 0 })
}

/// Regions whose printed inequality sets hold literally, with the third
/// region read as `{a<0, b+2c<0}` exactly as captioned. More than one entry
/// signals a caption overlap; none signals a point the captions leave out.
pub fn caption_memberships(p: &HamiltonianParams) -> Vec<Region> {
    let (a, b, c) = (p.a, p.b, p.c);
    let (d, s_a, s_c) = (p.disc(), p.s_a(), p.s_c());
    let mut out = Vec::new();
    if c > 0.0 {
        let checks = [
            (a < 0.0 && s_a < 0.0 && s_c < 0.0, Region::D1Plus(0)),
            (a < 0.0 && s_a > 0.0, Region::D2Plus),
            (a < 0.0 && s_a == 0.0, Region::L1Plus),
            (a < 0.0 && s_c < 0.0, Region::D3Plus),
            (a < 0.0 && s_c == 0.0, Region::L2Plus),
            (a >= 0.0 && b < 0.0 && s_c > 0.0 && d > 0.0, Region::D4Plus(0)),
            ((a >= 0.0 && b >= 0.0) || (d <= 0.0 && s_c > 0.0), Region::D5Plus),
            (d < 0.0 && s_c == 0.0, Region::L3Plus),
            (d < 0.0 && s_c < 0.0, Region::D6Plus),
        ];
        out.extend(checks.iter().filter(|t| t.0).map(|t| t.1));
    } else if c < 0.0 {
        let checks = [
            (d > 0.0 && s_c > 0.0 && s_a < 0.0, Region::D1Minus(0)),
            ((a < 0.0 && b < 0.0) || (d <= 0.0 && s_a < 0.0), Region::D2Minus),
            (d < 0.0 && s_a == 0.0, Region::L1Minus),
            (d < 0.0 && s_a > 0.0, Region::D3Minus),
        ];
        out.extend(checks.iter().filter(|t| t.0).map(|t| t.1));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    Center,
    Saddle,
    Degenerate,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CriticalPoint {
    pub x: f64,
    pub y: f64,
    pub kind: PointKind,
    pub level: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalSet {
    pub points: Vec<CriticalPoint>,
    /// Set when the parameters lie in no region with period annuli.
    pub no_annulus: bool,
}

fn classify_point<H: Hamiltonian>(ham: &H, x: f64, y: f64) -> CriticalPoint {
    // one Newton polish on the gradient
    let (gx, gy) = ham.grad(x, y);
    let (hxx, hxy, hyy) = ham.hessian(x, y);
    let det = hxx * hyy - hxy * hxy;
    let (x, y) = if det.abs() > 1e-14 {
        (x - (hyy * gx - hxy * gy) / det, y - (-hxy * gx + hxx * gy) / det)
    } else {
        (x, y)
    };
    let (hxx, hxy, hyy) = ham.hessian(x, y);
    let det = hxx * hyy - hxy * hxy;
    let scale = (hxx * hxx + 2.0 * hxy * hxy + hyy * hyy).max(1.0);
    let kind = if det.abs() <= 1e-12 * scale {
        PointKind::Degenerate
    } else if det > 0.0 {
        PointKind::Center
    } else {
        PointKind::Saddle
    };
    CriticalPoint { x, y, kind, level: ham.value(x, y) }
}

/// All real critical points, from the closed forms, polished once.
pub fn critical_points(p: &HamiltonianParams) -> Result<CriticalSet> {
    let label = classify_region(p)?;
    let mut pts = vec![classify_point(p, 0.0, 0.0)];
    if p.a < 0.0 {
        let x = (-1.0 / (2.0 * p.a)).sqrt();
        pts.push(classify_point(p, x, 0.0));
        pts.push(classify_point(p, -x, 0.0));
    }
    if p.c > 0.0 {
        let y = (1.0 / (2.0 * p.c)).sqrt();
        pts.push(classify_point(p, 0.0, y));
        pts.push(classify_point(p, 0.0, -y));
    }
    let d = p.disc();
    if d != 0.0 {
        let (x2, y2) = (p.s_c() / d, -p.s_a() / d);
        if x2 > 0.0 && y2 > 0.0 {
            let (x, y) = (x2.sqrt(), y2.sqrt());
            for (sx, sy) in [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)] {
                pts.push(classify_point(p, sx * x, sy * y));
            }
        }
    }
    Ok(CriticalSet { points: pts, no_annulus: label.region == Region::NoAnnulus })
}

/// Reflection symmetries shared by every orbit of an annulus.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Symmetry {
    /// Invariant under `x ↦ −x`; forces `I_ij = 0` for odd `i`.
    pub mirror_x: bool,
    /// Invariant under `y ↦ −y`; forces `I_ij = 0` for even `j`.
    pub mirror_y: bool,
}

impl Symmetry {
    pub const NONE: Symmetry = Symmetry { mirror_x: false, mirror_y: false };
    pub const X: Symmetry = Symmetry { mirror_x: true, mirror_y: false };
    pub const Y: Symmetry = Symmetry { mirror_x: false, mirror_y: true };
    pub const BOTH: Symmetry = Symmetry { mirror_x: true, mirror_y: true };

    /// Whether `∮ x^i y^j dx` vanishes identically by symmetry.
    pub fn kills(&self, i: u32, j: u32) -> bool {
        (self.mirror_x && i % 2 == 1) || (self.mirror_y && j % 2 == 0)
    }
}

/// A half-line `origin + r·dir` with `r ∈ (r_lo, r_hi)` along which `H` is
/// strictly monotone; every level of the annulus crosses it exactly once.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Ray {
    pub origin: [f64; 2],
    pub dir: [f64; 2],
    pub r_lo: f64,
    pub r_hi: f64,
}

impl Ray {
    pub fn point(&self, r: f64) -> [f64; 2] {
        [self.origin[0] + r * self.dir[0], self.origin[1] + r * self.dir[1]]
    }

    pub fn swapped(&self) -> Ray {
        Ray {
            origin: [self.origin[1], self.origin[0]],
            dir: [self.dir[1], self.dir[0]],
            ..*self
        }
    }

    /// Point on the ray at level `h`, or an error when the level does not
    /// cross the ray.
    pub fn solve<H: Hamiltonian + ?Sized>(&self, ham: &H, h: f64) -> Result<[f64; 2]> {
        let phi = |r: f64| {
            let q = self.point(r);
            ham.value(q[0], q[1]) - h
        };
        let lo = self.r_lo;
        let f_lo = phi(lo);
        let hi = if self.r_hi.is_finite() {
            self.r_hi
        } else {
            let mut r = lo + 1.0;
            let mut k = 0;
            while phi(r) != 0.0 && phi(r).signum() == f_lo.signum() && k < 80 {
                r = lo + 2.0 * (r - lo);
                k += 1;
            }
            r
        };
        let f_hi = phi(hi);
        if f_hi == 0.0 && f_lo != 0.0 {
            return Ok(self.point(hi));
        }
        if f_lo == 0.0 || f_lo.signum() == f_hi.signum() {
            return domain(format!("no closed orbit at level {h} through the seed ray"));
        }
        let mut r = bisect(phi, lo, hi, 200);
        // directional Newton polish
        for _ in 0..2 {
            let q = self.point(r);
            let (gx, gy) = ham.grad(q[0], q[1]);
            let d = gx * self.dir[0] + gy * self.dir[1];
            if d != 0.0 {
                let step = phi(r) / d;
                if step.abs() < 1e-8 * (1.0 + r.abs()) {
                    r -= step;
                }
            }
        }
        Ok(self.point(r))
    }
}

/// Which ring of closed orbits an annulus is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnulusKind {
    /// Around a center on the x-axis.
    XLoop,
    /// Around a center on the y-axis.
    YLoop,
    /// Around an off-axis center.
    QuadrantLoop,
    /// Around a pair of off-axis centers.
    PairLoop,
    /// Around the origin.
    Exterior,
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodAnnulus {
    pub id: usize,
    pub name: String,
    pub kind: AnnulusKind,
    /// Open level interval; infinite endpoints mark unbounded annuli.
    pub h_lo: f64,
    pub h_hi: f64,
    pub seed_point: [f64; 2],
    pub ray: Ray,
    pub symmetry: Symmetry,
    /// The enclosed center, for loops around one center.
    pub center: Option<[f64; 2]>,
}

impl PeriodAnnulus {
    pub fn contains(&self, h: f64) -> bool {
        h > self.h_lo && h < self.h_hi
    }

    pub fn unbounded(&self) -> bool {
        !self.h_lo.is_finite() || !self.h_hi.is_finite()
    }

    /// Level interval with infinite ends replaced by the cap magnitude.
    pub fn capped_range(&self, cap: f64) -> (f64, f64) {
        let lo = if self.h_lo.is_finite() { self.h_lo } else { -cap };
        let hi = if self.h_hi.is_finite() { self.h_hi } else { cap };
        (lo, hi)
    }

    pub fn seed<H: Hamiltonian + ?Sized>(&self, ham: &H, h: f64) -> Result<[f64; 2]> {
        if !self.contains(h) {
            return domain(format!(
                "no closed orbit: h={h} outside annulus {} ({}, {})",
                self.id, self.h_lo, self.h_hi
            ));
        }
        self.ray.solve(ham, h)
    }

    /// Mirror image under `x ↔ y`, used for the exchanged family.
    pub fn swapped(&self) -> PeriodAnnulus {
        let kind = match self.kind {
            AnnulusKind::XLoop => AnnulusKind::YLoop,
            AnnulusKind::YLoop => AnnulusKind::XLoop,
            k => k,
        };
        PeriodAnnulus {
            name: format!("{} (x<->y)", self.name),
            kind,
            seed_point: [self.seed_point[1], self.seed_point[0]],
            ray: self.ray.swapped(),
            symmetry: Symmetry { mirror_x: self.symmetry.mirror_y, mirror_y: self.symmetry.mirror_x },
            center: self.center.map(|c| [c[1], c[0]]),
            ..self.clone()
        }
    }
}

/// Builds an annulus and fills its mid-level seed point.
pub fn make_annulus<H: Hamiltonian + ?Sized>(
    ham: &H,
    id: usize,
    name: &str,
    kind: AnnulusKind,
    (h_lo, h_hi): (f64, f64),
    ray: Ray,
    symmetry: Symmetry,
    center: Option<[f64; 2]>,
) -> Result<PeriodAnnulus> {
    let mid = match (h_lo.is_finite(), h_hi.is_finite()) {
        (true, true) => 0.5 * (h_lo + h_hi),
        (true, false) => h_lo + 1.0,
        (false, true) => h_hi - 1.0,
        (false, false) => 0.0,
    };
    let seed_point = ray.solve(ham, mid)?;
    Ok(PeriodAnnulus { id, name: name.to_string(), kind, h_lo, h_hi, seed_point, ray, symmetry, center })
}

const INF: f64 = f64::INFINITY;

/// The period annuli of a region, each with a seed ray.
pub fn annuli(p: &HamiltonianParams) -> Result<Vec<PeriodAnnulus>> {
    let label = classify_region(p)?;
    let (a, c) = (p.a, p.c);
    let h2 = -1.0 / (4.0 * c);
    let h3 = if a != 0.0 { -1.0 / (4.0 * a) } else { f64::NAN };
    let h4 = p.h4().unwrap_or(f64::NAN);
    let xc = if a < 0.0 { (-1.0 / (2.0 * a)).sqrt() } else { f64::NAN };
    let yc = if c > 0.0 { (1.0 / (2.0 * c)).sqrt() } else { f64::NAN };

    let ray = |ox: f64, oy: f64, dx: f64, dy: f64, r_hi: f64| Ray {
        origin: [ox, oy],
        dir: [dx, dy],
        r_lo: 0.0,
        r_hi,
    };
    let mut specs: Vec<(&str, AnnulusKind, (f64, f64), Ray, Symmetry, Option<[f64; 2]>)> = Vec::new();
    let x_loops = |specs: &mut Vec<_>, range: (f64, f64)| {
        specs.push(("x-loop right", AnnulusKind::XLoop, range, ray(xc, 0.0, 1.0, 0.0, INF), Symmetry::Y, Some([xc, 0.0])));
        specs.push(("x-loop left", AnnulusKind::XLoop, range, ray(-xc, 0.0, -1.0, 0.0, INF), Symmetry::Y, Some([-xc, 0.0])));
    };
    let y_loops = |specs: &mut Vec<_>, range: (f64, f64)| {
        specs.push(("y-loop upper", AnnulusKind::YLoop, range, ray(0.0, yc, 0.0, 1.0, INF), Symmetry::X, Some([0.0, yc])));
        specs.push(("y-loop lower", AnnulusKind::YLoop, range, ray(0.0, -yc, 0.0, -1.0, INF), Symmetry::X, Some([0.0, -yc])));
    };
    // exterior annulus seeded on the positive x-axis: beyond the x-axis
    // critical point when there is one, otherwise from the origin
    let outer_beyond_x = |range: (f64, f64)| ("exterior", AnnulusKind::Exterior, range, ray(xc, 0.0, 1.0, 0.0, INF), Symmetry::BOTH, None);
    let outer_inside_x = |range: (f64, f64)| ("exterior", AnnulusKind::Exterior, range, ray(0.0, 0.0, 1.0, 0.0, xc), Symmetry::BOTH, None);
    let outer_free = |range: (f64, f64)| ("exterior", AnnulusKind::Exterior, range, ray(0.0, 0.0, 1.0, 0.0, INF), Symmetry::BOTH, None);
    let quad_loops = |specs: &mut Vec<_>, range: (f64, f64)| {
        let d = p.disc();
        let (xq, yq) = ((p.s_c() / d).sqrt(), (-p.s_a() / d).sqrt());
        for (name, sx, sy) in [
            ("quadrant loop I", 1.0, 1.0),
            ("quadrant loop II", -1.0, 1.0),
            ("quadrant loop III", -1.0, -1.0),
            ("quadrant loop IV", 1.0, -1.0),
        ] {
            specs.push((name, AnnulusKind::QuadrantLoop, range, ray(sx * xq, sy * yq, sx, 0.0, INF), Symmetry::NONE, Some([sx * xq, sy * yq])));
        }
    };

    match label.region {
        Region::D1Plus(_) | Region::L2Plus => {
            x_loops(&mut specs, (0.0, h3));
            specs.push(outer_beyond_x((h2, 0.0)));
        }
        Region::L1Plus | Region::D2Plus => {
            y_loops(&mut specs, (h2, 0.0));
            specs.push(outer_inside_x((0.0, h3)));
        }
        Region::D3Plus => {
            if h4 > 0.0 {
                y_loops(&mut specs, (h2, 0.0));
                specs.push(outer_inside_x((0.0, h4)));
                x_loops(&mut specs, (h4, h3));
            } else if h4 < 0.0 {
                y_loops(&mut specs, (h2, h4));
                specs.push(outer_beyond_x((h4, 0.0)));
                x_loops(&mut specs, (0.0, h3));
            } else {
                y_loops(&mut specs, (h2, 0.0));
                x_loops(&mut specs, (0.0, h3));
            }
        }
        Region::D4Plus(_) => {
            y_loops(&mut specs, (h2, h4.min(0.0)));
            if h4 > 0.0 {
                specs.push(outer_free((0.0, h4)));
            }
        }
        Region::D5Plus | Region::L3Plus => {
            y_loops(&mut specs, (h2, 0.0));
            specs.push(outer_free((0.0, INF)));
        }
        Region::D6Plus => {
            quad_loops(&mut specs, (h4, h2));
            specs.push(("pair upper", AnnulusKind::PairLoop, (h2, 0.0), ray(0.0, yc, 0.0, 1.0, INF), Symmetry::X, None));
            specs.push(("pair lower", AnnulusKind::PairLoop, (h2, 0.0), ray(0.0, -yc, 0.0, -1.0, INF), Symmetry::X, None));
            specs.push(outer_free((0.0, INF)));
        }
        Region::D1Minus(_) => {
            if h4 < 0.0 {
                x_loops(&mut specs, (0.0, h3));
                specs.push(outer_beyond_x((h4, 0.0)));
            } else {
                x_loops(&mut specs, (h4.max(0.0), h3));
            }
        }
        Region::D2Minus | Region::L1Minus => {
            x_loops(&mut specs, (0.0, h3));
            specs.push(outer_beyond_x((-INF, 0.0)));
        }
        Region::D3Minus => {
            quad_loops(&mut specs, (h3, h4));
            specs.push(("pair right", AnnulusKind::PairLoop, (0.0, h3), ray(xc, 0.0, 1.0, 0.0, INF), Symmetry::Y, None));
            specs.push(("pair left", AnnulusKind::PairLoop, (0.0, h3), ray(-xc, 0.0, -1.0, 0.0, INF), Symmetry::Y, None));
            specs.push(outer_beyond_x((-INF, 0.0)));
        }
        Region::NoAnnulus => {}
    }
    let mut out = Vec::with_capacity(specs.len());
    for (id, (name, kind, range, r, sym, center)) in specs.into_iter().enumerate() {
        if !(range.0 < range.1) {
            return numerical(format!("empty annulus interval {range:?} for {name}"));
        }
        out.push(make_annulus(p, id, name, kind, range, r, sym, center)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct G1Zero {
    pub name: &'static str,
    pub value: Option<f64>,
    pub inside_annulus: bool,
    pub note: Option<String>,
}

/// The four roots `0, −1/(4c), −1/(4a), (a+b+c)/disc` of the gating
/// polynomial, flagged when they fall strictly inside an annulus.
pub fn g1_zeros(p: &HamiltonianParams) -> Result<Vec<G1Zero>> {
    if p.a == 0.0 {
        return domain("g1_zeros requires a ≠ 0");
    }
    let ann = annuli(p)?;
    let inside = |h: f64| ann.iter().any(|s| s.contains(h));
    let vals = [
        ("h1", Some(0.0)),
        ("h2", Some(-1.0 / (4.0 * p.c))),
        ("h3", Some(-1.0 / (4.0 * p.a))),
        ("h4", p.h4()),
    ];
    let mut out = Vec::new();
    for (k, &(name, v)) in vals.iter().enumerate() {
        let mut note = None;
        if v.is_none() {
            note = Some("b²−4ac = 0, root undefined".to_string());
        } else if let Some(x) = v {
            let same: Vec<&str> = vals[..k]
                .iter()
                .filter(|(_, w)| w.map_or(false, |w| (w - x).abs() <= 1e-14 * (1.0 + x.abs())))
                .map(|(n, _)| *n)
                .collect();
            if !same.is_empty() {
                note = Some(format!("coincides with {}", same.join(", ")));
            }
        }
        out.push(G1Zero { name, value: v, inside_annulus: v.map_or(false, inside), note });
    }
    Ok(out)
}
