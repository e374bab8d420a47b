//! Picard–Fuchs systems `V = (A h + B) V'` for the generators, the
//! second-order system for `(I01', Z')`, the Riccati equations for the
//! generator ratios, and their numerical verification.

use crate::abelian::Moments;
use crate::error::{domain, Result};
use crate::family::{HamiltonianParams, PeriodAnnulus};
use crate::poly::{Poly, Poly2};
use crate::tracer::{trace_in, TraceOptions};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PfWhich {
    V1,
    V2,
    V3,
    V4,
    /// `a = 0`, on the exchanged Hamiltonian `y² − x² + b x²y² + c x⁴`.
    V5,
    V6,
}

impl PfWhich {
    pub const ALL: [PfWhich; 6] = [PfWhich::V1, PfWhich::V2, PfWhich::V3, PfWhich::V4, PfWhich::V5, PfWhich::V6];

    pub fn generators(&self) -> &'static [(u32, u32)] {
        match self {
            PfWhich::V1 => &[(0, 1), (0, 3), (2, 1), (2, 3)],
            PfWhich::V2 | PfWhich::V6 => &[(1, 1), (1, 3)],
            PfWhich::V3 => &[(0, 2), (2, 2)],
            PfWhich::V4 => &[(0, 1), (0, 3), (2, 1), (2, 3), (1, 2)],
            PfWhich::V5 => &[(0, 1), (0, 3), (2, 1)],
        }
    }

    pub fn a_zero(&self) -> bool {
        matches!(self, PfWhich::V5 | PfWhich::V6)
    }

    pub fn parse(s: &str) -> Result<PfWhich> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "V1" => PfWhich::V1,
            "V2" => PfWhich::V2,
            "V3" => PfWhich::V3,
            "V4" => PfWhich::V4,
            "V5" => PfWhich::V5,
            "V6" => PfWhich::V6,
            _ => return domain(format!("unknown system '{s}'")),
        })
    }
}

#[derive(Clone, Debug)]
pub struct PfSystem {
    pub which: PfWhich,
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

fn check_general(p: &HamiltonianParams) -> Result<()> {
    if p.a == 0.0 || p.c == 0.0 || p.disc() == 0.0 {
        return domain("system requires a·c·(b²−4ac) ≠ 0");
    }
    Ok(())
}

fn check_a_zero(p: &HamiltonianParams) -> Result<()> {
    if p.a != 0.0 || p.b == 0.0 || p.c == 0.0 {
        return domain("a = 0 systems require a = 0, b ≠ 0, c ≠ 0");
    }
    Ok(())
}

fn check(p: &HamiltonianParams, a_zero: bool) -> Result<()> {
    if a_zero {
        check_a_zero(p)
    } else {
        check_general(p)
    }
}

pub fn pf_matrices(p: &HamiltonianParams, which: PfWhich) -> Result<PfSystem> {
    check(p, which.a_zero())?;
    let (a, b, c) = (p.a, p.b, p.c);
    let disc = p.disc();
    let m = |n: usize, v: &[f64]| DMatrix::from_row_slice(n, n, v);
    let (am, bm) = match which {
        PfWhich::V1 | PfWhich::V4 => {
            let a11 = (4.0 * a * c + a * b + b * c) / (8.0 * a * c * disc);
            let a12 = (b + 2.0 * c) / (6.0 * disc);
            let a13 = -(b + 2.0 * a) / (2.0 * disc);
            let b12 = (8.0 * a * c + 3.0 * a * b + b * c) / (48.0 * a * c * disc);
            let b13 = -(8.0 * a * c + a * b + 3.0 * b * c) / (16.0 * a * c * disc);
            let b14 = -(24.0 * a * b * c + 20.0 * a * a * c + a * b * b + 20.0 * a * c * c + b * b * c) / (24.0 * a * c * disc);
            #[rustfmt::skip]
            let a1 = m(4, &[
                2.0, 0.0, 0.0, 0.0,
                3.0 / (4.0 * c), 1.0, 0.0, 0.0,
                -1.0 / (4.0 * a), 0.0, 1.0, 0.0,
                a11, a12, a13, 2.0 / 3.0,
            ]);
            #[rustfmt::skip]
            let b1 = m(4, &[
                0.0, 1.0 / 3.0, -1.0, 0.0,
                0.0, 3.0 / (8.0 * c), -3.0 / (8.0 * c), -b / (4.0 * c) - 0.5,
                0.0, -1.0 / (24.0 * a), 3.0 / (8.0 * a), b / (12.0 * a) + 1.0 / 6.0,
                0.0, b12, b13, b14,
            ]);
            if which == PfWhich::V1 {
                (a1, b1)
            } else {
                let mut a4 = DMatrix::zeros(5, 5);
                let mut b4 = DMatrix::zeros(5, 5);
                a4.view_mut((0, 0), (4, 4)).copy_from(&a1);
                b4.view_mut((0, 0), (4, 4)).copy_from(&b1);
                a4[(4, 4)] = 1.0;
                b4[(4, 4)] = -(a + b + c) / disc;
                (a4, b4)
            }
        }
        PfWhich::V2 => (
            m(2, &[4.0 / 3.0, 0.0, -4.0 * (b + 2.0 * a) / (5.0 * disc), 0.8]),
            m(
                2,
                &[
                    1.0 / (3.0 * a),
                    b / (9.0 * a) + 2.0 / 9.0,
                    -(b + 2.0 * a) / (5.0 * a * disc),
                    -(12.0 * a * c + b * b + 16.0 * a * b + 16.0 * a * a) / (15.0 * a * disc),
                ],
            ),
        ),
        PfWhich::V3 => (
            m(2, &[4.0 / 3.0, 0.0, 4.0 * (b + 2.0 * c) / (15.0 * disc), 0.8]),
            m(
                2,
                &[
                    1.0 / (3.0 * c),
                    -b / (3.0 * c) - 2.0 / 3.0,
                    (b + 2.0 * c) / (15.0 * c * disc),
                    -(b * b + 16.0 * b * c + 16.0 * c * c + 12.0 * a * c) / (15.0 * c * disc),
                ],
            ),
        ),
        PfWhich::V5 => {
            let b2 = b * b;
            #[rustfmt::skip]
            let a5 = m(3, &[
                2.0, 0.0, 0.0,
                (5.0 * c + 4.0 * b) / (2.0 * b2), 2.0 / 3.0, -c / b,
                -1.0 / (2.0 * b), 0.0, 1.0,
            ]);
            #[rustfmt::skip]
            let b5 = m(3, &[
                0.0, -1.0 / 3.0, 1.0,
                0.0, -(13.0 * b + 15.0 * c) / (12.0 * b2), (3.0 * b + 5.0 * c) / (4.0 * b2),
                0.0, (3.0 * c + b) / (12.0 * b * c), (b - c) / (4.0 * b * c),
            ]);
            (a5, b5)
        }
        PfWhich::V6 => {
            let b2 = b * b;
            (
                m(2, &[4.0 / 3.0, 0.0, (4.0 * b * c + 8.0 * c * c) / (5.0 * b2 * c), 0.8]),
                m(
                    2,
                    &[
                        1.0 / (3.0 * c),
                        -(b + 2.0 * c) / (9.0 * c),
                        (b + 2.0 * c) / (5.0 * b2 * c),
                        -(b2 + 16.0 * b * c + 16.0 * c * c) / (15.0 * b2 * c),
                    ],
                ),
            )
        }
    };
    Ok(PfSystem { which, a: am, b: bm })
}

/// Hamiltonian and annulus on which a system's generators live: the family
/// itself, or its x↔y exchange for the `a = 0` systems.
pub fn working_chart(p: &HamiltonianParams, annulus: &PeriodAnnulus, a_zero: bool) -> (Poly2, PeriodAnnulus) {
    if a_zero {
        (p.swapped_poly(), annulus.swapped())
    } else {
        (p.as_poly(), annulus.clone())
    }
}

fn moments(p: &HamiltonianParams, annulus: &PeriodAnnulus, h: f64, a_zero: bool) -> Result<Moments> {
    let (ham, ann) = working_chart(p, annulus, a_zero);
    let orbit = trace_in(&ham, &ann, h, &TraceOptions { n_min: 96, ..Default::default() })?;
    Ok(Moments::new(&orbit, 6))
}

fn value(m: &Moments, annulus: &PeriodAnnulus, a_zero: bool, i: u32, j: u32) -> (f64, f64) {
    let sym = if a_zero { annulus.swapped().symmetry } else { annulus.symmetry };
    if sym.kills(i, j) {
        (0.0, 0.0)
    } else {
        (m.dx(i, j), m.derivative(i, j))
    }
}

/// `‖V − (A h + B) V'‖ / max(1, ‖V‖)` with `V'` from the Gelfand–Leray
/// quadrature on the same orbit.
pub fn pf_residual(p: &HamiltonianParams, which: PfWhich, annulus: &PeriodAnnulus, h: f64) -> Result<f64> {
    let sys = pf_matrices(p, which)?;
    let m = moments(p, annulus, h, which.a_zero())?;
    let gens = which.generators();
    let n = gens.len();
    let v = DVector::from_iterator(n, gens.iter().map(|&(i, j)| value(&m, annulus, which.a_zero(), i, j).0));
    let dv = DVector::from_iterator(n, gens.iter().map(|&(i, j)| value(&m, annulus, which.a_zero(), i, j).1));
    let r = &v - (&sys.a * h + &sys.b) * &dv;
    Ok(r.norm() / v.norm().max(1.0))
}

/// `G (rows)'' = D (I01', Z')ᵀ`: rows are linear combinations of generators.
#[derive(Clone, Debug, Serialize)]
pub struct SecondOrderSystem {
    pub a_zero: bool,
    pub g: Poly,
    pub rows: Vec<Vec<((u32, u32), f64)>>,
    pub row_names: Vec<&'static str>,
    pub d: Vec<[Poly; 2]>,
    /// `Z` (or `Z̄`) as a combination of generators.
    pub z: Vec<((u32, u32), f64)>,
}

fn lin(c0: f64, c1: f64) -> Poly {
    Poly::new(vec![c0, c1])
}

fn hpoly() -> Poly {
    lin(0.0, 1.0)
}

fn prod(ps: &[Poly]) -> Poly {
    ps.iter().fold(Poly::constant(1.0), |acc, q| &acc * q)
}

pub fn second_order_system(p: &HamiltonianParams) -> Result<SecondOrderSystem> {
    let (a, b, c) = (p.a, p.b, p.c);
    if p.a == 0.0 {
        check_a_zero(p)?;
        let b2 = b * b;
        let g = prod(&[Poly::constant(b2), hpoly(), lin(1.0, 4.0 * c), lin(-(b + c) / b2, 1.0)]);
        let q = lin(b2 - b * c - 2.0 * c * c, 4.0 * b2 * c);
        let d11 = prod(&[Poly::constant(-0.5), hpoly(), q.clone()]);
        let d12 = lin(b + c, 2.0 * b * c).scale(5.0 * b / 12.0);
        let d21 = prod(&[Poly::constant(-1.5 * (b + c)), hpoly(), lin(1.0, 4.0 * c)]);
        let d22 = prod(&[Poly::constant(1.25 * b2), hpoly(), lin(1.0, 4.0 * c)]);
        let d31 = prod(&[Poly::constant(-3.0 / (5.0 * b)), hpoly(), lin(b2 - c * c, 4.0 * b2 * c + 2.0 * b * c * c)]);
        let d32 = prod(&[Poly::constant(0.5), hpoly(), q]);
        let z = vec![((0, 3), 0.4), ((2, 1), 6.0 * c / (5.0 * b))];
        return Ok(SecondOrderSystem {
            a_zero: true,
            g,
            rows: vec![vec![((0, 1), 1.0)], vec![((0, 3), 1.0)], z.clone()],
            row_names: vec!["I01", "I03", "Zbar"],
            d: vec![[d11, d12], [d21, d22], [d31, d32]],
            z,
        });
    }
    check_general(p)?;
    let disc = p.disc();
    let h4 = (a + b + c) / disc;
    let ac = a * c;
    let hm4 = lin(-h4, 1.0);
    let g = prod(&[Poly::constant(1.0 / (12.0 * ac)), hpoly(), lin(1.0, 4.0 * a), lin(1.0, 4.0 * c), hm4.clone()]);
    let e = lin(a + c, 8.0 * ac);
    let f = lin(a + b + c, 2.0 * a * b + 8.0 * ac + 2.0 * b * c);
    let d11 = prod(&[Poly::constant(-1.0 / (12.0 * ac)), hpoly(), e.clone(), hm4.clone()]);
    let d12 = f.scale(-1.0 / (24.0 * ac));
    let d21 = prod(&[Poly::constant(-1.0 / (8.0 * ac)), hpoly(), lin(1.0, 4.0 * a), hm4.clone()]);
    let d22 = prod(&[Poly::constant((b + 2.0 * c) / (8.0 * ac)), hpoly(), lin(1.0, 4.0 * a)]);
    let d31 = prod(&[Poly::constant(1.0 / (24.0 * ac)), hpoly(), lin(1.0, 4.0 * c), hm4.clone()]);
    let d32 = prod(&[Poly::constant(-(b + 2.0 * a) / (24.0 * ac)), hpoly(), lin(1.0, 4.0 * c)]);
    // the printed coefficient has the opposite sign; this one follows from V1
    let d41 = prod(&[Poly::constant(1.0 / (24.0 * ac * disc)), hpoly(), f, hm4.clone()]);
    let d42 = prod(&[Poly::constant(1.0 / (12.0 * ac)), hpoly(), e, hm4]);
    let z = vec![((0, 3), -(b + 2.0 * c) / (6.0 * disc)), ((2, 1), (b + 2.0 * a) / (2.0 * disc)), ((2, 3), 1.0 / 3.0)];
    Ok(SecondOrderSystem {
        a_zero: false,
        g,
        rows: vec![vec![((0, 1), 1.0)], vec![((0, 3), 1.0)], vec![((2, 1), 1.0)], z.clone(), vec![((1, 2), 1.0)]],
        row_names: vec!["I01", "I03", "I21", "Z", "I12"],
        d: vec![[d11, d12], [d21, d22], [d31, d32], [d41, d42], [Poly::zero(), Poly::zero()]],
        z,
    })
}

/// First and second derivatives of a generator combination at `h`; the
/// second by centered differences of the exact first derivatives.
fn combo_derivs(
    p: &HamiltonianParams,
    annulus: &PeriodAnnulus,
    h: f64,
    a_zero: bool,
    combos: &[Vec<((u32, u32), f64)>],
) -> Result<Vec<(f64, f64, f64)>> {
    let (lo, hi) = annulus.capped_range(10.0);
    let delta = 1e-3 * (hi - lo).min(1.0);
    if h - delta <= annulus.h_lo || h + delta >= annulus.h_hi {
        return domain(format!("h={h} too close to the annulus boundary for differencing"));
    }
    let eval = |m: &Moments| -> Vec<(f64, f64)> {
        combos
            .iter()
            .map(|cb| {
                cb.iter().fold((0.0, 0.0), |acc, &((i, j), s)| {
                    let (v, d) = value(m, annulus, a_zero, i, j);
                    (acc.0 + s * v, acc.1 + s * d)
                })
            })
            .collect()
    };
    let m0 = eval(&moments(p, annulus, h, a_zero)?);
    let fd = |d: f64| -> Result<Vec<f64>> {
        let up = eval(&moments(p, annulus, h + d, a_zero)?);
        let dn = eval(&moments(p, annulus, h - d, a_zero)?);
        Ok(up.iter().zip(&dn).map(|(u, w)| (u.1 - w.1) / (2.0 * d)).collect())
    };
    let f1 = fd(delta)?;
    let f2 = fd(0.5 * delta)?;
    Ok(m0
        .iter()
        .enumerate()
        .map(|(k, &(v, d))| (v, d, (4.0 * f2[k] - f1[k]) / 3.0))
        .collect())
}

/// Relative residual of the second-order system at `h`.
pub fn second_order_residual(p: &HamiltonianParams, annulus: &PeriodAnnulus, h: f64) -> Result<f64> {
    let sys = second_order_system(p)?;
    let mut combos = sys.rows.clone();
    combos.push(vec![((0, 1), 1.0)]);
    combos.push(sys.z.clone());
    let d = combo_derivs(p, annulus, h, sys.a_zero, &combos)?;
    let nrow = sys.rows.len();
    let (w1, w2) = (d[nrow].1, d[nrow + 1].1);
    let g = sys.g.eval(h);
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for k in 0..nrow {
        let lhs = g * d[k].2;
        let rhs = sys.d[k][0].eval(h) * w1 + sys.d[k][1].eval(h) * w2;
        num = num.max((lhs - rhs).abs());
        den = den.max(lhs.abs()).max(rhs.abs());
    }
    Ok(num / den.max(1e-300))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RiccatiWhich {
    /// `Z'/I01'`
    Omega1,
    /// `I13/I11`
    Omega2,
    /// `I22/I02`
    Omega3,
    /// `Z̄'/I01'` for `a = 0`.
    OmegaBar1,
    /// `I13/I11` for `a = 0`.
    OmegaBar2,
}

impl RiccatiWhich {
    pub fn a_zero(&self) -> bool {
        matches!(self, RiccatiWhich::OmegaBar1 | RiccatiWhich::OmegaBar2)
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "omega1" | "w1" => RiccatiWhich::Omega1,
            "omega2" | "w2" => RiccatiWhich::Omega2,
            "omega3" | "w3" => RiccatiWhich::Omega3,
            "omegabar1" | "wbar1" => RiccatiWhich::OmegaBar1,
            "omegabar2" | "wbar2" => RiccatiWhich::OmegaBar2,
            _ => return domain(format!("unknown Riccati selector '{s}'")),
        })
    }
}

/// `G ω' = −q2 ω² + q1 ω + q0`
#[derive(Clone, Debug, Serialize)]
pub struct RiccatiSystem {
    pub which: RiccatiWhich,
    pub g: Poly,
    pub q2: Poly,
    pub q1: Poly,
    pub q0: Poly,
}

impl RiccatiSystem {
    pub fn rhs(&self, h: f64, w: f64) -> f64 {
        -self.q2.eval(h) * w * w + self.q1.eval(h) * w + self.q0.eval(h)
    }
}

pub fn riccati_system(p: &HamiltonianParams, which: RiccatiWhich) -> Result<RiccatiSystem> {
    check(p, which.a_zero())?;
    let (a, b, c) = (p.a, p.b, p.c);
    let sys = |g, q2, q1, q0| Ok(RiccatiSystem { which, g, q2, q1, q0 });
    match which {
        RiccatiWhich::Omega1 | RiccatiWhich::OmegaBar1 => {
            let s = second_order_system(p)?;
            let (g, d11, d12) = (s.g.clone(), s.d[0][0].clone(), s.d[0][1].clone());
            // row of Z'' (general) or Z̄'' (a = 0)
            let zr = if which == RiccatiWhich::Omega1 { 3 } else { 2 };
            let (d41, d42) = (s.d[zr][0].clone(), s.d[zr][1].clone());
            sys(g, d12, &d42 - &d11, d41)
        }
        RiccatiWhich::Omega2 => {
            let disc = p.disc();
            let h4 = (a + b + c) / disc;
            let g = prod(&[Poly::constant(4.0 / (15.0 * a)), lin(1.0, 4.0 * a), lin(-h4, 1.0)]);
            let a1 = lin(-(12.0 * a * c + b * b + 16.0 * a * b + 16.0 * a * a) / (15.0 * a * disc), 0.8);
            let a2 = Poly::constant(-b / (9.0 * a) - 2.0 / 9.0);
            let a3 = lin((b + 2.0 * a) / (5.0 * a * disc), 4.0 * (b + 2.0 * a) / (5.0 * disc));
            let a4 = lin(1.0 / (3.0 * a), 4.0 / 3.0);
            sys(g, a2, &a4 - &a1, a3)
        }
        RiccatiWhich::Omega3 => {
            let disc = p.disc();
            let h4 = (a + b + c) / disc;
            let g = prod(&[Poly::constant(4.0 / (15.0 * c)), lin(1.0, 4.0 * c), lin(-h4, 1.0)]);
            let b1 = lin(-(12.0 * a * c + b * b + 16.0 * b * c + 16.0 * c * c) / (15.0 * c * disc), 0.8);
            let b2 = Poly::constant(b / (3.0 * c) + 2.0 / 3.0);
            let b3 = lin(-(b + 2.0 * c) / (15.0 * c * disc), -4.0 * (b + 2.0 * c) / (15.0 * disc));
            let b4 = lin(1.0 / (3.0 * c), 4.0 / 3.0);
            sys(g, b2, &b4 - &b1, b3)
        }
        RiccatiWhich::OmegaBar2 => {
            let b2 = b * b;
            let g = prod(&[Poly::constant(b2), lin(1.0, 4.0 * c), lin(-(b + c) / b2, 1.0)]);
            let a1 = lin(-b2 - 16.0 * b * c - 16.0 * c * c, 12.0 * b2 * c).scale(0.25);
            let a2 = Poly::constant(5.0 / 12.0 * (b + 2.0 * c) * b2);
            let a3 = lin(1.0, 4.0 * c).scale(-0.75 * (b + 2.0 * c));
            let a4 = lin(1.0, 4.0 * c).scale(1.25 * b2);
            sys(g, a2, &a4 - &a1, a3)
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RiccatiCheck {
    pub h: f64,
    pub omega: f64,
    pub domega: f64,
    /// `|G ω' − RHS|`
    pub residual: f64,
    /// The same, divided by `max(|G ω'|, |RHS|)`.
    pub relative: f64,
    /// Magnitude of the ratio's denominator.
    pub denominator: f64,
}

pub fn riccati_residual(p: &HamiltonianParams, which: RiccatiWhich, annulus: &PeriodAnnulus, h: f64) -> Result<RiccatiCheck> {
    riccati_residual_with(p, &riccati_system(p, which)?, annulus, h)
}

/// Residual of an arbitrary coefficient set for the ratio selected by `sys.which`.
pub fn riccati_residual_with(p: &HamiltonianParams, sys: &RiccatiSystem, annulus: &PeriodAnnulus, h: f64) -> Result<RiccatiCheck> {
    let which = sys.which;
    let (omega, domega, denominator) = match which {
        RiccatiWhich::Omega1 | RiccatiWhich::OmegaBar1 => {
            let so = second_order_system(p)?;
            let combos = vec![vec![((0, 1), 1.0)], so.z.clone()];
            let d = combo_derivs(p, annulus, h, which.a_zero(), &combos)?;
            let (n1, n2) = (d[0].1, d[1].1);
            let (dn1, dn2) = (d[0].2, d[1].2);
            (n2 / n1, (dn2 * n1 - n2 * dn1) / (n1 * n1), n1.abs())
        }
        RiccatiWhich::Omega2 | RiccatiWhich::OmegaBar2 | RiccatiWhich::Omega3 => {
            let (num, den) = if which == RiccatiWhich::Omega3 { ((2, 2), (0, 2)) } else { ((1, 3), (1, 1)) };
            let sym = if which.a_zero() { annulus.swapped().symmetry } else { annulus.symmetry };
            if sym.kills(den.0, den.1) {
                return domain(format!("I{}{} vanishes identically on {}", den.0, den.1, annulus.name));
            }
            let m = moments(p, annulus, h, which.a_zero())?;
            let (u, du) = value(&m, annulus, which.a_zero(), num.0, num.1);
            let (v, dv) = value(&m, annulus, which.a_zero(), den.0, den.1);
            (u / v, (du * v - u * dv) / (v * v), v.abs())
        }
    };
    let lhs = sys.g.eval(h) * domega;
    let rhs = sys.rhs(h, omega);
    let residual = (lhs - rhs).abs();
    Ok(RiccatiCheck { h, omega, domega, residual, relative: residual / lhs.abs().max(rhs.abs()).max(1e-300), denominator })
}

/// `I11 = C1 (h + 1/(4c))` on the right loop of `y² − x² + c x⁴`
/// (counterclockwise). `C1` comes from one quadrature at the reference
/// level `−1/(8c)`; analytically `C1 = −π/(2√c)`.
pub fn closed_form_i11_abzero(p: &HamiltonianParams, h: f64) -> Result<f64> {
    Ok(i11_abzero_constant(p)? * (h + 0.25 / p.c))
}

fn check_ab_zero(p: &HamiltonianParams) -> Result<()> {
    if p.a != 0.0 || p.b != 0.0 || p.c <= 0.0 {
        return domain("closed form needs a = b = 0, c > 0");
    }
    Ok(())
}

/// Right loop of the exchanged Hamiltonian for `a = b = 0`, as an annulus of
/// the exchanged chart.
pub fn abzero_loop(p: &HamiltonianParams) -> Result<PeriodAnnulus> {
    check_ab_zero(p)?;
    crate::family::annuli(p)?
        .into_iter()
        .find(|an| an.center.is_some_and(|c| c[1] > 0.0))
        .map(|an| an.swapped())
        .ok_or_else(|| crate::Error::Domain("no loop around (0, +y_c)".into()))
}

pub fn i11_abzero_constant(p: &HamiltonianParams) -> Result<f64> {
    let ann = abzero_loop(p)?;
    let h_ref = -0.125 / p.c;
    let orbit = trace_in(&p.swapped_poly(), &ann, h_ref, &TraceOptions::default())?;
    let m = Moments::new(&orbit, 2);
    Ok(m.dx(1, 1) / (h_ref + 0.25 / p.c))
}

/// The reduced system for `a = b = 0`:
/// `h(4ch+1)(I01', I21')ᵀ = [[3ch+1, −5c/2], [−h/2, 5ch]] (I01, I21)ᵀ`.
pub fn abzero_matrix(c: f64, h: f64) -> ([[f64; 2]; 2], f64) {
    ([[3.0 * c * h + 1.0, -2.5 * c], [-0.5 * h, 5.0 * c * h]], h * (4.0 * c * h + 1.0))
}
