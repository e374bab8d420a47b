//! Abelian integrals `I_ij(h) = ∮ x^i y^j dx` over traced orbits, the
//! reduction of monomials to nine generators, and the Melnikov function.

use crate::error::{domain, numerical, Result};
use crate::family::{Hamiltonian, HamiltonianParams, PeriodAnnulus, Symmetry};
use crate::poly::{Poly, Poly2};
use crate::quadrature::QuadResult;
use crate::tracer::{trace_in, Orbit, TraceOptions};
use nalgebra::DMatrix;
use serde::Serialize;
use std::collections::HashMap;

/// Generator order used throughout: `I01 I03 I21 I23 I12 I11 I13 I02 I22`.
pub const GENERATORS: [(u32, u32); 9] = [(0, 1), (0, 3), (2, 1), (2, 3), (1, 2), (1, 1), (1, 3), (0, 2), (2, 2)];

pub const GENERATOR_NAMES: [&str; 9] = ["I01", "I03", "I21", "I23", "I12", "I11", "I13", "I02", "I22"];

pub fn generator_index(i: u32, j: u32) -> Option<usize> {
    GENERATORS.iter().position(|&g| g == (i, j))
}

/// Power sums of an orbit: `∮ x^i y^j dx`, `∮ x^i y^j dy` and the
/// Gelfand–Leray moments `∮ x^i y^j dx/H_y`, with Kronrod–Gauss gaps.
#[derive(Clone, Debug)]
pub struct Moments {
    pub deg: usize,
    dx: Vec<f64>,
    dx_err: Vec<f64>,
    dy: Vec<f64>,
    dy_err: Vec<f64>,
    dt: Vec<f64>,
}

impl Moments {
    pub fn new(orbit: &Orbit, deg: usize) -> Self {
        let n = deg + 1;
        let mut dx = vec![0.0; n * n];
        let mut dxg = vec![0.0; n * n];
        let mut dy = vec![0.0; n * n];
        let mut dyg = vec![0.0; n * n];
        let mut dt = vec![0.0; n * n];
        let mut xp = vec![1.0; n];
        let mut yp = vec![1.0; n];
        for node in &orbit.nodes {
            for k in 1..n {
                xp[k] = xp[k - 1] * node.x;
                yp[k] = yp[k - 1] * node.y;
            }
            for i in 0..n {
                for j in 0..n - i {
                    let m = xp[i] * yp[j];
                    let idx = i * n + j;
                    dx[idx] += m * node.wx;
                    dxg[idx] += m * node.gx;
                    dy[idx] += m * node.wy;
                    dyg[idx] += m * node.gy;
                    dt[idx] += m * node.wt;
                }
            }
        }
        let dx_err = dx.iter().zip(&dxg).map(|(k, g)| (k - g).abs()).collect();
        let dy_err = dy.iter().zip(&dyg).map(|(k, g)| (k - g).abs()).collect();
        Moments { deg, dx, dx_err, dy, dy_err, dt }
    }

    fn idx(&self, i: u32, j: u32) -> usize {
        let (i, j) = (i as usize, j as usize);
        assert!(i + j <= self.deg, "moment ({i},{j}) beyond table degree {}", self.deg);
        i * (self.deg + 1) + j
    }

    pub fn dx(&self, i: u32, j: u32) -> f64 {
        self.dx[self.idx(i, j)]
    }

    pub fn dx_err(&self, i: u32, j: u32) -> f64 {
        self.dx_err[self.idx(i, j)]
    }

    pub fn dy(&self, i: u32, j: u32) -> f64 {
        self.dy[self.idx(i, j)]
    }

    pub fn dy_err(&self, i: u32, j: u32) -> f64 {
        self.dy_err[self.idx(i, j)]
    }

    /// `d/dh ∮ x^i y^j dx = j ∮ x^i y^(j−1) dx/H_y`
    pub fn derivative(&self, i: u32, j: u32) -> f64 {
        if j == 0 {
            0.0
        } else {
            j as f64 * self.dt[self.idx(i, j - 1)]
        }
    }

    /// `∮ g dx − f dy`
    pub fn melnikov(&self, pert: &PerturbationPoly) -> f64 {
        let mut s = 0.0;
        for &(i, j, c) in &pert.g.terms {
            s += c * self.dx(i, j);
        }
        for &(i, j, c) in &pert.f.terms {
            s -= c * self.dy(i, j);
        }
        s
    }

    pub fn melnikov_err(&self, pert: &PerturbationPoly) -> f64 {
        let mut s = 0.0;
        for &(i, j, c) in &pert.g.terms {
            s += (c * self.dx_err(i, j)).abs();
        }
        for &(i, j, c) in &pert.f.terms {
            s += (c * self.dy_err(i, j)).abs();
        }
        s
    }
}

/// `∮ x^i y^j dx` along the orbit, with the Kronrod–Gauss gap as error.
pub fn integrate_monomial(orbit: &Orbit, i: u32, j: u32) -> Result<QuadResult> {
    if i + j > 60 {
        return domain("monomial degree above 60");
    }
    let (mut k, mut g) = (0.0, 0.0);
    for n in &orbit.nodes {
        let m = n.x.powi(i as i32) * n.y.powi(j as i32);
        k += m * n.wx;
        g += m * n.gx;
    }
    Ok(QuadResult { value: k, error: (k - g).abs() })
}

/// The nine generators at one level.
#[derive(Clone, Debug, Serialize)]
pub struct GeneratorVector {
    pub h: f64,
    pub values: [f64; 9],
    pub est_error: [f64; 9],
}

impl GeneratorVector {
    pub fn get(&self, i: u32, j: u32) -> Option<f64> {
        generator_index(i, j).map(|k| self.values[k])
    }

    pub fn from_moments(h: f64, m: &Moments, sym: Symmetry) -> Self {
        let mut values = [0.0; 9];
        let mut est_error = [0.0; 9];
        for (k, &(i, j)) in GENERATORS.iter().enumerate() {
            if !sym.kills(i, j) {
                values[k] = m.dx(i, j);
                est_error[k] = m.dx_err(i, j);
            }
        }
        GeneratorVector { h, values, est_error }
    }

    /// Generator derivatives from the Gelfand–Leray moments.
    pub fn derivatives_from_moments(h: f64, m: &Moments, sym: Symmetry) -> Self {
        let mut values = [0.0; 9];
        for (k, &(i, j)) in GENERATORS.iter().enumerate() {
            if !sym.kills(i, j) {
                values[k] = m.derivative(i, j);
            }
        }
        GeneratorVector { h, values, est_error: [0.0; 9] }
    }
}

/// Traces once and returns the moment table up to `deg`.
pub fn moments_at<H: Hamiltonian + ?Sized>(ham: &H, annulus: &PeriodAnnulus, h: f64, deg: usize) -> Result<(Orbit, Moments)> {
    let orbit = trace_in(ham, annulus, h, &TraceOptions::default())?;
    let m = Moments::new(&orbit, deg);
    Ok((orbit, m))
}

pub fn generator_vector(p: &HamiltonianParams, annulus: &PeriodAnnulus, h: f64) -> Result<GeneratorVector> {
    let (_, m) = moments_at(p, annulus, h, 5)?;
    Ok(GeneratorVector::from_moments(h, &m, annulus.symmetry))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DerivativeEstimate {
    /// Gelfand–Leray quadrature.
    pub value: f64,
    /// Centered differences with one Richardson step.
    pub fd_value: f64,
    pub fd_step: f64,
    pub agree: bool,
}

/// `dI_ij/dh`, by the Gelfand–Leray form with a finite-difference check.
pub fn derivative_iij(p: &HamiltonianParams, annulus: &PeriodAnnulus, h: f64, i: u32, j: u32) -> Result<DerivativeEstimate> {
    let (lo, hi) = annulus.capped_range(10.0);
    let delta = 1e-4 * (hi - lo).min(1.0);
    if h - 2.0 * delta <= annulus.h_lo || h + 2.0 * delta >= annulus.h_hi {
        return domain(format!("h={h} too close to the annulus boundary for differencing"));
    }
    let deg = (i + j) as usize;
    let at = |hh: f64| -> Result<Moments> { Ok(moments_at(p, annulus, hh, deg)?.1) };
    let m0 = at(h)?;
    let value = m0.derivative(i, j);
    let central = |d: f64| -> Result<f64> { Ok((at(h + d)?.dx(i, j) - at(h - d)?.dx(i, j)) / (2.0 * d)) };
    let d1 = central(delta)?;
    let d2 = central(0.5 * delta)?;
    let fd_value = (4.0 * d2 - d1) / 3.0;
    let agree = (value - fd_value).abs() <= 1e-5 * value.abs().max(fd_value.abs()) + 1e-8;
    Ok(DerivativeEstimate { value, fd_value, fd_step: delta, agree })
}

/// Perturbation `f = Σ a_ij x^i y^j`, `g = Σ b_ij x^i y^j` of degree `n`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct PerturbationPoly {
    pub n: u32,
    pub f: Poly2,
    pub g: Poly2,
}

impl PerturbationPoly {
    pub fn new(n: u32, a: &[(u32, u32, f64)], b: &[(u32, u32, f64)]) -> Result<Self> {
        if let Some(t) = a.iter().chain(b).find(|t| t.0 + t.1 > n) {
            return domain(format!("term x^{}y^{} exceeds degree {n}", t.0, t.1));
        }
        Ok(PerturbationPoly { n, f: Poly2::new(a.to_vec()), g: Poly2::new(b.to_vec()) })
    }

    pub fn zero(n: u32) -> Self {
        PerturbationPoly { n, ..Default::default() }
    }

    pub fn is_zero(&self) -> bool {
        self.f.terms.is_empty() && self.g.terms.is_empty()
    }

    /// Random coefficients uniform in `[-1, 1]`.
    pub fn random<R: FnMut() -> f64>(n: u32, mut uniform: R) -> Self {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 0..=n {
            for j in 0..=n - i {
                a.push((i, j, uniform()));
                b.push((i, j, uniform()));
            }
        }
        PerturbationPoly { n, f: Poly2::new(a), g: Poly2::new(b) }
    }
}

/// `∮ g dx − f dy` over the counterclockwise orbit at level `h`.
pub fn melnikov_eval(p: &HamiltonianParams, pert: &PerturbationPoly, annulus: &PeriodAnnulus, h: f64) -> Result<f64> {
    let (_, m) = moments_at(p, annulus, h, pert.n as usize)?;
    Ok(m.melnikov(pert))
}

/// Coefficient polynomials of a monomial integral in the generator basis.
#[derive(Clone, Debug, Serialize)]
pub struct ReductionResult {
    pub target: (u32, u32),
    pub coeffs: Vec<Poly>,
    pub degrees: Vec<Option<usize>>,
}

impl ReductionResult {
    pub fn eval(&self, v: &GeneratorVector) -> f64 {
        self.coeffs.iter().zip(v.values.iter()).map(|(c, g)| c.eval(v.h) * g).sum()
    }
}

type Combo = Vec<Poly>;

fn combo_zero() -> Combo {
    vec![Poly::zero(); 9]
}

fn combo_add_scaled(acc: &mut Combo, other: &Combo, s: f64, times_h: bool) {
    for (a, o) in acc.iter_mut().zip(other) {
        let mut t = o.scale(s);
        if times_h {
            t = &t * &Poly::new(vec![0.0, 1.0]);
        }
        *a = &*a + &t;
    }
}

/// Reduces `I_ij` to the generators using the level identity
/// `∮ x^k y^l (H − h) dx = 0` and the exactness identity
/// `∮ x^k y^l dH = 0`, solved degree by degree per parity class.
pub struct Reducer {
    p: HamiltonianParams,
    table: HashMap<(u32, u32), Combo>,
    done: HashMap<(u32, u32), u32>,
}

impl Reducer {
    pub fn new(p: &HamiltonianParams) -> Result<Self> {
        if p.a == 0.0 || p.c == 0.0 || p.disc() == 0.0 {
            return domain("reduction needs a·c·(b²−4ac) ≠ 0");
        }
        let mut table = HashMap::new();
        for (k, &g) in GENERATORS.iter().enumerate() {
            let mut c = combo_zero();
            c[k] = Poly::constant(1.0);
            table.insert(g, c);
        }
        Ok(Reducer { p: *p, table, done: HashMap::new() })
    }

    pub fn reduce(&mut self, i: u32, j: u32) -> Result<ReductionResult> {
        let c = self.combo(i, j)?;
        let coeffs: Vec<Poly> = c.iter().map(|q| q.trimmed(1e-13 * (1.0 + q.max_abs()))).collect();
        let degrees = coeffs.iter().map(|q| q.degree(0.0)).collect();
        Ok(ReductionResult { target: (i, j), coeffs, degrees })
    }

    fn combo(&mut self, i: u32, j: u32) -> Result<Combo> {
        if j == 0 {
            return Ok(combo_zero());
        }
        if let Some(c) = self.table.get(&(i, j)) {
            return Ok(c.clone());
        }
        let class = (i % 2, j % 2);
        let d = i + j;
        let start = self.done.get(&class).copied().map(|l| l + 2).unwrap_or((class.0 + class.1) % 2);
        let mut level = start;
        while level <= d {
            self.solve_level(class, level)?;
            self.done.insert(class, level);
            level += 2;
        }
        self.table
            .get(&(i, j))
            .cloned()
            .ok_or_else(|| crate::error::Error::Numerical(format!("I{i}{j} not produced by reduction")))
    }

    fn known(&self, i: i64, j: i64) -> Option<Combo> {
        if i < 0 || j < 0 {
            return Some(combo_zero());
        }
        if j == 0 {
            return Some(combo_zero());
        }
        self.table.get(&(i as u32, j as u32)).cloned()
    }

    fn solve_level(&mut self, class: (u32, u32), d: u32) -> Result<()> {
        let (a, b, c) = (self.p.a, self.p.b, self.p.c);
        let unknowns: Vec<(u32, u32)> = (0..=d)
            .map(|i| (i, d - i))
            .filter(|&(i, j)| i % 2 == class.0 && j % 2 == class.1 && j >= 1)
            .filter(|g| !self.table.contains_key(g))
            .collect();
        if unknowns.is_empty() {
            return Ok(());
        }
        // each equation: list of (coef, i, j, times_h)
        let mut eqs: Vec<Vec<(f64, i64, i64, bool)>> = Vec::new();
        if d >= 4 {
            for k in 0..=(d - 4) {
                let l = d - 4 - k;
                if k % 2 != class.0 || l % 2 != class.1 {
                    continue;
                }
                let (k, l) = (k as i64, l as i64);
                eqs.push(vec![
                    (c, k, l + 4),
                    (b, k + 2, l + 2),
                    (a, k + 4, l),
                    (1.0, k + 2, l),
                    (-1.0, k, l + 2),
                ]
                .into_iter()
                .map(|(s, i, j)| (s, i, j, false))
                .chain(std::iter::once((-1.0, k, l, true)))
                .collect());
            }
        }
        if d >= 3 {
            for k in 0..=(d - 3) {
                let l = d - 3 - k;
                if (k + 1) % 2 != class.0 || l % 2 != class.1 {
                    continue;
                }
                let (kf, lf) = (k as f64, l as f64);
                let (k, l) = (k as i64, l as i64);
                eqs.push(vec![
                    (4.0 * a, k + 3, l, false),
                    (2.0 * b * (1.0 - (kf + 2.0) / (lf + 2.0)), k + 1, l + 2, false),
                    (-4.0 * c * kf / (lf + 4.0), k - 1, l + 4, false),
                    (2.0, k + 1, l, false),
                    (2.0 * kf / (lf + 2.0), k - 1, l + 2, false),
                ]);
            }
        }
        let nu = unknowns.len();
        let mut rows: Vec<(Vec<f64>, Combo)> = Vec::new();
        for eq in &eqs {
            let mut row = vec![0.0; nu];
            let mut rhs = combo_zero();
            let mut touches = false;
            for &(s, i, j, th) in eq {
                if s == 0.0 {
                    continue;
                }
                if i >= 0 && j >= 0 {
                    if let Some(pos) = unknowns.iter().position(|&u| u == (i as u32, j as u32)) {
                        row[pos] += s;
                        touches = true;
                        continue;
                    }
                }
                let val = self.known(i, j).ok_or_else(|| {
                    crate::error::Error::Numerical(format!("reduction ordering: I{i}{j} missing at level {d}"))
                })?;
                combo_add_scaled(&mut rhs, &val, -s, th);
            }
            if touches {
                rows.push((row, rhs));
            }
        }
        let ne = rows.len();
        let m = DMatrix::from_fn(ne, nu, |r, col| rows[r].0[col]);
        let width = rows.iter().flat_map(|r| r.1.iter().map(|q| q.coeffs.len())).max().unwrap_or(1).max(1);
        let rhs = DMatrix::from_fn(ne, 9 * width, |r, col| rows[r].1[col / width].coeff(col % width));
        let svd = m.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if ne < nu || smin <= 1e-12 * smax {
            return domain(format!("reduction singular at degree {d} (class {class:?})"));
        }
        let sol = svd
            .solve(&rhs, 1e-14 * smax)
            .map_err(|e| crate::error::Error::Numerical(e.to_string()))?;
        let resid = (&m * &sol - &rhs).amax();
        if resid > 1e-8 * (1.0 + rhs.amax()) {
            return numerical(format!("inconsistent reduction system at degree {d}: residual {resid:.3e}"));
        }
        for (u, &(i, j)) in unknowns.iter().enumerate() {
            let combo: Combo = (0..9)
                .map(|g| Poly::new((0..width).map(|w| sol[(u, g * width + w)]).collect()))
                .collect();
            self.table.insert((i, j), combo);
        }
        Ok(())
    }
}

pub fn reduce_monomial(p: &HamiltonianParams, i: u32, j: u32) -> Result<ReductionResult> {
    Reducer::new(p)?.reduce(i, j)
}

/// `I(h) = Σ_k c_k(h) V_k(h)` in generator order: `f1..f5` on
/// `I01 I03 I21 I23 I12`, `g1 g2` on `I11 I13`, `l1 l2` on `I02 I22`.
#[derive(Clone, Debug, Serialize)]
pub struct MelnikovDecomposition {
    pub coeffs: Vec<Poly>,
}

impl MelnikovDecomposition {
    pub fn eval(&self, v: &GeneratorVector) -> f64 {
        self.coeffs.iter().zip(v.values.iter()).map(|(c, g)| c.eval(v.h) * g).sum()
    }

    pub fn degree(&self, k: usize) -> Option<usize> {
        self.coeffs[k].degree(1e-12 * (1.0 + self.coeffs[k].max_abs()))
    }
}

pub fn decompose_melnikov(p: &HamiltonianParams, pert: &PerturbationPoly) -> Result<MelnikovDecomposition> {
    let mut red = Reducer::new(p)?;
    let mut acc = combo_zero();
    let add = |red: &mut Reducer, acc: &mut Combo, i: u32, j: u32, s: f64| -> Result<()> {
        let c = red.combo(i, j)?;
        combo_add_scaled(acc, &c, s, false);
        Ok(())
    };
    for &(i, j, c) in &pert.g.terms {
        add(&mut red, &mut acc, i, j, c)?;
    }
    // −∮ x^i y^j dy = (i/(j+1)) I_{i−1,j+1}
    for &(i, j, c) in &pert.f.terms {
        if i > 0 {
            add(&mut red, &mut acc, i - 1, j + 1, c * i as f64 / (j as f64 + 1.0))?;
        }
    }
    Ok(MelnikovDecomposition {
        coeffs: acc.into_iter().map(|q| q.trimmed(1e-13 * (1.0 + q.max_abs()))).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64, b: f64, c: f64) -> HamiltonianParams {
        HamiltonianParams::new(a, b, c).unwrap()
    }

    #[test]
    fn i05_matches_hand_reduction() {
        let q = p(3.0, -3.0, 1.0);
        let r = reduce_monomial(&q, 0, 5).unwrap();
        let (b, c) = (q.b, q.c);
        let k = 5.0 / (12.0 * c);
        // I01: 2h, I03: +7/3, I21: −1, I23: −2b
        assert!((r.coeffs[0].coeff(1) - 2.0 * k).abs() < 1e-12 && r.coeffs[0].coeff(0).abs() < 1e-12);
        assert!((r.coeffs[1].coeff(0) - 7.0 / 3.0 * k).abs() < 1e-12);
        assert!((r.coeffs[2].coeff(0) + k).abs() < 1e-12);
        assert!((r.coeffs[3].coeff(0) + 2.0 * b * k).abs() < 1e-12);
        for g in 4..9 {
            assert!(r.coeffs[g].is_zero(1e-14));
        }
    }

    #[test]
    fn i41_matches_hand_reduction() {
        let q = p(3.0, -3.0, 1.0);
        let r = reduce_monomial(&q, 4, 1).unwrap();
        let k = 1.0 / (12.0 * q.a);
        assert!((r.coeffs[0].coeff(1) - 2.0 * k).abs() < 1e-12);
        assert!((r.coeffs[1].coeff(0) - k / 3.0).abs() < 1e-12);
        assert!((r.coeffs[2].coeff(0) + 7.0 * k).abs() < 1e-12);
        assert!((r.coeffs[3].coeff(0) + 2.0 * q.b * k).abs() < 1e-12);
    }

    #[test]
    fn odd_even_pair_solves_two_by_two() {
        let q = p(3.0, -3.0, 1.0);
        // c I14 + b I32 = I12, b I14 + 4a I32 = −2 I12
        let i14 = reduce_monomial(&q, 1, 4).unwrap();
        let i32_ = reduce_monomial(&q, 3, 2).unwrap();
        let (a, b, c) = (q.a, q.b, q.c);
        let x = i14.coeffs[4].coeff(0);
        let y = i32_.coeffs[4].coeff(0);
        assert!((c * x + b * y - 1.0).abs() < 1e-12);
        assert!((b * x + 4.0 * a * y + 2.0).abs() < 1e-12);
    }

    #[test]
    fn unsupported_without_a() {
        assert!(reduce_monomial(&p(0.0, 1.0, 1.0), 0, 5).is_err());
    }

    #[test]
    fn decomposition_of_single_g_term() {
        let q = p(3.0, -3.0, 1.0);
        let pert = PerturbationPoly::new(3, &[], &[(0, 1, 2.5)]).unwrap();
        let d = decompose_melnikov(&q, &pert).unwrap();
        assert_eq!(d.coeffs[0].coeffs, vec![2.5]);
        assert!(d.coeffs[1..].iter().all(|c| c.is_zero(0.0)));
        let z = decompose_melnikov(&q, &PerturbationPoly::zero(3)).unwrap();
        assert!(z.coeffs.iter().all(|c| c.is_zero(0.0)));
    }
}
