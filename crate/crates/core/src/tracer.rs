//! Closed level curves `H = h`, traced by a curvature-limited marching
//! scheme that stores Gauss–Kronrod nodes for line integrals.

use crate::error::{domain, numerical, Result};
use crate::family::{AnnulusKind, Hamiltonian, HamiltonianParams, PeriodAnnulus};
use crate::quadrature::gk15_nodes;
use serde::Serialize;

/// A quadrature node on the orbit. `wx`, `wy` are the weights of `dx`, `dy`
/// and `wt` the weight of the Gelfand–Leray form `dx/H_y`; the `g*` fields
/// are the embedded Gauss weights used for error estimates.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Node {
    pub x: f64,
    pub y: f64,
    pub wx: f64,
    pub wy: f64,
    pub wt: f64,
    pub gx: f64,
    pub gy: f64,
    pub gt: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Orbit {
    pub h: f64,
    pub annulus_id: usize,
    /// Step endpoints, counterclockwise, first and last coincide.
    pub points: Vec<[f64; 2]>,
    #[serde(skip)]
    pub nodes: Vec<Node>,
    pub closure_gap: f64,
    /// Direction of the Hamiltonian flow `(H_y, −H_x)` along the orbit.
    pub flow_ccw: bool,
}

impl Orbit {
    /// Shoelace area, positive for counterclockwise orbits.
    pub fn area(&self) -> f64 {
        self.nodes.iter().map(|n| n.x * n.wy).sum()
    }

    pub fn max_level_error<H: Hamiltonian + ?Sized>(&self, ham: &H) -> f64 {
        self.points
            .iter()
            .map(|p| (ham.value(p[0], p[1]) - self.h).abs())
            .fold(0.0, f64::max)
    }

    /// Distance from `q` to the polyline through the vertices.
    pub fn distance_to(&self, q: [f64; 2]) -> f64 {
        let mut best = f64::INFINITY;
        for w in self.points.windows(2) {
            let (p0, p1) = (w[0], w[1]);
            let d = [p1[0] - p0[0], p1[1] - p0[1]];
            let len2 = d[0] * d[0] + d[1] * d[1];
            let t = if len2 > 0.0 {
                (((q[0] - p0[0]) * d[0] + (q[1] - p0[1]) * d[1]) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let e = [p0[0] + t * d[0] - q[0], p0[1] + t * d[1] - q[1]];
            best = best.min(e[0].hypot(e[1]));
        }
        best
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("# h={} annulus={}\nx,y\n", self.h, self.annulus_id);
        for p in &self.points {
            s.push_str(&format!("{:.17e},{:.17e}\n", p[0], p[1]));
        }
        s
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TraceOptions {
    pub n_min: usize,
    pub max_vertices: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { n_min: 64, max_vertices: 1_000_000 }
    }
}

/// All real `y` with `H(x, y) = h`, from the quadratic in `y²`, each
/// polished by one Newton step.
pub fn branch_solve(p: &HamiltonianParams, h: f64, x: f64) -> Vec<f64> {
    let x2 = x * x;
    let qa = p.c;
    let qb = p.b * x2 - 1.0;
    let qc = x2 + p.a * x2 * x2 - h;
    let disc = qb * qb - 4.0 * qa * qc;
    let mut ys2 = Vec::new();
    if disc >= 0.0 {
        let sq = disc.sqrt();
        // numerically stable pair
        let q = -0.5 * (qb + qb.signum() * sq);
        if q != 0.0 {
            ys2.push(q / qa);
            ys2.push(qc / q);
        } else {
            ys2.push(0.0);
        }
    }
    let mut out = Vec::new();
    for y2 in ys2 {
        if y2 < 0.0 {
            continue;
        }
        for s in [1.0, -1.0] {
            let mut y = s * y2.sqrt();
            let (_, hy) = p.grad(x, y);
            if hy.abs() > 1e-8 {
                y -= (p.value(x, y) - h) / hy;
            }
            out.push(y);
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + a.abs()));
    out
}

/// Traces the orbit of `p` at level `h` inside `annulus`.
pub fn trace_orbit(p: &HamiltonianParams, annulus: &PeriodAnnulus, h: f64, n_min: usize) -> Result<Orbit> {
    trace_in(p, annulus, h, &TraceOptions { n_min, ..Default::default() })
}

pub fn trace_in<H: Hamiltonian + ?Sized>(ham: &H, annulus: &PeriodAnnulus, h: f64, opts: &TraceOptions) -> Result<Orbit> {
    let seed = annulus.seed(ham, h)?;
    let mut r = (seed[0] - annulus.ray.origin[0]).hypot(seed[1] - annulus.ray.origin[1]);
    if annulus.kind == AnnulusKind::Exterior {
        // exterior orbits enclose the origin; the ray may start on a separatrix
        r = r.max(seed[0].hypot(seed[1]));
    }
    let mut orbit = trace_from(ham, h, seed, r, opts)?;
    orbit.annulus_id = annulus.id;
    Ok(orbit)
}

/// First and second derivative of the dependent coordinate.
struct Local {
    d1: f64,
    d2: f64,
}

fn local<H: Hamiltonian + ?Sized>(ham: &H, x: f64, y: f64, mode_x: bool) -> Local {
    let (hx, hy) = ham.grad(x, y);
    let (hxx, hxy, hyy) = ham.hessian(x, y);
    if mode_x {
        let d1 = -hx / hy;
        let d2 = -(hxx + 2.0 * hxy * d1 + hyy * d1 * d1) / hy;
        Local { d1, d2 }
    } else {
        let d1 = -hy / hx;
        let d2 = -(hyy + 2.0 * hxy * d1 + hxx * d1 * d1) / hx;
        Local { d1, d2 }
    }
}

/// Newton on the dependent coordinate with the parameter fixed.
fn correct<H: Hamiltonian + ?Sized>(ham: &H, h: f64, param: f64, mut dep: f64, mode_x: bool) -> Option<f64> {
    let mut last = f64::INFINITY;
    for it in 0..60 {
        let (x, y) = if mode_x { (param, dep) } else { (dep, param) };
        let f = ham.value(x, y) - h;
        let (hx, hy) = ham.grad(x, y);
        let d = if mode_x { hy } else { hx };
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        let step = f / d;
        dep -= step;
        let tiny = 4.0 * f64::EPSILON * (1.0 + dep.abs());
        // stop once roundoff dominates
        if step.abs() <= tiny || (it > 3 && step.abs() >= 0.5 * last && last < 1e3 * tiny) {
            return Some(dep);
        }
        last = step.abs();
    }
    (last < 1e-11 * (1.0 + dep.abs())).then_some(dep)
}

fn curvature<H: Hamiltonian + ?Sized>(ham: &H, x: f64, y: f64) -> f64 {
    let (hx, hy) = ham.grad(x, y);
    let (hxx, hxy, hyy) = ham.hessian(x, y);
    let g = hx.hypot(hy);
    (hxx * hy * hy - 2.0 * hxy * hx * hy + hyy * hx * hx).abs() / (g * g * g)
}

/// Traces the level curve through `seed` following the Hamiltonian flow.
/// `scale` is a length comparable to the orbit size, used to cap steps.
pub fn trace_from<H: Hamiltonian + ?Sized>(ham: &H, h: f64, seed: [f64; 2], scale: f64, opts: &TraceOptions) -> Result<Orbit> {
    let n_min = opts.n_min.max(8);
    let mut theta = (2.0 * std::f64::consts::PI / n_min as f64).min(0.25);
    for _ in 0..8 {
        let orbit = march(ham, h, seed, scale, theta, n_min, opts.max_vertices)?;
        if orbit.points.len() > n_min {
            return Ok(orbit);
        }
        theta *= 0.5;
    }
    numerical("orbit refinement did not reach the requested vertex count")
}

fn march<H: Hamiltonian + ?Sized>(
    ham: &H,
    h: f64,
    seed: [f64; 2],
    scale: f64,
    theta: f64,
    n_min: usize,
    max_vertices: usize,
) -> Result<Orbit> {
    let (gx0, gy0) = ham.grad(seed[0], seed[1]);
    if gx0.hypot(gy0) == 0.0 {
        return domain("seed is a critical point");
    }
    let s_max = (2.0 * std::f64::consts::PI * scale.max(1e-6) / n_min as f64).max(1e-12);
    let gk = gk15_nodes();
    let mut nodes: Vec<Node> = Vec::with_capacity(16 * n_min);
    let mut points = vec![seed];
    let (mut x, mut y) = (seed[0], seed[1]);
    let mut ds0 = 0.0;
    let mut far = 0.0f64;
    let gap;
    loop {
        if points.len() > max_vertices {
            let g = (x - seed[0]).hypot(y - seed[1]);
            return numerical(format!("orbit failed to close within {max_vertices} vertices (gap {g:.3e})"));
        }
        let (hx, hy) = ham.grad(x, y);
        let mode_x = hy.abs() >= hx.abs();
        let l0 = local(ham, x, y, mode_x);
        // flow direction (H_y, −H_x)
        let tang = if mode_x { hy } else { -hx };
        let gnorm = hx.hypot(hy);
        let kappa = curvature(ham, x, y);
        let mut ds = if kappa > 0.0 { (theta / kappa).min(s_max) } else { s_max };
        if ds0 == 0.0 {
            ds0 = ds;
        }
        let (p0, q0) = if mode_x { (x, y) } else { (y, x) };
        // parameter advance per unit arc
        let dpar_ds = tang.abs() / gnorm * tang.signum();
        let home = points.len() >= 4 && far > 2.0 * ds0;
        let (sp, sq) = if mode_x { (seed[0], seed[1]) } else { (seed[1], seed[0]) };
        let mut closing;
        let (p1, q1, l1) = loop {
            if ds < 1e-13 * (1.0 + scale) {
                return numerical(format!("step size underflow at ({x}, {y})"));
            }
            let mut dp = ds * dpar_ds;
            closing = false;
            if home {
                let t = (sp - p0) / dp;
                if (0.0..=1.0).contains(&t) || (t > 1.0 && t < 1.5) {
                    let dps = sp - p0;
                    let qpred = q0 + l0.d1 * dps + 0.5 * l0.d2 * dps * dps;
                    if (qpred - sq).abs() <= 0.3 * ds.max(dps.abs()) {
                        dp = dps;
                        closing = true;
                    }
                }
            }
            let p1 = p0 + dp;
            let qp = q0 + l0.d1 * dp + 0.5 * l0.d2 * dp * dp;
            let q1 = match correct(ham, h, p1, qp, mode_x) {
                Some(q) => q,
                None => {
                    ds *= 0.5;
                    continue;
                }
            };
            let (x1, y1) = if mode_x { (p1, q1) } else { (q1, p1) };
            let (hx1, hy1) = ham.grad(x1, y1);
            let dep_ok = if mode_x { hy1.abs() } else { hx1.abs() } >= 0.3 * hx1.hypot(hy1);
            let same_side = if mode_x { hy1.signum() == hy.signum() } else { hx1.signum() == hx.signum() };
            if (q1 - qp).abs() > 0.05 * dp.abs() + 1e-14 || !dep_ok || !same_side {
                if closing && dp.abs() < 1e-15 {
                    // already at the seed
                    break (p1, q1, local(ham, x1, y1, mode_x));
                }
                ds *= 0.5;
                continue;
            }
            break (p1, q1, local(ham, x1, y1, mode_x));
        };
        let dp = p1 - p0;
        // nodes
        for &(t, wk, wg) in gk.iter() {
            let s = 0.5 * (t + 1.0);
            let pn = p0 + s * dp;
            let h00 = 2.0 * s * s * s - 3.0 * s * s + 1.0;
            let h10 = s * s * s - 2.0 * s * s + s;
            let h01 = -2.0 * s * s * s + 3.0 * s * s;
            let h11 = s * s * s - s * s;
            let guess = h00 * q0 + h10 * dp * l0.d1 + h01 * q1 + h11 * dp * l1.d1;
            let qn = correct(ham, h, pn, guess, mode_x)
                .ok_or_else(|| crate::error::Error::Numerical(format!("node correction failed near ({x}, {y})")))?;
            let (xn, yn) = if mode_x { (pn, qn) } else { (qn, pn) };
            let (hxn, hyn) = ham.grad(xn, yn);
            let half = 0.5 * dp;
            let node = if mode_x {
                let dydx = -hxn / hyn;
                Node { x: xn, y: yn, wx: wk * half, wy: wk * half * dydx, wt: wk * half / hyn, gx: wg * half, gy: wg * half * dydx, gt: wg * half / hyn }
            } else {
                let dxdy = -hyn / hxn;
                Node { x: xn, y: yn, wx: wk * half * dxdy, wy: wk * half, wt: -wk * half / hxn, gx: wg * half * dxdy, gy: wg * half, gt: -wg * half / hxn }
            };
            nodes.push(node);
        }
        let (x1, y1) = if mode_x { (p1, q1) } else { (q1, p1) };
        x = x1;
        y = y1;
        far = far.max((x - seed[0]).hypot(y - seed[1]));
        if closing {
            gap = (x - seed[0]).hypot(y - seed[1]);
            points.push([x, y]);
            break;
        }
        points.push([x, y]);
    }
    let mut orbit = Orbit { h, annulus_id: 0, points, nodes, closure_gap: gap, flow_ccw: true };
    if orbit.area() < 0.0 {
        orbit.flow_ccw = false;
        orbit.points.reverse();
        orbit.nodes.reverse();
        for n in orbit.nodes.iter_mut() {
            n.wx = -n.wx;
            n.wy = -n.wy;
            n.wt = -n.wt;
            n.gx = -n.gx;
            n.gy = -n.gy;
            n.gt = -n.gt;
        }
    }
    Ok(orbit)
}
