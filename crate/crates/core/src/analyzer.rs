//! Zero scanning of the Melnikov function on a period annulus and the
//! published per-region ceilings.

use crate::abelian::{moments_at, Moments, PerturbationPoly};
use crate::error::{domain, Error, Result};
use crate::family::{Hamiltonian, HamiltonianParams, PeriodAnnulus, Region, RegionLabel};
use crate::roots::{refine, sign_changes};
use serde::Serialize;

/// Width used for the far end of an unbounded annulus when no override is given.
pub const DEFAULT_UNBOUNDED_SPAN: f64 = 4.0;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ZeroPoint {
    pub h: f64,
    pub width: f64,
    /// Sign of `I` across the zero: +1 increasing, −1 decreasing.
    pub slope: i8,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroReport {
    pub region: String,
    pub n: u32,
    pub annulus_id: usize,
    pub annulus: String,
    pub h_range: (f64, f64),
    pub grid_size: usize,
    pub zeros: Vec<ZeroPoint>,
    /// Grid points where `|I|` has a local minimum below `1e−9·scale`
    /// without a sign change.
    pub suspected_even: Vec<f64>,
    pub identically_zero: bool,
    pub scale: f64,
    pub excluded: usize,
    pub warnings: Vec<String>,
    pub ceiling: Option<i64>,
    pub ceiling_respected: bool,
}

/// `β` with `t(0.1) = 0.01` for `t(u) = ½(1 + tanh(β(2u−1))/tanh β)`.
fn stretch_beta() -> f64 {
    let t = |beta: f64| 0.5 * (1.0 + (beta * -0.8).tanh() / beta.tanh());
    crate::roots::bisect(|b| t(b) - 0.01, 0.1, 20.0, 200)
}

/// Interior grid on `(lo, hi)` clustered toward both ends: 10% of the
/// points fall in each outer 1%.
pub fn stretched_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let beta = stretch_beta();
    (0..n)
        .map(|k| {
            let u = (k as f64 + 0.5) / n as f64;
            let t = 0.5 * (1.0 + (beta * (2.0 * u - 1.0)).tanh() / beta.tanh());
            lo + t * (hi - lo)
        })
        .collect()
}

/// Scan interval for an annulus: finite ends as given, an infinite end
/// replaced by `h_max_override` or by `DEFAULT_UNBOUNDED_SPAN·max(1, |finite end|)`.
pub fn scan_range(annulus: &PeriodAnnulus, h_max_override: Option<f64>) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = (annulus.h_lo, annulus.h_hi);
    if !hi.is_finite() {
        hi = h_max_override.unwrap_or(lo + DEFAULT_UNBOUNDED_SPAN * lo.abs().max(1.0));
    } else if !lo.is_finite() {
        lo = h_max_override.unwrap_or(hi - DEFAULT_UNBOUNDED_SPAN * hi.abs().max(1.0));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return domain(format!("empty scan range ({lo}, {hi}) for annulus {}", annulus.id));
    }
    Ok((lo, hi))
}

/// Orbits' moment tables on a stretched grid, reusable across perturbations
/// of degree at most `deg`.
pub struct ScanGrid {
    pub annulus: PeriodAnnulus,
    pub range: (f64, f64),
    pub deg: usize,
    pub hs: Vec<f64>,
    moments: Vec<std::result::Result<Moments, Error>>,
}

impl ScanGrid {
    pub fn new(p: &HamiltonianParams, annulus: &PeriodAnnulus, deg: u32, grid_size: usize, h_max_override: Option<f64>) -> Result<Self> {
        if grid_size < 32 {
            return domain(format!("grid_size {grid_size} < 32"));
        }
        let range = scan_range(annulus, h_max_override)?;
        let hs = stretched_grid(range.0, range.1, grid_size);
        let deg = deg.max(1) as usize;
        let moments = par_map(&hs, |h| moments_at(p, annulus, h, deg).map(|r| r.1));
        Ok(ScanGrid { annulus: annulus.clone(), range, deg, hs, moments })
    }

    /// `(h, I(h), error estimate)` at every grid point, or the failure.
    pub fn values(&self, pert: &PerturbationPoly) -> Vec<(f64, Result<(f64, f64)>)> {
        self.hs
            .iter()
            .zip(&self.moments)
            .map(|(&h, m)| (h, m.as_ref().map(|m| (m.melnikov(pert), m.melnikov_err(pert))).map_err(Clone::clone)))
            .collect()
    }
}

pub fn zero_scan(
    p: &HamiltonianParams,
    pert: &PerturbationPoly,
    annulus: &PeriodAnnulus,
    grid_size: usize,
    h_max_override: Option<f64>,
) -> Result<ZeroReport> {
    let grid = ScanGrid::new(p, annulus, pert.n, grid_size, h_max_override)?;
    zero_scan_on(p, pert, &grid, true)
}

/// Zero scan on a precomputed grid. Without `refine_zeros` the zeros are the
/// grid brackets themselves (midpoint, bracket width).
pub fn zero_scan_on(p: &HamiltonianParams, pert: &PerturbationPoly, grid: &ScanGrid, refine_zeros: bool) -> Result<ZeroReport> {
    if pert.n as usize > grid.deg {
        return domain(format!("perturbation degree {} exceeds grid degree {}", pert.n, grid.deg));
    }
    let label = crate::family::classify_region(p)?;
    let annulus = &grid.annulus;
    let raw = grid.values(pert);
    let scale_all = raw.iter().filter_map(|(_, r)| r.as_ref().ok()).fold(0.0f64, |m, v| m.max(v.0.abs()));
    let mut warnings = Vec::new();
    let mut hs = Vec::with_capacity(raw.len());
    let mut vals = Vec::with_capacity(raw.len());
    let mut excluded = 0;
    for (h, r) in raw {
        match r {
            Ok((v, err)) if v.is_finite() && err <= 1e-6 * scale_all + 1e-13 => {
                hs.push(h);
                vals.push(v);
            }
            Ok((v, err)) => {
                excluded += 1;
                warnings.push(format!("h={h:.6e}: quadrature flagged (I={v:.3e}, err={err:.1e})"));
            }
            Err(e) => {
                excluded += 1;
                warnings.push(format!("h={h:.6e}: {e}"));
            }
        }
    }
    if hs.len() < 2 {
        return Err(Error::Numerical(format!("only {} usable grid points on annulus {}", hs.len(), annulus.id)));
    }
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let ceiling = region_ceiling(&label, pert.n).ok();
    let mut report = ZeroReport {
        region: label.to_string(),
        n: pert.n,
        annulus_id: annulus.id,
        annulus: annulus.name.clone(),
        h_range: grid.range,
        grid_size: grid.hs.len(),
        zeros: Vec::new(),
        suspected_even: Vec::new(),
        identically_zero: scale < 1e-12,
        scale,
        excluded,
        warnings,
        ceiling,
        ceiling_respected: true,
    };
    if report.identically_zero {
        report.warnings.push("identically zero (below 1e-12 everywhere)".into());
        return Ok(report);
    }
    let deg = grid.deg;
    let f = |h: f64| -> Result<f64> { Ok(moments_at(p, annulus, h, deg)?.1.melnikov(pert)) };
    let (zeros, suspected) = locate_zeros(&hs, &vals, f, refine_zeros, scale)?;
    report.zeros = zeros;
    report.suspected_even = suspected;
    if let Some(c) = ceiling {
        // negative published bounds (small n on the a = 0 rows) are read as 0
        report.ceiling_respected = (report.zeros.len() as i64) <= c.max(0);
    }
    Ok(report)
}

/// Sign changes (refined or bracketed), exact zeros and suspected double
/// zeros of sampled values.
fn locate_zeros<F: FnMut(f64) -> Result<f64>>(
    hs: &[f64],
    vals: &[f64],
    f: F,
    refine_zeros: bool,
    scale: f64,
) -> Result<(Vec<ZeroPoint>, Vec<f64>)> {
    let mut f = f;
    let mut zeros = Vec::new();
    for k in 0..hs.len() {
        if vals[k] == 0.0 {
            zeros.push(ZeroPoint { h: hs[k], width: 0.0, slope: slope_at(vals, k), value: 0.0 });
        }
    }
    for k in sign_changes(vals) {
        let slope = if vals[k + 1] > vals[k] { 1 } else { -1 };
        if refine_zeros {
            let b = refine(&mut f, hs[k], hs[k + 1], vals[k], vals[k + 1], 1e-13 * hs[k].abs().max(1.0), 200)?;
            zeros.push(ZeroPoint { h: b.root, width: b.width, slope, value: b.value });
        } else {
            let h = hs[k] - vals[k] * (hs[k + 1] - hs[k]) / (vals[k + 1] - vals[k]);
            zeros.push(ZeroPoint { h, width: hs[k + 1] - hs[k], slope, value: f64::NAN });
        }
    }
    zeros.sort_by(|a, b| a.h.total_cmp(&b.h));
    let tiny = 1e-9 * scale;
    let mut suspected = Vec::new();
    for k in 1..vals.len().saturating_sub(1) {
        let (l, m, r) = (vals[k - 1], vals[k], vals[k + 1]);
        if m != 0.0 && m.abs() < tiny && m.abs() <= l.abs() && m.abs() <= r.abs() && l.signum() == m.signum() && r.signum() == m.signum() {
            suspected.push(hs[k]);
        }
    }
    Ok((zeros, suspected))
}

/// Applies `f` to every point, fanned out over up to 8 scoped threads.
pub(crate) fn par_map<T: Send, F: Fn(f64) -> T + Sync>(hs: &[f64], f: F) -> Vec<T> {
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(8);
    if workers <= 1 || hs.len() < 8 {
        return hs.iter().map(|&h| f(h)).collect();
    }
    let chunk = hs.len().div_ceil(workers);
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = hs.chunks(chunk).map(|c| s.spawn(move || c.iter().map(|&h| f(h)).collect::<Vec<_>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("scan worker panicked")).collect()
    })
}

/// How sample levels are spread over a scan window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    /// Log-uniform in the distance to `boundary`, for zeros accumulating there.
    Geometric { boundary: f64 },
}

/// `n` levels strictly inside `(lo, hi)`, endpoints excluded.
pub fn window_grid(lo: f64, hi: f64, n: usize, spacing: Spacing) -> Vec<f64> {
    match spacing {
        Spacing::Linear => (0..n).map(|k| lo + (hi - lo) * (k as f64 + 0.5) / n as f64).collect(),
        Spacing::Geometric { boundary } => {
            let (d0, d1) = ((lo - boundary).abs(), (hi - boundary).abs());
            let sgn = if lo >= boundary { 1.0 } else { -1.0 };
            let (l0, l1) = (d0.ln(), d1.ln());
            let mut out: Vec<f64> = (0..n)
                .map(|k| boundary + sgn * (l0 + (l1 - l0) * (k as f64 + 0.5) / n as f64).exp())
                .collect();
            out.sort_by(f64::total_cmp);
            out
        }
    }
}

/// Zero count of `∮ g dx − f dy` on a level window of any traced Hamiltonian.
#[derive(Clone, Debug, Serialize)]
pub struct WindowScan {
    pub annulus: String,
    pub range: (f64, f64),
    pub spacing: Spacing,
    pub grid_size: usize,
    pub zeros: Vec<ZeroPoint>,
    pub suspected_even: Vec<f64>,
    pub scale: f64,
    pub excluded: usize,
    pub warnings: Vec<String>,
}

impl WindowScan {
    pub fn count(&self) -> usize {
        self.zeros.len()
    }
}

pub fn scan_window<H: Hamiltonian + ?Sized>(
    ham: &H,
    annulus: &PeriodAnnulus,
    pert: &PerturbationPoly,
    (lo, hi): (f64, f64),
    grid_size: usize,
    spacing: Spacing,
    refine_zeros: bool,
) -> Result<WindowScan> {
    if !(lo < hi) || lo < annulus.h_lo || hi > annulus.h_hi {
        return domain(format!("window ({lo}, {hi}) not inside annulus ({}, {})", annulus.h_lo, annulus.h_hi));
    }
    if grid_size < 16 {
        return domain(format!("grid_size {grid_size} < 16"));
    }
    let deg = pert.n.max(1) as usize;
    let hs = window_grid(lo, hi, grid_size, spacing);
    let eval = |h: f64| moments_at(ham, annulus, h, deg).map(|(_, m)| (m.melnikov(pert), m.melnikov_err(pert)));
    let raw = par_map(&hs, eval);
    let scale_all = raw.iter().filter_map(|r| r.as_ref().ok()).fold(0.0f64, |m, v| m.max(v.0.abs()));
    let mut warnings = Vec::new();
    let (mut xs, mut vals, mut excluded) = (Vec::new(), Vec::new(), 0);
    for (&h, r) in hs.iter().zip(raw) {
        match r {
            Ok((v, err)) if v.is_finite() && err <= 1e-6 * scale_all => {
                xs.push(h);
                vals.push(v);
            }
            Ok((v, err)) => {
                excluded += 1;
                warnings.push(format!("h={h:.6e}: quadrature flagged (I={v:.3e}, err={err:.1e})"));
            }
            Err(e) => {
                excluded += 1;
                warnings.push(format!("h={h:.6e}: {e}"));
            }
        }
    }
    if xs.len() < 2 {
        return Err(Error::Numerical(format!("only {} usable levels in window ({lo}, {hi})", xs.len())));
    }
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let f = |h: f64| -> Result<f64> { Ok(moments_at(ham, annulus, h, deg)?.1.melnikov(pert)) };
    let (zeros, suspected_even) = locate_zeros(&xs, &vals, f, refine_zeros, scale)?;
    Ok(WindowScan {
        annulus: annulus.name.clone(),
        range: (lo, hi),
        spacing,
        grid_size,
        zeros,
        suspected_even,
        scale,
        excluded,
        warnings,
    })
}

fn slope_at(vals: &[f64], k: usize) -> i8 {
    let l = if k > 0 { vals[k - 1] } else { vals[k] };
    let r = if k + 1 < vals.len() { vals[k + 1] } else { vals[k] };
    if r > l {
        1
    } else {
        -1
    }
}

/// Scan every annulus of the family; the total count is what the ceiling bounds.
pub fn scan_all(p: &HamiltonianParams, pert: &PerturbationPoly, grid_size: usize, h_max_override: Option<f64>) -> Result<Vec<ZeroReport>> {
    let mut out = Vec::new();
    for an in crate::family::annuli(p)? {
        out.push(zero_scan(p, pert, &an, grid_size, h_max_override)?);
    }
    Ok(out)
}

/// Published upper bound on the number of zeros of `I` for perturbations
/// of degree `n` in the given region (may be negative for small `n` on the
/// `a = 0` rows).
pub fn region_ceiling(label: &RegionLabel, n: u32) -> Result<i64> {
    let n = n as i64;
    let (k, c) = match (label.region, label.a_zero) {
        (Region::D1Plus(2), _) => (54, 109),
        (Region::D1Plus(_), _) => (58, 121),
        (Region::L1Plus, _) | (Region::L2Plus, _) => (31, 66),
        (Region::D2Plus, _) | (Region::D3Plus, _) => (31, 67),
        (Region::D4Plus(1), false) => (31, 66),
        (Region::D4Plus(_), false) => (27, 55),
        (Region::D4Plus(1), true) => (49, -60),
        (Region::D4Plus(_), true) => (45, -58),
        (Region::D5Plus, false) => (31, 69),
        (Region::D5Plus, true) => (49, -60),
        (Region::L3Plus, _) => (31, 68),
        (Region::D6Plus, _) | (Region::D3Minus, _) => (208, 1089),
        (Region::D1Minus(3), _) => (31, 66),
        (Region::D1Minus(_), _) => (27, 55),
        (Region::D2Minus, _) => (31, 69),
        (Region::L1Minus, _) => (31, 68),
        (Region::NoAnnulus, _) => return domain("no period annulus, no ceiling"),
    };
    Ok(k * n + c)
}
