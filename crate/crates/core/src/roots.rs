//! Bracketed scalar root finding.

use crate::error::{numerical, Result};

/// A refined root together with the final bracket width.
#[derive(Clone, Copy, Debug)]
pub struct Bracketed {
    pub root: f64,
    pub width: f64,
    pub value: f64,
}

/// Illinois-modified regula falsi on a sign-changing bracket. Falls back to
/// bisection every third step so the bracket always shrinks geometrically.
pub fn refine<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    xtol: f64,
    max_iter: usize,
) -> Result<Bracketed> {
    if fa == 0.0 {
        return Ok(Bracketed { root: a, width: 0.0, value: 0.0 });
    }
    if fb == 0.0 {
        return Ok(Bracketed { root: b, width: 0.0, value: 0.0 });
    }
    if fa.signum() == fb.signum() {
        return numerical("refine: interval does not bracket a sign change");
    }
    let mut side = 0i8;
    for it in 0..max_iter {
        if (b - a).abs() <= xtol {
            break;
        }
        let mut c = if it % 3 == 2 { 0.5 * (a + b) } else { (a * fb - b * fa) / (fb - fa) };
        if !(c > a.min(b) && c < a.max(b)) {
            c = 0.5 * (a + b);
        }
        let fc = f(c)?;
        if fc == 0.0 {
            return Ok(Bracketed { root: c, width: 0.0, value: 0.0 });
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    let (root, value) = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    Ok(Bracketed { root, width: (b - a).abs(), value })
}

/// Plain bisection for monotone scalar problems without error plumbing.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let mut fa = f(a);
    for _ in 0..iters {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let fm = f(m);
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Indices `k` with a strict sign change between `values[k]` and `values[k+1]`.
pub fn sign_changes(values: &[f64]) -> Vec<usize> {
    values
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] != 0.0 && w[1] != 0.0 && w[0].signum() != w[1].signum())
        .map(|(k, _)| k)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refine_finds_cubic_root() {
        let f = |x: f64| Ok(x * x * x - 2.0);
        let r = refine(f, 0.0, 2.0, -2.0, 6.0, 1e-13, 200).unwrap();
        assert!((r.root - 2f64.cbrt()).abs() < 1e-12);
    }

    #[test]
    fn counts_sign_changes() {
        assert_eq!(sign_changes(&[1.0, -1.0, -2.0, 3.0, 0.0, 1.0]), vec![0, 2]);
    }
}
