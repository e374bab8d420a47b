//! Dense polynomials in one variable (coefficients in `h`) and sparse
//! bivariate polynomials (Hamiltonians and perturbations).

use serde::Serialize;
use std::ops::{Add, Mul, Neg, Sub};

/// Univariate polynomial with coefficients stored lowest degree first.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Poly {
    pub coeffs: Vec<f64>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Poly { coeffs: vec![c] }
    }

    pub fn new(coeffs: Vec<f64>) -> Self {
        Poly { coeffs }
    }

    /// `c * h^k`
    pub fn monomial(k: usize, c: f64) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    /// Product of linear factors `(h - r)`.
    pub fn from_roots(roots: &[f64]) -> Self {
        roots
            .iter()
            .fold(Poly::constant(1.0), |acc, &r| &acc * &Poly::new(vec![-r, 1.0]))
    }

    pub fn eval(&self, h: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * h + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Highest index whose coefficient exceeds `tol` in magnitude.
    pub fn degree(&self, tol: f64) -> Option<usize> {
        self.coeffs.iter().rposition(|c| c.abs() > tol)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.degree(tol).is_none()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Drops trailing coefficients with magnitude at most `tol`.
    pub fn trimmed(&self, tol: f64) -> Poly {
        match self.degree(tol) {
            Some(d) => Poly { coeffs: self.coeffs[..=d].to_vec() },
            None => Poly::zero(),
        }
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly { coeffs: (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect() }
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly { coeffs: (0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly { coeffs: out }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

/// Sparse polynomial in `(x, y)`: a list of `(i, j, coefficient)` terms.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Poly2 {
    pub terms: Vec<(u32, u32, f64)>,
}

impl Poly2 {
    pub fn new(terms: Vec<(u32, u32, f64)>) -> Self {
        let mut p = Poly2 { terms };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        self.terms.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut merged: Vec<(u32, u32, f64)> = Vec::with_capacity(self.terms.len());
        for &(i, j, c) in &self.terms {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += c,
                _ => merged.push((i, j, c)),
            }
        }
        merged.retain(|t| t.2 != 0.0);
        self.terms = merged;
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.0 + t.1).max().unwrap_or(0)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms.iter().map(|&(i, j, c)| c * x.powi(i as i32) * y.powi(j as i32)).sum()
    }

    /// Partial derivative with respect to x.
    pub fn dx(&self) -> Poly2 {
        Poly2::new(
            self.terms
                .iter()
                .filter(|t| t.0 > 0)
                .map(|&(i, j, c)| (i - 1, j, c * i as f64))
                .collect(),
        )
    }

    /// Partial derivative with respect to y.
    pub fn dy(&self) -> Poly2 {
        Poly2::new(
            self.terms
                .iter()
                .filter(|t| t.1 > 0)
                .map(|&(i, j, c)| (i, j - 1, c * j as f64))
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Poly2 {
        Poly2::new(self.terms.iter().map(|&(i, j, c)| (i, j, c * s)).collect())
    }

    /// Substitutes `x -> x + shift`.
    pub fn shift_x(&self, shift: f64) -> Poly2 {
        let mut out = Vec::new();
        for &(i, j, c) in &self.terms {
            // (x + s)^i = sum binom(i,k) x^k s^(i-k)
            let mut binom = 1.0;
            for k in 0..=i {
                out.push((k, j, c * binom * shift.powi((i - k) as i32)));
                binom = binom * (i - k) as f64 / (k + 1) as f64;
            }
        }
        Poly2::new(out)
    }

    /// Exchanges the roles of x and y.
    pub fn swapped(&self) -> Poly2 {
        Poly2::new(self.terms.iter().map(|&(i, j, c)| (j, i, c)).collect())
    }

    pub fn coeff(&self, i: u32, j: u32) -> f64 {
        self.terms
            .iter()
            .find(|t| t.0 == i && t.1 == j)
            .map(|t| t.2)
            .unwrap_or(0.0)
    }
}

impl Add for &Poly2 {
    type Output = Poly2;
    fn add(self, rhs: &Poly2) -> Poly2 {
        Poly2::new(self.terms.iter().chain(rhs.terms.iter()).copied().collect())
    }
}

impl Mul for &Poly2 {
    type Output = Poly2;
    fn mul(self, rhs: &Poly2) -> Poly2 {
        let mut out = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for &(i, j, c) in &self.terms {
            for &(k, l, d) in &rhs.terms {
                out.push((i + k, j + l, c * d));
            }
        }
        Poly2::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_arithmetic() {
        let p = Poly::new(vec![1.0, 2.0]);
        let q = Poly::new(vec![-1.0, 0.0, 3.0]);
        assert_eq!((&p * &q).coeffs, vec![-1.0, -2.0, 3.0, 6.0]);
        assert_eq!((&p + &q).coeffs, vec![0.0, 2.0, 3.0]);
        assert_eq!(p.eval(2.0), 5.0);
        assert_eq!(q.derivative().coeffs, vec![0.0, 6.0]);
        assert_eq!(Poly::from_roots(&[1.0, 2.0]).coeffs, vec![2.0, -3.0, 1.0]);
    }

    #[test]
    fn shift_matches_direct_substitution() {
        let p = Poly2::new(vec![(3, 1, 2.0), (2, 2, -1.0), (0, 1, 0.5)]);
        let s = 0.7;
        let q = p.shift_x(s);
        for &(x, y) in &[(0.3, -0.2), (1.1, 0.4), (-0.8, 0.9)] {
            assert!((q.eval(x, y) - p.eval(x + s, y)).abs() < 1e-13);
        }
    }

    #[test]
    fn derivatives() {
        let p = Poly2::new(vec![(2, 1, 3.0), (0, 4, 1.0)]);
        assert!((p.dx().eval(1.5, 2.0) - 6.0 * 1.5 * 2.0).abs() < 1e-14);
        assert!((p.dy().eval(1.5, 2.0) - (3.0 * 2.25 + 4.0 * 8.0)).abs() < 1e-12);
    }
}
