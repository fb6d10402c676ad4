//! Angular separation constant from a tridiagonal Legendre expansion.
//!
//! In the basis of normalized associated Legendre functions `P̄_l^Λ(η)` the η
//! operator `d/dη(1−η²)d/dη − Λ²/(1−η²) + Λ(Λ+1) + p²η²` couples only `l` and
//! `l ± 2`, so each parity class gives a symmetric tridiagonal matrix. Its
//! eigenvalues are located by Sturm-sequence bisection.

use crate::error::{Error, Result};
use crate::model::Parity;

const INITIAL_BASIS: usize = 24;
const MAX_DOUBLINGS: usize = 7;
const BASIS_TOL: f64 = 1e-13;

/// `⟨l+1|η|l⟩` for normalized associated Legendre functions of order Λ.
fn coupling(l: f64, lam: f64) -> f64 {
    (((l + 1.0) * (l + 1.0) - lam * lam) / ((2.0 * l + 1.0) * (2.0 * l + 3.0))).sqrt()
}

/// Diagonal and off-diagonal of the truncated matrix.
fn matrix(p: f64, lambda: u32, parity: Parity, size: usize) -> (Vec<f64>, Vec<f64>) {
    let lam = lambda as f64;
    let l0 = lam + parity.offset() as f64;
    let p2 = p * p;
    let a = |l: f64| if l < lam { 0.0 } else { coupling(l, lam) };
    let diag = (0..size)
        .map(|j| {
            let l = l0 + 2.0 * j as f64;
            let am = if l - 1.0 >= lam { a(l - 1.0) } else { 0.0 };
            -l * (l + 1.0) + lam * (lam + 1.0) + p2 * (a(l) * a(l) + am * am)
        })
        .collect();
    let off = (0..size.saturating_sub(1))
        .map(|j| {
            let l = l0 + 2.0 * j as f64;
            p2 * a(l) * a(l + 1.0)
        })
        .collect();
    (diag, off)
}

/// Number of eigenvalues strictly below `x`.
fn count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0f64;
    for (i, &d) in diag.iter().enumerate() {
        let e2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = d - x - if i == 0 { 0.0 } else { e2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (d.abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `k`-th smallest eigenvalue (0-based) by bisection.
fn kth_smallest(diag: &[f64], off: &[f64], k: usize) -> f64 {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Converged angular eigenvalue and the basis size that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularSolution {
    pub a: f64,
    pub basis_size: usize,
}

/// The `m`-th largest separation constant of the given parity class.
///
/// At `p = 0` this is `−(l−Λ)(l+Λ+1)` with `l = Λ + parity offset + 2m`.
pub fn angular_eigenvalue(p: f64, lambda: u32, m: u32, parity: Parity) -> Result<f64> {
    angular_solution(p, lambda, m, parity).map(|s| s.a)
}

pub fn angular_solution(p: f64, lambda: u32, m: u32, parity: Parity) -> Result<AngularSolution> {
    if !(p.is_finite() && p >= 0.0) {
        return Err(Error::ParameterDomain(format!("angular problem needs p ≥ 0, got {p}")));
    }
    let mut size = (INITIAL_BASIS + lambda as usize).max(m as usize + 4);
    let mut prev: Option<f64> = None;
    let mut trend = Vec::new();
    for _ in 0..=MAX_DOUBLINGS {
        let (d, e) = matrix(p, lambda, parity, size);
        let a = kth_smallest(&d, &e, size - 1 - m as usize);
        trend.push(a);
        if let Some(b) = prev {
            if (a - b).abs() <= BASIS_TOL * a.abs().max(1.0) {
                return Ok(AngularSolution { a, basis_size: size });
            }
        }
        prev = Some(a);
        size *= 2;
    }
    Err(Error::NotConverged { what: format!("angular basis, eigenvalue trend {trend:?}"), iterations: MAX_DOUBLINGS })
}

/// Angular eigenfunction as an expansion in normalized associated Legendre functions.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularFunction {
    pub a: f64,
    lambda: u32,
    l0: u32,
    /// Coefficients of `P̄_{l0+2j}^Λ`, j = 0, 1, ...
    coeffs: Vec<f64>,
}

impl AngularFunction {
    /// `(v, v′)` with `v = Y / (1−η²)^{Λ/2}`, up to a constant factor.
    pub fn eval(&self, eta: f64) -> (f64, f64) {
        let lam = self.lambda as f64;
        let l_max = self.l0 as usize + 2 * self.coeffs.len();
        let (mut q_prev, mut dq_prev) = (0.0, 0.0);
        let (mut q, mut dq) = (1.0, 0.0);
        let (mut v, mut dv) = (0.0, 0.0);
        for l in self.lambda as usize..=l_max {
            if l >= self.l0 as usize && (l - self.l0 as usize) % 2 == 0 {
                let j = (l - self.l0 as usize) / 2;
                if j < self.coeffs.len() {
                    v += self.coeffs[j] * q;
                    dv += self.coeffs[j] * dq;
                }
            }
            let lf = l as f64;
            let a_l = coupling(lf, lam);
            let a_lm = if l > self.lambda as usize { coupling(lf - 1.0, lam) } else { 0.0 };
            let q_next = (eta * q - a_lm * q_prev) / a_l;
            let dq_next = (q + eta * dq - a_lm * dq_prev) / a_l;
            q_prev = q;
            dq_prev = dq;
            q = q_next;
            dq = dq_next;
        }
        (v, dv)
    }
}

/// Solves `(T − σ) x = b` for a symmetric tridiagonal `T`.
fn shifted_solve(diag: &[f64], off: &[f64], sigma: f64, b: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut d = vec![0.0; n];
    let mut y = vec![0.0; n];
    for i in 0..n {
        let (l, prev_y) = if i == 0 { (0.0, 0.0) } else { (off[i - 1] / d[i - 1], y[i - 1]) };
        d[i] = diag[i] - sigma - if i == 0 { 0.0 } else { l * off[i - 1] };
        if d[i] == 0.0 {
            d[i] = f64::EPSILON * (diag[i].abs() + sigma.abs()).max(1.0);
        }
        y[i] = b[i] - l * prev_y;
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let next = if i + 1 < n { off[i] * x[i + 1] } else { 0.0 };
        x[i] = (y[i] - next) / d[i];
    }
    x
}

/// Eigenfunction belonging to [`angular_solution`], by inverse iteration.
pub fn angular_function(p: f64, lambda: u32, m: u32, parity: Parity) -> Result<AngularFunction> {
    let sol = angular_solution(p, lambda, m, parity)?;
    let size = sol.basis_size;
    let (d, e) = matrix(p, lambda, parity, size);
    let sigma = sol.a + 1e-9 * sol.a.abs().max(1.0);
    let mut x = vec![1.0; size];
    for _ in 0..4 {
        let y = shifted_solve(&d, &e, sigma, &x);
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotConverged { what: "angular inverse iteration".into(), iterations: 4 });
        }
        x = y.into_iter().map(|v| v / norm).collect();
    }
    Ok(AngularFunction { a: sol.a, lambda, l0: lambda + parity.offset(), coeffs: x })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_limit() {
        for (lam, m, par, l) in [(0u32, 0u32, Parity::Plus, 0.0), (0, 0, Parity::Minus, 1.0), (2, 0, Parity::Minus, 3.0), (1, 1, Parity::Plus, 3.0)] {
            let a = angular_eigenvalue(0.0, lam, m, par).unwrap();
            let lf = lam as f64;
            assert!((a + (l - lf) * (l + lf + 1.0)).abs() < 1e-12, "{a}");
        }
    }

    #[test]
    fn even_in_p() {
        assert_eq!(matrix(1.3, 1, Parity::Minus, 30), matrix(-1.3, 1, Parity::Minus, 30));
        assert!(angular_eigenvalue(-1.0, 0, 0, Parity::Plus).is_err());
    }

    #[test]
    fn increases_with_p() {
        let mut last = f64::NEG_INFINITY;
        for k in 0..10 {
            let a = angular_eigenvalue(0.5 * k as f64, 0, 0, Parity::Plus).unwrap();
            assert!(a > last);
            last = a;
        }
    }
}
