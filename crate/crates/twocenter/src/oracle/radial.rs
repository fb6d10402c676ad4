//! Shooting solver for the ξ equation
//! `(ξ²−1)u″ + 2(Λ+1)ξu′ + (A − p²ξ² + 2R_eff ξ)u = 0`.
//!
//! The solution regular at ξ = 1 starts from its Frobenius series; the decaying
//! solution starts far out from its leading asymptotic form and is integrated
//! inward. Both are propagated by local Taylor series whose coefficients follow
//! from a five-term recurrence.

use crate::error::{Error, Result};

const MAX_TERMS: usize = 400;
const SERIES_TOL: f64 = 1e-18;
/// Decay lengths `1/p` between the turning point and the outer boundary.
const OUTER_DECAY_LENGTHS: f64 = 36.0;

/// The ξ equation at fixed `p` and `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialEquation {
    pub p: f64,
    pub r_eff: f64,
    pub lambda: u32,
    pub a: f64,
}

/// State of an integration: `(u, u′)` at `x`, with a running sign-change count.
#[derive(Debug, Clone, Copy)]
struct Point {
    x: f64,
    u: f64,
    du: f64,
    nodes: usize,
    /// Natural log of the factor divided out by renormalization so far.
    log: f64,
}

impl RadialEquation {
    fn potential(&self, x: f64) -> f64 {
        self.p * self.p * x * x - 2.0 * self.r_eff * x
    }

    /// Outer classical turning point, or a point one decay length from ξ = 1.
    pub fn turning_point(&self) -> f64 {
        let p2 = self.p * self.p;
        let disc = self.r_eff * self.r_eff + p2 * self.a;
        let t = if disc > 0.0 { (self.r_eff + disc.sqrt()) / p2 } else { 1.0 };
        t.max(1.0 + 1.0 / self.p.max(1.0))
    }

    pub fn outer_boundary(&self) -> f64 {
        self.turning_point() + OUTER_DECAY_LENGTHS / self.p
    }

    /// Largest safe Taylor step at `x`.
    fn step_size(&self, x: f64) -> f64 {
        let q = (x - 1.0) * (x + 1.0);
        let local = ((self.a - self.potential(x)).abs() / q).sqrt();
        let scale = self.p.max(local).max(1.0);
        (0.5 * (x - 1.0)).min(0.5 / scale).min(0.5)
    }

    /// Sums a series `Σ t_k h^k` and its derivative given the recurrence closure.
    fn sum_series(mut next: impl FnMut(usize, &[f64]) -> f64, t0: f64, t1: f64, h: f64) -> Option<(f64, f64)> {
        let mut t = vec![t0, t1];
        let mut u = t0 + t1 * h;
        let mut du = t1;
        let mut hk = h;
        let mut quiet = 0;
        let mut k = 2;
        while k < MAX_TERMS {
            let c = next(k, &t);
            t.push(c);
            let term = c * hk * h;
            let dterm = k as f64 * c * hk;
            hk *= h;
            u += term;
            du += dterm;
            let scale = u.abs().max(du.abs() * h.abs()).max(f64::MIN_POSITIVE);
            if term.abs() <= SERIES_TOL * scale && dterm.abs() * h.abs() <= SERIES_TOL * scale {
                quiet += 1;
                if quiet >= 3 {
                    return Some((u, du));
                }
            } else {
                quiet = 0;
            }
            k += 1;
        }
        None
    }

    /// Taylor step from `x` to `x + h`.
    fn taylor(&self, x: f64, u: f64, du: f64, h: f64) -> Option<(f64, f64)> {
        let lp1 = self.lambda as f64 + 1.0;
        let q0 = (x - 1.0) * (x + 1.0);
        let p2 = self.p * self.p;
        let e0 = self.a - p2 * x * x + 2.0 * self.r_eff * x;
        let e1 = -2.0 * p2 * x + 2.0 * self.r_eff;
        let e2 = -p2;
        Self::sum_series(
            |k2, t| {
                // coefficient k2 = k + 2 from the equation at order k
                let k = (k2 - 2) as f64;
                let kk = k2 - 2;
                let tk = t[kk];
                let tk1 = t[kk + 1];
                let tkm1 = if kk >= 1 { t[kk - 1] } else { 0.0 };
                let tkm2 = if kk >= 2 { t[kk - 2] } else { 0.0 };
                -((2.0 * x * k + 2.0 * lp1 * x) * (k + 1.0) * tk1
                    + (k * (k - 1.0) + 2.0 * lp1 * k + e0) * tk
                    + e1 * tkm1
                    + e2 * tkm2)
                    / (q0 * (k + 2.0) * (k + 1.0))
            },
            u,
            du,
            h,
        )
    }

    /// Regular solution at `1 + s` from the Frobenius series at ξ = 1 (`u(1) = 1`).
    fn frobenius(&self, s: f64) -> Option<(f64, f64)> {
        let lp1 = self.lambda as f64 + 1.0;
        let p2 = self.p * self.p;
        let e0 = self.a - p2 + 2.0 * self.r_eff;
        let e1 = -2.0 * p2 + 2.0 * self.r_eff;
        let e2 = -p2;
        let t1 = -e0 / (2.0 * lp1);
        Self::sum_series(
            |k1, t| {
                let kk = k1 - 1;
                let k = kk as f64;
                let tkm1 = if kk >= 1 { t[kk - 1] } else { 0.0 };
                let tkm2 = if kk >= 2 { t[kk - 2] } else { 0.0 };
                -((k * (k - 1.0) + 2.0 * lp1 * k + e0) * t[kk] + e1 * tkm1 + e2 * tkm2) / (2.0 * (k + 1.0) * (k + lp1))
            },
            1.0,
            t1,
            s,
        )
    }

    /// Propagates from `from` to `to`, renormalizing to avoid overflow.
    fn propagate(&self, pt: Point, to: f64) -> Result<Point> {
        self.propagate_recording(pt, to, None)
    }

    fn propagate_recording(&self, mut pt: Point, to: f64, mut record: Option<&mut Vec<Point>>) -> Result<Point> {
        let dir = if to > pt.x { 1.0 } else { -1.0 };
        let mut guard = 0;
        while (to - pt.x) * dir > 0.0 {
            let mut h = self.step_size(pt.x);
            if dir > 0.0 {
                h = h.min(self.step_size(pt.x + h));
            }
            if (pt.x + dir * h - to) * dir > 0.0 {
                h = (to - pt.x).abs();
            }
            let mut attempt = 0;
            let (u, du) = loop {
                match self.taylor(pt.x, pt.u, pt.du, dir * h) {
                    Some(v) if v.0.is_finite() && v.1.is_finite() => break v,
                    _ => {
                        h *= 0.5;
                        attempt += 1;
                        if attempt > 30 {
                            return Err(Error::NotConverged { what: format!("Taylor step at ξ = {} (h = {h:e})", pt.x), iterations: attempt });
                        }
                    }
                }
            };
            let x = if (pt.x + dir * h - to) * dir >= 0.0 { to } else { pt.x + dir * h };
            let nodes = pt.nodes + usize::from(u != 0.0 && pt.u != 0.0 && u.signum() != pt.u.signum());
            let scale = u.abs().max(du.abs() / self.p.max(1.0));
            let (u, du, log) = if scale > 1e100 || (scale < 1e-100 && scale > 0.0) {
                (u / scale, du / scale, pt.log + scale.ln())
            } else {
                (u, du, pt.log)
            };
            pt = Point { x, u, du, nodes, log };
            if let Some(r) = record.as_deref_mut() {
                r.push(pt);
            }
            guard += 1;
            if guard > 1_000_000 {
                return Err(Error::NotConverged { what: "radial propagation".into(), iterations: guard });
            }
        }
        Ok(pt)
    }

    fn frobenius_start(&self, to: f64) -> f64 {
        (0.25f64).min(0.5 / self.p.max(1.0)).min(0.5 / (self.a.abs() + 1.0).sqrt()).min(0.5 * (to - 1.0))
    }

    fn outward(&self, to: f64) -> Result<Point> {
        let s0 = self.frobenius_start(to);
        let (u, du) = self
            .frobenius(s0)
            .ok_or_else(|| Error::NotConverged { what: "Frobenius series at ξ = 1".into(), iterations: MAX_TERMS })?;
        // u(1) = 1, so a negative start means a node inside the series interval
        self.propagate(Point { x: 1.0 + s0, u, du, nodes: usize::from(u < 0.0), log: 0.0 }, to)
    }

    fn inward(&self, to: f64) -> Result<Point> {
        let x = self.outer_boundary();
        // leading asymptotics u ~ ξ^σ e^{−pξ}, σ = R_eff/p − 1 − Λ
        let sigma = self.r_eff / self.p - 1.0 - self.lambda as f64;
        let du = -self.p + sigma / x;
        self.propagate(Point { x, u: 1.0, du, nodes: 0, log: 0.0 }, to)
    }

    /// Number of sign changes of the regular solution on `(1, outer boundary)`;
    /// equals the number of eigenvalues below `A` of the truncated problem.
    pub fn count_nodes(&self) -> Result<usize> {
        Ok(self.outward(self.outer_boundary())?.nodes)
    }

    /// Normalized Wronskian of the regular and decaying solutions at `xm`, in `[−1, 1]`,
    /// together with the node count of the joined solution.
    pub fn mismatch_at(&self, xm: f64) -> Result<(f64, usize)> {
        let o = self.outward(xm)?;
        let i = self.inward(xm)?;
        let s = self.p.max(1.0);
        let w = (o.u * i.du - o.du * i.u) / s;
        let no = (o.u * o.u + (o.du / s).powi(2)).sqrt();
        let ni = (i.u * i.u + (i.du / s).powi(2)).sqrt();
        Ok((w / (no * ni), o.nodes + i.nodes))
    }

    /// The eigenfunction for the current `A`, joined at the turning point.
    ///
    /// Only meaningful when `A` is an eigenvalue; the derivative jump at the
    /// joint is reported as `kink`.
    pub fn eigenfunction(&self) -> Result<RadialFunction> {
        let xm = self.turning_point();
        let s0 = self.frobenius_start(xm);
        let (u0, du0) = self
            .frobenius(s0)
            .ok_or_else(|| Error::NotConverged { what: "Frobenius series at ξ = 1".into(), iterations: MAX_TERMS })?;
        let start = Point { x: 1.0 + s0, u: u0, du: du0, nodes: usize::from(u0 < 0.0), log: 0.0 };
        let mut out = vec![start];
        let o = self.propagate_recording(start, xm, Some(&mut out))?;
        let xb = self.outer_boundary();
        let sigma = self.r_eff / self.p - 1.0 - self.lambda as f64;
        let tail = Point { x: xb, u: 1.0, du: -self.p + sigma / xb, nodes: 0, log: 0.0 };
        let mut inn = vec![tail];
        let i = self.propagate_recording(tail, xm, Some(&mut inn))?;
        // bring the inward branch onto the outward normalization at xm
        let (num, den) = if o.u.abs() >= 1e-3 * o.du.abs() / self.p.max(1.0) { (o.u, i.u) } else { (o.du, i.du) };
        let factor = num / den;
        let log_shift = o.log - i.log + factor.abs().ln();
        let sign = factor.signum();
        let kink = (o.du - i.du * factor) / o.du.abs().max(o.u.abs() * self.p.max(1.0));
        let mut samples: Vec<(f64, f64, f64, f64)> = out.iter().map(|q| (q.x, q.u, q.du, q.log)).collect();
        samples.extend(inn.iter().rev().skip(1).map(|q| (q.x, sign * q.u, sign * q.du, q.log + log_shift)));
        let top = samples.iter().map(|q| q.1.abs().ln() + q.3).fold(f64::NEG_INFINITY, f64::max);
        let samples = samples
            .into_iter()
            .map(|(x, u, du, l)| {
                let k = (l - top).exp();
                (x, u * k, du * k)
            })
            .collect();
        Ok(RadialFunction { eq: *self, samples, frobenius_end: 1.0 + s0, frobenius_scale: (-top).exp(), outer: xb, kink })
    }
}

/// A tabulated ξ eigenfunction, evaluated between samples by Taylor steps.
#[derive(Debug, Clone)]
pub struct RadialFunction {
    eq: RadialEquation,
    samples: Vec<(f64, f64, f64)>,
    frobenius_end: f64,
    frobenius_scale: f64,
    outer: f64,
    kink: f64,
}

impl RadialFunction {
    /// Relative jump of `u′` where the two branches meet.
    pub fn kink(&self) -> f64 {
        self.kink
    }

    /// `(u, u′)` at `x ≥ 1`; zero beyond the outer boundary, where the true
    /// function is below `e^{−36}` of its turning-point size.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        if x >= self.outer {
            return (0.0, 0.0);
        }
        if x <= self.frobenius_end {
            let (u, du) = self.eq.frobenius(x - 1.0).unwrap_or((f64::NAN, f64::NAN));
            return (u * self.frobenius_scale, du * self.frobenius_scale);
        }
        let k = self.samples.partition_point(|s| s.0 <= x);
        let near = if k == 0 {
            0
        } else if k >= self.samples.len() || x - self.samples[k - 1].0 <= self.samples[k].0 - x {
            k - 1
        } else {
            k
        };
        let (x0, u0, du0) = self.samples[near];
        if x == x0 {
            return (u0, du0);
        }
        self.eq.taylor(x0, u0, du0, x - x0).unwrap_or((f64::NAN, f64::NAN))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_exponential_solution() {
        // u = e^{−pξ} solves the equation when R_eff = (Λ+1)p and A = p².
        for lambda in 0..3u32 {
            let p = 1.7;
            let eq = RadialEquation { p, r_eff: (lambda as f64 + 1.0) * p, lambda, a: p * p };
            let pt = eq.outward(4.0).unwrap();
            let ratio = pt.du / pt.u;
            assert!((ratio + p).abs() < 1e-12, "{ratio}");
            let (m, n) = eq.mismatch_at(eq.turning_point()).unwrap();
            assert!(m.abs() < 1e-11 && n == 0, "{m} {n}");
        }
    }

    #[test]
    fn node_count_grows_with_a() {
        let base = RadialEquation { p: 1.5, r_eff: 2.0, lambda: 0, a: 0.0 };
        let mut last = 0;
        for k in 0..8 {
            let n = RadialEquation { a: -2.0 + 1.5 * k as f64, ..base }.count_nodes().unwrap();
            assert!(n >= last);
            last = n;
        }
        assert!(last >= 1);
    }
}
