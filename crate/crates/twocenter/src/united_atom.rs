//! The R → 0 limit, in which the two protons merge into a He⁺ nucleus.
//!
//! Prolate coordinates degenerate to spherical ones (`Rξ → 2r`, `η → cos θ`)
//! and the decay parameter vanishes while `R/p` tends to the united-atom
//! principal quantum number. This module supplies the hydrogenic references,
//! the limiting shape of every tabulated trial function, and numerical probes
//! of the limit along a geometric sequence of distances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Parity, PhysicalSetup, StateLabel};
use crate::oracle::solve_bispectral_from;
use crate::quadrature::SeparableOrbital;

/// Charge of the united nucleus for H₂⁺.
pub const UNITED_CHARGE: f64 = 2.0;

/// Distances probed by [`limit_convergence_probe`]: `0.5 · 2^{−k}`, k = 0..4.
pub const PROBE_DISTANCES: [f64; 5] = [0.5, 0.25, 0.125, 0.0625, 0.03125];

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// A hydrogen-like orbital `R_{n̂l}(r) P_l^m(cos θ) e^{imφ}` of nuclear charge `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hydrogenic {
    pub n: u32,
    pub l: u32,
    pub m: u32,
    pub z: f64,
}

/// The He⁺ orbital `(n̂, l, m)` and its energy in Ry.
pub fn hydrogenic_reference(n: u32, l: u32, m: u32) -> Result<(Hydrogenic, f64)> {
    let h = Hydrogenic::new(n, l, m, UNITED_CHARGE)?;
    Ok((h, h.energy()))
}

impl Hydrogenic {
    pub fn new(n: u32, l: u32, m: u32, z: f64) -> Result<Self> {
        if n == 0 || l >= n || m > l {
            return Err(Error::ParameterDomain(format!("hydrogenic quantum numbers need 0 ≤ m ≤ l < n, got ({n},{l},{m})")));
        }
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::ParameterDomain(format!("nuclear charge must be positive, got {z}")));
        }
        Ok(Hydrogenic { n, l, m, z })
    }

    /// `−Z²/n̂²` Ry.
    pub fn energy(&self) -> f64 {
        -self.z * self.z / (self.n as f64 * self.n as f64)
    }

    /// Normalized radial function, `∫ R² r² dr = 1`.
    pub fn radial(&self, r: f64) -> f64 {
        let nf = self.n as f64;
        let rho = 2.0 * self.z * r / nf;
        let k = self.n - self.l - 1;
        let norm = ((2.0 * self.z / nf).powi(3) * factorial(k) / (2.0 * nf * factorial(self.n + self.l))).sqrt();
        norm * rho.powi(self.l as i32) * (-0.5 * rho).exp() * laguerre(k, 2.0 * self.l as f64 + 1.0, rho)
    }

    /// Normalized `θ` factor, `2π ∫ Θ² sin θ dθ = 1`.
    pub fn angular(&self, cos_theta: f64) -> f64 {
        let (l, m) = (self.l, self.m);
        let norm = ((2.0 * l as f64 + 1.0) / (4.0 * std::f64::consts::PI) * factorial(l - m) / factorial(l + m)).sqrt();
        norm * assoc_legendre(l, m, cos_theta)
    }

    /// `ψ(r, θ)` without the `e^{imφ}` factor.
    pub fn value(&self, r: f64, cos_theta: f64) -> f64 {
        self.radial(r) * self.angular(cos_theta)
    }

    /// `(n̂ − l − 1, l − m)`: sign changes in `r` and in `cos θ`.
    pub fn node_counts(&self) -> (usize, usize) {
        ((self.n - self.l - 1) as usize, (self.l - self.m) as usize)
    }

    /// Positive zeros of the radial function.
    pub fn radial_node_positions(&self) -> Vec<f64> {
        let k = self.n - self.l - 1;
        let alpha = 2.0 * self.l as f64 + 1.0;
        let scale = self.n as f64 / (2.0 * self.z);
        sign_change_roots(|x| laguerre(k, alpha, x), 1e-9, 4.0 * (self.n as f64 + 2.0) * (self.n as f64 + 2.0), 4000)
            .into_iter()
            .map(|x| x * scale)
            .collect()
    }

    /// The orbital centred on nucleus 1 of `setup`, for the nodeless `m = l` case
    /// (`n̂ = l + 1`), which factorizes in prolate coordinates:
    /// `ρ^l e^{−Z r₁/n̂}` with `r₁ = a(ξ − η)`.
    pub fn on_nucleus(&self, setup: &PhysicalSetup) -> Result<NuclearHydrogenic> {
        if self.n != self.l + 1 || self.m != self.l {
            return Err(Error::Unsupported(format!(
                "({},{},{}) is not separable about a displaced centre",
                self.n, self.l, self.m
            )));
        }
        setup.validate()?;
        Ok(NuclearHydrogenic { lambda: self.m, kappa: self.z * setup.half_r() / self.n as f64 })
    }
}

/// A nodeless hydrogenic orbital placed on nucleus 1, in separated form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuclearHydrogenic {
    lambda: u32,
    /// `Z a / n̂`.
    kappa: f64,
}

impl SeparableOrbital for NuclearHydrogenic {
    fn lambda(&self) -> u32 {
        self.lambda
    }

    fn xi_factor(&self, xi: f64) -> (f64, f64) {
        let u = (-self.kappa * xi).exp();
        (u, -self.kappa * u)
    }

    fn eta_factor(&self, eta: f64) -> (f64, f64) {
        let v = (self.kappa * eta).exp();
        (v, self.kappa * v)
    }
}

/// Generalized Laguerre polynomial `L_k^{(α)}(x)` by the three-term recurrence.
pub fn laguerre(k: u32, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for j in 1..k {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + alpha - x) * cur - (jf + alpha) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Associated Legendre function `P_l^m(x)` without the Condon-Shortley phase.
pub fn assoc_legendre(l: u32, m: u32, x: f64) -> f64 {
    let s = ((1.0 - x) * (1.0 + x)).sqrt();
    let mut pmm = 1.0;
    for i in 0..m {
        pmm *= (2.0 * i as f64 + 1.0) * s;
    }
    if l == m {
        return pmm;
    }
    let mut pm1 = x * (2.0 * m as f64 + 1.0) * pmm;
    for ll in (m + 2)..=l {
        let lf = ll as f64;
        let mf = m as f64;
        let next = (x * (2.0 * lf - 1.0) * pm1 - (lf + mf - 1.0) * pmm) / (lf - mf);
        pmm = pm1;
        pm1 = next;
    }
    pm1
}

/// Roots located by sign changes on a uniform grid and refined by bisection.
fn sign_change_roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let h = (hi - lo) / steps as f64;
    let mut x0 = lo;
    let mut f0 = f(x0);
    for i in 1..=steps {
        let x1 = lo + h * i as f64;
        let f1 = f(x1);
        if f0 != 0.0 && f1 != 0.0 && f0.signum() != f1.signum() {
            let (mut a, mut b, mut fa) = (x0, x1, f0);
            for _ in 0..100 {
                let mid = 0.5 * (a + b);
                let fm = f(mid);
                if fm.signum() == fa.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            roots.push(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

fn count_sign_changes(f: impl Fn(f64) -> f64, lo: f64, hi: f64, steps: usize) -> usize {
    sign_change_roots(f, lo, hi, steps).len()
}

/// Limiting shape of a trial function: `r^{n̂−n−1} P_n(r) e^{−2r/n̂} sin^Λθ Q_m(cos²θ) [1 | cos θ]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitForm {
    pub label: StateLabel,
    /// `(n̂, l, m)` of the He⁺ orbital reached.
    pub hydrogenic: (u32, u32, u32),
    /// Constant term of the node polynomial as tabulated for the correspondence.
    pub c: Option<f64>,
    /// The same constant read off the exact He⁺ orbital.
    pub c_hydrogenic: Option<f64>,
}

impl LimitForm {
    /// The radial factor with the tabulated constant.
    pub fn radial(&self, r: f64) -> f64 {
        let nh = self.hydrogenic.0 as f64;
        let poly = if self.label.n == 1 { r - self.c.unwrap_or(0.0) } else { 1.0 };
        r.powi(self.hydrogenic.0 as i32 - self.label.n as i32 - 1) * poly * (-2.0 * r / nh).exp()
    }

    /// The θ factor with the tabulated constant.
    pub fn angular(&self, cos_theta: f64) -> f64 {
        let s2 = (1.0 - cos_theta) * (1.0 + cos_theta);
        let q = if self.label.m == 1 { cos_theta * cos_theta - self.c.unwrap_or(0.0) } else { 1.0 };
        let odd = if self.label.parity == Parity::Minus { cos_theta } else { 1.0 };
        s2.powf(0.5 * self.label.lambda as f64) * q * odd
    }

    /// Sign changes of the limiting form in `r > 0` and in `cos θ ∈ (−1, 1)`.
    pub fn node_counts(&self) -> (usize, usize) {
        let nh = self.hydrogenic.0 as f64;
        let radial = count_sign_changes(|r| self.radial(r), 1e-6, 40.0 * nh, 8000);
        // an even grid count keeps cos θ = 0 off the grid
        let angular = count_sign_changes(|x| self.angular(x), -1.0 + 1e-9, 1.0 - 1e-9, 4001);
        (radial, angular)
    }
}

/// The limiting form of `label`, or an error if it has no tabulated counterpart.
pub fn limit_form(label: &StateLabel) -> Result<LimitForm> {
    let corr = label
        .correspondence()
        .ok_or_else(|| Error::InvalidLabel(format!("{label} has no united-atom counterpart")))?;
    let (n, l, m) = corr.hydrogenic;
    let h = Hydrogenic::new(n, l, m, UNITED_CHARGE)?;
    let c_hydrogenic = if label.n == 1 {
        h.radial_node_positions().first().copied()
    } else if label.m == 1 {
        // the nonzero roots of P_l^m(x) come in ± pairs; c is their common square
        sign_change_roots(|x| assoc_legendre(l, m, x), 1e-7, 1.0 - 1e-12, 20000).first().map(|x| x * x)
    } else {
        None
    };
    Ok(LimitForm { label: *label, hydrogenic: corr.hydrogenic, c: corr.node_constant, c_hydrogenic })
}

/// Whether the limiting trial function has the node structure `(n̂ − l − 1, l − m)`.
pub fn nodal_structure_matches(label: &StateLabel) -> Result<bool> {
    let form = limit_form(label)?;
    let (n, l, m) = form.hydrogenic;
    Ok(form.node_counts() == Hydrogenic::new(n, l, m, UNITED_CHARGE)?.node_counts())
}

/// One distance of a limit probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbePoint {
    #[serde(rename = "R")]
    pub r: f64,
    pub p: f64,
    pub r_over_p: f64,
    pub e_prime: f64,
    #[serde(rename = "A")]
    pub a: f64,
}

/// Limit probe results with their targets and observed convergence orders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub label: StateLabel,
    pub points: Vec<ProbePoint>,
    pub n_hat: f64,
    pub e_prime_limit: f64,
    pub a_limit: f64,
    /// `log₂` of successive deviation ratios; each entry estimates the power of R
    /// with which `R/p`, `E′` and `A` approach their limits.
    pub r_over_p_orders: Vec<f64>,
    pub e_prime_orders: Vec<f64>,
    pub a_orders: Vec<f64>,
}

impl ProbeReport {
    /// Deviations at the smallest distance: `(R/p − n̂, E′ − E_lim, A − A_lim)`.
    pub fn final_deviation(&self) -> Option<(f64, f64, f64)> {
        self.points
            .last()
            .map(|q| (q.r_over_p - self.n_hat, q.e_prime - self.e_prime_limit, q.a - self.a_limit))
    }
}

fn orders(dev: &[f64]) -> Vec<f64> {
    dev.windows(2).map(|w| (w[0].abs() / w[1].abs()).log2()).collect()
}

/// Oracle solutions along [`PROBE_DISTANCES`] compared with the united-atom limits.
pub fn limit_convergence_probe(label: &StateLabel) -> Result<ProbeReport> {
    limit_convergence_probe_at(label, &PROBE_DISTANCES)
}

/// As [`limit_convergence_probe`] on a caller-chosen decreasing sequence.
pub fn limit_convergence_probe_at(label: &StateLabel, distances: &[f64]) -> Result<ProbeReport> {
    let form = limit_form(label)?;
    let (n, l, _) = form.hydrogenic;
    let n_hat = n as f64;
    let lam = label.lambda as f64;
    // adding 0.0 turns the −0 of the l = Λ case into +0
    let a_limit = -(l as f64 - lam) * (l as f64 + lam + 1.0) + 0.0;
    let e_prime_limit = -UNITED_CHARGE * UNITED_CHARGE / (n_hat * n_hat);
    let mut points = Vec::with_capacity(distances.len());
    for &r in distances {
        let setup = PhysicalSetup::h2plus(r);
        let guess = 0.5 * r * (-e_prime_limit).sqrt();
        let o = solve_bispectral_from(label, &setup, Some(guess)).or_else(|_| solve_bispectral_from(label, &setup, None))?;
        points.push(ProbePoint { r, p: o.p, r_over_p: r / o.p, e_prime: o.e_total - setup.repulsion(), a: o.a });
    }
    let dev = |f: fn(&ProbePoint) -> f64, lim: f64| -> Vec<f64> { points.iter().map(|q| f(q) - lim).collect() };
    let r_over_p_orders = orders(&dev(|q| q.r_over_p, n_hat));
    let e_prime_orders = orders(&dev(|q| q.e_prime, e_prime_limit));
    let a_orders = orders(&dev(|q| q.a, a_limit));
    Ok(ProbeReport { label: *label, points, n_hat, e_prime_limit, a_limit, r_over_p_orders, e_prime_orders, a_orders })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre_on;

    #[test]
    fn energies() {
        assert_eq!(hydrogenic_reference(1, 0, 0).unwrap().1, -4.0);
        assert!((hydrogenic_reference(3, 2, 1).unwrap().1 + 4.0 / 9.0).abs() < 1e-15);
        assert!(hydrogenic_reference(2, 2, 0).is_err());
        assert!(hydrogenic_reference(3, 1, 2).is_err());
    }

    #[test]
    fn radial_functions_are_normalized() {
        let (x, w) = gauss_legendre_on(200, 0.0, 80.0);
        for &(n, l) in &[(1, 0), (2, 0), (2, 1), (3, 1), (3, 2), (4, 3)] {
            let h = Hydrogenic::new(n, l, 0, 2.0).unwrap();
            let s: f64 = x.iter().zip(&w).map(|(r, w)| w * (h.radial(*r) * r).powi(2)).sum();
            assert!((s - 1.0).abs() < 1e-12, "({n},{l}) {s}");
        }
    }

    #[test]
    fn p_orbital_angular_part_is_cosine() {
        let h = Hydrogenic::new(2, 1, 0, 2.0).unwrap();
        let k = h.angular(1.0);
        for &c in &[-0.7, 0.1, 0.5] {
            assert!((h.angular(c) - k * c).abs() < 1e-15);
        }
    }

    #[test]
    fn radial_nodes_of_he_plus() {
        let h = Hydrogenic::new(2, 0, 0, 2.0).unwrap();
        assert!((h.radial_node_positions()[0] - 1.0).abs() < 1e-10);
        let h = Hydrogenic::new(3, 1, 0, 2.0).unwrap();
        assert!((h.radial_node_positions()[0] - 3.0).abs() < 1e-10);
    }

    #[test]
    fn tabulated_limit_forms() {
        let f = limit_form(&"(1,0,0,+)".parse().unwrap()).unwrap();
        assert_eq!(f.hydrogenic, (2, 0, 0));
        assert_eq!(f.c, Some(2.0));
        let f = limit_form(&"(0,0,2,-)".parse().unwrap()).unwrap();
        assert_eq!(f.hydrogenic, (4, 3, 2));
        assert_eq!(f.c, None);
        let f = limit_form(&"(0,1,0,-)".parse().unwrap()).unwrap();
        assert_eq!(f.hydrogenic, (4, 3, 0));
        assert_eq!(f.c, Some(0.6));
        assert!(limit_form(&"(2,0,0,+)".parse().unwrap()).is_err());
    }

    #[test]
    fn hydrogenic_node_constants() {
        let c = |s: &str| limit_form(&s.parse().unwrap()).unwrap().c_hydrogenic.unwrap();
        assert!((c("3pσu") - 3.0).abs() < 1e-9);
        assert!((c("3dσg") - 1.0 / 3.0).abs() < 1e-9);
        assert!((c("4fσu") - 0.6).abs() < 1e-9);
        // the He⁺ 2s node lies at r = 1 bohr
        assert!((c("2sσg") - 1.0).abs() < 1e-9);
    }

    #[test]
    fn every_limit_has_hydrogenic_nodes() {
        for corr in crate::model::CORRESPONDENCE.iter() {
            assert!(nodal_structure_matches(&corr.label).unwrap(), "{}", corr.designation);
        }
    }

    #[test]
    fn laguerre_and_legendre_examples() {
        assert!((laguerre(2, 1.0, 0.5) - (0.5 * 0.25 - 3.0 * 0.5 + 3.0)).abs() < 1e-15);
        assert!((assoc_legendre(2, 0, 0.3) - 0.5 * (3.0 * 0.09 - 1.0)).abs() < 1e-15);
        assert!((assoc_legendre(2, 1, 0.3) - 3.0 * 0.3 * (1.0f64 - 0.09).sqrt()).abs() < 1e-15);
    }
}

#[cfg(test)]
mod probe_tests {
    use super::*;

    fn probe(name: &str) -> ProbeReport {
        limit_convergence_probe(&StateLabel::from_designation(name).unwrap()).unwrap()
    }

    #[test]
    fn ground_state_ratio_tends_to_one() {
        let rep = probe("1sσg");
        let (d, de, _) = rep.final_deviation().unwrap();
        assert!(d.abs() < 1e-2, "{rep:?}");
        assert!(de.abs() < 1e-1, "{rep:?}");
        let devs: Vec<f64> = rep.points.iter().map(|q| (q.r_over_p - 1.0).abs()).collect();
        assert!(devs.windows(2).all(|w| w[1] < w[0]), "{devs:?}");
    }

    #[test]
    fn p_sigma_separation_constant_tends_to_minus_two() {
        let rep = probe("2pσu");
        assert_eq!(rep.a_limit, -2.0);
        assert!(rep.final_deviation().unwrap().2.abs() < 1e-2, "{rep:?}");
    }

    #[test]
    fn d_delta_energy_tends_to_he_plus_level() {
        let rep = probe("3dδg");
        assert!((rep.e_prime_limit + 4.0 / 9.0).abs() < 1e-15);
        assert!(rep.final_deviation().unwrap().1.abs() < 1e-3, "{rep:?}");
    }
}
