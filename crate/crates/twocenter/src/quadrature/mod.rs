//! Quadrature rules and the matrix elements assembled from them.
//!
//! Every orbital handled here is separable, `Ψ = X(ξ) Y(η) e^{iΛφ}` with
//! `X = (ξ²−1)^{Λ/2} u(ξ)` and `Y = (1−η²)^{Λ/2} v(η)`. Because the volume
//! element is `a³(ξ²−η²) dξ dη dφ` (`a = R/2`), every three-dimensional
//! integral reduces to sums of products of one-dimensional moments.

pub mod rules;

pub use rules::{build_rules, gauss_legendre, gauss_legendre_on, Channel, QuadratureRule, RuleSet, DEFAULT_NODES, MIN_NODES};

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{EnergyPair, PhysicalSetup};
use crate::summation::{Accumulator, Precision};

/// Relative tolerance of the node-doubling plateau test.
pub const PLATEAU_TOL: f64 = 1e-12;

/// An orbital of the form `(ξ²−1)^{Λ/2} u(ξ) · (1−η²)^{Λ/2} v(η) · e^{iΛφ}`.
///
/// `u` and `v` may be returned with an arbitrary constant rescaling; the true
/// orbital equals the product of the returned factors times `exp(log_scale())`.
pub trait SeparableOrbital: Send + Sync {
    fn lambda(&self) -> u32;
    /// `(u(ξ), u′(ξ))`.
    fn xi_factor(&self, xi: f64) -> (f64, f64);
    /// `(v(η), v′(η))`.
    fn eta_factor(&self, eta: f64) -> (f64, f64);
    /// Natural logarithm of the factor removed from `u·v`.
    fn log_scale(&self) -> f64 {
        0.0
    }
}

/// Values and derivatives of an orbital's reduced factors at the rule nodes.
#[derive(Debug, Clone)]
pub struct Tabulated {
    pub lambda: u32,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub v: Vec<f64>,
    pub dv: Vec<f64>,
    pub log_scale: f64,
}

impl Tabulated {
    pub fn new(orb: &dyn SeparableOrbital, rules: &RuleSet) -> Self {
        let (u, du): (Vec<f64>, Vec<f64>) = rules.xi.nodes.iter().map(|&x| orb.xi_factor(x)).unzip();
        let (v, dv): (Vec<f64>, Vec<f64>) = rules.eta.nodes.iter().map(|&e| orb.eta_factor(e)).unzip();
        Tabulated { lambda: orb.lambda(), u, du, v, dv, log_scale: orb.log_scale() }
    }
}

/// `ξ² − 1` without cancellation near ξ = 1.
#[inline]
pub fn xi_sq_minus_one(xi: f64) -> f64 {
    (xi - 1.0) * (xi + 1.0)
}

#[inline]
pub fn one_minus_eta_sq(eta: f64) -> f64 {
    (1.0 - eta) * (1.0 + eta)
}

#[inline]
fn powi(x: f64, k: i32) -> f64 {
    if k == 0 {
        1.0
    } else {
        x.powi(k)
    }
}

/// Weighted sum over a rule: `Σ wᵢ f(i)`.
pub fn rule_sum(rule: &QuadratureRule, precision: Precision, f: impl Fn(usize) -> f64) -> f64 {
    let mut acc = Accumulator::new(precision);
    for (i, w) in rule.weights.iter().enumerate() {
        acc.add_product(*w, f(i));
    }
    acc.value()
}

/// The one-dimensional moments entering norm and energy of a single orbital.
///
/// ξ side (weight `(ξ²−1)^Λ u²`): `s0 = ∫1`, `s1 = ∫ξ`, `s2 = ∫ξ²`, plus the
/// kinetic integral `k`. η side likewise with `(1−η²)^Λ v²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelMoments {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub k: f64,
}

/// ξ-channel moments of a tabulated orbital.
pub fn xi_moments(t: &Tabulated, rules: &RuleSet) -> ChannelMoments {
    let lam = t.lambda as i32;
    let lf = t.lambda as f64;
    let pr = rules.precision;
    let xs = &rules.xi.nodes;
    let w = |i: usize| powi(xi_sq_minus_one(xs[i]), lam) * t.u[i] * t.u[i];
    ChannelMoments {
        s0: rule_sum(&rules.xi, pr, w),
        s1: rule_sum(&rules.xi, pr, |i| xs[i] * w(i)),
        s2: rule_sum(&rules.xi, pr, |i| xs[i] * xs[i] * w(i)),
        k: rule_sum(&rules.xi, pr, |i| {
            let x = xs[i];
            let q = xi_sq_minus_one(x);
            let (u, du) = (t.u[i], t.du[i]);
            let mut v = powi(q, lam + 1) * du * du;
            if lam > 0 {
                v += 2.0 * lf * x * powi(q, lam) * u * du + lf * lf * (x * x + 1.0) * powi(q, lam - 1) * u * u;
            }
            v
        }),
    }
}

/// η-channel moments of a tabulated orbital.
pub fn eta_moments(t: &Tabulated, rules: &RuleSet) -> ChannelMoments {
    let lam = t.lambda as i32;
    let lf = t.lambda as f64;
    let pr = rules.precision;
    let es = &rules.eta.nodes;
    let w = |i: usize| powi(one_minus_eta_sq(es[i]), lam) * t.v[i] * t.v[i];
    ChannelMoments {
        s0: rule_sum(&rules.eta, pr, w),
        s1: rule_sum(&rules.eta, pr, |i| es[i] * w(i)),
        s2: rule_sum(&rules.eta, pr, |i| es[i] * es[i] * w(i)),
        k: rule_sum(&rules.eta, pr, |i| {
            let e = es[i];
            let q = one_minus_eta_sq(e);
            let (v, dv) = (t.v[i], t.dv[i]);
            let mut s = powi(q, lam + 1) * dv * dv;
            if lam > 0 {
                s += -2.0 * lf * e * powi(q, lam) * v * dv + lf * lf * (e * e + 1.0) * powi(q, lam - 1) * v * v;
            }
            s
        }),
    }
}

/// `⟨Ψ|Ψ⟩` of the rescaled orbital (without `exp(2·log_scale)`).
pub fn scaled_norm(t: &Tabulated, rules: &RuleSet, setup: &PhysicalSetup) -> f64 {
    let (mx, my) = (xi_moments(t, rules), eta_moments(t, rules));
    let a = setup.half_r();
    2.0 * PI * a * a * a * (mx.s2 * my.s0 - mx.s0 * my.s2)
}

/// `⟨Ψ|Ψ⟩ = 2π a³ [Sξ₂ Sη₀ − Sξ₀ Sη₂]`.
pub fn norm_squared(orb: &dyn SeparableOrbital, setup: &PhysicalSetup, rules: &RuleSet) -> Result<f64> {
    setup.validate()?;
    let t = Tabulated::new(orb, rules);
    let n = scaled_norm(&t, rules, setup);
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::QuadratureFailure(format!("non-positive norm {n}")));
    }
    Ok(n * (2.0 * t.log_scale).exp())
}

/// Total energy (Ry) of a tabulated orbital.
pub fn energy_from_tables(t: &Tabulated, rules: &RuleSet, setup: &PhysicalSetup) -> f64 {
    let (mx, my) = (xi_moments(t, rules), eta_moments(t, rules));
    let a = setup.half_r();
    let den = mx.s2 * my.s0 - mx.s0 * my.s2;
    let kinetic = mx.k * my.s0 + mx.s0 * my.k;
    let coulomb = (setup.z1 + setup.z2) * mx.s1 * my.s0 + (setup.z1 - setup.z2) * mx.s0 * my.s1;
    let e_prime = (kinetic - setup.r * coulomb) / (a * a * den);
    e_prime + setup.repulsion()
}

/// Rayleigh quotient in Ry with the kinetic energy in gradient form.
pub fn rayleigh_energy(orb: &dyn SeparableOrbital, setup: &PhysicalSetup, rules: &RuleSet) -> Result<f64> {
    setup.validate()?;
    let t = Tabulated::new(orb, rules);
    let n = scaled_norm(&t, rules, setup);
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::QuadratureFailure(format!("non-positive norm {n}")));
    }
    Ok(energy_from_tables(&t, rules, setup))
}

/// Rayleigh quotient as an [`EnergyPair`].
pub fn rayleigh_quotient(orb: &dyn SeparableOrbital, setup: &PhysicalSetup, rules: &RuleSet) -> Result<EnergyPair> {
    EnergyPair::from_total(rayleigh_energy(orb, setup, rules)?, setup)
}

/// Rayleigh quotient on `rules` and on the doubled rules; fails with both
/// estimates when they differ by more than [`PLATEAU_TOL`] (relative).
pub fn rayleigh_quotient_checked(orb: &dyn SeparableOrbital, setup: &PhysicalSetup, rules: &RuleSet) -> Result<EnergyPair> {
    let coarse = rayleigh_energy(orb, setup, rules)?;
    let fine = rayleigh_energy(orb, setup, &rules.refined()?)?;
    if (fine - coarse).abs() > PLATEAU_TOL * fine.abs().max(1.0) {
        return Err(Error::QuadratureNotConverged { coarse, fine });
    }
    EnergyPair::from_total(fine, setup)
}

/// Normalized overlap `⟨a|b⟩ / sqrt(⟨a|a⟩⟨b|b⟩)` of two orbitals.
///
/// Orbitals with different Λ are orthogonal through the azimuthal integral.
pub fn normalized_overlap(a: &dyn SeparableOrbital, b: &dyn SeparableOrbital, _setup: &PhysicalSetup, rules: &RuleSet) -> f64 {
    if a.lambda() != b.lambda() {
        return 0.0;
    }
    let ta = Tabulated::new(a, rules);
    let tb = Tabulated::new(b, rules);
    let ab = raw_overlap(&ta, &tb, rules);
    let aa = raw_overlap(&ta, &ta, rules);
    let bb = raw_overlap(&tb, &tb, rules);
    ab / (aa * bb).sqrt()
}

/// `Sξ₂ Sη₀ − Sξ₀ Sη₂` for a pair of same-Λ tabulated orbitals.
pub fn raw_overlap(a: &Tabulated, b: &Tabulated, rules: &RuleSet) -> f64 {
    let lam = a.lambda as i32;
    let pr = rules.precision;
    let xs = &rules.xi.nodes;
    let es = &rules.eta.nodes;
    let wx = |i: usize| powi(xi_sq_minus_one(xs[i]), lam) * a.u[i] * b.u[i];
    let wy = |i: usize| powi(one_minus_eta_sq(es[i]), lam) * a.v[i] * b.v[i];
    let x0 = rule_sum(&rules.xi, pr, wx);
    let x2 = rule_sum(&rules.xi, pr, |i| xs[i] * xs[i] * wx(i));
    let y0 = rule_sum(&rules.eta, pr, wy);
    let y2 = rule_sum(&rules.eta, pr, |i| es[i] * es[i] * wy(i));
    x2 * y0 - x0 * y2
}
