//! First-order non-linearization perturbation theory around a trial orbital.
//!
//! Writing the reduced factors as `u = f e^{−φ}` and `v = g e^{−ρ}`, the trial
//! phase defines the potentials `V₀`, `W₀` for which it is an exact solution
//! (with separation constant `A₀ = 0`). The perturbations are the differences
//! `V₁ = V − V₀` and `W₁ = W − W₀`, where
//!
//! * `V(ξ) = p²ξ² − 2 R_eff ξ`,
//! * `W(η) = p²η² + R (Z₁ − Z₂) η`.
//!
//! The first-order separation constants are the expectation values of the
//! perturbations in the respective channel. The first-order logarithmic
//! derivatives follow from one quadrature each:
//!
//! * `x₁ = I(ξ) / ((ξ²−1)^{Λ+1} u₀²)` with `I(ξ) = ∫₁^ξ (A₁ − V₁) u₀² (ξ²−1)^Λ`,
//! * `y₁ = −J(η) / ((1−η²)^{Λ+1} v₀²)` with `J(η) = ∫₋₁^η (A₁ − W₁) v₀² (1−η²)^Λ`.
//!
//! The phases are then `φ₁ = ∫₁^ξ x₁` and `ρ₁ = ∫₀^η y₁`.

mod corrected;
mod table;

pub use corrected::{pt_stability, stationary_p, CorrectedOrbital, StabilityReport};
pub use table::CorrectionTable;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Parity, PhysicalSetup, StateLabel};
use crate::quadrature::{gauss_legendre, rayleigh_quotient_checked, rule_sum, Channel, RuleSet, SeparableOrbital, DEFAULT_NODES};
use crate::summation::Precision;
use crate::trialfn::{TrialOrbital, TrialParams};

/// Relative change of `A₁` under node doubling above which the result is rejected.
const A1_PLATEAU_TOL: f64 = 1e-10;

/// Panels of the ξ correction grid, uniform in the double-exponential variable.
const XI_PANELS: usize = 200;
const XI_T_RANGE: (f64, f64) = (-3.0, 6.0);
/// Panels of the η correction grid, clustered towards η = ±1.
const ETA_PANELS: usize = 160;

/// First-order result for one channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelPT {
    pub channel: Channel,
    /// First-order separation constant, from the perturbation expectation value.
    pub a1: f64,
    /// The same quantity through the integrated-by-parts kinetic form.
    pub a1_weak: f64,
    /// `|A₁(2N) − A₁(N)|` of the node-doubling check.
    pub a1_plateau: f64,
    /// Supremum of `|V₁|` (or `|W₁|`) over the sampled grid, excluding a simple pole.
    pub bound_c: f64,
    /// Location and residue of the pole of `V₁` at the node of a node state.
    pub pole: Option<(f64, f64)>,
    /// `φ₁` or `ρ₁`, absent for node states.
    pub correction: Option<CorrectionTable>,
    /// First-order displacement of the ξ node.
    pub node_shift: Option<f64>,
}

/// Absolute and relative mismatch of the two channel estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Consistency {
    pub absolute: f64,
    pub relative: f64,
}

/// Both channels of the first-order theory for one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PtAnalysis {
    pub label: StateLabel,
    pub setup: PhysicalSetup,
    pub params: TrialParams,
    /// `p` used in the channel potentials.
    pub p_channel: f64,
    /// Variational energy of the trial orbital (Ry).
    pub energy: f64,
    pub xi: ChannelPT,
    pub eta: ChannelPT,
}

impl PtAnalysis {
    pub fn consistency(&self) -> Consistency {
        consistency_residual(self.xi.a1, self.eta.a1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PtOptions {
    pub rules_n: usize,
    pub precision: Precision,
    /// Overrides the `p` of the potentials; by default `p` is taken from the variational energy.
    pub p_channel: Option<f64>,
    /// Whether to build the `φ₁`, `ρ₁` tables.
    pub tabulate: bool,
}

impl Default for PtOptions {
    fn default() -> Self {
        PtOptions { rules_n: DEFAULT_NODES, precision: Precision::Standard, p_channel: None, tabulate: true }
    }
}

pub fn consistency_residual(a_xi: f64, a_eta: f64) -> Consistency {
    let absolute = (a_xi - a_eta).abs();
    let scale = 0.5 * (a_xi.abs() + a_eta.abs());
    Consistency { absolute, relative: if scale > 0.0 { absolute / scale } else { absolute } }
}

/// The ξ channel of a trial orbital with potential parameter `p`.
pub struct XiChannel<'a> {
    orb: &'a TrialOrbital,
    p: f64,
    r_eff: f64,
    lambda: u32,
}

impl<'a> XiChannel<'a> {
    pub fn new(orb: &'a TrialOrbital, p: f64) -> Self {
        XiChannel { orb, p, r_eff: orb.setup.r_eff(), lambda: orb.label.lambda }
    }

    pub fn potential(&self, xi: f64) -> f64 {
        self.p * self.p * xi * xi - 2.0 * self.r_eff * xi
    }

    /// `(f₀, L)` where `L = (ξ²−1)[f(x′−x²)+2f′x−f″] + 2(Λ+1)ξ[fx−f′]`, so that `V₀ = −L/f₀`.
    fn operator(&self, xi: f64) -> (f64, f64) {
        let ph = self.orb.phase_xi(xi);
        let (x, dx) = (ph.first, ph.second);
        let (f, df, ddf) = self.orb.xi_polynomial(xi);
        let q = (xi - 1.0) * (xi + 1.0);
        let l = q * (f * (dx - x * x) + 2.0 * df * x - ddf) + 2.0 * (self.lambda as f64 + 1.0) * xi * (f * x - df);
        (f, l)
    }

    /// `V₁ f₀`, regular everywhere.
    fn v1_times_f(&self, xi: f64) -> (f64, f64) {
        let (f, l) = self.operator(xi);
        (f, self.potential(xi) * f + l)
    }

    /// The perturbation `V₁(ξ)`; has a simple pole at the node of a node state.
    pub fn v1(&self, xi: f64) -> f64 {
        let (f, vf) = self.v1_times_f(xi);
        vf / f
    }

    /// `e^{−2φ̃} (ξ²−1)^Λ`.
    fn density(&self, xi: f64) -> f64 {
        (-2.0 * self.orb.shifted_phase(xi)).exp() * ((xi - 1.0) * (xi + 1.0)).powi(self.lambda as i32)
    }

    /// Integrand `(A₁ − V₁) u₀² (ξ²−1)^Λ` of `I(ξ)`.
    fn source(&self, a1: f64, xi: f64) -> f64 {
        let (f, vf) = self.v1_times_f(xi);
        (a1 * f - vf) * f * self.density(xi)
    }

    fn expectation(&self, rules: &RuleSet) -> (f64, f64) {
        let xs = &rules.xi.nodes;
        let pr = rules.precision;
        let lam = self.lambda as i32;
        let den = rule_sum(&rules.xi, pr, |i| {
            let f = self.orb.xi_polynomial(xs[i]).0;
            f * f * self.density(xs[i])
        });
        let strong = rule_sum(&rules.xi, pr, |i| {
            let (f, vf) = self.v1_times_f(xs[i]);
            vf * f * self.density(xs[i])
        });
        let weak = rule_sum(&rules.xi, pr, |i| {
            let x = xs[i];
            let q = (x - 1.0) * (x + 1.0);
            let (u, du) = self.orb.xi_factor(x);
            q.powi(lam + 1) * du * du + self.potential(x) * u * u * q.powi(lam)
        });
        (strong / den, weak / den)
    }
}

/// The η channel of a trial orbital with potential parameter `p`.
pub struct EtaChannel<'a> {
    orb: &'a TrialOrbital,
    p: f64,
    asym: f64,
    lambda: u32,
}

impl<'a> EtaChannel<'a> {
    pub fn new(orb: &'a TrialOrbital, p: f64) -> Self {
        let s = &orb.setup;
        EtaChannel { orb, p, asym: s.r * (s.z1 - s.z2), lambda: orb.label.lambda }
    }

    pub fn potential(&self, eta: f64) -> f64 {
        self.p * self.p * eta * eta + self.asym * eta
    }

    /// The perturbation `W₁(η)`; finite at η = 0 on both parity branches.
    pub fn w1(&self, eta: f64) -> f64 {
        // On the odd branch coth(u) and its cofactor both vanish linearly at η = 0.
        let eta = if self.orb.label.parity == Parity::Minus && eta.abs() < 1e-7 { 1e-7f64.copysign(eta) } else { eta };
        let e = self.orb.eta_phase_parts(eta);
        let q = eta * eta - 1.0;
        let l = self.lambda as f64 + 1.0;
        let even = q * (e.dd - e.d * e.d - e.du * e.du) + 2.0 * l * eta * e.d;
        let odd = q * (2.0 * e.d * e.du - e.d2u) - 2.0 * l * eta * e.du;
        self.potential(eta) + even + e.t * odd
    }

    fn weight(&self, eta: f64) -> f64 {
        let v = self.orb.eta_factor(eta).0;
        v * v * ((1.0 - eta) * (1.0 + eta)).powi(self.lambda as i32)
    }

    /// Integrand `(A₁ − W₁) v₀² (1−η²)^Λ` of `J(η)`.
    fn source(&self, a1: f64, eta: f64) -> f64 {
        let w = self.weight(eta);
        if w == 0.0 {
            0.0
        } else {
            (a1 - self.w1(eta)) * w
        }
    }

    fn expectation(&self, rules: &RuleSet) -> (f64, f64) {
        let es = &rules.eta.nodes;
        let pr = rules.precision;
        let lam = self.lambda as i32;
        let den = rule_sum(&rules.eta, pr, |i| self.weight(es[i]));
        let strong = rule_sum(&rules.eta, pr, |i| self.w1(es[i]) * self.weight(es[i]));
        let weak = rule_sum(&rules.eta, pr, |i| {
            let e = es[i];
            let q = (1.0 - e) * (1.0 + e);
            let (v, dv) = self.orb.eta_factor(e);
            self.potential(e) * v * v * q.powi(lam) - q.powi(lam + 1) * dv * dv
        });
        (strong / den, weak / den)
    }
}

/// `(ξ²−1)[f(x′−x²)+2f′x−f″] + 2(Λ+1)ξ[fx−f′] − [A − V(ξ)] f` for the trial
/// phase, with `V = p²ξ² − 2R_eff ξ` built from the trial `p`.
/// It vanishes identically iff `(X, A)` solves the ξ equation.
pub fn riccati_residual_xi(params: &TrialParams, label: &StateLabel, setup: &PhysicalSetup, a: f64, xi: f64) -> Result<f64> {
    let orb = TrialOrbital::new(params.clone(), *label, *setup)?;
    let ch = XiChannel::new(&orb, params.p);
    let (f, vf) = ch.v1_times_f(xi);
    Ok(vf - a * f)
}

/// η-channel counterpart of [`riccati_residual_xi`], divided by `g`:
/// `W₁(η) − A`, which vanishes iff `(Y, A)` solves the η equation.
pub fn riccati_residual_eta(params: &TrialParams, label: &StateLabel, setup: &PhysicalSetup, a: f64, eta: f64) -> Result<f64> {
    let orb = TrialOrbital::new(params.clone(), *label, *setup)?;
    if label.m != 0 {
        return Err(Error::Unsupported("η perturbation theory needs m = 0".into()));
    }
    Ok(EtaChannel::new(&orb, params.p).w1(eta) - a)
}

/// Gauss-Legendre 8-point rule on `[a, b]`.
struct Panel {
    x: Vec<f64>,
    w: Vec<f64>,
}

impl Panel {
    fn new() -> Self {
        let (x, w) = gauss_legendre(8);
        Panel { x, w }
    }

    fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.x.iter().zip(&self.w).map(|(t, w)| w * f(c + h * t)).sum::<f64>() * h
    }
}

fn xi_grid(p: f64) -> Vec<f64> {
    let scale = 0.5 / p;
    let (t0, t1) = XI_T_RANGE;
    let h = (t1 - t0) / XI_PANELS as f64;
    let mut g = vec![1.0];
    g.extend((0..=XI_PANELS).map(|k| {
        let t = t0 + h * k as f64;
        1.0 + scale * (t - (-t).exp()).exp()
    }));
    g
}

fn eta_grid() -> Vec<f64> {
    let half = ETA_PANELS as f64 / 2.0;
    (0..=ETA_PANELS)
        .map(|k| (std::f64::consts::FRAC_PI_2 * (k as f64 - half) / half).sin())
        .collect()
}

/// Running integral of a source on a grid, anchored at a chosen node per region.
struct Antiderivative<'a> {
    grid: &'a [f64],
    anchor_values: Vec<f64>,
}

impl Antiderivative<'_> {
    fn at(&self, panel: &Panel, k: usize, x: f64, f: &impl Fn(f64) -> f64) -> f64 {
        if x == self.grid[k] {
            self.anchor_values[k]
        } else {
            self.anchor_values[k] + panel.integrate(self.grid[k], x, f)
        }
    }

    fn locate(&self, x: f64) -> usize {
        self.grid.partition_point(|&g| g <= x).saturating_sub(1).min(self.grid.len() - 2)
    }
}

fn panel_integrals(grid: &[f64], panel: &Panel, f: &impl Fn(f64) -> f64) -> Vec<f64> {
    grid.windows(2).map(|w| panel.integrate(w[0], w[1], f)).collect()
}

fn a1_with_plateau<F: Fn(&RuleSet) -> (f64, f64)>(rules: &RuleSet, f: F) -> Result<(f64, f64, f64)> {
    let (strong, weak) = f(rules);
    let (fine, _) = f(&rules.refined()?);
    let diff = (fine - strong).abs();
    if !(diff <= A1_PLATEAU_TOL * strong.abs().max(1.0)) {
        return Err(Error::QuadratureNotConverged { coarse: strong, fine });
    }
    Ok((strong, weak, diff))
}

/// ξ-channel first-order correction.
pub fn first_correction_xi(orb: &TrialOrbital, p: f64, opts: &PtOptions) -> Result<ChannelPT> {
    let rules = RuleSet::with_precision(p, opts.rules_n, opts.precision)?;
    let ch = XiChannel::new(orb, p);
    let (a1, a1_weak, a1_plateau) = a1_with_plateau(&rules, |r| ch.expectation(r))?;
    let lam = orb.label.lambda as i32;
    let grid = xi_grid(p);
    let panel = Panel::new();
    let src = |x: f64| ch.source(a1, x);

    let node = if orb.label.n == 1 { orb.params.xi0 } else { None };
    let pole = node.map(|x0| (x0, ch.operator(x0).1));
    let bound_c = grid
        .iter()
        .filter(|&&x| x <= 50.0 && node.map_or(true, |x0| (x - x0).abs() > 1e-8))
        .map(|&x| {
            let v = ch.v1(x);
            match pole {
                Some((x0, res)) => (v - res / (x - x0)).abs(),
                None => v.abs(),
            }
        })
        .fold(0.0f64, f64::max);

    // I(ξ) runs forward from ξ = 1 up to the bulk of the density and backward from ∞ beyond it.
    let pieces = panel_integrals(&grid, &panel, &src);
    let mass: Vec<f64> = panel_integrals(&grid, &panel, &|x| {
        let f = orb.xi_polynomial(x).0;
        f * f * ch.density(x)
    });
    let total_mass: f64 = mass.iter().sum();
    let mut switch = grid.len() - 1;
    let mut acc = 0.0;
    for (k, m) in mass.iter().enumerate() {
        acc += m;
        if acc >= 0.5 * total_mass {
            switch = k + 1;
            break;
        }
    }
    let mut anchors = vec![0.0; grid.len()];
    for k in 1..=switch {
        anchors[k] = anchors[k - 1] + pieces[k - 1];
    }
    let last = grid.len() - 1;
    anchors[last] = 0.0;
    for k in (switch + 1..last).rev() {
        anchors[k] = anchors[k + 1] - pieces[k];
    }
    let big_i = Antiderivative { grid: &grid, anchor_values: anchors };

    let node_shift = node.map(|x0| {
        let k = big_i.locate(x0);
        let i0 = big_i.at(&panel, k, x0, &src);
        let q = (x0 - 1.0) * (x0 + 1.0);
        -i0 / (q.powi(lam + 1) * (-2.0 * orb.shifted_phase(x0)).exp())
    });

    let correction = if opts.tabulate && node.is_none() {
        let limit = (a1 - ch.v1(1.0)) / (2.0 * (lam as f64 + 1.0));
        let x1 = |k: usize, x: f64, prev: f64| -> f64 {
            if x <= 1.0 {
                return limit;
            }
            let f = orb.xi_polynomial(x).0;
            let den = ((x - 1.0) * (x + 1.0)) * f * f * ch.density(x);
            let v = big_i.at(&panel, k, x, &src) / den;
            if v.is_finite() {
                v
            } else {
                prev
            }
        };
        let mut values = vec![0.0; grid.len()];
        let mut slopes = vec![limit; grid.len()];
        for k in 1..grid.len() {
            let prev = slopes[k - 1];
            slopes[k] = x1(k.min(last - 1), grid[k], prev);
            values[k] = values[k - 1] + panel.integrate(grid[k - 1], grid[k], |x| x1(k - 1, x, prev));
        }
        Some(CorrectionTable::new(grid.clone(), values, slopes))
    } else {
        None
    };

    Ok(ChannelPT { channel: Channel::Xi, a1, a1_weak, a1_plateau, bound_c, pole, correction, node_shift })
}

/// η-channel first-order correction.
pub fn first_correction_eta(orb: &TrialOrbital, p: f64, opts: &PtOptions) -> Result<ChannelPT> {
    if orb.label.m != 0 {
        return Err(Error::Unsupported("η perturbation theory needs m = 0".into()));
    }
    if !orb.setup.is_symmetric() {
        return Err(Error::Unsupported("η perturbation theory needs equal charges".into()));
    }
    let rules = RuleSet::with_precision(p, opts.rules_n, opts.precision)?;
    let ch = EtaChannel::new(orb, p);
    let (a1, a1_weak, a1_plateau) = a1_with_plateau(&rules, |r| ch.expectation(r))?;
    let lam = orb.label.lambda as i32;
    let grid = eta_grid();
    let bound_c = grid.iter().map(|&e| ch.w1(e).abs()).fold(0.0f64, f64::max);

    let correction = if opts.tabulate {
        let panel = Panel::new();
        let src = |e: f64| ch.source(a1, e);
        let pieces = panel_integrals(&grid, &panel, &src);
        let n = grid.len();
        let mid = n / 2;
        // J(η) is anchored at the nearest of −1, 0, +1 (J vanishes at all three by symmetry).
        let mut anchors = vec![0.0; n];
        for k in 1..n {
            if grid[k] <= -0.5 {
                anchors[k] = anchors[k - 1] + pieces[k - 1];
            }
        }
        for k in (0..n - 1).rev() {
            if grid[k] >= 0.5 {
                anchors[k] = anchors[k + 1] - pieces[k];
            }
        }
        for k in mid + 1..n {
            if grid[k] < 0.5 {
                anchors[k] = anchors[k - 1] + pieces[k - 1];
            }
        }
        for k in (0..mid).rev() {
            if grid[k] > -0.5 {
                anchors[k] = anchors[k + 1] - pieces[k];
            }
        }
        let big_j = Antiderivative { grid: &grid, anchor_values: anchors };
        let end = |s: f64| s * (a1 - ch.w1(s)) / (2.0 * (lam as f64 + 1.0));
        let y1 = |k: usize, e: f64| -> f64 {
            if e >= 1.0 {
                return end(1.0);
            }
            if e <= -1.0 {
                return end(-1.0);
            }
            if e == 0.0 {
                return 0.0;
            }
            let den = ((1.0 - e) * (1.0 + e)) * ch.weight(e);
            // Anchor from the side nearer to η = 0 so that J(0) = 0 is used for small |η|.
            let k = if e.abs() < 0.5 && e < 0.0 && k + 1 < n && grid[k + 1] <= 0.0 { k + 1 } else { k };
            let v = -big_j.at(&panel, k, e, &src) / den;
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        let slopes: Vec<f64> = grid.iter().enumerate().map(|(k, &e)| y1(k.min(n - 2), e)).collect();
        let mut values = vec![0.0; n];
        for k in mid + 1..n {
            values[k] = values[k - 1] + panel.integrate(grid[k - 1], grid[k], |e| y1(k - 1, e));
        }
        for k in (0..mid).rev() {
            values[k] = values[k + 1] - panel.integrate(grid[k], grid[k + 1], |e| y1(k, e));
        }
        Some(CorrectionTable::new(grid.clone(), values, slopes))
    } else {
        None
    };

    Ok(ChannelPT { channel: Channel::Eta, a1, a1_weak, a1_plateau, bound_c, pole: None, correction, node_shift: None })
}

/// Runs both channels for a trial orbital.
///
/// Unless overridden, the potentials use the `p` implied by the variational
/// energy, which is the value the exact solution decays with.
pub fn analyze(params: &TrialParams, label: &StateLabel, setup: &PhysicalSetup, opts: &PtOptions) -> Result<PtAnalysis> {
    let orb = TrialOrbital::new(params.clone(), *label, *setup)?;
    let rules = RuleSet::with_precision(params.p, opts.rules_n, opts.precision)?;
    let energy = rayleigh_quotient_checked(&orb, setup, &rules)?;
    let p = opts.p_channel.unwrap_or(energy.p);
    let (xi, eta) = rayon::join(|| first_correction_xi(&orb, p, opts), || first_correction_eta(&orb, p, opts));
    Ok(PtAnalysis { label: *label, setup: *setup, params: params.clone(), p_channel: p, energy: energy.e_total, xi: xi?, eta: eta? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variational::{optimize_from_seed, OptimizeConfig};

    #[test]
    fn consistency_is_symmetric_and_relative() {
        let c = consistency_residual(1.0, 1.5);
        assert_eq!(c, consistency_residual(1.5, 1.0));
        assert!((c.absolute - 0.5).abs() < 1e-15);
        assert!((c.relative - 0.4).abs() < 1e-15);
        assert_eq!(consistency_residual(0.0, 0.0).relative, 0.0);
    }

    #[test]
    fn exact_exponential_has_no_residual() {
        // with R = (Λ+1)p and α = pγ the ξ factor is exactly e^{−pξ}, with A = p²
        let p = 0.9;
        for lambda in 0..3u32 {
            let label = StateLabel::new(0, 0, lambda, Parity::Plus);
            let setup = PhysicalSetup::h2plus((lambda as f64 + 1.0) * p);
            let params = TrialParams::reduced(p * 0.4, 0.4, 0.0, p);
            for xi in [1.01, 1.3, 2.0, 6.0, 15.0] {
                let r = riccati_residual_xi(&params, &label, &setup, p * p, xi).unwrap();
                assert!(r.abs() < 1e-11, "Λ={lambda} ξ={xi}: {r}");
            }
            let orb = TrialOrbital::new(params, label, setup).unwrap();
            let ch = first_correction_xi(&orb, p, &PtOptions { tabulate: false, ..Default::default() }).unwrap();
            assert!((ch.a1 - p * p).abs() < 1e-10, "{}", ch.a1);
            assert!((ch.a1_weak - p * p).abs() < 1e-10, "{}", ch.a1_weak);
        }
    }

    #[test]
    fn legendre_limit_solves_the_eta_equation() {
        let setup = PhysicalSetup::h2plus(2.0);
        for lambda in 0..3u32 {
            for (parity, a1, l) in [(Parity::Plus, 0.0, lambda), (Parity::Minus, 1e-7, lambda + 1)] {
                let label = StateLabel::new(0, 0, lambda, parity);
                let params = TrialParams::reduced(0.1, 0.5, a1, 1e-7);
                let a = -(((l - lambda) * (l + lambda + 1)) as f64);
                for eta in [-0.95, -0.4, 0.1, 0.8] {
                    let r = riccati_residual_eta(&params, &label, &setup, a, eta).unwrap();
                    assert!(r.abs() < 1e-10, "{label} η={eta}: {r}");
                }
            }
        }
    }

    #[test]
    fn optimized_ground_state_channels_agree() {
        let label = StateLabel::new(0, 0, 0, Parity::Plus);
        let res = optimize_from_seed(&label, &PhysicalSetup::h2plus(2.0), &OptimizeConfig::default()).unwrap();
        let an = analyze(&res.params, &label, &res.setup, &PtOptions::default()).unwrap();
        assert!(an.consistency().relative < 1e-7, "{:?}", an.consistency());
        assert!((an.xi.a1 - an.xi.a1_weak).abs() < 1e-8 * an.xi.a1.abs());
        assert!(an.xi.a1_plateau < 1e-9 && an.eta.a1_plateau < 1e-9);
        assert!(an.xi.correction.is_some() && an.eta.correction.is_some());
        assert!(an.xi.pole.is_none() && an.xi.node_shift.is_none());
    }

    #[test]
    fn eta_channel_rejects_excited_m() {
        let label = StateLabel::new(0, 1, 0, Parity::Plus);
        let params = TrialParams::reduced(0.5, 0.5, 0.0, 1.0);
        assert!(riccati_residual_eta(&params, &label, &PhysicalSetup::h2plus(2.0), 0.0, 0.3).is_err());
    }
}
