//! The trial orbital multiplied by the first-order phase corrections.

use serde::{Deserialize, Serialize};

use super::{CorrectionTable, PtAnalysis};
use crate::error::{Error, Result};
use crate::model::PhysicalSetup;
use crate::quadrature::{rayleigh_energy, RuleSet, SeparableOrbital};
use crate::roots::{brent, expand_bracket};
use crate::summation::Precision;
use crate::trialfn::TrialOrbital;

/// `X₀ Y₀ e^{−λ(φ₁+ρ₁)}`; `λ = 1` is the first-order corrected state.
#[derive(Debug, Clone)]
pub struct CorrectedOrbital {
    pub base: TrialOrbital,
    pub phi1: CorrectionTable,
    pub rho1: CorrectionTable,
    pub strength: f64,
}

impl CorrectedOrbital {
    /// Corrected orbital of an analysis; fails for node states, whose ξ phase
    /// correction is singular at the node.
    pub fn from_analysis(analysis: &PtAnalysis) -> Result<Self> {
        let base = TrialOrbital::new(analysis.params.clone(), analysis.label, analysis.setup)?;
        let missing = || Error::Unsupported(format!("no phase correction table for {}", analysis.label));
        Ok(CorrectedOrbital {
            base,
            phi1: analysis.xi.correction.clone().ok_or_else(missing)?,
            rho1: analysis.eta.correction.clone().ok_or_else(missing)?,
            strength: 1.0,
        })
    }

    /// The same corrections applied on top of a different base orbital.
    pub fn with_base(&self, base: TrialOrbital) -> Self {
        CorrectedOrbital { base, ..self.clone() }
    }
}

impl SeparableOrbital for CorrectedOrbital {
    fn lambda(&self) -> u32 {
        self.base.label.lambda
    }

    fn xi_factor(&self, xi: f64) -> (f64, f64) {
        let (u, du) = self.base.xi_factor(xi);
        let (phi, dphi) = self.phi1.eval(xi);
        let e = (-self.strength * phi).exp();
        (u * e, (du - self.strength * u * dphi) * e)
    }

    fn eta_factor(&self, eta: f64) -> (f64, f64) {
        let (v, dv) = self.base.eta_factor(eta);
        let (rho, drho) = self.rho1.eval(eta);
        let e = (-self.strength * rho).exp();
        (v * e, (dv - self.strength * v * drho) * e)
    }

    fn log_scale(&self) -> f64 {
        self.base.log_scale()
    }
}

/// Finds the stationary point of `energy(p)` near `p0` from a five-point derivative.
pub fn stationary_p(energy: impl Fn(f64) -> Result<f64>, p0: f64) -> Result<f64> {
    let h = 1e-3 * p0;
    let slope = |p: f64| -> f64 {
        let e = |k: f64| energy(p + k * h).unwrap_or(f64::NAN);
        (e(-2.0) - 8.0 * e(-1.0) + 8.0 * e(1.0) - e(2.0)) / (12.0 * h)
    };
    let (lo, hi) = expand_bracket(slope, p0 * (1.0 - 1e-3), p0 * (1.0 + 1e-3), 0.5 * p0, 40)?;
    Ok(brent(slope, lo, hi, 1e-14 * p0, 200)?.x)
}

/// Effect of the first-order correction on the variational energy and on the optimal `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub e_plain: f64,
    pub e_corrected: f64,
    pub delta_e: f64,
    /// Optimized `p` of the trial orbital.
    pub p_trial: f64,
    /// Energy-stationary `p` of the trial orbital, other parameters fixed.
    pub p_plain: f64,
    /// The same for the corrected orbital, with the correction tables held fixed.
    pub p_corrected: f64,
    /// `|p_corrected − p_trial| / p_trial`.
    pub delta_p_relative: f64,
}

/// Compares the plain and corrected orbitals of an analysis.
pub fn pt_stability(analysis: &PtAnalysis, rules_n: usize, precision: Precision) -> Result<StabilityReport> {
    let setup: PhysicalSetup = analysis.setup;
    let corrected = CorrectedOrbital::from_analysis(analysis)?;
    let p0 = analysis.params.p;
    let rules = RuleSet::with_precision(p0, rules_n, precision)?;
    let base_at = |p: f64| TrialOrbital::new(crate::trialfn::TrialParams { p, ..analysis.params.clone() }, analysis.label, setup);
    let e_plain = rayleigh_energy(&corrected.base, &setup, &rules)?;
    let e_corrected = rayleigh_energy(&corrected, &setup, &rules)?;
    let p_plain = stationary_p(|p| rayleigh_energy(&base_at(p)?, &setup, &rules), p0)?;
    let p_corrected = stationary_p(|p| rayleigh_energy(&corrected.with_base(base_at(p)?), &setup, &rules), p0)?;
    Ok(StabilityReport {
        e_plain,
        e_corrected,
        delta_e: e_corrected - e_plain,
        p_trial: p0,
        p_plain,
        p_corrected,
        delta_p_relative: (p_corrected - p0).abs() / p0,
    })
}
