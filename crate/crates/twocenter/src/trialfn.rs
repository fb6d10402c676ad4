//! The compact trial wavefunction, its phases, the asymptotic phase series and
//! the Hund-Mulliken / Guillemin-Zener baselines.
//!
//! The trial orbital factorizes as
//!
//! ```text
//! Ψ = (ξ²−1)^{Λ/2} P_n(ξ) e^{−φ₀(ξ)} · (1−η²)^{Λ/2} Q_m(η²) D(η)^{−k} cs(η s(η)) · e^{iΛφ}
//! φ₀(ξ) = (1+n+Λ−R/p) ln(γ+ξ) + ξ(α+pξ)/(γ+ξ)
//! D(η)  = 1 + b₂η² + b₃η⁴,   s(η) = (a₁ + p a₂ η² + p b₃ η⁴)/D,   k = (1+2m+Λ)/4
//! ```
//!
//! with `cs = cosh` for parity `+` and `sinh` for parity `−`. For unequal
//! charges `R` in the logarithm exponent becomes `(Z₁+Z₂)R/2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{p_from_energy, Parity, PhysicalSetup, StateLabel};
use crate::quadrature::SeparableOrbital;

/// Parameters of the trial function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialParams {
    pub alpha: f64,
    pub gamma: f64,
    pub a1: f64,
    pub a2: f64,
    pub b2: f64,
    pub b3: f64,
    pub p: f64,
    /// Node of the ξ factor; present exactly for n = 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi0: Option<f64>,
    /// Ascending coefficients of P_n for n ≥ 2 (leading coefficient 1).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub p_coeffs: Vec<f64>,
    /// Ascending coefficients of Q_m in the variable η² for m ≥ 1 (leading coefficient 1).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub q_coeffs: Vec<f64>,
}

impl TrialParams {
    /// Parameters with the three shape coefficients of the η factor set to zero.
    pub fn reduced(alpha: f64, gamma: f64, a1: f64, p: f64) -> Self {
        TrialParams { alpha, gamma, a1, a2: 0.0, b2: 0.0, b3: 0.0, p, xi0: None, p_coeffs: vec![], q_coeffs: vec![] }
    }

    /// Seven-component vector `[α, γ, a₁, a₂, b₂, b₃, p]`.
    pub fn as_vector(&self) -> [f64; 7] {
        [self.alpha, self.gamma, self.a1, self.a2, self.b2, self.b3, self.p]
    }

    pub fn with_vector(&self, v: &[f64; 7]) -> Self {
        TrialParams {
            alpha: v[0],
            gamma: v[1],
            a1: v[2],
            a2: v[3],
            b2: v[4],
            b3: v[5],
            p: v[6],
            ..self.clone()
        }
    }

    /// Checks every domain invariant of the ansatz for the given label.
    pub fn validate(&self, label: &StateLabel) -> Result<()> {
        let v = self.as_vector();
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::ParameterDomain("non-finite parameter".into()));
        }
        if self.gamma <= -1.0 {
            return Err(Error::ParameterDomain(format!("gamma = {} must exceed -1", self.gamma)));
        }
        if self.p <= 0.0 {
            return Err(Error::ParameterDomain(format!("p = {} must be positive", self.p)));
        }
        if !denominator_positive(self.b2, self.b3) {
            return Err(Error::ParameterDomain(format!(
                "1 + b2 η² + b3 η⁴ must stay positive (b2 = {}, b3 = {})",
                self.b2, self.b3
            )));
        }
        match (label.n, self.xi0) {
            (1, Some(x)) if x > 1.0 && x.is_finite() => {}
            (1, Some(x)) => return Err(Error::ParameterDomain(format!("xi0 = {x} must exceed 1"))),
            (1, None) => return Err(Error::ParameterDomain("n = 1 requires xi0".into())),
            (_, Some(_)) => return Err(Error::ParameterDomain("xi0 is only meaningful for n = 1".into())),
            _ => {}
        }
        if label.n >= 2 && self.p_coeffs.len() != label.n as usize + 1 {
            return Err(Error::ParameterDomain(format!("P_n needs {} coefficients", label.n + 1)));
        }
        if label.m >= 1 && self.q_coeffs.len() != label.m as usize + 1 {
            return Err(Error::ParameterDomain(format!("Q_m needs {} coefficients", label.m + 1)));
        }
        Ok(())
    }
}

/// `1 + b₂u + b₃u² > 0` for all `u = η² ∈ [0, 1]`.
fn denominator_positive(b2: f64, b3: f64) -> bool {
    let d = |u: f64| 1.0 + b2 * u + b3 * u * u;
    if d(1.0) <= 0.0 {
        return false;
    }
    if b3 > 0.0 {
        let u = -b2 / (2.0 * b3);
        if u > 0.0 && u < 1.0 && d(u) <= 0.0 {
            return false;
        }
    }
    true
}

/// Polynomial value and first two derivatives, ascending coefficients.
fn poly3(c: &[f64], x: f64) -> (f64, f64, f64) {
    let (mut p, mut d, mut dd) = (0.0, 0.0, 0.0);
    for &a in c.iter().rev() {
        dd = dd * x + 2.0 * d;
        d = d * x + p;
        p = p * x + a;
    }
    (p, d, dd)
}

/// A phase together with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDerivs {
    pub value: f64,
    pub first: f64,
    pub second: f64,
}

/// Pieces of the η phase used by the perturbation theory.
///
/// With `u = η s(η)` and `d = k D′/D`, the reduced η factor is
/// `Q_m · D^{−k} · cs(u)` and its logarithmic derivative is `g′/g + (−d + u′ t)`,
/// where `t = tanh u` (parity +) or `coth u` (parity −).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaPhaseParts {
    pub u: f64,
    pub du: f64,
    pub d2u: f64,
    pub d: f64,
    pub dd: f64,
    /// `tanh(u)` or `coth(u)`; infinite at η = 0 on the odd branch.
    pub t: f64,
}

/// A trial orbital bound to its label and setup, ready for evaluation.
#[derive(Debug, Clone)]
pub struct TrialOrbital {
    pub params: TrialParams,
    pub label: StateLabel,
    pub setup: PhysicalSetup,
    /// Exponent `s = 1+n+Λ−R_eff/p` of `(γ+ξ)` in the phase.
    log_power: f64,
    /// `c = α − pγ`.
    c: f64,
    k: f64,
    /// Reference value `|u(1)|` removed from the η factor to keep it O(1).
    eta_shift: f64,
    /// `φ₀(1)`, removed from the ξ factor.
    xi_shift: f64,
}

impl TrialOrbital {
    pub fn new(params: TrialParams, label: StateLabel, setup: PhysicalSetup) -> Result<Self> {
        setup.validate()?;
        params.validate(&label)?;
        let log_power = 1.0 + (label.n + label.lambda) as f64 - setup.r_eff() / params.p;
        let c = params.alpha - params.p * params.gamma;
        let k = (1.0 + 2.0 * label.m as f64 + label.lambda as f64) / 4.0;
        let mut orb = TrialOrbital { params, label, setup, log_power, c, k, eta_shift: 0.0, xi_shift: 0.0 };
        orb.xi_shift = orb.phase_unshifted(1.0);
        orb.eta_shift = orb.eta_argument(1.0).0.abs();
        Ok(orb)
    }

    fn phase_unshifted(&self, xi: f64) -> f64 {
        let g = self.params.gamma;
        self.log_power * (g + xi).ln() + self.params.p * xi + self.c * xi / (g + xi)
    }

    /// `φ₀(ξ) − φ₀(1)`, evaluated without cancellation.
    pub fn shifted_phase(&self, xi: f64) -> f64 {
        let g = self.params.gamma;
        let x = xi - 1.0;
        self.log_power * (x / (g + 1.0)).ln_1p()
            + self.params.p * x
            + self.c * g * x / ((g + xi) * (g + 1.0))
    }

    /// φ₀ and its first two derivatives at ξ.
    pub fn phase_xi(&self, xi: f64) -> PhaseDerivs {
        let g = self.params.gamma;
        let q = 1.0 / (g + xi);
        let cg = self.c * g;
        PhaseDerivs {
            value: self.phase_unshifted(xi),
            first: self.log_power * q + self.params.p + cg * q * q,
            second: -self.log_power * q * q - 2.0 * cg * q * q * q,
        }
    }

    /// `e^{−(φ₀(ξ)−φ₀(1))}` and its derivative: the ξ factor without the polynomial.
    pub fn xi_exponential(&self, xi: f64) -> (f64, f64) {
        let e = (-self.shifted_phase(xi)).exp();
        (e, -self.phase_xi(xi).first * e)
    }

    /// `P_n(ξ)` with its first two derivatives.
    pub fn xi_polynomial(&self, xi: f64) -> (f64, f64, f64) {
        match self.label.n {
            0 => (1.0, 0.0, 0.0),
            1 => (xi - self.params.xi0.unwrap_or(f64::NAN), 1.0, 0.0),
            _ => poly3(&self.params.p_coeffs, xi),
        }
    }

    /// `Q_m(η²)` with its first two η-derivatives.
    pub fn eta_polynomial(&self, eta: f64) -> (f64, f64, f64) {
        if self.label.m == 0 {
            return (1.0, 0.0, 0.0);
        }
        let (q, dq, ddq) = poly3(&self.params.q_coeffs, eta * eta);
        (q, 2.0 * eta * dq, 2.0 * dq + 4.0 * eta * eta * ddq)
    }

    /// `(u, u′, u″)` for `u = η s(η)`.
    fn eta_argument(&self, eta: f64) -> (f64, f64, f64) {
        let pr = &self.params;
        let e2 = eta * eta;
        let den = 1.0 + pr.b2 * e2 + pr.b3 * e2 * e2;
        let dden = 2.0 * pr.b2 * eta + 4.0 * pr.b3 * e2 * eta;
        let ddden = 2.0 * pr.b2 + 12.0 * pr.b3 * e2;
        let num = pr.a1 + pr.p * pr.a2 * e2 + pr.p * pr.b3 * e2 * e2;
        let dnum = 2.0 * pr.p * pr.a2 * eta + 4.0 * pr.p * pr.b3 * e2 * eta;
        let ddnum = 2.0 * pr.p * pr.a2 + 12.0 * pr.p * pr.b3 * e2;
        let s = num / den;
        let ds = (dnum * den - num * dden) / (den * den);
        let dds = (ddnum * den - num * ddden) / (den * den) - 2.0 * dden * ds / den;
        (eta * s, s + eta * ds, 2.0 * ds + eta * dds)
    }

    /// Components of the η phase; see [`EtaPhaseParts`].
    pub fn eta_phase_parts(&self, eta: f64) -> EtaPhaseParts {
        let pr = &self.params;
        let e2 = eta * eta;
        let den = 1.0 + pr.b2 * e2 + pr.b3 * e2 * e2;
        let dden = 2.0 * pr.b2 * eta + 4.0 * pr.b3 * e2 * eta;
        let ddden = 2.0 * pr.b2 + 12.0 * pr.b3 * e2;
        let (u, du, d2u) = self.eta_argument(eta);
        let t = match self.label.parity {
            Parity::Plus => u.tanh(),
            Parity::Minus => 1.0 / u.tanh(),
        };
        EtaPhaseParts {
            u,
            du,
            d2u,
            d: self.k * dden / den,
            dd: self.k * (ddden * den - dden * dden) / (den * den),
            t,
        }
    }

    /// `cs(u) e^{−shift}` and `cs′(u) e^{−shift}`.
    fn scaled_cs(&self, u: f64) -> (f64, f64) {
        let a = (u - self.eta_shift).exp();
        let b = (-u - self.eta_shift).exp();
        match self.label.parity {
            Parity::Plus => (0.5 * (a + b), 0.5 * (a - b)),
            Parity::Minus => (0.5 * (a - b), 0.5 * (a + b)),
        }
    }
}

impl SeparableOrbital for TrialOrbital {
    fn lambda(&self) -> u32 {
        self.label.lambda
    }

    fn xi_factor(&self, xi: f64) -> (f64, f64) {
        let e = (-self.shifted_phase(xi)).exp();
        let (pn, dpn, _) = self.xi_polynomial(xi);
        let dphi = self.phase_xi(xi).first;
        (pn * e, (dpn - pn * dphi) * e)
    }

    fn eta_factor(&self, eta: f64) -> (f64, f64) {
        let pr = &self.params;
        let e2 = eta * eta;
        let den = 1.0 + pr.b2 * e2 + pr.b3 * e2 * e2;
        let dden = 2.0 * pr.b2 * eta + 4.0 * pr.b3 * e2 * eta;
        let (u, du, _) = self.eta_argument(eta);
        let (cs, dcs) = self.scaled_cs(u);
        let pw = den.powf(-self.k);
        let (q, dq, _) = self.eta_polynomial(eta);
        let core = pw * cs;
        let dcore = pw * (dcs * du - self.k * dden / den * cs);
        (q * core, dq * core + q * dcore)
    }

    fn log_scale(&self) -> f64 {
        self.eta_shift - self.xi_shift
    }
}

/// The ξ factor including `(ξ²−1)^{Λ/2}`; underflows gracefully to 0.
pub fn eval_x(params: &TrialParams, label: &StateLabel, setup: &PhysicalSetup, xi: f64) -> Result<f64> {
    if !(xi >= 1.0) {
        return Err(Error::ParameterDomain(format!("xi = {xi} must be at least 1")));
    }
    let orb = TrialOrbital::new(params.clone(), *label, *setup)?;
    let (pn, _, _) = orb.xi_polynomial(xi);
    let pre = ((xi - 1.0) * (xi + 1.0)).powf(0.5 * label.lambda as f64);
    Ok(pre * pn * (-orb.phase_unshifted(xi)).exp())
}

/// The η factor including `(1−η²)^{Λ/2}`.
pub fn eval_y(params: &TrialParams, label: &StateLabel, eta: f64) -> Result<f64> {
    if !(eta.abs() <= 1.0) {
        return Err(Error::ParameterDomain(format!("eta = {eta} must lie in [-1, 1]")));
    }
    // the η factor does not depend on R; any valid setup will do
    let orb = TrialOrbital::new(params.clone(), *label, PhysicalSetup::h2plus(1.0))?;
    let pr = &orb.params;
    let e2 = eta * eta;
    let den = 1.0 + pr.b2 * e2 + pr.b3 * e2 * e2;
    let (u, _, _) = orb.eta_argument(eta);
    let cs = match label.parity {
        Parity::Plus => u.cosh(),
        Parity::Minus => u.sinh(),
    };
    let pre = ((1.0 - eta) * (1.0 + eta)).powf(0.5 * label.lambda as f64);
    Ok(pre * orb.eta_polynomial(eta).0 * den.powf(-orb.k) * cs)
}

/// The full orbital with azimuthal factor `e^{+iΛφ}`.
pub fn eval_psi(
    params: &TrialParams,
    label: &StateLabel,
    setup: &PhysicalSetup,
    xi: f64,
    eta: f64,
    phi: f64,
) -> Result<Complex64> {
    let x = eval_x(params, label, setup, xi)?;
    let y = eval_y(params, label, eta)?;
    let lam = label.lambda as f64;
    if label.lambda == 0 {
        return Ok(Complex64::new(x * y, 0.0));
    }
    Ok(Complex64::from_polar(x * y, lam * phi))
}

/// φ₀ and derivatives of the ansatz, excluding the prefactors with zeros.
pub fn phase_of_trial_xi(params: &TrialParams, label: &StateLabel, setup: &PhysicalSetup, xi: f64) -> Result<PhaseDerivs> {
    Ok(TrialOrbital::new(params.clone(), *label, *setup)?.phase_xi(xi))
}

fn series_p(e: f64, setup: &PhysicalSetup) -> Result<f64> {
    setup.validate()?;
    p_from_energy(e, setup)
}

/// Large-ξ phase series: `pξ − κ ln ξ + [(A + κ(R/p+Λ))/p − p]/(2ξ)`, κ = R/p − Λ − 1.
pub fn wkb_phase_xi_large(e: f64, a: f64, label: &StateLabel, setup: &PhysicalSetup, xi: f64) -> Result<f64> {
    let p = series_p(e, setup)?;
    if !(xi > 0.0) {
        return Err(Error::ParameterDomain("xi must be positive".into()));
    }
    let rp = setup.r_eff() / p;
    let lam = label.lambda as f64;
    let kappa = rp - lam - 1.0;
    Ok(p * xi - kappa * xi.ln() + ((a + kappa * (rp + lam)) / p - p) / (2.0 * xi))
}

/// Small-ξ phase series: `−(A/2)ξ² − (R/3)ξ³ + (p² + A² − A(2Λ+3))ξ⁴/12`.
pub fn pt_phase_xi_small(e: f64, a: f64, label: &StateLabel, setup: &PhysicalSetup, xi: f64) -> Result<f64> {
    let p = series_p(e, setup)?;
    let lam = label.lambda as f64;
    let x2 = xi * xi;
    Ok(-0.5 * a * x2 - setup.r_eff() / 3.0 * x2 * xi + (p * p + a * a - a * (2.0 * lam + 3.0)) / 12.0 * x2 * x2)
}

/// Large-η phase series: `−pη + (Λ+1) ln η − ((A − Λ(Λ+1))/p − p)/(2η)`.
pub fn wkb_phase_eta_large(e: f64, a: f64, label: &StateLabel, setup: &PhysicalSetup, eta: f64) -> Result<f64> {
    let p = series_p(e, setup)?;
    let lam = label.lambda as f64;
    Ok(-p * eta + (lam + 1.0) * eta.ln() - ((a - lam * (lam + 1.0)) / p - p) / (2.0 * eta))
}

/// Small-η phase series: `−(A/2)η² + (p² + A² − A(2Λ+3))η⁴/12`.
pub fn pt_phase_eta_small(e: f64, a: f64, label: &StateLabel, setup: &PhysicalSetup, eta: f64) -> Result<f64> {
    let p = series_p(e, setup)?;
    let lam = label.lambda as f64;
    let e2 = eta * eta;
    Ok(-0.5 * a * e2 + (p * p + a * a - a * (2.0 * lam + 3.0)) / 12.0 * e2 * e2)
}

/// `2 e^{−α₂Rξ} cosh/sinh(α₂Rη)`, i.e. `e^{−2α₂r₁} ± e^{−2α₂r₂}`.
pub fn eval_hund_mulliken(alpha2: f64, setup: &PhysicalSetup, parity: Parity, xi: f64, eta: f64) -> f64 {
    let k = alpha2 * setup.r;
    let cs = match parity {
        Parity::Plus => (k * eta).cosh(),
        Parity::Minus => (k * eta).sinh(),
    };
    2.0 * (-k * xi).exp() * cs
}

/// `2 e^{−(α₃+α₄)Rξ} cosh/sinh((α₃−α₄)Rη)`.
pub fn eval_guillemin_zener(alpha3: f64, alpha4: f64, setup: &PhysicalSetup, parity: Parity, xi: f64, eta: f64) -> f64 {
    let r = setup.r;
    let u = (alpha3 - alpha4) * r * eta;
    let cs = match parity {
        Parity::Plus => u.cosh(),
        Parity::Minus => u.sinh(),
    };
    2.0 * (-(alpha3 + alpha4) * r * xi).exp() * cs
}

/// Separable form of the Hund-Mulliken orbital, usable with the quadrature module.
#[derive(Debug, Clone, Copy)]
pub struct HundMulliken {
    pub alpha2: f64,
    pub setup: PhysicalSetup,
    pub parity: Parity,
}

impl SeparableOrbital for HundMulliken {
    fn lambda(&self) -> u32 {
        0
    }
    fn xi_factor(&self, xi: f64) -> (f64, f64) {
        let k = self.alpha2 * self.setup.r;
        let e = (-k * (xi - 1.0)).exp();
        (e, -k * e)
    }
    fn eta_factor(&self, eta: f64) -> (f64, f64) {
        let k = self.alpha2 * self.setup.r;
        let (a, b) = ((k * (eta - 1.0)).exp(), (-k * (eta + 1.0)).exp());
        match self.parity {
            Parity::Plus => (a + b, k * (a - b)),
            Parity::Minus => (a - b, k * (a + b)),
        }
    }
    fn log_scale(&self) -> f64 {
        // 2 e^{-k ξ} cosh(kη) = e^{-k(ξ-1)} · (e^{k(η-1)} + e^{-k(η+1)})
        0.0
    }
}
