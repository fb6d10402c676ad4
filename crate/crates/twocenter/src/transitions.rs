//! Radiative transition strengths between separable states.
//!
//! All matrix elements reduce to sums of products of one-dimensional moments:
//! the φ integral is done analytically and picks the single spherical
//! component `q = Λ_f − Λ_i` of each multipole operator. With the volume
//! element `a³(ξ²−η²)`, midpoint coordinates `z = aξη` and
//! `ρ = a√((ξ²−1)(1−η²))`, the operators used are
//!
//! | kind | operator |
//! |------|----------|
//! | E1   | `r C⁽¹⁾_q`: `z`, `ρ e^{iφ}/√2` |
//! | E2   | `r² C⁽²⁾_q`: `z² − ρ²/2`, `√(3/2) zρ e^{iφ}`, `√(3/8) ρ² e^{2iφ}` |
//! | B1   | `L_± = e^{±iφ}(±∂_θ + i cot θ ∂_φ)` with `∂_θ = ρ (η∂_ξ − ξ∂_η) / (a(ξ²−η²))` |
//!
//! Strengths are summed over the components reached from one member of the
//! final doublet; the degeneracy factor `G` accounts for the other.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constants::{BOHR_MAGNETON, FINE_STRUCTURE};
use crate::error::{Error, Result};
use crate::model::{PhysicalSetup, StateLabel};
use crate::nonlinearization::{analyze, CorrectedOrbital, PtOptions};
use crate::quadrature::{norm_squared, rule_sum, RuleSet, SeparableOrbital, Tabulated, DEFAULT_NODES};
use crate::trialfn::TrialOrbital;
use crate::variational::OptimizationResult;

/// Relative change of a matrix element under node doubling that is tolerated.
const ELEMENT_PLATEAU_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransitionKind {
    E1,
    B1,
    E2,
}

impl std::fmt::Display for TransitionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TransitionKind::E1 => "E1",
            TransitionKind::B1 => "B1",
            TransitionKind::E2 => "E2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionRecord {
    pub kind: TransitionKind,
    pub initial: StateLabel,
    #[serde(rename = "final")]
    pub final_state: StateLabel,
    #[serde(rename = "R")]
    pub r: f64,
    /// `E_f − E_i` in Ry.
    pub delta_e: f64,
    /// Squared matrix element in atomic units (bohr², bohr⁴, or ħ² for B1).
    pub s: f64,
    pub g: u32,
    pub f: f64,
    pub forbidden: bool,
}

/// A state entering a transition: its label, energy and wavefunction.
#[derive(Clone)]
pub struct TransitionState {
    pub label: StateLabel,
    /// Total energy in Ry.
    pub energy: f64,
    pub orbital: Arc<dyn SeparableOrbital>,
    /// Decay parameter used to size the quadrature.
    pub p: f64,
    pub corrected: bool,
}

impl std::fmt::Debug for TransitionState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransitionState")
            .field("label", &self.label)
            .field("energy", &self.energy)
            .field("p", &self.p)
            .field("corrected", &self.corrected)
            .finish()
    }
}

impl TransitionState {
    /// The optimized trial orbital as is.
    pub fn plain(res: &OptimizationResult) -> Result<Self> {
        let orb = TrialOrbital::new(res.params.clone(), res.label, res.setup)?;
        Ok(TransitionState { label: res.label, energy: res.energy.e_total, orbital: Arc::new(orb), p: res.params.p, corrected: false })
    }

    /// The trial orbital with its first-order phase corrections; node states,
    /// whose ξ correction is singular, fall back to the plain orbital.
    pub fn corrected(res: &OptimizationResult) -> Result<Self> {
        TransitionState::corrected_with(res, &PtOptions::default())
    }

    /// [`TransitionState::corrected`] with explicit perturbation-theory settings.
    pub fn corrected_with(res: &OptimizationResult, opts: &PtOptions) -> Result<Self> {
        if res.label.n > 0 {
            return TransitionState::plain(res);
        }
        let opts = PtOptions { tabulate: true, ..opts.clone() };
        let analysis = analyze(&res.params, &res.label, &res.setup, &opts)?;
        let orb = CorrectedOrbital::from_analysis(&analysis)?;
        Ok(TransitionState { label: res.label, energy: res.energy.e_total, orbital: Arc::new(orb), p: res.params.p, corrected: true })
    }

    /// Any separable orbital with a known energy.
    pub fn from_orbital(label: StateLabel, energy: f64, p: f64, orbital: Arc<dyn SeparableOrbital>) -> Self {
        TransitionState { label, energy, orbital, p, corrected: false }
    }
}

/// Orbital degeneracy factor of the final state.
pub fn degeneracy(final_state: &StateLabel) -> u32 {
    if final_state.lambda > 0 {
        2
    } else {
        1
    }
}

/// Whether the multipole connects the two states.
pub fn selection_allowed(kind: TransitionKind, initial: &StateLabel, final_state: &StateLabel) -> bool {
    let dl = (initial.lambda as i64 - final_state.lambda as i64).abs();
    let same_inversion = initial.inversion_parity() == final_state.inversion_parity();
    match kind {
        TransitionKind::E1 => dl <= 1 && !same_inversion,
        TransitionKind::E2 => dl <= 2 && same_inversion,
        TransitionKind::B1 => dl == 1 && same_inversion,
    }
}

/// Products of the two states' full channel factors at the rule nodes.
struct PairTables {
    xi: Vec<f64>,
    eta: Vec<f64>,
    lambda_i: u32,
    lambda_f: u32,
    ti: Tabulated,
    tf: Tabulated,
}

impl PairTables {
    fn new(i: &dyn SeparableOrbital, f: &dyn SeparableOrbital, rules: &RuleSet) -> Self {
        let ti = Tabulated::new(i, rules);
        let tf = Tabulated::new(f, rules);
        let half = 0.5 * (i.lambda() + f.lambda()) as f64;
        let xi = rules
            .xi
            .nodes
            .iter()
            .enumerate()
            .map(|(k, &x)| ((x - 1.0) * (x + 1.0)).powf(half) * ti.u[k] * tf.u[k])
            .collect();
        let eta = rules
            .eta
            .nodes
            .iter()
            .enumerate()
            .map(|(k, &e)| ((1.0 - e) * (1.0 + e)).powf(half) * ti.v[k] * tf.v[k])
            .collect();
        PairTables { xi, eta, lambda_i: i.lambda(), lambda_f: f.lambda(), ti, tf }
    }

    fn xi_moment(&self, rules: &RuleSet, g: impl Fn(f64) -> f64) -> f64 {
        rule_sum(&rules.xi, rules.precision, |k| g(rules.xi.nodes[k]) * self.xi[k])
    }

    fn eta_moment(&self, rules: &RuleSet, g: impl Fn(f64) -> f64) -> f64 {
        rule_sum(&rules.eta, rules.precision, |k| g(rules.eta.nodes[k]) * self.eta[k])
    }

    /// `2π ∫∫ a³(ξ²−η²) Σ c_j gξ_j(ξ) gη_j(η) X_i X_f Y_i Y_f`, unnormalized.
    fn element(&self, rules: &RuleSet, a: f64, terms: &[(f64, fn(f64) -> f64, fn(f64) -> f64)]) -> f64 {
        let mut total = 0.0;
        for &(c, gx, ge) in terms {
            let x2 = self.xi_moment(rules, |x| x * x * gx(x));
            let x0 = self.xi_moment(rules, gx);
            let e2 = self.eta_moment(rules, |e| e * e * ge(e));
            let e0 = self.eta_moment(rules, ge);
            total += c * (x2 * e0 - x0 * e2);
        }
        2.0 * PI * a * a * a * total * (self.ti.log_scale + self.tf.log_scale).exp()
    }
}

fn normalized(value: f64, i: &dyn SeparableOrbital, f: &dyn SeparableOrbital, setup: &PhysicalSetup, rules: &RuleSet) -> Result<f64> {
    Ok(value / (norm_squared(i, setup, rules)? * norm_squared(f, setup, rules)?).sqrt())
}

fn sqrt_xi(x: f64) -> f64 {
    ((x - 1.0) * (x + 1.0)).sqrt()
}

fn sqrt_eta(e: f64) -> f64 {
    ((1.0 - e) * (1.0 + e)).sqrt()
}

fn dipole_element(i: &dyn SeparableOrbital, f: &dyn SeparableOrbital, setup: &PhysicalSetup, rules: &RuleSet) -> Result<f64> {
    let a = setup.half_r();
    let t = PairTables::new(i, f, rules);
    let raw = match (t.lambda_i as i64 - t.lambda_f as i64).abs() {
        0 => a * t.element(rules, a, &[(1.0, |x| x, |e| e)]),
        1 => a * t.element(rules, a, &[(1.0, sqrt_xi, sqrt_eta)]) / 2f64.sqrt(),
        _ => 0.0,
    };
    normalized(raw, i, f, setup, rules)
}

fn quadrupole_element(i: &dyn SeparableOrbital, f: &dyn SeparableOrbital, setup: &PhysicalSetup, rules: &RuleSet) -> Result<f64> {
    let a = setup.half_r();
    let t = PairTables::new(i, f, rules);
    let a2 = a * a;
    let raw = match (t.lambda_i as i64 - t.lambda_f as i64).abs() {
        // z² − ρ²/2 = a²[ξ²η² − (ξ²−1)(1−η²)/2]
        0 => {
            a2 * t.element(
                rules,
                a,
                &[(1.0, |x| x * x, |e| e * e), (-0.5, |x| (x - 1.0) * (x + 1.0), |e| (1.0 - e) * (1.0 + e))],
            )
        }
        1 => a2 * 1.5f64.sqrt() * t.element(rules, a, &[(1.0, |x| x * sqrt_xi(x), |e| e * sqrt_eta(e))]),
        2 => a2 * 0.375f64.sqrt() * t.element(rules, a, &[(1.0, |x| (x - 1.0) * (x + 1.0), |e| (1.0 - e) * (1.0 + e))]),
        _ => 0.0,
    };
    normalized(raw, i, f, setup, rules)
}

/// `⟨b|L₊|a⟩` for `Λ_b = Λ_a + 1`, normalized.
fn raise_element(a_orb: &dyn SeparableOrbital, b_orb: &dyn SeparableOrbital, setup: &PhysicalSetup, rules: &RuleSet) -> Result<f64> {
    let ta = Tabulated::new(a_orb, rules);
    let tb = Tabulated::new(b_orb, rules);
    let k = a_orb.lambda() as i32 + 1;
    let pr = rules.precision;
    let (xs, es) = (&rules.xi.nodes, &rules.eta.nodes);
    let qx = |n: usize| ((xs[n] - 1.0) * (xs[n] + 1.0)).powi(k);
    let qe = |n: usize| ((1.0 - es[n]) * (1.0 + es[n])).powi(k);
    let x_du = rule_sum(&rules.xi, pr, |n| qx(n) * tb.u[n] * ta.du[n]);
    let x_u = rule_sum(&rules.xi, pr, |n| qx(n) * xs[n] * tb.u[n] * ta.u[n]);
    let e_v = rule_sum(&rules.eta, pr, |n| qe(n) * es[n] * tb.v[n] * ta.v[n]);
    let e_dv = rule_sum(&rules.eta, pr, |n| qe(n) * tb.v[n] * ta.dv[n]);
    let a = setup.half_r();
    let raw = 2.0 * PI * a * a * a * (x_du * e_v - x_u * e_dv) * (ta.log_scale + tb.log_scale).exp();
    normalized(raw, a_orb, b_orb, setup, rules)
}

/// `⟨a|L₋|b⟩` for `Λ_b = Λ_a + 1`, normalized; the adjoint route to [`raise_element`].
pub fn lower_element(a_orb: &dyn SeparableOrbital, b_orb: &dyn SeparableOrbital, setup: &PhysicalSetup, rules: &RuleSet) -> Result<f64> {
    let ta = Tabulated::new(a_orb, rules);
    let tb = Tabulated::new(b_orb, rules);
    let lam = a_orb.lambda() as i32;
    let k = lam + 1;
    let pr = rules.precision;
    let (xs, es) = (&rules.xi.nodes, &rules.eta.nodes);
    let qx = |n: usize, j: i32| ((xs[n] - 1.0) * (xs[n] + 1.0)).powi(j);
    let qe = |n: usize, j: i32| ((1.0 - es[n]) * (1.0 + es[n])).powi(j);
    let x_du = rule_sum(&rules.xi, pr, |n| qx(n, k) * ta.u[n] * tb.du[n]);
    let x_u = rule_sum(&rules.xi, pr, |n| qx(n, k) * xs[n] * ta.u[n] * tb.u[n]);
    let e_v = rule_sum(&rules.eta, pr, |n| qe(n, k) * es[n] * ta.v[n] * tb.v[n]);
    let e_dv = rule_sum(&rules.eta, pr, |n| qe(n, k) * ta.v[n] * tb.dv[n]);
    // the centrifugal part 2(Λ+1) ξη (ξ²−η²) (ξ²−1)^Λ (1−η²)^Λ
    let x3 = rule_sum(&rules.xi, pr, |n| qx(n, lam) * xs[n].powi(3) * ta.u[n] * tb.u[n]);
    let x1 = rule_sum(&rules.xi, pr, |n| qx(n, lam) * xs[n] * ta.u[n] * tb.u[n]);
    let e1 = rule_sum(&rules.eta, pr, |n| qe(n, lam) * es[n] * ta.v[n] * tb.v[n]);
    let e3 = rule_sum(&rules.eta, pr, |n| qe(n, lam) * es[n].powi(3) * ta.v[n] * tb.v[n]);
    let a = setup.half_r();
    let kin = x_du * e_v - x_u * e_dv;
    let cent = 2.0 * k as f64 * (x3 * e1 - x1 * e3);
    let raw = -2.0 * PI * a * a * a * (kin + cent) * (ta.log_scale + tb.log_scale).exp();
    normalized(raw, a_orb, b_orb, setup, rules)
}

fn magnetic_element(i: &dyn SeparableOrbital, f: &dyn SeparableOrbital, setup: &PhysicalSetup, rules: &RuleSet) -> Result<f64> {
    match f.lambda() as i64 - i.lambda() as i64 {
        1 => raise_element(i, f, setup, rules),
        -1 => raise_element(f, i, setup, rules),
        _ => Ok(0.0),
    }
}

fn rules_for_pair(i: &TransitionState, f: &TransitionState, n: usize) -> Result<RuleSet> {
    RuleSet::new(i.p.min(f.p), n)
}

/// Evaluates a matrix element at `n` and `2n` nodes and returns the finer value.
fn converged(kind: &str, n: usize, eval: impl Fn(&RuleSet) -> Result<f64>, i: &TransitionState, f: &TransitionState) -> Result<f64> {
    let coarse_rules = rules_for_pair(i, f, n)?;
    let coarse = eval(&coarse_rules)?;
    let fine = eval(&coarse_rules.refined()?)?;
    if (fine - coarse).abs() > ELEMENT_PLATEAU_TOL * fine.abs() && (fine - coarse).abs() > 1e-300 {
        return Err(Error::QuadratureFailure(format!("{kind} element not converged: {coarse} vs {fine}")));
    }
    Ok(fine)
}

/// `S⁽¹⁾ = Σ_q |⟨i| r C⁽¹⁾_q |f⟩|²` in bohr².
pub fn dipole_matrix_element(i: &TransitionState, f: &TransitionState, setup: &PhysicalSetup, n: usize) -> Result<f64> {
    if !selection_allowed(TransitionKind::E1, &i.label, &f.label) {
        return Ok(0.0);
    }
    let m = converged("dipole", n, |r| dipole_element(&*i.orbital, &*f.orbital, setup, r), i, f)?;
    Ok(m * m)
}

/// `Σ_q |⟨i| r² C⁽²⁾_q |f⟩|²` in bohr⁴.
pub fn quadrupole_matrix_element(i: &TransitionState, f: &TransitionState, setup: &PhysicalSetup, n: usize) -> Result<f64> {
    if !selection_allowed(TransitionKind::E2, &i.label, &f.label) {
        return Ok(0.0);
    }
    let m = converged("quadrupole", n, |r| quadrupole_element(&*i.orbital, &*f.orbital, setup, r), i, f)?;
    Ok(m * m)
}

/// `|⟨i|L|f⟩|² = |⟨L₊⟩|²/2` (units of ħ²).
pub fn magnetic_matrix_element(i: &TransitionState, f: &TransitionState, setup: &PhysicalSetup, n: usize) -> Result<f64> {
    if !selection_allowed(TransitionKind::B1, &i.label, &f.label) {
        return Ok(0.0);
    }
    let m = converged("magnetic", n, |r| magnetic_element(&*i.orbital, &*f.orbital, setup, r), i, f)?;
    Ok(0.5 * m * m)
}

fn ordered(e_i: f64, e_f: f64) -> Result<f64> {
    if e_f <= e_i {
        return Err(Error::Ordering { e_initial: e_i, e_final: e_f });
    }
    Ok(e_f - e_i)
}

/// `f = G ΔE S⁽¹⁾ / 3` with ΔE in Ry.
pub fn oscillator_strength_e1(e_i: f64, e_f: f64, s: f64, g: u32) -> Result<f64> {
    Ok(g as f64 * ordered(e_i, e_f)? * s / 3.0)
}

/// `f = G ΔE μ_B² |⟨L⟩|² / 3` with ΔE in Ry.
pub fn oscillator_strength_b1(e_i: f64, e_f: f64, s: f64, g: u32) -> Result<f64> {
    Ok(g as f64 * ordered(e_i, e_f)? * BOHR_MAGNETON * BOHR_MAGNETON * s / 3.0)
}

/// `f = α² G ΔE³ S⁽²⁾ / 240` with ΔE in Ry.
pub fn oscillator_strength_e2(e_i: f64, e_f: f64, s: f64, g: u32) -> Result<f64> {
    let de = ordered(e_i, e_f)?;
    Ok(FINE_STRUCTURE * FINE_STRUCTURE * g as f64 * de * de * de * s / 240.0)
}

/// Full record for one transition, with `n` quadrature nodes per channel (checked against `2n`).
pub fn transition(kind: TransitionKind, i: &TransitionState, f: &TransitionState, setup: &PhysicalSetup, n: usize) -> Result<TransitionRecord> {
    let g = degeneracy(&f.label);
    let delta_e = ordered(i.energy, f.energy)?;
    let allowed = selection_allowed(kind, &i.label, &f.label);
    let (s, fv) = if allowed {
        match kind {
            TransitionKind::E1 => {
                let s = dipole_matrix_element(i, f, setup, n)?;
                (s, oscillator_strength_e1(i.energy, f.energy, s, g)?)
            }
            TransitionKind::B1 => {
                let s = magnetic_matrix_element(i, f, setup, n)?;
                (s, oscillator_strength_b1(i.energy, f.energy, s, g)?)
            }
            TransitionKind::E2 => {
                let s = quadrupole_matrix_element(i, f, setup, n)?;
                (s, oscillator_strength_e2(i.energy, f.energy, s, g)?)
            }
        }
    } else {
        (0.0, 0.0)
    };
    Ok(TransitionRecord { kind, initial: i.label, final_state: f.label, r: setup.r, delta_e, s, g, f: fv, forbidden: !allowed })
}

/// [`transition`] with the default node count.
pub fn transition_default(kind: TransitionKind, i: &TransitionState, f: &TransitionState, setup: &PhysicalSetup) -> Result<TransitionRecord> {
    transition(kind, i, f, setup, DEFAULT_NODES)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Parity;
    use crate::united_atom::Hydrogenic;

    fn nuclear(n: u32, setup: &PhysicalSetup) -> Arc<dyn SeparableOrbital> {
        Arc::new(Hydrogenic::new(n, n - 1, n - 1, 1.0).unwrap().on_nucleus(setup).unwrap())
    }

    fn state(label: &str, energy: f64, orb: Arc<dyn SeparableOrbital>) -> TransitionState {
        TransitionState::from_orbital(label.parse().unwrap(), energy, 0.5, orb)
    }

    #[test]
    fn hydrogen_lyman_alpha_transverse_part() {
        // Hydrogen 1s and 2p(m=1) sitting on one nucleus: the midpoint origin
        // does not affect the transverse dipole.
        let setup = PhysicalSetup::h2plus(2.0);
        let s1 = state("1sσg", -1.0, nuclear(1, &setup));
        let p1 = state("2pπu", -0.25, nuclear(2, &setup));
        let rec = transition(TransitionKind::E1, &s1, &p1, &setup, 64).unwrap();
        let radial = 128.0 * 6f64.sqrt() / 243.0;
        assert!((rec.s - radial * radial / 3.0).abs() < 1e-12, "{}", rec.s);
        assert!((rec.f - 0.277465).abs() < 1e-6, "{}", rec.f);
        // the three m components together give the textbook 0.4162
        assert!((1.5 * rec.f - 0.4162).abs() < 1e-4);
    }

    #[test]
    fn hydrogen_quadrupole_to_d_two() {
        let setup = PhysicalSetup::h2plus(1.5);
        let s1 = state("1sσg", -1.0, nuclear(1, &setup));
        let d2 = state("3dδg", -1.0 / 9.0, nuclear(3, &setup));
        let s = quadrupole_matrix_element(&s1, &d2, &setup, 64).unwrap();
        let radial = 8.0 / (81.0 * 30f64.sqrt()) * 720.0 * 0.75f64.powi(7);
        assert!((s - radial * radial / 5.0).abs() < 1e-11 * s, "{s} vs {}", radial * radial / 5.0);
    }

    #[test]
    fn angular_momentum_about_displaced_centre() {
        // ⟨2p₊|L₊|1s⟩ about the midpoint is a·⟨2p₊|∂₊|1s⟩ = 32a/81 in magnitude.
        for &r in &[1.0, 2.0, 3.0] {
            let setup = PhysicalSetup::h2plus(r);
            let rules = RuleSet::new(0.5 * setup.half_r(), 64).unwrap();
            let (s1, p1) = (nuclear(1, &setup), nuclear(2, &setup));
            let up = raise_element(&*s1, &*p1, &setup, &rules).unwrap();
            let down = lower_element(&*s1, &*p1, &setup, &rules).unwrap();
            assert!((up.abs() - 32.0 * setup.half_r() / 81.0).abs() < 1e-12, "{up}");
            assert!((up - down).abs() < 1e-12, "{up} {down}");
        }
    }

    #[test]
    fn selection_rules() {
        let l = |s: &str| -> StateLabel { s.parse().unwrap() };
        let g = l("1sσg");
        assert!(selection_allowed(TransitionKind::E1, &g, &l("2pπu")));
        assert!(selection_allowed(TransitionKind::E1, &g, &l("3pσu")));
        assert!(!selection_allowed(TransitionKind::E1, &g, &l("3dδg")));
        assert!(!selection_allowed(TransitionKind::E1, &g, &l("3dπg")));
        assert!(selection_allowed(TransitionKind::B1, &g, &l("3dπg")));
        assert!(!selection_allowed(TransitionKind::B1, &g, &l("2sσg")));
        assert!(!selection_allowed(TransitionKind::B1, &g, &l("2pπu")));
        for f in ["3dπg", "3dδg", "2sσg"] {
            assert!(selection_allowed(TransitionKind::E2, &g, &l(f)));
        }
        assert!(!selection_allowed(TransitionKind::E2, &g, &l("2pσu")));
        assert!(!selection_allowed(TransitionKind::E2, &g, &StateLabel::new(0, 0, 3, Parity::Plus)));
        assert_eq!(degeneracy(&l("3dδg")), 2);
        assert_eq!(degeneracy(&l("2sσg")), 1);
    }

    #[test]
    fn forbidden_records_are_zero() {
        let setup = PhysicalSetup::h2plus(2.0);
        let s1 = state("1sσg", -1.0, nuclear(1, &setup));
        let d2 = state("3dδg", -0.2, nuclear(3, &setup));
        let rec = transition(TransitionKind::E1, &s1, &d2, &setup, 32).unwrap();
        assert!(rec.forbidden);
        assert_eq!((rec.s, rec.f), (0.0, 0.0));
    }

    #[test]
    fn strength_formulas() {
        assert_eq!(oscillator_strength_e1(-1.0, 0.5, 0.0, 2).unwrap(), 0.0);
        assert!((oscillator_strength_e1(-1.0, 0.5, 2.0, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(oscillator_strength_e1(0.5, -1.0, 1.0, 1), Err(Error::Ordering { .. })));
        assert!(matches!(oscillator_strength_e2(0.5, 0.5, 1.0, 1), Err(Error::Ordering { .. })));
        let b = oscillator_strength_b1(0.0, 3.0, 1.0, 2).unwrap();
        assert!((b - 2.0 * BOHR_MAGNETON * BOHR_MAGNETON).abs() < 1e-20);
        let e = oscillator_strength_e2(0.0, 2.0, 30.0, 1).unwrap();
        assert!((e - FINE_STRUCTURE * FINE_STRUCTURE).abs() < 1e-18);
    }

    #[test]
    fn symmetric_in_the_two_states_and_scale_free() {
        let setup = PhysicalSetup::h2plus(2.0);
        let a = nuclear(1, &setup);
        let b = nuclear(2, &setup);
        let rules = RuleSet::new(0.5, 64).unwrap();
        let ab = dipole_element(&*a, &*b, &setup, &rules).unwrap();
        let ba = dipole_element(&*b, &*a, &setup, &rules).unwrap();
        assert!((ab - ba).abs() <= 4.0 * f64::EPSILON * ab.abs());
        struct Scaled(Arc<dyn SeparableOrbital>, f64);
        impl SeparableOrbital for Scaled {
            fn lambda(&self) -> u32 {
                self.0.lambda()
            }
            fn xi_factor(&self, xi: f64) -> (f64, f64) {
                let (u, du) = self.0.xi_factor(xi);
                (u * self.1, du * self.1)
            }
            fn eta_factor(&self, eta: f64) -> (f64, f64) {
                self.0.eta_factor(eta)
            }
        }
        let scaled = Scaled(b.clone(), -37.5);
        let sc = dipole_element(&*a, &scaled, &setup, &rules).unwrap();
        assert!((sc.abs() - ab.abs()).abs() < 1e-14 * ab.abs());
    }
}
