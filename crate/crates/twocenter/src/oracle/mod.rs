//! Independent solver of the separated two-center problem.
//!
//! For a trial decay parameter `p` the ξ equation is an eigenproblem in `A`
//! alone, solved by shooting, and the η equation is a tridiagonal eigenproblem
//! in `A`. The bound state is the `p` at which the two separation constants
//! coincide. Their difference is strictly increasing in `p²` (its derivative
//! is `⟨ξ²⟩ − ⟨η²⟩ > 0`), so a bracketed root search converges unconditionally.

mod angular;
mod radial;

pub use angular::{angular_eigenvalue, angular_function, angular_solution, AngularFunction, AngularSolution};
pub use radial::{RadialEquation, RadialFunction};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::SeparableOrbital;
use crate::model::{energy_from_p, p_from_energy, PhysicalSetup, StateLabel};
use crate::roots::{brent, expand_bracket};

const P_TOL: f64 = 1e-15;

/// Converged solution of the separated problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub label: StateLabel,
    pub setup: PhysicalSetup,
    /// Total energy in Ry.
    pub e_total: f64,
    /// Separation constant.
    pub a: f64,
    pub p: f64,
    pub angular_basis_size: usize,
    /// Normalized Wronskian of the regular and decaying ξ solutions at the root.
    pub radial_mismatch: f64,
    /// Evaluations of the separation-constant difference during the root search.
    pub bracket_iterations: usize,
    /// Interior ξ nodes of the joined solution.
    pub radial_nodes: usize,
}

/// Normalized radial mismatch at the given total energy and separation constant,
/// with the node count of the joined solution. Sign changes in `E` bracket
/// eigenvalues.
pub fn radial_mismatch(e_total: f64, a: f64, setup: &PhysicalSetup, lambda: u32) -> Result<(f64, usize)> {
    setup.validate()?;
    let p = p_from_energy(e_total, setup)?;
    let eq = RadialEquation { p, r_eff: setup.r_eff(), lambda, a };
    eq.mismatch_at(eq.turning_point())
}

/// The `n`-th separation constant (0-based, by node count) of the ξ equation at `p`.
pub fn radial_eigenvalue(p: f64, setup: &PhysicalSetup, lambda: u32, n: u32, guess: f64) -> Result<f64> {
    let r_eff = setup.r_eff();
    let eq = |a: f64| RadialEquation { p, r_eff, lambda, a };
    let nodes = |a: f64| eq(a).count_nodes();
    let target = n as usize;
    let width = 1.0 + guess.abs();
    let (mut lo, mut hi) = (guess - width, guess + width);
    let mut grow = width;
    while nodes(lo)? > target {
        grow *= 2.0;
        lo -= grow;
        if grow > 1e8 {
            return Err(Error::NotConverged { what: "lower bracket of the radial eigenvalue".into(), iterations: 0 });
        }
    }
    grow = width;
    while nodes(hi)? <= target {
        grow *= 2.0;
        hi += grow;
        if grow > 1e8 {
            return Err(Error::NotConverged { what: "upper bracket of the radial eigenvalue".into(), iterations: 0 });
        }
    }
    // shrink by node counting until the bracket holds one eigenvalue tightly
    for _ in 0..60 {
        if hi - lo <= 1e-6 * (1.0 + lo.abs()) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if nodes(mid)? > target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let xm = eq(0.5 * (lo + hi)).turning_point();
    let f = |a: f64| eq(a).mismatch_at(xm).map(|m| m.0).unwrap_or(f64::NAN);
    Ok(brent(f, lo, hi, 1e-15 * (1.0 + lo.abs()), 200)?.x)
}

/// Rough `p` for a label without a variational estimate.
fn default_p(label: &StateLabel, setup: &PhysicalSetup) -> f64 {
    crate::variational::presets::crude_p(label, setup)
}

/// Solves for `label` at `setup`; `p_guess` (e.g. from a variational run) seeds the bracket.
pub fn solve_bispectral_from(label: &StateLabel, setup: &PhysicalSetup, p_guess: Option<f64>) -> Result<OracleResult> {
    setup.validate()?;
    if !setup.is_symmetric() {
        return Err(Error::Unsupported("the oracle treats equal charges only".into()));
    }
    let lam = label.lambda;
    let mut evals = 0usize;
    let mut g = |p: f64| -> f64 {
        evals += 1;
        let run = || -> Result<f64> {
            let a_ang = angular_eigenvalue(p, lam, label.m, label.parity)?;
            let a_rad = radial_eigenvalue(p, setup, lam, label.n, a_ang)?;
            Ok(a_rad - a_ang)
        };
        run().unwrap_or(f64::NAN)
    };
    let p0 = p_guess.unwrap_or_else(|| default_p(label, setup));
    let span = if p_guess.is_some() { 1e-4 } else { 0.05 };
    let (lo, hi) = expand_bracket(&mut g, p0 * (1.0 - span), p0 * (1.0 + span), 1e-6, 60)?;
    let root = brent(&mut g, lo, hi, P_TOL * p0, 200)?;
    let iterations = evals;
    let p = root.x;
    let ang = angular_solution(p, lam, label.m, label.parity)?;
    let eq = RadialEquation { p, r_eff: setup.r_eff(), lambda: lam, a: ang.a };
    let (mismatch, nodes) = eq.mismatch_at(eq.turning_point())?;
    if nodes != label.n as usize {
        return Err(Error::NotConverged { what: format!("oracle landed on a state with {nodes} radial nodes for {label}"), iterations });
    }
    Ok(OracleResult {
        label: *label,
        setup: *setup,
        e_total: energy_from_p(p, setup),
        a: ang.a,
        p,
        angular_basis_size: ang.basis_size,
        radial_mismatch: mismatch,
        bracket_iterations: iterations,
        radial_nodes: nodes,
    })
}

/// Solves for `label` at `setup` from a crude interpolated starting point.
pub fn solve_bispectral(label: &StateLabel, setup: &PhysicalSetup) -> Result<OracleResult> {
    solve_bispectral_from(label, setup, None)
}

/// The converged eigenfunction of an [`OracleResult`], usable wherever a trial
/// orbital is, e.g. as an exact reference for matrix elements.
#[derive(Debug, Clone)]
pub struct OracleOrbital {
    lambda: u32,
    radial: RadialFunction,
    angular: AngularFunction,
}

impl OracleOrbital {
    pub fn new(res: &OracleResult) -> Result<Self> {
        let lam = res.label.lambda;
        let angular = angular_function(res.p, lam, res.label.m, res.label.parity)?;
        let eq = RadialEquation { p: res.p, r_eff: res.setup.r_eff(), lambda: lam, a: angular.a };
        let radial = eq.eigenfunction()?;
        Ok(OracleOrbital { lambda: lam, radial, angular })
    }

    /// Relative derivative jump where the radial branches were joined.
    pub fn radial_kink(&self) -> f64 {
        self.radial.kink()
    }
}

impl SeparableOrbital for OracleOrbital {
    fn lambda(&self) -> u32 {
        self.lambda
    }

    fn xi_factor(&self, xi: f64) -> (f64, f64) {
        self.radial.eval(xi)
    }

    fn eta_factor(&self, eta: f64) -> (f64, f64) {
        self.angular.eval(eta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Parity;

    const GROUND_R2: f64 = -1.205_268_428_989_8;

    #[test]
    fn ground_state_energy_at_equilibrium() {
        let label = StateLabel::new(0, 0, 0, Parity::Plus);
        let res = solve_bispectral(&label, &PhysicalSetup::h2plus(2.0)).unwrap();
        assert!((res.e_total - GROUND_R2).abs() < 1e-11, "{}", res.e_total);
        assert_eq!(res.radial_nodes, 0);
        assert!((p_from_energy(res.e_total, &res.setup).unwrap() - res.p).abs() < 1e-13);
    }

    #[test]
    fn node_count_selects_the_excited_sigma_state() {
        let setup = PhysicalSetup::h2plus(2.0);
        let ground = solve_bispectral(&StateLabel::new(0, 0, 0, Parity::Plus), &setup).unwrap();
        let excited = solve_bispectral(&StateLabel::new(1, 0, 0, Parity::Plus), &setup).unwrap();
        assert_eq!(excited.radial_nodes, 1);
        assert!(excited.e_total > ground.e_total + 1.0);
    }

    #[test]
    fn node_close_to_the_axis_is_counted() {
        // at large R the 2sσg node moves towards ξ = 1 and into the series start interval
        let res = solve_bispectral(&StateLabel::new(1, 0, 0, Parity::Plus), &PhysicalSetup::h2plus(10.0)).unwrap();
        assert_eq!(res.radial_nodes, 1);
        assert!((res.e_total + 0.2094).abs() < 1e-3, "{}", res.e_total);
    }

    #[test]
    fn mismatch_changes_sign_across_the_eigenvalue() {
        let label = StateLabel::new(0, 0, 0, Parity::Minus);
        let setup = PhysicalSetup::h2plus(2.0);
        let res = solve_bispectral(&label, &setup).unwrap();
        let below = radial_mismatch(res.e_total - 1e-3, res.a, &setup, 0).unwrap().0;
        let above = radial_mismatch(res.e_total + 1e-3, res.a, &setup, 0).unwrap().0;
        assert!(below * above < 0.0, "{below} {above}");
    }

    #[test]
    fn eigenfunction_joins_smoothly() {
        let res = solve_bispectral(&StateLabel::new(0, 0, 1, Parity::Plus), &PhysicalSetup::h2plus(4.0)).unwrap();
        let orb = OracleOrbital::new(&res).unwrap();
        assert!(orb.radial_kink() < 1e-8, "{}", orb.radial_kink());
        assert_eq!(orb.lambda(), 1);
    }

    #[test]
    fn unequal_charges_are_unsupported() {
        let setup = PhysicalSetup { z1: 1.0, z2: 2.0, ..PhysicalSetup::h2plus(2.0) };
        assert!(matches!(solve_bispectral(&StateLabel::new(0, 0, 0, Parity::Plus), &setup), Err(Error::Unsupported(_))));
    }
}
