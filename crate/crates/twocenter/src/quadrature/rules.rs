//! Fixed quadrature rules on ξ ∈ [1, ∞) and η ∈ [−1, 1].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::summation::Precision;

/// Minimum node count accepted by [`build_rules`].
pub const MIN_NODES: usize = 8;

/// Default node count; converged to about 1e-15 for every state in scope.
pub const DEFAULT_NODES: usize = 64;

/// Window of the double-exponential map parameter.
const T_MIN: f64 = -4.0;
const T_MAX: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Xi,
    Eta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub channel: Channel,
}

impl QuadratureRule {
    pub fn count(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let mut acc = crate::summation::Accumulator::new(crate::summation::Precision::Standard);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add_product(*w, f(*x));
        }
        acc.value()
    }
}

/// A matched pair of ξ and η rules.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleSet {
    pub xi: QuadratureRule,
    pub eta: QuadratureRule,
    pub p_scale: f64,
    pub n: usize,
    pub precision: Precision,
}

impl RuleSet {
    pub fn new(p_scale: f64, n: usize) -> Result<Self> {
        RuleSet::with_precision(p_scale, n, Precision::Standard)
    }

    pub fn with_precision(p_scale: f64, n: usize, precision: Precision) -> Result<Self> {
        let (xi, eta) = build_rules(p_scale, n)?;
        Ok(RuleSet { xi, eta, p_scale, n, precision })
    }

    /// The same rules with twice the node count, used for the plateau test.
    pub fn refined(&self) -> Result<Self> {
        RuleSet::with_precision(self.p_scale, 2 * self.n, self.precision)
    }
}

/// Builds the ξ and η rules for decay scale `p_scale` with `n` nodes each.
///
/// The ξ rule maps `ξ = 1 + L exp(t − e^{−t})`, `L = 1/(2 p_scale)`, and applies
/// the trapezoidal rule in `t`. Integrands that are smooth at ξ = 1 and decay
/// like `e^{−2pξ}` then converge double-exponentially. The η rule is
/// Gauss-Legendre.
pub fn build_rules(p_scale: f64, n: usize) -> Result<(QuadratureRule, QuadratureRule)> {
    if n < MIN_NODES {
        return Err(Error::TooFewNodes { requested: n, min: MIN_NODES });
    }
    if !(p_scale.is_finite() && p_scale > 0.0) {
        return Err(Error::ParameterDomain(format!("p_scale must be positive, got {p_scale}")));
    }
    Ok((xi_rule(p_scale, n), eta_rule(n)))
}

fn xi_rule(p_scale: f64, n: usize) -> QuadratureRule {
    let scale = 0.5 / p_scale;
    let h = (T_MAX - T_MIN) / (n - 1) as f64;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for k in 0..n {
        let t = T_MIN + h * k as f64;
        let e = (-t).exp();
        let x = scale * (t - e).exp();
        // trapezoid end weights are negligible at both ends of the window
        let w = h * x * (1.0 + e);
        nodes.push(1.0 + x);
        weights.push(w);
    }
    QuadratureRule { nodes, weights, channel: Channel::Xi }
}

fn eta_rule(n: usize) -> QuadratureRule {
    let (nodes, weights) = gauss_legendre(n);
    QuadratureRule { nodes, weights, channel: Channel::Eta }
}

/// Gauss-Legendre nodes (ascending) and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    (x.iter().map(|t| c + h * t).collect(), w.iter().map(|v| v * h).collect())
}
