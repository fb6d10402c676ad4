//! Starting points for the optimizer.

use crate::model::{p_from_e_prime, Parity, PhysicalSetup, StateLabel};
use crate::trialfn::TrialParams;

/// Published parameter sets `(R, [α, γ, a₁, a₂, b₂, b₃, p])` for the σ ground
/// states of both parities.
pub const GROUND_PLUS_SETS: [(f64, [f64; 7]); 3] = [
    (1.997193, [1.48407, 1.0299, 0.9164, 0.05384, 0.06, 0.00011, 1.483403]),
    (6.0, [3.32381, 0.96357, 2.597355, 0.53443, 0.588072, 0.00552, 3.49506]),
    (20.0, [10.0453, 0.95774, 9.8775, 6.8392, 6.9016, 1.352, 10.4882]),
];

pub const GROUND_MINUS_SETS: [(f64, [f64; 7]); 3] = [
    (6.0, [3.24715, 0.95706, 2.84566, 0.22098, 0.23611, -0.0027, 3.43971]),
    (12.54525, [6.5275, 0.97045, 6.075, 1.46757, 1.5349, 0.1675, 6.75434]),
    (20.0, [10.7397, 1.03027, 9.8077, 2.3784, 2.43705, 0.367, 10.4882]),
];

/// Principal quantum number of the hydrogen level reached as R → ∞.
fn separated_n(label: &StateLabel) -> f64 {
    match (label.n, label.lambda, label.parity) {
        (0, 0, _) => 1.0,
        (0, 1, _) => 2.0,
        (0, 2, Parity::Plus) => 3.0,
        (0, 2, Parity::Minus) => 4.0,
        (1, 0, _) => 2.0,
        _ => (label.n + label.m + label.lambda + 1) as f64,
    }
}

fn united_n(label: &StateLabel) -> f64 {
    label
        .correspondence()
        .map(|c| c.hydrogenic.0 as f64)
        .unwrap_or((label.n + label.m + label.lambda + 1) as f64 + label.parity.offset() as f64)
}

/// Rough decay parameter from interpolating the united-atom and separated-atom limits.
pub fn crude_p(label: &StateLabel, setup: &PhysicalSetup) -> f64 {
    let nu = united_n(label);
    let ns = separated_n(label);
    let zz = 0.5 * (setup.z1 + setup.z2);
    let depth = (4.0 * zz * zz / (nu * nu)).min(zz * zz / (ns * ns) + 2.0 * setup.z1 * setup.z2 / setup.r);
    p_from_e_prime(-depth, setup.r).unwrap_or(0.5 * setup.r)
}

/// Seed parameters for `label` at `setup`.
///
/// σ ground states start from the nearest published set, with the length-like
/// parameters rescaled by the change of the crude decay parameter. All other
/// states start from a Hund-Mulliken-like shape: `α = a₁ = p`, `γ = 1`, and the
/// η-shape coefficients at zero. Node states receive a node one third of the
/// way to the decay length.
pub fn seed(label: &StateLabel, setup: &PhysicalSetup) -> TrialParams {
    let p = crude_p(label, setup);
    let sets: Option<&[(f64, [f64; 7])]> = match (label.n, label.m, label.lambda, label.parity) {
        (0, 0, 0, Parity::Plus) => Some(&GROUND_PLUS_SETS),
        (0, 0, 0, Parity::Minus) => Some(&GROUND_MINUS_SETS),
        _ => None,
    };
    let mut params = match sets {
        Some(sets) => {
            let (r0, v) = sets
                .iter()
                .min_by(|a, b| (a.0.ln() - setup.r.ln()).abs().total_cmp(&(b.0.ln() - setup.r.ln()).abs()))
                .copied()
                .unwrap_or(sets[0]);
            let p0 = crude_p(label, &PhysicalSetup { r: r0, ..*setup });
            let k = p / p0;
            let scaled = [v[0] * k, v[1], v[2] * k, v[3], v[4], v[5], v[6] * k];
            TrialParams::reduced(0.0, 0.0, 0.0, 1.0).with_vector(&scaled)
        }
        None => TrialParams::reduced(p, 1.0, p, p),
    };
    if label.n == 1 {
        params.xi0 = Some(1.0 + 1.0 / params.p.max(0.3));
    }
    if label.n >= 2 {
        let mut c = vec![0.0; label.n as usize + 1];
        c[label.n as usize] = 1.0;
        params.p_coeffs = c;
    }
    if label.m >= 1 {
        let mut c = vec![0.0; label.m as usize + 1];
        c[label.m as usize] = 1.0;
        c[0] = -0.5;
        params.q_coeffs = c;
    }
    params
}
