//! Derivative-free minimization by the Nelder-Mead simplex method.
//!
//! Uses the dimension-adaptive coefficients of Gao and Han, which behave much
//! better than the classical ones beyond four or five parameters. Infeasible
//! points are signalled by the objective returning `+∞`; such vertices are
//! never accepted as improvements, which rejects invariant-violating steps.

/// Stopping rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub max_evals: usize,
    /// Largest vertex offset from the best vertex, per coordinate, divided by the coordinate's scale.
    pub xtol: f64,
    /// Spread of objective values across the simplex.
    pub ftol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Best objective value after every iteration, non-increasing.
    pub history: Vec<f64>,
}

/// Minimizes `f` from `x0` with initial edge lengths `steps`.
/// `scales` normalizes coordinates for the size test.
pub fn minimize(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    steps: &[f64],
    scales: &[f64],
    opts: &SimplexOptions,
) -> SimplexOutcome {
    let n = x0.len();
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = if n >= 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += steps[i];
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v, &mut evals)).collect();
    // If the trial vertex is infeasible, try the opposite direction.
    for i in 0..n {
        if values[i + 1].is_infinite() {
            let mut v = x0.to_vec();
            v[i] -= steps[i];
            let fv = eval(&v, &mut evals);
            if fv < values[i + 1] {
                simplex[i + 1] = v;
                values[i + 1] = fv;
            }
        }
    }

    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut order: Vec<usize> = (0..=n).collect();

    loop {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let best = order[0];
        let worst = order[n];
        let second = order[n - 1];
        history.push(values[best]);

        let size = simplex
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[best]).zip(scales).map(|((a, b), s)| (a - b).abs() / s))
            .fold(0.0f64, f64::max);
        let spread = values[worst] - values[best];
        if size <= opts.xtol && spread <= opts.ftol {
            converged = true;
            break;
        }
        if evals >= opts.max_evals {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for &k in order.iter().take(n) {
            for (c, x) in centroid.iter_mut().zip(&simplex[k]) {
                *c += x / nf;
            }
        }
        let point = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[worst]).map(|(c, w)| c + t * (c - w)).collect()
        };

        let xr = point(alpha);
        let fr = eval(&xr, &mut evals);
        if fr < values[best] {
            let xe = point(alpha * beta);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                simplex[worst] = xe;
                values[worst] = fe;
            } else {
                simplex[worst] = xr;
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second] {
            simplex[worst] = xr;
            values[worst] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[worst] {
            let xc = point(alpha * gamma);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = point(-gamma);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < values[worst].min(fr) {
            simplex[worst] = xc;
            values[worst] = fc;
            continue;
        }
        // shrink towards the best vertex
        let xb = simplex[best].clone();
        for &k in order.iter().skip(1) {
            let v: Vec<f64> = xb.iter().zip(&simplex[k]).map(|(b, x)| b + delta * (x - b)).collect();
            values[k] = eval(&v, &mut evals);
            simplex[k] = v;
        }
    }

    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b))).unwrap_or(0);
    SimplexOutcome { x: simplex[best].clone(), f: values[best], evals, iterations, converged, history }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        x.windows(2).map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2)).sum()
    }

    #[test]
    fn solves_rosenbrock() {
        let opts = SimplexOptions { max_evals: 20000, xtol: 1e-10, ftol: 1e-20 };
        let out = minimize(rosenbrock, &[-1.2, 1.0, 0.5], &[0.1; 3], &[1.0; 3], &opts);
        assert!(out.converged);
        for x in &out.x {
            assert!((x - 1.0).abs() < 1e-8);
        }
        assert!(out.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn respects_infeasible_region() {
        let opts = SimplexOptions { max_evals: 5000, xtol: 1e-10, ftol: 1e-20 };
        let f = |x: &[f64]| if x[0] < 0.5 { f64::INFINITY } else { (x[0] - 0.2).powi(2) + x[1] * x[1] };
        let out = minimize(f, &[2.0, 1.0], &[0.3, 0.3], &[1.0, 1.0], &opts);
        assert!(out.x[0] >= 0.5 && (out.x[0] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn deterministic() {
        let opts = SimplexOptions { max_evals: 3000, xtol: 1e-12, ftol: 0.0 };
        let a = minimize(rosenbrock, &[0.0, 0.0], &[0.5, 0.5], &[1.0, 1.0], &opts);
        let b = minimize(rosenbrock, &[0.0, 0.0], &[0.5, 0.5], &[1.0, 1.0], &opts);
        assert_eq!(a, b);
    }
}
