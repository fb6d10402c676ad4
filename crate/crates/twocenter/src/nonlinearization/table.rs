//! Tabulated correction phases with cubic Hermite interpolation.

use serde::{Deserialize, Serialize};

/// A function known by its values and exact slopes on an ascending grid.
///
/// Between nodes the cubic Hermite interpolant is used, so values and first
/// derivatives are continuous. Outside the grid the end tangents extend
/// linearly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionTable {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub slopes: Vec<f64>,
}

impl CorrectionTable {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, slopes: Vec<f64>) -> Self {
        debug_assert!(nodes.len() >= 2 && nodes.len() == values.len() && values.len() == slopes.len());
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        CorrectionTable { nodes, values, slopes }
    }

    /// A table that is identically zero on `[lo, hi]`.
    pub fn zero(lo: f64, hi: f64) -> Self {
        CorrectionTable::new(vec![lo, hi], vec![0.0; 2], vec![0.0; 2])
    }

    /// Value and derivative at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let n = self.nodes.len();
        if x <= self.nodes[0] {
            return (self.values[0] + self.slopes[0] * (x - self.nodes[0]), self.slopes[0]);
        }
        if x >= self.nodes[n - 1] {
            return (self.values[n - 1] + self.slopes[n - 1] * (x - self.nodes[n - 1]), self.slopes[n - 1]);
        }
        let k = self.nodes.partition_point(|&v| v <= x) - 1;
        let (x0, x1) = (self.nodes[k], self.nodes[k + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = (self.slopes[k] * h, self.slopes[k + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1;
        let d = (6.0 * t2 - 6.0 * t) * y0 + (3.0 * t2 - 4.0 * t + 1.0) * m0 + (-6.0 * t2 + 6.0 * t) * y1 + (3.0 * t2 - 2.0 * t) * m1;
        (v, d / h)
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Two-column CSV with a header row and 17 significant digits.
    pub fn to_csv(&self, x_name: &str, y_name: &str) -> String {
        let mut s = format!("{x_name},{y_name},d{y_name}\n");
        for ((x, y), d) in self.nodes.iter().zip(&self.values).zip(&self.slopes) {
            s.push_str(&format!("{x:.16e},{y:.16e},{d:.16e}\n"));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubics_exactly() {
        let f = |x: f64| 0.3 * x * x * x - x * x + 2.0 * x - 1.0;
        let df = |x: f64| 0.9 * x * x - 2.0 * x + 2.0;
        let nodes: Vec<f64> = (0..7).map(|k| (k as f64 * 0.37).powf(1.3)).collect();
        let t = CorrectionTable::new(nodes.clone(), nodes.iter().map(|&x| f(x)).collect(), nodes.iter().map(|&x| df(x)).collect());
        for k in 0..50 {
            let x = 0.02 + k as f64 * 0.05;
            let (v, d) = t.eval(x);
            assert!((v - f(x)).abs() < 1e-13 && (d - df(x)).abs() < 1e-12, "{x}");
        }
    }

    #[test]
    fn extends_linearly() {
        let t = CorrectionTable::new(vec![0.0, 1.0], vec![0.0, 1.0], vec![1.0, 2.0]);
        assert_eq!(t.eval(3.0), (5.0, 2.0));
        assert_eq!(t.eval(-1.0), (-1.0, 1.0));
        assert!(t.to_csv("xi", "phi1").starts_with("xi,phi1,dphi1\n"));
    }
}
