//! Compensated accumulation built on error-free transforms.

/// Precision mode for accumulations.
///
/// `Standard` uses Neumaier summation of rounded products. `Extended` keeps
/// the rounding error of every product as well (the compensated `Dot2` scheme),
/// which behaves like twice the working precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Standard,
    Extended,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Running compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    sum: f64,
    comp: f64,
    extended: bool,
}

impl Accumulator {
    pub fn new(precision: Precision) -> Self {
        Accumulator { sum: 0.0, comp: 0.0, extended: precision == Precision::Extended }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let (s, e) = two_sum(self.sum, x);
        self.sum = s;
        self.comp += e;
    }

    /// Adds `a * b`, keeping the product's rounding error in extended mode.
    #[inline]
    pub fn add_product(&mut self, a: f64, b: f64) {
        if self.extended {
            let (p, ep) = two_prod(a, b);
            self.add(p);
            self.comp += ep;
        } else {
            self.add(a * b);
        }
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of a slice.
pub fn sum(values: &[f64], precision: Precision) -> f64 {
    let mut acc = Accumulator::new(precision);
    for &v in values {
        acc.add(v);
    }
    acc.value()
}

/// Compensated dot product.
pub fn dot(a: &[f64], b: &[f64], precision: Precision) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Accumulator::new(precision);
    for (x, y) in a.iter().zip(b) {
        acc.add_product(*x, *y);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_is_recovered() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(sum(&v, Precision::Standard), 2.0);
        assert_eq!(v.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn extended_dot_is_exact_on_ill_conditioned_input() {
        let a = [1.0 + f64::EPSILON, 1e8, -1e8];
        let b = [1.0 - f64::EPSILON, 1e8, 1e8];
        // exact value 1 - eps^2 rounds to 1 - eps^2 ≈ 1
        let d = dot(&a, &b, Precision::Extended);
        assert_eq!(d, 1.0 - f64::EPSILON * f64::EPSILON);
    }
}
