//! Small numerical helpers shared by the modules: log-gamma, a fixed-order
//! summation, finite differences and a residual record.

use serde::{Deserialize, Serialize};

/// Natural log of the gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// `ln(n!)` for a non-negative integer given as `f64`.
pub fn ln_factorial(n: f64) -> f64 {
    ln_gamma(n + 1.0)
}

/// Pochhammer symbol `(a)_n` by direct product.
pub fn pochhammer(a: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (a + k as f64))
}

/// Pairwise (cascade) summation with a fixed split order.
///
/// The result depends only on the input order, so splitting the work across
/// threads along the same tree gives bitwise-identical sums.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if values.len() <= LEAF {
        return values.iter().fold(0.0, |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Central first derivative with one Richardson step: error `O(h^4)`.
pub fn derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let central = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * central(0.5 * h) - central(h)) / 3.0
}

/// Central second derivative with one Richardson step: error `O(h^4)`.
pub fn second_derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let fx = f(x);
    let central = |h: f64| (f(x + h) - 2.0 * fx + f(x - h)) / (h * h);
    (4.0 * central(0.5 * h) - central(h)) / 3.0
}

/// Smallest scale used when normalizing a residual.
pub const SCALE_FLOOR: f64 = 1e-6;

/// Signed residual of an identity together with the magnitude of its
/// largest term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub value: f64,
    pub scale: f64,
}

impl Residual {
    /// Builds a residual `Σ terms` with scale `max |term|`.
    pub fn from_terms(terms: &[f64]) -> Self {
        let value = terms.iter().fold(0.0, |acc, t| acc + t);
        let scale = terms.iter().fold(0.0_f64, |acc, t| acc.max(t.abs()));
        Self { value, scale }
    }

    pub fn abs(&self) -> f64 {
        self.value.abs()
    }

    /// `|value| / max(scale, SCALE_FLOOR)`.
    ///
    /// Near a common zero of all terms (a node of the function combined
    /// with a vanishing coefficient) the largest term is itself rounding
    /// noise; the floor keeps such points from reading as O(1) failures.
    pub fn relative(&self) -> f64 {
        self.value.abs() / self.scale.max(SCALE_FLOOR)
    }

    /// Residual of the larger relative size.
    pub fn worst(self, other: Self) -> Self {
        if other.relative() > self.relative() {
            other
        } else {
            self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let v: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(pairwise_sum(&v), 55.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn pairwise_is_order_deterministic() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.37).sin()).collect();
        assert_eq!(
            pairwise_sum(&v).to_bits(),
            pairwise_sum(&v.clone()).to_bits()
        );
    }

    #[test]
    fn ln_gamma_matches_factorials() {
        let mut fact = 1.0_f64;
        for n in 1..20 {
            fact *= n as f64;
            assert!((ln_factorial(n as f64) - fact.ln()).abs() < 1e-13 * fact.ln().max(1.0));
        }
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
    }

    #[test]
    fn finite_differences_on_polynomials() {
        let f = |x: f64| x * x * x - 2.0 * x;
        assert!((derivative(f, 1.3, 1e-3) - (3.0 * 1.69 - 2.0)).abs() < 1e-10);
        assert!((second_derivative(f, 1.3, 1e-3) - 6.0 * 1.3).abs() < 1e-7);
    }

    #[test]
    fn residual_relative_scale() {
        let r = Residual::from_terms(&[1.0, -0.5, -0.5]);
        assert_eq!(r.value, 0.0);
        assert_eq!(r.scale, 1.0);
        assert_eq!(Residual::from_terms(&[0.0, 0.0]).relative(), 0.0);
    }
}
