//! Gauss rules built by the Golub–Welsch eigenvalue method.
//!
//! Rules are cached per (family, exponents, size) since the same handful of
//! weights is requested over and over by the one-dimensional integrators.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::special::ln_gamma;

/// Default node count for one-dimensional rules.
pub const DEFAULT_NODES: usize = 128;

/// Nodes and weights of a Gauss rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

#[derive(Hash, PartialEq, Eq)]
enum Key {
    Jacobi(u64, u64, usize),
    Laguerre(u64, usize),
}

fn cache() -> &'static Mutex<HashMap<Key, Arc<Rule>>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Rule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(key: Key, build: impl FnOnce() -> Rule) -> Arc<Rule> {
    if let Some(rule) = cache().lock().expect("rule cache poisoned").get(&key) {
        return rule.clone();
    }
    let rule = Arc::new(build());
    cache()
        .lock()
        .expect("rule cache poisoned")
        .entry(key)
        .or_insert(rule)
        .clone()
}

fn golub_welsch(diag: &[f64], off_sq: &[f64], mu0: f64) -> Rule {
    let n = diag.len();
    let mut t = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        t[(i, i)] = diag[i];
        if i + 1 < n {
            let b = off_sq[i].sqrt();
            t[(i, i + 1)] = b;
            t[(i + 1, i)] = b;
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// Rule for `∫_0^1 g(t) t^a (1−t)^b dt`, with `a, b > −1`.
pub fn jacobi01(a: f64, b: f64, n: usize) -> Arc<Rule> {
    assert!(a > -1.0 && b > -1.0, "Jacobi exponents must exceed -1");
    assert!(n >= 1, "a rule needs at least one node");
    cached(Key::Jacobi(a.to_bits(), b.to_bits(), n), || {
        // on [−1, 1] the weight is (1−x)^p (1+x)^q with t = (1+x)/2
        let (p, q) = (b, a);
        let s = p + q;
        let diag: Vec<f64> = (0..n)
            .map(|k| {
                let k = k as f64;
                let den = (2.0 * k + s) * (2.0 * k + s + 2.0);
                if den.abs() < 1e-300 {
                    (q - p) / (s + 2.0)
                } else {
                    (q * q - p * p) / den
                }
            })
            .collect();
        let off_sq: Vec<f64> = (1..n)
            .map(|k| {
                let k = k as f64;
                if k == 1.0 {
                    4.0 * (1.0 + p) * (1.0 + q) / ((2.0 + s).powi(2) * (3.0 + s))
                } else {
                    let c = 2.0 * k + s;
                    4.0 * k * (k + p) * (k + q) * (k + s) / (c * c * (c + 1.0) * (c - 1.0))
                }
            })
            .collect();
        let ln_mu0 = (s + 1.0) * std::f64::consts::LN_2 + ln_gamma(p + 1.0) + ln_gamma(q + 1.0)
            - ln_gamma(s + 2.0);
        let rule = golub_welsch(&diag, &off_sq, ln_mu0.exp());
        let scale = 0.5f64.powf(s + 1.0);
        Rule {
            nodes: rule.nodes.iter().map(|x| 0.5 * (1.0 + x)).collect(),
            weights: rule.weights.iter().map(|w| w * scale).collect(),
        }
    })
}

/// Gauss–Legendre on `[0, 1]`.
pub fn legendre01(n: usize) -> Arc<Rule> {
    jacobi01(0.0, 0.0, n)
}

/// Rule for `∫_0^∞ g(x) x^a e^{−x} dx`, with `a > −1`.
pub fn laguerre(a: f64, n: usize) -> Arc<Rule> {
    assert!(a > -1.0, "Laguerre exponent must exceed -1");
    cached(Key::Laguerre(a.to_bits(), n), || {
        let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + a + 1.0).collect();
        let off_sq: Vec<f64> = (1..n).map(|k| k as f64 * (k as f64 + a)).collect();
        golub_welsch(&diag, &off_sq, ln_gamma(a + 1.0).exp())
    })
}

/// Trapezoid nodes on a full period `[0, period)`; exact for trigonometric
/// polynomials of degree below `n`.
pub fn periodic(n: usize, period: f64) -> Rule {
    let h = period / n as f64;
    Rule {
        nodes: (0..n).map(|i| i as f64 * h).collect(),
        weights: vec![h; n],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::siegel_beta;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let rule = legendre01(10);
        for p in 0..19 {
            let got = rule.integrate(|t| t.powi(p));
            assert!((got - 1.0 / (p as f64 + 1.0)).abs() < 1e-14, "degree {p}");
        }
    }

    #[test]
    fn jacobi_moments_match_beta_function() {
        for &(a, b) in &[(0.0, 0.0), (-0.5, 0.5), (1.5, -0.75), (3.0, 2.0), (-0.9, -0.9)] {
            let rule = jacobi01(a, b, 24);
            for p in 0..6 {
                let got = rule.integrate(|t| t.powi(p));
                let exact = siegel_beta(1, a + 1.0 + p as f64, b + 1.0).unwrap();
                assert!((got / exact - 1.0).abs() < 1e-12, "a={a} b={b} p={p}");
            }
        }
    }

    #[test]
    fn large_rules_stay_accurate() {
        let rule = jacobi01(0.25, -0.5, DEFAULT_NODES);
        let got = rule.integrate(|t| (3.0 * t).cos());
        // cos(3t) = Σ (−9)^k t^{2k} / (2k)!, integrated termwise
        let mut reference = 0.0;
        let mut coef = 1.0;
        for k in 0..30 {
            reference += coef * siegel_beta(1, 1.25 + 2.0 * k as f64, 0.5).unwrap();
            coef *= -9.0 / ((2 * k + 1) as f64 * (2 * k + 2) as f64);
        }
        assert!((got - reference).abs() < 1e-12, "{got} vs {reference}");
    }

    #[test]
    fn laguerre_moments() {
        let rule = laguerre(0.5, 40);
        for p in 0..5 {
            let got = rule.integrate(|x| x.powi(p));
            let exact = ln_gamma(1.5 + p as f64).exp();
            assert!((got / exact - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn periodic_rule_is_exact_for_trig_polynomials() {
        let rule = periodic(16, std::f64::consts::PI);
        let got = rule.integrate(|t| (2.0 * t).cos().powi(2));
        assert!((got - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
    }
}
