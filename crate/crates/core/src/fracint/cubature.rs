//! Deterministic cubature over the rank-two unit interval.
//!
//! A point of `Q_2` is written `w = R(θ) diag(λ₁, λ₂) R(θ)'` with
//! `1 > λ₁ > λ₂ > 0` and `θ ∈ [0, π)`, so `dw = (λ₁ − λ₂) dλ₁ dλ₂ dθ`.
//! The substitution `λ₁ = x`, `λ₂ = xy` turns the triangle into the unit
//! square and moves the Jacobian and the determinant powers into Jacobi
//! weights in `x` and `y`; `θ` is periodic and handled by the trapezoid rule.
//! The substitution leaves `(1 − xy)^b`, which is smooth for `b ≥ 0`.

use crate::linalg::SymmetricMatrix;
use crate::quadrature::{jacobi01, periodic};

/// Node counts of the rank-two cubature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CubatureSize {
    pub radial: usize,
    pub ratio: usize,
    pub angle: usize,
}

impl Default for CubatureSize {
    fn default() -> Self {
        Self {
            radial: 48,
            ratio: 48,
            angle: 64,
        }
    }
}

/// `∫_{Q_2} F(w) |w|^a |I−w|^b dw` for `a, b > −1`.
pub fn interval_cubature<F>(a: f64, b: f64, size: CubatureSize, integrand: &F) -> f64
where
    F: Fn(&SymmetricMatrix) -> f64 + ?Sized,
{
    // The residual (1−xy)^b is singular at the corner for b < 0; reflecting
    // w ↦ I − w swaps the exponents and keeps the worse one in the x-weight.
    if b < a {
        let reflected = |u: &SymmetricMatrix| integrand(&u.complement());
        return cubature_core(b, a, size, &reflected);
    }
    cubature_core(a, b, size, &|w: &SymmetricMatrix| integrand(w))
}

fn cubature_core(a: f64, b: f64, size: CubatureSize, integrand: &dyn Fn(&SymmetricMatrix) -> f64) -> f64 {
    // (λ₁−λ₂)(λ₁λ₂)^a((1−λ₁)(1−λ₂))^b dλ₂ = x^{2a+2}(1−x)^b · y^a(1−y) · (1−xy)^b
    let xs = jacobi01(2.0 * a + 2.0, b, size.radial);
    let ys = jacobi01(a, 1.0, size.ratio);
    let angles = periodic(size.angle, std::f64::consts::PI);
    let mut total = 0.0;
    for (&theta, &wt) in angles.nodes.iter().zip(&angles.weights) {
        let (sn, cs) = theta.sin_cos();
        let mut inner = 0.0;
        for (&x, &wx) in xs.nodes.iter().zip(&xs.weights) {
            for (&y, &wy) in ys.nodes.iter().zip(&ys.weights) {
                let (l1, l2) = (x, x * y);
                let w = SymmetricMatrix::new(
                    2,
                    vec![
                        l1 * cs * cs + l2 * sn * sn,
                        (l1 - l2) * cs * sn,
                        l1 * sn * sn + l2 * cs * cs,
                    ],
                )
                .expect("packed 2x2");
                let residual = if b == 0.0 { 1.0 } else { (1.0 - x * y).powf(b) };
                inner += wx * wy * residual * integrand(&w);
            }
        }
        total += wt * inner;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::siegel_beta;

    #[test]
    fn beta_function_values() {
        for &(a, b) in &[(0.0, 0.0), (0.5, 1.0), (-0.5, 0.0), (0.0, 1.0), (1.0, -0.5)] {
            let got = interval_cubature(a, b, CubatureSize::default(), &|_| 1.0);
            let exact = siegel_beta(2, a + 1.5, b + 1.5).unwrap();
            assert!((got / exact - 1.0).abs() < 1e-7, "a={a} b={b}: {got} vs {exact}");
        }
    }

    #[test]
    fn trace_moment() {
        // E[tr w] under the uniform law on Q_2 equals 1 by the symmetry w ↦ I − w
        let vol = interval_cubature(0.0, 0.0, CubatureSize::default(), &|_| 1.0);
        let tr = interval_cubature(0.0, 0.0, CubatureSize::default(), &|w| w.trace());
        assert!((tr / vol - 1.0).abs() < 1e-12);
    }
}
