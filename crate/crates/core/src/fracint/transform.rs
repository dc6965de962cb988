//! The Gårding–Gindikin distribution and the Laplace transform on the cone.

use rand_distr::{Distribution, Normal};

use super::{interval_integral, ln_siegel_gamma, Method, WallachParameter};
use crate::error::Result;
use crate::linalg::{SpdMatrix, SymmetricMatrix};
use crate::mc::{estimate, MonteCarloEstimate, RngState};
use crate::quadrature::{laguerre, legendre01, DEFAULT_NODES};
use crate::sampling::WishartSampler;
use crate::special::half_dim;
use crate::testfn::{Support, TestFunction};

/// `𝒢_α(f) = Γ_ℓ(α)^{-1} ∫_P f(r) |r|^{α−d} dr`.
///
/// * `HalfInteger(0)` gives `f(0)`.
/// * `HalfInteger(m)` with `m < ℓ` uses `π^{−ℓm/2} ∫ f(ω'ω) dω` over
///   `m × ℓ` matrices, sampling `ω` with `N(0, 1/2)` entries.
/// * Otherwise `r = W/2` with `W ~ Wishart(2α, I)` has density
///   `|r|^{α−d} e^{−tr r} / Γ_ℓ(α)`, so `𝒢_α(f) = E[f(r) e^{tr r}]`.
pub fn gg_distribution(
    order: WallachParameter,
    f: &TestFunction,
    n_samples: usize,
    rng: &RngState,
) -> Result<MonteCarloEstimate> {
    let rank = f.rank();
    if order == WallachParameter::HalfInteger(0) {
        return Ok(MonteCarloEstimate::exact(f.eval(&SymmetricMatrix::zeros(rank))));
    }
    match order.resolve(rank)? {
        WallachParameter::HalfInteger(m) => {
            let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid scale");
            Ok(estimate(n_samples, rng, |r| {
                let omega: Vec<f64> = (0..m * rank).map(|_| normal.sample(r)).collect();
                let x = SymmetricMatrix::from_fn(rank, |i, j| {
                    (0..m).map(|k| omega[k * rank + i] * omega[k * rank + j]).sum()
                });
                f.eval(&x) * x.trace().exp()
            }))
        }
        WallachParameter::Generic(alpha) => {
            let sampler = WishartSampler::new(rank, 2.0 * alpha)?;
            Ok(estimate(n_samples, rng, |r| {
                let x = sampler.sample(r).scale(0.5);
                f.eval(&x) * x.trace().exp()
            }))
        }
    }
}

/// `(Lf)(z) = ∫_P e^{−tr(zr)} f(r) dr` for real positive definite `z`.
///
/// Functions supported in the unit interval are integrated over it
/// (quadrature for rank one, uniform sampling otherwise). On the whole cone
/// rank one uses Gauss–Legendre on `(0, 1)` plus Gauss–Laguerre on
/// `(1, ∞)`; higher ranks sample `r = z^{−1/2} (W/2) z^{−1/2}` with
/// `W ~ Wishart(ℓ+1, I)`, whose density is `|z|^d e^{−tr(zr)} / Γ_ℓ(d)`.
pub fn laplace(
    f: &TestFunction,
    z: &SpdMatrix,
    n_samples: usize,
    rng: &RngState,
) -> Result<MonteCarloEstimate> {
    let rank = z.dim();
    f.check_rank(rank)?;
    let zs = z.as_sym();
    let weight = |r: &SymmetricMatrix| {
        let n = r.dim();
        let mut tr = 0.0;
        for i in 0..n {
            for j in 0..n {
                tr += zs.get(i, j) * r.get(j, i);
            }
        }
        (-tr).exp()
    };
    match f.support() {
        Support::UnitInterval | Support::CompactInQ => interval_integral(
            rank,
            0.0,
            0.0,
            Method::Auto,
            n_samples,
            rng,
            |w| weight(w) * f.eval(w),
        ),
        Support::Cone if rank == 1 => {
            let z0 = zs.get(0, 0);
            let eval = |r: f64| f.eval(&SymmetricMatrix::diagonal(&[r]));
            let head = legendre01(DEFAULT_NODES).integrate(|r| (-z0 * r).exp() * eval(r));
            // ∫_1^∞ e^{−zr} f(r) dr = e^{−z}/z ∫_0^∞ e^{−x} f(1 + x/z) dx
            let tail = laguerre(0.0, DEFAULT_NODES).integrate(|x| eval(1.0 + x / z0));
            Ok(MonteCarloEstimate::exact(head + (-z0).exp() / z0 * tail))
        }
        Support::Cone => {
            let d = half_dim(rank);
            let sampler = WishartSampler::new(rank, 2.0 * d)?;
            let root = z.inv_sqrt().to_dense();
            let ln_scale = ln_siegel_gamma(rank, d)? - d * z.det().ln();
            let e = estimate(n_samples, rng, |r| {
                let y = sampler.sample(r).scale(0.5);
                f.eval(&y.congruence(&root))
            });
            Ok(e.scaled(ln_scale.exp()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::siegel_gamma;

    #[test]
    fn order_zero_is_evaluation_at_origin() {
        let f = TestFunction::exp_tr(2);
        let e = gg_distribution(WallachParameter::HalfInteger(0), &f, 10, &RngState::new(1)).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn exponential_has_unit_mass() {
        let e = gg_distribution(WallachParameter::Generic(1.0), &TestFunction::exp_tr(1), 1000, &RngState::new(2))
            .unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
        let e = gg_distribution(WallachParameter::HalfInteger(1), &TestFunction::exp_tr(2), 1000, &RngState::new(3))
            .unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distribution_of_trace() {
        // 𝒢_α(tr · e^{−2tr}) = 2^{−ℓα} E[tr r] with r gamma-distributed of scale 1/2, i.e. (ℓα/2) 2^{−ℓα}
        let alpha = 1.75;
        let f = TestFunction::new("tr e^{-2tr}", 2, Support::Cone, crate::testfn::Smoothness::Smooth, |r| {
            r.trace() * (-2.0 * r.trace()).exp()
        });
        let e = gg_distribution(WallachParameter::Generic(alpha), &f, 200_000, &RngState::new(4)).unwrap();
        let exact = alpha * 2f64.powf(-2.0 * alpha);
        assert!((e.value - exact).abs() < 4.0 * e.stderr, "{e:?} vs {exact}");
    }

    #[test]
    fn laplace_examples() {
        let z = SpdMatrix::identity(1);
        let one_on_q = TestFunction::new("1_Q", 1, Support::UnitInterval, crate::testfn::Smoothness::Continuous, |_| 1.0);
        let e = laplace(&one_on_q, &z, 0, &RngState::new(0)).unwrap();
        assert!((e.value - (1.0 - (-1.0f64).exp())).abs() < 1e-14);

        let z = SpdMatrix::new(SymmetricMatrix::diagonal(&[2.0])).unwrap();
        let e = laplace(&TestFunction::trace(1), &z, 0, &RngState::new(0)).unwrap();
        assert!((e.value - 0.25).abs() < 1e-12);

        let f = TestFunction::det_power(2, 0.5);
        let e = laplace(&f, &SpdMatrix::identity(2), 200_000, &RngState::new(5)).unwrap();
        let exact = siegel_gamma(2, 2.0).unwrap();
        assert!((exact - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
        assert!((e.value - exact).abs() < 4.0 * e.stderr, "{e:?}");
    }
}
