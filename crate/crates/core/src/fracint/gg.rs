//! Gårding–Gindikin integrals: the direct form and the half-integer
//! `ω`-form.

use std::f64::consts::PI;

use rand::Rng;

use super::{
    dense_sqrt, interval_integral, ln_siegel_gamma, shifted_congruence, IntegralSpec, Method, Side,
};
use crate::error::{Error, Result};
use crate::linalg::{SpdMatrix, SymmetricMatrix};
use crate::mc::{estimate, MonteCarloEstimate, RngState};
use crate::quadrature::{jacobi01, DEFAULT_NODES};
use crate::special::half_dim;
use crate::testfn::TestFunction;

/// `(I_±^α f)(s)` for `α > (ℓ−1)/2`.
///
/// The left side accepts any positive definite `s`; the right side needs
/// `s < I`.
pub fn gg_integral(spec: &IntegralSpec, f: &TestFunction) -> Result<MonteCarloEstimate> {
    spec.validate(f)?;
    let rank = spec.rank();
    let d = half_dim(rank);
    let alpha = spec.alpha;
    let ln_gamma = ln_siegel_gamma(rank, alpha)?;
    match spec.side {
        Side::Left => {
            let root = dense_sqrt(&spec.s);
            let scale = (alpha * spec.s.det().ln() - ln_gamma).exp();
            let e = interval_integral(rank, 0.0, alpha - d, spec.method, spec.n_samples, &spec.rng, |w| {
                f.eval(&shifted_congruence(None, w, &root))
            })?;
            Ok(e.scaled(scale))
        }
        Side::Right => {
            let t = SpdMatrix::new(spec.s.complement())?;
            let root = dense_sqrt(&t);
            let scale = (alpha * t.det().ln() - ln_gamma).exp();
            let s = spec.s.as_sym();
            let e = interval_integral(rank, alpha - d, 0.0, spec.method, spec.n_samples, &spec.rng, |w| {
                f.eval(&shifted_congruence(Some(s), w, &root))
            })?;
            Ok(e.scaled(scale))
        }
    }
}

/// `ω'ω` for an `m × ℓ` matrix `ω` with entries uniform on `(−c, c)`.
pub(crate) fn omega_box_gram<R: Rng + ?Sized>(m: usize, rank: usize, c: f64, rng: &mut R) -> SymmetricMatrix {
    let mut omega = [0.0f64; 64];
    let omega: &mut [f64] = if m * rank <= 64 {
        &mut omega[..m * rank]
    } else {
        return omega_box_gram_large(m, rank, c, rng);
    };
    for x in omega.iter_mut() {
        *x = c * (2.0 * rng.random::<f64>() - 1.0);
    }
    SymmetricMatrix::from_fn(rank, |i, j| (0..m).map(|k| omega[k * rank + i] * omega[k * rank + j]).sum())
}

fn omega_box_gram_large<R: Rng + ?Sized>(m: usize, rank: usize, c: f64, rng: &mut R) -> SymmetricMatrix {
    let omega: Vec<f64> = (0..m * rank).map(|_| c * (2.0 * rng.random::<f64>() - 1.0)).collect();
    SymmetricMatrix::from_fn(rank, |i, j| (0..m).map(|k| omega[k * rank + i] * omega[k * rank + j]).sum())
}

/// Half-integer `ω`-form of the Gårding–Gindikin integral:
///
/// ```text
/// (I_+^{m/2} f)(s) = π^{−ℓm/2} ∫_{ω'ω < s}   f(s − ω'ω) dω
/// (I_−^{m/2} f)(s) = π^{−ℓm/2} ∫_{ω'ω < I−s} f(s + ω'ω) dω
/// ```
///
/// over `m × ℓ` matrices `ω`. `Uniform` samples `ω` from a box, `Quadrature`
/// (rank one) integrates the radial variable.
pub fn gg_halfint(
    side: Side,
    m: usize,
    f: &TestFunction,
    s: &SpdMatrix,
    n_samples: usize,
    rng: &RngState,
    method: Method,
) -> Result<MonteCarloEstimate> {
    let rank = s.dim();
    f.check_rank(rank)?;
    if m == 0 {
        return Err(Error::Domain("half-integer order needs m >= 1".into()));
    }
    let bound = match side {
        Side::Left => s.as_sym().clone(),
        Side::Right => {
            if !s.in_unit_interval() {
                return Err(Error::PointOutsideQ);
            }
            s.complement()
        }
    };
    match method.resolve(rank) {
        Method::Uniform => {
            let c = bound.max_eigenvalue().sqrt();
            let ln_scale = (m * rank) as f64 * (2.0 * c).ln() - (rank * m) as f64 / 2.0 * PI.ln();
            let e = estimate(n_samples, rng, |r| {
                let x = omega_box_gram(m, rank, c, r);
                let gap = bound.sub(&x);
                if gap.pd_det().is_none() {
                    return 0.0;
                }
                match side {
                    Side::Left => f.eval(&gap),
                    Side::Right => f.eval(&s.add(&x)),
                }
            });
            Ok(e.scaled(ln_scale.exp()))
        }
        Method::Quadrature if rank == 1 => {
            let (s0, b0) = (s.get(0, 0), bound.get(0, 0));
            let half = m as f64 / 2.0;
            let rule = jacobi01(half - 1.0, 0.0, DEFAULT_NODES);
            // ∫_{|ω|² < b} g(|ω|²) dω = (σ_{m,1}/2) b^{m/2} ∫_0^1 g(bt) t^{m/2−1} dt
            let radial = rule.integrate(|t| {
                let x = b0 * t;
                let r = match side {
                    Side::Left => s0 - x,
                    Side::Right => s0 + x,
                };
                f.eval(&SymmetricMatrix::diagonal(&[r]))
            });
            let ln_scale = half * b0.ln() - crate::special::ln_gamma(half);
            Ok(MonteCarloEstimate::exact(radial * ln_scale.exp()))
        }
        other => Err(Error::Unsupported(format!(
            "half-integer form with method {other:?} at rank {rank}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymmetricMatrix;
    use crate::special::siegel_log_gamma;

    fn spd(upper: &[f64]) -> SpdMatrix {
        let dim = if upper.len() == 1 { 1 } else if upper.len() == 3 { 2 } else { 3 };
        SpdMatrix::new(SymmetricMatrix::new(dim, upper.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn riemann_liouville_of_one() {
        let spec = IntegralSpec::new(Side::Left, 1.0, spd(&[0.5]));
        let e = gg_integral(&spec, &TestFunction::const1(1)).unwrap();
        assert!((e.value - 0.5).abs() < 1e-14);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn closed_form_of_one_rank_one() {
        // I_+^α 1 (s) = s^α / Γ(α+1)
        for &alpha in &[0.3, 1.0, 2.5] {
            let spec = IntegralSpec::new(Side::Left, alpha, spd(&[0.7]));
            let e = gg_integral(&spec, &TestFunction::const1(1)).unwrap();
            let exact = 0.7f64.powf(alpha) / crate::special::gamma(alpha + 1.0).unwrap();
            assert!((e.value / exact - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn closed_form_of_one_rank_two() {
        let s = SpdMatrix::scaled_identity(2, 1.0 - 1e-9).unwrap();
        let spec = IntegralSpec::new(Side::Left, 2.0, s)
            .samples(200_000)
            .rng(RngState::new(11));
        let e = gg_integral(&spec, &TestFunction::const1(2)).unwrap();
        assert!((e.value - 2.0 / 15.0).abs() < 4.0 * e.stderr, "{e:?}");

        let s = spd(&[0.6, 0.1, 0.3]);
        let exact = (2.5 * s.det().ln() + siegel_log_gamma(2, 1.5).unwrap()
            - siegel_log_gamma(2, 4.0).unwrap())
        .exp();
        for method in [Method::MatrixBeta, Method::Quadrature] {
            let spec = IntegralSpec::new(Side::Left, 2.5, s.clone()).method(method).samples(50_000);
            let e = gg_integral(&spec, &TestFunction::const1(2)).unwrap();
            assert!((e.value / exact - 1.0).abs() < 1e-8, "{method:?} {e:?} vs {exact}");
        }
    }

    #[test]
    fn domain_errors() {
        let spec = IntegralSpec::new(Side::Left, 0.5, spd(&[0.5, 0.0, 0.5]));
        assert!(matches!(gg_integral(&spec, &TestFunction::const1(2)), Err(Error::Domain(_))));
        let spec = IntegralSpec::new(Side::Right, 1.0, spd(&[1.5]));
        assert_eq!(gg_integral(&spec, &TestFunction::const1(1)).unwrap_err(), Error::PointOutsideQ);
        let spec = IntegralSpec::new(Side::Left, 1.0, spd(&[1.5]));
        assert!(gg_integral(&spec, &TestFunction::const1(2)).is_err());
    }

    #[test]
    fn half_order_of_one() {
        let s = spd(&[0.25]);
        let exact = 1.0 / PI.sqrt();
        let q = gg_halfint(Side::Left, 1, &TestFunction::const1(1), &s, 0, &RngState::new(0), Method::Quadrature)
            .unwrap();
        assert!((q.value - exact).abs() < 1e-12);
        let u = gg_halfint(Side::Left, 1, &TestFunction::const1(1), &s, 100_000, &RngState::new(3), Method::Uniform)
            .unwrap();
        // the box is exactly the region at rank one, so every sample is equal
        assert!((u.value - exact).abs() <= 4.0 * u.stderr + 1e-12);
    }

    #[test]
    fn half_integer_matches_direct_form_rank_one() {
        let f = TestFunction::exp_tr(1);
        let s = spd(&[0.4]);
        for side in [Side::Left, Side::Right] {
            let direct = gg_integral(&IntegralSpec::new(side, 1.0, s.clone()), &f).unwrap();
            let omega = gg_halfint(side, 2, &f, &s, 0, &RngState::new(0), Method::Quadrature).unwrap();
            assert!((direct.value / omega.value - 1.0).abs() < 1e-12, "{side:?}");
        }
    }
}
