//! Erdélyi–Kober integrals.
//!
//! For `β > (ℓ−1)/2`
//!
//! ```text
//! (J_+^{α,β} f)(s) = |s|^{d−α−β} / (Γ_ℓ(α)Γ_ℓ(β)) ∫_0^s f(r) |r|^{β−d} |s−r|^{α−d} dr
//! (J_−^{α,β} f)(s) = |s|^{d−α−β} / (Γ_ℓ(α)Γ_ℓ(β)) ∫_s^I f(r) |r|^{β−d} |r−s|^{α−d} dr
//! ```
//!
//! and for `β = m/2` with `m < ℓ` the integrals are taken over `m × ℓ`
//! matrices `ω`:
//!
//! ```text
//! (J_+^{α,m/2} f)(s) = π^{−ℓm/2} |s|^{d−α−m/2} / Γ_ℓ(α) ∫_{ω'ω < s}   |s − ω'ω|^{α−d} f(ω'ω) dω
//! (J_−^{α,m/2} f)(s) = π^{−ℓm/2} |s|^{d−α−m/2} / Γ_ℓ(α) ∫_{ω'ω < I−s} |s + ω'ω|^{α−d} f(ω'ω) dω
//! ```

use std::f64::consts::PI;

use super::gg::omega_box_gram;
use super::{
    check_alpha, dense_sqrt, interval_integral, ln_siegel_gamma, pow, shifted_congruence,
    IntegralSpec, Method, Side, WallachParameter,
};
use crate::error::{Error, Result};
use crate::linalg::{Mat, SpdMatrix, SymmetricMatrix};
use crate::mc::{estimate, MonteCarloEstimate, RngState};
use crate::quadrature::{jacobi01, periodic, DEFAULT_NODES};
use crate::sampling::{
    draw_interval_box, interval_box_volume, sample_stiefel, unit_interval_dets,
    MatrixBetaSampler, MAX_INTERVAL_RANK,
};
use crate::special::{half_dim, log_stiefel_volume, siegel_log_beta};
use crate::testfn::TestFunction;

/// Angular nodes for the rank-two polar rules.
const ANGLE_NODES: usize = 64;

/// `(J_±^{α,β} f)(s)`. Half-integer `β = m/2` with `m ≥ ℓ` is evaluated by
/// the generic formula; with `m < ℓ` by the `ω`-form.
pub fn ek_integral(
    spec: &IntegralSpec,
    beta: WallachParameter,
    f: &TestFunction,
) -> Result<MonteCarloEstimate> {
    spec.validate(f)?;
    match beta.resolve(spec.rank())? {
        WallachParameter::Generic(b) => ek_generic(spec, b, f),
        WallachParameter::HalfInteger(m) => ek_omega_form(spec, m, f),
    }
}

fn ek_generic(spec: &IntegralSpec, beta: f64, f: &TestFunction) -> Result<MonteCarloEstimate> {
    let rank = spec.rank();
    let d = half_dim(rank);
    let alpha = spec.alpha;
    let ln_gammas = ln_siegel_gamma(rank, alpha)? + ln_siegel_gamma(rank, beta)?;
    match spec.side {
        Side::Left => {
            // r = s^{1/2} w s^{1/2}; every power of |s| cancels
            let root = dense_sqrt(&spec.s);
            let e = interval_integral(
                rank,
                beta - d,
                alpha - d,
                spec.method,
                spec.n_samples,
                &spec.rng,
                |w| f.eval(&shifted_congruence(None, w, &root)),
            )?;
            Ok(e.scaled((-ln_gammas).exp()))
        }
        Side::Right => {
            let t = SpdMatrix::new(spec.s.complement())?;
            let root = dense_sqrt(&t);
            let ln_scale =
                (d - alpha - beta) * spec.s.det().ln() + alpha * t.det().ln() - ln_gammas;
            let s = spec.s.as_sym();
            let e = interval_integral(
                rank,
                alpha - d,
                0.0,
                spec.method,
                spec.n_samples,
                &spec.rng,
                |w| {
                    let r = shifted_congruence(Some(s), w, &root);
                    pow(r.det(), beta - d) * f.eval(&r)
                },
            )?;
            Ok(e.scaled(ln_scale.exp()))
        }
    }
}

/// The `ω`-form of `J_±^{α,m/2}` for any `m ≥ 1`, without routing to the
/// generic formula.
///
/// `Uniform` samples `ω` from a box; `MatrixBeta` (`m ≤ ℓ`) writes
/// `ω' = c^{1/2} u q^{1/2}` with `c = s` or `I − s` and samples `q` from a
/// matrix beta law and `u` from the Haar measure; `Quadrature` covers rank
/// one and rank two with `m = 1`.
pub fn ek_omega_form(spec: &IntegralSpec, m: usize, f: &TestFunction) -> Result<MonteCarloEstimate> {
    spec.validate(f)?;
    if m == 0 {
        return Err(Error::Domain("half-integer beta needs m >= 1".into()));
    }
    let rank = spec.rank();
    let d = half_dim(rank);
    let alpha = spec.alpha;
    let s = spec.s.as_sym();
    let ln_det_s = s.det().ln();
    let ln_pre = -((rank * m) as f64) / 2.0 * PI.ln() + (d - alpha - m as f64 / 2.0) * ln_det_s
        - ln_siegel_gamma(rank, alpha)?;
    let bound = match spec.side {
        Side::Left => s.clone(),
        Side::Right => s.complement(),
    };
    let side = spec.side;
    let region = bound.clone();
    let kernel = move |x: &SymmetricMatrix| -> Option<f64> {
        let gap = region.sub(x);
        gap.pd_det()?;
        Some(match side {
            Side::Left => pow(gap.det(), alpha - d),
            Side::Right => pow(s.add(x).det(), alpha - d),
        })
    };
    match spec.method.resolve(rank) {
        Method::Uniform => {
            let c = match side {
                Side::Left => s.max_eigenvalue(),
                Side::Right => s.complement().max_eigenvalue(),
            }
            .sqrt();
            let ln_box = (m * rank) as f64 * (2.0 * c).ln();
            let e = estimate(spec.n_samples, &spec.rng, |r| {
                let x = omega_box_gram(m, rank, c, r);
                kernel(&x).map_or(0.0, |k| k * f.eval(&x))
            });
            Ok(e.scaled((ln_pre + ln_box).exp()))
        }
        Method::MatrixBeta => match side {
            Side::Left => ek_stiefel_form(alpha, m, f, &spec.s, spec.n_samples, &spec.rng, Method::MatrixBeta),
            Side::Right => {
                if m > rank {
                    return Err(Error::Unsupported(format!(
                        "matrix beta sampling of the omega-form needs m <= rank, got m={m}"
                    )));
                }
                let t = SpdMatrix::new(s.complement())?;
                let root = dense_sqrt(&t);
                let dm = half_dim(m);
                let a = rank as f64 / 2.0;
                let sampler = MatrixBetaSampler::new(m, a, dm)?;
                let ln_scale = ln_pre + m as f64 / 2.0 * t.det().ln() - m as f64 * std::f64::consts::LN_2
                    + log_stiefel_volume(rank, m)?
                    + siegel_log_beta(m, a, dm)?;
                let e = estimate(spec.n_samples, &spec.rng, |r| {
                    let x = stiefel_point(&root, &sampler.sample(r), rank, r);
                    pow(s.add(&x).det(), alpha - d) * f.eval(&x)
                });
                Ok(e.scaled(ln_scale.exp()))
            }
        },
        Method::Quadrature => match rank {
            1 => {
                let (s0, b0) = (s.get(0, 0), match side {
                    Side::Left => s.get(0, 0),
                    Side::Right => 1.0 - s.get(0, 0),
                });
                let half = m as f64 / 2.0;
                // ∫_{|ω|² < b} g(|ω|²) dω = (σ_{m,1}/2) b^{m/2} ∫_0^1 g(bt) t^{m/2−1} dt
                let ln_radial = log_stiefel_volume(m, 1)? - std::f64::consts::LN_2 + half * b0.ln();
                let v = match side {
                    Side::Left => {
                        let rule = jacobi01(half - 1.0, alpha - 1.0, DEFAULT_NODES);
                        pow(s0, alpha - 1.0)
                            * rule.integrate(|t| f.eval(&SymmetricMatrix::diagonal(&[s0 * t])))
                    }
                    Side::Right => {
                        let rule = jacobi01(half - 1.0, 0.0, DEFAULT_NODES);
                        rule.integrate(|t| {
                            let x = b0 * t;
                            pow(s0 + x, alpha - 1.0) * f.eval(&SymmetricMatrix::diagonal(&[x]))
                        })
                    }
                };
                Ok(MonteCarloEstimate::exact(v * (ln_pre + ln_radial).exp()))
            }
            2 if m == 1 => {
                // ω = ρ(cos φ, sin φ), τ = ρ², ρ dρ = dτ/2
                let s_inv = s.map_spectrum(|l| 1.0 / l);
                let b_inv = bound.map_spectrum(|l| 1.0 / l);
                let angles = periodic(ANGLE_NODES, 2.0 * PI);
                let rule = match side {
                    Side::Left => jacobi01(0.0, alpha - d, DEFAULT_NODES),
                    Side::Right => jacobi01(0.0, 0.0, DEFAULT_NODES),
                };
                let mut total = 0.0;
                for (&phi, &wphi) in angles.nodes.iter().zip(&angles.weights) {
                    let (sn, cs) = phi.sin_cos();
                    let quad = |m: &SymmetricMatrix| {
                        m.get(0, 0) * cs * cs + 2.0 * m.get(0, 1) * cs * sn + m.get(1, 1) * sn * sn
                    };
                    let tau_max = 1.0 / quad(&b_inv);
                    let q_s = quad(&s_inv);
                    let radial = rule.integrate(|t| {
                        let tau = tau_max * t;
                        let x = SymmetricMatrix::new(2, vec![tau * cs * cs, tau * cs * sn, tau * sn * sn])
                            .expect("packed 2x2");
                        let weight = match side {
                            Side::Left => 1.0,
                            Side::Right => pow(1.0 + tau * q_s, alpha - d),
                        };
                        weight * f.eval(&x)
                    });
                    total += wphi * 0.5 * tau_max * radial;
                }
                Ok(MonteCarloEstimate::exact(
                    total * ((alpha - d) * ln_det_s + ln_pre).exp(),
                ))
            }
            _ => Err(Error::Unsupported(format!(
                "quadrature for the omega-form at rank {rank} with m = {m}"
            ))),
        },
        Method::Auto => unreachable!("resolved above"),
    }
}

/// `c u q u' c` for `c = root`, a Haar frame `u ∈ V_{ℓ,m}` and `q` of size `m`.
fn stiefel_point<R: rand::Rng + ?Sized>(root: &Mat, q: &SymmetricMatrix, rank: usize, rng: &mut R) -> SymmetricMatrix {
    let u = sample_stiefel(rank, q.dim(), rng).expect("m <= rank");
    let y = root * u.as_mat();
    SymmetricMatrix::from_dense(&(&y * q.to_dense() * y.transpose())).expect("square")
}

/// Stiefel form of the left half-integer integral for `1 ≤ m < ℓ`:
///
/// ```text
/// c ∫_0^{I_m} |q|^{(ℓ−m−1)/2} |I−q|^{α−d} dq ∫_{V_{ℓ,m}} f(s^{1/2} u q u' s^{1/2}) du,
/// c = 2^{−m} π^{−ℓm/2} / Γ_ℓ(α),
/// ```
///
/// with the unnormalized invariant measure `du` of total mass `σ_{ℓ,m}`.
pub fn ek_stiefel_form(
    alpha: f64,
    m: usize,
    f: &TestFunction,
    s: &SpdMatrix,
    n_samples: usize,
    rng: &RngState,
    method: Method,
) -> Result<MonteCarloEstimate> {
    let rank = s.dim();
    f.check_rank(rank)?;
    check_alpha(rank, alpha)?;
    if m == 0 || m > rank {
        return Err(Error::Domain(format!(
            "Stiefel form needs 1 <= m <= rank, got m={m}, rank={rank}"
        )));
    }
    let d = half_dim(rank);
    let (l, mf) = (rank as f64, m as f64);
    let q_det_power = (l - mf - 1.0) / 2.0;
    let ln_c = -mf * std::f64::consts::LN_2 - l * mf / 2.0 * PI.ln() - ln_siegel_gamma(rank, alpha)?
        + log_stiefel_volume(rank, m)?;
    let root = dense_sqrt(s);
    match method.resolve(rank) {
        Method::Uniform => {
            if m > MAX_INTERVAL_RANK {
                return Err(Error::RankTooLarge {
                    rank: m,
                    max: MAX_INTERVAL_RANK,
                });
            }
            let vol = interval_box_volume(m);
            let e = estimate(n_samples, rng, |r| {
                let q = draw_interval_box(m, r);
                match unit_interval_dets(&q) {
                    Some((dq, dc)) => {
                        let x = stiefel_point(&root, &q, rank, r);
                        vol * pow(dq, q_det_power) * pow(dc, alpha - d) * f.eval(&x)
                    }
                    None => 0.0,
                }
            });
            Ok(e.scaled(ln_c.exp()))
        }
        Method::MatrixBeta => {
            let (a, b) = (l / 2.0, alpha - (l - mf) / 2.0);
            let sampler = MatrixBetaSampler::new(m, a, b)?;
            let ln_scale = ln_c + siegel_log_beta(m, a, b)?;
            let e = estimate(n_samples, rng, |r| {
                let q = sampler.sample(r);
                f.eval(&stiefel_point(&root, &q, rank, r))
            });
            Ok(e.scaled(ln_scale.exp()))
        }
        Method::Quadrature if rank == 2 && m == 1 => {
            let rule = jacobi01(q_det_power, alpha - d, DEFAULT_NODES);
            let angles = periodic(ANGLE_NODES, 2.0 * PI);
            let mut total = 0.0;
            for (&phi, &wphi) in angles.nodes.iter().zip(&angles.weights) {
                let (sn, cs) = phi.sin_cos();
                let y = &root * Mat::from_column_slice(2, 1, &[cs, sn]);
                let (y0, y1) = (y[(0, 0)], y[(1, 0)]);
                total += wphi
                    * rule.integrate(|q| {
                        let x = SymmetricMatrix::new(2, vec![q * y0 * y0, q * y0 * y1, q * y1 * y1])
                            .expect("packed 2x2");
                        f.eval(&x)
                    });
            }
            // the angular rule integrates du directly, so drop σ_{2,1}
            let ln_scale = ln_c - log_stiefel_volume(2, 1)?;
            Ok(MonteCarloEstimate::exact(total * ln_scale.exp()))
        }
        other => Err(Error::Unsupported(format!(
            "Stiefel form with method {other:?} at rank {rank}, m = {m}"
        ))),
    }
}
