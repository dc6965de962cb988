//! Gamma-type functions of the cone of positive definite matrices.
//!
//! The Siegel gamma function is
//!
//! ```text
//! Γ_ℓ(α) = π^{ℓ(ℓ−1)/4} ∏_{j=0}^{ℓ−1} Γ(α − j/2),
//! ```
//!
//! the matrix beta function is `B_ℓ(α, β) = Γ_ℓ(α)Γ_ℓ(β)/Γ_ℓ(α+β)` and the
//! total mass of the unnormalized invariant measure on the Stiefel manifold
//! `V_{n,m}` is `σ_{n,m} = 2^m π^{nm/2} / Γ_m(n/2)`. Products and ratios are
//! formed in log space and exponentiated once.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Distance to a non-positive integer below which an argument counts as a pole.
pub const POLE_TOL: f64 = 1e-9;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_PI: f64 = 1.144_729_885_849_400_2;

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7, nine terms).
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma needs a positive argument");
    if x < 0.5 {
        // reflection keeps the series on its accurate half-line
        return LN_PI - (PI * x).sin().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (x + 0.5) * t.ln() - t + acc.ln()
}

fn is_pole(x: f64) -> bool {
    x <= POLE_TOL && (x - x.round()).abs() < POLE_TOL
}

/// Signed `Γ(x)`, with the reflection formula for negative arguments.
pub fn gamma(x: f64) -> Result<f64> {
    if is_pole(x) {
        return Err(Error::Pole { rank: 1, alpha: x });
    }
    if x > 0.0 {
        return Ok(ln_gamma(x).exp());
    }
    let g = gamma(1.0 - x)?;
    Ok(PI / ((PI * x).sin() * g))
}

/// `log Γ_ℓ(α)` on the region `α > (ℓ−1)/2` where every factor is positive.
pub fn siegel_log_gamma(rank: usize, alpha: f64) -> Result<f64> {
    check_rank(rank)?;
    let lower = (rank as f64 - 1.0) / 2.0;
    if !(alpha > lower) {
        return Err(Error::Domain(format!(
            "log Siegel gamma of rank {rank} needs alpha > {lower}, got {alpha}"
        )));
    }
    Ok(siegel_log_gamma_unchecked(rank, alpha))
}

fn siegel_log_gamma_unchecked(rank: usize, alpha: f64) -> f64 {
    let l = rank as f64;
    let mut acc = l * (l - 1.0) / 4.0 * LN_PI;
    for j in 0..rank {
        acc += ln_gamma(alpha - j as f64 / 2.0);
    }
    acc
}

/// Signed `Γ_ℓ(α)` for any `α` away from the poles of its factors.
pub fn siegel_gamma(rank: usize, alpha: f64) -> Result<f64> {
    check_rank(rank)?;
    let l = rank as f64;
    if alpha > (l - 1.0) / 2.0 {
        return Ok(siegel_log_gamma_unchecked(rank, alpha).exp());
    }
    let mut acc = PI.powf(l * (l - 1.0) / 4.0);
    for j in 0..rank {
        let x = alpha - j as f64 / 2.0;
        if is_pole(x) {
            return Err(Error::Pole { rank, alpha });
        }
        acc *= gamma(x)?;
    }
    Ok(acc)
}

/// `log B_ℓ(α, β)`.
pub fn siegel_log_beta(rank: usize, alpha: f64, beta: f64) -> Result<f64> {
    let la = siegel_log_gamma(rank, alpha)?;
    let lb = siegel_log_gamma(rank, beta)?;
    let lab = siegel_log_gamma(rank, alpha + beta)?;
    // la + lb is commutative in IEEE arithmetic, so B(α,β) == B(β,α) bitwise
    Ok(la + lb - lab)
}

/// `B_ℓ(α, β) = ∫_0^I |r|^{α−d}|I−r|^{β−d} dr`, for `α, β > (ℓ−1)/2`.
pub fn siegel_beta(rank: usize, alpha: f64, beta: f64) -> Result<f64> {
    Ok(siegel_log_beta(rank, alpha, beta)?.exp())
}

/// `log σ_{n,m}`.
pub fn log_stiefel_volume(n: usize, m: usize) -> Result<f64> {
    if m == 0 || m > n {
        return Err(Error::Dim(format!(
            "Stiefel volume needs 1 <= m <= n, got n={n}, m={m}"
        )));
    }
    let (nf, mf) = (n as f64, m as f64);
    Ok(mf * std::f64::consts::LN_2 + nf * mf / 2.0 * LN_PI - siegel_log_gamma_unchecked(m, nf / 2.0))
}

/// Total mass `σ_{n,m}` of the invariant measure on `V_{n,m}`.
pub fn stiefel_volume(n: usize, m: usize) -> Result<f64> {
    Ok(log_stiefel_volume(n, m)?.exp())
}

/// Half-dimension constant `d = (ℓ+1)/2` of the cone.
pub fn half_dim(rank: usize) -> f64 {
    (rank as f64 + 1.0) / 2.0
}

fn check_rank(rank: usize) -> Result<()> {
    if rank == 0 {
        Err(Error::Dim("cone rank must be >= 1".into()))
    } else {
        Ok(())
    }
}
