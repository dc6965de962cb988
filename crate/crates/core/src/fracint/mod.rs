//! Fractional integrals on the cone of positive definite matrices.
//!
//! With `d = (ℓ+1)/2` the Gårding–Gindikin integrals are
//!
//! ```text
//! (I_+^α f)(s) = Γ_ℓ(α)^{-1} ∫_0^s f(r) |s−r|^{α−d} dr
//! (I_−^α f)(s) = Γ_ℓ(α)^{-1} ∫_s^I f(r) |r−s|^{α−d} dr
//! ```
//!
//! and the Erdélyi–Kober integrals carry the extra weight `|r|^{β−d}` and the
//! normalization `|s|^{d−α−β} / Γ_ℓ(β)`. After the congruence that maps the
//! integration range onto the unit interval `Q = {0 < w < I}` every generic
//! form reduces to `∫_Q F(w) |w|^a |I−w|^b dw`, which is evaluated by one of
//! three [`Method`]s.

mod cayley;
mod cubature;
mod ek;
mod gg;
mod transform;

pub use cayley::{cayley_apply, cayley_function, default_step, gg_continued, MIN_STEP};
pub use cubature::{interval_cubature, CubatureSize};
pub use ek::{ek_integral, ek_omega_form, ek_stiefel_form};
pub use gg::{gg_halfint, gg_integral};
pub use transform::{gg_distribution, laplace};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat, SpdMatrix, SymmetricMatrix};
use crate::mc::{estimate, MonteCarloEstimate, RngState};
use crate::quadrature::{jacobi01, DEFAULT_NODES};
use crate::sampling::{
    draw_interval_box, interval_box_volume, unit_interval_dets, MatrixBetaSampler,
    MAX_INTERVAL_RANK,
};
use crate::special::{half_dim, siegel_log_beta, siegel_log_gamma};
use crate::testfn::TestFunction;

/// Direction of integration: `(0, s)` or `(s, I)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" | "+" => Ok(Side::Left),
            "right" | "-" => Ok(Side::Right),
            other => Err(Error::Domain(format!("side must be left or right, got '{other}'"))),
        }
    }
}

/// The `β` parameter of an Erdélyi–Kober integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WallachParameter {
    /// `β = m/2`.
    HalfInteger(usize),
    /// `β > (ℓ−1)/2`.
    Generic(f64),
}

impl WallachParameter {
    pub fn value(&self) -> f64 {
        match *self {
            WallachParameter::HalfInteger(m) => m as f64 / 2.0,
            WallachParameter::Generic(b) => b,
        }
    }

    /// Validates against rank `ℓ`. Half-integers `m/2` with `m ≥ ℓ` lie in
    /// the generic range and are returned as `Generic`.
    pub fn resolve(&self, rank: usize) -> Result<WallachParameter> {
        let lower = (rank as f64 - 1.0) / 2.0;
        match *self {
            WallachParameter::HalfInteger(0) => Err(Error::Domain(
                "half-integer beta needs m >= 1".into(),
            )),
            WallachParameter::HalfInteger(m) if m >= rank => {
                Ok(WallachParameter::Generic(m as f64 / 2.0))
            }
            WallachParameter::HalfInteger(m) => Ok(WallachParameter::HalfInteger(m)),
            WallachParameter::Generic(b) if b > lower => Ok(WallachParameter::Generic(b)),
            WallachParameter::Generic(b) => Err(Error::Domain(format!(
                "beta must exceed {lower} for rank {rank}, got {b}"
            ))),
        }
    }
}

/// How an integral is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Quadrature for rank one, uniform sampling otherwise.
    Auto,
    /// Uniform rejection sampling from a box (rank at most 3).
    Uniform,
    /// Importance sampling from a matrix beta law matched to the kernel.
    MatrixBeta,
    /// Gauss rules (rank at most 2).
    Quadrature,
}

impl Method {
    pub(crate) fn resolve(self, rank: usize) -> Method {
        match self {
            Method::Auto if rank == 1 => Method::Quadrature,
            Method::Auto => Method::Uniform,
            m => m,
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Method::Auto),
            "uniform" => Ok(Method::Uniform),
            "matrix-beta" => Ok(Method::MatrixBeta),
            "quadrature" => Ok(Method::Quadrature),
            other => Err(Error::Domain(format!(
                "method must be auto, uniform, matrix-beta or quadrature, got '{other}'"
            ))),
        }
    }
}

/// Side, order, evaluation point and sampling budget of one integral.
#[derive(Debug, Clone)]
pub struct IntegralSpec {
    pub side: Side,
    pub alpha: f64,
    pub s: SpdMatrix,
    pub n_samples: usize,
    pub rng: RngState,
    pub method: Method,
}

impl IntegralSpec {
    pub fn new(side: Side, alpha: f64, s: SpdMatrix) -> Self {
        Self {
            side,
            alpha,
            s,
            n_samples: 1_000_000,
            rng: RngState::new(0),
            method: Method::Auto,
        }
    }

    pub fn samples(mut self, n: usize) -> Self {
        self.n_samples = n;
        self
    }

    pub fn rng(mut self, rng: RngState) -> Self {
        self.rng = rng;
        self
    }

    pub fn method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn rank(&self) -> usize {
        self.s.dim()
    }

    /// Checks `α > (ℓ−1)/2`, the rank of `f`, and `s < I` on the right side.
    pub(crate) fn validate(&self, f: &TestFunction) -> Result<()> {
        let rank = self.rank();
        f.check_rank(rank)?;
        check_alpha(rank, self.alpha)?;
        if self.side == Side::Right && !self.s.in_unit_interval() {
            return Err(Error::PointOutsideQ);
        }
        Ok(())
    }
}

pub(crate) fn check_alpha(rank: usize, alpha: f64) -> Result<()> {
    let lower = (rank as f64 - 1.0) / 2.0;
    if alpha > lower {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "alpha must exceed {lower} for rank {rank}, got {alpha}"
        )))
    }
}

pub(crate) fn ln_siegel_gamma(rank: usize, x: f64) -> Result<f64> {
    siegel_log_gamma(rank, x)
}

/// `x^p`, with `0^0 = 1`.
#[inline]
pub(crate) fn pow(x: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else {
        x.powf(p)
    }
}

/// Dense `s^{1/2}` for congruences.
pub(crate) fn dense_sqrt(s: &SpdMatrix) -> Mat {
    s.sqrt().to_dense()
}

/// `c + b w b'` for symmetric `c`, `w` and a square `b`.
pub(crate) fn shifted_congruence(c: Option<&SymmetricMatrix>, w: &SymmetricMatrix, b: &Mat) -> SymmetricMatrix {
    let n = w.dim();
    let wd = w.to_dense();
    let prod = b * wd * b.transpose();
    SymmetricMatrix::from_fn(n, |i, j| {
        let base = c.map_or(0.0, |c| c.get(i, j));
        base + 0.5 * (prod[(i, j)] + prod[(j, i)])
    })
}

/// `∫_Q F(w) |w|^a |I−w|^b dw` for `a, b > −1`.
pub(crate) fn interval_integral<F>(
    rank: usize,
    a: f64,
    b: f64,
    method: Method,
    n_samples: usize,
    rng: &RngState,
    integrand: F,
) -> Result<MonteCarloEstimate>
where
    F: Fn(&SymmetricMatrix) -> f64 + Sync,
{
    match method.resolve(rank) {
        Method::Uniform => {
            if rank > MAX_INTERVAL_RANK {
                return Err(Error::RankTooLarge {
                    rank,
                    max: MAX_INTERVAL_RANK,
                });
            }
            let vol = interval_box_volume(rank);
            Ok(estimate(n_samples, rng, |r| {
                let w = draw_interval_box(rank, r);
                match unit_interval_dets(&w) {
                    Some((dw, dc)) => vol * pow(dw, a) * pow(dc, b) * integrand(&w),
                    None => 0.0,
                }
            }))
        }
        Method::MatrixBeta => {
            let d = half_dim(rank);
            let sampler = MatrixBetaSampler::new(rank, a + d, b + d)?;
            let scale = siegel_log_beta(rank, a + d, b + d)?.exp();
            Ok(estimate(n_samples, rng, |r| integrand(&sampler.sample(r))).scaled(scale))
        }
        Method::Quadrature => match rank {
            1 => {
                let rule = jacobi01(a, b, DEFAULT_NODES);
                let v = rule.integrate(|t| integrand(&SymmetricMatrix::diagonal(&[t])));
                Ok(MonteCarloEstimate::exact(v))
            }
            2 => Ok(MonteCarloEstimate::exact(interval_cubature(
                a,
                b,
                CubatureSize::default(),
                &integrand,
            ))),
            _ => Err(Error::Unsupported(format!(
                "quadrature is implemented for rank 1 and 2, got rank {rank}"
            ))),
        },
        Method::Auto => unreachable!("resolved above"),
    }
}
