//! Radon transforms on Stiefel and Grassmann manifolds.
//!
//! Frames follow the bottom-block convention: the canonical frames are
//! `[0; I_p]` and the zonal coordinates of `v ∈ V_{n,m}` are its last `ℓ`
//! rows. For `ξ ∈ V_{n,n−k}` the Radon transform averages `f` over the
//! `m`-frames inside the `k`-plane `ξ^⊥`:
//!
//! ```text
//! (Rf)(ξ)   = ∫_{V_{k,m}}       f(g_ξ [ω; 0]) d_*ω,   g_ξ [0; I_{n−k}] = ξ
//! (R*φ)(v)  = ∫_{V_{n−m,n−k}}   φ(γ_v [u; 0]) d_*u,   γ_v [0; I_m]     = v
//! ```
//!
//! The first `k` columns of `g_ξ` span `ξ^⊥`, so only that block is used.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracint::{ek_integral, IntegralSpec, Method, Side, WallachParameter};
use crate::linalg::{Mat, SpdMatrix, StiefelFrame, SymmetricMatrix};
use crate::mc::{estimate, z_score, MonteCarloEstimate, RngState};
use crate::sampling::{sample_stiefel, standard_normal_matrix};
use crate::special::{half_dim, siegel_log_gamma};
use crate::testfn::TestFunction;

/// Extra room above `(ℓ−1)/2` that `α = (k−m)/2` needs before a theorem
/// check at rank `ℓ ≥ 2` is attempted.
pub const VARIANCE_MARGIN: f64 = 0.25;

/// Smallest eigenvalue a projection profile must have to count as interior.
pub const INTERIOR_TOL: f64 = 1e-3;

/// Resampling budget for an interior projection profile.
pub const MAX_TRIES: usize = 100;

/// Dimensions `(n, m, k)` of a Radon transform and the zonal rank `ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GrassmannConfig {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub rank: usize,
}

impl GrassmannConfig {
    /// Requires `1 ≤ m < k ≤ n−1` and `1 ≤ ℓ ≤ n`.
    pub fn new(n: usize, m: usize, k: usize, rank: usize) -> Result<Self> {
        if !(1 <= m && m < k && k < n) {
            return Err(Error::ConstraintViolation(format!(
                "need 1 <= m < k <= n-1, got n={n}, m={m}, k={k}"
            )));
        }
        if rank == 0 || rank > n {
            return Err(Error::ConstraintViolation(format!(
                "need 1 <= l <= n, got l={rank}, n={n}"
            )));
        }
        Ok(Self { n, m, k, rank })
    }

    /// `(k−m)/2`, the order of both theorems.
    pub fn order(&self) -> f64 {
        (self.k - self.m) as f64 / 2.0
    }

    fn check_margin(&self) -> Result<()> {
        let floor = half_dim(self.rank) - 1.0 + VARIANCE_MARGIN;
        if self.rank > 1 && self.order() <= floor {
            return Err(Error::ConstraintViolation(format!(
                "(k-m)/2 = {} is within the variance margin (needs > {floor}) at l={}",
                self.order(),
                self.rank
            )));
        }
        Ok(())
    }

    /// Preconditions of the Radon theorem: `ℓ ≤ k−m` and the variance margin.
    pub fn check_radon_theorem(&self) -> Result<()> {
        if self.rank > self.k - self.m {
            return Err(Error::ConstraintViolation(format!(
                "l > k-m: l={}, k-m={}",
                self.rank,
                self.k - self.m
            )));
        }
        self.check_margin()
    }

    /// Preconditions of the dual theorem: `ℓ ≤ min(k−m, n−m)` and the margin.
    pub fn check_dual_theorem(&self) -> Result<()> {
        let cap = (self.k - self.m).min(self.n - self.m);
        if self.rank > cap {
            return Err(Error::ConstraintViolation(format!(
                "l > min(k-m, n-m): l={}, min={cap}",
                self.rank
            )));
        }
        self.check_margin()
    }

    fn expect_frame(&self, frame: &StiefelFrame, cols: usize) -> Result<()> {
        if frame.n() != self.n || frame.m() != cols {
            return Err(Error::Dim(format!(
                "expected a {}x{cols} frame, got {}x{}",
                self.n,
                frame.n(),
                frame.m()
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for GrassmannConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "n={},m={},k={},l={}", self.n, self.m, self.k, self.rank)
    }
}

/// The lift `v ↦ f₀(σ'vv'σ)` of a profile on `ℓ × ℓ` matrices to frames in
/// `V_{n,p}`, where `σ'v` is the last `ℓ` rows of `v`.
#[derive(Debug, Clone)]
pub struct ZonalFunction {
    profile: TestFunction,
    n: usize,
    cols: usize,
}

impl ZonalFunction {
    pub fn new(profile: TestFunction, n: usize, cols: usize) -> Result<Self> {
        if profile.rank() > n || cols == 0 || cols > n {
            return Err(Error::Dim(format!(
                "zonal lift of rank {} to V_({n},{cols})",
                profile.rank()
            )));
        }
        Ok(Self { profile, n, cols })
    }

    pub fn profile(&self) -> &TestFunction {
        &self.profile
    }

    pub fn rank(&self) -> usize {
        self.profile.rank()
    }

    /// `σ'vv'σ` for an `n × p` matrix `v`.
    pub fn coordinates(&self, v: &Mat) -> SymmetricMatrix {
        zonal_gram(v, self.rank())
    }

    pub fn eval(&self, v: &Mat) -> f64 {
        debug_assert_eq!((v.nrows(), v.ncols()), (self.n, self.cols));
        self.profile.eval(&self.coordinates(v))
    }
}

/// `BB'` for the last `rank` rows `B` of `v`.
fn zonal_gram(v: &Mat, rank: usize) -> SymmetricMatrix {
    let off = v.nrows() - rank;
    SymmetricMatrix::from_fn(rank, |i, j| {
        (0..v.ncols()).map(|c| v[(off + i, c)] * v[(off + j, c)]).sum()
    })
}

/// An orthogonal `g` whose last `p` columns are `ξ`, so `g [0; I_p] = ξ`.
/// The first `n − p` columns are a random orthonormal basis of `ξ^⊥`.
pub fn rotation_to_frame<R: Rng + ?Sized>(xi: &StiefelFrame, rng: &mut R) -> Mat {
    let (n, p) = (xi.n(), xi.m());
    let x = xi.as_mat();
    let mut g = Mat::zeros(n, n);
    g.columns_mut(n - p, p).copy_from(x);
    if p == n {
        return g;
    }
    loop {
        let mut y = standard_normal_matrix(n, n - p, rng);
        // project twice against ξ to keep the residual at rounding level
        for _ in 0..2 {
            let coeff = x.transpose() * &y;
            y -= x * coeff;
        }
        if let Ok(q) = StiefelFrame::orthonormalize(&y) {
            g.columns_mut(0, n - p).copy_from(q.as_mat());
            return g;
        }
    }
}

/// `s = I_ℓ − σ'ξξ'σ`, the Gram matrix of the projection of the last `ℓ`
/// coordinate axes onto `ξ^⊥`, with its spectrum clamped to `[0, 1]`.
pub fn projection_profile(xi: &StiefelFrame, rank: usize) -> Result<SymmetricMatrix> {
    if rank == 0 || rank > xi.n() {
        return Err(Error::Dim(format!("profile rank {rank} for n={}", xi.n())));
    }
    Ok(zonal_gram(xi.as_mat(), rank).complement().clamp_spectrum(0.0, 1.0))
}

/// `(Rf)(ξ)` for `ξ ∈ V_{n,n−k}` and a right-invariant `f` on `V_{n,m}`.
pub fn radon<F>(
    f: &F,
    xi: &StiefelFrame,
    cfg: &GrassmannConfig,
    n_samples: usize,
    rng: &RngState,
) -> Result<MonteCarloEstimate>
where
    F: Fn(&Mat) -> f64 + Sync + ?Sized,
{
    cfg.expect_frame(xi, cfg.n - cfg.k)?;
    let g = rotation_to_frame(xi, &mut rng.derive("completion").rng());
    let basis = g.columns(0, cfg.k).into_owned();
    Ok(frame_average(f, &basis, cfg.m, n_samples, rng))
}

/// `(R*φ)(v)` for `v ∈ V_{n,m}` and a right-invariant `φ` on `V_{n,n−k}`.
pub fn dual_radon<F>(
    phi: &F,
    v: &StiefelFrame,
    cfg: &GrassmannConfig,
    n_samples: usize,
    rng: &RngState,
) -> Result<MonteCarloEstimate>
where
    F: Fn(&Mat) -> f64 + Sync + ?Sized,
{
    cfg.expect_frame(v, cfg.m)?;
    let g = rotation_to_frame(v, &mut rng.derive("completion").rng());
    let basis = g.columns(0, cfg.n - cfg.m).into_owned();
    Ok(frame_average(phi, &basis, cfg.n - cfg.k, n_samples, rng))
}

/// `E[f(Cω)]` over Haar `ω ∈ V_{q,p}` for an `n × q` orthonormal `C`.
fn frame_average<F>(f: &F, basis: &Mat, p: usize, n_samples: usize, rng: &RngState) -> MonteCarloEstimate
where
    F: Fn(&Mat) -> f64 + Sync + ?Sized,
{
    let q = basis.ncols();
    estimate(n_samples, rng, |r| {
        let omega = sample_stiefel(q, p, r).expect("p <= q");
        f(&(basis * omega.as_mat()))
    })
}

/// Both sides of a theorem check.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremCheck {
    pub lhs: MonteCarloEstimate,
    pub rhs: MonteCarloEstimate,
    pub z: f64,
    /// The zonal argument at which the integral side was evaluated.
    pub profile: SymmetricMatrix,
    /// Frames drawn before an interior profile was found.
    pub tries: usize,
}

/// Haar frame in `V_{n,p}` whose profile has all eigenvalues above
/// [`INTERIOR_TOL`].
fn interior_frame(
    n: usize,
    p: usize,
    rank: usize,
    rng: &RngState,
) -> Result<(StiefelFrame, SpdMatrix, usize)> {
    let mut r = rng.rng();
    for tries in 1..=MAX_TRIES {
        let frame = sample_stiefel(n, p, &mut r)?;
        let s = projection_profile(&frame, rank)?;
        if s.min_eigenvalue() > INTERIOR_TOL {
            return Ok((frame, SpdMatrix::new(s)?, tries));
        }
    }
    Err(Error::DegenerateProjection { tries: MAX_TRIES })
}

fn integral_method(rank: usize) -> Method {
    if rank == 1 {
        Method::Quadrature
    } else {
        Method::MatrixBeta
    }
}

/// `(Rf)(ξ)` against `Γ_ℓ(k/2) (J_+^{(k−m)/2, m/2} f₀)(s)` at a Haar `ξ`,
/// for the zonal lift `f` of `f₀`.
pub fn verify_radon_theorem(
    cfg: &GrassmannConfig,
    profile: &TestFunction,
    n_samples: usize,
    rng: &RngState,
) -> Result<TheoremCheck> {
    cfg.check_radon_theorem()?;
    profile.check_rank(cfg.rank)?;
    let (xi, s, tries) = interior_frame(cfg.n, cfg.n - cfg.k, cfg.rank, &rng.derive("frame"))?;
    let lift = ZonalFunction::new(profile.clone(), cfg.n, cfg.m)?;
    let lhs = radon(&|v: &Mat| lift.eval(v), &xi, cfg, n_samples, &rng.derive("lhs"))?;
    let spec = IntegralSpec::new(Side::Left, cfg.order(), s.clone())
        .samples(n_samples)
        .rng(rng.derive("rhs"))
        .method(integral_method(cfg.rank));
    let scale = siegel_log_gamma(cfg.rank, cfg.k as f64 / 2.0)?.exp();
    let rhs = ek_integral(&spec, WallachParameter::HalfInteger(cfg.m), profile)?.scaled(scale);
    Ok(TheoremCheck {
        z: z_score(&lhs, &rhs),
        lhs,
        rhs,
        profile: s.into_sym(),
        tries,
    })
}

/// `(R*φ)(v)` against `Γ_ℓ((n−m)/2) (J_+^{(k−m)/2, (n−k)/2} φ₀)(r)` with
/// `r = I − σ'vv'σ` at a Haar `v`, for the zonal lift `φ` of `φ₀`.
pub fn verify_dual_theorem(
    cfg: &GrassmannConfig,
    profile: &TestFunction,
    n_samples: usize,
    rng: &RngState,
) -> Result<TheoremCheck> {
    cfg.check_dual_theorem()?;
    profile.check_rank(cfg.rank)?;
    let (v, r, tries) = interior_frame(cfg.n, cfg.m, cfg.rank, &rng.derive("frame"))?;
    let lift = ZonalFunction::new(profile.clone(), cfg.n, cfg.n - cfg.k)?;
    let lhs = dual_radon(&|x: &Mat| lift.eval(x), &v, cfg, n_samples, &rng.derive("lhs"))?;
    let spec = IntegralSpec::new(Side::Left, cfg.order(), r.clone())
        .samples(n_samples)
        .rng(rng.derive("rhs"))
        .method(integral_method(cfg.rank));
    let scale = siegel_log_gamma(cfg.rank, (cfg.n - cfg.m) as f64 / 2.0)?.exp();
    let rhs =
        ek_integral(&spec, WallachParameter::HalfInteger(cfg.n - cfg.k), profile)?.scaled(scale);
    Ok(TheoremCheck {
        z: z_score(&lhs, &rhs),
        lhs,
        rhs,
        profile: r.into_sym(),
        tries,
    })
}

/// Nested estimates of the two sides of the duality
/// `∫ (Rf)(ξ) φ(ξ) d_*ξ = ∫ f(v) (R*φ)(v) d_*v`
/// for zonal lifts of `f₀` (on `V_{n,m}`) and `φ₀` (on `V_{n,n−k}`).
/// Each outer draw carries an independent inner estimate, so the outer
/// sample variance already includes the inner noise.
pub fn duality_sides(
    cfg: &GrassmannConfig,
    f0: &TestFunction,
    phi0: &TestFunction,
    outer: usize,
    inner: usize,
    rng: &RngState,
) -> Result<(MonteCarloEstimate, MonteCarloEstimate)> {
    let f = ZonalFunction::new(f0.clone(), cfg.n, cfg.m)?;
    let phi = ZonalFunction::new(phi0.clone(), cfg.n, cfg.n - cfg.k)?;
    let f_eval = |v: &Mat| f.eval(v);
    let phi_eval = |x: &Mat| phi.eval(x);
    let frame_side = estimate(outer, &rng.derive("frames"), |r| {
        let xi = sample_stiefel(cfg.n, cfg.n - cfg.k, r).expect("valid dims");
        let sub = RngState::new(r.random());
        let rf = radon(&f_eval, &xi, cfg, inner, &sub).expect("valid frame").value;
        rf * phi_eval(xi.as_mat())
    });
    let plane_side = estimate(outer, &rng.derive("planes"), |r| {
        let v = sample_stiefel(cfg.n, cfg.m, r).expect("valid dims");
        let sub = RngState::new(r.random());
        let dual = dual_radon(&phi_eval, &v, cfg, inner, &sub).expect("valid frame").value;
        f_eval(v.as_mat()) * dual
    });
    Ok((frame_side, plane_side))
}
