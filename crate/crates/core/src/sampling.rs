//! Random frames, random points of matrix intervals, matrix-variate
//! Wishart and beta draws, and the polar and bi-Stiefel decompositions.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{Mat, SpdMatrix, StiefelFrame, SymmetricMatrix};

/// Largest rank accepted by the box-rejection interval sampler.
pub const MAX_INTERVAL_RANK: usize = 3;

/// Threshold on the smallest eigenvalue of `I − a'a` in the bi-Stiefel map.
pub const BLOCK_TOL: f64 = 1e-12;

pub fn standard_normal_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Mat {
    Mat::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Haar-distributed frame in `V_{n,m}`: QR of a Gaussian matrix with the
/// `R` diagonal made positive.
pub fn sample_stiefel<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<StiefelFrame> {
    if m == 0 || m > n {
        return Err(Error::Dim(format!("need 1 <= m <= n, got n={n}, m={m}")));
    }
    loop {
        match StiefelFrame::orthonormalize(&standard_normal_matrix(n, m, rng)) {
            Ok(v) => return Ok(v),
            Err(Error::RankDeficient) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Haar-distributed element of `O(n)`.
pub fn sample_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Mat> {
    Ok(sample_stiefel(n, n, rng)?.into_mat())
}

/// Lebesgue volume of the proposal box for the unit interval of rank `rank`.
pub fn interval_box_volume(rank: usize) -> f64 {
    2f64.powi((rank * (rank - 1) / 2) as i32)
}

/// A point of the box `(0,1)^ℓ × (−1,1)^{ℓ(ℓ−1)/2}`, which contains the
/// unit interval `{0 < w < I}`.
pub fn draw_interval_box<R: Rng + ?Sized>(rank: usize, rng: &mut R) -> SymmetricMatrix {
    SymmetricMatrix::from_fn(rank, |i, j| {
        if i == j {
            rng.random::<f64>()
        } else {
            2.0 * rng.random::<f64>() - 1.0
        }
    })
}

/// `|w| · |I − w|` when `0 < w < I`, else `None`.
pub fn unit_interval_dets(w: &SymmetricMatrix) -> Option<(f64, f64)> {
    let det_w = w.pd_det()?;
    let det_c = w.complement().pd_det()?;
    Some((det_w, det_c))
}

/// Uniform point of `{0 < w < I_ℓ}`, by rejection from the box.
pub fn sample_unit_interval<R: Rng + ?Sized>(rank: usize, rng: &mut R) -> Result<SpdMatrix> {
    if rank > MAX_INTERVAL_RANK {
        return Err(Error::RankTooLarge {
            rank,
            max: MAX_INTERVAL_RANK,
        });
    }
    if rank == 0 {
        return Err(Error::Dim("rank must be >= 1".into()));
    }
    loop {
        let w = draw_interval_box(rank, rng);
        if unit_interval_dets(&w).is_some() {
            return Ok(SpdMatrix::new_unchecked(w));
        }
    }
}

/// Uniform point of `{0 < r < s}`. Congruence by `s^{1/2}` maps the unit
/// interval onto it with constant Jacobian `|s|^d`.
pub fn sample_matrix_interval<R: Rng + ?Sized>(s: &SpdMatrix, rng: &mut R) -> Result<SpdMatrix> {
    let w = sample_unit_interval(s.dim(), rng)?;
    let root = s.sqrt().to_dense();
    Ok(SpdMatrix::new_unchecked(w.congruence(&root)))
}

/// Polar decomposition `x = v r^{1/2}` with `r = x'x`.
pub fn polar_decompose(x: &Mat) -> Result<(StiefelFrame, SpdMatrix)> {
    let r = SymmetricMatrix::gram(x);
    if r.cholesky().is_none() {
        return Err(Error::RankDeficient);
    }
    let r = SpdMatrix::new_unchecked(r);
    let v = x * r.inv_sqrt().to_dense();
    Ok((StiefelFrame::new(v)?, r))
}

/// Splits `v ∈ V_{n,m}` as `[a; u (I − a'a)^{1/2}]` with `a` the top `k` rows.
pub fn bistiefel_decompose(v: &StiefelFrame, k: usize) -> Result<(Mat, StiefelFrame)> {
    let (n, m) = (v.n(), v.m());
    if k + m > n {
        return Err(Error::Dim(format!("need k + m <= n, got k={k}, m={m}, n={n}")));
    }
    let a = v.as_mat().rows(0, k).into_owned();
    let block = SymmetricMatrix::gram(&a).complement();
    let min_eig = block.min_eigenvalue();
    if min_eig < BLOCK_TOL {
        return Err(Error::DegenerateBlock { min_eig });
    }
    let inv_root = block.map_spectrum(|l| 1.0 / l.sqrt()).to_dense();
    let u = v.as_mat().rows(k, n - k).into_owned() * inv_root;
    Ok((a, StiefelFrame::new(u)?))
}

/// Inverse of [`bistiefel_decompose`]. Requires `a'a < I`.
pub fn bistiefel_compose(a: &Mat, u: &StiefelFrame) -> Result<StiefelFrame> {
    let m = u.m();
    if a.ncols() != m {
        return Err(Error::DimMismatch {
            expected: m,
            found: a.ncols(),
        });
    }
    let block = SymmetricMatrix::gram(a).complement();
    let min_eig = block.min_eigenvalue();
    if min_eig < 0.0 {
        return Err(Error::DegenerateBlock { min_eig });
    }
    let root = block.map_spectrum(|l| l.max(0.0).sqrt()).to_dense();
    let lower = u.as_mat() * root;
    let (k, rest) = (a.nrows(), lower.nrows());
    let v = Mat::from_fn(k + rest, m, |i, j| if i < k { a[(i, j)] } else { lower[(i - k, j)] });
    StiefelFrame::new(v)
}

/// Wishart draws `W_ℓ(ν, I)` for real `ν > ℓ − 1` via the Bartlett
/// decomposition.
#[derive(Debug, Clone)]
pub struct WishartSampler {
    rank: usize,
    chis: Vec<ChiSquared<f64>>,
}

impl WishartSampler {
    pub fn new(rank: usize, dof: f64) -> Result<Self> {
        if rank == 0 {
            return Err(Error::Dim("rank must be >= 1".into()));
        }
        if !(dof > rank as f64 - 1.0) {
            return Err(Error::Domain(format!(
                "Wishart of rank {rank} needs dof > {}, got {dof}",
                rank - 1
            )));
        }
        let chis = (0..rank)
            .map(|i| ChiSquared::new(dof - i as f64).expect("positive dof"))
            .collect();
        Ok(Self { rank, chis })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Lower Bartlett factor `L` with `W = L L'`.
    pub fn sample_factor<R: Rng + ?Sized>(&self, rng: &mut R) -> Mat {
        let n = self.rank;
        let mut l = Mat::zeros(n, n);
        for i in 0..n {
            l[(i, i)] = self.chis[i].sample(rng).sqrt();
            for j in 0..i {
                l[(i, j)] = rng.sample(StandardNormal);
            }
        }
        l
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SymmetricMatrix {
        SymmetricMatrix::outer_gram(&self.sample_factor(rng))
    }
}

/// Matrix beta draws with density proportional to `|u|^{a−d} |I−u|^{b−d}`
/// on `{0 < u < I}`: with independent `A ~ W(2a)`, `B ~ W(2b)` and
/// `A + B = L L'`, the matrix `L^{-1} A L^{-T}` has this law.
#[derive(Debug, Clone)]
pub struct MatrixBetaSampler {
    first: WishartSampler,
    second: WishartSampler,
}

impl MatrixBetaSampler {
    pub fn new(rank: usize, a: f64, b: f64) -> Result<Self> {
        Ok(Self {
            first: WishartSampler::new(rank, 2.0 * a)?,
            second: WishartSampler::new(rank, 2.0 * b)?,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SymmetricMatrix {
        let a = self.first.sample(rng).to_dense();
        let b = self.second.sample(rng).to_dense();
        let total = &a + &b;
        let l = total.cholesky().expect("sum of Wishart draws is positive definite").l();
        let x = l
            .solve_lower_triangular(&a)
            .expect("nonsingular triangular factor");
        let u = l
            .solve_lower_triangular(&x.transpose())
            .expect("nonsingular triangular factor");
        SymmetricMatrix::from_dense(&u).expect("square")
    }
}
