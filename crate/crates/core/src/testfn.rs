//! Integrands on symmetric matrices.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;

/// Where a test function is known to be supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    /// The closed cone of positive semidefinite matrices.
    Cone,
    /// The closed unit interval `0 ≤ r ≤ I`.
    UnitInterval,
    /// A compact subset of the open interval `0 < r < I`.
    CompactInQ,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    Continuous,
    Smooth,
}

type Eval = dyn Fn(&SymmetricMatrix) -> f64 + Send + Sync;

/// A named real function on `ℓ × ℓ` symmetric matrices.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    rank: usize,
    support: Support,
    smoothness: Smoothness,
    eval: Arc<Eval>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("rank", &self.rank)
            .field("support", &self.support)
            .field("smoothness", &self.smoothness)
            .finish()
    }
}

/// Frobenius radius of the bump around `I/2`.
const BUMP_RADIUS: f64 = 0.4;

impl TestFunction {
    pub fn new(
        name: impl Into<String>,
        rank: usize,
        support: Support,
        smoothness: Smoothness,
        eval: impl Fn(&SymmetricMatrix) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            rank,
            support,
            smoothness,
            eval: Arc::new(eval),
        }
    }

    pub fn const1(rank: usize) -> Self {
        Self::new("const1", rank, Support::Cone, Smoothness::Smooth, |_| 1.0)
    }

    /// `exp(−tr r)`.
    pub fn exp_tr(rank: usize) -> Self {
        Self::new("exp-tr", rank, Support::Cone, Smoothness::Smooth, |r| {
            (-r.trace()).exp()
        })
    }

    pub fn trace(rank: usize) -> Self {
        Self::new("trace", rank, Support::Cone, Smoothness::Smooth, |r| r.trace())
    }

    /// `|r|^p`, set to zero where the determinant is not positive.
    pub fn det_power(rank: usize, p: f64) -> Self {
        Self::new(
            format!("det-p({p})"),
            rank,
            Support::Cone,
            Smoothness::Continuous,
            move |r| {
                let d = r.det();
                if d > 0.0 {
                    d.powf(p)
                } else if p == 0.0 {
                    1.0
                } else {
                    0.0
                }
            },
        )
    }

    /// `exp(−1/(1−q))` with `q = ‖r − I/2‖²_F / 0.4²`, zero for `q ≥ 1`.
    /// Smooth with compact support inside the unit interval.
    pub fn bump(rank: usize) -> Self {
        Self::new("bump", rank, Support::CompactInQ, Smoothness::Smooth, move |r| {
            let n = r.dim();
            let mut q = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let shift = if i == j { 0.5 } else { 0.0 };
                    let x = r.get(i, j) - shift;
                    q += x * x;
                }
            }
            q /= BUMP_RADIUS * BUMP_RADIUS;
            if q < 1.0 {
                (-1.0 / (1.0 - q)).exp()
            } else {
                0.0
            }
        })
    }

    /// Looks up a built-in function by its command-line name.
    pub fn by_name(name: &str, rank: usize, power: f64) -> Result<Self> {
        match name {
            "const1" => Ok(Self::const1(rank)),
            "exp-tr" => Ok(Self::exp_tr(rank)),
            "trace" => Ok(Self::trace(rank)),
            "det-p" => Ok(Self::det_power(rank, power)),
            "bump" => Ok(Self::bump(rank)),
            other => Err(Error::Domain(format!(
                "unknown test function '{other}' (expected const1, exp-tr, trace, det-p, bump)"
            ))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    #[inline]
    pub fn eval(&self, r: &SymmetricMatrix) -> f64 {
        (self.eval)(r)
    }

    /// `r ↦ f(I − r)`.
    pub fn reflected(&self) -> Self {
        let inner = self.clone();
        Self::new(
            format!("{}(I-r)", self.name),
            self.rank,
            self.support,
            self.smoothness,
            move |r| inner.eval(&r.complement()),
        )
    }

    /// `r ↦ |r|^p f(r)`.
    pub fn det_weighted(&self, p: f64) -> Self {
        let inner = self.clone();
        Self::new(
            format!("|r|^{p}*{}", self.name),
            self.rank,
            self.support,
            Smoothness::Continuous,
            move |r| {
                let d = r.det();
                if d > 0.0 {
                    d.powf(p) * inner.eval(r)
                } else {
                    0.0
                }
            },
        )
    }

    pub fn check_rank(&self, rank: usize) -> Result<()> {
        if self.rank == rank {
            Ok(())
        } else {
            Err(Error::DimMismatch {
                expected: rank,
                found: self.rank,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins() {
        let r = SymmetricMatrix::new(2, vec![0.5, 0.1, 0.4]).unwrap();
        assert_eq!(TestFunction::const1(2).eval(&r), 1.0);
        assert!((TestFunction::exp_tr(2).eval(&r) - (-0.9f64).exp()).abs() < 1e-15);
        assert!((TestFunction::trace(2).eval(&r) - 0.9).abs() < 1e-15);
        assert!((TestFunction::det_power(2, 2.0).eval(&r) - 0.19f64.powi(2)).abs() < 1e-15);
        assert!((TestFunction::exp_tr(2).reflected().eval(&r) - (-1.1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn bump_is_supported_inside_unit_interval() {
        let f = TestFunction::bump(2);
        assert!((f.eval(&SymmetricMatrix::scaled_identity(2, 0.5)) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(f.eval(&SymmetricMatrix::scaled_identity(2, 0.1)), 0.0);
        assert_eq!(f.eval(&SymmetricMatrix::scaled_identity(2, 0.9)), 0.0);
        assert_eq!(TestFunction::bump(1).eval(&SymmetricMatrix::diagonal(&[0.95])), 0.0);
    }

    #[test]
    fn lookup_by_name() {
        assert_eq!(TestFunction::by_name("trace", 3, 0.0).unwrap().rank(), 3);
        assert!(TestFunction::by_name("sin", 1, 0.0).is_err());
    }
}
