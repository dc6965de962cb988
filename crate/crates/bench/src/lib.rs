//! Fixed inputs shared by the benchmarks.

use matcone::{SpdMatrix, SymmetricMatrix};

/// A rank-two point well inside the unit interval.
pub fn interior_point() -> SpdMatrix {
    SpdMatrix::new(SymmetricMatrix::new(2, vec![0.6, 0.1, 0.45]).expect("packed 2x2"))
        .expect("positive definite")
}

/// A rank-one point.
pub fn scalar_point(s: f64) -> SpdMatrix {
    SpdMatrix::new(SymmetricMatrix::diagonal(&[s])).expect("positive")
}
