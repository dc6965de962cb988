pub mod error;
pub mod fracint;
pub mod linalg;
pub mod mc;
pub mod quadrature;
pub mod radon;
pub mod sampling;
pub mod special;
pub mod suite;
pub mod testfn;

pub use error::{Error, Result};
pub use fracint::{IntegralSpec, Method, Side, WallachParameter};
pub use linalg::{Mat, SpdMatrix, StiefelFrame, SymmetricMatrix};
pub use mc::{MonteCarloEstimate, RngState};
pub use radon::{GrassmannConfig, ZonalFunction};
pub use testfn::TestFunction;
