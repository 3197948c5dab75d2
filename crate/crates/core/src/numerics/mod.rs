//! Shared numerical kernel: quadrature, finite differences, small dense
//! linear algebra, the seeded generator, special functions and the
//! Kolmogorov-Smirnov test.

mod diff;
mod interval;
mod ks;
mod linalg;
mod quadrature;
mod rng;
mod special;

pub use diff::{grad_fd, hessian_fd, jacobian_fd};
pub use interval::Interval;
pub use ks::{kolmogorov_survival, ks_test, KsResult};
pub use linalg::Matrix;
pub use quadrature::{integrate, integrate_pieces, Quadrature, DEFAULT_REL_TOL};
pub use rng::{derive_seed, SeededRng};
pub use special::{ln_sigmoid, normal_cdf, normal_pdf, normal_quantile, normal_sf, sigmoid};
