//! Shared numeric kernel: quadrature, Bessel functions, dense linear algebra
//! and small fitting helpers.

pub mod bessel;
pub mod fit;
pub mod linalg;
pub mod quadrature;

pub use bessel::{bessel_j, bessel_j_seq, bessel_tail_bound};
pub use fit::{linear_fit, linspace, log_log_fit, logspace, LinearFit};
pub use linalg::{eig_antisym, lu_det, lu_det_complex, lu_log_det, solve, solve_complex, solve_matrix, AntisymSpectrum};
pub use quadrature::{breakpoints, gauss_legendre_16, integrate, integrate_split, QuadOptions, QuadValue, QuadratureResult};
