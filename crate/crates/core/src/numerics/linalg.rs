//! Dense linear algebra on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub fn lu_det(m: &DMatrix<f64>) -> f64 {
    m.clone().lu().determinant()
}

pub fn lu_det_complex(m: &DMatrix<Complex64>) -> Complex64 {
    m.clone().lu().determinant()
}

/// Natural log of |det| together with the sign, robust against overflow.
pub fn lu_log_det(m: &DMatrix<f64>) -> (f64, f64) {
    let lu = m.clone().lu();
    let u = lu.u();
    let mut log = 0.0;
    let mut sign = if lu.p().determinant::<f64>() < 0.0 { -1.0 } else { 1.0 };
    for i in 0..u.nrows() {
        let d = u[(i, i)];
        if d == 0.0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        if d < 0.0 {
            sign = -sign;
        }
        log += d.abs().ln();
    }
    (log, sign)
}

pub fn solve(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    m.clone().lu().solve(rhs).ok_or(Error::Singular)
}

pub fn solve_matrix(m: &DMatrix<f64>, rhs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    m.clone().lu().solve(rhs).ok_or(Error::Singular)
}

pub fn solve_complex(m: &DMatrix<Complex64>, rhs: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    m.clone().lu().solve(rhs).ok_or(Error::Singular)
}

/// Spectrum of a real antisymmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct AntisymSpectrum {
    /// Nonnegative ν_k sorted ascending, one per ± pair.
    pub nu: Vec<f64>,
    /// Largest |λ + λ'| over paired eigenvalues of iΓ.
    pub pairing_residual: f64,
}

/// Eigenvalues ±ν_k of iΓ for real antisymmetric Γ of even dimension.
///
/// Fails if Γ is not antisymmetric to 1e-12 or if the spectrum of iΓ does not
/// split into ± pairs to `1e-10·‖Γ‖`.
pub fn eig_antisym(gamma: &DMatrix<f64>) -> Result<AntisymSpectrum> {
    let n = gamma.nrows();
    if n != gamma.ncols() || n % 2 != 0 {
        return Err(Error::InvalidCovariance(format!("expected even square matrix, got {}x{}", n, gamma.ncols())));
    }
    let scale = gamma.amax().max(1.0);
    let asym = (gamma + gamma.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(Error::InvalidCovariance(format!("not antisymmetric: max |G + G^T| = {asym:e}")));
    }
    if n == 0 {
        return Ok(AntisymSpectrum {
            nu: vec![],
            pairing_residual: 0.0,
        });
    }
    let ig = gamma.map(|x| Complex64::new(0.0, x));
    let mut ev: Vec<f64> = ig.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let norm = gamma.norm();
    let mut residual: f64 = 0.0;
    for i in 0..n / 2 {
        residual = residual.max((ev[i] + ev[n - 1 - i]).abs());
    }
    if residual > 1e-10 * norm.max(1.0) {
        return Err(Error::InvalidCovariance(format!("spectrum of i*gamma is not paired: residual {residual:e}")));
    }
    let mut nu: Vec<f64> = (0..n / 2).map(|i| 0.5 * (ev[n - 1 - i] - ev[i])).collect();
    nu.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(AntisymSpectrum {
        nu,
        pairing_residual: residual,
    })
}
