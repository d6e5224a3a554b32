//! Block entanglement entropy of Gaussian states from the Majorana covariance
//! matrix Γ_pq = i⟨γ_p γ_q⟩ (p ≠ q) of a block of consecutive sites.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::driven::{equal_time_driven, DriveProtocol, TimeGrid};
use crate::dynamic_correlators::{majorana_correlator, majorana_correlator_thermodynamic};
use crate::error::{Error, Result};
use crate::numerics::{eig_antisym, linear_fit, LinearFit};
use crate::spectrum::ChainParams;
use crate::static_correlators::majorana_equal_time_xx;

/// Tolerance on |ν| > 1 before a covariance matrix is rejected.
pub const SPECTRUM_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    pub block_length: usize,
    pub gamma: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Wraps Γ after checking antisymmetry and |ν_k| ≤ 1.
    pub fn new(gamma: DMatrix<f64>) -> Result<Self> {
        let spec = eig_antisym(&gamma)?;
        if let Some(nu) = spec.nu.iter().find(|v| **v > 1.0 + SPECTRUM_SLACK) {
            return Err(Error::InvalidCovariance(format!("eigenvalue {nu} of i*gamma outside [-1, 1]")));
        }
        Ok(CovarianceMatrix {
            block_length: gamma.nrows() / 2,
            gamma,
        })
    }

    /// Nonnegative ν_k, ascending.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        Ok(eig_antisym(&self.gamma)?.nu)
    }
}

/// Equal-time correlator B_l with i⟨γ_{2a−1}γ_{2b}⟩ = B_{b−a}.
///
/// Sources are assumed to have ⟨γ_{2a−1}γ_{2b−1}⟩ = ⟨γ_{2a}γ_{2b}⟩ = δ_ab, which
/// holds for every state of the real XY Hamiltonian.
pub trait CorrelatorSource: Sync {
    fn b(&self, l: i64) -> Result<f64>;
}

impl<F: Fn(i64) -> Result<f64> + Sync> CorrelatorSource for F {
    fn b(&self, l: i64) -> Result<f64> {
        self(l)
    }
}

/// Ground state of a finite chain.
#[derive(Debug, Clone, Copy)]
pub struct FiniteChain(pub ChainParams);

impl CorrelatorSource for FiniteChain {
    fn b(&self, l: i64) -> Result<f64> {
        Ok(majorana_correlator(&self.0, l, 0.0)?.re)
    }
}

/// Ground state of the infinite chain; r = 0 uses the closed XX form
/// (2/π)sin(lφ_h)/l, with B_0 = 2φ_h/π − 1.
#[derive(Debug, Clone, Copy)]
pub struct InfiniteChain {
    pub h: f64,
    pub r: f64,
    pub tol: f64,
}

impl CorrelatorSource for InfiniteChain {
    fn b(&self, l: i64) -> Result<f64> {
        if self.r == 0.0 && self.h.abs() <= 1.0 {
            let full_circle = if l == 0 { 1.0 } else { 0.0 };
            return Ok(majorana_equal_time_xx(self.h, l)? - full_circle);
        }
        Ok(majorana_correlator_thermodynamic(self.h, self.r, l, 0.0, self.tol)?.re)
    }
}

/// Driven finite chain at time τ.
#[derive(Debug, Clone)]
pub struct DrivenChain {
    pub params: ChainParams,
    pub protocol: DriveProtocol,
    pub grid: TimeGrid,
    pub tau: f64,
}

impl CorrelatorSource for DrivenChain {
    fn b(&self, l: i64) -> Result<f64> {
        Ok(equal_time_driven(&self.params, &self.protocol, &self.grid, l, self.tau)?.value.re)
    }
}

/// Γ for `block_length` consecutive sites, ordered γ_1 … γ_{2L}.
pub fn covariance_from_correlators(source: &dyn CorrelatorSource, block_length: usize) -> Result<CovarianceMatrix> {
    if block_length == 0 {
        return Err(Error::param("block_length", "must be positive"));
    }
    let span = block_length as i64 - 1;
    let b: Vec<f64> = (-span..=span).into_par_iter().map(|l| source.b(l)).collect::<Result<_>>()?;
    let at = |l: i64| b[(l + span) as usize];
    let n = 2 * block_length;
    let mut gamma = DMatrix::zeros(n, n);
    for a in 0..block_length {
        for c in 0..block_length {
            let l = c as i64 - a as i64;
            // Γ_{2a−1,2c} = B_{c−a}, Γ_{2a,2c−1} = −B_{a−c}
            gamma[(2 * a, 2 * c + 1)] = at(l);
            gamma[(2 * a + 1, 2 * c)] = -at(-l);
        }
    }
    let gamma = 0.5 * (&gamma - gamma.transpose());
    CovarianceMatrix::new(gamma)
}

fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.ln() };
    term(p) + term(1.0 - p)
}

/// S = Σ_k H((1 + ν_k)/2) in nats.
pub fn entropy(cov: &CovarianceMatrix) -> Result<f64> {
    let nu = cov.spectrum()?;
    if let Some(v) = nu.iter().find(|v| **v > 1.0 + SPECTRUM_SLACK) {
        return Err(Error::InvalidCovariance(format!("eigenvalue {v} of i*gamma outside [-1, 1]")));
    }
    Ok(nu.iter().map(|v| binary_entropy(0.5 * (1.0 + v.min(1.0)))).sum())
}

pub fn entropy_bits(cov: &CovarianceMatrix) -> Result<f64> {
    Ok(entropy(cov)? / std::f64::consts::LN_2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyScaling {
    pub lengths: Vec<usize>,
    /// Entropies in nats.
    pub entropies: Vec<f64>,
    /// S against ln L.
    pub fit: LinearFit,
}

impl EntropyScaling {
    pub fn slope(&self) -> f64 {
        self.fit.slope
    }
}

/// Entropy of the infinite-chain ground state over `lengths` and the slope of S against ln L.
pub fn entropy_scaling_fit(h: f64, r: f64, lengths: &[usize]) -> Result<EntropyScaling> {
    entropy_scaling_fit_source(&InfiniteChain { h, r, tol: 1e-12 }, lengths)
}

pub fn entropy_scaling_fit_source(source: &dyn CorrelatorSource, lengths: &[usize]) -> Result<EntropyScaling> {
    if lengths.len() < 2 {
        return Err(Error::param("lengths", "need at least two block lengths"));
    }
    let max = *lengths.iter().max().unwrap();
    let full = covariance_from_correlators(source, max)?;
    let entropies = lengths
        .par_iter()
        .map(|&l| {
            let sub = full.gamma.view((0, 0), (2 * l, 2 * l)).into_owned();
            entropy(&CovarianceMatrix::new(sub)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let x: Vec<f64> = lengths.iter().map(|&l| (l as f64).ln()).collect();
    let fit = linear_fit(&x, &entropies);
    Ok(EntropyScaling {
        lengths: lengths.to_vec(),
        entropies,
        fit,
    })
}
