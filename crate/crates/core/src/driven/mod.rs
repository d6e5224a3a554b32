//! Time-dependent transverse field h(τ): kernels, Fredholm determinants,
//! driven partition function, equal-time correlators and Kibble-Zurek sweeps.
//!
//! Times are either physical imaginary times τ or rescaled times σ = ωτ.
//! Rescaled rates are θ̇(σ) = θ̇(τ)/ω = −h′(σ)·2r sin φ/ε².

mod adiabatic;
mod correlator;
mod kernel;

pub use adiabatic::*;
pub use correlator::*;
pub use kernel::*;

use crate::error::{Error, Result};
use crate::numerics::gauss_legendre_16;
use crate::spectrum::{momentum, ChainParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DriveKind {
    /// h(σ) = σ.
    Linear,
    /// Piecewise-linear interpolation of a (σ, h) table, constant outside it.
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriveProtocol {
    pub omega: f64,
    pub kind: DriveKind,
    samples: Vec<(f64, f64)>,
}

impl DriveProtocol {
    pub fn linear(omega: f64) -> Result<Self> {
        check_omega(omega)?;
        Ok(DriveProtocol {
            omega,
            kind: DriveKind::Linear,
            samples: Vec::new(),
        })
    }

    /// Tabulated protocol; `samples` must have strictly increasing σ.
    pub fn custom(omega: f64, samples: Vec<(f64, f64)>) -> Result<Self> {
        check_omega(omega)?;
        if samples.is_empty() {
            return Err(Error::param("samples", "protocol table is empty"));
        }
        if samples.iter().any(|(s, h)| !s.is_finite() || !h.is_finite()) {
            return Err(Error::param("samples", "non-finite entry"));
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::param("samples", "sigma values must be strictly increasing"));
        }
        Ok(DriveProtocol {
            omega,
            kind: DriveKind::Custom,
            samples,
        })
    }

    /// Constant field, the static limit of every driven quantity.
    pub fn constant(omega: f64, h: f64) -> Result<Self> {
        Self::custom(omega, vec![(0.0, h)])
    }

    /// Parses two whitespace- or comma-separated columns (σ, h); `#` starts a comment.
    pub fn parse_table(omega: f64, text: &str) -> Result<Self> {
        let mut samples = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            if cols.len() != 2 {
                return Err(Error::param("protocol", format!("line {}: expected two columns", lineno + 1)));
            }
            let parse = |s: &str| s.parse::<f64>().map_err(|_| Error::param("protocol", format!("line {}: cannot parse `{s}`", lineno + 1)));
            samples.push((parse(cols[0])?, parse(cols[1])?));
        }
        Self::custom(omega, samples)
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn h(&self, sigma: f64) -> f64 {
        match self.kind {
            DriveKind::Linear => sigma,
            DriveKind::Custom => {
                let s = &self.samples;
                if sigma <= s[0].0 {
                    return s[0].1;
                }
                if sigma >= s[s.len() - 1].0 {
                    return s[s.len() - 1].1;
                }
                let i = s.partition_point(|p| p.0 <= sigma) - 1;
                let (s0, h0) = s[i];
                let (s1, h1) = s[i + 1];
                h0 + (h1 - h0) * (sigma - s0) / (s1 - s0)
            }
        }
    }

    /// dh/dσ (right derivative at table knots).
    pub fn dh(&self, sigma: f64) -> f64 {
        match self.kind {
            DriveKind::Linear => 1.0,
            DriveKind::Custom => {
                let s = &self.samples;
                if s.len() < 2 || sigma < s[0].0 || sigma >= s[s.len() - 1].0 {
                    return 0.0;
                }
                let i = s.partition_point(|p| p.0 <= sigma) - 1;
                (s[i + 1].1 - s[i].1) / (s[i + 1].0 - s[i].0)
            }
        }
    }

    pub fn h_at_tau(&self, tau: f64) -> f64 {
        self.h(self.omega * tau)
    }

    /// σ interval outside which h is constant (`None` when unbounded).
    pub fn active_window(&self) -> Option<(f64, f64)> {
        match self.kind {
            DriveKind::Linear => None,
            DriveKind::Custom => Some((self.samples[0].0, self.samples[self.samples.len() - 1].0)),
        }
    }

    /// True when h never changes, so θ̇ ≡ 0.
    pub fn is_static(&self) -> bool {
        self.kind == DriveKind::Custom && self.samples.windows(2).all(|w| w[0].1 == w[1].1)
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::param("omega", "must be positive and finite"));
    }
    Ok(())
}

/// ε(φ; h) = 2√((h − cos φ)² + (r sin φ)²).
pub fn eps_at(r: f64, phi: f64, h: f64) -> f64 {
    2.0 * (h - phi.cos()).hypot(r * phi.sin())
}

/// Rescaled θ̇ at momentum φ.
pub fn theta_dot_phi(r: f64, phi: f64, protocol: &DriveProtocol, sigma: f64) -> f64 {
    let s = r * phi.sin();
    if s == 0.0 {
        return 0.0;
    }
    let dh = protocol.dh(sigma);
    if dh == 0.0 {
        return 0.0;
    }
    let e = eps_at(r, phi, protocol.h(sigma));
    -dh * 2.0 * s / (e * e)
}

/// Rescaled θ̇_m(σ) for mode `m` of `params` (the field in `params` is ignored).
pub fn theta_dot(params: &ChainParams, m: usize, protocol: &DriveProtocol, sigma: f64) -> Result<f64> {
    params.validate()?;
    if m >= params.n_sites {
        return Err(Error::IndexOutOfRange { index: m, n_sites: params.n_sites });
    }
    Ok(theta_dot_phi(params.r, momentum(m, params.n_sites), protocol, sigma))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub beta: f64,
    pub n_points: usize,
}

/// Smallest grid accepted for determinant and resolvent work.
pub const MIN_GRID_POINTS: usize = 64;

impl TimeGrid {
    pub fn new(beta: f64, n_points: usize) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::param("beta", "must be positive and finite"));
        }
        if n_points == 0 || n_points % 2 == 1 {
            return Err(Error::param("n_points", "must be a positive even integer"));
        }
        Ok(TimeGrid { beta, n_points })
    }

    pub fn dt(&self) -> f64 {
        self.beta / self.n_points as f64
    }

    /// Cell midpoints, the quadrature nodes.
    pub fn node(&self, i: usize) -> f64 {
        -0.5 * self.beta + (i as f64 + 0.5) * self.dt()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.node(i)).collect()
    }

    /// Cell boundary `k` (k = 0 is −β/2).
    pub fn edge(&self, k: usize) -> f64 {
        -0.5 * self.beta + k as f64 * self.dt()
    }

    /// Index of the cell boundary closest to `tau`.
    pub fn nearest_edge(&self, tau: f64) -> Result<usize> {
        let k = ((tau + 0.5 * self.beta) / self.dt()).round();
        if !(0.0..=self.n_points as f64).contains(&k) {
            return Err(Error::param("tau", "outside [-beta/2, beta/2]"));
        }
        Ok(k as usize)
    }
}

/// Λ(τ) = ∫_{−β/2}^{τ} ε(h(ωτ′)) dτ′ for one momentum.
#[derive(Debug, Clone)]
pub(crate) struct Phase {
    r: f64,
    phi: f64,
    omega: f64,
    start: f64,
    closed: Option<f64>,
    table_step: f64,
    table: Vec<f64>,
    protocol: DriveProtocol,
}

impl Phase {
    pub(crate) fn new(r: f64, phi: f64, protocol: &DriveProtocol, start: f64, end: f64, step_hint: f64) -> Self {
        let omega = protocol.omega;
        if protocol.kind == DriveKind::Linear {
            let s = (r * phi.sin()).abs();
            let c = phi.cos();
            let f0 = linear_phase_primitive(omega * start - c, s) / omega;
            return Phase {
                r,
                phi,
                omega,
                start,
                closed: Some(f0),
                table_step: 0.0,
                table: Vec::new(),
                protocol: protocol.clone(),
            };
        }
        let cells = (((end - start) / step_hint).ceil() as usize).max(1);
        let step = (end - start) / cells as f64;
        let rule = gauss_legendre_16();
        let mut table = Vec::with_capacity(cells + 1);
        table.push(0.0);
        let mut acc = 0.0;
        for c in 0..cells {
            let a = start + c as f64 * step;
            acc += gl_segment(rule, a, a + step, |t| eps_at(r, phi, protocol.h(omega * t)));
            table.push(acc);
        }
        Phase {
            r,
            phi,
            omega,
            start,
            closed: None,
            table_step: step,
            table,
            protocol: protocol.clone(),
        }
    }

    pub(crate) fn eps(&self, tau: f64) -> f64 {
        eps_at(self.r, self.phi, self.protocol.h(self.omega * tau))
    }

    pub(crate) fn at(&self, tau: f64) -> f64 {
        if let Some(f0) = self.closed {
            let s = (self.r * self.phi.sin()).abs();
            return linear_phase_primitive(self.omega * tau - self.phi.cos(), s) / self.omega - f0;
        }
        let x = ((tau - self.start) / self.table_step).max(0.0);
        let k = (x.floor() as usize).min(self.table.len() - 2);
        let a = self.start + k as f64 * self.table_step;
        let rule = gauss_legendre_16();
        self.table[k] + gl_segment(rule, a, tau, |t| self.eps(t))
    }
}

fn gl_segment(rule: &[(f64, f64); 16], a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// ∫ 2√(x² + s²) dx = x√(x² + s²) + s² asinh(x/s).
pub fn linear_phase_primitive(x: f64, s: f64) -> f64 {
    let s = s.abs();
    if s == 0.0 {
        return x * x.abs();
    }
    x * x.hypot(s) + s * s * (x / s).asinh()
}
