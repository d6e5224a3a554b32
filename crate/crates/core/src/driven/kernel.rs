//! Discretized kernel K_m = iG_m θ̇_m σˣ, Fredholm determinants and the
//! driven partition function.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{eps_at, theta_dot_phi, DriveProtocol, Phase, TimeGrid, MIN_GRID_POINTS};
use crate::error::{Error, Result};
use crate::numerics::{breakpoints, integrate_split, lu_det, lu_log_det, QuadOptions};
use crate::spectrum::{momentum, ChainParams};

/// Largest ε·Δτ accepted on a grid.
pub const MAX_EPS_STEP: f64 = 4.0;

fn fermi(x: f64) -> f64 {
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// Antiperiodic driven G⁺(τ, τ′) from the phases Λ(τ), Λ(τ′) and the total phase.
fn g_plus_from_phase(lam: f64, lam_p: f64, order: std::cmp::Ordering, total: f64) -> f64 {
    use std::cmp::Ordering::*;
    match order {
        Greater => fermi(-total) * (lam_p - lam).exp(),
        Less => -fermi(-total) * (lam_p - lam - total).exp(),
        Equal => 0.5 * (0.5 * total).tanh(),
    }
}

/// The kernel of one momentum mode sampled at the grid midpoints.
#[derive(Debug, Clone)]
pub struct KernelOperator {
    pub m: Option<usize>,
    pub phi: f64,
    pub r: f64,
    pub grid: TimeGrid,
    pub protocol: DriveProtocol,
    /// θ̇(τ_j)·Δτ in physical time units.
    pub weights: Vec<f64>,
    /// G⁺(τ_i, τ_j) with the symmetric value on the diagonal.
    pub g_plus: DMatrix<f64>,
    /// Λ(β/2) = ∫ε dτ over the whole interval.
    pub total_phase: f64,
    /// ‖K‖² from nested quadrature of the continuum kernel.
    pub norm2: f64,
    pub(crate) phase: Phase,
    lam_nodes: Vec<f64>,
}

pub fn build_kernel(params: &ChainParams, m: usize, protocol: &DriveProtocol, grid: &TimeGrid) -> Result<KernelOperator> {
    params.validate()?;
    if m >= params.n_sites {
        return Err(Error::IndexOutOfRange { index: m, n_sites: params.n_sites });
    }
    let mut k = build_kernel_phi(params.r, momentum(m, params.n_sites), protocol, grid)?;
    k.m = Some(m);
    Ok(k)
}

/// Kernel at an arbitrary momentum angle.
pub fn build_kernel_phi(r: f64, phi: f64, protocol: &DriveProtocol, grid: &TimeGrid) -> Result<KernelOperator> {
    let n = grid.n_points;
    if n < MIN_GRID_POINTS {
        return Err(Error::GridTooCoarse(format!("{n} points, at least {MIN_GRID_POINTS} required")));
    }
    let dt = grid.dt();
    let nodes = grid.nodes();
    let omega = protocol.omega;
    let max_step = nodes.iter().map(|&t| eps_at(r, phi, protocol.h_at_tau(t)) * dt).fold(0.0, f64::max);
    if max_step > MAX_EPS_STEP {
        return Err(Error::GridTooCoarse(format!("max eps*dtau = {max_step:.3} exceeds {MAX_EPS_STEP}")));
    }
    let half = 0.5 * grid.beta;
    let phase = Phase::new(r, phi, protocol, -half, half, dt.min(0.05 / omega.max(1e-300)).max(half * 1e-5));
    let lam_nodes: Vec<f64> = nodes.iter().map(|&t| phase.at(t)).collect();
    let total = phase.at(half);
    let weights: Vec<f64> = nodes.iter().map(|&t| omega * theta_dot_phi(r, phi, protocol, omega * t) * dt).collect();
    let g_plus = DMatrix::from_fn(n, n, |i, j| g_plus_from_phase(lam_nodes[i], lam_nodes[j], i.cmp(&j), total));
    let mut k = KernelOperator {
        m: None,
        phi,
        r,
        grid: *grid,
        protocol: protocol.clone(),
        weights,
        g_plus,
        total_phase: total,
        norm2: 0.0,
        phase,
        lam_nodes,
    };
    k.norm2 = k.continuum_norm2();
    Ok(k)
}

impl KernelOperator {
    pub fn dim(&self) -> usize {
        self.grid.n_points
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|w| *w == 0.0)
    }

    /// G⁺(τ, τ′) at arbitrary times.
    pub fn g_plus_at(&self, tau: f64, tau_p: f64) -> f64 {
        let order = tau.partial_cmp(&tau_p).unwrap();
        g_plus_from_phase(self.phase.at(tau), self.phase.at(tau_p), order, self.total_phase)
    }

    pub(crate) fn lambda_nodes(&self) -> &[f64] {
        &self.lam_nodes
    }

    /// G⁺Θ, the real part of the upper-right block divided by i.
    pub fn upper(&self) -> DMatrix<f64> {
        let mut a = self.g_plus.clone();
        for (j, w) in self.weights.iter().enumerate() {
            a.column_mut(j).scale_mut(*w);
        }
        a
    }

    /// G⁻Θ with G⁻(τ, τ′) = −G⁺(τ′, τ).
    pub fn lower(&self) -> DMatrix<f64> {
        let mut b = -self.g_plus.transpose();
        for (j, w) in self.weights.iter().enumerate() {
            b.column_mut(j).scale_mut(*w);
        }
        b
    }

    /// The full (2n)×(2n) complex matrix.
    pub fn full_matrix(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let up = self.upper();
        let low = self.lower();
        let i = Complex64::new(0.0, 1.0);
        let mut k = DMatrix::from_element(2 * n, 2 * n, Complex64::new(0.0, 0.0));
        for r in 0..n {
            for c in 0..n {
                k[(r, n + c)] = i * up[(r, c)];
                k[(n + r, c)] = i * low[(r, c)];
            }
        }
        k
    }

    /// P = (G⁺Θ)(G⁻Θ); K² = −diag(P, Q) with tr Q^k = tr P^k.
    pub fn reduced(&self) -> DMatrix<f64> {
        self.upper() * self.lower()
    }

    /// P with the coincident-cell value of G⁺G⁻ on its diagonal, which makes
    /// traces and determinants second order in Δτ.
    pub fn reduced_corrected(&self) -> DMatrix<f64> {
        let mut p = self.reduced();
        for (i, w) in self.weights.iter().enumerate() {
            p[(i, i)] -= 0.25 * w * w;
        }
        p
    }

    /// Tr K^j for j = 1..=max_power; odd entries are structurally zero.
    pub fn traces(&self, max_power: usize) -> Vec<f64> {
        reduced_traces(&self.reduced(), max_power)
    }

    /// Traces of the corrected operator, see [`KernelOperator::reduced_corrected`].
    pub fn traces_corrected(&self, max_power: usize) -> Vec<f64> {
        reduced_traces(&self.reduced_corrected(), max_power)
    }

    /// Tr K, Tr K³, Tr K⁵ computed on the full complex matrix, without using the block structure.
    pub fn odd_traces_dense(&self) -> [Complex64; 3] {
        let k = self.full_matrix();
        let k2 = &k * &k;
        let k3 = &k2 * &k;
        let k5 = &k3 * &k2;
        [k.trace(), k3.trace(), k5.trace()]
    }

    /// Frobenius norm² of the discretized matrix.
    pub fn frobenius2(&self) -> f64 {
        self.upper().norm_squared() + self.lower().norm_squared()
    }

    /// Nested quadrature of ∫dτ₂ θ̇²(τ₂) ∫dτ₁ [G⁺(τ₁,τ₂)² + G⁻(τ₁,τ₂)²].
    fn continuum_norm2(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let half = 0.5 * self.grid.beta;
        let omega = self.protocol.omega;
        let mut outer_breaks: Vec<f64> = Vec::new();
        if let Some((a, b)) = self.protocol.active_window() {
            outer_breaks.extend(self.protocol.samples().iter().map(|s| s.0 / omega));
            outer_breaks.push(a / omega);
            outer_breaks.push(b / omega);
        } else {
            outer_breaks.push(self.phi.cos() / omega);
        }
        let outer = breakpoints(-half, half, outer_breaks);
        let opts = QuadOptions::with_tol(1e-11).min_panels(4).max_panels(1 << 12);
        let inner = |t2: f64| {
            let td = omega * theta_dot_phi(self.r, self.phi, &self.protocol, omega * t2);
            if td == 0.0 {
                return 0.0;
            }
            let l2 = self.phase.at(t2);
            let f = |t1: f64| {
                let l1 = self.phase.at(t1);
                let a = g_plus_from_phase(l1, l2, t1.partial_cmp(&t2).unwrap(), self.total_phase);
                let b = g_plus_from_phase(l2, l1, t2.partial_cmp(&t1).unwrap(), self.total_phase);
                a * a + b * b
            };
            let w = integrate_split(f, &breakpoints(-half, half, [t2]), opts).value;
            td * td * w
        };
        integrate_split(inner, &outer, QuadOptions::with_tol(1e-9).min_panels(4).max_panels(1 << 10)).value
    }
}

fn reduced_traces(p: &DMatrix<f64>, max_power: usize) -> Vec<f64> {
    let mut out = vec![0.0; max_power];
    if max_power < 2 {
        return out;
    }
    let mut pk = p.clone();
    let mut k = 1;
    while 2 * k <= max_power {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        out[2 * k - 1] = 2.0 * sign * pk.trace();
        k += 1;
        if 2 * k <= max_power {
            pk = &pk * p;
        }
    }
    out
}

/// Plemelj coefficients d_0..=d_max from traces (`traces[j-1]` = Tr K^j).
///
/// d_n = (n−1)! Σ_{j=1}^{n} (−1)^{j−1} Tr K^j d_{n−j}/(n−j)!
pub fn plemelj_coefficients(traces: &[f64], max_order: usize) -> Vec<f64> {
    // work with c_n = d_n/n! to keep magnitudes tame
    let mut c = vec![0.0; max_order + 1];
    c[0] = 1.0;
    for n in 1..=max_order {
        let mut acc = 0.0;
        for j in 1..=n.min(traces.len()) {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * traces[j - 1] * c[n - j];
        }
        c[n] = acc / n as f64;
    }
    let mut fact = 1.0;
    c.iter()
        .enumerate()
        .map(|(n, cn)| {
            if n > 0 {
                fact *= n as f64;
            }
            cn * fact
        })
        .collect()
}

/// d_n as the determinant of the n×n matrix with Tr K^{i−j+1} on and below the
/// diagonal and n−i on the first superdiagonal (1-based i).
pub fn plemelj_literal(traces: &[f64], n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let m = DMatrix::from_fn(n, n, |i, j| {
        if j <= i {
            traces.get(i - j).copied().unwrap_or(0.0)
        } else if j == i + 1 {
            (n - (i + 1)) as f64
        } else {
            0.0
        }
    });
    lu_det(&m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FredholmDet {
    pub det_series: f64,
    pub det_dense: f64,
    pub abs_diff: f64,
    pub d_coeffs: Vec<f64>,
    pub traces: Vec<f64>,
    /// Magnitude of the last series term d_n/n!.
    pub last_term: f64,
    pub norm2: f64,
    pub converged: bool,
}

impl FredholmDet {
    pub fn rel_diff(&self) -> f64 {
        self.abs_diff / self.det_dense.abs()
    }

    pub fn require_converged(&self, tol: f64) -> Result<&Self> {
        if !self.converged || self.rel_diff() > tol {
            return Err(Error::NotConverged {
                what: format!("Fredholm series (norm2 = {:.3e})", self.norm2),
                est_error: self.rel_diff(),
                tol,
            });
        }
        Ok(self)
    }
}

fn assemble(traces: Vec<f64>, max_order: usize, det_dense: f64, norm2: f64) -> FredholmDet {
    let d = plemelj_coefficients(&traces, max_order);
    let mut fact = 1.0;
    let mut terms = Vec::with_capacity(d.len());
    for (n, dn) in d.iter().enumerate() {
        if n > 0 {
            fact *= n as f64;
        }
        terms.push(dn / fact);
    }
    let det_series: f64 = terms.iter().sum();
    // odd-order terms vanish, so look at the last nonzero one
    let last_term = terms.iter().rev().find(|t| **t != 0.0).copied().unwrap_or(0.0).abs();
    let converged = max_order == 0 || last_term <= 1e-6 * det_series.abs().max(1e-300);
    FredholmDet {
        det_series,
        det_dense,
        abs_diff: (det_series - det_dense).abs(),
        d_coeffs: d,
        traces,
        last_term,
        norm2,
        converged,
    }
}

/// det(1 + K) by the Plemelj series through `max_order` and by dense LU.
pub fn fredholm_det(kernel: &KernelOperator, max_order: usize) -> FredholmDet {
    let traces = kernel.traces(max_order);
    let n = kernel.dim();
    let det_dense = if kernel.is_zero() { 1.0 } else { lu_det(&(DMatrix::identity(n, n) + kernel.reduced())) };
    assemble(traces, max_order, det_dense, kernel.norm2)
}

/// Same machinery for an arbitrary real matrix K.
pub fn fredholm_det_matrix(k: &DMatrix<f64>, max_order: usize) -> FredholmDet {
    let mut traces = Vec::with_capacity(max_order);
    let mut pk = k.clone();
    for j in 1..=max_order {
        traces.push(pk.trace());
        if j < max_order {
            pk = &pk * k;
        }
    }
    let n = k.nrows();
    let det_dense = lu_det(&(DMatrix::identity(n, n) + k));
    assemble(traces, max_order, det_dense, k.norm_squared())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeEnergy {
    pub m: usize,
    pub phi: f64,
    /// Σ_k Tr K^{2k}/(2k) through the requested order (corrected traces).
    pub e_series: f64,
    /// −ln det(1 + K) from the dense determinant of the corrected operator.
    pub e_dense: f64,
    /// ∫ε dτ over the interval.
    pub total_phase: f64,
    pub norm2: f64,
    /// Set when the mode comes within the critical window (min ε below 2√ω).
    pub near_gapless: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrivenPartition {
    /// ln Z₀ = Σ_m ln 2cosh(½∫ε dτ).
    pub log_z0: f64,
    pub modes: Vec<ModeEnergy>,
    /// ln Z = ln Z₀ − ½ Σ_m E_m (dense E_m).
    pub log_z: f64,
}

impl DrivenPartition {
    pub fn z0(&self) -> f64 {
        self.log_z0.exp()
    }

    pub fn z(&self) -> f64 {
        self.log_z.exp()
    }
}

fn ln_2cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p()
}

/// Minimum of ε along the interval, sampled at the grid nodes.
fn min_eps(r: f64, phi: f64, protocol: &DriveProtocol, grid: &TimeGrid) -> f64 {
    let mut m = grid.nodes().iter().map(|&t| eps_at(r, phi, protocol.h_at_tau(t))).fold(f64::INFINITY, f64::min);
    if protocol.kind == super::DriveKind::Linear {
        let c = phi.cos() / protocol.omega;
        if c.abs() <= 0.5 * grid.beta {
            m = m.min(2.0 * (r * phi.sin()).abs());
        }
    }
    m
}

pub fn driven_partition(params: &ChainParams, protocol: &DriveProtocol, grid: &TimeGrid, max_order: usize) -> Result<DrivenPartition> {
    params.validate()?;
    let modes: Vec<Result<ModeEnergy>> = (0..params.n_sites)
        .into_par_iter()
        .map(|m| {
            let k = build_kernel(params, m, protocol, grid)?;
            let phi = k.phi;
            let near_gapless = min_eps(params.r, phi, protocol, grid) < 2.0 * protocol.omega.sqrt();
            let (e_series, e_dense) = if k.is_zero() {
                (0.0, 0.0)
            } else {
                let traces = k.traces_corrected(max_order);
                let series: f64 = traces.iter().enumerate().skip(1).step_by(2).map(|(j, t)| t / (j + 1) as f64).sum();
                let n = k.dim();
                let (log_det, sign) = lu_log_det(&(DMatrix::identity(n, n) + k.reduced_corrected()));
                if sign <= 0.0 {
                    return Err(Error::Singular);
                }
                (series, -log_det)
            };
            Ok(ModeEnergy {
                m,
                phi,
                e_series,
                e_dense,
                total_phase: k.total_phase,
                norm2: k.norm2,
                near_gapless,
            })
        })
        .collect();
    let modes = modes.into_iter().collect::<Result<Vec<_>>>()?;
    let log_z0 = modes.iter().map(|e| ln_2cosh(0.5 * e.total_phase)).sum();
    let log_z = log_z0 - 0.5 * modes.iter().map(|e| e.e_dense).sum::<f64>();
    Ok(DrivenPartition { log_z0, modes, log_z })
}

/// ln Det(∂_τ ± ε) from the discretized operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeDeterminant {
    /// ln of the dense Det(∂+ε)·Det(∂−ε).
    pub log_det_dense: f64,
    /// ln 4cosh²(½∫ε dτ).
    pub log_half_argument: f64,
    /// ln 4cosh²(∫ε dτ).
    pub log_full_argument: f64,
}

/// Dense Crank-Nicolson determinant of the free driven operator for one mode.
///
/// Rows are (ψ_{i+1} − ψ_i)/Δτ ± ε_i(ψ_{i+1} + ψ_i)/2 with ψ_n = −ψ_0, each
/// divided by √(Δτ⁻² − ε_i²/4); with ε = 0 this gives Det(∂_τ) = 2.
pub fn free_determinant_check(r: f64, phi: f64, protocol: &DriveProtocol, grid: &TimeGrid) -> FreeDeterminant {
    let n = grid.n_points;
    let dt = grid.dt();
    let eps: Vec<f64> = grid.nodes().iter().map(|&t| eps_at(r, phi, protocol.h_at_tau(t))).collect();
    let total: f64 = eps.iter().sum::<f64>() * dt;
    let op = |sign: f64| {
        let mut m = DMatrix::zeros(n, n);
        let mut log_norm = 0.0;
        for i in 0..n {
            let a = sign * 0.5 * eps[i];
            let next = (i + 1) % n;
            let wrap = if next == 0 { -1.0 } else { 1.0 };
            m[(i, i)] += -1.0 / dt + a;
            m[(i, next)] += wrap * (1.0 / dt + a);
            log_norm += 0.5 * (1.0 / (dt * dt) - a * a).abs().ln();
        }
        let (l, _) = lu_log_det(&m);
        l - log_norm
    };
    FreeDeterminant {
        log_det_dense: op(1.0) + op(-1.0),
        log_half_argument: 2.0 * ln_2cosh(0.5 * total),
        log_full_argument: 2.0 * ln_2cosh(total),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn linear_kernel(omega: f64, phi: f64, n: usize, beta: f64) -> KernelOperator {
        let p = DriveProtocol::linear(omega).unwrap();
        build_kernel_phi(1.0, phi, &p, &TimeGrid::new(beta, n).unwrap()).unwrap()
    }

    #[test]
    fn static_kernel_is_zero() {
        let p = DriveProtocol::constant(0.5, 1.7).unwrap();
        let k = build_kernel_phi(0.8, 1.0, &p, &TimeGrid::new(10.0, 64).unwrap()).unwrap();
        assert!(k.is_zero());
        let f = fredholm_det(&k, 8);
        assert_eq!(f.det_series, 1.0);
        assert_eq!(f.det_dense, 1.0);
        assert_eq!(k.norm2, 0.0);
    }

    #[test]
    fn odd_traces_vanish() {
        let k = linear_kernel(0.5, 1.2, 64, 12.0);
        for t in k.odd_traces_dense() {
            assert!(t.norm() < 1e-13, "{t}");
        }
        assert!(k.traces(5).iter().step_by(2).all(|t| *t == 0.0));
    }

    #[test]
    fn even_traces_match_dense_powers() {
        let k = linear_kernel(0.5, 1.2, 64, 12.0);
        let full = k.full_matrix();
        let k2 = &full * &full;
        let k4 = &k2 * &k2;
        let t = k.traces(4);
        assert!((k2.trace().re - t[1]).abs() < 1e-12 * t[1].abs().max(1.0));
        assert!((k4.trace().re - t[3]).abs() < 1e-12 * t[3].abs().max(1.0));
        assert!(k2.trace().im.abs() < 1e-13);
    }

    #[test]
    fn too_coarse_grid_rejected() {
        let p = DriveProtocol::linear(0.5).unwrap();
        assert!(matches!(build_kernel_phi(1.0, 1.0, &p, &TimeGrid::new(10.0, 32).unwrap()), Err(Error::GridTooCoarse(_))));
        assert!(matches!(build_kernel_phi(1.0, 1.0, &p, &TimeGrid::new(200.0, 64).unwrap()), Err(Error::GridTooCoarse(_))));
    }

    #[test]
    fn frobenius_converges_to_continuum_norm() {
        // the symmetric diagonal value makes the squared-entry sum first order in Δτ
        let e1 = (linear_kernel(0.5, 0.5 * PI, 200, 16.0).frobenius2() - linear_kernel(0.5, 0.5 * PI, 200, 16.0).norm2).abs();
        let k = linear_kernel(0.5, 0.5 * PI, 400, 16.0);
        let e2 = (k.frobenius2() - k.norm2).abs();
        assert!(e2 < 0.1 * k.norm2);
        assert!((e1 / e2 - 2.0).abs() < 0.2, "{e1} {e2}");
    }

    #[test]
    fn plemelj_recursion_equals_literal() {
        let traces = [0.3, -0.7, 0.11, 0.25, -0.05, 0.4];
        let d = plemelj_coefficients(&traces, 6);
        for n in 0..=6 {
            let lit = plemelj_literal(&traces, n);
            assert!((d[n] - lit).abs() <= 1e-12 * lit.abs().max(1.0), "n={n}: {} vs {lit}", d[n]);
        }
    }

    #[test]
    fn synthetic_eigenvalues() {
        use nalgebra::DMatrix;
        let mu = [0.3, -0.2, 0.15, 0.05, -0.4, 0.1];
        let n = mu.len();
        // similarity transform of a diagonal matrix by a fixed well-conditioned basis
        let s = DMatrix::from_fn(n, n, |i, j| if i == j { 2.0 } else { 0.1 * ((i + 2 * j) % 5) as f64 });
        let d = DMatrix::from_fn(n, n, |i, j| if i == j { mu[i] } else { 0.0 });
        let k = &s * d * s.clone().try_inverse().unwrap();
        let f = fredholm_det_matrix(&k, 40);
        let exact: f64 = mu.iter().map(|m| 1.0 + m).product();
        assert!((f.det_series - exact).abs() < 1e-10);
        assert!((f.det_dense - exact).abs() < 1e-10);
    }

    #[test]
    fn series_matches_dense_off_critical() {
        let k = linear_kernel(0.5, 0.5 * PI, 400, 16.0);
        let f = fredholm_det(&k, 8);
        assert!(f.rel_diff() <= 1e-6, "{}", f.rel_diff());
        assert!(f.converged);
    }

    #[test]
    fn static_partition_is_cosh_product() {
        let params = ChainParams::new(6, 0.7, 1.3).unwrap();
        let p = DriveProtocol::constant(0.4, 1.3).unwrap();
        let z = driven_partition(&params, &p, &TimeGrid::new(3.0, 64).unwrap(), 8).unwrap();
        let expect: f64 = crate::spectrum::mode_set(&params).unwrap().iter().map(|md| (2.0 * (1.5 * md.eps).cosh()).ln()).sum();
        assert!((z.log_z0 - expect).abs() < 1e-10);
        assert_eq!(z.log_z, z.log_z0);
        assert!(z.modes.iter().all(|e| e.e_dense == 0.0 && e.e_series == 0.0));
    }

    #[test]
    fn cn_determinant_fixes_half_argument() {
        let p = DriveProtocol::constant(0.4, 1.3).unwrap();
        let g = TimeGrid::new(2.0, 400).unwrap();
        let f = free_determinant_check(0.7, 1.0, &p, &g);
        assert!((f.log_det_dense - f.log_half_argument).abs() < 1e-4, "{f:?}");
        assert!((f.log_det_dense - f.log_full_argument).abs() > 0.5);
    }
}
