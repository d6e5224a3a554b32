//! Zero-temperature driven modes from a transfer ODE, adiabatic expansions
//! and Kibble-Zurek sweeps.
//!
//! At β → ∞ the Fredholm determinant and the equal-time resolvent of one
//! mode reduce to a 2×2 linear system in σ,
//!
//!   Y′ = −(2ε/ω)Y − θ̇x,   x′ = θ̇Y,   (Y, x)(−∞) = (0, 1),
//!
//! with det(1 + K) = x(+∞). The ratios ρ = iY/x from the left and μ from the
//! mirrored run from the right give tr⟨τ|ΣG̃|τ⟩ = (1 + μ)(1 − ρ)/(1 + ρμ).

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{eps_at, linear_phase_primitive, theta_dot_phi, DriveKind, DriveProtocol};
use crate::error::{Error, Result};
use crate::numerics::{breakpoints, integrate_split, log_log_fit, logspace, LinearFit, QuadOptions};
use crate::spectrum::{bogoliubov_angle, ChainParams};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Half-width of the σ domain around cos φ used for the unbounded linear drive.
pub const LINEAR_DOMAIN: f64 = 200.0;

type Mat2 = [[f64; 2]; 2];

fn mat_vec(m: &Mat2, v: [f64; 2]) -> [f64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// e^M for a real 2×2 matrix, written so that large negative spectra stay finite.
fn expm2(m: &Mat2) -> Mat2 {
    let t = 0.5 * (m[0][0] + m[1][1]);
    let b = [[m[0][0] - t, m[0][1]], [m[1][0], m[1][1] - t]];
    let q = b[0][0] * b[0][0] + b[0][1] * b[1][0];
    let (c, s) = if q > 1e-16 {
        let r = q.sqrt();
        let ep = (t + r).exp();
        let em = (t - r).exp();
        (0.5 * (ep + em), 0.5 * (ep - em) / r)
    } else if q < -1e-16 {
        let r = (-q).sqrt();
        let e = t.exp();
        (e * r.cos(), e * r.sin() / r)
    } else {
        let e = t.exp();
        (e * (1.0 + 0.5 * q), e * (1.0 + q / 6.0))
    };
    [[c + s * b[0][0], s * b[0][1]], [s * b[1][0], c + s * b[1][1]]]
}

/// Fourth-order Magnus step of v′ = A(s)v over [s, s + h].
fn magnus_step(a: &impl Fn(f64) -> Mat2, s: f64, h: f64) -> Mat2 {
    let d = 3f64.sqrt() / 6.0;
    let a1 = a(s + h * (0.5 - d));
    let a2 = a(s + h * (0.5 + d));
    let mut om = [[0.0; 2]; 2];
    let k = 3f64.sqrt() / 12.0 * h * h;
    for i in 0..2 {
        for j in 0..2 {
            let comm = (0..2).map(|l| a2[i][l] * a1[l][j] - a1[i][l] * a2[l][j]).sum::<f64>();
            om[i][j] = 0.5 * h * (a1[i][j] + a2[i][j]) + k * comm;
        }
    }
    expm2(&om)
}

/// Integrates v′ = A(s)v from s0 to s1 (s1 > s0) with step-doubling control.
fn propagate(a: impl Fn(f64) -> Mat2, s0: f64, s1: f64, v0: [f64; 2], tol: f64) -> Result<[f64; 2]> {
    if s1 <= s0 {
        return Ok(v0);
    }
    let mut s = s0;
    let mut v = v0;
    let mut h = ((s1 - s0) / 64.0).min(0.05);
    let mut steps = 0usize;
    while s < s1 {
        if s + h > s1 {
            h = s1 - s;
        }
        let big = mat_vec(&magnus_step(&a, s, h), v);
        let half = mat_vec(&magnus_step(&a, s + 0.5 * h, 0.5 * h), mat_vec(&magnus_step(&a, s, 0.5 * h), v));
        let scale = half[0].abs().max(half[1].abs()).max(1e-300);
        let err = ((big[0] - half[0]).abs().max((big[1] - half[1]).abs()) / scale) / 15.0;
        if err <= tol || h < 1e-12 {
            s += h;
            v = half;
            steps += 1;
            let grow = if err > 0.0 { (tol / err).powf(0.2).clamp(0.2, 4.0) * 0.9 } else { 4.0 };
            h *= grow;
        } else {
            h *= ((tol / err).powf(0.2) * 0.9).max(0.1);
        }
        if steps > 5_000_000 {
            return Err(Error::NotConverged {
                what: "transfer ODE".into(),
                est_error: err,
                tol,
            });
        }
    }
    Ok(v)
}

/// One momentum mode driven from σ = −∞ to +∞ at zero temperature.
#[derive(Debug, Clone)]
pub struct ExactDrivenMode {
    pub r: f64,
    pub phi: f64,
    pub protocol: DriveProtocol,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub tol: f64,
}

impl ExactDrivenMode {
    pub fn new(r: f64, phi: f64, protocol: &DriveProtocol) -> Self {
        let (lo, hi) = match protocol.active_window() {
            Some((a, b)) => (a, b),
            None => (phi.cos() - LINEAR_DOMAIN, phi.cos() + LINEAR_DOMAIN),
        };
        ExactDrivenMode {
            r,
            phi,
            protocol: protocol.clone(),
            sigma_min: lo,
            sigma_max: hi,
            tol: 1e-11,
        }
    }

    fn rate(&self, sigma: f64) -> f64 {
        2.0 * eps_at(self.r, self.phi, self.protocol.h(sigma)) / self.protocol.omega
    }

    fn td(&self, sigma: f64) -> f64 {
        theta_dot_phi(self.r, self.phi, &self.protocol, sigma)
    }

    fn forward(&self, sigma: f64) -> Result<[f64; 2]> {
        let a = |s: f64| {
            let (k, t) = (self.rate(s), self.td(s));
            [[-k, -t], [t, 0.0]]
        };
        propagate(a, self.sigma_min.min(sigma), sigma, [0.0, 1.0], self.tol)
    }

    fn backward(&self, sigma: f64) -> Result<[f64; 2]> {
        let a = |s: f64| {
            let (k, t) = (self.rate(-s), self.td(-s));
            [[-k, -t], [t, 0.0]]
        };
        propagate(a, -self.sigma_max.max(sigma), -sigma, [0.0, 1.0], self.tol)
    }

    /// det(1 + K) = x(+∞).
    pub fn determinant(&self) -> Result<f64> {
        Ok(self.forward(self.sigma_max)?[1])
    }

    /// E = −ln det(1 + K).
    pub fn energy(&self) -> Result<f64> {
        Ok(-self.determinant()?.ln())
    }

    pub fn rho(&self, sigma: f64) -> Result<Complex64> {
        let v = self.forward(sigma)?;
        Ok(I * v[0] / v[1])
    }

    pub fn mu(&self, sigma: f64) -> Result<Complex64> {
        let v = self.backward(sigma)?;
        Ok(I * v[0] / v[1])
    }

    /// tr⟨σ|ΣG̃|σ⟩; equals 1 without driving.
    pub fn trace(&self, sigma: f64) -> Result<Complex64> {
        let rho = self.rho(sigma)?;
        let mu = self.mu(sigma)?;
        Ok((1.0 + mu) * (1.0 - rho) / (1.0 + rho * mu))
    }

    /// First-order coefficient c⁽¹⁾(σ) = μ₁ − ρ₁ from the linearized runs.
    pub fn c1(&self, sigma: f64) -> Result<Complex64> {
        let fwd = |s: f64| [[-self.rate(s), -self.td(s)], [0.0, 0.0]];
        let bwd = |s: f64| [[-self.rate(-s), -self.td(-s)], [0.0, 0.0]];
        let y_f = propagate(fwd, self.sigma_min.min(sigma), sigma, [0.0, 1.0], self.tol)?[0];
        let y_b = propagate(bwd, -self.sigma_max.max(sigma), -sigma, [0.0, 1.0], self.tol)?[0];
        Ok(I * (y_b - y_f))
    }
}

fn linear_args(r: f64, phi: f64, sigma: f64) -> (f64, f64) {
    (sigma - phi.cos(), r * phi.sin())
}

/// c⁽¹⁾ for the linear drive from its integral representation, written in the
/// angle α = atan(x/|s|) so that θ̇dσ = −(sgn s/2)dα.
pub fn c1_exact_linear(r: f64, phi: f64, omega: f64, sigma: f64, tol: f64) -> Result<Complex64> {
    let (x, s) = linear_args(r, phi, sigma);
    if s == 0.0 {
        return Ok(Complex64::from(0.0));
    }
    let a = s.abs();
    let alpha = (x / a).atan();
    let fx = linear_phase_primitive(x, a);
    let k = 2.0 / omega;
    let before = |b: f64| (-k * (fx - linear_phase_primitive(a * b.tan(), a))).exp();
    let after = |b: f64| (-k * (linear_phase_primitive(a * b.tan(), a) - fx)).exp();
    let opts = QuadOptions::with_tol(tol).min_panels(4).max_panels(1 << 16);
    // the integrands fall off on the scale ω/ε around α
    let width = (omega / (2.0 * eps_at(r, phi, sigma))).atan().max(1e-12);
    let split = |lo: f64, hi: f64| {
        let mut pts = vec![];
        let mut d = width;
        while d < hi - lo {
            pts.push(alpha - d);
            pts.push(alpha + d);
            d *= 4.0;
        }
        breakpoints(lo, hi, pts)
    };
    let i1 = integrate_split(before, &split(-0.5 * PI, alpha), opts);
    let i2 = integrate_split(after, &split(alpha, 0.5 * PI), opts);
    if !(i1.converged && i2.converged) {
        return Err(Error::NotConverged {
            what: "c1 integral".into(),
            est_error: i1.est_error.max(i2.est_error),
            tol,
        });
    }
    Ok(I * (-0.5 * s.signum()) * (i1.value - i2.value))
}

/// Leading adiabatic c⁽¹⁾ = −i(ω²/2)(1/ε)∂_σ(θ̇/ε) for piecewise-linear h.
pub fn c1_adiabatic_phi(r: f64, phi: f64, protocol: &DriveProtocol, sigma: f64) -> Complex64 {
    let s = r * phi.sin();
    let dh = protocol.dh(sigma);
    if s == 0.0 || dh == 0.0 {
        return Complex64::from(0.0);
    }
    let h = protocol.h(sigma);
    let e = eps_at(r, phi, h);
    let de = 4.0 * (h - phi.cos()) * dh / e;
    // θ̇/ε = −2s h′ ε⁻³ with h″ = 0
    let d_ratio = 6.0 * s * dh * de / e.powi(4);
    let w = protocol.omega;
    -I * (0.5 * w * w / e) * d_ratio
}

pub fn c1_adiabatic(params: &ChainParams, protocol: &DriveProtocol, m: usize, sigma: f64) -> Result<Complex64> {
    params.validate()?;
    if m >= params.n_sites {
        return Err(Error::IndexOutOfRange { index: m, n_sites: params.n_sites });
    }
    Ok(c1_adiabatic_phi(params.r, crate::spectrum::momentum(m, params.n_sites), protocol, sigma))
}

/// The explicit linear-drive leading form iω²·r sin φ·ε⁻¹∂_σ ε⁻³.
pub fn c1_adiabatic_linear_explicit(r: f64, phi: f64, omega: f64, sigma: f64) -> Complex64 {
    let (x, s) = linear_args(r, phi, sigma);
    let e = 2.0 * x.hypot(s);
    let d_inv3 = -3.0 * e.powi(-4) * (4.0 * x / e);
    I * omega * omega * s * d_inv3 / e
}

/// The ω → ∞ value i[∫_{−∞}^{σ}θ̇ − ∫_{σ}^{∞}θ̇].
pub fn c1_sudden(r: f64, phi: f64, protocol: &DriveProtocol, sigma: f64) -> Complex64 {
    let s = r * phi.sin();
    if s == 0.0 {
        return Complex64::from(0.0);
    }
    if protocol.kind == DriveKind::Linear {
        let alpha = ((sigma - phi.cos()) / s.abs()).atan();
        return -I * s.signum() * alpha;
    }
    let (lo, hi) = protocol.active_window().unwrap();
    let f = |x: f64| theta_dot_phi(r, phi, protocol, x);
    let knots: Vec<f64> = protocol.samples().iter().map(|p| p.0).collect();
    let opts = QuadOptions::with_tol(1e-13).min_panels(2);
    let left = if sigma > lo { integrate_split(f, &breakpoints(lo, sigma.min(hi), knots.clone()), opts).value } else { 0.0 };
    let right = if sigma < hi { integrate_split(f, &breakpoints(sigma.max(lo), hi, knots), opts).value } else { 0.0 };
    I * (left - right)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticEnergy {
    /// (ω/2)∫dσ θ̇²/ε.
    pub value: f64,
    /// min ε along the protocol.
    pub min_eps: f64,
    /// False when min ε < 4√ω, inside the critical window.
    pub valid: bool,
}

pub fn adiabatic_em_phi(r: f64, phi: f64, protocol: &DriveProtocol) -> Result<AdiabaticEnergy> {
    let s = r * phi.sin();
    let w = protocol.omega;
    let threshold = 4.0 * w.sqrt();
    if s == 0.0 || protocol.is_static() {
        let min_eps = match protocol.kind {
            DriveKind::Linear => 2.0 * s.abs(),
            DriveKind::Custom => protocol.samples().iter().map(|p| eps_at(r, phi, p.1)).fold(f64::INFINITY, f64::min),
        };
        return Ok(AdiabaticEnergy {
            value: 0.0,
            min_eps,
            valid: true,
        });
    }
    match protocol.kind {
        DriveKind::Linear => {
            let min_eps = 2.0 * s.abs();
            Ok(AdiabaticEnergy {
                value: w / (12.0 * s * s),
                min_eps,
                valid: min_eps >= threshold,
            })
        }
        DriveKind::Custom => {
            let (lo, hi) = protocol.active_window().unwrap();
            let knots: Vec<f64> = protocol.samples().iter().map(|p| p.0).collect();
            let c = phi.cos();
            let mut interior = knots.clone();
            for win in protocol.samples().windows(2) {
                let ((s0, h0), (s1, h1)) = (win[0], win[1]);
                if (h0 - c) * (h1 - c) < 0.0 {
                    interior.push(s0 + (c - h0) * (s1 - s0) / (h1 - h0));
                }
            }
            let f = |x: f64| {
                let t = theta_dot_phi(r, phi, protocol, x);
                t * t / eps_at(r, phi, protocol.h(x))
            };
            let res = integrate_split(f, &breakpoints(lo, hi, interior), QuadOptions::with_tol(1e-13).min_panels(4));
            let min_eps = protocol
                .samples()
                .windows(2)
                .map(|win| {
                    let ((_, h0), (_, h1)) = (win[0], win[1]);
                    let hc = c.clamp(h0.min(h1), h0.max(h1));
                    eps_at(r, phi, hc)
                })
                .fold(f64::INFINITY, f64::min);
            Ok(AdiabaticEnergy {
                value: 0.5 * w * res.value,
                min_eps,
                valid: min_eps >= threshold,
            })
        }
    }
}

pub fn adiabatic_em(params: &ChainParams, protocol: &DriveProtocol, m: usize) -> Result<AdiabaticEnergy> {
    params.validate()?;
    if m >= params.n_sites {
        return Err(Error::IndexOutOfRange { index: m, n_sites: params.n_sites });
    }
    adiabatic_em_phi(params.r, crate::spectrum::momentum(m, params.n_sites), protocol)
}

/// Fraction of the bound π/2 that defines the critical window.
pub const KZ_THRESHOLD: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KzOptions {
    pub r: f64,
    /// σ at which the window is located (the critical point h = 1).
    pub sigma: f64,
    /// Momentum scan, log-spaced in (phi_min, π).
    pub phi_min: f64,
    pub n_phi: usize,
    pub tol: f64,
}

impl Default for KzOptions {
    fn default() -> Self {
        KzOptions {
            r: 1.0,
            sigma: 1.0,
            phi_min: 1e-5,
            n_phi: 400,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KzRow {
    pub omega: f64,
    /// Half-width of the region near φ = 0 with |c⁽¹⁾| ≥ 0.9·π/2.
    pub phi0: Option<f64>,
    pub xi: Option<f64>,
    pub max_abs_c1: f64,
    /// φ at which |c⁽¹⁾(φ; σ)| peaks.
    pub phi_peak: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlqRow {
    pub omega: f64,
    pub l: i64,
    /// −(1/2π)∫dφ e^{iφl − 2iθ}(tr − 1), all orders.
    pub b_q: Complex64,
    /// First-order part.
    pub b_q1: Complex64,
    /// sin[φ₀(2l+1)/2]/(2l+1), when φ₀ exists.
    pub predicted: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KzSweep {
    pub rows: Vec<KzRow>,
    /// Fit of ln ξ against ln ω over rows with a located window.
    pub fit: Option<LinearFit>,
    /// Fit of ln(1/φ_peak) against ln ω.
    pub peak_fit: Option<LinearFit>,
    pub blq: Vec<BlqRow>,
}

/// |c⁽¹⁾(φ; σ)| scan for the linear drive.
pub fn c1_profile(omega: f64, opts: &KzOptions) -> Result<Vec<(f64, Complex64)>> {
    let phis = logspace(opts.phi_min, PI * (1.0 - 1e-9), opts.n_phi);
    phis.into_par_iter().map(|p| Ok((p, c1_exact_linear(opts.r, p, omega, opts.sigma, opts.tol)?))).collect()
}

fn kz_row(omega: f64, opts: &KzOptions) -> Result<KzRow> {
    let prof = c1_profile(omega, opts)?;
    let bound = KZ_THRESHOLD * 0.5 * PI;
    let mut phi0 = None;
    for (p, c) in &prof {
        if c.norm() >= bound {
            phi0 = Some(*p);
        } else {
            break;
        }
    }
    let (phi_peak, max_abs_c1) = prof.iter().map(|(p, c)| (*p, c.norm())).fold((0.0, -1.0), |a, b| if b.1 > a.1 { b } else { a });
    Ok(KzRow {
        omega,
        phi0,
        xi: phi0.map(|p| 1.0 / p),
        max_abs_c1,
        phi_peak,
    })
}

/// Full quench remainder B_l^Q(σ) and its first-order part for each `l`, in
/// the thermodynamic limit at zero temperature.
pub fn blq_linear(r: f64, omega: f64, ls: &[i64], sigma: f64, tol: f64) -> Result<Vec<(Complex64, Complex64)>> {
    let protocol = DriveProtocol::linear(omega)?;
    let scale = omega.sqrt();
    let mut pts = vec![];
    let mut d = scale / 16.0;
    while d < PI {
        pts.push(d);
        pts.push(2.0 * PI - d);
        d *= 2.0;
    }
    let br = breakpoints(0.0, 2.0 * PI, pts);
    let h = protocol.h(sigma);
    // per node: (e^{−2iθ}(tr − 1), e^{−2iθ}c⁽¹⁾)
    let eval = |phi: f64| -> Result<(Complex64, Complex64)> {
        let tt = match bogoliubov_angle(h, r, phi) {
            Ok(t) => 2.0 * t,
            Err(_) => return Ok((Complex64::from(0.0), Complex64::from(0.0))),
        };
        let ph = Complex64::from_polar(1.0, -tt);
        let mut mode = ExactDrivenMode::new(r, phi, &protocol);
        mode.tol = 1e-9;
        let full = mode.trace(sigma)? - 1.0;
        let first = c1_exact_linear(r, phi, omega, sigma, 1e-11)?;
        Ok((ph * full, ph * first))
    };
    let rule = crate::numerics::gauss_legendre_16();
    let run = |panels: usize| -> Result<Vec<(Complex64, Complex64)>> {
        let nodes: Vec<(f64, f64)> = br
            .windows(2)
            .flat_map(|w| {
                let width = (w[1] - w[0]) / panels as f64;
                (0..panels).flat_map(move |p| {
                    let mid = w[0] + (p as f64 + 0.5) * width;
                    rule.iter().map(move |&(x, wt)| (mid + 0.5 * width * x, 0.5 * width * wt))
                })
            })
            .collect();
        let vals = nodes.par_iter().map(|&(p, w)| eval(p).map(|v| (p, w, v))).collect::<Result<Vec<_>>>()?;
        Ok(ls
            .iter()
            .map(|&l| {
                let mut acc = (Complex64::from(0.0), Complex64::from(0.0));
                for (p, w, (a, b)) in &vals {
                    let e = Complex64::from_polar(*w, p * l as f64);
                    acc.0 += a * e;
                    acc.1 += b * e;
                }
                (acc.0 * (-0.5 / PI), acc.1 * (-0.5 / PI))
            })
            .collect())
    };
    let coarse = run(1)?;
    let fine = run(2)?;
    let err = coarse.iter().zip(&fine).map(|(c, f)| (c.0 - f.0).norm()).fold(0.0, f64::max);
    if err > tol {
        return Err(Error::NotConverged {
            what: "B^Q quadrature".into(),
            est_error: err,
            tol,
        });
    }
    Ok(fine)
}

pub fn kz_sweep(omegas: &[f64], ls: &[i64], opts: &KzOptions) -> Result<KzSweep> {
    let rows = omegas.iter().map(|&w| kz_row(w, opts)).collect::<Result<Vec<_>>>()?;
    let located: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.xi.map(|x| (r.omega, x))).collect();
    let fit = if located.len() >= 2 {
        let (x, y): (Vec<f64>, Vec<f64>) = located.into_iter().unzip();
        Some(log_log_fit(&x, &y))
    } else {
        None
    };
    let (px, py): (Vec<f64>, Vec<f64>) = rows.iter().map(|r| (r.omega, 1.0 / r.phi_peak)).unzip();
    let peak_fit = if rows.len() >= 2 { Some(log_log_fit(&px, &py)) } else { None };
    let mut blq = Vec::new();
    for row in &rows {
        let vals = blq_linear(opts.r, row.omega, ls, opts.sigma, 1e-6)?;
        for (&l, &(b_q, b_q1)) in ls.iter().zip(&vals) {
            let predicted = row.phi0.map(|p| {
                let k = (2 * l + 1) as f64;
                (p * k / 2.0).sin() / k
            });
            blq.push(BlqRow {
                omega: row.omega,
                l,
                b_q,
                b_q1,
                predicted,
            });
        }
    }
    Ok(KzSweep { rows, fit, peak_fit, blq })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_matches_series() {
        let m = [[-0.3, 0.7], [-0.2, 0.1]];
        let mut acc = [[1.0, 0.0], [0.0, 1.0]];
        let mut term = acc;
        for k in 1..30 {
            let mut next = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    next[i][j] = (0..2).map(|l| term[i][l] * m[l][j]).sum::<f64>() / k as f64;
                }
            }
            term = next;
            for i in 0..2 {
                for j in 0..2 {
                    acc[i][j] += term[i][j];
                }
            }
        }
        let e = expm2(&m);
        for i in 0..2 {
            for j in 0..2 {
                assert!((e[i][j] - acc[i][j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn static_mode_is_trivial() {
        let p = DriveProtocol::constant(0.3, 0.5).unwrap();
        let m = ExactDrivenMode::new(1.0, 1.0, &p);
        assert_eq!(m.energy().unwrap(), 0.0);
        assert_eq!(m.trace(0.2).unwrap(), Complex64::from(1.0));
        assert_eq!(c1_adiabatic_phi(1.0, 1.0, &p, 0.0), Complex64::from(0.0));
        assert_eq!(adiabatic_em_phi(1.0, 1.0, &p).unwrap().value, 0.0);
    }

    #[test]
    fn explicit_form_matches_general() {
        let p = DriveProtocol::linear(0.07).unwrap();
        for (r, phi, sigma) in [(1.0, 0.4, 0.3), (0.6, 2.0, -1.2), (0.3, 1.0, 1.0)] {
            let a = c1_adiabatic_phi(r, phi, &p, sigma);
            let b = c1_adiabatic_linear_explicit(r, phi, 0.07, sigma);
            assert!((a - b).norm() <= 1e-10 * a.norm().max(1e-300), "{a} {b}");
        }
    }

    #[test]
    fn c1_ode_matches_integral() {
        let p = DriveProtocol::linear(0.3).unwrap();
        for (phi, sigma) in [(1.2, 0.8), (0.5, -0.3), (2.5, 0.0)] {
            let ode = ExactDrivenMode::new(1.0, phi, &p).c1(sigma).unwrap();
            let quad = c1_exact_linear(1.0, phi, 0.3, sigma, 1e-12).unwrap();
            assert!((ode - quad).norm() < 1e-8, "{ode} {quad}");
        }
    }

    #[test]
    fn c1_vanishes_at_the_avoided_crossing() {
        let c = c1_exact_linear(1.0, 0.9, 0.2, 0.9f64.cos(), 1e-13).unwrap();
        assert!(c.norm() < 1e-12);
    }

    #[test]
    fn sudden_limit() {
        let p = DriveProtocol::linear(1e4).unwrap();
        let c = c1_exact_linear(1.0, 1.0, 1e4, 0.7, 1e-12).unwrap();
        assert!((c - c1_sudden(1.0, 1.0, &p, 0.7)).norm() < 1e-3);
    }

    #[test]
    fn adiabatic_energy_closed_form_matches_quadrature() {
        let lin = DriveProtocol::linear(0.1).unwrap();
        let tab = DriveProtocol::custom(0.1, vec![(-400.0, -400.0), (400.0, 400.0)]).unwrap();
        let a = adiabatic_em_phi(0.8, 1.1, &lin).unwrap();
        let b = adiabatic_em_phi(0.8, 1.1, &tab).unwrap();
        assert!((a.value - b.value).abs() < 1e-8 * a.value);
        assert!(a.valid);
        assert!(!adiabatic_em_phi(0.8, 0.05, &lin).unwrap().valid);
    }
}
