//! Equal-time driven correlators from the resolvent G̃ = (1 + K)⁻¹G.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use super::{build_kernel_phi, plemelj_coefficients, DriveProtocol, KernelOperator, TimeGrid};
use crate::error::{Error, Result};
use crate::numerics::{breakpoints, integrate_split, solve, QuadOptions};
use crate::spectrum::{bogoliubov_angle, momentum, ChainParams};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// tr⟨τ|ΣG̃|τ⟩ for one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeTrace {
    /// The grid edge actually used.
    pub tau: f64,
    pub trace: Complex64,
    /// First-order part c⁽¹⁾ (the term linear in K).
    pub c1: Complex64,
    /// tr⟨τ|ΣG|τ⟩ of the undriven propagator.
    pub bare: f64,
}

impl ModeTrace {
    /// Everything beyond the static value 1 (zero temperature) or the bare value.
    pub fn remainder(&self) -> Complex64 {
        self.trace - self.bare
    }
}

/// Columns G(·, τ) for the two Nambu components, evaluated on the nodes,
/// plus the row vectors G(τ, ·).
struct Probe {
    gp_col: DVector<f64>,
    gm_col: DVector<f64>,
    gp_row: DVector<f64>,
    gm_row: DVector<f64>,
    gp0: f64,
}

fn probe(k: &KernelOperator, tau: f64) -> Probe {
    let lam = k.lambda_nodes();
    let total = k.total_phase;
    let l0 = k.phase.at(tau);
    let nodes = k.grid.nodes();
    let n = nodes.len();
    let gp = |a: f64, la: f64, b: f64, lb: f64| {
        let fm = 1.0 / (1.0 + (-total).exp());
        if a > b {
            fm * (lb - la).exp()
        } else {
            -fm * (lb - la - total).exp()
        }
    };
    let gp_col = DVector::from_fn(n, |j, _| gp(nodes[j], lam[j], tau, l0));
    let gp_row = DVector::from_fn(n, |j, _| gp(tau, l0, nodes[j], lam[j]));
    Probe {
        gm_col: -&gp_row,
        gm_row: -&gp_col,
        gp_col,
        gp_row,
        gp0: 0.5 * (0.5 * total).tanh(),
    }
}

/// G̃(τ,τ) = G(τ,τ) − Σ_j G(τ,τ_j) iθ_jΔτ σˣ X(τ_j), given the two solution
/// columns X = (upper, lower) for each Nambu column. Returns tr(ΣG̃).
fn coincidence_trace(k: &KernelOperator, pr: &Probe, col1: (&DVector<Complex64>, &DVector<Complex64>), col2: (&DVector<Complex64>, &DVector<Complex64>)) -> Complex64 {
    let w = &k.weights;
    let dot = |row: &DVector<f64>, x: &DVector<Complex64>| -> Complex64 { row.iter().zip(w).zip(x.iter()).map(|((g, w), x)| *x * (g * w)).sum() };
    let g11 = Complex64::from(pr.gp0) - I * dot(&pr.gp_row, col1.1);
    let g21 = -I * dot(&pr.gm_row, col1.0);
    let g12 = -I * dot(&pr.gp_row, col2.1);
    let g22 = Complex64::from(-pr.gp0) - I * dot(&pr.gm_row, col2.0);
    // Σ = σᶻ − iσʸ = [[1, −1], [1, −1]]
    g11 - g21 + g12 - g22
}

fn to_c(v: &DVector<f64>) -> DVector<Complex64> {
    v.map(Complex64::from)
}

fn c1_of(k: &KernelOperator, pr: &Probe) -> Complex64 {
    let s: f64 = k.weights.iter().enumerate().map(|(j, w)| w * (pr.gp_row[j] * pr.gm_col[j] - pr.gm_row[j] * pr.gp_col[j])).sum();
    -I * s
}

/// Direct-solve trace at the grid edge nearest `tau`.
pub fn mode_trace(k: &KernelOperator, tau: f64) -> Result<ModeTrace> {
    let e = k.grid.nearest_edge(tau)?;
    let tau = k.grid.edge(e);
    let pr = probe(k, tau);
    let bare = 2.0 * pr.gp0;
    if k.is_zero() {
        return Ok(ModeTrace {
            tau,
            trace: Complex64::from(bare),
            c1: Complex64::from(0.0),
            bare,
        });
    }
    let n = k.dim();
    let up = k.upper();
    let low = k.lower();
    let id = DMatrix::<f64>::identity(n, n);
    // column 1: (I + G⁺ΘG⁻Θ) X₁ = G⁺(·,τ), X₂ = −iG⁻Θ X₁
    let x1c = solve(&(&id + &up * &low), &pr.gp_col)?;
    let x2c = to_c(&(&low * &x1c)) * (-I);
    // column 2: (I + G⁻ΘG⁺Θ) X₂ = G⁻(·,τ), X₁ = −iG⁺Θ X₂
    let x2 = solve(&(&id + &low * &up), &pr.gm_col)?;
    let x1 = to_c(&(&up * &x2)) * (-I);
    let trace = coincidence_trace(k, &pr, (&to_c(&x1c), &x2c), (&x1, &to_c(&x2)));
    Ok(ModeTrace {
        tau,
        trace,
        c1: c1_of(k, &pr),
        bare,
    })
}

/// Same trace from the Helmholtz-summed resolvent through `order`:
/// G̃ ≈ (Σ c_n)⁻¹ Σ N_n G with N_n = c_n − K N_{n−1} and c_n = d_n/n!.
pub fn mode_trace_helmholtz(k: &KernelOperator, tau: f64, order: usize) -> Result<Complex64> {
    let e = k.grid.nearest_edge(tau)?;
    let tau = k.grid.edge(e);
    let pr = probe(k, tau);
    let up = k.upper().map(Complex64::from);
    let low = k.lower().map(Complex64::from);
    let traces = k.traces(order);
    let d = plemelj_coefficients(&traces, order);
    let mut fact = 1.0;
    let c: Vec<f64> = d
        .iter()
        .enumerate()
        .map(|(n, dn)| {
            if n > 0 {
                fact *= n as f64;
            }
            dn / fact
        })
        .collect();
    let norm: f64 = c.iter().sum();
    let apply_k = |v: &(DVector<Complex64>, DVector<Complex64>)| ((&up * &v.1) * I, (&low * &v.0) * I);
    let sum_column = |g: (DVector<Complex64>, DVector<Complex64>)| {
        let mut nn = g.clone();
        let mut acc = g.clone();
        for cn in c.iter().skip(1) {
            let kv = apply_k(&nn);
            nn = (&g.0 * Complex64::from(*cn) - kv.0, &g.1 * Complex64::from(*cn) - kv.1);
            acc = (acc.0 + &nn.0, acc.1 + &nn.1);
        }
        (acc.0 / Complex64::from(norm), acc.1 / Complex64::from(norm))
    };
    let zero = DVector::from_element(k.dim(), Complex64::from(0.0));
    let col1 = sum_column((to_c(&pr.gp_col), zero.clone()));
    let col2 = sum_column((zero, to_c(&pr.gm_col)));
    Ok(coincidence_trace(k, &pr, (&col1.0, &col1.1), (&col2.0, &col2.1)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrivenCorrelator {
    pub tau: f64,
    pub sigma: f64,
    /// Instantaneous field h(σ).
    pub h: f64,
    pub value: Complex64,
    /// Part with tr⟨τ|ΣG|τ⟩ replaced by 1.
    pub b_s: Complex64,
    /// value − b_s.
    pub b_q: Complex64,
    /// First-order piece of b_q.
    pub b_q1: Complex64,
}

fn trace_for_phi(r: f64, phi: f64, protocol: &DriveProtocol, grid: &TimeGrid, tau: f64) -> Result<ModeTrace> {
    let k = build_kernel_phi(r, phi, protocol, grid)?;
    mode_trace(&k, tau)
}

/// B_l(τ) = −(1/N) Σ_m e^{iφ_m l − 2iθ_m(τ)} tr⟨τ|ΣG̃_m|τ⟩ on a finite chain.
pub fn equal_time_driven(params: &ChainParams, protocol: &DriveProtocol, grid: &TimeGrid, l: i64, tau: f64) -> Result<DrivenCorrelator> {
    params.validate()?;
    let e = grid.nearest_edge(tau)?;
    let tau = grid.edge(e);
    let sigma = protocol.omega * tau;
    let h = protocol.h(sigma);
    let n = params.n_sites;
    let parts: Vec<Result<(Complex64, Complex64, Complex64)>> = (0..n)
        .into_par_iter()
        .map(|m| {
            let phi = momentum(m, n);
            let two_theta = 2.0 * bogoliubov_angle(h, params.r, phi)?;
            let phase = Complex64::from_polar(1.0, phi * l as f64 - two_theta);
            let t = trace_for_phi(params.r, phi, protocol, grid, tau)?;
            Ok((phase * t.trace, phase, phase * t.c1))
        })
        .collect();
    let mut value = Complex64::from(0.0);
    let mut b_s = Complex64::from(0.0);
    let mut b_q1 = Complex64::from(0.0);
    for p in parts {
        let (v, s, c) = p?;
        value += v;
        b_s += s;
        b_q1 += c;
    }
    let scale = -1.0 / n as f64;
    let (value, b_s, b_q1) = (value * scale, b_s * scale, b_q1 * scale);
    Ok(DrivenCorrelator {
        tau,
        sigma,
        h,
        value,
        b_s,
        b_q: value - b_s,
        b_q1,
    })
}

/// Thermodynamic-limit version: −(1/2π)∫dφ e^{iφl − 2iθ(φ;τ)} tr(φ;τ).
///
/// For r = 0 the trace is tanh(½Λ_total) exactly, so no kernel is built.
pub fn equal_time_driven_thermodynamic(r: f64, protocol: &DriveProtocol, grid: &TimeGrid, l: i64, tau: f64, tol: f64) -> Result<DrivenCorrelator> {
    use std::f64::consts::PI;
    let e = grid.nearest_edge(tau)?;
    let tau = grid.edge(e);
    let sigma = protocol.omega * tau;
    let h = protocol.h(sigma);
    let mut interior = Vec::new();
    if h.abs() < 1.0 {
        let ph = h.acos();
        interior.extend([ph, 2.0 * PI - ph]);
    }
    let br = breakpoints(0.0, 2.0 * PI, interior);
    let opts = QuadOptions::with_tol(tol).min_panels(2).max_panels(1 << 10);
    let mut failure: Option<Error> = None;
    let mut eval = |phi: f64, which: u8| -> Complex64 {
        if failure.is_some() {
            return Complex64::from(0.0);
        }
        let two_theta = match bogoliubov_angle(h, r, phi) {
            Ok(t) => 2.0 * t,
            Err(_) => return Complex64::from(0.0),
        };
        let phase = Complex64::from_polar(1.0, phi * l as f64 - two_theta);
        if which == 0 {
            return phase;
        }
        let tr = if r == 0.0 {
            let k = crate::driven::Phase::new(0.0, phi, protocol, -0.5 * grid.beta, 0.5 * grid.beta, grid.dt());
            let total = k.at(0.5 * grid.beta);
            ModeTrace {
                tau,
                trace: Complex64::from((0.5 * total).tanh()),
                c1: Complex64::from(0.0),
                bare: (0.5 * total).tanh(),
            }
        } else {
            match trace_for_phi(r, phi, protocol, grid, tau) {
                Ok(t) => t,
                Err(err) => {
                    failure = Some(err);
                    return Complex64::from(0.0);
                }
            }
        };
        if which == 1 {
            phase * tr.trace
        } else {
            phase * tr.c1
        }
    };
    let value = integrate_split(|p| eval(p, 1), &br, opts);
    let b_s = integrate_split(|p| eval(p, 0), &br, opts);
    let b_q1 = integrate_split(|p| eval(p, 2), &br, opts);
    if let Some(err) = failure {
        return Err(err);
    }
    if !value.converged {
        return Err(Error::NotConverged {
            what: "driven correlator quadrature".into(),
            est_error: value.est_error,
            tol,
        });
    }
    let scale = -1.0 / (2.0 * PI);
    let (value, b_s, b_q1) = (value.value * scale, b_s.value * scale, b_q1.value * scale);
    Ok(DrivenCorrelator {
        tau,
        sigma,
        h,
        value,
        b_s,
        b_q: value - b_s,
        b_q1,
    })
}
