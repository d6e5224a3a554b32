//! Equal-time and imaginary-time two-point functions built from the mode set.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{breakpoints, integrate_split, QuadOptions, QuadratureResult};
use crate::propagators::{greens_advanced, greens_retarded, PropagatorSpec};
use crate::spectrum::{mode_set, phi_h, ChainParams, Mode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrelatorKind {
    /// ⟨T ψ†_b(τ₂) ψ_a(τ₁)⟩
    PsiDaggerPsi,
    /// ⟨T ψ_b(τ₂) ψ†_a(τ₁)⟩
    PsiPsiDagger,
    /// ⟨T ψ†_b(τ₂) ψ†_a(τ₁)⟩
    PsiDaggerPsiDagger,
    /// ⟨T ψ_b(τ₂) ψ_a(τ₁)⟩
    PsiPsi,
}

impl CorrelatorKind {
    pub const ALL: [CorrelatorKind; 4] = [
        CorrelatorKind::PsiDaggerPsi,
        CorrelatorKind::PsiPsiDagger,
        CorrelatorKind::PsiDaggerPsiDagger,
        CorrelatorKind::PsiPsi,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermionCorrelator {
    pub kind: CorrelatorKind,
    pub a: usize,
    pub b: usize,
    pub value: Complex64,
}

fn check_site(params: &ChainParams, index: usize) -> Result<()> {
    if index >= params.n_sites {
        return Err(Error::IndexOutOfRange { index, n_sites: params.n_sites });
    }
    Ok(())
}

fn mode_term(kind: CorrelatorKind, md: &Mode, beta: f64, tau2: f64, tau1: f64) -> Complex64 {
    let g = PropagatorSpec::thermal(md.eps, beta);
    let gp = |d: f64| greens_retarded(g, d, 0.0);
    let gm = |d: f64| greens_advanced(g, d, 0.0);
    let (c2, s2) = (md.theta.cos().powi(2), md.theta.sin().powi(2));
    let sin2 = md.sin2theta();
    match kind {
        CorrelatorKind::PsiPsiDagger => Complex64::new(c2 * gp(tau2 - tau1) + s2 * gm(tau2 - tau1), 0.0),
        CorrelatorKind::PsiDaggerPsi => Complex64::new(-(c2 * gp(tau1 - tau2) + s2 * gm(tau1 - tau2)), 0.0),
        CorrelatorKind::PsiDaggerPsiDagger => Complex64::new(0.0, 0.5 * sin2 * (gp(tau1 - tau2) - gm(tau1 - tau2))),
        CorrelatorKind::PsiPsi => Complex64::new(0.0, -0.5 * sin2 * (gp(tau2 - tau1) - gm(tau2 - tau1))),
    }
}

/// Thermal two-point function at inverse temperature `beta` (`f64::INFINITY` for the ground state).
pub fn fermion_two_point_thermal(params: &ChainParams, kind: CorrelatorKind, b: usize, a: usize, tau2: f64, tau1: f64, beta: f64) -> Result<Complex64> {
    check_site(params, a)?;
    check_site(params, b)?;
    let modes = mode_set(params)?;
    let n = params.n_sites as f64;
    let dist = b as f64 - a as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for md in &modes {
        acc += Complex64::from_polar(1.0, md.phi * dist) * mode_term(kind, md, beta, tau2, tau1);
    }
    acc /= n;
    let diagonal = matches!(kind, CorrelatorKind::PsiDaggerPsi | CorrelatorKind::PsiPsiDagger);
    if diagonal && tau2 == tau1 && a == b {
        acc += 0.5;
    }
    Ok(acc)
}

/// Ground-state two-point function of the four fermion bilinears.
pub fn fermion_two_point(params: &ChainParams, kind: CorrelatorKind, b: usize, a: usize, tau2: f64, tau1: f64) -> Result<Complex64> {
    fermion_two_point_thermal(params, kind, b, a, tau2, tau1, f64::INFINITY)
}

/// (1/N) Σ_m cos 2θ_m.
pub fn transverse_magnetization(params: &ChainParams) -> Result<f64> {
    let modes = mode_set(params)?;
    Ok(modes.iter().map(|m| m.cos2theta()).sum::<f64>() / params.n_sites as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MagnetizationIntegrand {
    /// (h − cos φ)/√(…), the continuum limit of the mode sum.
    Signed,
    /// |h − cos φ|/√(…).
    Absolute,
}

/// Thermodynamic magnetization (1/π) ∫₀^π dφ f(φ) for either integrand.
pub fn transverse_magnetization_thermodynamic(h: f64, r: f64, integrand: MagnetizationIntegrand, tol: f64) -> QuadratureResult<f64> {
    let f = move |phi: f64| {
        let k = h - phi.cos();
        let den = k.hypot(r * phi.sin());
        if den == 0.0 {
            return 0.0;
        }
        let num = match integrand {
            MagnetizationIntegrand::Signed => k,
            MagnetizationIntegrand::Absolute => k.abs(),
        };
        num / den / PI
    };
    let kink = if h.abs() < 1.0 { Some(h.acos()) } else { None };
    integrate_split(f, &breakpoints(0.0, PI, kink), QuadOptions::with_tol(tol).min_panels(4))
}

/// R(l) on the discrete grid, with the Ising denominator √((h−cosφ)² + sin²φ).
pub fn r_function_discrete(h: f64, l: i64, n_sites: usize) -> Result<f64> {
    let p = ChainParams::new(n_sites, 1.0, h)?;
    let modes = mode_set(&p)?;
    Ok(modes.iter().map(|m| (m.phi * l as f64).cos() / (0.5 * m.eps)).sum::<f64>() / n_sites as f64)
}

/// Thermodynamic R(l) = (1/π) ∫₀^π cos(φl)/√((h−cosφ)² + sin²φ) dφ.
pub fn r_function_thermodynamic(h: f64, l: i64, tol: f64) -> Result<QuadratureResult<f64>> {
    if (h.abs() - 1.0).abs() < 1e-14 {
        return Err(Error::Gapless { phi: if h > 0.0 { 0.0 } else { PI } });
    }
    let f = move |phi: f64| (phi * l as f64).cos() / (h - phi.cos()).hypot(phi.sin()) / PI;
    let panels = 4 + 2 * l.unsigned_abs() as usize;
    Ok(integrate_split(f, &[0.0, PI], QuadOptions::with_tol(tol).min_panels(panels)))
}

/// R(l) for a finite chain (`Some(N)`) or in the thermodynamic limit (`None`).
pub fn r_function(h: f64, l: i64, n_sites: Option<usize>) -> Result<f64> {
    match n_sites {
        Some(n) => r_function_discrete(h, l, n),
        None => {
            let q = r_function_thermodynamic(h, l, 1e-13)?;
            if !q.converged {
                return Err(Error::NotConverged {
                    what: "R(l) quadrature".into(),
                    est_error: q.est_error,
                    tol: 1e-13,
                });
            }
            Ok(q.value)
        }
    }
}

/// Ising (r = 1) static connected correlator −Σ(l)Σ(−l), Σ(l) = hR(l) − R(l+1).
pub fn zz_connected_static_sigma(h: f64, l: i64, n_sites: Option<usize>) -> Result<f64> {
    let sigma = |x: i64| -> Result<f64> { Ok(h * r_function(h, x, n_sites)? - r_function(h, x + 1, n_sites)?) };
    Ok(-sigma(l)? * sigma(-l)?)
}

/// Static connected ⟨σᶻ_j σᶻ_k⟩_c with l = j − k (l ≠ 0).
///
/// At r = 1 the −Σ(l)Σ(−l) form is used, otherwise the equal-time A + B mode sums.
pub fn zz_connected_static(params: &ChainParams, l: i64) -> Result<f64> {
    if l == 0 {
        return Err(Error::param("l", "the connected two-site correlator needs l != 0"));
    }
    if params.r == 1.0 {
        zz_connected_static_sigma(params.h, l, Some(params.n_sites))
    } else {
        Ok(crate::dynamic_correlators::zz_connected_time(params, l, 0.0)?.re)
    }
}

/// Equal-time XX Majorana correlator (2/π) sin(lφ_h)/l; the l = 0 value is (2/π)φ_h.
pub fn majorana_equal_time_xx(h: f64, l: i64) -> Result<f64> {
    let ph = phi_h(h)?;
    if l == 0 {
        return Ok(2.0 / PI * ph);
    }
    Ok(2.0 / PI * (l as f64 * ph).sin() / l as f64)
}

/// Equal-time ⟨γ_p γ_q⟩ (1-based Majorana labels, γ_{2j−1} = ψ†_j + ψ_j,
/// γ_{2j} = i(ψ†_j − ψ_j)) assembled from the fermion two-point functions.
pub fn majorana_two_point(params: &ChainParams, p: usize, q: usize) -> Result<Complex64> {
    if p == 0 || q == 0 || p > 2 * params.n_sites || q > 2 * params.n_sites {
        return Err(Error::IndexOutOfRange {
            index: p.max(q),
            n_sites: 2 * params.n_sites,
        });
    }
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    // (coefficient of ψ†, coefficient of ψ)
    let coeffs = |k: usize| if k % 2 == 1 { (one, one) } else { (i, -i) };
    let (sp, sq) = ((p - 1) / 2, (q - 1) / 2);
    let (dp, ap) = coeffs(p);
    let (dq, aq) = coeffs(q);
    let corr = |kind| fermion_two_point(params, kind, sp, sq, 0.0, 0.0);
    Ok(dp * dq * corr(CorrelatorKind::PsiDaggerPsiDagger)?
        + dp * aq * corr(CorrelatorKind::PsiDaggerPsi)?
        + ap * dq * corr(CorrelatorKind::PsiPsiDagger)?
        + ap * aq * corr(CorrelatorKind::PsiPsi)?)
}
