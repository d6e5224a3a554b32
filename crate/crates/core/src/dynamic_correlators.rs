//! Real-time ground-state correlators and critical-exponent extraction.

use std::f64::consts::{E, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{bessel_j_seq, bessel_tail_bound, breakpoints, integrate_split, log_log_fit, logspace, LinearFit, QuadOptions};
use crate::propagators::realtime_phase;
use crate::spectrum::{mode_set, phi_h, two_theta_from_kl, ChainParams};

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    pub params: Option<ChainParams>,
    pub l: i64,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<Complex64>, params: Option<ChainParams>, l: i64) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::param("values", "length differs from the time grid"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("times", "must be strictly increasing"));
        }
        Ok(TimeSeries { times, values, params, l })
    }

    /// Evaluates `f` on every time of the grid in parallel.
    pub fn tabulate<F>(times: Vec<f64>, params: Option<ChainParams>, l: i64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<Complex64> + Sync,
    {
        use rayon::prelude::*;
        let values = times.par_iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
        Self::new(times, values, params, l)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn require(q: crate::numerics::QuadratureResult<Complex64>, what: &str, tol: f64) -> Result<Complex64> {
    if q.converged {
        Ok(q.value)
    } else {
        Err(Error::NotConverged {
            what: what.to_string(),
            est_error: q.est_error,
            tol,
        })
    }
}

fn xx_panels(h: f64, l: i64, t: f64) -> usize {
    let phase_range = 2.0 * t.abs() * (1.0 - h);
    2 + (phase_range / 4.0).ceil() as usize + l.unsigned_abs() as usize
}

fn oscillation_panels(t: f64, r: f64) -> usize {
    let slope = 2.0 * r.abs().max(1.0);
    2 + (t.abs() * slope / 4.0).ceil() as usize
}

/// Connected ⟨T σᶻ_j(t₂) σᶻ_k(t₁)⟩ = A_jk(|t|) + B_jk(|t|) on a finite chain, l = j − k.
pub fn zz_connected_time(params: &ChainParams, l: i64, t: f64) -> Result<Complex64> {
    if params.n_sites > 1 << 16 {
        return Err(Error::param("n_sites", "mode-sum path is limited to 2^16 sites"));
    }
    let modes = mode_set(params)?;
    let n = params.n_sites as f64;
    let lf = l as f64;
    let (mut a1, mut a2, mut b) = (Complex64::default(), Complex64::default(), Complex64::default());
    for md in &modes {
        let ph = realtime_phase(md.eps, t);
        let (c, s) = ((md.phi * lf).cos(), (md.phi * lf).sin());
        a1 += ph * (md.theta.cos().powi(2) * c);
        a2 += ph * (md.theta.sin().powi(2) * c);
        b += ph * (md.sin2theta() * s);
    }
    let a = (a1 * 2.0 / n) * (a2 * 2.0 / n);
    let b = (b / n) * (b / n);
    Ok(a + b)
}

/// Thermodynamic limit of [`zz_connected_time`]; the double integrals are
/// evaluated as products of their single-angle factors.
pub fn zz_connected_time_thermodynamic(h: f64, r: f64, l: i64, t: f64, tol: f64) -> Result<Complex64> {
    let lf = l as f64;
    let breaks = breakpoints(0.0, PI, (h.abs() < 1.0).then(|| h.acos()));
    let opts = QuadOptions::with_tol(tol).min_panels(oscillation_panels(t, r) + l.unsigned_abs() as usize);
    let factor = |which: u8| {
        move |phi: f64| {
            let k = h - phi.cos();
            let s = r * phi.sin();
            let eps = 2.0 * k.hypot(s);
            if eps == 0.0 {
                return Complex64::default();
            }
            let w = match which {
                0 => (1.0 + 2.0 * k / eps) * (phi * lf).cos(),
                1 => (1.0 - 2.0 * k / eps) * (phi * lf).cos(),
                _ => 2.0 * s / eps * (phi * lf).sin(),
            };
            realtime_phase(eps, t) * (w / PI)
        }
    };
    let a1 = require(integrate_split(factor(0), &breaks, opts), "A factor (cos²θ)", tol)?;
    let a2 = require(integrate_split(factor(1), &breaks, opts), "A factor (sin²θ)", tol)?;
    let b = require(integrate_split(factor(2), &breaks, opts), "B factor", tol)?;
    Ok(a1 * a2 + b * b)
}

/// B_{ba}(t) = −(1/N) Σ_m e^{iφ_m l − 2iθ_m} e^{−i|t|ε_m}, l = b − a.
pub fn majorana_correlator(params: &ChainParams, l: i64, t: f64) -> Result<Complex64> {
    let modes = mode_set(params)?;
    let sum: Complex64 = modes
        .iter()
        .map(|md| Complex64::from_polar(1.0, md.phi * l as f64 - md.two_theta()) * realtime_phase(md.eps, t))
        .sum();
    Ok(-sum / params.n_sites as f64)
}

/// −(1/2π) ∫₀^{2π} dφ e^{ilφ − 2iθ(φ)} e^{−i|t|ε(φ)}.
pub fn majorana_correlator_thermodynamic(h: f64, r: f64, l: i64, t: f64, tol: f64) -> Result<Complex64> {
    let lf = l as f64;
    let interior: Vec<f64> = if h.abs() < 1.0 { vec![h.acos(), 2.0 * PI - h.acos()] } else { vec![] };
    let breaks = breakpoints(0.0, 2.0 * PI, interior);
    let opts = QuadOptions::with_tol(tol).min_panels(oscillation_panels(t, r) + l.unsigned_abs() as usize);
    let f = |phi: f64| {
        let k = h - phi.cos();
        let s = r * phi.sin();
        let eps = 2.0 * k.hypot(s);
        Complex64::from_polar(1.0, lf * phi - two_theta_from_kl(k, s)) * realtime_phase(eps, t) * (-0.5 / PI)
    };
    require(integrate_split(f, &breaks, opts), "Majorana correlator quadrature", tol)
}

/// Bessel-series evaluation together with its truncation certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselSeries {
    pub value: f64,
    /// Terms with |k| ≤ k_max were summed.
    pub k_max: usize,
    /// Rigorous bound on the discarded tail.
    pub tail_bound: f64,
}

const MAX_BESSEL_ORDER: usize = 1 << 20;

/// (2/π) Σ_k J_k(2t) sin[(l+k)φ_h]/(l+k) cos(2ht − kπ/2), truncated once the
/// Bessel tail bound falls below `tol`.
pub fn xx_bessel_series(h: f64, l: i64, t: f64, tol: f64) -> Result<BesselSeries> {
    if !(tol > 0.0) {
        return Err(Error::param("tol", "must be positive"));
    }
    let ph = phi_h(h)?;
    let x = 2.0 * t.abs();
    let ta = t.abs();
    let tail = |kmax: usize| {
        // Σ_{k>kmax} over both signs, |sin(..)/(l+k)| ≤ φ_h, geometric majorant
        let first = bessel_tail_bound(kmax + 1, x);
        let ratio = ta / (kmax + 2) as f64;
        2.0 * (2.0 / PI) * ph.max(1.0) * first / (1.0 - ratio)
    };
    let mut k_max = (E * ta).ceil() as usize + 12;
    while tail(k_max) >= tol {
        k_max += 4;
        if k_max > MAX_BESSEL_ORDER {
            return Err(Error::NotConverged {
                what: "Bessel series".into(),
                est_error: tail(k_max),
                tol,
            });
        }
    }
    let jn = bessel_j_seq(k_max, x);
    let term = |k: i64| {
        let ak = k.unsigned_abs() as usize;
        let j = if k < 0 && ak % 2 == 1 { -jn[ak] } else { jn[ak] };
        let lk = (l + k) as f64;
        let sinc = if l + k == 0 { ph } else { (lk * ph).sin() / lk };
        j * sinc * (2.0 * h * ta - k as f64 * 0.5 * PI).cos()
    };
    let km = k_max as i64;
    let mut sum = term(0);
    for k in 1..=km {
        sum += term(k) + term(-k);
    }
    Ok(BesselSeries {
        value: 2.0 / PI * sum,
        k_max,
        tail_bound: tail(k_max),
    })
}

/// (1/π) ∫_{−φ_h}^{φ_h} e^{ilφ} cos[2t(h − cos φ)] dφ by quadrature.
pub fn xx_cosine_integral(h: f64, l: i64, t: f64, tol: f64) -> Result<f64> {
    let ph = phi_h(h)?;
    let opts = QuadOptions::with_tol(tol).min_panels(xx_panels(h, l, t));
    let f = |phi: f64| Complex64::new(2.0 / PI * (l as f64 * phi).cos() * (2.0 * t * (h - phi.cos())).cos(), 0.0);
    Ok(require(integrate_split(f, &[0.0, ph], opts), "XX cosine integral", tol)?.re)
}

/// Complex envelope (1/π) ∫_{−φ_h}^{φ_h} cos(lφ) e^{2it(cos φ − h)} dφ whose real part is
/// [`xx_cosine_integral`].
pub fn xx_analytic_signal(h: f64, l: i64, t: f64, tol: f64) -> Result<Complex64> {
    let ph = phi_h(h)?;
    let opts = QuadOptions::with_tol(tol).min_panels(xx_panels(h, l, t));
    let f = |phi: f64| Complex64::from_polar(2.0 / PI * (l as f64 * phi).cos(), 2.0 * t * (phi.cos() - h));
    require(integrate_split(f, &[0.0, ph], opts), "XX analytic signal", tol)
}

/// Full XX (r = 0) Majorana correlator: the Bessel series plus the
/// −i^l J_l(2|t|) e^{−2ih|t|} term coming from the sign-function form.
pub fn majorana_correlator_xx(h: f64, l: i64, t: f64, tol: f64) -> Result<Complex64> {
    let series = xx_bessel_series(h, l, t, tol)?;
    let al = l.unsigned_abs() as usize;
    let mut j = bessel_j_seq(al, 2.0 * t.abs())[al];
    if l < 0 && al % 2 == 1 {
        j = -j;
    }
    let il = Complex64::i().powi((l.rem_euclid(4)) as i32);
    Ok(series.value - il * j * Complex64::from_polar(1.0, -2.0 * h * t.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentOptions {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub n_lambda: usize,
    /// Majorana separation used for the decorrelation time.
    pub l: i64,
    pub tol: f64,
}

impl Default for ExponentOptions {
    fn default() -> Self {
        ExponentOptions {
            lambda_min: 1e-5,
            lambda_max: 1e-2,
            n_lambda: 7,
            l: 1,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentPoint {
    pub lambda: f64,
    pub phi_h: f64,
    pub t_star: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalExponents {
    pub nu: f64,
    pub z: f64,
    pub nu_fit: LinearFit,
    pub z_fit: LinearFit,
    pub points: Vec<ExponentPoint>,
}

/// φ_h for h = 1 − λ, accurate for small λ.
pub fn phi_h_from_lambda(lambda: f64) -> f64 {
    2.0 * (0.5 * lambda).sqrt().asin()
}

/// First time the envelope |E(t)| of the XX correlator drops below |E(0)|/e.
pub fn decorrelation_time(h: f64, l: i64, tol: f64) -> Result<f64> {
    let ph = phi_h(h)?;
    let scale = 1.0 / (ph * ph);
    let target = xx_analytic_signal(h, l, 0.0, tol)?.norm() / E;
    let env = |t: f64| xx_analytic_signal(h, l, t, tol).map(|v| v.norm());
    let dt = scale / 4.0;
    let mut lo = 0.0;
    let mut hi = dt;
    loop {
        if env(hi)? < target {
            break;
        }
        lo = hi;
        hi += dt;
        if hi > 200.0 * scale {
            return Err(Error::NotConverged {
                what: "decorrelation time search".into(),
                est_error: hi,
                tol: 200.0 * scale,
            });
        }
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if env(mid)? < target {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-7 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// ν from log φ_h vs log λ and z from log t* vs log ξ, ξ = 1/φ_h.
pub fn critical_exponents(opts: &ExponentOptions) -> Result<CriticalExponents> {
    use rayon::prelude::*;
    if !(opts.lambda_min > 0.0 && opts.lambda_max > opts.lambda_min && opts.lambda_max < 2.0) || opts.n_lambda < 2 {
        return Err(Error::param("lambda", "need 0 < lambda_min < lambda_max < 2 and at least two points"));
    }
    let lambdas = logspace(opts.lambda_min, opts.lambda_max, opts.n_lambda);
    let points = lambdas
        .par_iter()
        .map(|&lambda| {
            let ph = phi_h_from_lambda(lambda);
            let t_star = decorrelation_time(1.0 - lambda, opts.l, opts.tol)?;
            Ok(ExponentPoint { lambda, phi_h: ph, t_star })
        })
        .collect::<Result<Vec<_>>>()?;
    let lam: Vec<f64> = points.iter().map(|p| p.lambda).collect();
    let phis: Vec<f64> = points.iter().map(|p| p.phi_h).collect();
    let xi: Vec<f64> = phis.iter().map(|p| 1.0 / p).collect();
    let ts: Vec<f64> = points.iter().map(|p| p.t_star).collect();
    let nu_fit = log_log_fit(&lam, &phis);
    let z_fit = log_log_fit(&xi, &ts);
    Ok(CriticalExponents {
        nu: nu_fit.slope,
        z: z_fit.slope,
        nu_fit,
        z_fit,
        points,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub power: f64,
    pub fit: LinearFit,
    pub times: Vec<f64>,
    pub envelope: Vec<f64>,
}

/// Power p in |B_l(t)| ∼ t^{−p} from the analytic-signal envelope on a log grid.
pub fn decay_power_fit(h: f64, l: i64, t_min: f64, t_max: f64, n_points: usize, tol: f64) -> Result<DecayFit> {
    use rayon::prelude::*;
    if !(t_min > 0.0 && t_max > t_min) || n_points < 2 {
        return Err(Error::param("t", "need 0 < t_min < t_max and at least two points"));
    }
    let times = logspace(t_min, t_max, n_points);
    let envelope = times
        .par_iter()
        .map(|&t| xx_analytic_signal(h, l, t, tol).map(|v| v.norm()))
        .collect::<Result<Vec<_>>>()?;
    let fit = log_log_fit(&times, &envelope);
    Ok(DecayFit {
        power: -fit.slope,
        fit,
        times,
        envelope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{ed_build_and_diagonalize, ed_expectation, ed_time_correlator, Boundary, Parity, PauliString, SpinChainSpec, StateSelection};
    use crate::static_correlators::{majorana_equal_time_xx, zz_connected_static_sigma};

    #[test]
    fn static_reduction_of_zz() {
        let p = ChainParams::ising(512, 0.3).unwrap();
        for l in 1..4 {
            let a = zz_connected_time(&p, l, 0.0).unwrap();
            let b = zz_connected_static_sigma(0.3, l, Some(512)).unwrap();
            assert!((a.re - b).abs() < 1e-10 && a.im.abs() < 1e-14);
        }
    }

    #[test]
    fn zz_time_against_ed() {
        let p = ChainParams::ising(10, 0.5).unwrap();
        let spec = SpinChainSpec::xy(&p, Boundary::Periodic).unwrap();
        let data = ed_build_and_diagonalize(&spec).unwrap();
        let sel = StateSelection::SectorGround(Parity::Even);
        let mz = ed_expectation(&data, &PauliString::z(5), sel).unwrap();
        for t in [0.2, 0.5, 1.0] {
            let ed = ed_time_correlator(&data, &PauliString::z(5), &PauliString::z(4), t, Parity::Even).unwrap() - mz * mz;
            let f = zz_connected_time(&p, 1, t).unwrap();
            assert!((ed - f).norm() < 1e-10, "t={t}: {ed} vs {f}");
        }
    }

    #[test]
    fn zz_symmetric_in_l() {
        let p = ChainParams::new(64, 0.4, 0.8).unwrap();
        for l in 1..5 {
            let d = zz_connected_time(&p, l, 1.3).unwrap() - zz_connected_time(&p, -l, 1.3).unwrap();
            assert!(d.norm() < 1e-12);
        }
    }

    #[test]
    fn zz_thermodynamic_consistency() {
        let p = ChainParams::new(8192, 1.0, 1.5).unwrap();
        let f = zz_connected_time(&p, 2, 1.0).unwrap();
        let q = zz_connected_time_thermodynamic(1.5, 1.0, 2, 1.0, 1e-12).unwrap();
        assert!((f - q).norm() < 1e-4);
    }

    #[test]
    fn majorana_finite_vs_thermodynamic() {
        let p = ChainParams::new(8192, 1.0, 0.7).unwrap();
        let f = majorana_correlator(&p, 1, 2.0).unwrap();
        let q = majorana_correlator_thermodynamic(0.7, 1.0, 1, 2.0, 1e-12).unwrap();
        assert!((f - q).norm() < 1e-4);
    }

    #[test]
    fn majorana_even_in_time() {
        let p = ChainParams::new(32, 0.6, 0.4).unwrap();
        for l in -2..3 {
            let d = majorana_correlator(&p, l, 1.7).unwrap() - majorana_correlator(&p, l, -1.7).unwrap();
            assert!(d.norm() < 1e-14);
        }
    }

    #[test]
    fn xx_majorana_at_t0() {
        let b = majorana_correlator_thermodynamic(0.0, 0.0, 1, 0.0, 1e-13).unwrap();
        assert!((b - 2.0 / PI).norm() < 1e-12);
        let full = majorana_correlator_xx(0.0, 1, 0.0, 1e-14).unwrap();
        assert!((full - 2.0 / PI).norm() < 1e-12);
    }

    #[test]
    fn xx_full_form_matches_sign_integral() {
        for &(h, l, t) in &[(0.3, 0i64, 0.0), (0.3, 0, 1.5), (-0.4, 2, 2.5), (0.5, 1, 4.0)] {
            let exact = majorana_correlator_thermodynamic(h, 0.0, l, t, 1e-12).unwrap();
            let full = majorana_correlator_xx(h, l, t, 1e-13).unwrap();
            assert!((exact - full).norm() < 1e-10, "h={h} l={l} t={t}: {exact} vs {full}");
        }
    }

    #[test]
    fn bessel_series_t0_and_quadrature() {
        let s = xx_bessel_series(0.5, 3, 0.0, 1e-14).unwrap();
        assert!((s.value - majorana_equal_time_xx(0.5, 3).unwrap()).abs() < 1e-12);
        let s = xx_bessel_series(0.5, 2, 3.0, 1e-12).unwrap();
        let q = xx_cosine_integral(0.5, 2, 3.0, 1e-13).unwrap();
        assert!((s.value - q).abs() < 1e-8);
        assert!(s.tail_bound < 1e-12);
    }

    #[test]
    fn bessel_series_h0() {
        let s = xx_bessel_series(0.0, 1, 1.0, 1e-13).unwrap();
        let q = crate::numerics::integrate(
            |phi: f64| Complex64::from_polar(1.0 / PI, phi) * (2.0 * phi.cos()).cos(),
            -0.5 * PI,
            0.5 * PI,
            QuadOptions::with_tol(1e-14),
        );
        assert!((s.value - q.value.re).abs() < 1e-10 && q.value.im.abs() < 1e-14);
    }

    #[test]
    fn bessel_series_rejects_large_field() {
        assert!(matches!(xx_bessel_series(1.5, 1, 1.0, 1e-8), Err(Error::FieldOutOfRange(_))));
    }

    #[test]
    fn phi_h_small_lambda() {
        let lam: f64 = 1e-4;
        assert!((phi_h_from_lambda(lam) / (2.0 * lam).sqrt() - 1.0).abs() < 1e-2);
        assert!((phi_h_from_lambda(0.3) - (0.7f64).acos()).abs() < 1e-14);
    }

    #[test]
    fn exponents_and_decay() {
        let ce = critical_exponents(&ExponentOptions::default()).unwrap();
        assert!((ce.nu - 0.5).abs() < 0.02);
        assert!((ce.z - 2.0).abs() < 0.2);
        let d = decay_power_fit(0.5, 1, 20.0, 200.0, 60, 1e-10).unwrap();
        assert!((d.power - 0.5).abs() < 0.05);
    }

    #[test]
    fn gapped_ising_decay_envelope() {
        let b: Vec<f64> = [12.5, 50.0, 200.0]
            .iter()
            .map(|&t| majorana_correlator_thermodynamic(2.0, 1.0, 1, t, 1e-12).unwrap().norm())
            .collect();
        assert!((b[1] - 0.0747).abs() < 1e-3, "{}", b[1]);
        assert!(b[2] < b[1] && b[1] < 0.1);
        let p = ChainParams::new(8192, 1.0, 2.0).unwrap();
        let f = majorana_correlator(&p, 1, 50.0).unwrap().norm();
        assert!((f - b[1]).abs() < 1e-6);
    }
}
