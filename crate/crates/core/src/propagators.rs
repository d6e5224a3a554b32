//! Imaginary-time Green's functions of a single fermionic mode and their
//! real-time continuation.
//!
//! The retarded function solves `(∂_τ + ε) G(τ, τ′) = δ(τ − τ′)` with
//! antiperiodic boundary conditions on `[−β/2, β/2]`:
//! `G(τ, τ′) = [Θ(τ − τ′) − (1 + e^{βε})^{-1}] e^{−ε(τ − τ′)}`.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Prescription {
    /// Θ(0) = ½.
    Symmetric,
    /// Equal-time value taken as the limit G(τ, τ + 0), i.e. Θ(0) = 0.
    Asymmetric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorSpec {
    pub eps: f64,
    /// Inverse temperature; `f64::INFINITY` selects the ground state.
    pub beta: f64,
    pub prescription: Prescription,
}

impl PropagatorSpec {
    pub fn ground(eps: f64) -> Self {
        PropagatorSpec {
            eps,
            beta: f64::INFINITY,
            prescription: Prescription::Symmetric,
        }
    }

    pub fn thermal(eps: f64, beta: f64) -> Self {
        PropagatorSpec {
            eps,
            beta,
            prescription: Prescription::Symmetric,
        }
    }
}

pub fn heaviside(x: f64, prescription: Prescription) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        match prescription {
            Prescription::Symmetric => 0.5,
            Prescription::Asymmetric => 0.0,
        }
    }
}

/// Fermi factor (1 + e^{x})^{-1} without overflow.
pub fn fermi(x: f64) -> f64 {
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// ln(1 + e^{x}) without overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

pub fn greens_retarded(spec: PropagatorSpec, tau: f64, tau_prime: f64) -> f64 {
    let d = tau - tau_prime;
    let eps = spec.eps;
    let theta = heaviside(d, spec.prescription);
    if spec.beta.is_infinite() {
        return if theta == 0.0 { 0.0 } else { theta * (-eps * d).exp() };
    }
    let be = spec.beta * eps;
    if d > 0.0 {
        // (1 − n) e^{−εd}
        fermi(-be) * (-eps * d).exp()
    } else if d < 0.0 {
        // −n e^{ε|d|} = −e^{ε|d| − βε} / (1 + e^{−βε})
        -(-eps * d - be).exp() * fermi(-be)
    } else {
        theta - fermi(be)
    }
}

/// G^(−)(τ, τ′) = −G^(+)(τ′, τ).
pub fn greens_advanced(spec: PropagatorSpec, tau: f64, tau_prime: f64) -> f64 {
    -greens_retarded(spec, tau_prime, tau)
}

/// e^{−i|t|ε}.
pub fn realtime_phase(eps: f64, t: f64) -> Complex64 {
    Complex64::from_polar(1.0, -t.abs() * eps)
}

/// Outcome of the single-oscillator partition-function computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorPartition {
    /// Bare path integral Det(∂_τ + ω) = 2·exp(β ∫₀^ω G_{ω′}(τ,τ) dω′).
    pub functional_det: f64,
    /// e^{βω/2}·Det, the standard coherent-state symbol result.
    pub z_standard_symbol: f64,
    /// Partition function implied by the prescription: the symmetric weight
    /// carries no extra shift, the asymmetric one is paired with the standard
    /// symbol.
    pub z: f64,
    /// Exact two-level trace 2cosh(βω/2).
    pub z_exact: f64,
}

/// β ∫₀^ω G_{ω′}(τ, τ) dω′ in closed form.
pub fn trace_log(omega: f64, beta: f64, prescription: Prescription) -> f64 {
    // β ∫₀^ω (1 + e^{βx})^{-1} dx = βω − softplus(βω) + ln 2
    let bw = beta * omega;
    let fermi_integral = bw - softplus(bw) + std::f64::consts::LN_2;
    let theta0 = heaviside(0.0, prescription);
    theta0 * bw - fermi_integral
}

pub fn oscillator_partition(omega: f64, beta: f64, prescription: Prescription) -> OscillatorPartition {
    let det = 2.0 * trace_log(omega, beta, prescription).exp();
    let standard = (0.5 * beta * omega).exp() * det;
    let z = match prescription {
        Prescription::Symmetric => det,
        Prescription::Asymmetric => standard,
    };
    OscillatorPartition {
        functional_det: det,
        z_standard_symbol: standard,
        z,
        z_exact: 2.0 * (0.5 * beta * omega).cosh(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn coincidence_values() {
        assert_eq!(greens_retarded(PropagatorSpec::ground(1.3), 0.4, 0.4), 0.5);
        assert_eq!(greens_advanced(PropagatorSpec::ground(1.3), 0.4, 0.4), -0.5);
    }

    #[test]
    fn pure_decay() {
        assert!((greens_retarded(PropagatorSpec::ground(2.0), 1.5, 0.5) - (-2.0f64).exp()).abs() < 1e-16);
        assert_eq!(greens_retarded(PropagatorSpec::ground(2.0), 0.5, 1.5), 0.0);
    }

    #[test]
    fn advanced_is_reflected_retarded() {
        let s = PropagatorSpec::thermal(0.7, 2.0);
        for &(a, b) in &[(0.1, -0.3), (-0.9, 0.2), (0.4, 0.4)] {
            assert_eq!(greens_advanced(s, a, b) + greens_retarded(s, b, a), 0.0);
        }
    }

    #[test]
    fn antiperiodic_boundary() {
        for &(eps, beta) in &[(1.0, 1.0), (0.3, 7.0), (2.5, 40.0)] {
            let s = PropagatorSpec::thermal(eps, beta);
            for &tp in &[-0.2 * beta, 0.0, 0.31 * beta] {
                let a = greens_retarded(s, -beta / 2.0, tp);
                let b = greens_retarded(s, beta / 2.0, tp);
                assert!((a + b).abs() < 1e-12, "{a} {b}");
            }
        }
    }

    #[test]
    fn unit_jump() {
        let s = PropagatorSpec::thermal(1.2, 3.0);
        for &d in &[1e-3, 1e-5, 1e-8] {
            let jump = greens_retarded(s, 0.2 + d, 0.2) - greens_retarded(s, 0.2 - d, 0.2);
            assert!((jump - 1.0).abs() < 4.0 * d);
        }
    }

    #[test]
    fn equation_of_motion_off_coincidence() {
        let s = PropagatorSpec::thermal(0.8, 5.0);
        let d = 1e-5;
        for &t in &[-1.7, -0.4, 0.6, 2.0] {
            let g = |x: f64| greens_retarded(s, x, 0.1);
            let deriv = (g(t + d) - g(t - d)) / (2.0 * d);
            assert!((deriv + s.eps * g(t)).abs() < 1e-8);
        }
    }

    #[test]
    fn large_beta_stable() {
        let s = PropagatorSpec::thermal(3.0, 1e4);
        let v = greens_retarded(s, -100.0, 100.0);
        assert!(v.is_finite() && v.abs() < 1e-300);
        assert!((greens_retarded(s, 0.0, 0.0) - 0.5).abs() < 1e-15);
        assert!((greens_retarded(PropagatorSpec::ground(1.0), 1.0, 0.0) - greens_retarded(PropagatorSpec::thermal(1.0, 500.0), 1.0, 0.0)).abs() < 1e-15);
    }

    #[test]
    fn phase_examples() {
        assert_eq!(realtime_phase(3.0, 0.0), Complex64::new(1.0, 0.0));
        assert!((realtime_phase(2.0, std::f64::consts::FRAC_PI_2) + 1.0).norm() < 1e-15);
        assert_eq!(realtime_phase(1.3, 0.7).conj(), Complex64::from_polar(1.0, 1.3 * 0.7));
        assert_eq!(realtime_phase(1.3, 0.7), realtime_phase(1.3, -0.7));
    }

    #[test]
    fn partition_examples() {
        let s = oscillator_partition(1.0, 1.0, Prescription::Symmetric);
        assert!((s.z - 2.255_251_930_412_761).abs() < 1e-12);
        assert!((s.z_standard_symbol - 2.0 * 0.5f64.exp() * 0.5f64.cosh()).abs() < 1e-12);
        let a = oscillator_partition(1.0, 1.0, Prescription::Asymmetric);
        assert!((a.functional_det - (1.0 + (-1.0f64).exp())).abs() < 1e-12);
        assert!((a.z - a.z_exact).abs() < 1e-12);
        for p in [Prescription::Symmetric, Prescription::Asymmetric] {
            assert!((oscillator_partition(0.0, 3.0, p).z - 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn symmetric_partition_many_points() {
        for i in 0..20 {
            let omega = -2.0 + 0.23 * i as f64;
            let beta = 0.1 + 0.37 * i as f64;
            let z = oscillator_partition(omega, beta, Prescription::Symmetric);
            let two_level = (beta * omega / 2.0).exp() + (-beta * omega / 2.0).exp();
            assert!((z.z - two_level).abs() < 1e-12 * two_level.max(1.0));
        }
    }

    #[test]
    fn fermi_helpers() {
        assert_eq!(fermi(1e4), 0.0);
        assert_eq!(fermi(-1e4), 1.0);
        assert!((softplus(800.0) - 800.0).abs() < 1e-12);
        assert!((fermi(0.0) - 0.5).abs() < 1e-16);
        let _ = INF;
    }
}
