use std::f64::consts::PI;

use nalgebra::DMatrix;
use proptest::prelude::*;

use xychain::driven::{plemelj_coefficients, plemelj_literal};
use xychain::entanglement::{covariance_from_correlators, entropy, CovarianceMatrix, FiniteChain};
use xychain::propagators::{fermi, oscillator_partition, Prescription};
use xychain::spectrum::{ground_energy, mode_set};
use xychain::static_correlators::transverse_magnetization;
use xychain::ChainParams;

fn chain() -> impl Strategy<Value = ChainParams> {
    (2usize..12, -1.5f64..1.5, -2.5f64..2.5).prop_map(|(half, r, h)| ChainParams::new(2 * half, r, h).unwrap())
}

/// Γ of a product of paired Majoranas with occupations `nu`, rotated by a
/// random orthogonal matrix built from `seed`.
fn rotated_gamma(nu: &[f64], seed: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = 2 * nu.len();
    let mut g = DMatrix::zeros(n, n);
    for (k, v) in nu.iter().enumerate() {
        g[(2 * k, 2 * k + 1)] = *v;
        g[(2 * k + 1, 2 * k)] = -*v;
    }
    let a = DMatrix::from_fn(n, n, |i, j| seed[(i * n + j) % seed.len()] + if i == j { 3.0 } else { 0.0 });
    let q = a.qr().q();
    let rotated = &q * &g * q.transpose();
    (g, rotated)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn entropy_is_orthogonally_invariant(
        nu in prop::collection::vec(0.0f64..1.0, 1..8),
        seed in prop::collection::vec(-1.0f64..1.0, 7..40),
    ) {
        let (g, rotated) = rotated_gamma(&nu, &seed);
        let s0 = entropy(&CovarianceMatrix::new(g).unwrap()).unwrap();
        let s1 = entropy(&CovarianceMatrix::new(rotated).unwrap()).unwrap();
        prop_assert!((s0 - s1).abs() < 1e-10, "{} vs {}", s0, s1);
        prop_assert!(s0 >= -1e-14 && s0 <= nu.len() as f64 * std::f64::consts::LN_2 + 1e-12);
    }

    #[test]
    fn block_entropy_is_symmetric_in_complement(p in chain(), frac in 0.1f64..0.9) {
        let n = p.n_sites;
        let l = ((frac * n as f64) as usize).clamp(1, n - 1);
        let s = entropy(&covariance_from_correlators(&FiniteChain(p), l).unwrap()).unwrap();
        let sc = entropy(&covariance_from_correlators(&FiniteChain(p), n - l).unwrap()).unwrap();
        prop_assert!((s - sc).abs() < 1e-8, "S({}) = {} vs S({}) = {}", l, s, n - l, sc);
    }

    #[test]
    fn covariance_spectrum_is_physical(p in chain(), l in 1usize..6) {
        let l = l.min(p.n_sites - 1);
        let nu = covariance_from_correlators(&FiniteChain(p), l).unwrap().spectrum().unwrap();
        prop_assert!(nu.iter().all(|v| *v >= -1e-12 && *v <= 1.0 + 1e-9));
    }

    #[test]
    fn magnetization_and_energy_bounds(p in chain()) {
        let m = transverse_magnetization(&p).unwrap();
        prop_assert!(m.abs() <= 1.0 + 1e-12);
        let modes = mode_set(&p).unwrap();
        prop_assert!(modes.iter().all(|md| md.eps >= 0.0));
        let e0 = ground_energy(&p).unwrap();
        let bound: f64 = modes.iter().map(|md| 0.5 * md.eps).sum();
        prop_assert!((e0 + bound).abs() < 1e-9 * bound.max(1.0), "{} vs {}", e0, -bound);
    }

    #[test]
    fn spectrum_is_reflection_symmetric(p in chain()) {
        let modes = mode_set(&p).unwrap();
        let n = modes.len();
        for m in 0..n {
            prop_assert!((modes[m].eps - modes[n - 1 - m].eps).abs() < 1e-12);
            prop_assert!((modes[m].phi + modes[n - 1 - m].phi - 2.0 * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn fermi_reflection(x in -700.0f64..700.0) {
        prop_assert!((fermi(x) + fermi(-x) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn prescriptions_differ_by_half_frequency(w in 0.05f64..4.0, b in 0.05f64..8.0) {
        let s = oscillator_partition(w, b, Prescription::Symmetric);
        let a = oscillator_partition(w, b, Prescription::Asymmetric);
        let ratio = s.z / a.functional_det;
        prop_assert!((ratio / (0.5 * w * b).exp() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plemelj_recursion_matches_determinants(traces in prop::collection::vec(-2.0f64..2.0, 6)) {
        let d = plemelj_coefficients(&traces, 6);
        for (n, dn) in d.iter().enumerate() {
            let lit = plemelj_literal(&traces, n);
            prop_assert!((dn - lit).abs() <= 1e-10 * lit.abs().max(1.0), "n = {}: {} vs {}", n, dn, lit);
        }
    }
}
