//! Momentum grid, dispersion relation and Bogoliubov angles of the XY chain.
//!
//! The chain Hamiltonian is
//! `H = −Σ_j [(1+r)/2 σˣσˣ + (1−r)/2 σʸσʸ + h σᶻ]`. After Jordan-Wigner and
//! Fourier transformation in the antiperiodic sector each pair of momenta
//! `(φ_m, −φ_m)` decouples into a 2×2 block with entries
//! `k_m = h − cos φ_m` and `l_m = r sin φ_m`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    pub n_sites: usize,
    pub r: f64,
    pub h: f64,
}

impl ChainParams {
    pub fn new(n_sites: usize, r: f64, h: f64) -> Result<Self> {
        let p = ChainParams { n_sites, r, h };
        p.validate()?;
        Ok(p)
    }

    /// Ising point `r = 1`.
    pub fn ising(n_sites: usize, h: f64) -> Result<Self> {
        Self::new(n_sites, 1.0, h)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites == 0 {
            return Err(Error::param("n_sites", "must be positive"));
        }
        if self.n_sites % 2 == 1 {
            return Err(Error::SectorMismatch(self.n_sites));
        }
        if !self.r.is_finite() {
            return Err(Error::param("r", "must be finite"));
        }
        if !self.h.is_finite() {
            return Err(Error::param("h", "must be finite"));
        }
        Ok(())
    }

    pub fn with_h(self, h: f64) -> Self {
        ChainParams { h, ..self }
    }

    pub fn with_n(self, n_sites: usize) -> Self {
        ChainParams { n_sites, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub m: usize,
    pub phi: f64,
    pub k: f64,
    pub l: f64,
    pub eps: f64,
    /// Bogoliubov angle θ_m with 2θ_m in [−π/2, 3π/2).
    pub theta: f64,
}

impl Mode {
    pub fn two_theta(&self) -> f64 {
        2.0 * self.theta
    }

    pub fn cos2theta(&self) -> f64 {
        (2.0 * self.theta).cos()
    }

    pub fn sin2theta(&self) -> f64 {
        (2.0 * self.theta).sin()
    }

    /// Ground-state occupation ⟨ψ†_m ψ_m⟩ = sin²θ_m.
    pub fn occupation(&self) -> f64 {
        self.theta.sin().powi(2)
    }
}

/// φ_m = 2π(m+½)/N.
pub fn momentum(m: usize, n_sites: usize) -> f64 {
    2.0 * PI * (m as f64 + 0.5) / n_sites as f64
}

pub fn dispersion_continuum(h: f64, r: f64, phi: f64) -> f64 {
    let k = h - phi.cos();
    let l = r * phi.sin();
    2.0 * k.hypot(l)
}

fn gapless_threshold(h: f64) -> f64 {
    1e-14 * h.abs().max(1.0)
}

/// Branch-resolved 2θ from the block entries `k`, `l`, reduced to [−π/2, 3π/2).
pub fn two_theta_from_kl(k: f64, l: f64) -> f64 {
    // adding +0.0 maps a signed zero l onto +0 so k<0, l=0 lands on +π
    let a = (l + 0.0).atan2(k);
    if a < -0.5 * PI {
        a + 2.0 * PI
    } else {
        a
    }
}

/// Bogoliubov angle θ(φ); fails at gapless points.
pub fn bogoliubov_angle(h: f64, r: f64, phi: f64) -> Result<f64> {
    let k = h - phi.cos();
    let l = r * phi.sin();
    if 2.0 * k.hypot(l) < gapless_threshold(h) {
        return Err(Error::Gapless { phi });
    }
    Ok(0.5 * two_theta_from_kl(k, l))
}

pub fn mode(params: &ChainParams, m: usize) -> Result<Mode> {
    let phi = momentum(m, params.n_sites);
    let k = params.h - phi.cos();
    let l = params.r * phi.sin();
    let eps = 2.0 * k.hypot(l);
    if eps < gapless_threshold(params.h) {
        return Err(Error::Gapless { phi });
    }
    Ok(Mode {
        m,
        phi,
        k,
        l,
        eps,
        theta: 0.5 * two_theta_from_kl(k, l),
    })
}

pub fn mode_set(params: &ChainParams) -> Result<Vec<Mode>> {
    params.validate()?;
    (0..params.n_sites).map(|m| mode(params, m)).collect()
}

/// Ground-state energy of the even-parity sector, −½ Σ ε_m.
pub fn ground_energy(params: &ChainParams) -> Result<f64> {
    Ok(-0.5 * mode_set(params)?.iter().map(|m| m.eps).sum::<f64>())
}

/// cos φ_h = h; defined for |h| ≤ 1.
pub fn phi_h(h: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&h) {
        return Err(Error::FieldOutOfRange(h));
    }
    Ok(h.acos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn four_site_momenta() {
        let modes = mode_set(&ChainParams::new(4, 1.0, 0.0).unwrap()).unwrap();
        let expect = [PI / 4.0, 3.0 * PI / 4.0, 5.0 * PI / 4.0, 7.0 * PI / 4.0];
        for (m, e) in modes.iter().zip(expect) {
            assert!((m.phi - e).abs() < 1e-15);
            assert!((m.eps - 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn odd_chain_rejected() {
        assert_eq!(ChainParams::new(5, 1.0, 0.3), Err(Error::SectorMismatch(5)));
    }

    #[test]
    fn non_finite_rejected() {
        assert!(ChainParams::new(4, f64::NAN, 0.3).is_err());
        assert!(ChainParams::new(4, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn continuum_examples() {
        assert_eq!(dispersion_continuum(1.0, 0.3, 0.0), 0.0);
        assert!((dispersion_continuum(0.0, 1.0, PI / 2.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn continuum_matches_dense_grid() {
        let (h, r, phi) = (0.9, 0.4, 1.1);
        let n = 10_000;
        let m = ((phi * n as f64 / (2.0 * PI)) - 0.5).round() as usize;
        let md = mode(&ChainParams::new(n, r, h).unwrap(), m).unwrap();
        let slope = 8.0; // bound on |dε/dφ| for these parameters
        assert!((md.eps - dispersion_continuum(h, r, md.phi)).abs() < 1e-14);
        assert!((md.eps - dispersion_continuum(h, r, phi)).abs() < slope * PI / n as f64);
    }

    #[test]
    fn branch_examples() {
        assert_eq!(bogoliubov_angle(2.0, 1.0, 0.0).unwrap(), 0.0);
        assert!((2.0 * bogoliubov_angle(0.0, 1.0, 0.0).unwrap() - PI).abs() < 1e-15);
        assert!((2.0 * bogoliubov_angle(0.5, 0.0, 0.5).unwrap() - PI).abs() < 1e-15);
        assert!((2.0 * bogoliubov_angle(0.5, 1.0, -0.0).unwrap() - PI).abs() < 1e-15);
    }

    #[test]
    fn gapless_rejected() {
        assert!(matches!(bogoliubov_angle(1.0, 0.7, 0.0), Err(Error::Gapless { .. })));
        // r = 0 with h = cos φ_m exactly: N = 4 has φ_0 = π/4
        let h = (PI / 4.0).cos();
        assert!(matches!(mode_set(&ChainParams::new(4, 0.0, h).unwrap()), Err(Error::Gapless { .. })));
    }

    #[test]
    fn nearest_mode_error_is_first_order() {
        let (h, r, phi) = (0.4, 0.8, 1.0);
        let err = |n: usize| {
            let modes = mode_set(&ChainParams::new(n, r, h).unwrap()).unwrap();
            let md = modes.iter().min_by(|a, b| (a.phi - phi).abs().partial_cmp(&(b.phi - phi).abs()).unwrap()).unwrap();
            (md.eps - dispersion_continuum(h, r, phi)).abs() * n as f64
        };
        // N·error stays bounded while N grows geometrically
        let scaled: Vec<f64> = [64, 128, 256, 512, 1024].iter().map(|&n| err(n)).collect();
        assert!(scaled.iter().all(|s| *s < 2.0 * PI * 4.0));
    }

    proptest! {
        #[test]
        fn branch_consistency(n in 1usize..40, r in -2.0f64..2.0, h in -3.0f64..3.0) {
            let p = ChainParams::new(2 * n, r, h).unwrap();
            if let Ok(modes) = mode_set(&p) {
                for md in &modes {
                    prop_assert!((md.cos2theta() - 2.0 * md.k / md.eps).abs() <= 1e-12);
                    prop_assert!((md.sin2theta() - 2.0 * md.l / md.eps).abs() <= 1e-12);
                    let tt = md.two_theta();
                    prop_assert!((-0.5 * PI..1.5 * PI).contains(&tt));
                    if md.k > 0.0 { prop_assert!(tt > -0.5 * PI && tt < 0.5 * PI); }
                    if md.k < 0.0 { prop_assert!(tt > 0.5 * PI && tt < 1.5 * PI || md.l == 0.0 && (tt - PI).abs() < 1e-15); }
                }
                for m in 0..p.n_sites {
                    let a = modes[m];
                    let b = modes[p.n_sites - 1 - m];
                    prop_assert!((a.eps - b.eps).abs() <= 1e-12 * a.eps.max(1.0));
                    prop_assert!((a.l + b.l).abs() <= 1e-12);
                    prop_assert!((a.cos2theta() - b.cos2theta()).abs() <= 1e-12);
                    prop_assert!((a.sin2theta() + b.sin2theta()).abs() <= 1e-12);
                }
            }
        }

        #[test]
        fn continuity_across_branch_switch(h in 0.05f64..0.95, r in 0.2f64..1.5) {
            // cos φ = h is the branch switch; both trig functions of 2θ are continuous there
            let phi0 = h.acos();
            let d = 1e-7;
            let a = 2.0 * bogoliubov_angle(h, r, phi0 - d).unwrap();
            let b = 2.0 * bogoliubov_angle(h, r, phi0 + d).unwrap();
            prop_assert!((a.cos() - b.cos()).abs() < 1e-5);
            prop_assert!((a.sin() - b.sin()).abs() < 1e-5);
        }
    }
}
