//! Numeric Bogoliubov-de Gennes oracles.
//!
//! Two independent routes, neither of which uses the closed-form angle:
//! the per-momentum 2×2 block diagonalized numerically, and the full
//! real-space quadratic Hamiltonian on `2N` Nambu components.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectrum::{momentum, ChainParams};

type C = Complex64;

const ZERO: C = C { re: 0.0, im: 0.0 };
const ONE: C = C { re: 1.0, im: 0.0 };
const I: C = C { re: 0.0, im: 1.0 };

/// Numerically diagonalized block `2·[[k, −il], [il, −k]]` acting on
/// `(c_m, c†_{N−1−m})`.
#[derive(Debug, Clone, PartialEq)]
pub struct BdgMode {
    pub m: usize,
    pub phi: f64,
    pub block: Matrix2<C>,
    /// Eigenvalues ordered (+ε, −ε).
    pub eigenvalues: [f64; 2],
    /// Columns are the eigenvectors for `eigenvalues`.
    pub u: Matrix2<C>,
    pub proj_plus: Matrix2<C>,
    pub proj_minus: Matrix2<C>,
}

impl BdgMode {
    pub fn eps_num(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn unitarity_residual(&self) -> f64 {
        (self.u.adjoint() * self.u - Matrix2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Angle reconstructed from the numeric projector: P₊ = [[cos²θ, −i sinθcosθ], [i sinθcosθ, sin²θ]].
    pub fn theta_num(&self) -> f64 {
        let c2 = (self.proj_plus[(0, 0)] - self.proj_plus[(1, 1)]).re;
        let s2 = (2.0 * self.proj_plus[(1, 0)] * (-I)).re;
        let a = s2.atan2(c2);
        0.5 * if a < -0.5 * std::f64::consts::PI { a + 2.0 * std::f64::consts::PI } else { a }
    }

    /// Imaginary-time ordered ⟨T Ψ_a(τ) Ψ†_b(0)⟩ with Θ(0) = ½.
    pub fn kernel(&self, tau: f64) -> Matrix2<C> {
        let e = self.eigenvalues[0];
        if tau > 0.0 {
            self.proj_plus * C::new((-e * tau).exp(), 0.0)
        } else if tau < 0.0 {
            -self.proj_minus * C::new((e * tau).exp(), 0.0)
        } else {
            (self.proj_plus - self.proj_minus) * C::new(0.5, 0.0)
        }
    }

    /// Real-time ordered ⟨T Ψ_a(t) Ψ†_b(0)⟩ for t ≠ 0.
    pub fn kernel_real_time(&self, t: f64) -> Matrix2<C> {
        let e = self.eigenvalues[0];
        if t >= 0.0 {
            self.proj_plus * C::from_polar(1.0, -e * t)
        } else {
            -self.proj_minus * C::from_polar(1.0, -e * t.abs())
        }
    }
}

fn hermitian_eig2(m: &Matrix2<C>) -> ([f64; 2], Matrix2<C>) {
    let dm = DMatrix::from_fn(2, 2, |i, j| m[(i, j)]);
    let eig = dm.symmetric_eigen();
    let (hi, lo) = if eig.eigenvalues[0] >= eig.eigenvalues[1] { (0, 1) } else { (1, 0) };
    let u = Matrix2::from_fn(|i, j| eig.eigenvectors[(i, if j == 0 { hi } else { lo })]);
    ([eig.eigenvalues[hi], eig.eigenvalues[lo]], u)
}

pub fn bdg_mode_solve(params: &ChainParams, m: usize) -> Result<BdgMode> {
    params.validate()?;
    if m >= params.n_sites {
        return Err(Error::IndexOutOfRange { index: m, n_sites: params.n_sites });
    }
    let phi = momentum(m, params.n_sites);
    let k = params.h - phi.cos();
    let l = params.r * phi.sin();
    let block = Matrix2::new(C::new(2.0 * k, 0.0), C::new(0.0, -2.0 * l), C::new(0.0, 2.0 * l), C::new(-2.0 * k, 0.0));
    let (eigenvalues, u) = hermitian_eig2(&block);
    let vp = u.column(0);
    let vm = u.column(1);
    let proj_plus = vp * vp.adjoint();
    let proj_minus = vm * vm.adjoint();
    Ok(BdgMode {
        m,
        phi,
        block,
        eigenvalues,
        u,
        proj_plus,
        proj_minus,
    })
}

/// A fermion operator on one site: annihilator or creator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FermionOp {
    Annihilate(usize),
    Create(usize),
}

/// Real-space Nambu Hamiltonian `H = ½ Φ† 𝓗 Φ + E_c` with
/// `Φ = (c_0 … c_{N−1}, c†_0 … c†_{N−1})`.
#[derive(Debug, Clone)]
pub struct RealSpaceBdg {
    pub n: usize,
    pub hmat: DMatrix<C>,
    pub constant: f64,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<C>,
    /// Projector onto the positive-energy subspace: ⟨Φ_p Φ†_q⟩ in the ground state.
    pub proj_plus: DMatrix<C>,
}

struct QuadraticForm {
    n: usize,
    h: DMatrix<C>,
    constant: f64,
}

impl QuadraticForm {
    fn new(n: usize) -> Self {
        QuadraticForm {
            n,
            h: DMatrix::from_element(2 * n, 2 * n, ZERO),
            constant: 0.0,
        }
    }

    // index of X inside Φ† and of Y inside Φ
    fn dag_index(&self, op: FermionOp) -> usize {
        match op {
            FermionOp::Create(i) => i,
            FermionOp::Annihilate(i) => self.n + i,
        }
    }

    fn idx(&self, op: FermionOp) -> usize {
        match op {
            FermionOp::Annihilate(i) => i,
            FermionOp::Create(i) => self.n + i,
        }
    }

    fn tilde(&self, p: usize) -> usize {
        if p < self.n {
            p + self.n
        } else {
            p - self.n
        }
    }

    /// Adds `alpha · X Y`.
    fn add(&mut self, alpha: f64, x: FermionOp, y: FermionOp) {
        let p = self.dag_index(x);
        let q = self.idx(y);
        // X Y = Φ†_p Φ_q = ½ Φ†_p Φ_q − ½ Φ†_q̃ Φ_p̃ + ½ δ_pq
        self.h[(p, q)] += C::new(alpha, 0.0);
        let (qt, pt) = (self.tilde(q), self.tilde(p));
        self.h[(qt, pt)] -= C::new(alpha, 0.0);
        if p == q {
            self.constant += 0.5 * alpha;
        }
    }
}

impl RealSpaceBdg {
    /// XY chain with the fermion boundary sign of the even-parity sector
    /// (antiperiodic).
    pub fn xy_chain(params: &ChainParams) -> Result<Self> {
        params.validate()?;
        let n = params.n_sites;
        let a = (1.0 + params.r) / 2.0;
        let b = (1.0 - params.r) / 2.0;
        use FermionOp::{Annihilate as An, Create as Cr};
        let mut q = QuadraticForm::new(n);
        for j in 0..n {
            let k = (j + 1) % n;
            // the wrapping bond picks up −Πσᶻ = −1 in the even sector
            let s = if k == 0 { -1.0 } else { 1.0 };
            // σˣ_j σˣ_k = (c†_j − c_j)(c†_k + c_k)
            for (x, sx) in [(Cr(j), 1.0), (An(j), -1.0)] {
                for y in [Cr(k), An(k)] {
                    q.add(-a * s * sx, x, y);
                }
            }
            // σʸ_j σʸ_k = −(c†_j + c_j)(c†_k − c_k)
            for x in [Cr(j), An(j)] {
                for (y, sy) in [(Cr(k), 1.0), (An(k), -1.0)] {
                    q.add(b * s * sy, x, y);
                }
            }
            // −h σᶻ_j = −h (1 − 2 c†_j c_j)
            q.constant -= params.h;
            q.add(2.0 * params.h, Cr(j), An(j));
        }
        let herm = (&q.h - q.h.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > 1e-12 {
            return Err(Error::param("hamiltonian", format!("Nambu matrix not Hermitian ({herm:e})")));
        }
        let eig = q.h.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..2 * n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let eigenvectors = DMatrix::from_fn(2 * n, 2 * n, |r, c| eig.eigenvectors[(r, order[c])]);
        let mut proj_plus = DMatrix::from_element(2 * n, 2 * n, ZERO);
        for c in n..2 * n {
            let v = eigenvectors.column(c);
            proj_plus += &v * v.adjoint();
        }
        Ok(RealSpaceBdg {
            n,
            hmat: q.h,
            constant: q.constant,
            eigenvalues,
            eigenvectors,
            proj_plus,
        })
    }

    pub fn ground_energy(&self) -> f64 {
        self.constant - 0.5 * self.eigenvalues[self.n..].iter().sum::<f64>()
    }

    fn evolve(&self, z: C, proj_positive: bool) -> DMatrix<C> {
        // e^{−z𝓗} restricted to one half of the spectrum
        let range = if proj_positive { self.n..2 * self.n } else { 0..self.n };
        let mut out = DMatrix::from_element(2 * self.n, 2 * self.n, ZERO);
        for c in range {
            let v = self.eigenvectors.column(c);
            out += (&v * v.adjoint()) * (-z * self.eigenvalues[c]).exp();
        }
        out
    }

    fn phi_index(&self, op: FermionOp) -> usize {
        match op {
            FermionOp::Annihilate(i) => i,
            FermionOp::Create(i) => self.n + i,
        }
    }

    fn dagger_index(&self, op: FermionOp) -> usize {
        // op = Φ†_{p}
        match op {
            FermionOp::Create(i) => i,
            FermionOp::Annihilate(i) => self.n + i,
        }
    }

    /// ⟨X(z) Y(0)⟩ with X(z) = e^{zH} X e^{−zH}; `z = τ` for imaginary and
    /// `z = it` for real time.
    fn product(&self, x: FermionOp, y: FermionOp, z: C) -> C {
        let p = self.phi_index(x);
        let q = self.dagger_index(y);
        // Φ(z) = e^{−z𝓗} Φ and ⟨Φ_p Φ†_q⟩ = P₊
        self.evolve(z, true)[(p, q)]
    }

    /// ⟨Y(0) X(z)⟩.
    fn reversed_product(&self, x: FermionOp, y: FermionOp, z: C) -> C {
        let p = self.phi_index(x);
        let q = self.dagger_index(y);
        self.evolve(z, false)[(p, q)]
    }

    /// Imaginary-time ordered ⟨T X(τ₂) Y(τ₁)⟩; at τ₂ = τ₁ the operator product as written.
    pub fn time_ordered(&self, x: FermionOp, y: FermionOp, tau2: f64, tau1: f64) -> C {
        let d = tau2 - tau1;
        if d >= 0.0 {
            self.product(x, y, C::new(d, 0.0))
        } else {
            -self.reversed_product(x, y, C::new(d, 0.0))
        }
    }

    /// Real-time ordered ⟨T X(t₂) Y(t₁)⟩ with X(t) = e^{iHt} X e^{−iHt}.
    pub fn time_ordered_real(&self, x: FermionOp, y: FermionOp, t2: f64, t1: f64) -> C {
        let d = t2 - t1;
        if d >= 0.0 {
            self.product(x, y, C::new(0.0, d))
        } else {
            -self.reversed_product(x, y, C::new(0.0, d))
        }
    }

    /// Equal-time ⟨γ_p γ_q⟩ with γ_{2j−1} = c†_j + c_j, γ_{2j} = i(c†_j − c_j), 1-based `p`, `q`.
    pub fn majorana_pair(&self, p: usize, q: usize) -> C {
        self.majorana_pair_time(p, q, 0.0)
    }

    /// Real-time ordered ⟨T γ_p(t) γ_q(0)⟩.
    pub fn majorana_pair_time(&self, p: usize, q: usize, t: f64) -> C {
        let expand = |k: usize| -> [(C, FermionOp); 2] {
            let j = (k - 1) / 2;
            if k % 2 == 1 {
                [(ONE, FermionOp::Create(j)), (ONE, FermionOp::Annihilate(j))]
            } else {
                [(I, FermionOp::Create(j)), (-I, FermionOp::Annihilate(j))]
            }
        };
        let mut acc = ZERO;
        for (ca, x) in expand(p) {
            for (cb, y) in expand(q) {
                acc += ca * cb * self.time_ordered_real(x, y, t, 0.0);
            }
        }
        acc
    }

    /// Majorana covariance Γ_pq = i⟨γ_p γ_q⟩ (p ≠ q) on the first `l` sites.
    pub fn covariance(&self, l: usize) -> DMatrix<f64> {
        DMatrix::from_fn(2 * l, 2 * l, |p, q| if p == q { 0.0 } else { (I * self.majorana_pair(p + 1, q + 1)).re })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::mode_set;

    #[test]
    fn eigenvalues_match_dispersion() {
        for &(n, r, h) in &[(8, 0.7, 0.5), (6, 1.0, 1.5), (10, 0.3, -0.4)] {
            let p = ChainParams::new(n, r, h).unwrap();
            for md in mode_set(&p).unwrap() {
                let b = bdg_mode_solve(&p, md.m).unwrap();
                assert!((b.eigenvalues[0] - md.eps).abs() < 1e-12);
                assert!((b.eigenvalues[1] + md.eps).abs() < 1e-12);
                assert!(b.unitarity_residual() < 1e-14);
                let tt = 2.0 * b.theta_num();
                assert!((tt.cos() - md.cos2theta()).abs() < 1e-12 && (tt.sin() - md.sin2theta()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn projectors_complete() {
        let b = bdg_mode_solve(&ChainParams::new(8, 0.7, 0.5).unwrap(), 3).unwrap();
        let s = b.proj_plus + b.proj_minus - Matrix2::identity();
        assert!(s.iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn real_space_energy_matches_mode_sum() {
        for &(n, r, h) in &[(8, 0.7, 0.5), (6, 1.0, 1.5), (10, 0.3, -0.4), (12, 1.0, 0.2)] {
            let p = ChainParams::new(n, r, h).unwrap();
            let rs = RealSpaceBdg::xy_chain(&p).unwrap();
            let e: f64 = -0.5 * mode_set(&p).unwrap().iter().map(|m| m.eps).sum::<f64>();
            assert!((rs.ground_energy() - e).abs() < 1e-10, "{} vs {}", rs.ground_energy(), e);
        }
    }

    #[test]
    fn anticommutator_from_correlators() {
        let rs = RealSpaceBdg::xy_chain(&ChainParams::new(6, 0.4, 0.8).unwrap()).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let a = rs.time_ordered(FermionOp::Annihilate(i), FermionOp::Create(j), 0.0, 0.0);
                let b = rs.time_ordered(FermionOp::Create(j), FermionOp::Annihilate(i), 0.0, 0.0);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((a + b - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn majorana_square_is_one() {
        let rs = RealSpaceBdg::xy_chain(&ChainParams::new(6, 0.4, 0.8).unwrap()).unwrap();
        for p in 1..=12 {
            assert!((rs.majorana_pair(p, p) - 1.0).norm() < 1e-12);
        }
    }
}
