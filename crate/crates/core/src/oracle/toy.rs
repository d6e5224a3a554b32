//! Two-spin Heisenberg toy model `H = −ω S⃗₁·S⃗₂` traced in three bases.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ed::{ed_build_and_diagonalize, SpinChainSpec};

/// Annihilation operator `c_j` on `n` Jordan-Wigner modes (bit `j` set = occupied).
pub fn fock_annihilation(n: usize, j: usize) -> DMatrix<f64> {
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        if s >> j & 1 == 1 {
            let string = (s & ((1 << j) - 1)).count_ones();
            let sign = if string % 2 == 0 { 1.0 } else { -1.0 };
            m[(s ^ (1 << j), s)] = sign;
        }
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyModelCheck {
    pub z_spin: f64,
    pub z_fock: f64,
    pub z_majorana: f64,
    pub z_closed_form: f64,
    /// Largest deviation of the three traces from the closed form.
    pub diff: f64,
}

fn trace_exp(h: &DMatrix<f64>, beta: f64) -> f64 {
    h.clone().symmetric_eigenvalues().iter().map(|e| (-beta * e).exp()).sum()
}

fn trace_exp_complex(h: &DMatrix<Complex64>, beta: f64) -> f64 {
    h.clone().symmetric_eigenvalues().iter().map(|e| (-beta * e).exp()).sum()
}

/// Fermionic form −(ω/4)[(c†₁−c₁)(c†₂+c₂) + (c†₂−c₂)(c†₁+c₁) + (1−2n₁)(1−2n₂)].
pub fn toy_fock_hamiltonian(omega: f64) -> DMatrix<f64> {
    let c1 = fock_annihilation(2, 0);
    let c2 = fock_annihilation(2, 1);
    let id = DMatrix::<f64>::identity(4, 4);
    let n1 = c1.transpose() * &c1;
    let n2 = c2.transpose() * &c2;
    let t1 = (c1.transpose() - &c1) * (c2.transpose() + &c2);
    let t2 = (c2.transpose() - &c2) * (c1.transpose() + &c1);
    let t3 = (&id - n1 * 2.0) * (&id - n2 * 2.0);
    (t1 + t2 + t3) * (-omega / 4.0)
}

/// Majorana form i(ω/4)(γ₂γ₃ + γ₄γ₁ − iγ₁γ₂γ₃γ₄).
pub fn toy_majorana_hamiltonian(omega: f64) -> DMatrix<Complex64> {
    let to_c = |m: DMatrix<f64>| m.map(|x| Complex64::new(x, 0.0));
    let c1 = to_c(fock_annihilation(2, 0));
    let c2 = to_c(fock_annihilation(2, 1));
    let i = Complex64::i();
    let g1 = c1.adjoint() + &c1;
    let g2 = (c1.adjoint() - &c1) * i;
    let g3 = c2.adjoint() + &c2;
    let g4 = (c2.adjoint() - &c2) * i;
    let quartic = &g1 * &g2 * &g3 * &g4;
    (&g2 * &g3 + &g4 * &g1 - quartic * i) * (i * omega / 4.0)
}

pub fn toy_closed_form(omega: f64, beta: f64) -> f64 {
    (-0.75 * beta * omega).exp() + 3.0 * (0.25 * beta * omega).exp()
}

pub fn toy_model_check(omega: f64, beta: f64) -> ToyModelCheck {
    let spec = SpinChainSpec::heisenberg_pair(omega);
    let data = ed_build_and_diagonalize(&spec).expect("two-site spec is valid");
    let z_spin: f64 = data.levels().iter().map(|(e, _)| (-beta * e).exp()).sum();
    let z_fock = trace_exp(&toy_fock_hamiltonian(omega), beta);
    let z_majorana = trace_exp_complex(&toy_majorana_hamiltonian(omega), beta);
    let z_closed_form = toy_closed_form(omega, beta);
    let diff = [z_spin, z_fock, z_majorana].iter().map(|z| (z - z_closed_form).abs()).fold(0.0, f64::max);
    ToyModelCheck {
        z_spin,
        z_fock,
        z_majorana,
        z_closed_form,
        diff,
    }
}
