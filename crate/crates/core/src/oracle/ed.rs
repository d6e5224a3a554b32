//! Dense exact diagonalization of the spin Hamiltonian
//! `H = −Σ_j [a_j σˣ_j σˣ_{j+1} + b_j σʸ_j σʸ_{j+1} + c_j σᶻ_j σᶻ_{j+1} + h_j σᶻ_j]`.
//!
//! Basis states are bit strings with bit `j` set when spin `j` points down
//! (σᶻ = −1), which is the occupied fermion under σᶻ = 1 − 2n.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectrum::ChainParams;

pub const MAX_SITES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    /// Πσᶻ = +1 (even fermion number).
    Even,
    /// Πσᶻ = −1.
    Odd,
}

impl Parity {
    pub fn of_state(s: usize) -> Parity {
        if s.count_ones() % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinChainSpec {
    pub n: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub h: Vec<f64>,
    pub boundary: Boundary,
}

impl SpinChainSpec {
    pub fn new(n: usize, a: Vec<f64>, b: Vec<f64>, c: Vec<f64>, h: Vec<f64>, boundary: Boundary) -> Result<Self> {
        let spec = SpinChainSpec { n, a, b, c, h, boundary };
        spec.validate()?;
        Ok(spec)
    }

    pub fn n_bonds(&self) -> usize {
        match self.boundary {
            Boundary::Periodic => self.n,
            Boundary::Open => self.n.saturating_sub(1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::param("n", "must be positive"));
        }
        if self.n > MAX_SITES {
            return Err(Error::TooManySites(self.n));
        }
        let nb = self.n_bonds();
        for (name, v) in [("a", &self.a), ("b", &self.b), ("c", &self.c)] {
            if v.len() != nb {
                return Err(Error::param(name, format!("expected {nb} bond couplings, got {}", v.len())));
            }
        }
        if self.h.len() != self.n {
            return Err(Error::param("h", format!("expected {} site fields, got {}", self.n, self.h.len())));
        }
        Ok(())
    }

    /// Uniform XY chain: a = (1+r)/2, b = (1−r)/2, c = 0.
    pub fn xy(params: &ChainParams, boundary: Boundary) -> Result<Self> {
        let n = params.n_sites;
        let nb = if boundary == Boundary::Periodic { n } else { n.saturating_sub(1) };
        Self::new(
            n,
            vec![(1.0 + params.r) / 2.0; nb],
            vec![(1.0 - params.r) / 2.0; nb],
            vec![0.0; nb],
            vec![params.h; n],
            boundary,
        )
    }

    /// Two spins with `H = −ω S⃗₁·S⃗₂`.
    pub fn heisenberg_pair(omega: f64) -> Self {
        let q = omega / 4.0;
        SpinChainSpec {
            n: 2,
            a: vec![q],
            b: vec![q],
            c: vec![q],
            h: vec![0.0, 0.0],
            boundary: Boundary::Open,
        }
    }

    fn bonds(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.n_bonds()).map(move |j| (j, j, (j + 1) % self.n))
    }

    fn diagonal(&self, s: usize) -> f64 {
        let z = |j: usize| if s >> j & 1 == 0 { 1.0 } else { -1.0 };
        let mut e = 0.0;
        for (k, i, j) in self.bonds() {
            e -= self.c[k] * z(i) * z(j);
        }
        for j in 0..self.n {
            e -= self.h[j] * z(j);
        }
        e
    }

    /// Off-diagonal partner of `s` across bond `(i, j)` and the amplitude.
    fn flip_amplitude(&self, k: usize, i: usize, j: usize, s: usize) -> (usize, f64) {
        let zi = if s >> i & 1 == 0 { 1.0 } else { -1.0 };
        let zj = if s >> j & 1 == 0 { 1.0 } else { -1.0 };
        // σˣσˣ flips both spins with amplitude 1, σʸσʸ with −zᵢzⱼ
        let amp = -(self.a[k] - self.b[k] * zi * zj);
        (s ^ (1 << i) ^ (1 << j), amp)
    }

    /// Full 2ⁿ × 2ⁿ Hamiltonian.
    pub fn hamiltonian(&self) -> DMatrix<f64> {
        let dim = 1usize << self.n;
        let mut hm = DMatrix::zeros(dim, dim);
        for s in 0..dim {
            hm[(s, s)] += self.diagonal(s);
            for (k, i, j) in self.bonds() {
                let (t, amp) = self.flip_amplitude(k, i, j, s);
                hm[(t, s)] += amp;
            }
        }
        hm
    }

    /// Hamiltonian restricted to one Πσᶻ sector, with the sector basis.
    pub fn sector_hamiltonian(&self, parity: Parity) -> (Vec<usize>, DMatrix<f64>) {
        let dim = 1usize << self.n;
        let states: Vec<usize> = (0..dim).filter(|&s| Parity::of_state(s) == parity).collect();
        let mut index = vec![usize::MAX; dim];
        for (i, &s) in states.iter().enumerate() {
            index[s] = i;
        }
        let mut hm = DMatrix::zeros(states.len(), states.len());
        for (col, &s) in states.iter().enumerate() {
            hm[(col, col)] += self.diagonal(s);
            for (k, i, j) in self.bonds() {
                let (t, amp) = self.flip_amplitude(k, i, j, s);
                hm[(index[t], col)] += amp;
            }
        }
        (states, hm)
    }
}

#[derive(Debug, Clone)]
pub struct SectorSpectrum {
    pub parity: Parity,
    pub states: Vec<usize>,
    /// Ascending.
    pub eigenvalues: DVector<f64>,
    /// Columns are eigenvectors in the sector basis.
    pub eigenvectors: DMatrix<f64>,
}

impl SectorSpectrum {
    /// Eigenvector `k` embedded in the full 2ⁿ basis.
    pub fn full_vector(&self, k: usize, n: usize) -> DVector<Complex64> {
        let mut v = DVector::from_element(1usize << n, Complex64::new(0.0, 0.0));
        for (i, &s) in self.states.iter().enumerate() {
            v[s] = Complex64::new(self.eigenvectors[(i, k)], 0.0);
        }
        v
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Coefficients ⟨k|v⟩ of a full-basis vector in this sector's eigenbasis.
    pub fn project(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        let dim = self.states.len();
        let restricted = DVector::from_fn(dim, |i, _| v[self.states[i]]);
        let mut out = DVector::from_element(dim, Complex64::new(0.0, 0.0));
        for k in 0..dim {
            let col = self.eigenvectors.column(k);
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..dim {
                acc += restricted[i] * col[i];
            }
            out[k] = acc;
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SpectralData {
    pub n: usize,
    pub sectors: Vec<SectorSpectrum>,
}

impl SpectralData {
    pub fn sector(&self, parity: Parity) -> Option<&SectorSpectrum> {
        self.sectors.iter().find(|s| s.parity == parity)
    }

    /// All eigenvalues ascending with their Πσᶻ label.
    pub fn levels(&self) -> Vec<(f64, Parity)> {
        let mut out: Vec<(f64, Parity)> = self.sectors.iter().flat_map(|s| s.eigenvalues.iter().map(move |&e| (e, s.parity))).collect();
        out.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        out
    }

    /// Largest entry of |VᵀV − 1| over sectors.
    pub fn orthonormality_residual(&self) -> f64 {
        self.sectors
            .iter()
            .map(|s| {
                let g = s.eigenvectors.transpose() * &s.eigenvectors;
                (g - DMatrix::identity(s.states.len(), s.states.len())).amax()
            })
            .fold(0.0, f64::max)
    }
}

pub fn ed_diagonalize_sector(spec: &SpinChainSpec, parity: Parity) -> Result<SectorSpectrum> {
    spec.validate()?;
    let (states, hm) = spec.sector_hamiltonian(parity);
    let eig = SymmetricEigen::new(hm);
    let mut order: Vec<usize> = (0..states.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let eigenvalues = DVector::from_fn(states.len(), |k, _| eig.eigenvalues[order[k]]);
    let eigenvectors = DMatrix::from_fn(states.len(), states.len(), |i, k| eig.eigenvectors[(i, order[k])]);
    Ok(SectorSpectrum {
        parity,
        states,
        eigenvalues,
        eigenvectors,
    })
}

pub fn ed_build_and_diagonalize(spec: &SpinChainSpec) -> Result<SpectralData> {
    spec.validate()?;
    let sectors = if spec.n == 1 {
        // a single spin has one state per sector
        vec![ed_diagonalize_sector(spec, Parity::Even)?, ed_diagonalize_sector(spec, Parity::Odd)?]
    } else {
        let (even, odd) = rayon::join(|| ed_diagonalize_sector(spec, Parity::Even), || ed_diagonalize_sector(spec, Parity::Odd));
        vec![even?, odd?]
    };
    Ok(SpectralData { n: spec.n, sectors })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// Product of single-site Pauli operators on distinct sites.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PauliString(pub Vec<(usize, Pauli)>);

impl PauliString {
    pub fn z(j: usize) -> Self {
        PauliString(vec![(j, Pauli::Z)])
    }

    pub fn zz(i: usize, j: usize) -> Self {
        PauliString(vec![(i, Pauli::Z), (j, Pauli::Z)])
    }

    pub fn flips_parity(&self) -> bool {
        self.0.iter().filter(|(_, p)| *p != Pauli::Z).count() % 2 == 1
    }

    /// Action on a full-basis vector. Operators are applied right to left.
    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        let mut out = v.clone();
        for &(j, p) in self.0.iter().rev() {
            let mut next = DVector::from_element(out.len(), Complex64::new(0.0, 0.0));
            for s in 0..out.len() {
                let amp = out[s];
                if amp == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let up = s >> j & 1 == 0;
                match p {
                    Pauli::Z => next[s] += if up { amp } else { -amp },
                    Pauli::X => next[s ^ (1 << j)] += amp,
                    // σʸ|↑⟩ = i|↓⟩, σʸ|↓⟩ = −i|↑⟩
                    Pauli::Y => next[s ^ (1 << j)] += amp * if up { Complex64::i() } else { -Complex64::i() },
                }
            }
            out = next;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSelection {
    /// Lowest state of one Πσᶻ sector.
    SectorGround(Parity),
    /// Equiprobable mixture of all states degenerate (within `tol`) with the global minimum.
    Ground { tol: f64 },
    /// Gibbs state at inverse temperature β.
    Thermal(f64),
}

fn inner(a: &DVector<Complex64>, b: &DVector<Complex64>) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Weighted list of (sector, eigen index, weight) for a state selection.
fn mixture(data: &SpectralData, sel: StateSelection) -> Vec<(Parity, usize, f64)> {
    match sel {
        StateSelection::SectorGround(p) => vec![(p, 0, 1.0)],
        StateSelection::Ground { tol } => {
            let e0 = data.levels()[0].0;
            let mut out = vec![];
            for s in &data.sectors {
                for (k, &e) in s.eigenvalues.iter().enumerate() {
                    if e - e0 <= tol {
                        out.push((s.parity, k, 1.0));
                    }
                }
            }
            let w = 1.0 / out.len() as f64;
            out.into_iter().map(|(p, k, _)| (p, k, w)).collect()
        }
        StateSelection::Thermal(beta) => {
            let e0 = data.levels()[0].0;
            let mut out = vec![];
            let mut z = 0.0;
            for s in &data.sectors {
                for (k, &e) in s.eigenvalues.iter().enumerate() {
                    let w = (-beta * (e - e0)).exp();
                    z += w;
                    out.push((s.parity, k, w));
                }
            }
            out.into_iter().map(|(p, k, w)| (p, k, w / z)).collect()
        }
    }
}

/// Expectation value of a Pauli string in the selected state.
pub fn ed_expectation(data: &SpectralData, observable: &PauliString, sel: StateSelection) -> Result<f64> {
    let mut acc = 0.0;
    for (p, k, w) in mixture(data, sel) {
        if observable.flips_parity() {
            continue;
        }
        let sector = data.sector(p).ok_or_else(|| Error::param("selection", "sector not diagonalized"))?;
        let v = sector.full_vector(k, data.n);
        acc += w * inner(&v, &observable.apply(&v)).re;
    }
    Ok(acc)
}

/// ⟨0| A(t) B |0⟩ with A(t) = e^{iHt} A e^{−iHt}, |0⟩ the ground state of `ground`.
pub fn ed_time_correlator(data: &SpectralData, a: &PauliString, b: &PauliString, t: f64, ground: Parity) -> Result<Complex64> {
    let gs = data.sector(ground).ok_or_else(|| Error::param("ground", "sector not diagonalized"))?;
    let e0 = gs.ground_energy();
    let v0 = gs.full_vector(0, data.n);
    let target = if b.flips_parity() { ground.flip() } else { ground };
    let sector = data.sector(target).ok_or_else(|| Error::param("ground", "intermediate sector not diagonalized"))?;
    let bv = b.apply(&v0);
    // ⟨0|A|k⟩ = conj(⟨k|A†|0⟩); Pauli strings on distinct sites are Hermitian
    let av = a.apply(&v0);
    let cb = sector.project(&bv);
    let ca = sector.project(&av);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..cb.len() {
        let phase = Complex64::from_polar(1.0, (e0 - sector.eigenvalues[k]) * t);
        acc += phase * ca[k].conj() * cb[k];
    }
    Ok(acc)
}

/// Von Neumann entropy (nats) of the first `l` sites for a pure state.
pub fn ed_block_entropy(state: &DVector<Complex64>, n: usize, l: usize) -> f64 {
    let da = 1usize << l;
    let db = 1usize << (n - l);
    // bits 0..l index the block
    let m = DMatrix::from_fn(da, db, |i, j| state[i | (j << l)]);
    let rho = &m * m.adjoint();
    rho.symmetric_eigenvalues().iter().filter(|&&x| x > 1e-15).map(|&x| -x * x.ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_spin() {
        let spec = SpinChainSpec::new(1, vec![], vec![], vec![], vec![1.0], Boundary::Open).unwrap();
        let data = ed_build_and_diagonalize(&spec).unwrap();
        let lv: Vec<f64> = data.levels().iter().map(|l| l.0).collect();
        assert_eq!(lv, vec![-1.0, 1.0]);
    }

    #[test]
    fn heisenberg_pair_spectrum() {
        let omega = 1.7;
        let data = ed_build_and_diagonalize(&SpinChainSpec::heisenberg_pair(omega)).unwrap();
        let lv: Vec<f64> = data.levels().iter().map(|l| l.0).collect();
        let expect = [-omega / 4.0, -omega / 4.0, -omega / 4.0, 3.0 * omega / 4.0];
        for (a, b) in lv.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn hermitian_and_orthonormal() {
        let spec = SpinChainSpec::new(6, vec![0.3, 0.9, -0.2, 0.5, 0.1, 0.7], vec![0.2; 6], vec![0.4, 0.0, 0.1, 0.0, -0.3, 0.2], vec![0.5, 0.1, 0.0, 0.9, 0.3, 0.2], Boundary::Periodic).unwrap();
        let hm = spec.hamiltonian();
        assert!((&hm - hm.transpose()).amax() < 1e-12);
        let data = ed_build_and_diagonalize(&spec).unwrap();
        assert!(data.orthonormality_residual() < 1e-10);
        let mut full: Vec<f64> = hm.symmetric_eigenvalues().iter().copied().collect();
        full.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in full.iter().zip(data.levels()) {
            assert!((a - b.0).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_large_and_mismatched() {
        assert_eq!(SpinChainSpec::xy(&ChainParams::new(14, 1.0, 0.5).unwrap(), Boundary::Periodic).unwrap_err(), Error::TooManySites(14));
        assert!(SpinChainSpec::new(3, vec![1.0; 2], vec![1.0; 3], vec![0.0; 3], vec![0.0; 3], Boundary::Periodic).is_err());
    }

    #[test]
    fn polarized_magnetization() {
        let spec = SpinChainSpec::xy(&ChainParams::new(6, 1.0, 1e6).unwrap(), Boundary::Periodic).unwrap();
        let data = ed_build_and_diagonalize(&spec).unwrap();
        let m = ed_expectation(&data, &PauliString::z(2), StateSelection::Ground { tol: 1e-9 }).unwrap();
        assert!((m - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pauli_algebra() {
        let n = 3;
        let v = DVector::from_fn(1 << n, |i, _| Complex64::new(i as f64 + 1.0, 0.5 * i as f64));
        // σˣσʸ = iσᶻ on one site
        let xy = PauliString(vec![(1, Pauli::X), (1, Pauli::Y)]).apply(&v);
        let z = PauliString::z(1).apply(&v) * Complex64::i();
        assert!((xy - z).norm() < 1e-12);
    }

    #[test]
    fn time_correlator_at_zero_is_static() {
        let spec = SpinChainSpec::xy(&ChainParams::new(6, 0.6, 0.4).unwrap(), Boundary::Periodic).unwrap();
        let data = ed_build_and_diagonalize(&spec).unwrap();
        let c = ed_time_correlator(&data, &PauliString::z(0), &PauliString::z(2), 0.0, Parity::Even).unwrap();
        let s = ed_expectation(&data, &PauliString::zz(0, 2), StateSelection::SectorGround(Parity::Even)).unwrap();
        assert!((c.re - s).abs() < 1e-12 && c.im.abs() < 1e-12);
    }

    #[test]
    fn product_state_has_no_entropy() {
        let spec = SpinChainSpec::xy(&ChainParams::new(6, 1.0, 1e6).unwrap(), Boundary::Periodic).unwrap();
        let gs = ed_diagonalize_sector(&spec, Parity::Even).unwrap();
        assert!(ed_block_entropy(&gs.full_vector(0, 6), 6, 3).abs() < 1e-9);
    }
}
