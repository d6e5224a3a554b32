//! Brute-force references: exact diagonalization of the spin chain, numeric
//! Bogoliubov-de Gennes solutions, the two-spin toy model and a
//! finite-difference Green's function.

pub mod bdg;
pub mod ed;
pub mod fd;
pub mod toy;

pub use bdg::{bdg_mode_solve, BdgMode, FermionOp, RealSpaceBdg};
pub use ed::{
    ed_block_entropy, ed_build_and_diagonalize, ed_diagonalize_sector, ed_expectation, ed_time_correlator, Boundary, Parity, Pauli, PauliString,
    SectorSpectrum, SpectralData, SpinChainSpec, StateSelection,
};
pub use fd::greens_finite_difference;
pub use toy::{toy_model_check, ToyModelCheck};
