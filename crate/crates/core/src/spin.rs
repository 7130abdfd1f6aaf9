//! Pauli-sum Hamiltonians and the transverse-field Ising chain.

use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticeKind};
use crate::linalg::{zeros, CMat};
use crate::pauli::{Pauli, PauliString};

/// Largest number of sites the dense engine will expand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DenseLimit(pub usize);

impl Default for DenseLimit {
    fn default() -> Self {
        DenseLimit(14)
    }
}

impl DenseLimit {
    pub fn check(self, sites: usize) -> Result<()> {
        if sites > self.0 {
            Err(Error::DimensionLimit { sites, limit: self.0 })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianTerm {
    pub coefficient: f64,
    pub pauli: PauliString,
}

impl HamiltonianTerm {
    pub fn support(&self) -> Vec<usize> {
        self.pauli.support()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    n_sites: usize,
    terms: Vec<HamiltonianTerm>,
}

impl Hamiltonian {
    pub fn from_terms(n_sites: usize, terms: Vec<HamiltonianTerm>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.pauli.len() != n_sites) {
            return Err(Error::DimensionMismatch { expected: n_sites, got: t.pauli.len() });
        }
        Ok(Self { n_sites, terms })
    }

    /// `H = -Σ_bonds Z_i Z_j - field Σ_i X_i`. Bond terms come first in edge
    /// order, then one field term per site.
    pub fn transverse_field_ising(lattice: &Lattice, field: f64) -> Result<Self> {
        if lattice.kind() != LatticeKind::Chain {
            return Err(Error::InvalidArgument("dense TFI is built on chains only".into()));
        }
        let n = lattice.n_sites();
        let mut terms = Vec::with_capacity(lattice.edges().len() + n);
        for &(i, j) in lattice.edges() {
            terms.push(HamiltonianTerm {
                coefficient: -1.0,
                pauli: PauliString::sparse(n, &[(i, Pauli::Z), (j, Pauli::Z)])?,
            });
        }
        for i in 0..n {
            terms.push(HamiltonianTerm {
                coefficient: -field,
                pauli: PauliString::sparse(n, &[(i, Pauli::X)])?,
            });
        }
        Ok(Self { n_sites: n, terms })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn terms(&self) -> &[HamiltonianTerm] {
        &self.terms
    }

    /// Terms supported entirely inside `sites`, relabelled onto that register
    /// (position k in `sites` becomes site k).
    pub fn restricted_to(&self, sites: &[usize]) -> Hamiltonian {
        let m = sites.len();
        let terms = self
            .terms
            .iter()
            .filter(|t| t.support().iter().all(|s| sites.contains(s)))
            .map(|t| {
                let letters = sites.iter().map(|&s| t.pauli.get(s)).collect();
                HamiltonianTerm { coefficient: t.coefficient, pauli: PauliString::new(letters) }
            })
            .collect();
        Hamiltonian { n_sites: m, terms }
    }

    pub fn to_dense(&self, limit: DenseLimit) -> Result<CMat> {
        limit.check(self.n_sites)?;
        let sites: Vec<usize> = (0..self.n_sites).collect();
        let dim = 1usize << self.n_sites;
        let mut h = zeros(dim, dim);
        for t in &self.terms {
            let act = t.pauli.action_on(&sites)?;
            for b in 0..dim {
                h[(b ^ act.flip, b)] += act.phase_of(b) * t.coefficient;
            }
        }
        Ok(h)
    }
}

/// Dense matrix of a Pauli string, refusing registers beyond `limit`.
pub fn pauli_operator(p: &PauliString, limit: DenseLimit) -> Result<CMat> {
    limit.check(p.len())?;
    p.to_dense()
}

/// Single-particle dispersion of the TFI chain, `ε_q = sqrt(1 + λ² - 2λ cos q)`.
pub fn tfi_dispersion(field: f64, q: f64) -> f64 {
    (1.0 + field * field - 2.0 * field * q.cos()).sqrt()
}

/// Ground energy of the even-parity sector of the periodic chain,
/// `-Σ_q ε_q` over antiperiodic momenta `q = 2π(k + 1/2)/N`.
pub fn tfi_free_fermion_ground_energy(n: usize, field: f64) -> f64 {
    (0..n)
        .map(|k| {
            let q = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
            -tfi_dispersion(field, q)
        })
        .sum()
}
