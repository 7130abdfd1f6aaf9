//! FVP and LVP estimators, their deviations, variances and shot-level
//! simulation.

mod derangement;
mod deviation;
mod shots;
mod variance;

use std::collections::HashMap;

use faer::MatRef;

use crate::densop::{integer_power, partial_trace, real_value, DensityMatrix, Observable};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, RegionPartition};
use crate::linalg::{c64, trace, CMat};
use crate::pauli::PauliString;
use crate::spin::HamiltonianTerm;

pub use derangement::{derangement_check, DERANGEMENT_MAX_QUBITS};
pub use deviation::{deviation_direct, deviation_pure, deviation_quadrature, QuadratureSpec, SigmaChoice};
pub use shots::{shot_simulate, ShotPlan};
pub use variance::{
    free_energy_density, measured_cost_ratio, mse, predicted_cost_ratio, variance_and_cost, VarianceCost,
};

/// Which register the purification acts on.
#[derive(Debug, Clone, Copy)]
pub enum Mode<'a> {
    Fvp,
    Lvp(&'a RegionPartition),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateReport {
    pub value: f64,
    /// Per-shot variance of the ratio estimator.
    pub variance: f64,
    pub cost: f64,
    pub bias: f64,
    pub mse: f64,
    pub n_copies: u32,
    /// Shots spent on each of the numerator and denominator circuits.
    pub n_shot: u64,
}

/// `ρⁿ` together with `Tr ρⁿ` and the register it lives on. Building it is
/// the expensive step, so callers evaluating many observables on one state
/// should keep it around.
pub struct PurifiedRegister {
    pub(crate) power: CMat,
    pub(crate) norm: f64,
    pub(crate) sites: Vec<usize>,
}

impl PurifiedRegister {
    pub fn new(rho: &DensityMatrix, n: u32) -> Result<Self> {
        check_copies(n)?;
        let power = integer_power(rho.matrix(), n);
        let norm = trace(power.as_ref()).re;
        if !(norm >= 1e-300) {
            return Err(Error::VanishingDenominator(norm));
        }
        Ok(Self { power, norm, sites: rho.sites().to_vec() })
    }

    pub fn matrix(&self) -> MatRef<'_, c64> {
        self.power.as_ref()
    }

    /// `Tr ρⁿ`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn value<O: Observable + ?Sized>(&self, o: &O) -> Result<f64> {
        real_value(o.trace_against(self.matrix(), &self.sites)? / self.norm)
    }

    pub fn moments(&self, p: &PauliString) -> Result<VarianceCost> {
        VarianceCost::from_moments(p.trace_against(self.matrix(), &self.sites)?.re, self.norm)
    }

    /// The normalised `ρⁿ / Tr ρⁿ` reduced to `keep`.
    pub fn marginal(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut m = crate::densop::partial_trace_matrix(self.matrix(), &self.sites, &keep)?;
        m *= faer::Scale(c64::new(1.0 / self.norm, 0.0));
        DensityMatrix::new(crate::linalg::hermitize(m.as_ref()), keep)
    }
}

pub(crate) fn check_copies(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("the number of copies must be at least 1".into()));
    }
    Ok(())
}

/// `Tr[ρⁿ O] / Tr[ρⁿ]`.
pub fn fvp_value<O: Observable + ?Sized>(rho: &DensityMatrix, o: &O, n: u32) -> Result<f64> {
    PurifiedRegister::new(rho, n)?.value(o)
}

/// `Tr[(ρ^{A+B})ⁿ o_A] / Tr[(ρ^{A+B})ⁿ]` for one term.
pub fn lvp_term_value(rho: &DensityMatrix, term: &HamiltonianTerm, partition: &RegionPartition, n: u32) -> Result<f64> {
    let reduced = partial_trace(rho, &partition.window())?;
    PurifiedRegister::new(&reduced, n)?.value(term)
}

/// Sum of per-term LVP values, each purified on its own window of buffer `d`.
pub fn lvp_value(rho: &DensityMatrix, terms: &[HamiltonianTerm], lattice: &Lattice, d: usize, n: u32) -> Result<f64> {
    Ok(lvp_term_values(rho, terms, lattice, d, n)?.iter().sum())
}

/// Per-term LVP values in term order. Windows shared by several terms are
/// purified once.
pub fn lvp_term_values(
    rho: &DensityMatrix,
    terms: &[HamiltonianTerm],
    lattice: &Lattice,
    d: usize,
    n: u32,
) -> Result<Vec<f64>> {
    check_copies(n)?;
    let mut cache: HashMap<Vec<usize>, PurifiedRegister> = HashMap::new();
    let mut out = Vec::with_capacity(terms.len());
    for term in terms {
        let support = term.support();
        let window = if support.is_empty() {
            rho.sites().to_vec()
        } else {
            lattice.partition(&support, d)?.window()
        };
        if !cache.contains_key(&window) {
            let reduced = partial_trace(rho, &window)?;
            cache.insert(window.clone(), PurifiedRegister::new(&reduced, n)?);
        }
        out.push(cache[&window].value(term)?);
    }
    Ok(out)
}

/// Hadamard-test moments of every term's Pauli string on its own LVP
/// window, in term order. Coefficients are not applied.
pub fn lvp_term_costs(
    rho: &DensityMatrix,
    terms: &[HamiltonianTerm],
    lattice: &Lattice,
    d: usize,
    n: u32,
) -> Result<Vec<VarianceCost>> {
    check_copies(n)?;
    let mut cache: HashMap<Vec<usize>, PurifiedRegister> = HashMap::new();
    let mut out = Vec::with_capacity(terms.len());
    for term in terms {
        let support = term.support();
        let window = if support.is_empty() {
            rho.sites().to_vec()
        } else {
            lattice.partition(&support, d)?.window()
        };
        if !cache.contains_key(&window) {
            let reduced = partial_trace(rho, &window)?;
            cache.insert(window.clone(), PurifiedRegister::new(&reduced, n)?);
        }
        out.push(cache[&window].moments(&term.pauli)?);
    }
    Ok(out)
}

/// FVP counterpart of [`lvp_term_costs`], from a single `ρⁿ`.
pub fn fvp_term_costs(rho: &DensityMatrix, terms: &[HamiltonianTerm], n: u32) -> Result<Vec<VarianceCost>> {
    let full = PurifiedRegister::new(rho, n)?;
    terms.iter().map(|t| full.moments(&t.pauli)).collect()
}

/// `Tr_{R∖K}[(ρ^R)ⁿ] / Tr[(ρ^R)ⁿ]`: purify on `region`, then keep `keep`.
/// With `region` the full register this is the FVP marginal, with the
/// window A∪B it is the LVP marginal.
pub fn purified_marginal(rho: &DensityMatrix, region: &[usize], keep: &[usize], n: u32) -> Result<DensityMatrix> {
    PurifiedRegister::new(&partial_trace(rho, region)?, n)?.marginal(keep)
}

/// Per-term FVP values in term order, from a single `ρⁿ`.
pub fn fvp_term_values(rho: &DensityMatrix, terms: &[HamiltonianTerm], n: u32) -> Result<Vec<f64>> {
    let p = PurifiedRegister::new(rho, n)?;
    terms.iter().map(|t| p.value(t)).collect()
}

#[cfg(test)]
mod tests;
