//! Delta-method variance of the ratio estimator, its cost surrogate, and
//! the free-energy prediction of the cost ratio between LVP and FVP.

use super::{check_copies, Mode, PurifiedRegister};
use crate::densop::{partial_trace, DensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::eigvalsh;
use crate::pauli::PauliString;
use crate::spin::{DenseLimit, Hamiltonian};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceCost {
    pub variance: f64,
    pub cost: f64,
    /// `Tr[P ρⁿ]` on the purified register.
    pub numerator: f64,
    /// `Tr[ρⁿ]` on the purified register.
    pub denominator: f64,
}

impl VarianceCost {
    pub fn from_moments(numerator: f64, denominator: f64) -> Result<Self> {
        if !(denominator.abs() >= 1e-300) {
            return Err(Error::VanishingDenominator(denominator));
        }
        let (t1, t2) = (numerator, denominator);
        let variance = (1.0 - t1 * t1) / (t2 * t2) + t1 * t1 * (1.0 - t2 * t2) / t2.powi(4);
        Ok(Self { variance, cost: 2.0 / (t2 * t2), numerator, denominator })
    }

    pub fn ratio(&self) -> f64 {
        self.numerator / self.denominator
    }
}

/// Hadamard-test moments `(Tr[P ρⁿ], Tr[ρⁿ])` on the register chosen by `mode`.
pub(crate) fn moments(rho: &DensityMatrix, p: &PauliString, n: u32, mode: Mode<'_>) -> Result<(f64, f64)> {
    check_copies(n)?;
    let powered = match mode {
        Mode::Fvp => PurifiedRegister::new(rho, n)?,
        Mode::Lvp(partition) => {
            if let Some(s) = p.support().into_iter().find(|s| !partition.a().contains(s)) {
                return Err(Error::SiteNotPresent(s));
            }
            let reduced = partial_trace(rho, &partition.window())?;
            PurifiedRegister::new(&reduced, n)?
        }
    };
    let t1 = p.trace_against(powered.matrix(), &powered.sites)?.re;
    Ok((t1, powered.norm))
}

pub fn variance_and_cost(rho: &DensityMatrix, p: &PauliString, n: u32, mode: Mode<'_>) -> Result<VarianceCost> {
    let (t1, t2) = moments(rho, p, n, mode)?;
    VarianceCost::from_moments(t1, t2)
}

pub fn mse(bias: f64, variance: f64, n_shot: u64) -> f64 {
    bias * bias + variance / n_shot as f64
}

/// `log Tr e^{−βH}` from the spectrum, shifted for range safety.
fn log_partition(spectrum: &[f64], beta: f64) -> f64 {
    let e_min = spectrum.iter().copied().fold(f64::INFINITY, f64::min);
    -beta * e_min + spectrum.iter().map(|e| (-beta * (e - e_min)).exp()).sum::<f64>().ln()
}

/// `f_β = −(1/(Nβ)) log Tr e^{−βH}`.
pub fn free_energy_density(h: &Hamiltonian, beta: f64, n_sites: usize) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument(format!("inverse temperature {beta} must be positive")));
    }
    let spectrum = eigvalsh(h.to_dense(DenseLimit::default())?.as_ref())?;
    Ok(-log_partition(&spectrum, beta) / (n_sites as f64 * beta))
}

/// `exp[−2nβ N_C (f_{nβ} − f_β)]`, the free-energy estimate of
/// cost(LVP)/cost(FVP), with `f` taken from `h_window` (the Hamiltonian
/// truncated to A∪B). `h_full` only fixes the total site count.
pub fn predicted_cost_ratio(h_full: &Hamiltonian, h_window: &Hamiltonian, beta: f64, n: u32, n_c: usize) -> Result<f64> {
    let _ = h_full;
    let nb = n as f64 * beta;
    let m = h_window.n_sites();
    let df = free_energy_density(h_window, nb, m)? - free_energy_density(h_window, beta, m)?;
    Ok((-2.0 * n as f64 * beta * n_c as f64 * df).exp())
}

/// cost(LVP)/cost(FVP) for the same Pauli term.
pub fn measured_cost_ratio(lvp: &VarianceCost, fvp: &VarianceCost) -> f64 {
    lvp.cost / fvp.cost
}
