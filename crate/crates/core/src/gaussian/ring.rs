//! Per-term FVP/LVP numbers for the TFI ring in the fermionic picture.
//!
//! The ring is translation invariant, so every bond term and every field
//! term share one set of numbers; window correlations are contiguous
//! sub-blocks of the ring's correlation matrix.

use super::{log_trace_power, tfi_bond_form, tfi_field_form, MajoranaCorrelation};
use super::{tfi_majorana_correlation, SystemSize, Temperature};
use crate::error::{Error, Result};
use crate::estimator::VarianceCost;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermEstimate {
    pub fvp_value: f64,
    pub lvp_value: f64,
    pub fvp: VarianceCost,
    pub lvp: VarianceCost,
}

impl TermEstimate {
    pub fn deviation(&self) -> f64 {
        self.lvp_value - self.fvp_value
    }
}

/// `Z_l Z_{l+1}` and `X_l` estimates; the Hamiltonian is
/// `−Σ Z_l Z_{l+1} − λ Σ X_l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingEstimates {
    pub bond: TermEstimate,
    pub field: TermEstimate,
}

#[derive(Debug, Clone)]
pub struct TfiRing {
    sites: usize,
    field: f64,
    full: MajoranaCorrelation,
}

enum Term {
    Bond,
    Field,
}

impl TfiRing {
    pub fn new(sites: usize, field: f64, temperature: Temperature) -> Result<Self> {
        if sites < 3 {
            return Err(Error::InvalidArgument(format!("ring needs at least 3 sites, got {sites}")));
        }
        let full = tfi_majorana_correlation(temperature, field, sites, SystemSize::Finite(sites))?;
        Ok(Self { sites, field, full })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn field(&self) -> f64 {
        self.field
    }

    pub fn correlation(&self) -> &MajoranaCorrelation {
        &self.full
    }

    fn estimate(&self, term: Term, d: usize, n: u32) -> Result<TermEstimate> {
        let width = match term {
            Term::Bond => 2,
            Term::Field => 1,
        };
        let form = |modes: usize, p: usize| match term {
            Term::Bond => tfi_bond_form(modes, p),
            Term::Field => tfi_field_form(modes, p),
        };
        let measure = |m: &MajoranaCorrelation, p: usize| -> Result<(f64, VarianceCost)> {
            let value = super::gaussian_lvp_observable(m, n, &form(m.modes(), p)?)?;
            let t2 = log_trace_power(m, n)?.exp();
            Ok((value, VarianceCost::from_moments(value * t2, t2)?))
        };
        let (fvp_value, fvp) = measure(&self.full, 0)?;
        let window = width + 2 * d;
        let (lvp_value, lvp) = if window >= self.sites {
            (fvp_value, fvp)
        } else {
            let modes: Vec<usize> = (0..window).collect();
            measure(&self.full.restrict(&modes), d)?
        };
        Ok(TermEstimate { fvp_value, lvp_value, fvp, lvp })
    }

    pub fn estimates(&self, d: usize, n: u32) -> Result<RingEstimates> {
        Ok(RingEstimates { bond: self.estimate(Term::Bond, d, n)?, field: self.estimate(Term::Field, d, n)? })
    }

    /// `Σ_i |D_i|²` and `Σ_i Var_i` over all `2N` terms of `H`, coefficients
    /// included; `(bias², var_lvp, var_fvp)`.
    pub fn energy_error_budget(&self, d: usize, n: u32) -> Result<(f64, f64, f64)> {
        let e = self.estimates(d, n)?;
        let nf = self.sites as f64;
        let l2 = self.field * self.field;
        let bias2 = nf * (e.bond.deviation().powi(2) + l2 * e.field.deviation().powi(2));
        let var_lvp = nf * (e.bond.lvp.variance + l2 * e.field.lvp.variance);
        let var_fvp = nf * (e.bond.fvp.variance + l2 * e.field.fvp.variance);
        Ok((bias2, var_lvp, var_fvp))
    }

    /// `⟨H⟩/N` in the n-copy purified state, FVP and LVP.
    pub fn energy_density(&self, d: usize, n: u32) -> Result<(f64, f64)> {
        let e = self.estimates(d, n)?;
        Ok((
            -e.bond.fvp_value - self.field * e.field.fvp_value,
            -e.bond.lvp_value - self.field * e.field.lvp_value,
        ))
    }
}

/// `Tr ρⁿ` of a purified correlation, for cost bookkeeping.
pub fn trace_power(m: &MajoranaCorrelation, n: u32) -> Result<f64> {
    Ok(log_trace_power(m, n)?.exp())
}
