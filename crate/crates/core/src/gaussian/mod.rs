//! Fermionic Gaussian states through their two-point correlation matrices.
//!
//! Majorana picture: `M_ij = ⟨w_i w_j⟩ − δ_ij` for `2L` Majorana operators
//! (Hermitian, `i` times a real antisymmetric matrix, spectrum `±ν_b`).
//! Number-conserving picture: `Λ_rr' = ⟨c†_r c_r'⟩` with spectrum in [0, 1].

mod bridge;
mod free_fermion;
mod ring;
mod tfi;

use faer::{Mat, MatRef};

use crate::error::{Error, Result};
use crate::linalg::{c64, eigh, hermitian_defect, log_det, reconstruct, CMat};

pub use bridge::{gaussian_to_dense, majorana_from_dense, majorana_operators, BRIDGE_MAX_MODES};
pub use free_fermion::{correlation_from_table, diamond_region, free_fermion_correlation, FermiSea, FreeFermionTable};
pub use ring::{trace_power, RingEstimates, TermEstimate, TfiRing};
pub use tfi::{
    g_coefficients, ns_sector_hamiltonian, tfi_bond_form, tfi_field_form, tfi_majorana_correlation, SystemSize,
    Temperature,
};

const SPECTRUM_TOL: f64 = 1e-9;
const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct MajoranaCorrelation {
    m: CMat,
}

impl MajoranaCorrelation {
    /// Checks shape and hermiticity; the spectrum is checked whenever it is
    /// computed.
    pub fn new(m: CMat) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() % 2 != 0 {
            return Err(Error::NotAValidCorrelation(format!("shape {}x{}", m.nrows(), m.ncols())));
        }
        let defect = hermitian_defect(m.as_ref());
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self { m })
    }

    pub fn zeros(modes: usize) -> Self {
        Self { m: Mat::zeros(2 * modes, 2 * modes) }
    }

    pub fn matrix(&self) -> MatRef<'_, c64> {
        self.m.as_ref()
    }

    pub fn modes(&self) -> usize {
        self.m.nrows() / 2
    }

    /// Rows and columns of the listed modes, in the given order.
    pub fn restrict(&self, modes: &[usize]) -> Self {
        let idx: Vec<usize> = modes.iter().flat_map(|&l| [2 * l, 2 * l + 1]).collect();
        Self { m: Mat::from_fn(idx.len(), idx.len(), |i, j| self.m[(idx[i], idx[j])]) }
    }

    /// The non-negative halves `ν_b` of the `±ν_b` spectrum, descending.
    pub fn occupations(&self) -> Result<Vec<f64>> {
        let ev = checked_spectrum(self.m.as_ref(), -1.0, 1.0)?;
        let l = self.modes();
        // ascending eigenvalues: the top L are the non-negative partners
        Ok(ev[l..].iter().rev().map(|v| v.clamp(0.0, 1.0)).collect())
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        let sq = crate::linalg::matmul(self.m.as_ref(), self.m.as_ref());
        (0..sq.nrows()).all(|i| {
            (0..sq.ncols()).all(|j| {
                let want = if i == j { 1.0 } else { 0.0 };
                (sq[(i, j)] - c64::new(want, 0.0)).norm() <= tol
            })
        })
    }
}

#[derive(Debug, Clone)]
pub struct NumberCorrelation {
    lambda: CMat,
}

impl NumberCorrelation {
    pub fn new(lambda: CMat) -> Result<Self> {
        if lambda.nrows() != lambda.ncols() {
            return Err(Error::NotAValidCorrelation(format!("shape {}x{}", lambda.nrows(), lambda.ncols())));
        }
        let defect = hermitian_defect(lambda.as_ref());
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self { lambda })
    }

    pub fn matrix(&self) -> MatRef<'_, c64> {
        self.lambda.as_ref()
    }

    pub fn sites(&self) -> usize {
        self.lambda.nrows()
    }

    pub fn restrict(&self, sites: &[usize]) -> Self {
        Self { lambda: Mat::from_fn(sites.len(), sites.len(), |i, j| self.lambda[(sites[i], sites[j])]) }
    }

    /// Local density `⟨c†_r c_r⟩`.
    pub fn density(&self, site: usize) -> f64 {
        self.lambda[(site, site)].re
    }
}

fn checked_spectrum(m: MatRef<'_, c64>, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let ev = crate::linalg::eigvalsh(m)?;
    if let Some(v) = ev.iter().find(|&&v| v < lo - SPECTRUM_TOL || v > hi + SPECTRUM_TOL) {
        return Err(Error::NotAValidCorrelation(format!("eigenvalue {v} outside [{lo}, {hi}]")));
    }
    Ok(ev)
}

/// Scalar form of the n-copy purification on a Majorana eigenvalue.
pub fn purify_majorana_eigenvalue(nu: f64, n: u32) -> f64 {
    let nu = nu.clamp(-1.0, 1.0);
    let a = (1.0 + nu).powi(n as i32);
    let b = (1.0 - nu).powi(n as i32);
    (a - b) / (a + b)
}

/// Scalar form of the n-copy purification on an occupation eigenvalue.
pub fn purify_occupation(xi: f64, n: u32) -> f64 {
    let xi = xi.clamp(0.0, 1.0);
    let a = xi.powi(n as i32);
    let b = (1.0 - xi).powi(n as i32);
    a / (a + b)
}

/// States whose n-copy purification is again Gaussian.
pub trait Purifiable: Sized {
    fn purified(&self, n: u32) -> Result<Self>;
}

impl Purifiable for MajoranaCorrelation {
    fn purified(&self, n: u32) -> Result<Self> {
        if n == 1 {
            return Ok(self.clone());
        }
        let e = eigh(self.m.as_ref())?;
        spectrum_in(&e.values, -1.0, 1.0)?;
        let w: Vec<f64> = e.values.iter().map(|&v| purify_majorana_eigenvalue(v, n)).collect();
        Ok(Self { m: antihermitian_clean(reconstruct(e.vectors.as_ref(), &w)) })
    }
}

impl Purifiable for NumberCorrelation {
    fn purified(&self, n: u32) -> Result<Self> {
        if n == 1 {
            return Ok(self.clone());
        }
        let e = eigh(self.lambda.as_ref())?;
        spectrum_in(&e.values, 0.0, 1.0)?;
        let w: Vec<f64> = e.values.iter().map(|&v| purify_occupation(v, n)).collect();
        Ok(Self { lambda: crate::linalg::hermitize(reconstruct(e.vectors.as_ref(), &w).as_ref()) })
    }
}

fn spectrum_in(values: &[f64], lo: f64, hi: f64) -> Result<()> {
    if let Some(v) = values.iter().find(|&&v| v < lo - SPECTRUM_TOL || v > hi + SPECTRUM_TOL) {
        return Err(Error::NotAValidCorrelation(format!("eigenvalue {v} outside [{lo}, {hi}]")));
    }
    Ok(())
}

/// Majorana correlations are purely imaginary; drop roundoff in the real
/// part and restore exact hermiticity.
fn antihermitian_clean(m: CMat) -> CMat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
        let im = 0.5 * (m[(i, j)].im - m[(j, i)].im);
        c64::new(0.0, im)
    })
}

pub fn purification_map<S: Purifiable>(state: &S, n: u32) -> Result<S> {
    if n == 0 {
        return Err(Error::InvalidArgument("the number of copies must be at least 1".into()));
    }
    state.purified(n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMetrics {
    pub purity: f64,
    pub overlap: Option<f64>,
    pub hs_distance: Option<f64>,
}

/// `Tr ρ² = √det[(1+M²)/2]`, accumulated as a sum of logs over the spectrum.
pub fn majorana_purity(m: &MajoranaCorrelation) -> Result<f64> {
    let ev = checked_spectrum(m.matrix(), -1.0, 1.0)?;
    let log: f64 = ev.iter().map(|v| ((1.0 + v * v) / 2.0).ln()).sum();
    Ok((0.5 * log).exp())
}

/// `Tr ρ₁ρ₂ = √det[(1+M₂M₁)/2]`.
pub fn majorana_overlap(m1: &MajoranaCorrelation, m2: &MajoranaCorrelation) -> Result<f64> {
    if m1.m.nrows() != m2.m.nrows() {
        return Err(Error::DimensionMismatch { expected: m1.m.nrows(), got: m2.m.nrows() });
    }
    let prod = crate::linalg::matmul(m2.m.as_ref(), m1.m.as_ref());
    let dim = prod.nrows();
    let half = Mat::from_fn(dim, dim, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        (prod[(i, j)] + c64::new(id, 0.0)) * 0.5
    });
    let (log_abs, phase) = log_det(half.as_ref());
    if log_abs == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if phase.re < 0.0 {
        let det = -log_abs.exp();
        if det < -1e-12 {
            return Err(Error::NegativeDeterminant(det));
        }
        return Ok(0.0);
    }
    Ok((0.5 * log_abs).exp())
}

pub fn gaussian_purity_overlap(m1: &MajoranaCorrelation, m2: Option<&MajoranaCorrelation>) -> Result<GaussianMetrics> {
    let purity = majorana_purity(m1)?;
    let Some(m2) = m2 else {
        return Ok(GaussianMetrics { purity, overlap: None, hs_distance: None });
    };
    let overlap = majorana_overlap(m1, m2)?;
    let swapped = majorana_overlap(m2, m1)?;
    debug_assert!((overlap - swapped).abs() <= 1e-9 * overlap.abs().max(1.0));
    let p2 = majorana_purity(m2)?;
    let hs = (purity + p2 - 2.0 * overlap).max(0.0).sqrt();
    Ok(GaussianMetrics { purity, overlap: Some(overlap), hs_distance: Some(hs) })
}

/// `|m₁ − m₂|` for single-mode number correlations.
pub fn mode_trace_distance(a: &NumberCorrelation, b: &NumberCorrelation) -> Result<f64> {
    for s in [a, b] {
        if s.sites() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: s.sites() });
        }
    }
    Ok((a.density(0) - b.density(0)).abs())
}

/// `Σ_ij Q_ij a_i a_j + constant`, with `a` the Majorana operators for a
/// [`MajoranaCorrelation`] or `(c†_i, c_j)` pairs for a [`NumberCorrelation`].
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    pub coefficients: CMat,
    pub constant: f64,
}

impl QuadraticForm {
    pub fn new(coefficients: CMat) -> Self {
        Self { coefficients, constant: 0.0 }
    }
}

/// Wick contraction of a quadratic form against a Gaussian state.
pub trait Contract {
    fn contract(&self, q: &QuadraticForm) -> Result<c64>;
}

impl Contract for MajoranaCorrelation {
    fn contract(&self, q: &QuadraticForm) -> Result<c64> {
        let dim = self.m.nrows();
        if q.coefficients.nrows() != dim || q.coefficients.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: q.coefficients.nrows() });
        }
        let mut acc = c64::new(q.constant, 0.0);
        for i in 0..dim {
            for j in 0..dim {
                let w = if i == j { c64::new(1.0, 0.0) } else { self.m[(i, j)] };
                acc += q.coefficients[(i, j)] * w;
            }
        }
        Ok(acc)
    }
}

impl Contract for NumberCorrelation {
    fn contract(&self, q: &QuadraticForm) -> Result<c64> {
        let dim = self.lambda.nrows();
        if q.coefficients.nrows() != dim || q.coefficients.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: q.coefficients.nrows() });
        }
        let mut acc = c64::new(q.constant, 0.0);
        for i in 0..dim {
            for j in 0..dim {
                acc += q.coefficients[(i, j)] * self.lambda[(i, j)];
            }
        }
        Ok(acc)
    }
}

/// Expectation of `q` in the n-copy purified state.
pub fn gaussian_lvp_observable<S: Purifiable + Contract>(state: &S, n: u32, q: &QuadraticForm) -> Result<f64> {
    let purified = purification_map(state, n)?;
    crate::densop::real_value(purified.contract(q)?)
}

/// `Tr ρⁿ = Π_b [((1+ν_b)/2)ⁿ + ((1−ν_b)/2)ⁿ]`, returned as its logarithm.
pub fn log_trace_power(m: &MajoranaCorrelation, n: u32) -> Result<f64> {
    let nus = m.occupations()?;
    Ok(nus
        .iter()
        .map(|nu| (((1.0 + nu) / 2.0).powi(n as i32) + ((1.0 - nu) / 2.0).powi(n as i32)).ln())
        .sum())
}
