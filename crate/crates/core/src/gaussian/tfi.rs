//! Transverse-field Ising chain `H = −Σ Z_l Z_{l+1} − λ Σ X_l` through its
//! Jordan–Wigner Majorana correlations.

use std::f64::consts::PI;

use faer::Mat;

use super::{MajoranaCorrelation, QuadraticForm};
use crate::error::{Error, Result};
use crate::linalg::c64;
use crate::pauli::{Pauli, PauliString};
use crate::quadrature::GaussLegendre;
use crate::spin::{tfi_dispersion, Hamiltonian, HamiltonianTerm};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Temperature {
    Zero,
    /// Inverse temperature β > 0.
    Beta(f64),
}

impl Temperature {
    fn occupation(self, energy: f64) -> f64 {
        match self {
            Temperature::Zero => 1.0,
            Temperature::Beta(b) => (b * energy).tanh(),
        }
    }

    pub(super) fn validate(self) -> Result<()> {
        match self {
            Temperature::Beta(b) if !(b > 0.0) || !b.is_finite() => {
                Err(Error::InvalidArgument(format!("inverse temperature must be positive and finite, got {b}")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemSize {
    Infinite,
    /// Ring of N sites in the antiperiodic (Neveu–Schwarz) fermion sector.
    Finite(usize),
}

const GATE_START: usize = 256;
const GATE_MAX: usize = 1 << 17;
const GATE_TOL: f64 = 1e-10;

/// `g_l` for `l ∈ [−(L−1), L−1]`, stored at index `l + L − 1`.
///
/// `g_l = (i/π) ∫₀^π cos(q l + θ_q) n(ε_q) dq` with
/// `e^{iθ_q} = (cos q − λ + i sin q)/ε_q`; for a finite ring the integral
/// becomes the average over `q_k = 2π(k+½)/N`.
pub fn g_coefficients(temperature: Temperature, field: f64, len: usize, size: SystemSize) -> Result<Vec<c64>> {
    temperature.validate()?;
    if len == 0 {
        return Err(Error::InvalidArgument("window length must be positive".into()));
    }
    let lags: Vec<i64> = (-(len as i64 - 1)..=(len as i64 - 1)).collect();
    let integrand = |q: f64, l: i64| -> f64 {
        let eps = tfi_dispersion(field, q);
        if eps == 0.0 {
            // λ = 1 at q = 0: the phase tends to i·e^{iq/2}
            return -(q * (l as f64 + 0.5)).sin() * temperature.occupation(0.0);
        }
        let (c, s) = ((q * l as f64).cos(), (q * l as f64).sin());
        (c * (q.cos() - field) - s * q.sin()) / eps * temperature.occupation(eps)
    };
    match size {
        SystemSize::Finite(n) => {
            if n < len {
                return Err(Error::InvalidArgument(format!("window of {len} modes exceeds ring of {n}")));
            }
            Ok(lags
                .iter()
                .map(|&l| {
                    let sum: f64 = (0..n).map(|k| integrand(2.0 * PI * (k as f64 + 0.5) / n as f64, l)).sum();
                    c64::new(0.0, sum / n as f64)
                })
                .collect())
        }
        SystemSize::Infinite => {
            let eval = |nodes: usize| -> Vec<f64> {
                let rule = GaussLegendre::new(nodes).on_interval(0.0, PI);
                lags.iter().map(|&l| rule.iter().map(|&(q, w)| w * integrand(q, l)).sum::<f64>() / PI).collect()
            };
            let mut nodes = GATE_START;
            let mut prev = eval(nodes);
            loop {
                let next = eval(2 * nodes);
                let change = prev.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                if change <= GATE_TOL {
                    return Ok(next.into_iter().map(|v| c64::new(0.0, v)).collect());
                }
                nodes *= 2;
                if nodes >= GATE_MAX {
                    return Err(Error::QuadratureNotConverged { nodes, change });
                }
                prev = next;
            }
        }
    }
}

/// Correlation matrix of `len` consecutive sites of the thermal (or ground)
/// state, `M[2i][2j+1] = g_{j−i}` and `M[2i+1][2j] = −g_{i−j}`.
pub fn tfi_majorana_correlation(
    temperature: Temperature,
    field: f64,
    len: usize,
    size: SystemSize,
) -> Result<MajoranaCorrelation> {
    let g = g_coefficients(temperature, field, len, size)?;
    let at = |l: i64| g[(l + len as i64 - 1) as usize];
    let mut m = Mat::zeros(2 * len, 2 * len);
    for i in 0..len {
        for j in 0..len {
            let (ii, jj) = (i as i64, j as i64);
            m[(2 * i, 2 * j + 1)] = at(jj - ii);
            m[(2 * i + 1, 2 * j)] = -at(ii - jj);
        }
    }
    MajoranaCorrelation::new(m)
}

/// Spin Hamiltonian whose spectrum is that of the antiperiodic fermion
/// sector in both parity sectors: the closing bond `−Z_{N−1} Z_0` is
/// replaced by `+Y_0 X_1 ⋯ X_{N−2} Y_{N−1}`.
pub fn ns_sector_hamiltonian(n: usize, field: f64) -> Result<Hamiltonian> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("ring needs at least 3 sites, got {n}")));
    }
    let mut terms = Vec::with_capacity(2 * n);
    for l in 0..n - 1 {
        terms.push(HamiltonianTerm {
            coefficient: -1.0,
            pauli: PauliString::sparse(n, &[(l, Pauli::Z), (l + 1, Pauli::Z)])?,
        });
    }
    let mut closing = vec![Pauli::X; n];
    closing[0] = Pauli::Y;
    closing[n - 1] = Pauli::Y;
    terms.push(HamiltonianTerm { coefficient: 1.0, pauli: PauliString::new(closing) });
    for l in 0..n {
        terms.push(HamiltonianTerm { coefficient: -field, pauli: PauliString::sparse(n, &[(l, Pauli::X)])? });
    }
    Hamiltonian::from_terms(n, terms)
}

/// `Z_p Z_{p+1} = i w_{2p+1} w_{2p+2}` on a window of `modes` sites.
pub fn tfi_bond_form(modes: usize, p: usize) -> Result<QuadraticForm> {
    if p + 1 >= modes {
        return Err(Error::SiteNotPresent(p + 1));
    }
    let mut q = Mat::zeros(2 * modes, 2 * modes);
    q[(2 * p + 1, 2 * p + 2)] = c64::new(0.0, 1.0);
    Ok(QuadraticForm::new(q))
}

/// `X_p = i w_{2p} w_{2p+1}`.
pub fn tfi_field_form(modes: usize, p: usize) -> Result<QuadraticForm> {
    if p >= modes {
        return Err(Error::SiteNotPresent(p));
    }
    let mut q = Mat::zeros(2 * modes, 2 * modes);
    q[(2 * p, 2 * p + 1)] = c64::new(0.0, 1.0);
    Ok(QuadraticForm::new(q))
}
