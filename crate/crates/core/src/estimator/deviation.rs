//! `D⁽ⁿ⁾(o_A)`, the LVP-minus-FVP deviation, by three independent routes.

use faer::Mat;

use super::{check_copies, PurifiedRegister};
use crate::densop::{
    embed_operator, integer_power, matrix_log, partial_trace, partial_trace_matrix, real_value, DensityMatrix,
    LocalOperator, EIGENVALUE_FLOOR,
};
use crate::error::{Error, Result};
use crate::lattice::RegionPartition;
use crate::linalg::{adjoint_matmul, c64, eigh, matmul, trace_product, CMat};
use crate::quadrature::GaussLegendre;
use crate::spin::{DenseLimit, Hamiltonian};

fn check_support(o_a: &LocalOperator, partition: &RegionPartition) -> Result<()> {
    if let Some(&s) = o_a.sites.iter().find(|s| !partition.a().contains(s)) {
        return Err(Error::SiteNotPresent(s));
    }
    Ok(())
}

/// LVP value of `o_A` on the window A∪B minus its FVP value.
pub fn deviation_direct(rho: &DensityMatrix, o_a: &LocalOperator, partition: &RegionPartition, n: u32) -> Result<f64> {
    check_support(o_a, partition)?;
    if partition.c().is_empty() {
        return Ok(0.0);
    }
    let reduced = partial_trace(rho, &partition.window())?;
    let lvp = PurifiedRegister::new(&reduced, n)?.value(o_a)?;
    let fvp = PurifiedRegister::new(rho, n)?.value(o_a)?;
    Ok(lvp - fvp)
}

/// Pure-state form: `Tr_{A+C}[(ρ^{AC} − ρ^A⊗ρ^C)(o_A ⊗ (ρ^C)^{n−1})] / Tr[(ρ^C)ⁿ]`.
pub fn deviation_pure(psi: &DensityMatrix, o_a: &LocalOperator, partition: &RegionPartition, n: u32) -> Result<f64> {
    check_copies(n)?;
    check_support(o_a, partition)?;
    let purity = psi.purity();
    if purity < 1.0 - 1e-9 {
        return Err(Error::NotPure(purity));
    }
    if partition.c().is_empty() {
        return Ok(0.0);
    }
    let outer = partition.outer();
    let rho_ac = partial_trace(psi, &outer)?;
    let rho_a = partial_trace_matrix(rho_ac.matrix(), &outer, partition.a())?;
    let rho_c = partial_trace_matrix(rho_ac.matrix(), &outer, partition.c())?;
    let c_pow = integer_power(rho_c.as_ref(), n - 1);
    let norm = trace_product(c_pow.as_ref(), rho_c.as_ref()).re;
    if !(norm >= 1e-300) {
        return Err(Error::VanishingDenominator(norm));
    }
    let m_c = Mat::from_fn(c_pow.nrows(), c_pow.ncols(), |i, j| c_pow[(i, j)] / norm);
    let o_full = embed_operator(o_a.matrix.as_ref(), &o_a.sites, &outer)?;
    let m_full = embed_operator(m_c.as_ref(), partition.c(), &outer)?;
    let joint = trace_product(rho_ac.matrix(), matmul(o_full.as_ref(), m_full.as_ref()).as_ref());
    let o_on_a = embed_operator(o_a.matrix.as_ref(), &o_a.sites, partition.a())?;
    let factorized = trace_product(rho_a.as_ref(), o_on_a.as_ref()) * trace_product(rho_c.as_ref(), m_c.as_ref());
    real_value(joint - factorized)
}

/// Reference operator σ_C placed on region C when interpolating between the
/// two purified states.
#[derive(Debug, Clone)]
pub enum SigmaChoice {
    Identity,
    /// `e^{−βH^{(C)}}` with `H^{(C)}` the terms of `hamiltonian` inside C.
    GibbsLocal { hamiltonian: Hamiltonian, beta: f64 },
}

#[derive(Debug, Clone)]
pub struct QuadratureSpec {
    pub nodes_lambda: usize,
    pub nodes_tau: usize,
    pub sigma_c: SigmaChoice,
    pub floor: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { nodes_lambda: 24, nodes_tau: 24, sigma_c: SigmaChoice::Identity, floor: EIGENVALUE_FLOOR }
    }
}

impl QuadratureSpec {
    pub fn with_nodes(nodes_lambda: usize, nodes_tau: usize) -> Self {
        Self { nodes_lambda, nodes_tau, ..Self::default() }
    }
}

fn checked_log(m: faer::MatRef<'_, c64>, floor: f64) -> Result<CMat> {
    let (log, shift) = matrix_log(m, floor)?;
    if shift > 1e-6 {
        return Err(Error::RankDeficient(shift));
    }
    Ok(log)
}

/// Double Gauss–Legendre integral over interpolation strength λ and the
/// Duhamel parameter τ of the canonical correlation between `X_n − Y_n` and
/// `o_A` in the interpolating state `e^{Y + λ(X−Y)}`.
pub fn deviation_quadrature(
    rho: &DensityMatrix,
    o_a: &LocalOperator,
    partition: &RegionPartition,
    n: u32,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_copies(n)?;
    check_support(o_a, partition)?;
    if spec.nodes_lambda < 2 || spec.nodes_tau < 2 {
        return Err(Error::InvalidArgument("quadrature needs at least two nodes per axis".into()));
    }
    if partition.c().is_empty() {
        return Ok(0.0);
    }
    let sites = rho.sites().to_vec();
    let window = partition.window();
    let nf = n as f64;

    let log_rho = checked_log(rho.matrix(), spec.floor)?;
    let reduced = partial_trace(rho, &window)?;
    let log_window = checked_log(reduced.matrix(), spec.floor)?;
    let mut x = embed_operator(log_window.as_ref(), &window, &sites)?;
    if let SigmaChoice::GibbsLocal { hamiltonian, beta } = &spec.sigma_c {
        let h_c = hamiltonian.restricted_to(partition.c()).to_dense(DenseLimit::default())?;
        let log_sigma = Mat::from_fn(h_c.nrows(), h_c.ncols(), |i, j| h_c[(i, j)] * -*beta);
        let lifted = embed_operator(log_sigma.as_ref(), partition.c(), &sites)?;
        x += &lifted;
    }
    let dim = rho.dim();
    let y = Mat::from_fn(dim, dim, |i, j| log_rho[(i, j)] * nf);
    let x = Mat::from_fn(dim, dim, |i, j| x[(i, j)] * nf);
    let k = &x - &y;
    let o = embed_operator(o_a.matrix.as_ref(), &o_a.sites, &sites)?;

    let lambda_rule = GaussLegendre::new(spec.nodes_lambda).on_interval(0.0, 1.0);
    let tau_rule = GaussLegendre::new(spec.nodes_tau).on_interval(0.0, 1.0);
    let mut total = 0.0;
    for &(lam, w_lam) in &lambda_rule {
        let h = Mat::from_fn(dim, dim, |i, j| y[(i, j)] + k[(i, j)] * lam);
        let e = eigh(h.as_ref())?;
        let top = e.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_z = top + e.values.iter().map(|v| (v - top).exp()).sum::<f64>().ln();
        let log_p: Vec<f64> = e.values.iter().map(|v| v - log_z).collect();
        let v = e.vectors.as_ref();
        let k_rot = matmul(adjoint_matmul(v, k.as_ref()).as_ref(), v);
        let o_rot = matmul(adjoint_matmul(v, o.as_ref()).as_ref(), v);
        let mean_k: f64 = (0..dim).map(|a| log_p[a].exp() * k_rot[(a, a)].re).sum();
        let mean_o: f64 = (0..dim).map(|a| log_p[a].exp() * o_rot[(a, a)].re).sum();
        // K'_ab O'_ba is the only τ-independent piece of the integrand.
        let mut kernel = vec![0.0; dim * dim];
        for b in 0..dim {
            for a in 0..dim {
                kernel[a * dim + b] = (k_rot[(a, b)] * o_rot[(b, a)]).re;
            }
        }
        let mut inner = 0.0;
        for &(tau, w_tau) in &tau_rule {
            let left: Vec<f64> = log_p.iter().map(|l| (tau * l).exp()).collect();
            let right: Vec<f64> = log_p.iter().map(|l| ((1.0 - tau) * l).exp()).collect();
            let mut s = 0.0;
            for a in 0..dim {
                let row = &kernel[a * dim..(a + 1) * dim];
                let mut acc = 0.0;
                for b in 0..dim {
                    acc += row[b] * right[b];
                }
                s += left[a] * acc;
            }
            inner += w_tau * (s - mean_k * mean_o);
        }
        total += w_lam * inner;
    }
    Ok(total)
}
