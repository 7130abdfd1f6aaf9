//! Dense density matrices: thermal and ground states, partial traces,
//! powers, expectation values and distances.

use faer::{Mat, MatRef};

use crate::error::{Error, Result};
use crate::linalg::{
    c64, eigh, eigvalsh, hermitian_defect, hermitize, identity, matmul, reconstruct,
    trace, trace_product, zeros, CMat,
};
use crate::pauli::PauliString;
use crate::spin::{DenseLimit, Hamiltonian, HamiltonianTerm};

const STATE_TOL: f64 = 1e-10;

/// Eigenvalues below this are clamped before fractional powers and logs.
pub const EIGENVALUE_FLOOR: f64 = 1e-14;

/// Hermitian, unit-trace matrix on an ascending list of lattice sites.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMat,
    sites: Vec<usize>,
}

impl DensityMatrix {
    /// Checks dimension, hermiticity and trace. Positivity needs a spectrum
    /// and is checked separately by [`DensityMatrix::check_positive`].
    pub fn new(matrix: CMat, sites: Vec<usize>) -> Result<Self> {
        check_register(&matrix, &sites)?;
        let defect = hermitian_defect(matrix.as_ref());
        if defect > STATE_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = trace(matrix.as_ref());
        if (tr - c64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        Ok(Self { matrix, sites })
    }

    /// Hermitize and rescale to unit trace.
    pub fn from_unnormalized(matrix: CMat, sites: Vec<usize>) -> Result<Self> {
        check_register(&matrix, &sites)?;
        let h = hermitize(matrix.as_ref());
        let tr = trace(h.as_ref()).re;
        if !(tr.is_finite() && tr > 1e-300) {
            return Err(Error::VanishingDenominator(tr));
        }
        let scale = 1.0 / tr;
        let h = Mat::from_fn(h.nrows(), h.ncols(), |i, j| h[(i, j)] * scale);
        Ok(Self { matrix: h, sites })
    }

    pub fn maximally_mixed(sites: Vec<usize>) -> Self {
        let dim = 1usize << sites.len();
        let w = 1.0 / dim as f64;
        let matrix = Mat::from_fn(dim, dim, |i, j| if i == j { c64::new(w, 0.0) } else { c64::new(0.0, 0.0) });
        Self { matrix, sites }
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) state vector.
    pub fn pure(vector: &[c64], sites: Vec<usize>) -> Result<Self> {
        let norm2: f64 = vector.iter().map(|a| a.norm_sqr()).sum();
        if norm2 <= 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let matrix = Mat::from_fn(vector.len(), vector.len(), |i, j| vector[i] * vector[j].conj() / norm2);
        check_register(&matrix, &sites)?;
        Ok(Self { matrix, sites })
    }

    pub(crate) fn from_parts(matrix: CMat, sites: Vec<usize>) -> Self {
        Self { matrix, sites }
    }

    pub fn matrix(&self) -> MatRef<'_, c64> {
        self.matrix.as_ref()
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn check_positive(&self) -> Result<()> {
        let ev = eigvalsh(self.matrix())?;
        if ev[0] < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {:e}", ev[0])));
        }
        Ok(())
    }

    pub fn purity(&self) -> f64 {
        trace_product(self.matrix(), self.matrix()).re
    }
}

fn check_register(matrix: &CMat, sites: &[usize]) -> Result<()> {
    let dim = 1usize << sites.len();
    if matrix.nrows() != dim || matrix.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: matrix.nrows() });
    }
    if sites.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("site labels must be strictly ascending".into()));
    }
    Ok(())
}

/// Eigenvalues descending with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMat,
}

impl SpectralDecomposition {
    pub fn new(m: MatRef<'_, c64>) -> Result<Self> {
        let e = eigh(m)?;
        let n = e.values.len();
        let eigenvalues = e.values.iter().rev().copied().collect();
        let eigenvectors = Mat::from_fn(n, n, |i, j| e.vectors[(i, n - 1 - j)]);
        Ok(Self { eigenvalues, eigenvectors })
    }

    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMat {
        let w: Vec<f64> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        reconstruct(self.eigenvectors.as_ref(), &w)
    }
}

/// `e^{-βH}/Tr e^{-βH}` on all sites of `h`.
pub fn gibbs_state(h: &Hamiltonian, beta: f64) -> Result<DensityMatrix> {
    let dense = h.to_dense(DenseLimit::default())?;
    gibbs_from_dense(dense.as_ref(), beta, (0..h.n_sites()).collect())
}

pub fn gibbs_from_dense(h: MatRef<'_, c64>, beta: f64, sites: Vec<usize>) -> Result<DensityMatrix> {
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::InvalidArgument(format!("inverse temperature {beta} must be non-negative")));
    }
    if !beta.is_finite() {
        return Err(Error::NumericalOverflow);
    }
    if beta == 0.0 {
        return Ok(DensityMatrix::maximally_mixed(sites));
    }
    let e = eigh(h)?;
    let e_min = e.values[0];
    let mut w: Vec<f64> = e.values.iter().map(|&x| (-beta * (x - e_min)).exp()).collect();
    let z: f64 = w.iter().sum();
    if !z.is_finite() {
        return Err(Error::NumericalOverflow);
    }
    w.iter_mut().for_each(|x| *x /= z);
    let rho = hermitize(reconstruct(e.vectors.as_ref(), &w).as_ref());
    Ok(DensityMatrix::from_parts(rho, sites))
}

pub const DEFAULT_GAP_TOL: f64 = 1e-8;

pub fn ground_state_projector(h: &Hamiltonian, gap_tol: f64) -> Result<DensityMatrix> {
    let dense = h.to_dense(DenseLimit::default())?;
    ground_state_from_dense(dense.as_ref(), gap_tol, (0..h.n_sites()).collect())
}

pub fn ground_state_from_dense(h: MatRef<'_, c64>, gap_tol: f64, sites: Vec<usize>) -> Result<DensityMatrix> {
    if !(gap_tol > 0.0) {
        return Err(Error::InvalidArgument("gap tolerance must be positive".into()));
    }
    let e = eigh(h)?;
    if e.values.len() > 1 {
        let gap = e.values[1] - e.values[0];
        if gap < gap_tol {
            return Err(Error::DegenerateGroundState { gap, tol: gap_tol });
        }
    }
    let v: Vec<c64> = (0..e.vectors.nrows()).map(|i| e.vectors[(i, 0)]).collect();
    DensityMatrix::pure(&v, sites)
}

/// Precomputed bit scatter tables for splitting a register into kept and
/// traced parts.
struct Split {
    keep: Vec<usize>,
    rest: Vec<usize>,
}

impl Split {
    fn new(sites: &[usize], keep: &[usize]) -> Result<(Self, Vec<usize>)> {
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        keep_sorted.dedup();
        let m = sites.len();
        let mut keep_bits = Vec::new();
        for &k in &keep_sorted {
            let pos = sites.iter().position(|&s| s == k).ok_or(Error::SiteNotPresent(k))?;
            keep_bits.push(m - 1 - pos);
        }
        let rest_bits: Vec<usize> = (0..m)
            .filter(|pos| !keep_sorted.contains(&sites[*pos]))
            .map(|pos| m - 1 - pos)
            .collect();
        Ok((Self { keep: scatter_table(&keep_bits), rest: scatter_table(&rest_bits) }, keep_sorted))
    }
}

/// `table[k]` places the bits of `k` (most significant first) at `bits`.
fn scatter_table(bits: &[usize]) -> Vec<usize> {
    let len = bits.len();
    (0..1usize << len)
        .map(|k| {
            bits.iter()
                .enumerate()
                .filter(|(i, _)| (k >> (len - 1 - i)) & 1 == 1)
                .fold(0, |acc, (_, &b)| acc | (1 << b))
        })
        .collect()
}

/// Partial trace of an arbitrary operator on `sites` down to `keep`.
pub fn partial_trace_matrix(m: MatRef<'_, c64>, sites: &[usize], keep: &[usize]) -> Result<CMat> {
    if keep.is_empty() {
        return Err(Error::EmptyKeepSet);
    }
    let dim = 1usize << sites.len();
    if m.nrows() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: m.nrows() });
    }
    let (split, _) = Split::new(sites, keep)?;
    let dk = split.keep.len();
    if split.rest.len() == 1 {
        return Ok(m.to_owned());
    }
    let mut out = zeros(dk, dk);
    for j in 0..dk {
        let cj = split.keep[j];
        for i in 0..dk {
            let ri = split.keep[i];
            let mut acc = c64::new(0.0, 0.0);
            for &t in &split.rest {
                acc += m[(ri | t, cj | t)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    let m = partial_trace_matrix(rho.matrix(), rho.sites(), &keep_sorted)?;
    Ok(DensityMatrix::from_parts(m, keep_sorted))
}

/// `op ⊗ I` on `target`, where `op` acts on `op_sites ⊆ target` (both ascending).
pub fn embed_operator(op: MatRef<'_, c64>, op_sites: &[usize], target: &[usize]) -> Result<CMat> {
    let dim_op = 1usize << op_sites.len();
    if op.nrows() != dim_op {
        return Err(Error::DimensionMismatch { expected: dim_op, got: op.nrows() });
    }
    if op_sites == target {
        return Ok(op.to_owned());
    }
    let (split, _) = Split::new(target, op_sites)?;
    let dim = 1usize << target.len();
    let mut out = zeros(dim, dim);
    for &t in &split.rest {
        for (j_op, &cj) in split.keep.iter().enumerate() {
            for (i_op, &ri) in split.keep.iter().enumerate() {
                out[(ri | t, cj | t)] = op[(i_op, j_op)];
            }
        }
    }
    Ok(out)
}

/// `ρ^t`. Integer exponents use repeated squaring; fractional ones go
/// through the spectrum with eigenvalues clamped to `floor`.
pub fn matrix_power(m: MatRef<'_, c64>, t: f64) -> Result<CMat> {
    matrix_power_with_floor(m, t, EIGENVALUE_FLOOR)
}

pub fn matrix_power_with_floor(m: MatRef<'_, c64>, t: f64, floor: f64) -> Result<CMat> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeExponent(t));
    }
    if t.fract() == 0.0 && t <= u32::MAX as f64 {
        return Ok(integer_power(m, t as u32));
    }
    let spec = SpectralDecomposition::new(m)?;
    Ok(spec.reconstruct_with(|x| x.max(floor).powf(t)))
}

pub fn integer_power(m: MatRef<'_, c64>, n: u32) -> CMat {
    match n {
        0 => identity(m.nrows()),
        1 => m.to_owned(),
        _ => {
            let mut result: Option<CMat> = None;
            let mut base = m.to_owned();
            let mut k = n;
            loop {
                if k & 1 == 1 {
                    result = Some(match result {
                        None => base.clone(),
                        Some(r) => matmul(r.as_ref(), base.as_ref()),
                    });
                }
                k >>= 1;
                if k == 0 {
                    break;
                }
                base = matmul(base.as_ref(), base.as_ref());
            }
            result.expect("n >= 2 sets at least one bit")
        }
    }
}

/// Anything whose trace against an operator on a site register is defined.
pub trait Observable {
    /// `Tr[R O]` for `R` on the ascending register `sites`.
    fn trace_against(&self, r: MatRef<'_, c64>, sites: &[usize]) -> Result<c64>;
}

/// Dense operator on an ascending list of sites.
#[derive(Debug, Clone)]
pub struct LocalOperator {
    pub sites: Vec<usize>,
    pub matrix: CMat,
}

impl LocalOperator {
    pub fn new(sites: Vec<usize>, matrix: CMat) -> Result<Self> {
        check_register(&matrix, &sites)?;
        Ok(Self { sites, matrix })
    }

    /// The Pauli string restricted to its own support.
    pub fn from_pauli(p: &PauliString) -> Result<Self> {
        let sites = p.support();
        let matrix = if sites.is_empty() { identity(1) } else { p.to_dense_on(&sites)? };
        Ok(Self { sites, matrix })
    }

    pub fn from_term(t: &HamiltonianTerm) -> Result<Self> {
        let mut op = Self::from_pauli(&t.pauli)?;
        op.matrix = Mat::from_fn(op.matrix.nrows(), op.matrix.ncols(), |i, j| op.matrix[(i, j)] * t.coefficient);
        Ok(op)
    }
}

impl Observable for LocalOperator {
    fn trace_against(&self, r: MatRef<'_, c64>, sites: &[usize]) -> Result<c64> {
        if self.sites.is_empty() {
            return Ok(trace(r) * self.matrix[(0, 0)]);
        }
        if self.sites == sites {
            return Ok(trace_product(r, self.matrix.as_ref()));
        }
        let reduced = partial_trace_matrix(r, sites, &self.sites)?;
        Ok(trace_product(reduced.as_ref(), self.matrix.as_ref()))
    }
}

impl Observable for PauliString {
    fn trace_against(&self, r: MatRef<'_, c64>, sites: &[usize]) -> Result<c64> {
        PauliString::trace_against(self, r, sites)
    }
}

impl Observable for HamiltonianTerm {
    fn trace_against(&self, r: MatRef<'_, c64>, sites: &[usize]) -> Result<c64> {
        Ok(self.pauli.trace_against(r, sites)? * self.coefficient)
    }
}

impl Observable for Hamiltonian {
    fn trace_against(&self, r: MatRef<'_, c64>, sites: &[usize]) -> Result<c64> {
        self.terms().iter().map(|t| t.trace_against(r, sites)).sum()
    }
}

impl Observable for [HamiltonianTerm] {
    fn trace_against(&self, r: MatRef<'_, c64>, sites: &[usize]) -> Result<c64> {
        self.iter().map(|t| t.trace_against(r, sites)).sum()
    }
}

/// `Re Tr[ρ O]`, refusing a visible imaginary part.
pub fn expectation<O: Observable + ?Sized>(rho: &DensityMatrix, o: &O) -> Result<f64> {
    real_value(o.trace_against(rho.matrix(), rho.sites())?)
}

/// Expectation of a dense operator on all sites of `rho`.
pub fn expectation_dense(rho: &DensityMatrix, o: MatRef<'_, c64>) -> Result<f64> {
    if o.nrows() != rho.dim() || o.ncols() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: o.nrows() });
    }
    real_value(trace_product(rho.matrix(), o))
}

pub(crate) fn real_value(z: c64) -> Result<f64> {
    if z.im.abs() > 1e-9 * z.re.abs().max(1.0) {
        return Err(Error::NotHermitian(z.im.abs()));
    }
    Ok(z.re)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateMetrics {
    pub purity: f64,
    pub entropy: f64,
    pub lambda_max: f64,
    pub trace_distance: Option<f64>,
    pub hs_distance: Option<f64>,
}

pub fn state_metrics(rho: &DensityMatrix, sigma: Option<&DensityMatrix>) -> Result<StateMetrics> {
    let ev = eigvalsh(rho.matrix())?;
    let entropy = -ev.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>();
    let lambda_max = *ev.last().expect("non-empty spectrum");
    let (trace_distance, hs_distance) = match sigma {
        None => (None, None),
        Some(s) => {
            if s.dim() != rho.dim() {
                return Err(Error::DimensionMismatch { expected: rho.dim(), got: s.dim() });
            }
            (Some(trace_distance(rho.matrix(), s.matrix())?), Some(hs_distance(rho.matrix(), s.matrix())))
        }
    };
    Ok(StateMetrics { purity: rho.purity(), entropy, lambda_max, trace_distance, hs_distance })
}

/// `½ Tr|A − B|`.
pub fn trace_distance(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Result<f64> {
    let diff = a - b;
    Ok(0.5 * eigvalsh(diff.as_ref())?.iter().map(|x| x.abs()).sum::<f64>())
}

pub fn hs_distance(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            s += (a[(i, j)] - b[(i, j)]).norm_sqr();
        }
    }
    s.sqrt()
}

/// Hermitian logarithm with eigenvalues clamped at `floor`; returns the
/// logarithm and the trace change the clamp caused.
pub fn matrix_log(m: MatRef<'_, c64>, floor: f64) -> Result<(CMat, f64)> {
    let spec = SpectralDecomposition::new(m)?;
    let shift: f64 = spec.eigenvalues.iter().map(|&x| (x.max(floor) - x).abs()).sum();
    Ok((spec.reconstruct_with(|x| x.max(floor).ln()), shift))
}
