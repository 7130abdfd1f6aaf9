//! Thin helpers over faer. Most states in this crate are real symmetric
//! (TFI Gibbs states, Pauli channels of them), so eigendecompositions and
//! products check for a vanishing imaginary part and drop to f64 kernels.

use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};

pub use faer::c64;

pub type CMat = Mat<c64>;

/// faer's SIMD kernels can leave the upper vector lanes dirty, after which
/// every legacy-SSE instruction (most of this crate and libm) pays a
/// state-transition penalty; measured at roughly 20x on scalar loops.
#[inline]
pub(crate) fn settle() {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("avx") {
            // SAFETY: AVX availability was checked at runtime.
            unsafe { std::arch::x86_64::_mm256_zeroupper() };
        }
    }
}

pub fn is_real(m: MatRef<'_, c64>) -> bool {
    (0..m.ncols()).all(|j| (0..m.nrows()).all(|i| m[(i, j)].im == 0.0))
}

fn real_part(m: MatRef<'_, c64>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re)
}

fn complexify(m: MatRef<'_, f64>) -> CMat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| c64::new(m[(i, j)], 0.0))
}

pub fn identity(dim: usize) -> CMat {
    Mat::from_fn(dim, dim, |i, j| if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) })
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    Mat::zeros(rows, cols)
}

pub fn matmul(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> CMat {
    if is_real(a) && is_real(b) {
        let prod = real_part(a) * real_part(b);
        settle();
        complexify(prod.as_ref())
    } else {
        let prod = a * b;
        settle();
        prod
    }
}

/// `A · B†`.
pub fn matmul_adjoint(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> CMat {
    if is_real(a) && is_real(b) {
        let prod = real_part(a) * real_part(b).transpose();
        settle();
        complexify(prod.as_ref())
    } else {
        let prod = a * b.adjoint();
        settle();
        prod
    }
}

/// `A† · B`.
pub fn adjoint_matmul(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> CMat {
    if is_real(a) && is_real(b) {
        let prod = real_part(a).transpose() * real_part(b);
        settle();
        complexify(prod.as_ref())
    } else {
        let prod = a.adjoint() * b;
        settle();
        prod
    }
}

pub fn trace(m: MatRef<'_, c64>) -> c64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

/// `Tr[A B]` without forming the product.
pub fn trace_product(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> c64 {
    let mut acc = c64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub fn hermitian_defect(m: MatRef<'_, c64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..=j.min(m.nrows().saturating_sub(1)) {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitize(m: MatRef<'_, c64>) -> CMat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

pub fn max_abs_diff(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

pub fn kron(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> CMat {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    Mat::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Hermitian eigendecomposition, eigenvalues ascending.
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

pub fn eigh(m: MatRef<'_, c64>) -> Result<Eigh> {
    let h = hermitize(m);
    if is_real(h.as_ref()) {
        let r = real_part(h.as_ref());
        let evd = r.self_adjoint_eigen(Side::Lower).map_err(|_| Error::Eigensolver)?;
        settle();
        let values = (0..r.nrows()).map(|i| evd.S()[i]).collect();
        Ok(Eigh { values, vectors: complexify(evd.U()) })
    } else {
        let evd = h.self_adjoint_eigen(Side::Lower).map_err(|_| Error::Eigensolver)?;
        settle();
        let values = (0..h.nrows()).map(|i| evd.S()[i].re).collect();
        Ok(Eigh { values, vectors: evd.U().to_owned() })
    }
}

pub fn eigvalsh(m: MatRef<'_, c64>) -> Result<Vec<f64>> {
    let h = hermitize(m);
    let mut values: Vec<f64> = if is_real(h.as_ref()) {
        real_part(h.as_ref())
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|_| Error::Eigensolver)?
    } else {
        h.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::Eigensolver)?
    };
    settle();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// `U diag(w) U†`.
pub fn reconstruct(vectors: MatRef<'_, c64>, weights: &[f64]) -> CMat {
    let scaled = Mat::from_fn(vectors.nrows(), vectors.ncols(), |i, j| vectors[(i, j)] * weights[j]);
    matmul_adjoint(scaled.as_ref(), vectors)
}

/// Apply a real function to the spectrum of a Hermitian matrix.
pub fn spectral_map(m: MatRef<'_, c64>, f: impl Fn(f64) -> f64) -> Result<CMat> {
    let e = eigh(m)?;
    let w: Vec<f64> = e.values.iter().map(|&x| f(x)).collect();
    Ok(reconstruct(e.vectors.as_ref(), &w))
}

/// `log |det A|` and the phase of `det A`, from the LU diagonal.
pub fn log_det(m: MatRef<'_, c64>) -> (f64, c64) {
    let lu = m.partial_piv_lu();
    settle();
    let u = lu.U();
    let mut log_abs = 0.0;
    let mut phase = c64::new(1.0, 0.0);
    for i in 0..u.nrows() {
        let d = u[(i, i)];
        let r = d.norm();
        if r == 0.0 {
            return (f64::NEG_INFINITY, c64::new(0.0, 0.0));
        }
        log_abs += r.ln();
        phase *= d / r;
    }
    let perm = lu.P();
    let fwd = perm.arrays().0;
    let mut seen = vec![false; fwd.len()];
    let mut transpositions = 0usize;
    for start in 0..fwd.len() {
        let mut k = start;
        let mut len = 0;
        while !seen[k] {
            seen[k] = true;
            k = fwd[k];
            len += 1;
        }
        if len > 0 {
            transpositions += len - 1;
        }
    }
    if transpositions % 2 == 1 {
        phase = -phase;
    }
    (log_abs, phase)
}
