//! Dense density matrices for few-mode Majorana correlations, and back.

use faer::Mat;

use super::MajoranaCorrelation;
use crate::densop::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{c64, eigh, identity, matmul, trace_product, CMat};
use crate::pauli::{Pauli, PauliString};

pub const BRIDGE_MAX_MODES: usize = 6;

/// `w_{2l} = X_0⋯X_{l−1} Z_l` and `w_{2l+1} = X_0⋯X_{l−1} Y_l`.
pub fn majorana_operators(modes: usize) -> Result<Vec<CMat>> {
    if modes > BRIDGE_MAX_MODES {
        return Err(Error::DimensionLimit { sites: modes, limit: BRIDGE_MAX_MODES });
    }
    let mut out = Vec::with_capacity(2 * modes);
    for l in 0..modes {
        for last in [Pauli::Z, Pauli::Y] {
            let mut letters = vec![Pauli::I; modes];
            letters[..l].fill(Pauli::X);
            letters[l] = last;
            out.push(PauliString::new(letters).to_dense()?);
        }
    }
    Ok(out)
}

/// Real orthonormal pairs `(x_b, y_b)` spanning the mode planes of `M`.
fn mode_frame(m: &MajoranaCorrelation) -> Result<Vec<[Vec<f64>; 2]>> {
    let dim = m.matrix().nrows();
    let e = eigh(m.matrix())?;
    if let Some(v) = e.values.iter().find(|v| v.abs() > 1.0 + 1e-9) {
        return Err(Error::NotAValidCorrelation(format!("eigenvalue {v} outside [-1, 1]")));
    }
    const NULL_TOL: f64 = 1e-10;
    let mut planes = Vec::new();
    let mut null_real: Vec<Vec<f64>> = Vec::new();
    for (k, &v) in e.values.iter().enumerate() {
        let col: Vec<c64> = (0..dim).map(|i| e.vectors[(i, k)]).collect();
        if v > NULL_TOL {
            let s = std::f64::consts::SQRT_2;
            planes.push([col.iter().map(|z| s * z.re).collect(), col.iter().map(|z| s * z.im).collect()]);
        } else if v.abs() <= NULL_TOL {
            null_real.push(col.iter().map(|z| z.re).collect());
            null_real.push(col.iter().map(|z| z.im).collect());
        }
    }
    // real orthonormal basis of the (real) null space
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for mut v in null_real {
        for b in planes.iter().flatten().chain(basis.iter()) {
            let d: f64 = v.iter().zip(b).map(|(a, c)| a * c).sum();
            v.iter_mut().zip(b).for_each(|(a, c)| *a -= d * c);
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-6 {
            basis.push(v.into_iter().map(|a| a / norm).collect());
        }
    }
    if 2 * planes.len() + basis.len() != dim {
        return Err(Error::NotAValidCorrelation("spectrum does not pair into ±ν".into()));
    }
    let mut it = basis.into_iter();
    while let (Some(x), Some(y)) = (it.next(), it.next()) {
        planes.push([x, y]);
    }
    Ok(planes)
}

/// The unique Gaussian state with correlation `M`, on at most
/// [`BRIDGE_MAX_MODES`] modes.
pub fn gaussian_to_dense(m: &MajoranaCorrelation) -> Result<DensityMatrix> {
    let modes = m.modes();
    let ws = majorana_operators(modes)?;
    let dim = 1usize << modes;
    let rotate = |coef: &[f64]| -> CMat {
        let mut acc: CMat = Mat::zeros(dim, dim);
        for (w, &c) in ws.iter().zip(coef) {
            if c != 0.0 {
                acc += w * faer::Scale(c64::new(c, 0.0));
            }
        }
        acc
    };
    let mut rho = identity(dim);
    for [x, y] in mode_frame(m)? {
        // ⟨i w̃_x w̃_y⟩ = i xᵀ M y
        let mut mxy = c64::new(0.0, 0.0);
        for i in 0..2 * modes {
            for j in 0..2 * modes {
                mxy += m.matrix()[(i, j)] * (x[i] * y[j]);
            }
        }
        let occ = (c64::new(0.0, 1.0) * mxy).re;
        let wx = rotate(&x);
        let wy = rotate(&y);
        let mode_op = matmul(wx.as_ref(), wy.as_ref()) * faer::Scale(c64::new(0.0, 1.0));
        let factor = identity(dim) + mode_op * faer::Scale(c64::new(occ, 0.0));
        rho = matmul(rho.as_ref(), factor.as_ref());
    }
    rho *= faer::Scale(c64::new(1.0 / dim as f64, 0.0));
    DensityMatrix::new(crate::linalg::hermitize(rho.as_ref()), (0..modes).collect())
}

/// `M_ij = Tr[ρ w_i w_j]` for `i ≠ j`.
pub fn majorana_from_dense(rho: &DensityMatrix) -> Result<MajoranaCorrelation> {
    let modes = rho.n_sites();
    let ws = majorana_operators(modes)?;
    let dim = 2 * modes;
    let mut m = Mat::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                let prod = matmul(ws[i].as_ref(), ws[j].as_ref());
                m[(i, j)] = trace_product(rho.matrix(), prod.as_ref());
            }
        }
    }
    MajoranaCorrelation::new(crate::linalg::hermitize(m.as_ref()))
}
