//! Noise channels: global depolarizing, and single-qubit depolarizing or
//! dephasing applied to every qubit.

use faer::Mat;

use crate::densop::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::c64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    GlobalDepolarizing,
    LocalDepolarizing,
    LocalDephasing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    kind: NoiseKind,
    p: f64,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidRate(p));
        }
        Ok(Self { kind, p })
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn rate(&self) -> f64 {
        self.p
    }
}

pub fn apply_channel(rho: &DensityMatrix, model: &NoiseModel) -> DensityMatrix {
    if model.p == 0.0 {
        return rho.clone();
    }
    let n = rho.n_sites();
    match model.kind {
        NoiseKind::GlobalDepolarizing => global_depolarizing(rho, model.p),
        NoiseKind::LocalDepolarizing => apply_on_qubits(rho, model.p, (0..n).collect(), depolarize_qubit),
        NoiseKind::LocalDephasing => apply_on_qubits(rho, model.p, (0..n).collect(), dephase_qubit),
    }
}

/// Apply the single-qubit channel of `model` on register positions `order`
/// one after another (position 0 is `rho.sites()[0]`).
pub fn apply_local_in_order(rho: &DensityMatrix, model: &NoiseModel, order: &[usize]) -> Result<DensityMatrix> {
    if let Some(&k) = order.iter().find(|&&k| k >= rho.n_sites()) {
        return Err(Error::SiteNotPresent(k));
    }
    let f = match model.kind {
        NoiseKind::GlobalDepolarizing => {
            return Err(Error::InvalidArgument("global depolarizing has no per-qubit form".into()))
        }
        NoiseKind::LocalDepolarizing => depolarize_qubit,
        NoiseKind::LocalDephasing => dephase_qubit,
    };
    Ok(apply_on_qubits(rho, model.p, order.to_vec(), f))
}

type QubitChannel = fn(&Mat<c64>, usize, f64) -> Mat<c64>;

fn apply_on_qubits(rho: &DensityMatrix, p: f64, positions: Vec<usize>, f: QubitChannel) -> DensityMatrix {
    let n = rho.n_sites();
    let mut m = rho.matrix().to_owned();
    for pos in positions {
        let mask = 1usize << (n - 1 - pos);
        m = f(&m, mask, p);
    }
    DensityMatrix::from_parts(m, rho.sites().to_vec())
}

fn global_depolarizing(rho: &DensityMatrix, p: f64) -> DensityMatrix {
    let dim = rho.dim();
    let w = p / dim as f64;
    let m = rho.matrix();
    let out = Mat::from_fn(dim, dim, |i, j| {
        let v = m[(i, j)] * (1.0 - p);
        if i == j {
            v + w
        } else {
            v
        }
    });
    DensityMatrix::from_parts(out, rho.sites().to_vec())
}

fn sign(i: usize, mask: usize) -> f64 {
    if i & mask == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(1-p)ρ + (p/3)(XρX + YρY + ZρZ)` on the qubit selected by `mask`.
fn depolarize_qubit(m: &Mat<c64>, mask: usize, p: f64) -> Mat<c64> {
    let dim = m.nrows();
    Mat::from_fn(dim, dim, |i, j| {
        let ss = sign(i, mask) * sign(j, mask);
        let flipped = m[(i ^ mask, j ^ mask)];
        m[(i, j)] * (1.0 - p) + (flipped * (1.0 + ss) + m[(i, j)] * ss) * (p / 3.0)
    })
}

/// `(1-p)ρ + p ZρZ` on the qubit selected by `mask`.
fn dephase_qubit(m: &Mat<c64>, mask: usize, p: f64) -> Mat<c64> {
    let dim = m.nrows();
    Mat::from_fn(dim, dim, |i, j| {
        let ss = sign(i, mask) * sign(j, mask);
        m[(i, j)] * (1.0 - p + p * ss)
    })
}
