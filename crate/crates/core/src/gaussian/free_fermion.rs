//! Nearest-neighbour hopping on the infinite square and cubic lattices,
//! `H = −Σ_⟨rr'⟩ (c†_r c_r' + h.c.) − μ Σ n_r`, dispersion `ε_k = −2 Σ_a cos k_a`.
//!
//! `Λ(Δ) = π^{−D} ∫_{[0,π]^D} Π_a cos(k_a Δ_a) n(ε_k − μ) d^D k`.

use std::f64::consts::PI;

use faer::Mat;

use super::{NumberCorrelation, Temperature};
use crate::error::{Error, Result};
use crate::linalg::{c64, settle};
use crate::quadrature::GaussLegendre;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermiSea {
    pub dimension: usize,
    pub chemical_potential: f64,
    pub temperature: Temperature,
}

impl FermiSea {
    fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.dimension) {
            return Err(Error::InvalidArgument(format!("dimension must be 2 or 3, got {}", self.dimension)));
        }
        if !self.chemical_potential.is_finite() {
            return Err(Error::InvalidArgument("chemical potential must be finite".into()));
        }
        self.temperature.validate()
    }
}

const GATE_START: usize = 256;
const GATE_TOL: f64 = 1e-10;

/// `Λ(Δ)` for all offsets with `|Δ_a| ≤ max_offset`; by reflection symmetry
/// only non-negative offsets are stored.
#[derive(Debug, Clone)]
pub struct FreeFermionTable {
    dimension: usize,
    span: usize,
    values: Vec<f64>,
}

impl FreeFermionTable {
    pub fn compute(sea: FermiSea, max_offset: usize) -> Result<Self> {
        sea.validate()?;
        let span = max_offset + 1;
        let max_nodes = if sea.dimension == 2 { 4096 } else { 1024 };
        let mut nodes = GATE_START;
        let mut prev = evaluate(&sea, span, nodes);
        loop {
            let next = evaluate(&sea, span, 2 * nodes);
            let change = prev.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if change <= GATE_TOL {
                return Ok(Self { dimension: sea.dimension, span, values: next });
            }
            nodes *= 2;
            if nodes >= max_nodes {
                return Err(Error::QuadratureNotConverged { nodes, change });
            }
            prev = next;
        }
    }

    pub fn get(&self, offset: &[i64]) -> Result<f64> {
        if offset.len() != self.dimension {
            return Err(Error::DimensionMismatch { expected: self.dimension, got: offset.len() });
        }
        let mut idx = 0;
        for &o in offset {
            let a = o.unsigned_abs() as usize;
            if a >= self.span {
                return Err(Error::InvalidArgument(format!("offset {o} beyond tabulated range {}", self.span - 1)));
            }
            idx = idx * self.span + a;
        }
        Ok(self.values[idx])
    }
}

/// Smoothstep-substituted Gauss–Legendre on each piece between sorted
/// breakpoints; square-root endpoint behaviour becomes analytic.
fn piecewise_rule(breaks: &[f64], rule: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(rule.len() * (breaks.len() - 1));
    for piece in breaks.windows(2) {
        let (a, b) = (piece[0], piece[1]);
        if b - a <= 1e-15 {
            continue;
        }
        for &(t, w) in rule {
            let x = a + (b - a) * t * t * (3.0 - 2.0 * t);
            let jac = (b - a) * 6.0 * t * (1.0 - t);
            out.push((x, w * jac));
        }
    }
    out
}

fn breakpoints(cosines: &[f64]) -> Vec<f64> {
    let mut b = vec![0.0, PI];
    for &c in cosines {
        if c > -1.0 && c < 1.0 {
            b.push(c.acos());
        }
    }
    b.sort_by(|x, y| x.total_cmp(y));
    b.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
    b
}

/// `∫₀^a cos(k Δ) dk`.
fn cos_integral(a: f64, delta: usize) -> f64 {
    if delta == 0 {
        a
    } else {
        (a * delta as f64).sin() / delta as f64
    }
}

/// Upper limit of the occupied interval of the last momentum component.
fn fermi_edge(u: f64) -> f64 {
    u.clamp(-1.0, 1.0).acos()
}

fn cos_table(rule: &[(f64, f64)], span: usize) -> Mat<f64> {
    filled(span, rule.len(), |d, i| rule[i].1 * (rule[i].0 * d as f64).cos())
}

// `Mat::from_fn` defeats inlining of transcendental kernels here
fn filled(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Mat<f64> {
    let mut m = Mat::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = f(i, j);
        }
    }
    m
}

fn evaluate(sea: &FermiSea, span: usize, nodes: usize) -> Vec<f64> {
    let mu = sea.chemical_potential;
    let unit = GaussLegendre::new(nodes).on_interval(0.0, 1.0);
    match (sea.temperature, sea.dimension) {
        (Temperature::Beta(beta), dim) => {
            let rule = GaussLegendre::new(nodes).on_interval(0.0, PI);
            let c = cos_table(&rule, span);
            let fermi = |e: f64| {
                let x = beta * (e - mu);
                if x > 0.0 {
                    let t = (-x).exp();
                    t / (1.0 + t)
                } else {
                    1.0 / (1.0 + x.exp())
                }
            };
            let cosk: Vec<f64> = rule.iter().map(|r| r.0.cos()).collect();
            let n = rule.len();
            if dim == 2 {
                let occ = filled(n, n, |i, j| fermi(-2.0 * (cosk[i] + cosk[j])));
                let lam = &c * &occ * c.transpose();
                settle();
                (0..span * span).map(|k| lam[(k / span, k % span)] / (PI * PI)).collect()
            } else {
                let mut out = vec![0.0; span * span * span];
                for i in 0..n {
                    let slice = filled(n, n, |j, k| fermi(-2.0 * (cosk[i] + cosk[j] + cosk[k])));
                    let r = &c * &slice * c.transpose();
                    settle();
                    accumulate_axis(&mut out, span, |a| c[(a, i)], &r);
                }
                out.iter().map(|v| v / PI.powi(3)).collect()
            }
        }
        (Temperature::Zero, 2) => {
            // cos k_y > −μ/2 − cos k_x
            let rule = piecewise_rule(&breakpoints(&[-mu / 2.0 - 1.0, -mu / 2.0 + 1.0]), &unit);
            let c = cos_table(&rule, span);
            let inner = filled(rule.len(), span, |i, d| cos_integral(fermi_edge(-mu / 2.0 - rule[i].0.cos()), d));
            let lam = &c * &inner;
            settle();
            (0..span * span).map(|k| lam[(k / span, k % span)] / (PI * PI)).collect()
        }
        (Temperature::Zero, _) => {
            let outer = piecewise_rule(&breakpoints(&[-mu / 2.0 - 2.0, -mu / 2.0, -mu / 2.0 + 2.0]), &unit);
            let mut out = vec![0.0; span * span * span];
            for &(kx, wx) in &outer {
                let shift = -mu / 2.0 - kx.cos();
                let rule = piecewise_rule(&breakpoints(&[shift - 1.0, shift + 1.0]), &unit);
                let c = cos_table(&rule, span);
                let inner = filled(rule.len(), span, |j, d| cos_integral(fermi_edge(shift - rule[j].0.cos()), d));
                let v = &c * &inner;
                settle();
                accumulate_axis(&mut out, span, |a| wx * (kx * a as f64).cos(), &v);
            }
            out.iter().map(|v| v / PI.powi(3)).collect()
        }
    }
}

/// `out[a][b][d] += weight(a) · r[b][d]`.
fn accumulate_axis(out: &mut [f64], span: usize, weight: impl Fn(usize) -> f64, r: &Mat<f64>) {
    for a in 0..span {
        let wa = weight(a);
        for b in 0..span {
            for d in 0..span {
                out[(a * span + b) * span + d] += wa * r[(b, d)];
            }
        }
    }
}

/// Sites within lattice distance `radius` of the origin, origin first, then
/// by distance and lexicographically.
pub fn diamond_region(dimension: usize, radius: usize) -> Vec<Vec<i64>> {
    let r = radius as i64;
    let mut sites = Vec::new();
    let mut push = |p: Vec<i64>| {
        if p.iter().map(|x| x.abs()).sum::<i64>() <= r {
            sites.push(p);
        }
    };
    for x in -r..=r {
        for y in -r..=r {
            if dimension == 2 {
                push(vec![x, y]);
            } else {
                for z in -r..=r {
                    push(vec![x, y, z]);
                }
            }
        }
    }
    sites.sort_by_key(|p| (p.iter().map(|x| x.abs()).sum::<i64>(), p.clone()));
    sites
}

/// `Λ` restricted to `region`, rows and columns in the given order.
pub fn free_fermion_correlation(sea: FermiSea, region: &[Vec<i64>]) -> Result<NumberCorrelation> {
    sea.validate()?;
    if let Some(p) = region.iter().find(|p| p.len() != sea.dimension) {
        return Err(Error::DimensionMismatch { expected: sea.dimension, got: p.len() });
    }
    let mut max_offset = 0;
    for p in region {
        for q in region {
            for (a, b) in p.iter().zip(q) {
                max_offset = max_offset.max((a - b).unsigned_abs() as usize);
            }
        }
    }
    let table = FreeFermionTable::compute(sea, max_offset)?;
    correlation_from_table(&table, region)
}

pub fn correlation_from_table(table: &FreeFermionTable, region: &[Vec<i64>]) -> Result<NumberCorrelation> {
    let n = region.len();
    let mut m = Mat::zeros(n, n);
    let mut offset = vec![0i64; table.dimension];
    for i in 0..n {
        for j in 0..n {
            for (k, o) in offset.iter_mut().enumerate() {
                *o = region[i][k] - region[j][k];
            }
            m[(i, j)] = c64::new(table.get(&offset)?, 0.0);
        }
    }
    NumberCorrelation::new(m)
}
