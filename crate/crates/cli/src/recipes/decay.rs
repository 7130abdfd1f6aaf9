//! Distance between LVP and FVP subsystem states against the buffer width,
//! for the critical TFI chain and for 2D/3D Fermi seas, with fits.

use rayon::prelude::*;
use vpure::fit::{exponential_fit, power_law_fit, TRANSIENT_POINTS};
use vpure::gaussian::{
    correlation_from_table, diamond_region, gaussian_purity_overlap, mode_trace_distance, purification_map,
    tfi_majorana_correlation, FermiSea, FreeFermionTable, NumberCorrelation, SystemSize, Temperature,
};
use vpure::linalg::{c64, CMat};

use super::Outcome;
use crate::config::{BufferRange, DecayStudy, ExperimentConfig};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, PlotSpec, Table};

const CRITICAL_FIELD: f64 = 1.0;

#[derive(Debug, Clone, Copy)]
struct Curve {
    study: DecayStudy,
    dimension: usize,
    mu: Option<f64>,
    temperature: Temperature,
    support: usize,
    buffers: BufferRange,
}

impl Curve {
    fn beta(&self) -> f64 {
        match self.temperature {
            Temperature::Zero => f64::INFINITY,
            Temperature::Beta(b) => b,
        }
    }

    fn key(&self, n: u32) -> Vec<Cell> {
        vec![
            Cell::text(self.study.name()),
            self.dimension.into(),
            self.mu.map(Cell::Float).unwrap_or_else(|| Cell::text("")),
            self.beta().into(),
            self.support.into(),
            n.into(),
        ]
    }
}

fn curves(config: &ExperimentConfig) -> Vec<Curve> {
    let dc = &config.decay;
    let mut out = Vec::new();
    for study in &dc.studies {
        match study {
            DecayStudy::Critical1d => out.extend(dc.supports.iter().map(|&support| Curve {
                study: *study,
                dimension: 1,
                mu: None,
                temperature: Temperature::Zero,
                support,
                buffers: dc.critical_buffers,
            })),
            DecayStudy::FermiGround => out.extend(dc.ground_potentials.iter().map(|&mu| Curve {
                study: *study,
                dimension: 2,
                mu: Some(mu),
                temperature: Temperature::Zero,
                support: 1,
                buffers: dc.ground_buffers,
            })),
            DecayStudy::FermiThermal => {
                for &dimension in &dc.thermal_dimensions {
                    for &beta in &dc.thermal_betas {
                        out.push(Curve {
                            study: *study,
                            dimension,
                            mu: Some(dc.thermal_potential),
                            temperature: Temperature::Beta(beta),
                            support: 1,
                            buffers: if dimension == 2 { dc.thermal_buffers_2d } else { dc.thermal_buffers_3d },
                        });
                    }
                }
            }
        }
    }
    out
}

/// HS distance between the LVP and FVP states of the central `N_A` sites
/// of a critical ground state; the FVP state of a pure state is the state.
fn critical_curve(curve: &Curve, n: u32) -> CliResult<Vec<(usize, f64)>> {
    let na = curve.support;
    let longest = na + 2 * curve.buffers.to;
    let full = tfi_majorana_correlation(Temperature::Zero, CRITICAL_FIELD, longest, SystemSize::Infinite)?;
    curve
        .buffers
        .widths()
        .map(|d| {
            let window: Vec<usize> = (0..na + 2 * d).collect();
            let block: Vec<usize> = (d..d + na).collect();
            let local = full.restrict(&window);
            let lvp = purification_map(&local, n)?.restrict(&block);
            let fvp = local.restrict(&block);
            let metrics = gaussian_purity_overlap(&lvp, Some(&fvp))?;
            let distance = metrics.hs_distance.expect("overlap requested");
            Ok((d, distance))
        })
        .collect()
}

/// Single-site trace distance on a diamond of radius `d` around the origin.
/// The FVP reference is the site occupation at `nβ` (the state itself at
/// zero temperature).
fn fermi_curve(curve: &Curve, n: u32) -> CliResult<Vec<(usize, f64)>> {
    let mu = curve.mu.expect("Fermi curves carry a chemical potential");
    let sea = FermiSea { dimension: curve.dimension, chemical_potential: mu, temperature: curve.temperature };
    let table = FreeFermionTable::compute(sea, 2 * curve.buffers.to)?;
    let origin = vec![0i64; curve.dimension];
    let fvp_density = match curve.temperature {
        Temperature::Zero => table.get(&origin)?,
        Temperature::Beta(b) => {
            let cooled = FermiSea { temperature: Temperature::Beta(n as f64 * b), ..sea };
            FreeFermionTable::compute(cooled, 0)?.get(&origin)?
        }
    };
    let fvp = NumberCorrelation::new(scalar(fvp_density))?;
    curve
        .buffers
        .widths()
        .map(|d| {
            let region = correlation_from_table(&table, &diamond_region(curve.dimension, d))?;
            let lvp = purification_map(&region, n)?.restrict(&[0]);
            Ok((d, mode_trace_distance(&lvp, &fvp)?))
        })
        .collect()
}

fn scalar(x: f64) -> CMat {
    CMat::from_fn(1, 1, |_, _| c64::new(x, 0.0))
}

const CURVE_COLUMNS: [&str; 8] = ["study", "dimension", "mu", "beta", "n_a", "n", "d", "distance"];
const FIT_COLUMNS: [&str; 12] =
    ["study", "dimension", "mu", "beta", "n_a", "n", "fit", "parameter", "prefactor", "r_squared", "d_from", "d_to"];

pub fn run(config: &ExperimentConfig) -> CliResult<Outcome> {
    let n = config.protocol.copies;
    let all = curves(config);
    if all.is_empty() {
        return Err(CliError::config("decay.studies", "no curves selected"));
    }
    let results: Vec<Vec<(usize, f64)>> = all
        .par_iter()
        .map(|c| match c.study {
            DecayStudy::Critical1d => critical_curve(c, n),
            DecayStudy::FermiGround | DecayStudy::FermiThermal => fermi_curve(c, n),
        })
        .collect::<CliResult<_>>()?;

    let mut points = Table::new("", &CURVE_COLUMNS).with_plot(PlotSpec {
        x: "d",
        y: "distance",
        series: vec!["study", "dimension", "mu", "beta", "n_a"],
        log_x: false,
        log_y: true,
    });
    let mut fits = Table::new("fits", &FIT_COLUMNS);
    let mut summary = Vec::new();
    for (curve, pts) in all.iter().zip(&results) {
        for &(d, distance) in pts {
            let mut row = curve.key(n);
            row.extend([d.into(), distance.into()]);
            points.push(row);
        }
        let xs: Vec<f64> = pts.iter().map(|p| p.0 as f64).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let (kind, parameter, prefactor, r2) = match curve.temperature {
            Temperature::Zero => {
                let f = power_law_fit(&xs, &ys)?;
                ("power-law", f.exponent, f.prefactor, f.r_squared)
            }
            Temperature::Beta(_) => {
                let f = exponential_fit(&xs, &ys)?;
                ("exponential", f.correlation_length, f.prefactor, f.r_squared)
            }
        };
        let d_from = curve.buffers.from + TRANSIENT_POINTS;
        summary.push(format!(
            "{} dim={} mu={:?} beta={} n_a={}: {kind} parameter {parameter:.4}, R^2 {r2:.4}",
            curve.study.name(),
            curve.dimension,
            curve.mu,
            curve.beta(),
            curve.support
        ));
        let mut row = curve.key(n);
        row.extend([
            Cell::text(kind),
            parameter.into(),
            prefactor.into(),
            r2.into(),
            d_from.into(),
            curve.buffers.to.into(),
        ]);
        fits.push(row);
    }
    let keys = ["study", "dimension", "mu", "beta", "n_a"];
    points.sort_by(&[&keys[..], &["d"]].concat());
    fits.sort_by(&keys);
    Ok(Outcome { tables: vec![points, fits], summary, checks: None })
}
