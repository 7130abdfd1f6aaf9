//! `mitigate` (noisy ground state) and `unified` (noisy Gibbs state): FVP
//! and LVP estimates of `⟨H⟩` over a grid of error rates and buffers.

use rayon::prelude::*;
use vpure::channels::{apply_channel, NoiseModel};
use vpure::densop::{expectation, gibbs_state, ground_state_projector, trace_distance, DEFAULT_GAP_TOL};
use vpure::estimator::{lvp_term_costs, purified_marginal, PurifiedRegister, VarianceCost};
use vpure::{DensityMatrix, Hamiltonian, HamiltonianTerm, Lattice};

use super::Outcome;
use crate::config::{ExperimentConfig, Recipe};
use crate::error::CliResult;
use crate::output::{Cell, PlotSpec, Table};

#[derive(Debug, Clone, Copy)]
enum Input {
    Ground,
    Gibbs,
}

#[derive(Debug, Clone, Copy)]
struct Point {
    d: usize,
    energy_lvp: f64,
    cost_lvp: f64,
    trace_distance_a: f64,
}

#[derive(Debug, Clone)]
struct SweepCell {
    sites: usize,
    rate: f64,
    energy_exact: f64,
    energy_noisy: f64,
    energy_fvp: f64,
    energy_fvp_noiseless: f64,
    cost_fvp: f64,
    points: Vec<Point>,
}

struct System {
    lattice: Lattice,
    hamiltonian: Hamiltonian,
    state: DensityMatrix,
    energy_exact: f64,
    energy_fvp_noiseless: f64,
    /// Support of the bond `Z_0 Z_1`, the region A of the trace-distance column.
    probe: Vec<usize>,
}

fn energy(terms: &[HamiltonianTerm], costs: &[VarianceCost]) -> f64 {
    terms.iter().zip(costs).map(|(t, c)| t.coefficient * c.ratio()).sum()
}

fn build_system(config: &ExperimentConfig, sites: usize, input: Input) -> CliResult<System> {
    let lattice = Lattice::chain(sites, true)?;
    let hamiltonian = Hamiltonian::transverse_field_ising(&lattice, config.model.field)?;
    let state = match input {
        Input::Ground => ground_state_projector(&hamiltonian, DEFAULT_GAP_TOL)?,
        Input::Gibbs => gibbs_state(&hamiltonian, config.model.beta)?,
    };
    let energy_exact = expectation(&state, &hamiltonian)?;
    let energy_fvp_noiseless = match input {
        Input::Ground => energy_exact,
        Input::Gibbs => PurifiedRegister::new(&state, config.protocol.copies)?.value(&hamiltonian)?,
    };
    Ok(System { lattice, hamiltonian, state, energy_exact, energy_fvp_noiseless, probe: vec![0, 1] })
}

fn sweep_cell(config: &ExperimentConfig, system: &System, rate: f64) -> CliResult<SweepCell> {
    let n = config.protocol.copies;
    let terms = system.hamiltonian.terms();
    let noisy = apply_channel(&system.state, &NoiseModel::new(config.protocol.noise.kind(), rate)?);
    let full = PurifiedRegister::new(&noisy, n)?;
    let fvp: Vec<VarianceCost> = terms.iter().map(|t| full.moments(&t.pauli)).collect::<vpure::Result<_>>()?;
    let fvp_marginal = full.marginal(&system.probe)?;
    let cost_fvp = 2.0 / full.norm().powi(2);
    drop(full);
    let points = config
        .protocol
        .buffers
        .iter()
        .map(|&d| {
            let lvp = lvp_term_costs(&noisy, terms, &system.lattice, d, n)?;
            let window = system.lattice.partition(&system.probe, d)?.window();
            let lvp_marginal = purified_marginal(&noisy, &window, &system.probe, n)?;
            Ok(Point {
                d,
                energy_lvp: energy(terms, &lvp),
                cost_lvp: lvp.iter().map(|c| c.cost).fold(0.0, f64::max),
                trace_distance_a: trace_distance(lvp_marginal.matrix(), fvp_marginal.matrix())?,
            })
        })
        .collect::<CliResult<_>>()?;
    Ok(SweepCell {
        sites: system.lattice.n_sites(),
        rate,
        energy_exact: system.energy_exact,
        energy_noisy: expectation(&noisy, &system.hamiltonian)?,
        energy_fvp: energy(terms, &fvp),
        energy_fvp_noiseless: system.energy_fvp_noiseless,
        cost_fvp,
        points,
    })
}

fn sweep(config: &ExperimentConfig, input: Input) -> CliResult<Vec<SweepCell>> {
    let mut cells = Vec::new();
    for &sites in &config.model.sites {
        let system = build_system(config, sites, input)?;
        let mut row: Vec<SweepCell> =
            config.protocol.rates.par_iter().map(|&p| sweep_cell(config, &system, p)).collect::<CliResult<_>>()?;
        cells.append(&mut row);
    }
    Ok(cells)
}

const MITIGATE_COLUMNS: [&str; 15] = [
    "N",
    "p",
    "d",
    "energy_exact",
    "energy_noisy",
    "energy_fvp",
    "energy_lvp",
    "deviation",
    "cost_fvp",
    "cost_lvp",
    "trace_distance_a",
    "backend",
    "noise",
    "lambda",
    "n",
];

pub fn run_mitigate(config: &ExperimentConfig) -> CliResult<Outcome> {
    let cells = sweep(config, Input::Ground)?;
    let mut table = Table::new("", &MITIGATE_COLUMNS).with_plot(PlotSpec {
        x: "d",
        y: "deviation",
        series: vec!["N", "p"],
        log_x: false,
        log_y: false,
    });
    for c in &cells {
        for pt in &c.points {
            table.push(vec![
                c.sites.into(),
                c.rate.into(),
                pt.d.into(),
                c.energy_exact.into(),
                c.energy_noisy.into(),
                c.energy_fvp.into(),
                pt.energy_lvp.into(),
                (pt.energy_lvp - c.energy_fvp).into(),
                c.cost_fvp.into(),
                pt.cost_lvp.into(),
                pt.trace_distance_a.into(),
                Cell::text("dense"),
                Cell::text(config.protocol.noise.name()),
                config.model.field.into(),
                config.protocol.copies.into(),
            ]);
        }
    }
    table.sort_by(&["N", "p", "d"]);
    Ok(Outcome { summary: vec![summary(Recipe::Mitigate, &table)], tables: vec![table], checks: None })
}

const UNIFIED_COLUMNS: [&str; 13] = [
    "N",
    "p",
    "d",
    "energy_lvp",
    "energy_fvp_noisy",
    "energy_fvp_noiseless",
    "abs_deviation",
    "energy_input",
    "backend",
    "noise",
    "lambda",
    "beta",
    "n",
];

pub fn run_unified(config: &ExperimentConfig) -> CliResult<Outcome> {
    let cells = sweep(config, Input::Gibbs)?;
    let mut table = Table::new("", &UNIFIED_COLUMNS).with_plot(PlotSpec {
        x: "d",
        y: "energy_lvp",
        series: vec!["N", "p"],
        log_x: false,
        log_y: false,
    });
    for c in &cells {
        for pt in &c.points {
            table.push(vec![
                c.sites.into(),
                c.rate.into(),
                pt.d.into(),
                pt.energy_lvp.into(),
                c.energy_fvp.into(),
                c.energy_fvp_noiseless.into(),
                (pt.energy_lvp - c.energy_fvp).abs().into(),
                c.energy_noisy.into(),
                Cell::text("dense"),
                Cell::text(config.protocol.noise.name()),
                config.model.field.into(),
                config.model.beta.into(),
                config.protocol.copies.into(),
            ]);
        }
    }
    table.sort_by(&["N", "p", "d"]);
    Ok(Outcome { summary: vec![summary(Recipe::Unified, &table)], tables: vec![table], checks: None })
}

fn summary(recipe: Recipe, table: &Table) -> String {
    format!("{recipe}: {} rows", table.rows.len())
}
