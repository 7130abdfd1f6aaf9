//! MSE of estimating `⟨H⟩` at `nβ` from copies of the Gibbs state at `β`.

use rayon::prelude::*;
use vpure::densop::gibbs_state;
use vpure::estimator::{fvp_term_costs, lvp_term_costs, VarianceCost};
use vpure::gaussian::{Temperature, TfiRing};
use vpure::{Hamiltonian, Lattice};

use super::Outcome;
use crate::config::{Engine, ExperimentConfig};
use crate::error::CliResult;
use crate::output::{Cell, PlotSpec, Table};

const COLUMNS: [&str; 12] =
    ["N", "d", "chi_lvp", "chi_fvp", "bias_lvp", "var_lvp", "var_fvp", "backend", "lambda", "beta", "n", "n_shot"];

/// `Σ|D_i|²`, `Σ c_i² Var_i^LVP`, `Σ c_i² Var_i^FVP` for one `(N, d)`.
#[derive(Debug, Clone, Copy)]
struct Budget {
    bias2: f64,
    var_lvp: f64,
    var_fvp: f64,
}

fn dense_budgets(config: &ExperimentConfig, sites: usize) -> CliResult<Vec<Budget>> {
    let lattice = Lattice::chain(sites, true)?;
    let h = Hamiltonian::transverse_field_ising(&lattice, config.model.field)?;
    let rho = gibbs_state(&h, config.model.beta)?;
    let n = config.protocol.copies;
    let fvp = fvp_term_costs(&rho, h.terms(), n)?;
    let var_fvp: f64 = h.terms().iter().zip(&fvp).map(|(t, f)| t.coefficient.powi(2) * f.variance).sum();
    config
        .protocol
        .buffers
        .iter()
        .map(|&d| {
            let lvp = lvp_term_costs(&rho, h.terms(), &lattice, d, n)?;
            let mut bias2 = 0.0;
            let mut var_lvp = 0.0;
            for ((t, l), f) in h.terms().iter().zip(&lvp).zip(&fvp) {
                bias2 += (t.coefficient * (l.ratio() - VarianceCost::ratio(f))).powi(2);
                var_lvp += t.coefficient.powi(2) * l.variance;
            }
            Ok(Budget { bias2, var_lvp, var_fvp })
        })
        .collect()
}

fn gaussian_budgets(config: &ExperimentConfig, sites: usize) -> CliResult<Vec<Budget>> {
    let ring = TfiRing::new(sites, config.model.field, Temperature::Beta(config.model.beta))?;
    config
        .protocol
        .buffers
        .iter()
        .map(|&d| {
            let (bias2, var_lvp, var_fvp) = ring.energy_error_budget(d, config.protocol.copies)?;
            Ok(Budget { bias2, var_lvp, var_fvp })
        })
        .collect()
}

pub fn run(config: &ExperimentConfig) -> CliResult<Outcome> {
    let cells: Vec<(usize, Engine)> =
        config.model.sites.iter().map(|&n| Ok((n, config.engine_for(n)?))).collect::<CliResult<_>>()?;
    let budgets: Vec<Vec<Budget>> = cells
        .par_iter()
        .map(|&(sites, engine)| match engine {
            Engine::Dense => dense_budgets(config, sites),
            Engine::Gaussian => gaussian_budgets(config, sites),
        })
        .collect::<CliResult<_>>()?;

    let mut table = Table::new("", &COLUMNS).with_plot(PlotSpec {
        x: "N",
        y: "chi_lvp",
        series: vec!["d", "n_shot"],
        log_x: false,
        log_y: true,
    });
    for ((sites, engine), per_d) in cells.iter().zip(&budgets) {
        for (&d, b) in config.protocol.buffers.iter().zip(per_d) {
            for &shots in &config.protocol.shots {
                let m = shots as f64;
                table.push(vec![
                    (*sites).into(),
                    d.into(),
                    (b.bias2 + b.var_lvp / m).into(),
                    (b.var_fvp / m).into(),
                    b.bias2.sqrt().into(),
                    b.var_lvp.into(),
                    b.var_fvp.into(),
                    Cell::text(engine.name()),
                    config.model.field.into(),
                    config.model.beta.into(),
                    config.protocol.copies.into(),
                    shots.into(),
                ]);
            }
        }
    }
    table.sort_by(&["N", "d", "n_shot"]);
    let summary = vec![format!("cooling-mse: {} rows over {} system sizes", table.rows.len(), cells.len())];
    Ok(Outcome { tables: vec![table], summary, checks: None })
}
