//! Cross-check suite. Every check compares two independent routes to the
//! same number and records the discrepancy against a fixed tolerance.

use rayon::prelude::*;
use vpure::channels::{apply_channel, NoiseKind, NoiseModel};
use vpure::densop::{
    expectation, gibbs_state, ground_state_projector, integer_power, partial_trace, DEFAULT_GAP_TOL,
};
use vpure::estimator::{
    derangement_check, deviation_direct, deviation_pure, deviation_quadrature, fvp_value, lvp_value, shot_simulate,
    variance_and_cost, Mode, QuadratureSpec, ShotPlan,
};
use vpure::gaussian::{
    gaussian_purity_overlap, gaussian_to_dense, majorana_from_dense, ns_sector_hamiltonian, purification_map,
    tfi_majorana_correlation, SystemSize, Temperature, TfiRing,
};
use vpure::linalg::{c64, trace};
use vpure::{DensityMatrix, Hamiltonian, Lattice, LocalOperator, Pauli, PauliString};

use super::Outcome;
use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::output::{Cell, Table};

/// Repetitions per Monte Carlo variance check.
pub const MC_REPETITIONS: usize = 200;
/// Shots per circuit in the Monte Carlo checks.
pub const MC_SHOTS_PER_CIRCUIT: u64 = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub instance: String,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value.is_finite() && self.value <= self.tolerance
    }
}

fn tfi(n: usize, periodic: bool, field: f64) -> CliResult<(Lattice, Hamiltonian)> {
    let lattice = Lattice::chain(n, periodic)?;
    let h = Hamiltonian::transverse_field_ising(&lattice, field)?;
    Ok((lattice, h))
}

fn zz(n: usize, a: usize, b: usize) -> CliResult<PauliString> {
    Ok(PauliString::sparse(n, &[(a, Pauli::Z), (b, Pauli::Z)])?)
}

fn cooling_identity() -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    for n_sites in [4, 6] {
        for field in [1.0, 2.0] {
            let (_, h) = tfi(n_sites, true, field)?;
            for beta in [0.5, 1.0] {
                let rho = gibbs_state(&h, beta)?;
                for n in [2u32, 3] {
                    let cooled = gibbs_state(&h, n as f64 * beta)?;
                    let value = (fvp_value(&rho, &h, n)? - expectation(&cooled, &h)?).abs();
                    out.push(Check {
                        name: "cooling-identity",
                        instance: format!("N={n_sites} lambda={field} beta={beta} n={n}"),
                        value,
                        tolerance: 1e-9,
                    });
                }
            }
        }
    }
    Ok(out)
}

fn lvp_degeneracy() -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    for n_sites in [4, 6, 8] {
        let (lattice, h) = tfi(n_sites, true, 1.5)?;
        let rho = gibbs_state(&h, 1.0)?;
        let value = (lvp_value(&rho, h.terms(), &lattice, n_sites, 2)? - fvp_value(&rho, &h, 2)?).abs();
        out.push(Check { name: "lvp-degeneracy", instance: format!("N={n_sites} d={n_sites}"), value, tolerance: 1e-10 });
    }
    Ok(out)
}

fn deviation_routes() -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    let (lattice, h) = tfi(6, true, 2.0)?;
    let psi = ground_state_projector(&h, DEFAULT_GAP_TOL)?;
    let o_a = LocalOperator::from_pauli(&zz(6, 0, 1)?)?;
    for d in [0, 1] {
        let part = lattice.partition(&[0, 1], d)?;
        let value = (deviation_direct(&psi, &o_a, &part, 2)? - deviation_pure(&psi, &o_a, &part, 2)?).abs();
        out.push(Check { name: "deviation-pure-route", instance: format!("N=6 ground d={d}"), value, tolerance: 1e-9 });
    }
    let (lattice, h) = tfi(4, false, 1.0)?;
    let rho = gibbs_state(&h, 1.0)?;
    let o_a = LocalOperator::from_pauli(&zz(4, 0, 1)?)?;
    let part = lattice.partition(&[0, 1], 1)?;
    let direct = deviation_direct(&rho, &o_a, &part, 2)?;
    let quad = deviation_quadrature(&rho, &o_a, &part, 2, &QuadratureSpec::with_nodes(24, 24))?;
    out.push(Check {
        name: "deviation-quadrature-route",
        instance: "N=4 open Gibbs beta=1 d=1 nodes=24x24".into(),
        value: (direct - quad).abs(),
        tolerance: 1e-4,
    });
    Ok(out)
}

fn derangement() -> CliResult<Vec<Check>> {
    let (_, h) = tfi(4, true, 1.0)?;
    let rho = gibbs_state(&h, 0.8)?;
    let full = derangement_check(&rho, &zz(4, 0, 1)?, 2, Mode::Fvp)?;
    let (lattice, h) = tfi(5, false, 1.0)?;
    let rho = gibbs_state(&h, 0.8)?;
    let part = lattice.partition(&[1, 2], 1)?;
    let restricted = derangement_check(&rho, &zz(5, 1, 2)?, 2, Mode::Lvp(&part))?;
    Ok(vec![
        Check { name: "derangement", instance: "N=4 full register".into(), value: full, tolerance: 1e-10 },
        Check { name: "derangement", instance: "N=5 window d=1".into(), value: restricted, tolerance: 1e-10 },
    ])
}

fn normalised_power(rho: &DensityMatrix, n: u32) -> CliResult<DensityMatrix> {
    let p = integer_power(rho.matrix(), n);
    let norm = trace(p.as_ref()).re;
    let scaled = vpure::linalg::CMat::from_fn(p.nrows(), p.ncols(), |i, j| p[(i, j)] / c64::new(norm, 0.0));
    Ok(DensityMatrix::new(scaled, rho.sites().to_vec())?)
}

fn gaussian_vs_dense() -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    let m1 = tfi_majorana_correlation(Temperature::Beta(0.7), 1.3, 3, SystemSize::Infinite)?;
    let m2 = tfi_majorana_correlation(Temperature::Beta(1.1), 0.6, 3, SystemSize::Infinite)?;
    let r1 = gaussian_to_dense(&m1)?;
    let r2 = gaussian_to_dense(&m2)?;
    let metrics = gaussian_purity_overlap(&m1, Some(&m2))?;
    let dense_overlap = trace(vpure::linalg::matmul(r1.matrix(), r2.matrix()).as_ref()).re;
    out.push(Check {
        name: "gaussian-purity",
        instance: "L=3".into(),
        value: (metrics.purity - r1.purity()).abs(),
        tolerance: 1e-8,
    });
    out.push(Check {
        name: "gaussian-overlap",
        instance: "L=3".into(),
        value: (metrics.overlap.expect("overlap requested") - dense_overlap).abs(),
        tolerance: 1e-8,
    });
    let purified = purification_map(&m1, 2)?;
    let from_dense = majorana_from_dense(&normalised_power(&r1, 2)?)?;
    let gap = vpure::linalg::max_abs_diff(purified.matrix(), from_dense.matrix());
    out.push(Check { name: "gaussian-purification", instance: "L=3 n=2".into(), value: gap, tolerance: 1e-8 });

    let (sites, field, beta, n, d) = (6, 1.5, 1.0, 2u32, 1usize);
    let ring = TfiRing::new(sites, field, Temperature::Beta(beta))?;
    let h = ns_sector_hamiltonian(sites, field)?;
    let rho = gibbs_state(&h, beta)?;
    let cooled = gibbs_state(&h, n as f64 * beta)?;
    let (fvp_density, _) = ring.energy_density(d, n)?;
    out.push(Check {
        name: "ring-energy-density",
        instance: format!("N={sites} lambda={field} beta={beta} n={n}"),
        value: (fvp_density - expectation(&cooled, &h)? / sites as f64).abs(),
        tolerance: 1e-6,
    });
    let window: Vec<usize> = (0..2 + 2 * d).collect();
    let local = normalised_power(&partial_trace(&rho, &window)?, n)?;
    let bond = LocalOperator::from_pauli(&zz(sites, d, d + 1)?)?;
    let dense_lvp = expectation(&local, &bond)?;
    out.push(Check {
        name: "ring-lvp-bond",
        instance: format!("N={sites} lambda={field} beta={beta} n={n} d={d}"),
        value: (ring.estimates(d, n)?.bond.lvp_value - dense_lvp).abs(),
        tolerance: 1e-8,
    });
    Ok(out)
}

/// Empirical variance of `MC_REPETITIONS` shot-level estimates, scaled by
/// the shots per circuit, against the analytic delta-method value, in units
/// of the sampling standard error of a variance.
pub fn monte_carlo_z(
    rho: &DensityMatrix,
    p: &PauliString,
    n: u32,
    mode: Mode<'_>,
    seed: u64,
    stream_base: u64,
    repetitions: usize,
    shots_per_circuit: u64,
) -> CliResult<(f64, f64, f64)> {
    let analytic = variance_and_cost(rho, p, n, mode)?.variance;
    let values: Vec<f64> = (0..repetitions)
        .into_par_iter()
        .map(|r| {
            let plan = ShotPlan { total_shots: 2 * shots_per_circuit, seed, stream: stream_base + r as u64 };
            Ok(shot_simulate(rho, p, n, mode, plan, 0.0)?.value)
        })
        .collect::<CliResult<_>>()?;
    let rf = repetitions as f64;
    let mean = values.iter().sum::<f64>() / rf;
    let sample_var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (rf - 1.0);
    let empirical = sample_var * shots_per_circuit as f64;
    let se = analytic * (2.0 / (rf - 1.0)).sqrt();
    Ok((empirical, analytic, (empirical - analytic).abs() / se))
}

fn variance_monte_carlo(seed: u64) -> CliResult<Vec<Check>> {
    let (lattice, h) = tfi(6, true, 2.0)?;
    let gibbs = gibbs_state(&h, 1.0)?;
    let ground = ground_state_projector(&h, DEFAULT_GAP_TOL)?;
    let noisy = apply_channel(&ground, &NoiseModel::new(NoiseKind::LocalDepolarizing, 0.1)?);
    let bond = zz(6, 0, 1)?;
    let part = lattice.partition(&[0, 1], 1)?;
    let cases: [(&str, &DensityMatrix, Mode<'_>); 3] = [
        ("N=6 Gibbs beta=1 FVP", &gibbs, Mode::Fvp),
        ("N=6 Gibbs beta=1 LVP d=1", &gibbs, Mode::Lvp(&part)),
        ("N=6 noisy ground p=0.1 LVP d=1", &noisy, Mode::Lvp(&part)),
    ];
    let mut out = Vec::new();
    for (k, (instance, rho, mode)) in cases.into_iter().enumerate() {
        let stream_base = (k * MC_REPETITIONS) as u64;
        let (_, _, z) =
            monte_carlo_z(rho, &bond, 2, mode, seed, stream_base, MC_REPETITIONS, MC_SHOTS_PER_CIRCUIT)?;
        out.push(Check { name: "variance-monte-carlo", instance: instance.into(), value: z, tolerance: 5.0 });
    }
    Ok(out)
}

pub fn run(config: &ExperimentConfig) -> CliResult<Outcome> {
    let seed = config.protocol.seed;
    let groups: Vec<fn(u64) -> CliResult<Vec<Check>>> = vec![
        |_| cooling_identity(),
        |_| lvp_degeneracy(),
        |_| deviation_routes(),
        |_| derangement(),
        |_| gaussian_vs_dense(),
        variance_monte_carlo,
    ];
    let results: Vec<Vec<Check>> = groups.par_iter().map(|g| g(seed)).collect::<CliResult<_>>()?;
    let checks: Vec<Check> = results.into_iter().flatten().collect();

    let mut table = Table::new("", &["check", "instance", "value", "tolerance", "passed", "seed"]);
    for c in &checks {
        table.push(vec![
            Cell::text(c.name),
            Cell::text(c.instance.clone()),
            c.value.into(),
            c.tolerance.into(),
            c.passed().into(),
            seed.into(),
        ]);
    }
    table.sort_by(&["check", "instance"]);
    let failed = checks.iter().filter(|c| !c.passed()).count();
    let mut summary: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| format!("FAILED {} [{}]: {:e} > {:e}", c.name, c.instance, c.value, c.tolerance))
        .collect();
    summary.push(format!("validate: {} of {} checks passed", checks.len() - failed, checks.len()));
    Ok(Outcome { tables: vec![table], summary, checks: Some((failed, checks.len())) })
}
