use super::*;
use crate::densop::{gibbs_state, ground_state_projector, partial_trace, LocalOperator, DEFAULT_GAP_TOL};
use crate::lattice::Lattice;
use crate::linalg::kron;
use crate::pauli::{Pauli, PauliString};
use crate::spin::Hamiltonian;

fn tfi(n: usize, periodic: bool, field: f64) -> (Lattice, Hamiltonian) {
    let l = Lattice::chain(n, periodic).unwrap();
    let h = Hamiltonian::transverse_field_ising(&l, field).unwrap();
    (l, h)
}

fn single_x_gibbs(beta: f64) -> DensityMatrix {
    let (_, h) = tfi(1, false, 1.0);
    gibbs_state(&h, beta).unwrap()
}

fn x_on(n: usize, site: usize) -> PauliString {
    PauliString::sparse(n, &[(site, Pauli::X)]).unwrap()
}

#[test]
fn fvp_of_two_level_gibbs_cools() {
    let rho = single_x_gibbs(0.5);
    let x = x_on(1, 0);
    assert!((fvp_value(&rho, &x, 1).unwrap() - 0.5f64.tanh()).abs() < 1e-14);
    assert!((fvp_value(&rho, &x, 2).unwrap() - 1.0f64.tanh()).abs() < 1e-14);
}

#[test]
fn fvp_of_pure_state_ignores_copies() {
    let (_, h) = tfi(4, false, 0.8);
    let psi = ground_state_projector(&h, DEFAULT_GAP_TOL).unwrap();
    let one = fvp_value(&psi, &h, 1).unwrap();
    for n in 2..5 {
        assert!((fvp_value(&psi, &h, n).unwrap() - one).abs() < 1e-12);
    }
}

#[test]
fn zero_copies_rejected() {
    let rho = single_x_gibbs(0.5);
    assert!(fvp_value(&rho, &x_on(1, 0), 0).is_err());
}

#[test]
fn lvp_with_one_copy_is_plain_expectation() {
    let (l, h) = tfi(5, true, 1.3);
    let rho = gibbs_state(&h, 0.9).unwrap();
    let lvp = lvp_value(&rho, h.terms(), &l, 1, 1).unwrap();
    let plain = crate::densop::expectation(&rho, &h).unwrap();
    assert!((lvp - plain).abs() < 1e-12);
}

#[test]
fn lvp_covering_everything_is_fvp() {
    let (l, h) = tfi(6, true, 2.0);
    let rho = gibbs_state(&h, 1.0).unwrap();
    let lvp = lvp_value(&rho, h.terms(), &l, 3, 2).unwrap();
    let fvp = fvp_value(&rho, &h, 2).unwrap();
    assert!((lvp - fvp).abs() < 1e-12);
}

#[test]
fn deviation_vanishes_without_region_c_and_on_products() {
    let (l, h) = tfi(4, false, 1.0);
    let rho = gibbs_state(&h, 1.0).unwrap();
    let o = LocalOperator::from_pauli(&x_on(4, 1)).unwrap();
    let p = l.partition(&[1], 3).unwrap();
    assert_eq!(deviation_direct(&rho, &o, &p, 2).unwrap(), 0.0);

    // ρ_{AB} ⊗ ρ_C with AB = {0,1}, C = {2,3}
    let (_, h2) = tfi(2, false, 0.7);
    let left = gibbs_state(&h2, 1.1).unwrap();
    let right = gibbs_state(&h2, 0.4).unwrap();
    let product = DensityMatrix::new(kron(left.matrix(), right.matrix()), vec![0, 1, 2, 3]).unwrap();
    let p = l.partition(&[0], 1).unwrap();
    assert_eq!(p.c(), &[2, 3]);
    let o = LocalOperator::from_pauli(&x_on(4, 0)).unwrap();
    assert!(deviation_direct(&product, &o, &p, 2).unwrap().abs() < 1e-12);
    for n in [2, 3] {
        let q = deviation_quadrature(&product, &o, &p, n, &QuadratureSpec::with_nodes(6, 6)).unwrap();
        assert!(q.abs() < 1e-12, "{q}");
    }
}

/// Two-qubit exhaustive oracle for a state split as A = {0}, C = {1}.
#[test]
fn pure_deviation_on_two_qubits() {
    use crate::linalg::c64;
    let amps = [c64::new(0.6, 0.1), c64::new(0.2, -0.3), c64::new(-0.1, 0.25), c64::new(0.5, 0.4)];
    let psi = DensityMatrix::pure(&amps, vec![0, 1]).unwrap();
    let m = psi.matrix();
    let z = [1.0, -1.0];
    // ρ^A by explicit index loops
    let mut ra = [[c64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for t in 0..2 {
                ra[i][j] += m[(2 * i + t, 2 * j + t)];
            }
        }
    }
    let mut ra2 = [[c64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                ra2[i][j] += ra[i][k] * ra[k][j];
            }
        }
    }
    let norm = (ra2[0][0] + ra2[1][1]).re;
    let lvp = (ra2[0][0].re * z[0] + ra2[1][1].re * z[1]) / norm;
    let fvp = ra[0][0].re - ra[1][1].re;
    let oracle = lvp - fvp;

    let l = Lattice::chain(2, false).unwrap();
    let p = l.partition(&[0], 0).unwrap();
    assert_eq!(p.c(), &[1]);
    let o = LocalOperator::from_pauli(&PauliString::sparse(2, &[(0, Pauli::Z)]).unwrap()).unwrap();
    let pure = deviation_pure(&psi, &o, &p, 2).unwrap();
    let direct = deviation_direct(&psi, &o, &p, 2).unwrap();
    assert!((pure - oracle).abs() < 1e-13, "{pure} vs {oracle}");
    assert!((direct - oracle).abs() < 1e-13);
    assert!(oracle.abs() > 1e-3);
}

#[test]
fn pure_route_rejects_mixed_states() {
    let (l, h) = tfi(3, false, 1.0);
    let rho = gibbs_state(&h, 1.0).unwrap();
    let o = LocalOperator::from_pauli(&x_on(3, 0)).unwrap();
    let p = l.partition(&[0], 0).unwrap();
    assert!(matches!(deviation_pure(&rho, &o, &p, 2), Err(Error::NotPure(_))));
}

#[test]
fn quadrature_needs_full_rank() {
    let (l, h) = tfi(3, false, 1.0);
    let psi = ground_state_projector(&h, DEFAULT_GAP_TOL).unwrap();
    let o = LocalOperator::from_pauli(&x_on(3, 0)).unwrap();
    let p = l.partition(&[0], 0).unwrap();
    // seven clamped eigenvalues at the 1e-6 floor shift the trace by 7e-6
    let spec = QuadratureSpec { floor: 1e-6, ..QuadratureSpec::default() };
    assert!(matches!(deviation_quadrature(&psi, &o, &p, 2, &spec), Err(Error::RankDeficient(_))));
}

#[test]
fn quadrature_tracks_direct_route() {
    let (l, h) = tfi(4, true, 1.0);
    let rho = gibbs_state(&h, 0.8).unwrap();
    let o = LocalOperator::from_pauli(&x_on(4, 0)).unwrap();
    let p = l.partition(&[0], 0).unwrap();
    let direct = deviation_direct(&rho, &o, &p, 2).unwrap();
    let coarse = deviation_quadrature(&rho, &o, &p, 2, &QuadratureSpec::with_nodes(12, 12)).unwrap();
    let fine = deviation_quadrature(&rho, &o, &p, 2, &QuadratureSpec::default()).unwrap();
    assert!((fine - direct).abs() <= 1e-5, "{fine} vs {direct}");
    let gibbs_sigma = QuadratureSpec {
        sigma_c: SigmaChoice::GibbsLocal { hamiltonian: h.clone(), beta: 0.8 },
        ..QuadratureSpec::default()
    };
    let fine_gibbs = deviation_quadrature(&rho, &o, &p, 2, &gibbs_sigma).unwrap();
    assert!((fine_gibbs - direct).abs() <= 1e-5, "{fine_gibbs} vs {direct}");
    assert!((coarse - direct).abs() >= 4.0 * (fine - direct).abs() || (coarse - direct).abs() < 1e-13);
}

#[test]
fn variance_plug_in_values() {
    let (_, h) = tfi(3, false, 1.5);
    let psi = ground_state_projector(&h, DEFAULT_GAP_TOL).unwrap();
    // Y on one site has zero mean in a real state
    let y = PauliString::sparse(3, &[(1, Pauli::Y)]).unwrap();
    let vc = variance_and_cost(&psi, &y, 2, Mode::Fvp).unwrap();
    assert!((vc.variance - 1.0).abs() < 1e-12);
    assert!((vc.cost - 2.0).abs() < 1e-12);

    let mixed = DensityMatrix::maximally_mixed(vec![0]);
    for letter in [Pauli::X, Pauli::Y, Pauli::Z] {
        let vc = variance_and_cost(&mixed, &PauliString::new(vec![letter]), 2, Mode::Fvp).unwrap();
        assert!((vc.denominator - 0.5).abs() < 1e-15);
        assert!((vc.cost - 8.0).abs() < 1e-12);
    }
}

#[test]
fn lvp_variance_uses_reduced_state() {
    let (l, h) = tfi(5, true, 2.0);
    let rho = gibbs_state(&h, 1.0).unwrap();
    let p = l.partition(&[2], 1).unwrap();
    let x = x_on(5, 2);
    let lvp = variance_and_cost(&rho, &x, 2, Mode::Lvp(&p)).unwrap();
    let reduced = partial_trace(&rho, &p.window()).unwrap();
    let direct = variance_and_cost(&reduced, &x, 2, Mode::Fvp).unwrap();
    assert!((lvp.variance - direct.variance).abs() < 1e-12);
    assert!(variance_and_cost(&rho, &x_on(5, 0), 2, Mode::Lvp(&p)).is_err());
}

#[test]
fn free_energy_of_single_spin() {
    let (_, h) = tfi(1, false, 1.0);
    for beta in [0.3, 1.0, 4.0] {
        let f = free_energy_density(&h, beta, 1).unwrap();
        let want = -(2.0 * beta.cosh()).ln() / beta;
        assert!((f - want).abs() < 1e-13);
    }
}

#[test]
fn free_energy_high_temperature_limit() {
    let (_, h) = tfi(4, true, 1.0);
    let beta = 1e-6;
    let f = free_energy_density(&h, beta, 4).unwrap();
    // f + log 2 / β → ⟨H⟩_∞ / N = 0 for a traceless Hamiltonian
    assert!((f + 2f64.ln() / beta).abs() < 1e-4);
}

#[test]
fn mse_arithmetic() {
    assert_eq!(mse(0.0, 1.0, 1 << 14), 2f64.powi(-14));
    assert!((mse(0.1, 0.0, 10) - 0.01).abs() < 1e-17);
}

#[test]
fn shots_on_an_eigenstate_are_exact() {
    let plus = DensityMatrix::pure(&[crate::linalg::c64::new(1.0, 0.0); 2], vec![0]).unwrap();
    let plan = ShotPlan { total_shots: 1000, seed: 3, stream: 0 };
    let r = shot_simulate(&plus, &x_on(1, 0), 2, Mode::Fvp, plan, 1.0).unwrap();
    assert_eq!(r.value, 1.0);
    assert_eq!(r.variance, 0.0);
    assert_eq!(r.bias, 0.0);
    assert_eq!(r.n_shot, 500);
}

#[test]
fn shots_are_reproducible_per_stream() {
    let rho = single_x_gibbs(0.7);
    let x = x_on(1, 0);
    let plan = ShotPlan { total_shots: 2000, seed: 11, stream: 4 };
    let a = shot_simulate(&rho, &x, 2, Mode::Fvp, plan, 0.0).unwrap();
    let b = shot_simulate(&rho, &x, 2, Mode::Fvp, plan, 0.0).unwrap();
    assert_eq!(a, b);
    let c = shot_simulate(&rho, &x, 2, Mode::Fvp, ShotPlan { stream: 5, ..plan }, 0.0).unwrap();
    assert_ne!(a.value, c.value);
    assert!((a.mse - (a.bias * a.bias + a.variance / a.n_shot as f64)).abs() < 1e-15);
}

#[test]
fn derangement_trivial_and_thermal() {
    let mixed = DensityMatrix::maximally_mixed(vec![0, 1]);
    let z = PauliString::sparse(2, &[(0, Pauli::Z)]).unwrap();
    assert!(derangement_check(&mixed, &z, 2, Mode::Fvp).unwrap() <= 1e-12);

    let (l, h) = tfi(3, false, 1.0);
    let rho = gibbs_state(&h, 0.6).unwrap();
    let x = x_on(3, 1);
    assert!(derangement_check(&rho, &x, 2, Mode::Fvp).unwrap() <= 1e-10);
    assert!(derangement_check(&rho, &x, 3, Mode::Fvp).unwrap() <= 1e-10);
    let p = l.partition(&[1], 0).unwrap();
    assert!(derangement_check(&rho, &x, 3, Mode::Lvp(&p)).unwrap() <= 1e-10);
    let (_, h5) = tfi(5, false, 1.0);
    let rho5 = gibbs_state(&h5, 0.6).unwrap();
    assert!(matches!(
        derangement_check(&rho5, &x_on(5, 0), 3, Mode::Fvp),
        Err(Error::DimensionLimit { .. })
    ));
}

#[test]
fn derangement_detects_wrong_register() {
    // restricted shift on a correlated state differs from the full-register power
    let (l, h) = tfi(3, false, 1.0);
    let rho = gibbs_state(&h, 1.5).unwrap();
    let x = x_on(3, 0);
    let p = l.partition(&[0], 0).unwrap();
    let full = PurifiedRegister::new(&rho, 2).unwrap().value(&x).unwrap() * PurifiedRegister::new(&rho, 2).unwrap().norm;
    let reduced = partial_trace(&rho, &p.window()).unwrap();
    let local = PurifiedRegister::new(&reduced, 2).unwrap();
    let local = local.value(&x).unwrap() * local.norm;
    assert!((full - local).abs() > 1e-3);
}

#[test]
fn batched_term_costs_match_single_term_routes() {
    let (l, h) = tfi(6, true, 1.3);
    let rho = gibbs_state(&h, 0.7).unwrap();
    let lvp_all = lvp_term_costs(&rho, h.terms(), &l, 1, 2).unwrap();
    let fvp_all = fvp_term_costs(&rho, h.terms(), 2).unwrap();
    assert_eq!(lvp_all.len(), h.terms().len());
    for ((t, lc), fc) in h.terms().iter().zip(&lvp_all).zip(&fvp_all) {
        let part = l.partition(&t.support(), 1).unwrap();
        let fvp = variance_and_cost(&rho, &t.pauli, 2, Mode::Fvp).unwrap();
        let lvp = variance_and_cost(&rho, &t.pauli, 2, Mode::Lvp(&part)).unwrap();
        assert!((fc.variance - fvp.variance).abs() < 1e-12);
        assert!((lc.cost - lvp.cost).abs() < 1e-10);
        let direct = lvp_term_value(&rho, t, &part, 2).unwrap();
        assert!((t.coefficient * lc.ratio() - direct).abs() < 1e-12);
    }
}

#[test]
fn purified_marginal_on_everything_is_normalised_power() {
    let (l, h) = tfi(4, false, 0.9);
    let rho = gibbs_state(&h, 0.5).unwrap();
    let all: Vec<usize> = (0..l.n_sites()).collect();
    let m = purified_marginal(&rho, &all, &[1, 2], 2).unwrap();
    let cooled = gibbs_state(&h, 1.0).unwrap();
    let want = partial_trace(&cooled, &[1, 2]).unwrap();
    assert!(crate::densop::hs_distance(m.matrix(), want.matrix()) < 1e-12);
}
