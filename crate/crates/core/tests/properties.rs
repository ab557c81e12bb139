//! Invariants over random parameters and states.

use std::sync::Arc;

use cavity_duet_core::analytic::{
    apply_u0, apply_ui1_expm, apply_ui1_sum, apply_ujc, ProductEvolution,
};
use cavity_duet_core::exact::{build_hamiltonian, ExactEvolution};
use cavity_duet_core::presets::{study_params, uniform_grid, INITIAL_KET};
use cavity_duet_core::wei_norman::{integrate_gamma, phi_coeffs, Cavity, GammaSet};
use cavity_duet_core::{basis_state, Observable, PureState, SectorBasis, SimParams, C64};
use nalgebra::DVector;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = SimParams> {
    (
        0.5f64..2.0,
        0.9f64..1.1,
        0.9f64..1.1,
        0.0f64..0.2,
        0.0f64..0.2,
        0.0f64..0.2,
    )
        .prop_map(|(w2, q1, q2, g1, g2, lambda)| {
            SimParams::new(1.0, w2, q1, q2 * w2, g1, g2, lambda).unwrap()
        })
}

fn state(m: u32, seed: &[(f64, f64)]) -> PureState {
    let basis = Arc::new(SectorBasis::new(m));
    let amp = DVector::from_fn(basis.dim(), |i, _| {
        let (re, im) = seed[i % seed.len()];
        C64::new(re + i as f64 * 0.01, im)
    });
    let norm = amp.norm();
    PureState::from_amplitudes(basis, amp / C64::new(norm, 0.0))
}

fn seed() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..8)
}

/// Hopping coefficients sampled from an integrated trajectory.
fn trajectory_gamma(p: &SimParams, tau: f64) -> GammaSet {
    *integrate_gamma(p, &[tau]).unwrap().last().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hamiltonian_is_hermitian(p in params(), m in 0u32..6) {
        let h = build_hamiltonian(&p, &SectorBasis::new(m));
        prop_assert!(h.hermiticity_residual() <= 1e-12);
    }

    #[test]
    fn exact_path_conserves_norm_and_energy(p in params(), m in 1u32..5, s in seed(), tau in 0.0f64..200.0) {
        let psi0 = state(m, &s);
        let evo = ExactEvolution::new(&p, &psi0).unwrap();
        let h = build_hamiltonian(&p, psi0.basis());
        let psi = evo.state_at(tau);
        prop_assert!((psi.norm() - 1.0).abs() <= 1e-10);
        prop_assert!((h.energy(&psi) - h.energy(&psi0)).abs() <= 1e-9);
    }

    #[test]
    fn hopping_factor_forms_agree(p in params(), m in 0u32..5, tau in 0.0f64..30.0) {
        let g = trajectory_gamma(&p, tau);
        let basis = Arc::new(SectorBasis::new(m));
        for &ket in basis.kets() {
            let psi = basis_state(&basis, ket).unwrap();
            let a = apply_ui1_sum(&g, &psi).unwrap();
            let b = apply_ui1_expm(&g, &psi).unwrap();
            prop_assert!(a.max_abs_diff(&b) <= 1e-9, "{ket}: {:e}", a.max_abs_diff(&b));
        }
    }

    #[test]
    fn every_factor_preserves_norm(p in params(), m in 1u32..5, s in seed(), tau in 0.0f64..30.0) {
        let psi = state(m, &s);
        let evo = ProductEvolution::new(&p, psi.basis(), &[tau]).unwrap();
        let i = evo.tau_grid().len() - 1;
        let table = evo.table();
        let steps = [
            apply_u0(&p, tau, &psi),
            apply_ui1_sum(&table.gammas[i], &psi).unwrap(),
            apply_ujc(Cavity::One, &table.cavity_at(Cavity::One, i), &psi).unwrap(),
            apply_ujc(Cavity::Two, &table.cavity_at(Cavity::Two, i), &psi).unwrap(),
        ];
        for out in &steps {
            prop_assert!((out.norm() - 1.0).abs() <= 1e-8, "{:e}", out.norm() - 1.0);
        }
    }

    #[test]
    fn photon_bookkeeping_is_exact(p in params(), m in 1u32..5, tau in 0.0f64..30.0) {
        let basis = Arc::new(SectorBasis::new(m));
        let evo = ProductEvolution::new(&p, &basis, &[tau]).unwrap();
        let i = evo.tau_grid().len() - 1;
        let table = evo.table();
        for &ket in basis.kets() {
            let psi = basis_state(&basis, ket).unwrap();
            let hop = apply_ui1_sum(&table.gammas[i], &psi).unwrap();
            let jc1 = apply_ujc(Cavity::One, &table.cavity_at(Cavity::One, i), &psi).unwrap();
            let jc2 = apply_ujc(Cavity::Two, &table.cavity_at(Cavity::Two, i), &psi).unwrap();
            for (k, a) in hop.iter() {
                prop_assert!(a == C64::default() || k.n1 + k.n2 == ket.n1 + ket.n2);
            }
            for (k, a) in jc1.iter() {
                prop_assert!(a == C64::default() || k.m1() == ket.m1());
            }
            for (k, a) in jc2.iter() {
                prop_assert!(a == C64::default() || k.m2() == ket.m2());
            }
            let full = evo.apply(i, &psi).unwrap();
            prop_assert_eq!(full.basis().m_total(), m);
            prop_assert!((full.expectation(Observable::MTot) - m as f64).abs() <= 1e-8);
        }
    }

    #[test]
    fn effective_couplings_pair_up(p in params(), tau in 0.0f64..30.0) {
        let g = trajectory_gamma(&p, tau);
        prop_assert!(g.unitarity_residual() <= 1e-8);
        prop_assert!(g.hermiticity_residual() <= 1e-8);
        prop_assert!(phi_coeffs(tau, &g, &p).hermiticity_residual() <= 1e-8);
    }
}

#[test]
fn runs_are_bitwise_deterministic() {
    let p = study_params(0.04, 0.08);
    let basis = Arc::new(SectorBasis::new(INITIAL_KET.m_total()));
    let psi0 = basis_state(&basis, INITIAL_KET).unwrap();
    let grid = uniform_grid(20.0, 0.5);
    let run = || {
        let evo = ProductEvolution::for_state(&p, &psi0, &grid).unwrap();
        evo.evolve(&psi0).unwrap()
    };
    let (a, b) = (run(), run());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.amplitudes(), y.amplitudes());
    }
}
