//! Independent check of the interaction-frame bookkeeping.
//!
//! The state in the frame of `U0 U1` obeys `i psi' = 2 pi H2(tau) psi`, where
//! `H2` is the JC interaction conjugated by the hopping factor. Integrating
//! that Schrodinger equation directly (no product factorization of the JC
//! part) must reproduce:
//!   * the exact propagator, when the cross-cavity terms of `H2` are kept;
//!   * the product-form propagator, when only the JC terms are kept.

use std::f64::consts::TAU;
use std::sync::Arc;

use cavity_duet_core::analytic::{apply_u0, apply_ui1_sum, evolve_analytic};
use cavity_duet_core::exact::propagate_exact;
use cavity_duet_core::ode::Dopri5;
use cavity_duet_core::presets::{study_params, INITIAL_KET};
use cavity_duet_core::wei_norman::{gamma_rhs, phi_coeffs, GammaSet};
use cavity_duet_core::{
    basis_state, BasisKet, Level, OdeTolerance, PureState, SectorBasis, SimParams, C64,
};
use nalgebra::{DMatrix, DVector};

struct Ops {
    /// a1 sp1, a2 sp2, a2 sp1, a1 sp2
    a1s1: DMatrix<C64>,
    a2s2: DMatrix<C64>,
    a2s1: DMatrix<C64>,
    a1s2: DMatrix<C64>,
}

fn lowering_op(
    basis: &SectorBasis,
    f: impl Fn(&BasisKet) -> Option<(BasisKet, f64)>,
) -> DMatrix<C64> {
    let n = basis.dim();
    let mut m = DMatrix::zeros(n, n);
    for (i, k) in basis.kets().iter().enumerate() {
        if let Some((to, amp)) = f(k) {
            let j = basis.index_of(&to).unwrap();
            m[(j, i)] = C64::new(amp, 0.0);
        }
    }
    m
}

fn ops(basis: &SectorBasis) -> Ops {
    use Level::{Excited as E, Ground as G};
    Ops {
        a1s1: lowering_op(basis, |k| {
            (k.n1 > 0 && k.s1 == G).then(|| {
                (
                    BasisKet {
                        n1: k.n1 - 1,
                        s1: E,
                        ..*k
                    },
                    (k.n1 as f64).sqrt(),
                )
            })
        }),
        a2s2: lowering_op(basis, |k| {
            (k.n2 > 0 && k.s2 == G).then(|| {
                (
                    BasisKet {
                        n2: k.n2 - 1,
                        s2: E,
                        ..*k
                    },
                    (k.n2 as f64).sqrt(),
                )
            })
        }),
        a2s1: lowering_op(basis, |k| {
            (k.n2 > 0 && k.s1 == G).then(|| {
                (
                    BasisKet {
                        n2: k.n2 - 1,
                        s1: E,
                        ..*k
                    },
                    (k.n2 as f64).sqrt(),
                )
            })
        }),
        a1s2: lowering_op(basis, |k| {
            (k.n1 > 0 && k.s2 == G).then(|| {
                (
                    BasisKet {
                        n1: k.n1 - 1,
                        s2: E,
                        ..*k
                    },
                    (k.n1 as f64).sqrt(),
                )
            })
        }),
    }
}

/// Frame Hamiltonian in units of omega1 (without the 2 pi).
fn frame_hamiltonian(
    p: &SimParams,
    ops: &Ops,
    tau: f64,
    g: &GammaSet,
    cross: bool,
) -> DMatrix<C64> {
    let phi = phi_coeffs(tau, g, p);
    // raising-type operator = adjoint of the lowering one
    let mut h = (ops.a1s1.adjoint() * phi.phi11 + &ops.a1s1 * phi.phi12) * C64::new(p.g1, 0.0)
        + (ops.a2s2.adjoint() * phi.phi21 + &ops.a2s2 * phi.phi22) * C64::new(p.g2, 0.0);
    if cross {
        let e3 = g.gamma3.exp();
        let em3 = (-g.gamma3).exp();
        let d1 = C64::from_polar(1.0, p.detuning_phase1(tau));
        let d2 = C64::from_polar(1.0, p.detuning_phase2(tau));
        // U1^+ a1 U1 = e^{g3} a1 + g2 e^{-g3} a2,   U1^+ a2 U1 = (1 + g1 g2) e^{-g3} a2 + g1 e^{g3} a1
        let c1 = g.gamma2 * em3 * d1; // a2 sp1
        let c2 = g.gamma1 * e3 * d2; // a1 sp2
        h += (&ops.a2s1 * c1 + ops.a2s1.adjoint() * c1.conj()) * C64::new(p.g1, 0.0);
        h += (&ops.a1s2 * c2 + ops.a1s2.adjoint() * c2.conj()) * C64::new(p.g2, 0.0);
    }
    h
}

fn frame_evolution(p: &SimParams, psi0: &PureState, grid: &[f64], cross: bool) -> Vec<PureState> {
    let basis = Arc::clone(psi0.basis());
    let ops = ops(&basis);
    let dim = basis.dim();
    let mut y0 = vec![C64::default(); 3 + dim];
    y0[3..].copy_from_slice(psi0.amplitudes().as_slice());
    let rhs = |tau: f64, y: &[C64], dy: &mut [C64]| {
        let g = GammaSet {
            tau,
            gamma1: y[0],
            gamma2: y[1],
            gamma3: y[2],
        };
        dy[..3].copy_from_slice(&gamma_rhs(tau, &g, p));
        let h = frame_hamiltonian(p, &ops, tau, &g, cross);
        let psi = DVector::from_column_slice(&y[3..]);
        let d = h * psi * C64::new(0.0, -TAU);
        dy[3..].copy_from_slice(d.as_slice());
    };
    let tol = OdeTolerance {
        rtol: 1e-11,
        atol: 1e-13,
    };
    let sol = Dopri5::new(tol)
        .solve(rhs, &y0, grid, |_, _| Ok::<(), ()>(()))
        .unwrap();
    grid.iter()
        .zip(sol)
        .map(|(&tau, y)| {
            let g = GammaSet {
                tau,
                gamma1: y[0],
                gamma2: y[1],
                gamma3: y[2],
            };
            let inner =
                PureState::from_amplitudes(Arc::clone(&basis), DVector::from_column_slice(&y[3..]));
            apply_u0(p, tau, &apply_ui1_sum(&g, &inner).unwrap())
        })
        .collect()
}

fn grid(tau_max: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| tau_max * k as f64 / n as f64).collect()
}

fn initial() -> PureState {
    basis_state(&Arc::new(SectorBasis::new(3)), INITIAL_KET).unwrap()
}

fn worst(a: &[PureState], b: &[PureState]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.max_abs_diff(y))
        .fold(0.0, f64::max)
}

#[test]
fn full_frame_hamiltonian_reproduces_exact_evolution() {
    let psi0 = initial();
    for (g, lambda) in [(0.04, 0.08), (0.01, 0.02), (0.04, 1e-3), (0.001, 0.25)] {
        let p = study_params(g, lambda);
        let times = grid(20.0, 80);
        let framed = frame_evolution(&p, &psi0, &times, true);
        let exact = propagate_exact(&p, &psi0, &times).unwrap();
        let d = worst(&framed, &exact);
        assert!(d < 1e-7, "g = {g}, lambda = {lambda}: {d:e}");
    }
}

#[test]
fn truncated_frame_hamiltonian_reproduces_product_form() {
    let psi0 = initial();
    for (g, lambda) in [(0.04, 0.08), (0.01, 0.02), (0.04, 1e-3), (0.001, 0.25)] {
        let p = study_params(g, lambda);
        let times = grid(20.0, 80);
        let framed = frame_evolution(&p, &psi0, &times, false);
        let product = evolve_analytic(&p, &psi0, &times).unwrap();
        let d = worst(&framed, &product);
        assert!(d < 1e-7, "g = {g}, lambda = {lambda}: {d:e}");
    }
}
