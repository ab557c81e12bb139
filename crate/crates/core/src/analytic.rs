//! Product-form evolution `U = U0 U1 Ujc1 Ujc2`.
//!
//! States are pushed through the factors right to left: both JC factors
//! first, then the hopping factor, then the free phases.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::params::{OdeTolerance, SimParams};
use crate::sector::{BasisKet, Level, PureState, SectorBasis};
use crate::wei_norman::{
    integrate_coefficients, Cavity, CoefficientTable, GammaSet, LadderBetaSet, LadderKey,
};
use crate::{c64, C64};

/// Largest photon number the factorial table supports.
pub const MAX_PHOTONS: u32 = 20;

fn factorials() -> [f64; MAX_PHOTONS as usize + 1] {
    let mut table = [1.0; MAX_PHOTONS as usize + 1];
    for n in 1..table.len() {
        table[n] = table[n - 1] * n as f64;
    }
    table
}

/// Free evolution: each ket picks up
/// `exp(-i 2 pi [n1 + omega2 n2 + Omega1/2 sz1 + Omega2/2 sz2] tau)`.
pub fn apply_u0(params: &SimParams, tau: f64, state: &PureState) -> PureState {
    let amp = DVector::from_iterator(
        state.basis().dim(),
        state.iter().map(|(k, a)| {
            let energy = params.omega1 * k.n1 as f64
                + params.omega2 * k.n2 as f64
                + 0.5 * params.qubit1 * k.s1.sigma_z()
                + 0.5 * params.qubit2 * k.s2.sigma_z();
            a * C64::from_polar(1.0, -TAU * energy * tau)
        }),
    );
    PureState::from_amplitudes(Arc::clone(state.basis()), amp)
}

/// Hopping factor through its finite double sum over photon transfers.
/// Atomic labels are spectators.
pub fn apply_ui1_sum(gamma: &GammaSet, state: &PureState) -> Result<PureState> {
    let fact = factorials();
    let basis = state.basis();
    let mut out = PureState::zero(Arc::clone(basis));
    for (ket, a) in state.iter() {
        if a == C64::default() {
            continue;
        }
        let (n1, n2) = (ket.n1, ket.n2);
        if n1 + n2 > MAX_PHOTONS {
            return Err(Error::OutOfRange { n: n1 + n2 });
        }
        let f = |n: u32| fact[n as usize];
        let prefactor =
            a * libm::sqrt(f(n2) / f(n1)) * (gamma.gamma3 * (n1 as f64 - n2 as f64)).exp();
        for p in 0..=n2 {
            let outer = gamma.gamma2.powu(p) * (f(n1 + p) / (f(p) * f(n2 - p)));
            for k in 0..=(n1 + p) {
                let inner =
                    gamma.gamma1.powu(k) * (libm::sqrt(f(n2 - p + k) / f(n1 + p - k)) / f(k));
                let target = BasisKet {
                    n1: n1 + p - k,
                    n2: n2 - p + k,
                    ..ket
                };
                let j = basis
                    .index_of(&target)
                    .expect("photon transfer stays in sector");
                out.amplitudes_mut()[j] += prefactor * outer * inner;
            }
        }
    }
    Ok(out)
}

/// `J+ = a1 a2^+`, `J- = a1^+ a2` and `Jz = n1 - n2` on a sector basis.
pub fn hopping_generators(basis: &SectorBasis) -> [DMatrix<C64>; 3] {
    let dim = basis.dim();
    let mut jp = DMatrix::zeros(dim, dim);
    let mut jz = DMatrix::zeros(dim, dim);
    for (i, k) in basis.kets().iter().enumerate() {
        jz[(i, i)] = c64(k.n1 as f64 - k.n2 as f64, 0.0);
        if k.n1 > 0 {
            let to = BasisKet {
                n1: k.n1 - 1,
                n2: k.n2 + 1,
                ..*k
            };
            let j = basis
                .index_of(&to)
                .expect("photon transfer stays in sector");
            jp[(j, i)] = c64(libm::sqrt(k.n1 as f64 * (k.n2 + 1) as f64), 0.0);
        }
    }
    let jm = jp.adjoint();
    [jp, jm, jz]
}

/// `exp(z N)` for nilpotent `N`; the power series terminates.
fn expm_nilpotent(n: &DMatrix<C64>, z: C64) -> DMatrix<C64> {
    let dim = n.nrows();
    let scaled = n * z;
    let mut term = DMatrix::<C64>::identity(dim, dim);
    let mut sum = term.clone();
    for k in 1..=dim {
        term = &term * &scaled * c64(1.0 / k as f64, 0.0);
        if term.iter().all(|x| *x == C64::default()) {
            break;
        }
        sum += &term;
    }
    sum
}

/// Hopping factor by dense matrix exponentials of the three generators.
pub fn apply_ui1_expm(gamma: &GammaSet, state: &PureState) -> Result<PureState> {
    let [jp, jm, jz] = hopping_generators(state.basis());
    let ez = DMatrix::from_diagonal(&jz.diagonal().map(|d| (gamma.gamma3 * d).exp()));
    let u = expm_nilpotent(&jp, gamma.gamma1) * expm_nilpotent(&jm, gamma.gamma2) * ez;
    finite_product(u, state)
}

/// Resonant hopping propagator `exp(-i lambda' tau (J+ + J-))`, through the
/// spectral decomposition of the Hermitian generator.
pub fn apply_ui1_expm_resonant(
    lambda_dimless: f64,
    tau: f64,
    state: &PureState,
) -> Result<PureState> {
    let [jp, jm, _] = hopping_generators(state.basis());
    let eig = SymmetricEigen::try_new(jp + jm, f64::EPSILON, 10_000).ok_or(
        Error::NumericalFailure("Hermitian eigendecomposition did not converge"),
    )?;
    let phases = eig
        .eigenvalues
        .map(|e| C64::from_polar(1.0, -lambda_dimless * tau * e));
    let u = &eig.eigenvectors * DMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint();
    finite_product(u, state)
}

fn finite_product(u: DMatrix<C64>, state: &PureState) -> Result<PureState> {
    if u.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NumericalFailure("matrix exponential overflowed"));
    }
    Ok(PureState::from_amplitudes(
        Arc::clone(state.basis()),
        u * state.amplitudes(),
    ))
}

/// One cavity's JC factor, ladder by ladder. `ladders` maps `m` to its
/// coefficients; `m = 0` is the identity and needs no entry.
pub fn apply_ujc(
    cavity: Cavity,
    ladders: &BTreeMap<u32, LadderBetaSet>,
    state: &PureState,
) -> Result<PureState> {
    let basis = state.basis();
    let mut out = PureState::zero(Arc::clone(basis));
    for (i, (ket, a)) in state.iter().enumerate() {
        let (n, s) = match cavity {
            Cavity::One => (ket.n1, ket.s1),
            Cavity::Two => (ket.n2, ket.s2),
        };
        let m = n + s.excitation();
        if m == 0 {
            out.amplitudes_mut()[i] += a;
            continue;
        }
        if a == C64::default() {
            continue;
        }
        let beta = ladders.get(&m).ok_or(Error::MissingLadder { cavity, m })?;
        let u = beta.ladder_matrix();
        let with = |photons: u32, level: Level| match cavity {
            Cavity::One => BasisKet {
                n1: photons,
                s1: level,
                ..ket
            },
            Cavity::Two => BasisKet {
                n2: photons,
                s2: level,
                ..ket
            },
        };
        let excited = basis
            .index_of(&with(m - 1, Level::Excited))
            .expect("ladder stays in sector");
        let ground = basis
            .index_of(&with(m, Level::Ground))
            .expect("ladder stays in sector");
        let col = if s == Level::Excited { 0 } else { 1 };
        out.amplitudes_mut()[excited] += u[0][col] * a;
        out.amplitudes_mut()[ground] += u[1][col] * a;
    }
    Ok(out)
}

fn occupied_ladders(psi0: &PureState) -> Vec<LadderKey> {
    let mut ladders = Vec::new();
    for (ket, a) in psi0.iter() {
        if a != C64::default() {
            ladders.push(LadderKey::new(Cavity::One, ket.m1()));
            ladders.push(LadderKey::new(Cavity::Two, ket.m2()));
        }
    }
    ladders
}

/// Coefficient tables plus the sector they act on.
#[derive(Debug, Clone)]
pub struct ProductEvolution {
    params: SimParams,
    basis: Arc<SectorBasis>,
    table: CoefficientTable,
}

impl ProductEvolution {
    /// Tables for every ladder `m = 1..=M` of both cavities.
    pub fn new(params: &SimParams, basis: &Arc<SectorBasis>, tau_grid: &[f64]) -> Result<Self> {
        let ladders: Vec<LadderKey> = Cavity::BOTH
            .iter()
            .flat_map(|&c| (1..=basis.m_total()).map(move |m| LadderKey::new(c, m)))
            .collect();
        Self::with_ladders(params, basis, &ladders, tau_grid, OdeTolerance::default())
    }

    /// Tables only for the ladders occupied by `psi0`, which is all the JC
    /// factors ever see since they act first.
    pub fn for_state(params: &SimParams, psi0: &PureState, tau_grid: &[f64]) -> Result<Self> {
        let ladders = occupied_ladders(psi0);
        Self::with_ladders(
            params,
            psi0.basis(),
            &ladders,
            tau_grid,
            OdeTolerance::default(),
        )
    }

    /// [`ProductEvolution::for_state`] with explicit integrator tolerances.
    pub fn for_state_with_tolerance(
        params: &SimParams,
        psi0: &PureState,
        tau_grid: &[f64],
        tol: OdeTolerance,
    ) -> Result<Self> {
        Self::with_ladders(params, psi0.basis(), &occupied_ladders(psi0), tau_grid, tol)
    }

    fn with_ladders(
        params: &SimParams,
        basis: &Arc<SectorBasis>,
        ladders: &[LadderKey],
        tau_grid: &[f64],
        tol: OdeTolerance,
    ) -> Result<Self> {
        let table = integrate_coefficients(params, ladders, tau_grid, tol)?;
        Ok(Self {
            params: *params,
            basis: Arc::clone(basis),
            table,
        })
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn table(&self) -> &CoefficientTable {
        &self.table
    }

    pub fn tau_grid(&self) -> &[f64] {
        &self.table.tau
    }

    /// `U(tau_i) psi` for grid index `i`.
    pub fn apply(&self, i: usize, psi: &PureState) -> Result<PureState> {
        if psi.basis().m_total() != self.basis.m_total() {
            return Err(Error::BasisMismatch {
                expected: self.basis.m_total(),
                found: psi.basis().m_total(),
            });
        }
        let tau = self.table.tau[i];
        let psi = apply_ujc(Cavity::Two, &self.table.cavity_at(Cavity::Two, i), psi)?;
        let psi = apply_ujc(Cavity::One, &self.table.cavity_at(Cavity::One, i), &psi)?;
        let psi = apply_ui1_sum(&self.table.gammas[i], &psi)?;
        Ok(apply_u0(&self.params, tau, &psi))
    }

    pub fn evolve(&self, psi0: &PureState) -> Result<Vec<PureState>> {
        (0..self.table.tau.len())
            .map(|i| self.apply(i, psi0))
            .collect()
    }
}

/// Product-form states on `tau_grid`.
pub fn evolve_analytic(
    params: &SimParams,
    psi0: &PureState,
    tau_grid: &[f64],
) -> Result<Vec<PureState>> {
    ProductEvolution::for_state(params, psi0, tau_grid)?.evolve(psi0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sector::basis_state;
    use crate::wei_norman::{beta_closed_form_resonant, gamma_closed_form_resonant};
    use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};
    use Level::{Excited as E, Ground as G};

    fn fig_params(g: f64, lambda: f64) -> SimParams {
        SimParams::new(1.0, 1.25, 0.999, 0.999 * 1.25, g, g * 1.25, lambda).unwrap()
    }

    #[test]
    fn u0_identity_at_zero_and_half_period_phase() {
        let p = SimParams::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let b = Arc::new(SectorBasis::new(1));
        let psi = basis_state(&b, BasisKet::new(1, G, 0, G)).unwrap();
        assert_eq!(apply_u0(&p, 0.0, &psi), psi);
        let out = apply_u0(&p, 0.5, &psi);
        let i = b.index_of(&BasisKet::new(1, G, 0, G)).unwrap();
        assert!((out.amplitudes()[i] - c64(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_gamma_is_identity_for_both_routes() {
        let b = Arc::new(SectorBasis::new(3));
        let psi = basis_state(&b, BasisKet::new(1, E, 1, G)).unwrap();
        let g = GammaSet::zero(0.0);
        assert!(apply_ui1_sum(&g, &psi).unwrap().max_abs_diff(&psi) < 1e-15);
        assert!(apply_ui1_expm(&g, &psi).unwrap().max_abs_diff(&psi) < 1e-15);
    }

    #[test]
    fn one_photon_resonant_hop() {
        let b = Arc::new(SectorBasis::new(1));
        let psi = basis_state(&b, BasisKet::new(1, G, 0, G)).unwrap();
        let i10 = b.index_of(&BasisKet::new(1, G, 0, G)).unwrap();
        let i01 = b.index_of(&BasisKet::new(0, G, 1, G)).unwrap();
        for &x in &[0.2, FRAC_PI_4, 1.1] {
            let g = gamma_closed_form_resonant(1.0, x).unwrap();
            let out = apply_ui1_sum(&g, &psi).unwrap();
            assert!((out.amplitudes()[i10] - c64(libm::cos(x), 0.0)).norm() < 1e-14);
            assert!((out.amplitudes()[i01] - c64(0.0, -libm::sin(x))).norm() < 1e-14);
        }
        let dense = apply_ui1_expm_resonant(1.0, FRAC_PI_4, &psi).unwrap();
        assert!((dense.amplitudes()[i10] - c64(FRAC_1_SQRT_2, 0.0)).norm() < 1e-14);
        assert!((dense.amplitudes()[i01] - c64(0.0, -FRAC_1_SQRT_2)).norm() < 1e-14);
    }

    #[test]
    fn photon_limit() {
        let b = Arc::new(SectorBasis::new(21));
        let psi = basis_state(&b, BasisKet::new(21, G, 0, G)).unwrap();
        assert!(matches!(
            apply_ui1_sum(&GammaSet::zero(0.0), &psi),
            Err(Error::OutOfRange { n: 21 })
        ));
    }

    #[test]
    fn ujc_identity_and_vacuum_ladder() {
        let b = Arc::new(SectorBasis::new(2));
        let psi = basis_state(&b, BasisKet::new(0, G, 1, E)).unwrap();
        let ladders: BTreeMap<u32, LadderBetaSet> = (1..=2)
            .map(|m| (m, LadderBetaSet::identity(Cavity::Two, m, 0.0)))
            .collect();
        assert_eq!(apply_ujc(Cavity::Two, &ladders, &psi).unwrap(), psi);
        // Cavity one is in |0,g>: untouched even without any table.
        assert_eq!(apply_ujc(Cavity::One, &BTreeMap::new(), &psi).unwrap(), psi);
        assert!(matches!(
            apply_ujc(Cavity::Two, &BTreeMap::new(), &psi),
            Err(Error::MissingLadder {
                cavity: Cavity::Two,
                m: 2
            })
        ));
    }

    #[test]
    fn ujc_full_transfer_near_quarter_period() {
        let b = Arc::new(SectorBasis::new(1));
        let psi = basis_state(&b, BasisKet::new(0, E, 0, G)).unwrap();
        let kappa = 1.0;
        let beta = beta_closed_form_resonant(Cavity::One, 1, kappa, FRAC_PI_2 - 1e-5).unwrap();
        let out = apply_ujc(Cavity::One, &BTreeMap::from([(1, beta)]), &psi).unwrap();
        let ig = b.index_of(&BasisKet::new(1, G, 0, G)).unwrap();
        let ie = b.index_of(&BasisKet::new(0, E, 0, G)).unwrap();
        assert!((out.amplitudes()[ig] - c64(0.0, -1.0)).norm() < 1e-8);
        assert!(out.amplitudes()[ie].norm() < 2e-5);
    }

    #[test]
    fn zero_couplings_give_free_phases_only() {
        let p = fig_params(0.0, 0.0);
        let b = Arc::new(SectorBasis::new(3));
        let psi = basis_state(&b, BasisKet::new(0, E, 2, G)).unwrap();
        let grid = [0.0, 0.3, 2.0];
        let states = evolve_analytic(&p, &psi, &grid).unwrap();
        assert!(states[0].max_abs_diff(&psi) < 1e-15);
        for (t, s) in grid.iter().zip(&states) {
            assert!(s.max_abs_diff(&apply_u0(&p, *t, &psi)) < 1e-15);
        }
    }

    #[test]
    fn sector_ladders_cover_every_m() {
        let p = fig_params(0.04, 1e-3);
        let b = Arc::new(SectorBasis::new(3));
        let evo = ProductEvolution::new(&p, &b, &[0.0, 1.0]).unwrap();
        for c in Cavity::BOTH {
            for m in 1..=3 {
                assert!(evo.table().ladder(c, m).is_some());
            }
        }
        let other = basis_state(&Arc::new(SectorBasis::new(2)), BasisKet::new(0, E, 1, G)).unwrap();
        assert!(matches!(
            evo.apply(0, &other),
            Err(Error::BasisMismatch { .. })
        ));
    }
}
