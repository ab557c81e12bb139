//! Reference evolution under the full lab-frame Hamiltonian.
//!
//! `H / omega1 = n1 + (omega2) n2 + (Omega1/2) sz1 + (Omega2/2) sz2
//!   + g1 (a1 sp1 + a1^+ sm1) + g2 (a2 sp2 + a2^+ sm2) + lambda (a1 a2^+ + a1^+ a2)`
//!
//! The Hamiltonian is time independent, so the primary route diagonalizes it
//! once inside the sector. A fixed-step RK4 integrator serves as an
//! independent cross-check.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::params::SimParams;
use crate::sector::{BasisKet, Level, PureState, SectorBasis};
use crate::{c64, C64};

/// Dense Hermitian matrix on a sector basis, in units of `omega1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    entries: DMatrix<C64>,
}

impl HermitianMatrix {
    /// Wraps `entries` after checking Hermiticity to 1e-12.
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::NumericalFailure("matrix is not square"));
        }
        let m = Self { entries };
        if m.hermiticity_residual() > 1e-12 {
            return Err(Error::NumericalFailure("matrix is not Hermitian"));
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    /// `max |H - H^+|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let adj = self.entries.adjoint();
        max_abs(&(&self.entries - adj))
    }

    /// `<psi|H|psi>`, real for Hermitian `H`.
    pub fn energy(&self, state: &PureState) -> f64 {
        let v = state.amplitudes();
        v.dotc(&(&self.entries * v)).re
    }
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn photon_lower(n: u32) -> Option<(u32, f64)> {
    (n > 0).then(|| (n - 1, libm::sqrt(n as f64)))
}

/// Sector matrix of the full Hamiltonian. Only the "lowering" half of each
/// coupling is enumerated; its adjoint fills the mirror entry.
pub fn build_hamiltonian(params: &SimParams, basis: &SectorBasis) -> HermitianMatrix {
    let dim = basis.dim();
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    let mut lowered = Vec::new();
    for (i, ket) in basis.kets().iter().enumerate() {
        let diag = params.omega1 * ket.n1 as f64
            + params.omega2 * ket.n2 as f64
            + 0.5 * params.qubit1 * ket.s1.sigma_z()
            + 0.5 * params.qubit2 * ket.s2.sigma_z();
        h[(i, i)] += c64(diag, 0.0);
        lowered.clear();

        // a1 sp1: |n1, g> -> sqrt(n1) |n1 - 1, e>
        if ket.s1 == Level::Ground && params.g1 != 0.0 {
            if let Some((n, amp)) = photon_lower(ket.n1) {
                lowered.push((
                    BasisKet {
                        n1: n,
                        s1: Level::Excited,
                        ..*ket
                    },
                    params.g1 * amp,
                ));
            }
        }
        if ket.s2 == Level::Ground && params.g2 != 0.0 {
            if let Some((n, amp)) = photon_lower(ket.n2) {
                lowered.push((
                    BasisKet {
                        n2: n,
                        s2: Level::Excited,
                        ..*ket
                    },
                    params.g2 * amp,
                ));
            }
        }
        // a1 a2^+: |n1, n2> -> sqrt(n1 (n2 + 1)) |n1 - 1, n2 + 1>
        if params.lambda != 0.0 {
            if let Some((n, amp)) = photon_lower(ket.n1) {
                let raise = libm::sqrt((ket.n2 + 1) as f64);
                let to = BasisKet {
                    n1: n,
                    n2: ket.n2 + 1,
                    ..*ket
                };
                lowered.push((to, params.lambda * amp * raise));
            }
        }
        for &(to, amp) in &lowered {
            let j = basis.index_of(&to).expect("coupling leaves the sector");
            h[(j, i)] += c64(amp, 0.0);
            h[(i, j)] += c64(amp, 0.0);
        }
    }
    HermitianMatrix { entries: h }
}

/// Spectral decomposition `H = V D V^+` together with the initial state
/// expressed in the eigenbasis.
#[derive(Debug, Clone)]
pub struct ExactEvolution {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<C64>,
    psi0: PureState,
    coeffs: DVector<C64>,
}

impl ExactEvolution {
    pub fn new(params: &SimParams, psi0: &PureState) -> Result<Self> {
        let h = build_hamiltonian(params, psi0.basis());
        Self::from_hamiltonian(&h, psi0)
    }

    pub fn from_hamiltonian(h: &HermitianMatrix, psi0: &PureState) -> Result<Self> {
        if h.dim() != psi0.basis().dim() {
            return Err(Error::NumericalFailure(
                "Hamiltonian and state dimensions differ",
            ));
        }
        let eig = SymmetricEigen::try_new(h.entries.clone(), f64::EPSILON, 10_000).ok_or(
            Error::NumericalFailure("Hermitian eigendecomposition did not converge"),
        )?;
        let evolution = Self {
            coeffs: eig.eigenvectors.adjoint() * psi0.amplitudes(),
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
            psi0: psi0.clone(),
        };
        let scale = max_abs(h.entries()).max(1.0);
        if evolution.reconstruction_residual(h) > 1e-9 * scale
            || evolution.unitarity_residual() > 1e-9
        {
            return Err(Error::NumericalFailure(
                "eigendecomposition residual too large",
            ));
        }
        Ok(evolution)
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.eigenvectors
    }

    pub fn psi0(&self) -> &PureState {
        &self.psi0
    }

    /// `max |V D V^+ - H|`.
    pub fn reconstruction_residual(&self, h: &HermitianMatrix) -> f64 {
        let d = DMatrix::from_diagonal(&self.eigenvalues.map(|e| c64(e, 0.0)));
        let rebuilt = &self.eigenvectors * d * self.eigenvectors.adjoint();
        max_abs(&(rebuilt - h.entries()))
    }

    /// `max |V^+ V - 1|`.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.eigenvectors.ncols();
        let gram = self.eigenvectors.adjoint() * &self.eigenvectors;
        max_abs(&(gram - DMatrix::<C64>::identity(n, n)))
    }

    /// `psi(tau) = V exp(-i 2 pi D tau) V^+ psi(0)`.
    pub fn state_at(&self, tau: f64) -> PureState {
        let rotated = DVector::from_iterator(
            self.coeffs.len(),
            self.coeffs
                .iter()
                .zip(self.eigenvalues.iter())
                .map(|(c, e)| c * C64::from_polar(1.0, -TAU * e * tau)),
        );
        PureState::from_amplitudes(Arc::clone(self.psi0.basis()), &self.eigenvectors * rotated)
    }
}

pub(crate) fn check_grid(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid("times must be finite"));
    }
    if times.first().is_some_and(|t| *t < 0.0) {
        return Err(Error::InvalidGrid("times must be non-negative"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidGrid("times must be sorted ascending"));
    }
    Ok(())
}

/// Exact states on `times` via the eigendecomposition of the sector Hamiltonian.
pub fn propagate_exact(
    params: &SimParams,
    psi0: &PureState,
    times: &[f64],
) -> Result<Vec<PureState>> {
    check_grid(times)?;
    let evolution = ExactEvolution::new(params, psi0)?;
    Ok(times.iter().map(|&t| evolution.state_at(t)).collect())
}

/// Default RK4 step in periods of cavity one.
pub const RK_DEFAULT_STEP: f64 = 1e-3;

const RK_NORM_DRIFT_LIMIT: f64 = 1e-4;

/// Classical RK4 on `i d psi / d tau = 2 pi H psi`.
///
/// The mean diagonal energy is removed before stepping and restored as an
/// exact global phase, which keeps the stepped spectrum centred on zero.
/// Each interval between grid points is split into equal substeps no longer
/// than `step`.
pub fn propagate_rk_check(
    params: &SimParams,
    psi0: &PureState,
    times: &[f64],
    step: f64,
) -> Result<Vec<PureState>> {
    check_grid(times)?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidGrid("RK4 step must be positive"));
    }
    let h = build_hamiltonian(params, psi0.basis());
    let dim = h.dim();
    let shift = if dim == 0 {
        0.0
    } else {
        h.entries().diagonal().iter().map(|z| z.re).sum::<f64>() / dim as f64
    };
    // d phi / d tau = generator * phi
    let generator =
        (h.entries() - DMatrix::<C64>::identity(dim, dim) * c64(shift, 0.0)) * c64(0.0, -TAU);

    let norm0 = psi0.norm();
    let mut phi = psi0.amplitudes().clone();
    let mut tau = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        let span = target - tau;
        if span > 0.0 {
            let n = libm::ceil(span / step).max(1.0) as usize;
            let dt = span / n as f64;
            for _ in 0..n {
                phi = rk4_step(&generator, &phi, dt);
            }
            tau = target;
        }
        let drift = (phi.norm() - norm0).abs();
        if drift.is_nan() || drift > RK_NORM_DRIFT_LIMIT {
            return Err(Error::Instability { tau, drift });
        }
        let phase = C64::from_polar(1.0, -TAU * shift * tau);
        out.push(PureState::from_amplitudes(
            Arc::clone(psi0.basis()),
            &phi * phase,
        ));
    }
    Ok(out)
}

fn rk4_step(a: &DMatrix<C64>, y: &DVector<C64>, dt: f64) -> DVector<C64> {
    let half = c64(0.5 * dt, 0.0);
    let k1 = a * y;
    let k2 = a * (y + &k1 * half);
    let k3 = a * (y + &k2 * half);
    let k4 = a * (y + &k3 * c64(dt, 0.0));
    y + (k1 + (k2 + k3) * c64(2.0, 0.0) + k4) * c64(dt / 6.0, 0.0)
}
