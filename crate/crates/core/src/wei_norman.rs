//! Product-of-exponentials coefficients.
//!
//! The hopping factor is `U1 = exp(g1 J+) exp(g2 J-) exp(g3 Jz)` with
//! `J+ = a1 a2^+`, `J- = a1^+ a2`, `Jz = n1 - n2`. Each generalized JC factor
//! acts on the two-dimensional ladders `{|m-1, e>, |m, g>}` of one cavity as
//! `exp(bz sz) exp(b+ b^+) exp(b- b)`.
//!
//! Both families of coefficients obey nonlinear ODEs with zero initial
//! values. They are integrated together as one system so the JC
//! coefficients see the hopping coefficients without interpolation.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::fmt;

use crate::error::{Error, Result};
use crate::ode::{Dopri5, OdeFailure};
use crate::params::{OdeTolerance, SimParams};
use crate::{c64, C64};

/// Coordinate magnitude beyond which the factorization is treated as singular.
pub const COORDINATE_LIMIT: f64 = 1e6;
/// Bound on exponent-type coordinates (`g3`, `bz`); `e^700` is near f64 overflow.
pub const EXPONENT_LIMIT: f64 = 700.0;

const I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cavity {
    One,
    Two,
}

impl Cavity {
    pub const BOTH: [Cavity; 2] = [Cavity::One, Cavity::Two];
}

impl fmt::Display for Cavity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cavity::One => f.write_str("1"),
            Cavity::Two => f.write_str("2"),
        }
    }
}

/// Row-major 2x2 complex matrix.
pub type Mat2 = [[C64; 2]; 2];

fn unitarity_residual_2x2(u: &Mat2) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            let dot = u[0][r].conj() * u[0][c] + u[1][r].conj() * u[1][c];
            let want = if r == c { ONE } else { C64::default() };
            worst = worst.max((dot - want).norm());
        }
    }
    worst
}

/// Hopping-factor coefficients at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSet {
    pub tau: f64,
    pub gamma1: C64,
    pub gamma2: C64,
    pub gamma3: C64,
}

impl GammaSet {
    pub fn zero(tau: f64) -> Self {
        Self {
            tau,
            gamma1: C64::default(),
            gamma2: C64::default(),
            gamma3: C64::default(),
        }
    }

    /// `(1 + g1 g2) e^{-g3}`, the coefficient multiplying `a1^+` in `U1^+ a1^+ U1`.
    pub fn dressed(&self) -> C64 {
        (ONE + self.gamma1 * self.gamma2) * (-self.gamma3).exp()
    }

    /// The one-photon block of `U1` on `(|0,1>, |1,0>)`.
    pub fn su2_matrix(&self) -> Mat2 {
        let e3 = self.gamma3.exp();
        [
            [self.dressed(), self.gamma1 * e3],
            [self.gamma2 * (-self.gamma3).exp(), e3],
        ]
    }

    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual_2x2(&self.su2_matrix())
    }

    /// `|(1 + g1 g2) e^{-g3} - conj(e^{g3})|`.
    pub fn hermiticity_residual(&self) -> f64 {
        (self.dressed() - self.gamma3.exp().conj()).norm()
    }
}

/// Right-hand side of the hopping-coefficient ODEs in periods of cavity one.
pub fn gamma_rhs(tau: f64, gamma: &GammaSet, params: &SimParams) -> [C64; 3] {
    let rate = params.hopping_rate();
    if rate == 0.0 {
        return [C64::default(); 3];
    }
    let ph = C64::from_polar(1.0, params.hop_phase(tau));
    let g1 = gamma.gamma1;
    let g2 = gamma.gamma2;
    let k = -I * rate;
    [
        k * (ph.conj() - g1 * g1 * ph),
        k * (ONE + g1 * g2 * 2.0) * ph,
        k * g1 * ph,
    ]
}

/// Closed-form hopping coefficients for `omega1 == omega2`:
/// `(-i tan x, -(i/2) sin 2x, ln cos x)` with `x = lambda' tau`.
pub fn gamma_closed_form_resonant(lambda_dimless: f64, tau: f64) -> Result<GammaSet> {
    let x = lambda_dimless * tau;
    let (s, c) = (libm::sin(x), libm::cos(x));
    if c.abs() * COORDINATE_LIMIT < s.abs() {
        return Err(Error::FactorizationBreakdown {
            tau,
            reason: "tangent pole of gamma1",
        });
    }
    Ok(GammaSet {
        tau,
        gamma1: c64(0.0, -s / c),
        gamma2: c64(0.0, -0.5 * libm::sin(2.0 * x)),
        gamma3: c64(c, 0.0).ln(),
    })
}

/// Effective JC coefficients after the hopping transformation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiSet {
    /// Multiplies `b1^+`.
    pub phi11: C64,
    /// Multiplies `b1`.
    pub phi12: C64,
    /// Multiplies `b2^+`.
    pub phi21: C64,
    /// Multiplies `b2`.
    pub phi22: C64,
}

impl PhiSet {
    pub fn raising(&self, cavity: Cavity) -> C64 {
        match cavity {
            Cavity::One => self.phi11,
            Cavity::Two => self.phi21,
        }
    }

    pub fn lowering(&self, cavity: Cavity) -> C64 {
        match cavity {
            Cavity::One => self.phi12,
            Cavity::Two => self.phi22,
        }
    }

    /// Largest violation of `phi11 = conj(phi12)`, `phi22 = conj(phi21)`.
    pub fn hermiticity_residual(&self) -> f64 {
        (self.phi11 - self.phi12.conj())
            .norm()
            .max((self.phi22 - self.phi21.conj()).norm())
    }
}

pub fn phi_coeffs(tau: f64, gamma: &GammaSet, params: &SimParams) -> PhiSet {
    let dressed = gamma.dressed();
    let e3 = gamma.gamma3.exp();
    let d1 = C64::from_polar(1.0, params.detuning_phase1(tau));
    let d2 = C64::from_polar(1.0, params.detuning_phase2(tau));
    PhiSet {
        phi11: dressed * d1.conj(),
        phi12: e3 * d1,
        phi21: e3 * d2.conj(),
        phi22: dressed * d2,
    }
}

/// One cavity's JC-factor coefficients on the ladder with `m` excitations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderBetaSet {
    pub cavity: Cavity,
    pub m: u32,
    pub tau: f64,
    pub bz: C64,
    pub bp: C64,
    pub bm: C64,
}

impl LadderBetaSet {
    pub fn identity(cavity: Cavity, m: u32, tau: f64) -> Self {
        Self {
            cavity,
            m,
            tau,
            bz: C64::default(),
            bp: C64::default(),
            bm: C64::default(),
        }
    }

    /// Ladder propagator on the ordered pair `(|m-1, e>, |m, g>)`.
    pub fn ladder_matrix(&self) -> Mat2 {
        let ez = self.bz.exp();
        let emz = (-self.bz).exp();
        [
            [ez, ez * self.bm],
            [self.bp * emz, emz * (ONE + self.bp * self.bm)],
        ]
    }

    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual_2x2(&self.ladder_matrix())
    }
}

/// Right-hand side of the JC-factor ODEs, returned as `(bz', b+', b-')`.
///
/// With `k = 2 pi g sqrt(m)`:
/// `b-' = -i k phi- e^{-2 bz}`, `bz' = b+ b-'`, `b+' = -i k phi+ e^{2 bz} + b+^2 b-'`.
pub fn beta_rhs(
    _tau: f64,
    beta: &LadderBetaSet,
    phi: &PhiSet,
    params: &SimParams,
) -> Result<[C64; 3]> {
    if beta.m == 0 {
        return Err(Error::IdentityLadder {
            cavity: beta.cavity,
        });
    }
    Ok(beta_rhs_raw(
        ladder_rate(params, beta.cavity, beta.m),
        beta.cavity,
        beta.bz,
        beta.bp,
        phi,
    ))
}

fn ladder_rate(params: &SimParams, cavity: Cavity, m: u32) -> f64 {
    let g = match cavity {
        Cavity::One => params.g1,
        Cavity::Two => params.g2,
    };
    TAU * g * libm::sqrt(m as f64)
}

fn beta_rhs_raw(kappa: f64, cavity: Cavity, bz: C64, bp: C64, phi: &PhiSet) -> [C64; 3] {
    if kappa == 0.0 {
        return [C64::default(); 3];
    }
    let k = -I * kappa;
    let e2z = (bz * 2.0).exp();
    let dm = k * phi.lowering(cavity) / e2z;
    let dz = bp * dm;
    let dp = k * phi.raising(cavity) * e2z + bp * bp * dm;
    [dz, dp, dm]
}

/// Resonant single-JC closed form with constant unit `phi`:
/// `bz = ln cos x`, `b+ = -(i/2) sin 2x`, `b- = -i tan x`, `x = kappa tau`.
pub fn beta_closed_form_resonant(
    cavity: Cavity,
    m: u32,
    kappa: f64,
    tau: f64,
) -> Result<LadderBetaSet> {
    let x = kappa * tau;
    let (s, c) = (libm::sin(x), libm::cos(x));
    if c.abs() * COORDINATE_LIMIT < s.abs() {
        return Err(Error::FactorizationBreakdown {
            tau,
            reason: "tangent pole of b-",
        });
    }
    Ok(LadderBetaSet {
        cavity,
        m,
        tau,
        bz: c64(c, 0.0).ln(),
        bp: c64(0.0, -0.5 * libm::sin(2.0 * x)),
        bm: c64(0.0, -s / c),
    })
}

/// A `(cavity, m)` ladder, `m >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LadderKey {
    pub cavity: Cavity,
    pub m: u32,
}

impl LadderKey {
    pub fn new(cavity: Cavity, m: u32) -> Self {
        Self { cavity, m }
    }
}

/// Integrated coefficients on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub tau: Vec<f64>,
    pub gammas: Vec<GammaSet>,
    pub betas: BTreeMap<LadderKey, Vec<LadderBetaSet>>,
}

impl CoefficientTable {
    pub fn ladder(&self, cavity: Cavity, m: u32) -> Option<&[LadderBetaSet]> {
        self.betas
            .get(&LadderKey::new(cavity, m))
            .map(Vec::as_slice)
    }

    /// All ladders of one cavity at grid index `i`, keyed by `m`.
    pub fn cavity_at(&self, cavity: Cavity, i: usize) -> BTreeMap<u32, LadderBetaSet> {
        self.betas
            .iter()
            .filter(|(k, _)| k.cavity == cavity)
            .map(|(k, series)| (k.m, series[i]))
            .collect()
    }
}

fn check_coordinates(tau: f64, y: &[C64]) -> Result<()> {
    let breakdown = |reason| Err(Error::FactorizationBreakdown { tau, reason });
    if y.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return breakdown("non-finite coefficient");
    }
    if y[0].norm() > COORDINATE_LIMIT || y[1].norm() > COORDINATE_LIMIT {
        return breakdown("|gamma1| or |gamma2| exceeds 1e6");
    }
    if y[2].norm() > EXPONENT_LIMIT {
        return breakdown("|gamma3| exceeds 700");
    }
    for ladder in y[3..].chunks_exact(3) {
        if ladder[0].norm() > EXPONENT_LIMIT {
            return breakdown("|beta_z| exceeds 700");
        }
        if ladder[1].norm() > COORDINATE_LIMIT || ladder[2].norm() > COORDINATE_LIMIT {
            return breakdown("|beta+| or |beta-| exceeds 1e6");
        }
    }
    Ok(())
}

/// Integrates the hopping coefficients jointly with the JC coefficients of
/// every ladder in `ladders`, starting from zero at `tau = 0`.
///
/// `grid` must be sorted and non-negative. Ladders with `m = 0` are skipped
/// (their factor is the identity); duplicates are merged.
pub fn integrate_coefficients(
    params: &SimParams,
    ladders: &[LadderKey],
    grid: &[f64],
    tol: OdeTolerance,
) -> Result<CoefficientTable> {
    crate::exact::check_grid(grid)?;
    let mut keys: Vec<LadderKey> = ladders.iter().copied().filter(|k| k.m > 0).collect();
    keys.sort();
    keys.dedup();
    let rates: Vec<f64> = keys
        .iter()
        .map(|k| ladder_rate(params, k.cavity, k.m))
        .collect();

    let mut full_grid = Vec::with_capacity(grid.len() + 1);
    let prepend = grid.first().is_some_and(|t| *t > 0.0);
    if prepend {
        full_grid.push(0.0);
    }
    full_grid.extend_from_slice(grid);

    let dim = 3 + 3 * keys.len();
    let y0 = alloc::vec![C64::default(); dim];
    let rhs = |tau: f64, y: &[C64], dy: &mut [C64]| {
        let gamma = GammaSet {
            tau,
            gamma1: y[0],
            gamma2: y[1],
            gamma3: y[2],
        };
        dy[..3].copy_from_slice(&gamma_rhs(tau, &gamma, params));
        if keys.is_empty() {
            return;
        }
        let phi = phi_coeffs(tau, &gamma, params);
        for (j, key) in keys.iter().enumerate() {
            let o = 3 + 3 * j;
            let d = beta_rhs_raw(rates[j], key.cavity, y[o], y[o + 1], &phi);
            dy[o..o + 3].copy_from_slice(&d);
        }
    };
    let samples = Dopri5::new(tol)
        .solve(rhs, &y0, &full_grid, check_coordinates)
        .map_err(|failure| match failure {
            OdeFailure::Guard(e) => e,
            OdeFailure::StepUnderflow { t } => Error::FactorizationBreakdown {
                tau: t,
                reason: "step size underflow near a coordinate pole",
            },
            OdeFailure::NonFinite { t } => Error::FactorizationBreakdown {
                tau: t,
                reason: "non-finite coefficient",
            },
            OdeFailure::TooManySteps { .. } => {
                Error::NumericalFailure("coefficient integration exceeded the step budget")
            }
        })?;
    let samples = if prepend { &samples[1..] } else { &samples[..] };

    let gammas = grid
        .iter()
        .zip(samples)
        .map(|(&tau, y)| GammaSet {
            tau,
            gamma1: y[0],
            gamma2: y[1],
            gamma3: y[2],
        })
        .collect();
    let betas = keys
        .iter()
        .enumerate()
        .map(|(j, key)| {
            let o = 3 + 3 * j;
            let series = grid
                .iter()
                .zip(samples)
                .map(|(&tau, y)| LadderBetaSet {
                    cavity: key.cavity,
                    m: key.m,
                    tau,
                    bz: y[o],
                    bp: y[o + 1],
                    bm: y[o + 2],
                })
                .collect();
            (*key, series)
        })
        .collect();
    Ok(CoefficientTable {
        tau: grid.to_vec(),
        gammas,
        betas,
    })
}

/// Hopping coefficients alone.
pub fn integrate_gamma(params: &SimParams, tau_grid: &[f64]) -> Result<Vec<GammaSet>> {
    integrate_coefficients(params, &[], tau_grid, OdeTolerance::default()).map(|t| t.gammas)
}

/// JC coefficients of one ladder, integrated jointly with the hopping
/// coefficients. `m = 0` yields [`Error::IdentityLadder`].
pub fn integrate_beta(
    params: &SimParams,
    cavity: Cavity,
    m: u32,
    tau_grid: &[f64],
) -> Result<Vec<LadderBetaSet>> {
    if m == 0 {
        return Err(Error::IdentityLadder { cavity });
    }
    let key = LadderKey::new(cavity, m);
    let mut table = integrate_coefficients(params, &[key], tau_grid, OdeTolerance::default())?;
    Ok(table.betas.remove(&key).unwrap_or_default())
}
