//! Parameter sets of the reference study.
//!
//! All share `omega1 / 2 pi = 4 GHz`, `omega2 / 2 pi = 5 GHz`,
//! `Omega_i = 0.999 omega_i`, couplings `g_i = r omega_i`, and start from
//! `|0, e> (x) |2, g>`.

use crate::params::SimParams;
use crate::sector::{BasisKet, Level};

pub const OMEGA1_GHZ: f64 = 4.0;
pub const OMEGA2_GHZ: f64 = 5.0;
pub const QUBIT_RATIO: f64 = 0.999;

pub const INITIAL_KET: BasisKet = BasisKet::new(0, Level::Excited, 2, Level::Ground);

/// Grid spacing shared by every preset window.
pub const DEFAULT_STEP: f64 = 0.05;

/// Shared frequencies with `g_i = g_ratio * omega_i` and `lambda = lambda_ratio * omega1`.
pub fn study_params(g_ratio: f64, lambda_ratio: f64) -> SimParams {
    let omega2 = OMEGA2_GHZ / OMEGA1_GHZ;
    SimParams {
        omega1: 1.0,
        omega2,
        qubit1: QUBIT_RATIO,
        qubit2: QUBIT_RATIO * omega2,
        g1: g_ratio,
        g2: g_ratio * omega2,
        lambda: lambda_ratio,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    /// Strong atom-field coupling, weak hopping.
    Fig1,
    /// Weak atom-field coupling, strong hopping.
    Fig2,
    /// Comparable couplings.
    Fig3,
}

impl Figure {
    pub const ALL: [Figure; 3] = [Figure::Fig1, Figure::Fig2, Figure::Fig3];

    pub fn params(self) -> SimParams {
        match self {
            Figure::Fig1 => study_params(0.04, 1e-3),
            Figure::Fig2 => study_params(0.001, 0.25),
            Figure::Fig3 => study_params(0.04, 0.08),
        }
    }

    pub fn tau_max(self) -> f64 {
        match self {
            Figure::Fig2 => 50.0,
            Figure::Fig1 | Figure::Fig3 => 100.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// One row of the validity table, with the regime the reference study found.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub g_ratio: f64,
    pub lambda_ratio: f64,
    pub quantitative: bool,
}

impl TableRow {
    pub fn params(&self) -> SimParams {
        study_params(self.g_ratio, self.lambda_ratio)
    }
}

pub const TABLE_ROWS: [TableRow; 5] = [
    TableRow {
        g_ratio: 0.04,
        lambda_ratio: 1e-3,
        quantitative: true,
    },
    TableRow {
        g_ratio: 0.001,
        lambda_ratio: 0.25,
        quantitative: true,
    },
    TableRow {
        g_ratio: 0.01,
        lambda_ratio: 0.02,
        quantitative: true,
    },
    TableRow {
        g_ratio: 0.4,
        lambda_ratio: 0.001,
        quantitative: true,
    },
    TableRow {
        g_ratio: 0.04,
        lambda_ratio: 0.08,
        quantitative: false,
    },
];

/// Table comparison window.
pub const TABLE_TAU_MAX: f64 = 100.0;

/// Uniform grid `0, step, 2 step, ...` up to `tau_max` inclusive.
pub fn uniform_grid(tau_max: f64, step: f64) -> alloc::vec::Vec<f64> {
    let n = libm::round(tau_max / step) as usize;
    (0..=n)
        .map(|k| k as f64 * step)
        .filter(|t| *t <= tau_max + 1e-12)
        .collect()
}
