//! Hamiltonian parameters in units of the first cavity frequency.
//!
//! Every frequency is stored divided by `omega1`, so the stored `omega1` is
//! always `1.0`. Time is measured in periods of cavity one, `tau = t / T1`,
//! which puts a factor `2 pi` in front of every frequency-times-time phase.

use core::f64::consts::TAU;

use crate::error::{Error, Result};

/// Two coupled Jaynes-Cummings cavities with photon hopping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    pub omega1: f64,
    pub omega2: f64,
    /// Qubit transition frequency in cavity one.
    pub qubit1: f64,
    /// Qubit transition frequency in cavity two.
    pub qubit2: f64,
    pub g1: f64,
    pub g2: f64,
    /// Cavity-cavity hopping strength.
    pub lambda: f64,
}

impl SimParams {
    /// Builds a parameter set from frequencies in any common unit, normalizing
    /// by `omega1`.
    pub fn new(
        omega1: f64,
        omega2: f64,
        qubit1: f64,
        qubit2: f64,
        g1: f64,
        g2: f64,
        lambda: f64,
    ) -> Result<Self> {
        let raw = [omega1, omega2, qubit1, qubit2, g1, g2, lambda];
        if raw.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("all frequencies must be finite"));
        }
        if omega1 <= 0.0 {
            return Err(Error::InvalidParams("omega1 must be positive"));
        }
        if g1 < 0.0 || g2 < 0.0 || lambda < 0.0 {
            return Err(Error::InvalidParams("couplings must be non-negative"));
        }
        if omega2 < 0.0 || qubit1 < 0.0 || qubit2 < 0.0 {
            return Err(Error::InvalidParams("frequencies must be non-negative"));
        }
        Ok(Self {
            omega1: 1.0,
            omega2: omega2 / omega1,
            qubit1: qubit1 / omega1,
            qubit2: qubit2 / omega1,
            g1: g1 / omega1,
            g2: g2 / omega1,
            lambda: lambda / omega1,
        })
    }

    /// Same parameters with every coupling switched off.
    pub fn uncoupled(self) -> Self {
        Self {
            g1: 0.0,
            g2: 0.0,
            lambda: 0.0,
            ..self
        }
    }

    /// Hopping rate in inverse cavity-one periods, `2 pi lambda / omega1`.
    pub fn hopping_rate(&self) -> f64 {
        TAU * self.lambda
    }

    /// Cavity-cavity detuning phase `2 pi (omega1 - omega2) tau`.
    pub fn hop_phase(&self, tau: f64) -> f64 {
        TAU * (self.omega1 - self.omega2) * tau
    }

    /// Qubit-cavity detuning phase `2 pi (Omega_i - omega_i) tau` for cavity one.
    pub fn detuning_phase1(&self, tau: f64) -> f64 {
        TAU * (self.qubit1 - self.omega1) * tau
    }

    /// Qubit-cavity detuning phase `2 pi (Omega_i - omega_i) tau` for cavity two.
    pub fn detuning_phase2(&self, tau: f64) -> f64 {
        TAU * (self.qubit2 - self.omega2) * tau
    }
}

/// Error controls for the adaptive coefficient integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeTolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for OdeTolerance {
    fn default() -> Self {
        Self {
            rtol: 1e-13,
            atol: 1e-15,
        }
    }
}
