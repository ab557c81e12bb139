//! Fixed-excitation sector of two cavity modes and two qubits.
//!
//! The full Hamiltonian conserves `M = n1 + s1 + n2 + s2`, so every
//! propagation happens inside one finite sector with no photon-number
//! truncation.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::C64;

/// Two-level atom state. `Ground < Excited`, which fixes the canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    Ground,
    Excited,
}

impl Level {
    pub fn excitation(self) -> u32 {
        match self {
            Level::Ground => 0,
            Level::Excited => 1,
        }
    }

    /// Eigenvalue of sigma_z.
    pub fn sigma_z(self) -> f64 {
        match self {
            Level::Ground => -1.0,
            Level::Excited => 1.0,
        }
    }

    pub fn from_excitation(s: u32) -> Option<Self> {
        match s {
            0 => Some(Level::Ground),
            1 => Some(Level::Excited),
            _ => None,
        }
    }
}

/// `|n1, s1> (x) |n2, s2>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisKet {
    pub n1: u32,
    pub s1: Level,
    pub n2: u32,
    pub s2: Level,
}

impl BasisKet {
    pub const fn new(n1: u32, s1: Level, n2: u32, s2: Level) -> Self {
        Self { n1, s1, n2, s2 }
    }

    /// Excitations held by cavity one (photons plus atom).
    pub fn m1(&self) -> u32 {
        self.n1 + self.s1.excitation()
    }

    pub fn m2(&self) -> u32 {
        self.n2 + self.s2.excitation()
    }

    pub fn m_total(&self) -> u32 {
        self.m1() + self.m2()
    }
}

impl fmt::Display for BasisKet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lbl = |s: Level| if s == Level::Excited { 'e' } else { 'g' };
        write!(
            f,
            "|{},{};{},{}>",
            self.n1,
            lbl(self.s1),
            self.n2,
            lbl(self.s2)
        )
    }
}

/// All kets with a given total excitation number, in lexicographic
/// `(n1, s1, n2, s2)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorBasis {
    m_total: u32,
    kets: Vec<BasisKet>,
    index: BTreeMap<BasisKet, usize>,
}

impl SectorBasis {
    pub fn new(m_total: u32) -> Self {
        let mut kets = Vec::new();
        for n1 in 0..=m_total {
            for s1 in [Level::Ground, Level::Excited] {
                let used = n1 + s1.excitation();
                if used > m_total {
                    continue;
                }
                // n2 + s2 = m_total - used
                let rest = m_total - used;
                for n2 in 0..=rest {
                    for s2 in [Level::Ground, Level::Excited] {
                        if n2 + s2.excitation() == rest {
                            kets.push(BasisKet::new(n1, s1, n2, s2));
                        }
                    }
                }
            }
        }
        let index = kets.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        Self {
            m_total,
            kets,
            index,
        }
    }

    pub fn m_total(&self) -> u32 {
        self.m_total
    }

    pub fn dim(&self) -> usize {
        self.kets.len()
    }

    pub fn kets(&self) -> &[BasisKet] {
        &self.kets
    }

    pub fn ket(&self, i: usize) -> BasisKet {
        self.kets[i]
    }

    pub fn index_of(&self, ket: &BasisKet) -> Option<usize> {
        self.index.get(ket).copied()
    }

    pub fn contains(&self, ket: &BasisKet) -> bool {
        self.index.contains_key(ket)
    }
}

/// Canonical sector enumeration.
pub fn build_sector_basis(m_total: u32) -> SectorBasis {
    SectorBasis::new(m_total)
}

/// Complex amplitudes over a shared sector basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    basis: Arc<SectorBasis>,
    amp: DVector<C64>,
}

impl PureState {
    pub fn from_amplitudes(basis: Arc<SectorBasis>, amp: DVector<C64>) -> Self {
        assert_eq!(basis.dim(), amp.len(), "amplitude count must match basis");
        Self { basis, amp }
    }

    pub fn zero(basis: Arc<SectorBasis>) -> Self {
        let dim = basis.dim();
        Self {
            basis,
            amp: DVector::zeros(dim),
        }
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amp
    }

    pub fn amplitudes_mut(&mut self) -> &mut DVector<C64> {
        &mut self.amp
    }

    pub fn amplitude(&self, ket: &BasisKet) -> Option<C64> {
        self.basis.index_of(ket).map(|i| self.amp[i])
    }

    /// Iterates `(ket, amplitude)` pairs in basis order.
    pub fn iter(&self) -> impl Iterator<Item = (BasisKet, C64)> + '_ {
        self.basis
            .kets()
            .iter()
            .copied()
            .zip(self.amp.iter().copied())
    }

    pub fn norm(&self) -> f64 {
        norm(self)
    }

    pub fn expectation(&self, obs: Observable) -> f64 {
        expectation(self, obs)
    }

    /// Largest componentwise amplitude difference; both states must share a sector.
    pub fn max_abs_diff(&self, other: &PureState) -> f64 {
        assert_eq!(self.basis.m_total(), other.basis.m_total());
        self.amp
            .iter()
            .zip(other.amp.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Unit amplitude on `ket`.
pub fn basis_state(basis: &Arc<SectorBasis>, ket: BasisKet) -> Result<PureState> {
    let i = basis.index_of(&ket).ok_or(Error::SectorMismatch {
        ket,
        m_total: basis.m_total(),
    })?;
    let mut state = PureState::zero(Arc::clone(basis));
    state.amp[i] = C64::new(1.0, 0.0);
    Ok(state)
}

/// Diagonal observables on the product basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Observable {
    N1,
    N2,
    Sz1,
    Sz2,
    M1,
    M2,
    MTot,
}

impl Observable {
    pub const ALL: [Observable; 7] = [
        Observable::N1,
        Observable::N2,
        Observable::Sz1,
        Observable::Sz2,
        Observable::M1,
        Observable::M2,
        Observable::MTot,
    ];

    /// Eigenvalue on a basis ket.
    pub fn value(self, ket: &BasisKet) -> f64 {
        match self {
            Observable::N1 => ket.n1 as f64,
            Observable::N2 => ket.n2 as f64,
            Observable::Sz1 => ket.s1.sigma_z(),
            Observable::Sz2 => ket.s2.sigma_z(),
            Observable::M1 => ket.m1() as f64,
            Observable::M2 => ket.m2() as f64,
            Observable::MTot => ket.m_total() as f64,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Observable::N1 => "n1",
            Observable::N2 => "n2",
            Observable::Sz1 => "sz1",
            Observable::Sz2 => "sz2",
            Observable::M1 => "m1",
            Observable::M2 => "m2",
            Observable::MTot => "mtot",
        }
    }
}

/// `<psi|O|psi> / <psi|psi>`. The weights are normalized before they meet the
/// eigenvalues, so a state on a single basis ket returns the eigenvalue
/// exactly whatever its rounding-level norm error.
pub fn expectation(state: &PureState, obs: Observable) -> f64 {
    let total: f64 = state.amp.iter().map(|a| a.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    state
        .iter()
        .map(|(ket, a)| (a.norm_sqr() / total) * obs.value(&ket))
        .sum()
}

pub fn norm(state: &PureState) -> f64 {
    libm::sqrt(state.amp.iter().map(|a| a.norm_sqr()).sum::<f64>())
}
