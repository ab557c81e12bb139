//! Observable time series for both propagators and the validity verdict.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::analytic::evolve_analytic;
use crate::error::Result;
use crate::exact::propagate_exact;
use crate::params::SimParams;
use crate::presets::{uniform_grid, TableRow, DEFAULT_STEP, INITIAL_KET};
use crate::sector::{basis_state, BasisKet, Observable, PureState, SectorBasis};

/// One value per grid point for each diagonal observable.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObservableTrack {
    pub n1: Vec<f64>,
    pub n2: Vec<f64>,
    pub sz1: Vec<f64>,
    pub sz2: Vec<f64>,
    pub m1: Vec<f64>,
    pub m2: Vec<f64>,
    pub mtot: Vec<f64>,
}

impl ObservableTrack {
    pub fn from_states(states: &[PureState]) -> Self {
        let col = |obs: Observable| states.iter().map(|s| s.expectation(obs)).collect();
        Self {
            n1: col(Observable::N1),
            n2: col(Observable::N2),
            sz1: col(Observable::Sz1),
            sz2: col(Observable::Sz2),
            m1: col(Observable::M1),
            m2: col(Observable::M2),
            mtot: col(Observable::MTot),
        }
    }

    pub fn get(&self, obs: Observable) -> &[f64] {
        match obs {
            Observable::N1 => &self.n1,
            Observable::N2 => &self.n2,
            Observable::Sz1 => &self.sz1,
            Observable::Sz2 => &self.sz2,
            Observable::M1 => &self.m1,
            Observable::M2 => &self.m2,
            Observable::MTot => &self.mtot,
        }
    }

    fn minus(&self, other: &Self) -> Self {
        let d = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x - y).collect();
        Self {
            n1: d(&self.n1, &other.n1),
            n2: d(&self.n2, &other.n2),
            sz1: d(&self.sz1, &other.sz1),
            sz2: d(&self.sz2, &other.sz2),
            m1: d(&self.m1, &other.m1),
            m2: d(&self.m2, &other.m2),
            mtot: d(&self.mtot, &other.mtot),
        }
    }
}

/// Analytic (`A`) and exact (`N`) observables on a shared grid, with
/// `diff = A - N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    pub tau: Vec<f64>,
    pub analytic: ObservableTrack,
    pub numeric: ObservableTrack,
    pub diff: ObservableTrack,
}

impl ObservableSeries {
    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    /// `max |A - N|` over grid points with `tau` in `[lo, hi]`.
    pub fn max_abs_diff(&self, obs: Observable, window: (f64, f64)) -> f64 {
        self.tau
            .iter()
            .zip(self.diff.get(obs))
            .filter(|(t, _)| **t >= window.0 && **t <= window.1)
            .map(|(_, d)| d.abs())
            .fold(0.0, f64::max)
    }
}

pub fn compute_series(
    params: &SimParams,
    psi0: &PureState,
    tau_grid: &[f64],
) -> Result<ObservableSeries> {
    let analytic = ObservableTrack::from_states(&evolve_analytic(params, psi0, tau_grid)?);
    let numeric = ObservableTrack::from_states(&propagate_exact(params, psi0, tau_grid)?);
    let diff = analytic.minus(&numeric);
    Ok(ObservableSeries {
        tau: tau_grid.to_vec(),
        analytic,
        numeric,
        diff,
    })
}

/// Starts both propagators from a single basis ket.
pub fn compute_series_from_ket(
    params: &SimParams,
    ket: BasisKet,
    tau_grid: &[f64],
) -> Result<ObservableSeries> {
    let basis = Arc::new(SectorBasis::new(ket.m_total()));
    let psi0 = basis_state(&basis, ket)?;
    compute_series(params, &psi0, tau_grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    QuantitativeAndQualitative,
    QualitativeOnly,
}

/// Observables entering the verdict.
pub const VERDICT_OBSERVABLES: [Observable; 4] = [
    Observable::N1,
    Observable::N2,
    Observable::Sz1,
    Observable::Sz2,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub quantitative: f64,
    pub window: (f64, f64),
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            quantitative: 0.05,
            window: (0.0, 100.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub params: Option<SimParams>,
    /// `(observable, max |A - N|)` inside the window, for all seven observables.
    pub max_abs_diff: Vec<(Observable, f64)>,
    pub verdict: Verdict,
    pub window: (f64, f64),
}

impl RegimeReport {
    pub fn max_diff(&self, obs: Observable) -> f64 {
        self.max_abs_diff
            .iter()
            .find(|(o, _)| *o == obs)
            .map_or(0.0, |(_, d)| *d)
    }

    /// Worst difference among the verdict observables.
    pub fn worst(&self) -> f64 {
        VERDICT_OBSERVABLES
            .iter()
            .map(|o| self.max_diff(*o))
            .fold(0.0, f64::max)
    }
}

pub fn classify_regime(series: &ObservableSeries, thresholds: &Thresholds) -> RegimeReport {
    let max_abs_diff: Vec<(Observable, f64)> = Observable::ALL
        .iter()
        .map(|&o| (o, series.max_abs_diff(o, thresholds.window)))
        .collect();
    let worst = VERDICT_OBSERVABLES
        .iter()
        .map(|o| max_abs_diff.iter().find(|(x, _)| x == o).unwrap().1)
        .fold(0.0, f64::max);
    let verdict = if worst <= thresholds.quantitative {
        Verdict::QuantitativeAndQualitative
    } else {
        Verdict::QualitativeOnly
    };
    RegimeReport {
        params: None,
        max_abs_diff,
        verdict,
        window: thresholds.window,
    }
}

/// Compares both propagators for one table row over the table window.
pub fn run_table_row(row: &TableRow, thresholds: &Thresholds) -> Result<RegimeReport> {
    let params = row.params();
    let grid = uniform_grid(thresholds.window.1, DEFAULT_STEP);
    let series = compute_series_from_ket(&params, INITIAL_KET, &grid)?;
    let mut report = classify_regime(&series, thresholds);
    report.params = Some(params);
    Ok(report)
}

/// Reports in row order.
pub fn run_table(rows: &[TableRow], thresholds: &Thresholds) -> Result<Vec<RegimeReport>> {
    rows.iter().map(|r| run_table_row(r, thresholds)).collect()
}
