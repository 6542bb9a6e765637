//! Per-cell compensation phases.
//!
//! The total phase of a cell is the feed path term `k·d_feed` plus the
//! argument of the weighted foci phasor `Σ wₙ·exp(j·k·dₙ)`, reduced into
//! [0, 2π). Propagation carries `exp(-jkR)`, so applying `exp(+jφ)` at each
//! cell makes all single-focus contributions arrive in phase at the focus.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{feed_distance, focus_distance, validate_scenario, Fingerprint, Scenario};
use crate::warning::Warning;

/// Relative magnitude below which the foci phasor counts as cancelled.
pub const CANCELLATION_EPS: f64 = 1e-12;

/// Reduces an angle into [0, 2π).
pub fn wrap_phase(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Shortest angular distance between two phases, in [0, π].
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = wrap_phase(a - b);
    d.min(TAU - d)
}

/// Weighted sum of unit phasors toward every focus for a single cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FociPhasor {
    pub sum: Complex64,
    pub weight_total: f64,
}

impl FociPhasor {
    pub fn magnitude(&self) -> f64 {
        self.sum.norm()
    }

    /// Argument in [0, 2π), or `None` when the phasor has cancelled.
    pub fn argument(&self) -> Option<f64> {
        if self.magnitude() < CANCELLATION_EPS * self.weight_total {
            None
        } else {
            Some(wrap_phase(self.sum.arg()))
        }
    }
}

pub fn foci_phasor(scenario: &Scenario, i: usize, j: usize) -> Result<FociPhasor> {
    let k = scenario.wavenumber();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut weight_total = 0.0;
    for (index, focus) in scenario.foci.iter().enumerate() {
        if focus.weight < 0.0 {
            return Err(Error::NegativeWeight {
                index,
                weight: focus.weight,
            });
        }
        let d = focus_distance(&scenario.grid, i, j, focus)?;
        sum += Complex64::from_polar(focus.weight, k * d);
        weight_total += focus.weight;
    }
    Ok(FociPhasor { sum, weight_total })
}

/// A phase value with the warning raised while computing it, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSample {
    pub radians: f64,
    pub warning: Option<Warning>,
}

/// Feed-to-cell compensation `k·d_feed` mod 2π.
pub fn phase_feed(scenario: &Scenario, i: usize, j: usize) -> Result<f64> {
    Ok(wrap_phase(scenario.wavenumber() * feed_distance(scenario, i, j)?))
}

/// Cell-to-foci compensation: argument of the weighted foci phasor.
pub fn phase_foci(scenario: &Scenario, i: usize, j: usize) -> Result<PhaseSample> {
    let phasor = foci_phasor(scenario, i, j)?;
    Ok(match phasor.argument() {
        Some(radians) => PhaseSample { radians, warning: None },
        None => PhaseSample {
            radians: 0.0,
            warning: Some(Warning::PhaseCancellation { i, j }),
        },
    })
}

pub fn phase_total(scenario: &Scenario, i: usize, j: usize) -> Result<PhaseSample> {
    let feed = phase_feed(scenario, i, j)?;
    let foci = phase_foci(scenario, i, j)?;
    Ok(PhaseSample {
        radians: wrap_phase(feed + foci.radians),
        warning: foci.warning,
    })
}

/// Snaps a phase to the nearest of `2^bits` uniform levels; ties go to the lower level.
pub fn quantize_phase(phi: f64, bits: u32) -> Result<f64> {
    if bits == 0 {
        return Err(Error::ZeroQuantizationBits);
    }
    let levels = 2f64.powi(bits as i32);
    let step = TAU / levels;
    let m = wrap_phase(phi) / step;
    let lower = m.floor();
    let level = if m - lower > 0.5 { lower + 1.0 } else { lower };
    Ok(if level >= levels { 0.0 } else { level * step })
}

/// N×N compensation phases, row index i along x and column index j along y.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMap {
    n: usize,
    values: Vec<f64>,
    fingerprint: Fingerprint,
    pub warnings: Vec<Warning>,
}

impl PhaseMap {
    /// Wraps raw row-major values; every value must lie in [0, 2π).
    pub fn from_values(n: usize, values: Vec<f64>, fingerprint: Fingerprint) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::Parse {
                context: "phase map".into(),
                message: format!("expected {} values, got {}", n * n, values.len()),
            });
        }
        if let Some(bad) = values.iter().find(|v| !(0.0..TAU).contains(*v)) {
            return Err(Error::Parse {
                context: "phase map".into(),
                message: format!("value {bad} outside [0, 2π)"),
            });
        }
        Ok(Self {
            n,
            values,
            fingerprint,
            warnings: Vec::new(),
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn fingerprint(&self) -> Fingerprint {
        self.fingerprint
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.n)
    }
}

/// Builds the full phase map of a validated scenario, quantized when the
/// scenario asks for it.
pub fn synthesize(scenario: &Scenario) -> Result<PhaseMap> {
    validate_scenario(scenario)?;
    let n = scenario.grid.cells_per_side;
    let samples = (0..n * n)
        .into_par_iter()
        .map(|c| {
            let (i, j) = (c / n, c % n);
            phase_total(scenario, i, j).map_err(|e| e.at_cell(i, j))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut warnings = Vec::new();
    let mut values = Vec::with_capacity(samples.len());
    for s in samples {
        values.push(match scenario.quantization_bits {
            Some(bits) => quantize_phase(s.radians, bits)?,
            None => s.radians,
        });
        warnings.extend(s.warning);
    }
    Ok(PhaseMap {
        n,
        values,
        fingerprint: scenario.fingerprint(),
        warnings,
    })
}

/// Largest circular deviation between two maps of equal size.
pub fn max_phase_error(a: &PhaseMap, b: &PhaseMap) -> f64 {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| circular_distance(*x, *y))
        .fold(0.0, f64::max)
}

/// Half a quantization step, the largest error quantization may introduce.
pub fn quantization_bound(bits: u32) -> f64 {
    PI / 2f64.powi(bits as i32)
}
