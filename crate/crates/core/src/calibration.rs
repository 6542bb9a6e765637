//! Weight calibration for two-focus designs.
//!
//! Weights are parameterized as `(1 + δ, 1 − δ)`; the foci phasor is scale
//! invariant so one degree of freedom covers every allocation. The achieved
//! peak ratio is read on the template's nominal focal plane.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Scenario;
use crate::metrics::{find_peaks, peak_ratio_db};
use crate::propagation::{aperture_field, propagate_plane, PlaneKind, PlaneSpec, DEFAULT_STEP_MM};
use crate::synthesis::synthesize;

/// Smallest bracket width bisection will split.
pub const DELTA_RESOLUTION: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationResult {
    pub delta_star: f64,
    pub achieved_ratio_db: f64,
    pub target_db: f64,
    pub converged: bool,
    /// Every probe as `(δ, ratio_db)` in evaluation order.
    pub trace: Vec<(f64, f64)>,
}

impl CalibrationResult {
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("calibration serializes")
    }
}

/// Evaluates peak ratios of a two-focus template under varying weight asymmetry.
#[derive(Debug, Clone)]
pub struct Calibrator {
    template: Scenario,
    plane: PlaneSpec,
}

impl Calibrator {
    pub fn new(template: &Scenario) -> Result<Self> {
        Self::with_step(template, DEFAULT_STEP_MM)
    }

    pub fn with_step(template: &Scenario, step_mm: f64) -> Result<Self> {
        if template.foci.len() != 2 {
            return Err(Error::NotTwoFoci(template.foci.len()));
        }
        Ok(Self {
            template: template.clone(),
            plane: PlaneSpec::default_for(template, PlaneKind::Xoy, step_mm),
        })
    }

    pub fn plane(&self) -> &PlaneSpec {
        &self.plane
    }

    /// Template with weights `(1 + δ, 1 − δ)`.
    pub fn scenario_for(&self, delta: f64) -> Scenario {
        let mut s = self.template.clone();
        s.foci[0].weight = 1.0 + delta;
        s.foci[1].weight = 1.0 - delta;
        s
    }

    /// Peak ratio in dB on the focal plane for weights `(1 + δ, 1 − δ)`.
    pub fn ratio_for_delta(&self, delta: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::InvalidCalibration(format!(
                "delta must lie in [0, 1), got {delta}"
            )));
        }
        let scenario = self.scenario_for(delta);
        let map = synthesize(&scenario)?;
        let field = aperture_field(&scenario, &map)?;
        let grid = propagate_plane(&field, &self.plane)?;
        let peaks = find_peaks(&grid, 2)?;
        if peaks.len() < 2 {
            return Err(Error::Overdrive { delta });
        }
        peak_ratio_db(&peaks)
    }

    /// Bisection on δ ∈ [0, δ_max] for a target ratio.
    ///
    /// Returns the first probe within `tol_db` of the target. When the target
    /// cannot be bracketed or the bracket shrinks below [`DELTA_RESOLUTION`],
    /// the closest probe is returned with `converged = false`. Three probes
    /// (in δ order) with strictly falling ratios abort with
    /// [`Error::NonMonotone`].
    pub fn calibrate(&self, target_db: f64, tol_db: f64, delta_max: f64) -> Result<CalibrationResult> {
        if !(target_db >= 0.0) {
            return Err(Error::InvalidCalibration("target must be ≥ 0".into()));
        }
        if !(tol_db > 0.0) {
            return Err(Error::InvalidCalibration("tolerance must be > 0".into()));
        }
        if !(delta_max > 0.0 && delta_max < 1.0) {
            return Err(Error::InvalidCalibration("delta_max must lie in (0, 1)".into()));
        }

        let mut trace: Vec<(f64, f64)> = Vec::new();
        let probe = |delta: f64, trace: &mut Vec<(f64, f64)>| -> Result<f64> {
            let r = self.ratio_for_delta(delta)?;
            trace.push((delta, r));
            check_monotone(trace)?;
            Ok(r)
        };
        let finish = |trace: Vec<(f64, f64)>, hit: Option<(f64, f64)>| {
            let (delta_star, achieved, converged) = match hit {
                Some((d, r)) => (d, r, true),
                None => {
                    let best = trace
                        .iter()
                        .min_by(|a, b| (a.1 - target_db).abs().total_cmp(&(b.1 - target_db).abs()))
                        .copied()
                        .expect("trace is never empty");
                    (best.0, best.1, false)
                }
            };
            CalibrationResult {
                delta_star,
                achieved_ratio_db: achieved,
                target_db,
                converged,
                trace,
            }
        };
        let close = |r: f64| (r - target_db).abs() <= tol_db;

        let (mut lo, mut hi) = (0.0, delta_max);
        let r_lo = probe(lo, &mut trace)?;
        if close(r_lo) {
            return Ok(finish(trace, Some((lo, r_lo))));
        }
        let r_hi = probe(hi, &mut trace)?;
        if close(r_hi) {
            return Ok(finish(trace, Some((hi, r_hi))));
        }
        if r_hi < target_db || r_lo > target_db {
            return Ok(finish(trace, None));
        }
        while hi - lo >= DELTA_RESOLUTION {
            let mid = 0.5 * (lo + hi);
            let r = probe(mid, &mut trace)?;
            if close(r) {
                return Ok(finish(trace, Some((mid, r))));
            }
            if r < target_db {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(finish(trace, None))
    }
}

fn check_monotone(trace: &[(f64, f64)]) -> Result<()> {
    let mut sorted = trace.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let falling = sorted.windows(3).any(|w| w[0].1 > w[1].1 && w[1].1 > w[2].1);
    if falling {
        Err(Error::NonMonotone { trace: trace.to_vec() })
    } else {
        Ok(())
    }
}

/// Peak ratio for weights `(1 + δ, 1 − δ)` on the template's focal plane.
pub fn ratio_for_delta(template: &Scenario, delta: f64) -> Result<f64> {
    Calibrator::new(template)?.ratio_for_delta(delta)
}

/// Finds δ so that weights `(1 + δ, 1 − δ)` give `target_db` within `tol_db`.
pub fn calibrate_weights(
    template: &Scenario,
    target_db: f64,
    tol_db: f64,
    delta_max: f64,
) -> Result<CalibrationResult> {
    Calibrator::new(template)?.calibrate(target_db, tol_db, delta_max)
}
