//! End-to-end run: synthesize (or accept) a phase map, build the aperture
//! field, sample the requested planes and analyze them.

use crate::error::Result;
use crate::geometry::Scenario;
use crate::metrics::{analyze, AnalysisOptions, FocusReport};
use crate::propagation::{aperture_field, propagate_plane, ApertureField, ComplexFieldGrid, PlaneKind, PlaneSpec};
use crate::synthesis::{synthesize, PhaseMap};

#[derive(Debug, Clone)]
pub struct Simulation {
    pub phase_map: PhaseMap,
    pub field: ApertureField,
    pub grids: Vec<ComplexFieldGrid>,
    pub report: FocusReport,
}

/// Runs the full chain. The first xoy plane is the focal plane; every xoz or
/// yoz plane contributes depth-of-focus measurements.
pub fn simulate(
    scenario: &Scenario,
    phase_map: Option<PhaseMap>,
    planes: &[PlaneSpec],
    options: &AnalysisOptions,
) -> Result<Simulation> {
    let phase_map = match phase_map {
        Some(m) => m,
        None => synthesize(scenario)?,
    };
    let field = aperture_field(scenario, &phase_map)?;
    let grids = planes
        .iter()
        .map(|p| propagate_plane(&field, p))
        .collect::<Result<Vec<_>>>()?;
    let focal = grids.iter().find(|g| g.plane == PlaneKind::Xoy);
    let longitudinal: Vec<ComplexFieldGrid> = grids.iter().filter(|g| g.plane.is_longitudinal()).cloned().collect();
    let report = analyze(scenario, focal, &longitudinal, options)?;
    Ok(Simulation {
        phase_map,
        field,
        grids,
        report,
    })
}

/// Default planes of the given kinds for a scenario.
pub fn default_planes(scenario: &Scenario, kinds: &[PlaneKind], step_mm: f64) -> Vec<PlaneSpec> {
    kinds
        .iter()
        .map(|k| PlaneSpec::default_for(scenario, *k, step_mm))
        .collect()
}
