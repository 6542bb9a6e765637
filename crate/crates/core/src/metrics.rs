//! Figures of merit extracted from sampled field grids: intensity peaks,
//! half-power regions, depth and width of focus, inter-focus power ratio and
//! focusing efficiency.
//!
//! Intensity is |E|², so the −3 dB level is half the peak intensity.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Point3, Scenario};
use crate::propagation::{incident_power, ComplexFieldGrid, PlaneKind};
use crate::warning::Warning;

/// Minimum lattice (Chebyshev) separation between a peak and any stronger one.
pub const PEAK_SEPARATION: usize = 3;

pub const HALF_POWER: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub a1: usize,
    pub a2: usize,
    pub position: Point3,
    pub intensity: f64,
    /// Relative to the grid's global maximum.
    pub intensity_db: f64,
}

/// Peaks sorted by descending intensity.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakSet {
    pub peaks: Vec<Peak>,
    pub expected: usize,
}

impl PeakSet {
    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    /// How many of the requested peaks are missing.
    pub fn shortfall(&self) -> usize {
        self.expected.saturating_sub(self.peaks.len())
    }
}

/// Every strict 8-neighbourhood maximum, strongest first, thinned so that no
/// two kept maxima are closer than [`PEAK_SEPARATION`] lattice steps.
pub fn local_maxima(grid: &ComplexFieldGrid) -> Result<PeakSet> {
    let intensity = grid.intensities();
    let global = intensity.iter().copied().fold(0.0, f64::max);
    if !(global > 0.0) {
        return Err(Error::NoPeaks);
    }
    let (n1, n2) = grid.dims();
    let mut candidates = Vec::new();
    for a1 in 0..n1 {
        for a2 in 0..n2 {
            let v = intensity[grid.index(a1, a2)];
            let strict = neighbours8(n1, n2, a1, a2).all(|(b1, b2)| intensity[grid.index(b1, b2)] < v);
            if strict {
                candidates.push((a1, a2, v));
            }
        }
    }
    candidates.sort_by(|a, b| b.2.total_cmp(&a.2));

    let mut kept: Vec<Peak> = Vec::new();
    for (a1, a2, v) in candidates {
        let isolated = kept
            .iter()
            .all(|p| a1.abs_diff(p.a1).max(a2.abs_diff(p.a2)) >= PEAK_SEPARATION);
        if isolated {
            kept.push(Peak {
                a1,
                a2,
                position: grid.point(a1, a2),
                intensity: v,
                intensity_db: 10.0 * (v / global).log10(),
            });
        }
    }
    if kept.is_empty() {
        return Err(Error::NoPeaks);
    }
    let expected = kept.len();
    Ok(PeakSet { peaks: kept, expected })
}

/// The `expected` strongest separated maxima of the grid's intensity.
pub fn find_peaks(grid: &ComplexFieldGrid, expected: usize) -> Result<PeakSet> {
    let mut all = local_maxima(grid)?;
    all.peaks.truncate(expected);
    all.expected = expected;
    Ok(all)
}

fn neighbours8(n1: usize, n2: usize, a1: usize, a2: usize) -> impl Iterator<Item = (usize, usize)> {
    (-1i64..=1)
        .flat_map(move |d1| (-1i64..=1).map(move |d2| (d1, d2)))
        .filter(|&(d1, d2)| d1 != 0 || d2 != 0)
        .filter_map(move |(d1, d2)| {
            let b1 = a1 as i64 + d1;
            let b2 = a2 as i64 + d2;
            (b1 >= 0 && b2 >= 0 && (b1 as usize) < n1 && (b2 as usize) < n2).then_some((b1 as usize, b2 as usize))
        })
}

fn neighbours4(n1: usize, n2: usize, a1: usize, a2: usize) -> impl Iterator<Item = (usize, usize)> {
    [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)]
        .into_iter()
        .filter_map(move |(d1, d2)| {
            let b1 = a1 as i64 + d1;
            let b2 = a2 as i64 + d2;
            (b1 >= 0 && b2 >= 0 && (b1 as usize) < n1 && (b2 as usize) < n2).then_some((b1 as usize, b2 as usize))
        })
}

/// Lattice points around one peak whose intensity is at least a fraction of
/// that peak's intensity.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfPowerRegion {
    pub peak_index: usize,
    /// Sorted (axis1, axis2) lattice indices.
    pub members: Vec<(usize, usize)>,
    /// Some member lies on the grid boundary.
    pub clipped: bool,
}

impl HalfPowerRegion {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, a1: usize, a2: usize) -> bool {
        self.members.binary_search(&(a1, a2)).is_ok()
    }
}

#[derive(PartialEq)]
struct Front {
    intensity: f64,
    index: usize,
    label: usize,
}

impl Eq for Front {}

impl Ord for Front {
    fn cmp(&self, other: &Self) -> Ordering {
        self.intensity
            .total_cmp(&other.intensity)
            .then_with(|| other.index.cmp(&self.index))
            .then_with(|| other.label.cmp(&self.label))
    }
}

impl PartialOrd for Front {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn basins(grid: &ComplexFieldGrid, peaks: &PeakSet) -> Vec<Option<usize>> {
    let (n1, n2) = grid.dims();
    let intensity = grid.intensities();
    let mut basin: Vec<Option<usize>> = vec![None; n1 * n2];
    let mut heap = BinaryHeap::new();
    for (label, p) in peaks.peaks.iter().enumerate() {
        let index = grid.index(p.a1, p.a2);
        basin[index] = Some(label);
        heap.push(Front {
            intensity: p.intensity,
            index,
            label,
        });
    }
    while let Some(Front { index, label, .. }) = heap.pop() {
        for (b1, b2) in neighbours4(n1, n2, index / n2, index % n2) {
            let nb = grid.index(b1, b2);
            if basin[nb].is_none() {
                basin[nb] = Some(label);
                heap.push(Front {
                    intensity: intensity[nb],
                    index: nb,
                    label,
                });
            }
        }
    }
    basin
}

/// Marker-based watershed. The whole grid is first partitioned into basins by
/// a priority flood from the peaks; the region of a peak is then the part of
/// its basin that is 4-connected to it at or above `fraction` of its own
/// intensity. Regions never overlap and each contains exactly its own peak.
pub fn regions_at_fraction(grid: &ComplexFieldGrid, peaks: &PeakSet, fraction: f64) -> Vec<HalfPowerRegion> {
    let (n1, n2) = grid.dims();
    let intensity = grid.intensities();
    let basin = basins(grid, peaks);

    let mut owner: Vec<Option<usize>> = vec![None; n1 * n2];
    for (label, p) in peaks.peaks.iter().enumerate() {
        let threshold = fraction * p.intensity;
        let start = grid.index(p.a1, p.a2);
        owner[start] = Some(label);
        let mut stack = vec![start];
        while let Some(index) = stack.pop() {
            for (b1, b2) in neighbours4(n1, n2, index / n2, index % n2) {
                let nb = grid.index(b1, b2);
                if owner[nb].is_none() && basin[nb] == Some(label) && intensity[nb] >= threshold {
                    owner[nb] = Some(label);
                    stack.push(nb);
                }
            }
        }
    }

    let mut regions: Vec<HalfPowerRegion> = (0..peaks.len())
        .map(|peak_index| HalfPowerRegion {
            peak_index,
            members: Vec::new(),
            clipped: false,
        })
        .collect();
    for (index, o) in owner.iter().enumerate() {
        if let Some(label) = *o {
            let (a1, a2) = (index / n2, index % n2);
            let r = &mut regions[label];
            r.members.push((a1, a2));
            if a1 == 0 || a2 == 0 || a1 + 1 == n1 || a2 + 1 == n2 {
                r.clipped = true;
            }
        }
    }
    regions
}

/// −3 dB regions of every peak in the set.
pub fn half_power_regions(grid: &ComplexFieldGrid, peaks: &PeakSet) -> Vec<HalfPowerRegion> {
    regions_at_fraction(grid, peaks, HALF_POWER)
}

/// −3 dB region of one peak, split against the other peaks of the set.
pub fn half_power_region(grid: &ComplexFieldGrid, peaks: &PeakSet, peak_index: usize) -> HalfPowerRegion {
    half_power_regions(grid, peaks).swap_remove(peak_index)
}

/// Depth of focus: length of the region's projection onto the z axis, each
/// lattice sample covering one step.
pub fn dof(grid: &ComplexFieldGrid, region: &HalfPowerRegion) -> Result<f64> {
    if !grid.plane.is_longitudinal() {
        return Err(Error::WrongPlane(format!(
            "depth of focus needs an xoz or yoz grid, got {}",
            grid.plane.name()
        )));
    }
    let (lo, hi) = region
        .members
        .iter()
        .fold((usize::MAX, 0), |(lo, hi), &(_, a2)| (lo.min(a2), hi.max(a2)));
    if region.members.is_empty() {
        return Ok(0.0);
    }
    Ok((hi - lo + 1) as f64 * grid.axis2.step)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WofConvention {
    /// Largest distance from the peak to any region point.
    #[default]
    MaxRadius,
    /// Half the largest distance between any two region points.
    HalfDiameter,
}

/// Width of focus on a transverse (xoy) grid.
pub fn wof(grid: &ComplexFieldGrid, region: &HalfPowerRegion, peak: &Peak, convention: WofConvention) -> Result<f64> {
    if grid.plane != PlaneKind::Xoy {
        return Err(Error::WrongPlane(format!(
            "width of focus needs an xoy grid, got {}",
            grid.plane.name()
        )));
    }
    let pts: Vec<Point3> = region.members.iter().map(|&(a1, a2)| grid.point(a1, a2)).collect();
    Ok(match convention {
        WofConvention::MaxRadius => pts.iter().map(|p| p.distance(&peak.position)).fold(0.0, f64::max),
        WofConvention::HalfDiameter => {
            let mut best: f64 = 0.0;
            for (n, a) in pts.iter().enumerate() {
                for b in &pts[n + 1..] {
                    best = best.max(a.distance(b));
                }
            }
            best / 2.0
        }
    })
}

/// Strongest over second-strongest peak intensity, in dB.
pub fn peak_ratio_db(peaks: &PeakSet) -> Result<f64> {
    match peaks.peaks.as_slice() {
        [first, second, ..] => Ok(10.0 * (first.intensity / second.intensity).log10()),
        other => Err(Error::TooFewPeaks {
            needed: 2,
            found: other.len(),
        }),
    }
}

/// Power crossing the union of the regions, `Σ |E|² · sample area`.
pub fn focused_power(grid: &ComplexFieldGrid, regions: &[HalfPowerRegion]) -> f64 {
    let area = grid.sample_area();
    regions
        .iter()
        .flat_map(|r| r.members.iter())
        .map(|&(a1, a2)| grid.intensity(a1, a2) * area)
        .sum()
}

/// Focused over incident power. Values above one mean the model or its
/// normalization is inconsistent and are reported as errors.
pub fn focusing_efficiency(
    scenario: &Scenario,
    focal_grid: &ComplexFieldGrid,
    regions: &[HalfPowerRegion],
) -> Result<f64> {
    efficiency_from(focused_power(focal_grid, regions), incident_power(scenario)?)
}

fn efficiency_from(focused: f64, incident: f64) -> Result<f64> {
    let eta = focused / incident;
    if eta > 1.0 {
        Err(Error::EfficiencyAboveUnity(eta))
    } else {
        Ok(eta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportPeak {
    pub x_mm: f64,
    pub y_mm: f64,
    pub z_mm: f64,
    pub intensity_db: f64,
}

/// Figures of merit of one simulated design.
///
/// `dof_mm`, `wof_mm` and `region_power` are indexed like `peaks`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FocusReport {
    pub peaks: Vec<ReportPeak>,
    pub dof_mm: Vec<f64>,
    pub wof_mm: Vec<f64>,
    #[serde(skip)]
    pub region_power: Vec<f64>,
    pub peak_ratio_db: Option<f64>,
    pub efficiency: Option<f64>,
    pub p_im: f64,
    pub warnings: Vec<String>,
}

impl FocusReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub wof: WofConvention,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            wof: WofConvention::MaxRadius,
        }
    }
}

/// Peaks of a longitudinal grid matched to the foci that lie on it, with
/// their depths of focus.
fn longitudinal_dofs(
    scenario: &Scenario,
    grid: &ComplexFieldGrid,
    warnings: &mut Vec<Warning>,
) -> Result<Vec<(Point3, f64)>> {
    let tolerance = grid.axis1.step / 2.0;
    let on_plane: Vec<&Point3> = scenario
        .foci
        .iter()
        .map(|f| &f.position_mm)
        .filter(|p| match grid.plane {
            PlaneKind::Xoz => (p.y - grid.fixed_mm).abs() <= tolerance,
            PlaneKind::Yoz => (p.x - grid.fixed_mm).abs() <= tolerance,
            PlaneKind::Xoy => false,
        })
        .collect();
    if on_plane.is_empty() {
        return Ok(Vec::new());
    }
    let markers = local_maxima(grid)?;
    let regions = half_power_regions(grid, &markers);
    let mut used = Vec::new();
    let mut out = Vec::new();
    for target in on_plane {
        let nearest = markers
            .peaks
            .iter()
            .enumerate()
            .filter(|(n, _)| !used.contains(n))
            .min_by(|a, b| a.1.position.distance(target).total_cmp(&b.1.position.distance(target)));
        let Some((n, peak)) = nearest else {
            warnings.push(Warning::PeakShortfall {
                plane: grid.label(),
                expected: scenario.foci.len(),
                found: used.len(),
            });
            break;
        };
        used.push(n);
        if regions[n].clipped {
            warnings.push(Warning::RegionClipped {
                plane: grid.label(),
                peak_index: n,
            });
        }
        out.push((peak.position, dof(grid, &regions[n])?));
    }
    Ok(out)
}

/// Builds a [`FocusReport`] from a transverse focal-plane grid and any number
/// of longitudinal (xoz/yoz) grids.
///
/// Peaks, widths, power ratio and efficiency come from the focal grid; each
/// reported peak takes the depth of focus of the nearest longitudinal peak.
/// Without a focal grid the longitudinal peaks are reported instead.
pub fn analyze(
    scenario: &Scenario,
    focal: Option<&ComplexFieldGrid>,
    longitudinal: &[ComplexFieldGrid],
    options: &AnalysisOptions,
) -> Result<FocusReport> {
    let p_im = incident_power(scenario)?;
    let mut warnings = Vec::new();

    let mut depth = Vec::new();
    for grid in longitudinal {
        depth.extend(longitudinal_dofs(scenario, grid, &mut warnings)?);
    }

    let mut report = FocusReport {
        peaks: Vec::new(),
        dof_mm: Vec::new(),
        wof_mm: Vec::new(),
        region_power: Vec::new(),
        peak_ratio_db: None,
        efficiency: None,
        p_im,
        warnings: Vec::new(),
    };

    match focal {
        Some(grid) => {
            if grid.plane != PlaneKind::Xoy {
                return Err(Error::WrongPlane(format!(
                    "focal grid must be xoy, got {}",
                    grid.plane.name()
                )));
            }
            let markers = local_maxima(grid)?;
            let wanted = scenario.foci.len().min(markers.len());
            if wanted < scenario.foci.len() {
                warnings.push(Warning::PeakShortfall {
                    plane: grid.label(),
                    expected: scenario.foci.len(),
                    found: wanted,
                });
            }
            let regions = half_power_regions(grid, &markers);
            for (n, peak) in markers.peaks.iter().take(wanted).enumerate() {
                let region = &regions[n];
                if region.clipped {
                    warnings.push(Warning::RegionClipped {
                        plane: grid.label(),
                        peak_index: n,
                    });
                }
                report.peaks.push(ReportPeak {
                    x_mm: peak.position.x,
                    y_mm: peak.position.y,
                    z_mm: peak.position.z,
                    intensity_db: peak.intensity_db,
                });
                report.wof_mm.push(wof(grid, region, peak, options.wof)?);
                report
                    .region_power
                    .push(focused_power(grid, std::slice::from_ref(region)));
                if let Some(d) = nearest_dof(&depth, &peak.position) {
                    report.dof_mm.push(d);
                }
            }
            let top = PeakSet {
                peaks: markers.peaks[..wanted].to_vec(),
                expected: scenario.foci.len(),
            };
            report.peak_ratio_db = peak_ratio_db(&top).ok();
            report.efficiency = Some(efficiency_from(report.region_power.iter().sum(), p_im)?);
        }
        None => {
            for (position, d) in &depth {
                report.peaks.push(ReportPeak {
                    x_mm: position.x,
                    y_mm: position.y,
                    z_mm: position.z,
                    intensity_db: 0.0,
                });
                report.dof_mm.push(*d);
            }
        }
    }
    report.warnings = warnings.iter().map(ToString::to_string).collect();
    Ok(report)
}

fn nearest_dof(depth: &[(Point3, f64)], at: &Point3) -> Option<f64> {
    depth
        .iter()
        .min_by(|a, b| {
            let da = (a.0.x - at.x).hypot(a.0.y - at.y);
            let db = (b.0.x - at.x).hypot(b.0.y - at.y);
            da.total_cmp(&db)
        })
        .map(|(_, d)| *d)
}
