//! Transmitted aperture field and its scalar propagation into the half space
//! z > 0.
//!
//! Each unit cell is collapsed to a point source of area `p²` at its center
//! and propagated with the first-kind Rayleigh–Sommerfeld kernel
//!
//! ```text
//! E(P) = (ΔS / 2π) Σ E_cell · (z/R) · (jk + 1/R) · exp(-jkR) / R
//! ```
//!
//! The sum over cells always runs in row-major order, so results are
//! bit-identical however the observation points are split across threads.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cell_center, feed_distance, validate_scenario, Fingerprint, Point3, Scenario};
use crate::synthesis::{wrap_phase, PhaseMap};

/// Complex transmitted field just above the aperture, one value per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ApertureField {
    n: usize,
    cell_area: f64,
    wavenumber: f64,
    centers: Vec<(f64, f64)>,
    amplitudes: Vec<Complex64>,
    fingerprint: Option<Fingerprint>,
}

impl ApertureField {
    /// Field from explicit per-cell amplitudes (row-major, i along x).
    pub fn from_amplitudes(scenario: &Scenario, amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = scenario.grid.cells_per_side;
        if amplitudes.len() != n * n {
            return Err(Error::InvalidObservation(format!(
                "expected {} cell amplitudes, got {}",
                n * n,
                amplitudes.len()
            )));
        }
        let mut centers = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let c = cell_center(&scenario.grid, i, j)?;
                centers.push((c.x, c.y));
            }
        }
        Ok(Self {
            n,
            cell_area: scenario.grid.cell_area(),
            wavenumber: scenario.wavenumber(),
            centers,
            amplitudes,
            fingerprint: None,
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.amplitudes[i * self.n + j]
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_area
    }

    pub fn fingerprint(&self) -> Option<Fingerprint> {
        self.fingerprint
    }

    /// Same geometry with every cell amplitude mapped through `f`.
    pub fn map_amplitudes(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|a| f(*a)).collect(),
            fingerprint: None,
            ..self.clone()
        }
    }
}

/// Feed illumination times the unit-cell transmission `|t|·exp(+jφ)`.
///
/// Cell amplitude is `cosᵠθ / d_feed · |t|` and phase `φ - k·d_feed`, where θ
/// is the angle between the feed axis and the feed-to-cell ray.
pub fn aperture_field(scenario: &Scenario, phase_map: &PhaseMap) -> Result<ApertureField> {
    validate_scenario(scenario)?;
    if phase_map.fingerprint() != scenario.fingerprint() || phase_map.size() != scenario.grid.cells_per_side {
        return Err(Error::FingerprintMismatch);
    }
    let n = scenario.grid.cells_per_side;
    let k = scenario.wavenumber();
    let feed = &scenario.feed;
    let mut amplitudes = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let d = feed_distance(scenario, i, j)?;
            let cos_theta = feed.focal_distance_mm / d;
            let magnitude = feed.amplitude_scale * cos_theta.powf(feed.pattern_exponent) / d * scenario.cell_amplitude;
            let phase = wrap_phase(-k * d + phase_map.get(i, j));
            amplitudes.push(Complex64::from_polar(magnitude, phase));
        }
    }
    let mut field = ApertureField::from_amplitudes(scenario, amplitudes)?;
    field.fingerprint = Some(scenario.fingerprint());
    Ok(field)
}

/// The one-cell Rayleigh–Sommerfeld kernel `(z/R)(jk + 1/R) exp(-jkR)/R`.
pub fn rs_kernel(k: f64, z: f64, r: f64) -> Complex64 {
    let (s, c) = (k * r).sin_cos();
    let propagator = Complex64::new(c, -s) / r;
    (z / r) * Complex64::new(1.0 / r, k) * propagator
}

fn sum_at(field: &ApertureField, p: &Point3) -> Complex64 {
    let k = field.wavenumber;
    let z2 = p.z * p.z;
    let mut acc = Complex64::new(0.0, 0.0);
    for (amp, (cx, cy)) in field.amplitudes.iter().zip(&field.centers) {
        let dx = p.x - cx;
        let dy = p.y - cy;
        let r = (dx * dx + dy * dy + z2).sqrt();
        acc += amp * rs_kernel(k, p.z, r);
    }
    acc * (field.cell_area / std::f64::consts::TAU)
}

/// Field at a single point on the transmission side.
pub fn propagate_point(field: &ApertureField, p: &Point3) -> Result<Complex64> {
    if !(p.z > 0.0) {
        return Err(Error::BehindAperture { z: p.z });
    }
    Ok(sum_at(field, p))
}

/// Field at many points, evaluated in parallel.
pub fn propagate_points(field: &ApertureField, points: &[Point3]) -> Result<Vec<Complex64>> {
    if let Some(p) = points.iter().find(|p| !(p.z > 0.0)) {
        return Err(Error::BehindAperture { z: p.z });
    }
    Ok(points.par_iter().map(|p| sum_at(field, p)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaneKind {
    /// Transverse plane at fixed z; axes (x, y).
    Xoy,
    /// Longitudinal plane at fixed y; axes (x, z).
    Xoz,
    /// Longitudinal plane at fixed x; axes (y, z).
    Yoz,
}

impl PlaneKind {
    pub fn name(&self) -> &'static str {
        match self {
            PlaneKind::Xoy => "xoy",
            PlaneKind::Xoz => "xoz",
            PlaneKind::Yoz => "yoz",
        }
    }

    pub fn axis_names(&self) -> (&'static str, &'static str) {
        match self {
            PlaneKind::Xoy => ("x", "y"),
            PlaneKind::Xoz => ("x", "z"),
            PlaneKind::Yoz => ("y", "z"),
        }
    }

    pub fn is_longitudinal(&self) -> bool {
        !matches!(self, PlaneKind::Xoy)
    }

    pub fn point(&self, fixed: f64, a1: f64, a2: f64) -> Point3 {
        match self {
            PlaneKind::Xoy => Point3::new(a1, a2, fixed),
            PlaneKind::Xoz => Point3::new(a1, fixed, a2),
            PlaneKind::Yoz => Point3::new(fixed, a1, a2),
        }
    }
}

impl std::str::FromStr for PlaneKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xoy" => Ok(PlaneKind::Xoy),
            "xoz" => Ok(PlaneKind::Xoz),
            "yoz" => Ok(PlaneKind::Yoz),
            other => Err(Error::InvalidObservation(format!("unknown plane '{other}'"))),
        }
    }
}

/// Uniformly spaced samples along one lattice axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl Axis {
    fn spanning(range: [f64; 2], step: f64) -> Result<Self> {
        let [lo, hi] = range;
        if !(step > 0.0) {
            return Err(Error::InvalidObservation(format!("step must be positive, got {step}")));
        }
        if !(hi >= lo) {
            return Err(Error::InvalidObservation(format!("empty range [{lo}, {hi}]")));
        }
        let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        Ok(Self { start: lo, step, count })
    }

    pub fn value(&self, index: usize) -> f64 {
        self.start + index as f64 * self.step
    }
}

/// A rectangular lattice on one of the three coordinate planes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneSpec {
    pub plane: PlaneKind,
    /// Coordinate held fixed: z for xoy, y for xoz, x for yoz.
    pub fixed_mm: f64,
    pub axis1_mm: [f64; 2],
    pub axis2_mm: [f64; 2],
    pub step_mm: f64,
}

impl PlaneSpec {
    pub fn axes(&self) -> Result<(Axis, Axis)> {
        let a1 = Axis::spanning(self.axis1_mm, self.step_mm)?;
        let a2 = Axis::spanning(self.axis2_mm, self.step_mm)?;
        let z_min = match self.plane {
            PlaneKind::Xoy => self.fixed_mm,
            _ => self.axis2_mm[0],
        };
        if !(z_min > 0.0) {
            return Err(Error::BehindAperture { z: z_min });
        }
        Ok((a1, a2))
    }
}

/// Observation step used when none is requested, mm.
pub const DEFAULT_STEP_MM: f64 = 2.0;

/// Closest distance to the aperture sampled by default longitudinal planes, mm.
pub const DEFAULT_Z_START_MM: f64 = 30.0;

fn round_up(v: f64, to: f64) -> f64 {
    (v / to).ceil() * to
}

impl PlaneSpec {
    /// Default lattice of a given kind for a scenario.
    ///
    /// Transverse extents cover the aperture (or the foci plus 30 mm, if
    /// wider) rounded up to 10 mm; the y extent is at least ±30 mm. The xoy
    /// plane sits at the first focus' z, xoz at its y and yoz at its x.
    /// Longitudinal planes span z from 30 mm (or half the focal z, if
    /// closer) to 90 mm beyond the focus.
    pub fn default_for(scenario: &Scenario, plane: PlaneKind, step_mm: f64) -> PlaneSpec {
        let focus = scenario.foci.first().map(|f| f.position_mm).unwrap_or_default();
        let half_side = scenario.grid.side_length() / 2.0;
        let reach_x = scenario.foci.iter().map(|f| f.position_mm.x.abs()).fold(0.0, f64::max);
        let reach_y = scenario.foci.iter().map(|f| f.position_mm.y.abs()).fold(0.0, f64::max);
        let half_x = round_up(half_side.max(reach_x + 30.0), 10.0);
        let half_y = round_up(30f64.max(reach_y + 30.0), 10.0);
        let z_range = [DEFAULT_Z_START_MM.min(focus.z / 2.0), focus.z + 90.0];
        let (fixed_mm, axis1_mm, axis2_mm) = match plane {
            PlaneKind::Xoy => (focus.z, [-half_x, half_x], [-half_y, half_y]),
            PlaneKind::Xoz => (focus.y, [-half_x, half_x], z_range),
            PlaneKind::Yoz => (focus.x, [-half_x, half_x], z_range),
        };
        PlaneSpec {
            plane,
            fixed_mm,
            axis1_mm,
            axis2_mm,
            step_mm,
        }
    }
}

/// A stack of xoy planes covering a z range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolumeSpec {
    pub x_mm: [f64; 2],
    pub y_mm: [f64; 2],
    pub z_mm: [f64; 2],
    pub step_mm: f64,
}

impl VolumeSpec {
    pub fn planes(&self) -> Result<Vec<PlaneSpec>> {
        let zs = Axis::spanning(self.z_mm, self.step_mm)?;
        Ok((0..zs.count)
            .map(|n| PlaneSpec {
                plane: PlaneKind::Xoy,
                fixed_mm: zs.value(n),
                axis1_mm: self.x_mm,
                axis2_mm: self.y_mm,
                step_mm: self.step_mm,
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ObservationSpec {
    Point { position_mm: Point3 },
    Plane(PlaneSpec),
    Volume(VolumeSpec),
}

/// Result of evaluating an [`ObservationSpec`].
#[derive(Debug, Clone, PartialEq)]
pub enum Observation {
    Point(Complex64),
    Plane(ComplexFieldGrid),
    Volume(Vec<ComplexFieldGrid>),
}

/// Sampled complex field on a plane lattice, stored axis1-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexFieldGrid {
    pub plane: PlaneKind,
    pub fixed_mm: f64,
    pub axis1: Axis,
    pub axis2: Axis,
    pub samples: Vec<Complex64>,
}

impl ComplexFieldGrid {
    /// Grid with the given lattice and all-zero samples.
    pub fn zeros(spec: &PlaneSpec) -> Result<Self> {
        let (axis1, axis2) = spec.axes()?;
        Ok(Self {
            plane: spec.plane,
            fixed_mm: spec.fixed_mm,
            axis1,
            axis2,
            samples: vec![Complex64::new(0.0, 0.0); axis1.count * axis2.count],
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.axis1.count, self.axis2.count)
    }

    pub fn index(&self, a1: usize, a2: usize) -> usize {
        a1 * self.axis2.count + a2
    }

    pub fn get(&self, a1: usize, a2: usize) -> Complex64 {
        self.samples[self.index(a1, a2)]
    }

    /// |E|² at a lattice point.
    pub fn intensity(&self, a1: usize, a2: usize) -> f64 {
        self.get(a1, a2).norm_sqr()
    }

    pub fn intensities(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.norm_sqr()).collect()
    }

    pub fn point(&self, a1: usize, a2: usize) -> Point3 {
        self.plane
            .point(self.fixed_mm, self.axis1.value(a1), self.axis2.value(a2))
    }

    /// Area represented by one lattice sample, mm².
    pub fn sample_area(&self) -> f64 {
        self.axis1.step * self.axis2.step
    }

    pub fn label(&self) -> String {
        let fixed = match self.plane {
            PlaneKind::Xoy => "z",
            PlaneKind::Xoz => "y",
            PlaneKind::Yoz => "x",
        };
        format!("{}@{}={}", self.plane.name(), fixed, self.fixed_mm)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|s| s * factor).collect(),
            ..self.clone()
        }
    }
}

pub fn propagate_plane(field: &ApertureField, spec: &PlaneSpec) -> Result<ComplexFieldGrid> {
    let mut grid = ComplexFieldGrid::zeros(spec)?;
    let n2 = grid.axis2.count;
    let points: Vec<Point3> = (0..grid.samples.len())
        .map(|idx| grid.point(idx / n2, idx % n2))
        .collect();
    grid.samples = propagate_points(field, &points)?;
    Ok(grid)
}

pub fn propagate_volume(field: &ApertureField, spec: &VolumeSpec) -> Result<Vec<ComplexFieldGrid>> {
    spec.planes()?.iter().map(|p| propagate_plane(field, p)).collect()
}

pub fn propagate(field: &ApertureField, spec: &ObservationSpec) -> Result<Observation> {
    Ok(match spec {
        ObservationSpec::Point { position_mm } => Observation::Point(propagate_point(field, position_mm)?),
        ObservationSpec::Plane(p) => Observation::Plane(propagate_plane(field, p)?),
        ObservationSpec::Volume(v) => Observation::Volume(propagate_volume(field, v)?),
    })
}

/// Power incident on the aperture: `Σ |E_inc|² cosθ ΔS` with the feed
/// illumination before the unit cells (|t| excluded).
pub fn incident_power(scenario: &Scenario) -> Result<f64> {
    validate_scenario(scenario)?;
    let n = scenario.grid.cells_per_side;
    let feed = &scenario.feed;
    let area = scenario.grid.cell_area();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = feed_distance(scenario, i, j)?;
            let cos_theta = feed.focal_distance_mm / d;
            let e = feed.amplitude_scale * cos_theta.powf(feed.pattern_exponent) / d;
            total += e * e * cos_theta * area;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FocusTarget;
    use crate::synthesis::synthesize;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn preset_field() -> (Scenario, ApertureField) {
        let s = Scenario::preset("paper-1to1").unwrap();
        let map = synthesize(&s).unwrap();
        let f = aperture_field(&s, &map).unwrap();
        (s, f)
    }

    #[test]
    fn center_cell_amplitude_and_phase() {
        let (s, f) = preset_field();
        let c = f.get(9, 9);
        assert_relative_eq!(c.norm(), 1.0 / 104.5, epsilon = 1e-15);
        let foci = crate::synthesis::phase_foci(&s, 9, 9).unwrap().radians;
        assert!(crate::synthesis::circular_distance(wrap_phase(c.arg()), foci) < 1e-9);
    }

    #[test]
    fn isotropic_feed_falls_off_as_one_over_distance() {
        let mut s = Scenario::preset("paper-1to1").unwrap();
        s.feed.pattern_exponent = 0.0;
        let f = aperture_field(&s, &synthesize(&s).unwrap()).unwrap();
        let ratio = f.get(0, 0).norm() / f.get(9, 9).norm();
        assert_relative_eq!(ratio, 104.5 / 164.6807, epsilon = 1e-5);
        assert_relative_eq!(ratio, 0.635, epsilon = 1e-3);
    }

    #[test]
    fn amplitude_bounded_by_feed_peak() {
        let mut s = Scenario::preset("paper-3to1").unwrap();
        s.cell_amplitude = 0.8;
        let f = aperture_field(&s, &synthesize(&s).unwrap()).unwrap();
        let bound = 0.8 / s.feed.focal_distance_mm;
        assert!(f.amplitudes().iter().all(|a| a.norm() <= bound * (1.0 + 1e-12)));
    }

    #[test]
    fn single_focus_cells_carry_focus_path_phase() {
        let mut s = Scenario::preset("paper-1to1").unwrap();
        s.foci = vec![FocusTarget::new(Point3::new(20.0, -10.0, 80.0), 1.0)];
        let f = aperture_field(&s, &synthesize(&s).unwrap()).unwrap();
        let k = s.wavenumber();
        for i in 0..19 {
            for j in 0..19 {
                let d = crate::geometry::focus_distance(&s.grid, i, j, &s.foci[0]).unwrap();
                let got = wrap_phase(f.get(i, j).arg());
                assert!(crate::synthesis::circular_distance(got, k * d) < 1e-9);
            }
        }
    }

    #[test]
    fn mismatched_map_is_rejected() {
        let a = Scenario::preset("paper-1to1").unwrap();
        let b = Scenario::preset("paper-2to1").unwrap();
        let map = synthesize(&b).unwrap();
        assert!(matches!(aperture_field(&a, &map), Err(Error::FingerprintMismatch)));
    }

    #[test]
    fn zero_field_propagates_to_zero() {
        let (s, f) = preset_field();
        let zero = f.map_amplitudes(|_| Complex64::new(0.0, 0.0));
        let e = propagate_point(&zero, &Point3::new(10.0, 3.0, 50.0)).unwrap();
        assert_eq!(e, Complex64::new(0.0, 0.0));
        drop(s);
    }

    #[test]
    fn one_cell_matches_hand_kernel() {
        let (s, f) = preset_field();
        let amp = Complex64::new(0.3, -0.4);
        let single = f.map_amplitudes(|_| Complex64::new(0.0, 0.0));
        let mut amps = single.amplitudes().to_vec();
        amps[3 * 19 + 7] = amp;
        let single = ApertureField::from_amplitudes(&s, amps).unwrap();
        let c = cell_center(&s.grid, 3, 7).unwrap();
        let p = Point3::new(12.0, -5.0, 70.0);
        let r = c.distance(&p);
        let k = s.wavenumber();
        // (ΔS/2π)·(z/R)·(jk + 1/R)·exp(-jkR)/R written out in re/im parts
        let pre = 100.0 / (2.0 * std::f64::consts::PI) * (70.0 / r) / r;
        let (a, b) = (1.0 / r, k);
        let (cr, ci) = ((k * r).cos(), -(k * r).sin());
        let kern = Complex64::new(pre * (a * cr - b * ci), pre * (a * ci + b * cr));
        let got = propagate_point(&single, &p).unwrap();
        assert_relative_eq!(got.re, (amp * kern).re, epsilon = 1e-15);
        assert_relative_eq!(got.im, (amp * kern).im, epsilon = 1e-15);
    }

    #[test]
    fn foci_are_mirror_equal() {
        let (_, f) = preset_field();
        let a = propagate_point(&f, &Point3::new(60.0, 0.0, 90.0)).unwrap().norm();
        let b = propagate_point(&f, &Point3::new(-60.0, 0.0, 90.0)).unwrap().norm();
        assert!((a - b).abs() <= 1e-9 * a);
    }

    #[test]
    fn behind_aperture_is_rejected() {
        let (_, f) = preset_field();
        assert!(matches!(
            propagate_point(&f, &Point3::new(0.0, 0.0, 0.0)),
            Err(Error::BehindAperture { .. })
        ));
        let spec = PlaneSpec {
            plane: PlaneKind::Xoz,
            fixed_mm: 0.0,
            axis1_mm: [-10.0, 10.0],
            axis2_mm: [-5.0, 10.0],
            step_mm: 1.0,
        };
        assert!(propagate_plane(&f, &spec).is_err());
    }

    #[test]
    fn bad_lattices_are_rejected() {
        let mut spec = PlaneSpec {
            plane: PlaneKind::Xoy,
            fixed_mm: 90.0,
            axis1_mm: [-10.0, 10.0],
            axis2_mm: [-10.0, 10.0],
            step_mm: 0.0,
        };
        assert!(spec.axes().is_err());
        spec.step_mm = 1.0;
        spec.axis1_mm = [5.0, -5.0];
        assert!(spec.axes().is_err());
    }

    #[test]
    fn single_point_plane_equals_point() {
        let (_, f) = preset_field();
        let spec = PlaneSpec {
            plane: PlaneKind::Xoy,
            fixed_mm: 90.0,
            axis1_mm: [60.0, 60.0],
            axis2_mm: [0.0, 0.0],
            step_mm: 2.0,
        };
        let g = propagate_plane(&f, &spec).unwrap();
        assert_eq!(g.dims(), (1, 1));
        assert_eq!(
            g.samples[0],
            propagate_point(&f, &Point3::new(60.0, 0.0, 90.0)).unwrap()
        );
    }

    #[test]
    fn plane_is_mirror_symmetric() {
        let (_, f) = preset_field();
        let spec = PlaneSpec {
            plane: PlaneKind::Xoy,
            fixed_mm: 90.0,
            axis1_mm: [-100.0, 100.0],
            axis2_mm: [-30.0, 30.0],
            step_mm: 4.0,
        };
        let g = propagate_plane(&f, &spec).unwrap();
        let (n1, n2) = g.dims();
        assert_eq!((n1, n2), (51, 16));
        for a in 0..n1 {
            for b in 0..n2 {
                let (l, r) = (g.intensity(a, b), g.intensity(n1 - 1 - a, b));
                assert!((l - r).abs() <= 1e-9 * l.max(r));
            }
        }
    }

    #[test]
    fn volume_stacks_planes() {
        let (_, f) = preset_field();
        let v = VolumeSpec {
            x_mm: [-10.0, 10.0],
            y_mm: [0.0, 0.0],
            z_mm: [80.0, 100.0],
            step_mm: 10.0,
        };
        let planes = propagate_volume(&f, &v).unwrap();
        assert_eq!(planes.len(), 3);
        assert_eq!(planes[2].fixed_mm, 100.0);
        match propagate(&f, &ObservationSpec::Volume(v)).unwrap() {
            Observation::Volume(p) => assert_eq!(p, planes),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn incident_power_single_cell() {
        let mut s = Scenario::preset("paper-1to1").unwrap();
        s.grid.cells_per_side = 1;
        s.feed.pattern_exponent = 0.0;
        let p = incident_power(&s).unwrap();
        assert_relative_eq!(p, 100.0 / (104.5 * 104.5), epsilon = 1e-15);
        s.feed.amplitude_scale = 2.0;
        assert_relative_eq!(incident_power(&s).unwrap(), 4.0 * p, epsilon = 1e-15);
    }

    #[test]
    fn incident_power_below_untapered_bound() {
        let s = Scenario::preset("paper-1to1").unwrap();
        let p = incident_power(&s).unwrap();
        assert!(p > 0.0);
        assert!(p < 361.0 * 100.0 / (104.5 * 104.5));
    }

    #[test]
    fn far_term_dominates_beyond_90_mm() {
        let k = Scenario::preset("paper-1to1").unwrap().wavenumber();
        for r in [90.0, 120.0, 200.0] {
            let full = rs_kernel(k, 90.0, r).norm();
            let far = (90.0 / r) * k / r;
            assert!((full - far).abs() / far < 0.06);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn propagation_is_linear(alpha in -3.0f64..3.0, beta in -3.0f64..3.0, x in -80.0f64..80.0, y in -80.0f64..80.0, z in 5.0f64..200.0) {
            let s1 = Scenario::preset("paper-1to1").unwrap();
            let s2 = Scenario::preset("paper-3to1").unwrap();
            let f1 = aperture_field(&s1, &synthesize(&s1).unwrap()).unwrap();
            let f2 = aperture_field(&s2, &synthesize(&s2).unwrap()).unwrap();
            let combo: Vec<Complex64> = f1.amplitudes().iter().zip(f2.amplitudes())
                .map(|(a, b)| a * alpha + b * beta).collect();
            let fc = ApertureField::from_amplitudes(&s1, combo).unwrap();
            let p = Point3::new(x, y, z);
            let lhs = propagate_point(&fc, &p).unwrap();
            let rhs = propagate_point(&f1, &p).unwrap() * alpha + propagate_point(&f2, &p).unwrap() * beta;
            let scale = (propagate_point(&f1, &p).unwrap().norm() * alpha.abs()
                + propagate_point(&f2, &p).unwrap().norm() * beta.abs()).max(1e-300);
            prop_assert!((lhs - rhs).norm() <= 1e-12 * scale);
        }
    }
}
