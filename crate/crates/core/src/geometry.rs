//! Physical scene: operating frequency, the aperture lattice on the z = 0
//! plane, the feed below it and the focus targets above it.
//!
//! All lengths are millimetres, frequencies GHz and phases radians.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result, Violations};

/// Speed of light in mm·GHz.
pub const SPEED_OF_LIGHT_MM_GHZ: f64 = 299.792458;

/// Feed focal distance over aperture side length used by the built-in presets.
pub const PRESET_F_OVER_D: f64 = 0.55;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

impl From<[f64; 3]> for Point3 {
    fn from(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

impl From<Point3> for [f64; 3] {
    fn from(p: Point3) -> Self {
        [p.x, p.y, p.z]
    }
}

impl fmt::Display for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Operating frequency. Wavelength and wavenumber are derived on demand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FrequencySpec {
    ghz: f64,
}

impl FrequencySpec {
    pub fn new(ghz: f64) -> Result<Self> {
        if ghz > 0.0 && ghz.is_finite() {
            Ok(Self { ghz })
        } else {
            Err(Error::InvalidScenario(Violations(vec![
                Violation::NonPositiveFrequency,
            ])))
        }
    }

    pub fn ghz(&self) -> f64 {
        self.ghz
    }

    /// Free-space wavelength in mm.
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT_MM_GHZ / self.ghz
    }

    /// Free-space wavenumber in rad/mm.
    pub fn wavenumber(&self) -> f64 {
        std::f64::consts::TAU / self.wavelength()
    }
}

/// Square lattice of `cells_per_side`² unit cells centred on the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApertureGrid {
    pub cells_per_side: usize,
    pub pitch_mm: f64,
}

impl ApertureGrid {
    pub fn side_length(&self) -> f64 {
        self.cells_per_side as f64 * self.pitch_mm
    }

    pub fn cell_count(&self) -> usize {
        self.cells_per_side * self.cells_per_side
    }

    /// Unit-cell area in mm².
    pub fn cell_area(&self) -> f64 {
        self.pitch_mm * self.pitch_mm
    }

    fn offset(&self, index: usize) -> f64 {
        (index as f64 - (self.cells_per_side as f64 - 1.0) / 2.0) * self.pitch_mm
    }

    /// Nearest cell to `p` projected onto the aperture plane, if it lies on the grid.
    pub fn nearest_cell(&self, p: &Point3) -> Option<(usize, usize)> {
        let half = (self.cells_per_side as f64 - 1.0) / 2.0;
        let i = (p.x / self.pitch_mm + half).round();
        let j = (p.y / self.pitch_mm + half).round();
        let n = self.cells_per_side as f64;
        (i >= 0.0 && j >= 0.0 && i < n && j < n).then_some((i as usize, j as usize))
    }
}

/// Point-source feed on the negative z axis with a cosᵠθ amplitude pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedModel {
    pub focal_distance_mm: f64,
    pub pattern_exponent: f64,
    /// Overall amplitude of the feed; cancels out of every ratio metric.
    #[serde(default = "unit_scale")]
    pub amplitude_scale: f64,
}

fn unit_scale() -> f64 {
    1.0
}

impl FeedModel {
    pub const DEFAULT_PATTERN_EXPONENT: f64 = 8.0;

    pub fn new(focal_distance_mm: f64, pattern_exponent: f64) -> Self {
        Self {
            focal_distance_mm,
            pattern_exponent,
            amplitude_scale: 1.0,
        }
    }

    /// Feed at `f_over_d` times the aperture side length.
    pub fn for_grid(grid: &ApertureGrid, f_over_d: f64) -> Self {
        Self::new(f_over_d * grid.side_length(), Self::DEFAULT_PATTERN_EXPONENT)
    }

    pub fn phase_center(&self) -> Point3 {
        Point3::new(0.0, 0.0, -self.focal_distance_mm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FocusTarget {
    pub position_mm: Point3,
    pub weight: f64,
}

impl FocusTarget {
    pub fn new(position_mm: Point3, weight: f64) -> Self {
        Self { position_mm, weight }
    }
}

/// A complete design problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(rename = "frequency_ghz")]
    pub frequency: FrequencySpec,
    pub grid: ApertureGrid,
    pub feed: FeedModel,
    pub foci: Vec<FocusTarget>,
    pub cell_amplitude: f64,
    #[serde(default)]
    pub quantization_bits: Option<u32>,
}

/// Stable digest of a scenario, used to tie phase maps and aperture fields
/// to the scenario that produced them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fingerprint(pub u64);

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

pub const PRESET_NAMES: [&str; 6] = [
    "paper-1to1",
    "paper-2to1",
    "paper-3to1",
    "paper-1to1-f105",
    "paper-2to1-f105",
    "paper-3to1-f105",
];

impl Scenario {
    /// Built-in two-focus designs at 10 GHz on a 19×19, 10 mm lattice.
    ///
    /// The `-f105` variants move the feed from the F/D = 0.55 design distance
    /// (104.5 mm) to 105 mm.
    pub fn preset(name: &str) -> Option<Scenario> {
        let (base, feed_mm) = match name.strip_suffix("-f105") {
            Some(base) => (base, Some(105.0)),
            None => (name, None),
        };
        let (z, weights) = match base {
            "paper-1to1" => (90.0, (1.0, 1.0)),
            "paper-2to1" => (120.0, (1.04, 0.96)),
            "paper-3to1" => (120.0, (1.1, 0.9)),
            _ => return None,
        };
        let grid = ApertureGrid {
            cells_per_side: 19,
            pitch_mm: 10.0,
        };
        let mut feed = FeedModel::for_grid(&grid, PRESET_F_OVER_D);
        feed.focal_distance_mm = (feed.focal_distance_mm * 1e6).round() / 1e6;
        if let Some(f) = feed_mm {
            feed.focal_distance_mm = f;
        }
        Some(Scenario {
            frequency: FrequencySpec { ghz: 10.0 },
            grid,
            feed,
            foci: vec![
                FocusTarget::new(Point3::new(60.0, 0.0, z), weights.0),
                FocusTarget::new(Point3::new(-60.0, 0.0, z), weights.1),
            ],
            cell_amplitude: 1.0,
            quantization_bits: None,
        })
    }

    pub fn wavenumber(&self) -> f64 {
        self.frequency.wavenumber()
    }

    pub fn weight_sum(&self) -> f64 {
        self.foci.iter().map(|f| f.weight).sum()
    }

    pub fn fingerprint(&self) -> Fingerprint {
        let bytes = serde_json::to_vec(self).expect("scenario serializes");
        let digest = Sha256::digest(&bytes);
        let mut head = [0u8; 8];
        head.copy_from_slice(&digest[..8]);
        Fingerprint(u64::from_le_bytes(head))
    }
}

/// A single broken scenario invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonPositiveFrequency,
    EmptyGrid,
    NonPositivePitch,
    NonPositiveFocalDistance,
    NegativePatternExponent,
    NonPositiveAmplitudeScale,
    NoFoci,
    FocusTooClose { index: usize },
    NegativeWeight { index: usize },
    AllZeroWeights,
    DuplicateFocus { first: usize, second: usize },
    CellAmplitudeOutOfRange,
    ZeroQuantizationBits,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveFrequency => f.write_str("frequency must be positive"),
            Violation::EmptyGrid => f.write_str("grid needs at least one cell per side"),
            Violation::NonPositivePitch => f.write_str("non-positive pitch"),
            Violation::NonPositiveFocalDistance => f.write_str("feed focal distance must be positive"),
            Violation::NegativePatternExponent => f.write_str("feed pattern exponent must be >= 0"),
            Violation::NonPositiveAmplitudeScale => f.write_str("feed amplitude scale must be positive"),
            Violation::NoFoci => f.write_str("zero foci"),
            Violation::FocusTooClose { index } => {
                write!(f, "focus {index}: focus too close to aperture plane")
            }
            Violation::NegativeWeight { index } => write!(f, "focus {index}: negative weight"),
            Violation::AllZeroWeights => f.write_str("all-zero weights"),
            Violation::DuplicateFocus { first, second } => {
                write!(f, "foci {first} and {second} share a position")
            }
            Violation::CellAmplitudeOutOfRange => f.write_str("cell amplitude outside (0, 1]"),
            Violation::ZeroQuantizationBits => f.write_str("quantization needs at least one bit"),
        }
    }
}

/// Checks every scenario invariant and reports all violations at once.
pub fn validate_scenario(scenario: &Scenario) -> Result<()> {
    let mut out = Vec::new();
    if !(scenario.frequency.ghz > 0.0 && scenario.frequency.ghz.is_finite()) {
        out.push(Violation::NonPositiveFrequency);
    }
    if scenario.grid.cells_per_side == 0 {
        out.push(Violation::EmptyGrid);
    }
    let pitch = scenario.grid.pitch_mm;
    if !(pitch > 0.0) {
        out.push(Violation::NonPositivePitch);
    }
    if !(scenario.feed.focal_distance_mm > 0.0) {
        out.push(Violation::NonPositiveFocalDistance);
    }
    if !(scenario.feed.pattern_exponent >= 0.0) {
        out.push(Violation::NegativePatternExponent);
    }
    if !(scenario.feed.amplitude_scale > 0.0) {
        out.push(Violation::NonPositiveAmplitudeScale);
    }
    if scenario.foci.is_empty() {
        out.push(Violation::NoFoci);
    }
    for (index, focus) in scenario.foci.iter().enumerate() {
        // Without a valid pitch the z > p guard degenerates to z > 0.
        if !(focus.position_mm.z > pitch.max(0.0)) {
            out.push(Violation::FocusTooClose { index });
        }
        if !(focus.weight >= 0.0) {
            out.push(Violation::NegativeWeight { index });
        }
    }
    if !scenario.foci.is_empty() && !scenario.foci.iter().any(|f| f.weight > 0.0) {
        out.push(Violation::AllZeroWeights);
    }
    for (first, a) in scenario.foci.iter().enumerate() {
        for (offset, b) in scenario.foci[first + 1..].iter().enumerate() {
            if a.position_mm == b.position_mm {
                out.push(Violation::DuplicateFocus {
                    first,
                    second: first + 1 + offset,
                });
            }
        }
    }
    if !(scenario.cell_amplitude > 0.0 && scenario.cell_amplitude <= 1.0) {
        out.push(Violation::CellAmplitudeOutOfRange);
    }
    if scenario.quantization_bits == Some(0) {
        out.push(Violation::ZeroQuantizationBits);
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidScenario(Violations(out)))
    }
}

pub fn cell_center(grid: &ApertureGrid, i: usize, j: usize) -> Result<Point3> {
    let n = grid.cells_per_side;
    if i >= n || j >= n {
        return Err(Error::IndexOutOfRange { i, j, n });
    }
    Ok(Point3::new(grid.offset(i), grid.offset(j), 0.0))
}

/// Distance from the feed phase center to the center of cell (i, j).
pub fn feed_distance(scenario: &Scenario, i: usize, j: usize) -> Result<f64> {
    let c = cell_center(&scenario.grid, i, j)?;
    Ok(scenario.feed.phase_center().distance(&c))
}

/// Distance from the center of cell (i, j) to a focus.
pub fn focus_distance(grid: &ApertureGrid, i: usize, j: usize, focus: &FocusTarget) -> Result<f64> {
    Ok(cell_center(grid, i, j)?.distance(&focus.position_mm))
}
