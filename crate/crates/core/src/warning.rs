use std::fmt;

/// Non-fatal findings collected along the pipeline and surfaced in reports.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// The weighted foci phasor of a cell cancelled; its focusing phase was set to 0.
    PhaseCancellation { i: usize, j: usize },
    /// A half-power region reached the edge of its observation grid.
    RegionClipped { plane: String, peak_index: usize },
    /// Fewer peaks than requested were found.
    PeakShortfall {
        plane: String,
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::PhaseCancellation { i, j } => {
                write!(f, "cell ({i}, {j}): foci phasor cancelled, phase set to 0")
            }
            Warning::RegionClipped { plane, peak_index } => write!(
                f,
                "{plane}: half-power region of peak {peak_index} touches the grid boundary (extents too small)"
            ),
            Warning::PeakShortfall { plane, expected, found } => {
                write!(f, "{plane}: expected {expected} peaks, found {found}")
            }
        }
    }
}
