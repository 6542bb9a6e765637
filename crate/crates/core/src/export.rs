//! On-disk artifacts: phase-map CSV, field-grid CSV and 8-bit PGM heatmaps.
//!
//! Floating point values are written with 17 significant digits so that a
//! re-imported file reproduces the exact same bits.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Scenario;
use crate::propagation::ComplexFieldGrid;
use crate::synthesis::PhaseMap;

/// Floor of the intensity heatmap scale, dB below the grid peak.
pub const HEATMAP_FLOOR_DB: f64 = -30.0;

/// Lowest normalized level written to field CSVs (a zero sample would be −∞).
pub const CSV_FLOOR_DB: f64 = -300.0;

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn phase_map_csv(map: &PhaseMap, scenario: &Scenario) -> String {
    let mut out = format!(
        "# phase_map N={} pitch_mm={} f_GHz={}\n",
        map.size(),
        scenario.grid.pitch_mm,
        scenario.frequency.ghz()
    );
    for row in map.rows() {
        let cells: Vec<String> = row.iter().map(|v| num(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_phase_map(map: &PhaseMap, scenario: &Scenario, path: &Path) -> Result<()> {
    fs::write(path, phase_map_csv(map, scenario))?;
    Ok(())
}

fn parse_err(message: impl Into<String>) -> Error {
    Error::Parse {
        context: "phase map CSV".into(),
        message: message.into(),
    }
}

/// Parses a phase-map CSV and binds it to `scenario`, whose grid and
/// frequency must match the header.
pub fn parse_phase_map(text: &str, scenario: &Scenario) -> Result<PhaseMap> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| parse_err("empty file"))?;
    let fields = header
        .strip_prefix("# phase_map ")
        .ok_or_else(|| parse_err("missing '# phase_map' header"))?;
    let mut n = None;
    let mut pitch = None;
    let mut ghz = None;
    for kv in fields.split_whitespace() {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| parse_err(format!("bad header field '{kv}'")))?;
        let bad = |_| parse_err(format!("bad value in '{kv}'"));
        match key {
            "N" => {
                n = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| parse_err(format!("bad value in '{kv}'")))?,
                )
            }
            "pitch_mm" => pitch = Some(value.parse::<f64>().map_err(bad)?),
            "f_GHz" => ghz = Some(value.parse::<f64>().map_err(bad)?),
            other => return Err(parse_err(format!("unknown header field '{other}'"))),
        }
    }
    let (n, pitch, ghz) = match (n, pitch, ghz) {
        (Some(n), Some(p), Some(f)) => (n, p, f),
        _ => return Err(parse_err("header needs N, pitch_mm and f_GHz")),
    };
    if n != scenario.grid.cells_per_side || pitch != scenario.grid.pitch_mm || ghz != scenario.frequency.ghz() {
        return Err(Error::FingerprintMismatch);
    }

    let mut values = Vec::with_capacity(n * n);
    for (row, line) in lines.filter(|l| !l.trim().is_empty()).enumerate() {
        let parsed = line
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| parse_err(format!("row {row}: {e}")))?;
        if parsed.len() != n {
            return Err(parse_err(format!(
                "row {row} has {} values, expected {n}",
                parsed.len()
            )));
        }
        values.extend(parsed);
    }
    PhaseMap::from_values(n, values, scenario.fingerprint())
}

pub fn read_phase_map(path: &Path, scenario: &Scenario) -> Result<PhaseMap> {
    parse_phase_map(&fs::read_to_string(path)?, scenario)
}

fn peak_intensity(grid: &ComplexFieldGrid) -> f64 {
    grid.samples.iter().map(|s| s.norm_sqr()).fold(0.0, f64::max)
}

fn normalized_db(intensity: f64, peak: f64) -> f64 {
    if peak > 0.0 && intensity > 0.0 {
        (10.0 * (intensity / peak).log10()).max(CSV_FLOOR_DB)
    } else {
        CSV_FLOOR_DB
    }
}

/// Field grid as CSV: one row per lattice point, axis1-major.
pub fn field_grid_csv(grid: &ComplexFieldGrid) -> String {
    let (n1, n2) = grid.dims();
    let peak = peak_intensity(grid);
    let mut out = String::from("axis1_mm,axis2_mm,re,im,intensity_db_normalized\n");
    for a1 in 0..n1 {
        for a2 in 0..n2 {
            let e = grid.get(a1, a2);
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                num(grid.axis1.value(a1)),
                num(grid.axis2.value(a2)),
                num(e.re),
                num(e.im),
                num(normalized_db(e.norm_sqr(), peak))
            );
        }
    }
    out
}

pub fn write_field_grid(grid: &ComplexFieldGrid, path: &Path) -> Result<()> {
    fs::write(path, field_grid_csv(grid))?;
    Ok(())
}

/// Anything that can be drawn as an 8-bit grayscale image.
pub trait Heatmap {
    /// (width, height)
    fn image_dims(&self) -> (usize, usize);
    /// Row-major pixels, top row first.
    fn pixels(&self) -> Vec<u8>;
}

/// Intensity in dB relative to the grid peak, mapped linearly from
/// [−30 dB, 0 dB] to [0, 255]. Columns follow axis1, rows axis2 with the
/// largest axis2 value on top.
impl Heatmap for ComplexFieldGrid {
    fn image_dims(&self) -> (usize, usize) {
        self.dims()
    }

    fn pixels(&self) -> Vec<u8> {
        let (n1, n2) = self.dims();
        let peak = peak_intensity(self);
        let mut px = Vec::with_capacity(n1 * n2);
        for row in 0..n2 {
            let a2 = n2 - 1 - row;
            for a1 in 0..n1 {
                let i = self.intensity(a1, a2);
                let db = if peak > 0.0 && i > 0.0 {
                    (10.0 * (i / peak).log10()).clamp(HEATMAP_FLOOR_DB, 0.0)
                } else {
                    HEATMAP_FLOOR_DB
                };
                px.push(((db - HEATMAP_FLOOR_DB) / -HEATMAP_FLOOR_DB * 255.0).round() as u8);
            }
        }
        px
    }
}

/// Phase in [0, 2π) mapped to [0, 255]; rows follow i, columns j.
impl Heatmap for PhaseMap {
    fn image_dims(&self) -> (usize, usize) {
        (self.size(), self.size())
    }

    fn pixels(&self) -> Vec<u8> {
        self.values()
            .iter()
            .map(|v| ((v / TAU) * 256.0).floor().clamp(0.0, 255.0) as u8)
            .collect()
    }
}

/// Binary PGM (P5) bytes.
pub fn pgm_bytes(source: &impl Heatmap) -> Vec<u8> {
    let (w, h) = source.image_dims();
    let mut out = format!("P5 {w} {h} 255\n").into_bytes();
    out.extend(source.pixels());
    out
}

pub fn render_heatmap(source: &impl Heatmap, path: &Path) -> Result<()> {
    let (w, h) = source.image_dims();
    if w == 0 || h == 0 {
        return Err(Error::InvalidObservation("cannot render an empty grid".into()));
    }
    fs::write(path, pgm_bytes(source))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagation::{PlaneKind, PlaneSpec};
    use crate::synthesis::synthesize;
    use num_complex::Complex64;

    fn small_grid() -> ComplexFieldGrid {
        ComplexFieldGrid::zeros(&PlaneSpec {
            plane: PlaneKind::Xoy,
            fixed_mm: 90.0,
            axis1_mm: [0.0, 4.0],
            axis2_mm: [0.0, 2.0],
            step_mm: 1.0,
        })
        .unwrap()
    }

    #[test]
    fn phase_csv_round_trips_exactly() {
        let s = Scenario::preset("paper-2to1").unwrap();
        let map = synthesize(&s).unwrap();
        let text = phase_map_csv(&map, &s);
        assert!(text.starts_with("# phase_map N=19 pitch_mm=10 f_GHz=10\n"));
        assert_eq!(text.lines().count(), 20);
        let back = parse_phase_map(&text, &s).unwrap();
        assert_eq!(back.values(), map.values());
        assert_eq!(back.fingerprint(), map.fingerprint());
    }

    #[test]
    fn phase_csv_rejects_other_grids() {
        let s = Scenario::preset("paper-1to1").unwrap();
        let text = phase_map_csv(&synthesize(&s).unwrap(), &s);
        let mut other = s.clone();
        other.grid.cells_per_side = 17;
        assert!(matches!(
            parse_phase_map(&text, &other),
            Err(Error::FingerprintMismatch)
        ));
        assert!(parse_phase_map("0.1,0.2\n", &s).is_err());
        let truncated: String = text.lines().take(5).collect::<Vec<_>>().join("\n");
        assert!(parse_phase_map(&truncated, &s).is_err());
    }

    #[test]
    fn zero_grid_renders_black() {
        let g = small_grid();
        assert!(g.pixels().iter().all(|p| *p == 0));
    }

    #[test]
    fn peak_pixel_is_white() {
        let mut g = small_grid();
        g.samples[7] = Complex64::new(0.0, 2.0);
        g.samples[3] = Complex64::new(0.2, 0.0); // −20 dB
        let px = g.pixels();
        assert_eq!(px.iter().filter(|p| **p == 255).count(), 1);
        assert_eq!(*px.iter().max().unwrap(), 255);
        assert!(px.contains(&85));
    }

    #[test]
    fn phase_heatmap_header() {
        let s = Scenario::preset("paper-1to1").unwrap();
        let map = synthesize(&s).unwrap();
        let bytes = pgm_bytes(&map);
        assert!(bytes.starts_with(b"P5 19 19 255\n"));
        assert_eq!(bytes.len(), "P5 19 19 255\n".len() + 361);
    }

    #[test]
    fn field_csv_layout() {
        let mut g = small_grid();
        g.samples[0] = Complex64::new(1.0, 0.0);
        let text = field_grid_csv(&g);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "axis1_mm,axis2_mm,re,im,intensity_db_normalized");
        assert_eq!(lines.len(), 1 + 15);
        let first: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(first, vec![0.0, 0.0, 1.0, 0.0, 0.0]);
        let second: Vec<f64> = lines[2].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(second[4], CSV_FLOOR_DB);
    }
}
