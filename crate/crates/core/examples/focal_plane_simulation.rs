// Field on the focal plane of the 1:1 preset, with a coarse text rendering.

use std::error::Error;

use metafocus::metrics::find_peaks;
use metafocus::prelude::*;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let scenario = Scenario::preset("paper-1to1").ok_or("unknown preset")?;
    let map = synthesize(&scenario)?;
    let field = aperture_field(&scenario, &map)?;

    let spec = PlaneSpec::default_for(&scenario, PlaneKind::Xoy, 4.0);
    let grid = propagate_plane(&field, &spec)?;
    let (n1, n2) = grid.dims();
    println!("{}: {n1}x{n2} samples", grid.label());

    let peaks = find_peaks(&grid, 2)?;
    for p in &peaks.peaks {
        println!(
            "peak at ({:.0}, {:.0}, {:.0}) mm, {:.2} dB",
            p.position.x, p.position.y, p.position.z, p.intensity_db
        );
    }

    let max = grid.intensities().into_iter().fold(0.0, f64::max);
    let shades = [' ', '.', ':', '+', '#'];
    for a2 in (0..n2).rev().step_by(2) {
        let row: String = (0..n1)
            .map(|a1| {
                let db = 10.0 * (grid.intensity(a1, a2) / max).log10();
                shades[((db + 15.0) / 15.0 * 4.0).clamp(0.0, 4.0) as usize]
            })
            .collect();
        println!("|{row}|");
    }

    let dir = std::env::temp_dir().join("metafocus-examples");
    std::fs::create_dir_all(&dir)?;
    write_field_grid(&grid, &dir.join("field_xoy_1to1.csv"))?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
