// PGM images of the phase map and of the xoz and xoy intensity planes.

use std::error::Error;

use metafocus::prelude::*;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let scenario = Scenario::preset("paper-3to1").ok_or("unknown preset")?;
    let planes = default_planes(&scenario, &[PlaneKind::Xoz, PlaneKind::Xoy], 2.0);
    let sim = simulate(&scenario, None, &planes, &AnalysisOptions::default())?;

    let dir = std::env::temp_dir().join("metafocus-examples");
    std::fs::create_dir_all(&dir)?;
    let phase = dir.join("phase_3to1.pgm");
    render_heatmap(&sim.phase_map, &phase)?;
    println!("wrote {}", phase.display());
    for grid in &sim.grids {
        let path = dir.join(format!("{}_3to1.pgm", grid.plane.name()));
        render_heatmap(grid, &path)?;
        println!("wrote {} ({}x{})", path.display(), grid.dims().0, grid.dims().1);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
