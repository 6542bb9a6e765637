// A JSON run document with point, plane and volume observations.

use std::error::Error;

use metafocus::prelude::*;
use metafocus::propagation::Observation;

const DOCUMENT: &str = r#"{
    "scenario": {
        "frequency_ghz": 10.0,
        "grid": {"cells_per_side": 19, "pitch_mm": 10.0},
        "feed": {"focal_distance_mm": 104.5, "pattern_exponent": 8.0},
        "foci": [
            {"position_mm": [40.0, 40.0, 100.0], "weight": 1.0},
            {"position_mm": [-40.0, -40.0, 100.0], "weight": 1.0}
        ],
        "cell_amplitude": 1.0
    },
    "observations": [
        {"kind": "point", "position_mm": [40.0, 40.0, 100.0]},
        {"kind": "point", "position_mm": [0.0, 0.0, 100.0]},
        {"kind": "plane", "plane": "xoy", "fixed_mm": 100.0, "axis1_mm": [-80.0, 80.0], "axis2_mm": [-80.0, 80.0], "step_mm": 4.0},
        {"kind": "volume", "x_mm": [30.0, 50.0], "y_mm": [30.0, 50.0], "z_mm": [80.0, 120.0], "step_mm": 10.0}
    ]
}"#;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let doc = RunDocument::parse(DOCUMENT, "inline")?;
    let map = synthesize(&doc.scenario)?;
    let field = aperture_field(&doc.scenario, &map)?;

    for spec in &doc.observations {
        match propagate(&field, spec)? {
            Observation::Point(e) => {
                if let ObservationSpec::Point { position_mm: p } = spec {
                    println!("point ({}, {}, {}): |E|^2 = {:.4e}", p.x, p.y, p.z, e.norm_sqr());
                }
            }
            Observation::Plane(g) => {
                let max = g.intensities().into_iter().fold(0.0, f64::max);
                println!("plane {}: {:?} samples, max |E|^2 = {:.4e}", g.label(), g.dims(), max);
            }
            Observation::Volume(slices) => {
                for g in &slices {
                    let max = g.intensities().into_iter().fold(0.0, f64::max);
                    println!("volume slice {}: max |E|^2 = {:.4e}", g.label(), max);
                }
            }
        }
    }
    println!(
        "{}",
        RunDocument::from_preset("paper-1to1")
            .ok_or("unknown preset")?
            .to_json()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
