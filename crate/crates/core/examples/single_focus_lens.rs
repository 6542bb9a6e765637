// A custom single-focus lens built from scratch, checked on the axis.

use std::error::Error;

use metafocus::prelude::*;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let grid = ApertureGrid {
        cells_per_side: 15,
        pitch_mm: 10.0,
    };
    let scenario = Scenario {
        frequency: FrequencySpec::new(10.0)?,
        feed: FeedModel::new(80.0, 4.0),
        grid,
        foci: vec![FocusTarget::new(Point3::new(0.0, 0.0, 100.0), 1.0)],
        cell_amplitude: 0.9,
        quantization_bits: None,
    };
    validate_scenario(&scenario)?;

    let map = synthesize(&scenario)?;
    let field = aperture_field(&scenario, &map)?;
    println!("incident power {:.4e}", incident_power(&scenario)?);

    println!("on-axis |E|^2:");
    for z in (40..=200).step_by(20) {
        let e = propagate_point(&field, &Point3::new(0.0, 0.0, z as f64))?;
        println!("  z = {z:3} mm  {:.4e}", e.norm_sqr());
    }

    let planes = default_planes(&scenario, &[PlaneKind::Xoz, PlaneKind::Xoy], 2.0);
    let r = simulate(&scenario, Some(map), &planes, &AnalysisOptions::default())?.report;
    let p = &r.peaks[0];
    println!(
        "focal-plane peak ({}, {}, {}) mm, DOF {:?} mm, WOF {:.1?} mm, eta {:.3}",
        p.x_mm,
        p.y_mm,
        p.z_mm,
        r.dof_mm,
        r.wof_mm,
        r.efficiency.unwrap_or(f64::NAN)
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
