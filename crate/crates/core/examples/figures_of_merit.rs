// Depth and width of focus, power ratio and focusing efficiency for the
// three built-in power allocations.

use std::error::Error;

use metafocus::prelude::*;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    println!(
        "{:<12} {:>10} {:>14} {:>14} {:>8}",
        "preset", "ratio dB", "DOF mm", "WOF mm", "eta"
    );
    for name in ["paper-1to1", "paper-2to1", "paper-3to1"] {
        let scenario = Scenario::preset(name).ok_or("unknown preset")?;
        let planes = default_planes(&scenario, &[PlaneKind::Xoz, PlaneKind::Xoy], 2.0);
        let r = simulate(&scenario, None, &planes, &AnalysisOptions::default())?.report;
        println!(
            "{:<12} {:>10.2} {:>14} {:>14} {:>8.3}",
            name,
            r.peak_ratio_db.unwrap_or(f64::NAN),
            format!("{:?}", r.dof_mm),
            format!("{:.1?}", r.wof_mm),
            r.efficiency.unwrap_or(f64::NAN)
        );
        for w in &r.warnings {
            println!("  warning: {w}");
        }
    }

    let scenario = Scenario::preset("paper-1to1").ok_or("unknown preset")?;
    let planes = default_planes(&scenario, &[PlaneKind::Xoy], 2.0);
    let options = AnalysisOptions {
        wof: WofConvention::HalfDiameter,
    };
    let r = simulate(&scenario, None, &planes, &options)?.report;
    println!("paper-1to1 WOF as half the extent along x: {:.1?} mm", r.wof_mm);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
