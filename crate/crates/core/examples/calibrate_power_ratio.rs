// Search the weight split that gives a 3 dB ratio between two foci.

use std::error::Error;

use metafocus::prelude::*;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let template = Scenario::preset("paper-2to1").ok_or("unknown preset")?;
    let calibrator = Calibrator::new(&template)?;

    for delta in [0.0, 0.04, 0.08, 0.12] {
        println!("delta {delta:.2}: {:.2} dB", calibrator.ratio_for_delta(delta)?);
    }

    let result = calibrator.calibrate(3.0, 0.1, 0.3)?;
    println!(
        "target {} dB: delta* = {:.4} (weights {:.4}, {:.4}), {:.3} dB after {} probes, converged {}",
        result.target_db,
        result.delta_star,
        1.0 + result.delta_star,
        1.0 - result.delta_star,
        result.achieved_ratio_db,
        result.iterations(),
        result.converged
    );
    for (delta, ratio) in &result.trace {
        println!("  probe {delta:.4} -> {ratio:.3} dB");
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
