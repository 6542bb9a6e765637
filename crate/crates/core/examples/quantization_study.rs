// Effect of 1 to 4 bit phase quantization on the 1:1 preset.

use std::error::Error;

use metafocus::prelude::*;
use metafocus::synthesis::{max_phase_error, quantization_bound};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let base = Scenario::preset("paper-1to1").ok_or("unknown preset")?;
    let continuous = synthesize(&base)?;

    println!(
        "{:>6} {:>12} {:>12} {:>7} {:>10} {:>8}",
        "bits", "max err", "bound", "peaks", "ratio dB", "eta"
    );
    for bits in [None, Some(4), Some(3), Some(2), Some(1)] {
        let mut scenario = base.clone();
        scenario.quantization_bits = bits;
        let map = synthesize(&scenario)?;
        let err = max_phase_error(&map, &continuous);
        let bound = bits.map(quantization_bound).unwrap_or(0.0);

        let planes = default_planes(&scenario, &[PlaneKind::Xoy], 2.0);
        let r = simulate(&scenario, Some(map), &planes, &AnalysisOptions::default())?.report;
        println!(
            "{:>6} {:>12.4} {:>12.4} {:>7} {:>10.3} {:>8.3}",
            bits.map_or("cont".to_string(), |b| b.to_string()),
            err,
            bound,
            r.peaks.len(),
            r.peak_ratio_db.unwrap_or(f64::NAN),
            r.efficiency.unwrap_or(f64::NAN)
        );
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
