// Compensation phases for the 2:1 preset, written as CSV.

use std::error::Error;

use metafocus::prelude::*;
use metafocus::synthesis::phase_foci;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let scenario = Scenario::preset("paper-2to1").ok_or("unknown preset")?;
    let map = synthesize(&scenario)?;
    let n = map.size();

    println!("{n}x{n} cells, fingerprint {}", map.fingerprint());
    for (i, j) in [(0, 0), (n / 2, n / 2), (n - 1, n / 2)] {
        println!(
            "cell ({i:2}, {j:2}): feed {:.4} rad, foci {:.4} rad, total {:.4} rad",
            phase_feed(&scenario, i, j)?,
            phase_foci(&scenario, i, j)?.radians,
            map.get(i, j)
        );
    }
    for w in &map.warnings {
        println!("warning: {w}");
    }

    let dir = std::env::temp_dir().join("metafocus-examples");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("phase_map_2to1.csv");
    write_phase_map(&map, &scenario, &path)?;

    let back = read_phase_map(&path, &scenario)?;
    assert_eq!(back.values(), map.values());
    println!("wrote {}", path.display());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
