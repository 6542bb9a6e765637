//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation error, 2 I/O error, 3 model
//! inconsistency.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::calibration::Calibrator;
use crate::config::RunDocument;
use crate::error::{Error, Result};
use crate::export::{field_grid_csv, pgm_bytes, phase_map_csv, read_phase_map};
use crate::geometry::{validate_scenario, Scenario, PRESET_NAMES};
use crate::metrics::{AnalysisOptions, WofConvention};
use crate::pipeline::simulate;
use crate::propagation::{propagate_points, ComplexFieldGrid, ObservationSpec, PlaneKind, PlaneSpec, DEFAULT_STEP_MM};
use crate::synthesis::synthesize;

#[derive(Debug, Parser)]
#[command(
    name = "metafocus",
    version,
    about = "Multi-focus metasurface phase synthesis and near-field analysis"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Built-in scenario (see `presets`)
    #[arg(long, global = true, conflicts_with = "config")]
    pub preset: Option<String>,
    /// JSON run document
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Observation lattice step in mm
    #[arg(long = "step-mm", global = true, default_value_t = DEFAULT_STEP_MM)]
    pub step_mm: f64,
    /// Quantize phases to 2^B levels
    #[arg(long, global = true)]
    pub bits: Option<u32>,
    /// Override the feed focal distance F in mm
    #[arg(long = "focal-mm", global = true, allow_negative_numbers = true)]
    pub focal_mm: Option<f64>,
    /// Override the feed pattern exponent q
    #[arg(long = "pattern-exponent", global = true, allow_negative_numbers = true)]
    pub pattern_exponent: Option<f64>,
    /// Write PGM heatmaps next to the CSV outputs
    #[arg(long, global = true)]
    pub images: bool,
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WofArg {
    MaxRadius,
    HalfDiameter,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the compensation phase map
    Synth,
    /// Propagate the design and report figures of merit
    Simulate {
        /// Comma-separated planes: xoy, xoz, yoz
        #[arg(long, value_delimiter = ',')]
        planes: Vec<String>,
        /// Use a previously exported phase map instead of synthesizing
        #[arg(long = "phase-map")]
        phase_map: Option<PathBuf>,
        /// Skip per-plane field CSVs
        #[arg(long = "no-field-csv")]
        no_field_csv: bool,
        #[arg(long, value_enum, default_value = "max-radius")]
        wof: WofArg,
    },
    /// Find weights (1+δ, 1−δ) that reach a target peak ratio
    Calibrate {
        #[arg(long = "target-db", allow_negative_numbers = true)]
        target_db: f64,
        #[arg(long, default_value_t = 0.25, allow_negative_numbers = true)]
        tol: f64,
        #[arg(long = "delta-max", default_value_t = 0.3)]
        delta_max: f64,
    },
    /// List built-in scenarios with full parameters
    Presets {
        /// Print only this preset's run document
        #[arg(long)]
        name: Option<String>,
    },
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn say(global: &GlobalArgs, msg: impl AsRef<str>) {
    if !global.quiet {
        println!("{}", msg.as_ref());
    }
}

fn load_document(global: &GlobalArgs) -> Result<RunDocument> {
    let mut doc = match (&global.preset, &global.config) {
        (Some(name), None) => RunDocument::from_preset(name).ok_or_else(|| Error::Parse {
            context: "--preset".into(),
            message: format!("unknown preset '{name}'; known: {}", PRESET_NAMES.join(", ")),
        })?,
        (None, Some(path)) => RunDocument::load(path)?,
        _ => {
            return Err(Error::Parse {
                context: "arguments".into(),
                message: "exactly one of --preset or --config is required".into(),
            })
        }
    };
    let s = &mut doc.scenario;
    if let Some(bits) = global.bits {
        s.quantization_bits = Some(bits);
    }
    if let Some(f) = global.focal_mm {
        s.feed.focal_distance_mm = f;
    }
    if let Some(q) = global.pattern_exponent {
        s.feed.pattern_exponent = q;
    }
    validate_scenario(s)?;
    Ok(doc)
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes)?;
    Ok(())
}

fn execute(cli: &Cli) -> Result<i32> {
    let global = &cli.global;
    match &cli.command {
        Command::Presets { name } => presets(name.as_deref()),
        Command::Synth => {
            let doc = load_document(global)?;
            fs::create_dir_all(&global.out)?;
            let map = synthesize(&doc.scenario)?;
            write_file(&global.out.join("phase_map.csv"), phase_map_csv(&map, &doc.scenario))?;
            if global.images {
                write_file(&global.out.join("phase_map.pgm"), pgm_bytes(&map))?;
            }
            for w in &map.warnings {
                eprintln!("warning: {w}");
            }
            say(
                global,
                format!(
                    "wrote {}x{} phase map to {}",
                    map.size(),
                    map.size(),
                    global.out.display()
                ),
            );
            Ok(0)
        }
        Command::Simulate {
            planes,
            phase_map,
            no_field_csv,
            wof,
        } => {
            let doc = load_document(global)?;
            run_simulate(global, &doc, planes, phase_map.as_deref(), !no_field_csv, *wof)
        }
        Command::Calibrate {
            target_db,
            tol,
            delta_max,
        } => {
            if !(*target_db >= 0.0) {
                return Err(Error::InvalidCalibration("target must be ≥ 0".into()));
            }
            let doc = load_document(global)?;
            let calibrator = Calibrator::with_step(&doc.scenario, global.step_mm)?;
            let result = calibrator.calibrate(*target_db, *tol, *delta_max)?;
            fs::create_dir_all(&global.out)?;
            write_file(&global.out.join("calibration.json"), result.to_json())?;
            say(
                global,
                format!(
                    "delta* = {} -> {:.3} dB (target {} dB, {} probes, converged: {})",
                    result.delta_star,
                    result.achieved_ratio_db,
                    result.target_db,
                    result.iterations(),
                    result.converged
                ),
            );
            if result.converged {
                Ok(0)
            } else {
                eprintln!("error: calibration did not converge within tolerance");
                Ok(1)
            }
        }
    }
}

/// Text printed by `presets`: one run document, or every preset by name.
pub fn presets_text(name: Option<&str>) -> Result<String> {
    match name {
        Some(n) => {
            let doc = RunDocument::from_preset(n).ok_or_else(|| Error::Parse {
                context: "--name".into(),
                message: format!("unknown preset '{n}'; known: {}", PRESET_NAMES.join(", ")),
            })?;
            Ok(format!("{}\n", doc.to_json()))
        }
        None => Ok(PRESET_NAMES
            .iter()
            .map(|n| {
                format!(
                    "{n}:\n{}\n",
                    RunDocument::from_preset(n).expect("built-in preset").to_json()
                )
            })
            .collect::<Vec<_>>()
            .join("\n")),
    }
}

fn presets(name: Option<&str>) -> Result<i32> {
    std::io::stdout().lock().write_all(presets_text(name)?.as_bytes())?;
    Ok(0)
}

fn field_file_stem(grid: &ComplexFieldGrid) -> String {
    let fixed_axis = match grid.plane {
        PlaneKind::Xoy => "z",
        PlaneKind::Xoz => "y",
        PlaneKind::Yoz => "x",
    };
    format!("field_{}_{}{}", grid.plane.name(), fixed_axis, grid.fixed_mm)
}

fn run_simulate(
    global: &GlobalArgs,
    doc: &RunDocument,
    plane_names: &[String],
    phase_map: Option<&Path>,
    field_csv: bool,
    wof: WofArg,
) -> Result<i32> {
    let scenario: &Scenario = &doc.scenario;
    let mut planes: Vec<PlaneSpec> = Vec::new();
    let mut points = Vec::new();
    for obs in &doc.observations {
        match obs {
            ObservationSpec::Plane(p) => planes.push(*p),
            ObservationSpec::Volume(v) => planes.extend(v.planes()?),
            ObservationSpec::Point { position_mm } => points.push(*position_mm),
        }
    }
    for name in plane_names.iter().filter(|n| !n.is_empty()) {
        let kind: PlaneKind = name.trim().parse()?;
        planes.push(PlaneSpec::default_for(scenario, kind, global.step_mm));
    }
    if planes.is_empty() && points.is_empty() {
        return Err(Error::InvalidObservation(
            "no observation planes; pass --planes xoz,xoy or list observations in the config".into(),
        ));
    }

    let imported = phase_map.map(|p| read_phase_map(p, scenario)).transpose()?;
    let options = AnalysisOptions {
        wof: match wof {
            WofArg::MaxRadius => WofConvention::MaxRadius,
            WofArg::HalfDiameter => WofConvention::HalfDiameter,
        },
    };
    let sim = simulate(scenario, imported, &planes, &options)?;

    fs::create_dir_all(&global.out)?;
    write_file(
        &global.out.join("phase_map.csv"),
        phase_map_csv(&sim.phase_map, scenario),
    )?;
    for (n, grid) in sim.grids.iter().enumerate() {
        let stem = match sim.grids[..n]
            .iter()
            .any(|g| field_file_stem(g) == field_file_stem(grid))
        {
            true => format!("{}_{n}", field_file_stem(grid)),
            false => field_file_stem(grid),
        };
        if field_csv {
            write_file(&global.out.join(format!("{stem}.csv")), field_grid_csv(grid))?;
        }
        if global.images {
            write_file(&global.out.join(format!("{stem}.pgm")), pgm_bytes(grid))?;
        }
    }
    if !points.is_empty() {
        let values = propagate_points(&sim.field, &points)?;
        let mut text = String::from("x_mm,y_mm,z_mm,re,im\n");
        for (p, e) in points.iter().zip(values) {
            text.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                p.x, p.y, p.z, e.re, e.im
            ));
        }
        write_file(&global.out.join("points.csv"), text)?;
    }
    write_file(&global.out.join("metrics.json"), sim.report.to_json())?;

    let r = &sim.report;
    say(global, format!("peaks: {}", r.peaks.len()));
    if let Some(ratio) = r.peak_ratio_db {
        say(global, format!("peak ratio: {ratio:.3} dB"));
    }
    if let Some(eta) = r.efficiency {
        say(global, format!("focusing efficiency: {:.1}%", 100.0 * eta));
    }
    say(global, format!("dof_mm: {:?}  wof_mm: {:?}", r.dof_mm, r.wof_mm));
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};
    use tempfile::TempDir;

    fn cli(dir: &Path, args: &[&str]) -> i32 {
        let out = dir.to_str().unwrap();
        let mut argv = vec!["metafocus", "--quiet", "--out", out];
        argv.extend_from_slice(args);
        run(argv)
    }

    fn read(dir: &Path, name: &str) -> String {
        fs::read_to_string(dir.join(name)).unwrap()
    }

    fn all_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().to_string_lossy().into_owned(),
                    fs::read(e.path()).unwrap(),
                )
            })
            .collect();
        files.sort();
        files
    }

    fn phase_values(text: &str) -> Vec<f64> {
        text.lines()
            .skip(1)
            .flat_map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect::<Vec<_>>())
            .collect()
    }

    #[test]
    fn synth_writes_full_range_map() {
        let tmp = TempDir::new().unwrap();
        assert_eq!(cli(tmp.path(), &["synth", "--preset", "paper-1to1", "--images"]), 0);
        let text = read(tmp.path(), "phase_map.csv");
        assert_eq!(text.lines().count(), 20);
        let values = phase_values(&text);
        assert_eq!(values.len(), 361);
        assert!(values.iter().all(|v| (0.0..TAU).contains(v)));
        assert!(fs::read(tmp.path().join("phase_map.pgm"))
            .unwrap()
            .starts_with(b"P5 19 19 255\n"));
    }

    #[test]
    fn synth_bits_snaps_to_levels() {
        let tmp = TempDir::new().unwrap();
        assert_eq!(cli(tmp.path(), &["synth", "--preset", "paper-1to1", "--bits", "3"]), 0);
        for v in phase_values(&read(tmp.path(), "phase_map.csv")) {
            let m = v / (PI / 4.0);
            assert!((m - m.round()).abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn missing_inputs() {
        let tmp = TempDir::new().unwrap();
        let missing = tmp.path().join("missing.json");
        assert_eq!(cli(tmp.path(), &["synth", "--config", missing.to_str().unwrap()]), 2);
        assert_eq!(cli(tmp.path(), &["synth", "--preset", "paper-9to1"]), 1);
        assert_eq!(cli(tmp.path(), &["synth"]), 1);
        assert_eq!(cli(tmp.path(), &["simulate", "--preset", "paper-1to1"]), 1);
        assert_eq!(
            cli(tmp.path(), &["simulate", "--preset", "paper-1to1", "--planes", "xyz"]),
            1
        );
        assert_eq!(
            cli(tmp.path(), &["synth", "--preset", "paper-1to1", "--focal-mm", "-3"]),
            1
        );
        assert_eq!(cli(tmp.path(), &["frobnicate"]), 1);
    }

    #[test]
    fn simulate_symmetric_preset() {
        let tmp = TempDir::new().unwrap();
        let code = cli(
            tmp.path(),
            &["simulate", "--preset", "paper-1to1", "--planes", "xoz,xoy", "--images"],
        );
        assert_eq!(code, 0);
        let names: Vec<String> = all_files(tmp.path()).into_iter().map(|f| f.0).collect();
        for expected in [
            "field_xoy_z90.csv",
            "field_xoy_z90.pgm",
            "field_xoz_y0.csv",
            "field_xoz_y0.pgm",
            "metrics.json",
            "phase_map.csv",
        ] {
            assert!(names.iter().any(|n| n == expected), "{expected} missing from {names:?}");
        }
        let report: serde_json::Value = serde_json::from_str(&read(tmp.path(), "metrics.json")).unwrap();
        assert_eq!(report["peaks"].as_array().unwrap().len(), 2);
        assert!(report["peak_ratio_db"].as_f64().unwrap() < 0.1);
        assert_eq!(report["dof_mm"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn simulate_is_deterministic() {
        let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
        for dir in [&a, &b] {
            let args = ["simulate", "--preset", "paper-2to1", "--planes", "xoz,xoy", "--images"];
            assert_eq!(cli(dir.path(), &args), 0);
        }
        assert_eq!(all_files(a.path()), all_files(b.path()));
        let report: serde_json::Value = serde_json::from_str(&read(a.path(), "metrics.json")).unwrap();
        assert!(report["peak_ratio_db"].as_f64().unwrap() > 0.5);
    }

    #[test]
    fn preset_dump_reproduces_preset_run() {
        let tmp = TempDir::new().unwrap();
        let config = tmp.path().join("paper-1to1.json");
        fs::write(&config, presets_text(Some("paper-1to1")).unwrap()).unwrap();
        let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
        assert_eq!(cli(&a, &["simulate", "--preset", "paper-1to1", "--planes", "xoy"]), 0);
        assert_eq!(
            cli(
                &b,
                &["simulate", "--config", config.to_str().unwrap(), "--planes", "xoy"]
            ),
            0
        );
        assert_eq!(all_files(&a), all_files(&b));
    }

    #[test]
    fn imported_phase_map_reproduces_metrics() {
        let tmp = TempDir::new().unwrap();
        let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
        assert_eq!(
            cli(&a, &["simulate", "--preset", "paper-3to1", "--planes", "xoz,xoy"]),
            0
        );
        let map = a.join("phase_map.csv");
        let args = [
            "simulate",
            "--preset",
            "paper-3to1",
            "--planes",
            "xoz,xoy",
            "--phase-map",
            map.to_str().unwrap(),
        ];
        assert_eq!(cli(&b, &args), 0);
        assert_eq!(
            fs::read(a.join("metrics.json")).unwrap(),
            fs::read(b.join("metrics.json")).unwrap()
        );

        let args = [
            "simulate",
            "--preset",
            "paper-1to1",
            "--planes",
            "xoy",
            "--phase-map",
            map.to_str().unwrap(),
        ];
        assert_eq!(cli(&tmp.path().join("c"), &args), 0);
        let mut other = Scenario::preset("paper-1to1").unwrap();
        other.grid.cells_per_side = 21;
        let config = tmp.path().join("other.json");
        fs::write(
            &config,
            RunDocument {
                scenario: other,
                observations: vec![],
            }
            .to_json(),
        )
        .unwrap();
        let args = [
            "simulate",
            "--config",
            config.to_str().unwrap(),
            "--planes",
            "xoy",
            "--phase-map",
            map.to_str().unwrap(),
        ];
        assert_eq!(cli(&tmp.path().join("d"), &args), 1);
    }

    #[test]
    fn config_observations_drive_outputs() {
        let tmp = TempDir::new().unwrap();
        let mut doc = RunDocument::from_preset("paper-1to1").unwrap();
        doc.observations = vec![
            ObservationSpec::Point {
                position_mm: crate::geometry::Point3::new(60.0, 0.0, 90.0),
            },
            ObservationSpec::Plane(PlaneSpec::default_for(&doc.scenario, PlaneKind::Xoy, 4.0)),
        ];
        let config = tmp.path().join("run.json");
        fs::write(&config, doc.to_json()).unwrap();
        let out = tmp.path().join("out");
        assert_eq!(
            cli(
                &out,
                &["simulate", "--config", config.to_str().unwrap(), "--no-field-csv"]
            ),
            0
        );
        let points = read(&out, "points.csv");
        assert_eq!(points.lines().count(), 2);
        assert!(!out.join("field_xoy_z90.csv").exists());
        let report: serde_json::Value = serde_json::from_str(&read(&out, "metrics.json")).unwrap();
        assert_eq!(report["peaks"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn calibrate_exit_codes() {
        let tmp = TempDir::new().unwrap();
        assert_eq!(cli(tmp.path(), &["calibrate", "--target-db", "-1"]), 1);
        assert_eq!(
            cli(tmp.path(), &["calibrate", "--preset", "paper-2to1", "--target-db", "0"]),
            0
        );
        let result: serde_json::Value = serde_json::from_str(&read(tmp.path(), "calibration.json")).unwrap();
        assert_eq!(result["delta_star"].as_f64(), Some(0.0));
        assert_eq!(result["trace"].as_array().unwrap().len(), 1);

        let args = [
            "calibrate",
            "--preset",
            "paper-2to1",
            "--target-db",
            "3",
            "--tol",
            "0.25",
        ];
        assert_eq!(cli(tmp.path(), &args), 0);
        let result: serde_json::Value = serde_json::from_str(&read(tmp.path(), "calibration.json")).unwrap();
        assert!(result["converged"].as_bool().unwrap());
        assert!((result["achieved_ratio_db"].as_f64().unwrap() - 3.0).abs() <= 0.25);

        assert_eq!(
            cli(
                tmp.path(),
                &["calibrate", "--preset", "paper-2to1", "--target-db", "30"]
            ),
            1
        );
        let result: serde_json::Value = serde_json::from_str(&read(tmp.path(), "calibration.json")).unwrap();
        assert!(!result["converged"].as_bool().unwrap());
        assert_eq!(
            cli(
                tmp.path(),
                &["calibrate", "--preset", "paper-2to1", "--target-db", "3", "--tol", "0"]
            ),
            1
        );
    }

    #[test]
    fn presets_round_trip() {
        let all = presets_text(None).unwrap();
        for name in PRESET_NAMES {
            assert!(all.contains(&format!("{name}:\n")));
            let doc = RunDocument::parse(&presets_text(Some(name)).unwrap(), name).unwrap();
            assert_eq!(doc.scenario, Scenario::preset(name).unwrap());
        }
        assert!(presets_text(Some("nope")).is_err());
    }
}
