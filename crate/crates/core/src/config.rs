//! JSON run documents: a scenario plus optional observation specs, with
//! unit-suffixed keys. Unknown keys are rejected.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Scenario;
use crate::propagation::ObservationSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunDocument {
    pub scenario: Scenario,
    #[serde(default)]
    pub observations: Vec<ObservationSpec>,
}

impl RunDocument {
    pub fn from_preset(name: &str) -> Option<Self> {
        Scenario::preset(name).map(|scenario| Self {
            scenario,
            observations: Vec::new(),
        })
    }

    pub fn parse(text: &str, context: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            context: context.to_string(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::ConfigNotFound(path.to_path_buf()));
        }
        Self::parse(&fs::read_to_string(path)?, &path.display().to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run document serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagation::{PlaneKind, PlaneSpec};

    #[test]
    fn preset_documents_round_trip() {
        let mut doc = RunDocument::from_preset("paper-3to1").unwrap();
        doc.observations.push(ObservationSpec::Plane(PlaneSpec::default_for(
            &doc.scenario,
            PlaneKind::Xoy,
            2.0,
        )));
        let back = RunDocument::parse(&doc.to_json(), "test").unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn documented_keys() {
        let text = r#"{
            "scenario": {
                "frequency_ghz": 10.0,
                "grid": {"cells_per_side": 5, "pitch_mm": 10.0},
                "feed": {"focal_distance_mm": 30.0, "pattern_exponent": 2.0},
                "foci": [{"position_mm": [0.0, 0.0, 60.0], "weight": 1.0}],
                "cell_amplitude": 0.9
            },
            "observations": [
                {"kind": "point", "position_mm": [0.0, 0.0, 60.0]},
                {"kind": "plane", "plane": "xoz", "fixed_mm": 0.0, "axis1_mm": [-20.0, 20.0], "axis2_mm": [20.0, 80.0], "step_mm": 2.0},
                {"kind": "volume", "x_mm": [-5.0, 5.0], "y_mm": [-5.0, 5.0], "z_mm": [50.0, 70.0], "step_mm": 5.0}
            ]
        }"#;
        let doc = RunDocument::parse(text, "inline").unwrap();
        assert_eq!(doc.scenario.feed.amplitude_scale, 1.0);
        assert_eq!(doc.scenario.quantization_bits, None);
        assert_eq!(doc.observations.len(), 3);
    }

    #[test]
    fn typos_are_errors() {
        let doc = RunDocument::from_preset("paper-1to1").unwrap();
        let text = doc.to_json().replace("pitch_mm", "pitch");
        assert!(matches!(RunDocument::parse(&text, "x"), Err(Error::Parse { .. })));
        let text = doc.to_json().replace("\"observations\"", "\"observation\"");
        assert!(RunDocument::parse(&text, "x").is_err());
    }

    #[test]
    fn missing_file() {
        let err = RunDocument::load(Path::new("/definitely/missing.json")).unwrap_err();
        assert!(err.to_string().contains("config not found"));
        assert_eq!(err.exit_code(), 2);
    }
}
