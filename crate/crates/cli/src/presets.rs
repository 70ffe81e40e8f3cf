//! Checked-in experiment tables, one JSON file per preset.

use anyhow::{bail, Context, Result};

use crate::experiment::ExperimentSpec;

pub const PRESETS: &[(&str, &str)] = &[
    ("fig2", include_str!("../presets/fig2.json")),
    ("fig5", include_str!("../presets/fig5.json")),
    ("fig6a", include_str!("../presets/fig6a.json")),
    ("fig6b", include_str!("../presets/fig6b.json")),
    ("fig8", include_str!("../presets/fig8.json")),
    ("fig9", include_str!("../presets/fig9.json")),
    ("fig10", include_str!("../presets/fig10.json")),
];

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).chain(["custom"]).collect()
}

/// Loads a built-in preset. `custom` has no table; pass a spec file instead.
pub fn preset(name: &str) -> Result<ExperimentSpec> {
    let Some((_, text)) = PRESETS.iter().find(|(n, _)| *n == name) else {
        if name == "custom" {
            bail!("preset custom needs --config <experiment.json>");
        }
        bail!("unknown preset {name:?}; available: {}", names().join(", "));
    };
    serde_json::from_str(text).with_context(|| format!("preset {name} is malformed"))
}
