//! Figure presets shipped with the binary.

use crate::spec::SweepSpec;
use crate::CliError;

/// Preset names, in figure order.
pub const NAMES: [&str; 8] = ["fig1", "fig2", "fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b"];

fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig1" => include_str!("../presets/fig1.json"),
        "fig2" => include_str!("../presets/fig2.json"),
        "fig3a" => include_str!("../presets/fig3a.json"),
        "fig3b" => include_str!("../presets/fig3b.json"),
        "fig4a" => include_str!("../presets/fig4a.json"),
        "fig4b" => include_str!("../presets/fig4b.json"),
        "fig5a" => include_str!("../presets/fig5a.json"),
        "fig5b" => include_str!("../presets/fig5b.json"),
        _ => return None,
    })
}

/// The curves of a named figure.
pub fn preset(name: &str) -> Result<Vec<SweepSpec>, CliError> {
    let text = source(name)
        .ok_or_else(|| CliError::Config(format!("unknown figure '{name}'; expected one of {}", NAMES.join(", "))))?;
    SweepSpec::many_from_json(text)
}
