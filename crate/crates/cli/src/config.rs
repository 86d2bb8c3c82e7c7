use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// Experiment description read with `--config`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Option<String>,
    #[serde(default)]
    pub parameters: Map<String, Value>,
    pub output: Option<Format>,
    pub out_path: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))
    }
}

/// Layers `preset`, then config-file `parameters`, then command-line
/// `flags` (later wins) and decodes the result, rejecting unknown keys.
pub fn layer<P: Serialize + DeserializeOwned>(
    preset: Option<P>,
    file: &Map<String, Value>,
    flags: &P,
) -> Result<P, CliError> {
    let mut merged = Map::new();
    if let Some(p) = preset {
        merged.extend(non_null(&p));
    }
    merged.extend(file.clone());
    merged.extend(non_null(flags));
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Validation(format!("parameters: {e}")))
}

fn non_null<P: Serialize>(p: &P) -> Map<String, Value> {
    match serde_json::to_value(p) {
        Ok(Value::Object(m)) => m.into_iter().filter(|(_, v)| !v.is_null()).collect(),
        _ => Map::new(),
    }
}

pub fn required<T: Copy>(value: Option<T>, key: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Validation(format!("missing required parameter `{key}`")))
}

pub fn positive(value: f64, key: &str) -> Result<f64, CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(CliError::Validation(format!("`{key}` = {value} must be > 0")))
    }
}

pub fn at_least(value: usize, min: usize, key: &str) -> Result<usize, CliError> {
    if value >= min {
        Ok(value)
    } else {
        Err(CliError::Validation(format!("`{key}` = {value} must be >= {min}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Calibration {
    Exact,
    LeadingOrder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sideband {
    Lower,
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopMode {
    Eliminated,
    WithQubits,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryArg {
    Open,
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    Bloch,
    Direct,
}

/// Fourier harmonics of the dispersive shift.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierParams {
    /// Drive strength λ = Ω_p/Δ_p, in [0, 1)
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Drive phase φ (rad)
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Highest harmonic
    #[arg(long)]
    pub nmax: Option<usize>,
    /// Instead of one λ, tabulate ξ₀..ξ₃ and φ₁ on this many λ in [0, 0.95]
    #[arg(long)]
    pub lambda_steps: Option<usize>,
}

/// Two cavities with a driven qubit on cavity 1 (MHz, µs).
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RabiParams {
    /// Mediated cavity coupling g₁₂ (MHz)
    #[arg(long)]
    pub g12: Option<f64>,
    /// Pump qubit coupling g_p (MHz)
    #[arg(long)]
    pub g_p: Option<f64>,
    /// Pump qubit detuning Δ_p (MHz)
    #[arg(long, allow_hyphen_values = true)]
    pub delta_p: Option<f64>,
    /// Drive strength λ
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Drive frequency ω_d (MHz)
    #[arg(long, allow_hyphen_values = true)]
    pub omega_d: Option<f64>,
    /// Drive phase φ (rad)
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Simulated time (µs); defaults to two effective swap times
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Fock levels per cavity
    #[arg(long)]
    pub boson_dim: Option<usize>,
    #[arg(long, value_enum)]
    pub calibration: Option<Calibration>,
    #[arg(long, value_enum)]
    pub resonance: Option<Sideband>,
}

/// Three-cavity loop dynamics from one phonon in cavity 1 (MHz, µs).
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChiralParams {
    /// Direct cavity 1–2 coupling (MHz)
    #[arg(long)]
    pub g12: Option<f64>,
    /// Cavity 1–3 coupling (MHz)
    #[arg(long)]
    pub g13: Option<f64>,
    /// Cavity 2–3 coupling (MHz)
    #[arg(long)]
    pub g23: Option<f64>,
    /// Drive frequency ω_d (MHz); cavity 3 sits at −ω_d
    #[arg(long, allow_hyphen_values = true)]
    pub omega_d: Option<f64>,
    /// Pump qubit coupling, both pumps (MHz)
    #[arg(long)]
    pub g_p: Option<f64>,
    /// Pump qubit detuning, both pumps (MHz)
    #[arg(long, allow_hyphen_values = true)]
    pub delta_p: Option<f64>,
    /// Drive strength λ, both pumps
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Loop flux Φ_B (rad)
    #[arg(long, allow_hyphen_values = true)]
    pub flux: Option<f64>,
    /// Cancel static sideband Stark shifts
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub stark_compensation: Option<bool>,
    /// Simulated time (µs)
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<LoopMode>,
    /// Fock levels per cavity
    #[arg(long)]
    pub boson_dim: Option<usize>,
}

/// Three-port loop transmission versus probe detuning δ_d (MHz).
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CirculatorParams {
    /// Direct cavity 1–2 coupling (MHz)
    #[arg(long)]
    pub g12: Option<f64>,
    /// Cavity 1–3 coupling (MHz)
    #[arg(long)]
    pub g13: Option<f64>,
    /// Cavity 2–3 coupling (MHz)
    #[arg(long)]
    pub g23: Option<f64>,
    /// Drive frequency ω_d (MHz); cavity 3 sits at −ω_d
    #[arg(long, allow_hyphen_values = true)]
    pub omega_d: Option<f64>,
    /// Pump qubit coupling, both pumps (MHz)
    #[arg(long)]
    pub g_p: Option<f64>,
    /// Pump qubit detuning, both pumps (MHz)
    #[arg(long, allow_hyphen_values = true)]
    pub delta_p: Option<f64>,
    /// Drive strength λ, both pumps
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Loop flux Φ_B (rad)
    #[arg(long, allow_hyphen_values = true)]
    pub flux: Option<f64>,
    /// Cancel static sideband Stark shifts
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub stark_compensation: Option<bool>,
    /// Port loss κ of every cavity (MHz)
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Input port, 1-based
    #[arg(long)]
    pub input_port: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta_max: Option<f64>,
    /// Number of δ_d samples
    #[arg(long)]
    pub delta_steps: Option<usize>,
    /// Also integrate the modulated loop in the time domain
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub floquet: Option<bool>,
    /// Use this lattice (JSON) instead of the driven loop
    #[arg(long)]
    pub lattice: Option<PathBuf>,
}

/// Two-path plaquette transmission T₄₁ versus flux (MHz, rad).
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbParams {
    /// Hopping J on every arm (MHz) [default 0.1]
    #[arg(long)]
    pub j: Option<f64>,
    /// Port loss κ of sites 1 and 4 (MHz) [default 0.2]
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Path loss κ_p of sites 2 and 3 (MHz), one curve per value [default 0.1κ]
    #[arg(long, num_args = 1..)]
    pub kappa_p: Option<Vec<f64>>,
    /// Flux samples on [0, 2π]
    #[arg(long)]
    pub flux_steps: Option<usize>,
}

/// Two-leg flux ladder spectrum (MHz, rad).
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderParams {
    #[arg(long)]
    pub n_rungs: Option<usize>,
    /// Leg hopping t′ (MHz)
    #[arg(long, allow_hyphen_values = true)]
    pub t_prime: Option<f64>,
    /// Rung hopping J (MHz)
    #[arg(long, allow_hyphen_values = true)]
    pub j_rung: Option<f64>,
    /// Leg phase φ (rad); each plaquette carries 2φ
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    #[arg(long, value_enum)]
    pub boundary: Option<BoundaryArg>,
    /// Bloch bands on the commensurate k grid, or direct diagonalization
    #[arg(long, value_enum)]
    pub spectrum: Option<SpectrumKind>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_override_preset() {
        let preset = AbParams { j: Some(1.0), kappa: Some(2.0), flux_steps: Some(5), ..Default::default() };
        let mut file = Map::new();
        file.insert("kappa".into(), Value::from(3.0));
        file.insert("flux_steps".into(), Value::from(7));
        let flags = AbParams { flux_steps: Some(9), ..Default::default() };
        let p = layer(Some(preset), &file, &flags).unwrap();
        assert_eq!((p.j, p.kappa, p.flux_steps), (Some(1.0), Some(3.0), Some(9)));
    }

    #[test]
    fn unknown_and_mistyped_keys_rejected() {
        let mut file = Map::new();
        file.insert("n_rung".into(), Value::from(4));
        assert!(layer(None, &file, &LadderParams::default()).is_err());
        let mut file = Map::new();
        file.insert("boundary".into(), Value::from("twisted"));
        assert!(layer(None, &file, &LadderParams::default()).is_err());
    }

    #[test]
    fn guards_name_the_key() {
        let e = positive(-1.0, "kappa").unwrap_err().to_string();
        assert!(e.contains("kappa") && e.contains("> 0"));
        assert!(at_least(1, 2, "n_rungs").unwrap_err().to_string().contains(">= 2"));
        assert!(required::<f64>(None, "g12").unwrap_err().to_string().contains("g12"));
    }
}
