//! Run configuration: a single TOML file carries the whole experiment, and
//! is echoed verbatim into the report so a run can be reproduced from its
//! own output. An optional `[units]` block converts SI inputs once, at
//! ingestion; everything downstream is dimensionless.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{GatePulse, PulseStep, ZeemanPulse};
use crate::protocol::{Engine, ProtocolSpec, TargetSpec};
use crate::qubit::PolarizationQubit;
use crate::units::{MediumParams, SimUnits};

pub const SCHEMA_VERSION: &str = "stored-light/v1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: InputBlock,
    pub medium: MediumBlock,
    #[serde(default)]
    pub envelope: EnvelopeBlock,
    pub schedule: ScheduleBlock,
    #[serde(default, rename = "manipulation")]
    pub manipulations: Vec<ManipulationBlock>,
    #[serde(default)]
    pub run: RunBlock,
    #[serde(default)]
    pub units: Option<UnitsBlock>,
}

/// Circular-basis amplitudes as [re, im] pairs; normalized on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputBlock {
    pub c_plus: [f64; 2],
    pub c_minus: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MediumBlock {
    pub kappa: f64,
    #[serde(default = "default_length")]
    pub length: f64,
    #[serde(default = "default_n_z")]
    pub n_z: usize,
}

fn default_length() -> f64 {
    1.0
}

fn default_n_z() -> usize {
    256
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvelopeBlock {
    pub center: f64,
    pub width: f64,
}

impl Default for EnvelopeBlock {
    fn default() -> Self {
        Self { center: 0.4, width: 0.07 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleBlock {
    pub omega_c0: f64,
    pub ramp_time: f64,
    #[serde(default = "default_hold")]
    pub hold_duration: f64,
    #[serde(default = "default_clamp")]
    pub clamp_ratio: f64,
    #[serde(default)]
    pub settle_time: Option<f64>,
}

fn default_hold() -> f64 {
    2.0
}

fn default_clamp() -> f64 {
    1e-4
}

/// One storage-stage manipulation. Raman pulses take either a pulse area
/// `beta` directly or a constant strength `omega_w` with duration `tau`;
/// Zeeman pulses take the phase `phi` or a constant field `b_field` with
/// `tau` (rate and g-factor default to one).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManipulationBlock {
    pub kind: String,
    #[serde(default)]
    pub chi: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub omega_w: Option<f64>,
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default)]
    pub phi: Option<f64>,
    #[serde(default)]
    pub b_field: Option<f64>,
    #[serde(default)]
    pub g_factor: Option<f64>,
    #[serde(default)]
    pub rate_coefficient: Option<f64>,
}

impl ManipulationBlock {
    pub fn raman(chi: f64, beta: f64) -> Self {
        Self {
            kind: "raman".into(),
            chi: Some(chi),
            beta: Some(beta),
            omega_w: None,
            tau: None,
            phi: None,
            b_field: None,
            g_factor: None,
            rate_coefficient: None,
        }
    }

    pub fn zeeman(phi: f64) -> Self {
        Self {
            kind: "zeeman".into(),
            chi: None,
            beta: None,
            omega_w: None,
            tau: None,
            phi: Some(phi),
            b_field: None,
            g_factor: None,
            rate_coefficient: None,
        }
    }

    pub fn to_pulse(&self) -> Result<PulseStep> {
        match self.kind.as_str() {
            "raman" => {
                let chi = self
                    .chi
                    .ok_or_else(|| Error::Config("raman manipulation needs `chi`".into()))?;
                let pulse = match (self.beta, self.omega_w, self.tau) {
                    (Some(beta), None, None) => GatePulse::with_area(chi, beta)?,
                    (None, Some(w), Some(tau)) => GatePulse::constant(chi, w, tau)?,
                    _ => {
                        return Err(Error::Config(
                            "raman manipulation needs `beta` or (`omega_w`, `tau`)".into(),
                        ))
                    }
                };
                Ok(PulseStep::Raman(pulse))
            }
            "zeeman" => {
                let pulse = match (self.phi, self.b_field, self.tau) {
                    (Some(phi), None, None) => ZeemanPulse::with_area(phi),
                    (None, Some(b), Some(tau)) => ZeemanPulse::new(
                        self.g_factor.unwrap_or(1.0),
                        self.rate_coefficient.unwrap_or(1.0),
                        crate::gates::Envelope::Constant(b),
                        tau,
                    )?,
                    _ => {
                        return Err(Error::Config(
                            "zeeman manipulation needs `phi` or (`b_field`, `tau`)".into(),
                        ))
                    }
                };
                Ok(PulseStep::Zeeman(pulse))
            }
            other => Err(Error::Config(format!(
                "unknown manipulation kind '{other}' (expected raman or zeeman)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunBlock {
    #[serde(default = "default_engine")]
    pub engine: String,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub snapshots: usize,
    /// `auto` scores against the composed manipulation gate, `input` against
    /// the input state.
    #[serde(default = "default_target")]
    pub target: String,
}

fn default_engine() -> String {
    "full".into()
}

fn default_cfl() -> f64 {
    1.0
}

fn default_target() -> String {
    "auto".into()
}

impl Default for RunBlock {
    fn default() -> Self {
        Self {
            engine: default_engine(),
            cfl: default_cfl(),
            seed: 0,
            snapshots: 0,
            target: default_target(),
        }
    }
}

/// Optional SI ingestion: rates given in Hz and times in seconds are scaled
/// by the sample length. When present, it overrides the dimensionless values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnitsBlock {
    pub length_m: f64,
    #[serde(default)]
    pub kappa_hz: Option<f64>,
    #[serde(default)]
    pub omega_c0_hz: Option<f64>,
    #[serde(default)]
    pub ramp_time_s: Option<f64>,
    #[serde(default)]
    pub hold_duration_s: Option<f64>,
    #[serde(default)]
    pub settle_time_s: Option<f64>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &std::path::Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path)?;
        let cfg = Self::from_toml(&text)?;
        Ok((cfg, text))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn engine(&self) -> Result<Engine> {
        match self.run.engine.as_str() {
            "full" => Ok(Engine::Full),
            "polariton" => Ok(Engine::Polariton),
            "hybrid" => Ok(Engine::Hybrid),
            other => Err(Error::Config(format!(
                "unknown engine '{other}' (expected full, polariton or hybrid)"
            ))),
        }
    }

    pub fn to_protocol_spec(&self) -> Result<ProtocolSpec> {
        let input = PolarizationQubit::new(
            C64::new(self.input.c_plus[0], self.input.c_plus[1]),
            C64::new(self.input.c_minus[0], self.input.c_minus[1]),
        )?;

        let mut kappa = self.medium.kappa;
        let mut omega_c0 = self.schedule.omega_c0;
        let mut ramp_time = self.schedule.ramp_time;
        let mut hold = self.schedule.hold_duration;
        let mut settle = self.schedule.settle_time;
        if let Some(units) = &self.units {
            if !(units.length_m > 0.0) {
                return Err(Error::Config("units.length_m must be > 0".into()));
            }
            if let Some(f) = units.kappa_hz {
                kappa = SimUnits::rate_from_hz(f, units.length_m);
            }
            if let Some(f) = units.omega_c0_hz {
                omega_c0 = SimUnits::rate_from_hz(f, units.length_m);
            }
            if let Some(t) = units.ramp_time_s {
                ramp_time = SimUnits::time_from_seconds(t, units.length_m);
            }
            if let Some(t) = units.hold_duration_s {
                hold = SimUnits::time_from_seconds(t, units.length_m);
            }
            if let Some(t) = units.settle_time_s {
                settle = Some(SimUnits::time_from_seconds(t, units.length_m));
            }
        }

        let mut spec = ProtocolSpec::new(input);
        spec.params = MediumParams::new(kappa, self.medium.length, self.medium.n_z)?;
        spec.envelope_center = self.envelope.center;
        spec.envelope_width = self.envelope.width;
        spec.omega_c0 = omega_c0;
        spec.ramp_time = ramp_time;
        spec.hold_duration = hold;
        spec.clamp_ratio = self.schedule.clamp_ratio;
        spec.settle_time = settle.unwrap_or(2.0 * ramp_time);
        spec.manipulations = self
            .manipulations
            .iter()
            .map(|m| m.to_pulse())
            .collect::<Result<Vec<_>>>()?;
        spec.engine = self.engine()?;
        spec.cfl = self.run.cfl;
        spec.snapshot_count = self.run.snapshots;
        spec.target = match self.run.target.as_str() {
            "auto" => TargetSpec::Auto,
            "input" => TargetSpec::Input,
            other => return Err(Error::Config(format!(
                "unknown target '{other}' (expected auto or input)"
            ))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// A named built-in experiment.
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset { name: "identity", description: "store and release with no manipulation" },
    Preset { name: "not-gate", description: "chi = pi, beta = pi Raman pulse: NOT up to a global phase" },
    Preset { name: "sqrt-not", description: "chi = pi, beta = pi/2 Raman pulse: square root of NOT" },
    Preset { name: "y-rotation", description: "chi = pi/2, beta = pi/2 Raman pulse: 90-degree y rotation" },
    Preset { name: "sigma-y", description: "chi = pi/2, beta = pi Raman pulse: sigma_y up to a global phase" },
    Preset { name: "hadamard", description: "Zeeman phi = pi then chi = pi/2, beta = pi/2: Hadamard up to a global phase" },
    Preset { name: "phase-quarter", description: "Zeeman phi = pi/2 phase gate on an equal superposition" },
    Preset { name: "beta-sweep", description: "chi = pi pulse scored against the input; sweep beta over [0, 2 pi]" },
];

/// Build a preset configuration by name.
pub fn preset(name: &str) -> Result<RunConfig> {
    use std::f64::consts::{FRAC_PI_2, PI};
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = InputBlock { c_plus: [1.0, 0.0], c_minus: [0.0, 0.0] };
    let equal = InputBlock { c_plus: [s, 0.0], c_minus: [s, 0.0] };

    let kappa = 60.0;
    let base = RunConfig {
        input: plus,
        medium: MediumBlock { kappa, length: 1.0, n_z: 256 },
        envelope: EnvelopeBlock::default(),
        schedule: ScheduleBlock {
            omega_c0: 1.0,
            ramp_time: 50.0 / kappa,
            hold_duration: 2.0,
            clamp_ratio: 1e-4,
            settle_time: Some(100.0 / kappa),
        },
        manipulations: Vec::new(),
        run: RunBlock::default(),
        units: None,
    };

    let mut cfg = base;
    match name {
        "identity" => {}
        "not-gate" => cfg.manipulations = vec![ManipulationBlock::raman(PI, PI)],
        "sqrt-not" => cfg.manipulations = vec![ManipulationBlock::raman(PI, FRAC_PI_2)],
        "y-rotation" => cfg.manipulations = vec![ManipulationBlock::raman(FRAC_PI_2, FRAC_PI_2)],
        "sigma-y" => cfg.manipulations = vec![ManipulationBlock::raman(FRAC_PI_2, PI)],
        "hadamard" => {
            cfg.manipulations = vec![
                ManipulationBlock::zeeman(PI),
                ManipulationBlock::raman(FRAC_PI_2, FRAC_PI_2),
            ]
        }
        "phase-quarter" => {
            cfg.input = equal;
            cfg.manipulations = vec![ManipulationBlock::zeeman(FRAC_PI_2)];
        }
        "beta-sweep" => {
            cfg.manipulations = vec![ManipulationBlock::raman(PI, 0.0)];
            cfg.run.target = "input".into();
            cfg.run.engine = "polariton".into();
        }
        other => {
            return Err(Error::Config(format!(
                "unknown preset '{other}'; available: {}",
                PRESETS.iter().map(|p| p.name).collect::<Vec<_>>().join(", ")
            )))
        }
    }
    Ok(cfg)
}
