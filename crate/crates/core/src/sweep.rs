//! Parameter sweeps: one protocol run per grid point along a named axis,
//! fanned out across threads with order-preserving assembly.

use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::protocol::{run_protocol, ProtocolSpec};
use crate::report::SweepRow;

/// Sweepable parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Area of the first Raman manipulation.
    Beta,
    /// Phase of the first Raman manipulation.
    Chi,
    /// Area of the first Zeeman manipulation.
    Phi,
    /// Control ramp time (the timeline stretches with it).
    RampTime,
    /// Spatial resolution (values are rounded to integers).
    NZ,
}

impl Axis {
    pub fn parse(name: &str) -> Result<Axis> {
        match name {
            "beta" => Ok(Axis::Beta),
            "chi" => Ok(Axis::Chi),
            "phi" => Ok(Axis::Phi),
            "ramp_time" => Ok(Axis::RampTime),
            "n_z" => Ok(Axis::NZ),
            other => Err(Error::Config(format!(
                "unknown sweep axis '{other}' (expected beta, chi, phi, ramp_time or n_z)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Axis::Beta => "beta",
            Axis::Chi => "chi",
            Axis::Phi => "phi",
            Axis::RampTime => "ramp_time",
            Axis::NZ => "n_z",
        }
    }
}

/// Apply one axis value to a copy of the base config.
pub fn apply_axis(base: &RunConfig, axis: Axis, value: f64) -> Result<RunConfig> {
    let mut cfg = base.clone();
    match axis {
        Axis::Beta => {
            let m = cfg
                .manipulations
                .iter_mut()
                .find(|m| m.kind == "raman")
                .ok_or_else(|| Error::Config("beta sweep needs a raman manipulation".into()))?;
            m.beta = Some(value);
            m.omega_w = None;
            m.tau = None;
        }
        Axis::Chi => {
            let m = cfg
                .manipulations
                .iter_mut()
                .find(|m| m.kind == "raman")
                .ok_or_else(|| Error::Config("chi sweep needs a raman manipulation".into()))?;
            m.chi = Some(value);
        }
        Axis::Phi => {
            let m = cfg
                .manipulations
                .iter_mut()
                .find(|m| m.kind == "zeeman")
                .ok_or_else(|| Error::Config("phi sweep needs a zeeman manipulation".into()))?;
            m.phi = Some(value);
            m.b_field = None;
            m.tau = None;
        }
        Axis::RampTime => {
            if !(value > 0.0) {
                return Err(Error::Config(format!("ramp_time must be > 0 (got {value})")));
            }
            cfg.schedule.ramp_time = value;
            cfg.schedule.settle_time = None;
        }
        Axis::NZ => {
            let n = value.round();
            if !(n >= 16.0) {
                return Err(Error::Config(format!("n_z must be >= 16 (got {value})")));
            }
            cfg.medium.n_z = n as usize;
        }
    }
    Ok(cfg)
}

/// Evenly spaced axis values, endpoints included.
pub fn axis_values(from: f64, to: f64, points: usize) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(Error::EmptySweep);
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    let step = (to - from) / (points - 1) as f64;
    Ok((0..points).map(|k| from + step * k as f64).collect())
}

/// Run the sweep; rows come back in axis order regardless of which worker
/// finished first.
pub fn run_sweep(base: &RunConfig, axis: Axis, values: &[f64]) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::EmptySweep);
    }
    // Validate all points before burning time on any of them.
    let specs: Vec<(f64, ProtocolSpec)> = values
        .iter()
        .map(|&v| apply_axis(base, axis, v)?.to_protocol_spec().map(|s| (v, s)))
        .collect::<Result<Vec<_>>>()?;

    specs
        .into_par_iter()
        .map(|(value, spec)| {
            let r = run_protocol(&spec)?;
            Ok(SweepRow {
                value,
                fidelity: r.fidelity_to_target,
                max_s_bbprime: r.diagnostics.max_s_bbprime,
                polariton_norm_drift: r.diagnostics.polariton_norm_drift,
                adiabaticity: r.diagnostics.adiabaticity,
                com_shift: r.diagnostics.com_shift,
                energy_ratio: r.diagnostics.energy_ratio,
            })
        })
        .collect()
}
