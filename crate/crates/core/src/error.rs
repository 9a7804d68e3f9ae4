//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("amplitude pair is zero or non-finite; cannot normalize")]
    ZeroAmplitude,

    #[error("grid mismatch: {0} points (dz = {1:.6e}) vs {2} points (dz = {3:.6e})")]
    GridMismatch(usize, f64, usize, f64),

    #[error("matrix is not unitary (max |G\u{2020}G - I| = {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("Hermitian input required (max |M - M\u{2020}| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("two-photon detuning is zero; effective coupling diverges")]
    ZeroDetuning,

    #[error("CFL violation: dt = {dt:.6e} exceeds dz = {dz:.6e} (c = 1)")]
    CflViolation { dt: f64, dz: f64 },

    #[error("field diverged at t = {t:.6e}, cell {cell} ({what}); reduce dt or check inputs")]
    Diverged { t: f64, cell: usize, what: &'static str },

    #[error("profile advected off-grid: shift {shift:.4} leaves {lost:.2}% of the norm outside [0, L]")]
    OffGrid { shift: f64, lost: f64 },

    #[error("control field {omega_c:.3e} below adiabatic threshold {threshold:.3e}; use the polariton engine across storage")]
    AdiabaticallySingular { omega_c: f64, threshold: f64 },

    #[error("release failed: readout energy is {energy_ratio:.3e} of the stored norm")]
    ReleaseFailed { energy_ratio: f64 },

    #[error("inconsistent probe runs: least-squares residual {residual:.3e} exceeds 0.05")]
    InconsistentRuns { residual: f64 },

    #[error("input envelope clipped by the grid: {fraction:.4} of the norm stays inside [0, L] at {stage}")]
    EnvelopeClipped { fraction: f64, stage: &'static str },

    #[error("config error: {0}")]
    Config(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("sweep axis is empty")]
    EmptySweep,

    #[error("unknown gate name '{0}'")]
    UnknownGate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI; each failure class gets its own code.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Validation(_)
            | Error::EnvelopeClipped { .. }
            | Error::CflViolation { .. }
            | Error::GridMismatch(..)
            | Error::EmptySweep
            | Error::UnknownGate(_)
            | Error::NotUnitary { .. }
            | Error::NotHermitian { .. }
            | Error::ZeroDetuning
            | Error::ZeroAmplitude => 3,
            Error::Diverged { .. }
            | Error::OffGrid { .. }
            | Error::AdiabaticallySingular { .. }
            | Error::ReleaseFailed { .. }
            | Error::InconsistentRuns { .. } => 4,
            Error::Io(_) => 5,
        }
    }
}
