//! Command-line front end: run a protocol from a config or preset, sweep a
//! parameter axis, print pulse schedules for gate targets, and list the
//! built-in presets.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;

use stored_light::config::{preset, RunConfig, PRESETS};
use stored_light::gates::{
    gate_matrix, hadamard, rotation_y, rotation_z, synthesize, PulseStep, Unitary2,
};
use stored_light::protocol::{reconstruct_gate, run_protocol};
use stored_light::report::{write_outputs, write_sweep};
use stored_light::sweep::{axis_values, run_sweep, Axis};
use stored_light::Error;

#[derive(Parser)]
#[command(
    name = "storedlight",
    about = "Store a polarization qubit in a tripod EIT medium, rotate it there, release it",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigSource {
    /// Path to a TOML run configuration.
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Name of a built-in preset (see `storedlight presets`).
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Engine override: full, polariton or hybrid.
    #[arg(long, value_name = "ENGINE")]
    engine: Option<String>,
    /// Seed recorded in the outputs (reserved for randomized sweeps).
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one protocol run and write report, result and snapshots.
    Run {
        #[command(flatten)]
        source: ConfigSource,
        /// Also reconstruct the realized gate from four probe runs.
        #[arg(long)]
        reconstruct: bool,
    },
    /// Run one protocol per grid point along an axis and write sweep.csv.
    Sweep {
        #[command(flatten)]
        source: ConfigSource,
        /// Axis: beta, chi, phi, ramp_time or n_z.
        #[arg(long, value_name = "NAME")]
        axis: String,
        #[arg(long, value_name = "A")]
        from: f64,
        #[arg(long, value_name = "B")]
        to: f64,
        #[arg(long, value_name = "K")]
        points: usize,
    },
    /// Print the pulse schedule synthesizing a gate target.
    Gates {
        /// Named target: identity, not, sqrt-not, htilde, sigma-y, hadamard
        /// or phase (with --angle).
        #[arg(long, value_name = "NAME", conflicts_with = "matrix")]
        name: Option<String>,
        /// Rotation angle for the phase target (radians).
        #[arg(long, value_name = "RAD", default_value_t = std::f64::consts::FRAC_PI_2)]
        angle: f64,
        /// Explicit unitary, eight comma-separated floats:
        /// re11,im11,re12,im12,re21,im21,re22,im22.
        #[arg(long, value_name = "ENTRIES")]
        matrix: Option<String>,
    },
    /// List built-in presets, or show one as TOML.
    Presets {
        /// Print the named preset's configuration.
        #[arg(long, value_name = "NAME")]
        show: Option<String>,
    },
}

fn load_config(source: &ConfigSource) -> Result<(RunConfig, String), Error> {
    let (mut cfg, text) = match (&source.config, &source.preset) {
        (Some(path), None) => RunConfig::from_path(path)?,
        (None, Some(name)) => {
            let cfg = preset(name)?;
            let text = cfg.to_toml();
            (cfg, text)
        }
        _ => {
            return Err(Error::Config(
                "exactly one of --config or --preset is required".into(),
            ))
        }
    };
    if let Some(engine) = &source.engine {
        cfg.run.engine = engine.clone();
    }
    if let Some(seed) = source.seed {
        cfg.run.seed = seed;
    }
    // Echo overrides into the recorded config text.
    let text = if source.engine.is_some() || source.seed.is_some() { cfg.to_toml() } else { text };
    Ok((cfg, text))
}

fn cmd_run(source: &ConfigSource, reconstruct: bool) -> Result<(), Error> {
    let (cfg, text) = load_config(source)?;
    let spec = cfg.to_protocol_spec()?;
    // Fail on an unwritable output directory before burning simulation time.
    std::fs::create_dir_all(&source.out)?;
    let mut result = run_protocol(&spec)?;
    if reconstruct {
        result.realized_gate = Some(reconstruct_gate(&spec)?);
    }
    write_outputs(&source.out, &text, &spec, &result, cfg.run.seed)?;
    println!(
        "fidelity to target: {:.8}   energy ratio: {:.6}   outputs in {}",
        result.fidelity_to_target,
        result.diagnostics.energy_ratio,
        source.out.display()
    );
    for w in &result.diagnostics.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn cmd_sweep(
    source: &ConfigSource,
    axis: &str,
    from: f64,
    to: f64,
    points: usize,
) -> Result<(), Error> {
    let (cfg, _) = load_config(source)?;
    std::fs::create_dir_all(&source.out)?;
    let axis = Axis::parse(axis)?;
    let values = axis_values(from, to, points)?;
    let rows = run_sweep(&cfg, axis, &values)?;
    write_sweep(&source.out, axis.name(), &rows)?;
    println!(
        "{} points along {} written to {}",
        rows.len(),
        axis.name(),
        source.out.join("sweep.csv").display()
    );
    Ok(())
}

fn parse_matrix(entries: &str) -> Result<Unitary2, Error> {
    let vals: Vec<f64> = entries
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Error::Config(format!("bad matrix entry: {e}")))?;
    if vals.len() != 8 {
        return Err(Error::Config(format!(
            "matrix needs 8 comma-separated floats, got {}",
            vals.len()
        )));
    }
    Unitary2::new(
        C64::new(vals[0], vals[1]),
        C64::new(vals[2], vals[3]),
        C64::new(vals[4], vals[5]),
        C64::new(vals[6], vals[7]),
    )
}

fn named_target(name: &str, angle: f64) -> Result<(Unitary2, Option<String>), Error> {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
    // Canonical single-pulse realizations, where one exists.
    match name {
        "identity" => Ok((Unitary2::identity(), None)),
        "not" => Ok((
            gate_matrix(PI, PI).scale(C64::i()),
            Some("single Raman pulse chi = pi, beta = pi realizes -i NOT".into()),
        )),
        "sqrt-not" => Ok((
            gate_matrix(PI, FRAC_PI_2).scale(C64::from_polar(1.0, FRAC_PI_4)),
            Some("single Raman pulse chi = pi, beta = pi/2 realizes e^{-i pi/4} sqrt(NOT)".into()),
        )),
        "htilde" => {
            Ok((rotation_y(FRAC_PI_2), Some("single Raman pulse chi = pi/2, beta = pi/2".into())))
        }
        "sigma-y" => Ok((
            rotation_y(PI).scale(C64::i()),
            Some("single Raman pulse chi = pi/2, beta = pi realizes -i sigma_y".into()),
        )),
        "hadamard" => Ok((
            hadamard(),
            Some("Zeeman phi = pi then Raman chi = pi/2, beta = pi/2, global phase e^{i pi/2}".into()),
        )),
        "phase" => Ok((rotation_z(angle), Some(format!("single Zeeman pulse, area phi = {angle}")))),
        other => Err(Error::UnknownGate(other.into())),
    }
}

fn print_matrix(label: &str, g: &Unitary2) {
    println!("{label}:");
    println!("  [{:+.6}{:+.6}i  {:+.6}{:+.6}i]", g.g11.re, g.g11.im, g.g12.re, g.g12.im);
    println!("  [{:+.6}{:+.6}i  {:+.6}{:+.6}i]", g.g21.re, g.g21.im, g.g22.re, g.g22.im);
}

fn cmd_gates(name: Option<&str>, angle: f64, matrix: Option<&str>) -> Result<(), Error> {
    let (target, note) = match (name, matrix) {
        (Some(n), None) => named_target(n, angle)?,
        (None, Some(m)) => (parse_matrix(m)?, None),
        _ => return Err(Error::Config("exactly one of --name or --matrix is required".into())),
    };

    let d = synthesize(&target)?;
    println!(
        "Z-Y-Z synthesis: phi1 = {:.6}, beta = {:.6}, phi2 = {:.6}, global phase = {:.6}",
        d.phi1, d.beta, d.phi2, d.global_phase
    );
    println!("pulse schedule (applied in order):");
    let steps = d.schedule();
    if steps.is_empty() {
        println!("  (none: identity)");
    }
    for step in &steps {
        match step {
            PulseStep::Zeeman(p) => println!("  zeeman pulse, area phi = {:.6}", p.phi()),
            PulseStep::Raman(p) => {
                println!("  raman pulse, chi = {:.6}, area beta = {:.6}", p.chi, p.beta())
            }
        }
    }
    if let Some(note) = note {
        println!("canonical realization: {note}");
    }
    let realized = d.recompose();
    print_matrix("realized matrix", &realized);
    println!("max entry distance to target: {:.3e}", realized.max_entry_distance(&target));
    println!("distance up to global phase:  {:.3e}", realized.distance_up_to_phase(&target));
    Ok(())
}

fn cmd_presets(show: Option<&str>) -> Result<(), Error> {
    match show {
        Some(name) => {
            let cfg = preset(name)?;
            print!("{}", cfg.to_toml());
        }
        None => {
            for p in PRESETS {
                println!("{:14} {}", p.name, p.description);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { source, reconstruct } => cmd_run(source, *reconstruct),
        Command::Sweep { source, axis, from, to, points } => {
            cmd_sweep(source, axis, *from, *to, *points)
        }
        Command::Gates { name, angle, matrix } => {
            cmd_gates(name.as_deref(), *angle, matrix.as_deref())
        }
        Command::Presets { show } => cmd_presets(show.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
