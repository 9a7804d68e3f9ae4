//! Output writers: the human-readable report, the machine-readable
//! key-value record, and the snapshot/sweep tables. Formatting is
//! deterministic (shortest round-trip floats, fixed key order), so a fixed
//! config always produces bit-identical machine outputs.

use std::fmt::Write as _;
use std::path::Path;

use crate::config::SCHEMA_VERSION;
use crate::error::Result;
use crate::propagation::Snapshot;
use crate::protocol::{ProtocolResult, ProtocolSpec};

/// One row of a sweep table.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub fidelity: f64,
    pub max_s_bbprime: f64,
    pub polariton_norm_drift: f64,
    pub adiabaticity: f64,
    pub com_shift: f64,
    pub energy_ratio: f64,
}

pub fn render_result_kv(
    spec: &ProtocolSpec,
    result: &ProtocolResult,
    seed: u64,
) -> String {
    let mut s = String::new();
    let d = &result.diagnostics;
    let q = &result.output_qubit;
    let _ = writeln!(s, "schema={SCHEMA_VERSION}/result");
    let _ = writeln!(s, "engine={}", spec.engine.name());
    let _ = writeln!(s, "seed={seed}");
    let _ = writeln!(s, "n_z={}", spec.params.n_z);
    let _ = writeln!(s, "kappa={}", spec.params.kappa);
    let _ = writeln!(s, "omega_c0={}", spec.omega_c0);
    let _ = writeln!(s, "ramp_time={}", spec.ramp_time);
    let _ = writeln!(s, "hold_duration={}", spec.hold_duration);
    let _ = writeln!(s, "t_end={}", spec.t_end());
    let _ = writeln!(s, "input_c_plus_re={}", spec.input_qubit.c_plus().re);
    let _ = writeln!(s, "input_c_plus_im={}", spec.input_qubit.c_plus().im);
    let _ = writeln!(s, "input_c_minus_re={}", spec.input_qubit.c_minus().re);
    let _ = writeln!(s, "input_c_minus_im={}", spec.input_qubit.c_minus().im);
    let _ = writeln!(s, "output_c_plus_re={}", q.c_plus().re);
    let _ = writeln!(s, "output_c_plus_im={}", q.c_plus().im);
    let _ = writeln!(s, "output_c_minus_re={}", q.c_minus().re);
    let _ = writeln!(s, "output_c_minus_im={}", q.c_minus().im);
    let _ = writeln!(s, "fidelity_to_target={}", result.fidelity_to_target);
    let _ = writeln!(s, "max_s_bbprime={}", d.max_s_bbprime);
    let _ = writeln!(s, "polariton_norm_drift={}", d.polariton_norm_drift);
    let _ = writeln!(s, "adiabaticity={}", d.adiabaticity);
    let _ = writeln!(s, "com_shift={}", d.com_shift);
    let _ = writeln!(s, "com_shift_predicted={}", d.com_shift_predicted);
    let _ = writeln!(s, "energy_ratio={}", d.energy_ratio);
    let _ = writeln!(s, "warnings={}", d.warnings.len());
    if let Some(rec) = &result.realized_gate {
        let g = &rec.gate;
        let _ = writeln!(s, "realized_g11_re={}", g.g11.re);
        let _ = writeln!(s, "realized_g11_im={}", g.g11.im);
        let _ = writeln!(s, "realized_g12_re={}", g.g12.re);
        let _ = writeln!(s, "realized_g12_im={}", g.g12.im);
        let _ = writeln!(s, "realized_g21_re={}", g.g21.re);
        let _ = writeln!(s, "realized_g21_im={}", g.g21.im);
        let _ = writeln!(s, "realized_g22_re={}", g.g22.re);
        let _ = writeln!(s, "realized_g22_im={}", g.g22.im);
        let _ = writeln!(s, "reconstruction_residual={}", rec.residual);
        let _ = writeln!(s, "reconstruction_consistent={}", rec.consistent);
    }
    s
}

pub fn render_report(
    config_text: &str,
    spec: &ProtocolSpec,
    result: &ProtocolResult,
    seed: u64,
) -> String {
    let mut s = String::new();
    let d = &result.diagnostics;
    let q = &result.output_qubit;
    let b = q.bloch();
    let _ = writeln!(s, "stored-light protocol report ({SCHEMA_VERSION})");
    let _ = writeln!(s, "============================================");
    let _ = writeln!(s);
    let _ = writeln!(s, "engine: {}   seed: {seed}", spec.engine.name());
    let _ = writeln!(
        s,
        "timeline: off-ramp at t = {:.4}, hold until t = {:.4}, readout at t = {:.4}",
        spec.t_off(),
        spec.t_on(),
        spec.t_end()
    );
    let _ = writeln!(s, "manipulations: {}", spec.manipulations.len());
    let _ = writeln!(s);
    let _ = writeln!(s, "output qubit (circular basis):");
    let _ = writeln!(s, "  c+ = {:+.6} {:+.6}i", q.c_plus().re, q.c_plus().im);
    let _ = writeln!(s, "  c- = {:+.6} {:+.6}i", q.c_minus().re, q.c_minus().im);
    let _ = writeln!(s, "  Bloch vector: ({:+.6}, {:+.6}, {:+.6})", b.x, b.y, b.z);
    let _ = writeln!(s, "  fidelity to target: {:.8}", result.fidelity_to_target);
    if let Some(rec) = &result.realized_gate {
        let g = &rec.gate;
        let _ = writeln!(s);
        let _ = writeln!(s, "reconstructed gate (gauge: largest entry real positive):");
        let _ = writeln!(s, "  [{:+.5}{:+.5}i  {:+.5}{:+.5}i]", g.g11.re, g.g11.im, g.g12.re, g.g12.im);
        let _ = writeln!(s, "  [{:+.5}{:+.5}i  {:+.5}{:+.5}i]", g.g21.re, g.g21.im, g.g22.re, g.g22.im);
        let _ = writeln!(
            s,
            "  residual: {:.3e}   consistent: {}   unitarity dev: {:.3e}",
            rec.residual, rec.consistent, rec.unitarity_deviation
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "diagnostics:");
    let _ = writeln!(s, "  max |s_bb'|            : {:.3e}", d.max_s_bbprime);
    let _ = writeln!(s, "  polariton norm drift   : {:.3e}", d.polariton_norm_drift);
    let _ = writeln!(s, "  adiabaticity metric    : {:.4}", d.adiabaticity);
    let _ = writeln!(s, "  com shift (measured)   : {:.6}", d.com_shift);
    let _ = writeln!(s, "  com shift (predicted)  : {:.6}", d.com_shift_predicted);
    let _ = writeln!(s, "  released energy ratio  : {:.6}", d.energy_ratio);
    if d.warnings.is_empty() {
        let _ = writeln!(s, "  warnings               : none");
    } else {
        for w in &d.warnings {
            let _ = writeln!(s, "  warning: {w}");
        }
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "configuration (verbatim):");
    let _ = writeln!(s, "-------------------------");
    s.push_str(config_text);
    if !config_text.ends_with('\n') {
        s.push('\n');
    }
    s
}

pub fn render_snapshots_csv(snapshots: &[Snapshot]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# schema: {SCHEMA_VERSION}/snapshots");
    let _ = writeln!(
        s,
        "t,z,re_omega_plus,im_omega_plus,re_omega_minus,im_omega_minus,\
         re_s_bc,im_s_bc,re_s_bprime_c,im_s_bprime_c,re_psi_plus,im_psi_plus,\
         re_psi_minus,im_psi_minus"
    );
    for snap in snapshots {
        let grid = snap.fields.grid();
        for j in 0..grid.len() {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                snap.t,
                grid.z(j),
                snap.fields.omega_plus[j].re,
                snap.fields.omega_plus[j].im,
                snap.fields.omega_minus[j].re,
                snap.fields.omega_minus[j].im,
                snap.s_bc[j].re,
                snap.s_bc[j].im,
                snap.s_bprime_c[j].re,
                snap.s_bprime_c[j].im,
                snap.psi.psi_plus[j].re,
                snap.psi.psi_plus[j].im,
                snap.psi.psi_minus[j].re,
                snap.psi.psi_minus[j].im,
            );
        }
    }
    s
}

pub fn render_sweep_csv(axis: &str, rows: &[SweepRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# schema: {SCHEMA_VERSION}/sweep");
    let _ = writeln!(
        s,
        "axis,value,fidelity,max_s_bbprime,polariton_norm_drift,adiabaticity,com_shift,energy_ratio"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{axis},{},{},{},{},{},{},{}",
            r.value,
            r.fidelity,
            r.max_s_bbprime,
            r.polariton_norm_drift,
            r.adiabaticity,
            r.com_shift,
            r.energy_ratio
        );
    }
    s
}

pub fn write_outputs(
    out_dir: &Path,
    config_text: &str,
    spec: &ProtocolSpec,
    result: &ProtocolResult,
    seed: u64,
) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("report.txt"), render_report(config_text, spec, result, seed))?;
    std::fs::write(out_dir.join("result.kv"), render_result_kv(spec, result, seed))?;
    if !result.snapshots.is_empty() {
        std::fs::write(out_dir.join("snapshots.csv"), render_snapshots_csv(&result.snapshots))?;
    }
    Ok(())
}

pub fn write_sweep(out_dir: &Path, axis: &str, rows: &[SweepRow]) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("sweep.csv"), render_sweep_csv(axis, rows))?;
    Ok(())
}
