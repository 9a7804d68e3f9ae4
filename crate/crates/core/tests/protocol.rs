//! Integration tests for the protocol driver and the propagation engines
//! beyond what the acceptance criteria pin down.

#![allow(clippy::needless_range_loop)]

use num_complex::Complex64 as C64;
use std::f64::consts::{FRAC_PI_2, PI};

use stored_light::gates::{hadamard, GatePulse, PulseStep, ZeemanPulse};
use stored_light::propagation::{step_full_injected, ControlSchedule, FieldState};
use stored_light::protocol::{reconstruct_gate, run_protocol, Engine, ProtocolSpec};
use stored_light::{MediumParams, MediumState, PolarizationQubit};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn l2_relative(a: &FieldState, b: &FieldState) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..a.omega_plus.len() {
        num += (a.omega_plus[j] - b.omega_plus[j]).norm_sqr()
            + (a.omega_minus[j] - b.omega_minus[j]).norm_sqr();
        den += b.omega_plus[j].norm_sqr() + b.omega_minus[j].norm_sqr();
    }
    (num / den).sqrt()
}

/// Restrict a fine-grid field to a coarser nested grid (n divides fine n).
fn restrict(fine: &FieldState, coarse_n: usize) -> Vec<C64> {
    let stride = fine.omega_plus.len() / coarse_n;
    (0..coarse_n).map(|j| fine.omega_plus[j * stride]).collect()
}

#[test]
fn released_pulse_self_convergence_order() {
    // Richardson-style self-convergence of the full engine on the identity
    // protocol. At cfl < 1 the first-order upwind error dominates, so
    // successive grid doublings should shrink the released-pulse difference
    // by at least 2x (observed order >= 1).
    let mut specs = Vec::new();
    for n_z in [128usize, 256, 512] {
        let mut s = ProtocolSpec::new(PolarizationQubit::plus());
        s.params = MediumParams::new(60.0, 1.0, n_z).unwrap();
        s.cfl = 0.8;
        specs.push(s);
    }
    let released: Vec<FieldState> = specs
        .iter()
        .map(|s| run_protocol(s).unwrap().released_fields)
        .collect();

    let err = |coarse: &FieldState, fine: &FieldState| -> f64 {
        let n = coarse.omega_plus.len();
        let fine_on_coarse = restrict(fine, n);
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..n {
            num += (coarse.omega_plus[j] - fine_on_coarse[j]).norm_sqr();
            den += fine_on_coarse[j].norm_sqr();
        }
        (num / den).sqrt()
    };
    let e1 = err(&released[0], &released[1]);
    let e2 = err(&released[1], &released[2]);
    let order = (e1 / e2).log2();
    assert!(
        order >= 1.0,
        "observed convergence order {order:.3} (errors {e1:.3e}, {e2:.3e})"
    );
    println!("self-convergence: errors {e1:.3e} -> {e2:.3e}, order {order:.2}");
}

#[test]
fn hybrid_engine_matches_full_released_fields() {
    let q = PolarizationQubit::new(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
    let mut full = ProtocolSpec::new(q);
    full.manipulations = vec![PulseStep::Raman(GatePulse::with_area(PI, PI).unwrap())];
    let mut hybrid = full.clone();
    hybrid.engine = Engine::Hybrid;
    let rf = run_protocol(&full).unwrap();
    let rh = run_protocol(&hybrid).unwrap();
    let l2 = l2_relative(&rh.released_fields, &rf.released_fields);
    assert!(l2 < 0.01, "hybrid vs full released L2 {l2}");
    assert!((rh.output_qubit.fidelity(&rf.output_qubit) - 1.0).abs() < 1e-6);
}

#[test]
fn polariton_engine_matches_full_output_qubit() {
    let q = PolarizationQubit::new(c(0.5, 0.3), c(-0.4, 0.6)).unwrap();
    let mut spec = ProtocolSpec::new(q);
    spec.manipulations = vec![
        PulseStep::Zeeman(ZeemanPulse::with_area(0.77)),
        PulseStep::Raman(GatePulse::with_area(1.3, 2.1).unwrap()),
    ];
    let mut fast = spec.clone();
    fast.engine = Engine::Polariton;
    let rf = run_protocol(&spec).unwrap();
    let rp = run_protocol(&fast).unwrap();
    assert!((rf.output_qubit.fidelity(&rp.output_qubit) - 1.0).abs() < 1e-5);
}

#[test]
fn full_engine_reconstructs_hadamard_composition() {
    let mut spec = ProtocolSpec::new(PolarizationQubit::plus());
    spec.manipulations = vec![
        PulseStep::Zeeman(ZeemanPulse::with_area(PI)),
        PulseStep::Raman(GatePulse::with_area(FRAC_PI_2, FRAC_PI_2).unwrap()),
    ];
    let rec = reconstruct_gate(&spec).unwrap();
    assert!(rec.consistent, "residual {}", rec.residual);
    assert!(rec.unitarity_deviation < 0.02);
    let d = rec.gate.distance_up_to_phase(&hadamard());
    assert!(d < 0.02, "distance to Hadamard up to phase: {d}");
}

#[test]
fn boundary_injection_mode_propagates() {
    // Drive the z = 0 boundary with a temporal Gaussian and watch it enter,
    // compress onto the grid, and crawl at the group velocity; the other
    // polarization stays dark.
    let kappa = 60.0;
    let params = MediumParams::new(kappa, 1.0, 256).unwrap();
    let grid = params.grid().unwrap();
    let cos2 = 0.25f64;
    let tan_theta = (1.0 / cos2 - 1.0).sqrt();
    let omega_c = kappa / (std::f64::consts::SQRT_2 * tan_theta);

    let mut fields = FieldState::zeros(grid);
    let mut medium = MediumState::zeros(grid);
    let dt = grid.dz();
    let (t0, sigma_t) = (1.0, 0.25);
    let mut com_early = None;
    let steps = (2.6 / dt) as usize;
    for k in 0..steps {
        let t = k as f64 * dt;
        let drive = (-0.5 * ((t - t0) / sigma_t).powi(2)).exp();
        let (f, m) = step_full_injected(
            &fields,
            &medium,
            &params,
            omega_c,
            dt,
            (c(drive, 0.0), c(0.0, 0.0)),
        )
        .unwrap();
        fields = f;
        medium = m;
        if k == (2.0 / dt) as usize {
            com_early = Some(fields.center_of_mass());
        }
    }
    // The injected norm should be inside and moving at ~cos^2 theta.
    let com_late = fields.center_of_mass();
    let measured_v = (com_late - com_early.unwrap()) / 0.6;
    assert!(
        (measured_v - cos2).abs() / cos2 < 0.1,
        "injected pulse moves at {measured_v} vs {cos2}"
    );
    assert!(fields.omega_minus.iter().all(|v| v.norm() == 0.0));
    // In-medium spatial width ~ v_g sigma_t, well under the free-space extent.
    assert!(fields.norm() > 0.0);
}

#[test]
fn schedule_shapes_behave() {
    // Store-release schedule: full control at the ends, zero in the hold.
    let spec = ProtocolSpec::new(PolarizationQubit::plus());
    let s = spec.schedule();
    assert!((s.omega_c(0.0) - spec.omega_c0).abs() / spec.omega_c0 < 1e-3);
    assert_eq!(s.omega_c(spec.t_manipulate()), 0.0);
    assert!((s.omega_c(spec.t_end()) - spec.omega_c0).abs() / spec.omega_c0 < 1e-3);

    // Constant schedule reports no hold window.
    assert!(ControlSchedule::constant(1.0, 60.0).hold_window().is_none());
}

#[test]
fn warnings_surface_for_rushed_ramps() {
    let mut spec = ProtocolSpec::new(PolarizationQubit::plus());
    spec.engine = Engine::Polariton;
    spec.ramp_time = 5.0 / spec.params.kappa; // 10x faster than the default
    let r = run_protocol(&spec).unwrap();
    assert!(r.diagnostics.adiabaticity > 0.05);
    assert!(r
        .diagnostics
        .warnings
        .iter()
        .any(|w| w.contains("adiabaticity")));
}

#[test]
fn all_presets_complete_quickly() {
    use stored_light::config::{preset, PRESETS};
    let start = std::time::Instant::now();
    for p in PRESETS {
        let spec = preset(p.name).unwrap().to_protocol_spec().unwrap();
        let r = run_protocol(&spec).unwrap();
        assert!(r.fidelity_to_target > 0.98, "{}: fidelity {}", p.name, r.fidelity_to_target);
    }
    assert!(start.elapsed().as_secs() < 60, "presets took {:?}", start.elapsed());
}

#[test]
fn ramp_time_sweep_restores_fidelity() {
    use stored_light::config::preset;
    use stored_light::sweep::{run_sweep, Axis};
    // Faster switching costs fidelity; slowing the ramp wins it back and the
    // default lands at 0.99 or better.
    let base = preset("identity").unwrap();
    let values = [0.08, 0.2, 0.45, 50.0 / 60.0];
    let rows = run_sweep(&base, Axis::RampTime, &values).unwrap();
    for pair in rows.windows(2) {
        assert!(
            pair[1].fidelity >= pair[0].fidelity - 1e-9,
            "fidelity not improving: {} then {}",
            pair[0].fidelity,
            pair[1].fidelity
        );
    }
    assert!(rows.last().unwrap().fidelity >= 0.99);
}

#[test]
fn dark_state_input_matches_conserved_transport() {
    use stored_light::propagation::{
        polariton_transform, step_full, transported_amplitudes, translate_polariton,
        PolaritonState,
    };
    // Narrowband constant-control transit: the transported combination
    // rigidly translates, and on dark-state inputs the two polariton
    // conventions differ exactly by the factor cos(2 theta).
    let kappa = 120.0;
    let params = MediumParams::new(kappa, 1.0, 512).unwrap();
    let grid = params.grid().unwrap();
    let cos2 = 0.25f64;
    let tan_theta = (1.0 / cos2 - 1.0).sqrt();
    let omega_c = kappa / (std::f64::consts::SQRT_2 * tan_theta);
    let theta = kappa.atan2(std::f64::consts::SQRT_2 * omega_c);

    let fields = FieldState::gaussian(grid, 0.3, 0.08, (c(0.8, 0.0), c(0.0, 0.6)));
    let medium = stored_light::propagation::dark_state_medium(&fields, omega_c);

    // Printed polariton = cos(2 theta) * transported combination, pointwise.
    let psi = polariton_transform(&fields, &medium, &params, theta).unwrap();
    let (p_plus, _) = transported_amplitudes(&fields, &medium, kappa, theta).unwrap();
    let factor = (2.0 * theta).cos();
    for j in 0..grid.len() {
        assert!((psi.psi_plus[j] - factor * p_plus[j]).norm() < 1e-12);
    }

    // The transported profile translates rigidly under the full engine:
    // 100 steps at cfl = 1 and v = 1/4 is an exact 25-cell shift. The
    // residual is physical, not numerical: the finite pulse bandwidth sees a
    // slightly velocity-dispersive medium (0.3% here), so rigidity saturates
    // near the per-mille level for this spectrum.
    let mut state = (fields, medium);
    let steps = 100;
    for _ in 0..steps {
        state = step_full(&state.0, &state.1, &params, omega_c, grid.dz()).unwrap();
    }
    let (p_after, _) = transported_amplitudes(&state.0, &state.1, kappa, theta).unwrap();
    let mut pol0 = PolaritonState::zeros(grid);
    pol0.psi_plus = p_plus;
    let shifted = translate_polariton(&pol0, cos2 * steps as f64 * grid.dz()).unwrap();
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..grid.len() {
        num += (p_after[j] - shifted.psi_plus[j]).norm_sqr();
        den += shifted.psi_plus[j].norm_sqr();
    }
    let rel = (num / den).sqrt();
    assert!(rel < 5e-3, "transported profile deviates by {rel:.2e}");
}
