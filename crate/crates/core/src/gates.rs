//! Analytic gate algebra: the two-parameter gate family, named rotations,
//! the Hadamard composition, the effective Raman coupling, Zeeman pulse
//! areas, and synthesis of arbitrary targets into pulse schedules.
//!
//! The realized map on measured amplitude pairs (fields, stored coherences)
//! is the plain column action `v -> G v`; the adjoint picture, in which the
//! ket amplitudes pick up conjugated entries, is exposed separately as
//! [`apply_to_state`]. The two pictures coincide up to a global phase only
//! for involutive gates, so they are never silently identified.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::qubit::PolarizationQubit;

/// A 2x2 unitary acting on the circular amplitude pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2 {
    pub g11: C64,
    pub g12: C64,
    pub g21: C64,
    pub g22: C64,
}

impl Unitary2 {
    /// Validates unitarity to 1e-12 entrywise.
    pub fn new(g11: C64, g12: C64, g21: C64, g22: C64) -> Result<Self> {
        let g = Self { g11, g12, g21, g22 };
        let dev = g.unitarity_deviation();
        if !(dev < 1e-10) {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Ok(g)
    }

    pub fn identity() -> Self {
        Self {
            g11: C64::new(1.0, 0.0),
            g12: C64::new(0.0, 0.0),
            g21: C64::new(0.0, 0.0),
            g22: C64::new(1.0, 0.0),
        }
    }

    /// Max entrywise deviation of G\u{2020}G from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = self.adjoint().mul(self);
        let one = C64::new(1.0, 0.0);
        (p.g11 - one)
            .norm()
            .max((p.g22 - one).norm())
            .max(p.g12.norm())
            .max(p.g21.norm())
    }

    pub fn adjoint(&self) -> Self {
        Self {
            g11: self.g11.conj(),
            g12: self.g21.conj(),
            g21: self.g12.conj(),
            g22: self.g22.conj(),
        }
    }

    pub fn mul(&self, rhs: &Unitary2) -> Self {
        Self {
            g11: self.g11 * rhs.g11 + self.g12 * rhs.g21,
            g12: self.g11 * rhs.g12 + self.g12 * rhs.g22,
            g21: self.g21 * rhs.g11 + self.g22 * rhs.g21,
            g22: self.g21 * rhs.g12 + self.g22 * rhs.g22,
        }
    }

    pub fn scale(&self, a: C64) -> Self {
        Self { g11: self.g11 * a, g12: self.g12 * a, g21: self.g21 * a, g22: self.g22 * a }
    }

    pub fn det(&self) -> C64 {
        self.g11 * self.g22 - self.g12 * self.g21
    }

    /// Column action on an amplitude pair.
    pub fn apply_pair(&self, v: (C64, C64)) -> (C64, C64) {
        (self.g11 * v.0 + self.g12 * v.1, self.g21 * v.0 + self.g22 * v.1)
    }

    /// Max entrywise distance to `other` after aligning global phases.
    pub fn distance_up_to_phase(&self, other: &Unitary2) -> f64 {
        let tr = self.adjoint().mul(other);
        let tr = tr.g11 + tr.g22;
        let phase = if tr.norm() > 1e-14 { tr / tr.norm() } else { C64::new(1.0, 0.0) };
        let a = self.scale(phase);
        (a.g11 - other.g11)
            .norm()
            .max((a.g12 - other.g12).norm())
            .max((a.g21 - other.g21).norm())
            .max((a.g22 - other.g22).norm())
    }

    pub fn max_entry_distance(&self, other: &Unitary2) -> f64 {
        (self.g11 - other.g11)
            .norm()
            .max((self.g12 - other.g12).norm())
            .max((self.g21 - other.g21).norm())
            .max((self.g22 - other.g22).norm())
    }
}

/// The gate family: G(chi, beta) with cos(beta/2) on the diagonal and
/// i e^{+-i chi} sin(beta/2) off it. chi picks the rotation axis in the
/// equatorial plane, beta the rotation angle.
pub fn gate_matrix(chi: f64, beta: f64) -> Unitary2 {
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    Unitary2 {
        g11: C64::new(c, 0.0),
        g12: C64::i() * C64::from_polar(s, chi),
        g21: C64::i() * C64::from_polar(s, -chi),
        g22: C64::new(c, 0.0),
    }
}

/// Rotation about x: gate_matrix(pi, beta).
pub fn rotation_x(beta: f64) -> Unitary2 {
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    Unitary2 {
        g11: C64::new(c, 0.0),
        g12: C64::new(0.0, -s),
        g21: C64::new(0.0, -s),
        g22: C64::new(c, 0.0),
    }
}

/// Rotation about y: gate_matrix(pi/2, beta).
pub fn rotation_y(beta: f64) -> Unitary2 {
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    Unitary2 {
        g11: C64::new(c, 0.0),
        g12: C64::new(-s, 0.0),
        g21: C64::new(s, 0.0),
        g22: C64::new(c, 0.0),
    }
}

/// Phase gate diag(e^{-i phi/2}, e^{i phi/2}), realized by a Zeeman pulse.
pub fn rotation_z(phi: f64) -> Unitary2 {
    Unitary2 {
        g11: C64::from_polar(1.0, -phi / 2.0),
        g12: C64::new(0.0, 0.0),
        g21: C64::new(0.0, 0.0),
        g22: C64::from_polar(1.0, phi / 2.0),
    }
}

/// The Hadamard (1/sqrt 2)[[1,1],[1,-1]], composed from the physically
/// available rotations as e^{i pi/2} R_Y(pi/2) R_Z(pi); the alternative
/// composition e^{i pi/2} R_X(pi) R_Y(pi/2) gives the same matrix.
pub fn hadamard() -> Unitary2 {
    rotation_y(std::f64::consts::FRAC_PI_2)
        .mul(&rotation_z(std::f64::consts::PI))
        .scale(C64::i())
}

/// Ket-amplitude transformation with conjugated entries: the released photon
/// state c+|+> + c-|-> picks up (G11* c+ + G21* c-)|+> + (G12* c+ + G22* c-)|->.
pub fn apply_to_state(g: &Unitary2, q: &PolarizationQubit) -> PolarizationQubit {
    let (cp, cm) = (q.c_plus(), q.c_minus());
    PolarizationQubit::new(
        g.g11.conj() * cp + g.g21.conj() * cm,
        g.g12.conj() * cp + g.g22.conj() * cm,
    )
    .expect("unitary action preserves the norm")
}

/// Column action on a normalized amplitude pair: the transformation that
/// measured field amplitudes (and stored coherences) actually pick up.
pub fn apply_to_amplitudes(g: &Unitary2, q: &PolarizationQubit) -> PolarizationQubit {
    let (a, b) = g.apply_pair((q.c_plus(), q.c_minus()));
    PolarizationQubit::new(a, b).expect("unitary action preserves the norm")
}

/// Pointwise column action on a two-component field value.
pub fn apply_to_fields(g: &Unitary2, omega: (C64, C64)) -> (C64, C64) {
    g.apply_pair(omega)
}

/// A coupling-strength envelope over a pulse, either constant or sampled
/// uniformly over the duration.
#[derive(Debug, Clone, PartialEq)]
pub enum Envelope {
    Constant(f64),
    /// Uniform samples spanning [0, tau], endpoints included.
    Sampled(Vec<f64>),
}

impl Envelope {
    /// Time integral over a pulse of duration `tau`; trapezoid rule for
    /// sampled envelopes.
    pub fn area(&self, tau: f64) -> f64 {
        match self {
            Envelope::Constant(v) => v * tau,
            Envelope::Sampled(values) => match values.len() {
                0 => 0.0,
                1 => values[0] * tau,
                n => {
                    let dt = tau / (n - 1) as f64;
                    let inner: f64 = values[1..n - 1].iter().sum();
                    dt * (0.5 * (values[0] + values[n - 1]) + inner)
                }
            },
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            Envelope::Constant(v) => *v >= 0.0,
            Envelope::Sampled(values) => values.iter().all(|v| *v >= 0.0),
        }
    }
}

/// A Raman pulse: constant phase chi, magnitude envelope |W|(t) and
/// duration tau. The rotation angle is the pulse area beta = 2 int |W| dt.
#[derive(Debug, Clone, PartialEq)]
pub struct GatePulse {
    pub chi: f64,
    pub omega_w: Envelope,
    pub tau: f64,
}

impl GatePulse {
    pub fn constant(chi: f64, omega_w: f64, tau: f64) -> Result<Self> {
        Self::new(chi, Envelope::Constant(omega_w), tau)
    }

    pub fn new(chi: f64, omega_w: Envelope, tau: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::Validation(format!("pulse duration must be > 0 (got {tau})")));
        }
        if !omega_w.is_nonnegative() {
            return Err(Error::Validation("|W| envelope must be nonnegative".into()));
        }
        Ok(Self { chi, omega_w, tau })
    }

    /// Convenience: a one-time-unit constant pulse realizing the given area.
    pub fn with_area(chi: f64, beta: f64) -> Result<Self> {
        Self::constant(chi, beta.abs() / 2.0, 1.0).map(|mut p| {
            // A negative requested angle flips the axis instead.
            if beta < 0.0 {
                p.chi += std::f64::consts::PI;
            }
            p
        })
    }

    /// Rotation angle beta = 2 int_0^tau |W(t')| dt'.
    pub fn beta(&self) -> f64 {
        2.0 * self.omega_w.area(self.tau)
    }

    pub fn gate(&self) -> Unitary2 {
        gate_matrix(self.chi, self.beta())
    }
}

/// A magnetic pulse shifting |b> and |b'> oppositely. The physical constants
/// in front of g_F B(t) are collapsed into `rate_coefficient`, a rate per
/// unit field in SimUnits; the acquired phase is phi = 2 int rate g_F B dt.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeemanPulse {
    pub g_factor: f64,
    pub rate_coefficient: f64,
    pub b_field: Envelope,
    pub tau: f64,
}

impl ZeemanPulse {
    pub fn new(g_factor: f64, rate_coefficient: f64, b_field: Envelope, tau: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::Validation(format!("pulse duration must be > 0 (got {tau})")));
        }
        Ok(Self { g_factor, rate_coefficient, b_field, tau })
    }

    /// Convenience: a one-time-unit constant pulse realizing the given area.
    pub fn with_area(phi: f64) -> Self {
        Self {
            g_factor: 1.0,
            rate_coefficient: 1.0,
            b_field: Envelope::Constant(phi / 2.0),
            tau: 1.0,
        }
    }

    pub fn phi(&self) -> f64 {
        zeeman_area(self)
    }

    pub fn gate(&self) -> Unitary2 {
        rotation_z(self.phi())
    }
}

/// Pulse area of the magnetic interaction: phi = 2 int_0^tau r g_F B(t') dt'.
pub fn zeeman_area(pulse: &ZeemanPulse) -> f64 {
    2.0 * pulse.rate_coefficient * pulse.g_factor * pulse.b_field.area(pulse.tau)
}

/// Off-resonant two-photon coupling b - f - b' through the auxiliary upper
/// state: matrix elements of the two circular couplings and the intermediate
/// detuning E_b + omega_+ - E_f.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanCouplingSpec {
    pub u_plus: C64,
    pub u_minus: C64,
    pub detuning: f64,
}

/// Effective second-order coupling W = u+ u- / detuning; |W| sets the
/// rotation rate, arg W = chi the axis.
pub fn effective_coupling(spec: &RamanCouplingSpec) -> Result<C64> {
    if spec.detuning == 0.0 || !spec.detuning.is_finite() {
        return Err(Error::ZeroDetuning);
    }
    Ok(spec.u_plus * spec.u_minus / spec.detuning)
}

/// Build a Raman pulse from a coupling spec and interaction time.
pub fn gate_pulse_from_raman(spec: &RamanCouplingSpec, tau: f64) -> Result<GatePulse> {
    let w = effective_coupling(spec)?;
    GatePulse::constant(w.arg(), w.norm(), tau)
}

/// Euler angles of a Z-Y-Z factorization, each factor physically realizable:
/// the Z factors as Zeeman pulses and the Y factor as a chi = pi/2 Raman
/// pulse. Application order on amplitude pairs is phi1 first, then beta,
/// then phi2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZyzDecomposition {
    pub phi1: f64,
    pub beta: f64,
    pub phi2: f64,
    pub global_phase: f64,
}

impl ZyzDecomposition {
    pub fn recompose(&self) -> Unitary2 {
        rotation_z(self.phi2)
            .mul(&rotation_y(self.beta))
            .mul(&rotation_z(self.phi1))
            .scale(C64::from_polar(1.0, self.global_phase))
    }

    /// The pulses realizing this decomposition, in application order.
    /// Zero-area factors are dropped.
    pub fn schedule(&self) -> Vec<PulseStep> {
        let mut steps = Vec::new();
        if self.phi1.abs() > 1e-14 {
            steps.push(PulseStep::Zeeman(ZeemanPulse::with_area(self.phi1)));
        }
        if self.beta.abs() > 1e-14 {
            steps.push(PulseStep::Raman(
                GatePulse::with_area(std::f64::consts::FRAC_PI_2, self.beta)
                    .expect("constant envelope is valid"),
            ));
        }
        if self.phi2.abs() > 1e-14 {
            steps.push(PulseStep::Zeeman(ZeemanPulse::with_area(self.phi2)));
        }
        steps
    }
}

/// One physical manipulation applied at the storage stage.
#[derive(Debug, Clone, PartialEq)]
pub enum PulseStep {
    Raman(GatePulse),
    Zeeman(ZeemanPulse),
}

impl PulseStep {
    pub fn gate(&self) -> Unitary2 {
        match self {
            PulseStep::Raman(p) => p.gate(),
            PulseStep::Zeeman(p) => p.gate(),
        }
    }
}

/// Factor a target unitary as e^{i alpha} R_Z(phi2) R_Y(beta) R_Z(phi1).
pub fn synthesize(target: &Unitary2) -> Result<ZyzDecomposition> {
    let dev = target.unitarity_deviation();
    if !(dev < 1e-10) {
        return Err(Error::NotUnitary { deviation: dev });
    }
    let det = target.det();
    let alpha = det.arg() / 2.0;
    let v = target.scale(C64::from_polar(1.0, -alpha));
    // v is in SU(2): [[a, b], [-b*, a*]] with a = cos(beta/2) e^{-i(phi1+phi2)/2},
    // b = -sin(beta/2) e^{i(phi1-phi2)/2}.
    let (a, b) = (v.g11, v.g12);
    let beta = 2.0 * b.norm().atan2(a.norm());
    let (phi1, phi2) = if b.norm() < 1e-14 {
        (0.0, -2.0 * a.arg())
    } else if a.norm() < 1e-14 {
        (2.0 * (-b).arg(), 0.0)
    } else {
        let sum = -2.0 * a.arg();
        let diff = 2.0 * (-b).arg();
        ((sum + diff) / 2.0, (sum - diff) / 2.0)
    };
    Ok(ZyzDecomposition { phi1, beta, phi2, global_phase: alpha })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Brute-force 2x2 complex matrix-vector product, kept separate from the
    /// implementation path on purpose.
    fn matvec_oracle(m: [[C64; 2]; 2], v: [C64; 2]) -> [C64; 2] {
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    fn assert_close(a: C64, b: C64, tol: f64) {
        assert!((a - b).norm() < tol, "expected {b}, got {a}");
    }

    #[test]
    fn gate_matrix_at_zero_angle_is_identity() {
        for chi in [0.0, 0.4, PI, -2.0] {
            let g = gate_matrix(chi, 0.0);
            assert!(g.max_entry_distance(&Unitary2::identity()) < 1e-15);
        }
    }

    #[test]
    fn gate_matrix_not_and_htilde_values() {
        // chi = pi, beta = pi: -i NOT.
        let g = gate_matrix(PI, PI);
        assert_close(g.g11, c(0.0, 0.0), 1e-15);
        assert_close(g.g12, c(0.0, -1.0), 1e-12);
        assert_close(g.g21, c(0.0, -1.0), 1e-12);

        // chi = pi/2, beta = pi/2: [[cos pi/4, -sin pi/4], [sin pi/4, cos pi/4]].
        let g = gate_matrix(FRAC_PI_2, FRAC_PI_2);
        let h = FRAC_PI_2 / 2.0;
        assert_close(g.g11, c(h.cos(), 0.0), 1e-15);
        assert_close(g.g12, c(-h.sin(), 0.0), 1e-12);
        assert_close(g.g21, c(h.sin(), 0.0), 1e-12);
        assert_close(g.g22, c(h.cos(), 0.0), 1e-15);
    }

    #[test]
    fn named_rotations_match_gate_family() {
        for beta in [0.0, 0.3, 1.234, PI, 5.0] {
            assert!(rotation_x(beta).max_entry_distance(&gate_matrix(PI, beta)) < 1e-12);
            assert!(rotation_y(beta).max_entry_distance(&gate_matrix(FRAC_PI_2, beta)) < 1e-12);
        }
        // rotation_x(pi) = -i sigma_x, rotation_y(pi) = -i sigma_y.
        let rx = rotation_x(PI);
        assert_close(rx.g12, c(0.0, -1.0), 1e-12);
        assert_close(rx.g11, c(0.0, 0.0), 1e-15);
        let ry = rotation_y(PI);
        assert_close(ry.g12, c(-1.0, 0.0), 1e-12);
        assert_close(ry.g21, c(1.0, 0.0), 1e-12);
        assert!(rotation_z(0.0).max_entry_distance(&Unitary2::identity()) < 1e-15);
    }

    #[test]
    fn hadamard_matrix_and_compositions() {
        let h = hadamard();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_close(h.g11, c(s, 0.0), 1e-12);
        assert_close(h.g12, c(s, 0.0), 1e-12);
        assert_close(h.g21, c(s, 0.0), 1e-12);
        assert_close(h.g22, c(-s, 0.0), 1e-12);

        // Both available compositions agree exactly.
        let alt = rotation_x(PI).mul(&rotation_y(FRAC_PI_2)).scale(C64::i());
        assert!(h.max_entry_distance(&alt) < 1e-12);

        // H is an involution.
        assert!(h.mul(&h).max_entry_distance(&Unitary2::identity()) < 1e-12);

        // H|0> = |+x> on the Bloch sphere (direct-action picture).
        let out = apply_to_amplitudes(&h, &PolarizationQubit::plus());
        let b = out.bloch();
        assert!((b.x - 1.0).abs() < 1e-12 && b.y.abs() < 1e-12 && b.z.abs() < 1e-12);
    }

    #[test]
    fn apply_to_state_conjugated_formula() {
        let q = PolarizationQubit::plus();
        let id = Unitary2::identity();
        let out = apply_to_state(&id, &q);
        assert!((out.fidelity(&q) - 1.0).abs() < 1e-12);

        // NOT claim: fidelity 1 to |->.
        let out = apply_to_state(&gate_matrix(PI, PI), &q);
        assert!((out.fidelity(&PolarizationQubit::minus()) - 1.0).abs() < 1e-12);

        // Frozen oracle value for G(0.7, 1.3) acting on (1, 0): the
        // conjugated-entry formula gives (cos 0.65, conj(i e^{i 0.7}) sin 0.65).
        let out = apply_to_state(&gate_matrix(0.7, 1.3), &q);
        assert_close(out.c_plus(), c(0.7960837985490559, 0.0), 1e-14);
        assert_close(out.c_minus(), c(-0.3898717866509623, -0.4628720942779904), 1e-14);

        // Same result from the independent matrix-vector oracle.
        let g = gate_matrix(0.7, 1.3);
        let expect = matvec_oracle(
            [[g.g11.conj(), g.g21.conj()], [g.g12.conj(), g.g22.conj()]],
            [c(1.0, 0.0), c(0.0, 0.0)],
        );
        assert_close(out.c_plus(), expect[0], 1e-14);
        assert_close(out.c_minus(), expect[1], 1e-14);
    }

    #[test]
    fn apply_to_fields_examples() {
        let om = (c(0.3, -0.2), c(0.1, 0.7));
        let out = apply_to_fields(&Unitary2::identity(), om);
        assert_close(out.0, om.0, 1e-15);
        assert_close(out.1, om.1, 1e-15);

        // (omega+, 0) -> (0, -i omega+) under the chi = pi, beta = pi gate.
        let out = apply_to_fields(&gate_matrix(PI, PI), (c(0.3, -0.2), c(0.0, 0.0)));
        assert_close(out.0, c(0.0, 0.0), 1e-12);
        assert_close(out.1, c(0.0, -1.0) * c(0.3, -0.2), 1e-12);

        // chi = pi/2, beta = pi/2 on (1, 0): (cos pi/4, sin pi/4).
        let out = apply_to_fields(&gate_matrix(FRAC_PI_2, FRAC_PI_2), (c(1.0, 0.0), c(0.0, 0.0)));
        let h = FRAC_PI_2 / 2.0;
        assert_close(out.0, c(h.cos(), 0.0), 1e-12);
        assert_close(out.1, c(h.sin(), 0.0), 1e-12);
    }

    #[test]
    fn effective_coupling_examples() {
        let w = effective_coupling(&RamanCouplingSpec {
            u_plus: c(0.0, 0.0),
            u_minus: c(0.4, 0.1),
            detuning: 1.5,
        })
        .unwrap();
        assert!(w.norm() < 1e-15);

        let w = effective_coupling(&RamanCouplingSpec {
            u_plus: c(0.2, 0.0),
            u_minus: c(0.3, 0.0),
            detuning: -2.0,
        })
        .unwrap();
        assert_close(w, c(-0.03, 0.0), 1e-15);
        assert!((w.norm() - 0.03).abs() < 1e-15);
        // chi = pi: e^{i chi} = -1 (arg may report +-pi depending on the
        // sign of the zero imaginary part).
        assert_close(C64::from_polar(1.0, w.arg()), c(-1.0, 0.0), 1e-12);

        // u+ = i a, u- = a, detuning > 0: chi = pi/2.
        let w = effective_coupling(&RamanCouplingSpec {
            u_plus: c(0.0, 0.7),
            u_minus: c(0.7, 0.0),
            detuning: 3.0,
        })
        .unwrap();
        assert!((w.arg() - FRAC_PI_2).abs() < 1e-12);

        assert!(matches!(
            effective_coupling(&RamanCouplingSpec {
                u_plus: c(0.2, 0.0),
                u_minus: c(0.3, 0.0),
                detuning: 0.0,
            }),
            Err(Error::ZeroDetuning)
        ));
    }

    #[test]
    fn zeeman_area_examples() {
        let zero = ZeemanPulse::new(1.0, 0.5, Envelope::Constant(0.0), 2.0).unwrap();
        assert_eq!(zeeman_area(&zero), 0.0);

        // Constant field: phi = 2 r g B tau.
        let p = ZeemanPulse::new(0.5, 0.8, Envelope::Constant(1.2), 3.0).unwrap();
        assert!((zeeman_area(&p) - 2.0 * 0.8 * 0.5 * 1.2 * 3.0).abs() < 1e-12);

        // B(t) = sin(t) on [0, pi], rate 1/2: phi = 2 against the analytic
        // antiderivative; trapezoid error O(dt^2).
        let n = 2001;
        let samples: Vec<f64> =
            (0..n).map(|k| (PI * k as f64 / (n - 1) as f64).sin()).collect();
        let p = ZeemanPulse::new(1.0, 0.5, Envelope::Sampled(samples), PI).unwrap();
        assert!((zeeman_area(&p) - 2.0).abs() < 1e-6);

        // Reversing the field sign negates the area.
        let flipped = ZeemanPulse::new(1.0, 0.5, Envelope::Constant(-1.2), 3.0).unwrap();
        let original = ZeemanPulse::new(1.0, 0.5, Envelope::Constant(1.2), 3.0).unwrap();
        assert_eq!(zeeman_area(&flipped), -zeeman_area(&original));
    }

    #[test]
    fn pulse_area_equivalence() {
        // A shaped |W|(t) produces the same gate as a constant pulse of equal
        // area; the sampled area integrates to tau/2 for sin^2 shading.
        let tau = 1.7;
        let w0 = 0.9;
        let n = 4001;
        let samples: Vec<f64> = (0..n)
            .map(|k| {
                let t = tau * k as f64 / (n - 1) as f64;
                w0 * (PI * t / tau).sin().powi(2)
            })
            .collect();
        let shaped = GatePulse::new(0.37, Envelope::Sampled(samples), tau).unwrap();
        let constant = GatePulse::constant(0.37, w0 / 2.0, tau).unwrap();
        assert!((shaped.beta() - constant.beta()).abs() < 1e-8);
        assert!(shaped.gate().max_entry_distance(&constant.gate()) < 1e-8);
    }

    #[test]
    fn synthesize_named_targets() {
        for target in [
            Unitary2::identity(),
            hadamard(),
            rotation_x(1.1),
            gate_matrix(0.37, 2.2).mul(&rotation_z(0.9)),
        ] {
            let d = synthesize(&target).unwrap();
            assert!(d.recompose().max_entry_distance(&target) < 1e-10);
        }

        // Hadamard lands on the e^{i pi/2} R_Y(pi/2) R_Z(pi) composition.
        let d = synthesize(&hadamard()).unwrap();
        assert!((d.phi1 - PI).abs() < 1e-10);
        assert!((d.beta - FRAC_PI_2).abs() < 1e-10);
        assert!(d.phi2.abs() < 1e-10);
        assert!((d.global_phase - FRAC_PI_2).abs() < 1e-10);
    }

    #[test]
    fn synthesize_rejects_non_unitary() {
        let m = Unitary2 { g11: c(1.0, 0.0), g12: c(0.5, 0.0), g21: c(0.0, 0.0), g22: c(1.0, 0.0) };
        assert!(matches!(synthesize(&m), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn schedule_matches_decomposition() {
        let d = synthesize(&hadamard()).unwrap();
        let mut total = Unitary2::identity();
        for step in d.schedule() {
            total = step.gate().mul(&total);
        }
        assert!(total.scale(C64::from_polar(1.0, d.global_phase)).max_entry_distance(&hadamard()) < 1e-10);
    }

    #[test]
    fn sqrt_not_squares_to_not() {
        let q = PolarizationQubit::new(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let half = gate_matrix(PI, FRAC_PI_2);
        let twice = apply_to_state(&half, &apply_to_state(&half, &q));
        let once = apply_to_state(&gate_matrix(PI, PI), &q);
        assert!((twice.fidelity(&once) - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn unitary_unit_det(chi in -TAU..TAU, beta in -TAU..TAU) {
            let g = gate_matrix(chi, beta);
            prop_assert!(g.unitarity_deviation() < 1e-12);
            prop_assert!((g.det() - c(1.0, 0.0)).norm() < 1e-12);
        }

        #[test]
        fn same_axis_angles_add(chi in -TAU..TAU, b1 in -TAU..TAU, b2 in -TAU..TAU) {
            let lhs = gate_matrix(chi, b1).mul(&gate_matrix(chi, b2));
            prop_assert!(lhs.max_entry_distance(&gate_matrix(chi, b1 + b2)) < 1e-12);
        }

        #[test]
        fn inverse_is_negative_angle_and_adjoint(chi in -TAU..TAU, beta in -TAU..TAU) {
            let g = gate_matrix(chi, beta);
            let inv = gate_matrix(chi, -beta);
            prop_assert!(g.mul(&inv).max_entry_distance(&Unitary2::identity()) < 1e-12);
            prop_assert!(inv.max_entry_distance(&g.adjoint()) < 1e-12);
        }

        #[test]
        fn not_gate_on_random_states(re_p in -1.0f64..1.0, im_p in -1.0f64..1.0,
                                     re_m in -1.0f64..1.0, im_m in -1.0f64..1.0) {
            prop_assume!(re_p * re_p + im_p * im_p + re_m * re_m + im_m * im_m > 1e-3);
            let q = PolarizationQubit::new(c(re_p, im_p), c(re_m, im_m)).unwrap();
            let out = apply_to_state(&gate_matrix(PI, PI), &q);
            // Expected NOT output: swapped amplitudes, up to a global phase.
            let expect = PolarizationQubit::new(q.c_minus(), q.c_plus()).unwrap();
            prop_assert!((out.fidelity(&expect) - 1.0).abs() < 1e-12);
            // Norm preserved by construction.
            prop_assert!((out.c_plus().norm_sqr() + out.c_minus().norm_sqr() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn synthesize_round_trip(chi in -TAU..TAU, beta in -TAU..TAU, phi in -TAU..TAU) {
            let target = rotation_z(phi).mul(&gate_matrix(chi, beta));
            let d = synthesize(&target).unwrap();
            prop_assert!(d.recompose().max_entry_distance(&target) < 1e-10);
        }

        #[test]
        fn rotation_consistency_on_bloch_sphere(
            re_p in -1.0f64..1.0, im_p in -1.0f64..1.0,
            re_m in -1.0f64..1.0, im_m in -1.0f64..1.0,
            beta in -3.0f64..3.0,
        ) {
            prop_assume!(re_p * re_p + im_p * im_p + re_m * re_m + im_m * im_m > 1e-3);
            let q = PolarizationQubit::new(c(re_p, im_p), c(re_m, im_m)).unwrap();
            let v = q.bloch();

            // Rotate the Bloch vector classically and compare against the
            // state-level action of each axis rotation.
            let cases: [(Unitary2, [f64; 3]); 3] = [
                (rotation_x(beta), [
                    v.x,
                    v.y * beta.cos() - v.z * beta.sin(),
                    v.y * beta.sin() + v.z * beta.cos(),
                ]),
                (rotation_y(beta), [
                    v.x * beta.cos() + v.z * beta.sin(),
                    v.y,
                    -v.x * beta.sin() + v.z * beta.cos(),
                ]),
                (rotation_z(beta), [
                    v.x * beta.cos() - v.y * beta.sin(),
                    v.x * beta.sin() + v.y * beta.cos(),
                    v.z,
                ]),
            ];
            for (gate, expect) in cases {
                let b = apply_to_amplitudes(&gate, &q).bloch();
                prop_assert!((b.x - expect[0]).abs() < 1e-10);
                prop_assert!((b.y - expect[1]).abs() < 1e-10);
                prop_assert!((b.z - expect[2]).abs() < 1e-10);
            }
        }
    }
}
