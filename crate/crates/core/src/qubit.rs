//! Polarization qubits and Bloch-sphere coordinates.
//!
//! The computational basis is circular: |+> and |-> are the right and left
//! circular polarization states. Bloch coordinates are defined so that the
//! gate family acts as literal rotations: R_Z(phi) rotates (x, y) by +phi
//! about z, and the chi = pi and chi = pi/2 gates rotate about x and y.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Normalized two-component polarization state in the circular basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationQubit {
    c_plus: C64,
    c_minus: C64,
}

impl PolarizationQubit {
    /// Build a qubit from raw amplitudes, normalizing to unit norm.
    /// The relative phase is preserved; a zero or non-finite pair is rejected.
    pub fn new(c_plus: C64, c_minus: C64) -> Result<Self> {
        let norm_sq = c_plus.norm_sqr() + c_minus.norm_sqr();
        if !norm_sq.is_finite() || norm_sq <= 0.0 {
            return Err(Error::ZeroAmplitude);
        }
        let norm = norm_sq.sqrt();
        Ok(Self { c_plus: c_plus / norm, c_minus: c_minus / norm })
    }

    /// Right circular basis state |+>.
    pub fn plus() -> Self {
        Self { c_plus: C64::new(1.0, 0.0), c_minus: C64::new(0.0, 0.0) }
    }

    /// Left circular basis state |->.
    pub fn minus() -> Self {
        Self { c_plus: C64::new(0.0, 0.0), c_minus: C64::new(1.0, 0.0) }
    }

    #[inline]
    pub fn c_plus(&self) -> C64 {
        self.c_plus
    }

    #[inline]
    pub fn c_minus(&self) -> C64 {
        self.c_minus
    }

    /// Amplitudes in the linear basis, with |+> = (|x> + i|y>)/sqrt(2) and
    /// |-> = (|x> - i|y>)/sqrt(2). This is our convention; both bases are
    /// exposed so callers can translate to whichever one they use.
    pub fn to_linear(&self) -> (C64, C64) {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let c_x = (self.c_plus + self.c_minus) * inv;
        let c_y = C64::i() * (self.c_plus - self.c_minus) * inv;
        (c_x, c_y)
    }

    /// Inverse of [`to_linear`](Self::to_linear).
    pub fn from_linear(c_x: C64, c_y: C64) -> Result<Self> {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        Self::new((c_x - C64::i() * c_y) * inv, (c_x + C64::i() * c_y) * inv)
    }

    /// Bloch coordinates: x = 2 Re(c+ conj(c-)), y = 2 Im(conj(c+) c-),
    /// z = |c+|^2 - |c-|^2.
    pub fn bloch(&self) -> BlochVector {
        BlochVector {
            x: 2.0 * (self.c_plus * self.c_minus.conj()).re,
            y: 2.0 * (self.c_plus.conj() * self.c_minus).im,
            z: self.c_plus.norm_sqr() - self.c_minus.norm_sqr(),
        }
    }

    /// Squared overlap |<self|other>|^2, insensitive to global phases.
    pub fn fidelity(&self, other: &PolarizationQubit) -> f64 {
        let overlap = self.c_plus.conj() * other.c_plus + self.c_minus.conj() * other.c_minus;
        overlap.norm_sqr().min(1.0)
    }
}

/// Real Bloch-sphere coordinates; unit length for pure states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Polar angle from +z and azimuth from +x, the spherical parametrization
    /// of the same point.
    pub fn angles(&self) -> (f64, f64) {
        (self.z.clamp(-1.0, 1.0).acos(), self.y.atan2(self.x))
    }
}

/// Free-function form of [`PolarizationQubit::fidelity`].
pub fn fidelity(a: &PolarizationQubit, b: &PolarizationQubit) -> f64 {
    a.fidelity(b)
}
