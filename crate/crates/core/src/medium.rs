//! Atomic coherences and their evolution: the linearized optical Bloch
//! equations, the storage-stage Raman map on the spin-coherence pair, the
//! full 3x3 conjugation it restricts, and Zeeman phase imprinting.
//!
//! Coherences are c-number fields over z; the continuum description maps
//! operator mean values onto complex amplitudes. Populations stay fixed at
//! p_b = p_b' = 1/2, p_c = p_a = 0 in the first-order theory and are not
//! dynamical variables.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::gates::{GatePulse, Unitary2};
use crate::grid::Grid1D;
use crate::propagation::FieldState;

/// Fixed population of |b> and |b'>.
pub const POP_B: f64 = 0.5;
/// Fixed population of |c> and |a>.
pub const POP_C: f64 = 0.0;

/// Coherence amplitude fields on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MediumState {
    grid: Grid1D,
    /// Spin coherence storing the right-circular component.
    pub s_bc: Vec<C64>,
    /// Spin coherence storing the left-circular component.
    pub s_bprime_c: Vec<C64>,
    /// Optical coherence driven by the right-circular probe.
    pub s_ba: Vec<C64>,
    /// Optical coherence driven by the left-circular probe.
    pub s_bprime_a: Vec<C64>,
    /// Cross coherence between the two storage states; never produced by the
    /// protocols (equal populations), carried for the coupling term.
    pub s_bbprime: Vec<C64>,
}

impl MediumState {
    pub fn zeros(grid: Grid1D) -> Self {
        let n = grid.len();
        let z = vec![C64::new(0.0, 0.0); n];
        Self {
            grid,
            s_bc: z.clone(),
            s_bprime_c: z.clone(),
            s_ba: z.clone(),
            s_bprime_a: z.clone(),
            s_bbprime: z,
        }
    }

    #[inline]
    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn max_s_bbprime(&self) -> f64 {
        self.s_bbprime.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        [&self.s_bc, &self.s_bprime_c, &self.s_ba, &self.s_bprime_a, &self.s_bbprime]
            .iter()
            .flat_map(|v| v.iter())
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Integral of |s_bc|^2 + |s_b'c|^2 over z.
    pub fn spin_norm(&self) -> f64 {
        let dz = self.grid.dz();
        self.s_bc
            .iter()
            .zip(&self.s_bprime_c)
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .sum::<f64>()
            * dz
    }
}

/// Time derivatives of the coherence fields.
#[derive(Debug, Clone)]
pub struct MediumDerivs {
    pub s_bc: Vec<C64>,
    pub s_bprime_c: Vec<C64>,
    pub s_ba: Vec<C64>,
    pub s_bprime_a: Vec<C64>,
}

/// Right side of the linearized Bloch equations (hbar = 1), pointwise in z:
///
/// i ds_ba/dt  = -omega+/2 - omega_c s_bc  - omega- s_bb'
/// i ds_b'a/dt = -omega-/2 - omega_c s_b'c - omega+ s_b'b
/// i ds_bc/dt  = -omega_c s_ba
/// i ds_b'c/dt = -omega_c s_b'a
///
/// with s_b'b = conj(s_bb'). The cross coherence itself has no first-order
/// dynamics and keeps whatever value it holds.
pub fn bloch_rhs(state: &MediumState, fields: &FieldState, omega_c: f64) -> Result<MediumDerivs> {
    state.grid.check_same(&fields.grid())?;
    let n = state.grid.len();
    let i = C64::i();
    let mut d = MediumDerivs {
        s_bc: vec![C64::new(0.0, 0.0); n],
        s_bprime_c: vec![C64::new(0.0, 0.0); n],
        s_ba: vec![C64::new(0.0, 0.0); n],
        s_bprime_a: vec![C64::new(0.0, 0.0); n],
    };
    for j in 0..n {
        let cross = state.s_bbprime[j];
        d.s_ba[j] = i
            * (0.5 * fields.omega_plus[j]
                + omega_c * state.s_bc[j]
                + fields.omega_minus[j] * cross);
        d.s_bprime_a[j] = i
            * (0.5 * fields.omega_minus[j]
                + omega_c * state.s_bprime_c[j]
                + fields.omega_plus[j] * cross.conj());
        d.s_bc[j] = i * omega_c * state.s_ba[j];
        d.s_bprime_c[j] = i * omega_c * state.s_bprime_a[j];
    }
    Ok(d)
}

/// Storage-stage Raman map: (s_bc, s_b'c) -> G (s_bc, s_b'c) pointwise with
/// G = gate_matrix(chi, beta). Populations and s_bb' are untouched; with
/// equal populations the conjugation produces no cross coherence.
pub fn apply_raman(state: &MediumState, pulse: &GatePulse) -> MediumState {
    apply_gate_to_spin(state, &pulse.gate())
}

/// Pointwise column action of an arbitrary gate on the spin-coherence pair.
pub fn apply_gate_to_spin(state: &MediumState, g: &Unitary2) -> MediumState {
    let mut out = state.clone();
    for j in 0..state.grid.len() {
        let (a, b) = g.apply_pair((state.s_bc[j], state.s_bprime_c[j]));
        out.s_bc[j] = a;
        out.s_bprime_c[j] = b;
    }
    out
}

/// Zeeman phase imprint: s_bc -> s_bc e^{-i phi/2}, s_b'c -> s_b'c e^{+i phi/2}.
pub fn apply_zeeman(state: &MediumState, phi: f64) -> MediumState {
    let mut out = state.clone();
    let minus = C64::from_polar(1.0, -phi / 2.0);
    let plus = C64::from_polar(1.0, phi / 2.0);
    for j in 0..state.grid.len() {
        out.s_bc[j] = state.s_bc[j] * minus;
        out.s_bprime_c[j] = state.s_bprime_c[j] * plus;
    }
    out
}

/// Hermitian 3x3 coherence matrix over the storage basis {b, c, b'},
/// row-major. Used by the exact-conjugation oracle for the Raman map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceMatrix([[C64; 3]; 3]);

impl CoherenceMatrix {
    /// Validates Hermiticity to 1e-12.
    pub fn new(m: [[C64; 3]; 3]) -> Result<Self> {
        let mut dev: f64 = 0.0;
        for r in 0..3 {
            for c in 0..3 {
                dev = dev.max((m[r][c] - m[c][r].conj()).norm());
            }
        }
        if !(dev < 1e-12) {
            return Err(Error::NotHermitian { deviation: dev });
        }
        Ok(Self(m))
    }

    /// Matrix for populations (p_b, p_c, p_b') and coherences s_bc, s_b'c,
    /// s_bb' (upper triangle; the lower is the conjugate).
    pub fn from_components(
        p_b: f64,
        p_c: f64,
        p_bprime: f64,
        s_bc: C64,
        s_bprime_c: C64,
        s_bbprime: C64,
    ) -> Self {
        let r = |x: f64| C64::new(x, 0.0);
        Self([
            [r(p_b), s_bc, s_bbprime],
            [s_bc.conj(), r(p_c), s_bprime_c.conj()],
            [s_bbprime.conj(), s_bprime_c, r(p_bprime)],
        ])
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.0[r][c]
    }

    pub fn s_bc(&self) -> C64 {
        self.0[0][1]
    }

    pub fn s_bprime_c(&self) -> C64 {
        self.0[2][1]
    }

    pub fn s_bbprime(&self) -> C64 {
        self.0[0][2]
    }

    pub fn max_entry_distance(&self, other: &CoherenceMatrix) -> f64 {
        let mut dev: f64 = 0.0;
        for r in 0..3 {
            for c in 0..3 {
                dev = dev.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        dev
    }
}

/// Exact conjugation sigma(tau) = e^{i V tau} sigma(0) e^{-i V tau} with
/// V = W |b><b'| + W* |b'><b|, W = |W| e^{i chi}: the closed form behind the
/// storage-stage map, valid for arbitrary populations. Serves as the oracle
/// that [`apply_raman`] is the correct restriction when p_b = p_b' = 1/2.
pub fn apply_raman_full_matrix(sigma: &CoherenceMatrix, pulse: &GatePulse) -> CoherenceMatrix {
    // Half-angle |W| tau = beta / 2.
    let half = pulse.beta() / 2.0;
    let (co, si) = (half.cos(), half.sin());
    let phase = C64::from_polar(1.0, pulse.chi);
    let i = C64::i();
    // U = e^{i V tau / hbar}: identity on |c>, rotation on the b-b' block.
    let u = [
        [C64::new(co, 0.0), C64::new(0.0, 0.0), i * phase * si],
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [i * phase.conj() * si, C64::new(0.0, 0.0), C64::new(co, 0.0)],
    ];
    let mut us = [[C64::new(0.0, 0.0); 3]; 3];
    for r in 0..3 {
        for cc in 0..3 {
            for k in 0..3 {
                us[r][cc] += u[r][k] * sigma.get(k, cc);
            }
        }
    }
    let mut out = [[C64::new(0.0, 0.0); 3]; 3];
    for r in 0..3 {
        for cc in 0..3 {
            for k in 0..3 {
                out[r][cc] += us[r][k] * u[cc][k].conj();
            }
        }
    }
    CoherenceMatrix(out)
}
