//! Exact two-qubit oracle for measurements in the x-y plane.
//!
//! Everything here is small closed-form linear algebra over four complex
//! amplitudes; it exists so that the Bell tables elsewhere in the crate can be
//! checked against an independent route.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for normalization and probability identities.
pub const PROB_TOL: f64 = 1e-12;

/// The two prepared initial states: parallel spins in the measurement plane
/// (`I1`) and the singlet (`I2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InitialLabel {
    I1,
    I2,
}

impl InitialLabel {
    pub const ALL: [InitialLabel; 2] = [InitialLabel::I1, InitialLabel::I2];

    /// Index used when the label appears as a table coordinate (0 for I1).
    pub fn index(self) -> usize {
        match self {
            InitialLabel::I1 => 0,
            InitialLabel::I2 => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            0 => Some(InitialLabel::I1),
            1 => Some(InitialLabel::I2),
            _ => None,
        }
    }

    /// Numeric tag used by the CSV format (1 or 2).
    pub fn tag(self) -> u8 {
        match self {
            InitialLabel::I1 => 1,
            InitialLabel::I2 => 2,
        }
    }
}

impl std::fmt::Display for InitialLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "I{}", self.tag())
    }
}

/// A binary measurement outcome. `Zero` is spin-up along the measurement
/// direction (the +1 eigenvalue).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Zero,
    One,
}

impl Outcome {
    pub const ALL: [Outcome; 2] = [Outcome::Zero, Outcome::One];

    pub fn index(self) -> usize {
        match self {
            Outcome::Zero => 0,
            Outcome::One => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            0 => Some(Outcome::Zero),
            1 => Some(Outcome::One),
            _ => None,
        }
    }

    fn sign(self) -> f64 {
        match self {
            Outcome::Zero => 1.0,
            Outcome::One => -1.0,
        }
    }
}

/// A measurement direction in the x-y plane, identified by its azimuth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementDirection {
    azimuth: f64,
}

impl MeasurementDirection {
    /// Wraps the angle into `[0, 2π)`.
    pub fn new(azimuth: f64) -> Self {
        let tau = std::f64::consts::TAU;
        let mut a = azimuth.rem_euclid(tau);
        if a >= tau {
            a = 0.0;
        }
        MeasurementDirection { azimuth: a }
    }

    pub fn azimuth(self) -> f64 {
        self.azimuth
    }
}

/// A two-qubit state as four amplitudes over the basis (↑↑, ↑↓, ↓↑, ↓↓).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: [Complex64; 4],
}

impl StateVector {
    /// Builds a state, rejecting amplitudes whose squared magnitudes do not
    /// sum to 1 within `PROB_TOL`.
    pub fn new(amps: [Complex64; 4]) -> Result<Self> {
        let s = Self { amps };
        let norm = s.norm_sq();
        if (norm - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidState { norm });
        }
        Ok(s)
    }

    /// Builds a state without checking normalization. Operations that consume
    /// the state re-validate, so a bad vector surfaces as `InvalidState` there.
    pub fn new_unchecked(amps: [Complex64; 4]) -> Self {
        Self { amps }
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check(&self) -> Result<()> {
        let norm = self.norm_sq();
        if (norm - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidState { norm });
        }
        Ok(())
    }
}

/// The prepared state for a label: I1 = (|↑↓⟩+|↓↑⟩)/√2, I2 = (|↑↓⟩−|↓↑⟩)/√2.
pub fn make_state(label: InitialLabel) -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    let p = Complex64::new(h, 0.0);
    let m = Complex64::new(-h, 0.0);
    match label {
        InitialLabel::I1 => StateVector::new_unchecked([z, p, p, z]),
        InitialLabel::I2 => StateVector::new_unchecked([z, p, m, z]),
    }
}

/// 2×2 complex operator, row-major.
pub type Operator2 = [[Complex64; 2]; 2];

/// Projector onto the `outcome` eigenspace of the in-plane direction operator
/// cos(α)σx + sin(α)σy: ½(𝟙 ± (cos α σx + sin α σy)).
pub fn measurement_projector(direction: MeasurementDirection, outcome: Outcome) -> Operator2 {
    let alpha = direction.azimuth();
    let s = outcome.sign();
    // Off-diagonal of the direction operator is e^{∓iα}.
    let half = Complex64::new(0.5, 0.0);
    let off = Complex64::from_polar(0.5 * s, -alpha);
    let off_conj = Complex64::from_polar(0.5 * s, alpha);
    [[half, off], [off_conj, half]]
}

/// ⟨ψ| P_A ⊗ P_B |ψ⟩ for projective outcomes on the two sides.
pub fn joint_outcome_probability(
    state: &StateVector,
    alice: MeasurementDirection,
    bob: MeasurementDirection,
    outcome_a: Outcome,
    outcome_b: Outcome,
) -> Result<f64> {
    state.check()?;
    let pa = measurement_projector(alice, outcome_a);
    let pb = measurement_projector(bob, outcome_b);

    // (P_A ⊗ P_B)|ψ⟩ with basis index 2i+j for (qubit A = i, qubit B = j).
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, row_a) in pa[i].iter().enumerate() {
                for (l, row_b) in pb[j].iter().enumerate() {
                    acc += row_a * row_b * state.amps[2 * k + l];
                }
            }
            out[2 * i + j] = acc;
        }
    }
    let val: Complex64 = state
        .amps
        .iter()
        .zip(out.iter())
        .map(|(a, o)| a.conj() * o)
        .sum();
    Ok(val.re.clamp(0.0, 1.0))
}

/// E = P(A=B) − P(A≠B) at the given pair of directions.
///
/// For the bundled states this equals cos(αA−αB) (I1) and −cos(αA−αB) (I2);
/// the tests pin that agreement against the projector route above.
pub fn correlation_e(
    state: &StateVector,
    alice: MeasurementDirection,
    bob: MeasurementDirection,
) -> Result<f64> {
    let mut e = 0.0;
    for a in Outcome::ALL {
        for b in Outcome::ALL {
            let p = joint_outcome_probability(state, alice, bob, a, b)?;
            if a == b {
                e += p;
            } else {
                e -= p;
            }
        }
    }
    Ok(e)
}
