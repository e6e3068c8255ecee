//! Two-qubit state encodings: dense matrices, X-state parameters and the
//! Bloch form, with conversions and validation.
//!
//! All matrices use the ordered basis `{|11⟩, |10⟩, |01⟩, |00⟩}`.

use std::f64::consts::TAU;

use nalgebra::{Complex, Matrix2, Matrix3, Matrix4, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

pub type C64 = Complex<f64>;
pub type Matrix4c = Matrix4<C64>;
pub type Matrix2c = Matrix2<C64>;

/// Positions (row, column) of the eight entries that vanish in an X state.
pub const NON_X_ENTRIES: [(usize, usize); 8] = [
    (0, 1),
    (0, 2),
    (1, 0),
    (2, 0),
    (1, 3),
    (2, 3),
    (3, 1),
    (3, 2),
];

fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Pauli matrix `σ_k` for `k = 0..3` (`0` is `σ1`, `2` is `σ3`).
pub fn pauli(k: usize) -> Matrix2c {
    let zero = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    match k {
        0 => Matrix2::new(zero, one, one, zero),
        1 => Matrix2::new(zero, c(0.0, -1.0), c(0.0, 1.0), zero),
        2 => Matrix2::new(one, zero, zero, -one),
        _ => panic!("pauli index {k} out of range"),
    }
}

pub fn kron(a: &Matrix2c, b: &Matrix2c) -> Matrix4c {
    Matrix4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

pub(crate) fn identity2() -> Matrix2c {
    Matrix2::identity()
}

/// Normalize a phase to `[0, 2π)`.
pub fn normalize_phase(phase: f64) -> f64 {
    let p = phase.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if p >= TAU {
        0.0
    } else {
        p
    }
}

/// A 4×4 complex matrix intended to be a two-qubit density matrix.
///
/// Construction through [`DensityMatrix4::new`] validates the matrix;
/// [`DensityMatrix4::from_matrix`] does not (positivity of composed
/// matrices is reported by [`DensityMatrix4::validate`], not enforced).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix4 {
    entries: Matrix4c,
}

impl DensityMatrix4 {
    pub fn new(entries: Matrix4c) -> Result<Self> {
        Self::new_with(entries, &Tolerances::default())
    }

    pub fn new_with(entries: Matrix4c, tol: &Tolerances) -> Result<Self> {
        let rho = Self { entries };
        rho.validate(tol)?;
        Ok(rho)
    }

    pub fn from_matrix(entries: Matrix4c) -> Self {
        Self { entries }
    }

    /// Builds a matrix from separate real and imaginary parts.
    pub fn from_parts(re: &[[f64; 4]; 4], im: &[[f64; 4]; 4]) -> Self {
        Self::from_matrix(Matrix4::from_fn(|i, j| c(re[i][j], im[i][j])))
    }

    pub fn matrix(&self) -> &Matrix4c {
        &self.entries
    }

    pub fn maximally_mixed() -> Self {
        Self::from_matrix(Matrix4::identity() * c(0.25, 0.0))
    }

    /// Projector onto the pure state with the given amplitudes.
    pub fn pure(amplitudes: [C64; 4]) -> Self {
        Self::from_matrix(Matrix4::from_fn(|i, j| {
            amplitudes[i] * amplitudes[j].conj()
        }))
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let h = (self.entries + self.entries.adjoint()) * c(0.5, 0.0);
        let ev = h.symmetric_eigenvalues();
        let mut out = [ev[0], ev[1], ev[2], ev[3]];
        out.sort_by(|a, b| a.total_cmp(b));
        out
    }

    /// `Tr ρ²` (for Hermitian input).
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Squared Hilbert–Schmidt distance `Tr (ρ − σ)²`.
    pub fn distance_sq(&self, other: &DensityMatrix4) -> f64 {
        (self.entries - other.entries)
            .iter()
            .map(|z| z.norm_sqr())
            .sum()
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let m = &self.entries;
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        for i in 0..4 {
            for j in i..4 {
                let dev = (m[(i, j)] - m[(j, i)].conj()).norm();
                if dev > tol.hermitian {
                    return Err(Error::InvalidState(format!(
                        "not Hermitian at ({},{}): deviation {dev:e}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let tr = self.trace();
        if (tr - c(1.0, 0.0)).norm() > tol.trace {
            return Err(Error::InvalidState(format!(
                "trace {} + {}i is not 1",
                tr.re, tr.im
            )));
        }
        let min_ev = self.eigenvalues()[0];
        if min_ev < tol.eigenvalue {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_ev:e}"
            )));
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate(&Tolerances::default()).is_ok()
    }

    /// Bloch components by tracing against Pauli products. No validation.
    pub fn to_bloch(&self) -> BlochForm {
        let id = identity2();
        let tr = |op: &Matrix4c| (self.entries * op).trace().re;
        let mut x = Vector3::zeros();
        let mut y = Vector3::zeros();
        let mut t = Matrix3::zeros();
        for i in 0..3 {
            x[i] = tr(&kron(&pauli(i), &id));
            y[i] = tr(&kron(&id, &pauli(i)));
            for j in 0..3 {
                t[(i, j)] = tr(&kron(&pauli(i), &pauli(j)));
            }
        }
        BlochForm { x, y, t }
    }
}

/// Bloch representation `ρ = ¼[I⊗I + Σ x_i σ_i⊗I + Σ y_i I⊗σ_i + Σ T_ij σ_i⊗σ_j]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochForm {
    pub x: Vector3<f64>,
    pub y: Vector3<f64>,
    pub t: Matrix3<f64>,
}

impl BlochForm {
    pub fn zero() -> Self {
        Self {
            x: Vector3::zeros(),
            y: Vector3::zeros(),
            t: Matrix3::zeros(),
        }
    }

    pub fn new(x: Vector3<f64>, y: Vector3<f64>, t: Matrix3<f64>) -> Self {
        Self { x, y, t }
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let bound = 1.0 + tol.bloch_norm;
        if self.x.norm() > bound || self.y.norm() > bound {
            return Err(Error::InvalidState(
                "local Bloch vector longer than 1".into(),
            ));
        }
        if self.t.iter().any(|v| v.abs() > bound) {
            return Err(Error::InvalidState(
                "correlation tensor entry exceeds 1".into(),
            ));
        }
        Ok(())
    }

    /// Matrix of the Bloch expansion. Positivity is not checked.
    pub fn to_density(&self) -> DensityMatrix4 {
        let id = identity2();
        let mut m = kron(&id, &id);
        for i in 0..3 {
            m += kron(&pauli(i), &id) * c(self.x[i], 0.0);
            m += kron(&id, &pauli(i)) * c(self.y[i], 0.0);
            for j in 0..3 {
                if self.t[(i, j)] != 0.0 {
                    m += kron(&pauli(i), &pauli(j)) * c(self.t[(i, j)], 0.0);
                }
            }
        }
        DensityMatrix4::from_matrix(m * c(0.25, 0.0))
    }

    pub fn max_abs_diff(&self, other: &BlochForm) -> f64 {
        let dx = (self.x - other.x).amax();
        let dy = (self.y - other.y).amax();
        let dt = (self.t - other.t).amax();
        dx.max(dy).max(dt)
    }
}

/// Validates `rho` and returns its Bloch form.
pub fn bloch_decompose(rho: &DensityMatrix4) -> Result<BlochForm> {
    rho.validate(&Tolerances::default())?;
    Ok(rho.to_bloch())
}

pub fn bloch_compose(b: &BlochForm) -> DensityMatrix4 {
    b.to_density()
}

/// The eight real parameters of an X state.
///
/// `rho14` and `rho23` are the magnitudes of the anti-diagonal coherences
/// `ρ14 e^{iγ14}` and `ρ23 e^{iγ23}`; phases live in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XStateParams {
    pub rho11: f64,
    pub rho22: f64,
    pub rho33: f64,
    pub rho44: f64,
    pub rho14: f64,
    pub rho23: f64,
    #[serde(default)]
    pub gamma14: f64,
    #[serde(default)]
    pub gamma23: f64,
}

impl XStateParams {
    /// Validated constructor with zero phases.
    pub fn real(diag: [f64; 4], rho14: f64, rho23: f64) -> Result<Self> {
        Self::new(diag, rho14, rho23, 0.0, 0.0)
    }

    pub fn new(diag: [f64; 4], rho14: f64, rho23: f64, gamma14: f64, gamma23: f64) -> Result<Self> {
        let p = Self {
            rho11: diag[0],
            rho22: diag[1],
            rho33: diag[2],
            rho44: diag[3],
            rho14,
            rho23,
            gamma14: normalize_phase(gamma14),
            gamma23: normalize_phase(gamma23),
        };
        p.validate(&Tolerances::default())?;
        Ok(p)
    }

    pub fn maximally_mixed() -> Self {
        Self {
            rho11: 0.25,
            rho22: 0.25,
            rho33: 0.25,
            rho44: 0.25,
            rho14: 0.0,
            rho23: 0.0,
            gamma14: 0.0,
            gamma23: 0.0,
        }
    }

    pub fn diagonal(&self) -> [f64; 4] {
        [self.rho11, self.rho22, self.rho33, self.rho44]
    }

    fn values(&self) -> [f64; 8] {
        [
            self.rho11,
            self.rho22,
            self.rho33,
            self.rho44,
            self.rho14,
            self.rho23,
            self.gamma14,
            self.gamma23,
        ]
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        if self.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        let d = self.diagonal();
        // populations may undershoot zero by rounding, within the trace tolerance
        if let Some(k) = d.iter().position(|&v| v < -tol.trace) {
            return Err(Error::InvalidParams(format!(
                "negative population rho{0}{0} = {1}",
                k + 1,
                d[k]
            )));
        }
        let sum: f64 = d.iter().sum();
        if (sum - 1.0).abs() > tol.trace {
            return Err(Error::InvalidParams(format!("populations sum to {sum}")));
        }
        if self.rho14 < 0.0 || self.rho23 < 0.0 {
            return Err(Error::InvalidParams(
                "coherence magnitudes must be >= 0".into(),
            ));
        }
        if !(0.0..TAU).contains(&self.gamma14) || !(0.0..TAU).contains(&self.gamma23) {
            return Err(Error::InvalidParams("phases must lie in [0, 2π)".into()));
        }
        // outer block {|11⟩,|00⟩} and inner block {|10⟩,|01⟩}
        if self.rho14 * self.rho14 > self.rho11 * self.rho44 + tol.x_block {
            return Err(Error::InvalidParams(format!(
                "rho14² = {} exceeds rho11·rho44 = {}",
                self.rho14 * self.rho14,
                self.rho11 * self.rho44
            )));
        }
        if self.rho23 * self.rho23 > self.rho22 * self.rho33 + tol.x_block {
            return Err(Error::InvalidParams(format!(
                "rho23² = {} exceeds rho22·rho33 = {}",
                self.rho23 * self.rho23,
                self.rho22 * self.rho33
            )));
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate(&Tolerances::default()).is_ok()
    }

    pub fn coherence14(&self) -> C64 {
        C64::from_polar(self.rho14, self.gamma14)
    }

    pub fn coherence23(&self) -> C64 {
        C64::from_polar(self.rho23, self.gamma23)
    }

    pub fn to_density(&self) -> DensityMatrix4 {
        let mut m = Matrix4c::zeros();
        m[(0, 0)] = c(self.rho11, 0.0);
        m[(1, 1)] = c(self.rho22, 0.0);
        m[(2, 2)] = c(self.rho33, 0.0);
        m[(3, 3)] = c(self.rho44, 0.0);
        m[(0, 3)] = self.coherence14();
        m[(3, 0)] = self.coherence14().conj();
        m[(1, 2)] = self.coherence23();
        m[(2, 1)] = self.coherence23().conj();
        DensityMatrix4::from_matrix(m)
    }

    /// Bloch components in closed form. No validation.
    pub fn bloch(&self) -> BlochForm {
        let (s14, c14) = self.gamma14.sin_cos();
        let (s23, c23) = self.gamma23.sin_cos();
        let (r14, r23) = (self.rho14, self.rho23);
        let mut x = Vector3::zeros();
        let mut y = Vector3::zeros();
        let mut t = Matrix3::zeros();
        x[2] = self.rho11 + self.rho22 - self.rho33 - self.rho44;
        y[2] = self.rho11 - self.rho22 + self.rho33 - self.rho44;
        t[(0, 0)] = 2.0 * c14 * r14 + 2.0 * c23 * r23;
        t[(0, 1)] = -2.0 * s14 * r14 + 2.0 * s23 * r23;
        t[(1, 0)] = -2.0 * s14 * r14 - 2.0 * s23 * r23;
        t[(1, 1)] = -2.0 * c14 * r14 + 2.0 * c23 * r23;
        t[(2, 2)] = self.rho11 - self.rho22 - self.rho33 + self.rho44;
        BlochForm { x, y, t }
    }

    /// Inverse of [`XStateParams::bloch`] for a Bloch form with X structure.
    /// Components outside the X pattern are ignored; no validation.
    pub fn from_x_bloch(b: &BlochForm) -> Self {
        let (x3, y3, t) = (b.x[2], b.y[2], &b.t);
        let t33 = t[(2, 2)];
        let c14 = c(t[(0, 0)] - t[(1, 1)], -(t[(0, 1)] + t[(1, 0)])) * 0.25;
        let c23 = c(t[(0, 0)] + t[(1, 1)], t[(0, 1)] - t[(1, 0)]) * 0.25;
        let phase = |z: C64| {
            if z.norm() == 0.0 {
                0.0
            } else {
                normalize_phase(z.arg())
            }
        };
        Self {
            rho11: 0.25 * (1.0 + x3 + y3 + t33),
            rho22: 0.25 * (1.0 + x3 - y3 - t33),
            rho33: 0.25 * (1.0 - x3 + y3 - t33),
            rho44: 0.25 * (1.0 - x3 - y3 + t33),
            rho14: c14.norm(),
            rho23: c23.norm(),
            gamma14: phase(c14),
            gamma23: phase(c23),
        }
    }

    pub fn x3(&self) -> f64 {
        self.rho11 + self.rho22 - self.rho33 - self.rho44
    }

    pub fn y3(&self) -> f64 {
        self.rho11 - self.rho22 + self.rho33 - self.rho44
    }

    pub fn t33(&self) -> f64 {
        self.rho11 - self.rho22 - self.rho33 + self.rho44
    }
}

/// Validates `p` and returns its Bloch form (`x1 = x2 = y1 = y2 = 0`,
/// `T13 = T23 = T31 = T32 = 0`).
pub fn x_params_to_bloch(p: &XStateParams) -> Result<BlochForm> {
    p.validate(&Tolerances::default())?;
    Ok(p.bloch())
}

/// Recognizes an X state and extracts its parameters.
pub fn matrix_to_x_params(rho: &DensityMatrix4) -> Result<XStateParams> {
    matrix_to_x_params_with(rho, &Tolerances::default())
}

pub fn matrix_to_x_params_with(rho: &DensityMatrix4, tol: &Tolerances) -> Result<XStateParams> {
    rho.validate(tol)?;
    let m = rho.matrix();
    let offending: Vec<_> = NON_X_ENTRIES
        .iter()
        .copied()
        .filter(|&(i, j)| m[(i, j)].norm() > tol.x_pattern)
        .collect();
    if !offending.is_empty() {
        return Err(Error::NotXState { entries: offending });
    }
    let phase = |z: C64| {
        if z.norm() == 0.0 {
            0.0
        } else {
            normalize_phase(z.arg())
        }
    };
    let p = XStateParams {
        rho11: m[(0, 0)].re,
        rho22: m[(1, 1)].re,
        rho33: m[(2, 2)].re,
        rho44: m[(3, 3)].re,
        rho14: m[(0, 3)].norm(),
        rho23: m[(1, 2)].norm(),
        gamma14: phase(m[(0, 3)]),
        gamma23: phase(m[(1, 2)]),
    };
    // validation of the 4×4 matrix already covers the X blocks; populations
    // carry the trace tolerance of the dense check
    let tol_params = Tolerances {
        trace: tol.trace.max(4.0 * f64::EPSILON),
        ..*tol
    };
    p.validate(&tol_params)?;
    Ok(p)
}

/// On-disk state description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StateFile {
    X(XStateParams),
    Dense {
        re: [[f64; 4]; 4],
        im: [[f64; 4]; 4],
    },
}

/// A parsed and validated state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateInput {
    X(XStateParams),
    Dense(DensityMatrix4),
}

impl StateFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    fn check_finite(&self) -> Result<()> {
        let finite = match self {
            StateFile::X(p) => p.values().iter().all(|v| v.is_finite()),
            StateFile::Dense { re, im } => re
                .iter()
                .chain(im.iter())
                .flat_map(|row| row.iter())
                .all(|v| v.is_finite()),
        };
        if finite {
            Ok(())
        } else {
            Err(Error::Parse("non-finite number".into()))
        }
    }

    /// Validates the described state. X-state phases are normalized first.
    pub fn into_input(self) -> Result<StateInput> {
        self.check_finite()?;
        match self {
            StateFile::X(mut p) => {
                p.gamma14 = normalize_phase(p.gamma14);
                p.gamma23 = normalize_phase(p.gamma23);
                p.validate(&Tolerances::default())?;
                Ok(StateInput::X(p))
            }
            StateFile::Dense { re, im } => {
                let rho = DensityMatrix4::from_parts(&re, &im);
                rho.validate(&Tolerances::default())?;
                Ok(StateInput::Dense(rho))
            }
        }
    }
}

pub fn parse_state(text: &str) -> Result<StateInput> {
    StateFile::parse(text)?.into_input()
}
