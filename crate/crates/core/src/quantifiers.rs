//! Geometric correlation quantifiers `T_g`, `D_g`, `C_g` and the closure
//! defect `L_g`.
//!
//! With `π_ρ` the closest product state of `ρ`, `χ_ρ` its closest classical
//! state and `π_χ` the closest product state of `χ_ρ`:
//!
//! ```text
//! T_g = ‖ρ − π_ρ‖²   D_g = ‖ρ − χ_ρ‖²   C_g = ‖χ_ρ − π_χ‖²   L_g = ‖π_ρ − π_χ‖²
//! ```

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;
use serde::Serialize;

use crate::closest::{
    closest_classical_for_case, closest_product_x_with, k_eigenvalues_x, k_matrix_general,
    reduced_distance, CaseId, CaseLabel, ProductPair,
};
use crate::error::{Error, Result};
use crate::format::fmt17;
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::poly::{CompanionMatrix, RealRootFinder};
use crate::registry::Strategy;
use crate::state::{
    identity2, kron, matrix_to_x_params, pauli, BlochForm, DensityMatrix4, Matrix4c, XStateParams,
    C64,
};
use crate::tolerance::Tolerances;

/// Quantifiers of one state together with the states realizing them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub t_g: f64,
    pub d_g: f64,
    pub c_g: f64,
    pub l_g: f64,
    pub case: CaseLabel,
    /// `T_g − D_g − C_g`
    pub residual_closure: f64,
    /// `T_g + L_g − D_g − C_g`
    pub residual_with_l: f64,
    /// Closest product state of ρ.
    pub product_pair: ProductPair,
    /// Closest classical state χ.
    pub classical_state: XStateParams,
    /// Closest product state of χ.
    pub classical_product_pair: ProductPair,
    /// `|k1 − k3|` within tolerance: both classical states are equally close.
    pub boundary_flag: bool,
    /// Some quantifier was a tiny negative number rounded to zero.
    pub clamped: bool,
}

impl CorrelationReport {
    pub const CSV_HEADER: &'static str = "case,k1,k2,k3,tg,dg,cg,lg,res,res_l,a3,b3,boundary";

    pub fn csv_row(&self) -> String {
        let nums = [
            self.case.k1,
            self.case.k2,
            self.case.k3,
            self.t_g,
            self.d_g,
            self.c_g,
            self.l_g,
            self.residual_closure,
            self.residual_with_l,
            self.product_pair.a[2],
            self.product_pair.b[2],
        ];
        let mut row = self.case.case_id.number().to_string();
        for v in nums {
            row.push(',');
            row.push_str(&fmt17(v));
        }
        row.push(',');
        row.push_str(if self.boundary_flag { "1" } else { "0" });
        row
    }

    /// `(T_g − D_g − C_g)/T_g`, `None` when `T_g` vanishes.
    pub fn relative_residual(&self) -> Option<f64> {
        (self.t_g > 1e-12).then(|| self.residual_closure / self.t_g)
    }

    /// `(T_g + L_g − D_g − C_g)/T_g`, `None` when `T_g` vanishes.
    pub fn relative_residual_with_l(&self) -> Option<f64> {
        (self.t_g > 1e-12).then(|| self.residual_with_l / self.t_g)
    }
}

fn clamp_nonneg(v: f64, tol: &Tolerances, flag: &mut bool) -> f64 {
    if v < 0.0 && v >= -tol.clamp {
        *flag = true;
        0.0
    } else {
        v
    }
}

/// `D_g = ¼(‖x‖² + ‖T‖² − k_max)` for an arbitrary two-qubit Bloch form.
pub fn geometric_discord_general(b: &BlochForm) -> f64 {
    let (_, ev) = k_matrix_general(b);
    let v = 0.25 * (b.x.norm_squared() + b.t.norm_squared() - ev[0]);
    v.max(0.0)
}

pub fn quantifiers_x(p: &XStateParams) -> Result<CorrelationReport> {
    quantifiers_x_with(p, &CompanionMatrix, &Tolerances::default())
}

pub fn quantifiers_x_with(
    p: &XStateParams,
    finder: &dyn RealRootFinder,
    tol: &Tolerances,
) -> Result<CorrelationReport> {
    let case = k_eigenvalues_x(p);
    let pair = closest_product_x_with(p, finder, tol)?;
    let (a3, b3) = (pair.a[2], pair.b[2]);
    let b = p.bloch();
    let (x3, y3, t33) = (b.x[2], b.y[2], b.t[(2, 2)]);

    let transverse = 0.25
        * (b.t[(0, 0)].powi(2) + b.t[(0, 1)].powi(2) + b.t[(1, 0)].powi(2) + b.t[(1, 1)].powi(2));
    let longitudinal = reduced_distance(x3, y3, t33, a3, b3);
    let t_g = longitudinal + transverse;

    let (d_g, c_g, l_g, classical_pair) = match case.case_id {
        CaseId::Case1 => {
            let d = 2.0 * (p.rho14.powi(2) + p.rho23.powi(2));
            (d, longitudinal, 0.0, pair)
        }
        CaseId::Case2 => {
            let d = (p.rho14 - p.rho23).powi(2)
                + 0.5 * ((p.rho11 - p.rho33).powi(2) + (p.rho22 - p.rho44).powi(2));
            let c = (p.rho14 + p.rho23).powi(2);
            let l = a3 * a3 * ((t33 - a3 * b3).powi(2) + (1.0 + b3 * b3)) / 4.0;
            (d, c, l, ProductPair::along_z(0.0, y3))
        }
    };

    let mut clamped = false;
    let t_g = clamp_nonneg(t_g, tol, &mut clamped);
    let d_g = clamp_nonneg(d_g, tol, &mut clamped);
    let c_g = clamp_nonneg(c_g, tol, &mut clamped);
    let l_g = clamp_nonneg(l_g, tol, &mut clamped);

    Ok(CorrelationReport {
        t_g,
        d_g,
        c_g,
        l_g,
        case,
        residual_closure: t_g - d_g - c_g,
        residual_with_l: t_g + l_g - d_g - c_g,
        product_pair: pair,
        classical_state: closest_classical_for_case(p, case.case_id),
        classical_product_pair: classical_pair,
        boundary_flag: case.on_boundary(tol),
        clamped,
    })
}

/// `Π(ρ) = Σ± (P± ⊗ I) ρ (P± ⊗ I)` for the projective measurement along `n` on A.
pub fn measure_on_a(rho: &Matrix4c, n: &Vector3<f64>) -> Matrix4c {
    let id = identity2();
    let n_sigma =
        pauli(0) * C64::from(n[0]) + pauli(1) * C64::from(n[1]) + pauli(2) * C64::from(n[2]);
    let half = C64::from(0.5);
    let plus = kron(&((id + n_sigma) * half), &id);
    let minus = kron(&((id - n_sigma) * half), &id);
    plus * rho * plus + minus * rho * minus
}

fn direction(theta: f64, phi: f64) -> Vector3<f64> {
    Vector3::new(
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    )
}

fn measurement_distance(rho: &Matrix4c, theta: f64, phi: f64) -> f64 {
    (rho - measure_on_a(rho, &direction(theta, phi)))
        .iter()
        .map(|z| z.norm_sqr())
        .sum()
}

/// `min_n ‖ρ − Π_n(ρ)‖²` over projective measurements on A, by a
/// `grid_density × grid_density` search over `(θ, φ)` and simplex polish of
/// the best grid cells.
pub fn discord_measurement_oracle(rho: &DensityMatrix4, grid_density: usize) -> f64 {
    let n = grid_density.max(64);
    let m = rho.matrix();
    let mut cells: Vec<(f64, f64, f64)> = Vec::with_capacity(n * n);
    for i in 0..n {
        let theta = PI * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let phi = TAU * j as f64 / n as f64;
            cells.push((measurement_distance(m, theta, phi), theta, phi));
        }
    }
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    let opts = NelderMeadOptions {
        max_iter: 2_000,
        f_tol: 1e-17,
        x_tol: 1e-10,
        initial_step: PI / n as f64,
    };
    let mut best = cells[0].0;
    for &(_, theta, phi) in cells.iter().take(4) {
        let r = nelder_mead(
            |v| measurement_distance(m, v[0], v[1]),
            &[theta, phi],
            None,
            &opts,
        );
        best = best.min(r.value);
    }
    best
}

/// Closed forms for Bell-diagonal states `¼[I⊗I + Σ T_ii σ_i⊗σ_i]`.
pub fn bell_diagonal_quantifiers(t11: f64, t22: f64, t33: f64) -> Result<CorrelationReport> {
    let tol = Tolerances::default();
    let mut t = nalgebra::Matrix3::zeros();
    t[(0, 0)] = t11;
    t[(1, 1)] = t22;
    t[(2, 2)] = t33;
    let rho = BlochForm::new(Vector3::zeros(), Vector3::zeros(), t).to_density();
    if [t11, t22, t33].iter().any(|v| !v.is_finite()) || rho.validate(&tol).is_err() {
        return Err(Error::Unphysical(format!(
            "(T11, T22, T33) = ({t11}, {t22}, {t33}) is not a Bell-diagonal state"
        )));
    }

    let sq = [t11 * t11, t22 * t22, t33 * t33];
    let sum: f64 = sq.iter().sum();
    let t_max_sq = sq[0].max(sq[1]).max(sq[2]);
    let case = CaseLabel::from_eigenvalues(sq[0].max(sq[1]), sq[0].min(sq[1]), sq[2]);

    let t_g = sum / 4.0;
    let d_g = (sum - t_max_sq) / 4.0;
    let c_g = t_max_sq / 4.0;

    // χ keeps the dominant correlation; ties go to T33 (case 1), then T11
    let mut chi_t = nalgebra::Matrix3::zeros();
    let k = match case.case_id {
        CaseId::Case1 => 2,
        CaseId::Case2 if sq[0] >= sq[1] => 0,
        CaseId::Case2 => 1,
    };
    chi_t[(k, k)] = t[(k, k)];
    let chi = BlochForm::new(Vector3::zeros(), Vector3::zeros(), chi_t);

    Ok(CorrelationReport {
        t_g,
        d_g,
        c_g,
        l_g: 0.0,
        case,
        residual_closure: t_g - d_g - c_g,
        residual_with_l: t_g - d_g - c_g,
        product_pair: ProductPair::zero(),
        classical_state: XStateParams::from_x_bloch(&chi),
        classical_product_pair: ProductPair::zero(),
        boundary_flag: case.on_boundary(&tol),
        clamped: false,
    })
}

/// Strategy evaluating the geometric discord of a two-qubit state.
pub trait DiscordEvaluator: Strategy {
    fn discord(&self, rho: &DensityMatrix4) -> Result<f64>;
}

/// Largest eigenvalue of `K = x xᵀ + T Tᵀ`.
#[derive(Debug, Clone, Copy, Default)]
pub struct KMatrixDiscord;

impl Strategy for KMatrixDiscord {
    fn name(&self) -> &'static str {
        "k-matrix"
    }
}

impl DiscordEvaluator for KMatrixDiscord {
    fn discord(&self, rho: &DensityMatrix4) -> Result<f64> {
        rho.validate(&Tolerances::default())?;
        Ok(geometric_discord_general(&rho.to_bloch()))
    }
}

/// Case-wise closed forms in the X-state matrix elements.
#[derive(Debug, Clone, Copy, Default)]
pub struct XClosedFormDiscord;

impl Strategy for XClosedFormDiscord {
    fn name(&self) -> &'static str {
        "x-closed-form"
    }
}

impl DiscordEvaluator for XClosedFormDiscord {
    fn discord(&self, rho: &DensityMatrix4) -> Result<f64> {
        let p = matrix_to_x_params(rho)?;
        Ok(match k_eigenvalues_x(&p).case_id {
            CaseId::Case1 => 2.0 * (p.rho14.powi(2) + p.rho23.powi(2)),
            CaseId::Case2 => {
                (p.rho14 - p.rho23).powi(2)
                    + 0.5 * ((p.rho11 - p.rho33).powi(2) + (p.rho22 - p.rho44).powi(2))
            }
        })
    }
}

/// Direct minimization over projective measurements on A.
#[derive(Debug, Clone, Copy)]
pub struct MeasurementDiscord {
    pub grid_density: usize,
}

impl Default for MeasurementDiscord {
    fn default() -> Self {
        Self { grid_density: 64 }
    }
}

impl Strategy for MeasurementDiscord {
    fn name(&self) -> &'static str {
        "measurement"
    }
}

impl DiscordEvaluator for MeasurementDiscord {
    fn discord(&self, rho: &DensityMatrix4) -> Result<f64> {
        rho.validate(&Tolerances::default())?;
        Ok(discord_measurement_oracle(rho, self.grid_density))
    }
}
