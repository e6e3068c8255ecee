//! Closest product and closest classical states in the square norm.
//!
//! For an X state the closest product state is `π = ρ_A ⊗ ρ_B` with both
//! Bloch vectors along the 3-axis; their lengths `(ā3, b̄3)` solve
//!
//! ```text
//! a3 = (x3 + T33 b3) / (1 + b3²),    b3 = (y3 + T33 a3) / (1 + a3²).
//! ```
//!
//! Eliminating `b3` gives a monic quintic in `a3`; every stationary point of
//! the reduced distance is one of its real roots, so the global minimizer is
//! found by enumerating them. [`MultiStartSimplex`] minimizes the full
//! six-parameter distance numerically and serves as an independent check.

use nalgebra::{Matrix3, SMatrix, SVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::optimize::{nelder_mead, Bounds, NelderMeadOptions};
use crate::poly::{CompanionMatrix, Polynomial, RealRootFinder};
use crate::registry::Strategy;
use crate::state::{matrix_to_x_params, BlochForm, DensityMatrix4, XStateParams};
use crate::tolerance::Tolerances;

/// Bracket for the real roots of the `a3` quintic.
pub const ROOT_WINDOW: (f64, f64) = (-1.25, 1.25);

/// Bloch vectors `(a, b)` of a product state `ρ_A ⊗ ρ_B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductPair {
    pub a: [f64; 3],
    pub b: [f64; 3],
}

impl ProductPair {
    pub fn new(a: [f64; 3], b: [f64; 3]) -> Self {
        Self { a, b }
    }

    pub fn along_z(a3: f64, b3: f64) -> Self {
        Self::new([0.0, 0.0, a3], [0.0, 0.0, b3])
    }

    pub fn zero() -> Self {
        Self::along_z(0.0, 0.0)
    }

    pub fn bloch(&self) -> BlochForm {
        let a = Vector3::from(self.a);
        let b = Vector3::from(self.b);
        BlochForm::new(a, b, a * b.transpose())
    }

    pub fn to_density(&self) -> DensityMatrix4 {
        self.bloch().to_density()
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let n = |v: &[f64; 3]| Vector3::from(*v).norm();
        if n(&self.a) > 1.0 + tol.bloch_norm || n(&self.b) > 1.0 + tol.bloch_norm {
            return Err(Error::InvalidState(
                "product Bloch vector longer than 1".into(),
            ));
        }
        Ok(())
    }

    fn to_array(self) -> [f64; 6] {
        let [a1, a2, a3] = self.a;
        let [b1, b2, b3] = self.b;
        [a1, a2, a3, b1, b2, b3]
    }

    fn from_slice(v: &[f64]) -> Self {
        Self::new([v[0], v[1], v[2]], [v[3], v[4], v[5]])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseId {
    /// `k1 ≤ k3`
    Case1,
    /// `k1 > k3`
    Case2,
}

impl CaseId {
    pub fn number(self) -> u8 {
        match self {
            CaseId::Case1 => 1,
            CaseId::Case2 => 2,
        }
    }

    pub fn other(self) -> Self {
        match self {
            CaseId::Case1 => CaseId::Case2,
            CaseId::Case2 => CaseId::Case1,
        }
    }
}

impl Serialize for CaseId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.number())
    }
}

impl std::str::FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "case1" => Ok(CaseId::Case1),
            "2" | "case2" => Ok(CaseId::Case2),
            other => Err(Error::InvalidConfig(format!("unknown case `{other}`"))),
        }
    }
}

/// Eigenvalues of `K = x xᵀ + T Tᵀ` for an X state and the resulting case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseLabel {
    pub case_id: CaseId,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl CaseLabel {
    pub fn from_eigenvalues(k1: f64, k2: f64, k3: f64) -> Self {
        let case_id = if k1 <= k3 {
            CaseId::Case1
        } else {
            CaseId::Case2
        };
        Self {
            case_id,
            k1,
            k2,
            k3,
        }
    }

    pub fn on_boundary(&self, tol: &Tolerances) -> bool {
        (self.k1 - self.k3).abs() <= tol.case_boundary
    }

    pub fn k_max(&self) -> f64 {
        self.k1.max(self.k2).max(self.k3)
    }
}

impl Serialize for CaseLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CaseLabel", 4)?;
        st.serialize_field("case", &self.case_id)?;
        st.serialize_field("k1", &self.k1)?;
        st.serialize_field("k2", &self.k2)?;
        st.serialize_field("k3", &self.k3)?;
        st.end()
    }
}

pub fn k_eigenvalues_x(p: &XStateParams) -> CaseLabel {
    let k1 = 4.0 * (p.rho14 + p.rho23).powi(2);
    let k2 = 4.0 * (p.rho14 - p.rho23).powi(2);
    let k3 = 2.0 * ((p.rho11 - p.rho33).powi(2) + (p.rho22 - p.rho44).powi(2));
    CaseLabel::from_eigenvalues(k1, k2, k3)
}

/// `K = x xᵀ + T Tᵀ` and its eigenvalues, descending.
pub fn k_matrix_general(b: &BlochForm) -> (Matrix3<f64>, [f64; 3]) {
    let k = b.x * b.x.transpose() + b.t * b.t.transpose();
    let ev = k.symmetric_eigenvalues();
    let mut sorted = [ev[0], ev[1], ev[2]];
    sorted.sort_by(|a, b| b.total_cmp(a));
    (k, sorted)
}

/// Squared Hilbert–Schmidt distance between `ρ` (given by its Bloch form)
/// and the product state `pair`.
pub fn product_distance(rho: &BlochForm, pair: &ProductPair) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        s += (rho.x[i] - pair.a[i]).powi(2);
        s += (rho.y[i] - pair.b[i]).powi(2);
        for j in 0..3 {
            s += (rho.t[(i, j)] - pair.a[i] * pair.b[j]).powi(2);
        }
    }
    0.25 * s
}

/// Largest violation of the six fixed-point equations
/// `a = (x + T b)/(1 + |b|²)`, `b = (y + Tᵀ a)/(1 + |a|²)`.
pub fn stationarity_residual(rho: &BlochForm, pair: &ProductPair) -> f64 {
    let a = Vector3::from(pair.a);
    let b = Vector3::from(pair.b);
    let ra = a - (rho.x + rho.t * b) / (1.0 + b.norm_squared());
    let rb = b - (rho.y + rho.t.transpose() * a) / (1.0 + a.norm_squared());
    ra.amax().max(rb.amax())
}

/// Reduced distance over `(a3, b3)` for X states.
pub fn reduced_distance(x3: f64, y3: f64, t33: f64, a3: f64, b3: f64) -> f64 {
    0.25 * ((x3 - a3).powi(2) + (y3 - b3).powi(2) + (t33 - a3 * b3).powi(2))
}

/// Residuals of the two `(a3, b3)` fixed-point equations.
pub fn reduced_residual(x3: f64, y3: f64, t33: f64, a3: f64, b3: f64) -> f64 {
    let ra = a3 - (x3 + t33 * b3) / (1.0 + b3 * b3);
    let rb = b3 - (y3 + t33 * a3) / (1.0 + a3 * a3);
    ra.abs().max(rb.abs())
}

/// `a[(1+a²)² + (y3+T33 a)²] − x3(1+a²)² − T33(y3+T33 a)(1+a²)`.
pub fn a3_quintic(x3: f64, y3: f64, t33: f64) -> Polynomial {
    let one_plus_sq = Polynomial::new(vec![1.0, 0.0, 1.0]);
    let lin = Polynomial::new(vec![y3, t33]);
    let a = Polynomial::new(vec![0.0, 1.0]);
    let opsq2 = one_plus_sq.mul(&one_plus_sq);
    a.mul(&opsq2.add(&lin.mul(&lin)))
        .sub(&opsq2.scale(x3))
        .sub(&lin.mul(&one_plus_sq).scale(t33))
}

/// Global minimizer `(ā3, b̄3)` of the reduced distance.
pub fn solve_a3b3(
    x3: f64,
    y3: f64,
    t33: f64,
    finder: &dyn RealRootFinder,
    tol: &Tolerances,
) -> Result<(f64, f64)> {
    if x3 == 0.0 && y3 == 0.0 && t33 == 0.0 {
        return Ok((0.0, 0.0));
    }
    let quintic = a3_quintic(x3, y3, t33);
    let roots = finder.real_roots(&quintic, ROOT_WINDOW.0, ROOT_WINDOW.1);

    let mut best: Option<(f64, f64, f64)> = None;
    for a3 in roots {
        let b3 = (y3 + t33 * a3) / (1.0 + a3 * a3);
        let f = reduced_distance(x3, y3, t33, a3, b3);
        let better = match best {
            None => true,
            Some((fb, ab, _)) => {
                if (f - fb).abs() <= 1e-15 {
                    a3.abs() < ab.abs() || (a3.abs() == ab.abs() && a3 < ab)
                } else {
                    f < fb
                }
            }
        };
        if better {
            best = Some((f, a3, b3));
        }
    }
    let (_, a3, b3) = best.ok_or_else(|| {
        Error::SolverFailure(format!(
            "{} found no real root in {:?} (x3={x3}, y3={y3}, T33={t33})",
            finder.name(),
            ROOT_WINDOW
        ))
    })?;
    let residual = reduced_residual(x3, y3, t33, a3, b3);
    if residual > tol.stationarity {
        return Err(Error::SolverFailure(format!(
            "stationarity residual {residual:e} at a3={a3}, b3={b3}"
        )));
    }
    Ok((a3, b3))
}

/// Closest product state to an X state.
pub fn closest_product_x(p: &XStateParams) -> Result<ProductPair> {
    closest_product_x_with(p, &CompanionMatrix, &Tolerances::default())
}

pub fn closest_product_x_with(
    p: &XStateParams,
    finder: &dyn RealRootFinder,
    tol: &Tolerances,
) -> Result<ProductPair> {
    p.validate(tol)?;
    let (a3, b3) = solve_a3b3(p.x3(), p.y3(), p.t33(), finder, tol)?;
    Ok(ProductPair::along_z(a3, b3))
}

/// Closest product state with its distance and fixed-point residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductSolution {
    pub pair: ProductPair,
    pub distance: f64,
    pub residual: f64,
}

impl ProductSolution {
    pub fn evaluate(rho: &BlochForm, pair: ProductPair) -> Self {
        Self {
            pair,
            distance: product_distance(rho, &pair),
            residual: stationarity_residual(rho, &pair),
        }
    }
}

/// Strategy computing the closest product state of a two-qubit state.
pub trait ClosestProductSolver: Strategy {
    fn solve(&self, rho: &DensityMatrix4) -> Result<ProductSolution>;
}

/// Analytic route: recognizes the X structure and solves the `a3` quintic.
pub struct QuinticSolver {
    pub finder: Box<dyn RealRootFinder>,
}

impl QuinticSolver {
    pub fn new(finder: Box<dyn RealRootFinder>) -> Self {
        Self { finder }
    }
}

impl Default for QuinticSolver {
    fn default() -> Self {
        Self::new(Box::new(CompanionMatrix))
    }
}

impl Strategy for QuinticSolver {
    fn name(&self) -> &'static str {
        "quintic"
    }
}

impl ClosestProductSolver for QuinticSolver {
    fn solve(&self, rho: &DensityMatrix4) -> Result<ProductSolution> {
        let p = matrix_to_x_params(rho)?;
        let pair = closest_product_x_with(&p, self.finder.as_ref(), &Tolerances::default())?;
        Ok(ProductSolution::evaluate(&rho.to_bloch(), pair))
    }
}

/// Numerical route: Nelder–Mead over `(a, b) ∈ [−1, 1]⁶` from the marginals
/// and `extra_starts` pseudorandom points, each result refined by Newton
/// steps on the gradient.
#[derive(Debug, Clone, Copy)]
pub struct MultiStartSimplex {
    pub seed: u64,
    pub extra_starts: usize,
}

impl MultiStartSimplex {
    pub const DEFAULT_SEED: u64 = 0x5eed_0fc0_ffee;

    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            extra_starts: 32,
        }
    }
}

impl Default for MultiStartSimplex {
    fn default() -> Self {
        Self::new(Self::DEFAULT_SEED)
    }
}

impl Strategy for MultiStartSimplex {
    fn name(&self) -> &'static str {
        "simplex"
    }
}

impl ClosestProductSolver for MultiStartSimplex {
    fn solve(&self, rho: &DensityMatrix4) -> Result<ProductSolution> {
        rho.validate(&Tolerances::default())?;
        multistart_minimize(
            &rho.to_bloch(),
            self.seed,
            self.extra_starts,
            &Tolerances::default(),
        )
    }
}

type Vec6 = SVector<f64, 6>;
type Mat6 = SMatrix<f64, 6, 6>;

fn gradient(rho: &BlochForm, v: &Vec6) -> Vec6 {
    let a = Vector3::new(v[0], v[1], v[2]);
    let b = Vector3::new(v[3], v[4], v[5]);
    let ga = (a * (1.0 + b.norm_squared()) - rho.x - rho.t * b) * 0.5;
    let gb = (b * (1.0 + a.norm_squared()) - rho.y - rho.t.transpose() * a) * 0.5;
    Vec6::new(ga[0], ga[1], ga[2], gb[0], gb[1], gb[2])
}

fn hessian(rho: &BlochForm, v: &Vec6) -> Mat6 {
    let a = Vector3::new(v[0], v[1], v[2]);
    let b = Vector3::new(v[3], v[4], v[5]);
    let mut h = Mat6::zeros();
    for i in 0..3 {
        h[(i, i)] = 0.5 * (1.0 + b.norm_squared());
        h[(i + 3, i + 3)] = 0.5 * (1.0 + a.norm_squared());
        for j in 0..3 {
            let cross = 0.5 * (2.0 * a[i] * b[j] - rho.t[(i, j)]);
            h[(i, j + 3)] = cross;
            h[(j + 3, i)] = cross;
        }
    }
    h
}

/// Newton refinement of a stationary point; a step is kept only when it
/// reduces the gradient norm.
fn newton_polish(rho: &BlochForm, start: &[f64]) -> Vec6 {
    let mut v = Vec6::from_column_slice(start);
    let mut g = gradient(rho, &v);
    for _ in 0..200 {
        let gn = g.norm();
        if gn <= 1e-16 {
            break;
        }
        let Some(step) = hessian(rho, &v).lu().solve(&g) else {
            break;
        };
        let next = v - step;
        let g_next = gradient(rho, &next);
        let gn_next = g_next.norm();
        if gn_next.is_nan() || gn_next >= gn {
            break;
        }
        v = next;
        g = g_next;
    }
    v
}

pub fn multistart_minimize(
    rho: &BlochForm,
    seed: u64,
    extra_starts: usize,
    tol: &Tolerances,
) -> Result<ProductSolution> {
    let bounds = Bounds::uniform(6, -1.0, 1.0);
    let opts = NelderMeadOptions {
        max_iter: 5_000,
        f_tol: 1e-15,
        x_tol: 1e-8,
        initial_step: 0.2,
    };
    let objective = |v: &[f64]| product_distance(rho, &ProductPair::from_slice(v));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts = Vec::with_capacity(extra_starts + 1);
    starts.push(
        ProductPair::new(rho.x.into(), rho.y.into())
            .to_array()
            .map(|v| v.clamp(-1.0, 1.0)),
    );
    for _ in 0..extra_starts {
        starts.push(std::array::from_fn::<f64, 6, _>(|_| {
            rng.random_range(-1.0..=1.0)
        }));
    }

    let mut best: Option<ProductSolution> = None;
    for start in &starts {
        let m = nelder_mead(objective, start, Some(&bounds), &opts);
        let polished = newton_polish(rho, &m.x);
        let candidate =
            ProductSolution::evaluate(rho, ProductPair::from_slice(polished.as_slice()));
        let coarse = ProductSolution::evaluate(rho, ProductPair::from_slice(&m.x));
        let pick = if candidate.distance <= coarse.distance + 1e-15 {
            candidate
        } else {
            coarse
        };
        if best.is_none_or(|b| pick.distance < b.distance) {
            best = Some(pick);
        }
    }
    let best = best.expect("at least one start");
    if best.residual > tol.oracle_stationarity {
        return Err(Error::ConvergenceFailure {
            best: best.pair,
            value: best.distance,
            residual: best.residual,
        });
    }
    Ok(best)
}

/// Numerical closest product state of an arbitrary two-qubit state.
pub fn closest_product_general(rho: &DensityMatrix4) -> Result<ProductPair> {
    MultiStartSimplex::default().solve(rho).map(|s| s.pair)
}

/// Bloch form of the classical state the given case prescribes for `p`.
pub fn classical_bloch_x(p: &XStateParams, case: CaseId) -> BlochForm {
    let b = p.bloch();
    match case {
        CaseId::Case1 => {
            let mut t = Matrix3::zeros();
            t[(2, 2)] = b.t[(2, 2)];
            BlochForm::new(
                Vector3::new(0.0, 0.0, b.x[2]),
                Vector3::new(0.0, 0.0, b.y[2]),
                t,
            )
        }
        CaseId::Case2 => {
            let s = p.rho14 + p.rho23;
            let (s14, c14) = p.gamma14.sin_cos();
            let (s23, c23) = p.gamma23.sin_cos();
            let mut t = Matrix3::zeros();
            t[(0, 0)] = (c23 + c14) * s;
            t[(0, 1)] = (s23 - s14) * s;
            t[(1, 0)] = -(s23 + s14) * s;
            t[(1, 1)] = (c23 - c14) * s;
            BlochForm::new(Vector3::zeros(), Vector3::new(0.0, 0.0, b.y[2]), t)
        }
    }
}

/// Closest classical state `χ` of an X state (itself an X state).
pub fn closest_classical_x(p: &XStateParams) -> XStateParams {
    let case = k_eigenvalues_x(p).case_id;
    closest_classical_for_case(p, case)
}

pub fn closest_classical_for_case(p: &XStateParams, case: CaseId) -> XStateParams {
    match case {
        // populations are shared with ρ; copy them to avoid rounding
        CaseId::Case1 => XStateParams {
            rho14: 0.0,
            rho23: 0.0,
            gamma14: 0.0,
            gamma23: 0.0,
            ..*p
        },
        CaseId::Case2 => XStateParams::from_x_bloch(&classical_bloch_x(p, CaseId::Case2)),
    }
}

/// Closest product state of the closest classical state.
pub fn closest_product_of_classical_x(p: &XStateParams) -> Result<ProductPair> {
    match k_eigenvalues_x(p).case_id {
        CaseId::Case1 => closest_product_x(p),
        CaseId::Case2 => Ok(ProductPair::along_z(0.0, p.y3())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Bracketing;
    use approx::assert_abs_diff_eq;

    fn phi_plus() -> XStateParams {
        XStateParams::real([0.5, 0.0, 0.0, 0.5], 0.5, 0.0).unwrap()
    }

    fn witness() -> XStateParams {
        XStateParams::real([0.5, 0.1, 0.1, 0.3], 0.35, 0.05).unwrap()
    }

    fn flat_case2() -> XStateParams {
        XStateParams::real([0.25; 4], 0.2, 0.2).unwrap()
    }

    /// Grid search over [−1, 1]² followed by Nelder–Mead refinement.
    fn grid_oracle(x3: f64, y3: f64, t33: f64) -> (f64, f64, f64) {
        let n = 2001;
        let step = 2.0 / (n - 1) as f64;
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i in 0..n {
            let a = -1.0 + i as f64 * step;
            for j in 0..n {
                let b = -1.0 + j as f64 * step;
                let f = reduced_distance(x3, y3, t33, a, b);
                if f < best.0 {
                    best = (f, a, b);
                }
            }
        }
        let opts = NelderMeadOptions {
            initial_step: step,
            ..NelderMeadOptions::default()
        };
        let m = nelder_mead(
            |v| reduced_distance(x3, y3, t33, v[0], v[1]),
            &[best.1, best.2],
            None,
            &opts,
        );
        (m.value, m.x[0], m.x[1])
    }

    #[test]
    fn k_eigenvalue_examples() {
        let l = k_eigenvalues_x(&phi_plus());
        assert_abs_diff_eq!(l.k1, 1.0);
        assert_abs_diff_eq!(l.k2, 1.0);
        assert_abs_diff_eq!(l.k3, 1.0);
        assert_eq!(l.case_id, CaseId::Case1);
        assert!(l.on_boundary(&Tolerances::default()));

        let l = k_eigenvalues_x(&flat_case2());
        assert_abs_diff_eq!(l.k1, 0.64, epsilon = 1e-15);
        assert_abs_diff_eq!(l.k2, 0.0);
        assert_abs_diff_eq!(l.k3, 0.0);
        assert_eq!(l.case_id, CaseId::Case2);

        let l = k_eigenvalues_x(&XStateParams::maximally_mixed());
        assert_eq!((l.k1, l.k2, l.k3), (0.0, 0.0, 0.0));
        assert_eq!(l.case_id, CaseId::Case1);
    }

    #[test]
    fn k_matrix_examples() {
        let (k, ev) = k_matrix_general(&BlochForm::zero());
        assert_eq!(k, Matrix3::zeros());
        assert_eq!(ev, [0.0; 3]);

        let (k, ev) = k_matrix_general(&phi_plus().bloch());
        assert!((k - Matrix3::identity()).amax() < 1e-15);
        for e in ev {
            assert_abs_diff_eq!(e, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn k_matrix_matches_closed_form() {
        let p = XStateParams::new([0.3, 0.2, 0.15, 0.35], 0.25, 0.12, 0.7, 2.9).unwrap();
        let (_, ev) = k_matrix_general(&p.bloch());
        let l = k_eigenvalues_x(&p);
        let mut closed = [l.k1, l.k2, l.k3];
        closed.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in ev.iter().zip(closed) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn quintic_matches_elimination() {
        let (x3, y3, t33) = (0.2, -0.3, 0.45);
        let q = a3_quintic(x3, y3, t33);
        assert_eq!(q.degree(), 5);
        for a in [-0.9, -0.1, 0.3, 0.8] {
            let b = (y3 + t33 * a) / (1.0 + a * a);
            let lhs = a * (1.0 + b * b) - (x3 + t33 * b);
            // q(a) = lhs · (1 + a²)²
            assert_abs_diff_eq!(q.eval(a), lhs * (1.0 + a * a).powi(2), epsilon = 1e-13);
        }
    }

    #[test]
    fn bell_diagonal_product_is_origin() {
        for p in [
            phi_plus(),
            flat_case2(),
            XStateParams::real([0.375, 0.125, 0.125, 0.375], 0.25, 0.0).unwrap(),
        ] {
            assert_eq!(closest_product_x(&p).unwrap(), ProductPair::zero());
        }
    }

    #[test]
    fn pure_product_is_its_own_closest() {
        let p = XStateParams::real([1.0, 0.0, 0.0, 0.0], 0.0, 0.0).unwrap();
        let pair = closest_product_x(&p).unwrap();
        assert_abs_diff_eq!(pair.a[2], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(pair.b[2], 1.0, epsilon = 1e-10);
        assert!(product_distance(&p.bloch(), &pair) < 1e-18);
    }

    #[test]
    fn witness_matches_grid_oracle() {
        let p = witness();
        let pair = closest_product_x(&p).unwrap();
        let (a3, b3) = (pair.a[2], pair.b[2]);
        assert_abs_diff_eq!(a3, b3, epsilon = 1e-12);
        let (f, ga, gb) = grid_oracle(0.2, 0.2, 0.6);
        assert_abs_diff_eq!(a3, ga, epsilon = 1e-6);
        assert_abs_diff_eq!(b3, gb, epsilon = 1e-6);
        assert!(reduced_distance(0.2, 0.2, 0.6, a3, b3) <= f + 1e-15);
        assert!(reduced_residual(0.2, 0.2, 0.6, a3, b3) <= 1e-10);
    }

    #[test]
    fn root_finders_agree() {
        for p in [
            witness(),
            phi_plus(),
            XStateParams::real([0.7, 0.05, 0.05, 0.2], 0.3, 0.0).unwrap(),
        ] {
            let tol = Tolerances::default();
            let c = closest_product_x_with(&p, &CompanionMatrix, &tol).unwrap();
            let b = closest_product_x_with(&p, &Bracketing, &tol).unwrap();
            assert_abs_diff_eq!(c.a[2], b.a[2], epsilon = 1e-9);
            assert_abs_diff_eq!(c.b[2], b.b[2], epsilon = 1e-9);
        }
    }

    #[test]
    fn general_minimizer_examples() {
        // product of two mixed qubits
        let a = Vector3::new(0.3, -0.2, 0.5);
        let b = Vector3::new(-0.1, 0.6, 0.2);
        let rho = ProductPair::new(a.into(), b.into()).to_density();
        let sol = MultiStartSimplex::default().solve(&rho).unwrap();
        assert!(sol.distance < 1e-8);
        for i in 0..3 {
            assert_abs_diff_eq!(sol.pair.a[i], a[i], epsilon = 1e-8);
            assert_abs_diff_eq!(sol.pair.b[i], b[i], epsilon = 1e-8);
        }

        let sol = MultiStartSimplex::default()
            .solve(&witness().to_density())
            .unwrap();
        let analytic = closest_product_x(&witness()).unwrap();
        for i in 0..2 {
            assert!(sol.pair.a[i].abs() < 1e-6 && sol.pair.b[i].abs() < 1e-6);
        }
        assert_abs_diff_eq!(sol.pair.a[2], analytic.a[2], epsilon = 1e-6);
        assert_abs_diff_eq!(sol.pair.b[2], analytic.b[2], epsilon = 1e-6);
    }

    #[test]
    fn general_minimizer_bell_state() {
        // F is quartic along the flat directions, so only the value is sharp
        let rho = phi_plus().to_density();
        let m = multistart_minimize(&rho.to_bloch(), 11, 32, &Tolerances::default());
        let sol = match m {
            Ok(s) => s,
            Err(Error::ConvergenceFailure { value, .. }) => {
                panic!("no convergence, F = {value}")
            }
            Err(e) => panic!("{e}"),
        };
        assert_abs_diff_eq!(sol.distance, 0.75, epsilon = 1e-10);
        assert!(sol.pair.a.iter().chain(&sol.pair.b).all(|v| v.abs() < 1e-3));
    }

    #[test]
    fn classical_state_examples() {
        // Case 1 Bell-diagonal: keeps only T33
        let bd = XStateParams::real([0.4, 0.1, 0.1, 0.4], 0.1, 0.05).unwrap();
        assert_eq!(k_eigenvalues_x(&bd).case_id, CaseId::Case1);
        let chi = closest_classical_x(&bd);
        let b = chi.bloch();
        let mut t = Matrix3::zeros();
        t[(2, 2)] = 0.6;
        assert!(b.max_abs_diff(&BlochForm::new(Vector3::zeros(), Vector3::zeros(), t)) < 1e-15);

        // Case 2 with zero phases
        let p = witness();
        let chi = closest_classical_x(&p);
        let b = chi.bloch();
        let mut t = Matrix3::zeros();
        t[(0, 0)] = 2.0 * (0.35 + 0.05);
        let expected = BlochForm::new(Vector3::zeros(), Vector3::new(0.0, 0.0, 0.2), t);
        assert!(b.max_abs_diff(&expected) < 1e-15);
        assert!(chi.is_valid());

        assert_eq!(
            closest_classical_x(&XStateParams::maximally_mixed()),
            XStateParams::maximally_mixed()
        );
    }

    #[test]
    fn case2_classical_state_has_halved_coherences() {
        let p = XStateParams::new([0.3, 0.2, 0.15, 0.35], 0.25, 0.15, 0.7, 2.9).unwrap();
        assert_eq!(k_eigenvalues_x(&p).case_id, CaseId::Case2);
        let chi = closest_classical_x(&p);
        let s = p.rho14 + p.rho23;
        let y3 = p.y3();
        assert_abs_diff_eq!(chi.rho11, 0.25 * (1.0 + y3), epsilon = 1e-15);
        assert_abs_diff_eq!(chi.rho22, 0.25 * (1.0 - y3), epsilon = 1e-15);
        assert_abs_diff_eq!(chi.rho14, 0.5 * s, epsilon = 1e-15);
        assert_abs_diff_eq!(chi.rho23, 0.5 * s, epsilon = 1e-15);
        assert_abs_diff_eq!(chi.gamma14, 0.7, epsilon = 1e-14);
        assert_abs_diff_eq!(chi.gamma23, 2.9, epsilon = 1e-14);
    }

    #[test]
    fn product_of_classical_examples() {
        let p = XStateParams::real([0.4, 0.2, 0.3, 0.1], 0.05, 0.02).unwrap();
        assert_eq!(k_eigenvalues_x(&p).case_id, CaseId::Case1);
        assert_eq!(
            closest_product_of_classical_x(&p).unwrap(),
            closest_product_x(&p).unwrap()
        );

        let p = witness();
        assert_abs_diff_eq!(p.y3(), 0.2, epsilon = 1e-15);
        let pair = closest_product_of_classical_x(&p).unwrap();
        assert_eq!(pair.a, [0.0; 3]);
        assert_eq!(pair.b, [0.0, 0.0, p.y3()]);

        let pair = closest_product_of_classical_x(&flat_case2()).unwrap();
        assert_eq!(pair, ProductPair::zero());
    }

    #[test]
    fn zero_coherence_is_never_case2() {
        let p = XStateParams::real([0.7, 0.1, 0.15, 0.05], 0.0, 0.0).unwrap();
        assert_eq!(k_eigenvalues_x(&p).case_id, CaseId::Case1);
        let p = XStateParams::real([0.25; 4], 0.0, 0.0).unwrap();
        assert_eq!(k_eigenvalues_x(&p).case_id, CaseId::Case1);
    }

    #[test]
    fn quintic_solution_of_case2_classical_state() {
        // χ⁽²⁾ has x3 = T33 = 0, so its closest product state is (0, y3)
        let p = witness();
        let chi = closest_classical_x(&p);
        let pair = closest_product_x(&chi).unwrap();
        assert_abs_diff_eq!(pair.a[2], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pair.b[2], p.y3(), epsilon = 1e-12);
    }
}
