//! X states under two identical, independent amplitude-damping channels
//! coupled to Lorentzian reservoirs.
//!
//! Each qubit keeps its excited population with weight `P_t`. With coupling
//! `γ0` and reservoir width `λ`,
//! `P_t = e^{−λt} [cos(dt/2) + (λ/d) sin(dt/2)]²`, `d = √(2γ0λ − λ²)`.
//! For `λ > 2γ0` the trigonometric functions continue to hyperbolic ones;
//! near `d = 0` a short series is used instead. Times in the public API are
//! dimensionless, measured in units of `1/γ0`.

use rayon::prelude::*;
use serde::Serialize;

use crate::closest::{k_eigenvalues_x, CaseId};
use crate::error::{Error, Result};
use crate::format::fmt17;
use crate::quantifiers::{quantifiers_x, CorrelationReport};
use crate::state::XStateParams;
use crate::tolerance::Tolerances;

/// Below this `|d t / 2|²` the series branch is used.
const SERIES_CUTOFF: f64 = 1e-6;

/// Excited-state survival `P_t` for physical time `t`.
pub fn p_t(t: f64, gamma0: f64, lambda: f64) -> f64 {
    let s = (2.0 * gamma0 * lambda - lambda * lambda) * t * t / 4.0;
    let h = lambda * t / 2.0;
    let p = if s.abs() < SERIES_CUTOFF {
        // cos u and sin u / u (or their hyperbolic continuations) in s = u²
        let c = 1.0 - s / 2.0 + s * s / 24.0;
        let sc = 1.0 - s / 6.0 + s * s / 120.0;
        (-lambda * t).exp() * (c + h * sc).powi(2)
    } else if s > 0.0 {
        let u = s.sqrt();
        (-lambda * t).exp() * (u.cos() + h * u.sin() / u).powi(2)
    } else {
        // e^{-h} cosh u and e^{-h} sinh u without overflow
        let u = (-s).sqrt();
        let ep = (u - h).exp();
        let em = (-u - h).exp();
        let amp = 0.5 * (ep + em) + h * 0.5 * (ep - em) / u;
        amp * amp
    };
    p.clamp(0.0, 1.0)
}

/// State at survival `p` of a given initial X state.
pub fn damp(initial: &XStateParams, p: f64) -> XStateParams {
    if p == 1.0 {
        return *initial;
    }
    let q = 1.0 - p;
    let rho11 = initial.rho11 * p * p;
    let rho22 = initial.rho22 * p + initial.rho11 * p * q;
    let rho33 = initial.rho33 * p + initial.rho11 * p * q;
    XStateParams {
        rho11,
        rho22,
        rho33,
        rho44: 1.0 - rho11 - rho22 - rho33,
        rho14: initial.rho14 * p,
        rho23: initial.rho23 * p,
        gamma14: initial.gamma14,
        gamma23: initial.gamma23,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsConfig {
    pub gamma0: f64,
    pub lambda: f64,
    /// Final dimensionless time `γ0 t`.
    pub t_max: f64,
    /// Number of grid points, including both ends.
    pub steps: usize,
    pub initial: XStateParams,
}

impl DynamicsConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.gamma0.is_finite() && self.gamma0 > 0.0) {
            return bad(format!("gamma0 must be positive, got {}", self.gamma0));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return bad(format!("lambda must be positive, got {}", self.lambda));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return bad(format!("t_max must be positive, got {}", self.t_max));
        }
        if self.steps < 2 {
            return bad(format!("need at least 2 steps, got {}", self.steps));
        }
        self.initial.validate(&Tolerances::default())
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t_max * i as f64 / (self.steps - 1) as f64
    }

    /// State at dimensionless time `tau`.
    pub fn state_at(&self, tau: f64) -> XStateParams {
        damp(
            &self.initial,
            p_t(tau / self.gamma0, self.gamma0, self.lambda),
        )
    }

    /// `k1 − k3` at dimensionless time `tau`; its sign fixes the case.
    pub fn case_margin(&self, tau: f64) -> f64 {
        let k = k_eigenvalues_x(&self.state_at(tau));
        k.k1 - k.k3
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub state: XStateParams,
    pub report: CorrelationReport,
}

impl TrajectoryPoint {
    pub const CSV_HEADER: &'static str =
        "t,rho11,rho22,rho33,rho44,rho14,rho23,k1,k3,tg,dg,cg,lg,case";

    pub fn csv_row(&self) -> String {
        let s = &self.state;
        let r = &self.report;
        let nums = [
            self.t, s.rho11, s.rho22, s.rho33, s.rho44, s.rho14, s.rho23, r.case.k1, r.case.k3,
            r.t_g, r.d_g, r.c_g, r.l_g,
        ];
        let mut row: Vec<String> = nums.iter().map(|&v| fmt17(v)).collect();
        row.push(r.case.case_id.number().to_string());
        row.join(",")
    }
}

pub fn evolve(cfg: &DynamicsConfig) -> Result<Vec<TrajectoryPoint>> {
    cfg.validate()?;
    let tol = Tolerances::default();
    (0..cfg.steps)
        .into_par_iter()
        .map(|i| {
            let t = cfg.time(i);
            let state = cfg.state_at(t);
            state.validate(&tol)?;
            let report = quantifiers_x(&state)?;
            Ok(TrajectoryPoint { t, state, report })
        })
        .collect()
}

pub fn trajectory_csv(points: &[TrajectoryPoint]) -> String {
    let mut out = String::from(TrajectoryPoint::CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&p.csv_row());
        out.push('\n');
    }
    out
}

/// A change of case between two grid points, located by bisection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CaseCrossing {
    pub t: f64,
    pub from: CaseId,
    pub to: CaseId,
}

/// Times where the case changes along the grid of `cfg`, each refined to
/// within `t_tol`.
pub fn case_crossings(
    cfg: &DynamicsConfig,
    points: &[TrajectoryPoint],
    t_tol: f64,
) -> Vec<CaseCrossing> {
    let mut out = Vec::new();
    for w in points.windows(2) {
        let (from, to) = (w[0].report.case.case_id, w[1].report.case.case_id);
        if from == to {
            continue;
        }
        // case 1 iff margin <= 0
        let (mut lo, mut hi) = (w[0].t, w[1].t);
        while hi - lo > t_tol {
            let mid = 0.5 * (lo + hi);
            let mid_case = if cfg.case_margin(mid) <= 0.0 {
                CaseId::Case1
            } else {
                CaseId::Case2
            };
            if mid_case == from {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(CaseCrossing {
            t: 0.5 * (lo + hi),
            from,
            to,
        });
    }
    out
}
