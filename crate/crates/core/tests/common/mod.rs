#![allow(dead_code)]

use geocorr::closest::ProductPair;
use geocorr::state::{Matrix4c, XStateParams, C64};
use proptest::prelude::*;

/// Valid X states: populations from normalized positive weights, coherences
/// as fractions of their positivity bounds, arbitrary phases.
pub fn x_state() -> impl Strategy<Value = XStateParams> {
    (
        prop::array::uniform4(0.0f64..1.0),
        0.0f64..=1.0,
        0.0f64..=1.0,
        0.0f64..std::f64::consts::TAU,
        0.0f64..std::f64::consts::TAU,
    )
        .prop_filter("nonzero weights", |(w, ..)| w.iter().sum::<f64>() > 1e-6)
        .prop_map(|(w, u, v, g14, g23)| {
            let s: f64 = w.iter().sum();
            let d = w.map(|x| x / s);
            XStateParams {
                rho11: d[0],
                rho22: d[1],
                rho33: d[2],
                rho44: 1.0 - d[0] - d[1] - d[2],
                rho14: u * (d[0] * d[3]).sqrt(),
                rho23: v * (d[1] * d[2]).sqrt(),
                gamma14: g14,
                gamma23: g23,
            }
        })
        .prop_filter("valid", |p| p.is_valid())
}

/// Dense matrix of an X state written out entry by entry.
pub fn x_matrix(p: &XStateParams) -> Matrix4c {
    let mut m = Matrix4c::zeros();
    m[(0, 0)] = C64::new(p.rho11, 0.0);
    m[(1, 1)] = C64::new(p.rho22, 0.0);
    m[(2, 2)] = C64::new(p.rho33, 0.0);
    m[(3, 3)] = C64::new(p.rho44, 0.0);
    m[(0, 3)] = C64::from_polar(p.rho14, p.gamma14);
    m[(3, 0)] = m[(0, 3)].conj();
    m[(1, 2)] = C64::from_polar(p.rho23, p.gamma23);
    m[(2, 1)] = m[(1, 2)].conj();
    m
}

/// `½(I + r·σ)` in the `{|1⟩, |0⟩}` basis.
fn qubit(r: [f64; 3]) -> [[C64; 2]; 2] {
    [
        [
            C64::new(0.5 * (1.0 + r[2]), 0.0),
            C64::new(0.5 * r[0], -0.5 * r[1]),
        ],
        [
            C64::new(0.5 * r[0], 0.5 * r[1]),
            C64::new(0.5 * (1.0 - r[2]), 0.0),
        ],
    ]
}

/// `ρ_A ⊗ ρ_B` with explicit index arithmetic.
pub fn product_matrix(pair: &ProductPair) -> Matrix4c {
    let (a, b) = (qubit(pair.a), qubit(pair.b));
    Matrix4c::from_fn(|r, c| a[r / 2][c / 2] * b[r % 2][c % 2])
}

/// `Tr[(A − B)²]` for Hermitian `A`, `B`.
pub fn hs_sq(a: &Matrix4c, b: &Matrix4c) -> f64 {
    (a - b).iter().map(|z| z.norm_sqr()).sum()
}

pub fn purity(a: &Matrix4c) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}
