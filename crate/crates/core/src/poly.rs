//! Real polynomials and interchangeable real-root finders.

use nalgebra::{DMatrix, Schur};

use crate::registry::Strategy;

/// Polynomial with real coefficients in ascending order (`coeffs[k]` multiplies `x^k`).
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// `Σ |c_k| |x|^k`, the natural scale of rounding error in `eval(x)`.
    pub fn magnitude(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * ax + c.abs())
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial::new(vec![0.0]);
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(0.0)
                        + other.coeffs.get(k).copied().unwrap_or(0.0)
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Newton iterations from `x0`, keeping the iterate with the smallest `|p|`.
    pub fn polish(&self, x0: f64) -> f64 {
        let dp = self.derivative();
        let mut best = x0;
        let mut best_val = self.eval(x0).abs();
        let mut x = x0;
        for _ in 0..60 {
            let d = dp.eval(x);
            if d == 0.0 || best_val == 0.0 {
                break;
            }
            let next = x - self.eval(x) / d;
            if !next.is_finite() {
                break;
            }
            let val = self.eval(next).abs();
            if val < best_val {
                best = next;
                best_val = val;
            }
            if (next - x).abs() <= f64::EPSILON * x.abs().max(1.0) {
                break;
            }
            x = next;
        }
        best
    }
}

/// Strategy for locating the real roots of a polynomial inside a window.
pub trait RealRootFinder: Strategy {
    /// All distinct real roots in `[lo, hi]`, ascending. Multiple roots are
    /// reported once.
    fn real_roots(&self, p: &Polynomial, lo: f64, hi: f64) -> Vec<f64>;
}

fn dedup_sorted(mut roots: Vec<f64>, tol: f64) -> Vec<f64> {
    roots.sort_by(|a, b| a.total_cmp(b));
    roots.dedup_by(|a, b| (*a - *b).abs() <= tol * b.abs().max(1.0));
    roots
}

/// Eigenvalues of the companion matrix, with near-real eigenvalues polished
/// by Newton's method on the polynomial.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompanionMatrix;

impl CompanionMatrix {
    /// Imaginary parts below this (relative) are treated as rounding noise;
    /// a double root splits into a pair with imaginary part ~ sqrt(eps).
    const IMAG_TOL: f64 = 1e-6;
    const MAX_SCHUR_ITER: usize = 10_000;
}

impl Strategy for CompanionMatrix {
    fn name(&self) -> &'static str {
        "companion"
    }
}

impl RealRootFinder for CompanionMatrix {
    fn real_roots(&self, p: &Polynomial, lo: f64, hi: f64) -> Vec<f64> {
        if p.is_zero() {
            return Vec::new();
        }
        // factor out x^k so that exact zero roots never reach the eigensolver
        let zeros = p.coeffs().iter().take_while(|&&c| c == 0.0).count();
        let q = Polynomial::new(p.coeffs()[zeros..].to_vec());
        let mut roots: Vec<f64> = if zeros > 0 && (lo..=hi).contains(&0.0) {
            vec![0.0]
        } else {
            Vec::new()
        };
        let n = q.degree();
        if n > 0 {
            let c = q.coeffs();
            let lead = c[n];
            let mut m = DMatrix::<f64>::zeros(n, n);
            for i in 1..n {
                m[(i, i - 1)] = 1.0;
            }
            for i in 0..n {
                m[(i, n - 1)] = -c[i] / lead;
            }
            match Schur::try_new(m, f64::EPSILON, Self::MAX_SCHUR_ITER) {
                Some(schur) => roots.extend(
                    schur
                        .complex_eigenvalues()
                        .iter()
                        .filter(|z| z.im.abs() <= Self::IMAG_TOL * z.norm().max(1.0))
                        .map(|z| q.polish(z.re))
                        .filter(|r| {
                            let scale = q.magnitude(*r).max(f64::MIN_POSITIVE);
                            q.eval(*r).abs() <= 1e-9 * scale
                        })
                        .filter(|r| (lo..=hi).contains(r)),
                ),
                // the QR iteration can stall on defective matrices
                None => roots.extend(Bracketing.real_roots(&q, lo, hi)),
            }
        }
        dedup_sorted(roots, 1e-9)
    }
}

/// Recursive bracketing: the critical points of `p` split the window into
/// monotone pieces, each bisected where `p` changes sign. Critical points
/// where `p` vanishes to rounding precision are reported as (even) roots.
#[derive(Debug, Clone, Copy, Default)]
pub struct Bracketing;

impl Bracketing {
    fn roots_in(p: &Polynomial, lo: f64, hi: f64) -> Vec<f64> {
        match p.degree() {
            0 => return Vec::new(),
            1 => {
                let c = p.coeffs();
                let r = -c[0] / c[1];
                return if (lo..=hi).contains(&r) {
                    vec![r]
                } else {
                    Vec::new()
                };
            }
            _ => {}
        }
        let critical = Self::roots_in(&p.derivative(), lo, hi);
        let mut knots = Vec::with_capacity(critical.len() + 2);
        knots.push(lo);
        knots.extend(critical.iter().copied().filter(|&c| c > lo && c < hi));
        knots.push(hi);

        let is_zero = |x: f64| p.eval(x).abs() <= 1e-14 * p.magnitude(x);
        let mut roots = Vec::new();
        for w in knots.windows(2) {
            let (u, v) = (w[0], w[1]);
            let (fu, fv) = (p.eval(u), p.eval(v));
            if is_zero(u) {
                roots.push(u);
            } else if fu.signum() != fv.signum() && !is_zero(v) {
                roots.push(bisect(p, u, v));
            }
        }
        if is_zero(hi) {
            roots.push(hi);
        }
        roots
    }
}

fn bisect(p: &Polynomial, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = p.eval(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = p.eval(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl Strategy for Bracketing {
    fn name(&self) -> &'static str {
        "bracketing"
    }
}

impl RealRootFinder for Bracketing {
    fn real_roots(&self, p: &Polynomial, lo: f64, hi: f64) -> Vec<f64> {
        if p.is_zero() {
            return Vec::new();
        }
        dedup_sorted(Self::roots_in(p, lo, hi), 1e-9)
    }
}
