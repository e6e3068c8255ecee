//! Derivative-free simplex descent (Nelder–Mead) with optional box bounds.
//!
//! Bounds are handled by an exterior penalty on the projected point.

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub max_iter: usize,
    /// Stop when `f_max − f_min` over the simplex falls below this.
    pub f_tol: f64,
    /// ... and the simplex diameter falls below this.
    pub x_tol: f64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iter: 20_000,
            f_tol: 1e-18,
            x_tol: 1e-11,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Axis-aligned box constraint.
#[derive(Debug, Clone)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn uniform(dim: usize, lo: f64, hi: f64) -> Self {
        Self {
            lower: vec![lo; dim],
            upper: vec![hi; dim],
        }
    }

    fn project(&self, x: &mut [f64]) {
        for (i, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lower[i], self.upper[i]);
        }
    }
}

/// Minimizes `f` from `start`. The search is restarted from its own result
/// with a fresh simplex until a restart no longer improves the value; this
/// recovers from simplices that collapse onto a face of the bounds.
pub fn nelder_mead<F>(
    f: F,
    start: &[f64],
    bounds: Option<&Bounds>,
    opts: &NelderMeadOptions,
) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let mut best = nelder_mead_once(&f, start, bounds, opts);
    for _ in 0..MAX_RESTARTS {
        if best.iterations >= opts.max_iter {
            break;
        }
        let next = nelder_mead_once(&f, &best.x, bounds, opts);
        let improved = next.value < best.value - opts.f_tol;
        let iterations = best.iterations + next.iterations;
        if next.value < best.value {
            best = Minimum { iterations, ..next };
        } else {
            best.iterations = iterations;
        }
        if !improved {
            break;
        }
    }
    best
}

const MAX_RESTARTS: usize = 10;

fn nelder_mead_once<F>(
    f: &F,
    start: &[f64],
    bounds: Option<&Bounds>,
    opts: &NelderMeadOptions,
) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let n = start.len();
    // outside the box: value at the projection plus the squared distance to
    // it, so the simplex keeps its shape and minimizers stay inside
    let eval = |x: &[f64]| match bounds {
        Some(b) => {
            let mut p = x.to_vec();
            b.project(&mut p);
            f(&p) + dist(x, &p).powi(2)
        }
        None => f(x),
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let x0 = start.to_vec();
    let f0 = eval(&x0);
    simplex.push((x0.clone(), f0));
    for i in 0..n {
        let mut xi = x0.clone();
        xi[i] += opts.initial_step;
        if let Some(b) = bounds {
            // step inward when the start sits on the upper face
            if xi[i] > b.upper[i] {
                xi[i] = x0[i] - opts.initial_step;
            }
        }
        let fi = eval(&xi);
        simplex.push((xi, fi));
    }

    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let f_best = simplex[0].1;
        let f_worst = simplex[n].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| dist(x, &simplex[0].0))
            .fold(0.0, f64::max);
        if f_worst - f_best <= opts.f_tol && diameter <= opts.x_tol {
            break;
        }

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let xr = along(-1.0);
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (mut xc, fc) = if fr < simplex[n].1 {
            let xc = along(-0.5);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(0.5);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < fr.min(simplex[n].1) {
            simplex[n] = (std::mem::take(&mut xc), fc);
            continue;
        }
        // shrink toward the best vertex
        let best = simplex[0].0.clone();
        for (x, fx) in simplex.iter_mut().skip(1) {
            for (v, b) in x.iter_mut().zip(&best) {
                *v = b + 0.5 * (*v - b);
            }
            *fx = eval(x);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (mut x, value) = simplex.swap_remove(0);
    if let Some(b) = bounds {
        b.project(&mut x);
    }
    Minimum {
        x,
        value,
        iterations,
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = nelder_mead(f, &[-1.2, 1.0], None, &NelderMeadOptions::default());
        assert!(
            (m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6,
            "{:?}",
            m.x
        );
    }

    #[test]
    fn respects_bounds() {
        let f = |x: &[f64]| (x[0] - 3.0).powi(2) + (x[1] + 0.2).powi(2);
        let b = Bounds::uniform(2, -1.0, 1.0);
        let m = nelder_mead(f, &[0.0, 0.0], Some(&b), &NelderMeadOptions::default());
        assert!((m.x[0] - 1.0).abs() < 1e-8);
        assert!((m.x[1] + 0.2).abs() < 1e-6, "{m:?}");
    }
}
