//! Random X-state ensembles and residual histograms.
//!
//! Sampling law: the four populations are uniform on the probability
//! simplex (spacings of three sorted uniforms), the coherence magnitudes are
//! uniform fractions of their positivity bounds, `ρ14 = u √(ρ11 ρ44)` and
//! `ρ23 = v √(ρ22 ρ33)`, and the phases are uniform on `[0, 2π)` or fixed
//! at zero. A case filter is applied by rejection.
//!
//! Work is split into shards of [`SHARD_SIZE`] accepted states. Shard `k`
//! draws from its own ChaCha8 stream seeded with `seed ^ k`, so the output
//! depends only on `(seed, count, filter, phase mode)` and not on the number
//! of worker threads.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closest::{k_eigenvalues_x, CaseId};
use crate::error::{Error, Result};
use crate::format::fmt17;
use crate::quantifiers::{quantifiers_x, CorrelationReport};
use crate::state::XStateParams;

pub const SHARD_SIZE: usize = 1024;

/// Draws are abandoned once this many have been made with an acceptance
/// rate below [`MIN_ACCEPTANCE`].
pub const REJECTION_WINDOW: u64 = 1_000_000;
pub const MIN_ACCEPTANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseMode {
    #[default]
    Free,
    Zero,
}

impl std::str::FromStr for PhaseMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" => Ok(Self::Free),
            "zero" => Ok(Self::Zero),
            other => Err(Error::InvalidConfig(format!(
                "unknown phase mode {other:?} (free, zero)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub seed: u64,
    pub count: usize,
    pub case_filter: Option<CaseId>,
    pub phase_mode: PhaseMode,
}

impl SamplerConfig {
    pub fn new(seed: u64, count: usize) -> Self {
        Self {
            seed,
            count,
            case_filter: None,
            phase_mode: PhaseMode::Free,
        }
    }

    pub fn with_case(mut self, case: Option<CaseId>) -> Self {
        self.case_filter = case;
        self
    }

    pub fn with_phase_mode(mut self, mode: PhaseMode) -> Self {
        self.phase_mode = mode;
        self
    }
}

/// One draw from the sampling law.
pub fn draw_x_state<R: Rng + ?Sized>(rng: &mut R, phase_mode: PhaseMode) -> XStateParams {
    let mut cuts = [
        rng.random::<f64>(),
        rng.random::<f64>(),
        rng.random::<f64>(),
    ];
    cuts.sort_by(|a, b| a.total_cmp(b));
    let diag = [cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], 1.0 - cuts[2]];
    let u: f64 = rng.random();
    let v: f64 = rng.random();
    let (g14, g23) = match phase_mode {
        PhaseMode::Free => (rng.random_range(0.0..TAU), rng.random_range(0.0..TAU)),
        PhaseMode::Zero => (0.0, 0.0),
    };
    XStateParams {
        rho11: diag[0],
        rho22: diag[1],
        rho33: diag[2],
        rho44: diag[3],
        rho14: u * (diag[0] * diag[3]).sqrt(),
        rho23: v * (diag[1] * diag[2]).sqrt(),
        gamma14: g14,
        gamma23: g23,
    }
}

/// Accepted states plus the bookkeeping of the rejection step.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub states: Vec<XStateParams>,
    pub drawn: u64,
}

impl SampleBatch {
    pub fn acceptance_rate(&self) -> f64 {
        if self.drawn == 0 {
            1.0
        } else {
            self.states.len() as f64 / self.drawn as f64
        }
    }
}

fn sample_shard<F>(
    seed: u64,
    quota: usize,
    phase_mode: PhaseMode,
    accept: &F,
) -> Result<SampleBatch>
where
    F: Fn(&XStateParams) -> bool + Sync,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states = Vec::with_capacity(quota);
    let mut drawn = 0u64;
    while states.len() < quota {
        let s = draw_x_state(&mut rng, phase_mode);
        drawn += 1;
        if accept(&s) {
            states.push(s);
        }
        if drawn >= REJECTION_WINDOW && (states.len() as f64) < MIN_ACCEPTANCE * drawn as f64 {
            return Err(Error::RejectionExhausted {
                accepted: states.len() as u64,
                drawn,
            });
        }
    }
    Ok(SampleBatch { states, drawn })
}

fn sample_with<F>(cfg: &SamplerConfig, accept: F) -> Result<SampleBatch>
where
    F: Fn(&XStateParams) -> bool + Sync,
{
    let shards = cfg.count.div_ceil(SHARD_SIZE);
    let batches = (0..shards)
        .into_par_iter()
        .map(|k| {
            let quota = SHARD_SIZE.min(cfg.count - k * SHARD_SIZE);
            sample_shard(cfg.seed ^ k as u64, quota, cfg.phase_mode, &accept)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = SampleBatch {
        states: Vec::with_capacity(cfg.count),
        drawn: 0,
    };
    for b in batches {
        out.states.extend(b.states);
        out.drawn += b.drawn;
    }
    log::info!(
        "sampled {} states from {} draws (acceptance {:.4})",
        out.states.len(),
        out.drawn,
        out.acceptance_rate()
    );
    Ok(out)
}

/// `cfg.count` states from the sampling law, restricted to `cfg.case_filter`.
pub fn sample_x_states(cfg: &SamplerConfig) -> Result<SampleBatch> {
    let filter = cfg.case_filter;
    sample_with(cfg, move |s| match filter {
        None => true,
        Some(case) => k_eigenvalues_x(s).case_id == case,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HistogramQuantity {
    /// `(T_g − D_g − C_g)/T_g`
    RelResidual,
    /// `(T_g + L_g − D_g − C_g)/T_g`
    RelResidualWithL,
}

impl HistogramQuantity {
    pub fn of(self, r: &CorrelationReport) -> Option<f64> {
        match self {
            Self::RelResidual => r.relative_residual(),
            Self::RelResidualWithL => r.relative_residual_with_l(),
        }
    }

    /// Default histogram range for the quantity.
    pub fn default_range(self) -> (f64, f64) {
        match self {
            Self::RelResidual => (-1.0, 0.0),
            Self::RelResidualWithL => (0.0, 0.5),
        }
    }
}

impl std::str::FromStr for HistogramQuantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rel_residual" => Ok(Self::RelResidual),
            "rel_residual_with_l" => Ok(Self::RelResidualWithL),
            other => Err(Error::InvalidConfig(format!(
                "unknown quantity {other:?} (rel_residual, rel_residual_with_l)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramSpec {
    pub bin_count: usize,
    pub lo: f64,
    pub hi: f64,
    pub quantity: HistogramQuantity,
}

impl HistogramSpec {
    pub fn new(quantity: HistogramQuantity, bin_count: usize) -> Self {
        let (lo, hi) = quantity.default_range();
        Self {
            bin_count,
            lo,
            hi,
            quantity,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.bin_count < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least 2 bins, got {}",
                self.bin_count
            )));
        }
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::InvalidConfig(format!(
                "bad range [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bin_count as f64
    }

    pub fn edges(&self, k: usize) -> (f64, f64) {
        let w = self.width();
        let hi = if k + 1 == self.bin_count {
            self.hi
        } else {
            self.lo + (k + 1) as f64 * w
        };
        (self.lo + k as f64 * w, hi)
    }

    /// Bin index of `v`, or `Err(true)` above the range and `Err(false)`
    /// below it. Values within rounding of an edge of the range are put
    /// in the edge bin.
    pub fn bin_of(&self, v: f64) -> std::result::Result<usize, bool> {
        let slack = 1e-12 * (self.hi - self.lo);
        if v < self.lo - slack {
            return Err(false);
        }
        if v > self.hi + slack {
            return Err(true);
        }
        let k = ((v - self.lo) / self.width()).floor();
        Ok((k.max(0.0) as usize).min(self.bin_count - 1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub spec: HistogramSpec,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
}

impl Histogram {
    pub fn new(spec: HistogramSpec) -> Self {
        Self {
            spec,
            counts: vec![0; spec.bin_count],
            underflow: 0,
            overflow: 0,
        }
    }

    pub fn add(&mut self, v: f64) {
        match self.spec.bin_of(v) {
            Ok(k) => self.counts[k] += 1,
            Err(true) => self.overflow += 1,
            Err(false) => self.underflow += 1,
        }
    }

    pub fn in_range(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_lo,bin_hi,count\n");
        for (k, c) in self.counts.iter().enumerate() {
            let (lo, hi) = self.spec.edges(k);
            out.push_str(&format!("{},{},{}\n", fmt17(lo), fmt17(hi), c));
        }
        out
    }
}

/// Per-histogram bookkeeping for the metadata sidecar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramSummary {
    pub quantity: HistogramQuantity,
    pub bin_count: usize,
    pub range: [f64; 2],
    /// States counted in some bin.
    pub total: u64,
    /// States left out because `T_g` vanishes.
    pub dropped_zero_tg: u64,
    pub underflow: u64,
    pub overflow: u64,
}

/// Run parameters and bookkeeping written next to the histograms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetadata {
    pub seed: u64,
    pub count: usize,
    pub case_filter: Option<CaseId>,
    pub phase_mode: PhaseMode,
    pub drawn: u64,
    pub acceptance_rate: f64,
    pub histograms: Vec<HistogramSummary>,
}

#[derive(Debug, Clone)]
pub struct EnsembleRun {
    pub states: Vec<XStateParams>,
    pub reports: Vec<CorrelationReport>,
    pub histograms: Vec<Histogram>,
    pub metadata: RunMetadata,
}

/// Quantifiers of every sampled state, in sample order.
pub fn ensemble_reports(states: &[XStateParams]) -> Result<Vec<CorrelationReport>> {
    states.par_iter().map(quantifiers_x).collect()
}

/// Bins `spec.quantity` over `reports`; also returns how many reports were
/// skipped because `T_g` vanishes.
pub fn histogram_of(
    reports: &[CorrelationReport],
    spec: &HistogramSpec,
) -> Result<(Histogram, u64)> {
    spec.validate()?;
    let mut histogram = Histogram::new(*spec);
    let mut dropped = 0;
    for r in reports {
        match spec.quantity.of(r) {
            Some(v) => histogram.add(v),
            None => dropped += 1,
        }
    }
    Ok((histogram, dropped))
}

/// Per-state CSV: one [`CorrelationReport::csv_row`] per sample.
pub fn reports_csv(reports: &[CorrelationReport]) -> String {
    let mut out = String::from(CorrelationReport::CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Samples once and bins every requested quantity.
pub fn run_ensemble(cfg: &SamplerConfig, specs: &[HistogramSpec]) -> Result<EnsembleRun> {
    for spec in specs {
        spec.validate()?;
    }
    let batch = sample_x_states(cfg)?;
    let reports = ensemble_reports(&batch.states)?;
    let mut histograms = Vec::with_capacity(specs.len());
    let mut summaries = Vec::with_capacity(specs.len());
    for spec in specs {
        let (h, dropped) = histogram_of(&reports, spec)?;
        if dropped > 0 {
            log::info!("{dropped} states with vanishing T_g left out of the histogram");
        }
        summaries.push(HistogramSummary {
            quantity: spec.quantity,
            bin_count: spec.bin_count,
            range: [spec.lo, spec.hi],
            total: h.in_range(),
            dropped_zero_tg: dropped,
            underflow: h.underflow,
            overflow: h.overflow,
        });
        histograms.push(h);
    }
    let metadata = RunMetadata {
        seed: cfg.seed,
        count: cfg.count,
        case_filter: cfg.case_filter,
        phase_mode: cfg.phase_mode,
        drawn: batch.drawn,
        acceptance_rate: batch.acceptance_rate(),
        histograms: summaries,
    };
    Ok(EnsembleRun {
        states: batch.states,
        reports,
        histograms,
        metadata,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerance::Tolerances;

    #[test]
    fn draws_are_valid_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let s = draw_x_state(&mut rng, PhaseMode::Free);
            s.validate(&Tolerances::default()).unwrap();
        }
        let z = draw_x_state(&mut rng, PhaseMode::Zero);
        assert_eq!((z.gamma14, z.gamma23), (0.0, 0.0));
    }

    #[test]
    fn same_seed_same_states() {
        let cfg = SamplerConfig::new(42, 3000).with_case(Some(CaseId::Case2));
        let a = sample_x_states(&cfg).unwrap();
        let b = sample_x_states(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.states.len(), 3000);
        assert!(a
            .states
            .iter()
            .all(|s| k_eigenvalues_x(s).case_id == CaseId::Case2));
        let c = sample_x_states(&SamplerConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a.states, c.states);
    }

    #[test]
    fn shorter_run_is_a_prefix_of_its_shards() {
        let long = sample_x_states(&SamplerConfig::new(5, 2 * SHARD_SIZE)).unwrap();
        let short = sample_x_states(&SamplerConfig::new(5, SHARD_SIZE)).unwrap();
        assert_eq!(&long.states[..SHARD_SIZE], &short.states[..]);
    }

    #[test]
    fn impossible_filter_is_reported() {
        let err = sample_with(&SamplerConfig::new(1, 1), |_| false).unwrap_err();
        assert!(matches!(err, Error::RejectionExhausted { accepted: 0, .. }));
    }

    #[test]
    fn case_one_mass_sits_at_zero() {
        let cfg = SamplerConfig::new(9, 500).with_case(Some(CaseId::Case1));
        let spec = HistogramSpec::new(HistogramQuantity::RelResidual, 200);
        let run = run_ensemble(&cfg, &[spec]).unwrap();
        let h = &run.histograms[0];
        let m = &run.metadata.histograms[0];
        assert_eq!(h.in_range() + m.dropped_zero_tg, 500);
        assert_eq!(h.counts[199], h.in_range());
        assert_eq!((h.underflow, h.overflow), (0, 0));
        assert_eq!(reports_csv(&run.reports).lines().count(), 501);
    }

    #[test]
    fn binning_edges() {
        let spec = HistogramSpec::new(HistogramQuantity::RelResidual, 4);
        assert_eq!(spec.bin_of(-1.0), Ok(0));
        assert_eq!(spec.bin_of(0.0), Ok(3));
        assert_eq!(spec.bin_of(1e-17), Ok(3));
        assert_eq!(spec.bin_of(-0.5), Ok(2));
        assert_eq!(spec.bin_of(0.1), Err(true));
        assert_eq!(spec.bin_of(-1.1), Err(false));
        assert_eq!(spec.edges(3), (-0.25, 0.0));
        assert!(HistogramSpec {
            bin_count: 1,
            ..spec
        }
        .validate()
        .is_err());
        assert!(HistogramSpec { lo: 0.0, ..spec }.validate().is_err());
    }

    #[test]
    fn csv_layout() {
        let mut h = Histogram::new(HistogramSpec::new(HistogramQuantity::RelResidualWithL, 2));
        h.add(0.1);
        let csv = h.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "bin_lo,bin_hi,count");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].ends_with(",1"));
        assert!(lines[2].ends_with(",0"));
    }
}
