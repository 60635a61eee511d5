//! Receiver figure of merit and noise arithmetic.
//!
//! The objective being maximized is
//!
//! ```text
//! FoM = gain_db / (nf_db * power_w)
//! ```
//!
//! taken literally on the decibel gain, the decibel noise figure and the
//! wattage — a dimensioned engineering ratio rather than a physically pure
//! one, chosen because it rewards gain while punishing noise and burn. Hard
//! specifications enter through replacement rules applied *before* the ratio:
//! the stock rule replaces any noise figure above 5 dB with 10,000, which
//! collapses the FoM of out-of-spec designs to a negligible value instead of
//! rejecting them outright.
//!
//! Cascaded noise is combined with the Friis formula
//!
//! ```text
//! F_total = F1 + (F2 - 1)/G1 + (F3 - 1)/(G1*G2) + ...
//! ```
//!
//! on *linear* noise factors and available power gains.

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FitnessError {
    #[error("invalid metrics: {0}")]
    InvalidMetrics(String),
    #[error("degenerate FoM denominator: nf_db = {nf_db}, power_w = {power_w}")]
    DegenerateDenominator { nf_db: f64, power_w: f64 },
    #[error("constraint replacement {0} must be finite")]
    NonFiniteReplacement(f64),
    #[error("multiple rules target {metric:?} with comparator {comparator:?}")]
    DuplicateRule {
        metric: MetricKind,
        comparator: Comparator,
    },
    #[error("cascade needs at least one noise factor")]
    EmptyCascade,
    #[error("cascade has {factors} noise factors but {gains} gains (need {})", .factors - 1)]
    CascadeLengthMismatch { factors: usize, gains: usize },
    #[error("noise factor {0} is below 1 (linear factors cannot be)")]
    FactorBelowOne(f64),
    #[error("stage gain {0} must be positive and finite")]
    BadGain(f64),
    #[error("cannot convert non-positive linear value {0} to dB")]
    NonPositiveLinear(f64),
}

/// The measured quantities the FoM is built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metrics {
    /// Conversion/voltage gain in dB.
    pub gain_db: f64,
    /// Total drawn power in watts.
    pub power_w: f64,
    /// Noise figure in dB.
    pub nf_db: f64,
}

impl Metrics {
    pub fn new(gain_db: f64, power_w: f64, nf_db: f64) -> Self {
        Metrics {
            gain_db,
            power_w,
            nf_db,
        }
    }

    /// Physical sanity: everything finite, power strictly positive, noise
    /// figure non-negative. Gain may be negative (a lossy front end).
    pub fn validate(&self) -> Result<(), FitnessError> {
        if !self.gain_db.is_finite() || !self.power_w.is_finite() || !self.nf_db.is_finite() {
            return Err(FitnessError::InvalidMetrics(format!(
                "non-finite value in {self:?}"
            )));
        }
        if self.power_w <= 0.0 {
            return Err(FitnessError::InvalidMetrics(format!(
                "power_w must be positive, got {}",
                self.power_w
            )));
        }
        if self.nf_db < 0.0 {
            return Err(FitnessError::InvalidMetrics(format!(
                "nf_db must be non-negative, got {}",
                self.nf_db
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    GainDb,
    PowerW,
    NfDb,
}

impl MetricKind {
    pub fn get(&self, m: &Metrics) -> f64 {
        match self {
            MetricKind::GainDb => m.gain_db,
            MetricKind::PowerW => m.power_w,
            MetricKind::NfDb => m.nf_db,
        }
    }

    fn set(&self, m: &mut Metrics, v: f64) {
        match self {
            MetricKind::GainDb => m.gain_db = v,
            MetricKind::PowerW => m.power_w = v,
            MetricKind::NfDb => m.nf_db = v,
        }
    }
}

/// Violation direction, written as `">"` / `"<"` in JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = ">")]
    Greater,
    #[serde(rename = "<")]
    Less,
}

/// Replace a metric with a fixed penalty value when it crosses a bound.
///
/// Comparison is strict: a value exactly at the threshold passes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintRule {
    pub metric: MetricKind,
    pub comparator: Comparator,
    pub threshold: f64,
    pub replacement: f64,
}

impl ConstraintRule {
    pub fn violated(&self, m: &Metrics) -> bool {
        let v = self.metric.get(m);
        match self.comparator {
            Comparator::Greater => v > self.threshold,
            Comparator::Less => v < self.threshold,
        }
    }
}

/// The constraint rule set feeding [`compute_fom`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FomConfig {
    #[serde(default)]
    pub rules: Vec<ConstraintRule>,
}

impl Default for FomConfig {
    /// The stock rule set: `nf_db > 5` is replaced with `10000`.
    fn default() -> Self {
        FomConfig {
            rules: vec![ConstraintRule {
                metric: MetricKind::NfDb,
                comparator: Comparator::Greater,
                threshold: 5.0,
                replacement: 10_000.0,
            }],
        }
    }
}

impl FomConfig {
    /// No rules at all: the raw ratio.
    pub fn unconstrained() -> Self {
        FomConfig { rules: vec![] }
    }

    /// Rules must use finite thresholds/replacements and no two rules may
    /// target the same metric with the same comparator (the result would
    /// depend on rule order).
    pub fn validate(&self) -> Result<(), FitnessError> {
        let mut seen = std::collections::HashSet::new();
        for r in &self.rules {
            if !r.replacement.is_finite() || !r.threshold.is_finite() {
                return Err(FitnessError::NonFiniteReplacement(if r.replacement.is_finite() {
                    r.threshold
                } else {
                    r.replacement
                }));
            }
            if !seen.insert((r.metric, r.comparator)) {
                return Err(FitnessError::DuplicateRule {
                    metric: r.metric,
                    comparator: r.comparator,
                });
            }
        }
        Ok(())
    }
}

/// Apply every violated rule to a copy of the metrics.
///
/// Each rule tests against the *raw* metrics, so one replacement cannot
/// trigger or mask another.
pub fn apply_constraints(m: &Metrics, cfg: &FomConfig) -> Metrics {
    let mut out = *m;
    for rule in &cfg.rules {
        if rule.violated(m) {
            rule.metric.set(&mut out, rule.replacement);
        }
    }
    out
}

/// Penalized figure of merit: constraints first, then `gain / (nf * power)`.
pub fn compute_fom(m: &Metrics, cfg: &FomConfig) -> Result<f64, FitnessError> {
    m.validate()?;
    let c = apply_constraints(m, cfg);
    let denom = c.nf_db * c.power_w;
    if denom == 0.0 || !denom.is_finite() {
        return Err(FitnessError::DegenerateDenominator {
            nf_db: c.nf_db,
            power_w: c.power_w,
        });
    }
    Ok(c.gain_db / denom)
}

/// Friis total noise factor of a cascade.
///
/// `noise_factors[i]` is the linear noise factor of stage `i`;
/// `gains[i]` the linear available gain of stage `i`. The last stage's gain
/// does not enter the formula, so `gains` carries one fewer element.
pub fn friis_cascade(noise_factors: &[f64], gains: &[f64]) -> Result<f64, FitnessError> {
    if noise_factors.is_empty() {
        return Err(FitnessError::EmptyCascade);
    }
    if gains.len() + 1 != noise_factors.len() {
        return Err(FitnessError::CascadeLengthMismatch {
            factors: noise_factors.len(),
            gains: gains.len(),
        });
    }
    for &f in noise_factors {
        if f < 1.0 || !f.is_finite() {
            return Err(FitnessError::FactorBelowOne(f));
        }
    }
    for &g in gains {
        if g <= 0.0 || !g.is_finite() {
            return Err(FitnessError::BadGain(g));
        }
    }
    // Closed-form sum; each term's denominator is the product of all gains
    // ahead of that stage.
    let mut total = noise_factors[0];
    for (i, &f) in noise_factors.iter().enumerate().skip(1) {
        let ahead: f64 = gains[..i].iter().product();
        total += (f - 1.0) / ahead;
    }
    Ok(total)
}

/// Power ratio in dB to linear.
pub fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Linear power ratio to dB.
pub fn lin_to_db(lin: f64) -> Result<f64, FitnessError> {
    if lin.is_nan() || lin <= 0.0 {
        return Err(FitnessError::NonPositiveLinear(lin));
    }
    Ok(10.0 * lin.log10())
}
