//! Fitness backends: the [`Evaluator`] trait and the built-in analytic
//! surrogates.
//!
//! The production-grade evaluator for receiver sizing is a circuit simulator
//! behind the external adapter in [`crate::sim`]. The built-ins here are
//! *surrogates*: closed-form stand-ins that are cheap enough for unit tests,
//! calibration sweeps and algorithm studies. They are honest about what they
//! are — none of them claims device-level accuracy.
//!
//! * [`QuadraticRf`] — a smooth bowl in normalized coordinates with a known
//!   optimum, for checking that an optimizer actually climbs.
//! * [`PhysicalLite`] — a two-stage LNA + mixer small-signal model that runs
//!   real metrics through the Friis cascade, for end-to-end plumbing tests
//!   with physically plausible numbers.
//! * [`Benchmark`] — classic test functions (sphere, Rastrigin, Rosenbrock)
//!   recast as maximization problems.

use std::thread;

use serde::{Deserialize, Serialize};

use crate::fitness::{compute_fom, friis_cascade, lin_to_db, FitnessError, FomConfig, Metrics};
use crate::sim::SimError;
use crate::space::{Individual, ParameterSpace, SpaceError};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("space is missing required parameter `{0}`")]
    MissingParameter(String),
    #[error("parameter `{name}` has unknown unit `{unit}`")]
    UnknownUnit { name: String, unit: String },
    #[error("parameter `{name}` must be positive, got {value}")]
    NonPositive { name: String, value: f64 },
    #[error("targets vector has {got} entries but the space has {expected} free variables")]
    TargetsLength { got: usize, expected: usize },
    #[error("target {value} at position {index} outside [0, 1]")]
    TargetOutOfRange { index: usize, value: f64 },
    #[error("offsets vector has {got} entries; need 1 or {expected}")]
    OffsetsLength { got: usize, expected: usize },
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Fitness(#[from] FitnessError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// What one evaluation produced.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    /// Raw metrics when the backend measures them; pure test functions
    /// report `None`.
    pub metrics: Option<Metrics>,
    /// The scalar being maximized.
    pub fitness: f64,
    /// Simulator budget consumed; 1 for every built-in.
    pub evaluations_consumed: u32,
}

impl EvalResult {
    fn measured(metrics: Metrics, fitness: f64) -> Self {
        EvalResult {
            metrics: Some(metrics),
            fitness,
            evaluations_consumed: 1,
        }
    }

    fn bare(fitness: f64) -> Self {
        EvalResult {
            metrics: None,
            fitness,
            evaluations_consumed: 1,
        }
    }
}

/// A fitness backend.
///
/// Implementations must be deterministic in the individual: evaluating the
/// same values twice yields the same result (the optimizers cache nothing and
/// the run log is replayed against this assumption).
pub trait Evaluator: Sync {
    fn evaluate(&self, ind: &Individual, space: &ParameterSpace)
        -> Result<EvalResult, EvalError>;

    /// Whether concurrent calls are safe. Built-ins are pure functions;
    /// external simulators declare this in their configuration.
    fn reentrant(&self) -> bool {
        true
    }

    /// How many evaluations the backend wants in flight at once.
    fn workers(&self) -> usize {
        1
    }
}

/// Evaluate a batch, in parallel when the evaluator is reentrant and asks
/// for more than one worker. Results keep the input order regardless of
/// completion order. Failures are not absorbed here — the optimizers decide
/// what a failed evaluation means.
pub fn evaluate_batch(
    evaluator: &dyn Evaluator,
    space: &ParameterSpace,
    individuals: &[Individual],
) -> Vec<Result<EvalResult, EvalError>> {
    let workers = evaluator.workers().max(1);
    if workers == 1 || !evaluator.reentrant() || individuals.len() <= 1 {
        return individuals
            .iter()
            .map(|ind| evaluator.evaluate(ind, space))
            .collect();
    }
    let chunk = individuals.len().div_ceil(workers);
    let mut results: Vec<Option<Result<EvalResult, EvalError>>> =
        (0..individuals.len()).map(|_| None).collect();
    thread::scope(|scope| {
        for (inds, outs) in individuals.chunks(chunk).zip(results.chunks_mut(chunk)) {
            scope.spawn(move || {
                for (ind, out) in inds.iter().zip(outs.iter_mut()) {
                    *out = Some(evaluator.evaluate(ind, space));
                }
            });
        }
    });
    results
        .into_iter()
        .map(|r| r.expect("every slot filled by its chunk"))
        .collect()
}

/// SI multiplier for a unit label, or `None` if the label is unknown.
///
/// Dimensionless (absent/empty) units scale by 1.
pub fn unit_scale(unit: &str) -> Option<f64> {
    Some(match unit {
        "" | "ohm" | "Ohm" | "V" | "A" | "F" | "W" | "Hz" | "s" | "m" => 1.0,
        "kohm" | "kOhm" | "kHz" => 1e3,
        "Mohm" | "MOhm" | "MHz" => 1e6,
        "GHz" => 1e9,
        "mV" | "mA" | "mW" | "ms" | "mF" => 1e-3,
        "uV" | "µV" | "uA" | "µA" | "uW" | "µW" | "us" | "µs" | "um" | "µm" | "uF" | "µF" => 1e-6,
        "nV" | "nA" | "ns" | "nm" | "nF" => 1e-9,
        "pF" | "ps" => 1e-12,
        "fF" | "fs" => 1e-15,
        _ => return None,
    })
}

fn named_si_value(
    ind: &Individual,
    space: &ParameterSpace,
    name: &str,
) -> Result<f64, EvalError> {
    let fi = space
        .free_index_of(name)
        .ok_or_else(|| EvalError::MissingParameter(name.to_string()))?;
    let spec = space.free_spec(fi);
    let unit = spec.unit.as_deref().unwrap_or("");
    let scale = unit_scale(unit).ok_or_else(|| EvalError::UnknownUnit {
        name: name.to_string(),
        unit: unit.to_string(),
    })?;
    Ok(ind.values[fi] * scale)
}

// ---------------------------------------------------------------------------
// quadratic_rf
// ---------------------------------------------------------------------------

/// Parameters of the quadratic surrogate, all with production defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadraticRfParams {
    /// Normalized optimum per free variable; `None` puts it at 0.5 everywhere.
    pub targets: Option<Vec<f64>>,
    /// Gain at the optimum, dB.
    pub gain0_db: f64,
    /// Gain lost per unit of mean squared distance, dB.
    pub gain_slope_db: f64,
    /// Noise figure at the optimum, dB.
    pub nf0_db: f64,
    /// Noise figure gained per unit of mean squared distance, dB.
    pub nf_slope_db: f64,
    /// Power at the optimum, W.
    pub power0_w: f64,
    /// Power gained per unit of mean squared distance, W.
    pub power_slope_w: f64,
}

impl Default for QuadraticRfParams {
    fn default() -> Self {
        QuadraticRfParams {
            targets: None,
            gain0_db: 18.0,
            gain_slope_db: 10.0,
            nf0_db: 2.0,
            nf_slope_db: 6.0,
            power0_w: 0.008,
            power_slope_w: 0.01,
        }
    }
}

/// Smooth surrogate with a known optimum.
///
/// Each free variable is normalized into `[0, 1]`; the mean squared distance
/// `d` to the target point degrades all three metrics linearly:
/// `gain = gain0 - gain_slope*d`, `nf = nf0 + nf_slope*d`,
/// `power = power0 + power_slope*d`. With the defaults the optimum scores
/// `18 / (2 * 0.008) = 1125`. Degenerate (single-point) variables carry no
/// information and are excluded from the mean.
pub struct QuadraticRf {
    params: QuadraticRfParams,
    fom: FomConfig,
}

impl QuadraticRf {
    pub fn new(params: QuadraticRfParams, fom: FomConfig) -> Result<Self, EvalError> {
        if let Some(ts) = &params.targets {
            for (index, &value) in ts.iter().enumerate() {
                if !(0.0..=1.0).contains(&value) {
                    return Err(EvalError::TargetOutOfRange { index, value });
                }
            }
        }
        fom.validate()?;
        Ok(QuadraticRf { params, fom })
    }

    pub fn with_defaults() -> Self {
        Self::new(QuadraticRfParams::default(), FomConfig::default())
            .expect("defaults are valid")
    }

    /// Mean squared normalized distance of `ind` to the target point.
    pub fn distance(&self, ind: &Individual, space: &ParameterSpace) -> Result<f64, EvalError> {
        space.check_individual(ind)?;
        if let Some(ts) = &self.params.targets {
            if ts.len() != space.free_len() {
                return Err(EvalError::TargetsLength {
                    got: ts.len(),
                    expected: space.free_len(),
                });
            }
        }
        let mut sum = 0.0;
        let mut n = 0usize;
        for (fi, &v) in ind.values.iter().enumerate() {
            let spec = space.free_spec(fi);
            if spec.is_degenerate() {
                continue;
            }
            let target = self
                .params
                .targets
                .as_ref()
                .map_or(0.5, |ts| ts[fi]);
            let u = spec.normalized(v);
            sum += (u - target) * (u - target);
            n += 1;
        }
        Ok(if n == 0 { 0.0 } else { sum / n as f64 })
    }
}

impl Evaluator for QuadraticRf {
    fn evaluate(
        &self,
        ind: &Individual,
        space: &ParameterSpace,
    ) -> Result<EvalResult, EvalError> {
        let d = self.distance(ind, space)?;
        let p = &self.params;
        let metrics = Metrics::new(
            p.gain0_db - p.gain_slope_db * d,
            p.power0_w + p.power_slope_w * d,
            p.nf0_db + p.nf_slope_db * d,
        );
        let fitness = compute_fom(&metrics, &self.fom)?;
        Ok(EvalResult::measured(metrics, fitness))
    }
}

// ---------------------------------------------------------------------------
// physical_lite
// ---------------------------------------------------------------------------

/// Process/bias constants of the small-signal surrogate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicalLiteParams {
    /// Transconductance parameter Kp = µn·Cox, A/V².
    pub kp_a_per_v2: f64,
    /// Channel length, m.
    pub length_m: f64,
    /// Channel thermal-noise coefficient γ.
    pub gamma: f64,
    /// Source impedance the noise is referred to, Ω.
    pub source_ohm: f64,
    /// Supply voltage, V.
    pub vdd_v: f64,
}

impl Default for PhysicalLiteParams {
    fn default() -> Self {
        PhysicalLiteParams {
            kp_a_per_v2: 200e-6,
            length_m: 0.18e-6,
            gamma: 1.33,
            source_ohm: 50.0,
            vdd_v: 1.2,
        }
    }
}

/// Per-stage small-signal quantities, exposed so the cascade can be
/// cross-checked against [`friis_cascade`] from outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageBreakdown {
    /// LNA linear noise factor.
    pub f1: f64,
    /// LNA linear power gain.
    pub g1: f64,
    /// Mixer linear noise factor.
    pub f2: f64,
    /// Mixer linear power gain (conversion gain squared).
    pub g2: f64,
}

/// Two-stage analytic receiver: a resistively loaded common-source LNA into
/// an ideal switching mixer with a transconductor front end.
///
/// Square-law devices, `gm = sqrt(2·Kp·(W/L)·I)`. The LNA contributes
/// `G1 = (gm1·R1)²` and `F1 = 1 + γ/(gm1·Rs)`; the mixer contributes the
/// classic `2/π` switching factor, `G2 = ((2/π)·gm6·Rm)²` and
/// `F2 = 1 + (γ·π²/4)/(gm6·Rs)`. Total gain is `G1·G2`, total noise comes
/// from the Friis cascade, and power is `VDD·(I1+I2+I3)`. A surrogate — the
/// trends are right, the absolute numbers are indicative only.
pub struct PhysicalLite {
    params: PhysicalLiteParams,
    fom: FomConfig,
}

impl PhysicalLite {
    /// Parameters the space must provide, in the receiver space's spelling.
    pub const REQUIRED: [&'static str; 8] = [
        "R1", "R3", "Rm", "I1", "I2", "I3", "M1_width", "M6_width",
    ];

    pub fn new(params: PhysicalLiteParams, fom: FomConfig) -> Result<Self, EvalError> {
        fom.validate()?;
        Ok(PhysicalLite { params, fom })
    }

    pub fn with_defaults() -> Self {
        Self::new(PhysicalLiteParams::default(), FomConfig::default())
            .expect("defaults are valid")
    }

    fn positive(&self, name: &str, value: f64) -> Result<f64, EvalError> {
        if value <= 0.0 || !value.is_finite() {
            return Err(EvalError::NonPositive {
                name: name.to_string(),
                value,
            });
        }
        Ok(value)
    }

    fn gm(&self, w: f64, i: f64) -> f64 {
        (2.0 * self.params.kp_a_per_v2 * (w / self.params.length_m) * i).sqrt()
    }

    /// The stage-level quantities behind one evaluation.
    pub fn stages(
        &self,
        ind: &Individual,
        space: &ParameterSpace,
    ) -> Result<StageBreakdown, EvalError> {
        space.check_individual(ind)?;
        let p = &self.params;
        let si = |name: &str| -> Result<f64, EvalError> {
            self.positive(name, named_si_value(ind, space, name)?)
        };
        let r1 = si("R1")?;
        let r3 = si("R3")?;
        let rm = si("Rm")?;
        let i1 = si("I1")?;
        let i2 = si("I2")?;
        let w1 = si("M1_width")?;
        let w6 = si("M6_width")?;

        // LNA: input device degenerated by R3, loaded by R1.
        let gm1 = self.gm(w1, i1);
        let gm1_eff = gm1 / (1.0 + gm1 * r3);
        let av1 = gm1_eff * r1;
        let g1 = av1 * av1;
        let f1 = 1.0 + p.gamma / (gm1 * p.source_ohm);

        // Mixer: switching quad around a transconductor biased at I2,
        // loaded by Rm; hard switching costs the 2/π factor.
        let gm6 = self.gm(w6, i2);
        let av2 = (2.0 / std::f64::consts::PI) * gm6 * rm;
        let g2 = av2 * av2;
        let f2 = 1.0 + (p.gamma * std::f64::consts::PI * std::f64::consts::PI / 4.0)
            / (gm6 * p.source_ohm);

        Ok(StageBreakdown { f1, g1, f2, g2 })
    }
}

impl Evaluator for PhysicalLite {
    fn evaluate(
        &self,
        ind: &Individual,
        space: &ParameterSpace,
    ) -> Result<EvalResult, EvalError> {
        let s = self.stages(ind, space)?;
        let f_total = friis_cascade(&[s.f1, s.f2], &[s.g1])?;
        let nf_db = lin_to_db(f_total)?;
        let gain_db = lin_to_db(s.g1 * s.g2)?;
        let i_total = self.positive("I1", named_si_value(ind, space, "I1")?)?
            + self.positive("I2", named_si_value(ind, space, "I2")?)?
            + self.positive("I3", named_si_value(ind, space, "I3")?)?;
        let metrics = Metrics::new(gain_db, self.params.vdd_v * i_total, nf_db);
        let fitness = compute_fom(&metrics, &self.fom)?;
        Ok(EvalResult::measured(metrics, fitness))
    }
}

// ---------------------------------------------------------------------------
// benchmark
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchmarkFunction {
    Sphere,
    Rastrigin,
    Rosenbrock,
}

/// Benchmark parameters: which function, and an optional per-variable offset
/// shifting the optimum (one entry broadcasts to every variable).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkParams {
    pub function: Option<BenchmarkFunction>,
    pub offsets: Option<Vec<f64>>,
}

/// Classic test functions on normalized coordinates, negated so the framework
/// can maximize them. No metrics — fitness only.
///
/// With `u` the normalized value and `o` the offset (default 0):
///
/// * sphere: `z = u - o`, `f = Σ z²`; maximum 0 at `u = o`.
/// * rastrigin: `z = 10(u - o) - 5`, `f = Σ (z² - 10cos(2πz) + 10)`;
///   the grid sees the classic `[-5, 5]` window, maximum 0 at `u = o + 0.5`.
/// * rosenbrock: `z = 4(u - o) - 2`, `f = Σ (100(z_{i+1} - z_i²)² + (1-z_i)²)`;
///   the `[-2, 2]` window, maximum 0 at `u = o + 0.75` (all `z = 1`).
///
/// Degenerate (single-point) variables are dropped before the sum.
pub struct Benchmark {
    function: BenchmarkFunction,
    offsets: Option<Vec<f64>>,
}

impl Benchmark {
    pub fn new(function: BenchmarkFunction, offsets: Option<Vec<f64>>) -> Self {
        Benchmark { function, offsets }
    }

    pub fn from_params(params: BenchmarkParams) -> Self {
        Self::new(
            params.function.unwrap_or(BenchmarkFunction::Sphere),
            params.offsets,
        )
    }

    fn z_values(&self, ind: &Individual, space: &ParameterSpace) -> Result<Vec<f64>, EvalError> {
        space.check_individual(ind)?;
        if let Some(os) = &self.offsets {
            if os.len() != 1 && os.len() != space.free_len() {
                return Err(EvalError::OffsetsLength {
                    got: os.len(),
                    expected: space.free_len(),
                });
            }
        }
        let mut zs = Vec::with_capacity(space.free_len());
        for (fi, &v) in ind.values.iter().enumerate() {
            let spec = space.free_spec(fi);
            if spec.is_degenerate() {
                continue;
            }
            let o = match &self.offsets {
                None => 0.0,
                Some(os) if os.len() == 1 => os[0],
                Some(os) => os[fi],
            };
            let u = spec.normalized(v);
            let z = match self.function {
                BenchmarkFunction::Sphere => u - o,
                BenchmarkFunction::Rastrigin => 10.0 * (u - o) - 5.0,
                BenchmarkFunction::Rosenbrock => 4.0 * (u - o) - 2.0,
            };
            zs.push(z);
        }
        Ok(zs)
    }
}

impl Evaluator for Benchmark {
    fn evaluate(
        &self,
        ind: &Individual,
        space: &ParameterSpace,
    ) -> Result<EvalResult, EvalError> {
        let zs = self.z_values(ind, space)?;
        let cost = match self.function {
            BenchmarkFunction::Sphere => zs.iter().map(|z| z * z).sum::<f64>(),
            BenchmarkFunction::Rastrigin => zs
                .iter()
                .map(|z| z * z - 10.0 * (2.0 * std::f64::consts::PI * z).cos() + 10.0)
                .sum::<f64>(),
            BenchmarkFunction::Rosenbrock => zs
                .windows(2)
                .map(|w| {
                    let (a, b) = (w[0], w[1]);
                    100.0 * (b - a * a) * (b - a * a) + (1.0 - a) * (1.0 - a)
                })
                .sum::<f64>(),
        };
        Ok(EvalResult::bare(-cost))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;
    use crate::space::ParameterSpec;

    fn unit_space(n: usize, step: f64) -> ParameterSpace {
        let specs = (0..n)
            .map(|i| ParameterSpec {
                name: format!("u{i}"),
                min: 0.0,
                max: 1.0,
                step,
                initial: 0.0,
                unit: None,
            })
            .collect();
        ParameterSpace::new(specs, vec![]).unwrap()
    }

    fn at(values: &[f64]) -> Individual {
        Individual::new(0, values.to_vec())
    }

    #[test]
    fn quadratic_scores_1125_at_its_optimum() {
        let sp = unit_space(5, 0.1);
        let q = QuadraticRf::with_defaults();
        let r = q
            .evaluate(&at(&[0.5, 0.5, 0.5, 0.5, 0.5]), &sp)
            .unwrap();
        assert!((r.fitness - 1125.0).abs() < 1e-9, "got {}", r.fitness);
        let m = r.metrics.unwrap();
        assert_eq!(m.gain_db, 18.0);
        assert_eq!(m.power_w, 0.008);
        assert_eq!(m.nf_db, 2.0);
    }

    #[test]
    fn quadratic_degrades_away_from_target() {
        let sp = unit_space(5, 0.1);
        let q = QuadraticRf::with_defaults();
        // all-zero corner: d = 0.25, gain 15.5, power 0.0105, nf 3.5
        let r = q.evaluate(&at(&[0.0; 5]), &sp).unwrap();
        let m = r.metrics.unwrap();
        assert!((m.gain_db - 15.5).abs() < 1e-12);
        assert!((m.power_w - 0.0105).abs() < 1e-15);
        assert!((m.nf_db - 3.5).abs() < 1e-12);
        assert!((r.fitness - 15.5 / (3.5 * 0.0105)).abs() < 1e-9);
        assert!(r.fitness < 1125.0);
    }

    #[test]
    fn quadratic_optimum_is_strict_on_a_small_grid() {
        // 3 vars, 11 points each: brute force confirms the target is the
        // unique maximizer.
        let sp = unit_space(3, 0.1);
        let q = QuadraticRf::with_defaults();
        let mut best = (f64::NEG_INFINITY, vec![]);
        for a in 0..=10 {
            for b in 0..=10 {
                for c in 0..=10 {
                    let vals = vec![a as f64 / 10.0, b as f64 / 10.0, c as f64 / 10.0];
                    let f = q.evaluate(&at(&vals), &sp).unwrap().fitness;
                    if f > best.0 {
                        best = (f, vals);
                    }
                }
            }
        }
        assert_eq!(best.1, vec![0.5, 0.5, 0.5]);
    }

    #[test]
    fn quadratic_custom_targets_validated() {
        assert!(matches!(
            QuadraticRf::new(
                QuadraticRfParams {
                    targets: Some(vec![0.2, 1.4]),
                    ..Default::default()
                },
                FomConfig::default(),
            ),
            Err(EvalError::TargetOutOfRange { index: 1, .. })
        ));

        let sp = unit_space(2, 0.1);
        let q = QuadraticRf::new(
            QuadraticRfParams {
                targets: Some(vec![0.2]),
                ..Default::default()
            },
            FomConfig::default(),
        )
        .unwrap();
        assert!(matches!(
            q.evaluate(&at(&[0.0, 0.0]), &sp),
            Err(EvalError::TargetsLength { got: 1, expected: 2 })
        ));
    }

    #[test]
    fn quadratic_ignores_degenerate_variables() {
        let mut specs = vec![
            ParameterSpec {
                name: "x".into(),
                min: 0.0,
                max: 1.0,
                step: 0.1,
                initial: 0.0,
                unit: None,
            },
            ParameterSpec {
                name: "fixed".into(),
                min: 3.0,
                max: 3.0,
                step: 1.0,
                initial: 3.0,
                unit: None,
            },
        ];
        let sp = ParameterSpace::new(specs.clone(), vec![]).unwrap();
        let q = QuadraticRf::with_defaults();
        let with_fixed = q.distance(&at(&[0.0, 3.0]), &sp).unwrap();
        specs.pop();
        let sp1 = ParameterSpace::new(specs, vec![]).unwrap();
        let alone = q.distance(&at(&[0.0]), &sp1).unwrap();
        assert_eq!(with_fixed, alone);
    }

    #[test]
    fn physical_lite_reproduces_hand_numbers_at_the_initial_point() {
        // At the stock receiver's initial sizing: gm1 = sqrt(2·200µ·800·5m)
        // is exactly 0.04 S, so every downstream figure is checkable by hand.
        let sp = ParameterSpace::rx_receiver();
        let ev = PhysicalLite::with_defaults();
        let ind = sp.initial_individual(0);
        let s = ev.stages(&ind, &sp).unwrap();

        let gm1 = 0.04;
        assert!((ev.gm(144e-6, 5e-3) - gm1).abs() < 1e-15);
        assert!((s.f1 - (1.0 + 1.33 / (gm1 * 50.0))).abs() < 1e-12); // 1.665
        let gm1_eff = gm1 / (1.0 + gm1 * 200.0);
        let av1 = gm1_eff * 5000.0;
        assert!((s.g1 - av1 * av1).abs() < 1e-9);

        let r = ev.evaluate(&ind, &sp).unwrap();
        let m = r.metrics.unwrap();
        // VDD·(I1+I2+I3) = 1.2 · 9 mA
        assert!((m.power_w - 0.0108).abs() < 1e-15);
        assert!(m.gain_db > 0.0);
        assert!(m.nf_db > 0.0 && m.nf_db < 5.0, "nf {}", m.nf_db);
        assert!(r.fitness > 0.0);
    }

    #[test]
    fn physical_lite_noise_matches_friis_on_its_own_stages() {
        let sp = ParameterSpace::rx_receiver();
        let ev = PhysicalLite::with_defaults();
        let mut rng = derive_stream(5, &[1]);
        for i in 0..50 {
            let ind = sp.random_individual(i, &mut rng);
            let s = ev.stages(&ind, &sp).unwrap();
            let f = friis_cascade(&[s.f1, s.f2], &[s.g1]).unwrap();
            let m = ev.evaluate(&ind, &sp).unwrap().metrics.unwrap();
            assert!((m.nf_db - lin_to_db(f).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn physical_lite_requires_the_receiver_parameters() {
        let sp = unit_space(3, 0.1);
        let ev = PhysicalLite::with_defaults();
        let err = ev.evaluate(&at(&[0.0; 3]), &sp).unwrap_err();
        assert!(matches!(err, EvalError::MissingParameter(_)));
    }

    #[test]
    fn physical_lite_rejects_unknown_units_and_nonpositive_values() {
        let mk = |unit: Option<&str>, min: f64| {
            let mut specs: Vec<ParameterSpec> = ParameterSpace::rx_receiver()
                .specs()
                .to_vec();
            let r1 = specs.iter_mut().find(|s| s.name == "R1").unwrap();
            if let Some(u) = unit {
                r1.unit = Some(u.to_string());
            }
            r1.min = min;
            if r1.initial < min {
                r1.initial = min;
            }
            ParameterSpace::new(
                specs,
                vec![
                    vec!["M4_width".into(), "M5_width".into()],
                    vec!["M6_width".into(), "M7_width".into()],
                ],
            )
            .unwrap()
        };
        let ev = PhysicalLite::with_defaults();

        let sp = mk(Some("furlong"), 3000.0);
        let err = ev.evaluate(&sp.initial_individual(0), &sp).unwrap_err();
        assert!(matches!(err, EvalError::UnknownUnit { .. }));

        // R1 grid widened down to 0: a zero draw must be rejected, not
        // silently fed to a log.
        let sp = mk(None, 0.0);
        let mut ind = sp.initial_individual(0);
        ind.values[0] = 0.0;
        let err = ev.evaluate(&ind, &sp).unwrap_err();
        assert!(matches!(err, EvalError::NonPositive { .. }));
    }

    #[test]
    fn benchmarks_peak_where_documented() {
        let sp = unit_space(4, 0.05);
        let sphere = Benchmark::new(BenchmarkFunction::Sphere, None);
        assert_eq!(sphere.evaluate(&at(&[0.0; 4]), &sp).unwrap().fitness, 0.0);
        assert!(sphere.evaluate(&at(&[0.4, 0.0, 0.0, 0.0]), &sp).unwrap().fitness < 0.0);

        let sphere_off = Benchmark::new(BenchmarkFunction::Sphere, Some(vec![0.25]));
        assert_eq!(
            sphere_off.evaluate(&at(&[0.25; 4]), &sp).unwrap().fitness,
            0.0
        );

        let rast = Benchmark::new(BenchmarkFunction::Rastrigin, None);
        let peak = rast.evaluate(&at(&[0.5; 4]), &sp).unwrap().fitness;
        assert!(peak.abs() < 1e-9, "rastrigin peak {peak}");
        // neighboring local optimum is strictly worse
        let local = rast.evaluate(&at(&[0.6, 0.5, 0.5, 0.5]), &sp).unwrap().fitness;
        assert!(local < peak && local > -15.0);

        let rosen = Benchmark::new(BenchmarkFunction::Rosenbrock, None);
        let peak = rosen.evaluate(&at(&[0.75; 4]), &sp).unwrap().fitness;
        assert!(peak.abs() < 1e-9, "rosenbrock peak {peak}");
        assert!(rosen.evaluate(&at(&[0.5; 4]), &sp).unwrap().fitness < peak);

        assert!(rast.evaluate(&at(&[0.5; 4]), &sp).unwrap().metrics.is_none());
    }

    #[test]
    fn benchmark_offset_broadcast_and_length_check() {
        let sp = unit_space(3, 0.05);
        let ok = Benchmark::new(BenchmarkFunction::Sphere, Some(vec![0.1, 0.2, 0.3]));
        assert_eq!(
            ok.evaluate(&at(&[0.1, 0.2, 0.3]), &sp).unwrap().fitness,
            0.0
        );
        let bad = Benchmark::new(BenchmarkFunction::Sphere, Some(vec![0.1, 0.2]));
        assert!(matches!(
            bad.evaluate(&at(&[0.0; 3]), &sp),
            Err(EvalError::OffsetsLength { got: 2, expected: 3 })
        ));
    }

    #[test]
    fn evaluators_are_pure() {
        let sp = ParameterSpace::rx_receiver();
        let evs: Vec<Box<dyn Evaluator>> = vec![
            Box::new(QuadraticRf::with_defaults()),
            Box::new(PhysicalLite::with_defaults()),
        ];
        let mut rng = derive_stream(77, &[0]);
        for ev in &evs {
            for i in 0..200 {
                let ind = sp.random_individual(i, &mut rng);
                let a = ev.evaluate(&ind, &sp).unwrap();
                let b = ev.evaluate(&ind, &sp).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn batch_evaluation_keeps_order_regardless_of_workers() {
        struct Wide(QuadraticRf);
        impl Evaluator for Wide {
            fn evaluate(
                &self,
                ind: &Individual,
                space: &ParameterSpace,
            ) -> Result<EvalResult, EvalError> {
                self.0.evaluate(ind, space)
            }
            fn workers(&self) -> usize {
                4
            }
        }

        let sp = unit_space(6, 0.01);
        let mut rng = derive_stream(3, &[2]);
        let inds: Vec<Individual> = (0..37).map(|i| sp.random_individual(i, &mut rng)).collect();

        let serial = QuadraticRf::with_defaults();
        let wide = Wide(QuadraticRf::with_defaults());
        let a: Vec<f64> = evaluate_batch(&serial, &sp, &inds)
            .into_iter()
            .map(|r| r.unwrap().fitness)
            .collect();
        let b: Vec<f64> = evaluate_batch(&wide, &sp, &inds)
            .into_iter()
            .map(|r| r.unwrap().fitness)
            .collect();
        assert_eq!(a, b);
    }

    #[test]
    fn unit_scales() {
        assert_eq!(unit_scale("ohm"), Some(1.0));
        assert_eq!(unit_scale("pF"), Some(1e-12));
        assert_eq!(unit_scale("mA"), Some(1e-3));
        assert_eq!(unit_scale("um"), Some(1e-6));
        assert_eq!(unit_scale("µm"), Some(1e-6));
        assert_eq!(unit_scale(""), Some(1.0));
        assert_eq!(unit_scale("parsec"), None);
    }
}
