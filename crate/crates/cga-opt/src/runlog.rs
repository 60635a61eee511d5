//! Campaign audit trail.
//!
//! Every run produces a [`RunLog`]: the full configuration (so the run can be
//! reproduced from the log alone), one record per generation, and every
//! single evaluation in order. The JSON and CSV writers are deterministic —
//! two runs with the same seed produce byte-identical artifacts.

use serde::{Deserialize, Serialize};

use crate::config::AlgorithmConfig;
use crate::eval::{evaluate_batch, Evaluator};
use crate::fitness::FomConfig;
use crate::space::{Individual, ParameterSpace};

/// Why the run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// The champion reached the target figure of merit.
    TargetReached,
    /// The simulation budget ran out (or the configured generations did).
    BudgetExhausted,
}

/// One generation's summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationRecord {
    pub generation: u64,
    /// Best individual as of the end of this generation.
    pub champion: Individual,
    /// Evaluations charged during this generation.
    pub candidates_evaluated: u64,
    /// Evaluations charged since the start of the run.
    pub cumulative_evaluations: u64,
    /// Whether the champion changed in this generation (true for
    /// generation 0, where the champion is first established).
    pub accepted: bool,
}

/// One evaluation event, in evaluation order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationRecord {
    pub generation: u64,
    pub individual: Individual,
}

/// The complete, replayable record of one optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    #[serde(flatten)]
    pub algorithm: AlgorithmConfig,
    pub fom: FomConfig,
    /// The evaluator spec as configured, when the run came from a manifest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evaluator: Option<serde_json::Value>,
    pub space: ParameterSpace,
    pub records: Vec<GenerationRecord>,
    pub all_evaluations: Vec<EvaluationRecord>,
    pub terminated_by: Termination,
}

impl RunLog {
    /// Final champion (the last generation's).
    pub fn champion(&self) -> &Individual {
        &self
            .records
            .last()
            .expect("a run log always has generation 0")
            .champion
    }

    pub fn total_evaluations(&self) -> u64 {
        self.records
            .last()
            .map(|r| r.cumulative_evaluations)
            .unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("run log serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// `convergence.csv`: one row per generation.
    pub fn convergence_csv(&self) -> String {
        let mut out = String::from("generation,best_fom,gain_db,power_w,nf_db\n");
        for r in &self.records {
            let m = r.champion.metrics;
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.generation,
                csv_f64(Some(r.champion.fitness_or_neg_inf())),
                csv_f64(m.map(|m| m.gain_db)),
                csv_f64(m.map(|m| m.power_w)),
                csv_f64(m.map(|m| m.nf_db)),
            ));
        }
        out
    }

    /// `evaluations.csv`: one row per evaluation, with the free-variable
    /// values spread into named columns.
    pub fn evaluations_csv(&self) -> String {
        let mut out = String::from("generation,individual_id,parent_id,fitness,gain_db,power_w,nf_db");
        for name in self.space.free_names() {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for e in &self.all_evaluations {
            let ind = &e.individual;
            let m = ind.metrics;
            out.push_str(&format!(
                "{},{},{},{},{},{},{}",
                e.generation,
                ind.id,
                ind.parent_id.map(|p| p.to_string()).unwrap_or_default(),
                csv_f64(ind.fitness),
                csv_f64(m.map(|m| m.gain_db)),
                csv_f64(m.map(|m| m.power_w)),
                csv_f64(m.map(|m| m.nf_db)),
            ));
            for v in &ind.values {
                out.push(',');
                out.push_str(&format!("{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// CSV cell for an optional float: empty when absent, `-inf`/`inf`/`nan`
/// spelled out, shortest round-trip decimal otherwise.
pub fn csv_f64(v: Option<f64>) -> String {
    match v {
        None => String::new(),
        Some(x) if x.is_nan() => "nan".into(),
        Some(x) if x == f64::INFINITY => "inf".into(),
        Some(x) if x == f64::NEG_INFINITY => "-inf".into(),
        Some(x) => format!("{x}"),
    }
}

/// Pick the best of a fully evaluated population: highest fitness, ties to
/// the lowest id so the outcome never depends on iteration order.
pub fn best_of(population: &[Individual]) -> &Individual {
    population
        .iter()
        .reduce(|best, c| {
            if c.fitness_or_neg_inf() > best.fitness_or_neg_inf()
                || (c.fitness_or_neg_inf() == best.fitness_or_neg_inf() && c.id < best.id)
            {
                c
            } else {
                best
            }
        })
        .expect("population is non-empty")
}

/// Shared bookkeeping both optimizers drive: id allocation, budget charging,
/// failure containment, and the evaluation ledger.
pub(crate) struct Driver<'a> {
    pub space: &'a ParameterSpace,
    evaluator: &'a dyn Evaluator,
    pub records: Vec<GenerationRecord>,
    pub evaluations: Vec<EvaluationRecord>,
    /// Evaluations charged so far.
    pub used: u64,
    next_id: u64,
}

impl<'a> Driver<'a> {
    pub fn new(space: &'a ParameterSpace, evaluator: &'a dyn Evaluator) -> Self {
        Driver {
            space,
            evaluator,
            records: Vec::new(),
            evaluations: Vec::new(),
            used: 0,
            next_id: 0,
        }
    }

    pub fn with_first_id(space: &'a ParameterSpace, evaluator: &'a dyn Evaluator, id: u64) -> Self {
        let mut d = Self::new(space, evaluator);
        d.next_id = id;
        d
    }

    pub fn take_id(&mut self) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    /// Evaluate a batch, charge the budget, log every event. A failed
    /// evaluation (simulator crash, domain error) is contained: the
    /// individual comes back with `-inf` fitness and still costs one
    /// evaluation.
    pub fn evaluate_all(&mut self, mut batch: Vec<Individual>, generation: u64) -> Vec<Individual> {
        let results = evaluate_batch(self.evaluator, self.space, &batch);
        for (ind, result) in batch.iter_mut().zip(results) {
            match result {
                Ok(r) => {
                    ind.fitness = Some(r.fitness);
                    ind.metrics = r.metrics;
                    self.used += u64::from(r.evaluations_consumed.max(1));
                }
                Err(_) => {
                    ind.fitness = Some(f64::NEG_INFINITY);
                    ind.metrics = None;
                    self.used += 1;
                }
            }
            self.evaluations.push(EvaluationRecord {
                generation,
                individual: ind.clone(),
            });
        }
        batch
    }

    pub fn record_generation(&mut self, generation: u64, champion: &Individual, accepted: bool) {
        let prior: u64 = self
            .records
            .last()
            .map(|r| r.cumulative_evaluations)
            .unwrap_or(0);
        self.records.push(GenerationRecord {
            generation,
            champion: champion.clone(),
            candidates_evaluated: self.used - prior,
            cumulative_evaluations: self.used,
            accepted,
        });
    }

    pub fn finish(
        self,
        algorithm: AlgorithmConfig,
        fom: FomConfig,
        terminated_by: Termination,
    ) -> RunLog {
        RunLog {
            algorithm,
            fom,
            evaluator: None,
            space: self.space.clone(),
            records: self.records,
            all_evaluations: self.evaluations,
            terminated_by,
        }
    }
}
