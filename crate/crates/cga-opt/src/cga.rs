//! The circuit-centric genetic algorithm.
//!
//! Rather than evolving a large population, the CGA keeps a single champion
//! circuit and sweeps its free variables: every generation, each variable in
//! turn gets one uniform redraw while the rest stay put, every such candidate
//! is simulated, and the champion is replaced only by a strictly better
//! candidate. The loop stops when the champion reaches the target figure of
//! merit or the simulation budget cannot cover another full sweep.
//!
//! The design trades population diversity for simulator frugality: with `n`
//! free variables a generation costs exactly `n` simulations, and because
//! acceptance is elitist the champion's fitness never decreases — a property
//! the tests pin down.

use serde::{Deserialize, Serialize};

use crate::config::{AlgorithmConfig, ConfigError};
use crate::eval::Evaluator;
use crate::fitness::FomConfig;
use crate::rng::derive_stream;
use crate::runlog::{best_of, Driver, RunLog, Termination};
use crate::space::{Individual, ParameterSpace};

/// How the per-variable candidates of one generation relate to each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Every candidate mutates the generation's starting champion; the best
    /// improving candidate (if any) becomes the new champion afterwards.
    #[default]
    Independent,
    /// Candidates chain: an accepted candidate becomes the base for the
    /// remaining variables of the same sweep (coordinate-descent flavor).
    Sequential,
}

/// CGA settings as they appear in run-config JSON (`"algorithm": "cga"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CgaConfig {
    /// Random individuals drawn to seed the champion.
    pub pop_size: usize,
    /// Stop as soon as the champion's FoM reaches this.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_fom: Option<f64>,
    /// Total evaluation budget, counting the initial population.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_simulations: Option<u64>,
    /// Alternative budget spelling: number of full sweeps. Translates to
    /// `pop_size + n_gen * free_len` evaluations; setting both is an error.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_gen: Option<u64>,
    pub sweep_mode: SweepMode,
    /// Master seed; every random decision derives from it.
    pub seed: u64,
    /// Fidelity knob: accept the best candidate of each sweep even when it
    /// is worse than the champion. Off by default — it forfeits the
    /// monotonicity guarantee.
    pub accept_best_mutant_always: bool,
}

impl Default for CgaConfig {
    fn default() -> Self {
        CgaConfig {
            pop_size: 30,
            target_fom: None,
            max_simulations: None,
            n_gen: None,
            sweep_mode: SweepMode::default(),
            seed: 0,
            accept_best_mutant_always: false,
        }
    }
}

impl CgaConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.pop_size == 0 {
            return Err(ConfigError::Invalid {
                field: "pop_size",
                reason: "must be at least 1".into(),
            });
        }
        if let Some(t) = self.target_fom {
            if !t.is_finite() {
                return Err(ConfigError::Invalid {
                    field: "target_fom",
                    reason: format!("must be finite, got {t}"),
                });
            }
        }
        Ok(())
    }

    /// The evaluation budget, whichever way it was spelled.
    pub fn resolved_budget(&self, free_len: usize) -> Result<u64, ConfigError> {
        let budget = match (self.max_simulations, self.n_gen) {
            (Some(_), Some(_)) => return Err(ConfigError::ConflictingBudget),
            (Some(m), None) => m,
            (None, Some(g)) => self.pop_size as u64 + g * free_len as u64,
            (None, None) => return Err(ConfigError::MissingBudget),
        };
        if budget < self.pop_size as u64 {
            return Err(ConfigError::BudgetBelowPopulation {
                budget,
                pop_size: self.pop_size,
            });
        }
        Ok(budget)
    }
}

/// Draw and evaluate the initial random population, returning it along with
/// the starting champion (highest fitness, ties to the lowest id).
pub fn initialize_population(
    space: &ParameterSpace,
    cfg: &CgaConfig,
    evaluator: &dyn Evaluator,
) -> Result<(Vec<Individual>, Individual), ConfigError> {
    cfg.validate()?;
    cfg.resolved_budget(space.free_len())?;
    let mut driver = Driver::new(space, evaluator);
    let pop = init_into(&mut driver, cfg);
    let champion = best_of(&pop).clone();
    Ok((pop, champion))
}

fn init_into(driver: &mut Driver, cfg: &CgaConfig) -> Vec<Individual> {
    let pop: Vec<Individual> = (0..cfg.pop_size)
        .map(|i| {
            let mut rng = derive_stream(cfg.seed, &[0, i as u64]);
            let id = driver.take_id();
            driver.space.random_individual(id, &mut rng)
        })
        .collect();
    driver.evaluate_all(pop, 0)
}

/// Run one mutation sweep from `champion` (generation `g >= 1`), returning
/// the resulting champion, the candidates evaluated, and whether the
/// champion changed.
pub fn mutation_sweep(
    champion: &Individual,
    space: &ParameterSpace,
    evaluator: &dyn Evaluator,
    cfg: &CgaConfig,
    generation: u64,
) -> Result<(Individual, Vec<Individual>), ConfigError> {
    cfg.validate()?;
    space.check_individual(champion).map_err(ConfigError::from)?;
    let mut driver = Driver::with_first_id(space, evaluator, champion.id + 1);
    let (next, _) = sweep_into(&mut driver, champion, cfg, generation);
    let evaluated = driver
        .evaluations
        .into_iter()
        .map(|e| e.individual)
        .collect();
    Ok((next, evaluated))
}

fn sweep_into(
    driver: &mut Driver,
    champion: &Individual,
    cfg: &CgaConfig,
    generation: u64,
) -> (Individual, bool) {
    let free = driver.space.free_len();
    match cfg.sweep_mode {
        SweepMode::Independent => {
            let candidates: Vec<Individual> = (0..free)
                .map(|i| {
                    let mut rng = derive_stream(cfg.seed, &[generation, i as u64]);
                    let id = driver.take_id();
                    driver
                        .space
                        .mutate_one(champion, i, id, &mut rng)
                        .expect("index within free_len")
                })
                .collect();
            let candidates = driver.evaluate_all(candidates, generation);
            let mut next = champion;
            if cfg.accept_best_mutant_always {
                let best = best_of(&candidates);
                // still prefer the champion on an exact tie
                if best.fitness_or_neg_inf() != champion.fitness_or_neg_inf() {
                    next = best;
                }
            } else {
                for c in &candidates {
                    if c.fitness_or_neg_inf() > next.fitness_or_neg_inf() {
                        next = c;
                    }
                }
            }
            let accepted = next.id != champion.id;
            (next.clone(), accepted)
        }
        SweepMode::Sequential => {
            let mut base = champion.clone();
            for i in 0..free {
                let mut rng = derive_stream(cfg.seed, &[generation, i as u64]);
                let id = driver.take_id();
                let cand = driver
                    .space
                    .mutate_one(&base, i, id, &mut rng)
                    .expect("index within free_len");
                let cand = driver
                    .evaluate_all(vec![cand], generation)
                    .pop()
                    .expect("one candidate in, one out");
                if cfg.accept_best_mutant_always
                    || cand.fitness_or_neg_inf() > base.fitness_or_neg_inf()
                {
                    base = cand;
                }
            }
            let accepted = base.id != champion.id;
            (base, accepted)
        }
    }
}

/// Run a full CGA campaign.
pub fn run_cga(
    space: &ParameterSpace,
    cfg: &CgaConfig,
    evaluator: &dyn Evaluator,
    fom: &FomConfig,
) -> Result<RunLog, ConfigError> {
    cfg.validate()?;
    fom.validate()?;
    let budget = cfg.resolved_budget(space.free_len())?;
    let free = space.free_len() as u64;

    let mut driver = Driver::new(space, evaluator);
    let pop = init_into(&mut driver, cfg);
    let mut champion = best_of(&pop).clone();
    driver.record_generation(0, &champion, true);

    let mut generation = 0;
    let terminated_by = loop {
        if let Some(target) = cfg.target_fom {
            if champion.fitness_or_neg_inf() >= target {
                break Termination::TargetReached;
            }
        }
        // a partial sweep would bias the early variables, so stop instead
        if driver.used + free > budget {
            break Termination::BudgetExhausted;
        }
        generation += 1;
        let (next, accepted) = sweep_into(&mut driver, &champion, cfg, generation);
        champion = next;
        driver.record_generation(generation, &champion, accepted);
    };

    Ok(driver.finish(
        AlgorithmConfig::Cga(cfg.clone()),
        fom.clone(),
        terminated_by,
    ))
}
