//! Classical generational GA baseline.
//!
//! The reference point the circuit-centric algorithm is measured against: a
//! population, truncation selection of the top fraction, crossover between
//! random selected parents, and a single-component mutation. One generation
//! replaces the whole population (no elitism unless asked for), so the
//! per-generation champion may well get *worse* — that non-monotonicity is
//! part of what the baseline demonstrates, and the comparison harness charges
//! both algorithms the same evaluation budget.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{AlgorithmConfig, ConfigError};
use crate::eval::Evaluator;
use crate::fitness::FomConfig;
use crate::rng::derive_stream;
use crate::runlog::{best_of, Driver, RunLog, Termination};
use crate::space::{Individual, ParameterSpace, SpaceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossoverKind {
    /// Each coordinate from either parent with equal probability.
    #[default]
    Uniform,
    /// One cut point; head from the first parent, tail from the second.
    SinglePoint,
}

/// GA settings as they appear in run-config JSON (`"algorithm": "ga"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub pop_size: usize,
    /// Fraction of the population kept by truncation selection.
    pub selection_fraction: f64,
    /// Generations after the initial population.
    pub generations: u64,
    pub crossover: CrossoverKind,
    /// Probability that an offspring receives the single-component mutation.
    pub mutation_rate: f64,
    /// Master seed; every random decision derives from it.
    pub seed: u64,
    /// Carry the champion into the next generation unchanged.
    pub elitism: bool,
    /// Fidelity knob: instead of refilling to `pop_size`, each generation
    /// keeps only as many offspring as it selected parents, shrinking the
    /// population (81 -> 27 -> 9 -> 3 -> 1 with a third kept). The run ends
    /// early once selection would be empty.
    pub shrink_schedule: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            pop_size: 81,
            selection_fraction: 1.0 / 3.0,
            generations: 5,
            crossover: CrossoverKind::default(),
            mutation_rate: 1.0,
            seed: 0,
            elitism: false,
            shrink_schedule: false,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.pop_size < 3 {
            return Err(ConfigError::Invalid {
                field: "pop_size",
                reason: format!("must be at least 3, got {}", self.pop_size),
            });
        }
        if !(self.selection_fraction > 0.0 && self.selection_fraction <= 1.0) {
            return Err(ConfigError::Invalid {
                field: "selection_fraction",
                reason: format!("must be in (0, 1], got {}", self.selection_fraction),
            });
        }
        if self.generations < 1 {
            return Err(ConfigError::Invalid {
                field: "generations",
                reason: "must be at least 1".into(),
            });
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(ConfigError::Invalid {
                field: "mutation_rate",
                reason: format!("must be in [0, 1], got {}", self.mutation_rate),
            });
        }
        if selection_count(self.pop_size, self.selection_fraction) == 0 {
            return Err(ConfigError::EmptySelection {
                pop_size: self.pop_size,
                fraction: self.selection_fraction,
            });
        }
        Ok(())
    }

    /// Evaluations charged per generation (elitism carries one individual
    /// over without re-evaluating it).
    pub fn evaluations_per_generation(&self) -> u64 {
        self.pop_size as u64 - u64::from(self.elitism)
    }

    /// Total evaluation budget of a full run.
    pub fn total_evaluations(&self) -> u64 {
        self.pop_size as u64 + self.generations * self.evaluations_per_generation()
    }
}

/// `floor(n * fraction)`, nudged so exact rationals like 1/3 of 81 round the
/// way arithmetic says they should (81 * (1/3 as f64) lands a hair under 27).
pub fn selection_count(n: usize, fraction: f64) -> usize {
    ((n as f64 * fraction) + 1e-9).floor() as usize
}

/// Truncation selection: the top `floor(len * fraction)` by fitness, best
/// first, ties broken toward lower ids. Errors if that count is zero.
pub fn select_top_fraction(
    population: &[Individual],
    fraction: f64,
) -> Result<Vec<Individual>, ConfigError> {
    let count = selection_count(population.len(), fraction);
    if count == 0 {
        return Err(ConfigError::EmptySelection {
            pop_size: population.len(),
            fraction,
        });
    }
    let mut order: Vec<&Individual> = population.iter().collect();
    order.sort_by(|a, b| {
        b.fitness_or_neg_inf()
            .total_cmp(&a.fitness_or_neg_inf())
            .then(a.id.cmp(&b.id))
    });
    Ok(order[..count].iter().map(|i| (*i).clone()).collect())
}

/// Cross two parents. The child gets the fresh `id`, `parent_id = a.id`, and
/// no fitness. Parents must come from the same space (same value count).
pub fn crossover<R: rand::Rng + ?Sized>(
    a: &Individual,
    b: &Individual,
    kind: CrossoverKind,
    id: u64,
    rng: &mut R,
) -> Result<Individual, SpaceError> {
    if a.values.len() != b.values.len() {
        return Err(SpaceError::LengthMismatch {
            got: b.values.len(),
            expected: a.values.len(),
        });
    }
    let n = a.values.len();
    let values: Vec<f64> = match kind {
        CrossoverKind::Uniform => a
            .values
            .iter()
            .zip(&b.values)
            .map(|(&x, &y)| if rng.random_bool(0.5) { x } else { y })
            .collect(),
        CrossoverKind::SinglePoint => {
            if n < 2 {
                a.values.clone()
            } else {
                let k = rng.random_range(1..n);
                let mut v = a.values[..k].to_vec();
                v.extend_from_slice(&b.values[k..]);
                v
            }
        }
    };
    Ok(Individual {
        id,
        parent_id: Some(a.id),
        values,
        fitness: None,
        metrics: None,
    })
}

/// Redraw one uniformly chosen free variable of `ind`.
pub fn mutate_random_component<R: rand::Rng + ?Sized>(
    ind: &Individual,
    space: &ParameterSpace,
    id: u64,
    rng: &mut R,
) -> Result<Individual, SpaceError> {
    let index = rng.random_range(0..space.free_len());
    space.mutate_one(ind, index, id, rng)
}

/// Run a full GA campaign.
pub fn run_ga(
    space: &ParameterSpace,
    cfg: &GaConfig,
    evaluator: &dyn Evaluator,
    fom: &FomConfig,
) -> Result<RunLog, ConfigError> {
    cfg.validate()?;
    fom.validate()?;

    let mut driver = Driver::new(space, evaluator);
    let initial: Vec<Individual> = (0..cfg.pop_size)
        .map(|i| {
            let mut rng = derive_stream(cfg.seed, &[0, i as u64]);
            let id = driver.take_id();
            space.random_individual(id, &mut rng)
        })
        .collect();
    let mut pop = driver.evaluate_all(initial, 0);
    let mut champion = best_of(&pop).clone();
    driver.record_generation(0, &champion, true);

    for g in 1..=cfg.generations {
        let count = selection_count(pop.len(), cfg.selection_fraction);
        if cfg.shrink_schedule && count == 0 {
            break; // the schedule has collapsed to nothing selectable
        }
        let selected = select_top_fraction(&pop, cfg.selection_fraction)?;

        let target_size = if cfg.shrink_schedule {
            selected.len()
        } else {
            cfg.pop_size
        };
        let elite = cfg.elitism.then(|| best_of(&pop).clone());
        let offspring_count = target_size.saturating_sub(usize::from(elite.is_some()));

        let offspring: Vec<Individual> = (0..offspring_count)
            .map(|j| {
                // one stream per offspring covers parent picks, crossover
                // coins and the mutation in a fixed draw order
                let mut rng = derive_stream(cfg.seed, &[g, j as u64]);
                let pa = &selected[rng.random_range(0..selected.len())];
                let pb = &selected[rng.random_range(0..selected.len())];
                let id = driver.take_id();
                let mut child = crossover(pa, pb, cfg.crossover, id, &mut rng)
                    .expect("parents share the space");
                if cfg.mutation_rate > 0.0 && rng.random_bool(cfg.mutation_rate) {
                    let mutated =
                        mutate_random_component(&child, space, child.id, &mut rng)
                            .expect("space is non-empty");
                    // keep the crossover lineage; only the values mutate
                    child.values = mutated.values;
                }
                child
            })
            .collect();

        let mut next = driver.evaluate_all(offspring, g);
        if let Some(e) = elite {
            next.push(e);
        }
        pop = next;

        let new_champion = best_of(&pop).clone();
        let accepted = new_champion.id != champion.id;
        champion = new_champion;
        driver.record_generation(g, &champion, accepted);

        if cfg.shrink_schedule && pop.len() == 1 {
            break; // nothing left to recombine
        }
    }

    Ok(driver.finish(
        AlgorithmConfig::Ga(cfg.clone()),
        fom.clone(),
        Termination::BudgetExhausted,
    ))
}
