//! Derivative-free optimization of quantized circuit-parameter spaces.
//!
//! The crate tunes receiver front-ends (LNA + mixer chains and the like)
//! whose design variables live on discrete grids — resistors in 1 Ω steps,
//! transistor widths in 0.01 µm steps — and whose quality is judged by a
//! single figure of merit combining gain, noise figure and power draw.
//! Every candidate costs one (possibly expensive) circuit evaluation, so
//! the optimizers are budget-aware and every run is seed-reproducible.
//!
//! The pieces:
//!
//! * [`space`] — quantized parameter grids, tied variables (mirrored device
//!   pairs), and the [`space::Individual`] candidate representation.
//! * [`fitness`] — the figure of merit `gain / (NF × power)`, constraint
//!   rules that replace out-of-spec candidates with a penalty score, and a
//!   Friis cascade helper for multi-stage noise analysis.
//! * [`eval`] — the [`eval::Evaluator`] trait plus built-in surrogates: a
//!   quadratic response model, a small-signal two-stage receiver model, and
//!   classic benchmark functions mapped onto parameter grids.
//! * [`sim`] — an adapter that renders netlist templates and drives an
//!   external simulator process per candidate.
//! * [`cga`] — the circuit-centric optimizer: keep one champion, sweep a
//!   single-variable mutation across every free variable each generation,
//!   accept only strict improvements.
//! * [`ga`] — a traditional genetic-algorithm baseline (truncation
//!   selection, crossover, single-component mutation) for comparisons.
//! * [`runlog`] — the run ledger: per-generation records, a complete
//!   evaluation log, JSON/CSV serialization.
//! * [`config`] — JSON run manifests binding a space, an evaluator and an
//!   algorithm together.
//! * [`cli`] — the `optimize` / `compare` / `eval` campaign commands used
//!   by the `cga-opt` binary.
//!
//! ```
//! use cga_opt::cga::{run_cga, CgaConfig};
//! use cga_opt::eval::QuadraticRf;
//! use cga_opt::fitness::FomConfig;
//! use cga_opt::space::ParameterSpace;
//!
//! let space = ParameterSpace::rx_receiver();
//! let evaluator = QuadraticRf::with_defaults();
//! let config = CgaConfig {
//!     max_simulations: Some(200),
//!     seed: 7,
//!     ..CgaConfig::default()
//! };
//! let log = run_cga(&space, &config, &evaluator, &FomConfig::default()).unwrap();
//! assert!(log.champion().fitness_or_neg_inf() > 0.0);
//! ```

pub mod cga;
pub mod cli;
pub mod config;
pub mod eval;
pub mod fitness;
pub mod ga;
pub mod rng;
pub mod runlog;
pub mod sim;
pub mod space;

pub use cga::{run_cga, CgaConfig};
pub use config::{AlgorithmConfig, EvaluatorSpec, RunManifest};
pub use eval::{evaluate_batch, EvalResult, Evaluator};
pub use fitness::{compute_fom, friis_cascade, FomConfig, Metrics};
pub use ga::{run_ga, GaConfig};
pub use runlog::RunLog;
pub use sim::{NetlistTemplate, SimAdapter, SimJobConfig};
pub use space::{Individual, ParameterSpace, ParameterSpec};
