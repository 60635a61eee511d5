//! Classic benchmark landscapes as evaluators: sphere (smooth, convex),
//! rastrigin (a lattice of local optima), rosenbrock (a curved valley).
//! Each maps the grid's normalized coordinates onto its usual window and is
//! negated so the framework's maximizer drives the cost to zero. Handy for
//! studying optimizer behavior where the global optimum is known.
//!
//! Also shown: the GA's optional shrink schedule, which cuts the population
//! to its selected third every generation (81 -> 27 -> 9 -> 3 -> 1) instead
//! of refilling it — a much thriftier 121-evaluation run.
//!
//!     cargo run --example benchmark_functions

use cga_opt::cga::{run_cga, CgaConfig};
use cga_opt::eval::{Benchmark, BenchmarkFunction};
use cga_opt::fitness::FomConfig;
use cga_opt::ga::{run_ga, GaConfig};
use cga_opt::space::ParameterSpace;

fn main() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let space = ParameterSpace::load(&root.join("spaces/unit_cube5.json")).expect("space");
    let fom = FomConfig::unconstrained();

    println!("CGA, 330 evaluations on the 5-variable unit cube (cost = -fitness):");
    for function in [
        BenchmarkFunction::Sphere,
        BenchmarkFunction::Rastrigin,
        BenchmarkFunction::Rosenbrock,
    ] {
        let evaluator = Benchmark::new(function, None);
        let cfg = CgaConfig {
            max_simulations: Some(330),
            seed: 17,
            ..CgaConfig::default()
        };
        let log = run_cga(&space, &cfg, &evaluator, &fom).unwrap();
        println!(
            "  {function:?}: final cost {:.6} after {} evaluations",
            -log.champion().fitness_or_neg_inf(),
            log.total_evaluations()
        );
    }

    // The shrink schedule trades population diversity for evaluations:
    // selection keeps the top third and nothing refills the ranks.
    let evaluator = Benchmark::new(BenchmarkFunction::Sphere, None);
    let shrink = GaConfig {
        shrink_schedule: true,
        seed: 17,
        ..GaConfig::default()
    };
    let log = run_ga(&space, &shrink, &evaluator, &fom).unwrap();
    let sizes: Vec<u64> = log
        .records
        .iter()
        .map(|r| r.candidates_evaluated)
        .collect();
    println!(
        "\nshrinking GA: generation sizes {sizes:?}, {} evaluations total, final cost {:.4}",
        log.total_evaluations(),
        -log.champion().fitness_or_neg_inf()
    );
}
