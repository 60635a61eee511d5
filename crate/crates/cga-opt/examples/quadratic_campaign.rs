//! A first optimization campaign, end to end, on the built-in quadratic
//! surrogate: build the stock receiver space, run the circuit-centric
//! optimizer under an evaluation budget, and read the run ledger.
//!
//!     cargo run --example quadratic_campaign

use cga_opt::cga::{run_cga, CgaConfig};
use cga_opt::eval::QuadraticRf;
use cga_opt::fitness::FomConfig;
use cga_opt::space::ParameterSpace;

fn main() {
    // The stock two-stage receiver space: 21 design variables, two matched
    // pairs tied together, so 19 move freely.
    let space = ParameterSpace::rx_receiver();
    println!(
        "space: {} variables, {} free after ties\n",
        space.specs().len(),
        space.free_len()
    );

    // The quadratic surrogate is a smooth stand-in for a simulator: gain
    // peaks (and noise/power bottom out) at a hidden target point, here the
    // center of every range.
    let evaluator = QuadraticRf::with_defaults();

    let config = CgaConfig {
        max_simulations: Some(800),
        seed: 1,
        ..CgaConfig::default()
    };
    let log = run_cga(&space, &config, &evaluator, &FomConfig::default())
        .expect("surrogate runs cannot fail");

    // One record per generation: generation 0 is the random initial
    // population, each later record is one mutation sweep over the champion.
    println!("gen  evals  best FoM      accepted");
    for rec in &log.records {
        println!(
            "{:>3}  {:>5}  {:<12.4}  {}",
            rec.generation,
            rec.cumulative_evaluations,
            rec.champion.fitness_or_neg_inf(),
            if rec.accepted { "yes" } else { "" },
        );
    }

    let champion = log.champion();
    println!("\nchampion ({:?}):", log.terminated_by);
    print!("{}", space.format_individual(champion));
    if let Some(m) = &champion.metrics {
        println!(
            "\n  gain {:.2} dB | power {:.4} W | NF {:.2} dB | FoM {:.2}",
            m.gain_db,
            m.power_w,
            m.nf_db,
            champion.fitness_or_neg_inf()
        );
    }
}
