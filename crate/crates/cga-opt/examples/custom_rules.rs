//! Shaping a campaign with constraint rules: the optimizer maximizes one
//! scalar, so specifications ("no more than 5 dB noise", "at most 10 mW")
//! enter as rules that replace a violating measurement with a huge penalty
//! value before the figure of merit divides by it. A candidate that breaks
//! any rule scores near zero and the search routes around it.
//!
//!     cargo run --example custom_rules

use cga_opt::cga::{run_cga, CgaConfig};
use cga_opt::eval::PhysicalLite;
use cga_opt::fitness::{Comparator, ConstraintRule, FomConfig, MetricKind};
use cga_opt::space::ParameterSpace;

fn run(space: &ParameterSpace, fom: &FomConfig, label: &str) {
    // The evaluator owns the rules: it turns measurements into fitness.
    let model = PhysicalLite::new(Default::default(), fom.clone()).unwrap();
    let config = CgaConfig {
        max_simulations: Some(600),
        seed: 5,
        ..CgaConfig::default()
    };
    let log = run_cga(space, &config, &model, fom).unwrap();
    let m = log.champion().metrics.unwrap();
    println!(
        "{label:<28} champion: gain {:>6.2} dB | NF {:.2} dB | power {:.4} W | FoM {:.1}",
        m.gain_db,
        m.nf_db,
        m.power_w,
        log.champion().fitness_or_neg_inf()
    );
}

fn main() {
    let space = ParameterSpace::rx_receiver();

    // Stock rule: NF above 5 dB disqualifies.
    run(&space, &FomConfig::default(), "stock (NF <= 5 dB)");

    // Tighter brief: also cap power at 10 mW. The FoM already dislikes
    // power, but a hard cap changes *where* the optimum sits, not just how
    // much it scores.
    let capped = FomConfig {
        rules: vec![
            ConstraintRule {
                metric: MetricKind::NfDb,
                comparator: Comparator::Greater,
                threshold: 5.0,
                replacement: 10000.0,
            },
            ConstraintRule {
                metric: MetricKind::PowerW,
                comparator: Comparator::Greater,
                threshold: 0.010,
                replacement: 10000.0,
            },
        ],
    };
    run(&space, &capped, "power cap (<= 10 mW)");

    // A gain floor uses the other comparator direction: anything under
    // 30 dB is out.
    let floor = FomConfig {
        rules: vec![
            ConstraintRule {
                metric: MetricKind::NfDb,
                comparator: Comparator::Greater,
                threshold: 5.0,
                replacement: 10000.0,
            },
            ConstraintRule {
                metric: MetricKind::GainDb,
                comparator: Comparator::Less,
                threshold: 30.0,
                replacement: -10000.0,
            },
        ],
    };
    run(&space, &floor, "gain floor (>= 30 dB)");
}
