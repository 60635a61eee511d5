//! The fitness arithmetic on its own: cascaded noise via the Friis
//! equation, the gain/(NF x power) figure of merit, and constraint rules
//! that collapse out-of-spec candidates.
//!
//! The engineering story the numbers tell: front-end gain suppresses every
//! later stage's noise contribution, so a receiver spends its first stage
//! buying noise immunity for the whole chain.
//!
//!     cargo run --example friis_noise_budget

use cga_opt::fitness::{
    compute_fom, db_to_lin, friis_cascade, lin_to_db, Comparator, ConstraintRule, FomConfig,
    MetricKind, Metrics,
};

fn main() {
    // A three-stage chain: LNA, mixer, IF amplifier. Noise factors and
    // gains are linear here; dB only at the edges.
    let f = [db_to_lin(2.0), db_to_lin(8.0), db_to_lin(10.0)];

    println!("stage NFs: 2, 8, 10 dB — cascade NF vs. first-stage gain:");
    println!("lna gain   cascade nf");
    for lna_gain_db in [5.0, 10.0, 15.0, 20.0, 25.0] {
        let gains = [db_to_lin(lna_gain_db), db_to_lin(12.0)];
        let total = friis_cascade(&f, &gains).unwrap();
        println!("{lna_gain_db:>5} dB   {:>7.3} dB", lin_to_db(total).unwrap());
    }
    println!("(past ~20 dB the later stages stop mattering)\n");

    // The figure of merit prefers high gain, low noise, low power — and the
    // stock rule disqualifies anything noisier than 5 dB by replacing its
    // NF with 10000 before the division.
    let fom = FomConfig::default();
    for (label, m) in [
        ("healthy", Metrics::new(16.0, 0.010, 3.5)),
        ("too noisy", Metrics::new(22.0, 0.010, 5.2)),
        ("boundary (5.0 passes)", Metrics::new(16.0, 0.010, 5.0)),
    ] {
        println!("{label:<22} FoM = {:.4}", compute_fom(&m, &fom).unwrap());
    }

    // Rules compose: cap power at 12 mW as well. Each rule tests the raw
    // measurement and substitutes a sentinel value into the formula, so one
    // violation is enough to sink a candidate.
    let strict = FomConfig {
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
                threshold: 0.012,
                replacement: 10000.0,
            },
        ],
    };
    strict.validate().unwrap();
    let hungry = Metrics::new(21.0, 0.013, 2.8);
    println!(
        "\npower-hungry candidate: FoM {:.4} under the stock rule, {:.10} with the power cap",
        compute_fom(&hungry, &fom).unwrap(),
        compute_fom(&hungry, &strict).unwrap()
    );
}
