//! The small-signal receiver surrogate: a closed-form two-stage model
//! (degenerated common-source LNA into a switching mixer) whose gain and
//! noise figure respond to the real design variables — resistor loads, bias
//! currents, device widths. Dial R3 up and gain falls; starve I1 and the
//! noise figure climbs. Useful when a campaign should stress physically
//! meaningful trade-offs without invoking a simulator.
//!
//!     cargo run --example physical_lite_receiver

use cga_opt::cga::{run_cga, CgaConfig};
use cga_opt::eval::{Evaluator, PhysicalLite};
use cga_opt::fitness::{lin_to_db, FomConfig};
use cga_opt::space::ParameterSpace;

fn main() {
    let space = ParameterSpace::rx_receiver();
    let model = PhysicalLite::with_defaults();

    // Stage breakdown at the stock initial sizing.
    let initial = space.initial_individual(0);
    let s = model.stages(&initial, &space).expect("initial point is valid");
    println!("initial sizing, stage by stage:");
    println!(
        "  LNA:   gain {:>6.2} dB   noise factor {:.3}",
        lin_to_db(s.g1).unwrap(),
        s.f1
    );
    println!(
        "  mixer: gain {:>6.2} dB   noise factor {:.3}",
        lin_to_db(s.g2).unwrap(),
        s.f2
    );
    let r = model.evaluate(&initial, &space).unwrap();
    let m = r.metrics.unwrap();
    println!(
        "  chain: gain {:>6.2} dB   NF {:.2} dB   power {:.4} W   FoM {:.1}\n",
        m.gain_db, m.nf_db, m.power_w, r.fitness
    );

    // Optimize. The model rewards large R1/Rm and healthy gm — watch the
    // champion push load resistors up and trade bias current against noise.
    let config = CgaConfig {
        max_simulations: Some(600),
        seed: 7,
        ..CgaConfig::default()
    };
    let log = run_cga(&space, &config, &model, &FomConfig::default()).unwrap();
    let champion = log.champion();
    let cm = champion.metrics.as_ref().unwrap();

    println!(
        "after {} evaluations: FoM {:.1} -> {:.1}",
        log.total_evaluations(),
        r.fitness,
        champion.fitness_or_neg_inf()
    );
    println!(
        "  gain {:.2} -> {:.2} dB | NF {:.2} -> {:.2} dB | power {:.4} -> {:.4} W\n",
        m.gain_db, cm.gain_db, m.nf_db, cm.nf_db, m.power_w, cm.power_w
    );
    print!("{}", space.format_individual(champion));

    // Every champion coordinate stays inside its declared range — the
    // optimizer can only ever pick grid points.
    space.check_individual(champion).expect("champion is on-grid");
}
