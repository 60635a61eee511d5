//! Driving an external simulator: render a netlist template for each
//! candidate, run a command in a scratch directory, parse the measurements
//! it leaves behind. Here the "simulator" is scripts/echo_sim.sh — a shell
//! stand-in that applies the same small-signal model as the physical_lite
//! evaluator — so the whole loop runs hermetically; point `command` at a
//! real simulator wrapper to do this for actual circuits.
//!
//!     cargo run --example external_simulator

use std::collections::BTreeMap;
use std::path::Path;

use cga_opt::cga::{run_cga, CgaConfig};
use cga_opt::eval::Evaluator;
use cga_opt::fitness::FomConfig;
use cga_opt::sim::{NetlistTemplate, SimAdapter, SimJobConfig};
use cga_opt::space::ParameterSpace;

fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let space = ParameterSpace::rx_receiver();

    let template =
        NetlistTemplate::load(&root.join("templates/rx_receiver.sp.tmpl")).expect("template");
    println!(
        "template needs {} placeholder names (21 variables + VDD, RF_AMP)",
        template.required_names().expect("template scans").len()
    );

    // The command runs with the scratch directory as cwd; `{netlist}`
    // expands to the rendered netlist's path. The script must leave a
    // results.txt with gain_db / nf_db / power_w lines.
    let mut job = SimJobConfig::new(
        vec![
            root.join("scripts/echo_sim.sh").display().to_string(),
            "{netlist}".to_string(),
        ],
        10.0,
        "results.txt",
    );
    job.fixed_constants =
        BTreeMap::from([("VDD".to_string(), 1.2), ("RF_AMP".to_string(), 0.3)]);
    // The stub is stateless, so concurrent evaluations are safe.
    job.workers = 4;

    let adapter = SimAdapter::new(template, job, FomConfig::default(), true).expect("config");

    // One evaluation: render -> spawn -> parse.
    let initial = space.initial_individual(0);
    let r = adapter.evaluate(&initial, &space).expect("stub runs");
    let m = r.metrics.as_ref().unwrap();
    println!(
        "initial sizing via the subprocess: gain {:.2} dB | NF {:.2} dB | power {:.4} W | FoM {:.1}\n",
        m.gain_db, m.nf_db, m.power_w, r.fitness
    );

    // A short campaign: every candidate becomes a netlist and a process.
    let config = CgaConfig {
        pop_size: 30,
        n_gen: Some(3),
        seed: 11,
        ..CgaConfig::default()
    };
    let log = run_cga(&space, &config, &adapter, &FomConfig::default()).expect("campaign");
    println!(
        "after {} subprocess evaluations: champion FoM {:.1}",
        log.total_evaluations(),
        log.champion().fitness_or_neg_inf()
    );
    for rec in &log.records {
        println!(
            "  gen {:>2}: best {:.1}",
            rec.generation,
            rec.champion.fitness_or_neg_inf()
        );
    }
}
