//! The campaign commands behind the `cga-opt` binary.
//!
//! * `optimize` — one run from a manifest; writes `runlog.json`,
//!   `convergence.csv` and `evaluations.csv` into the output directory and
//!   prints the champion.
//! * `compare` — CGA vs. the GA baseline across a seed list under equal
//!   evaluation budgets; writes `compare.csv` and prints a median/IQR
//!   summary.
//! * `eval` — score a single parameter point (or raw metrics) and print the
//!   FoM; the quick what-if tool.
//!
//! Exit codes: `0` success, `2` configuration/usage errors (bad JSON, bad
//! flags, impossible budgets), `3` evaluator hard failure at initialization
//! (the very first population produced not a single successful evaluation,
//! or a single `eval` call failed).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::cga::{run_cga, CgaConfig};
use crate::config::{resolve, AlgorithmConfig, ConfigError, RunManifest};
use crate::fitness::{compute_fom, Metrics};
use crate::ga::{run_ga, GaConfig};
use crate::runlog::{csv_f64, RunLog};
use crate::space::{Individual, ParameterSpace};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("evaluator failure: {0}")]
    Evaluator(String),
    #[error("failed to write `{path}`")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid {what}: `{input}` ({reason})")]
    BadArg {
        what: &'static str,
        input: String,
        reason: String,
    },
}

impl CliError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Evaluator(_) => 3,
            _ => 2,
        }
    }
}

/// Render the full error chain on one line.
pub fn error_chain(err: &dyn std::error::Error) -> String {
    let mut out = err.to_string();
    let mut cur = err.source();
    while let Some(e) = cur {
        let _ = write!(out, ": {e}");
        cur = e.source();
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|source| CliError::Write {
                path: parent.display().to_string(),
                source,
            })?;
        }
    }
    fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// Parse `--seeds`: either an inclusive range `a..b` or a comma list.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>, CliError> {
    let bad = |reason: &str| CliError::BadArg {
        what: "--seeds",
        input: text.to_string(),
        reason: reason.to_string(),
    };
    let text = text.trim();
    if let Some((a, b)) = text.split_once("..") {
        let start: u64 = a.trim().parse().map_err(|_| bad("range start is not an integer"))?;
        let end: u64 = b.trim().parse().map_err(|_| bad("range end is not an integer"))?;
        if end < start {
            return Err(bad("range end precedes start"));
        }
        return Ok((start..=end).collect());
    }
    let seeds: Result<Vec<u64>, _> = text
        .split(',')
        .map(|s| s.trim().parse::<u64>().map_err(|_| bad("not an integer")))
        .collect();
    let seeds = seeds?;
    if seeds.is_empty() {
        return Err(bad("no seeds given"));
    }
    Ok(seeds)
}

/// Parse `--metrics gain_db,power_w,nf_db` (three comma-separated numbers).
pub fn parse_metrics_arg(text: &str) -> Result<Metrics, CliError> {
    let bad = |reason: String| CliError::BadArg {
        what: "--metrics",
        input: text.to_string(),
        reason,
    };
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(bad(format!(
            "expected gain_db,power_w,nf_db (3 numbers), got {}",
            parts.len()
        )));
    }
    let mut nums = [0.0f64; 3];
    for (slot, part) in nums.iter_mut().zip(&parts) {
        *slot = part
            .parse()
            .map_err(|_| bad(format!("`{part}` is not a number")))?;
    }
    Ok(Metrics::new(nums[0], nums[1], nums[2]))
}

/// Parse `--values`: `initial` or `name=value,name=value,...`. Unnamed
/// parameters keep their initial values; off-grid values are quantized with
/// a warning on stderr. Tied members may be named — the whole group moves.
pub fn parse_values_arg(
    text: &str,
    space: &ParameterSpace,
) -> Result<Individual, CliError> {
    let mut ind = space.initial_individual(0);
    if text.trim() == "initial" {
        return Ok(ind);
    }
    for pair in text.split(',') {
        let bad = |reason: String| CliError::BadArg {
            what: "--values",
            input: pair.trim().to_string(),
            reason,
        };
        let (name, value) = pair
            .split_once('=')
            .ok_or_else(|| bad("expected name=value".into()))?;
        let name = name.trim();
        let fi = space
            .free_index_of(name)
            .ok_or_else(|| bad(format!("unknown parameter `{name}`")))?;
        let raw: f64 = value
            .trim()
            .parse()
            .map_err(|_| bad(format!("`{}` is not a number", value.trim())))?;
        let spec = space.free_spec(fi);
        let q = spec.quantize(raw);
        if !spec.is_on_grid(raw) || raw < spec.min || raw > spec.max {
            eprintln!(
                "warning: {name}={raw} is off the grid; using {q} (min {}, max {}, step {})",
                spec.min, spec.max, spec.step
            );
        }
        ind.values[fi] = q;
    }
    Ok(ind)
}

fn champion_report(space: &ParameterSpace, log: &RunLog) -> String {
    let champion = log.champion();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "champion after {} evaluations ({:?}):",
        log.total_evaluations(),
        log.terminated_by
    );
    out.push_str(&space.format_individual(champion));
    if let Some(m) = &champion.metrics {
        let _ = writeln!(
            out,
            "  gain {} dB | power {} W | NF {} dB",
            m.gain_db, m.power_w, m.nf_db
        );
    }
    let _ = writeln!(out, "  FoM = {}", csv_f64(champion.fitness));
    out
}

/// Paths written by one `optimize` run.
#[derive(Debug, Clone)]
pub struct OptimizeArtifacts {
    pub runlog: PathBuf,
    pub convergence: PathBuf,
    pub evaluations: PathBuf,
}

fn run_from_manifest(
    manifest: &RunManifest,
    base_dir: &Path,
) -> Result<RunLog, CliError> {
    manifest.validate()?;
    let space = ParameterSpace::load(&resolve(base_dir, &manifest.space))
        .map_err(ConfigError::from)?;
    let evaluator = manifest.evaluator.build(&manifest.fom, base_dir)?;
    let mut log = match &manifest.algorithm {
        AlgorithmConfig::Cga(cfg) => run_cga(&space, cfg, evaluator.as_ref(), &manifest.fom)?,
        AlgorithmConfig::Ga(cfg) => run_ga(&space, cfg, evaluator.as_ref(), &manifest.fom)?,
    };
    // An evaluator that cannot produce a single valid number on the very
    // first population is broken wiring (bad command, absent simulator),
    // not an unlucky search.
    if log.records[0].champion.fitness_or_neg_inf() == f64::NEG_INFINITY {
        return Err(CliError::Evaluator(
            "every evaluation of the initial population failed; check the evaluator configuration"
                .into(),
        ));
    }
    log.evaluator = Some(
        serde_json::to_value(&manifest.evaluator).expect("evaluator spec serializes"),
    );
    Ok(log)
}

/// `optimize`: run one campaign, write artifacts, return the log and where
/// its files went.
pub fn cmd_optimize(
    manifest_path: &Path,
    output_override: Option<&Path>,
) -> Result<(RunLog, OptimizeArtifacts), CliError> {
    let (manifest, base_dir) = RunManifest::load(manifest_path)?;
    let out_dir = output_override
        .map(Path::to_path_buf)
        .or_else(|| manifest.output_dir.clone())
        .ok_or(ConfigError::Invalid {
            field: "output_dir",
            reason: "set it in the manifest or pass --output".into(),
        })?;
    let log = run_from_manifest(&manifest, &base_dir)?;

    let artifacts = OptimizeArtifacts {
        runlog: out_dir.join("runlog.json"),
        convergence: out_dir.join("convergence.csv"),
        evaluations: out_dir.join("evaluations.csv"),
    };
    write_file(&artifacts.runlog, &log.to_json())?;
    write_file(&artifacts.convergence, &log.convergence_csv())?;
    write_file(&artifacts.evaluations, &log.evaluations_csv())?;

    let space = ParameterSpace::load(&resolve(&base_dir, &manifest.space))
        .map_err(ConfigError::from)?;
    print!("{}", champion_report(&space, &log));
    println!("artifacts in {}", out_dir.display());
    Ok((log, artifacts))
}

/// One row of `compare.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub seed: u64,
    pub algorithm: &'static str,
    pub final_best: f64,
    pub evaluations: u64,
}

/// Median/IQR summary per algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareSummary {
    pub algorithm: &'static str,
    pub median: f64,
    pub iqr: f64,
    pub best: f64,
    pub worst: f64,
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub budget: u64,
    pub ga_generations: u64,
    pub rows: Vec<CompareRow>,
    pub summaries: [CompareSummary; 2],
}

impl CompareReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("seed,algorithm,final_best,evaluations\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                r.seed,
                r.algorithm,
                csv_f64(Some(r.final_best)),
                r.evaluations
            );
        }
        out
    }

    pub fn summary_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "equal budget: {} evaluations per run (ga runs {} generations)",
            self.budget, self.ga_generations
        );
        for s in &self.summaries {
            let _ = writeln!(
                out,
                "{:>4}: median {} | iqr {} | best {} | worst {}",
                s.algorithm,
                csv_f64(Some(s.median)),
                csv_f64(Some(s.iqr)),
                csv_f64(Some(s.best)),
                csv_f64(Some(s.worst)),
            );
        }
        out
    }
}

/// Linear-interpolation quantile (the common "type 7"); `xs` must be sorted.
fn quantile(xs: &[f64], p: f64) -> f64 {
    debug_assert!(!xs.is_empty());
    let h = (xs.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    xs[lo] + (h - lo as f64) * (xs[hi] - xs[lo])
}

fn summarize(algorithm: &'static str, finals: &[f64]) -> CompareSummary {
    let mut xs = finals.to_vec();
    xs.sort_by(f64::total_cmp);
    CompareSummary {
        algorithm,
        median: quantile(&xs, 0.5),
        iqr: quantile(&xs, 0.75) - quantile(&xs, 0.25),
        best: *xs.last().expect("non-empty"),
        worst: xs[0],
    }
}

/// `compare`: CGA vs. GA across seeds under one budget.
///
/// The manifest's algorithm section must be `cga`; its resolved budget
/// defines the per-run evaluation allowance. The GA baseline (the `ga`
/// manifest section, or the stock configuration) gets its generation count
/// *derived* from that budget — `floor((budget - pop) / per_generation)` —
/// so both algorithms spend the same simulator time; its `generations`
/// field is ignored.
pub fn cmd_compare(
    manifest_path: &Path,
    seeds_override: Option<&str>,
    output_override: Option<&Path>,
) -> Result<CompareReport, CliError> {
    let (manifest, base_dir) = RunManifest::load(manifest_path)?;
    manifest.validate()?;

    let AlgorithmConfig::Cga(cga_cfg) = &manifest.algorithm else {
        return Err(ConfigError::Invalid {
            field: "algorithm",
            reason: "compare needs a cga section to define the budget".into(),
        }
        .into());
    };

    let seeds: Vec<u64> = match seeds_override {
        Some(text) => parse_seeds(text)?,
        None => manifest.seeds.clone().unwrap_or_else(|| (1..=20).collect()),
    };
    if seeds.len() < 2 {
        return Err(ConfigError::Invalid {
            field: "seeds",
            reason: format!("need at least 2 seeds for a comparison, got {}", seeds.len()),
        }
        .into());
    }

    let space = ParameterSpace::load(&resolve(&base_dir, &manifest.space))
        .map_err(ConfigError::from)?;
    let evaluator = manifest.evaluator.build(&manifest.fom, &base_dir)?;
    let budget = cga_cfg.resolved_budget(space.free_len())?;

    let ga_base = manifest.ga.clone().unwrap_or_default();
    let ga_pop = ga_base.pop_size as u64;
    if budget < ga_pop {
        return Err(ConfigError::BudgetBelowPopulation {
            budget,
            pop_size: ga_base.pop_size,
        }
        .into());
    }
    let per_gen = ga_base.evaluations_per_generation();
    let ga_generations = (budget - ga_pop) / per_gen;
    if ga_generations < 1 {
        return Err(ConfigError::Invalid {
            field: "max_simulations",
            reason: format!(
                "budget {budget} leaves no room for a single ga generation of {per_gen}"
            ),
        }
        .into());
    }

    let mut rows = Vec::with_capacity(seeds.len() * 2);
    let mut cga_finals = Vec::with_capacity(seeds.len());
    let mut ga_finals = Vec::with_capacity(seeds.len());
    for &seed in &seeds {
        let cga_run = CgaConfig {
            seed,
            ..cga_cfg.clone()
        };
        let log = run_cga(&space, &cga_run, evaluator.as_ref(), &manifest.fom)?;
        let best = log.champion().fitness_or_neg_inf();
        rows.push(CompareRow {
            seed,
            algorithm: "cga",
            final_best: best,
            evaluations: log.total_evaluations(),
        });
        cga_finals.push(best);

        let ga_run = GaConfig {
            seed,
            generations: ga_generations,
            ..ga_base.clone()
        };
        let log = run_ga(&space, &ga_run, evaluator.as_ref(), &manifest.fom)?;
        let best = log.champion().fitness_or_neg_inf();
        rows.push(CompareRow {
            seed,
            algorithm: "ga",
            final_best: best,
            evaluations: log.total_evaluations(),
        });
        ga_finals.push(best);
    }

    let report = CompareReport {
        budget,
        ga_generations,
        rows,
        summaries: [summarize("cga", &cga_finals), summarize("ga", &ga_finals)],
    };

    let out_dir = output_override
        .map(Path::to_path_buf)
        .or_else(|| manifest.output_dir.clone());
    if let Some(dir) = out_dir {
        write_file(&dir.join("compare.csv"), &report.to_csv())?;
        write_file(&dir.join("summary.txt"), &report.summary_text())?;
        println!("artifacts in {}", dir.display());
    }
    print!("{}", report.summary_text());
    Ok(report)
}

/// `eval`: score one point (or raw metrics) and print the result.
pub fn cmd_eval(
    manifest_path: &Path,
    values: Option<&str>,
    metrics: Option<&str>,
) -> Result<f64, CliError> {
    let (manifest, base_dir) = RunManifest::load(manifest_path)?;
    manifest.fom.validate().map_err(ConfigError::from)?;

    // raw-metrics mode bypasses the evaluator (and the space) entirely
    if let Some(text) = metrics {
        if values.is_some() {
            return Err(CliError::BadArg {
                what: "--metrics",
                input: text.to_string(),
                reason: "give either --values or --metrics, not both".into(),
            });
        }
        let m = parse_metrics_arg(text)?;
        let fom = compute_fom(&m, &manifest.fom).map_err(ConfigError::from)?;
        println!(
            "gain {} dB | power {} W | NF {} dB",
            m.gain_db, m.power_w, m.nf_db
        );
        println!("FoM = {}", csv_f64(Some(fom)));
        return Ok(fom);
    }

    let text = values.unwrap_or("initial");
    let space = ParameterSpace::load(&resolve(&base_dir, &manifest.space))
        .map_err(ConfigError::from)?;
    let ind = parse_values_arg(text, &space)?;
    let evaluator = manifest.evaluator.build(&manifest.fom, &base_dir)?;
    let result = evaluator
        .evaluate(&ind, &space)
        .map_err(|e| CliError::Evaluator(error_chain(&e)))?;

    print!("{}", space.format_individual(&ind));
    if let Some(m) = &result.metrics {
        println!(
            "  gain {} dB | power {} W | NF {} dB",
            m.gain_db, m.power_w, m.nf_db
        );
    }
    println!("FoM = {}", csv_f64(Some(result.fitness)));
    Ok(result.fitness)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_parse_ranges_and_lists() {
        assert_eq!(parse_seeds("1..5").unwrap(), vec![1, 2, 3, 4, 5]);
        assert_eq!(parse_seeds("7").unwrap(), vec![7]);
        assert_eq!(parse_seeds("3, 1, 4").unwrap(), vec![3, 1, 4]);
        assert!(parse_seeds("5..1").is_err());
        assert!(parse_seeds("a..b").is_err());
        assert!(parse_seeds("1,two").is_err());
        assert!(parse_seeds("").is_err());
    }

    #[test]
    fn metrics_arg_parses_triples() {
        let m = parse_metrics_arg("16.35, 0.01, 3.56").unwrap();
        assert_eq!(m, Metrics::new(16.35, 0.01, 3.56));
        assert!(parse_metrics_arg("1,2").is_err());
        assert!(parse_metrics_arg("1,2,3,4").is_err());
        assert!(parse_metrics_arg("1,x,3").is_err());
    }

    #[test]
    fn values_arg_sets_and_quantizes() {
        let sp = ParameterSpace::rx_receiver();
        let ind = parse_values_arg("initial", &sp).unwrap();
        assert_eq!(sp.value_of(&ind, "R1"), Some(5000.0));

        let ind = parse_values_arg("R1=5146.4, C1=2.92", &sp).unwrap();
        assert_eq!(sp.value_of(&ind, "R1"), Some(5146.0)); // quantized
        assert!((sp.value_of(&ind, "C1").unwrap() - 2.92).abs() < 1e-12);
        // unnamed parameters keep initials
        assert_eq!(sp.value_of(&ind, "R2"), Some(2000.0));

        // naming a tied member moves the whole group
        let ind = parse_values_arg("M5_width=1.1", &sp).unwrap();
        assert_eq!(sp.value_of(&ind, "M4_width"), sp.value_of(&ind, "M5_width"));

        assert!(parse_values_arg("nope=1", &sp).is_err());
        assert!(parse_values_arg("R1", &sp).is_err());
        assert!(parse_values_arg("R1=wide", &sp).is_err());
    }

    #[test]
    fn quantile_is_type_7() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&xs, 0.5), 2.5);
        assert_eq!(quantile(&xs, 0.25), 1.75);
        assert_eq!(quantile(&xs, 0.75), 3.25);
        assert_eq!(quantile(&xs, 0.0), 1.0);
        assert_eq!(quantile(&xs, 1.0), 4.0);
        let one = [5.0];
        assert_eq!(quantile(&one, 0.5), 5.0);
    }

    #[test]
    fn exit_codes_partition() {
        let config_err = CliError::Config(ConfigError::MissingBudget);
        assert_eq!(config_err.exit_code(), 2);
        let eval_err = CliError::Evaluator("boom".into());
        assert_eq!(eval_err.exit_code(), 3);
        let arg_err = CliError::BadArg {
            what: "--seeds",
            input: "x".into(),
            reason: "nope".into(),
        };
        assert_eq!(arg_err.exit_code(), 2);
    }

    #[test]
    fn error_chain_joins_sources() {
        let err = ConfigError::Io {
            path: "missing.json".into(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
        };
        let text = error_chain(&err);
        assert!(text.contains("missing.json"));
        assert!(text.contains("no such file"));
    }
}
