//! External-simulator adapter.
//!
//! An evaluation renders a netlist from a `{{name}}` template, runs a
//! user-configured command in a fresh scratch directory, and parses a
//! `key=value` measurement file the command leaves behind. Nothing here
//! knows which simulator is on the other side — LTspice, ngspice, spectre or
//! a shell stub all look the same through this interface.
//!
//! Containment contract: a crashed, hung or garbled simulation run fails
//! *that evaluation only*. The optimizers treat the failure as a `-inf`
//! fitness and keep going; the budget is still charged, because a wasted
//! simulator license minute is a wasted minute.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{Read, Seek, SeekFrom};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::eval::{EvalError, EvalResult, Evaluator};
use crate::fitness::{compute_fom, FomConfig, Metrics};
use crate::space::{Individual, ParameterSpace};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("template placeholders unresolved: {}", .missing.join(", "))]
    UnresolvedPlaceholders { missing: Vec<String> },
    #[error("template has an unterminated `{{{{` at byte {0}")]
    UnterminatedPlaceholder(usize),
    #[error("template placeholder `{{{{{0}}}}}` has an invalid name")]
    BadPlaceholderName(String),
    #[error("failed to read template `{path}`")]
    TemplateIo {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("simulation command is empty")]
    EmptyCommand,
    #[error("timeout_s must be positive, got {0}")]
    BadTimeout(f64),
    #[error("result_file must not be empty")]
    EmptyResultFile,
    #[error("failed to set up scratch directory: {0}")]
    Workdir(#[source] std::io::Error),
    #[error("failed to launch `{command}`: {source}")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },
    #[error("simulation exited with {status}{}: {stderr_tail}", kept_note(.workdir))]
    CommandFailed {
        status: String,
        workdir: Option<PathBuf>,
        stderr_tail: String,
    },
    #[error("simulation exceeded its {timeout_s} s timeout and was killed{}", kept_note(.workdir))]
    Timeout {
        timeout_s: f64,
        workdir: Option<PathBuf>,
    },
    #[error("result file `{name}` missing after the run{}", kept_note(.workdir))]
    MissingResultFile {
        name: String,
        workdir: Option<PathBuf>,
    },
    #[error("result file malformed: {source}{}", kept_note(.workdir))]
    Malformed {
        #[source]
        source: MeasurementParseError,
        workdir: Option<PathBuf>,
    },
    #[error("i/o during the simulation run: {0}")]
    Io(#[from] std::io::Error),
}

fn kept_note(workdir: &Option<PathBuf>) -> String {
    match workdir {
        Some(p) => format!(" (workdir kept at {})", p.display()),
        None => String::new(),
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MeasurementParseError {
    #[error("line {line}: expected `key=value`, got `{content}`")]
    NotKeyValue { line: usize, content: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: value `{value}` for `{key}` is not a number")]
    NonNumeric {
        line: usize,
        key: String,
        value: String,
    },
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
}

/// A netlist template with `{{name}}` placeholders.
///
/// Placeholder names are `[A-Za-z0-9_]+`. On render, each placeholder is
/// replaced by the individual's value for that parameter (ties expanded) or,
/// failing that, by a fixed constant from the job configuration. Values are
/// printed in Rust's shortest round-trip float format; unit suffixes belong
/// in the template text, not in the substitution.
#[derive(Debug, Clone)]
pub struct NetlistTemplate {
    body: String,
}

impl NetlistTemplate {
    pub fn new(body: impl Into<String>) -> Self {
        NetlistTemplate { body: body.into() }
    }

    pub fn load(path: &Path) -> Result<Self, SimError> {
        let body = fs::read_to_string(path).map_err(|source| SimError::TemplateIo {
            path: path.display().to_string(),
            source,
        })?;
        Ok(Self::new(body))
    }

    pub fn body(&self) -> &str {
        &self.body
    }

    fn is_name_byte(b: u8) -> bool {
        b.is_ascii_alphanumeric() || b == b'_'
    }

    /// Walk the template, calling `on_name` for every placeholder.
    fn scan(&self, mut on_name: impl FnMut(&str, &mut String)) -> Result<String, SimError> {
        let bytes = self.body.as_bytes();
        let mut out = String::with_capacity(self.body.len());
        let mut i = 0;
        while i < bytes.len() {
            if bytes[i] == b'{' && i + 1 < bytes.len() && bytes[i + 1] == b'{' {
                let start = i;
                let mut j = i + 2;
                while j + 1 < bytes.len() && !(bytes[j] == b'}' && bytes[j + 1] == b'}') {
                    j += 1;
                }
                if j + 1 >= bytes.len() {
                    return Err(SimError::UnterminatedPlaceholder(start));
                }
                let name = &self.body[i + 2..j];
                if name.is_empty() || !name.bytes().all(Self::is_name_byte) {
                    return Err(SimError::BadPlaceholderName(name.to_string()));
                }
                on_name(name, &mut out);
                i = j + 2;
            } else {
                // one UTF-8 scalar at a time so multibyte text passes through
                let ch = self.body[i..].chars().next().expect("in-bounds char");
                out.push(ch);
                i += ch.len_utf8();
            }
        }
        Ok(out)
    }

    /// Every distinct placeholder name, sorted.
    pub fn required_names(&self) -> Result<Vec<String>, SimError> {
        let mut names = std::collections::BTreeSet::new();
        self.scan(|name, _| {
            names.insert(name.to_string());
        })?;
        Ok(names.into_iter().collect())
    }

    /// Substitute every placeholder from the individual (parameter names,
    /// ties expanded) and the fixed constants. Space values win over
    /// constants on a name clash. Any unresolved name fails the render,
    /// listing all of them.
    pub fn render(
        &self,
        ind: &Individual,
        space: &ParameterSpace,
        constants: &BTreeMap<String, f64>,
    ) -> Result<String, SimError> {
        let mut missing = std::collections::BTreeSet::new();
        let rendered = self.scan(|name, out| {
            let value = space
                .value_of(ind, name)
                .or_else(|| constants.get(name).copied());
            match value {
                Some(v) => {
                    let _ = std::fmt::write(out, format_args!("{v}"));
                }
                None => {
                    missing.insert(name.to_string());
                }
            }
        })?;
        if !missing.is_empty() {
            return Err(SimError::UnresolvedPlaceholders {
                missing: missing.into_iter().collect(),
            });
        }
        Ok(rendered)
    }
}

/// When to keep an evaluation's scratch directory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeepWorkdir {
    /// Keep it only when the run fails, for post-mortems.
    #[default]
    OnFailure,
    Always,
    Never,
}

/// How to run the external simulator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimJobConfig {
    /// Executable and arguments. The token `{netlist}` expands to the
    /// absolute path of the rendered netlist; the command runs with the
    /// scratch directory as its working directory.
    pub command: Vec<String>,
    /// Wall-clock budget for one run, seconds.
    pub timeout_s: f64,
    /// File (relative to the scratch directory) the command must leave the
    /// `key=value` measurements in.
    pub result_file: String,
    /// Extra `{{name}}` substitutions that are not search parameters —
    /// supplies, drive levels, process constants.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub fixed_constants: BTreeMap<String, f64>,
    /// Concurrent evaluations allowed when the command is reentrant.
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub keep_workdir: KeepWorkdir,
}

fn default_workers() -> usize {
    1
}

impl SimJobConfig {
    pub fn new(command: Vec<String>, timeout_s: f64, result_file: impl Into<String>) -> Self {
        SimJobConfig {
            command,
            timeout_s,
            result_file: result_file.into(),
            fixed_constants: BTreeMap::new(),
            workers: 1,
            keep_workdir: KeepWorkdir::default(),
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.command.is_empty() || self.command[0].is_empty() {
            return Err(SimError::EmptyCommand);
        }
        if self.timeout_s <= 0.0 || !self.timeout_s.is_finite() {
            return Err(SimError::BadTimeout(self.timeout_s));
        }
        if self.result_file.is_empty() {
            return Err(SimError::EmptyResultFile);
        }
        Ok(())
    }
}

/// Parse a `key=value` measurement file into [`Metrics`].
///
/// Blank lines and `#` comments are skipped; keys are case-insensitive;
/// unknown keys are ignored so simulators may report extra measurements.
/// `gain_db`, `power_w` and `nf_db` must each appear exactly once.
pub fn parse_measurements(text: &str) -> Result<Metrics, MeasurementParseError> {
    let mut gain: Option<f64> = None;
    let mut power: Option<f64> = None;
    let mut nf: Option<f64> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| MeasurementParseError::NotKeyValue {
                line,
                content: content.to_string(),
            })?;
        let key = key.trim().to_ascii_lowercase();
        let slot = match key.as_str() {
            "gain_db" => &mut gain,
            "power_w" => &mut power,
            "nf_db" => &mut nf,
            _ => continue,
        };
        if slot.is_some() {
            return Err(MeasurementParseError::DuplicateKey { line, key });
        }
        let value = value.trim();
        let parsed: f64 = value
            .parse()
            .map_err(|_| MeasurementParseError::NonNumeric {
                line,
                key: key.clone(),
                value: value.to_string(),
            })?;
        *slot = Some(parsed);
    }
    Ok(Metrics {
        gain_db: gain.ok_or(MeasurementParseError::MissingKey("gain_db"))?,
        power_w: power.ok_or(MeasurementParseError::MissingKey("power_w"))?,
        nf_db: nf.ok_or(MeasurementParseError::MissingKey("nf_db"))?,
    })
}

/// Last couple of lines of a log file, for error messages.
fn tail_of(path: &Path, max: usize) -> String {
    let Ok(mut f) = File::open(path) else {
        return String::new();
    };
    let len = f.metadata().map(|m| m.len()).unwrap_or(0);
    let start = len.saturating_sub(max as u64);
    if f.seek(SeekFrom::Start(start)).is_err() {
        return String::new();
    }
    let mut buf = String::new();
    let _ = f.take(max as u64).read_to_string(&mut buf);
    buf.trim().replace('\n', " | ")
}

/// Run one simulation: write the rendered netlist into a fresh scratch
/// directory, execute the command there, enforce the timeout, parse the
/// result file.
pub fn run_external(job: &SimJobConfig, netlist: &str) -> Result<Metrics, SimError> {
    job.validate()?;
    let dir = tempfile::Builder::new()
        .prefix("cga-sim-")
        .tempdir()
        .map_err(SimError::Workdir)?;

    let outcome = execute_in(dir.path(), job, netlist);
    match outcome {
        Ok(metrics) => {
            if job.keep_workdir == KeepWorkdir::Always {
                let _ = dir.keep();
            }
            Ok(metrics)
        }
        Err(err) => {
            let kept = match job.keep_workdir {
                KeepWorkdir::Never => None,
                _ => Some(dir.keep()),
            };
            Err(err.with_workdir(kept))
        }
    }
}

impl SimError {
    fn with_workdir(self, kept: Option<PathBuf>) -> Self {
        match self {
            SimError::CommandFailed {
                status,
                stderr_tail,
                ..
            } => SimError::CommandFailed {
                status,
                workdir: kept,
                stderr_tail,
            },
            SimError::Timeout { timeout_s, .. } => SimError::Timeout {
                timeout_s,
                workdir: kept,
            },
            SimError::MissingResultFile { name, .. } => SimError::MissingResultFile {
                name,
                workdir: kept,
            },
            SimError::Malformed { source, .. } => SimError::Malformed {
                source,
                workdir: kept,
            },
            other => other,
        }
    }
}

fn execute_in(dir: &Path, job: &SimJobConfig, netlist: &str) -> Result<Metrics, SimError> {
    let netlist_path = dir.join("netlist.sp");
    fs::write(&netlist_path, netlist)?;
    let netlist_str = netlist_path.display().to_string();

    let argv: Vec<String> = job
        .command
        .iter()
        .map(|a| a.replace("{netlist}", &netlist_str))
        .collect();
    let stdout = File::create(dir.join("stdout.log"))?;
    let stderr = File::create(dir.join("stderr.log"))?;
    let mut child = Command::new(&argv[0])
        .args(&argv[1..])
        .current_dir(dir)
        .stdin(Stdio::null())
        .stdout(stdout)
        .stderr(stderr)
        .spawn()
        .map_err(|source| SimError::Spawn {
            command: argv.join(" "),
            source,
        })?;

    let deadline = Instant::now() + Duration::from_secs_f64(job.timeout_s);
    let status = loop {
        match child.try_wait()? {
            Some(status) => break status,
            None if Instant::now() >= deadline => {
                let _ = child.kill();
                let _ = child.wait(); // reap; kill already signalled
                return Err(SimError::Timeout {
                    timeout_s: job.timeout_s,
                    workdir: None,
                });
            }
            None => std::thread::sleep(Duration::from_millis(5)),
        }
    };

    if !status.success() {
        return Err(SimError::CommandFailed {
            status: status.to_string(),
            workdir: None,
            stderr_tail: tail_of(&dir.join("stderr.log"), 400),
        });
    }

    let result_path = dir.join(&job.result_file);
    let text = match fs::read_to_string(&result_path) {
        Ok(t) => t,
        Err(_) => {
            return Err(SimError::MissingResultFile {
                name: job.result_file.clone(),
                workdir: None,
            })
        }
    };
    parse_measurements(&text).map_err(|source| SimError::Malformed {
        source,
        workdir: None,
    })
}

/// The [`Evaluator`] wrapping a template + job configuration.
pub struct SimAdapter {
    template: NetlistTemplate,
    job: SimJobConfig,
    fom: FomConfig,
    reentrant: bool,
}

impl SimAdapter {
    /// `reentrant` declares whether the command tolerates concurrent runs
    /// (separate scratch directories are always used either way).
    pub fn new(
        template: NetlistTemplate,
        job: SimJobConfig,
        fom: FomConfig,
        reentrant: bool,
    ) -> Result<Self, SimError> {
        job.validate()?;
        Ok(SimAdapter {
            template,
            job,
            fom,
            reentrant,
        })
    }

    pub fn job(&self) -> &SimJobConfig {
        &self.job
    }

    pub fn template(&self) -> &NetlistTemplate {
        &self.template
    }
}

impl Evaluator for SimAdapter {
    fn evaluate(
        &self,
        ind: &Individual,
        space: &ParameterSpace,
    ) -> Result<EvalResult, EvalError> {
        let netlist = self.template.render(ind, space, &self.job.fixed_constants)?;
        let metrics = run_external(&self.job, &netlist)?;
        metrics.validate()?;
        let fitness = compute_fom(&metrics, &self.fom)?;
        Ok(EvalResult {
            metrics: Some(metrics),
            fitness,
            evaluations_consumed: 1,
        })
    }

    fn reentrant(&self) -> bool {
        self.reentrant
    }

    fn workers(&self) -> usize {
        if self.reentrant {
            self.job.workers.max(1)
        } else {
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{ParameterSpec, ParameterSpace};
    use std::io::Write as _;

    fn tiny_space() -> ParameterSpace {
        ParameterSpace::new(
            vec![
                ParameterSpec {
                    name: "R1".into(),
                    min: 100.0,
                    max: 200.0,
                    step: 1.0,
                    initial: 150.0,
                    unit: Some("ohm".into()),
                },
                ParameterSpec {
                    name: "W_a".into(),
                    min: 1.0,
                    max: 2.0,
                    step: 0.5,
                    initial: 1.5,
                    unit: None,
                },
                ParameterSpec {
                    name: "W_b".into(),
                    min: 1.0,
                    max: 2.0,
                    step: 0.5,
                    initial: 1.5,
                    unit: None,
                },
            ],
            vec![vec!["W_a".into(), "W_b".into()]],
        )
        .unwrap()
    }

    #[test]
    fn render_substitutes_parameters_ties_and_constants() {
        let sp = tiny_space();
        let ind = sp.initial_individual(0);
        let t = NetlistTemplate::new("R1 in out {{R1}}\nM1 d g s w={{W_a}}u\nM2 d g s w={{W_b}}u\nVDD vdd 0 {{VDD}}\n");
        let consts = BTreeMap::from([("VDD".to_string(), 1.2)]);
        let out = t.render(&ind, &sp, &consts).unwrap();
        assert_eq!(
            out,
            "R1 in out 150\nM1 d g s w=1.5u\nM2 d g s w=1.5u\nVDD vdd 0 1.2\n"
        );
    }

    #[test]
    fn space_values_win_over_constants() {
        let sp = tiny_space();
        let ind = sp.initial_individual(0);
        let t = NetlistTemplate::new("{{R1}}");
        let consts = BTreeMap::from([("R1".to_string(), 999.0)]);
        assert_eq!(t.render(&ind, &sp, &consts).unwrap(), "150");
    }

    #[test]
    fn render_lists_all_missing_names_sorted() {
        let sp = tiny_space();
        let ind = sp.initial_individual(0);
        let t = NetlistTemplate::new("{{zz}} {{R1}} {{aa}} {{zz}}");
        let err = t.render(&ind, &sp, &BTreeMap::new()).unwrap_err();
        match err {
            SimError::UnresolvedPlaceholders { missing } => {
                assert_eq!(missing, vec!["aa".to_string(), "zz".to_string()]);
            }
            other => panic!("wrong error {other:?}"),
        }
    }

    #[test]
    fn template_error_cases() {
        let t = NetlistTemplate::new("ok {{name");
        assert!(matches!(
            t.required_names(),
            Err(SimError::UnterminatedPlaceholder(3))
        ));
        let t = NetlistTemplate::new("{{bad name}}");
        assert!(matches!(
            t.required_names(),
            Err(SimError::BadPlaceholderName(_))
        ));
        let t = NetlistTemplate::new("{{}}");
        assert!(t.required_names().is_err());
        // single braces and multibyte text flow through untouched
        let sp = tiny_space();
        let ind = sp.initial_individual(0);
        let t = NetlistTemplate::new("lone { brace } µ-text {{R1}}");
        assert_eq!(
            t.render(&ind, &sp, &BTreeMap::new()).unwrap(),
            "lone { brace } µ-text 150"
        );
    }

    #[test]
    fn required_names_dedups_and_sorts() {
        let t = NetlistTemplate::new("{{b}} {{a}} {{b}} {{c_9}}");
        assert_eq!(t.required_names().unwrap(), vec!["a", "b", "c_9"]);
    }

    #[test]
    fn parse_measurements_happy_path() {
        let text = "# sim output\n\ngain_db = 16.35\nPOWER_W=0.01\n  nf_db =3.56\nextra_key=42\n";
        let m = parse_measurements(text).unwrap();
        assert_eq!(m, Metrics::new(16.35, 0.01, 3.56));
    }

    #[test]
    fn parse_measurements_error_paths() {
        assert_eq!(
            parse_measurements("gain_db 16").unwrap_err(),
            MeasurementParseError::NotKeyValue {
                line: 1,
                content: "gain_db 16".into()
            }
        );
        assert_eq!(
            parse_measurements("gain_db=1\ngain_db=2\n").unwrap_err(),
            MeasurementParseError::DuplicateKey {
                line: 2,
                key: "gain_db".into()
            }
        );
        assert_eq!(
            parse_measurements("gain_db=ten\n").unwrap_err(),
            MeasurementParseError::NonNumeric {
                line: 1,
                key: "gain_db".into(),
                value: "ten".into()
            }
        );
        assert_eq!(
            parse_measurements("gain_db=1\npower_w=0.01\n").unwrap_err(),
            MeasurementParseError::MissingKey("nf_db")
        );
    }

    #[test]
    fn job_config_validation() {
        assert!(SimJobConfig::new(vec![], 1.0, "m.txt").validate().is_err());
        assert!(SimJobConfig::new(vec!["sh".into()], 0.0, "m.txt")
            .validate()
            .is_err());
        assert!(SimJobConfig::new(vec!["sh".into()], 1.0, "")
            .validate()
            .is_err());
        assert!(SimJobConfig::new(vec!["sh".into()], 1.0, "m.txt")
            .validate()
            .is_ok());
    }

    fn write_script(dir: &Path, name: &str, body: &str) -> PathBuf {
        let path = dir.join(name);
        let mut f = File::create(&path).unwrap();
        writeln!(f, "#!/bin/sh").unwrap();
        f.write_all(body.as_bytes()).unwrap();
        drop(f);
        let mut perms = fs::metadata(&path).unwrap().permissions();
        use std::os::unix::fs::PermissionsExt;
        perms.set_mode(0o755);
        fs::set_permissions(&path, perms).unwrap();
        path
    }

    #[test]
    fn run_external_round_trip_with_a_stub() {
        let host = tempfile::tempdir().unwrap();
        let script = write_script(
            host.path(),
            "sim.sh",
            "grep -q 'R1 in out' \"$1\" || exit 9\nprintf 'gain_db=16.35\\npower_w=0.01\\nnf_db=3.56\\n' > metrics.txt\n",
        );
        let job = SimJobConfig::new(
            vec![
                script.display().to_string(),
                "{netlist}".into(),
            ],
            10.0,
            "metrics.txt",
        );
        let m = run_external(&job, "R1 in out 150\n").unwrap();
        assert_eq!(m, Metrics::new(16.35, 0.01, 3.56));
    }

    #[test]
    fn run_external_reports_nonzero_exit_with_stderr_tail() {
        let host = tempfile::tempdir().unwrap();
        let script = write_script(host.path(), "boom.sh", "echo 'convergence lost' >&2\nexit 3\n");
        let mut job = SimJobConfig::new(vec![script.display().to_string()], 10.0, "metrics.txt");
        job.keep_workdir = KeepWorkdir::Never;
        let err = run_external(&job, "x\n").unwrap_err();
        match err {
            SimError::CommandFailed {
                stderr_tail,
                workdir,
                ..
            } => {
                assert!(stderr_tail.contains("convergence lost"));
                assert!(workdir.is_none(), "Never policy must not keep the dir");
            }
            other => panic!("wrong error {other:?}"),
        }
    }

    #[test]
    fn run_external_kills_on_timeout() {
        let host = tempfile::tempdir().unwrap();
        let script = write_script(host.path(), "hang.sh", "sleep 30\n");
        let mut job = SimJobConfig::new(vec![script.display().to_string()], 0.2, "metrics.txt");
        job.keep_workdir = KeepWorkdir::Never;
        let t0 = Instant::now();
        let err = run_external(&job, "x\n").unwrap_err();
        assert!(matches!(err, SimError::Timeout { .. }), "got {err:?}");
        assert!(
            t0.elapsed() < Duration::from_secs(5),
            "kill did not take effect promptly"
        );
    }

    #[test]
    fn run_external_missing_and_garbled_results() {
        let host = tempfile::tempdir().unwrap();
        let silent = write_script(host.path(), "silent.sh", "exit 0\n");
        let mut job = SimJobConfig::new(vec![silent.display().to_string()], 10.0, "metrics.txt");
        job.keep_workdir = KeepWorkdir::Never;
        assert!(matches!(
            run_external(&job, "x\n").unwrap_err(),
            SimError::MissingResultFile { .. }
        ));

        let garbled = write_script(
            host.path(),
            "garbled.sh",
            "printf 'gain_db=oops\\n' > metrics.txt\n",
        );
        let mut job = SimJobConfig::new(vec![garbled.display().to_string()], 10.0, "metrics.txt");
        job.keep_workdir = KeepWorkdir::Never;
        assert!(matches!(
            run_external(&job, "x\n").unwrap_err(),
            SimError::Malformed { .. }
        ));
    }

    #[test]
    fn failed_runs_keep_workdir_by_default() {
        let host = tempfile::tempdir().unwrap();
        let script = write_script(host.path(), "boom.sh", "exit 1\n");
        let job = SimJobConfig::new(vec![script.display().to_string()], 10.0, "metrics.txt");
        let err = run_external(&job, "the netlist\n").unwrap_err();
        let SimError::CommandFailed { workdir: Some(kept), .. } = err else {
            panic!("expected CommandFailed with a kept workdir, got {err:?}");
        };
        // the netlist is preserved for the post-mortem
        let netlist = fs::read_to_string(kept.join("netlist.sp")).unwrap();
        assert_eq!(netlist, "the netlist\n");
        fs::remove_dir_all(&kept).unwrap();
    }

    #[test]
    fn evaluations_run_in_isolated_directories() {
        // The stub records its working directory; two runs must see two
        // different scratch dirs even with identical inputs.
        let host = tempfile::tempdir().unwrap();
        let log = host.path().join("dirs.log");
        let script = write_script(
            host.path(),
            "pwd.sh",
            &format!(
                "pwd >> {}\nprintf 'gain_db=1\\npower_w=1\\nnf_db=1\\n' > metrics.txt\n",
                log.display()
            ),
        );
        let job = SimJobConfig::new(vec![script.display().to_string()], 10.0, "metrics.txt");
        run_external(&job, "x\n").unwrap();
        run_external(&job, "x\n").unwrap();
        let dirs: Vec<String> = fs::read_to_string(&log)
            .unwrap()
            .lines()
            .map(String::from)
            .collect();
        assert_eq!(dirs.len(), 2);
        assert_ne!(dirs[0], dirs[1]);
    }

    #[test]
    fn sim_adapter_end_to_end() {
        let host = tempfile::tempdir().unwrap();
        let script = write_script(
            host.path(),
            "sim.sh",
            // reads the resistance off the netlist and derives metrics from
            // it, so different individuals really score differently
            "r=$(awk '/^R1/ {print $4}' \"$1\")\nprintf 'gain_db=%s\\npower_w=0.01\\nnf_db=3.0\\n' \"$(echo \"$r\" | awk '{print $1 / 10}')\" > out.txt\n",
        );
        let sp = tiny_space();
        let job = SimJobConfig::new(
            vec![script.display().to_string(), "{netlist}".into()],
            10.0,
            "out.txt",
        );
        let adapter = SimAdapter::new(
            NetlistTemplate::new("R1 in out {{R1}}\n"),
            job,
            FomConfig::default(),
            true,
        )
        .unwrap();

        let ind = sp.initial_individual(0);
        let r = adapter.evaluate(&ind, &sp).unwrap();
        let m = r.metrics.unwrap();
        assert_eq!(m.gain_db, 15.0); // 150 / 10
        assert!((r.fitness - 15.0 / (3.0 * 0.01)).abs() < 1e-9);
    }
}
