//! Quantized parameter spaces for circuit sizing.
//!
//! A space is an ordered list of named design variables, each confined to a
//! uniform grid `{min + k*step | k = 0, 1, ...}` inside `[min, max]`.
//! Variables may be tied together (matched devices such as current-mirror or
//! differential-pair widths); a tie group shares one *free* variable and
//! every member mirrors its value. Optimizers only ever see the free
//! variables, so a 21-row space with two 2-member tie groups is a
//! 19-dimensional search problem.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::fitness::Metrics;

/// Relative tolerance for grid-membership checks.
///
/// Steps like 0.01 are not binary-exact, so membership is decided within this
/// relative tolerance of an integer grid index rather than bitwise.
pub const GRID_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum SpaceError {
    #[error("parameter `{name}`: {reason}")]
    InvalidSpec { name: String, reason: String },
    #[error("duplicate parameter name `{0}`")]
    DuplicateName(String),
    #[error("tie group references unknown parameter `{0}`")]
    UnknownTieMember(String),
    #[error("parameter `{0}` appears in more than one tie group")]
    OverlappingTies(String),
    #[error("tied parameters `{a}` and `{b}` differ in min/max/step")]
    MismatchedTie { a: String, b: String },
    #[error("space has no parameters")]
    Empty,
    #[error("free-variable index {index} out of range (space has {count})")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("individual has {got} values but the space has {expected} free variables")]
    LengthMismatch { got: usize, expected: usize },
    #[error("value {value} for `{name}` is off-grid")]
    OffGrid { name: String, value: f64 },
    #[error("failed to read space file `{path}`")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to parse space file `{path}`: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

/// One named, bounded, step-quantized design variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterSpec {
    pub name: String,
    pub min: f64,
    pub max: f64,
    /// Grid spacing; legal values are `min + k*step` with integer `k >= 0`.
    pub step: f64,
    /// Starting value used by `initial` individuals; snapped to the grid on use.
    pub initial: f64,
    /// Unit label carried as metadata (e.g. "ohm", "pF", "mA", "um"). The
    /// stored values stay in this unit; evaluators convert where they need SI.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

impl ParameterSpec {
    pub fn validate(&self) -> Result<(), SpaceError> {
        let fail = |reason: String| SpaceError::InvalidSpec {
            name: self.name.clone(),
            reason,
        };
        if self.name.is_empty() {
            return Err(fail("name must not be empty".into()));
        }
        if !self.step.is_finite() || self.step <= 0.0 {
            return Err(fail(format!(
                "step must be positive and finite, got {}",
                self.step
            )));
        }
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(fail(format!("bounds [{}, {}] must be finite", self.min, self.max)));
        }
        if self.min > self.max {
            return Err(fail(format!("min {} exceeds max {}", self.min, self.max)));
        }
        // A single-point grid (min == max) is legal; any wider range must
        // hold at least one full step.
        if self.min < self.max && self.max - self.min < self.step {
            return Err(fail(format!(
                "range [{}, {}] is narrower than one step ({})",
                self.min, self.max, self.step
            )));
        }
        if !self.initial.is_finite() || self.initial < self.min || self.initial > self.max {
            return Err(fail(format!(
                "initial {} outside [{}, {}]",
                self.initial, self.min, self.max
            )));
        }
        Ok(())
    }

    /// Largest legal grid index, i.e. the `k` of the topmost point in range.
    fn max_index(&self) -> u64 {
        let r = (self.max - self.min) / self.step;
        (r + GRID_TOL * r.max(1.0)).floor() as u64
    }

    /// Number of grid points in `[min, max]`.
    pub fn grid_points(&self) -> u64 {
        self.max_index() + 1
    }

    /// True when the grid has a single point (`min == max`).
    pub fn is_degenerate(&self) -> bool {
        self.min == self.max
    }

    /// Grid value at index `k` (callers keep `k <= max_index()`).
    pub fn value_at(&self, k: u64) -> f64 {
        // The final clamp guards against k*step overshooting max by a few ULP.
        (self.min + k as f64 * self.step).clamp(self.min, self.max)
    }

    /// Snap a value to the nearest grid point, clamping into `[min, max]`.
    ///
    /// Idempotent: quantizing an already-quantized value returns it unchanged.
    pub fn quantize(&self, value: f64) -> f64 {
        let clamped = value.clamp(self.min, self.max);
        let k = ((clamped - self.min) / self.step)
            .round()
            .clamp(0.0, self.max_index() as f64) as u64;
        self.value_at(k)
    }

    /// True if `value` is in range and within [`GRID_TOL`] of a grid point.
    pub fn is_on_grid(&self, value: f64) -> bool {
        if !value.is_finite() || value < self.min || value > self.max {
            return false;
        }
        let r = (value - self.min) / self.step;
        (r - r.round()).abs() <= GRID_TOL * r.abs().max(1.0)
    }

    /// Draw uniformly over the grid points of `[min, max]`.
    pub fn random_value<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let k = rng.random_range(0..=self.max_index());
        self.value_at(k)
    }

    /// Position of `value` inside the range, normalized to `[0, 1]`.
    ///
    /// Degenerate (single-point) ranges have no spread; they report 0.
    pub fn normalized(&self, value: f64) -> f64 {
        if self.is_degenerate() {
            0.0
        } else {
            (value - self.min) / (self.max - self.min)
        }
    }
}

/// A point in the search space: one value per *free* variable, plus the
/// evaluation state an optimizer fills in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub id: u64,
    /// Id of the individual this one was derived from (mutation source or
    /// first crossover parent). `None` for generation-0 individuals.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent_id: Option<u64>,
    /// Free-variable values, in the space's free order.
    pub values: Vec<f64>,
    /// Scalar fitness once evaluated; failed evaluations carry `-inf`,
    /// written to JSON as the string `"-inf"`.
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "fitness_field"
    )]
    pub fitness: Option<f64>,
    /// Raw (pre-penalty) metrics when the evaluator produced them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Metrics>,
}

impl Individual {
    pub fn new(id: u64, values: Vec<f64>) -> Self {
        Individual {
            id,
            parent_id: None,
            values,
            fitness: None,
            metrics: None,
        }
    }

    /// Fitness for comparisons: unevaluated or failed individuals rank below
    /// every finite value.
    pub fn fitness_or_neg_inf(&self) -> f64 {
        self.fitness.unwrap_or(f64::NEG_INFINITY)
    }
}

/// JSON encoding for the optional fitness: finite values as numbers,
/// non-finite ones as the strings `"-inf"` / `"inf"` / `"nan"` (plain JSON
/// has no spelling for them and `serde_json` would emit `null`).
mod fitness_field {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<f64>, ser: S) -> Result<S::Ok, S::Error> {
        match v {
            None => ser.serialize_none(),
            Some(x) if x.is_finite() => ser.serialize_f64(*x),
            Some(x) if x.is_nan() => ser.serialize_str("nan"),
            Some(x) if *x > 0.0 => ser.serialize_str("inf"),
            Some(_) => ser.serialize_str("-inf"),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Option<f64>, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Option::<Raw>::deserialize(de)? {
            None => Ok(None),
            Some(Raw::Num(x)) => Ok(Some(x)),
            Some(Raw::Text(s)) => match s.as_str() {
                "-inf" => Ok(Some(f64::NEG_INFINITY)),
                "inf" => Ok(Some(f64::INFINITY)),
                "nan" => Ok(Some(f64::NAN)),
                other => Err(D::Error::custom(format!(
                    "invalid fitness string `{other}`"
                ))),
            },
        }
    }
}

/// An ordered, validated set of parameters plus tie groups.
///
/// Construction (or deserialization) validates every spec, checks ties, and
/// derives the free-variable mapping: the representative of each tie group is
/// its first member in declaration order, and free indices follow the
/// declaration order of representatives and untied parameters.
#[derive(Debug, Clone)]
pub struct ParameterSpace {
    specs: Vec<ParameterSpec>,
    tie_groups: Vec<Vec<String>>,
    /// spec index of the representative for each free variable
    free_to_spec: Vec<usize>,
    /// free-variable index for each spec
    spec_to_free: Vec<usize>,
}

impl PartialEq for ParameterSpace {
    fn eq(&self, other: &Self) -> bool {
        // The mapping vectors are derived, so specs + ties decide equality.
        self.specs == other.specs && self.tie_groups == other.tie_groups
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpace {
    parameters: Vec<ParameterSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    ties: Vec<Vec<String>>,
}

impl Serialize for ParameterSpace {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        RawSpace {
            parameters: self.specs.clone(),
            ties: self.tie_groups.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ParameterSpace {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = RawSpace::deserialize(de)?;
        ParameterSpace::new(raw.parameters, raw.ties).map_err(serde::de::Error::custom)
    }
}

impl ParameterSpace {
    pub fn new(
        specs: Vec<ParameterSpec>,
        tie_groups: Vec<Vec<String>>,
    ) -> Result<Self, SpaceError> {
        if specs.is_empty() {
            return Err(SpaceError::Empty);
        }
        let mut names = HashSet::new();
        for s in &specs {
            s.validate()?;
            if !names.insert(s.name.as_str()) {
                return Err(SpaceError::DuplicateName(s.name.clone()));
            }
        }
        let index_of: HashMap<&str, usize> = specs
            .iter()
            .enumerate()
            .map(|(i, s)| (s.name.as_str(), i))
            .collect();

        // Which tie group, if any, each spec belongs to.
        let mut group_of: Vec<Option<usize>> = vec![None; specs.len()];
        for (gi, group) in tie_groups.iter().enumerate() {
            let mut first: Option<usize> = None;
            for name in group {
                let &i = index_of
                    .get(name.as_str())
                    .ok_or_else(|| SpaceError::UnknownTieMember(name.clone()))?;
                if group_of[i].is_some() {
                    return Err(SpaceError::OverlappingTies(name.clone()));
                }
                group_of[i] = Some(gi);
                match first {
                    None => first = Some(i),
                    Some(f) => {
                        let (a, b) = (&specs[f], &specs[i]);
                        if a.min != b.min || a.max != b.max || a.step != b.step {
                            return Err(SpaceError::MismatchedTie {
                                a: a.name.clone(),
                                b: b.name.clone(),
                            });
                        }
                    }
                }
            }
        }

        // Free variables in declaration order; a tie group is entered at its
        // first member, which becomes the representative.
        let mut free_to_spec = Vec::new();
        let mut spec_to_free = vec![usize::MAX; specs.len()];
        let mut group_free: Vec<Option<usize>> = vec![None; tie_groups.len()];
        for i in 0..specs.len() {
            match group_of[i] {
                None => {
                    spec_to_free[i] = free_to_spec.len();
                    free_to_spec.push(i);
                }
                Some(g) => match group_free[g] {
                    None => {
                        let fi = free_to_spec.len();
                        group_free[g] = Some(fi);
                        spec_to_free[i] = fi;
                        free_to_spec.push(i);
                    }
                    Some(fi) => spec_to_free[i] = fi,
                },
            }
        }

        Ok(ParameterSpace {
            specs,
            tie_groups,
            free_to_spec,
            spec_to_free,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self, SpaceError> {
        let text = fs::read_to_string(path).map_err(|source| SpaceError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text).map_err(|source| SpaceError::Parse {
            path: path.display().to_string(),
            source,
        })
    }

    /// The stock receiver space shipped with the crate: 21 sizing variables
    /// (resistors, capacitors, bias sources, LO drive, transistor widths)
    /// with the current-mirror width pairs tied, leaving 19 free variables.
    pub fn rx_receiver() -> Self {
        Self::from_json(include_str!("../../../spaces/rx_receiver.json"))
            .expect("embedded receiver space is valid")
    }

    pub fn specs(&self) -> &[ParameterSpec] {
        &self.specs
    }

    pub fn tie_groups(&self) -> &[Vec<String>] {
        &self.tie_groups
    }

    /// Number of free variables (tie groups collapse to one each).
    pub fn free_len(&self) -> usize {
        self.free_to_spec.len()
    }

    /// Representative spec of free variable `index`.
    pub fn free_spec(&self, index: usize) -> &ParameterSpec {
        &self.specs[self.free_to_spec[index]]
    }

    /// Representative names in free order.
    pub fn free_names(&self) -> Vec<&str> {
        self.free_to_spec
            .iter()
            .map(|&i| self.specs[i].name.as_str())
            .collect()
    }

    /// Free-variable index owning the named parameter (tied members map to
    /// their group's variable).
    pub fn free_index_of(&self, name: &str) -> Option<usize> {
        self.specs
            .iter()
            .position(|s| s.name == name)
            .map(|i| self.spec_to_free[i])
    }

    /// Value of the named parameter in `ind`, honoring ties.
    pub fn value_of(&self, ind: &Individual, name: &str) -> Option<f64> {
        self.free_index_of(name)
            .and_then(|fi| ind.values.get(fi).copied())
    }

    /// All parameters with their values, ties mirrored, in declaration order.
    pub fn expanded_values<'a>(&'a self, ind: &Individual) -> Vec<(&'a str, f64)> {
        self.specs
            .iter()
            .enumerate()
            .map(|(i, s)| (s.name.as_str(), ind.values[self.spec_to_free[i]]))
            .collect()
    }

    fn check_len(&self, ind: &Individual) -> Result<(), SpaceError> {
        if ind.values.len() != self.free_len() {
            return Err(SpaceError::LengthMismatch {
                got: ind.values.len(),
                expected: self.free_len(),
            });
        }
        Ok(())
    }

    /// Verify an individual satisfies the space invariants: value count
    /// matches and every value sits on its grid.
    pub fn check_individual(&self, ind: &Individual) -> Result<(), SpaceError> {
        self.check_len(ind)?;
        for (fi, &v) in ind.values.iter().enumerate() {
            let spec = self.free_spec(fi);
            if !spec.is_on_grid(v) {
                return Err(SpaceError::OffGrid {
                    name: spec.name.clone(),
                    value: v,
                });
            }
        }
        Ok(())
    }

    /// The all-initial-values individual (each value snapped to its grid).
    pub fn initial_individual(&self, id: u64) -> Individual {
        let values = self
            .free_to_spec
            .iter()
            .map(|&i| self.specs[i].quantize(self.specs[i].initial))
            .collect();
        Individual::new(id, values)
    }

    /// Draw every free variable uniformly from its grid.
    pub fn random_individual<R: Rng + ?Sized>(&self, id: u64, rng: &mut R) -> Individual {
        let values = self
            .free_to_spec
            .iter()
            .map(|&i| self.specs[i].random_value(rng))
            .collect();
        Individual::new(id, values)
    }

    /// Copy `ind` with free variable `index` redrawn uniformly from its grid.
    ///
    /// The copy gets the fresh `id`, `parent_id = ind.id`, and cleared
    /// fitness/metrics. The redraw may land on the current value; that is a
    /// legal (if unproductive) mutation and keeps the draw unbiased.
    pub fn mutate_one<R: Rng + ?Sized>(
        &self,
        ind: &Individual,
        index: usize,
        id: u64,
        rng: &mut R,
    ) -> Result<Individual, SpaceError> {
        self.check_len(ind)?;
        if index >= self.free_len() {
            return Err(SpaceError::IndexOutOfRange {
                index,
                count: self.free_len(),
            });
        }
        let mut values = ind.values.clone();
        values[index] = self.free_spec(index).random_value(rng);
        Ok(Individual {
            id,
            parent_id: Some(ind.id),
            values,
            fitness: None,
            metrics: None,
        })
    }

    /// Render the parameters of `ind` as an aligned name/value/unit table.
    pub fn format_individual(&self, ind: &Individual) -> String {
        let rows = self.expanded_values(ind);
        let name_w = rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
        let vals: Vec<String> = rows
            .iter()
            .map(|(name, v)| {
                let spec = self.specs.iter().find(|s| s.name == *name);
                match spec {
                    Some(s) => display_on_grid(*v, s.step),
                    None => format!("{v}"),
                }
            })
            .collect();
        let val_w = vals.iter().map(|v| v.len()).max().unwrap_or(0);
        let mut out = String::new();
        for ((name, _), val) in rows.iter().zip(&vals) {
            let unit = self
                .specs
                .iter()
                .find(|s| s.name == *name)
                .and_then(|s| s.unit.as_deref())
                .unwrap_or("");
            let _ = writeln!(out, "  {name:<name_w$}  {val:>val_w$} {unit}");
        }
        out
    }
}

/// Render a grid value with the fewest decimals that still pick out its grid
/// point — hiding the float noise of `min + k·step` arithmetic in displays
/// while the JSON/CSV artifacts keep full round-trip precision.
fn display_on_grid(value: f64, step: f64) -> String {
    for decimals in 0..=15 {
        let text = format!("{value:.decimals$}");
        if let Ok(parsed) = text.parse::<f64>() {
            if (parsed - value).abs() <= step * 1e-6 {
                return text;
            }
        }
    }
    format!("{value}")
}
