//! Model and gamble files.
//!
//! A model file is a JSON object with `states` and exactly one model section.
//! Numbers may be JSON numbers or `"p/q"` strings; in rational mode both are
//! read exactly. Output uses fraction strings in rational mode and plain
//! numbers in float mode.

use std::path::Path as FsPath;

use imprecise_markov::{
    IntervalJointSet, IntervalWeightSet, JointMatrix, JointSequence, Matrix, PathGamble, ProbVector, Scalar,
    StochasticMatrix, Tolerance, TransitionLaw, WeightMatrix,
};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    pub states: Vec<String>,
    pub transition_law: Option<RawLaw>,
    pub joint_sequence: Option<RawSequence>,
    pub interval_joint: Option<RawInterval>,
    pub weights: Option<RawWeights>,
    pub tolerance: Option<RawTolerance>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawLaw {
    pub initial: Value,
    pub steps: Vec<Value>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSequence {
    pub mats: Vec<Value>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInterval {
    pub lower: Value,
    pub upper: Value,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawWeights {
    pub matrix: Option<Value>,
    pub lower: Option<Value>,
    pub upper: Option<Value>,
    #[serde(default)]
    pub directed: bool,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTolerance {
    pub sum: Option<Value>,
    pub eq: Option<Value>,
    pub lp: Option<Value>,
}

/// A parsed model in one arithmetic mode.
#[derive(Debug, Clone, PartialEq)]
pub enum Model<T> {
    Law(TransitionLaw<T>),
    Sequence(JointSequence<T>),
    Interval(IntervalJointSet<T>),
    Weights(WeightMatrix<T>),
    WeightBox(IntervalWeightSet<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile<T> {
    pub states: Vec<String>,
    pub model: Model<T>,
    /// Overrides read from the file, written back on output.
    pub tolerance_override: Option<Tolerance<T>>,
}

pub fn read_json(path: &FsPath) -> CliResult<Value> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

impl RawModel {
    pub fn from_value(v: Value) -> CliResult<Self> {
        Ok(serde_json::from_value(v)?)
    }

    pub fn read(path: &FsPath) -> CliResult<Self> {
        Self::from_value(read_json(path)?)
    }
}

pub fn parse_number<T: Scalar>(v: &Value) -> CliResult<T> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => return Err(CliError::parse(format!("expected a number, found {other}"))),
    };
    T::parse_value(&text).ok_or_else(|| CliError::parse(format!("invalid number {text:?}")))
}

pub fn parse_vector<T: Scalar>(v: &Value, n: usize, what: &str) -> CliResult<Vec<T>> {
    let items = v
        .as_array()
        .ok_or_else(|| CliError::parse(format!("{what}: expected an array")))?;
    if items.len() != n {
        return Err(CliError::parse(format!(
            "{what}: expected {n} entries, found {}",
            items.len()
        )));
    }
    items.iter().map(parse_number).collect()
}

pub fn parse_matrix<T: Scalar>(v: &Value, n: usize, what: &str) -> CliResult<Matrix<T>> {
    let rows = v
        .as_array()
        .ok_or_else(|| CliError::parse(format!("{what}: expected an array of rows")))?;
    if rows.len() != n {
        return Err(CliError::parse(format!(
            "{what}: expected {n} rows, found {}",
            rows.len()
        )));
    }
    let rows = rows
        .iter()
        .enumerate()
        .map(|(i, r)| parse_vector(r, n, &format!("{what} row {i}")))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Matrix::from_rows(rows)?)
}

fn parse_tolerance<T: Scalar>(raw: &RawTolerance) -> CliResult<Tolerance<T>> {
    let mut tol = T::default_tolerance();
    if let Some(v) = &raw.sum {
        tol.sum = parse_number(v)?;
    }
    if let Some(v) = &raw.eq {
        tol.eq = parse_number(v)?;
    }
    if let Some(v) = &raw.lp {
        tol.lp = parse_number(v)?;
    }
    if !tol.is_valid() {
        return Err(CliError::parse("tolerances must be nonnegative"));
    }
    Ok(tol)
}

impl<T: Scalar> ModelFile<T> {
    /// Builds the model; shape problems are parse errors, value problems
    /// (non-stochastic rows, crossed bounds) are domain errors.
    pub fn from_raw(raw: &RawModel) -> CliResult<Self> {
        let n = raw.states.len();
        if n == 0 {
            return Err(CliError::parse("states: at least one state is required"));
        }
        let sections = [
            raw.transition_law.is_some(),
            raw.joint_sequence.is_some(),
            raw.interval_joint.is_some(),
            raw.weights.is_some(),
        ];
        if sections.iter().filter(|&&b| b).count() != 1 {
            return Err(CliError::parse(
                "exactly one of transition_law, joint_sequence, interval_joint, weights is required",
            ));
        }
        let tolerance_override = raw.tolerance.as_ref().map(parse_tolerance).transpose()?;
        let tol = tolerance_override.clone().unwrap_or_else(T::default_tolerance);

        let model = if let Some(law) = &raw.transition_law {
            let initial = ProbVector::new(parse_vector(&law.initial, n, "initial")?, &tol)?;
            let steps = law
                .steps
                .iter()
                .enumerate()
                .map(|(k, m)| {
                    let m = parse_matrix(m, n, &format!("steps[{k}]"))?;
                    Ok(StochasticMatrix::new(m, &tol)?)
                })
                .collect::<CliResult<Vec<_>>>()?;
            if steps.is_empty() {
                return Err(CliError::parse("steps: at least one matrix is required"));
            }
            Model::Law(TransitionLaw::new(initial, steps)?)
        } else if let Some(seq) = &raw.joint_sequence {
            if seq.mats.is_empty() {
                return Err(CliError::parse("mats: at least one matrix is required"));
            }
            let mats = seq
                .mats
                .iter()
                .enumerate()
                .map(|(k, m)| Ok(JointMatrix::new(parse_matrix(m, n, &format!("mats[{k}]"))?, &tol)?))
                .collect::<CliResult<Vec<_>>>()?;
            Model::Sequence(JointSequence::new(mats, &tol)?)
        } else if let Some(b) = &raw.interval_joint {
            let lower = parse_matrix(&b.lower, n, "lower")?;
            let upper = parse_matrix(&b.upper, n, "upper")?;
            Model::Interval(IntervalJointSet::new(lower, upper)?)
        } else {
            let w = raw.weights.as_ref().expect("one section present");
            match (&w.matrix, &w.lower, &w.upper) {
                (Some(m), None, None) => Model::Weights(WeightMatrix::new(parse_matrix(m, n, "matrix")?, w.directed)?),
                (None, Some(lo), Some(hi)) => {
                    let lower = parse_matrix(lo, n, "lower")?;
                    let upper = parse_matrix(hi, n, "upper")?;
                    Model::WeightBox(if w.directed {
                        IntervalWeightSet::new(lower, upper)?
                    } else {
                        IntervalWeightSet::undirected(lower, upper)?
                    })
                }
                _ => return Err(CliError::parse("weights: give either matrix or both lower and upper")),
            }
        };
        Ok(ModelFile {
            states: raw.states.clone(),
            model,
            tolerance_override,
        })
    }

    pub fn to_value(&self) -> Value {
        let mut out = Map::new();
        out.insert("states".into(), json!(self.states));
        let (key, body) = match &self.model {
            Model::Law(law) => (
                "transition_law",
                json!({
                    "initial": vector_value(law.initial().entries()),
                    "steps": law.steps().iter().map(|p| matrix_value(p.matrix())).collect::<Vec<_>>(),
                }),
            ),
            Model::Sequence(seq) => (
                "joint_sequence",
                json!({ "mats": seq.mats().iter().map(|m| matrix_value(m.matrix())).collect::<Vec<_>>() }),
            ),
            Model::Interval(b) => (
                "interval_joint",
                json!({ "lower": matrix_value(b.lower()), "upper": matrix_value(b.upper()) }),
            ),
            Model::Weights(w) => (
                "weights",
                json!({ "matrix": matrix_value(w.matrix()), "directed": w.is_directed() }),
            ),
            Model::WeightBox(b) => (
                "weights",
                json!({
                    "lower": matrix_value(b.lower()),
                    "upper": matrix_value(b.upper()),
                    "directed": b.is_directed(),
                }),
            ),
        };
        out.insert(key.into(), body);
        if let Some(t) = &self.tolerance_override {
            out.insert(
                "tolerance".into(),
                json!({ "sum": scalar_value(&t.sum), "eq": scalar_value(&t.eq), "lp": scalar_value(&t.lp) }),
            );
        }
        Value::Object(out)
    }

    pub fn to_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("serializable");
        s.push('\n');
        s
    }
}

/// Fraction string in rational mode, JSON number in float mode.
pub fn scalar_value<T: Scalar>(x: &T) -> Value {
    let text = x.to_text();
    if T::EXACT {
        Value::String(text)
    } else {
        text.parse::<serde_json::Number>()
            .map(Value::Number)
            .unwrap_or(Value::String(text))
    }
}

pub fn vector_value<T: Scalar>(v: &[T]) -> Value {
    Value::Array(v.iter().map(scalar_value).collect())
}

pub fn matrix_value<T: Scalar>(m: &Matrix<T>) -> Value {
    Value::Array((0..m.rows()).map(|i| vector_value(m.row(i))).collect())
}

/// Reads a gamble: a nested array of depth `d` over `n` states, optionally
/// wrapped as `{"gamble": ...}`. Returns the depth and values in
/// lexicographic path order.
pub fn parse_gamble_table<T: Scalar>(v: &Value, n: usize) -> CliResult<(usize, Vec<T>)> {
    let table = match v {
        Value::Object(map) => map
            .get("gamble")
            .ok_or_else(|| CliError::parse("gamble file: missing key \"gamble\""))?,
        other => other,
    };
    let mut depth = 0;
    let mut probe = table;
    while let Value::Array(items) = probe {
        depth += 1;
        probe = items.first().ok_or_else(|| CliError::parse("gamble: empty array"))?;
    }
    if depth < 2 {
        return Err(CliError::parse("gamble: expected a table of depth at least 2"));
    }
    let mut values = Vec::with_capacity(n.pow(depth as u32));
    flatten(table, depth, n, &mut values)?;
    Ok((depth, values))
}

fn flatten<T: Scalar>(v: &Value, depth: usize, n: usize, out: &mut Vec<T>) -> CliResult<()> {
    if depth == 0 {
        out.push(parse_number(v)?);
        return Ok(());
    }
    let items = v.as_array().ok_or_else(|| CliError::parse("gamble: ragged table"))?;
    if items.len() != n {
        return Err(CliError::parse(format!(
            "gamble: expected {n} entries per axis, found {}",
            items.len()
        )));
    }
    items.iter().try_for_each(|item| flatten(item, depth - 1, n, out))
}

/// Expands a depth-2 table to `horizon` pairwise, otherwise requires the
/// depth to equal `horizon`.
pub fn build_path_gamble<T: Scalar>(
    depth: usize,
    values: Vec<T>,
    n: usize,
    horizon: usize,
) -> CliResult<PathGamble<T>> {
    if depth == horizon {
        return Ok(PathGamble::new(n, horizon, values)?);
    }
    if depth == 2 {
        let g = Matrix::from_vec(n, n, values)?;
        return Ok(PathGamble::from_pairwise(&g, horizon));
    }
    Err(CliError::parse(format!(
        "gamble of depth {depth} does not fit horizon {horizon}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use imprecise_markov::Rational;

    fn raw(v: Value) -> RawModel {
        RawModel::from_value(v).unwrap()
    }

    #[test]
    fn fraction_strings_are_exact() {
        let m = raw(json!({
            "states": ["a", "b"],
            "interval_joint": { "lower": [["1/3", 0], [0, 0.1]], "upper": [[1, "2/3"], [1, 1]] }
        }));
        let file = ModelFile::<Rational>::from_raw(&m).unwrap();
        let Model::Interval(b) = &file.model else { panic!() };
        assert_eq!(b.lower()[(0, 0)], Rational::ratio(1, 3));
        assert_eq!(b.lower()[(1, 1)], Rational::ratio(1, 10));
    }

    #[test]
    fn round_trip_preserves_values() {
        let m = raw(json!({
            "states": ["a", "b"],
            "transition_law": { "initial": ["5/9", "4/9"], "steps": [[[0.2, 0.8], [0.7, 0.3]]] },
            "tolerance": { "eq": "1/1000" }
        }));
        let file = ModelFile::<Rational>::from_raw(&m).unwrap();
        let again = ModelFile::<Rational>::from_raw(&raw(file.to_value())).unwrap();
        assert_eq!(file, again);

        let float = ModelFile::<f64>::from_raw(&m).unwrap();
        let again = ModelFile::<f64>::from_raw(&raw(float.to_value())).unwrap();
        assert_eq!(float, again);
    }

    #[test]
    fn shape_errors_are_parse_errors() {
        let two_sections = raw(json!({
            "states": ["a"],
            "interval_joint": { "lower": [[1]], "upper": [[1]] },
            "joint_sequence": { "mats": [[[1]]] }
        }));
        assert_eq!(ModelFile::<f64>::from_raw(&two_sections).unwrap_err().exit_code(), 3);

        let ragged = raw(json!({
            "states": ["a", "b"],
            "joint_sequence": { "mats": [[[0.5, 0.5], [0]]] }
        }));
        assert_eq!(ModelFile::<f64>::from_raw(&ragged).unwrap_err().exit_code(), 3);

        assert!(RawModel::from_value(json!({ "states": ["a"], "bogus": 1 })).is_err());
    }

    #[test]
    fn value_errors_are_domain_errors() {
        let m = raw(json!({
            "states": ["a", "b"],
            "transition_law": { "initial": [0.5, 0.5], "steps": [[[0.5, 0.6], [0.5, 0.5]]] }
        }));
        assert_eq!(ModelFile::<f64>::from_raw(&m).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn gamble_tables() {
        let (d, v) = parse_gamble_table::<Rational>(&json!({ "gamble": [[1, 2], [3, "1/2"]] }), 2).unwrap();
        assert_eq!(d, 2);
        assert_eq!(v[3], Rational::ratio(1, 2));
        let f = build_path_gamble(d, v, 2, 3).unwrap();
        // path (1, 0, 1): g(1,0) + g(0,1)
        assert_eq!(f.values()[5], Rational::from_usize(5));

        let (d, _) = parse_gamble_table::<f64>(&json!([[[0, 1], [2, 3]], [[4, 5], [6, 7]]]), 2).unwrap();
        assert_eq!(d, 3);
        assert!(parse_gamble_table::<f64>(&json!([[1, 2], [3]]), 2).is_err());
        assert!(build_path_gamble::<f64>(3, vec![0.0; 8], 2, 4).is_err());
    }
}
