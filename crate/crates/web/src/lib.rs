//! WebAssembly bindings for the browser demo.
//!
//! Each exported function takes a JSON string and returns a JSON string,
//! either a result object or `{"error": "..."}`. All arithmetic is exact;
//! numbers may be given as JSON numbers or `"p/q"` strings.

use imprecise_markov::credal::{check_invariant_hull, MatrixSet, VertexCredalSet};
use imprecise_markov::walk::{
    enclosing_joint_box, is_symmetric_weight_set, walk_lower_expectation, walk_upper_expectation,
};
use imprecise_markov::{
    detailed_balance_holds, joint_from, q_reverse, stationary_distribution, IntervalWeightSet, Matrix, ProbVector,
    Rational, Scalar, StochasticMatrix, Tolerance,
};
use serde::Deserialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

type Q = Rational;

fn number(v: &Value) -> Result<Q, String> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => return Err(format!("expected a number, found {other}")),
    };
    Q::parse_value(&text).ok_or_else(|| format!("invalid number {text:?}"))
}

fn vector(v: &[Value]) -> Result<Vec<Q>, String> {
    v.iter().map(number).collect()
}

fn matrix(rows: &[Vec<Value>]) -> Result<Matrix<Q>, String> {
    let rows = rows.iter().map(|r| vector(r)).collect::<Result<Vec<_>, _>>()?;
    Matrix::from_rows(rows).map_err(|e| e.to_string())
}

fn text_vec(v: &[Q]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_text())).collect())
}

fn text_mat(m: &Matrix<Q>) -> Value {
    Value::Array((0..m.rows()).map(|i| text_vec(m.row(i))).collect())
}

fn respond(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn parse<T: for<'de> Deserialize<'de>>(input: &str) -> Result<T, String> {
    serde_json::from_str(input).map_err(|e| e.to_string())
}

#[derive(Deserialize)]
struct PairInput {
    p: Vec<Vec<Value>>,
    q: Vec<Value>,
}

/// `{p, q}` to the joint matrix `diag(q)P`, the q-reverse of `P`, the
/// reversed joint matrix, the stationary law and the detailed-balance flag.
pub fn explore_pair_json(input: &str) -> Result<Value, String> {
    let input: PairInput = parse(input)?;
    let tol = Tolerance::<Q>::zero();
    let err = |e: imprecise_markov::Error| e.to_string();
    let p = StochasticMatrix::new(matrix(&input.p)?, &tol).map_err(err)?;
    let q = ProbVector::new(vector(&input.q)?, &tol).map_err(err)?;
    let joint = joint_from(&q, &p).map_err(err)?;
    let qp = q.propagate(&p).map_err(err)?;
    let reverse = q_reverse(&p, &q, &tol).map_err(err)?;
    let reversed_joint = joint_from(&qp, &reverse).map_err(err)?;
    let stationary = stationary_distribution(&p, &tol).ok();
    let balanced = stationary
        .as_ref()
        .is_some_and(|pi| detailed_balance_holds(&p, pi, &tol));
    Ok(json!({
        "qp": text_vec(qp.entries()),
        "joint": text_mat(joint.matrix()),
        "reverse": text_mat(reverse.matrix()),
        "reversed_joint": text_mat(reversed_joint.matrix()),
        "stationary": stationary.map(|pi| text_vec(pi.entries())),
        "detailed_balance": balanced,
    }))
}

#[derive(Deserialize)]
struct WalkInput {
    lower: Vec<Vec<Value>>,
    upper: Vec<Vec<Value>>,
    gamble: Vec<Vec<Value>>,
}

/// Weight box `{lower, upper, gamble}` to the lower and upper expectation of
/// the gamble under the induced joint matrices, plus the enclosing joint box.
pub fn walk_expectation_json(input: &str) -> Result<Value, String> {
    let input: WalkInput = parse(input)?;
    let tol = Tolerance::<Q>::zero();
    let err = |e: imprecise_markov::Error| e.to_string();
    let (lo, hi) = (matrix(&input.lower)?, matrix(&input.upper)?);
    let set = IntervalWeightSet::new(lo, hi).map_err(err)?;
    let g = matrix(&input.gamble)?;
    let lower = walk_lower_expectation(&set, &g, &tol).map_err(err)?;
    let upper = walk_upper_expectation(&set, &g, &tol).map_err(err)?;
    let joint = enclosing_joint_box(&set, &tol).map_err(err)?;
    Ok(json!({
        "lower": lower.to_text(),
        "upper": upper.to_text(),
        "lower_approx": lower.to_f64(),
        "upper_approx": upper.to_f64(),
        "joint_lower": text_mat(joint.lower()),
        "joint_upper": text_mat(joint.upper()),
        "symmetric": is_symmetric_weight_set(&set, &tol),
    }))
}

#[derive(Deserialize)]
struct HullInput {
    matrices: Vec<Vec<Vec<Value>>>,
    #[serde(default)]
    vertices: Option<Vec<Vec<Value>>>,
}

/// `{matrices, vertices?}`: is `co(vertices)` mapped into itself by every
/// matrix? Vertices default to the stationary laws of the matrices.
pub fn hull_check_json(input: &str) -> Result<Value, String> {
    let input: HullInput = parse(input)?;
    let tol = Tolerance::<Q>::zero();
    let err = |e: imprecise_markov::Error| e.to_string();
    let mats = input
        .matrices
        .iter()
        .map(|m| StochasticMatrix::new(matrix(m)?, &tol).map_err(err))
        .collect::<Result<Vec<_>, _>>()?;
    let vertices = match &input.vertices {
        Some(vs) => vs
            .iter()
            .map(|v| ProbVector::new(vector(v)?, &tol).map_err(err))
            .collect::<Result<Vec<_>, _>>()?,
        None => mats
            .iter()
            .map(|p| stationary_distribution(p, &tol).map_err(err))
            .collect::<Result<Vec<_>, _>>()?,
    };
    let verts = VertexCredalSet::new(vertices.clone()).map_err(err)?;
    let set = MatrixSet::new(mats, true).map_err(err)?;
    let witness = check_invariant_hull(&verts, &set, &tol).map_err(err)?;
    Ok(json!({
        "vertices": vertices.iter().map(|v| text_vec(v.entries())).collect::<Vec<_>>(),
        "invariant": witness.is_none(),
        "witness": witness.map(|w| json!({
            "vertex": w.vertex,
            "matrix": w.matrix,
            "image": text_vec(w.image.entries()),
        })),
    }))
}

#[wasm_bindgen]
pub fn explore_pair(input: &str) -> String {
    respond(explore_pair_json(input))
}

#[wasm_bindgen]
pub fn walk_expectation(input: &str) -> String {
    respond(walk_expectation_json(input))
}

#[wasm_bindgen]
pub fn hull_check(input: &str) -> String {
    respond(hull_check_json(input))
}
