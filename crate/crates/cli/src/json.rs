//! Serialization helpers shared by the commands.

use forestmat::{BinaryMatrix, Error, Matrix, RationalMatrix};
use serde_json::{json, Map, Value};

pub const LABELING: &str = "row-major, 1-based vertex labels";
pub const TOOL: &str = "forestmat";

/// Non-finite values become `null`.
pub fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn numbers(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| number(x)).collect())
}

pub fn matrix(m: &Matrix) -> Value {
    Value::Array(m.row_iter().map(|r| Value::Array(r.iter().map(|&x| number(x)).collect())).collect())
}

pub fn binary(m: &BinaryMatrix) -> Value {
    Value::Array(m.row_iter().map(|r| json!(r.iter().copied().collect::<Vec<u8>>())).collect())
}

/// Exact entries as `"p/q"` strings.
pub fn rational(m: &RationalMatrix) -> Value {
    let n = m.n();
    Value::Array(
        (0..n)
            .map(|i| Value::Array((0..n).map(|j| Value::String(m[(i, j)].to_string())).collect()))
            .collect(),
    )
}

pub fn label(v: usize) -> usize {
    v + 1
}

pub fn labels(vs: &[usize]) -> Value {
    json!(vs.iter().map(|&v| label(v)).collect::<Vec<_>>())
}

pub fn label_groups(groups: &[Vec<usize>]) -> Value {
    Value::Array(groups.iter().map(|g| labels(g)).collect())
}

/// Envelope carried by every document: tool, version, command, input and
/// effective parameters.
pub fn document(command: &str, input: &str, parameters: Value, body: Map<String, Value>) -> Value {
    let mut doc = Map::new();
    doc.insert("tool".into(), json!(TOOL));
    doc.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    doc.insert("command".into(), json!(command));
    doc.insert("input".into(), json!(input));
    doc.insert("labeling".into(), json!(LABELING));
    doc.insert("parameters".into(), parameters);
    doc.extend(body);
    Value::Object(doc)
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse { .. } => "parse",
        Error::TooFewVertices(_) => "too_few_vertices",
        Error::LoopArc(_) => "loop_arc",
        Error::DuplicateArc(..) => "duplicate_arc",
        Error::NonPositiveWeight { .. } => "nonpositive_weight",
        Error::VertexOutOfRange { .. } => "vertex_out_of_range",
        Error::NumericalBreakdown { .. } => "numerical_breakdown",
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::IdentityViolated { .. } => "identity_violated",
        Error::ParameterOutOfRange { .. } => "parameter_out_of_range",
        Error::IndexOutOfRange { .. } => "index_out_of_range",
        Error::EnumerationLimit(_) => "enumeration_limit",
        Error::Precondition(_) => "precondition",
        Error::NotStrong { .. } => "not_strong",
        Error::NoConvergence { .. } => "no_convergence",
        Error::UnknownCondition(_) => "unknown_condition",
    }
}

pub fn render(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("JSON values always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_numbers_are_null() {
        assert_eq!(number(f64::NAN), Value::Null);
        assert_eq!(number(f64::INFINITY), Value::Null);
        assert_eq!(number(0.1), json!(0.1));
    }

    #[test]
    fn floats_round_trip() {
        for x in [1.0 / 3.0, 2.0_f64.sqrt(), 1e-300, 123456.789e10] {
            let text = render(&number(x));
            assert_eq!(text.trim().parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn matrices_are_row_major() {
        let m = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(matrix(&m), json!([[1.0, 2.0], [3.0, 4.0]]));
    }

    #[test]
    fn envelope_fields() {
        let doc = document("knots", "g.txt", json!({}), Map::new());
        assert_eq!(doc["labeling"], LABELING);
        assert_eq!(doc["command"], "knots");
        assert_eq!(doc["version"], env!("CARGO_PKG_VERSION"));
    }
}
