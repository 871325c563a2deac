//! JSON value helpers and the csv / pretty renderings.

use nalgebra::{Dim, Matrix, RawStorage};
use serde_json::{json, Map, Value};

use shellstrain::verify::{CheckReport, Relation};

/// Row-major nested array.
pub fn mat<R: Dim, C: Dim, S: RawStorage<f64, R, C>>(m: &Matrix<f64, R, C, S>) -> Value {
    Value::Array((0..m.nrows()).map(|i| json!((0..m.ncols()).map(|j| m[(i, j)]).collect::<Vec<_>>())).collect())
}

/// A tensor-valued JSON object paired with a map of Frobenius norms.
#[derive(Default)]
pub struct Tensors {
    values: Map<String, Value>,
    norms: Map<String, Value>,
}

impl Tensors {
    pub fn put<R: Dim, C: Dim, S: RawStorage<f64, R, C>>(&mut self, name: &str, m: &Matrix<f64, R, C, S>) {
        let norm = (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| (i, j))).map(|ij| m[ij] * m[ij]).sum::<f64>();
        self.values.insert(name.to_string(), mat(m));
        self.norms.insert(name.to_string(), json!(norm.sqrt()));
    }

    pub fn into_value(self, point: [f64; 2]) -> Value {
        json!({ "point": point, "tensors": self.values, "norms": self.norms })
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(o) => o.iter().for_each(|(k, x)| flatten(&join(k), x, rows)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| flatten(&join(&i.to_string()), x, rows)),
        Value::Null => rows.push((prefix.to_string(), String::new())),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Two-column `path,value` listing of every leaf.
pub fn csv(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let mut out = String::from("path,value\n");
    for (k, x) in rows {
        out.push_str(&format!("{},{}\n", csv_field(&k), csv_field(&x)));
    }
    out
}

fn is_number_row(v: &Value) -> bool {
    matches!(v, Value::Array(a) if a.iter().all(Value::is_number))
}

fn pretty_into(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(o) => {
            for (k, x) in o {
                match x {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        pretty_into(x, indent + 2, out);
                    }
                    Value::Array(a) if a.iter().all(is_number_row) && !a.is_empty() && a[0].is_array() => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        for row in a {
                            out.push_str(&format!("{pad}  {}\n", number_row(row)));
                        }
                    }
                    Value::Array(a) if !is_number_row(x) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        for (i, item) in a.iter().enumerate() {
                            out.push_str(&format!("{pad}  [{i}]\n"));
                            pretty_into(item, indent + 4, out);
                        }
                    }
                    Value::Array(_) => out.push_str(&format!("{pad}{k}: {}\n", number_row(x))),
                    _ => out.push_str(&format!("{pad}{k}: {}\n", scalar(x))),
                }
            }
        }
        Value::Array(a) => {
            for (i, item) in a.iter().enumerate() {
                out.push_str(&format!("{pad}[{i}]\n"));
                pretty_into(item, indent + 2, out);
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => format!("{:.6e}", n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn number_row(v: &Value) -> String {
    let Value::Array(a) = v else { return scalar(v) };
    a.iter().map(|x| format!("{:>14}", scalar(x))).collect::<Vec<_>>().join(" ")
}

pub fn pretty(v: &Value) -> String {
    let mut out = String::new();
    pretty_into(v, 0, &mut out);
    out
}

/// One line per residual.
/// Shortest round-trip form, the same digits the JSON output carries.
fn num(v: f64) -> String {
    if v.is_finite() { json!(v).to_string() } else { v.to_string() }
}

pub fn reports_csv(reports: &[CheckReport]) -> String {
    let mut out = String::from("check_id,scenario,label,x1,x2,value,bound,relation,normalized,verdict\n");
    for r in reports {
        let verdict = if r.passed() { "pass" } else { "fail" };
        for x in &r.residuals {
            let (x1, x2) = x.point.map(|p| (num(p[0]), num(p[1]))).unwrap_or_default();
            let relation = match x.relation {
                Relation::AtMost => "at_most",
                Relation::AtLeast => "at_least",
                Relation::Report => "report",
            };
            out.push_str(&format!(
                "{},{},{},{x1},{x2},{},{},{relation},{},{verdict}\n",
                csv_field(&r.check_id),
                csv_field(&r.scenario),
                csv_field(&x.label),
                num(x.value),
                num(x.bound),
                num(x.normalized)
            ));
        }
    }
    out
}

pub fn reports_pretty(reports: &[CheckReport]) -> String {
    let mut out = format!("{:<24} {:<44} {:>6} {:>12}\n", "check", "scenario", "result", "max/bound");
    for r in reports {
        let verdict = if r.passed() { "pass" } else { "FAIL" };
        out.push_str(&format!("{:<24} {:<44} {verdict:>6} {:>12.3e}\n", r.check_id, r.scenario, r.max_residual));
        if !r.passed() {
            for x in r.residuals.iter().filter(|x| x.normalized > 1.0) {
                out.push_str(&format!("    {} = {:.3e} (bound {:.1e})\n", x.label, x.value, x.bound));
            }
        }
        for n in &r.notes {
            out.push_str(&format!("    note: {n}\n"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix2x3;

    #[test]
    fn matrices_are_row_major() {
        let m = Matrix2x3::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0);
        assert_eq!(mat(&m), json!([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]));
    }

    #[test]
    fn csv_flattens_leaves() {
        let v = json!({"a": [[1.0, 2.0]], "b": {"c": "x,y"}, "d": null});
        assert_eq!(csv(&v), "path,value\na.0.0,1.0\na.0.1,2.0\nb.c,\"x,y\"\nd,\n");
    }

    #[test]
    fn pretty_prints_matrices_by_row() {
        let s = pretty(&json!({"I": [[1.0, 0.0], [0.0, 1.0]], "H": 0.5}));
        assert!(s.starts_with("H: 5.000000e-1\nI:\n"), "{s}");
        assert_eq!(s.lines().count(), 4);
    }
}
