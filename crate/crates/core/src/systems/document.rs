use serde_json::{json, Map, Value};

use super::{Dependence, FgmCoefficients, SystemSpec};
use crate::distcore::DistributionSpec;
use crate::error::{Error, Result};

/// Parses a system document and validates the resulting tree.
///
/// Accepted shapes: `{"op": "max" | "min", "components": [...],
/// "dependence": {...}}`, `{"op": "component", "distribution": {...}}`, or a
/// bare distribution document `{"family": ...}` as a leaf.
pub fn build_system(document: &Value) -> Result<SystemSpec> {
    let spec = parse_node(document, "")?;
    spec.validate()?;
    Ok(spec)
}

fn at(path: &str, field: &str) -> String {
    if path.is_empty() {
        field.to_string()
    } else {
        format!("{path}.{field}")
    }
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::schema(if path.is_empty() { "<root>" } else { path }, "expected an object"))
}

fn parse_distribution(v: &Value, path: &str) -> Result<DistributionSpec> {
    let spec: DistributionSpec = serde_json::from_value(v.clone()).map_err(|e| Error::schema(path, e.to_string()))?;
    spec.validate()?;
    Ok(spec)
}

fn parse_node(v: &Value, path: &str) -> Result<SystemSpec> {
    let obj = object(v, path)?;
    if !obj.contains_key("op") && obj.contains_key("family") {
        let here = if path.is_empty() { "distribution" } else { path };
        return parse_distribution(v, here).map(SystemSpec::Component);
    }
    for key in obj.keys() {
        if !matches!(key.as_str(), "op" | "components" | "dependence" | "distribution") {
            return Err(Error::schema(at(path, key), "unknown field"));
        }
    }
    let op = obj
        .get("op")
        .ok_or_else(|| Error::schema(at(path, "op"), "missing field"))?
        .as_str()
        .ok_or_else(|| Error::schema(at(path, "op"), "expected a string"))?;
    match op {
        "component" => {
            let d = obj.get("distribution").ok_or_else(|| Error::schema(at(path, "distribution"), "missing field"))?;
            parse_distribution(d, &at(path, "distribution")).map(SystemSpec::Component)
        }
        "max" | "min" => {
            let list = obj
                .get("components")
                .ok_or_else(|| Error::schema(at(path, "components"), "missing field"))?
                .as_array()
                .ok_or_else(|| Error::schema(at(path, "components"), "expected an array"))?;
            if list.is_empty() {
                return Err(Error::schema(at(path, "components"), "must not be empty"));
            }
            let children = list
                .iter()
                .enumerate()
                .map(|(i, c)| parse_node(c, &format!("{}[{i}]", at(path, "components"))))
                .collect::<Result<Vec<_>>>()?;
            let dependence = match obj.get("dependence") {
                None | Some(Value::Null) => Dependence::Independent,
                Some(d) => parse_dependence(d, &at(path, "dependence"), children.len())?,
            };
            Ok(if op == "max" {
                SystemSpec::Max { children, dependence }
            } else {
                SystemSpec::Min { children, dependence }
            })
        }
        other => {
            Err(Error::schema(at(path, "op"), format!("expected \"max\", \"min\" or \"component\", got {other:?}")))
        }
    }
}

fn parse_dependence(v: &Value, path: &str, k: usize) -> Result<Dependence> {
    let obj = object(v, path)?;
    let kind = obj
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::schema(at(path, "type"), "missing or not a string"))?;
    match kind {
        "independent" => Ok(Dependence::Independent),
        "fgm" => {
            let rows: Vec<Vec<f64>> = match obj.get("c") {
                Some(c) => {
                    serde_json::from_value(c.clone()).map_err(|e| Error::schema(at(path, "c"), e.to_string()))?
                }
                None => return Err(Error::schema(at(path, "c"), "missing field")),
            };
            FgmCoefficients::from_upper(k, &rows).map(Dependence::Fgm)
        }
        other => Err(Error::schema(at(path, "type"), format!("expected \"independent\" or \"fgm\", got {other:?}"))),
    }
}

impl SystemSpec {
    pub fn to_json(&self) -> Value {
        match self {
            SystemSpec::Component(d) => json!({
                "op": "component",
                "distribution": serde_json::to_value(d).expect("distribution serializes"),
            }),
            SystemSpec::Max { children, dependence } | SystemSpec::Min { children, dependence } => {
                let op = if matches!(self, SystemSpec::Max { .. }) { "max" } else { "min" };
                let dep = match dependence {
                    Dependence::Independent => json!({"type": "independent"}),
                    Dependence::Fgm(c) => json!({"type": "fgm", "c": c.rows()}),
                };
                json!({
                    "op": op,
                    "components": children.iter().map(SystemSpec::to_json).collect::<Vec<_>>(),
                    "dependence": dep,
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_series_of_parallel() {
        let doc = json!({
            "op": "min",
            "components": [
                {"op": "max", "components": [{"family": "exponential", "rate": 1.0},
                                             {"family": "exponential", "rate": 2.0}]},
                {"op": "max", "components": [{"op": "component",
                                              "distribution": {"family": "exponential", "rate": 1.0}},
                                             {"family": "exponential", "rate": 2.0}]}
            ]
        });
        let s = build_system(&doc).unwrap();
        assert_eq!(s.depth(), 2);
        assert_eq!(build_system(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn fgm_sum_violation_is_reported() {
        let doc = json!({
            "op": "max",
            "components": [{"family": "exponential", "rate": 1.0},
                           {"family": "exponential", "rate": 2.0},
                           {"family": "exponential", "rate": 3.0}],
            "dependence": {"type": "fgm", "c": [[0.6, 0.5], [0.0]]}
        });
        let err = build_system(&doc).unwrap_err();
        assert!(matches!(err, Error::FgmConstraint { .. }));
        assert!(err.to_string().contains("<= 1"), "{err}");
    }

    #[test]
    fn schema_errors_name_the_field() {
        let doc = json!({"op": "max", "components": [{"family": "exponential", "rat": 1.0}]});
        match build_system(&doc).unwrap_err() {
            Error::Schema { field, .. } => assert_eq!(field, "components[0]"),
            other => panic!("{other:?}"),
        }
        let doc = json!({"op": "avg", "components": []});
        match build_system(&doc).unwrap_err() {
            Error::Schema { field, .. } => assert_eq!(field, "op"),
            other => panic!("{other:?}"),
        }
    }
}
