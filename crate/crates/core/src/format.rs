//! Text formats: instance documents (JSON) and the compact arrangement form.
//!
//! Instance documents look like
//!
//! ```json
//! {"num_items": 3, "weights": [1, 1, 1],
//!  "classes": [{"bias": 1, "count": 4}, {"bias": "-1/2", "count": 1}],
//!  "unlabeled_cost": "auto", "outcome": "median"}
//! ```
//!
//! JSON integers and `"p/q"` strings are exact; JSON floats are not.
//! `unlabeled_cost` may also be `"auto"`, meaning 1.1 times the empty-item
//! threshold. Arrangements are written item by item, separated by `;`, each
//! item a `,`-separated list of `COUNTxCLASS` terms, `0` for an empty item:
//! `2x0,1x1;1x0;0`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::constructive::auto_unlabeled_cost;
use crate::error::{BlottoError, Result};
use crate::model::{AgentClass, Arrangement, Instance, Outcome};
use crate::number::Number;
use crate::stability::DeviationWitness;

#[derive(Deserialize)]
#[serde(untagged)]
enum RawNumber {
    Int(i64),
    Float(f64),
    Text(String),
}

impl RawNumber {
    fn into_number(self) -> Result<Number> {
        match self {
            RawNumber::Int(v) => Ok(Number::integer(v)),
            RawNumber::Float(v) => Ok(Number::float(v)),
            RawNumber::Text(s) => Number::parse(&s),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClass {
    bias: RawNumber,
    count: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    num_items: usize,
    #[serde(default)]
    weights: Option<Vec<RawNumber>>,
    classes: Vec<RawClass>,
    unlabeled_cost: RawNumber,
    outcome: Outcome,
}

/// Parses an instance document. Malformed documents give [`BlottoError::Parse`];
/// well-formed but invalid games give [`BlottoError::InvalidInstance`].
pub fn parse_instance(text: &str) -> Result<Instance> {
    let raw: RawInstance = serde_json::from_str(text).map_err(|e| BlottoError::Parse(e.to_string()))?;
    let weights = raw
        .weights
        .map(|ws| ws.into_iter().map(RawNumber::into_number).collect::<Result<Vec<_>>>())
        .transpose()?;
    let classes = raw
        .classes
        .into_iter()
        .map(|c| Ok(AgentClass::new(c.bias.into_number()?, c.count)))
        .collect::<Result<Vec<_>>>()?;
    let auto = matches!(&raw.unlabeled_cost, RawNumber::Text(s) if s.trim() == "auto");
    let cost = if auto { Number::integer(0) } else { raw.unlabeled_cost.into_number()? };
    let instance = Instance::new(raw.num_items, weights, classes, cost, raw.outcome)?;
    if auto {
        instance.with_unlabeled_cost(auto_unlabeled_cost(&instance))
    } else {
        Ok(instance)
    }
}

fn number_value(n: &Number) -> Value {
    match n.exact() {
        Some(r) if r.is_integer() => match n.to_string().parse::<i64>() {
            Ok(v) => Value::from(v),
            Err(_) => Value::from(n.to_string()),
        },
        Some(_) => Value::from(n.to_string()),
        None => Value::from(n.to_f64()),
    }
}

#[derive(Serialize)]
struct OutClass {
    bias: Value,
    count: u32,
}

#[derive(Serialize)]
struct OutInstance {
    num_items: usize,
    weights: Vec<Value>,
    classes: Vec<OutClass>,
    unlabeled_cost: Value,
    outcome: Outcome,
}

/// Instance document that [`parse_instance`] reads back to an equal value.
pub fn instance_to_json(instance: &Instance) -> String {
    let doc = OutInstance {
        num_items: instance.num_items(),
        weights: instance.weights().iter().map(number_value).collect(),
        classes: instance
            .classes()
            .iter()
            .map(|c| OutClass { bias: number_value(&c.bias), count: c.count })
            .collect(),
        unlabeled_cost: number_value(instance.unlabeled_cost()),
        outcome: instance.outcome(),
    };
    serde_json::to_string_pretty(&doc).expect("instance documents always serialize")
}

/// JSON value for a number: integer, `"p/q"` string, or float.
pub fn number_to_json(n: &Number) -> Value {
    number_value(n)
}

pub fn format_arrangement(arrangement: &Arrangement) -> String {
    arrangement
        .rows()
        .map(|row| {
            let terms: Vec<String> = row
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(t, c)| format!("{c}x{t}"))
                .collect();
            if terms.is_empty() {
                "0".to_string()
            } else {
                terms.join(",")
            }
        })
        .collect::<Vec<_>>()
        .join(";")
}

/// Parses the compact form for an instance with `num_classes` classes.
/// Repeated terms for one class on one item add up.
pub fn parse_arrangement(text: &str, num_classes: usize) -> Result<Arrangement> {
    let bad = |why: String| BlottoError::Parse(format!("arrangement {text:?}: {why}"));
    let mut rows = Vec::new();
    for item in text.trim().split(';') {
        let mut row = vec![0u32; num_classes];
        let item = item.trim();
        if item != "0" && !item.is_empty() {
            for term in item.split(',') {
                let (count, class) = term
                    .trim()
                    .split_once(['x', 'X', '×'])
                    .ok_or_else(|| bad(format!("term {term:?} is not COUNTxCLASS")))?;
                let count: u32 = count.trim().parse().map_err(|_| bad(format!("bad count in {term:?}")))?;
                let class: usize = class.trim().parse().map_err(|_| bad(format!("bad class in {term:?}")))?;
                if class >= num_classes {
                    return Err(BlottoError::InvalidClass { index: class, classes: num_classes });
                }
                row[class] += count;
            }
        }
        rows.push(row);
    }
    Arrangement::from_rows(&rows)
}

pub fn witness_to_json(w: &DeviationWitness) -> Value {
    serde_json::json!({
        "class": w.class_index,
        "from": w.from_item,
        "to": w.to_item,
        "cost_before": number_value(&w.cost_before),
        "cost_after": number_value(&w.cost_after),
        "delta": number_value(&w.delta()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_round_trip() {
        let text = r#"{"num_items": 3, "classes": [{"bias": 1, "count": 4}, {"bias": "-1/2", "count": 1}],
                       "unlabeled_cost": "auto", "outcome": "median"}"#;
        let inst = parse_instance(text).unwrap();
        assert!(inst.is_exact());
        assert_eq!(inst.unlabeled_cost(), &Number::ratio(33, 40));
        assert_eq!(parse_instance(&instance_to_json(&inst)).unwrap(), inst);

        let floats = r#"{"num_items": 2, "weights": [0.75, 0.25], "classes": [{"bias": 1.5, "count": 2}],
                         "unlabeled_cost": 0.3, "outcome": "mean"}"#;
        let inst = parse_instance(floats).unwrap();
        assert!(!inst.is_exact());
        assert_eq!(parse_instance(&instance_to_json(&inst)).unwrap(), inst);
    }

    #[test]
    fn malformed_instances() {
        assert!(matches!(parse_instance("{"), Err(BlottoError::Parse(_))));
        let unknown = r#"{"num_items": 1, "classes": [], "unlabeled_cost": 0, "outcome": "median", "x": 1}"#;
        assert!(matches!(parse_instance(unknown), Err(BlottoError::Parse(_))));
        let bad_outcome = r#"{"num_items": 1, "classes": [{"bias": 1, "count": 1}], "unlabeled_cost": 0, "outcome": "mode"}"#;
        assert!(matches!(parse_instance(bad_outcome), Err(BlottoError::Parse(_))));
        let no_agents = r#"{"num_items": 1, "classes": [], "unlabeled_cost": 0, "outcome": "median"}"#;
        assert!(matches!(parse_instance(no_agents), Err(BlottoError::InvalidInstance(_))));
    }

    #[test]
    fn arrangement_text() {
        let arr = parse_arrangement("2x0,1x1;1x0;0", 2).unwrap();
        assert_eq!(arr, Arrangement::from_rows(&[vec![2, 1], vec![1, 0], vec![0, 0]]).unwrap());
        assert_eq!(format_arrangement(&arr), "2x0,1x1;1x0;0");
        assert_eq!(parse_arrangement(" 1x1 ; 1x0,1x0 ", 2).unwrap().get(1, 0), 2);
        assert!(parse_arrangement("2y0", 2).is_err());
        assert!(matches!(parse_arrangement("1x2", 2), Err(BlottoError::InvalidClass { .. })));
    }
}
