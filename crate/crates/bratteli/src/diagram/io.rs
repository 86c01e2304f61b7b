use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{BratteliDiagram, Generator, OrderedLevel};
use crate::error::{Error, Result};

/// On-disk form: `hat`, `levels` (target index as string to ascending source
/// list, 0-based), optional `generator`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramFile {
    pub hat: Vec<serde_json::Value>,
    pub levels: Vec<BTreeMap<String, Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<Generator>,
}

pub fn level_from_map(
    map: &BTreeMap<String, Vec<usize>>,
    source_count: usize,
    location: &str,
) -> Result<OrderedLevel> {
    let fmt_err = |m: String| Error::Format {
        location: location.to_string(),
        message: m,
    };
    let mut order = vec![None; map.len()];
    for (k, list) in map {
        let v: usize = k
            .parse()
            .map_err(|_| fmt_err(format!("vertex key '{k}' is not an index")))?;
        if v >= map.len() {
            return Err(fmt_err(format!(
                "vertex key {v} out of range, keys must be 0..{}",
                map.len()
            )));
        }
        order[v] = Some(list.clone());
    }
    let order: Vec<Vec<usize>> = order.into_iter().map(|o| o.unwrap()).collect();
    OrderedLevel::new(source_count, order).map_err(|e| fmt_err(e.to_string()))
}

pub fn level_to_map(level: &OrderedLevel) -> BTreeMap<String, Vec<usize>> {
    level
        .orders()
        .iter()
        .enumerate()
        .map(|(v, l)| (v.to_string(), l.clone()))
        .collect()
}

fn hat_value(h: &BigInt) -> serde_json::Value {
    match u64::try_from(h) {
        Ok(x) => serde_json::Value::from(x),
        Err(_) => serde_json::Value::from(h.to_string()),
    }
}

impl DiagramFile {
    pub fn from_diagram(d: &BratteliDiagram) -> Self {
        DiagramFile {
            hat: d.hat().iter().map(hat_value).collect(),
            levels: d.levels().iter().map(level_to_map).collect(),
            generator: d.generator().cloned(),
        }
    }

    pub fn to_diagram(&self) -> Result<BratteliDiagram> {
        let mut hat = Vec::new();
        for (i, v) in self.hat.iter().enumerate() {
            let h: Option<BigInt> = match v {
                serde_json::Value::Number(n) => n.as_u64().map(BigInt::from),
                serde_json::Value::String(s) => s.parse().ok(),
                _ => None,
            };
            hat.push(h.ok_or_else(|| Error::Format {
                location: format!("hat[{i}]"),
                message: "expected a positive integer".into(),
            })?);
        }
        let mut levels = Vec::new();
        let mut width = hat.len();
        for (i, map) in self.levels.iter().enumerate() {
            let l = level_from_map(map, width, &format!("levels[{i}] (level {})", i + 2))?;
            width = l.target_count();
            levels.push(l);
        }
        BratteliDiagram::new(hat, levels, self.generator.clone()).map_err(|e| Error::Format {
            location: "diagram".into(),
            message: e.to_string(),
        })
    }

    pub fn parse(text: &str) -> Result<BratteliDiagram> {
        let f: DiagramFile = serde_json::from_str(text).map_err(|e| Error::Format {
            location: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        f.to_diagram()
    }

    pub fn render(d: &BratteliDiagram) -> String {
        serde_json::to_string_pretty(&Self::from_diagram(d)).expect("serializable") + "\n"
    }
}
