use serde_json::Value;

const TABLE_KEYS: [&str; 6] = ["stages", "steps", "rows", "classes", "checks", "stages_run"];

/// `{"free_rank": k, "invariant_factors": [..]}` as `Z^k ⊕ Z/d ...`.
pub(crate) fn group_text(v: &Value) -> Option<String> {
    let rank = v.get("free_rank")?.as_u64()?;
    let factors = v.get("invariant_factors")?.as_array()?;
    let mut parts = Vec::new();
    match rank {
        0 => {}
        1 => parts.push("Z".to_string()),
        n => parts.push(format!("Z^{n}")),
    }
    for d in factors {
        let d = match d {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        parts.push(format!("Z/{d}"));
    }
    Some(if parts.is_empty() { "0".into() } else { parts.join(" + ") })
}

fn cell(v: &Value) -> String {
    if let Some(g) = group_text(v) {
        return g;
    }
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.replace(['\t', '\n'], " "),
        Value::Object(_) | Value::Array(_) => v.to_string(),
        other => other.to_string(),
    }
}

/// One table per report: the first row-list found, or `key\tvalue` pairs.
pub(crate) fn tsv(report: &Value) -> String {
    let mut out = String::new();
    let table = TABLE_KEYS
        .iter()
        .find_map(|k| report.get(*k).and_then(Value::as_array).filter(|a| a.iter().all(Value::is_object)));
    match table {
        Some(rows) if !rows.is_empty() => {
            let keys: Vec<&String> = rows[0].as_object().expect("object rows").keys().collect();
            out.push_str(&keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join("\t"));
            out.push('\n');
            for row in rows {
                let cells: Vec<String> = keys.iter().map(|k| cell(row.get(k.as_str()).unwrap_or(&Value::Null))).collect();
                out.push_str(&cells.join("\t"));
                out.push('\n');
            }
        }
        _ => {
            if let Value::Object(m) = report {
                for (k, v) in m {
                    if k != "config" {
                        out.push_str(&format!("{k}\t{}\n", cell(v)));
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn groups_render() {
        assert_eq!(group_text(&json!({"free_rank": 0, "invariant_factors": []})).unwrap(), "0");
        assert_eq!(group_text(&json!({"free_rank": 1, "invariant_factors": [2]})).unwrap(), "Z + Z/2");
        assert!(group_text(&json!({"x": 1})).is_none());
    }

    #[test]
    fn table_from_rows() {
        let r = json!({"theory": "sets", "stages": [{"rank": 0, "h1": {"free_rank": 0, "invariant_factors": []}}]});
        assert_eq!(tsv(&r), "h1\trank\n0\t0\n");
        let k = json!({"theory": "sets", "config": {}, "value": 3});
        assert_eq!(tsv(&k), "theory\tsets\nvalue\t3\n");
    }
}
