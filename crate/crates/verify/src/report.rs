use serde::Serialize;
use serde_json::{Map, Value};

/// One object-level assertion with the quantities it compared.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Row {
    pub object: String,
    #[serde(flatten)]
    pub quantities: Map<String, Value>,
    pub ok: bool,
}

impl Row {
    pub fn new(object: impl Into<String>) -> Self {
        Self {
            object: object.into(),
            quantities: Map::new(),
            ok: true,
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.quantities.insert(key.to_string(), value.into());
        self
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.quantities.insert(key.to_string(), value.into());
    }

    /// Records a named assertion and folds it into `ok`.
    pub fn require(&mut self, key: &str, holds: bool) {
        self.quantities.insert(key.to_string(), Value::Bool(holds));
        self.ok &= holds;
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.quantities.get(key)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub roster: Vec<String>,
    pub rows: Vec<Row>,
    pub passed: bool,
    pub seed: u64,
    /// Qualifies what a pass means, e.g. evidence at a morphism budget.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Every seeded sample the check drew, so a run can be audited.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<Value>,
    pub runtime_ms: u64,
}

impl CheckReport {
    /// Pretty JSON; `runtime_ms` is the only field that varies between runs.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// The JSON value with `runtime_ms` removed.
    pub fn deterministic_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        if let Value::Object(m) = &mut v {
            m.remove("runtime_ms");
        }
        v
    }

    pub fn row_columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = Vec::new();
        for r in &self.rows {
            for k in r.quantities.keys() {
                if !cols.contains(k) {
                    cols.push(k.clone());
                }
            }
        }
        cols
    }

    /// One CSV record per row: `check, object, <quantities…>, ok`.
    pub fn to_csv(&self) -> String {
        let cols = self.row_columns();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["check".to_string(), "object".to_string()];
        header.extend(cols.iter().cloned());
        header.push("ok".into());
        w.write_record(&header).expect("in-memory csv");
        for r in &self.rows {
            let mut rec = vec![self.check.clone(), r.object.clone()];
            for c in &cols {
                rec.push(match r.quantities.get(c) {
                    None | Some(Value::Null) => String::new(),
                    Some(Value::String(s)) => s.clone(),
                    Some(v) => v.to_string(),
                });
            }
            rec.push(r.ok.to_string());
            w.write_record(&rec).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8 csv")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} {}{}\n",
            self.check,
            if self.passed { "PASS" } else { "FAIL" },
            self.status.as_ref().map(|s| format!(" ({s})")).unwrap_or_default()
        );
        if let Some(e) = &self.error {
            out.push_str(&format!("  error: {e}\n"));
        }
        for r in &self.rows {
            let parts: Vec<String> = r
                .quantities
                .iter()
                .map(|(k, v)| match v {
                    Value::String(s) => format!("{k}={s}"),
                    v => format!("{k}={v}"),
                })
                .collect();
            out.push_str(&format!(
                "  [{}] {}: {}\n",
                if r.ok { "ok" } else { "FAIL" },
                r.object,
                parts.join(" ")
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_flattens_rows() {
        let mut r = Row::new("H0").with("n", 1);
        r.require("equal", true);
        let rep = CheckReport {
            check: "demo".into(),
            roster: vec!["H0".into()],
            rows: vec![r, Row::new("H1").with("extra", "x")],
            passed: true,
            seed: 1,
            status: None,
            error: None,
            samples: None,
            runtime_ms: 3,
        };
        let csv = rep.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("check,object,n,equal,extra,ok"));
        assert_eq!(lines.next(), Some("demo,H0,1,true,,true"));
        assert_eq!(lines.next(), Some("demo,H1,,,x,true"));
        assert!(rep.deterministic_json().get("runtime_ms").is_none());
        assert!(rep.to_json().contains("\"runtime_ms\": 3"));
    }
}
