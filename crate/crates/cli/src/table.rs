//! Column-oriented result tables with deterministic CSV and JSON rendering.

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "values", rename_all = "snake_case")]
pub enum Values {
    Int(Vec<i64>),
    /// `None` renders as an empty CSV cell and JSON `null`.
    Float(Vec<Option<f64>>),
    Text(Vec<String>),
    Bool(Vec<bool>),
}

impl Values {
    pub fn len(&self) -> usize {
        match self {
            Values::Int(v) => v.len(),
            Values::Float(v) => v.len(),
            Values::Text(v) => v.len(),
            Values::Bool(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn cell(&self, row: usize) -> String {
        match self {
            Values::Int(v) => v[row].to_string(),
            Values::Float(v) => v[row].map(format_float).unwrap_or_default(),
            Values::Text(v) => v[row].clone(),
            Values::Bool(v) => v[row].to_string(),
        }
    }
}

/// 17 significant digits, `.` decimal separator.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    #[serde(flatten)]
    pub values: Values,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub artifact: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config: ExperimentConfig,
}

impl Metadata {
    pub fn new(command: &str, config: &ExperimentConfig) -> Self {
        Self {
            artifact: "lrqc".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed: config.run.seed,
            config: config.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub metadata: Metadata,
    pub columns: Vec<Column>,
}

impl ResultTable {
    pub fn new(metadata: Metadata) -> Self {
        Self { metadata, columns: Vec::new() }
    }

    /// Appends a column; every column must have the same length.
    pub fn push(&mut self, name: &str, values: Values) -> &mut Self {
        if let Some(first) = self.columns.first() {
            assert_eq!(first.values.len(), values.len(), "column {name} has a different length");
        }
        self.columns.push(Column { name: name.into(), values });
        self
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.values.len())
    }

    pub fn column(&self, name: &str) -> Option<&Values> {
        self.columns.iter().find(|c| c.name == name).map(|c| &c.values)
    }

    pub fn floats(&self, name: &str) -> Option<Vec<Option<f64>>> {
        match self.column(name)? {
            Values::Float(v) => Some(v.clone()),
            _ => None,
        }
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(self.columns.iter().map(|c| c.name.as_str())).expect("in-memory write");
        for row in 0..self.rows() {
            w.write_record(self.columns.iter().map(|c| c.values.cell(row))).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("table serializes");
        out.push(b'\n');
        out
    }

    pub fn metadata_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(&self.metadata).expect("metadata serializes");
        out.push(b'\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> ResultTable {
        let config = ExperimentConfig::from_json(r#"{"model": {"n": 3, "d": 2, "structure": "path"}, "run": {"initial_region": [0]}}"#)
            .unwrap();
        let mut t = ResultTable::new(Metadata::new("evolve", &config));
        t.push("k", Values::Int(vec![0, 1]))
            .push("P_k", Values::Float(vec![Some(1.0), Some(0.95)]))
            .push("note", Values::Text(vec!["a,b".into(), "c".into()]))
            .push("bound", Values::Float(vec![None, Some(1.0 / 3.0)]));
        t
    }

    #[test]
    fn csv_layout() {
        let text = String::from_utf8(table().to_csv()).unwrap();
        assert_eq!(
            text,
            "k,P_k,note,bound\n0,1.0000000000000000e0,\"a,b\",\n1,9.4999999999999996e-1,c,3.3333333333333331e-1\n"
        );
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2f64.sqrt(), 1e-300, -123456.789] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_round_trip() {
        let t = table();
        let back: ResultTable = serde_json::from_slice(&t.to_json()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    #[should_panic(expected = "different length")]
    fn ragged_columns_rejected() {
        let mut t = table();
        t.push("x", Values::Int(vec![1]));
    }
}
