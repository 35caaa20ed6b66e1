use std::io::Read;

use serde::{Deserialize, Serialize};

use super::basic::MISSING_LEVEL;
use crate::{Error, Result};

/// Which columns of a delimited file play which role.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub domain: String,
    pub targets: Vec<String>,
    #[serde(default)]
    pub auxiliaries: Vec<String>,
}

impl Schema {
    pub fn new(domain: &str, targets: &[&str], auxiliaries: &[&str]) -> Self {
        Schema {
            domain: domain.to_string(),
            targets: targets.iter().map(|s| s.to_string()).collect(),
            auxiliaries: auxiliaries.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub domain: String,
    pub targets: Vec<f64>,
    pub auxiliaries: Vec<String>,
}

/// Population micro-data: one [`Record`] per unit, in file order.
#[derive(Debug, Clone)]
pub struct Frame {
    pub records: Vec<Record>,
    pub target_names: Vec<String>,
    pub aux_names: Vec<String>,
    pub domain_name: String,
}

impl Frame {
    /// Build a frame from records already in memory, checking shapes.
    pub fn new(
        domain_name: &str,
        target_names: Vec<String>,
        aux_names: Vec<String>,
        records: Vec<Record>,
    ) -> Result<Self> {
        if target_names.is_empty() {
            return Err(Error::Config("at least one target column is required".into()));
        }
        for (i, r) in records.iter().enumerate() {
            if r.targets.len() != target_names.len() || r.auxiliaries.len() != aux_names.len() {
                return Err(Error::Malformed {
                    row: i + 1,
                    message: "record width does not match the column names".into(),
                });
            }
            if let Some(g) = r.targets.iter().position(|v| !v.is_finite()) {
                return Err(Error::Parse {
                    row: i + 1,
                    column: target_names[g].clone(),
                    value: r.targets[g].to_string(),
                });
            }
        }
        Ok(Frame {
            records,
            target_names,
            aux_names,
            domain_name: domain_name.to_string(),
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn num_targets(&self) -> usize {
        self.target_names.len()
    }
}

/// Read a delimited text stream with a header row.
///
/// Rows in errors are 1-based data rows (the header is not counted). Empty or
/// `NA` auxiliary cells become the [`MISSING_LEVEL`] token so that every record
/// lands in some atomic stratum.
pub fn load_frame<R: Read>(source: R, schema: &Schema, delimiter: u8) -> Result<Frame> {
    if schema.targets.is_empty() {
        return Err(Error::Config("schema names no target columns".into()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let header = reader.headers()?.clone();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn {
                column: name.to_string(),
            })
    };
    let domain_col = find(&schema.domain)?;
    let target_cols = schema.targets.iter().map(|t| find(t)).collect::<Result<Vec<_>>>()?;
    let aux_cols = schema.auxiliaries.iter().map(|a| find(a)).collect::<Result<Vec<_>>>()?;

    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let line = i + 1;
        let cell = |c: usize| row.get(c).unwrap_or("");
        let domain = cell(domain_col).to_string();
        if domain.is_empty() {
            return Err(Error::Malformed {
                row: line,
                message: format!("empty domain cell in `{}`", schema.domain),
            });
        }
        let targets = target_cols
            .iter()
            .zip(&schema.targets)
            .map(|(&c, name)| {
                let raw = cell(c);
                raw.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse {
                        row: line,
                        column: name.clone(),
                        value: raw.to_string(),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        let auxiliaries = aux_cols
            .iter()
            .map(|&c| match cell(c) {
                "" | "NA" => MISSING_LEVEL.to_string(),
                v => v.to_string(),
            })
            .collect();
        records.push(Record {
            domain,
            targets,
            auxiliaries,
        });
    }
    Ok(Frame {
        records,
        target_names: schema.targets.clone(),
        aux_names: schema.auxiliaries.clone(),
        domain_name: schema.domain.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_three_rows() {
        let data = "dom,Y1,X1\nA,1.5,a\nA,2,b\nB,3e1,a\n";
        let frame = load_frame(data.as_bytes(), &Schema::new("dom", &["Y1"], &["X1"]), b',').unwrap();
        assert_eq!(frame.len(), 3);
        assert_eq!(frame.num_targets(), 1);
        assert_eq!(frame.aux_names.len(), 1);
        assert_eq!(frame.records[2].targets, vec![30.0]);
        assert_eq!(frame.records[1].auxiliaries, vec!["b".to_string()]);
    }

    #[test]
    fn non_numeric_target_names_row_and_column() {
        let data = "dom,Y1,X1\nA,1,a\nA,abc,b\n";
        let err = load_frame(data.as_bytes(), &Schema::new("dom", &["Y1"], &["X1"]), b',').unwrap_err();
        match err {
            Error::Parse { row, column, value } => {
                assert_eq!(row, 2);
                assert_eq!(column, "Y1");
                assert_eq!(value, "abc");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_column_is_a_schema_error() {
        let data = "dom,Y1\nA,1\n";
        let err = load_frame(data.as_bytes(), &Schema::new("dom", &["Y2"], &[]), b',').unwrap_err();
        assert!(matches!(err, Error::MissingColumn { ref column } if column == "Y2"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn infinite_target_is_rejected() {
        let data = "dom,Y1\nA,inf\n";
        assert!(matches!(
            load_frame(data.as_bytes(), &Schema::new("dom", &["Y1"], &[]), b','),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn missing_category_becomes_its_own_level() {
        let data = "dom;Y1;X1\nA;1;\nA;2;NA\n";
        let frame = load_frame(data.as_bytes(), &Schema::new("dom", &["Y1"], &["X1"]), b';').unwrap();
        assert!(frame.records.iter().all(|r| r.auxiliaries[0] == MISSING_LEVEL));
    }
}
