//! Transitions CSV: one column per variable, feature columns first, then
//! target columns, with a header row of variable names.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use thiserror::Error;

use crate::mvl::{Role, Schema, State, Transition, Variable};

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("transitions CSV: {0}")]
    Format(String),
    #[error("transitions CSV row {row}: {msg}")]
    Row { row: usize, msg: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn write_transitions_csv<W: Write>(schema: &Schema, ts: &[Transition], out: W) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(schema.features().iter().chain(schema.targets()).map(|v| v.name.as_str()))?;
    for t in ts {
        w.write_record(t.features.values().iter().chain(t.targets.values()).map(u32::to_string))?;
    }
    w.flush()?;
    Ok(())
}

/// How to obtain the schema for a transitions file.
#[derive(Debug, Clone)]
pub enum SchemaSource<'a> {
    /// Columns must equal the schema's features followed by its targets.
    Given(&'a Schema),
    /// The last `n` columns are targets; domains are the observed values.
    Infer { targets: usize },
}

pub fn read_transitions_csv<R: Read>(input: R, source: SchemaSource<'_>) -> Result<(Schema, Vec<Transition>), CsvError> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let n_features = match &source {
        SchemaSource::Given(s) => {
            let expected: Vec<&str> = s.features().iter().chain(s.targets()).map(|v| v.name.as_str()).collect();
            if header != expected {
                return Err(CsvError::Format(format!("header {header:?} does not match schema columns {expected:?}")));
            }
            s.features().len()
        }
        SchemaSource::Infer { targets } => {
            if *targets == 0 || *targets > header.len() {
                return Err(CsvError::Format(format!("cannot take {targets} target columns from {}", header.len())));
            }
            header.len() - targets
        }
    };
    let mut ts = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let values: Vec<u32> = row
            .iter()
            .map(|s| s.trim().parse::<u32>())
            .collect::<Result<_, _>>()
            .map_err(|e| CsvError::Row { row: i + 2, msg: e.to_string() })?;
        if values.len() != header.len() {
            return Err(CsvError::Row { row: i + 2, msg: format!("{} fields, expected {}", values.len(), header.len()) });
        }
        let (f, t) = values.split_at(n_features);
        ts.push(Transition::new(f.to_vec(), t.to_vec()));
    }
    let schema = match source {
        SchemaSource::Given(s) => {
            for (i, t) in ts.iter().enumerate() {
                s.check_transition(t).map_err(|e| CsvError::Row { row: i + 2, msg: e.to_string() })?;
            }
            s.clone()
        }
        SchemaSource::Infer { .. } => {
            let domain = |col: usize| -> BTreeSet<u32> {
                ts.iter()
                    .map(|t| if col < n_features { t.features.values()[col] } else { t.targets.values()[col - n_features] })
                    .collect()
            };
            let vars: Vec<(Variable, Role)> = header
                .iter()
                .enumerate()
                .map(|(c, name)| {
                    let role = if c < n_features { Role::Feature } else { Role::Target };
                    (Variable::new(name.clone(), domain(c)), role)
                })
                .collect();
            Schema::from_roles(vars).map_err(|e| CsvError::Format(e.to_string()))?
        }
    };
    Ok((schema, ts))
}

/// Feature states of `ts`, in order.
pub fn feature_states(ts: &[Transition]) -> Vec<State> {
    ts.iter().map(|t| t.features.clone()).collect()
}
