//! CSV ingestion for benchmark streams.
//!
//! One format is supported: UTF-8, comma-delimited, decimal-point reals,
//! optional single header row. Every non-label column must parse as a
//! finite real; the label domain is the distinct labels in order of first
//! appearance. Categorical features must be pre-encoded numerically.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::stream::{DataStream, Instance, StreamSchema};

/// Which column holds the class label.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum LabelColumn {
    /// The last column (the common layout for the benchmark streams).
    #[default]
    Last,
    /// Zero-based column index.
    Index(usize),
    /// Header name; requires `has_header`.
    Name(String),
}

/// Reads a whole CSV file into a [`DataStream`].
///
/// Parse failures name the offending 1-based data row (the header, when
/// present, is not counted). An empty file, or one with only a header,
/// is a schema error.
pub fn load_csv(path: &Path, has_header: bool, label_column: &LabelColumn) -> Result<DataStream> {
    let mut reader = ::csv::ReaderBuilder::new()
        .has_headers(has_header)
        .from_path(path)?;

    let header: Option<Vec<String>> = if has_header {
        Some(reader.headers()?.iter().map(str::to_owned).collect())
    } else {
        None
    };

    let mut label_idx: Option<usize> = match label_column {
        LabelColumn::Last => None, // resolved from the first row's width
        LabelColumn::Index(i) => Some(*i),
        LabelColumn::Name(name) => {
            let header = header.as_ref().ok_or_else(|| {
                Error::invalid("label column by name requires a header row")
            })?;
            let idx = header.iter().position(|h| h == name).ok_or_else(|| {
                Error::schema(format!("label column {name:?} not found in header"))
            })?;
            Some(idx)
        }
    };

    let mut label_ids: HashMap<String, usize> = HashMap::new();
    let mut class_labels: Vec<String> = Vec::new();
    let mut instances: Vec<Instance> = Vec::new();
    let mut n_columns: Option<usize> = None;

    for (row_zero, record) in reader.records().enumerate() {
        let row = row_zero + 1;
        let record = record.map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;

        let width = *n_columns.get_or_insert(record.len());
        if record.len() != width {
            return Err(Error::Parse {
                row,
                message: format!("expected {width} fields, found {}", record.len()),
            });
        }
        let label_idx = *label_idx.get_or_insert(width.saturating_sub(1));
        if label_idx >= width {
            return Err(Error::schema(format!(
                "label column {label_idx} out of range for {width} columns"
            )));
        }

        let mut features = Vec::with_capacity(width - 1);
        for (col, field) in record.iter().enumerate() {
            if col == label_idx {
                continue;
            }
            let value: f64 = field.trim().parse().map_err(|_| Error::Parse {
                row,
                message: format!("column {col}: {field:?} is not a number"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    row,
                    message: format!("column {col}: {field:?} is not finite"),
                });
            }
            features.push(value);
        }

        let raw_label = record.get(label_idx).unwrap_or("").to_owned();
        let next_id = class_labels.len();
        let label = *label_ids.entry(raw_label.clone()).or_insert_with(|| {
            class_labels.push(raw_label);
            next_id
        });
        instances.push(Instance::labeled(features, label));
    }

    let n_columns =
        n_columns.ok_or_else(|| Error::schema(format!("{} has no data rows", path.display())))?;
    let label_idx = label_idx.unwrap_or(n_columns - 1);

    let mut schema = StreamSchema::new(n_columns - 1, class_labels)?;
    if let Some(header) = header {
        let names = header
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != label_idx)
            .map(|(_, h)| h.clone())
            .collect();
        schema = schema.with_feature_names(names)?;
    }
    DataStream::new(schema, instances)
}
