//! Labeled instance streams: CSV ingestion and seeded synthetic generators.
//!
//! A [`DataStream`] is a finite, ordered, fully materialized sequence of
//! instances plus the schema they conform to. Labels are stored as indices
//! into the schema's class list; the string form only matters at the I/O
//! boundary. Synthetic streams with known drift points live in
//! [`synthetic`], file ingestion in [`csv`].

mod csv;
mod synthetic;

pub use csv::{load_csv, LabelColumn};
pub use synthetic::{generate_synthetic, ClassSpec, ConceptSpec, SyntheticDriftSpec};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of a stream: dimensionality and the label domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamSchema {
    /// Number of numeric input features per instance.
    pub n_features: usize,
    /// Distinct class labels, in a fixed order. Instance labels index into
    /// this list.
    pub class_labels: Vec<String>,
    /// Optional feature names (from a CSV header, for example).
    pub feature_names: Option<Vec<String>>,
}

impl StreamSchema {
    pub fn new(n_features: usize, class_labels: Vec<String>) -> Result<Self> {
        let schema = StreamSchema {
            n_features,
            class_labels,
            feature_names: None,
        };
        schema.validate()?;
        Ok(schema)
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Result<Self> {
        self.feature_names = Some(names);
        self.validate()?;
        Ok(self)
    }

    pub fn n_classes(&self) -> usize {
        self.class_labels.len()
    }

    fn validate(&self) -> Result<()> {
        if self.n_features == 0 {
            return Err(Error::schema("schema needs at least one feature"));
        }
        if self.class_labels.len() < 2 {
            return Err(Error::schema("schema needs at least two class labels"));
        }
        for (i, a) in self.class_labels.iter().enumerate() {
            if self.class_labels[..i].contains(a) {
                return Err(Error::schema(format!("duplicate class label {a:?}")));
            }
        }
        if let Some(names) = &self.feature_names {
            if names.len() != self.n_features {
                return Err(Error::schema(format!(
                    "{} feature names for {} features",
                    names.len(),
                    self.n_features
                )));
            }
        }
        Ok(())
    }
}

/// One observation: a feature vector and, when known, its class index.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub features: Vec<f64>,
    /// Index into the schema's `class_labels`, or `None` while unlabeled.
    pub label: Option<usize>,
}

impl Instance {
    pub fn labeled(features: Vec<f64>, label: usize) -> Self {
        Instance {
            features,
            label: Some(label),
        }
    }
}

/// A finite stream of instances conforming to one schema.
///
/// Emission order is the construction order and never changes; iterating
/// twice yields identical sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct DataStream {
    schema: StreamSchema,
    instances: Vec<Instance>,
}

impl DataStream {
    /// Builds a stream, checking every instance against the schema.
    pub fn new(schema: StreamSchema, instances: Vec<Instance>) -> Result<Self> {
        schema.validate()?;
        for (i, inst) in instances.iter().enumerate() {
            if inst.features.len() != schema.n_features {
                return Err(Error::DimensionMismatch {
                    expected: schema.n_features,
                    got: inst.features.len(),
                });
            }
            if inst.features.iter().any(|v| !v.is_finite()) {
                return Err(Error::schema(format!(
                    "non-finite feature value in instance {i}"
                )));
            }
            if let Some(label) = inst.label {
                if label >= schema.class_labels.len() {
                    return Err(Error::schema(format!(
                        "label index {label} out of range in instance {i}"
                    )));
                }
            }
        }
        Ok(DataStream { schema, instances })
    }

    pub fn schema(&self) -> &StreamSchema {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// Total instance count. Always known: streams are materialized.
    pub fn length_hint(&self) -> Option<usize> {
        Some(self.instances.len())
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Instance> {
        self.instances.iter()
    }

    /// Keeps only the first `max_n` instances.
    pub fn truncate(mut self, max_n: usize) -> Self {
        self.instances.truncate(max_n);
        self
    }
}

impl<'a> IntoIterator for &'a DataStream {
    type Item = &'a Instance;
    type IntoIter = std::slice::Iter<'a, Instance>;

    fn into_iter(self) -> Self::IntoIter {
        self.instances.iter()
    }
}
