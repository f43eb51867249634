//! Seeded synthetic streams with known drift points.
//!
//! Concepts are Gaussian class-conditional mixtures with diagonal
//! covariance: the simplest family that can move p(X), p(X|y), or the
//! class priors while keeping every moment analytically known, which is
//! what the test oracles need. Instance `t` (1-based) is drawn from the
//! concept active at `t`; concept `k` governs positions in
//! `(drift_points[k-1], drift_points[k]]`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{rng_from, standard_normal};
use crate::stream::{DataStream, Instance, StreamSchema};

/// One class of one concept: a diagonal Gaussian plus its prior.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ClassSpec {
    pub mean: Vec<f64>,
    pub cov_diag: Vec<f64>,
    pub prior: f64,
}

/// The full generative state between two drift points.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConceptSpec {
    pub classes: Vec<ClassSpec>,
}

/// A complete recipe for a finite drifting stream.
///
/// Serializes to/from JSON with these exact field names, which is also the
/// format the CLI accepts for synthetic inputs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SyntheticDriftSpec {
    pub seed: u64,
    pub n_instances: usize,
    /// Strictly increasing positions in `[1, n_instances]`; the concept
    /// switches immediately after each one.
    pub drift_points: Vec<usize>,
    /// One more concept than drift points.
    pub concepts: Vec<ConceptSpec>,
}

impl SyntheticDriftSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_instances == 0 {
            return Err(Error::invalid("n_instances must be positive"));
        }
        if self.concepts.len() != self.drift_points.len() + 1 {
            return Err(Error::invalid(format!(
                "{} drift points need {} concepts, got {}",
                self.drift_points.len(),
                self.drift_points.len() + 1,
                self.concepts.len()
            )));
        }
        for (i, w) in self.drift_points.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::invalid(format!(
                    "drift points must be strictly increasing, got {} then {} at index {}",
                    w[0],
                    w[1],
                    i + 1
                )));
            }
        }
        if let (Some(&first), Some(&last)) = (self.drift_points.first(), self.drift_points.last()) {
            if first < 1 || last > self.n_instances {
                return Err(Error::invalid(format!(
                    "drift points must lie in [1, {}]",
                    self.n_instances
                )));
            }
        }

        let n_features = self.n_features();
        let n_classes = self.concepts[0].classes.len();
        if n_classes < 2 {
            return Err(Error::invalid("concepts need at least two classes"));
        }
        for (k, concept) in self.concepts.iter().enumerate() {
            if concept.classes.len() != n_classes {
                return Err(Error::invalid(format!(
                    "concept {k} has {} classes, expected {n_classes}",
                    concept.classes.len()
                )));
            }
            let mut prior_sum = 0.0;
            for (c, class) in concept.classes.iter().enumerate() {
                if class.mean.len() != n_features || class.cov_diag.len() != n_features {
                    return Err(Error::invalid(format!(
                        "concept {k} class {c}: mean/cov_diag must have length {n_features}"
                    )));
                }
                if class.cov_diag.iter().any(|&v| !(v > 0.0)) {
                    return Err(Error::invalid(format!(
                        "concept {k} class {c}: covariance entries must be positive"
                    )));
                }
                if !(0.0..=1.0).contains(&class.prior) {
                    return Err(Error::invalid(format!(
                        "concept {k} class {c}: prior must be in [0, 1]"
                    )));
                }
                prior_sum += class.prior;
            }
            if (prior_sum - 1.0).abs() > 1e-9 {
                return Err(Error::invalid(format!(
                    "concept {k}: priors sum to {prior_sum}, expected 1"
                )));
            }
        }
        Ok(())
    }

    pub fn n_features(&self) -> usize {
        self.concepts
            .first()
            .and_then(|c| c.classes.first())
            .map_or(0, |c| c.mean.len())
    }

    /// The drift pattern used by the end-to-end detection tests: after the
    /// drift point both classes concentrate in the region between the old
    /// class centers, so p(X) shifts sharply near the learned decision
    /// boundary while the class priors stay untouched. Pure label swaps
    /// would leave p(X) unchanged and be invisible without labels; this
    /// pattern is detectable in principle by any input-space monitor.
    ///
    /// Two signal dimensions carry the structure; 38 standard-normal noise
    /// dimensions force feature-subsampled trees to split on uninformative
    /// coordinates, which keeps teacher/student disagreement alive.
    pub fn boundary_concentration(seed: u64) -> Self {
        const NOISE_DIMS: usize = 38;

        fn class(x: f64, y: f64, signal_var: f64, prior: f64) -> ClassSpec {
            let mut mean = vec![x, y];
            mean.extend(std::iter::repeat(0.0).take(NOISE_DIMS));
            let mut cov_diag = vec![signal_var, signal_var];
            cov_diag.extend(std::iter::repeat(1.0).take(NOISE_DIMS));
            ClassSpec {
                mean,
                cov_diag,
                prior,
            }
        }

        SyntheticDriftSpec {
            seed,
            n_instances: 8000,
            drift_points: vec![3000],
            concepts: vec![
                ConceptSpec {
                    classes: vec![
                        class(0.0, 0.0, 0.36, 0.5),
                        class(2.0, 2.0, 0.36, 0.5),
                    ],
                },
                ConceptSpec {
                    classes: vec![
                        class(1.5, 0.5, 0.0484, 0.5),
                        class(0.5, 1.5, 0.0484, 0.5),
                    ],
                },
            ],
        }
    }
}

/// Materializes the stream described by `spec`.
///
/// All randomness flows from `spec.seed` through one generator in a fixed
/// draw order (one uniform for the class, then two uniforms per feature),
/// so regeneration is bit-identical.
pub fn generate_synthetic(spec: &SyntheticDriftSpec) -> Result<DataStream> {
    spec.validate()?;

    let n_features = spec.n_features();
    let n_classes = spec.concepts[0].classes.len();
    let class_labels = (0..n_classes).map(|c| c.to_string()).collect();
    let schema = StreamSchema::new(n_features, class_labels)?;

    let mut rng = rng_from(spec.seed);
    let mut instances = Vec::with_capacity(spec.n_instances);
    let mut concept_idx = 0usize;

    for t in 1..=spec.n_instances {
        while concept_idx < spec.drift_points.len() && t > spec.drift_points[concept_idx] {
            concept_idx += 1;
        }
        let concept = &spec.concepts[concept_idx];

        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut label = n_classes - 1;
        for (c, class) in concept.classes.iter().enumerate() {
            acc += class.prior;
            if u < acc {
                label = c;
                break;
            }
        }

        let class = &concept.classes[label];
        let mut features = Vec::with_capacity(n_features);
        for d in 0..n_features {
            let z = standard_normal(&mut rng);
            features.push(class.mean[d] + class.cov_diag[d].sqrt() * z);
        }
        instances.push(Instance::labeled(features, label));
    }

    DataStream::new(schema, instances)
}
