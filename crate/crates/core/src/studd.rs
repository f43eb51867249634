//! Student-teacher drift detection.
//!
//! A teacher forest is deployed on the stream. A student forest is fit on
//! the same training batch, but with every target replaced by the teacher's
//! own prediction, so the student learns the teacher's decision surface
//! rather than the ground truth. At prediction time both models score each
//! instance and their 0/1 disagreement (the mimicking loss) feeds a
//! Page-Hinkley detector. When the input distribution moves into regions
//! where the two models no longer agree, the loss rises and the detector
//! fires, all without a single true label. On alarm, both models are refit
//! on the most recent labeled window.

use log::warn;

use crate::drift::{ph_reset, ph_update, Detection, PageHinkleyState};
use crate::error::Result;
use crate::learners::{fit_forest, RandomForest, TreeConfig};
use crate::rng::mix_str;
use crate::stream::{Instance, StreamSchema};

/// Deployed teacher, mimicking student, and the loss detector between them.
#[derive(Debug, Clone, PartialEq)]
pub struct StuddModel {
    teacher: RandomForest,
    student: RandomForest,
    detector: PageHinkleyState,
    n_trees: usize,
    config: TreeConfig,
}

impl StuddModel {
    pub fn teacher(&self) -> &RandomForest {
        &self.teacher
    }

    pub fn student(&self) -> &RandomForest {
        &self.student
    }

    pub fn detector(&self) -> &PageHinkleyState {
        &self.detector
    }

    pub fn schema(&self) -> &StreamSchema {
        self.teacher.schema()
    }
}

/// 0/1 loss between the teacher's and the student's predictions.
pub fn mimicking_error(y_teacher: usize, y_student: usize) -> f64 {
    if y_teacher == y_student {
        0.0
    } else {
        1.0
    }
}

/// Fits the teacher on `batch`, relabels the batch with the teacher's
/// predictions, and fits the student on that relabeled copy.
///
/// Training both models on the same instances is deliberate; the student's
/// job is to reproduce the teacher, not to generalize independently. The
/// student differs only in its RNG stream, derived from the role-tagged
/// sub-seed `mix_str(seed, "student")`. The detector is reset and adopted
/// with its parameters intact.
///
/// A teacher that predicts a single class over the whole batch leaves the
/// student with a one-class problem and a constant prediction; that is
/// accepted with a warning because real streams have long single-class runs.
pub fn fit_student_teacher(
    batch: &[Instance],
    schema: &StreamSchema,
    n_trees: usize,
    config: &TreeConfig,
    mut detector: PageHinkleyState,
    seed: u64,
) -> Result<StuddModel> {
    let teacher = fit_forest(batch, schema, n_trees, config, seed)?;

    let mut relabeled = Vec::with_capacity(batch.len());
    let mut seen = vec![false; schema.n_classes()];
    for inst in batch {
        let predicted = teacher.predict(&inst.features)?;
        seen[predicted] = true;
        relabeled.push(Instance::labeled(inst.features.clone(), predicted));
    }
    if seen.iter().filter(|&&s| s).count() == 1 {
        warn!("teacher predicts a single class over its training batch; student will be a constant predictor");
    }

    let student = fit_forest(
        &relabeled,
        schema,
        n_trees,
        config,
        mix_str(seed, "student"),
    )?;
    ph_reset(&mut detector);
    Ok(StuddModel {
        teacher,
        student,
        detector,
        n_trees,
        config: *config,
    })
}

/// Scores one instance: returns the teacher's prediction (the deployed
/// output, untouched by detection) and the detector's verdict on the
/// mimicking loss at this step.
pub fn studd_step(model: &mut StuddModel, x: &[f64]) -> Result<(usize, Detection)> {
    let y_teacher = model.teacher.predict(x)?;
    let y_student = model.student.predict(x)?;
    let e = mimicking_error(y_teacher, y_student);
    let status = ph_update(&mut model.detector, e)?;
    Ok((y_teacher, status))
}

/// Refits teacher and student on the latest labeled window, with a fresh
/// detector carrying the same parameters.
pub fn studd_adapt(model: &StuddModel, recent: &[Instance], seed: u64) -> Result<StuddModel> {
    let mut detector = model.detector.clone();
    ph_reset(&mut detector);
    fit_student_teacher(
        recent,
        model.teacher.schema(),
        model.n_trees,
        &model.config,
        detector,
        seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{rng_from, standard_normal};
    use crate::stream::{generate_synthetic, SyntheticDriftSpec};

    fn schema2(n_features: usize) -> StreamSchema {
        StreamSchema::new(n_features, vec!["0".into(), "1".into()]).unwrap()
    }

    fn separable_batch(n: usize, seed: u64) -> Vec<Instance> {
        let mut rng = rng_from(seed);
        (0..n)
            .map(|i| {
                let c = i % 2;
                let center = 6.0 * c as f64;
                Instance::labeled(
                    vec![
                        center + standard_normal(&mut rng),
                        center + standard_normal(&mut rng),
                    ],
                    c,
                )
            })
            .collect()
    }

    fn fit(batch: &[Instance], schema: &StreamSchema, seed: u64) -> StuddModel {
        fit_student_teacher(
            batch,
            schema,
            100,
            &TreeConfig::default(),
            PageHinkleyState::default(),
            seed,
        )
        .unwrap()
    }

    #[test]
    fn mimicking_error_is_01_loss() {
        assert_eq!(mimicking_error(0, 0), 0.0);
        assert_eq!(mimicking_error(0, 1), 1.0);
        assert_eq!(mimicking_error(2, 2), 0.0);
    }

    #[test]
    fn error_free_teacher_makes_relabeling_identity() {
        // The teacher memorizes this separable batch, so the student sees
        // the original labels and equals a forest fit with the student
        // sub-seed directly.
        let batch = separable_batch(200, 3);
        let s = schema2(2);
        let model = fit(&batch, &s, 17);
        let direct = fit_forest(
            &batch,
            &s,
            100,
            &TreeConfig::default(),
            mix_str(17, "student"),
        )
        .unwrap();
        assert_eq!(model.student(), &direct);
    }

    #[test]
    fn student_mimics_teacher_on_training_batch() {
        let batch = separable_batch(1000, 5);
        let s = schema2(2);
        let mut model = fit(&batch, &s, 9);
        let disagreements: f64 = batch
            .iter()
            .map(|inst| {
                let (y_t, _) = studd_step(&mut model, &inst.features).unwrap();
                let y_s = model.student().predict(&inst.features).unwrap();
                mimicking_error(y_t, y_s)
            })
            .sum();
        let rate = disagreements / batch.len() as f64;
        assert!(rate <= 0.02, "training-batch mimicking error {rate}");
    }

    #[test]
    fn refit_is_deterministic() {
        let batch = separable_batch(150, 1);
        let s = schema2(2);
        assert_eq!(fit(&batch, &s, 4), fit(&batch, &s, 4));
    }

    #[test]
    fn constant_teacher_is_accepted_and_silent() {
        // One observed class: teacher and student both collapse to constant
        // predictors, agree everywhere, and the detector never charges.
        let mut rng = rng_from(2);
        let batch: Vec<Instance> = (0..100)
            .map(|_| Instance::labeled(vec![standard_normal(&mut rng)], 0))
            .collect();
        let s = schema2(1);
        let mut model = fit(&batch, &s, 6);
        for _ in 0..500 {
            let (pred, status) = studd_step(&mut model, &[standard_normal(&mut rng)]).unwrap();
            assert_eq!(pred, 0);
            assert_ne!(status, Detection::Change);
        }
        assert_eq!(model.detector().cum_sum(), 0.0);
    }

    #[test]
    fn step_prediction_is_the_teachers() {
        let batch = separable_batch(150, 8);
        let s = schema2(2);
        let mut model = fit(&batch, &s, 10);
        let mut rng = rng_from(40);
        for _ in 0..200 {
            let x = vec![
                3.0 * standard_normal(&mut rng),
                3.0 * standard_normal(&mut rng),
            ];
            let expected = model.teacher().predict(&x).unwrap();
            let (pred, _) = studd_step(&mut model, &x).unwrap();
            assert_eq!(pred, expected);
        }
    }

    #[test]
    fn adapt_resets_detector_and_matches_fresh_fit() {
        let batch = separable_batch(150, 12);
        let s = schema2(2);
        let mut model = fit(&batch, &s, 21);
        for inst in separable_batch(300, 13) {
            studd_step(&mut model, &inst.features).unwrap();
        }
        assert!(model.detector().count() > 0);

        let adapted = studd_adapt(&model, &batch, 21).unwrap();
        assert_eq!(adapted.detector().count(), 0);
        assert_eq!(adapted, fit(&batch, &s, 21));
    }

    #[test]
    fn boundary_drift_raises_mimicking_loss_and_fires() {
        // Train on the first 1000 instances, stream the rest. The drift at
        // absolute position 3000 is online position 2000. The loss mean
        // over the 500 instances after the drift must clear the pre-drift
        // mean by 0.10, and the detector must fire only after the drift.
        let stream = generate_synthetic(&SyntheticDriftSpec::boundary_concentration(10)).unwrap();
        let (train, online) = stream.instances().split_at(1000);
        let mut model = fit(train, stream.schema(), 10);

        // No adaptation: let the loss stream and the detector run free to
        // observe where the first alarm would land.
        let mut losses = Vec::with_capacity(online.len());
        let mut first_change = None;
        for (i, inst) in online.iter().enumerate() {
            let y_t = model.teacher().predict(&inst.features).unwrap();
            let y_s = model.student().predict(&inst.features).unwrap();
            losses.push(mimicking_error(y_t, y_s));
            let (_, status) = studd_step(&mut model, &inst.features).unwrap();
            if status == Detection::Change && first_change.is_none() {
                first_change = Some(i + 1); // 1-based online position
            }
        }

        let drift_at = 2000usize;
        assert!(
            first_change.is_some_and(|t| t > drift_at),
            "first change {first_change:?} should come after online position {drift_at}"
        );

        let pre_mean: f64 = losses[..drift_at].iter().sum::<f64>() / drift_at as f64;
        let post_mean: f64 = losses[drift_at..drift_at + 500].iter().sum::<f64>() / 500.0;
        assert!(
            post_mean - pre_mean >= 0.10,
            "pre {pre_mean:.4}, post {post_mean:.4}"
        );
    }
}
