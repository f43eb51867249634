//! Rank aggregation across datasets.
//!
//! Methods are compared by their average rank over a set of problems: each
//! dataset row ranks every method (1 = best), ties share the mean of the
//! positions they straddle, and a method's final score is its column mean.
//! Averaged ties keep each row's rank sum at n(n+1)/2, which the tests and
//! consumers rely on as a completeness check.

use crate::error::{Error, Result};

/// A dataset-by-method score grid, filled cell by cell.
///
/// Construction is incremental because scores arrive one finished run at a
/// time; [`average_ranks`] refuses grids with holes.
#[derive(Debug, Clone)]
pub struct ScoreMatrix {
    methods: Vec<String>,
    rows: Vec<(String, Vec<Option<f64>>)>,
}

impl ScoreMatrix {
    pub fn new(methods: Vec<String>) -> Result<Self> {
        if methods.is_empty() {
            return Err(Error::invalid("a score matrix needs at least one method"));
        }
        for (i, m) in methods.iter().enumerate() {
            if methods[..i].contains(m) {
                return Err(Error::invalid(format!("duplicate method name '{m}'")));
            }
        }
        Ok(ScoreMatrix {
            methods,
            rows: Vec::new(),
        })
    }

    pub fn methods(&self) -> &[String] {
        &self.methods
    }

    pub fn n_datasets(&self) -> usize {
        self.rows.len()
    }

    /// Sets one cell. The dataset row is created on first contact; writing
    /// the same cell twice or naming an unknown method is an error, and so
    /// is a non-finite score (ranking cannot order NaN).
    pub fn insert(&mut self, dataset: &str, method: &str, score: f64) -> Result<()> {
        if !score.is_finite() {
            return Err(Error::invalid(format!(
                "score for ({dataset}, {method}) must be finite, got {score}"
            )));
        }
        let m = self
            .methods
            .iter()
            .position(|name| name == method)
            .ok_or_else(|| Error::invalid(format!("unknown method '{method}'")))?;
        let row = match self.rows.iter_mut().find(|(name, _)| name == dataset) {
            Some((_, scores)) => scores,
            None => {
                self.rows
                    .push((dataset.to_string(), vec![None; self.methods.len()]));
                &mut self.rows.last_mut().unwrap().1
            }
        };
        if row[m].is_some() {
            return Err(Error::invalid(format!(
                "duplicate score for ({dataset}, {method})"
            )));
        }
        row[m] = Some(score);
        Ok(())
    }
}

/// Per-dataset ranks and their column means.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub methods: Vec<String>,
    /// One row per dataset, ranks aligned with `methods`.
    pub per_dataset: Vec<(String, Vec<f64>)>,
    /// Column means over all datasets, aligned with `methods`.
    pub average_rank: Vec<f64>,
}

/// Ranks every row of a complete score matrix and averages the columns.
///
/// `higher_is_better` picks the sort direction: kappa-style scores rank
/// descending, cost-style ascending.
pub fn average_ranks(scores: &ScoreMatrix, higher_is_better: bool) -> Result<RankTable> {
    if scores.rows.is_empty() {
        return Err(Error::invalid("cannot rank an empty score matrix"));
    }
    let m = scores.methods.len();

    let mut per_dataset = Vec::with_capacity(scores.rows.len());
    let mut sums = vec![0.0f64; m];
    for (dataset, cells) in &scores.rows {
        let mut values = Vec::with_capacity(m);
        for (j, cell) in cells.iter().enumerate() {
            match cell {
                Some(v) => values.push(*v),
                None => {
                    return Err(Error::invalid(format!(
                        "missing score for ({dataset}, {})",
                        scores.methods[j]
                    )))
                }
            }
        }

        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| {
            let cmp = values[a].total_cmp(&values[b]);
            if higher_is_better {
                cmp.reverse()
            } else {
                cmp
            }
        });

        let mut ranks = vec![0.0f64; m];
        let mut i = 0;
        while i < m {
            let mut j = i;
            while j < m && values[order[j]] == values[order[i]] {
                j += 1;
            }
            // Positions i+1 ..= j share the tie; their mean is the rank.
            let rank = (i + j + 1) as f64 / 2.0;
            for &method in &order[i..j] {
                ranks[method] = rank;
            }
            i = j;
        }

        for (sum, &rank) in sums.iter_mut().zip(&ranks) {
            *sum += rank;
        }
        per_dataset.push((dataset.clone(), ranks));
    }

    let n = per_dataset.len() as f64;
    let average_rank = sums.into_iter().map(|s| s / n).collect();
    Ok(RankTable {
        methods: scores.methods.clone(),
        per_dataset,
        average_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn matrix(methods: &[&str]) -> ScoreMatrix {
        ScoreMatrix::new(methods.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    #[test]
    fn single_dataset_orders_plainly() {
        let mut scores = matrix(&["a", "b", "c"]);
        scores.insert("d1", "a", 0.9).unwrap();
        scores.insert("d1", "b", 0.5).unwrap();
        scores.insert("d1", "c", 0.1).unwrap();
        let table = average_ranks(&scores, true).unwrap();
        assert_eq!(table.per_dataset[0].1, vec![1.0, 2.0, 3.0]);
        assert_eq!(table.average_rank, vec![1.0, 2.0, 3.0]);

        let ascending = average_ranks(&scores, false).unwrap();
        assert_eq!(ascending.average_rank, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn ties_share_the_average_position() {
        let mut scores = matrix(&["a", "b", "c"]);
        scores.insert("d1", "a", 0.7).unwrap();
        scores.insert("d1", "b", 0.7).unwrap();
        scores.insert("d1", "c", 0.1).unwrap();
        let table = average_ranks(&scores, true).unwrap();
        assert_eq!(table.per_dataset[0].1, vec![1.5, 1.5, 3.0]);
    }

    #[test]
    fn averages_accumulate_across_datasets() {
        let mut scores = matrix(&["a", "b"]);
        scores.insert("d1", "a", 0.9).unwrap();
        scores.insert("d1", "b", 0.1).unwrap();
        scores.insert("d2", "a", 0.2).unwrap();
        scores.insert("d2", "b", 0.8).unwrap();
        let table = average_ranks(&scores, true).unwrap();
        assert_eq!(table.average_rank, vec![1.5, 1.5]);
    }

    #[test]
    fn holes_and_misuse_are_rejected() {
        let mut scores = matrix(&["a", "b"]);
        scores.insert("d1", "a", 0.9).unwrap();
        assert!(average_ranks(&scores, true).is_err());

        assert!(scores.insert("d1", "a", 0.5).is_err());
        assert!(scores.insert("d1", "zzz", 0.5).is_err());
        assert!(scores.insert("d1", "b", f64::NAN).is_err());
        assert!(ScoreMatrix::new(vec![]).is_err());
        assert!(ScoreMatrix::new(vec!["a".into(), "a".into()]).is_err());
    }

    proptest! {
        #[test]
        fn rank_row_sums_are_conserved(
            rows in proptest::collection::vec(
                proptest::collection::vec(-1.0f64..1.0, 10),
                1..20,
            ),
            higher in proptest::bool::ANY,
        ) {
            let methods: Vec<String> = (0..10).map(|i| format!("m{i}")).collect();
            let mut scores = ScoreMatrix::new(methods.clone()).unwrap();
            for (d, row) in rows.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    scores.insert(&format!("d{d}"), &methods[j], v).unwrap();
                }
            }
            let table = average_ranks(&scores, higher).unwrap();
            for (_, ranks) in &table.per_dataset {
                let sum: f64 = ranks.iter().sum();
                prop_assert!((sum - 55.0).abs() < 1e-9, "row sum {sum}");
            }
            let avg_sum: f64 = table.average_rank.iter().sum();
            prop_assert!((avg_sum - 55.0).abs() < 1e-9);
        }
    }
}
