//! Agreement and cost metrics.
//!
//! Kappa is computed from integer confusion counts with a single final
//! division per term, so the result is bit-identical to any other
//! implementation that aggregates the same integers. That exactness is load
//! bearing: report bytes must not depend on summation order.

use crate::error::{Error, Result};

/// Cohen's kappa between two aligned label sequences.
///
/// κ = (p_o − p_e) / (1 − p_e), where p_o is the observed agreement rate
/// and p_e the agreement expected from the marginals. Returns 0 by
/// convention when p_e = 1 (both sequences constant), where the statistic
/// is undefined.
pub fn cohen_kappa(y_true: &[usize], y_pred: &[usize]) -> Result<f64> {
    if y_true.len() != y_pred.len() {
        return Err(Error::invalid(format!(
            "kappa needs aligned sequences, got lengths {} and {}",
            y_true.len(),
            y_pred.len()
        )));
    }
    if y_true.is_empty() {
        return Err(Error::invalid("kappa is undefined on empty sequences"));
    }

    let n_classes = y_true.iter().chain(y_pred).max().unwrap() + 1;
    let mut row = vec![0u64; n_classes];
    let mut col = vec![0u64; n_classes];
    let mut agree = 0u64;
    for (&t, &p) in y_true.iter().zip(y_pred) {
        row[t] += 1;
        col[p] += 1;
        if t == p {
            agree += 1;
        }
    }

    let n = y_true.len() as u64;
    let p_o = agree as f64 / n as f64;
    let pe_num: u64 = row.iter().zip(&col).map(|(&r, &c)| r * c).sum();
    let p_e = pe_num as f64 / (n * n) as f64;
    if p_e == 1.0 {
        return Ok(0.0);
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Kappa over every trailing window of `window` aligned pairs.
///
/// Entry `j` covers pairs `[j, j + window)`; the series has
/// `len − window + 1` entries and is empty when the sequences are shorter
/// than one window. Each entry equals `cohen_kappa` of the corresponding
/// slices exactly: the rolling counts are the same integers.
pub fn sliding_kappa(y_true: &[usize], y_pred: &[usize], window: usize) -> Result<Vec<f64>> {
    if window < 2 {
        return Err(Error::invalid("sliding window must be at least 2"));
    }
    if y_true.len() != y_pred.len() {
        return Err(Error::invalid(format!(
            "sliding kappa needs aligned sequences, got lengths {} and {}",
            y_true.len(),
            y_pred.len()
        )));
    }
    let n = y_true.len();
    if n < window {
        return Ok(Vec::new());
    }

    let n_classes = y_true.iter().chain(y_pred).max().unwrap() + 1;
    let mut row = vec![0u64; n_classes];
    let mut col = vec![0u64; n_classes];
    let mut agree = 0u64;

    let add = |row: &mut [u64], col: &mut [u64], agree: &mut u64, i: usize, sign_add: bool| {
        let (t, p) = (y_true[i], y_pred[i]);
        if sign_add {
            row[t] += 1;
            col[p] += 1;
            *agree += u64::from(t == p);
        } else {
            row[t] -= 1;
            col[p] -= 1;
            *agree -= u64::from(t == p);
        }
    };

    for i in 0..window {
        add(&mut row, &mut col, &mut agree, i, true);
    }

    let w = window as u64;
    let kappa_of = |row: &[u64], col: &[u64], agree: u64| -> f64 {
        let p_o = agree as f64 / w as f64;
        let pe_num: u64 = row.iter().zip(col).map(|(&r, &c)| r * c).sum();
        let p_e = pe_num as f64 / (w * w) as f64;
        if p_e == 1.0 {
            0.0
        } else {
            (p_o - p_e) / (1.0 - p_e)
        }
    };

    let mut series = Vec::with_capacity(n - window + 1);
    series.push(kappa_of(&row, &col, agree));
    for end in window..n {
        add(&mut row, &mut col, &mut agree, end, true);
        add(&mut row, &mut col, &mut agree, end - window, false);
        series.push(kappa_of(&row, &col, agree));
    }
    Ok(series)
}

/// Labeled instances consumed over the stream length, as an exact quotient.
pub fn label_cost_ratio(labels_used: u64, stream_length: usize) -> Result<f64> {
    if stream_length == 0 {
        return Err(Error::invalid("label cost over an empty stream"));
    }
    Ok(labels_used as f64 / stream_length as f64)
}
