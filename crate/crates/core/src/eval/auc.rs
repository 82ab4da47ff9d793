use crate::error::{GiktError, Result};
use crate::training::SequencePrediction;

fn class_counts(scores: &[f64], labels: &[u8]) -> Result<(usize, usize)> {
    if scores.len() != labels.len() {
        return Err(GiktError::dim("auc", &[scores.len()], &[labels.len()]));
    }
    if let Some(i) = scores.iter().position(|s| s.is_nan()) {
        return Err(GiktError::Numeric(format!("score {i} is NaN")));
    }
    let pos = labels.iter().filter(|&&l| l == 1).count();
    if let Some(&bad) = labels.iter().find(|&&l| l > 1) {
        return Err(GiktError::Contract(format!("label {bad} is not 0 or 1")));
    }
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(GiktError::UndefinedMetric(format!(
            "AUC needs both classes, got {pos} positive and {neg} negative labels"
        )));
    }
    Ok((pos, neg))
}

/// Area under the ROC curve from the rank sum of positives, midranks for ties.
pub fn auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    let (pos, neg) = class_counts(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Twice the rank sum keeps every midrank an integer.
    let mut twice_rank_sum: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // Ranks i+1..=j+1 share the midrank (i+j+2)/2.
        let twice_mid = (i + j + 2) as u128;
        let tied_pos = order[i..=j].iter().filter(|&&k| labels[k] == 1).count() as u128;
        twice_rank_sum += twice_mid * tied_pos;
        i = j + 1;
    }
    let p = pos as u128;
    let twice_u = twice_rank_sum - p * (p + 1);
    Ok(twice_u as f64 / (2 * pos * neg) as f64)
}

/// Pairwise reference count over every positive-negative pair.
pub fn auc_brute_force(scores: &[f64], labels: &[u8]) -> Result<f64> {
    let (pos, neg) = class_counts(scores, labels)?;
    let mut twice_wins: u128 = 0;
    let by_class = |c: u8| scores.iter().zip(labels).filter(move |(_, &l)| l == c).map(|(&s, _)| s);
    for si in by_class(1) {
        for sj in by_class(0) {
            if si > sj {
                twice_wins += 2;
            } else if si == sj {
                twice_wins += 1;
            }
        }
    }
    Ok(twice_wins as f64 / (2 * pos * neg) as f64)
}

/// Mean of per-sequence AUCs over sequences that contain both classes.
pub fn per_student_auc(preds: &[SequencePrediction]) -> Result<f64> {
    let mut total = 0.0;
    let mut n = 0usize;
    for p in preds {
        match auc(&p.probabilities, &p.labels) {
            Ok(a) => {
                total += a;
                n += 1;
            }
            Err(GiktError::UndefinedMetric(_)) => {}
            Err(e) => return Err(e),
        }
    }
    if n == 0 {
        return Err(GiktError::UndefinedMetric(
            "no sequence has both correct and incorrect answers".into(),
        ));
    }
    Ok(total / n as f64)
}
