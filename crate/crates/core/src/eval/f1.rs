use super::MetricError;
use crate::env::ActionKind;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F1Scores {
    pub micro: f64,
    pub macro_: f64,
    /// Classes that appear in gold or predictions; the macro average runs over these.
    pub classes: usize,
}

/// Single-label multiclass F1 over the ten action kinds.
///
/// Micro-F1 pools counts over classes, which for single-label data equals
/// accuracy. Macro-F1 averages per-class F1 over every class present in
/// either list; a present class with no true positives contributes 0.
pub fn micro_macro_f1(gold: &[ActionKind], pred: &[ActionKind]) -> Result<F1Scores, MetricError> {
    if gold.len() != pred.len() {
        return Err(MetricError::InvalidInput(format!("{} gold labels vs {} predictions", gold.len(), pred.len())));
    }
    if gold.is_empty() {
        return Err(MetricError::InvalidInput("no labels".into()));
    }
    let mut tp = [0usize; 10];
    let mut fp = [0usize; 10];
    let mut fn_ = [0usize; 10];
    for (g, p) in gold.iter().zip(pred) {
        if g == p {
            tp[g.index()] += 1;
        } else {
            fp[p.index()] += 1;
            fn_[g.index()] += 1;
        }
    }
    let (stp, sfp, sfn): (usize, usize, usize) = (tp.iter().sum(), fp.iter().sum(), fn_.iter().sum());
    let micro = f1(stp, sfp, sfn);
    let present: Vec<usize> = (0..10).filter(|&c| tp[c] + fp[c] + fn_[c] > 0).collect();
    let macro_ = present.iter().map(|&c| f1(tp[c], fp[c], fn_[c])).sum::<f64>() / present.len() as f64;
    Ok(F1Scores { micro, macro_, classes: present.len() })
}

fn f1(tp: usize, fp: usize, fn_: usize) -> f64 {
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        0.0
    } else {
        (2 * tp) as f64 / denom as f64
    }
}
