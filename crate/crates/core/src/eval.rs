//! Confusion matrix, accuracies and the FNC-1 weighted score.
//!
//! The FNC-1 score gives 0.25 points for every instance whose relatedness
//! (unrelated vs. any related class) is predicted correctly, plus 0.75
//! for every related instance whose exact label is predicted. The maximum
//! is 0.25 per unrelated and 1.0 per related gold instance.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::label::{StanceLabel, NUM_LABELS};

pub const RELATEDNESS_POINTS: f64 = 0.25;
pub const EXACT_RELATED_POINTS: f64 = 0.75;

/// Rows are gold labels, columns predictions, both in label-code order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub counts: [[u64; NUM_LABELS]; NUM_LABELS],
}

impl ConfusionMatrix {
    pub fn from_counts(counts: [[u64; NUM_LABELS]; NUM_LABELS]) -> Self {
        ConfusionMatrix { counts }
    }

    pub fn add(&mut self, truth: StanceLabel, pred: StanceLabel) {
        self.counts[truth.code()][pred.code()] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_total(&self, truth: StanceLabel) -> u64 {
        self.counts[truth.code()].iter().sum()
    }

    pub fn col_total(&self, pred: StanceLabel) -> u64 {
        self.counts.iter().map(|r| r[pred.code()]).sum()
    }

    pub fn trace(&self) -> u64 {
        (0..NUM_LABELS).map(|i| self.counts[i][i]).sum()
    }

    /// `(trace / total, per-class diagonal / row total)`. A class with no
    /// gold instances gets accuracy 0.
    pub fn accuracies(&self) -> Result<(f64, [f64; NUM_LABELS])> {
        let total = self.total();
        if total == 0 {
            return Err(Error::EmptyInput);
        }
        let mut per_class = [0.0; NUM_LABELS];
        for l in StanceLabel::ALL {
            let row = self.row_total(l);
            if row == 0 {
                log::warn!("no gold `{l}` instances; reporting its accuracy as 0");
            } else {
                per_class[l.code()] = self.counts[l.code()][l.code()] as f64 / row as f64;
            }
        }
        Ok((self.trace() as f64 / total as f64, per_class))
    }

    /// FNC-1 (points, max points) implied by the matrix.
    pub fn fnc1_points(&self) -> (f64, f64) {
        let mut points = 0.0;
        let mut max = 0.0;
        for t in StanceLabel::ALL {
            let row = self.row_total(t) as f64;
            max += if t.is_related() { RELATEDNESS_POINTS + EXACT_RELATED_POINTS } else { RELATEDNESS_POINTS } * row;
            for p in StanceLabel::ALL {
                let n = self.counts[t.code()][p.code()] as f64;
                if t.is_related() == p.is_related() {
                    points += RELATEDNESS_POINTS * n;
                }
                if t.is_related() && t == p {
                    points += EXACT_RELATED_POINTS * n;
                }
            }
        }
        (points, max)
    }

    pub fn report(&self) -> Result<ScoreReport> {
        let (overall_accuracy, per_class_accuracy) = self.accuracies()?;
        let (fnc1_points, fnc1_max_points) = self.fnc1_points();
        let fnc1_percent = if fnc1_max_points > 0.0 { 100.0 * fnc1_points / fnc1_max_points } else { 0.0 };
        Ok(ScoreReport {
            fnc1_points,
            fnc1_max_points,
            fnc1_percent,
            overall_accuracy,
            per_class_accuracy,
            confusion: *self,
        })
    }
}

pub fn confusion_matrix(truth: &[StanceLabel], pred: &[StanceLabel]) -> Result<ConfusionMatrix> {
    if truth.len() != pred.len() {
        return Err(Error::LengthMismatch { left: truth.len(), right: pred.len() });
    }
    if truth.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut cm = ConfusionMatrix::default();
    for (t, p) in truth.iter().zip(pred) {
        cm.add(*t, *p);
    }
    Ok(cm)
}

pub fn fnc1_score(truth: &[StanceLabel], pred: &[StanceLabel]) -> Result<ScoreReport> {
    confusion_matrix(truth, pred)?.report()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub fnc1_points: f64,
    pub fnc1_max_points: f64,
    pub fnc1_percent: f64,
    /// Fractions in [0, 1].
    pub overall_accuracy: f64,
    pub per_class_accuracy: [f64; NUM_LABELS],
    pub confusion: ConfusionMatrix,
}

/// Percentage rounded half-up to two decimals.
pub fn round2(percent: f64) -> f64 {
    (percent * 100.0).round() / 100.0
}

impl ScoreReport {
    /// Flat key/value pairs for machine-readable export. Percentages are
    /// unrounded; counts are integers.
    pub fn key_values(&self) -> Vec<(String, f64)> {
        let mut kv = vec![
            ("fnc1_points".to_string(), self.fnc1_points),
            ("fnc1_max_points".to_string(), self.fnc1_max_points),
            ("fnc1_percent".to_string(), self.fnc1_percent),
            ("overall_accuracy_percent".to_string(), 100.0 * self.overall_accuracy),
        ];
        for l in StanceLabel::ALL {
            kv.push((format!("accuracy_percent.{l}"), 100.0 * self.per_class_accuracy[l.code()]));
        }
        for t in StanceLabel::ALL {
            for p in StanceLabel::ALL {
                kv.push((format!("confusion.{t}.{p}"), self.confusion.counts[t.code()][p.code()] as f64));
            }
        }
        kv
    }
}

fn thousands(n: u64) -> String {
    let s = n.to_string();
    let mut out = String::new();
    for (i, c) in s.chars().enumerate() {
        if i > 0 && (s.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(c);
    }
    out
}

impl fmt::Display for ScoreReport {
    /// Confusion table with row/column totals and per-class accuracy,
    /// followed by the FNC-1 score.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cm = &self.confusion;
        let mut header = format!("{:<13}", "True\\Pred.");
        for l in StanceLabel::ALL {
            write!(header, "{:>12}", format!("'{l}'"))?;
        }
        write!(header, "{:>10}{:>13}", "Overall", "% Accuracy")?;
        writeln!(f, "{header}")?;
        writeln!(f, "{}", "-".repeat(header.len()))?;
        for t in StanceLabel::ALL {
            write!(f, "{:<13}", format!("'{t}'"))?;
            for p in StanceLabel::ALL {
                write!(f, "{:>12}", thousands(cm.counts[t.code()][p.code()]))?;
            }
            writeln!(
                f,
                "{:>10}{:>13.2}",
                thousands(cm.row_total(t)),
                round2(100.0 * self.per_class_accuracy[t.code()])
            )?;
        }
        writeln!(f, "{}", "-".repeat(header.len()))?;
        write!(f, "{:<13}", "Overall")?;
        for p in StanceLabel::ALL {
            write!(f, "{:>12}", thousands(cm.col_total(p)))?;
        }
        writeln!(f, "{:>10}{:>13.2}", thousands(cm.total()), round2(100.0 * self.overall_accuracy))?;
        writeln!(f)?;
        write!(
            f,
            "FNC-1 score: {:.2}% ({} of {} points)",
            round2(self.fnc1_percent),
            self.fnc1_points,
            self.fnc1_max_points
        )
    }
}
