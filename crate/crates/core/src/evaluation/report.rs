//! CSV and plain-text report writers. Numbers use fixed decimals so repeated
//! runs produce identical bytes.

use std::io::Write;

use super::{AblationRow, ConfusionMatrix, EvaluationError, Metrics, RankedFeature};

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub model: String,
    pub metrics: Metrics,
    pub confusion: ConfusionMatrix,
    pub cv_mean: f64,
    pub cv_std: f64,
}

fn fixed(v: f64) -> String {
    format!("{v:.6}")
}

/// `model,accuracy,precision,recall,f1`
pub fn write_metrics_csv<W: Write>(out: W, rows: &[MetricsRow]) -> Result<(), EvaluationError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["model", "accuracy", "precision", "recall", "f1"])?;
    for r in rows {
        let m = &r.metrics;
        w.write_record([
            r.model.clone(),
            fixed(m.accuracy),
            fixed(m.precision),
            fixed(m.recall),
            fixed(m.f1),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `config,accuracy,precision,recall,f1,cv_mean,cv_std`
pub fn write_ablation_csv<W: Write>(out: W, rows: &[AblationRow]) -> Result<(), EvaluationError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["config", "accuracy", "precision", "recall", "f1", "cv_mean", "cv_std"])?;
    for r in rows {
        let m = &r.metrics;
        w.write_record([
            r.label.clone(),
            fixed(m.accuracy),
            fixed(m.precision),
            fixed(m.recall),
            fixed(m.f1),
            fixed(r.cv_mean),
            fixed(r.cv_std),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `rank,feature,weight` with 1-based ranks.
pub fn write_importance_csv<W: Write>(out: W, ranked: &[RankedFeature]) -> Result<(), EvaluationError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rank", "feature", "weight"])?;
    for (i, r) in ranked.iter().enumerate() {
        w.write_record([(i + 1).to_string(), r.feature.clone(), format!("{:.9}", r.weight)])?;
    }
    w.flush()?;
    Ok(())
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i == 0 {
                s.push_str(&format!("{cell:<w$}"));
            } else {
                s.push_str(&format!("  {cell:>w$}"));
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

fn pct(v: f64) -> String {
    format!("{:.2}", 100.0 * v)
}

/// Metrics in percent plus the aggregated confusion counts.
pub fn metrics_table(rows: &[MetricsRow]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let m = &r.metrics;
            let c = &r.confusion;
            vec![
                r.model.clone(),
                pct(m.accuracy),
                pct(m.precision),
                pct(m.recall),
                pct(m.f1),
                format!("{:.2} ± {:.2}", 100.0 * r.cv_mean, 100.0 * r.cv_std),
                format!("{}/{}/{}/{}", c.tp, c.fn_, c.fp, c.tn),
            ]
        })
        .collect();
    table(
        &[
            "Model",
            "Accuracy (%)",
            "Precision (%)",
            "Recall (%)",
            "F1 (%)",
            "CV acc (%)",
            "TP/FN/FP/TN",
        ],
        &body,
    )
}

pub fn ablation_table(rows: &[AblationRow]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.label.clone(),
                pct(r.metrics.accuracy),
                pct(r.metrics.precision),
                pct(r.metrics.recall),
            ]
        })
        .collect();
    table(
        &["Feature configuration", "Accuracy (%)", "Precision (%)", "Recall (%)"],
        &body,
    )
}

pub fn importance_table(ranked: &[RankedFeature], top: usize) -> String {
    let body: Vec<Vec<String>> = ranked
        .iter()
        .take(top)
        .enumerate()
        .map(|(i, r)| vec![(i + 1).to_string(), r.feature.clone(), format!("{:.4}", r.weight)])
        .collect();
    table(&["Rank", "Feature", "Weight"], &body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::compute_metrics;

    fn row() -> MetricsRow {
        let confusion = ConfusionMatrix::new(92, 8, 7, 93);
        MetricsRow {
            model: "SVM (Rbf)".into(),
            metrics: compute_metrics(&confusion).unwrap(),
            confusion,
            cv_mean: 0.925,
            cv_std: 0.04,
        }
    }

    #[test]
    fn metrics_csv_layout() {
        let mut buf = Vec::new();
        write_metrics_csv(&mut buf, &[row()]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "model,accuracy,precision,recall,f1\nSVM (Rbf),0.925000,0.929293,0.920000,0.924623\n"
        );
    }

    #[test]
    fn importance_csv_layout() {
        let ranked = vec![
            RankedFeature {
                feature: "resmi".into(),
                weight: 0.75,
            },
            RankedFeature {
                feature: "READ_SMS".into(),
                weight: 0.25,
            },
        ];
        let mut buf = Vec::new();
        write_importance_csv(&mut buf, &ranked).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "rank,feature,weight\n1,resmi,0.750000000\n2,READ_SMS,0.250000000\n"
        );
    }

    #[test]
    fn text_table_is_aligned() {
        let t = metrics_table(&[row()]);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[2].contains("92.50") && lines[2].contains("92/8/7/93"));
    }
}
