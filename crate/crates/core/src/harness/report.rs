//! Summary CSVs, aligned text tables and loss histories.
//!
//! Output depends only on record content, so rewriting the same records
//! produces identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::metrics::MetricSet;
use super::run::RunRecord;
use crate::ansatz::AnsatzKind;
use crate::error::{Error, Result};
use crate::featuremaps::FeatureMapKind;
use crate::models::Architecture;

pub const SUMMARY_HEADER: &str = "model,feature_map,ansatz,dataset,accuracy,precision,recall,f1";

/// Sort key placing records in report order.
fn order_key(r: &RunRecord) -> (u8, usize, usize, usize, u64, String) {
    let c = &r.config;
    let pos = |i: Option<usize>| i.unwrap_or(usize::MAX);
    (
        c.dataset as u8,
        pos(Architecture::ALL.iter().position(|&a| a == c.architecture)),
        pos(FeatureMapKind::ALL.iter().position(|&f| f == c.feature_map)),
        pos(AnsatzKind::ALL.iter().position(|&a| a == c.ansatz)),
        c.seed,
        r.run_id.clone(),
    )
}

fn sorted(records: &[RunRecord]) -> Vec<&RunRecord> {
    let mut v: Vec<&RunRecord> = records.iter().collect();
    v.sort_by_key(|r| order_key(r));
    v
}

fn scores(m: &MetricSet) -> [f64; 4] {
    [m.accuracy, m.precision, m.recall, m.f1]
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn names(r: &RunRecord) -> [&'static str; 4] {
    let c = &r.config;
    [c.architecture.label(), c.feature_map.label(), c.ansatz.label(), c.dataset.label()]
}

/// One row per record, test-set metrics at four decimals.
pub fn summary_csv(records: &[RunRecord]) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for r in sorted(records) {
        let [m, f, a, d] = names(r);
        let s = scores(&r.test_metrics);
        let _ = writeln!(out, "{m},{f},{a},{d},{:.4},{:.4},{:.4},{:.4}", s[0], s[1], s[2], s[3]);
    }
    out
}

type CellKey = (u8, usize, usize, usize);

fn cells(records: &[RunRecord]) -> BTreeMap<CellKey, Vec<&RunRecord>> {
    let mut map: BTreeMap<CellKey, Vec<&RunRecord>> = BTreeMap::new();
    for r in sorted(records) {
        let k = order_key(r);
        map.entry((k.0, k.1, k.2, k.3)).or_default().push(r);
    }
    map
}

fn cell_medians(rs: &[&RunRecord]) -> [f64; 4] {
    std::array::from_fn(|i| median(rs.iter().map(|r| scores(&r.test_metrics)[i]).collect()))
}

/// Per-cell medians across seeds; only meaningful when seeds repeat.
pub fn median_csv(records: &[RunRecord]) -> String {
    let mut out = String::from(
        "model,feature_map,ansatz,dataset,seeds,accuracy_median,precision_median,recall_median,f1_median\n",
    );
    for rs in cells(records).values() {
        let [m, f, a, d] = names(rs[0]);
        let s = cell_medians(rs);
        let _ = writeln!(out, "{m},{f},{a},{d},{},{:.4},{:.4},{:.4},{:.4}", rs.len(), s[0], s[1], s[2], s[3]);
    }
    out
}

/// Aligned text tables, one per (model, dataset), rows grouped by feature map.
pub fn text_tables(records: &[RunRecord]) -> BTreeMap<String, String> {
    let mut groups: BTreeMap<(u8, usize), Vec<Vec<&RunRecord>>> = BTreeMap::new();
    for (k, rs) in cells(records) {
        groups.entry((k.0, k.1)).or_default().push(rs);
    }
    let mut out = BTreeMap::new();
    for rows in groups.values() {
        let first = rows[0][0];
        let c = &first.config;
        let multi = rows.iter().any(|rs| rs.len() > 1);
        let header = ["Model", "Feature Map", "Ansatz", "Accuracy", "Precision", "Recall", "F1_score"];
        let mut table: Vec<[String; 7]> = vec![header.map(String::from)];
        let mut last_map = None;
        for (i, rs) in rows.iter().enumerate() {
            let cfg = &rs[0].config;
            let s = cell_medians(rs);
            let model = if i == 0 { c.architecture.label().to_string() } else { String::new() };
            let fmap = if last_map != Some(cfg.feature_map) { cfg.feature_map.label().to_string() } else { String::new() };
            last_map = Some(cfg.feature_map);
            table.push([
                model,
                fmap,
                cfg.ansatz.label().to_string(),
                format!("{:.2}", s[0]),
                format!("{:.2}", s[1]),
                format!("{:.2}", s[2]),
                format!("{:.2}", s[3]),
            ]);
        }
        let widths: [usize; 7] = std::array::from_fn(|j| table.iter().map(|r| r[j].chars().count()).max().unwrap_or(0));
        let mut text = format!("Performance metrics of the {} model on the {} dataset", c.architecture.label(), c.dataset.label());
        if multi {
            text.push_str(" (median over seeds)");
        }
        text.push('\n');
        let rule: String = "-".repeat(widths.iter().sum::<usize>() + 3 * (widths.len() - 1));
        for (i, row) in table.iter().enumerate() {
            let cells: Vec<String> = row
                .iter()
                .zip(widths)
                .enumerate()
                .map(|(j, (v, w))| if j < 3 { format!("{v:<w$}") } else { format!("{v:>w$}") })
                .collect();
            let _ = writeln!(text, "{}", cells.join(" | ").trim_end());
            if i == 0 {
                let _ = writeln!(text, "{rule}");
            }
        }
        let file = format!("table_{}_{}.txt", c.architecture.key(), c.dataset.key());
        out.insert(file, text);
    }
    out
}

pub fn write_reports(records: &[RunRecord], out_dir: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Empty("run records"));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let write = |name: &str, body: &str| {
        let p = out_dir.join(name);
        std::fs::write(&p, body).map_err(|e| Error::io(&p, e))
    };
    write("summary.csv", &summary_csv(records))?;
    if cells(records).values().any(|rs| rs.len() > 1) {
        write("median.csv", &median_csv(records))?;
    }
    for (name, body) in text_tables(records) {
        write(&name, &body)?;
    }
    for r in records {
        write(&r.loss_file(), &r.history.to_csv_string())?;
    }
    Ok(())
}
