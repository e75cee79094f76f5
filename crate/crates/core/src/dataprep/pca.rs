use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::DataTable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaState {
    pub means: Vec<f64>,
    /// Orthonormal rows, strongest first.
    pub components: Vec<Vec<f64>>,
    /// Every covariance eigenvalue in decreasing order.
    pub eigenvalues: Vec<f64>,
}

impl PcaState {
    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn explained_variance(&self) -> &[f64] {
        &self.eigenvalues[..self.k()]
    }

    pub fn project(&self, row: &[f64]) -> Vec<f64> {
        self.components
            .iter()
            .map(|c| c.iter().zip(row).zip(&self.means).map(|((w, v), m)| w * (v - m)).sum())
            .collect()
    }

    pub fn reconstruct(&self, scores: &[f64]) -> Vec<f64> {
        let mut out = self.means.clone();
        for (c, s) in self.components.iter().zip(scores) {
            out.iter_mut().zip(c).for_each(|(o, w)| *o += s * w);
        }
        out
    }

    pub fn transform(&self, table: &DataTable) -> Result<DataTable> {
        if table.n_features() != self.means.len() {
            return Err(Error::LengthMismatch { expected: self.means.len(), got: table.n_features() });
        }
        let names = (1..=self.k()).map(|i| format!("V{i}")).collect();
        let rows = table.rows.iter().map(|r| self.project(r)).collect();
        DataTable::with_row_ids(names, rows, table.labels.clone(), table.label_column.clone(), table.row_ids.clone())
    }

    pub fn to_kv_string(&self) -> String {
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(" ");
        let mut out = format!("k={}\nmeans={}\n", self.k(), join(&self.means));
        for (i, c) in self.components.iter().enumerate() {
            let _ = writeln!(out, "component.{}={}", i + 1, join(c));
        }
        let _ = writeln!(out, "eigenvalues={}", join(&self.eigenvalues));
        out
    }
}

/// Eigen-decomposition of the sample covariance; each component's largest
/// entry is made positive.
pub fn pca_fit(table: &DataTable, k: usize) -> Result<PcaState> {
    let d = table.n_features();
    let n = table.len();
    if k == 0 || k > d {
        return Err(Error::InvalidSpec(format!("{k} components requested from {d} features")));
    }
    if n < k + 1 {
        return Err(Error::Data(format!("PCA with k={k} needs at least {} rows, got {n}", k + 1)));
    }
    let means: Vec<f64> = (0..d)
        .map(|j| table.rows.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    let x = DMatrix::from_fn(n, d, |i, j| table.rows[i][j] - means[j]);
    let cov = (x.transpose() * &x) / (n as f64 - 1.0);
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let components = order[..k]
        .iter()
        .map(|&i| {
            let mut c: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            let lead = c.iter().copied().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
            if lead < 0.0 {
                c.iter_mut().for_each(|v| *v = -*v);
            }
            c
        })
        .collect();
    Ok(PcaState { means, components, eigenvalues })
}

/// Projects onto the top `k` components; output columns are `V1..Vk`.
pub fn pca_fit_transform(table: &DataTable, k: usize) -> Result<(DataTable, PcaState)> {
    let state = pca_fit(table, k)?;
    Ok((state.transform(table)?, state))
}
