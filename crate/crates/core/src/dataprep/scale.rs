use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::DataTable;
use crate::error::{Error, Result};

/// Per-column range observed on the fit table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerState {
    pub columns: Vec<String>,
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl ScalerState {
    pub fn transform_value(&self, j: usize, v: f64) -> f64 {
        let range = self.maxs[j] - self.mins[j];
        if range <= 0.0 {
            0.0
        } else {
            ((v - self.mins[j]) / range).clamp(0.0, 1.0)
        }
    }

    pub fn to_kv_string(&self) -> String {
        let mut out = String::new();
        for ((c, lo), hi) in self.columns.iter().zip(&self.mins).zip(&self.maxs) {
            let _ = writeln!(out, "{c}.min={lo}");
            let _ = writeln!(out, "{c}.max={hi}");
        }
        out
    }
}

pub fn minmax_fit(table: &DataTable) -> Result<ScalerState> {
    if table.is_empty() {
        return Err(Error::Empty("scaler fit table"));
    }
    let n = table.n_features();
    let mut mins = vec![f64::INFINITY; n];
    let mut maxs = vec![f64::NEG_INFINITY; n];
    for row in &table.rows {
        for (j, &v) in row.iter().enumerate() {
            mins[j] = mins[j].min(v);
            maxs[j] = maxs[j].max(v);
        }
    }
    Ok(ScalerState { columns: table.column_names.clone(), mins, maxs })
}

/// Maps each column onto [0,1]; values outside the fitted range are clamped.
pub fn minmax_apply(state: &ScalerState, table: &DataTable) -> Result<DataTable> {
    if table.n_features() != state.mins.len() {
        return Err(Error::LengthMismatch { expected: state.mins.len(), got: table.n_features() });
    }
    let mut out = table.clone();
    for row in &mut out.rows {
        for (j, v) in row.iter_mut().enumerate() {
            *v = state.transform_value(j, *v);
        }
    }
    Ok(out)
}
