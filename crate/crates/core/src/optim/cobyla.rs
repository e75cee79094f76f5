//! Derivative-free minimisation by linear approximation (COBYLA), restricted
//! to the unconstrained case.
//!
//! The method keeps `n + 1` points: a base vertex holding the lowest value seen
//! on the simplex and `n` offsets from it. The linear interpolant of the
//! objective on those points gives a model gradient `g`; a trial step of length
//! `ρ` is taken along `−g`. The trial point replaces whichever vertex keeps the
//! simplex best conditioned. When a step fails to reduce the objective by at
//! least a tenth of the predicted amount, the simplex geometry is repaired if
//! needed, otherwise `ρ` is halved. The run ends when `ρ` would drop below
//! `rho_end` or the evaluation budget is spent.

use nalgebra::DMatrix;

use super::{LossHistory, Minimum, OptimizerConfig};
use crate::error::{Error, Result};

/// Lower bound on vertex distance from the opposite face, as a fraction of ρ.
const MIN_SIGMA: f64 = 0.25;
/// Upper bound on edge length from the base vertex, as a multiple of ρ.
const MAX_EDGE: f64 = 2.1;
/// Length of a geometry-repair step, as a fraction of ρ.
const GEOMETRY_STEP: f64 = 0.5;
/// Edge-length threshold used when choosing the vertex to drop.
const DROP_EDGE: f64 = 1.1;
/// Fraction of the predicted reduction that counts as progress.
const ACCEPT_RATIO: f64 = 0.1;

struct Evaluator<'a> {
    objective: &'a mut dyn FnMut(&[f64]) -> f64,
    budget: usize,
    history: LossHistory,
    best_x: Vec<f64>,
    best_f: f64,
}

impl Evaluator<'_> {
    /// `None` once the budget is exhausted. NaN is treated as `+∞`.
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.history.len() >= self.budget {
            return None;
        }
        let mut f = (self.objective)(x);
        if f.is_nan() {
            f = f64::INFINITY;
        }
        self.history.push(f);
        if f < self.best_f || self.best_x.is_empty() {
            self.best_f = f;
            self.best_x = x.to_vec();
        }
        Some(f)
    }

    fn finish(self) -> Minimum {
        Minimum {
            x: self.best_x,
            f: self.best_f,
            history: self.history,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Rows `r_j` with `r_j · d_k = δ_jk`, or `None` when the offsets are singular.
fn dual_rows(dirs: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = dirs.len();
    let d = DMatrix::from_fn(n, n, |i, k| dirs[k][i]);
    let inv = d.try_inverse()?;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| inv[(j, i)]).collect())
        .collect();
    rows.iter()
        .all(|r| r.iter().all(|v| v.is_finite()))
        .then_some(rows)
}

pub fn cobyla_minimize(
    objective: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    cfg: &OptimizerConfig,
) -> Result<Minimum> {
    cfg.validate()?;
    let n = x0.len();
    if n == 0 {
        return Err(Error::Optimizer("dimension must be at least 1".into()));
    }
    let mut ev = Evaluator {
        objective,
        budget: cfg.max_evals,
        history: LossHistory::default(),
        best_x: Vec::new(),
        best_f: f64::INFINITY,
    };
    let f0 = ev.eval(x0).expect("budget ≥ 1");
    if !f0.is_finite() {
        return Err(Error::Optimizer(
            "objective is not finite at the starting point".into(),
        ));
    }

    let mut rho = cfg.rho_begin;
    let mut base = x0.to_vec();
    let mut f_base = f0;
    let mut dirs: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut fvals: Vec<f64> = Vec::with_capacity(n);

    macro_rules! eval_or_finish {
        ($x:expr) => {
            match ev.eval($x) {
                Some(f) => f,
                None => return Ok(ev.finish()),
            }
        };
    }

    for j in 0..n {
        let mut d = vec![0.0; n];
        d[j] = rho;
        let x: Vec<f64> = base.iter().zip(&d).map(|(b, s)| b + s).collect();
        fvals.push(eval_or_finish!(&x));
        dirs.push(d);
    }

    loop {
        // Keep the lowest vertex as the base.
        if let Some(k) = (0..n)
            .filter(|&k| fvals[k] < f_base)
            .min_by(|&a, &b| fvals[a].total_cmp(&fvals[b]))
        {
            let shift = dirs[k].clone();
            for (b, s) in base.iter_mut().zip(&shift) {
                *b += s;
            }
            for (j, d) in dirs.iter_mut().enumerate() {
                if j == k {
                    d.iter_mut().for_each(|v| *v = -*v);
                } else {
                    d.iter_mut().zip(&shift).for_each(|(v, s)| *v -= s);
                }
            }
            std::mem::swap(&mut f_base, &mut fvals[k]);
        }

        let Some(rows) = dual_rows(&dirs) else {
            // Collapsed simplex: rebuild it along the axes.
            for j in 0..n {
                let mut d = vec![0.0; n];
                d[j] = rho;
                let x: Vec<f64> = base.iter().zip(&d).map(|(b, s)| b + s).collect();
                fvals[j] = eval_or_finish!(&x);
                dirs[j] = d;
            }
            continue;
        };

        let mut g = vec![0.0; n];
        for (r, fj) in rows.iter().zip(&fvals) {
            let df = fj - f_base;
            g.iter_mut().zip(r).for_each(|(gi, ri)| *gi += df * ri);
        }
        let sigma: Vec<f64> = rows.iter().map(|r| 1.0 / norm(r)).collect();
        let edge: Vec<f64> = dirs.iter().map(|d| norm(d)).collect();
        let acceptable = (0..n).all(|j| sigma[j] >= MIN_SIGMA * rho && edge[j] <= MAX_EDGE * rho);

        if !acceptable {
            let jdrop = if edge.iter().any(|&e| e > MAX_EDGE * rho) {
                (0..n).max_by(|&a, &b| edge[a].total_cmp(&edge[b]))
            } else {
                (0..n).min_by(|&a, &b| sigma[a].total_cmp(&sigma[b]))
            }
            .expect("n ≥ 1");
            let r = &rows[jdrop];
            let scale = GEOMETRY_STEP * rho / norm(r);
            let mut dx: Vec<f64> = r.iter().map(|v| v * scale).collect();
            if dot(&g, &dx) > 0.0 {
                dx.iter_mut().for_each(|v| *v = -*v);
            }
            let x: Vec<f64> = base.iter().zip(&dx).map(|(b, s)| b + s).collect();
            fvals[jdrop] = eval_or_finish!(&x);
            dirs[jdrop] = dx;
            continue;
        }

        let gnorm = norm(&g);
        if gnorm > 0.0 && gnorm.is_finite() {
            let step: Vec<f64> = g.iter().map(|v| -rho * v / gnorm).collect();
            let x: Vec<f64> = base.iter().zip(&step).map(|(b, s)| b + s).collect();
            let f_new = eval_or_finish!(&x);
            let actual = f_base - f_new;
            let predicted = rho * gnorm;

            // Pick the vertex whose replacement keeps the simplex best shaped.
            let mut ratio = if actual <= 0.0 { 1.0 } else { 0.0 };
            let mut jdrop = None;
            let mut sigbar = vec![0.0; n];
            for j in 0..n {
                let s = dot(&rows[j], &step).abs();
                if s > ratio {
                    jdrop = Some(j);
                    ratio = s;
                }
                sigbar[j] = s * sigma[j];
            }
            let mut longest = DROP_EDGE * rho;
            for j in 0..n {
                if sigbar[j] >= MIN_SIGMA * rho || sigbar[j] >= sigma[j] {
                    let e = if actual > 0.0 {
                        norm(&step.iter().zip(&dirs[j]).map(|(a, b)| a - b).collect::<Vec<_>>())
                    } else {
                        edge[j]
                    };
                    if e > longest {
                        longest = e;
                        jdrop = Some(j);
                    }
                }
            }
            if let Some(j) = jdrop {
                dirs[j] = step;
                fvals[j] = f_new;
            }
            if actual > 0.0 && actual >= ACCEPT_RATIO * predicted {
                continue;
            }
        }

        if rho <= cfg.rho_end {
            break;
        }
        rho *= 0.5;
        if rho <= 1.5 * cfg.rho_end {
            rho = cfg.rho_end;
        }
    }
    Ok(ev.finish())
}
