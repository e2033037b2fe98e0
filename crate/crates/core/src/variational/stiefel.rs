//! Multi-start projected-gradient descent over complex Stiefel manifolds
//! `{V ∈ C^{n×k} : V†V = I}`.
//!
//! Gradients are central differences in the ambient space, projected onto
//! the tangent space and followed by a QR retraction with Armijo backtracking.

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, c, CMatrix};

pub const GRADIENT_STEP: f64 = 1e-5;
pub const DEFAULT_RESTARTS: usize = 32;
pub const DEFAULT_EVALUATIONS: usize = 20_000;
/// A local run stops once it improves by less than this over `STALL_WINDOW` iterations.
pub const STALL_IMPROVEMENT: f64 = 1e-7;
pub const STALL_WINDOW: usize = 50;

/// Search effort, measured in objective evaluations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub evaluations: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            evaluations: DEFAULT_EVALUATIONS,
            restarts: DEFAULT_RESTARTS,
            seed: 0,
        }
    }
}

impl Budget {
    pub fn new(evaluations: usize) -> Self {
        Budget {
            evaluations,
            ..Budget::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    /// Same restart count and seed, different evaluation allowance.
    pub fn scaled(&self, evaluations: usize) -> Self {
        Budget {
            evaluations: evaluations.max(1),
            ..self.clone()
        }
    }
}

/// A real-valued function of an `n x k` complex matrix, minimized over
/// isometries. It must be defined (and smooth) in a neighbourhood of the
/// manifold since finite differences leave it.
pub trait Objective: Sync {
    fn shape(&self) -> (usize, usize);
    fn value(&self, v: &CMatrix) -> f64;
}

#[derive(Debug, Clone)]
pub struct LocalRun {
    pub point: CMatrix,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub point: CMatrix,
    pub value: f64,
    pub evaluations: usize,
    pub restarts_used: usize,
    pub converged: bool,
    /// Final value of every screening run, in restart order.
    pub restart_values: Vec<f64>,
    /// Best value after each screening run and after refinement.
    pub best_so_far: Vec<f64>,
}

impl SearchOutcome {
    /// Distance from the best value to the median screening value.
    pub fn restart_spread(&self) -> f64 {
        if self.restart_values.is_empty() {
            return 0.0;
        }
        let mut v = self.restart_values.clone();
        v.sort_by(f64::total_cmp);
        (v[v.len() / 2] - self.value).max(0.0)
    }
}

fn gradient<O: Objective + ?Sized>(obj: &O, v: &CMatrix) -> CMatrix {
    let (n, k) = v.shape();
    let mut g = CMatrix::zeros(n, k);
    let mut probe = v.clone();
    let h = GRADIENT_STEP;
    for i in 0..n {
        for j in 0..k {
            let orig = probe[(i, j)];
            probe[(i, j)] = orig + c(h, 0.0);
            let fp = obj.value(&probe);
            probe[(i, j)] = orig - c(h, 0.0);
            let fm = obj.value(&probe);
            probe[(i, j)] = orig + c(0.0, h);
            let gp = obj.value(&probe);
            probe[(i, j)] = orig - c(0.0, h);
            let gm = obj.value(&probe);
            probe[(i, j)] = orig;
            g[(i, j)] = c((fp - fm) / (2.0 * h), (gp - gm) / (2.0 * h));
        }
    }
    g
}

fn gradient_cost(shape: (usize, usize)) -> usize {
    4 * shape.0 * shape.1
}

/// Projection of an ambient direction onto the tangent space at `v`.
pub fn project_tangent(v: &CMatrix, g: &CMatrix) -> CMatrix {
    let vg = v.adjoint() * g;
    g - v * linalg::hermitian_part(&vg)
}

fn norm_sq(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Descends from `start` until stalled or out of evaluations.
pub fn descend<O: Objective + ?Sized>(obj: &O, start: CMatrix, max_evals: usize) -> LocalRun {
    let mut v = linalg::qf(&start);
    let mut f = obj.value(&v);
    let mut evals = 1;
    let mut step = 0.5;
    let mut recent: VecDeque<f64> = VecDeque::with_capacity(STALL_WINDOW + 1);
    recent.push_back(f);
    let mut converged = false;
    let gcost = gradient_cost(v.shape());
    while evals + gcost < max_evals {
        let g = gradient(obj, &v);
        evals += gcost;
        let xi = project_tangent(&v, &g);
        let gn = norm_sq(&xi);
        if gn < 1e-22 {
            converged = true;
            break;
        }
        let budget_left = max_evals - evals;
        let Some((t, cand, fc, used)) = line_search(obj, &v, &xi, f, gn, step, budget_left) else {
            evals = max_evals.min(evals + budget_left);
            break;
        };
        evals += used;
        let accepted = fc <= f - 1e-4 * t * gn;
        if accepted {
            v = cand;
            f = fc;
            step = t;
        }
        if !accepted {
            converged = true;
            break;
        }
        recent.push_back(f);
        if recent.len() > STALL_WINDOW {
            let old = recent.pop_front().unwrap_or(f);
            if old - f < STALL_IMPROVEMENT {
                converged = true;
                break;
            }
        }
    }
    LocalRun {
        point: v,
        value: f,
        evaluations: evals,
        converged,
    }
}

/// Greedy backtracking along `-xi`: grows the trial step while the value keeps
/// dropping, otherwise halves it until it drops and then while it keeps
/// dropping. Returns `(step, point, value, evaluations)`, or `None` if the
/// evaluation allowance ran out first.
fn line_search<O: Objective + ?Sized>(
    obj: &O,
    v: &CMatrix,
    xi: &CMatrix,
    f: f64,
    gn: f64,
    step: f64,
    allowance: usize,
) -> Option<(f64, CMatrix, f64, usize)> {
    let mut used = 0;
    let eval = |t: f64, used: &mut usize| -> Option<(CMatrix, f64)> {
        if *used >= allowance {
            return None;
        }
        *used += 1;
        let p = linalg::qf(&(v - xi.scale(t)));
        let fp = obj.value(&p);
        Some((p, fp))
    };
    let mut t = step;
    let (mut best_p, mut best_f) = eval(t, &mut used)?;
    let mut expanded = false;
    if best_f < f {
        for _ in 0..20 {
            let t2 = 2.0 * t;
            if t2 > 1e3 {
                break;
            }
            let (p2, f2) = eval(t2, &mut used)?;
            if f2 < best_f {
                t = t2;
                best_p = p2;
                best_f = f2;
                expanded = true;
            } else {
                break;
            }
        }
    } else {
        loop {
            t *= 0.5;
            if t * gn.sqrt() < 1e-14 {
                return Some((t, best_p, best_f, used));
            }
            let (p2, f2) = eval(t, &mut used)?;
            best_p = p2;
            best_f = f2;
            if best_f < f {
                break;
            }
        }
    }
    if expanded {
        return Some((t, best_p, best_f, used));
    }
    // keep halving while it helps: guards against accepting an overshoot
    for _ in 0..20 {
        let t2 = 0.5 * t;
        let Some((p2, f2)) = eval(t2, &mut used) else { break };
        if f2 < best_f {
            t = t2;
            best_p = p2;
            best_f = f2;
        } else {
            break;
        }
    }
    Some((t, best_p, best_f, used))
}

fn restart_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index as u64)
        .rotate_left(17)
}

/// Multi-start minimization. Half of the budget goes to screening runs (the
/// caller's `seeds` first, then Haar-random starts), the rest refines the best
/// screening result. Every seed is a screening start, so the result is never
/// worse than the best seed.
pub fn minimize<O: Objective>(obj: &O, budget: &Budget, seeds: &[CMatrix]) -> SearchOutcome {
    let shape = obj.shape();
    let gcost = gradient_cost(shape);
    let total = budget.evaluations.max(1);
    // each screening run should afford a handful of gradient steps
    let affordable = (total / 2 / (5 * (gcost + 8))).max(1);
    let random_starts = budget.restarts.min(affordable.saturating_sub(seeds.len()));
    let starts: Vec<CMatrix> = seeds
        .iter()
        .cloned()
        .chain((0..random_starts).map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(budget.seed, i));
            linalg::haar_isometry(&mut rng, shape.0, shape.1)
        }))
        .collect();
    let restarts_used = starts.len().max(1);
    let per_run = (total / 2 / restarts_used).max(1);

    let runs: Vec<LocalRun> = if starts.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(budget.seed, 0));
        vec![descend(obj, linalg::haar_isometry(&mut rng, shape.0, shape.1), per_run)]
    } else {
        starts
            .into_par_iter()
            .map(|s| descend(obj, s, per_run))
            .collect()
    };

    let mut evaluations: usize = runs.iter().map(|r| r.evaluations).sum();
    let mut best_so_far = Vec::with_capacity(runs.len() + 1);
    let mut best_idx = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value < runs[best_idx].value {
            best_idx = i;
        }
        best_so_far.push(runs[best_idx].value);
    }
    let restart_values: Vec<f64> = runs.iter().map(|r| r.value).collect();
    let best = runs[best_idx].clone();

    let remaining = total.saturating_sub(evaluations);
    let refined = if remaining > gcost + 1 && !best.converged {
        let r = descend(obj, best.point.clone(), remaining);
        evaluations += r.evaluations;
        if r.value <= best.value {
            r
        } else {
            best
        }
    } else {
        best
    };
    best_so_far.push(refined.value);

    SearchOutcome {
        point: refined.point,
        value: refined.value,
        evaluations,
        restarts_used,
        converged: refined.converged,
        restart_values,
        best_so_far,
    }
}

/// Pads an isometry with zero rows up to `rows`.
pub fn pad_rows(v: &CMatrix, rows: usize) -> CMatrix {
    let mut out = CMatrix::zeros(rows.max(v.nrows()), v.ncols());
    out.view_mut((0, 0), v.shape()).copy_from(v);
    out
}
