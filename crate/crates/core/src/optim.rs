//! Descent driver shared by every nonconvex search in the crate.
//!
//! Problems expose a smoothed objective (see [`crate::smooth`]) with its
//! gradient and the exact objective at the same point. The driver runs
//! limited-memory BFGS with Armijo backtracking on the smoothed objective
//! over an increasing sharpness schedule, and returns the visited state with
//! the smallest *exact* value. Maximization problems negate their objective.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::matrix::{ComplexMatrix, C64};

/// Sharpness levels of the continuation schedule.
pub const SCHEDULE: [f64; 5] = [16.0, 128.0, 1024.0, 8192.0, 65536.0];

const MEMORY: usize = 8;
const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-18;
const STALL_ITERS: usize = 3;

pub struct Evaluation {
    pub smooth: f64,
    pub exact: f64,
    pub grad: Vec<ComplexMatrix>,
}

pub trait Objective {
    type State: Clone;

    fn eval(&self, state: &Self::State, sharpness: f64) -> Evaluation;

    /// Move from `state` by `step · dir` in the problem's chart.
    fn retract(&self, state: &Self::State, dir: &[ComplexMatrix], step: f64) -> Self::State;
}

pub struct Outcome<S> {
    pub best: S,
    pub best_value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn dot(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.inner(y).re).sum()
}

fn combo(a: &[ComplexMatrix], alpha: f64, b: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let mut z = x.clone();
            z.axpy(C64::new(alpha, 0.0), y);
            z
        })
        .collect()
}

fn negated(a: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    a.iter().map(|x| x.scale_real(-1.0)).collect()
}

/// Two-loop recursion: approximate `−H·g`.
fn lbfgs_direction(g: &[ComplexMatrix], mem: &VecDeque<(Vec<ComplexMatrix>, Vec<ComplexMatrix>, f64)>) -> Vec<ComplexMatrix> {
    let mut q: Vec<ComplexMatrix> = g.to_vec();
    let mut alphas = Vec::with_capacity(mem.len());
    for (s, y, rho) in mem.iter().rev() {
        let a = rho * dot(s, &q);
        q = combo(&q, -a, y);
        alphas.push(a);
    }
    if let Some((s, y, _)) = mem.back() {
        let gamma = dot(s, y) / dot(y, y);
        q = q.iter().map(|m| m.scale_real(gamma)).collect();
    }
    for ((s, y, rho), a) in mem.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        q = combo(&q, a - b, s);
    }
    negated(&q)
}

pub fn minimize<P: Objective>(problem: &P, start: P::State, iters: usize, tol: f64) -> Outcome<P::State> {
    let mut state = start;
    let mut best = state.clone();
    let mut best_value = f64::INFINITY;
    let mut used = 0usize;
    let mut converged = false;

    for (stage, &sharp) in SCHEDULE.iter().enumerate() {
        let stages_left = SCHEDULE.len() - stage;
        let stage_budget = ((iters - used) / stages_left).max(1).min(iters - used);
        if stage_budget == 0 {
            break;
        }
        let mut cur = problem.eval(&state, sharp);
        if cur.exact.is_finite() && cur.exact < best_value {
            best_value = cur.exact;
            best = state.clone();
        }
        let mut mem: VecDeque<(Vec<ComplexMatrix>, Vec<ComplexMatrix>, f64)> = VecDeque::new();
        let mut sd_step = 0.1 / libm::sqrt(dot(&cur.grad, &cur.grad)).max(1e-300);
        let mut stall = 0usize;
        let mut stage_done = false;
        let mut k = 0usize;
        while k < stage_budget {
            k += 1;
            let gnorm2 = dot(&cur.grad, &cur.grad);
            if gnorm2 <= 1e-30 * (1.0 + cur.smooth * cur.smooth) {
                stage_done = true;
                break;
            }
            let mut dir = lbfgs_direction(&cur.grad, &mem);
            let mut slope = dot(&cur.grad, &dir);
            let mut step = 1.0;
            if mem.is_empty() || slope >= 0.0 {
                mem.clear();
                dir = negated(&cur.grad);
                slope = -gnorm2;
                step = sd_step;
            }
            let mut accepted = None;
            while step > MIN_STEP {
                let trial = problem.retract(&state, &dir, step);
                let ev = problem.eval(&trial, sharp);
                if ev.exact.is_finite() && ev.exact < best_value {
                    best_value = ev.exact;
                    best = trial.clone();
                }
                if ev.smooth.is_finite() && ev.smooth <= cur.smooth + ARMIJO * step * slope {
                    accepted = Some((trial, ev));
                    break;
                }
                step *= 0.5;
            }
            let Some((next, ev)) = accepted else {
                if mem.is_empty() {
                    stage_done = true;
                    break;
                }
                mem.clear();
                continue;
            };
            if mem.is_empty() {
                sd_step = step * 2.0;
            }
            let s: Vec<ComplexMatrix> = dir.iter().map(|d| d.scale_real(step)).collect();
            let y = combo(&ev.grad, -1.0, &cur.grad);
            let sy = dot(&s, &y);
            if sy > 1e-16 * libm::sqrt(dot(&s, &s) * dot(&y, &y)) && sy > 0.0 {
                if mem.len() == MEMORY {
                    mem.pop_front();
                }
                mem.push_back((s, y, 1.0 / sy));
            }
            let decrease = cur.smooth - ev.smooth;
            state = next;
            cur = ev;
            if decrease <= tol * cur.smooth.abs().max(1.0) {
                stall += 1;
                if stall >= STALL_ITERS {
                    stage_done = true;
                    break;
                }
            } else {
                stall = 0;
            }
        }
        used += k;
        converged = stage_done;
        if used >= iters && stage + 1 < SCHEDULE.len() {
            converged = false;
            break;
        }
    }
    Outcome { best, best_value, iterations: used, converged }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::operator_norm;
    use crate::smooth::smooth_norm;

    /// min ‖A + t B‖ over complex t: a small convex nonsmooth problem.
    struct Pencil {
        a: ComplexMatrix,
        b: ComplexMatrix,
    }

    impl Objective for Pencil {
        type State = C64;
        fn eval(&self, t: &C64, sharp: f64) -> Evaluation {
            let mut m = self.a.clone();
            m.axpy(*t, &self.b);
            let s = smooth_norm(&m, sharp);
            let g = self.b.inner(&s.grad);
            Evaluation { smooth: s.value, exact: s.exact, grad: alloc::vec![ComplexMatrix::from_fn(1, 1, |_, _| g)] }
        }
        fn retract(&self, t: &C64, dir: &[ComplexMatrix], step: f64) -> C64 {
            *t + dir[0][(0, 0)] * step
        }
    }

    #[test]
    fn pencil_minimum_matches_grid_search() {
        let a = ComplexMatrix::diag_real(&[2.0, -1.0]);
        let b = ComplexMatrix::identity(2);
        // min_t max(|2+t|, |-1+t|) = 1.5 at t = -0.5
        let out = minimize(&Pencil { a: a.clone(), b: b.clone() }, C64::new(3.0, 1.0), 400, 1e-12);
        assert!((out.best_value - 1.5).abs() < 1e-4, "{}", out.best_value);
        let mut m = a;
        m.axpy(out.best, &b);
        assert!((operator_norm(&m) - out.best_value).abs() < 1e-12);
    }
}
