//! Best-first branch and bound over LP relaxations.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use super::model::{LinearProgram, SolveResult, Status, VarId};
use super::simplex::{Basis, Outcome, Simplex};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug)]
pub struct MipLimits {
    pub max_nodes: usize,
    pub time_limit: Duration,
}

impl Default for MipLimits {
    fn default() -> Self {
        Self {
            max_nodes: 1_000_000,
            time_limit: Duration::from_secs(600),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MipOptions<S> {
    pub limits: MipLimits,
    /// Only solutions strictly below this objective are of interest.
    pub cutoff: Option<S>,
    /// A known feasible point used as the starting incumbent.
    pub incumbent: Option<Vec<S>>,
}

impl<S> Default for MipOptions<S> {
    fn default() -> Self {
        Self {
            limits: MipLimits::default(),
            cutoff: None,
            incumbent: None,
        }
    }
}

struct Node<S> {
    id: usize,
    parent: usize,
    depth: usize,
    bound: S,
    changes: Vec<(usize, Option<S>, Option<S>)>,
    basis: Basis,
}

struct Ranked<S>(Node<S>);

impl<S: Scalar> PartialEq for Ranked<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<S: Scalar> Eq for Ranked<S> {}
impl<S: Scalar> PartialOrd for Ranked<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<S: Scalar> Ord for Ranked<S> {
    // BinaryHeap is a max-heap: the smallest bound must compare greatest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .bound
            .partial_cmp(&self.0.bound)
            .unwrap_or(Ordering::Equal)
            .then(self.0.depth.cmp(&other.0.depth))
            .then(other.0.id.cmp(&self.0.id))
    }
}

fn prune_gap<S: Scalar>(incumbent: &S) -> S {
    if S::is_exact() {
        S::zero()
    } else {
        S::feas_tol() * incumbent.abs().max_of(S::one())
    }
}

/// True when no point with objective at least `bound` can beat `threshold`.
fn dominated<S: Scalar>(bound: &S, threshold: &S, integral: bool) -> bool {
    let gap = prune_gap(threshold);
    if integral {
        // The best reachable value is ceil(bound); it must be below threshold.
        let best = (bound.clone() - gap.clone()).ceil();
        best >= threshold.clone() - gap
    } else {
        *bound >= threshold.clone() - gap
    }
}

/// Most fractional integer variable among the highest priority class; ties
/// go to the lowest index.
fn branching_var<S: Scalar>(lp: &LinearProgram<S>, x: &[S]) -> Option<usize> {
    let tol = S::int_tol();
    let mut best: Option<(usize, u8, S)> = None;
    for (j, var) in lp.vars.iter().enumerate() {
        if !lp.is_integer(VarId(j)) {
            continue;
        }
        let f = x[j].fractionality();
        if f <= tol {
            continue;
        }
        let better = match &best {
            None => true,
            Some((_, p, b)) => var.priority > *p || (var.priority == *p && f > *b),
        };
        if better {
            best = Some((j, var.priority, f));
        }
    }
    best.map(|(j, _, _)| j)
}

fn snap_integers<S: Scalar>(lp: &LinearProgram<S>, x: &[S]) -> Vec<S> {
    x.iter()
        .enumerate()
        .map(|(j, v)| {
            if lp.is_integer(VarId(j)) {
                v.round()
            } else {
                v.clone()
            }
        })
        .collect()
}

fn is_feasible_point<S: Scalar>(lp: &LinearProgram<S>, x: &[S]) -> bool {
    let tol = S::feas_tol();
    let integral = (0..lp.num_vars())
        .filter(|&j| lp.is_integer(VarId(j)))
        .all(|j| x[j].fractionality() <= S::int_tol());
    integral && lp.max_violation(x) <= tol
}

/// Cheap rounding attempts on the root relaxation.
fn round_heuristic<S: Scalar>(lp: &LinearProgram<S>, x: &[S]) -> Option<Vec<S>> {
    let nearest = snap_integers(lp, x);
    if is_feasible_point(lp, &nearest) {
        return Some(nearest);
    }
    for up in [true, false] {
        let cand: Vec<S> = x
            .iter()
            .enumerate()
            .map(|(j, v)| {
                if !lp.is_integer(VarId(j)) || v.fractionality() <= S::int_tol() {
                    if lp.is_integer(VarId(j)) {
                        v.round()
                    } else {
                        v.clone()
                    }
                } else if up {
                    v.ceil()
                } else {
                    v.floor()
                }
            })
            .collect();
        if is_feasible_point(lp, &cand) {
            return Some(cand);
        }
    }
    None
}

pub fn solve_mip<S: Scalar>(lp: &LinearProgram<S>, opts: &MipOptions<S>) -> SolveResult<S> {
    let start = Instant::now();
    let mut solver = Simplex::new(lp);
    let mut nodes = 0usize;
    let integral = lp.has_integral_objective();
    // Bound of the best subtree abandoned at a simplex limit.
    let mut lost_bound: Option<S> = None;

    let mut best: Option<(S, Vec<S>)> = None;
    if let Some(x) = &opts.incumbent {
        if x.len() == lp.num_vars() && is_feasible_point(lp, x) {
            let x = snap_integers(lp, x);
            best = Some((lp.objective_value(&x), x));
        }
    }
    let threshold = |best: &Option<(S, Vec<S>)>| -> Option<S> {
        let inc = best.as_ref().map(|(v, _)| v.clone());
        match (inc, opts.cutoff.clone()) {
            (Some(a), Some(b)) => Some(a.min_of(b)),
            (a, b) => a.or(b),
        }
    };
    let finish = |status: Status, best: Option<(S, Vec<S>)>, bound: S, nodes: usize, iters: usize| {
        let elapsed = start.elapsed();
        match best {
            Some((obj, values)) => SolveResult {
                status,
                objective: obj,
                bound,
                values,
                duals: Vec::new(),
                nodes,
                iterations: iters,
                elapsed,
            },
            None => {
                let mut r = SolveResult::without_solution(status, elapsed);
                r.bound = bound;
                r.nodes = nodes;
                r.iterations = iters;
                r
            }
        }
    };

    match solver.solve() {
        Outcome::Optimal => {}
        Outcome::Infeasible => return finish(Status::Infeasible, None, S::zero(), 1, solver.iterations),
        Outcome::Unbounded => return finish(Status::Unbounded, None, S::zero(), 1, solver.iterations),
        Outcome::IterationLimit => return finish(Status::Limit, best, S::zero(), 1, solver.iterations),
    }
    nodes += 1;
    let root_x = solver.values();
    if best.is_none() {
        if let Some(x) = round_heuristic(lp, &root_x) {
            best = Some((lp.objective_value(&x), x));
        }
    }

    let original: Vec<(Option<S>, Option<S>)> = (0..lp.num_vars()).map(|j| solver.bounds(j)).collect();
    let mut heap: BinaryHeap<Ranked<S>> = BinaryHeap::new();
    let mut next_id = 1usize;
    let root = Node {
        id: 0,
        parent: usize::MAX,
        depth: 0,
        bound: solver.objective(),
        changes: Vec::new(),
        basis: solver.snapshot(),
    };
    // The root is already solved; route it through the common handler.
    let mut pending: Option<(Node<S>, Outcome)> = Some((root, Outcome::Optimal));
    let mut applied: Vec<usize> = Vec::new();
    let mut cached_id = 0usize;

    loop {
        let (node, outcome) = match pending.take() {
            Some(p) => p,
            None => {
                let Some(Ranked(node)) = heap.pop() else {
                    break;
                };
                if let Some(th) = threshold(&best) {
                    if dominated(&node.bound, &th, integral) {
                        continue;
                    }
                }
                if nodes >= opts.limits.max_nodes || start.elapsed() >= opts.limits.time_limit {
                    let open_bound = heap
                        .iter()
                        .map(|r| r.0.bound.clone())
                        .fold(node.bound.clone(), |a, b| a.min_of(b));
                    return finish(Status::Limit, best, open_bound, nodes, solver.iterations);
                }
                for &j in &applied {
                    let (lo, hi) = original[j].clone();
                    solver.set_bounds(j, lo, hi);
                }
                applied.clear();
                for (j, lo, hi) in &node.changes {
                    solver.set_bounds(*j, lo.clone(), hi.clone());
                    applied.push(*j);
                }
                let warm = node.parent == cached_id || solver.load(&node.basis);
                let outcome = if warm { solver.reoptimize() } else { solver.solve() };
                nodes += 1;
                (node, outcome)
            }
        };
        cached_id = node.id;
        match outcome {
            Outcome::Optimal => {}
            Outcome::Infeasible => continue,
            Outcome::Unbounded => {
                return finish(Status::Unbounded, best, S::zero(), nodes, solver.iterations)
            }
            Outcome::IterationLimit => {
                log::warn!("simplex iteration limit in branch-and-bound node {}", node.id);
                lost_bound = Some(lost_bound.map_or(node.bound.clone(), |b: S| b.min_of(node.bound.clone())));
                continue;
            }
        }
        let bound = solver.objective();
        if let Some(th) = threshold(&best) {
            if dominated(&bound, &th, integral) {
                continue;
            }
        }
        let x = solver.values();
        match branching_var(lp, &x) {
            None => {
                let x = snap_integers(lp, &x);
                let obj = lp.objective_value(&x);
                if best.as_ref().map_or(true, |(b, _)| obj < *b) {
                    best = Some((obj, x));
                }
            }
            Some(j) => {
                let v = x[j].clone();
                let basis = solver.snapshot();
                let (lo, hi) = solver.bounds(j);
                let down_hi = v.floor();
                let up_lo = v.ceil();
                for (clo, chi) in [(lo.clone(), Some(down_hi)), (Some(up_lo), hi.clone())] {
                    if let (Some(a), Some(b)) = (&clo, &chi) {
                        if a > b {
                            continue;
                        }
                    }
                    let mut changes = node.changes.clone();
                    changes.retain(|(k, _, _)| *k != j);
                    changes.push((j, clo, chi));
                    heap.push(Ranked(Node {
                        id: next_id,
                        parent: node.id,
                        depth: node.depth + 1,
                        bound: bound.clone(),
                        changes,
                        basis: basis.clone(),
                    }));
                    next_id += 1;
                }
            }
        }
    }

    match (best, lost_bound) {
        (Some((obj, x)), None) => {
            let b = obj.clone();
            finish(Status::Optimal, Some((obj, x)), b, nodes, solver.iterations)
        }
        (Some((obj, x)), Some(lost)) => {
            let b = lost.min_of(obj.clone());
            finish(Status::Limit, Some((obj, x)), b, nodes, solver.iterations)
        }
        (None, None) => finish(Status::Infeasible, None, S::zero(), nodes, solver.iterations),
        (None, Some(lost)) => finish(Status::Limit, None, lost, nodes, solver.iterations),
    }
}
