//! Bounded revised primal/dual simplex over a factored basis.
//!
//! Every row `a_i x (<=,=,>=) b_i` gets a slack `s_i` with `a_i x + s_i = b_i`
//! whose bounds encode the sense. Phase one adds one artificial column per
//! infeasible row. The solver keeps its basis between calls so branch and
//! bound can change variable bounds and re-optimize with the dual simplex.

use super::factor::Factor;
use super::model::{LinearProgram, Sense};
use crate::scalar::Scalar;

const NOT_BASIC: usize = usize::MAX;
const REFACTOR_EVERY: usize = 60;
const DEGENERATE_STREAK: usize = 40;
const PERTURBATION: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum ColState {
    Basic,
    Lower,
    Upper,
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Outcome {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

/// Basis snapshot used to warm start a later solve.
#[derive(Clone, Debug)]
pub(crate) struct Basis {
    basis: Vec<usize>,
    state: Vec<ColState>,
}

#[derive(Clone, Debug)]
pub(crate) struct Simplex<S> {
    m: usize,
    n: usize,
    cols: Vec<Vec<(usize, S)>>,
    rhs: Vec<S>,
    art_sign: Vec<S>,
    lb: Vec<Option<S>>,
    ub: Vec<Option<S>>,
    obj: Vec<S>,
    basis: Vec<usize>,
    pos: Vec<usize>,
    state: Vec<ColState>,
    factor: Factor<S>,
    x: Vec<S>,
    pub(crate) iterations: usize,
    /// Iteration budget of a single `solve` or `reoptimize` call.
    pub(crate) max_iterations: usize,
    call_start: usize,
    saved_bounds: Option<(Vec<Option<S>>, Vec<Option<S>>)>,
    allow_perturb: bool,
    solved_once: bool,
}

enum Step<S> {
    Flip(S),
    Pivot { row: usize, t: S, to_upper: bool },
}

impl<S: Scalar> Simplex<S> {
    pub(crate) fn new(lp: &LinearProgram<S>) -> Self {
        let m = lp.num_rows();
        let n = lp.num_vars();
        let mut cols: Vec<Vec<(usize, S)>> = vec![Vec::new(); n];
        for (i, con) in lp.constraints.iter().enumerate() {
            for (v, a) in &con.coeffs {
                cols[v.0].push((i, a.clone()));
            }
        }
        let total = n + 2 * m;
        let mut lb = Vec::with_capacity(total);
        let mut ub = Vec::with_capacity(total);
        for v in &lp.vars {
            lb.push(v.lower.clone());
            ub.push(v.upper.clone());
        }
        for con in &lp.constraints {
            let (lo, hi) = match con.sense {
                Sense::Le => (Some(S::zero()), None),
                Sense::Ge => (None, Some(S::zero())),
                Sense::Eq => (Some(S::zero()), Some(S::zero())),
            };
            lb.push(lo);
            ub.push(hi);
        }
        for _ in 0..m {
            lb.push(Some(S::zero()));
            ub.push(Some(S::zero()));
        }
        let mut obj: Vec<S> = lp.objective.clone();
        obj.resize(total, S::zero());
        Self {
            m,
            n,
            cols,
            rhs: lp.constraints.iter().map(|c| c.rhs.clone()).collect(),
            art_sign: vec![S::one(); m],
            lb,
            ub,
            obj,
            basis: Vec::new(),
            pos: vec![NOT_BASIC; total],
            state: vec![ColState::Lower; total],
            factor: Factor::default(),
            x: vec![S::zero(); total],
            iterations: 0,
            max_iterations: 20_000 + 50 * (n + m),
            call_start: 0,
            saved_bounds: None,
            allow_perturb: true,
            solved_once: false,
        }
    }

    fn total(&self) -> usize {
        self.n + 2 * self.m
    }

    fn for_each_entry(&self, j: usize, mut f: impl FnMut(usize, &S)) {
        if j < self.n {
            for (i, a) in &self.cols[j] {
                f(*i, a);
            }
        } else if j < self.n + self.m {
            f(j - self.n, &S::one());
        } else {
            let i = j - self.n - self.m;
            f(i, &self.art_sign[i]);
        }
    }

    fn dot_col(&self, j: usize, v: &[S]) -> S {
        let mut acc = S::zero();
        self.for_each_entry(j, |i, a| acc = acc.clone() + a.clone() * v[i].clone());
        acc
    }

    fn ftran(&self, j: usize) -> Vec<S> {
        let mut a = vec![S::zero(); self.m];
        self.for_each_entry(j, |i, v| a[i] = v.clone());
        self.factor.ftran(&a)
    }

    fn btran(&self, costs: &[S]) -> Vec<S> {
        let c: Vec<S> = self.basis.iter().map(|&j| costs[j].clone()).collect();
        self.factor.btran(&c)
    }

    fn is_fixed(&self, j: usize) -> bool {
        matches!((&self.lb[j], &self.ub[j]), (Some(l), Some(u)) if l == u)
    }

    fn nonbasic_value(&self, j: usize) -> S {
        match self.state[j] {
            ColState::Lower => self.lb[j].clone().unwrap_or_else(S::zero),
            ColState::Upper => self.ub[j].clone().unwrap_or_else(S::zero),
            _ => S::zero(),
        }
    }

    /// Puts a nonbasic column on a bound compatible with its current bounds.
    fn place_nonbasic(&mut self, j: usize, prefer: ColState) {
        let st = match (prefer, &self.lb[j], &self.ub[j]) {
            (ColState::Upper, _, Some(_)) => ColState::Upper,
            (_, Some(_), _) => ColState::Lower,
            (_, None, Some(_)) => ColState::Upper,
            (_, None, None) => ColState::Free,
        };
        self.state[j] = st;
        self.pos[j] = NOT_BASIC;
        self.x[j] = self.nonbasic_value(j);
    }

    /// Refactors the basis and recomputes basic values.
    fn refactor(&mut self) -> bool {
        let cols: Vec<Vec<(usize, S)>> = self
            .basis
            .iter()
            .map(|&j| {
                let mut c = Vec::new();
                self.for_each_entry(j, |i, a| c.push((i, a.clone())));
                c
            })
            .collect();
        match Factor::new(self.m, &cols) {
            Some(f) => self.factor = f,
            None => return false,
        }
        self.recompute_basic_values();
        true
    }

    fn recompute_basic_values(&mut self) {
        let mut r = self.rhs.clone();
        for j in 0..self.total() {
            if self.state[j] == ColState::Basic {
                continue;
            }
            let xj = self.x[j].clone();
            if xj.is_zero() {
                continue;
            }
            self.for_each_entry(j, |i, a| r[i] = r[i].clone() - a.clone() * xj.clone());
        }
        let xb = self.factor.ftran(&r);
        for (i, v) in xb.into_iter().enumerate() {
            let j = self.basis[i];
            self.x[j] = v;
        }
    }

    fn pivot(&mut self, row: usize, entering: usize, alpha: &[S]) {
        self.factor.update(row, alpha);
        let leaving = self.basis[row];
        self.pos[leaving] = NOT_BASIC;
        self.basis[row] = entering;
        self.pos[entering] = row;
        self.state[entering] = ColState::Basic;
    }

    /// Cold start: phase one on artificials, then phase two on the objective.
    pub(crate) fn solve(&mut self) -> Outcome {
        self.call_start = self.iterations;
        let (n, m) = (self.n, self.m);
        for j in 0..n {
            self.place_nonbasic(j, ColState::Lower);
        }
        let mut resid = self.rhs.clone();
        for j in 0..n {
            let xj = self.x[j].clone();
            if !xj.is_zero() {
                for (i, a) in &self.cols[j] {
                    resid[*i] = resid[*i].clone() - a.clone() * xj.clone();
                }
            }
        }
        self.basis = vec![0; m];
        let mut phase1 = vec![S::zero(); self.total()];
        for i in 0..m {
            let slack = n + i;
            let art = n + m + i;
            let v = resid[i].clone();
            let below = matches!(&self.lb[slack], Some(l) if v < *l);
            let above = matches!(&self.ub[slack], Some(u) if v > *u);
            if !below && !above {
                self.basis[i] = slack;
                self.pos[slack] = i;
                self.state[slack] = ColState::Basic;
                self.x[slack] = v;
                self.lb[art] = Some(S::zero());
                self.ub[art] = Some(S::zero());
                self.place_nonbasic(art, ColState::Lower);
            } else {
                let bound = if below {
                    self.lb[slack].clone().unwrap()
                } else {
                    self.ub[slack].clone().unwrap()
                };
                self.place_nonbasic(slack, if below { ColState::Lower } else { ColState::Upper });
                let diff = v - bound;
                let sign = if diff.is_negative() { -S::one() } else { S::one() };
                self.art_sign[i] = sign.clone();
                self.lb[art] = Some(S::zero());
                self.ub[art] = None;
                self.basis[i] = art;
                self.pos[art] = i;
                self.state[art] = ColState::Basic;
                self.x[art] = diff.abs();
                phase1[art] = S::one();
            }
        }
        if !self.refactor() {
            return Outcome::IterationLimit;
        }
        self.solved_once = true;

        if phase1.iter().any(|c| !c.is_zero()) {
            let scale = self.rhs.iter().fold(S::one(), |acc, b| acc.max_of(b.abs()));
            let goal = if S::is_exact() { S::zero() } else { S::feas_tol() * scale.clone() };
            match self.primal(&phase1, Some(goal)) {
                Outcome::Optimal => {}
                Outcome::IterationLimit => return Outcome::IterationLimit,
                // phase one is bounded below by zero
                Outcome::Unbounded | Outcome::Infeasible => return Outcome::Infeasible,
            }
            let infeas = (n + m..self.total())
                .fold(S::zero(), |acc, j| acc.max_of(self.x[j].abs()));
            if infeas > S::feas_tol() * scale {
                return Outcome::Infeasible;
            }
            self.expel_artificials();
        }
        self.primal(&self.obj.clone(), None)
    }

    fn expel_artificials(&mut self) {
        let (n, m) = (self.n, self.m);
        for art in n + m..self.total() {
            self.lb[art] = Some(S::zero());
            self.ub[art] = Some(S::zero());
            if self.state[art] != ColState::Basic {
                self.place_nonbasic(art, ColState::Lower);
                continue;
            }
            let r = self.pos[art];
            let rho: Vec<S> = self.factor.row(r);
            let mut best: Option<(usize, S)> = None;
            for j in 0..n + m {
                if self.state[j] == ColState::Basic {
                    continue;
                }
                let a = self.dot_col(j, &rho).abs();
                if a > S::pivot_tol() && !a.is_zero() && best.as_ref().map_or(true, |(_, b)| a > *b) {
                    best = Some((j, a));
                }
            }
            if let Some((j, _)) = best {
                let alpha = self.ftran(j);
                self.pivot(r, j, &alpha);
                self.place_nonbasic(art, ColState::Lower);
            }
        }
        self.refactor();
    }

    fn reduced_cost(&self, j: usize, costs: &[S], y: &[S]) -> S {
        costs[j].clone() - self.dot_col(j, y)
    }

    /// Primal simplex; with `stop_at`, returns as soon as the objective over
    /// basic columns reaches that value (used by phase one). Bound
    /// perturbation applied against stalling is removed before returning.
    fn primal(&mut self, costs: &[S], stop_at: Option<S>) -> Outcome {
        let out = self.primal_pass(costs, stop_at.clone());
        if self.saved_bounds.is_none() {
            return out;
        }
        self.unperturb();
        if out != Outcome::Optimal {
            return out;
        }
        self.allow_perturb = false;
        let out = if self.is_primal_feasible() {
            self.primal_pass(costs, stop_at)
        } else {
            match self.dual(costs) {
                Outcome::Optimal => self.primal_pass(costs, stop_at),
                other => other,
            }
        };
        self.allow_perturb = true;
        out
    }

    /// Widens every bound by a small pseudo-random amount so that degenerate
    /// vertices split apart.
    fn perturb(&mut self) {
        self.saved_bounds = Some((self.lb.clone(), self.ub.clone()));
        let mut state = 0x9e37_79b9_7f4a_7c15_u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            0.5 + (state >> 11) as f64 / (1u64 << 53) as f64 * 0.5
        };
        // Bounds that nonbasic columns sit on stay put, so the point is unchanged.
        for j in 0..self.n + self.m {
            let st = self.state[j];
            if let Some(l) = &self.lb[j] {
                if st != ColState::Lower {
                    let d = S::from_f64(PERTURBATION * next()) * (S::one() + l.abs());
                    self.lb[j] = Some(l.clone() - d);
                }
            }
            if let Some(u) = &self.ub[j] {
                if st != ColState::Upper {
                    let d = S::from_f64(PERTURBATION * next()) * (S::one() + u.abs());
                    self.ub[j] = Some(u.clone() + d);
                }
            }
        }
    }

    /// Drift beyond the tolerance would block every ratio test; such bounds
    /// are moved out to the current value until the pass ends.
    fn shift_violated_bounds(&mut self) {
        let tol = S::feas_tol();
        for i in 0..self.m {
            let j = self.basis[i];
            if self.primal_infeasibility(j) <= tol {
                continue;
            }
            if self.saved_bounds.is_none() {
                self.saved_bounds = Some((self.lb.clone(), self.ub.clone()));
            }
            let x = self.x[j].clone();
            if matches!(&self.lb[j], Some(l) if x < *l) {
                self.lb[j] = Some(x);
            } else {
                self.ub[j] = Some(x);
            }
        }
    }

    fn unperturb(&mut self) {
        if let Some((lb, ub)) = self.saved_bounds.take() {
            self.lb = lb;
            self.ub = ub;
            self.reposition();
        }
    }

    /// Moves nonbasic columns onto their current bounds and updates the basics.
    fn reposition(&mut self) {
        for j in 0..self.total() {
            if self.state[j] != ColState::Basic {
                let st = self.state[j];
                self.place_nonbasic(j, st);
            }
        }
        self.recompute_basic_values();
    }

    fn primal_pass(&mut self, costs: &[S], stop_at: Option<S>) -> Outcome {
        let tol = S::feas_tol();
        let mut degenerate = 0usize;
        let mut bland = false;
        loop {
            if self.iterations - self.call_start >= self.max_iterations {
                return Outcome::IterationLimit;
            }
            if self.factor.updates() >= REFACTOR_EVERY {
                if !self.refactor() {
                    return Outcome::IterationLimit;
                }
                if stop_at.is_none() && !S::is_exact() {
                    self.shift_violated_bounds();
                }
            }
            if let Some(goal) = &stop_at {
                let obj = self
                    .basis
                    .iter()
                    .fold(S::zero(), |acc, &j| acc + costs[j].clone() * self.x[j].clone());
                if obj <= *goal {
                    return Outcome::Optimal;
                }
            }
            let y = self.btran(costs);
            let mut entering: Option<(usize, S, bool)> = None;
            for j in 0..self.total() {
                let st = self.state[j];
                if st == ColState::Basic || self.is_fixed(j) {
                    continue;
                }
                let d = self.reduced_cost(j, costs, &y);
                let up = matches!(st, ColState::Lower | ColState::Free) && d < -tol.clone();
                let down = matches!(st, ColState::Upper | ColState::Free) && d > tol;
                if !(up || down) {
                    continue;
                }
                let mag = d.abs();
                let better = match &entering {
                    None => true,
                    Some((_, best, _)) => !bland && mag > *best,
                };
                if better {
                    entering = Some((j, mag, up));
                }
                if bland {
                    break;
                }
            }
            let Some((q, _, increase)) = entering else {
                return Outcome::Optimal;
            };
            let alpha = self.ftran(q);
            let step = match self.primal_ratio(q, increase, &alpha, bland) {
                Some(s) => s,
                None => return Outcome::Unbounded,
            };
            self.iterations += 1;
            let dir = if increase { S::one() } else { -S::one() };
            let t = match &step {
                Step::Flip(t) => t.clone(),
                Step::Pivot { t, .. } => t.clone(),
            };
            if t <= tol {
                degenerate += 1;
                if degenerate > DEGENERATE_STREAK {
                    let can_perturb = !S::is_exact()
                        && self.allow_perturb
                        && stop_at.is_none()
                        && self.saved_bounds.is_none();
                    if can_perturb {
                        self.perturb();
                        degenerate = 0;
                    } else {
                        bland = true;
                    }
                }
            } else {
                degenerate = 0;
                bland = false;
            }
            if !t.is_zero() {
                let delta = dir.clone() * t.clone();
                self.x[q] = self.x[q].clone() + delta.clone();
                for (i, a) in alpha.iter().enumerate() {
                    if !a.is_zero() {
                        let j = self.basis[i];
                        self.x[j] = self.x[j].clone() - a.clone() * delta.clone();
                    }
                }
            }
            match step {
                Step::Flip(_) => {
                    let st = if increase { ColState::Upper } else { ColState::Lower };
                    self.state[q] = st;
                    self.x[q] = self.nonbasic_value(q);
                }
                Step::Pivot { row, to_upper, .. } => {
                    let leaving = self.basis[row];
                    self.pivot(row, q, &alpha);
                    self.state[leaving] = if to_upper { ColState::Upper } else { ColState::Lower };
                    self.x[leaving] = self.nonbasic_value(leaving);
                }
            }
        }
    }

    fn primal_ratio(&self, q: usize, increase: bool, alpha: &[S], bland: bool) -> Option<Step<S>> {
        let tol = S::feas_tol();
        let ptol = S::pivot_tol();
        let flip = match (&self.lb[q], &self.ub[q]) {
            (Some(l), Some(u)) => Some(u.clone() - l.clone()),
            _ => None,
        };
        // Harris pass one: loosest step that keeps every basic within tolerance.
        let mut relaxed: Option<S> = None;
        for (i, a) in alpha.iter().enumerate() {
            if a.abs() <= ptol || a.is_zero() {
                continue;
            }
            let rate = if increase { -a.clone() } else { a.clone() };
            let j = self.basis[i];
            let lim = if rate.is_negative() {
                self.lb[j]
                    .as_ref()
                    .map(|l| (self.x[j].clone() - l.clone() + tol.clone()) / (-rate.clone()))
            } else {
                self.ub[j]
                    .as_ref()
                    .map(|u| (u.clone() - self.x[j].clone() + tol.clone()) / rate.clone())
            };
            if let Some(lim) = lim {
                relaxed = Some(match relaxed {
                    None => lim,
                    Some(r) => r.min_of(lim),
                });
            }
        }
        let Some(mut relaxed) = relaxed else {
            return flip.map(Step::Flip);
        };
        if bland {
            // Exact minimum ratio: Bland's rule needs it to stay finite.
            relaxed = self.exact_min_ratio(increase, alpha);
        }
        if let Some(f) = &flip {
            if *f <= relaxed {
                return Some(Step::Flip(f.clone()));
            }
        }
        // Pass two: among rows whose exact ratio fits, take the largest pivot.
        let mut chosen: Option<(usize, S, S, bool)> = None;
        for (i, a) in alpha.iter().enumerate() {
            if a.abs() <= ptol || a.is_zero() {
                continue;
            }
            let rate = if increase { -a.clone() } else { a.clone() };
            let j = self.basis[i];
            let (t, to_upper) = if rate.is_negative() {
                match &self.lb[j] {
                    Some(l) => ((self.x[j].clone() - l.clone()) / (-rate.clone()), false),
                    None => continue,
                }
            } else {
                match &self.ub[j] {
                    Some(u) => ((u.clone() - self.x[j].clone()) / rate.clone(), true),
                    None => continue,
                }
            };
            if t > relaxed {
                continue;
            }
            let t = t.max_of(S::zero());
            let mag = a.abs();
            let better = match &chosen {
                None => true,
                Some((ci, cmag, _, _)) => {
                    if bland {
                        self.basis[i] < self.basis[*ci]
                    } else {
                        mag > *cmag
                    }
                }
            };
            if better {
                chosen = Some((i, mag, t, to_upper));
            }
        }
        let (row, _, t, to_upper) = chosen?;
        // A fixed leaving variable always goes to its lower (== upper) state.
        let j = self.basis[row];
        let to_upper = to_upper && !self.is_fixed(j);
        Some(Step::Pivot { row, t, to_upper })
    }

    fn exact_min_ratio(&self, increase: bool, alpha: &[S]) -> S {
        let ptol = S::pivot_tol();
        let mut best: Option<S> = None;
        for (i, a) in alpha.iter().enumerate() {
            if a.abs() <= ptol || a.is_zero() {
                continue;
            }
            let rate = if increase { -a.clone() } else { a.clone() };
            let j = self.basis[i];
            let t = if rate.is_negative() {
                self.lb[j].as_ref().map(|l| (self.x[j].clone() - l.clone()) / (-rate.clone()))
            } else {
                self.ub[j].as_ref().map(|u| (u.clone() - self.x[j].clone()) / rate.clone())
            };
            if let Some(t) = t {
                let t = t.max_of(S::zero());
                best = Some(best.map_or(t.clone(), |b| b.min_of(t)));
            }
        }
        best.unwrap_or_else(S::zero)
    }

    fn primal_infeasibility(&self, j: usize) -> S {
        let x = &self.x[j];
        if let Some(l) = &self.lb[j] {
            if x < l {
                return l.clone() - x.clone();
            }
        }
        if let Some(u) = &self.ub[j] {
            if x > u {
                return x.clone() - u.clone();
            }
        }
        S::zero()
    }

    fn is_primal_feasible(&self) -> bool {
        let tol = S::feas_tol();
        self.basis.iter().all(|&j| self.primal_infeasibility(j) <= tol)
    }

    fn is_dual_feasible(&self, costs: &[S]) -> bool {
        let tol = S::feas_tol();
        let y = self.btran(costs);
        (0..self.total()).all(|j| {
            let st = self.state[j];
            if st == ColState::Basic || self.is_fixed(j) {
                return true;
            }
            let d = self.reduced_cost(j, costs, &y);
            match st {
                ColState::Lower => d >= -tol.clone(),
                ColState::Upper => d <= tol.clone(),
                ColState::Free => d.abs() <= tol.clone(),
                ColState::Basic => true,
            }
        })
    }

    fn dual(&mut self, costs: &[S]) -> Outcome {
        let tol = S::feas_tol();
        let ptol = S::pivot_tol();
        let m = self.m;
        let mut stall = 0usize;
        let mut bland = false;
        loop {
            if self.iterations - self.call_start >= self.max_iterations {
                return Outcome::IterationLimit;
            }
            if self.factor.updates() >= REFACTOR_EVERY && !self.refactor() {
                return Outcome::IterationLimit;
            }
            let mut leave: Option<(usize, S)> = None;
            for i in 0..m {
                let j = self.basis[i];
                let v = self.primal_infeasibility(j);
                if v <= tol {
                    continue;
                }
                let better = match &leave {
                    None => true,
                    Some((bi, bv)) => {
                        if bland {
                            j < self.basis[*bi]
                        } else {
                            v > *bv
                        }
                    }
                };
                if better {
                    leave = Some((i, v));
                }
            }
            let Some((r, _)) = leave else {
                return Outcome::Optimal;
            };
            let lj = self.basis[r];
            let to_lower = matches!(&self.lb[lj], Some(l) if self.x[lj] < *l);
            let target = if to_lower {
                self.lb[lj].clone().unwrap()
            } else {
                self.ub[lj].clone().unwrap()
            };
            let y = self.btran(costs);
            let rho: Vec<S> = self.factor.row(r);
            // candidates: (column, |alpha_rj|, ratio)
            let mut cands: Vec<(usize, S, S)> = Vec::new();
            for j in 0..self.total() {
                let st = self.state[j];
                if st == ColState::Basic || self.is_fixed(j) {
                    continue;
                }
                let a = self.dot_col(j, &rho);
                if a.abs() <= ptol || a.is_zero() {
                    continue;
                }
                let inc_ok = matches!(st, ColState::Lower | ColState::Free);
                let dec_ok = matches!(st, ColState::Upper | ColState::Free);
                let eligible = if to_lower {
                    (inc_ok && a.is_negative()) || (dec_ok && a.is_positive())
                } else {
                    (inc_ok && a.is_positive()) || (dec_ok && a.is_negative())
                };
                if !eligible {
                    continue;
                }
                let d = self.reduced_cost(j, costs, &y);
                let ratio = d.abs() / a.abs();
                cands.push((j, a.abs(), ratio));
            }
            if cands.is_empty() {
                return Outcome::Infeasible;
            }
            let min_ratio = cands
                .iter()
                .map(|c| c.2.clone())
                .fold(None, |acc: Option<S>, r| Some(acc.map_or(r.clone(), |a| a.min_of(r))))
                .unwrap();
            let bound = min_ratio.clone() + tol.clone();
            let mut pick: Option<&(usize, S, S)> = None;
            for c in &cands {
                if c.2 > bound {
                    continue;
                }
                let better = match pick {
                    None => true,
                    Some(p) => {
                        if bland {
                            c.0 < p.0
                        } else {
                            c.1 > p.1
                        }
                    }
                };
                if better {
                    pick = Some(c);
                }
            }
            let q = pick.unwrap().0;
            let alpha = self.ftran(q);
            let delta = (self.x[lj].clone() - target.clone()) / alpha[r].clone();
            self.iterations += 1;
            if min_ratio <= tol {
                stall += 1;
                if stall > DEGENERATE_STREAK {
                    bland = true;
                }
            } else {
                stall = 0;
                bland = false;
            }
            self.x[q] = self.x[q].clone() + delta.clone();
            for (i, a) in alpha.iter().enumerate() {
                if !a.is_zero() {
                    let j = self.basis[i];
                    self.x[j] = self.x[j].clone() - a.clone() * delta.clone();
                }
            }
            self.pivot(r, q, &alpha);
            self.state[lj] = if to_lower || self.is_fixed(lj) {
                ColState::Lower
            } else {
                ColState::Upper
            };
            self.x[lj] = target;
        }
    }

    /// Changes the bounds of a structural variable without re-solving.
    pub(crate) fn set_bounds(&mut self, j: usize, lower: Option<S>, upper: Option<S>) {
        self.lb[j] = lower;
        self.ub[j] = upper;
        if self.state[j] != ColState::Basic {
            let prefer = self.state[j];
            self.place_nonbasic(j, prefer);
        }
    }

    pub(crate) fn bounds(&self, j: usize) -> (Option<S>, Option<S>) {
        (self.lb[j].clone(), self.ub[j].clone())
    }

    /// Re-solves after bound changes, reusing the current basis when possible.
    pub(crate) fn reoptimize(&mut self) -> Outcome {
        if !self.solved_once {
            return self.solve();
        }
        self.call_start = self.iterations;
        for j in 0..self.total() {
            if self.state[j] != ColState::Basic {
                let st = self.state[j];
                self.place_nonbasic(j, st);
            }
        }
        self.recompute_basic_values();
        let costs = self.obj.clone();
        if self.is_primal_feasible() {
            return self.primal(&costs, None);
        }
        if self.is_dual_feasible(&costs) {
            return match self.dual(&costs) {
                Outcome::Optimal => self.primal(&costs, None),
                other => other,
            };
        }
        self.solve()
    }

    pub(crate) fn snapshot(&self) -> Basis {
        Basis {
            basis: self.basis.clone(),
            state: self.state.clone(),
        }
    }

    /// Installs a stored basis and refactors; false if it is singular.
    pub(crate) fn load(&mut self, b: &Basis) -> bool {
        self.basis = b.basis.clone();
        self.state = b.state.clone();
        self.pos = vec![NOT_BASIC; self.total()];
        for (i, &j) in self.basis.iter().enumerate() {
            self.pos[j] = i;
        }
        for j in 0..self.total() {
            if self.state[j] != ColState::Basic {
                let st = self.state[j];
                self.place_nonbasic(j, st);
            }
        }
        self.solved_once = self.refactor();
        self.solved_once
    }

    pub(crate) fn values(&self) -> Vec<S> {
        self.x[..self.n].to_vec()
    }

    pub(crate) fn objective(&self) -> S {
        (0..self.n).fold(S::zero(), |acc, j| acc + self.obj[j].clone() * self.x[j].clone())
    }

    pub(crate) fn duals(&self) -> Vec<S> {
        self.btran(&self.obj)
    }
}
