//! Dense two-phase tableau simplex with Bland's rule, and exhaustive 0/1
//! enumeration. Both are deliberately naive.

use divcode::lp::{LinearProgram, Sense};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

struct Tableau {
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        for i in 0..self.t.len() {
            if i != r {
                let f = self.t[i][c];
                if f != 0.0 {
                    for j in 0..=self.cols {
                        self.t[i][j] -= f * self.t[r][j];
                    }
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost` over columns allowed by `usable`; false when unbounded.
    fn optimize(&mut self, cost: &[f64], usable: &dyn Fn(usize) -> bool) -> bool {
        loop {
            let reduced = |j: usize| -> f64 {
                cost[j] - (0..self.t.len()).map(|i| cost[self.basis[i]] * self.t[i][j]).sum::<f64>()
            };
            let Some(enter) = (0..self.cols).find(|&j| usable(j) && !self.basis.contains(&j) && reduced(j) < -EPS) else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.t.len() {
                let a = self.t[i][enter];
                if a > EPS {
                    let ratio = self.t[i][self.cols] / a;
                    let better = match leave {
                        None => true,
                        Some((l, best)) => ratio < best - EPS || (ratio < best + EPS && self.basis[i] < self.basis[l]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return false,
            }
        }
    }

    fn value(&self, cost: &[f64]) -> f64 {
        (0..self.t.len()).map(|i| cost[self.basis[i]] * self.t[i][self.cols]).sum()
    }
}

/// Solves `min c x` over `x >= 0` for a program whose variables all have
/// lower bound 0 and no upper bound.
pub fn textbook_simplex(lp: &LinearProgram<f64>) -> Outcome {
    let n = lp.num_vars();
    let m = lp.num_rows();
    let slacks = lp.constraints.iter().filter(|c| c.sense != Sense::Eq).count();
    let cols = n + slacks + m;
    let mut t = vec![vec![0.0; cols + 1]; m];
    let mut basis = vec![0; m];
    let mut next_slack = n;
    for (i, row) in lp.constraints.iter().enumerate() {
        for (v, a) in &row.coeffs {
            t[i][v.0] += a;
        }
        match row.sense {
            Sense::Le => {
                t[i][next_slack] = 1.0;
                next_slack += 1;
            }
            Sense::Ge => {
                t[i][next_slack] = -1.0;
                next_slack += 1;
            }
            Sense::Eq => {}
        }
        t[i][cols] = row.rhs;
        if row.rhs < 0.0 {
            for v in t[i].iter_mut() {
                *v = -*v;
            }
        }
        // One artificial per row keeps the start trivially feasible.
        t[i][n + slacks + i] = 1.0;
        basis[i] = n + slacks + i;
    }
    let mut tab = Tableau { t, basis, cols };
    let artificial = |j: usize| j >= n + slacks;
    let phase1: Vec<f64> = (0..cols).map(|j| if artificial(j) { 1.0 } else { 0.0 }).collect();
    tab.optimize(&phase1, &|_| true);
    if tab.value(&phase1) > 1e-7 {
        return Outcome::Infeasible;
    }
    // Drive zero artificials out of the basis where possible.
    for r in 0..m {
        if artificial(tab.basis[r]) {
            if let Some(c) = (0..n + slacks).find(|&j| tab.t[r][j].abs() > EPS) {
                tab.pivot(r, c);
            }
        }
    }
    let mut cost = vec![0.0; cols];
    cost[..n].copy_from_slice(&lp.objective);
    if !tab.optimize(&cost, &|j| !artificial(j)) {
        return Outcome::Unbounded;
    }
    Outcome::Optimal(tab.value(&cost))
}

/// Best objective over all 0/1 points, or `None` when none is feasible.
pub fn enumerate_binary(lp: &LinearProgram<f64>) -> Option<f64> {
    let n = lp.num_vars();
    assert!(n <= 20);
    let mut best: Option<f64> = None;
    let mut x = vec![0.0; n];
    for mask in 0u32..(1 << n) {
        for (j, v) in x.iter_mut().enumerate() {
            *v = ((mask >> j) & 1) as f64;
        }
        let feasible = lp.constraints.iter().all(|row| {
            let act: f64 = row.coeffs.iter().map(|(v, a)| a * x[v.0]).sum();
            match row.sense {
                Sense::Le => act <= row.rhs + 1e-9,
                Sense::Ge => act >= row.rhs - 1e-9,
                Sense::Eq => (act - row.rhs).abs() <= 1e-9,
            }
        });
        if feasible {
            let obj: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
            if best.map_or(true, |b| obj < b) {
                best = Some(obj);
            }
        }
    }
    best
}

/// Dense program with up to `max_n` variables and `max_m` rows that is
/// feasible by construction; it may be unbounded.
pub fn random_lp(rng: &mut ChaCha8Rng, max_n: usize, max_m: usize) -> LinearProgram<f64> {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(1..=max_m);
    let mut lp = LinearProgram::new();
    let vars: Vec<_> = (0..n).map(|j| lp.add_continuous(format!("x{j}"), 0.0, None)).collect();
    for &v in &vars {
        lp.set_objective(v, rng.gen_range(-5..=9) as f64);
    }
    let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(0..=3) as f64).collect();
    for i in 0..m {
        let coeffs: Vec<_> = vars.iter().map(|&v| (v, rng.gen_range(-5..=5) as f64)).collect();
        let act: f64 = coeffs.iter().map(|(v, a)| a * x0[v.0]).sum();
        let slack = rng.gen_range(0..=3) as f64;
        let (sense, rhs) = match rng.gen_range(0..4) {
            0 => (Sense::Eq, act),
            1 => (Sense::Ge, act - slack),
            _ => (Sense::Le, act + slack),
        };
        lp.add_constraint(format!("r{i}"), coeffs, sense, rhs);
    }
    lp
}

/// Binary program with `n` variables and a few knapsack and cover rows.
pub fn random_binary_program(rng: &mut ChaCha8Rng, n: usize) -> LinearProgram<f64> {
    let mut lp = LinearProgram::new();
    let vars: Vec<_> = (0..n).map(|j| lp.add_binary(format!("b{j}"))).collect();
    for &v in &vars {
        lp.set_objective(v, rng.gen_range(-9..=9) as f64);
    }
    for i in 0..rng.gen_range(1..=4) {
        let coeffs: Vec<_> = vars
            .iter()
            .filter_map(|&v| rng.gen_bool(0.6).then(|| (v, rng.gen_range(1..=6) as f64)))
            .collect();
        if coeffs.is_empty() {
            continue;
        }
        let total: f64 = coeffs.iter().map(|(_, a)| a).sum();
        if rng.gen_bool(0.7) {
            lp.add_constraint(format!("k{i}"), coeffs, Sense::Le, (total / 2.0).floor());
        } else {
            lp.add_constraint(format!("c{i}"), coeffs, Sense::Ge, (total / 3.0).ceil());
        }
    }
    lp
}
