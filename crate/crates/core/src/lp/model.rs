use std::time::Duration;

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RowId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Integer,
    Binary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

/// A decision variable. `None` bounds are infinite.
#[derive(Clone, Debug)]
pub struct Variable<S> {
    pub name: String,
    pub lower: Option<S>,
    pub upper: Option<S>,
    pub kind: VarKind,
    /// Branch-and-bound branches on higher priorities first.
    pub priority: u8,
}

#[derive(Clone, Debug)]
pub struct Constraint<S> {
    pub name: String,
    pub coeffs: Vec<(VarId, S)>,
    pub sense: Sense,
    pub rhs: S,
}

/// A minimization program over bounded variables and sparse rows.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram<S> {
    pub vars: Vec<Variable<S>>,
    pub objective: Vec<S>,
    pub constraints: Vec<Constraint<S>>,
}

impl<S: Scalar> LinearProgram<S> {
    pub fn new() -> Self {
        Self {
            vars: Vec::new(),
            objective: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_rows(&self) -> usize {
        self.constraints.len()
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lower: Option<S>,
        upper: Option<S>,
        kind: VarKind,
    ) -> VarId {
        let (lower, upper) = match kind {
            VarKind::Binary => (Some(S::zero()), Some(S::one())),
            _ => (lower, upper),
        };
        self.vars.push(Variable {
            name: name.into(),
            lower,
            upper,
            kind,
            priority: 0,
        });
        self.objective.push(S::zero());
        VarId(self.vars.len() - 1)
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lower: S, upper: Option<S>) -> VarId {
        self.add_var(name, Some(lower), upper, VarKind::Continuous)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> VarId {
        self.add_var(name, None, None, VarKind::Binary)
    }

    pub fn add_integer(&mut self, name: impl Into<String>, lower: S, upper: Option<S>) -> VarId {
        self.add_var(name, Some(lower), upper, VarKind::Integer)
    }

    pub fn set_objective(&mut self, var: VarId, coeff: S) {
        self.objective[var.0] = coeff;
    }

    pub fn add_objective(&mut self, var: VarId, coeff: S) {
        let c = self.objective[var.0].clone() + coeff;
        self.objective[var.0] = c;
    }

    /// Adds a row; repeated variables in `coeffs` are merged and zeros dropped.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        coeffs: impl IntoIterator<Item = (VarId, S)>,
        sense: Sense,
        rhs: S,
    ) -> RowId {
        let mut merged: Vec<(VarId, S)> = Vec::new();
        for (v, c) in coeffs {
            assert!(v.0 < self.vars.len(), "constraint references unknown variable");
            match merged.iter_mut().find(|(w, _)| *w == v) {
                Some(entry) => entry.1 = entry.1.clone() + c,
                None => merged.push((v, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        self.constraints.push(Constraint {
            name: name.into(),
            coeffs: merged,
            sense,
            rhs,
        });
        RowId(self.constraints.len() - 1)
    }

    pub fn set_bounds(&mut self, var: VarId, lower: Option<S>, upper: Option<S>) {
        self.vars[var.0].lower = lower;
        self.vars[var.0].upper = upper;
    }

    pub fn set_priority(&mut self, var: VarId, priority: u8) {
        self.vars[var.0].priority = priority;
    }

    /// True when every feasible point has an integral objective value.
    pub fn has_integral_objective(&self) -> bool {
        self.vars.iter().zip(&self.objective).all(|(v, c)| {
            c.is_zero() || (v.kind != VarKind::Continuous && c.fractionality().is_zero())
        })
    }

    pub fn is_integer(&self, var: VarId) -> bool {
        !matches!(self.vars[var.0].kind, VarKind::Continuous)
    }

    pub fn has_integers(&self) -> bool {
        self.vars.iter().any(|v| v.kind != VarKind::Continuous)
    }

    pub fn objective_value(&self, values: &[S]) -> S {
        self.objective
            .iter()
            .zip(values)
            .fold(S::zero(), |acc, (c, x)| acc + c.clone() * x.clone())
    }

    pub fn row_activity(&self, row: RowId, values: &[S]) -> S {
        self.constraints[row.0]
            .coeffs
            .iter()
            .fold(S::zero(), |acc, (v, c)| acc + c.clone() * values[v.0].clone())
    }

    /// Largest bound or row violation of `values`.
    pub fn max_violation(&self, values: &[S]) -> S {
        let mut worst = S::zero();
        for (var, x) in self.vars.iter().zip(values) {
            if let Some(lo) = &var.lower {
                worst = worst.max_of(lo.clone() - x.clone());
            }
            if let Some(hi) = &var.upper {
                worst = worst.max_of(x.clone() - hi.clone());
            }
        }
        for (i, con) in self.constraints.iter().enumerate() {
            let act = self.row_activity(RowId(i), values);
            let gap = match con.sense {
                Sense::Le => act - con.rhs.clone(),
                Sense::Ge => con.rhs.clone() - act,
                Sense::Eq => (act - con.rhs.clone()).abs(),
            };
            worst = worst.max_of(gap);
        }
        worst
    }

    pub fn validate(&self) -> Result<(), super::LpError> {
        for (j, v) in self.vars.iter().enumerate() {
            if let (Some(lo), Some(hi)) = (&v.lower, &v.upper) {
                if lo > hi {
                    return Err(super::LpError::InvalidBounds {
                        var: j,
                        name: v.name.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Converts every coefficient into another scalar type.
    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LinearProgram<T> {
        LinearProgram {
            vars: self
                .vars
                .iter()
                .map(|v| Variable {
                    name: v.name.clone(),
                    lower: v.lower.as_ref().map(&f),
                    upper: v.upper.as_ref().map(&f),
                    kind: v.kind,
                    priority: v.priority,
                })
                .collect(),
            objective: self.objective.iter().map(&f).collect(),
            constraints: self
                .constraints
                .iter()
                .map(|c| Constraint {
                    name: c.name.clone(),
                    coeffs: c.coeffs.iter().map(|(v, a)| (*v, f(a))).collect(),
                    sense: c.sense,
                    rhs: f(&c.rhs),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    Limit,
}

#[derive(Clone, Debug)]
pub struct SolveResult<S> {
    pub status: Status,
    /// Objective of the returned point (incumbent for a MIP).
    pub objective: S,
    /// Best proven lower bound; equals `objective` at optimality.
    pub bound: S,
    /// Empty when no feasible point is known.
    pub values: Vec<S>,
    /// One price per constraint; pure LP solves only.
    pub duals: Vec<S>,
    pub nodes: usize,
    pub iterations: usize,
    pub elapsed: Duration,
}

impl<S: Scalar> SolveResult<S> {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    pub fn has_solution(&self) -> bool {
        !self.values.is_empty()
    }

    pub fn value(&self, var: VarId) -> S {
        self.values[var.0].clone()
    }

    pub fn dual(&self, row: RowId) -> S {
        self.duals[row.0].clone()
    }

    pub(crate) fn without_solution(status: Status, elapsed: Duration) -> Self {
        Self {
            status,
            objective: S::zero(),
            bound: S::zero(),
            values: Vec::new(),
            duals: Vec::new(),
            nodes: 0,
            iterations: 0,
            elapsed,
        }
    }
}
