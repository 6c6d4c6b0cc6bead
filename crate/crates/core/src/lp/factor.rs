//! Basis factorization for the simplex: unit columns are kept implicit, the
//! remaining block is inverted densely, and pivots append eta columns.

use crate::scalar::Scalar;

const NONE: usize = usize::MAX;

#[derive(Clone, Debug)]
pub(crate) struct Factor<S> {
    m: usize,
    /// Per basis position: the row and value of a single-entry column.
    single: Vec<Option<(usize, S)>>,
    /// Basis positions of the remaining columns.
    block_pos: Vec<usize>,
    /// Rows not covered by single-entry columns, same length as `block_pos`.
    block_rows: Vec<usize>,
    /// Entries of the block columns that fall in covered rows.
    coupling: Vec<Vec<(usize, S)>>,
    /// Row-major inverse of the block restricted to `block_rows`.
    inv: Vec<S>,
    etas: Vec<(usize, Vec<(usize, S)>)>,
}

impl<S> Default for Factor<S> {
    fn default() -> Self {
        Self {
            m: 0,
            single: Vec::new(),
            block_pos: Vec::new(),
            block_rows: Vec::new(),
            coupling: Vec::new(),
            inv: Vec::new(),
            etas: Vec::new(),
        }
    }
}

impl<S: Scalar> Factor<S> {
    /// Factors the basis whose position `i` holds the sparse column `cols[i]`.
    /// Returns `None` when the basis is singular.
    pub(crate) fn new(m: usize, cols: &[Vec<(usize, S)>]) -> Option<Self> {
        let mut covered = vec![false; m];
        let mut single = vec![None; m];
        // True unit columns claim their rows first so structural singletons
        // never block a slack.
        let mut order: Vec<usize> = (0..m).filter(|&i| cols[i].len() == 1).collect();
        order.sort_by_key(|&i| !cols[i][0].1.is_one());
        for i in order {
            let (r, v) = &cols[i][0];
            if !covered[*r] && !v.is_zero() {
                covered[*r] = true;
                single[i] = Some((*r, v.clone()));
            }
        }
        let block_pos: Vec<usize> = (0..m).filter(|&i| single[i].is_none()).collect();
        let block_rows: Vec<usize> = (0..m).filter(|&r| !covered[r]).collect();
        let k = block_pos.len();
        if block_rows.len() != k {
            return None;
        }
        let mut row_index = vec![NONE; m];
        for (w, &r) in block_rows.iter().enumerate() {
            row_index[r] = w;
        }
        let mut d = vec![S::zero(); k * k];
        let mut coupling = Vec::with_capacity(k);
        for (j, &i) in block_pos.iter().enumerate() {
            let mut c = Vec::new();
            for (r, a) in &cols[i] {
                match row_index[*r] {
                    NONE => c.push((*r, a.clone())),
                    w => d[w * k + j] = a.clone(),
                }
            }
            coupling.push(c);
        }
        let inv = invert(d, k)?;
        Some(Self {
            m,
            single,
            block_pos,
            block_rows,
            coupling,
            inv,
            etas: Vec::new(),
        })
    }

    pub(crate) fn updates(&self) -> usize {
        self.etas.len()
    }

    /// `B^-1 a` for a dense row vector `a`, indexed by basis position.
    pub(crate) fn ftran(&self, a: &[S]) -> Vec<S> {
        let k = self.block_pos.len();
        let aw: Vec<&S> = self.block_rows.iter().map(|&r| &a[r]).collect();
        let mut x = vec![S::zero(); self.m];
        let mut resid: Vec<S> = a.to_vec();
        for j in 0..k {
            let row = &self.inv[j * k..(j + 1) * k];
            let mut v = S::zero();
            for (d, b) in row.iter().zip(&aw) {
                if !d.is_zero() && !b.is_zero() {
                    v = v + d.clone() * (*b).clone();
                }
            }
            if !v.is_zero() {
                for (r, c) in &self.coupling[j] {
                    resid[*r] = resid[*r].clone() - c.clone() * v.clone();
                }
            }
            x[self.block_pos[j]] = v;
        }
        for (i, s) in self.single.iter().enumerate() {
            if let Some((r, v)) = s {
                if !resid[*r].is_zero() {
                    x[i] = resid[*r].clone() / v.clone();
                }
            }
        }
        for (r, eta) in &self.etas {
            let xr = x[*r].clone();
            if xr.is_zero() {
                continue;
            }
            for (i, e) in eta {
                if i == r {
                    x[*r] = e.clone() * xr.clone();
                } else {
                    x[*i] = x[*i].clone() + e.clone() * xr.clone();
                }
            }
        }
        x
    }

    /// `c^T B^-1` for costs `c` indexed by basis position, as a row vector.
    pub(crate) fn btran(&self, c: &[S]) -> Vec<S> {
        let k = self.block_pos.len();
        let mut c = c.to_vec();
        for (r, eta) in self.etas.iter().rev() {
            let v = eta
                .iter()
                .filter(|(i, _)| !c[*i].is_zero())
                .fold(S::zero(), |acc, (i, e)| acc + c[*i].clone() * e.clone());
            c[*r] = v;
        }
        let mut y = vec![S::zero(); self.m];
        for (i, s) in self.single.iter().enumerate() {
            if let Some((r, v)) = s {
                if !c[i].is_zero() {
                    y[*r] = c[i].clone() / v.clone();
                }
            }
        }
        let mut rhs = vec![S::zero(); k];
        for (j, &i) in self.block_pos.iter().enumerate() {
            let mut v = c[i].clone();
            for (r, a) in &self.coupling[j] {
                if !y[*r].is_zero() {
                    v = v - y[*r].clone() * a.clone();
                }
            }
            rhs[j] = v;
        }
        let mut yw = vec![S::zero(); k];
        for (j, v) in rhs.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let row = &self.inv[j * k..(j + 1) * k];
            for (out, d) in yw.iter_mut().zip(row) {
                if !d.is_zero() {
                    *out = out.clone() + v.clone() * d.clone();
                }
            }
        }
        for (w, &r) in self.block_rows.iter().enumerate() {
            y[r] = yw[w].clone();
        }
        y
    }

    /// Row `r` of `B^-1`.
    pub(crate) fn row(&self, r: usize) -> Vec<S> {
        let mut e = vec![S::zero(); self.m];
        e[r] = S::one();
        self.btran(&e)
    }

    /// Records the replacement of position `r` by a column with `alpha = B^-1 a`.
    pub(crate) fn update(&mut self, r: usize, alpha: &[S]) {
        let p = alpha[r].clone();
        let eta = alpha
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(i, a)| {
                if i == r {
                    (i, S::one() / p.clone())
                } else {
                    (i, -(a.clone() / p.clone()))
                }
            })
            .collect();
        self.etas.push((r, eta));
    }
}

/// Dense Gauss-Jordan inverse with partial pivoting.
fn invert<S: Scalar>(mut b: Vec<S>, k: usize) -> Option<Vec<S>> {
    let mut inv = vec![S::zero(); k * k];
    for i in 0..k {
        inv[i * k + i] = S::one();
    }
    for c in 0..k {
        let mut piv = c;
        let mut best = S::zero();
        for r in c..k {
            let v = b[r * k + c].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best <= S::pivot_tol() || best.is_zero() {
            return None;
        }
        if piv != c {
            for j in 0..k {
                b.swap(c * k + j, piv * k + j);
                inv.swap(c * k + j, piv * k + j);
            }
        }
        let p = b[c * k + c].clone();
        for j in 0..k {
            if !b[c * k + j].is_zero() {
                b[c * k + j] = b[c * k + j].clone() / p.clone();
            }
            if !inv[c * k + j].is_zero() {
                inv[c * k + j] = inv[c * k + j].clone() / p.clone();
            }
        }
        let brow: Vec<(usize, S)> = (0..k)
            .filter(|&j| !b[c * k + j].is_zero())
            .map(|j| (j, b[c * k + j].clone()))
            .collect();
        let irow: Vec<(usize, S)> = (0..k)
            .filter(|&j| !inv[c * k + j].is_zero())
            .map(|j| (j, inv[c * k + j].clone()))
            .collect();
        for r in 0..k {
            if r == c {
                continue;
            }
            let f = b[r * k + c].clone();
            if f.is_zero() {
                continue;
            }
            for (j, v) in &brow {
                b[r * k + j] = b[r * k + j].clone() - f.clone() * v.clone();
            }
            for (j, v) in &irow {
                inv[r * k + j] = inv[r * k + j].clone() - f.clone() * v.clone();
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(m: usize, cols: &[Vec<(usize, f64)>]) -> Vec<Vec<f64>> {
        let mut b = vec![vec![0.0; m]; m];
        for (c, col) in cols.iter().enumerate() {
            for (r, v) in col {
                b[*r][c] = *v;
            }
        }
        b
    }

    #[test]
    fn solves_mixed_basis_and_updates() {
        let cols = vec![
            vec![(0, 1.0)],
            vec![(1, 2.0), (2, 1.0)],
            vec![(2, 3.0), (0, -1.0)],
            vec![(3, -1.0)],
        ];
        let mut f = Factor::new(4, &cols).unwrap();
        let a = [1.0, 2.0, 3.0, 4.0];
        let x = f.ftran(&a);
        let b = dense(4, &cols);
        for r in 0..4 {
            let got: f64 = (0..4).map(|c| b[r][c] * x[c]).sum();
            assert!((got - a[r]).abs() < 1e-12);
        }
        let c = [0.5, -1.0, 2.0, 1.0];
        let y = f.btran(&c);
        for col in 0..4 {
            let got: f64 = (0..4).map(|r| y[r] * b[r][col]).sum();
            assert!((got - c[col]).abs() < 1e-12);
        }

        // Replace position 0 by column (1, 1, 0, 1).
        let newcol = [1.0, 1.0, 0.0, 1.0];
        let alpha = f.ftran(&newcol);
        f.update(0, &alpha);
        let mut cols2 = cols.clone();
        cols2[0] = vec![(0, 1.0), (1, 1.0), (3, 1.0)];
        let b2 = dense(4, &cols2);
        let x = f.ftran(&a);
        for r in 0..4 {
            let got: f64 = (0..4).map(|c| b2[r][c] * x[c]).sum();
            assert!((got - a[r]).abs() < 1e-12);
        }
        let y = f.btran(&c);
        for col in 0..4 {
            let got: f64 = (0..4).map(|r| y[r] * b2[r][col]).sum();
            assert!((got - c[col]).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_basis_is_rejected() {
        let cols = vec![vec![(0, 1.0), (1, 1.0)], vec![(0, 2.0), (1, 2.0)]];
        assert!(Factor::<f64>::new(2, &cols).is_none());
        let cols = vec![vec![(0, 1.0)], vec![(0, 1.0)]];
        assert!(Factor::<f64>::new(2, &cols).is_none());
    }
}
