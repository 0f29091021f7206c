//! Sparse LU factorization of a simplex basis with product-form updates.
//!
//! The basis `B` has one column per basis position. Factorization runs a
//! right-looking Gaussian elimination, choosing pivots by Markowitz count
//! under a threshold test; the eliminations are kept as a sequence of
//! column multipliers (`L`) and pivot rows (`U`). Basis changes append eta
//! columns until the next refactorization.

const THRESHOLD: f64 = 0.1;
const SINGULAR: f64 = 1e-11;
/// Candidate columns examined per Markowitz search.
const SEARCH: usize = 4;

#[derive(Debug)]
pub(crate) struct Singular {
    /// Rows left without a pivot.
    pub rows: Vec<usize>,
    /// Basis positions left without a pivot.
    pub positions: Vec<usize>,
}

#[derive(Clone, Debug, Default)]
struct Sparse {
    start: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<f64>,
}

impl Sparse {
    fn new() -> Self {
        Sparse { start: vec![0], idx: Vec::new(), val: Vec::new() }
    }

    fn push(&mut self, entries: impl IntoIterator<Item = (usize, f64)>) {
        for (i, v) in entries {
            self.idx.push(i);
            self.val.push(v);
        }
        self.start.push(self.idx.len());
    }

    fn get(&self, k: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.start[k]..self.start[k + 1];
        self.idx[r.clone()].iter().copied().zip(self.val[r].iter().copied())
    }

    fn len(&self) -> usize {
        self.start.len() - 1
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Factor {
    m: usize,
    piv_row: Vec<usize>,
    piv_pos: Vec<usize>,
    piv_val: Vec<f64>,
    /// Per step: `(row, multiplier)` pairs eliminated by the pivot row.
    l: Sparse,
    /// Per step: off-diagonal `(position, value)` of the pivot row.
    u: Sparse,
    /// `L` by rows: per step `j`, `(pivot row of k, multiplier)` for the
    /// earlier steps `k` that eliminated row `piv_row[j]`.
    lt: Sparse,
    /// `U` by columns: per step `j`, `(pivot row of k, value)` for the
    /// earlier steps `k` whose pivot row touches position `piv_pos[j]`.
    ut: Sparse,
    eta_pos: Vec<usize>,
    eta_piv: Vec<f64>,
    /// Per eta: off-pivot `(position, value)` of the entering column.
    eta: Sparse,
}

impl Factor {
    /// Identity basis (all logical columns, position `i` on row `i`).
    pub fn identity(m: usize) -> Self {
        let mut l = Sparse::new();
        let mut u = Sparse::new();
        for _ in 0..m {
            l.push([]);
            u.push([]);
        }
        let mut f = Factor {
            m,
            piv_row: (0..m).collect(),
            piv_pos: (0..m).collect(),
            piv_val: vec![1.0; m],
            l,
            u,
            lt: Sparse::new(),
            ut: Sparse::new(),
            eta_pos: Vec::new(),
            eta_piv: Vec::new(),
            eta: Sparse::new(),
        };
        f.transpose();
        f
    }

    /// Factorize the basis whose position `c` holds column `columns[c]`
    /// (sparse `(row, value)` lists).
    pub fn new(m: usize, columns: &[Vec<(usize, f64)>]) -> Result<Self, Singular> {
        debug_assert_eq!(columns.len(), m);
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
        let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (c, col) in columns.iter().enumerate() {
            for &(i, v) in col {
                if v != 0.0 {
                    rows[i].push((c, v));
                    col_rows[c].push(i);
                }
            }
        }
        let mut col_count: Vec<usize> = col_rows.iter().map(Vec::len).collect();
        let mut row_done = vec![false; m];
        let mut col_done = vec![false; m];
        let mut mark = vec![usize::MAX; m];

        let mut f = Factor {
            m,
            piv_row: Vec::with_capacity(m),
            piv_pos: Vec::with_capacity(m),
            piv_val: Vec::with_capacity(m),
            l: Sparse::new(),
            u: Sparse::new(),
            lt: Sparse::new(),
            ut: Sparse::new(),
            eta_pos: Vec::new(),
            eta_piv: Vec::new(),
            eta: Sparse::new(),
        };

        let value = |rows: &[Vec<(usize, f64)>], i: usize, c: usize| {
            rows[i].iter().find(|e| e.0 == c).map_or(0.0, |e| e.1)
        };

        // Columns by active count; entries go stale when the count changes.
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); m + 1];
        for c in 0..m {
            buckets[col_count[c]].push(c);
        }
        let mut seen = vec![usize::MAX; m];

        for step in 0..m {
            // Markowitz search over the sparsest columns; a column singleton
            // ends the search at once.
            let mut cands = Vec::with_capacity(SEARCH);
            'gather: for (cnt, bucket) in buckets.iter_mut().enumerate().skip(1) {
                let mut k = 0;
                while k < bucket.len() {
                    let c = bucket[k];
                    if col_done[c] || col_count[c] != cnt || seen[c] == step {
                        bucket.swap_remove(k);
                        continue;
                    }
                    seen[c] = step;
                    cands.push(c);
                    if cands.len() == SEARCH {
                        break 'gather;
                    }
                    k += 1;
                }
            }
            let mut best: Option<(usize, usize, f64, usize)> = None; // (row, col, value, cost)
            for &c in &cands {
                let entries: Vec<(usize, f64)> = col_rows[c]
                    .iter()
                    .filter(|&&i| !row_done[i])
                    .map(|&i| (i, value(&rows, i, c)))
                    .filter(|e| e.1 != 0.0)
                    .collect();
                let big = entries.iter().fold(0.0f64, |a, e| a.max(e.1.abs()));
                if big < SINGULAR {
                    continue;
                }
                for &(i, v) in &entries {
                    if v.abs() < THRESHOLD * big {
                        continue;
                    }
                    let cost = (rows[i].len() - 1) * (entries.len() - 1);
                    let better = match best {
                        None => true,
                        Some((_, _, bv, bc)) => cost < bc || (cost == bc && v.abs() > bv.abs()),
                    };
                    if better {
                        best = Some((i, c, v, cost));
                    }
                }
                if best.is_some_and(|b| b.3 == 0) {
                    break;
                }
            }
            if best.is_none() {
                // Fall back to any usable entry.
                for c in (0..m).filter(|&c| !col_done[c]) {
                    for &i in col_rows[c].iter().filter(|&&i| !row_done[i]) {
                        let v = value(&rows, i, c);
                        if v.abs() >= SINGULAR && best.is_none_or(|b| v.abs() > b.2.abs()) {
                            best = Some((i, c, v, 0));
                        }
                    }
                }
            }
            let Some((p, c, piv, _)) = best else { break };

            // Eliminate column c from the other active rows.
            let prow: Vec<(usize, f64)> = rows[p].iter().copied().filter(|e| e.0 != c).collect();
            let mut lcol = Vec::new();
            let targets: Vec<usize> = col_rows[c].iter().copied().filter(|&i| i != p && !row_done[i]).collect();
            for i in targets {
                let Some(k) = rows[i].iter().position(|e| e.0 == c) else { continue };
                let a = rows[i].swap_remove(k).1;
                if a == 0.0 {
                    continue;
                }
                let mult = a / piv;
                lcol.push((i, mult));
                for (k, e) in rows[i].iter().enumerate() {
                    mark[e.0] = k;
                }
                for &(c2, v) in &prow {
                    match mark[c2] {
                        usize::MAX => {
                            rows[i].push((c2, -mult * v));
                            col_rows[c2].push(i);
                            col_count[c2] += 1;
                            buckets[col_count[c2]].push(c2);
                        }
                        k => rows[i][k].1 -= mult * v,
                    }
                }
                for e in &rows[i] {
                    mark[e.0] = usize::MAX;
                }
            }
            for &(c2, _) in &prow {
                col_count[c2] -= 1;
                buckets[col_count[c2]].push(c2);
            }
            row_done[p] = true;
            col_done[c] = true;
            col_count[c] = 0;
            f.piv_row.push(p);
            f.piv_pos.push(c);
            f.piv_val.push(piv);
            f.l.push(lcol);
            f.u.push(prow);
        }
        if f.piv_row.len() < m {
            return Err(Singular {
                rows: (0..m).filter(|&i| !row_done[i]).collect(),
                positions: (0..m).filter(|&c| !col_done[c]).collect(),
            });
        }
        f.transpose();
        Ok(f)
    }

    fn transpose(&mut self) {
        let steps = self.piv_row.len();
        let mut step_of_row = vec![0; self.m];
        let mut step_of_pos = vec![0; self.m];
        for k in 0..steps {
            step_of_row[self.piv_row[k]] = k;
            step_of_pos[self.piv_pos[k]] = k;
        }
        let mut lt = vec![Vec::new(); steps];
        let mut ut = vec![Vec::new(); steps];
        for k in 0..steps {
            for (i, l) in self.l.get(k) {
                lt[step_of_row[i]].push((self.piv_row[k], l));
            }
            for (c, u) in self.u.get(k) {
                ut[step_of_pos[c]].push((self.piv_row[k], u));
            }
        }
        self.lt = Sparse::new();
        self.ut = Sparse::new();
        for (l, u) in lt.into_iter().zip(ut) {
            self.lt.push(l);
            self.ut.push(u);
        }
    }

    pub fn eta_count(&self) -> usize {
        self.eta_pos.len()
    }

    /// Solve `B z = a`; `a` is indexed by row (and is overwritten), `z` by position.
    pub fn ftran(&self, a: &mut [f64], z: &mut [f64]) {
        for k in 0..self.l.len() {
            let x = a[self.piv_row[k]];
            if x != 0.0 {
                for (i, l) in self.l.get(k) {
                    a[i] -= l * x;
                }
            }
        }
        for k in (0..self.ut.len()).rev() {
            let v = a[self.piv_row[k]] / self.piv_val[k];
            z[self.piv_pos[k]] = v;
            if v != 0.0 {
                for (p, u) in self.ut.get(k) {
                    a[p] -= u * v;
                }
            }
        }
        for k in 0..self.eta_pos.len() {
            let r = self.eta_pos[k];
            let zr = z[r] / self.eta_piv[k];
            z[r] = zr;
            if zr != 0.0 {
                for (i, a) in self.eta.get(k) {
                    z[i] -= a * zr;
                }
            }
        }
    }

    /// Solve `wᵀ B = eᵀ`; `e` is indexed by position (and is overwritten), `w` by row.
    pub fn btran(&self, e: &mut [f64], w: &mut [f64]) {
        for k in (0..self.eta_pos.len()).rev() {
            let r = self.eta_pos[k];
            let mut s = e[r];
            for (i, a) in self.eta.get(k) {
                s -= a * e[i];
            }
            e[r] = s / self.eta_piv[k];
        }
        for k in 0..self.u.len() {
            let v = e[self.piv_pos[k]] / self.piv_val[k];
            w[self.piv_row[k]] = v;
            if v != 0.0 {
                for (c, u) in self.u.get(k) {
                    e[c] -= u * v;
                }
            }
        }
        for k in (0..self.lt.len()).rev() {
            let v = w[self.piv_row[k]];
            if v != 0.0 {
                for (p, l) in self.lt.get(k) {
                    w[p] -= l * v;
                }
            }
        }
    }

    /// Record that position `r` now holds the column whose FTRAN image is `alpha`.
    pub fn update(&mut self, r: usize, alpha: &[f64]) {
        debug_assert_eq!(alpha.len(), self.m);
        self.eta_pos.push(r);
        self.eta_piv.push(alpha[r]);
        self.eta.push(alpha.iter().enumerate().filter(|&(i, &a)| i != r && a != 0.0).map(|(i, &a)| (i, a)));
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn dense(m: usize, cols: &[Vec<(usize, f64)>]) -> Vec<Vec<f64>> {
        let mut b = vec![vec![0.0; m]; m];
        for (c, col) in cols.iter().enumerate() {
            for &(i, v) in col {
                b[i][c] += v;
            }
        }
        b
    }

    fn check_solves(m: usize, cols: &[Vec<(usize, f64)>], f: &Factor) {
        let b = dense(m, cols);
        // B z = a for a = B·1
        let ones = vec![1.0; m];
        let mut a: Vec<f64> = (0..m).map(|i| b[i].iter().sum()).collect();
        let mut z = vec![0.0; m];
        f.ftran(&mut a, &mut z);
        for (zi, oi) in z.iter().zip(&ones) {
            assert!((zi - oi).abs() < 1e-8, "ftran {z:?}");
        }
        // wᵀB = eᵀ for e = 1ᵀB
        let mut e: Vec<f64> = (0..m).map(|c| (0..m).map(|i| b[i][c]).sum()).collect();
        let mut w = vec![0.0; m];
        f.btran(&mut e, &mut w);
        for wi in &w {
            assert!((wi - 1.0).abs() < 1e-8, "btran {w:?}");
        }
    }

    #[test]
    fn permuted_triangular() {
        let cols = vec![vec![(2, 2.0)], vec![(0, 1.0), (2, 1.0)], vec![(1, 4.0), (0, -1.0)]];
        let f = Factor::new(3, &cols).unwrap();
        check_solves(3, &cols, &f);
    }

    #[test]
    fn singular_basis_is_reported() {
        let cols = vec![vec![(0, 1.0), (1, 1.0)], vec![(0, 2.0), (1, 2.0)], vec![(2, 1.0)]];
        let err = Factor::new(3, &cols).unwrap_err();
        assert_eq!(err.rows.len(), 1);
        assert_eq!(err.positions.len(), 1);
    }

    #[test]
    fn eta_updates_track_column_replacement() {
        let mut cols = vec![vec![(0, 1.0)], vec![(1, 1.0)], vec![(2, 1.0)]];
        let mut f = Factor::identity(3);
        let newcol = vec![(0, 1.0), (1, 3.0), (2, -2.0)];
        let mut a = vec![1.0, 3.0, -2.0];
        let mut alpha = vec![0.0; 3];
        f.ftran(&mut a, &mut alpha);
        f.update(1, &alpha);
        cols[1] = newcol;
        check_solves(3, &cols, &f);
    }

    proptest! {
        #[test]
        fn random_sparse_bases(m in 1usize..12, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            // Diagonally dominant after a random column permutation: nonsingular.
            let perm: Vec<usize> = {
                let mut p: Vec<usize> = (0..m).collect();
                for i in (1..m).rev() { p.swap(i, rng.random_range(0..=i)); }
                p
            };
            let cols: Vec<Vec<(usize, f64)>> = (0..m).map(|c| {
                let mut col = vec![(perm[c], 10.0 + rng.random_range(0.0..1.0))];
                for i in 0..m {
                    if i != perm[c] && rng.random_range(0.0..1.0) < 0.3 {
                        col.push((i, rng.random_range(-1.0..1.0)));
                    }
                }
                col
            }).collect();
            let mut f = Factor::new(m, &cols).unwrap();
            check_solves(m, &cols, &f);
            // Replace a column and check the eta-updated solves.
            let r = rng.random_range(0..m);
            let newcol: Vec<(usize, f64)> = vec![(perm[r], 5.0), (perm[(r + 1) % m], 1.0)];
            let mut a = vec![0.0; m];
            for &(i, v) in &newcol { a[i] += v; }
            let mut alpha = vec![0.0; m];
            f.ftran(&mut a, &mut alpha);
            prop_assume!(alpha[r].abs() > 1e-3);
            f.update(r, &alpha);
            let mut cols = cols;
            cols[r] = newcol;
            check_solves(m, &cols, &f);
        }
    }
}
