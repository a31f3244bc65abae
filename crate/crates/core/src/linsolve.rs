//! Direct solvers for the assembled systems.
//!
//! Matrices are assembled as triplets, compressed to CSR, reordered with
//! reverse Cuthill–McKee and factored in band storage: Cholesky when the
//! system is flagged symmetric (falling back to LU if it is not positive
//! definite), LU with scaled partial pivoting otherwise.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// A pivot whose scaled magnitude falls below this is treated as zero.
pub const SINGULAR_PIVOT_RATIO: f64 = 1e-14;

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates
    /// and dropping entries that sum to exactly zero.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Self {
        triplets.sort_by_key(|a| (a.0, a.1));
        let mut row_ptr = vec![0; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            if rows.last() == Some(&r) && col_idx.last() == Some(&c) {
                *values.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                col_idx.push(c);
                values.push(v);
            }
        }
        let mut keep_rows = Vec::with_capacity(rows.len());
        let mut keep_cols = Vec::with_capacity(rows.len());
        let mut keep_vals = Vec::with_capacity(rows.len());
        for ((r, c), v) in rows.into_iter().zip(col_idx).zip(values) {
            if v != 0.0 {
                keep_rows.push(r);
                keep_cols.push(c);
                keep_vals.push(v);
            }
        }
        for &r in &keep_rows {
            row_ptr[r + 1] += 1;
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx: keep_cols,
            values: keep_vals,
        }
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        let trip = rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &v)| (i, j, v)))
            .collect();
        Self::from_triplets(n, m, trip)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.nrows)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let trip = (0..self.nrows)
            .flat_map(|i| self.row(i).map(move |(j, v)| (j, i, v)))
            .collect();
        Self::from_triplets(self.ncols, self.nrows, trip)
    }

    /// `max |A - Aᵀ|` over stored entries.
    pub fn asymmetry(&self) -> f64 {
        let t = self.transpose();
        let mut worst: f64 = 0.0;
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                worst = worst.max((v - t.get(i, j)).abs());
            }
            for (j, v) in t.row(i) {
                worst = worst.max((v - self.get(i, j)).abs());
            }
        }
        worst
    }

    /// Symmetric permutation `B[i][j] = A[perm[i]][perm[j]]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let mut inv = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let trip = (0..self.nrows)
            .flat_map(|i| {
                let inv = &inv;
                self.row(i).map(move |(j, v)| (inv[i], inv[j], v))
            })
            .collect();
        Self::from_triplets(self.nrows, self.ncols, trip)
    }

    /// Lower and upper bandwidth.
    pub fn bandwidths(&self) -> (usize, usize) {
        let mut kl = 0;
        let mut ku = 0;
        for i in 0..self.nrows {
            for (j, _) in self.row(i) {
                if j < i {
                    kl = kl.max(i - j);
                } else {
                    ku = ku.max(j - i);
                }
            }
        }
        (kl, ku)
    }
}

/// Square linear system `A x = b`.
#[derive(Debug, Clone)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Set when `A` is symmetric (and expected positive definite).
    pub symmetric: bool,
}

impl SparseSystem {
    pub fn new(matrix: CsrMatrix, rhs: Vec<f64>, symmetric: bool) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        if rhs.len() != matrix.nrows() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: rhs.len(),
            });
        }
        Ok(Self {
            matrix,
            rhs,
            symmetric,
        })
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    /// `‖Ax − b‖₂ / (‖A‖_F ‖x‖₂ + ‖b‖₂)`.
    pub fn residual_ratio(&self, x: &[f64]) -> f64 {
        let ax = self.matrix.mul_vec(x);
        let r = ax
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let xn = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let bn = self.rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
        let denom = self.matrix.frobenius_norm() * xn + bn;
        if denom == 0.0 {
            r
        } else {
            r / denom
        }
    }
}

/// Reverse Cuthill–McKee ordering of the symmetrized sparsity pattern.
/// Returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.nrows();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for (j, _) in a.row(i) {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);

    while order.len() < n {
        let seed = (0..n)
            .filter(|&v| !visited[v])
            .min_by_key(|&v| degree[v])
            .unwrap();
        let start = pseudo_peripheral(seed, &adj, &visited);
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&u| !visited[u]).collect();
            next.sort_by_key(|&u| (degree[u], u));
            for u in next {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    order.reverse();
    order
}

fn pseudo_peripheral(seed: usize, adj: &[Vec<usize>], blocked: &[bool]) -> usize {
    let mut current = seed;
    let mut ecc = 0;
    for _ in 0..8 {
        let (far, depth) = bfs_farthest(current, adj, blocked);
        if depth <= ecc {
            break;
        }
        ecc = depth;
        current = far;
    }
    current
}

fn bfs_farthest(start: usize, adj: &[Vec<usize>], blocked: &[bool]) -> (usize, usize) {
    let mut level = vec![usize::MAX; adj.len()];
    level[start] = 0;
    let mut queue = VecDeque::from([start]);
    let mut far = (start, 0);
    while let Some(v) = queue.pop_front() {
        let l = level[v];
        if l > far.1 || (l == far.1 && adj[v].len() < adj[far.0].len()) {
            far = (v, l);
        }
        for &u in &adj[v] {
            if !blocked[u] && level[u] == usize::MAX {
                level[u] = l + 1;
                queue.push_back(u);
            }
        }
    }
    far
}

/// LU factorization in band storage with scaled partial pivoting.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
    piv: Vec<usize>,
}

impl BandLu {
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.nrows();
        let (kl, ku) = a.bandwidths();
        let width = 2 * kl + ku + 1;
        let mut lu = Self {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
            piv: vec![0; n],
        };
        let mut scale = vec![0.0f64; n];
        for i in 0..n {
            for (j, v) in a.row(i) {
                let k = lu.idx(i, j);
                lu.data[k] = v;
                scale[i] = scale[i].max(v.abs());
            }
        }
        for (i, s) in scale.iter().enumerate() {
            if *s == 0.0 {
                return Err(Error::Singular { pivot: i });
            }
        }
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + kl + ku).min(n - 1);
            let mut best = k;
            let mut best_ratio = 0.0;
            for i in k..=last_row {
                let r = lu.data[lu.idx(i, k)].abs() / scale[i];
                if r > best_ratio {
                    best_ratio = r;
                    best = i;
                }
            }
            if best_ratio < SINGULAR_PIVOT_RATIO {
                return Err(Error::Singular { pivot: k });
            }
            lu.piv[k] = best;
            if best != k {
                for j in k..=last_col {
                    let (x, y) = (lu.idx(k, j), lu.idx(best, j));
                    lu.data.swap(x, y);
                }
                scale.swap(k, best);
            }
            let pivot = lu.data[lu.idx(k, k)];
            for i in k + 1..=last_row {
                let ik = lu.idx(i, k);
                let l = lu.data[ik] / pivot;
                lu.data[ik] = l;
                if l == 0.0 {
                    continue;
                }
                let row_k = lu.idx(k, k + 1);
                let row_i = lu.idx(i, k + 1);
                for off in 0..last_col - k {
                    lu.data[row_i + off] -= l * lu.data[row_k + off];
                }
            }
        }
        Ok(lu)
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
            let xk = x[k];
            if xk != 0.0 {
                for i in k + 1..=(k + self.kl).min(n.saturating_sub(1)) {
                    x[i] -= self.data[self.idx(i, k)] * xk;
                }
            }
        }
        for k in (0..n).rev() {
            let last_col = (k + self.kl + self.ku).min(n - 1);
            let mut s = x[k];
            for j in k + 1..=last_col {
                s -= self.data[self.idx(k, j)] * x[j];
            }
            x[k] = s / self.data[self.idx(k, k)];
        }
        x
    }
}

/// Cholesky factor `L` of a symmetric positive definite band matrix,
/// stored by rows over columns `[i - kl, i]`.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    kl: usize,
    data: Vec<f64>,
}

impl BandCholesky {
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.kl + 1) + (j + self.kl - i)
    }

    /// Returns `Err(Singular)` at the first non-positive pivot.
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.nrows();
        let (kl, _) = a.bandwidths();
        let mut ch = Self {
            n,
            kl,
            data: vec![0.0; n * (kl + 1)],
        };
        let mut scale = vec![0.0f64; n];
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i {
                    let k = ch.idx(i, j);
                    ch.data[k] = v;
                }
                scale[i] = scale[i].max(v.abs());
            }
        }
        for i in 0..n {
            let first = i.saturating_sub(kl);
            for j in first..=i {
                let mut s = ch.data[ch.idx(i, j)];
                let lo = first.max(j.saturating_sub(kl));
                for k in lo..j {
                    s -= ch.data[ch.idx(i, k)] * ch.data[ch.idx(j, k)];
                }
                if j == i {
                    if !(s > SINGULAR_PIVOT_RATIO * scale[i]) {
                        return Err(Error::Singular { pivot: i });
                    }
                    let k = ch.idx(i, i);
                    ch.data[k] = s.sqrt();
                } else {
                    let k = ch.idx(i, j);
                    ch.data[k] = s / ch.data[ch.idx(j, j)];
                }
            }
        }
        Ok(ch)
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in i.saturating_sub(self.kl)..i {
                s -= self.data[self.idx(i, k)] * y[k];
            }
            y[i] = s / self.data[self.idx(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..=(i + self.kl).min(n - 1) {
                s -= self.data[self.idx(k, i)] * y[k];
            }
            y[i] = s / self.data[self.idx(i, i)];
        }
        y
    }
}

fn check_finite(system: &SparseSystem) -> Result<()> {
    for i in 0..system.dim() {
        for (j, v) in system.matrix.row(i) {
            if !v.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
        if !system.rhs[i].is_finite() {
            return Err(Error::NonFinite {
                row: i,
                col: usize::MAX,
            });
        }
    }
    Ok(())
}

/// Solves the system directly. Singular pivots are reported with their
/// index in the original (unpermuted) numbering.
pub fn solve_direct(system: &SparseSystem) -> Result<Vec<f64>> {
    check_finite(system)?;
    let n = system.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let perm = reverse_cuthill_mckee(&system.matrix);
    let a = system.matrix.permute(&perm);
    let b: Vec<f64> = perm.iter().map(|&old| system.rhs[old]).collect();
    let map_err = |e: Error| match e {
        Error::Singular { pivot } => Error::Singular { pivot: perm[pivot] },
        other => other,
    };
    let y = if system.symmetric {
        match BandCholesky::factor(&a) {
            Ok(ch) => ch.solve(&b),
            Err(_) => BandLu::factor(&a).map_err(map_err)?.solve(&b),
        }
    } else {
        BandLu::factor(&a).map_err(map_err)?.solve(&b)
    };
    let mut x = vec![0.0; n];
    for (new, &old) in perm.iter().enumerate() {
        x[old] = y[new];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn dense_lu_oracle(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i][k].abs().partial_cmp(&a[j][k].abs()).unwrap())
                .unwrap();
            a.swap(k, p);
            b.swap(k, p);
            for i in k + 1..n {
                let l = a[i][k] / a[k][k];
                for j in k..n {
                    a[i][j] -= l * a[k][j];
                }
                b[i] -= l * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
            x[k] = (b[k] - s) / a[k][k];
        }
        x
    }

    #[test]
    fn identity_and_two_by_two() {
        let eye = CsrMatrix::from_dense(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ]);
        let sys = SparseSystem::new(eye, vec![3.0, -2.0, 7.5], false).unwrap();
        assert_eq!(solve_direct(&sys).unwrap(), vec![3.0, -2.0, 7.5]);

        for symmetric in [true, false] {
            let a = CsrMatrix::from_dense(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
            let sys = SparseSystem::new(a, vec![3.0, 3.0], symmetric).unwrap();
            let x = solve_direct(&sys).unwrap();
            assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn random_dominant_against_dense_oracle() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let n = 50;
        let mut dense = vec![vec![0.0; n]; n];
        for (i, row) in dense.iter_mut().enumerate() {
            for v in row.iter_mut() {
                *v = rng.gen_range(-1.0..1.0);
            }
            row[i] = n as f64 + 1.0;
        }
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sys = SparseSystem::new(CsrMatrix::from_dense(&dense), b.clone(), false).unwrap();
        let x = solve_direct(&sys).unwrap();
        assert!(sys.residual_ratio(&x) <= 1e-10);
        let oracle = dense_lu_oracle(dense, b);
        for (a, o) in x.iter().zip(oracle) {
            assert!((a - o).abs() < 1e-12);
        }
    }

    #[test]
    fn pivoting_needed() {
        let a = CsrMatrix::from_dense(&[
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 2.0],
            vec![0.0, 3.0, 1.0],
        ]);
        let sys = SparseSystem::new(a, vec![1.0, 2.0, 3.0], false).unwrap();
        let x = solve_direct(&sys).unwrap();
        assert!(sys.residual_ratio(&x) < 1e-15);
    }

    #[test]
    fn singular_reports_pivot() {
        let a = CsrMatrix::from_dense(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        let sys = SparseSystem::new(a, vec![1.0, 1.0], false).unwrap();
        assert!(matches!(solve_direct(&sys), Err(Error::Singular { .. })));
        let z = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0)]);
        let sys = SparseSystem::new(z, vec![1.0, 1.0], true).unwrap();
        assert!(matches!(
            solve_direct(&sys),
            Err(Error::Singular { pivot: 1 })
        ));
    }

    #[test]
    fn non_finite_rejected() {
        let a = CsrMatrix::from_dense(&[vec![1.0, f64::NAN], vec![0.0, 1.0]]);
        let sys = SparseSystem::new(a, vec![1.0, 1.0], false).unwrap();
        assert!(matches!(
            solve_direct(&sys),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
        let a = CsrMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let sys = SparseSystem::new(a, vec![f64::INFINITY, 1.0], false).unwrap();
        assert!(matches!(solve_direct(&sys), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn triplets_sum_duplicates() {
        let m = CsrMatrix::from_triplets(
            2,
            2,
            vec![
                (0, 0, 1.0),
                (1, 1, 2.0),
                (0, 0, 0.5),
                (0, 1, 1.0),
                (0, 1, -1.0),
            ],
        );
        assert_eq!(m.get(0, 0), 1.5);
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn rcm_reduces_bandwidth_of_shuffled_path() {
        let n = 40;
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let mut labels: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            labels.swap(i, rng.gen_range(0..=i));
        }
        let mut trip = Vec::new();
        for i in 0..n {
            trip.push((labels[i], labels[i], 4.0));
            if i + 1 < n {
                trip.push((labels[i], labels[i + 1], -1.0));
                trip.push((labels[i + 1], labels[i], -1.0));
            }
        }
        let a = CsrMatrix::from_triplets(n, n, trip);
        let perm = reverse_cuthill_mckee(&a);
        assert_eq!(a.permute(&perm).bandwidths(), (1, 1));
    }
}
