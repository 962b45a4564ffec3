//! Sparse matrices with a fixed symmetric pattern and a banded direct solver.

use std::collections::VecDeque;

/// Compressed-row matrix whose sparsity pattern is fixed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    /// Zero matrix with the pattern given by per-row column lists (diagonal
    /// added automatically).
    pub fn with_pattern(rows: &[Vec<usize>]) -> Self {
        let n = rows.len();
        let mut row_start = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        row_start.push(0);
        for (i, r) in rows.iter().enumerate() {
            let mut r = r.clone();
            r.push(i);
            r.sort_unstable();
            r.dedup();
            cols.extend(r);
            row_start.push(cols.len());
        }
        let nnz = cols.len();
        SparseMatrix {
            n,
            row_start,
            cols,
            vals: vec![0.0; nnz],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let r = &self.cols[self.row_start[i]..self.row_start[i + 1]];
        r.binary_search(&j).ok().map(|k| self.row_start[i] + k)
    }

    /// Adds `v` to entry `(i, j)`. Panics if `(i, j)` is outside the pattern.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside sparsity pattern"));
        self.vals[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |k| self.vals[k])
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_start[i]..self.row_start[i + 1]).map(move |k| (self.cols[k], self.vals[k]))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    pub fn fill_zero(&mut self) {
        self.vals.iter_mut().for_each(|v| *v = 0.0);
    }
}

/// Reverse Cuthill-McKee ordering of a symmetric pattern. Returns `order`
/// with `order[new] = old`.
pub fn reverse_cuthill_mckee(m: &SparseMatrix) -> Vec<usize> {
    let n = m.dim();
    let degree: Vec<usize> = (0..n).map(|i| m.row(i).count()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let start = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| degree[i])
            .expect("unvisited vertex exists");
        // a pseudo-peripheral start: walk to the last vertex of a BFS twice
        let start = farthest(m, farthest(m, start, &visited), &visited);
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = m.row(v).map(|(j, _)| j).filter(|&j| !visited[j]).collect();
            next.sort_by_key(|&j| (degree[j], j));
            for j in next {
                visited[j] = true;
                queue.push_back(j);
            }
        }
    }
    order.reverse();
    order
}

fn farthest(m: &SparseMatrix, start: usize, blocked: &[bool]) -> usize {
    let mut seen = blocked.to_vec();
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    let mut last = start;
    while let Some(v) = queue.pop_front() {
        last = v;
        for (j, _) in m.row(v) {
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    last
}

/// LU factorization without pivoting of a band matrix obtained by permuting
/// a sparse matrix with reverse Cuthill-McKee.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    bw: usize,
    order: Vec<usize>,
    band: Vec<f64>,
}

impl BandLu {
    /// Factors `m`. Fails with `(row, pivot)` on a vanishing pivot.
    pub fn factor(m: &SparseMatrix, order: &[usize]) -> Result<Self, (usize, f64)> {
        let n = m.dim();
        let mut position = vec![0usize; n];
        for (new, &old) in order.iter().enumerate() {
            position[old] = new;
        }
        let mut bw = 0;
        for i in 0..n {
            for (j, _) in m.row(i) {
                bw = bw.max(position[i].abs_diff(position[j]));
            }
        }
        let width = 2 * bw + 1;
        let mut band = vec![0.0; n * width];
        let mut scale: f64 = 0.0;
        for i in 0..n {
            for (j, v) in m.row(i) {
                let (pi, pj) = (position[i], position[j]);
                band[pi * width + (pj + bw - pi)] = v;
                scale = scale.max(v.abs());
            }
        }
        let at = |i: usize, j: usize| i * width + (j + bw - i);
        for k in 0..n {
            let pivot = band[at(k, k)];
            if pivot.abs() <= 1e-14 * scale || !pivot.is_finite() {
                return Err((order[k], pivot));
            }
            let end = (k + bw + 1).min(n);
            for i in k + 1..end {
                let lik = band[at(i, k)];
                if lik == 0.0 {
                    continue;
                }
                let l = lik / pivot;
                band[at(i, k)] = l;
                for j in k + 1..end {
                    let ukj = band[at(k, j)];
                    if ukj != 0.0 {
                        band[at(i, j)] -= l * ukj;
                    }
                }
            }
        }
        Ok(BandLu {
            n,
            bw,
            order: order.to_vec(),
            band,
        })
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (n, bw) = (self.n, self.bw);
        let width = 2 * bw + 1;
        let at = |i: usize, j: usize| i * width + (j + bw - i);
        let mut y: Vec<f64> = self.order.iter().map(|&old| rhs[old]).collect();
        for i in 0..n {
            let start = i.saturating_sub(bw);
            let mut s = y[i];
            for j in start..i {
                s -= self.band[at(i, j)] * y[j];
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let end = (i + bw + 1).min(n);
            let mut s = y[i];
            for j in i + 1..end {
                s -= self.band[at(i, j)] * y[j];
            }
            y[i] = s / self.band[at(i, i)];
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.order.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}
