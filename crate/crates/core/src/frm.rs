//! Finite RBF method: keep each row's entries for its `k` nearest knots and
//! drop the rest outright, with no decay weighting.

use crate::error::{invalid, BkmError, Result};
use crate::geometry::{distance, KnotSet, Point};
use crate::linalg::{max_abs, DenseSystem};

/// Compressed sparse row storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Rows given as `(column, value)` lists; columns are sorted here.
    pub fn from_rows(cols: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let mut row_offsets = Vec::with_capacity(rows.len() + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        let n_rows = rows.len();
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            if row.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(invalid("duplicate column in sparse row"));
            }
            if row.last().is_some_and(|e| e.0 >= cols) {
                return Err(invalid("sparse column index out of range"));
            }
            for (c, v) in row {
                col_indices.push(c);
                values.push(v);
            }
            row_offsets.push(col_indices.len());
        }
        Ok(CsrMatrix {
            rows: n_rows,
            cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(column, value)` pairs of row `i` in column order.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_offsets[i]..self.row_offsets[i + 1];
        self.col_indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.row_offsets[i + 1] - self.row_offsets[i]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let span = self.row_offsets[i]..self.row_offsets[i + 1];
        match self.col_indices[span.clone()].binary_search(&j) {
            Ok(pos) => self.values[span.start + pos],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }
}

/// Truncated collocation system.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Neighbour count used for the truncation.
    pub neighbors: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TruncationOptions {
    /// Keep `(i, j)` when either knot is among the other's neighbours.
    pub symmetrize: bool,
}

/// Truncate a system whose rows and columns are both indexed by `knots`.
pub fn truncate_system(dense: &DenseSystem, knots: &KnotSet, k: usize) -> Result<SparseSystem> {
    let points: Vec<Point> = knots.points().collect();
    truncate_with(dense, &points, k, TruncationOptions::default())
}

/// Truncate a square system whose rows and columns are indexed by `points`.
pub fn truncate_with(
    dense: &DenseSystem,
    points: &[Point],
    k: usize,
    options: TruncationOptions,
) -> Result<SparseSystem> {
    let n = dense.len();
    if points.len() != n {
        return Err(invalid(format!(
            "{} points for a system of size {n}",
            points.len()
        )));
    }
    if k == 0 || k > n {
        return Err(invalid(format!(
            "neighbour count must be in 1..={n}, got {k}"
        )));
    }
    let mut keep: Vec<Vec<usize>> = (0..n).map(|i| nearest(points, i, k)).collect();
    if options.symmetrize {
        let mut union = keep.clone();
        for (i, cols) in keep.iter().enumerate() {
            for &j in cols {
                if !union[j].contains(&i) {
                    union[j].push(i);
                }
            }
        }
        keep = union;
    }
    let rows = keep
        .into_iter()
        .enumerate()
        .map(|(i, cols)| {
            cols.into_iter()
                .map(|j| (j, dense.matrix[(i, j)]))
                .collect()
        })
        .collect();
    Ok(SparseSystem {
        matrix: CsrMatrix::from_rows(n, rows)?,
        rhs: dense.rhs.clone(),
        neighbors: k,
    })
}

/// Indices of the `k` points nearest `points[i]` (itself included), ties
/// broken by lower index.
pub fn nearest(points: &[Point], i: usize, k: usize) -> Vec<usize> {
    let mut order: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(j, p)| (distance(&points[i], p), j))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    order.into_iter().take(k).map(|(_, j)| j).collect()
}

/// Solve a truncated system by sparse Gaussian elimination with partial
/// pivoting, followed by one step of iterative refinement.
pub fn solve_sparse(system: &SparseSystem) -> Result<Vec<f64>> {
    let lu = SparseLu::factor(&system.matrix)?;
    let mut x = lu.solve(&system.rhs);
    let ax = system.matrix.mul_vec(&x);
    let residual: Vec<f64> = system.rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    if max_abs(&residual) > 0.0 {
        for (xi, d) in x.iter_mut().zip(lu.solve(&residual)) {
            *xi += d;
        }
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(BkmError::Singular {
            context: "sparse",
            column: 0,
        });
    }
    Ok(x)
}

type SparseRow = Vec<(usize, f64)>;

/// Row-oriented elimination record: multipliers in application order, the
/// upper-triangular rows and the pivot order.
struct SparseLu {
    ops: Vec<(usize, usize, f64)>,
    upper: Vec<SparseRow>,
    order: Vec<usize>,
}

impl SparseLu {
    fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n {
            return Err(invalid(format!(
                "sparse solve needs a square matrix, got {}x{}",
                n,
                a.cols()
            )));
        }
        let mut rows: Vec<SparseRow> = (0..n)
            .map(|i| a.row(i).filter(|e| e.1 != 0.0).collect())
            .collect();
        let scale = rows
            .iter()
            .flat_map(|r| r.iter().map(|e| e.1.abs()))
            .fold(0.0, f64::max);
        let tiny = scale * f64::EPSILON * n as f64;
        let mut order: Vec<usize> = (0..n).collect();
        let mut ops = Vec::new();
        for k in 0..n {
            let mut best: Option<(usize, f64)> = None;
            for (pos, &r) in order.iter().enumerate().skip(k) {
                if let Some(&(c, v)) = rows[r].first() {
                    if c == k && best.is_none_or(|b| v.abs() > b.1) {
                        best = Some((pos, v.abs()));
                    }
                }
            }
            let (pos, size) = best.ok_or(BkmError::Singular {
                context: "sparse",
                column: k,
            })?;
            if size.is_nan() || size <= tiny {
                return Err(BkmError::Singular {
                    context: "sparse",
                    column: k,
                });
            }
            order.swap(k, pos);
            let pivot_row = order[k];
            let pivot = rows[pivot_row][0].1;
            for &r in &order[k + 1..] {
                let lead = match rows[r].first() {
                    Some(&(c, v)) if c == k => v,
                    _ => continue,
                };
                let factor = lead / pivot;
                let merged = axpy_row(&rows[r], &rows[pivot_row], -factor, k);
                rows[r] = merged;
                ops.push((r, pivot_row, factor));
            }
        }
        Ok(SparseLu {
            ops,
            upper: rows,
            order,
        })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.order.len();
        let mut y = b.to_vec();
        for &(target, pivot, factor) in &self.ops {
            y[target] -= factor * y[pivot];
        }
        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            let row = &self.upper[self.order[k]];
            let mut s = y[self.order[k]];
            for &(c, v) in &row[1..] {
                s -= v * x[c];
            }
            x[k] = s / row[0].1;
        }
        x
    }
}

/// `target + factor * source`, dropping column `eliminated` from the result.
fn axpy_row(
    target: &[(usize, f64)],
    source: &[(usize, f64)],
    factor: f64,
    eliminated: usize,
) -> SparseRow {
    let mut out = Vec::with_capacity(target.len() + source.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() || j < source.len() {
        let next = match (target.get(i), source.get(j)) {
            (Some(&(ct, vt)), Some(&(cs, vs))) if ct == cs => {
                i += 1;
                j += 1;
                (ct, vt + factor * vs)
            }
            (Some(&(ct, vt)), Some(&(cs, _))) if ct < cs => {
                i += 1;
                (ct, vt)
            }
            (Some(&(ct, vt)), None) => {
                i += 1;
                (ct, vt)
            }
            (_, Some(&(cs, vs))) => {
                j += 1;
                (cs, factor * vs)
            }
            (None, None) => unreachable!(),
        };
        if next.0 != eliminated && next.1 != 0.0 {
            out.push(next);
        }
    }
    out
}
