// SPDX-License-Identifier: Apache-2.0

//! Square CSR matrices and the symmetric GCN propagation operator.

use ndarray::{Array2, ArrayView2};

use super::{CircuitGraph, GraphError};

/// Square sparse matrix in compressed-row form. Column indices within a row
/// are strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds an `n x n` matrix; duplicate coordinates are summed.
    pub fn from_entries(n: usize, entries: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut entries: Vec<_> = entries.into_iter().collect();
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; n + 1];
        let mut indices: Vec<usize> = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            assert!(r < n && c < n, "entry ({r}, {c}) outside {n}x{n}");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            last = Some((r, c));
            indptr[r + 1] += 1;
            indices.push(c);
            values.push(v);
        }
        for i in 0..n {
            indptr[i + 1] += indptr[i];
        }
        SparseMatrix {
            n,
            indptr,
            indices,
            values,
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[i]..self.indptr[i + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let span = self.indptr[i]..self.indptr[i + 1];
        match self.indices[span.clone()].binary_search(&j) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    /// Iterates all stored `(row, col, value)` triples in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    /// First coordinate where `M[i][j] != M[j][i]`, compared exactly.
    pub fn asymmetry(&self) -> Option<(usize, usize)> {
        self.entries()
            .find(|&(i, j, v)| self.get(j, i) != v)
            .map(|(i, j, _)| (i, j))
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetry().is_none()
    }

    /// `self * x`; each output row accumulates in column order.
    pub fn mul_dense(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        assert_eq!(x.nrows(), self.n, "row count mismatch");
        let mut out = Array2::<f64>::zeros((self.n, x.ncols()));
        for i in 0..self.n {
            let mut acc = out.row_mut(i);
            for (j, v) in self.row(i) {
                acc.scaled_add(v, &x.row(j));
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut d = Array2::zeros((self.n, self.n));
        for (i, j, v) in self.entries() {
            d[[i, j]] = v;
        }
        d
    }
}

/// Symmetrized 0/1 adjacency with zero diagonal.
pub fn adjacency_matrix(g: &CircuitGraph) -> SparseMatrix {
    let mut pairs = std::collections::BTreeSet::new();
    for &(u, v) in &g.edges {
        if u != v {
            pairs.insert((u, v));
            pairs.insert((v, u));
        }
    }
    SparseMatrix::from_entries(g.len(), pairs.into_iter().map(|(i, j)| (i, j, 1.0)))
}

/// `S = D̂^{-1/2} (A + I) D̂^{-1/2}` with `D̂` the degree matrix of `A + I`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedAdjacency {
    matrix: SparseMatrix,
    degrees: Vec<f64>,
}

impl NormalizedAdjacency {
    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn size(&self) -> usize {
        self.matrix.size()
    }

    /// Degrees of `A + I` (always at least 1).
    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn apply(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        self.matrix.mul_dense(x)
    }
}

pub fn normalize_adjacency(a: &SparseMatrix) -> Result<NormalizedAdjacency, GraphError> {
    for (i, j, v) in a.entries() {
        if v != 0.0 && (v != 1.0 || i == j) {
            return Err(GraphError::InvalidAdjacency {
                row: i,
                col: j,
                value: v,
            });
        }
    }
    if let Some((row, col)) = a.asymmetry() {
        return Err(GraphError::NonSymmetric { row, col });
    }
    let n = a.size();
    let degrees: Vec<f64> = (0..n)
        .map(|i| 1.0 + a.row(i).filter(|&(_, v)| v == 1.0).count() as f64)
        .collect();
    let mut entries = Vec::with_capacity(a.nnz() + n);
    for i in 0..n {
        entries.push((i, i, 1.0 / (degrees[i] * degrees[i]).sqrt()));
        for (j, v) in a.row(i) {
            if v == 1.0 {
                entries.push((i, j, 1.0 / (degrees[i] * degrees[j]).sqrt()));
            }
        }
    }
    Ok(NormalizedAdjacency {
        matrix: SparseMatrix::from_entries(n, entries),
        degrees,
    })
}
