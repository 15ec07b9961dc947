use std::ops::Range;

use crate::error::{input_err, Result};

/// Dense real matrix in column-major order: entry `(r, c)` lives at
/// `data[c * rows + r]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Wraps a column-major buffer. Rejects empty shapes and non-finite entries.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return input_err(format!("matrix shape {rows}x{cols} is empty"));
        }
        if data.len() != rows * cols {
            return input_err(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            ));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return input_err(format!(
                "non-finite entry at ({}, {})",
                pos % rows,
                pos / rows
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_row_major(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != rows * cols {
            return input_err(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            ));
        }
        let mut col_major = vec![0.0; data.len()];
        for r in 0..rows {
            for c in 0..cols {
                col_major[c * rows + r] = data[r * cols + c];
            }
        }
        Self::from_col_major(rows, cols, col_major)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return input_err("ragged rows");
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::from_row_major(m, n, &flat)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix shape");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = *v;
        }
        m
    }

    /// Horizontal concatenation `[A_1 A_2 ...]`.
    pub fn hstack(blocks: &[&DenseMatrix]) -> Result<Self> {
        let Some(first) = blocks.first() else {
            return input_err("nothing to stack");
        };
        if blocks.iter().any(|b| b.rows != first.rows) {
            return input_err("row counts differ");
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let data = blocks.iter().flat_map(|b| b.data.iter().copied()).collect();
        Self::from_col_major(first.rows, cols, data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[c * self.rows + r]
    }

    pub fn as_col_major(&self) -> &[f64] {
        &self.data
    }

    pub fn into_col_major(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn col(&self, c: usize) -> &[f64] {
        &self.data[c * self.rows..(c + 1) * self.rows]
    }

    /// Contiguous view of the columns in `range`.
    #[inline]
    pub fn col_block(&self, range: Range<usize>) -> &[f64] {
        &self.data[range.start * self.rows..range.end * self.rows]
    }

    pub fn row(&self, r: usize) -> Vec<f64> {
        (0..self.cols).map(|c| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![0.0; self.data.len()];
        for c in 0..self.cols {
            for r in 0..self.rows {
                data[r * self.cols + c] = self.data[c * self.rows + r];
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// `A x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        let mut out = vec![0.0; self.rows];
        self.block_apply(0..self.cols, x, &mut out);
        out
    }

    /// `A^T y`.
    pub fn matvec_t(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        self.block_apply_t(0..self.cols, y, &mut out);
        out
    }

    /// `out = A[:, cols] v`.
    pub(crate) fn block_apply(&self, cols: Range<usize>, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), cols.len());
        out.fill(0.0);
        for (c, &vc) in cols.zip(v) {
            if vc == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.col(c)) {
                *o += a * vc;
            }
        }
    }

    /// `out = A[:, cols]^T y`.
    pub(crate) fn block_apply_t(&self, cols: Range<usize>, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(out.len(), cols.len());
        for (o, c) in out.iter_mut().zip(cols) {
            *o = super::dot(self.col(c), y);
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        super::norm2(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale_col(&mut self, c: usize, factor: f64) {
        let rows = self.rows;
        for v in &mut self.data[c * rows..(c + 1) * rows] {
            *v *= factor;
        }
    }
}
