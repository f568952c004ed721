//! Small dense linear algebra for the stacked QP: row-major matrices and an
//! LDL' factorization.
//!
//! The KKT matrices handled here are symmetric quasi-definite (positive
//! block plus regularization on top, strictly negative block below), for
//! which LDL' without pivoting exists and is stable; sizes stay below ~100,
//! so a dense factorization is entirely adequate.

use alloc::vec;
use alloc::vec::Vec;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl Mat {
    /// Zero matrix of the given shape.
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, data: vec![0.0; nrows * ncols] }
    }

    /// Number of rows.
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    /// Number of columns.
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Entry at `(r, c)`.
    #[inline]
    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.ncols + c]
    }

    /// Mutable entry at `(r, c)`.
    #[inline]
    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.data[r * self.ncols + c]
    }

    /// `out = self * x`.
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(out.len(), self.nrows);
        for r in 0..self.nrows {
            let row = &self.data[r * self.ncols..(r + 1) * self.ncols];
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            out[r] = acc;
        }
    }

    /// `out = self' * y`.
    pub fn matvec_t(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.nrows);
        debug_assert_eq!(out.len(), self.ncols);
        out.fill(0.0);
        for r in 0..self.nrows {
            let row = &self.data[r * self.ncols..(r + 1) * self.ncols];
            let yr = y[r];
            if yr != 0.0 {
                for (o, a) in out.iter_mut().zip(row) {
                    *o += a * yr;
                }
            }
        }
    }

    /// Largest absolute asymmetry `|A - A'|`; square matrices only.
    pub fn max_asymmetry(&self) -> f64 {
        debug_assert_eq!(self.nrows, self.ncols);
        let mut worst: f64 = 0.0;
        for r in 0..self.nrows {
            for c in (r + 1)..self.ncols {
                worst = worst.max((self.at(r, c) - self.at(c, r)).abs());
            }
        }
        worst
    }
}

/// LDL' factors of a symmetric quasi-definite matrix.
pub(crate) struct Ldlt {
    n: usize,
    /// Unit lower-triangular factor, packed row-major (diagonal implied 1).
    lower: Vec<f64>,
    diag: Vec<f64>,
}

impl Ldlt {
    /// Factors `a` (assumed symmetric; only the lower triangle is read).
    /// Returns `None` on a vanishing pivot, which a quasi-definite input
    /// cannot produce.
    pub(crate) fn factor(a: &Mat) -> Option<Self> {
        let n = a.nrows();
        debug_assert_eq!(n, a.ncols());
        let mut lower = vec![0.0; n * n];
        let mut diag = vec![0.0; n];
        for j in 0..n {
            let mut d = a.at(j, j);
            for k in 0..j {
                let l_jk = lower[j * n + k];
                d -= l_jk * l_jk * diag[k];
            }
            if d.abs() < 1e-300 {
                return None;
            }
            diag[j] = d;
            for i in (j + 1)..n {
                let mut v = a.at(i, j);
                for k in 0..j {
                    v -= lower[i * n + k] * lower[j * n + k] * diag[k];
                }
                lower[i * n + j] = v / d;
            }
        }
        Some(Self { n, lower, diag })
    }

    /// Solves `A x = b` in place.
    pub(crate) fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        for i in 0..n {
            let mut v = b[i];
            for k in 0..i {
                v -= self.lower[i * n + k] * b[k];
            }
            b[i] = v;
        }
        for i in 0..n {
            b[i] /= self.diag[i];
        }
        for i in (0..n).rev() {
            let mut v = b[i];
            for k in (i + 1)..n {
                v -= self.lower[k * n + i] * b[k];
            }
            b[i] = v;
        }
    }
}

pub(crate) fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ldlt_solves_quasi_definite_system() {
        // [[4, 1, 2], [1, 3, 0], [2, 0, -5]] is quasi-definite.
        let mut a = Mat::zeros(3, 3);
        let entries = [
            (0, 0, 4.0),
            (0, 1, 1.0),
            (0, 2, 2.0),
            (1, 0, 1.0),
            (1, 1, 3.0),
            (2, 0, 2.0),
            (2, 2, -5.0),
        ];
        for (r, c, v) in entries {
            *a.at_mut(r, c) = v;
        }
        *a.at_mut(1, 2) = 0.0;
        *a.at_mut(2, 1) = 0.0;
        let f = Ldlt::factor(&a).expect("factorizable");
        let x_true = [1.0, -2.0, 0.5];
        let mut b = [0.0; 3];
        a.matvec(&x_true, &mut b);
        f.solve_in_place(&mut b);
        for (got, want) in b.iter().zip(&x_true) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn matvec_transpose_agrees_with_explicit_transpose() {
        let mut a = Mat::zeros(2, 3);
        for (i, v) in [1.0, 2.0, 3.0, 4.0, 5.0, 6.0].iter().enumerate() {
            a.data[i] = *v;
        }
        let mut out = [0.0; 3];
        a.matvec_t(&[1.0, -1.0], &mut out);
        assert_eq!(out, [-3.0, -3.0, -3.0]);
    }
}
