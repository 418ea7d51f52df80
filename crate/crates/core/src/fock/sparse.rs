use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::{Error, Result};

/// Square sparse matrix in row-compressed form.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    dim: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl FockOperator {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            rows: vec![Vec::new(); dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self {
            dim: values.len(),
            rows: values
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    if v == 0.0 {
                        Vec::new()
                    } else {
                        vec![(i, Complex64::new(v, 0.0))]
                    }
                })
                .collect(),
        }
    }

    /// Build from `(row, col, value)` triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(
        dim: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Complex64)>,
    ) -> Self {
        let mut acc: Vec<BTreeMap<usize, Complex64>> = vec![BTreeMap::new(); dim];
        for (i, j, v) in triplets {
            *acc[i].entry(j).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        Self {
            dim,
            rows: acc
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .filter(|(_, v)| *v != Complex64::new(0.0, 0.0))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.rows[i]
            .iter()
            .find(|(c, _)| *c == j)
            .map_or(Complex64::new(0.0, 0.0), |(_, v)| *v)
    }

    pub fn row(&self, i: usize) -> &[(usize, Complex64)] {
        &self.rows[i]
    }

    fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&(j, v)| (i, j, v)))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::SizeMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn matvec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.dim {
            return Err(Error::SizeMismatch {
                left: self.dim,
                right: x.len(),
            });
        }
        Ok(self
            .rows
            .iter()
            .map(|row| row.iter().map(|&(j, v)| v * x[j]).sum())
            .collect())
    }

    /// `self · other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let triplets = self.rows.iter().enumerate().flat_map(|(i, row)| {
            row.iter().flat_map(move |&(k, a)| {
                other.rows[k].iter().map(move |&(j, b)| (i, j, a * b))
            })
        });
        Ok(Self::from_triplets(self.dim, triplets))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::from_triplets(
            self.dim,
            self.triplets().chain(other.triplets()),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(i, j, v)| (i, j, v * s)))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(i, j, v)| (j, i, v.conj())))
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    /// `AB + BA`.
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.matmul(other)?.add(&other.matmul(self)?)
    }

    /// Largest entrywise `|a_ij - b_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self
            .sub(other)?
            .triplets()
            .fold(0.0, |m, (_, _, v)| m.max(v.norm())))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()).is_ok_and(|d| d <= tol)
    }

    /// Diagonal entries when the matrix has no off-diagonal entries.
    pub fn diagonal_values(&self) -> Option<Vec<f64>> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| match row.as_slice() {
                [] => Some(0.0),
                [(j, v)] if *j == i && v.im == 0.0 => Some(v.re),
                _ => None,
            })
            .collect()
    }

    /// `<x|A|y>`.
    pub fn sandwich(&self, x: &[Complex64], y: &[Complex64]) -> Result<Complex64> {
        let ay = self.matvec(y)?;
        Ok(x.iter().zip(&ay).map(|(a, b)| a.conj() * b).sum())
    }
}
