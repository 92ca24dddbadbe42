//! Dense matrices over a [`Field`] with labeled rows and columns.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Elem, Field, Sesquimorphism};

/// A dense matrix whose rows and columns carry integer labels.
///
/// Labels default to `0..n`. Sub-matrix extraction is by label, so a block
/// cut out of an adjacency matrix keeps the vertex indices of the ambient graph.
#[derive(Clone, PartialEq, Eq)]
pub struct FMatrix {
    field: Field,
    rows: Vec<usize>,
    cols: Vec<usize>,
    data: Vec<Elem>,
}

impl FMatrix {
    pub fn zeros(field: &Field, nrows: usize, ncols: usize) -> Self {
        FMatrix {
            field: field.clone(),
            rows: (0..nrows).collect(),
            cols: (0..ncols).collect(),
            data: vec![0; nrows * ncols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_rows(field: &Field, nrows: usize, ncols: usize, data: Vec<Elem>) -> Result<Self> {
        if data.len() != nrows * ncols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {nrows}x{ncols} matrix",
                data.len()
            )));
        }
        if let Some(&bad) = data.iter().find(|&&v| !field.contains(v)) {
            return Err(Error::BadElement(bad));
        }
        Ok(FMatrix {
            field: field.clone(),
            rows: (0..nrows).collect(),
            cols: (0..ncols).collect(),
            data,
        })
    }

    /// A `1 x n` matrix.
    pub fn row_vector(field: &Field, v: &[Elem]) -> Result<Self> {
        Self::from_rows(field, 1, v.len(), v.to_vec())
    }

    pub fn with_labels(mut self, rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        if rows.len() != self.nrows() || cols.len() != self.ncols() {
            return Err(Error::DimensionMismatch("label count differs from shape".into()));
        }
        self.rows = rows;
        self.cols = cols;
        Ok(self)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows(), self.ncols())
    }

    pub fn row_labels(&self) -> &[usize] {
        &self.rows
    }

    pub fn col_labels(&self) -> &[usize] {
        &self.cols
    }

    pub fn entries(&self) -> &[Elem] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.cols.len() + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        let c = self.cols.len();
        self.data[i * c + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        let c = self.cols.len();
        &self.data[i * c..(i + 1) * c]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    /// Rank by Gaussian elimination, pivoting on the first nonzero entry.
    pub fn rank(&self) -> usize {
        let mut buf = self.data.clone();
        rank_in_place(&self.field, &mut buf, self.nrows(), self.ncols())
    }

    /// Positions (not labels) of the given labels in `labels`.
    fn positions(labels: &[usize], wanted: &[usize]) -> Result<Vec<usize>> {
        wanted
            .iter()
            .map(|w| {
                labels
                    .iter()
                    .position(|l| l == w)
                    .ok_or(Error::UnknownLabel(*w))
            })
            .collect()
    }

    /// `M[X][Y]` by label. Labels are kept in the order given.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        let ri = Self::positions(&self.rows, rows)?;
        let ci = Self::positions(&self.cols, cols)?;
        Ok(self.select(&ri, &ci))
    }

    /// Sub-matrix by row and column positions.
    pub fn select(&self, ri: &[usize], ci: &[usize]) -> Self {
        let mut data = Vec::with_capacity(ri.len() * ci.len());
        for &i in ri {
            for &j in ci {
                data.push(self.get(i, j));
            }
        }
        FMatrix {
            field: self.field.clone(),
            rows: ri.iter().map(|&i| self.rows[i]).collect(),
            cols: ci.iter().map(|&j| self.cols[j]).collect(),
            data,
        }
    }

    pub fn transpose(&self) -> Self {
        let (r, c) = self.shape();
        let mut data = vec![0; r * c];
        for i in 0..r {
            for j in 0..c {
                data[j * r + i] = self.get(i, j);
            }
        }
        FMatrix {
            field: self.field.clone(),
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            data,
        }
    }

    /// Entrywise `sigma`.
    pub fn apply_sigma(&self, sigma: &Sesquimorphism) -> Result<Self> {
        if *sigma.field() != self.field {
            return Err(Error::FieldMismatch);
        }
        Ok(self.map(|v| sigma.apply(v)))
    }

    pub fn map(&self, f: impl Fn(Elem) -> Elem) -> Self {
        FMatrix {
            field: self.field.clone(),
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, c: Elem) -> Self {
        let f = &self.field;
        self.map(|v| f.mul(c, v))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if other.field != self.field {
            return Err(Error::FieldMismatch);
        }
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(format!(
                "cannot add {:?} and {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let f = &self.field;
        Ok(FMatrix {
            field: f.clone(),
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if other.field != self.field {
            return Err(Error::FieldMismatch);
        }
        if self.ncols() != other.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {:?} by {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let f = &self.field;
        let (r, k, c) = (self.nrows(), self.ncols(), other.ncols());
        let mut data = vec![0; r * c];
        for i in 0..r {
            for t in 0..k {
                let a = self.get(i, t);
                if a == 0 {
                    continue;
                }
                for j in 0..c {
                    let cell = &mut data[i * c + j];
                    *cell = f.add(*cell, f.mul(a, other.get(t, j)));
                }
            }
        }
        Ok(FMatrix {
            field: f.clone(),
            rows: self.rows.clone(),
            cols: other.cols.clone(),
            data,
        })
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.ncols() != other.ncols() {
            return Err(Error::DimensionMismatch("vstack column counts differ".into()));
        }
        let mut m = self.clone();
        m.rows.extend(&other.rows);
        m.data.extend(&other.data);
        Ok(m)
    }

    /// Positions of the leftmost maximal set of linearly independent rows.
    pub fn row_basis(&self) -> Vec<usize> {
        let f = &self.field;
        let c = self.ncols();
        // reduced rows of the basis together with their pivot column
        let mut reduced: Vec<(usize, Vec<Elem>)> = Vec::new();
        let mut out = Vec::new();
        for i in 0..self.nrows() {
            let mut v = self.row(i).to_vec();
            for (p, r) in &reduced {
                let coef = v[*p];
                if coef != 0 {
                    for j in 0..c {
                        v[j] = f.sub(v[j], f.mul(coef, r[j]));
                    }
                }
            }
            if let Some(p) = v.iter().position(|&x| x != 0) {
                let inv = f.inv(v[p]).expect("pivot is nonzero");
                for x in v.iter_mut() {
                    *x = f.mul(*x, inv);
                }
                for (_, r) in reduced.iter_mut() {
                    let coef = r[p];
                    if coef != 0 {
                        for j in 0..c {
                            r[j] = f.sub(r[j], f.mul(coef, v[j]));
                        }
                    }
                }
                reduced.push((p, v));
                out.push(i);
            }
        }
        out
    }

    /// Coordinates `b` with `b * self = v`, if `v` lies in the row space.
    /// Rows of `self` must be linearly independent for `b` to be unique.
    pub fn solve_left(&self, v: &[Elem]) -> Option<Vec<Elem>> {
        let f = &self.field;
        let (r, c) = self.shape();
        assert_eq!(v.len(), c, "right-hand side has the wrong length");
        // Solve (self^T) b^T = v^T: augmented c x (r + 1) system.
        let w = r + 1;
        let mut a = vec![0; c * w];
        for j in 0..c {
            for i in 0..r {
                a[j * w + i] = self.get(i, j);
            }
            a[j * w + r] = v[j];
        }
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..r {
            let Some(p) = (row..c).find(|&k| a[k * w + col] != 0) else {
                continue;
            };
            for t in 0..w {
                a.swap(row * w + t, p * w + t);
            }
            let inv = f.inv(a[row * w + col]).expect("pivot is nonzero");
            for t in 0..w {
                a[row * w + t] = f.mul(a[row * w + t], inv);
            }
            for k in 0..c {
                if k != row {
                    let coef = a[k * w + col];
                    if coef != 0 {
                        for t in 0..w {
                            a[k * w + t] = f.sub(a[k * w + t], f.mul(coef, a[row * w + t]));
                        }
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        if (row..c).any(|k| a[k * w + r] != 0) {
            return None;
        }
        let mut b = vec![0; r];
        for (k, &col) in pivots.iter().enumerate() {
            b[col] = a[k * w + r];
        }
        Some(b)
    }

    /// Parses the literal `[r c; e00 e01 ...; e10 ...]`.
    pub fn parse_literal(field: &Field, text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse {
            line: 0,
            msg: format!("matrix literal {text:?}: {msg}"),
        };
        let inner = text
            .trim()
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| bad("expected brackets"))?;
        let mut parts = inner.split(';');
        let head: Vec<&str> = parts
            .next()
            .unwrap_or("")
            .split_whitespace()
            .collect();
        let [r, c] = head.as_slice() else {
            return Err(bad("expected a `rows cols` header"));
        };
        let r: usize = r.parse().map_err(|_| bad("bad row count"))?;
        let c: usize = c.parse().map_err(|_| bad("bad column count"))?;
        let mut data = Vec::with_capacity(r * c);
        let mut seen_rows = 0;
        for part in parts {
            let vals: Vec<&str> = part.split_whitespace().collect();
            if vals.is_empty() {
                continue;
            }
            if vals.len() != c {
                return Err(bad("row length differs from the header"));
            }
            for v in vals {
                data.push(v.parse::<Elem>().map_err(|_| bad("bad element code"))?);
            }
            seen_rows += 1;
        }
        // rows of a matrix without columns are empty and cannot be counted
        if seen_rows != r && c > 0 {
            return Err(bad("row count differs from the header"));
        }
        Self::from_rows(field, r, c, data)
    }

    /// Inverse of [`FMatrix::parse_literal`].
    pub fn to_literal(&self) -> String {
        let mut s = format!("[{} {};", self.nrows(), self.ncols());
        for i in 0..self.nrows() {
            for v in self.row(i) {
                s.push(' ');
                s.push_str(&v.to_string());
            }
            if i + 1 < self.nrows() {
                s.push(';');
            }
        }
        s.push(']');
        s
    }
}

/// Rank of a row-major `r x c` buffer, destroying it.
pub(crate) fn rank_in_place(f: &Field, a: &mut [Elem], r: usize, c: usize) -> usize {
    let mut rank = 0;
    for col in 0..c {
        if rank == r {
            break;
        }
        let Some(p) = (rank..r).find(|&i| a[i * c + col] != 0) else {
            continue;
        };
        if p != rank {
            for t in col..c {
                a.swap(p * c + t, rank * c + t);
            }
        }
        let inv = f.inv(a[rank * c + col]).expect("pivot is nonzero");
        for i in rank + 1..r {
            let coef = a[i * c + col];
            if coef == 0 {
                continue;
            }
            let m = f.mul(coef, inv);
            for t in col..c {
                let v = f.sub(a[i * c + t], f.mul(m, a[rank * c + t]));
                a[i * c + t] = v;
            }
        }
        rank += 1;
    }
    rank
}

impl fmt::Debug for FMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.field.name(), self.to_literal())
    }
}
