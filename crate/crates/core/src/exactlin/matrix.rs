//! Dense exact rational matrices.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rat::{fmt_rat, int, is_integral, parse_rat, Rat};
use super::LinAlgError;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        RatMatrix::scalar(n, Rat::one())
    }

    pub fn scalar(n: usize, c: Rat) -> Self {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c.clone();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Rat>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        RatMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self, LinAlgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinAlgError::Ragged);
        }
        Ok(RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Integer-entry convenience constructor; panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        RatMatrix::from_rows(rows.iter().map(|row| row.iter().map(|&v| int(v)).collect()).collect())
            .expect("ragged integer matrix")
    }

    pub fn from_columns(cols: &[Vec<Rat>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |v| v.len());
        let mut m = RatMatrix::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r);
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn diagonal(entries: &[Rat]) -> Self {
        let mut m = RatMatrix::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Rat] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<Rat> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Rat>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == RatMatrix::identity(self.rows)
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(is_integral)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Rat::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = &self.data[i * self.cols + j];
                    if !a.is_zero() && !x.is_zero() {
                        acc += a * x;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn commutes_with(&self, other: &RatMatrix) -> bool {
        &(self * other) == &(other * self)
    }

    pub fn trace(&self) -> Rat {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].clone())
            .fold(Rat::zero(), |a, b| a + b)
    }

    pub fn pow_u(&self, mut e: u64) -> RatMatrix {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = RatMatrix::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Integer power; negative exponents require invertibility.
    pub fn pow(&self, e: i64) -> Result<RatMatrix, LinAlgError> {
        if e >= 0 {
            Ok(self.pow_u(e as u64))
        } else {
            Ok(self.inverse()?.pow_u(e.unsigned_abs()))
        }
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = Rat::one() / m[(r, c)].clone();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let v = &m[(r, j)] * &f;
                        m[(i, j)] -= v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn det(&self) -> Result<Rat, LinAlgError> {
        if !self.is_square() {
            return Err(LinAlgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rat::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Ok(Rat::zero());
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let pivot = m[(c, c)].clone();
            det *= &pivot;
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] / &pivot;
                for j in c..n {
                    let v = &m[(c, j)] * &f;
                    m[(i, j)] -= v;
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<RatMatrix, LinAlgError> {
        if !self.is_square() {
            return Err(LinAlgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let aug = self.hstack(&RatMatrix::identity(n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(LinAlgError::Singular);
        }
        Ok(r.submatrix(0..n, n..2 * n))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let mut m = RatMatrix::zeros(rows.len(), cols.len());
        for (a, i) in rows.clone().enumerate() {
            for (b, j) in cols.clone().enumerate() {
                m[(a, b)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut m = RatMatrix::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (b, &j) in cols.iter().enumerate() {
                m[(i, b)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn hstack(&self, other: &RatMatrix) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut m = RatMatrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    pub fn vstack(&self, other: &RatMatrix) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        RatMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn block_diag(&self, other: &RatMatrix) -> Self {
        let mut m = RatMatrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m[(self.rows + i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    pub fn kron(&self, other: &RatMatrix) -> Self {
        let mut m = RatMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        m[(i * other.rows + k, j * other.cols + l)] = a * &other[(k, l)];
                    }
                }
            }
        }
        m
    }

    /// Column basis of the null space.
    pub fn kernel(&self) -> RatMatrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = RatMatrix::zeros(self.cols, free.len());
        for (b, &f) in free.iter().enumerate() {
            basis[(f, b)] = Rat::one();
            for (row, &p) in pivots.iter().enumerate() {
                basis[(p, b)] = -r[(row, f)].clone();
            }
        }
        basis
    }

    /// Column basis of the column space (a subset of the original columns).
    pub fn image(&self) -> RatMatrix {
        let (_, pivots) = self.rref();
        self.select_columns(&pivots)
    }

    /// A particular solution of `self · x = b`, with free variables set to zero.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(b.len(), self.rows);
        let col = RatMatrix::from_columns(&[b.to_vec()]);
        let (r, pivots) = self.hstack(&col).rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r[(row, self.cols)].clone();
        }
        Some(x)
    }

    /// Solves `self · X = B` column by column.
    pub fn solve_matrix(&self, b: &RatMatrix) -> Option<RatMatrix> {
        let cols: Option<Vec<Vec<Rat>>> = b.columns().iter().map(|c| self.solve(c)).collect();
        Some(RatMatrix::from_columns(&cols?))
    }

    /// Basis of the column space of `[self | other]`.
    pub fn span_sum(&self, other: &RatMatrix) -> RatMatrix {
        self.hstack(other).image()
    }

    /// Column basis of the intersection of two column spaces.
    pub fn span_intersection(&self, other: &RatMatrix) -> RatMatrix {
        if self.cols == 0 || other.cols == 0 {
            return RatMatrix::zeros(self.rows, 0);
        }
        let k = self.hstack(&other.scale(&-Rat::one())).kernel();
        let coeff = k.submatrix(0..self.cols, 0..k.cols());
        (self * &coeff).image()
    }

    /// True iff `v` lies in the column space.
    pub fn spans(&self, v: &[Rat]) -> bool {
        if self.cols == 0 {
            return v.iter().all(|x| x.is_zero());
        }
        self.solve(v).is_some()
    }

    /// Matrix of the restriction of `self` to an invariant subspace given
    /// by a column basis; `None` if the subspace is not invariant.
    pub fn restrict(&self, basis: &RatMatrix) -> Option<RatMatrix> {
        basis.solve_matrix(&(self * basis))
    }

    /// Completes the columns of `basis` (independent) to a basis of the full
    /// space, returning only the added columns (standard unit vectors).
    pub fn complement(&self) -> RatMatrix {
        let n = self.rows;
        let mut current = self.clone();
        let mut added = Vec::new();
        for i in 0..n {
            let mut e = vec![Rat::zero(); n];
            e[i] = Rat::one();
            if !current.spans(&e) {
                current = current.hstack(&RatMatrix::from_columns(&[e.clone()]));
                added.push(e);
            }
        }
        if added.is_empty() {
            RatMatrix::zeros(n, 0)
        } else {
            RatMatrix::from_columns(&added)
        }
    }

    /// `(self - I)^dim = 0`
    pub fn is_unipotent(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows;
        (self - &RatMatrix::identity(n)).pow_u(n as u64).is_zero()
    }

    pub fn is_nilpotent(&self) -> bool {
        self.is_square() && self.pow_u(self.rows as u64).is_zero()
    }

    pub fn max_denominator_bits(&self) -> u64 {
        self.data.iter().map(|x| x.denom().bits()).max().unwrap_or(0)
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Mul<&'a RatMatrix> for &'a RatMatrix {
    type Output = RatMatrix;
    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix shape mismatch in product");
        let mut out = RatMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs.data[k * rhs.cols + j];
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a RatMatrix> for &'a RatMatrix {
    type Output = RatMatrix;
    fn add(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a RatMatrix> for &'a RatMatrix {
    type Output = RatMatrix;
    fn sub(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &RatMatrix {
    type Output = RatMatrix;
    fn neg(self) -> RatMatrix {
        self.scale(&-Rat::one())
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", fmt_rat(&self[(i, j)]))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Serialized as an array of rows, each an array of `"p/q"` strings.
impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| fmt_rat(&self[(i, j)])).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<RatMatrix, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        let parsed = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|t| parse_rat(t).map_err(serde::de::Error::custom))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        RatMatrix::from_rows(parsed).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::rat::rat;

    #[test]
    fn inverse_and_det() {
        let m = RatMatrix::from_i64(&[&[3, 1], &[2, 1]]);
        assert_eq!(m.det().unwrap(), int(1));
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).is_identity());
        let s = RatMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(s.inverse(), Err(LinAlgError::Singular));
        assert_eq!(s.det().unwrap(), int(0));
    }

    #[test]
    fn kernel_image_solve() {
        let m = RatMatrix::from_i64(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = m.kernel();
        assert_eq!(k.cols(), 2);
        assert!((&m * &k).is_zero());
        assert_eq!(m.image().cols(), 1);
        let x = m.solve(&[int(1), int(2)]).unwrap();
        assert_eq!(m.apply(&x), vec![int(1), int(2)]);
        assert!(m.solve(&[int(1), int(3)]).is_none());
    }

    #[test]
    fn intersections_and_restriction() {
        let a = RatMatrix::from_i64(&[&[1, 0], &[0, 1], &[0, 0]]);
        let b = RatMatrix::from_i64(&[&[0, 0], &[1, 0], &[0, 1]]);
        let i = a.span_intersection(&b);
        assert_eq!(i.cols(), 1);
        assert!(i[(0, 0)].is_zero() && i[(2, 0)].is_zero());
        assert_eq!(a.span_sum(&b).cols(), 3);
        let rot = RatMatrix::from_i64(&[&[0, -1, 0], &[1, 0, 0], &[0, 0, 5]]);
        let r = rot.restrict(&a).unwrap();
        assert_eq!(r, RatMatrix::from_i64(&[&[0, -1], &[1, 0]]));
        assert!(rot.restrict(&b).is_none());
    }

    #[test]
    fn powers_and_unipotence() {
        let j = RatMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert_eq!(j.pow(-3).unwrap(), RatMatrix::from_i64(&[&[1, -3], &[0, 1]]));
        assert!(j.is_unipotent());
        let r = RatMatrix::from_rows(vec![vec![int(0), int(-1)], vec![int(1), rat(6, 5)]]).unwrap();
        assert!(!r.is_unipotent());
        assert_eq!(r.to_string(), "[[0,-1],[1,6/5]]");
    }

    #[test]
    fn json_roundtrip() {
        let r = RatMatrix::from_rows(vec![vec![int(0), int(-1)], vec![int(1), rat(6, 5)]]).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(text, r#"[["0","-1"],["1","6/5"]]"#);
        let back: RatMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
