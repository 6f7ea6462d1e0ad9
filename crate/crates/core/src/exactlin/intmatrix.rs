//! Arbitrary-precision integer matrices with Hermite and Smith normal forms.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::matrix::RatMatrix;
use super::rat::Rat;
use super::LinAlgError;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = IntMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged integer matrix");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = BigInt::from(*v);
            }
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged integer matrix");
            data.extend(row);
        }
        IntMatrix { rows: r, cols, data }
    }

    pub fn from_vec_rows(rows: &[Vec<i64>], cols: usize) -> Self {
        IntMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
            cols,
        )
    }

    /// Fails unless every entry is an integer.
    pub fn try_from_rat(m: &RatMatrix) -> Result<Self, LinAlgError> {
        if !m.is_integral() {
            return Err(LinAlgError::NotIntegral);
        }
        let mut out = IntMatrix::zeros(m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out[(i, j)] = m[(i, j)].numer().clone();
            }
        }
        Ok(out)
    }

    pub fn to_rat(&self) -> RatMatrix {
        RatMatrix::from_vec(
            self.rows,
            self.cols,
            self.data.iter().map(|v| Rat::from_integer(v.clone())).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn row_i64(&self, i: usize) -> Vec<i64> {
        self.row(i)
            .iter()
            .map(|v| v.to_i64().expect("lattice entry exceeds i64"))
            .collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn hstack(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut m = IntMatrix::zeros(self.rows, self.cols + other.cols);
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

    pub fn vstack(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        (0..self.cols).all(|j| self[(i, j)].is_zero())
    }

    /// Drops all-zero rows.
    pub fn nonzero_rows(&self) -> IntMatrix {
        let rows: Vec<Vec<BigInt>> = (0..self.rows)
            .filter(|&i| !self.is_zero_row(i))
            .map(|i| self.row(i))
            .collect();
        IntMatrix::from_rows(rows, self.cols)
    }

    pub fn select_rows(&self, idx: &[usize]) -> IntMatrix {
        IntMatrix::from_rows(idx.iter().map(|&i| self.row(i)).collect(), self.cols)
    }

    /// Bareiss fraction-free determinant.
    pub fn det(&self) -> Result<BigInt, LinAlgError> {
        if self.rows != self.cols {
            return Err(LinAlgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !m[(i, k)].is_zero()) else {
                    return Ok(BigInt::zero());
                };
                m.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)]) / &prev;
                    m[(i, j)] = v;
                }
            }
            prev = m[(k, k)].clone();
        }
        Ok(sign * &m[(n - 1, n - 1)])
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += factor · row[source]
    fn add_row(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self[(source, j)] * factor;
            self[(target, j)] += v;
        }
    }

    fn add_col(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self[(i, source)] * factor;
            self[(i, target)] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.det().map(|d| d.abs().is_one()).unwrap_or(false)
    }

    /// Row-style Hermite normal form. The right factor `U` is unimodular
    /// and `H = U · self`; `H` is upper echelon with positive pivots, the
    /// entries above each pivot reduced into `[0, pivot)`, zero rows last.
    pub fn hermite_normal_form(&self) -> (IntMatrix, IntMatrix) {
        let mut h = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            loop {
                let mut best: Option<usize> = None;
                for i in r..self.rows {
                    if h[(i, c)].is_zero() {
                        continue;
                    }
                    if best.map_or(true, |b| h[(i, c)].abs() < h[(b, c)].abs()) {
                        best = Some(i);
                    }
                }
                let Some(p) = best else { break };
                h.swap_rows(r, p);
                u.swap_rows(r, p);
                let mut done = true;
                for i in r + 1..self.rows {
                    if h[(i, c)].is_zero() {
                        continue;
                    }
                    let q = -h[(i, c)].div_floor(&h[(r, c)]);
                    h.add_row(i, r, &q);
                    u.add_row(i, r, &q);
                    if !h[(i, c)].is_zero() {
                        done = false;
                    }
                }
                if done {
                    break;
                }
            }
            if h[(r, c)].is_zero() {
                continue;
            }
            if h[(r, c)].is_negative() {
                h.negate_row(r);
                u.negate_row(r);
            }
            for i in 0..r {
                let q = -h[(i, c)].div_floor(&h[(r, c)]);
                h.add_row(i, r, &q);
                u.add_row(i, r, &q);
            }
            r += 1;
        }
        (h, u)
    }

    /// Basis (as rows) of the lattice spanned by the rows, in HNF.
    pub fn row_lattice_basis(&self) -> IntMatrix {
        self.hermite_normal_form().0.nonzero_rows()
    }

    /// `S = U · self · V` with `S` diagonal, each diagonal entry dividing
    /// the next, and `U`, `V` unimodular. Returns `(S, U, V)`.
    pub fn smith_normal_form(&self) -> (IntMatrix, IntMatrix, IntMatrix) {
        let mut s = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut v = IntMatrix::identity(self.cols);
        let n = self.rows.min(self.cols);
        let mut t = 0;
        while t < n {
            // smallest nonzero entry in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..self.rows {
                for j in t..self.cols {
                    if s[(i, j)].is_zero() {
                        continue;
                    }
                    if best.map_or(true, |(bi, bj)| s[(i, j)].abs() < s[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..self.rows {
                if s[(i, t)].is_zero() {
                    continue;
                }
                let q = -s[(i, t)].div_floor(&s[(t, t)]);
                s.add_row(i, t, &q);
                u.add_row(i, t, &q);
                if !s[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..self.cols {
                if s[(t, j)].is_zero() {
                    continue;
                }
                let q = -s[(t, j)].div_floor(&s[(t, t)]);
                s.add_col(j, t, &q);
                v.add_col(j, t, &q);
                if !s[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into row t and retry
            let pivot = s[(t, t)].clone();
            let mut offending = None;
            'search: for i in t + 1..self.rows {
                for j in t + 1..self.cols {
                    if !s[(i, j)].is_multiple_of(&pivot) {
                        offending = Some(i);
                        break 'search;
                    }
                }
            }
            if let Some(i) = offending {
                let one = BigInt::one();
                s.add_row(t, i, &one);
                u.add_row(t, i, &one);
                continue;
            }
            if s[(t, t)].is_negative() {
                s.negate_row(t);
                u.negate_row(t);
            }
            t += 1;
        }
        (s, u, v)
    }

    /// Diagonal of the Smith form (length `min(rows, cols)`).
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let (s, _, _) = self.smith_normal_form();
        (0..self.rows.min(self.cols)).map(|i| s[(i, i)].clone()).collect()
    }

    /// ℤ-basis (as rows) of `{ m ∈ ℤ^cols : self · m = 0 }`.
    pub fn integer_kernel(&self) -> IntMatrix {
        let (h, u) = self.transpose().hermite_normal_form();
        let rows: Vec<usize> = (0..h.rows()).filter(|&i| h.is_zero_row(i)).collect();
        u.select_rows(&rows).row_lattice_basis_or_empty(self.cols)
    }

    fn row_lattice_basis_or_empty(&self, cols: usize) -> IntMatrix {
        if self.rows == 0 {
            IntMatrix::zeros(0, cols)
        } else {
            self.row_lattice_basis()
        }
    }

    /// `|det|` of a full-rank square lattice basis, i.e. the index in ℤ^n.
    pub fn lattice_index(&self) -> Option<BigInt> {
        if self.rows != self.cols {
            return None;
        }
        let d = self.det().ok()?.abs();
        if d.is_zero() {
            None
        } else {
            Some(d)
        }
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Mul<&'a IntMatrix> for &'a IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix shape mismatch in product");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * &rhs.data[k * rhs.cols + j];
                }
            }
        }
        out
    }
}

impl fmt::Display for IntMatrix {
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
                write!(f, "{}", self[(i, j)])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self
            .to_rows()
            .iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<IntMatrix, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        let cols = rows.first().map_or(0, |r| r.len());
        let parsed = rows
            .iter()
            .map(|r| {
                if r.len() != cols {
                    return Err(serde::de::Error::custom("ragged integer matrix"));
                }
                r.iter()
                    .map(|t| t.parse::<BigInt>().map_err(serde::de::Error::custom))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntMatrix::from_rows(parsed, cols))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_hnf(h: &IntMatrix) -> bool {
        let mut last_pivot: Option<usize> = None;
        let mut seen_zero = false;
        for i in 0..h.rows() {
            let p = (0..h.cols()).find(|&j| !h[(i, j)].is_zero());
            match p {
                None => seen_zero = true,
                Some(p) => {
                    if seen_zero || last_pivot.is_some_and(|lp| p <= lp) || h[(i, p)].is_negative() {
                        return false;
                    }
                    for k in 0..i {
                        if h[(k, p)].is_negative() || h[(k, p)] >= h[(i, p)] {
                            return false;
                        }
                    }
                    last_pivot = Some(p);
                }
            }
        }
        true
    }

    #[test]
    fn hnf_of_alpha0_minus_identity() {
        let m = IntMatrix::from_i64(&[&[2, 1], &[2, 0]]);
        let (h, u) = m.hermite_normal_form();
        assert!(is_hnf(&h));
        assert!(u.is_unimodular());
        assert_eq!(&u * &m, h);
        // index 2 sublattice: product of pivots
        assert_eq!(h[(0, 0)].clone() * &h[(1, 1)], BigInt::from(2));
        assert_eq!(h, IntMatrix::from_i64(&[&[2, 0], &[0, 1]]));
    }

    #[test]
    fn hnf_trivial_cases() {
        let i = IntMatrix::identity(3);
        let (h, u) = i.hermite_normal_form();
        assert_eq!(h, i);
        assert_eq!(u, i);
        let z = IntMatrix::zeros(2, 3);
        let (h, u) = z.hermite_normal_form();
        assert_eq!(h, z);
        assert_eq!(u, IntMatrix::identity(2));
    }

    #[test]
    fn smith_of_alpha0_minus_identity() {
        let m = IntMatrix::from_i64(&[&[2, 1], &[2, 0]]);
        let (s, u, v) = m.smith_normal_form();
        assert_eq!(s, IntMatrix::from_i64(&[&[1, 0], &[0, 2]]));
        assert_eq!(&(&u * &m) * &v, s);
        assert!(u.is_unimodular() && v.is_unimodular());
    }

    #[test]
    fn integer_kernel_basics() {
        let a = IntMatrix::from_i64(&[&[2, 4, 6]]);
        let k = a.integer_kernel();
        assert_eq!(k.rows(), 2);
        for i in 0..k.rows() {
            let s: BigInt = (0..3).map(|j| &a[(0, j)] * &k[(i, j)]).sum();
            assert!(s.is_zero());
        }
        // index of the kernel lattice in its saturation is 1
        let full = k.vstack(&IntMatrix::from_i64(&[&[1, 0, 0]]));
        assert!(full.det().unwrap().abs().is_one());
    }

    #[test]
    fn bareiss_det() {
        let m = IntMatrix::from_i64(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 2]]);
        assert_eq!(m.det().unwrap(), BigInt::from(6));
        let z = IntMatrix::from_i64(&[&[0, 1], &[0, 2]]);
        assert_eq!(z.det().unwrap(), BigInt::zero());
        let swap = IntMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(swap.det().unwrap(), BigInt::from(-1));
    }
}
