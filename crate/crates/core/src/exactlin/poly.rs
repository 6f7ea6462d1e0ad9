//! Dense univariate polynomials over ℚ.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::matrix::RatMatrix;
use super::rat::{fmt_rat, int, parse_rat, Rat};

/// Coefficients in ascending degree; the leading coefficient is nonzero
/// unless the polynomial is zero (empty coefficient list).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn x() -> Self {
        Poly::from_ints(&[0, 1])
    }

    pub fn constant(c: Rat) -> Self {
        Poly::new(vec![c])
    }

    /// `c · x^n`
    pub fn monomial(c: Rat, n: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); n + 1];
        coeffs[n] = c;
        Poly::new(coeffs)
    }

    /// `x - root`
    pub fn linear(root: Rat) -> Self {
        Poly::new(vec![-root, Rat::one()])
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let lead = self.lead();
        self.scale(&(Rat::one() / lead))
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_one()
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Horner evaluation at a square matrix.
    pub fn eval_matrix(&self, m: &RatMatrix) -> RatMatrix {
        let n = m.rows();
        let mut acc = RatMatrix::zeros(n, n);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * m) + &RatMatrix::scalar(n, c.clone());
        }
        acc
    }

    /// `self(inner)`
    pub fn compose(&self, inner: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Poly::constant(c.clone());
        }
        acc
    }

    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let dd = divisor.degree().unwrap();
        let lead_inv = Rat::one() / divisor.lead();
        let mut rem = self.coeffs.clone();
        let Some(sd) = self.degree() else {
            return (Poly::zero(), Poly::zero());
        };
        if sd < dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Rat::zero(); sd - dd + 1];
        for i in (0..=sd - dd).rev() {
            let c = &rem[i + dd] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= &c * d;
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.div_rem(divisor).1
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.rem(self).is_zero()
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns `(g, s, t)` with `s·self + t·other = g`, `g` monic.
    pub fn ext_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s2 = &s0 - &(&q * &s1);
            let t2 = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = Rat::one() / r0.lead();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Inverse of `self` in `ℚ[x]/(modulus)`, if it exists.
    pub fn inverse_mod(&self, modulus: &Poly) -> Option<Poly> {
        let (g, s, _) = self.rem(modulus).ext_gcd(modulus);
        if g.is_one_poly() {
            Some(s.rem(modulus))
        } else {
            None
        }
    }

    pub fn is_one_poly(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn is_squarefree(&self) -> bool {
        if self.is_constant() {
            return true;
        }
        self.gcd(&self.derivative()).is_constant()
    }

    /// Product of the distinct monic irreducible factors (the radical).
    pub fn squarefree_part(&self) -> Poly {
        if self.is_constant() {
            return Poly::one();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// `x^deg · p(1/x)`
    pub fn reversed(&self) -> Poly {
        let mut c = self.coeffs.clone();
        c.reverse();
        Poly::new(c)
    }

    /// Self-reciprocal up to a scalar: same root multiset under `λ ↦ 1/λ`.
    pub fn is_reciprocal(&self) -> bool {
        if self.is_zero() || self.coeff(0).is_zero() {
            return false;
        }
        self.monic() == self.reversed().monic()
    }

    /// For a reciprocal polynomial of even degree `2d`, the unique `g` of
    /// degree `d` with `p(x) = x^d · g(x + 1/x)`.
    pub fn trace_polynomial(&self) -> Option<Poly> {
        let deg = self.degree()?;
        if deg % 2 != 0 || !self.is_reciprocal() {
            return None;
        }
        let d = deg / 2;
        // (x + 1/x)^j expanded symmetrically; peel off from the top.
        let mut work: Vec<Rat> = self.coeffs.clone();
        let mut g = vec![Rat::zero(); d + 1];
        for j in (0..=d).rev() {
            // coefficient of x^{d+j} in work equals g_j
            let c = work[d + j].clone();
            g[j] = c.clone();
            if c.is_zero() {
                continue;
            }
            for (i, b) in binomials(j).into_iter().enumerate() {
                // x^d (x + 1/x)^j contributes binom(j,i) x^{d + j - 2i}
                let idx = d + j - 2 * i;
                work[idx] -= &c * &b;
            }
        }
        if work.iter().any(|w| !w.is_zero()) {
            return None;
        }
        Some(Poly::new(g))
    }

    /// Sturm sequence of a squarefree polynomial.
    pub fn sturm_sequence(&self) -> Vec<Poly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(-r);
        }
        seq
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_real_roots(&self, a: &Rat, b: &Rat) -> usize {
        let sf = self.squarefree_part();
        if sf.is_constant() {
            return 0;
        }
        let seq = sf.sturm_sequence();
        let va = sign_changes(seq.iter().map(|p| p.eval(a)));
        let vb = sign_changes(seq.iter().map(|p| p.eval(b)));
        va.saturating_sub(vb)
    }

    /// Number of distinct real roots on the whole line.
    pub fn count_all_real_roots(&self) -> usize {
        let bound = self.cauchy_bound() + Rat::one();
        self.count_real_roots(&-bound.clone(), &bound)
    }

    /// `1 + max |a_i / a_n|`, an upper bound on the modulus of every root.
    pub fn cauchy_bound(&self) -> Rat {
        let lead = self.lead().abs();
        let mut best = Rat::zero();
        if let Some(d) = self.degree() {
            for c in &self.coeffs[..d] {
                let r = c.abs() / &lead;
                if r > best {
                    best = r;
                }
            }
        }
        best + Rat::one()
    }

    /// Coefficients scaled to coprime integers with positive leading term.
    pub fn primitive_integer_coeffs(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let mut lcm = BigInt::one();
        for c in &self.coeffs {
            lcm = lcm.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c.numer() * &lcm) / c.denom()).collect();
        let mut g = BigInt::zero();
        for v in &ints {
            g = g.gcd(v);
        }
        let sign = if self.lead().is_negative() { -1 } else { 1 };
        ints.into_iter().map(|v| v / &g * sign).collect()
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        use num_traits::ToPrimitive;
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

fn sign_changes(values: impl Iterator<Item = Rat>) -> usize {
    let mut last: Option<bool> = None;
    let mut changes = 0;
    for v in values {
        if v.is_zero() {
            continue;
        }
        let pos = v.is_positive();
        if let Some(prev) = last {
            if prev != pos {
                changes += 1;
            }
        }
        last = Some(pos);
    }
    changes
}

fn binomials(n: usize) -> Vec<Rat> {
    let mut row = vec![Rat::one()];
    for k in 0..n {
        let next = row[k].clone() * int((n - k) as i64) / int(k as i64 + 1);
        row.push(next);
    }
    row
}

/// Euler's totient.
pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// All `n` with `φ(n) = d`. Since `φ(n) ≥ √(n/2)`, searching `n ≤ 2d²` is complete.
pub fn phi_preimage(d: u64) -> Vec<u64> {
    let bound = (2 * d * d).max(2);
    (1..=bound).filter(|&n| euler_phi(n) == d).collect()
}

/// The n-th cyclotomic polynomial Φ_n.
pub fn cyclotomic(n: u64) -> Poly {
    assert!(n >= 1);
    let mut p = &Poly::monomial(Rat::one(), n as usize) - &Poly::one();
    for d in 1..n {
        if n % d == 0 {
            p = p.div_rem(&cyclotomic(d)).0;
        }
    }
    p
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_coeff = !mag.is_one() || i == 0;
            if show_coeff {
                write!(f, "{}", fmt_rat(&mag))?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        super::rat::serde_rat_vec::serialize(&self.coeffs, s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Poly, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        let coeffs = texts
            .iter()
            .map(|t| parse_rat(t).map_err(serde::de::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Poly::new(coeffs))
    }
}
