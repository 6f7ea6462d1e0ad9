//! Multiprecision complex roots of rational polynomials and their
//! arguments. Only the relation-finding heuristics use this module; every
//! value it produces is re-verified exactly by the caller.

use astro_float::{BigFloat, Consts, RoundingMode, Sign, WORD_BIT_SIZE};
use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use super::poly::Poly;
use super::rat::Rat;

const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Clone, Debug)]
pub struct Complex {
    pub re: BigFloat,
    pub im: BigFloat,
}

/// Working context: precision in bits plus the constants cache.
pub struct Context {
    pub bits: usize,
    consts: Consts,
}

impl Context {
    pub fn new(bits: usize) -> Self {
        Context {
            bits: bits.max(64),
            consts: Consts::new().expect("astro-float constants cache"),
        }
    }

    fn p(&self) -> usize {
        self.bits + 64
    }

    pub fn zero(&self) -> BigFloat {
        BigFloat::from_u8(0, self.p())
    }

    pub fn from_f64(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.p())
    }

    pub fn from_bigint(&self, n: &BigInt) -> BigFloat {
        let p = self.p();
        let (sign, digits) = n.to_u64_digits();
        let base = BigFloat::from_f64(18446744073709551616.0, p);
        let mut acc = BigFloat::from_u8(0, p);
        for d in digits.iter().rev() {
            acc = acc.mul(&base, p, RM).add(&BigFloat::from_u64(*d, p), p, RM);
        }
        if sign == num_bigint::Sign::Minus {
            acc.inv_sign();
        }
        acc
    }

    pub fn from_rat(&self, x: &Rat) -> BigFloat {
        let n = self.from_bigint(x.numer());
        let d = self.from_bigint(x.denom());
        n.div(&d, self.p(), RM)
    }

    pub fn pi(&mut self) -> BigFloat {
        let p = self.p();
        self.consts.pi(p, RM)
    }

    /// `atan2(y, x)` in `(−π, π]`.
    pub fn atan2(&mut self, y: &BigFloat, x: &BigFloat) -> BigFloat {
        let p = self.p();
        let pi = self.pi();
        if x.is_zero() {
            let half = pi.div(&BigFloat::from_u8(2, p), p, RM);
            return if y.is_negative() { half.neg() } else { half };
        }
        let base = y.div(x, p, RM).atan(p, RM, &mut self.consts);
        if x.is_positive() {
            base
        } else if y.is_negative() {
            base.sub(&pi, p, RM)
        } else {
            base.add(&pi, p, RM)
        }
    }

    /// `ln |z|`.
    pub fn ln_abs(&mut self, z: &Complex) -> BigFloat {
        let p = self.p();
        let half = BigFloat::from_u8(1, p).div(&BigFloat::from_u8(2, p), p, RM);
        self.norm2(z).ln(p, RM, &mut self.consts).mul(&half, p, RM)
    }

    /// Argument of `z` divided by `2π`, in `(−1/2, 1/2]`.
    pub fn turns(&mut self, z: &Complex) -> BigFloat {
        let p = self.p();
        let a = self.atan2(&z.im, &z.re);
        let two_pi = self.pi().mul(&BigFloat::from_u8(2, p), p, RM);
        a.div(&two_pi, p, RM)
    }

    pub fn add(&self, a: &Complex, b: &Complex) -> Complex {
        let p = self.p();
        Complex {
            re: a.re.add(&b.re, p, RM),
            im: a.im.add(&b.im, p, RM),
        }
    }

    pub fn sub(&self, a: &Complex, b: &Complex) -> Complex {
        let p = self.p();
        Complex {
            re: a.re.sub(&b.re, p, RM),
            im: a.im.sub(&b.im, p, RM),
        }
    }

    pub fn mul(&self, a: &Complex, b: &Complex) -> Complex {
        let p = self.p();
        Complex {
            re: a.re.mul(&b.re, p, RM).sub(&a.im.mul(&b.im, p, RM), p, RM),
            im: a.re.mul(&b.im, p, RM).add(&a.im.mul(&b.re, p, RM), p, RM),
        }
    }

    pub fn div(&self, a: &Complex, b: &Complex) -> Complex {
        let p = self.p();
        let den = self.norm2(b);
        let num = self.mul(
            a,
            &Complex {
                re: b.re.clone(),
                im: b.im.neg(),
            },
        );
        Complex {
            re: num.re.div(&den, p, RM),
            im: num.im.div(&den, p, RM),
        }
    }

    pub fn norm2(&self, z: &Complex) -> BigFloat {
        let p = self.p();
        z.re.mul(&z.re, p, RM).add(&z.im.mul(&z.im, p, RM), p, RM)
    }

    pub fn abs(&self, z: &Complex) -> BigFloat {
        self.norm2(z).sqrt(self.p(), RM)
    }

    pub fn real(&self, r: BigFloat) -> Complex {
        Complex { re: r, im: self.zero() }
    }

    /// Horner evaluation of a rational polynomial at a complex point.
    pub fn eval(&self, poly: &Poly, z: &Complex) -> Complex {
        let mut acc = self.real(self.zero());
        for c in poly.coeffs().iter().rev() {
            acc = self.add(&self.mul(&acc, z), &self.real(self.from_rat(c)));
        }
        acc
    }

    /// `round(x · 2^shift)` as an exact integer.
    pub fn scaled_round(&self, x: &BigFloat, shift: usize) -> BigInt {
        let p = self.p() + shift;
        let scale = BigFloat::from_u8(2, p).powi(shift, p, RM);
        let y = x.mul(&scale, p, RM).round(0, RM);
        bigfloat_to_bigint(&y)
    }
}

/// Exact conversion of an integer-valued float.
fn bigfloat_to_bigint(x: &BigFloat) -> BigInt {
    let Some((words, _bits, sign, exp, _)) = x.as_raw_parts() else {
        return BigInt::zero();
    };
    if x.is_zero() {
        return BigInt::zero();
    }
    let mut bytes = Vec::with_capacity(words.len() * 8);
    for w in words {
        bytes.extend_from_slice(&(*w as u64).to_le_bytes()[..WORD_BIT_SIZE / 8]);
    }
    let mantissa = BigUint::from_bytes_le(&bytes);
    let total = (words.len() * WORD_BIT_SIZE) as i64;
    let e = exp as i64;
    let magnitude = if e >= total {
        mantissa << ((e - total) as usize)
    } else {
        mantissa >> ((total - e) as usize)
    };
    let v = BigInt::from(magnitude);
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

/// Durand–Kerner seeds in double precision for a monic squarefree polynomial.
fn seeds(poly: &Poly) -> Vec<(f64, f64)> {
    let c = poly.monic().to_f64_coeffs();
    let n = c.len() - 1;
    let eval = |z: (f64, f64)| {
        let mut acc = (0.0f64, 0.0f64);
        for a in c.iter().rev() {
            acc = (acc.0 * z.0 - acc.1 * z.1 + a, acc.0 * z.1 + acc.1 * z.0);
        }
        acc
    };
    let mut roots: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let r = 0.4f64.hypot(0.9).powi(k as i32);
            let t = 0.9f64.atan2(0.4) * k as f64;
            (r * t.cos(), r * t.sin())
        })
        .collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let zi = roots[i];
            let mut den = (1.0f64, 0.0f64);
            for (j, zj) in roots.iter().enumerate() {
                if i != j {
                    let d = (zi.0 - zj.0, zi.1 - zj.1);
                    den = (den.0 * d.0 - den.1 * d.1, den.0 * d.1 + den.1 * d.0);
                }
            }
            let num = eval(zi);
            let dd = den.0 * den.0 + den.1 * den.1;
            if dd == 0.0 {
                continue;
            }
            let q = (
                (num.0 * den.0 + num.1 * den.1) / dd,
                (num.1 * den.0 - num.0 * den.1) / dd,
            );
            roots[i] = (zi.0 - q.0, zi.1 - q.1);
            delta = delta.max(q.0.hypot(q.1));
        }
        if delta < 1e-15 {
            break;
        }
    }
    roots
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("numeric root isolation failed: {0}")]
pub struct RootError(pub String);

/// All complex roots of a squarefree rational polynomial, refined by
/// Newton's method to about `ctx.bits` bits.
pub fn complex_roots(ctx: &Context, poly: &Poly) -> Result<Vec<Complex>, RootError> {
    let poly = poly.monic();
    let Some(n) = poly.degree() else {
        return Err(RootError("zero polynomial".into()));
    };
    if n == 0 {
        return Ok(Vec::new());
    }
    if !poly.is_squarefree() {
        return Err(RootError("polynomial is not squarefree".into()));
    }
    let d = poly.derivative();
    let tol = BigFloat::from_u8(2, ctx.p()).powi(ctx.bits, ctx.p(), RM);
    let tol = BigFloat::from_u8(1, ctx.p()).div(&tol, ctx.p(), RM);
    let mut out = Vec::with_capacity(n);
    for (re, im) in seeds(&poly) {
        let mut z = Complex {
            re: ctx.from_f64(re),
            im: ctx.from_f64(im),
        };
        let mut converged = false;
        for _ in 0..200 {
            let f = ctx.eval(&poly, &z);
            let fp = ctx.eval(&d, &z);
            if ctx.norm2(&fp).is_zero() {
                break;
            }
            let step = ctx.div(&f, &fp);
            z = ctx.sub(&z, &step);
            if ctx.abs(&step).cmp(&tol).map_or(false, |c| c <= 0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(RootError(format!("Newton refinement stalled for {poly}")));
        }
        out.push(z);
    }
    // distinctness: refined roots must stay separated
    let sep = BigFloat::from_f64(1e-9, ctx.p());
    for i in 0..n {
        for j in i + 1..n {
            if ctx.abs(&ctx.sub(&out[i], &out[j])).cmp(&sep).map_or(true, |c| c < 0) {
                return Err(RootError(format!("two seeds converged to one root of {poly}")));
            }
        }
    }
    Ok(out)
}

/// Double-precision view, for diagnostics and seeds.
pub fn to_f64(ctx: &Context, x: &BigFloat) -> f64 {
    bigint_to_f64(&ctx.scaled_round(x, 64)) / 18446744073709551616.0
}

pub fn bigint_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
