//! Exact arithmetic in the cyclotomic field `Q(ζ_n)`.
//!
//! Elements are stored in the power basis `1, ζ, …, ζ^{φ(n)-1}` and kept
//! reduced modulo the cyclotomic polynomial `Φ_n`, so equality and the zero
//! test are plain coefficient comparisons.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Returns `Φ_n` as ascending integer coefficients.
///
/// Computed by dividing `x^n - 1` by `Φ_d` for every proper divisor `d`.
pub fn cyclotomic_polynomial(n: u32) -> Vec<BigInt> {
    assert!(n >= 1, "cyclotomic polynomial needs n >= 1");
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            num = div_monic_exact(&num, &cyclotomic_polynomial(d));
        }
    }
    num
}

// Exact quotient of integer polynomials by a monic divisor. Panics on a
// nonzero remainder; only used where divisibility is a theorem.
fn div_monic_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let mut rem = a.to_vec();
    let mut quot = vec![BigInt::zero(); a.len() - db];
    for i in (0..quot.len()).rev() {
        let c = rem[i + db].clone();
        if c.is_zero() {
            continue;
        }
        for (k, bk) in b.iter().enumerate() {
            rem[i + k] -= &c * bk;
        }
        quot[i] = c;
    }
    assert!(
        rem.iter().all(Zero::is_zero),
        "cyclotomic division left a remainder"
    );
    quot
}

struct FieldData {
    order: u32,
    modulus: Vec<BigInt>,
    // ζ^k reduced mod Φ_n, for 0 <= k < max(order, 2φ - 1).
    powers: Vec<Vec<i64>>,
}

/// The field `Q(ζ_n)` for a fixed order `n`.
///
/// Cheap to clone; two handles compare equal when their orders agree.
#[derive(Clone)]
pub struct CycloField {
    data: Arc<FieldData>,
}

impl CycloField {
    pub fn new(order: u32) -> Self {
        let modulus = cyclotomic_polynomial(order);
        let deg = modulus.len() - 1;
        let count = (order as usize).max(2 * deg - 1);
        let mut powers = Vec::with_capacity(count);
        let mut cur = vec![BigInt::zero(); deg];
        cur[0] = BigInt::one();
        for _ in 0..count {
            powers.push(
                cur.iter()
                    .map(|c| c.to_i64().expect("small cyclotomic coefficients"))
                    .collect(),
            );
            // multiply by ζ: shift up and fold the top coefficient back with Φ_n
            let top = cur[deg - 1].clone();
            for i in (1..deg).rev() {
                cur[i] = cur[i - 1].clone();
            }
            cur[0] = BigInt::zero();
            if !top.is_zero() {
                for (i, c) in cur.iter_mut().enumerate() {
                    *c -= &top * &modulus[i];
                }
            }
        }
        CycloField {
            data: Arc::new(FieldData {
                order,
                modulus,
                powers,
            }),
        }
    }

    /// The field that hosts `q = exp(πi/(L+2))` as `ζ`, order `2(L+2)`.
    pub fn for_spin(l: u32) -> Self {
        CycloField::new(2 * (l + 2))
    }

    pub fn order(&self) -> u32 {
        self.data.order
    }

    /// `φ(n)`, the dimension over the rationals.
    pub fn degree(&self) -> usize {
        self.data.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[BigInt] {
        &self.data.modulus
    }

    pub fn zero(&self) -> CycloNum {
        CycloNum {
            field: self.clone(),
            coeffs: vec![BigRational::zero(); self.degree()],
        }
    }

    pub fn one(&self) -> CycloNum {
        self.rational(BigRational::one())
    }

    pub fn rational(&self, r: BigRational) -> CycloNum {
        let mut x = self.zero();
        x.coeffs[0] = r;
        x
    }

    pub fn integer(&self, v: i64) -> CycloNum {
        self.rational(BigRational::from_integer(BigInt::from(v)))
    }

    /// `ζ^k` for any integer `k`. In the order-`2(L+2)` field this is `q^k`.
    pub fn q_power(&self, k: i64) -> CycloNum {
        let e = k.rem_euclid(self.order() as i64) as usize;
        let coeffs = self.data.powers[e]
            .iter()
            .map(|&c| BigRational::from_integer(BigInt::from(c)))
            .collect();
        CycloNum {
            field: self.clone(),
            coeffs,
        }
    }

    /// `ζ^a + ζ^{-a}`, i.e. `2 ch(aπi/(L+2))` in the spin field.
    pub fn ch_coeff(&self, a: i64) -> CycloNum {
        &self.q_power(a) + &self.q_power(-a)
    }

    /// `ζ^a - ζ^{-a}`, i.e. `2 sh(aπi/(L+2))` in the spin field.
    pub fn sh_coeff(&self, a: i64) -> CycloNum {
        &self.q_power(a) - &self.q_power(-a)
    }

    pub(crate) fn power_row(&self, k: usize) -> &[i64] {
        &self.data.powers[k]
    }

    /// Folds an unreduced integer vector (length up to `2φ - 1`) into the
    /// power basis.
    pub(crate) fn reduce_ints(&self, v: &[BigInt]) -> Vec<BigInt> {
        let deg = self.degree();
        let mut out: Vec<BigInt> = v.iter().take(deg).cloned().collect();
        out.resize(deg, BigInt::zero());
        for (k, c) in v.iter().enumerate().skip(deg) {
            if c.is_zero() {
                continue;
            }
            for (o, &p) in out.iter_mut().zip(self.power_row(k)) {
                if p != 0 {
                    *o += c * p;
                }
            }
        }
        out
    }

    fn reduce_rats(&self, v: Vec<BigRational>) -> Vec<BigRational> {
        let deg = self.degree();
        if v.len() <= deg {
            let mut v = v;
            v.resize(deg, BigRational::zero());
            return v;
        }
        let mut out: Vec<BigRational> = v[..deg].to_vec();
        for (k, c) in v.iter().enumerate().skip(deg) {
            if c.is_zero() {
                continue;
            }
            let row = if k < self.data.powers.len() {
                self.power_row(k).to_vec()
            } else {
                // beyond the table: use periodicity of ζ
                self.power_row(k % self.order() as usize).to_vec()
            };
            for (o, p) in out.iter_mut().zip(row) {
                if p != 0 {
                    *o += c * BigRational::from_integer(BigInt::from(p));
                }
            }
        }
        out
    }

    /// Builds an element from arbitrary power-basis coefficients, reducing
    /// modulo `Φ_n`.
    pub fn from_coeffs(&self, coeffs: Vec<BigRational>) -> CycloNum {
        CycloNum {
            field: self.clone(),
            coeffs: self.reduce_rats(coeffs),
        }
    }
}

impl PartialEq for CycloField {
    fn eq(&self, other: &Self) -> bool {
        self.order() == other.order()
    }
}

impl Eq for CycloField {}

impl fmt::Debug for CycloField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(zeta_{})", self.order())
    }
}

/// An element of `Q(ζ_n)`, always reduced.
#[derive(Clone, PartialEq)]
pub struct CycloNum {
    field: CycloField,
    coeffs: Vec<BigRational>,
}

impl CycloNum {
    pub fn field(&self) -> &CycloField {
        &self.field
    }

    /// Power-basis coefficients, length `φ(n)`.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The rational value when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn check_field(&self, other: &CycloNum) {
        assert!(
            self.field == other.field,
            "{}",
            Error::FieldMismatch(self.field.order(), other.field.order())
        );
    }

    pub fn scale(&self, r: &BigRational) -> CycloNum {
        CycloNum {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against `Φ_n`.
    pub fn inverse(&self) -> Result<CycloNum> {
        if self.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        let modulus: Vec<BigRational> = self
            .field
            .modulus()
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let (g, s) = rat_half_gcd(trimmed(self.coeffs.clone()), modulus);
        // Φ_n is irreducible, so the gcd with a nonzero element is a unit.
        debug_assert_eq!(g.len(), 1);
        let ginv = g[0].recip();
        Ok(self
            .field
            .from_coeffs(s.into_iter().map(|c| c * &ginv).collect()))
    }

    /// Complex conjugation `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> CycloNum {
        let n = self.field.order() as usize;
        let mut out = vec![BigRational::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[(n - k) % n] += c;
        }
        self.field.from_coeffs(out)
    }

    /// Numeric value under `ζ ↦ exp(2πi/n)`.
    pub fn to_complex(&self) -> Complex64 {
        let n = self.field.order() as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / n;
                Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), theta)
            })
            .sum()
    }

    /// Embeds into a field whose order is a multiple of this one, sending
    /// `ζ_n ↦ ζ_N^{N/n}`.
    pub fn lift(&self, target: &CycloField) -> Result<CycloNum> {
        let (n, big) = (self.field.order(), target.order());
        if big % n != 0 {
            return Err(Error::FieldMismatch(n, big));
        }
        let step = (big / n) as usize;
        let mut out = vec![BigRational::zero(); step * self.coeffs.len().max(1)];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k * step] = c.clone();
        }
        Ok(target.from_coeffs(out))
    }

    /// Largest bit length among numerators and denominators.
    pub fn height_bits(&self) -> u64 {
        self.coeffs
            .iter()
            .map(|c| c.numer().bits().max(c.denom().bits()))
            .max()
            .unwrap_or(0)
    }
}

fn trimmed(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.len() > 1 && v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

fn rat_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let db = b.len() - 1;
    if a.len() <= db {
        return (vec![BigRational::zero()], a.to_vec());
    }
    let lead_inv = b[db].recip();
    let mut rem = a.to_vec();
    let mut quot = vec![BigRational::zero(); a.len() - db];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + db] * &lead_inv;
        if c.is_zero() {
            continue;
        }
        for (k, bk) in b.iter().enumerate() {
            rem[i + k] -= &c * bk;
        }
        quot[i] = c;
    }
    rem.truncate(db.max(1));
    (trimmed(quot), trimmed(rem))
}

fn rat_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trimmed(out)
}

fn rat_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let zero = BigRational::zero();
    trimmed(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero))
            .collect(),
    )
}

// Returns (g, s) with s*a ≡ g (mod m).
fn rat_half_gcd(a: Vec<BigRational>, m: Vec<BigRational>) -> (Vec<BigRational>, Vec<BigRational>) {
    let is_zero = |v: &[BigRational]| v.iter().all(Zero::is_zero);
    let (mut r0, mut r1) = (a, m);
    let (mut s0, mut s1) = (vec![BigRational::one()], vec![BigRational::zero()]);
    while !is_zero(&r1) {
        let (q, r) = rat_divrem(&r0, &r1);
        let s2 = rat_sub(&s0, &rat_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    (r0, s0)
}

impl Add for &CycloNum {
    type Output = CycloNum;
    fn add(self, rhs: &CycloNum) -> CycloNum {
        self.check_field(rhs);
        CycloNum {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CycloNum {
    type Output = CycloNum;
    fn sub(self, rhs: &CycloNum) -> CycloNum {
        self.check_field(rhs);
        CycloNum {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &CycloNum {
    type Output = CycloNum;
    fn mul(self, rhs: &CycloNum) -> CycloNum {
        self.check_field(rhs);
        let deg = self.field.degree();
        let mut prod = vec![BigRational::zero(); 2 * deg - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        self.field.from_coeffs(prod)
    }
}

impl Neg for &CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        CycloNum {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycloNum {
    type Output = CycloNum;
    fn neg(mut self) -> CycloNum {
        for c in &mut self.coeffs {
            *c = -std::mem::take(c);
        }
        self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for CycloNum {
            type Output = CycloNum;
            fn $m(self, rhs: CycloNum) -> CycloNum {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&CycloNum> for CycloNum {
            type Output = CycloNum;
            fn $m(self, rhs: &CycloNum) -> CycloNum {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&CycloNum> for CycloNum {
    fn add_assign(&mut self, rhs: &CycloNum) {
        self.check_field(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&CycloNum> for CycloNum {
    fn sub_assign(&mut self, rhs: &CycloNum) {
        self.check_field(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => write!(f, "ζ^{k}")?,
                (_, false) => write!(f, "{mag}·ζ^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycloNum[n={}]({self})", self.field.order())
    }
}

/// Formats a rational without a decimal point: `p` or `p/q`.
pub fn rational_to_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    BigRational::from_str(s.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

#[derive(Serialize, Deserialize)]
pub(crate) struct CycloNumRepr {
    pub n: u32,
    pub coeffs: Vec<String>,
}

impl CycloNumRepr {
    pub(crate) fn from_num(x: &CycloNum) -> Self {
        CycloNumRepr {
            n: x.field.order(),
            coeffs: x.coeffs.iter().map(rational_to_string).collect(),
        }
    }

    pub(crate) fn into_num(self, field: Option<&CycloField>) -> Result<CycloNum> {
        if self.n == 0 {
            return Err(Error::Parse("field order must be positive".into()));
        }
        let field = match field {
            Some(f) if f.order() == self.n => f.clone(),
            Some(f) => return Err(Error::FieldMismatch(self.n, f.order())),
            None => CycloField::new(self.n),
        };
        let coeffs = self
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(field.from_coeffs(coeffs))
    }
}

impl Serialize for CycloNum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycloNumRepr::from_num(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycloNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        CycloNumRepr::deserialize(d)?
            .into_num(None)
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic_polynomial(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(8), ints(&[1, 0, 0, 0, 1]));
        assert_eq!(cyclotomic_polynomial(10), ints(&[1, -1, 1, -1, 1]));
    }

    #[test]
    fn divisor_product_is_x_n_minus_1() {
        for n in 1..=40u32 {
            let mut prod = ints(&[1]);
            for d in (1..=n).filter(|d| n % d == 0) {
                prod = poly_mul(&prod, &cyclotomic_polynomial(d));
            }
            let mut expect = vec![BigInt::zero(); n as usize + 1];
            expect[0] = BigInt::from(-1);
            expect[n as usize] = BigInt::one();
            assert_eq!(prod, expect, "n = {n}");
        }
    }

    #[test]
    fn q_power_basics() {
        let f = CycloField::new(10);
        assert!(f.q_power(0).is_one());
        assert_eq!(f.q_power(5), f.integer(-1));
        assert_eq!(f.q_power(12), f.q_power(2));
        assert_eq!(f.q_power(-3), f.q_power(7));
        for k in -12..12 {
            assert!((&f.q_power(k) * &f.q_power(-k)).is_one());
        }
    }

    #[test]
    fn ch_sh_values() {
        let f = CycloField::new(10);
        assert_eq!(f.ch_coeff(0), f.integer(2));
        assert!(f.sh_coeff(0).is_zero());
        assert_eq!(f.ch_coeff(5), f.integer(-2));
        assert_eq!(f.ch_coeff(3), f.ch_coeff(-3));
        assert_eq!(f.sh_coeff(3), -f.sh_coeff(-3));
        let v = f.ch_coeff(2).to_complex();
        assert!((v.re - 0.6180339887498949).abs() < 1e-13);
        assert!(v.im.abs() < 1e-13);
    }

    #[test]
    fn embedding_of_zeta() {
        let f = CycloField::new(10);
        let z = f.q_power(1).to_complex();
        let t = std::f64::consts::PI / 5.0;
        assert!((z.re - t.cos()).abs() < 1e-15 && (z.im - t.sin()).abs() < 1e-15);
        assert_eq!(f.one().to_complex(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn inverse_and_zero_divisor() {
        let f = CycloField::new(14);
        let x = &f.q_power(1) + &f.integer(3);
        let inv = x.inverse().unwrap();
        assert!((&x * &inv).is_one());
        assert_eq!(f.zero().inverse(), Err(Error::ZeroDivisor));
    }

    #[test]
    fn conj_inverts_zeta() {
        let f = CycloField::new(12);
        assert_eq!(f.q_power(5).conj(), f.q_power(-5));
        let tau = f.ch_coeff(3);
        assert_eq!(tau.conj(), tau);
    }

    #[test]
    fn lift_respects_arithmetic() {
        let small = CycloField::new(10);
        let big = CycloField::new(20);
        let x = &small.q_power(3) + &small.integer(2);
        let y = small.q_power(7);
        let lx = x.lift(&big).unwrap();
        let ly = y.lift(&big).unwrap();
        assert_eq!((&x * &y).lift(&big).unwrap(), &lx * &ly);
        assert_eq!(small.q_power(1).lift(&big).unwrap(), big.q_power(2));
        assert!(x.lift(&CycloField::new(14)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = CycloField::new(10);
        let x = &f.q_power(2).scale(&BigRational::new(3.into(), 7.into())) - &f.integer(5);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"n":10,"coeffs":["-5","0","3/7","0"]}"#);
        let back: CycloNum = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }
}
