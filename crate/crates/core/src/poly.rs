//! Dense univariate polynomials with [`CycloNum`] coefficients.
//!
//! A polynomial is in the variable `z` or in `w = z^{1/2}` ([`VarKind`]);
//! the latter encodes half-integer powers of `z` as odd powers of `w`.
//! Coefficients are stored ascending with no trailing zeros, so the zero
//! polynomial has an empty coefficient vector.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{rational_to_string, CycloField, CycloNum, CycloNumRepr};
use crate::kernel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Z,
    W,
}

impl VarKind {
    pub fn symbol(self) -> &'static str {
        match self {
            VarKind::Z => "z",
            VarKind::W => "w",
        }
    }
}

/// Argument rescaling `x ↦ ζ^k x`. Shifts compose additively.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentShift(pub i64);

impl LaurentShift {
    pub fn then(self, other: LaurentShift) -> LaurentShift {
        LaurentShift(self.0 + other.0)
    }

    pub fn apply(self, p: &FieldPoly) -> FieldPoly {
        p.scale_arg(self.0)
    }
}

#[derive(Clone, PartialEq)]
pub struct FieldPoly {
    field: CycloField,
    var: VarKind,
    coeffs: Vec<CycloNum>,
}

impl FieldPoly {
    pub fn zero(field: &CycloField, var: VarKind) -> Self {
        FieldPoly {
            field: field.clone(),
            var,
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: &CycloField, var: VarKind) -> Self {
        Self::constant(field.one(), var)
    }

    pub fn constant(c: CycloNum, var: VarKind) -> Self {
        Self::from_coeffs(c.field().clone(), var, vec![c])
    }

    /// `c · x^deg`.
    pub fn monomial(c: CycloNum, deg: usize, var: VarKind) -> Self {
        let field = c.field().clone();
        let mut coeffs = vec![field.zero(); deg];
        coeffs.push(c);
        Self::from_coeffs(field, var, coeffs)
    }

    /// The variable itself.
    pub fn var_poly(field: &CycloField, var: VarKind) -> Self {
        Self::monomial(field.one(), 1, var)
    }

    pub fn from_coeffs(field: CycloField, var: VarKind, mut coeffs: Vec<CycloNum>) -> Self {
        for c in &coeffs {
            assert_eq!(c.field(), &field, "coefficient from a foreign field");
        }
        while coeffs.last().is_some_and(CycloNum::is_zero) {
            coeffs.pop();
        }
        FieldPoly { field, var, coeffs }
    }

    pub fn from_rationals(field: &CycloField, var: VarKind, coeffs: &[BigRational]) -> Self {
        Self::from_coeffs(
            field.clone(),
            var,
            coeffs.iter().map(|c| field.rational(c.clone())).collect(),
        )
    }

    pub fn from_integers(field: &CycloField, var: VarKind, coeffs: &[i64]) -> Self {
        Self::from_coeffs(
            field.clone(),
            var,
            coeffs.iter().map(|&c| field.integer(c)).collect(),
        )
    }

    /// `(ζ^k x - 1)^m`, the building block of every factor in the TQ and
    /// Wronskian relations.
    pub fn shifted_unit_power(field: &CycloField, var: VarKind, k: i64, m: u32) -> Self {
        let base = Self::from_coeffs(field.clone(), var, vec![-field.one(), field.q_power(k)]);
        base.pow(m)
    }

    pub fn field(&self) -> &CycloField {
        &self.field
    }

    pub fn var(&self) -> VarKind {
        self.var
    }

    pub fn coeffs(&self) -> &[CycloNum] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> CycloNum {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&CycloNum> {
        self.coeffs.last()
    }

    /// Lowest index with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    fn compatible(&self, other: &FieldPoly) {
        assert!(
            self.field == other.field,
            "{}",
            Error::FieldMismatch(self.field.order(), other.field.order())
        );
        assert_eq!(self.var, other.var, "mixing z- and w-polynomials");
    }

    pub fn scale(&self, c: &CycloNum) -> FieldPoly {
        if c.is_zero() {
            return FieldPoly::zero(&self.field, self.var);
        }
        FieldPoly::from_coeffs(
            self.field.clone(),
            self.var,
            self.coeffs.iter().map(|a| a * c).collect(),
        )
    }

    pub fn scale_rational(&self, r: &BigRational) -> FieldPoly {
        FieldPoly::from_coeffs(
            self.field.clone(),
            self.var,
            self.coeffs.iter().map(|a| a.scale(r)).collect(),
        )
    }

    /// `P(ζ^k x)`: coefficient `c_j` becomes `ζ^{kj} c_j`.
    pub fn scale_arg(&self, k: i64) -> FieldPoly {
        if k.rem_euclid(self.field.order() as i64) == 0 {
            return self.clone();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if c.is_zero() {
                    c.clone()
                } else {
                    c * &self.field.q_power(k * j as i64)
                }
            })
            .collect();
        FieldPoly::from_coeffs(self.field.clone(), self.var, coeffs)
    }

    /// Multiplies by `x^d`.
    pub fn shift_up(&self, d: usize) -> FieldPoly {
        if self.is_zero() || d == 0 {
            return self.clone();
        }
        let mut coeffs = vec![self.field.zero(); d];
        coeffs.extend(self.coeffs.iter().cloned());
        FieldPoly::from_coeffs(self.field.clone(), self.var, coeffs)
    }

    pub fn pow(&self, e: u32) -> FieldPoly {
        let mut result = FieldPoly::one(&self.field, self.var);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn evaluate(&self, x: &CycloNum) -> CycloNum {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// Euclidean division; fails only for a zero divisor.
    pub fn div_rem(&self, divisor: &FieldPoly) -> Result<(FieldPoly, FieldPoly)> {
        self.compatible(divisor);
        let db = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = divisor.leading().expect("nonzero").inverse()?;
        if self.coeffs.len() <= db {
            return Ok((FieldPoly::zero(&self.field, self.var), self.clone()));
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![self.field.zero(); self.coeffs.len() - db];
        for i in (0..quot.len()).rev() {
            if rem[i + db].is_zero() {
                continue;
            }
            let c = &rem[i + db] * &lead_inv;
            for (k, b) in divisor.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    rem[i + k] -= &(&c * b);
                }
            }
            quot[i] = c;
        }
        rem.truncate(db);
        Ok((
            FieldPoly::from_coeffs(self.field.clone(), self.var, quot),
            FieldPoly::from_coeffs(self.field.clone(), self.var, rem),
        ))
    }

    /// Quotient `Q` with `self = divisor · Q`, or `NonZeroRemainder`.
    pub fn exact_div(&self, divisor: &FieldPoly) -> Result<FieldPoly> {
        let (q, r) = self.div_rem(divisor)?;
        match r.degree() {
            None => Ok(q),
            Some(degree) => Err(Error::NonZeroRemainder { degree }),
        }
    }

    pub fn monic(&self) -> Result<FieldPoly> {
        let lead = self.leading().ok_or(Error::DivisionByZero)?;
        Ok(self.scale(&lead.inverse()?))
    }

    /// Extended Euclid: `(G, S, T)` with `S·A + T·B = G`, `G` monic, and the
    /// minimal-degree Bezout pair (`deg S < deg B - deg G`).
    pub fn extended_gcd(a: &FieldPoly, b: &FieldPoly) -> Result<(FieldPoly, FieldPoly, FieldPoly)> {
        a.compatible(b);
        if a.is_zero() && b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let zero = FieldPoly::zero(&a.field, a.var);
        let one = FieldPoly::one(&a.field, a.var);
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (one.clone(), zero.clone());
        let (mut t0, mut t1) = (zero, one);
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1)?;
            let s2 = &s0 - &(&q * &s1);
            let t2 = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        let inv = r0.leading().expect("nonzero gcd").inverse()?;
        let g = r0.scale(&inv);
        let mut s = s0.scale(&inv);
        let mut t = t0.scale(&inv);
        if !b.is_zero() {
            // Normalise to the minimal pair: S mod (B/G), then T from the identity.
            let b_red = b.exact_div(&g)?;
            s = s.div_rem(&b_red)?.1;
            t = (&g - &(&s * a)).exact_div(b)?;
        }
        Ok((g, s, t))
    }

    /// Reinterprets a `z`-polynomial in `w = z^{1/2}` by doubling exponents.
    pub fn to_w(&self) -> FieldPoly {
        assert_eq!(self.var, VarKind::Z, "already a w-polynomial");
        let mut coeffs = Vec::with_capacity(2 * self.coeffs.len());
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                coeffs.push(self.field.zero());
            }
            coeffs.push(c.clone());
        }
        FieldPoly::from_coeffs(self.field.clone(), VarKind::W, coeffs)
    }

    /// Embeds every coefficient into a field of larger order.
    pub fn lift(&self, target: &CycloField) -> Result<FieldPoly> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.lift(target))
            .collect::<Result<Vec<_>>>()?;
        Ok(FieldPoly::from_coeffs(target.clone(), self.var, coeffs))
    }

    /// Rational coefficients, if every coefficient lies in `Q`.
    pub fn rational_coeffs(&self) -> Option<Vec<BigRational>> {
        self.coeffs
            .iter()
            .map(|c| c.as_rational().cloned())
            .collect()
    }

    pub fn max_height_bits(&self) -> u64 {
        self.coeffs
            .iter()
            .map(CycloNum::height_bits)
            .max()
            .unwrap_or(0)
    }

    /// Common denominator and integer numerators, one row of length
    /// `φ(n)` per coefficient.
    pub(crate) fn integer_form(&self) -> (BigInt, Vec<Vec<BigInt>>) {
        let mut den = BigInt::one();
        for c in &self.coeffs {
            for r in c.coeffs() {
                if !r.is_zero() {
                    den = den.lcm(r.denom());
                }
            }
        }
        let rows = self
            .coeffs
            .iter()
            .map(|c| {
                c.coeffs()
                    .iter()
                    .map(|r| {
                        if r.is_zero() {
                            BigInt::zero()
                        } else {
                            r.numer() * (&den / r.denom())
                        }
                    })
                    .collect()
            })
            .collect();
        (den, rows)
    }

    pub(crate) fn from_integer_form(
        field: &CycloField,
        var: VarKind,
        den: &BigInt,
        rows: Vec<Vec<BigInt>>,
    ) -> Self {
        let coeffs = rows
            .into_iter()
            .map(|row| {
                field.from_coeffs(
                    row.into_iter()
                        .map(|v| BigRational::new(v, den.clone()))
                        .collect(),
                )
            })
            .collect();
        FieldPoly::from_coeffs(field.clone(), var, coeffs)
    }

    /// Reference product: coefficient-by-coefficient field multiplication.
    pub fn mul_schoolbook(&self, other: &FieldPoly) -> FieldPoly {
        self.compatible(other);
        if self.is_zero() || other.is_zero() {
            return FieldPoly::zero(&self.field, self.var);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += &(a * b);
                }
            }
        }
        FieldPoly::from_coeffs(self.field.clone(), self.var, out)
    }

    /// LaTeX rendering, highest power first.
    pub fn to_latex(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let x = self.var.symbol();
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => x.to_string(),
                _ => format!("{x}^{{{i}}}"),
            };
            let (neg, body) = latex_coeff(c, self.field.order());
            let body = match (body.as_str(), mono.is_empty()) {
                ("1", false) => mono,
                (_, true) => body,
                _ => format!("{body}{mono}"),
            };
            if out.is_empty() {
                out.push_str(if neg { "-" } else { "" });
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }
}

fn latex_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom())
    }
}

// (is_negative, magnitude string)
fn latex_coeff(c: &CycloNum, order: u32) -> (bool, String) {
    if let Some(r) = c.as_rational() {
        return (r.is_negative(), latex_rational(&r.abs()));
    }
    let terms: Vec<String> = c
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.is_zero())
        .map(|(k, r)| {
            let z = match k {
                0 => String::new(),
                1 => format!("\\zeta_{{{order}}}"),
                _ => format!("\\zeta_{{{order}}}^{{{k}}}"),
            };
            if k == 0 {
                latex_rational(r)
            } else if r.is_one() {
                z
            } else if (-r).is_one() {
                format!("-{z}")
            } else {
                format!("{}{z}", latex_rational(r))
            }
        })
        .collect();
    (
        false,
        format!("\\left({}\\right)", terms.join(" + ").replace("+ -", "- ")),
    )
}

impl Add for &FieldPoly {
    type Output = FieldPoly;
    fn add(self, rhs: &FieldPoly) -> FieldPoly {
        self.compatible(rhs);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        FieldPoly::from_coeffs(self.field.clone(), self.var, coeffs)
    }
}

impl Sub for &FieldPoly {
    type Output = FieldPoly;
    fn sub(self, rhs: &FieldPoly) -> FieldPoly {
        self + &(-rhs)
    }
}

impl Neg for &FieldPoly {
    type Output = FieldPoly;
    fn neg(self) -> FieldPoly {
        FieldPoly {
            field: self.field.clone(),
            var: self.var,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &FieldPoly {
    type Output = FieldPoly;
    fn mul(self, rhs: &FieldPoly) -> FieldPoly {
        self.compatible(rhs);
        kernel::mul(self, rhs)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for FieldPoly {
            type Output = FieldPoly;
            fn $m(self, rhs: FieldPoly) -> FieldPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&FieldPoly> for FieldPoly {
            type Output = FieldPoly;
            fn $m(self, rhs: &FieldPoly) -> FieldPoly {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for FieldPoly {
    type Output = FieldPoly;
    fn neg(self) -> FieldPoly {
        -&self
    }
}

impl fmt::Debug for FieldPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FieldPoly[{}, n={}](",
            self.var.symbol(),
            self.field.order()
        )?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for FieldPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let x = self.var.symbol();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let body = match c.as_rational() {
                Some(r) => rational_to_string(r),
                None => format!("({c})"),
            };
            match i {
                0 => write!(f, "{body}")?,
                1 => write!(f, "{body}*{x}")?,
                _ => write!(f, "{body}*{x}^{i}")?,
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct FieldPolyRepr {
    var: VarKind,
    n: u32,
    coeffs: Vec<CycloNumRepr>,
}

impl Serialize for FieldPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FieldPolyRepr {
            var: self.var,
            n: self.field.order(),
            coeffs: self.coeffs.iter().map(CycloNumRepr::from_num).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = FieldPolyRepr::deserialize(d)?;
        if repr.n == 0 {
            return Err(serde::de::Error::custom("field order must be positive"));
        }
        let field = CycloField::new(repr.n);
        let coeffs = repr
            .coeffs
            .into_iter()
            .map(|c| c.into_num(Some(&field)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Ok(FieldPoly::from_coeffs(field, repr.var, coeffs))
    }
}
