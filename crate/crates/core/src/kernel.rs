//! Product kernel for [`FieldPoly`].
//!
//! Both operands are brought to a common-denominator integer form, a
//! polynomial in `x` whose coefficients are integer vectors in the power
//! basis. The integer product is computed either by a direct convolution or,
//! for larger inputs, by Kronecker substitution into a single big-integer
//! product; the result is then reduced modulo `Φ_n` and divided by the
//! product of denominators. Both routes are exact.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::Zero;

use crate::poly::FieldPoly;

// Below this many scalar multiply-adds the direct convolution wins.
const KRONECKER_THRESHOLD: usize = 4096;

pub(crate) fn mul(a: &FieldPoly, b: &FieldPoly) -> FieldPoly {
    let field = a.field();
    if a.is_zero() || b.is_zero() {
        return FieldPoly::zero(field, a.var());
    }
    let (den_a, rows_a) = a.integer_form();
    let (den_b, rows_b) = b.integer_form();
    let phi = field.degree();
    let work = nonzero(&rows_a) * nonzero(&rows_b);
    let raw = if work < KRONECKER_THRESHOLD {
        convolve_direct(&rows_a, &rows_b, phi)
    } else {
        convolve_kronecker(&rows_a, &rows_b, phi)
    };
    let rows = raw.iter().map(|r| field.reduce_ints(r)).collect();
    FieldPoly::from_integer_form(field, a.var(), &(den_a * den_b), rows)
}

fn nonzero(rows: &[Vec<BigInt>]) -> usize {
    rows.iter().flatten().filter(|v| !v.is_zero()).count()
}

/// Unreduced product rows of length `2φ - 1`.
pub(crate) fn convolve_direct(
    a: &[Vec<BigInt>],
    b: &[Vec<BigInt>],
    phi: usize,
) -> Vec<Vec<BigInt>> {
    let width = 2 * phi - 1;
    let mut out = vec![vec![BigInt::zero(); width]; a.len() + b.len() - 1];
    for (i, ra) in a.iter().enumerate() {
        for (s, x) in ra.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, rb) in b.iter().enumerate() {
                let row = &mut out[i + j];
                for (t, y) in rb.iter().enumerate() {
                    if !y.is_zero() {
                        row[s + t] += x * y;
                    }
                }
            }
        }
    }
    out
}

fn max_bits(rows: &[Vec<BigInt>]) -> u64 {
    rows.iter().flatten().map(BigInt::bits).max().unwrap_or(0)
}

// Packs |v| (or only the entries of one sign) into 32-bit windows.
fn pack(rows: &[Vec<BigInt>], stride: usize, limbs: usize, keep: impl Fn(Sign) -> bool) -> BigUint {
    let mut digits = vec![0u32; rows.len() * stride * limbs];
    for (i, row) in rows.iter().enumerate() {
        for (s, v) in row.iter().enumerate() {
            if v.is_zero() || !keep(v.sign()) {
                continue;
            }
            let base = (i * stride + s) * limbs;
            for (k, d) in v.magnitude().to_u32_digits().into_iter().enumerate() {
                digits[base + k] = d;
            }
        }
    }
    BigUint::new(digits)
}

fn unpack(x: &BigUint, count: usize, limbs: usize) -> Vec<BigUint> {
    let digits = x.to_u32_digits();
    (0..count)
        .map(|k| {
            let lo = (k * limbs).min(digits.len());
            let hi = ((k + 1) * limbs).min(digits.len());
            BigUint::from_slice(&digits[lo..hi])
        })
        .collect()
}

/// Kronecker substitution: the 2-D integer convolution becomes one
/// big-integer product per sign class.
pub(crate) fn convolve_kronecker(
    a: &[Vec<BigInt>],
    b: &[Vec<BigInt>],
    phi: usize,
) -> Vec<Vec<BigInt>> {
    let width = 2 * phi - 1;
    let terms = (a.len().min(b.len()) * phi) as u64;
    let bound_bits = max_bits(a) + max_bits(b) + (64 - terms.leading_zeros() as u64) + 2;
    let limbs = bound_bits.div_ceil(32) as usize;

    let pos = |s: Sign| s == Sign::Plus;
    let neg = |s: Sign| s == Sign::Minus;
    let any = |_: Sign| true;

    // (A+ - A-)(B+ - B-) = 2(A+B+ + A-B-) - (A+ + A-)(B+ + B-)
    let pp = pack(a, width, limbs, pos) * pack(b, width, limbs, pos);
    let mm = pack(a, width, limbs, neg) * pack(b, width, limbs, neg);
    let aa = pack(a, width, limbs, any) * pack(b, width, limbs, any);

    let count = (a.len() + b.len() - 1) * width;
    let pp = unpack(&pp, count, limbs);
    let mm = unpack(&mm, count, limbs);
    let aa = unpack(&aa, count, limbs);

    let mut flat = pp
        .into_iter()
        .zip(mm)
        .zip(aa)
        .map(|((p, m), s)| BigInt::from((p + m) << 1u32) - BigInt::from(s));
    (0..a.len() + b.len() - 1)
        .map(|_| flat.by_ref().take(width).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(v: &[&[i64]]) -> Vec<Vec<BigInt>> {
        v.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn kronecker_agrees_with_direct() {
        let a = rows(&[
            &[3, -5, 0, 7],
            &[0, 0, 0, 0],
            &[-1, 2, -3, 4],
            &[9, 9, -9, 1],
        ]);
        let b = rows(&[&[-2, 0, 1, 1], &[4, -4, 4, -4]]);
        assert_eq!(convolve_kronecker(&a, &b, 4), convolve_direct(&a, &b, 4));
    }

    #[test]
    fn kronecker_handles_large_entries() {
        let big = BigInt::from(1u8) << 200u32;
        let a = vec![
            vec![big.clone(), -&big],
            vec![BigInt::from(-3), big.clone()],
        ];
        let b = vec![vec![-&big, BigInt::from(5)], vec![big.clone(), big.clone()]];
        assert_eq!(convolve_kronecker(&a, &b, 2), convolve_direct(&a, &b, 2));
    }
}
