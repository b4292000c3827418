//! Q polynomials of the spin-`L/2` chain at the Razumov–Stroganov point.
//!
//! Two independent routes produce `Q(z) = Π (z - z_j)` for a sector of `p`
//! Bethe roots: the linear system for the elementary symmetric polynomials
//! `e_j` ([`build_linear_system`], [`solve_q_linear`]) and the closed-form
//! interpolation formula ([`closed_form_q`]). [`verify_tq`] checks either
//! result against the TQ equation exactly.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{parse_rational, rational_to_string, CycloField, CycloNum};
use crate::linalg::{self, SolveFailure};
use crate::poly::{FieldPoly, VarKind};

/// Spin numerator `L` (spin `L/2`), half site count `N` (`M = 2N+1` sites)
/// and number of Bethe roots `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ChainParams {
    l: u32,
    n: u32,
    p: u32,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    #[serde(rename = "L")]
    l: u32,
    #[serde(rename = "N")]
    n: u32,
    p: u32,
}

impl TryFrom<RawParams> for ChainParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        ChainParams::new(r.l, r.n, r.p)
    }
}

impl From<ChainParams> for RawParams {
    fn from(c: ChainParams) -> Self {
        RawParams {
            l: c.l,
            n: c.n,
            p: c.p,
        }
    }
}

impl ChainParams {
    /// Validates `L` odd, `N ≥ 1` and the sector bound `NL ≤ p ≤ (N+1)L`.
    pub fn new(l: u32, n: u32, p: u32) -> Result<Self> {
        if l == 0 || l % 2 == 0 {
            return Err(Error::InvalidParams(format!(
                "L must be odd and positive, got {l}"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidParams("N must be at least 1".into()));
        }
        let (lo, hi) = (n * l, (n + 1) * l);
        if p < lo || p > hi {
            return Err(Error::InvalidParams(format!(
                "p = {p} outside the sector range {lo}..={hi} for L = {l}, N = {n}"
            )));
        }
        Ok(ChainParams { l, n, p })
    }

    /// The `S^z = 1/2` sector, `p = (ML - 1)/2`.
    pub fn half_sector(l: u32, n: u32) -> Result<Self> {
        let ml = (2 * n + 1) * l;
        ChainParams::new(l, n, (ml - 1) / 2)
    }

    /// Every valid sector for the given `L` and `N`, in increasing `p`.
    pub fn sectors(l: u32, n: u32) -> Result<Vec<ChainParams>> {
        ChainParams::new(l, n, n * l)?;
        Ok((n * l..=(n + 1) * l)
            .map(|p| ChainParams { l, n, p })
            .collect())
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Number of sites `M = 2N + 1`.
    pub fn sites(&self) -> u32 {
        2 * self.n + 1
    }

    /// `m = ML - 2p`, twice the total `S^z`.
    pub fn m(&self) -> i64 {
        (self.sites() * self.l) as i64 - 2 * self.p as i64
    }

    /// Exponent `(L+1)m/2` carried by the TQ prefactors `q^{±(L+1)m/2}`.
    pub fn twist(&self) -> i64 {
        (self.l as i64 + 1) * self.m() / 2
    }

    /// Order `2(L+2)` of the root of unity `q`.
    pub fn q_order(&self) -> u32 {
        2 * (self.l + 2)
    }

    pub fn field(&self) -> CycloField {
        CycloField::for_spin(self.l)
    }

    /// The opposite-spin sector `p' = ML - p`.
    pub fn complement(&self) -> ChainParams {
        ChainParams {
            p: self.sites() * self.l - self.p,
            ..*self
        }
    }

    /// Upper end `N(L+2) + (L+1)/2` of the row range used for `S^z = 1/2`.
    pub fn half_range_end(&self) -> i64 {
        (self.n * (self.l + 2) + (self.l + 1) / 2) as i64
    }
}

impl fmt::Display for ChainParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L={} N={} p={}", self.l, self.n, self.p)
    }
}

fn binomial(n: u32, k: i64) -> BigInt {
    if k < 0 || k > n as i64 {
        return BigInt::zero();
    }
    let k = k as u32;
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// One coefficient equation `c + Σ_{j≥1} binom(M, ℓ-j) e_j = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemRow {
    pub ell: i64,
    /// Coefficients of `e_1, …, e_p`.
    pub coeffs: Vec<BigInt>,
    /// Contribution of `e_0 = 1`, i.e. `binom(M, ℓ)`.
    pub constant: BigInt,
}

impl SystemRow {
    /// `[constant, coeffs...]`, the way the equations are usually printed.
    pub fn as_vector(&self) -> Vec<BigInt> {
        std::iter::once(self.constant.clone())
            .chain(self.coeffs.iter().cloned())
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub params: ChainParams,
    pub rows: Vec<SystemRow>,
    /// Values of `ℓ` whose prefactor vanishes identically.
    pub dropped: Vec<i64>,
}

impl LinearSystem {
    /// Rows with `ℓ ≤ N(L+2) + (L+1)/2`.
    pub fn half_range_rows(&self) -> impl Iterator<Item = &SystemRow> {
        let end = self.params.half_range_end();
        self.rows.iter().filter(move |r| r.ell <= end)
    }

    pub fn kept_ells(&self) -> Vec<i64> {
        self.rows.iter().map(|r| r.ell).collect()
    }
}

/// The factor in front of the `z^{M+p-ℓ}` coefficient of the expanded TQ
/// equation: `q^{2ℓ-a} + q^{a-2ℓ} - q^a - q^{-a}` with `a = (L+1)m/2`.
pub fn row_prefactor(params: &ChainParams, field: &CycloField, ell: i64) -> CycloNum {
    let a = params.twist();
    &field.ch_coeff(2 * ell - a) - &field.ch_coeff(a)
}

/// Expands the TQ equation coefficient-wise for `ℓ = 0..=M+p` and keeps the
/// rows whose prefactor is nonzero in the field.
pub fn build_linear_system(params: &ChainParams) -> LinearSystem {
    let field = params.field();
    let m = params.sites();
    let p = params.p() as i64;
    let mut rows = Vec::new();
    let mut dropped = Vec::new();
    for ell in 0..=(m as i64 + p) {
        if row_prefactor(params, &field, ell).is_zero() {
            dropped.push(ell);
            continue;
        }
        let coeffs = (1..=p).map(|j| binomial(m, ell - j)).collect();
        rows.push(SystemRow {
            ell,
            coeffs,
            constant: binomial(m, ell),
        });
    }
    LinearSystem {
        params: *params,
        rows,
        dropped,
    }
}

/// A solved Q polynomial together with its elementary symmetric data.
#[derive(Clone, Debug, PartialEq)]
pub struct QPolynomial {
    params: ChainParams,
    poly: FieldPoly,
    elementary: Vec<BigRational>,
}

impl QPolynomial {
    /// Assembles `Q(z) = Σ_j (-1)^j e_j z^{p-j}` and checks the invariants
    /// `e_0 = 1`, `Q(0) = 1` and `e_{p-j} = (-1)^p e_j`.
    pub fn from_elementary(params: ChainParams, elementary: Vec<BigRational>) -> Result<Self> {
        let p = params.p() as usize;
        if elementary.len() != p + 1 {
            return Err(Error::InvariantViolation(format!(
                "expected {} elementary symmetric values, got {}",
                p + 1,
                elementary.len()
            )));
        }
        let coeffs: Vec<BigRational> = (0..=p)
            .map(|deg| {
                let j = p - deg;
                if j % 2 == 0 {
                    elementary[j].clone()
                } else {
                    -elementary[j].clone()
                }
            })
            .collect();
        let poly = FieldPoly::from_rationals(&params.field(), VarKind::Z, &coeffs);
        let q = QPolynomial {
            params,
            poly,
            elementary,
        };
        q.check_invariants()?;
        Ok(q)
    }

    fn from_poly(params: ChainParams, poly: FieldPoly) -> Result<Self> {
        let p = params.p() as usize;
        let coeffs = poly
            .rational_coeffs()
            .ok_or_else(|| Error::InvariantViolation("irrational coefficient in Q".into()))?;
        if coeffs.len() != p + 1 {
            return Err(Error::InvariantViolation(format!(
                "Q has degree {:?}, expected {p}",
                poly.degree()
            )));
        }
        let elementary = (0..=p)
            .map(|j| {
                let c = coeffs[p - j].clone();
                if j % 2 == 0 {
                    c
                } else {
                    -c
                }
            })
            .collect();
        QPolynomial::from_elementary(params, elementary)
    }

    pub fn check_invariants(&self) -> Result<()> {
        let p = self.params.p() as usize;
        let e = &self.elementary;
        if !e[0].is_one() {
            return Err(Error::InvariantViolation("e_0 != 1".into()));
        }
        let sign_even = p % 2 == 0;
        for j in 0..=p {
            let mirrored = if sign_even {
                e[j].clone()
            } else {
                -e[j].clone()
            };
            if e[p - j] != mirrored {
                return Err(Error::InvariantViolation(format!(
                    "palindrome fails at j = {j}"
                )));
            }
        }
        if !self.poly.coeff(0).is_one() {
            return Err(Error::InvariantViolation("Q(0) != 1".into()));
        }
        Ok(())
    }

    pub fn params(&self) -> &ChainParams {
        &self.params
    }

    pub fn poly(&self) -> &FieldPoly {
        &self.poly
    }

    /// `e_0, …, e_p`.
    pub fn elementary(&self) -> &[BigRational] {
        &self.elementary
    }

    /// Ascending rational coefficients of `Q(z)`.
    pub fn coefficients(&self) -> Vec<BigRational> {
        self.poly
            .rational_coeffs()
            .expect("Q has rational coefficients")
    }

    pub fn evaluate_rational(&self, x: &BigRational) -> BigRational {
        self.coefficients()
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn to_latex(&self) -> String {
        self.poly.to_latex()
    }
}

impl fmt::Display for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly)
    }
}

#[derive(Serialize, Deserialize)]
struct QPolynomialRepr {
    params: ChainParams,
    elementary: Vec<String>,
}

impl Serialize for QPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QPolynomialRepr {
            params: self.params,
            elementary: self.elementary.iter().map(rational_to_string).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = QPolynomialRepr::deserialize(d)?;
        let e = repr
            .elementary
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        QPolynomial::from_elementary(repr.params, e).map_err(serde::de::Error::custom)
    }
}

/// Solves every kept row at once (the system is over-determined in
/// general) and demands a unique consistent solution.
pub fn solve_q_linear(system: &LinearSystem) -> Result<QPolynomial> {
    let p = system.params.p() as usize;
    let to_rat = |v: &BigInt| BigRational::from_integer(v.clone());
    let a: Vec<Vec<BigRational>> = system
        .rows
        .iter()
        .map(|r| r.coeffs.iter().map(to_rat).collect())
        .collect();
    let b: Vec<BigRational> = system.rows.iter().map(|r| -to_rat(&r.constant)).collect();
    let solution = linalg::solve(&a, &b, p).map_err(|f| match f {
        SolveFailure::Inconsistent { row } => Error::InconsistentSystem {
            row: system.rows[row].ell,
        },
        SolveFailure::UnderDetermined { rank } => Error::UnderDetermined { rank, unknowns: p },
    })?;
    let mut e = Vec::with_capacity(p + 1);
    e.push(BigRational::one());
    e.extend(solution);
    QPolynomial::from_elementary(system.params, e)
}

/// Which summation limits the closed form uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NParity {
    Even,
    Odd,
}

/// Coefficients of the interpolation-formula numerator
/// `Σ_k α_k (z^{p+1+2N-(L+2)k} - z^{(L+2)k}) + Σ_k β_k (z^{(L+2)(N-k)} - z^{p+1-LN+(L+2)k})`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedFormQ {
    pub params: ChainParams,
    pub plus_terms: Vec<BigRational>,
    pub minus_terms: Vec<BigRational>,
    pub parity: NParity,
}

impl ClosedFormQ {
    pub fn new(params: &ChainParams) -> Result<Self> {
        let (l, n, p) = (params.l() as i64, params.n() as i64, params.p() as i64);
        let c0 = p + 1 - l * n;
        let parity = if n % 2 == 0 {
            NParity::Even
        } else {
            NParity::Odd
        };
        let (plus_count, minus_count) = match parity {
            NParity::Even => (n / 2 + 1, n / 2),
            NParity::Odd => ((n + 1) / 2, (n + 1) / 2),
        };
        let coeff = |k: i64, sign: i64| -> Result<BigRational> {
            let mut acc = BigRational::from_integer(binomial(n as u32, k));
            if k % 2 == 1 {
                acc = -acc;
            }
            for j in 0..=n {
                let den = sign * c0 + (l + 2) * (j - k);
                if den == 0 {
                    return Err(Error::ZeroDenominator {
                        k: k as usize,
                        j: j as usize,
                    });
                }
                acc *= BigRational::new((c0 + (l + 2) * j).into(), den.into());
            }
            Ok(acc)
        };
        let plus_terms = (0..plus_count)
            .map(|k| coeff(k, 1))
            .collect::<Result<_>>()?;
        let minus_terms = (0..minus_count)
            .map(|k| coeff(k, -1))
            .collect::<Result<_>>()?;
        Ok(ClosedFormQ {
            params: *params,
            plus_terms,
            minus_terms,
            parity,
        })
    }

    /// The bracketed numerator, of degree `p + M`.
    pub fn numerator(&self) -> FieldPoly {
        let (l, n, p) = (
            self.params.l() as usize,
            self.params.n() as usize,
            self.params.p() as usize,
        );
        let c0 = p + 1 - l * n;
        let mut coeffs = vec![BigRational::zero(); p + 2 * n + 2];
        for (k, a) in self.plus_terms.iter().enumerate() {
            coeffs[p + 1 + 2 * n - (l + 2) * k] += a;
            coeffs[(l + 2) * k] -= a;
        }
        for (k, b) in self.minus_terms.iter().enumerate() {
            coeffs[(l + 2) * (n - k)] += b;
            coeffs[c0 + (l + 2) * k] -= b;
        }
        FieldPoly::from_rationals(&self.params.field(), VarKind::Z, &coeffs)
    }
}

/// Closed-form Q: the interpolation numerator divided exactly by `(z-1)^{2N+1}`.
pub fn closed_form_q(params: &ChainParams) -> Result<(ClosedFormQ, QPolynomial)> {
    let cf = ClosedFormQ::new(params)?;
    let field = params.field();
    let denom = FieldPoly::shifted_unit_power(&field, VarKind::Z, 0, params.sites());
    let quotient = cf.numerator().exact_div(&denom)?;
    let q = QPolynomial::from_poly(*params, quotient)?;
    Ok((cf, q))
}

/// `2 ch((L+1)(ML-2p)πi/(2(L+2)))` as `q^a + q^{-a}`.
pub fn transfer_eigenvalue(params: &ChainParams) -> CycloNum {
    params.field().ch_coeff(params.twist())
}

/// Residual `τ(z-1)^M Q(z) - q^a (zq^{-2}-1)^M Q(zq^{-2}) - q^{-a} (zq^2-1)^M Q(zq^2)`.
pub fn verify_tq(q: &QPolynomial) -> FieldPoly {
    tq_residual(q.params(), q.poly())
}

/// TQ residual for an arbitrary z-polynomial in the sector's field.
pub fn tq_residual(params: &ChainParams, q: &FieldPoly) -> FieldPoly {
    let field = q.field();
    let m = params.sites();
    let a = params.twist();
    let tau = field.ch_coeff(a);
    let g = &FieldPoly::shifted_unit_power(field, VarKind::Z, 0, m) * q;
    let lhs = g.scale(&tau);
    let down = g.scale_arg(-2).scale(&field.q_power(a));
    let up = g.scale_arg(2).scale(&field.q_power(-a));
    &(&lhs - &down) - &up
}
