//! Right/wrong-side Q pairs and the functional relations they generate.
//!
//! Given the solved `Q` of a sector `p` and `P` of the opposite sector
//! `p' = ML - p`, this module checks the two fundamental Wronskian-type
//! relations, builds the quantum Wronskian family `t_s` and verifies the
//! Plücker hierarchy, the fusion relations and the decomposition
//! `P = F·Q + C`.
//!
//! Everything involving `t_s` lives in the variable `w = z^{1/2}` over
//! `Q(ξ)` with `ξ` a primitive `4(L+2)`-th root of unity, so `q = ξ^2` and a
//! rescaling `z ↦ q^x z` is the rescaling `w ↦ ξ^x w`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{CycloField, CycloNum};
use crate::halfint::HalfInt;
use crate::poly::{FieldPoly, VarKind};
use crate::qsolver::{
    build_linear_system, solve_q_linear, transfer_eigenvalue, verify_tq, ChainParams, QPolynomial,
};

/// `Q` of sector `p` together with `P` of sector `ML - p`.
#[derive(Clone, Debug)]
pub struct QPPair {
    pub params: ChainParams,
    pub q: QPolynomial,
    pub p: QPolynomial,
}

impl QPPair {
    /// Pairs two polynomials without solving anything. Used to feed
    /// deliberately wrong pairs to the checks.
    pub fn from_parts(q: QPolynomial, p: QPolynomial) -> Self {
        QPPair {
            params: *q.params(),
            q,
            p,
        }
    }

    /// `m = ML - 2p` of the `Q` side.
    pub fn m(&self) -> i64 {
        self.params.m()
    }

    /// `a = (L+1)m/2`.
    pub fn twist(&self) -> i64 {
        self.params.twist()
    }

    /// `2 sh((L+1)(2p-ML)πi/(2(L+2))) = q^{-a} - q^a`.
    pub fn wronskian_constant(&self) -> CycloNum {
        self.params.field().sh_coeff(-self.twist())
    }
}

/// Solves the complementary sector and checks its TQ equation.
pub fn wrong_side_p(q: &QPolynomial) -> Result<QPPair> {
    let params = *q.params();
    let other = params.complement();
    let p = solve_q_linear(&build_linear_system(&other))?;
    let residual = verify_tq(&p);
    if !residual.is_zero() {
        return Err(violation("tq_wrong_side", &residual));
    }
    if transfer_eigenvalue(&params) != transfer_eigenvalue(&other) {
        return Err(Error::InvariantViolation(
            "right and wrong sectors disagree on the transfer eigenvalue".into(),
        ));
    }
    Ok(QPPair {
        params,
        q: q.clone(),
        p,
    })
}

fn violation(name: &str, residual: &FieldPoly) -> Error {
    Error::IdentityViolation {
        name: name.to_string(),
        residual_degree: residual.degree().unwrap_or(0),
    }
}

/// A named identity together with its residual (zero when it holds).
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: String,
    pub residual: FieldPoly,
}

impl IdentityCheck {
    pub fn new(name: impl Into<String>, residual: FieldPoly) -> Self {
        IdentityCheck {
            name: name.into(),
            residual,
        }
    }

    pub fn holds(&self) -> bool {
        self.residual.is_zero()
    }

    pub fn into_result(self) -> Result<()> {
        if self.holds() {
            Ok(())
        } else {
            Err(violation(&self.name, &self.residual))
        }
    }
}

// Π_{j in range} (z q^{k(j)} - 1)^M over the z-field.
fn z_product(field: &CycloField, m: u32, exps: impl IntoIterator<Item = i64>) -> FieldPoly {
    exps.into_iter()
        .fold(FieldPoly::one(field, VarKind::Z), |acc, k| {
            &acc * &FieldPoly::shifted_unit_power(field, VarKind::Z, k, m)
        })
}

fn division_check(
    name: &str,
    num: &FieldPoly,
    den: &FieldPoly,
) -> Result<(IdentityCheck, FieldPoly)> {
    let (quot, rem) = num.div_rem(den)?;
    Ok((IdentityCheck::new(name, rem), quot))
}

/// Checks of the first and second fundamental relations, the `Ψ1`/`Ψ2`
/// chain and both TQ equations. Never fails on a violated identity; the
/// residuals are reported instead.
pub fn fundamental_checks(pair: &QPPair) -> Result<Vec<IdentityCheck>> {
    let params = &pair.params;
    let field = params.field();
    let l = params.l() as i64;
    let m = params.sites();
    let a = pair.twist();
    let (q, p) = (pair.q.poly(), pair.p.poly());
    let qa = field.q_power(a);
    let qma = field.q_power(-a);
    let c = pair.wronskian_constant();
    let mut checks = vec![
        IdentityCheck::new("tq_right", verify_tq(&pair.q)),
        IdentityCheck::new("tq_wrong", verify_tq(&pair.p)),
        IdentityCheck::new(
            "transfer_eigenvalue_match",
            FieldPoly::constant(
                &transfer_eigenvalue(params) - &transfer_eigenvalue(pair.p.params()),
                VarKind::Z,
            ),
        ),
    ];

    // q^a P(zq)Q(zq^-1) - q^-a Q(zq)P(zq^-1) = C Π_{j=1}^{L} (zq^{2j+1}-1)^M
    let first_lhs = &(&p.scale_arg(1) * &q.scale_arg(-1)).scale(&qa)
        - &(&q.scale_arg(1) * &p.scale_arg(-1)).scale(&qma);
    let first_rhs = z_product(&field, m, (1..=l).map(|j| 2 * j + 1)).scale(&c);
    checks.push(IdentityCheck::new(
        "first_fundamental",
        &first_lhs - &first_rhs,
    ));

    // Ψ1 from both one-sided relations
    let up_lhs = &(&p.scale_arg(2) * q).scale(&qa) - &(&q.scale_arg(2) * p).scale(&qma);
    let down_lhs = &(&q.scale_arg(-2) * p).scale(&qa) - &(&p.scale_arg(-2) * q).scale(&qma);
    let (chk, psi1) = division_check(
        "psi1_division_up",
        &up_lhs,
        &FieldPoly::shifted_unit_power(&field, VarKind::Z, -2, m),
    )?;
    checks.push(chk);
    let (chk, psi1_down) = division_check(
        "psi1_division_down",
        &down_lhs,
        &FieldPoly::shifted_unit_power(&field, VarKind::Z, 2, m),
    )?;
    checks.push(chk);
    checks.push(IdentityCheck::new("psi1_consistency", &psi1 - &psi1_down));
    let psi1_closed = z_product(&field, m, (2..=l).map(|j| 2 * j)).scale(&c);
    checks.push(IdentityCheck::new("psi1_closed_form", &psi1 - &psi1_closed));

    if l >= 3 {
        let (chk, psi2) = division_check(
            "psi2_division",
            &psi1.scale_arg(-1),
            &FieldPoly::shifted_unit_power(&field, VarKind::Z, 3, m),
        )?;
        checks.push(chk);
        let mirrored = &FieldPoly::shifted_unit_power(&field, VarKind::Z, -3, m) * &psi2;
        checks.push(IdentityCheck::new(
            "psi2_mirror",
            &psi1.scale_arg(1) - &mirrored,
        ));
    }

    // second relation, both through τΨ1 and through its closed form
    let second_lhs = &(&p.scale_arg(2) * &q.scale_arg(-2)).scale(&field.q_power(2 * a))
        - &(&q.scale_arg(2) * &p.scale_arg(-2)).scale(&field.q_power(-2 * a));
    let z_minus_1 = FieldPoly::shifted_unit_power(&field, VarKind::Z, 0, m);
    let via_tau = (&z_minus_1 * &psi1).scale(&transfer_eigenvalue(params));
    checks.push(IdentityCheck::new(
        "second_fundamental_via_psi1",
        &second_lhs - &via_tau,
    ));
    let second_rhs =
        (&z_minus_1 * &z_product(&field, m, (2..=l).map(|j| 2 * j))).scale(&field.sh_coeff(-2 * a));
    checks.push(IdentityCheck::new(
        "second_fundamental",
        &second_lhs - &second_rhs,
    ));
    Ok(checks)
}

/// Like [`fundamental_checks`] but fails with `IdentityViolation` on the
/// first nonzero residual.
pub fn verify_fundamental(pair: &QPPair) -> Result<Vec<IdentityCheck>> {
    let checks = fundamental_checks(pair)?;
    if let Some(bad) = checks.iter().find(|c| !c.holds()) {
        return Err(violation(&bad.name, &bad.residual));
    }
    Ok(checks)
}

/// `Q̃ = z^{eQ} Q` and `P̃ = z^{eP} P` as `w`-polynomials over the
/// order-`4(L+2)` field, both multiplied by a common `w^shift` so that no
/// negative powers appear.
#[derive(Clone, Debug)]
pub struct TildePair {
    pub field: CycloField,
    pub q: FieldPoly,
    pub p: FieldPoly,
    /// `(L+1)(2p-ML+1)/4`, in powers of `z`.
    pub q_exponent: HalfInt,
    /// `(L+1)(ML+1-2p)/4`, in powers of `z`.
    pub p_exponent: HalfInt,
    /// Common extra power of `w`.
    pub shift: usize,
}

/// The order-`4(L+2)` field hosting `ξ = q^{1/2}`.
pub fn w_field(params: &ChainParams) -> CycloField {
    CycloField::new(2 * params.q_order())
}

pub fn make_tilde(pair: &QPPair) -> Result<TildePair> {
    make_tilde_with_shift(pair, 0)
}

/// As [`make_tilde`], with `extra` additional powers of `w` on both sides.
pub fn make_tilde_with_shift(pair: &QPPair, extra: usize) -> Result<TildePair> {
    let l1 = pair.params.l() as i64 + 1;
    let m = pair.m();
    let q_exponent = HalfInt::from_twice(l1 * (1 - m) / 2);
    let p_exponent = HalfInt::from_twice(l1 * (1 + m) / 2);
    let base = (-q_exponent.twice()).max(-p_exponent.twice()).max(0) as usize;
    let shift = base + extra;
    let field = w_field(&pair.params);
    let q = pair
        .q
        .poly()
        .lift(&field)?
        .to_w()
        .shift_up((q_exponent.twice() + shift as i64) as usize);
    let p = pair
        .p
        .poly()
        .lift(&field)?
        .to_w()
        .shift_up((p_exponent.twice() + shift as i64) as usize);
    Ok(TildePair {
        field,
        q,
        p,
        q_exponent,
        p_exponent,
        shift,
    })
}

/// `Δ(a, b) = P̃(a)Q̃(b) - Q̃(a)P̃(b)` at `a = ξ^{ka} w`, `b = ξ^{kb} w`.
pub fn delta(p: &FieldPoly, q: &FieldPoly, ka: i64, kb: i64) -> FieldPoly {
    &(&p.scale_arg(ka) * &q.scale_arg(kb)) - &(&q.scale_arg(ka) * &p.scale_arg(kb))
}

fn compute_t(tilde: &TildePair, s: HalfInt) -> FieldPoly {
    let x = s.twice() + 1;
    delta(&tilde.p, &tilde.q, x, -x)
}

/// The quantum Wronskians `t_s` of a pair, precomputed on a window of `s`.
#[derive(Clone, Debug)]
pub struct WronskianFamily {
    pub pair: QPPair,
    pub tilde: TildePair,
    t: BTreeMap<HalfInt, FieldPoly>,
    pub psi1: FieldPoly,
    pub psi2: Option<FieldPoly>,
    /// `2 sh((L+1)(2p-ML)πi/(2(L+2)))` in the order-`2(L+2)` field.
    pub c: CycloNum,
}

impl WronskianFamily {
    /// Builds the family with `t_s` stored for `|2s| ≤ span`.
    pub fn new(pair: QPPair, span: i64) -> Result<Self> {
        let tilde = make_tilde(&pair)?;
        let t = (-span..=span)
            .map(|tw| {
                let s = HalfInt::from_twice(tw);
                (s, compute_t(&tilde, s))
            })
            .collect();
        let field = pair.params.field();
        let m = pair.params.sites();
        let (q, p) = (pair.q.poly(), pair.p.poly());
        let a = pair.twist();
        let up_lhs = &(&p.scale_arg(2) * q).scale(&field.q_power(a))
            - &(&q.scale_arg(2) * p).scale(&field.q_power(-a));
        let psi1 = up_lhs.exact_div(&FieldPoly::shifted_unit_power(&field, VarKind::Z, -2, m))?;
        let psi2 = if pair.params.l() >= 3 {
            Some(
                psi1.scale_arg(-1)
                    .exact_div(&FieldPoly::shifted_unit_power(&field, VarKind::Z, 3, m))?,
            )
        } else {
            None
        };
        let c = pair.wronskian_constant();
        Ok(WronskianFamily {
            pair,
            tilde,
            t,
            psi1,
            psi2,
            c,
        })
    }

    pub fn params(&self) -> &ChainParams {
        &self.pair.params
    }

    pub fn w_field(&self) -> &CycloField {
        &self.tilde.field
    }

    /// `t_s`, from the stored window or computed on the spot.
    pub fn t(&self, s: HalfInt) -> FieldPoly {
        self.t
            .get(&s)
            .cloned()
            .unwrap_or_else(|| compute_t(&self.tilde, s))
    }

    pub fn stored(&self) -> impl Iterator<Item = (&HalfInt, &FieldPoly)> {
        self.t.iter()
    }

    fn lift_z(&self, p: &FieldPoly) -> FieldPoly {
        p.lift(self.w_field())
            .expect("w-field order is a multiple")
            .to_w()
    }

    fn lift_num(&self, c: &CycloNum) -> CycloNum {
        c.lift(self.w_field()).expect("w-field order is a multiple")
    }

    /// `w^{L+1+2·shift}`, the common monomial of `t_0` and `t_{1/2}`.
    fn t_monomial(&self) -> FieldPoly {
        let deg = self.params().l() as usize + 1 + 2 * self.tilde.shift;
        FieldPoly::monomial(self.w_field().one(), deg, VarKind::W)
    }

    /// `C z^{(L+1)/2} Π_{j=1}^{L} (zq^{2j+1}-1)^M`.
    pub fn t0_closed(&self) -> FieldPoly {
        let params = self.params();
        let field = params.field();
        let prod = z_product(
            &field,
            params.sites(),
            (1..=params.l() as i64).map(|j| 2 * j + 1),
        );
        (&self.t_monomial() * &self.lift_z(&prod)).scale(&self.lift_num(&self.c))
    }

    /// `2 sh((L+1)(2p-ML)πi/(L+2)) z^{(L+1)/2} (z-1)^M Π_{j=2}^{L} (zq^{2j}-1)^M`.
    pub fn t_half_closed(&self) -> FieldPoly {
        let params = self.params();
        let field = params.field();
        let m = params.sites();
        let prod = &FieldPoly::shifted_unit_power(&field, VarKind::Z, 0, m)
            * &z_product(&field, m, (2..=params.l() as i64).map(|j| 2 * j));
        let c2 = field.sh_coeff(-2 * self.pair.twist());
        (&self.t_monomial() * &self.lift_z(&prod)).scale(&self.lift_num(&c2))
    }

    /// Structural checks on the family: `t_{-1/2} = 0`, antisymmetry on the
    /// stored window, the closed forms of `t_0` and `t_{1/2}`, and
    /// homogeneity of `t_0` under one more common power of `w`.
    pub fn structure_checks(&self) -> Result<Vec<IdentityCheck>> {
        let mut checks = vec![IdentityCheck::new(
            "t_minus_half_zero",
            self.t(HalfInt::MINUS_HALF),
        )];
        for (s, ts) in &self.t {
            let partner = HalfInt::from_twice(-s.twice() - 2);
            if let Some(tp) = self.t.get(&partner) {
                if partner >= *s {
                    checks.push(IdentityCheck::new(
                        format!("t_antisymmetry[s={s}]"),
                        ts + tp,
                    ));
                }
            }
        }
        checks.push(IdentityCheck::new(
            "t0_closed_form",
            &self.t(HalfInt::ZERO) - &self.t0_closed(),
        ));
        checks.push(IdentityCheck::new(
            "t_half_closed_form",
            &self.t(HalfInt::HALF) - &self.t_half_closed(),
        ));
        let shifted = make_tilde_with_shift(&self.pair, 1)?;
        let w2 = FieldPoly::monomial(self.w_field().one(), 2, VarKind::W);
        checks.push(IdentityCheck::new(
            "tilde_shift_homogeneity",
            &compute_t(&shifted, HalfInt::ZERO) - &(&w2 * &self.t(HalfInt::ZERO)),
        ));
        Ok(checks)
    }
}

/// `t_s = P̃(wξ^{2s+1})Q̃(wξ^{-(2s+1)}) - P̃(wξ^{-(2s+1)})Q̃(wξ^{2s+1})`.
pub fn wronskian_t(family: &WronskianFamily, s: HalfInt) -> FieldPoly {
    family.t(s)
}

// One term t_a(w ξ^x) · t_b(w ξ^y) = [t_a · t_b(w ξ^{y-x})](w ξ^x).
struct TermCache<'a> {
    family: &'a WronskianFamily,
    products: HashMap<(HalfInt, HalfInt, i64), FieldPoly>,
}

impl<'a> TermCache<'a> {
    fn new(family: &'a WronskianFamily) -> Self {
        TermCache {
            family,
            products: HashMap::new(),
        }
    }

    fn term(&mut self, a: HalfInt, x: i64, b: HalfInt, y: i64) -> FieldPoly {
        let family = self.family;
        let prod = self
            .products
            .entry((a, b, y - x))
            .or_insert_with(|| &family.t(a) * &family.t(b).scale_arg(y - x));
        prod.scale_arg(x)
    }

    fn plucker(&mut self, s1: HalfInt, s2: HalfInt, s3: HalfInt) -> FieldPoly {
        let half = HalfInt::HALF;
        let shift = |s: HalfInt| -(s.twice() + 1);
        let pair_shift = |u: HalfInt, v: HalfInt| -(u.twice() + v.twice() + 2);
        let t1 = self.term(s1, shift(s1), s3 - s2 - half, pair_shift(s2, s3));
        let t2 = self.term(s2, shift(s2), s3 - s1 - half, pair_shift(s1, s3));
        let t3 = self.term(s3, shift(s3), s2 - s1 - half, pair_shift(s1, s2));
        &(&t1 - &t2) + &t3
    }
}

/// Residual of the three-term hierarchy
/// `t_{s1}(zq^{-(2s1+1)}) t_{s3-s2-1/2}(zq^{-2(s2+s3+1)}) - (1↔2) + (1→3, 3→1)`.
pub fn plucker_check(family: &WronskianFamily, s1: HalfInt, s2: HalfInt, s3: HalfInt) -> FieldPoly {
    TermCache::new(family).plucker(s1, s2, s3)
}

/// Hierarchy residuals for every triple drawn from `values`, sharing
/// products between triples.
pub fn plucker_sweep(
    family: &WronskianFamily,
    values: &[HalfInt],
) -> Vec<((HalfInt, HalfInt, HalfInt), FieldPoly)> {
    let mut cache = TermCache::new(family);
    let mut out = Vec::with_capacity(values.len().pow(3));
    for &s1 in values {
        for &s2 in values {
            for &s3 in values {
                out.push(((s1, s2, s3), cache.plucker(s1, s2, s3)));
            }
        }
    }
    out
}

/// Residual of the fusion relation obtained from the hierarchy at
/// `(s, -1, 0)`:
/// `τ (z-1)^M t_s(zq^{-(2s+1)}) = q^{(L+1)/2}(zq^{-2}-1)^M t_{s-1/2}(zq^{-2(s+1)}) + q^{-(L+1)/2}(zq^2-1)^M t_{s+1/2}(zq^{-2s})`,
/// with the `q^{±(L+1)/2}` weights adjusted for the recorded `w`-shift.
pub fn fusion_check(family: &WronskianFamily, s: HalfInt) -> FieldPoly {
    let params = family.params();
    let wf = family.w_field();
    let m = params.sites();
    let zf = params.field();
    let tau = family.lift_num(&transfer_eigenvalue(params));
    let fac = |k: i64| family.lift_z(&FieldPoly::shifted_unit_power(&zf, VarKind::Z, k, m));
    let weight = params.l() as i64 + 1 + 2 * family.tilde.shift as i64;
    let half = HalfInt::HALF;
    let tw = s.twice();
    let lhs = (&fac(0) * &family.t(s).scale_arg(-(tw + 1))).scale(&tau);
    let minus = (&fac(-2) * &family.t(s - half).scale_arg(-(tw + 2))).scale(&wf.q_power(weight));
    let plus = (&fac(2) * &family.t(s + half).scale_arg(-tw)).scale(&wf.q_power(-weight));
    &(&lhs - &minus) - &plus
}

/// Polynomials of the partial-fraction construction `P = F·Q + C`.
#[derive(Clone, Debug)]
pub struct PQDecomposition {
    pub f: FieldPoly,
    pub c: FieldPoly,
    pub a: FieldPoly,
    pub b: FieldPoly,
    pub r: FieldPoly,
}

/// Decomposes the first fundamental relation by partial fractions over
/// `Q(zq)Q(zq^{-1})` and rebuilds `P = F·Q + C`.
pub fn pq_decompose(pair: &QPPair) -> Result<PQDecomposition> {
    let params = &pair.params;
    let field = params.field();
    let a_exp = pair.twist();
    let (qa, qma) = (field.q_power(a_exp), field.q_power(-a_exp));
    let q = pair.q.poly();
    let q_up = q.scale_arg(1);
    let q_down = q.scale_arg(-1);

    let (g, s, t) = FieldPoly::extended_gcd(&q_up, &q_down)?;
    if g.degree() != Some(0) {
        return Err(Error::NotCoprime {
            gcd_degree: g.degree().unwrap_or(0),
        });
    }

    let l = params.l() as i64;
    let rhs = z_product(&field, params.sites(), (1..=l).map(|j| 2 * j + 1))
        .scale(&pair.wronskian_constant());
    // rhs = R·Q↑Q↓ + A(zq)·Q↓ - B(zq^-1)·Q↑
    let (r, rem) = rhs.div_rem(&(&q_up * &q_down))?;
    let a_up = (&rem * &t).div_rem(&q_up)?.1;
    let b_down = -&(&rem * &s).div_rem(&q_down)?.1;
    let a = a_up.scale_arg(-1);
    let b = b_down.scale_arg(1);

    let ab = &a.scale(&qma) - &b.scale(&qa);
    if !ab.is_zero() {
        return Err(violation("a_b_relation", &ab));
    }
    let c = a.scale(&qma);

    // R_k = (q^{a+k} - q^{-a-k}) F_k
    let mut f_coeffs = Vec::with_capacity(r.coeffs().len());
    for (k, rk) in r.coeffs().iter().enumerate() {
        let factor = field.sh_coeff(a_exp + k as i64);
        if factor.is_zero() {
            return Err(Error::FSolveSingular { k });
        }
        f_coeffs.push(rk * &factor.inverse()?);
    }
    let f = FieldPoly::from_coeffs(field.clone(), VarKind::Z, f_coeffs);
    let r_check = &f.scale_arg(1).scale(&qa) - &f.scale_arg(-1).scale(&qma);
    if r_check != r {
        return Err(violation("r_from_f", &(&r_check - &r)));
    }

    let residual = &(pair.p.poly() - &(&f * q)) - &c;
    if !residual.is_zero() {
        return Err(violation("p_equals_fq_plus_c", &residual));
    }
    Ok(PQDecomposition { f, c, a, b, r })
}

/// One line of a machine-readable identity report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity_name: String,
    pub params: ChainParams,
    pub status: IdentityStatus,
    pub residual_degree: Option<usize>,
    pub max_coeff_height: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdentityStatus {
    Zero,
    Nonzero,
}

impl IdentityReport {
    pub fn from_check(params: ChainParams, check: &IdentityCheck) -> Self {
        IdentityReport {
            identity_name: check.name.clone(),
            params,
            status: if check.holds() {
                IdentityStatus::Zero
            } else {
                IdentityStatus::Nonzero
            },
            residual_degree: check.residual.degree(),
            max_coeff_height: check.residual.max_height_bits(),
        }
    }
}
