//! Bethe roots extracted numerically from an exact `Q`, the Bethe ansatz
//! equations at `η = -i(L+1)π/(L+2)`, and the divided-difference identity
//! behind the closed-form coefficients.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsolver::{ChainParams, QPolynomial};

const MAX_ITER: usize = 500;
const BACKWARD_TOL: f64 = 1e-10;
const POLE_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct BetheRoots {
    pub params: ChainParams,
    pub zroots: Vec<Complex64>,
    /// `u_j = log(z_j)/2`, principal branch.
    pub uroots: Vec<Complex64>,
    /// `|Q(z_j)| / Σ_k |c_k| |z_j|^k`, with `Q(z_j)` evaluated exactly.
    pub backward_errors: Vec<f64>,
}

impl BetheRoots {
    /// Wraps externally supplied roots, recomputing `u_j` and the
    /// backward errors against `q`.
    pub fn from_zroots(q: &QPolynomial, zroots: Vec<Complex64>) -> Self {
        let coeffs = q.coefficients();
        let backward_errors = zroots.iter().map(|z| backward_error(&coeffs, *z)).collect();
        let uroots = zroots.iter().map(|z| u_of_z(*z)).collect();
        BetheRoots {
            params: *q.params(),
            zroots,
            uroots,
            backward_errors,
        }
    }

    pub fn len(&self) -> usize {
        self.zroots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zroots.is_empty()
    }

    /// Coefficients (ascending) of `Π (z - z_j)`.
    pub fn rebuild(&self) -> Vec<Complex64> {
        let mut c = vec![Complex64::one()];
        for z in &self.zroots {
            let mut next = vec![Complex64::zero(); c.len() + 1];
            for (k, ck) in c.iter().enumerate() {
                next[k + 1] += ck;
                next[k] -= ck * z;
            }
            c = next;
        }
        c
    }

    /// `|Π z_j|`, which equals `|Q(0)| = 1` for a solved `Q`.
    pub fn product_modulus(&self) -> f64 {
        self.zroots.iter().map(|z| z.norm()).product()
    }

    /// Largest distance from some `1/z̄_j` to its nearest root.
    pub fn reciprocal_mismatch(&self) -> f64 {
        self.zroots
            .iter()
            .map(|z| {
                let r = 1.0 / z.conj();
                self.zroots
                    .iter()
                    .map(|w| (w - r).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }

    /// One record per root, with the per-root Bethe residual.
    pub fn records(&self) -> Result<Vec<RootRecord>> {
        let bae = bae_residuals(self)?;
        Ok(self
            .zroots
            .iter()
            .zip(&self.backward_errors)
            .zip(bae)
            .map(|((z, be), r)| RootRecord {
                re: z.re,
                im: z.im,
                backward_error: *be,
                bae_residual: r,
            })
            .collect())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::from("re,im,backward_error,bae_residual\n");
        for r in self.records()? {
            writeln!(
                out,
                "{:.17e},{:.17e},{:.3e},{:.3e}",
                r.re, r.im, r.backward_error, r.bae_residual
            )
            .expect("writing to a String");
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootRecord {
    pub re: f64,
    pub im: f64,
    pub backward_error: f64,
    pub bae_residual: f64,
}

/// `log(z)/2` folded into the strip `-π/2 < Im u ≤ π/2`.
pub fn u_of_z(z: Complex64) -> Complex64 {
    let mut u = 0.5 * z.ln();
    if u.im <= -PI / 2.0 + 1e-12 {
        u.im += PI;
    }
    u
}

fn exact(x: f64) -> BigRational {
    BigRational::from_f64(x).expect("finite root")
}

/// Relative backward error with `Q(z)` computed in exact rational
/// arithmetic at the binary value of `z`.
pub fn backward_error(coeffs: &[BigRational], z: Complex64) -> f64 {
    let (x, y) = (exact(z.re), exact(z.im));
    let (mut re, mut im) = (BigRational::zero(), BigRational::zero());
    for c in coeffs.iter().rev() {
        let nre = &re * &x - &im * &y + c;
        im = &re * &y + &im * &x;
        re = nre;
    }
    let value = Complex64::new(
        re.to_f64().unwrap_or(f64::INFINITY),
        im.to_f64().unwrap_or(f64::INFINITY),
    );
    let r = z.norm();
    let scale: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c.to_f64().unwrap_or(f64::INFINITY).abs() * r.powi(k as i32))
        .sum();
    value.norm() / scale
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let (mut p, mut dp) = (Complex64::zero(), Complex64::zero());
    for ck in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + ck;
    }
    (p, dp)
}

/// Aberth–Ehrlich iteration on the monic polynomial with ascending
/// coefficients `c`, started on a circle rotated by `phase`.
fn aberth(c: &[Complex64], phase: f64) -> Vec<Complex64> {
    let n = c.len() - 1;
    let lead = c[n];
    let c: Vec<Complex64> = c.iter().map(|x| x / lead).collect();
    // radius from the geometric mean of the roots
    let radius = c[0].norm().powf(1.0 / n as f64).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            Complex64::from_polar(
                radius * (1.0 + 0.03 * k as f64 / n as f64),
                2.0 * PI * k as f64 / n as f64 + phase,
            )
        })
        .collect();
    for _ in 0..MAX_ITER {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner(&c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| 1.0 / (z[i] - z[j]))
                .sum();
            let step = ratio / (Complex64::one() - ratio * repulsion);
            z[i] -= step;
            moved = moved.max(step.norm() / z[i].norm().max(1.0));
        }
        if moved < 1e-15 {
            break;
        }
    }
    // two Newton polishing steps
    for zi in z.iter_mut() {
        for _ in 0..2 {
            let (p, dp) = horner(&c, *zi);
            if dp.norm() > 0.0 {
                *zi -= p / dp;
            }
        }
    }
    z
}

/// All `p` roots of `Q`, certified by exact backward error.
pub fn find_roots(q: &QPolynomial) -> Result<BetheRoots> {
    find_roots_from(q, 0.4)
}

/// As [`find_roots`], with the starting circle rotated by a seeded random
/// phase.
pub fn find_roots_seeded(q: &QPolynomial, seed: u64) -> Result<BetheRoots> {
    let phase = StdRng::seed_from_u64(seed).random_range(0.0..2.0 * PI);
    find_roots_from(q, phase)
}

fn find_roots_from(q: &QPolynomial, phase: f64) -> Result<BetheRoots> {
    let coeffs = q.coefficients();
    if coeffs.len() < 2 {
        return Err(Error::InvalidParams("Q has no roots".into()));
    }
    let cf: Vec<Complex64> = coeffs
        .iter()
        .map(|c| Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0))
        .collect();
    let roots = BetheRoots::from_zroots(q, aberth(&cf, phase));
    let worst = roots.backward_errors.iter().cloned().fold(0.0, f64::max);
    if !(worst < BACKWARD_TOL) {
        return Err(Error::NonConvergence { worst });
    }
    Ok(roots)
}

/// `η = -i(L+1)π/(L+2)`.
pub fn eta(params: &ChainParams) -> Complex64 {
    let l = params.l() as f64;
    Complex64::new(0.0, -(l + 1.0) * PI / (l + 2.0))
}

/// `|LHS_j / RHS_j - 1|` for each root, where
/// `LHS_j = (sh(u_j + sη)/sh(u_j - sη))^M` and
/// `RHS_j = Π_{k≠j} sh(u_j - u_k + η)/sh(u_j - u_k - η)`.
pub fn bae_residuals(roots: &BetheRoots) -> Result<Vec<f64>> {
    let params = &roots.params;
    let eta = eta(params);
    let s_eta = eta * (params.l() as f64 / 2.0);
    let m = params.sites() as i32;
    let guard = |x: Complex64, index: usize| {
        if x.norm() < POLE_TOL {
            Err(Error::PoleProximity { index })
        } else {
            Ok(x)
        }
    };
    let u = &roots.uroots;
    let mut out = Vec::with_capacity(u.len());
    for (j, uj) in u.iter().enumerate() {
        let num = guard((uj + s_eta).sinh(), j)?;
        let den = guard((uj - s_eta).sinh(), j)?;
        let lhs = (num / den).powi(m);
        let mut rhs = Complex64::one();
        for (k, uk) in u.iter().enumerate() {
            if k != j {
                let d = uj - uk;
                rhs *= guard((d + eta).sinh(), j)? / guard((d - eta).sinh(), j)?;
            }
        }
        out.push((lhs / rhs - 1.0).norm());
    }
    Ok(out)
}

/// `max_j |LHS_j / RHS_j - 1|`.
pub fn bae_residual(roots: &BetheRoots) -> Result<f64> {
    Ok(bae_residuals(roots)?.into_iter().fold(0.0, f64::max))
}

/// Nodes `x_k` and exponent `ℓ` of `Σ_k x_k^ℓ / Π_{j≠k} (x_k - x_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InterpolationInstance {
    pub xs: Vec<BigRational>,
    pub ell: u32,
}

impl InterpolationInstance {
    pub fn new(xs: Vec<BigRational>, ell: u32) -> Result<Self> {
        for (i, a) in xs.iter().enumerate() {
            if xs[..i].contains(a) {
                return Err(Error::DuplicateNodes);
            }
        }
        Ok(InterpolationInstance { xs, ell })
    }

    pub fn from_integers(xs: &[i64], ell: u32) -> Result<Self> {
        Self::new(
            xs.iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect(),
            ell,
        )
    }
}

/// `Σ_k x_k^ℓ / Π_{j≠k} (x_k - x_j)`: zero for `ℓ ≤ K-2`, one for `ℓ = K-1`.
pub fn interpolation_identity(inst: &InterpolationInstance) -> Result<BigRational> {
    let xs = &inst.xs;
    let mut total = BigRational::zero();
    for (k, xk) in xs.iter().enumerate() {
        let mut den = BigRational::one();
        for (j, xj) in xs.iter().enumerate() {
            if j != k {
                let d = xk - xj;
                if d.is_zero() {
                    return Err(Error::DuplicateNodes);
                }
                den *= d;
            }
        }
        total += num_traits::pow(xk.clone(), inst.ell as usize) / den;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsolver::closed_form_q;

    fn q(l: u32, n: u32, p: u32) -> QPolynomial {
        closed_form_q(&ChainParams::new(l, n, p).unwrap())
            .unwrap()
            .1
    }

    #[test]
    fn linear_q_root() {
        let r = find_roots(&q(1, 1, 1)).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r.zroots[0] + 1.0).norm() < 1e-14);
        assert!((r.uroots[0] - Complex64::new(0.0, PI / 2.0)).norm() < 1e-14);
        assert!(bae_residual(&r).unwrap() < 1e-12);
    }

    #[test]
    fn quartic_structure() {
        let r = find_roots(&q(3, 1, 4)).unwrap();
        assert_eq!(r.len(), 4);
        assert!((r.product_modulus() - 1.0).abs() < 1e-9);
        assert!(r.reciprocal_mismatch() < 1e-8);
        assert!(bae_residual(&r).unwrap() < 1e-9);
    }

    #[test]
    fn corrupted_root_detected() {
        let qq = q(3, 1, 4);
        let r = find_roots(&qq).unwrap();
        let mut zs = r.zroots.clone();
        zs[0] *= 1.01;
        let bad = BetheRoots::from_zroots(&qq, zs);
        assert!(bae_residual(&bad).unwrap() > 1e-3);
        assert!(bad.backward_errors[0] > 1e-4);
    }

    #[test]
    fn seeded_starts_agree() {
        let qq = q(3, 2, 7);
        let base = find_roots(&qq).unwrap();
        for seed in 0..5 {
            let r = find_roots_seeded(&qq, seed).unwrap();
            for z in &r.zroots {
                let d = base
                    .zroots
                    .iter()
                    .map(|w| (w - z).norm())
                    .fold(f64::INFINITY, f64::min);
                assert!(d < 1e-9);
            }
        }
    }

    #[test]
    fn branch_strip() {
        let u = u_of_z(Complex64::new(-2.0, -1e-70));
        assert!((u.im - PI / 2.0).abs() < 1e-12);
        let r = find_roots(&q(3, 3, 10)).unwrap();
        assert!(r
            .uroots
            .iter()
            .all(|u| u.im > -PI / 2.0 && u.im <= PI / 2.0 + 1e-12));
    }

    #[test]
    fn pole_reported() {
        let qq = q(1, 1, 1);
        let mut r = find_roots(&qq).unwrap();
        // sh(u - sη) = 0 at u = sη = -iπ/3
        r.uroots[0] = Complex64::new(0.0, -PI / 3.0);
        assert_eq!(bae_residual(&r), Err(Error::PoleProximity { index: 0 }));
    }

    #[test]
    fn rebuild_round_trip() {
        let qq = q(3, 3, 10);
        let r = find_roots(&qq).unwrap();
        let exact: Vec<f64> = qq
            .coefficients()
            .iter()
            .map(|c| c.to_f64().unwrap())
            .collect();
        let norm = exact.iter().map(|c| c.abs()).fold(0.0, f64::max);
        for (a, b) in r.rebuild().iter().zip(&exact) {
            assert!((a - b).norm() / norm < 1e-8);
        }
    }

    #[test]
    fn interpolation_examples() {
        let z = |xs: &[i64], l| {
            interpolation_identity(&InterpolationInstance::from_integers(xs, l).unwrap()).unwrap()
        };
        assert!(z(&[1, 2], 0).is_zero());
        assert!(z(&[1, 2, 3], 1).is_zero());
        assert!(z(&[1, 2], 1).is_one());
        assert_eq!(
            InterpolationInstance::from_integers(&[1, 1], 0),
            Err(Error::DuplicateNodes)
        );
    }

    #[test]
    fn csv_header_and_rows() {
        let csv = find_roots(&q(3, 1, 4)).unwrap().to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("re,im,backward_error,bae_residual"));
        assert_eq!(lines.count(), 4);
    }
}
