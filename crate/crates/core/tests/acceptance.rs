//! Ten end-to-end criteria, one PASS/FAIL line each. Exits nonzero if any
//! criterion fails.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use qop::bethe::{bae_residual, find_roots, interpolation_identity, InterpolationInstance};
use qop::cli::SPIN_GRID;
use qop::functional::{plucker_sweep, pq_decompose, w_field, wrong_side_p, WronskianFamily};
use qop::qsolver::{
    build_linear_system, closed_form_q, solve_q_linear, transfer_eigenvalue, verify_tq,
    ChainParams, QPolynomial,
};
use qop::{FieldPoly, HalfInt, VarKind};

type Outcome = Result<String, String>;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sweep_params() -> Vec<ChainParams> {
    let mut out = Vec::new();
    for l in [1, 3, 5] {
        for n in 1..=4 {
            out.extend(ChainParams::sectors(l, n).unwrap());
        }
    }
    out
}

fn linear(params: &ChainParams) -> Result<QPolynomial, String> {
    solve_q_linear(&build_linear_system(params)).map_err(|e| format!("{params}: {e}"))
}

fn reference_polynomial() -> Outcome {
    let params = ChainParams::new(3, 3, 10).unwrap();
    let start = Instant::now();
    let q = linear(&params)?;
    let elapsed = start.elapsed();
    let half = [
        rat(1, 1),
        rat(7, 1),
        rat(609, 26),
        rat(1351, 26),
        rat(1064, 13),
        rat(1229, 13),
    ];
    let expected: Vec<BigRational> = half.iter().chain(half[..5].iter().rev()).cloned().collect();
    let got = q.coefficients();
    ensure(got == expected, || format!("coefficients {got:?}"))?;
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("exact match in {elapsed:.2?}"))
}

// Parses "35+21e_1+7e_2+e_3=0" into [35, 21, 7, 1, 0, ...].
fn parse_row(eq: &str, unknowns: usize) -> Vec<BigInt> {
    let lhs = eq.trim().trim_end_matches("=0").replace(' ', "");
    let mut v = vec![BigInt::zero(); unknowns + 1];
    for term in lhs.split('+') {
        match term.split_once("e_") {
            Some((c, idx)) => {
                let idx: usize = idx
                    .trim_matches(|ch| ch == '{' || ch == '}')
                    .parse()
                    .unwrap();
                v[idx] = if c.is_empty() {
                    BigInt::one()
                } else {
                    c.parse().unwrap()
                };
            }
            None => v[0] = term.parse().unwrap(),
        }
    }
    v
}

fn system_regression() -> Outcome {
    const REFERENCE_ROWS: [&str; 10] = [
        "7+e_1=0",
        "35+21e_1+7e_2+e_3=0",
        "35+35e_1+21e_2+7e_3+e_4=0",
        "7+21e_1+35e_2+35e_3+21e_4+7e_5+e_6=0",
        "e_1+7e_2+21e_3+35e_4+35e_5+21e_6+7e_7+e_8=0",
        "e_2+7e_3+21e_4+35e_5+35e_6+21e_7+7e_8+e_9=0",
        "e_4+7e_5+21e_6+35e_7+35e_8+21e_9+7e_{10}=0",
        "e_6+7e_7+21e_8+35e_9+35e_{10}=0",
        "e_7+7e_8+21e_9+35e_{10}=0",
        "e_9+7 e_{10}=0",
    ];
    let params = ChainParams::new(3, 3, 10).unwrap();
    let system = build_linear_system(&params);
    let rows: Vec<Vec<BigInt>> = system.half_range_rows().map(|r| r.as_vector()).collect();
    let reference: Vec<Vec<BigInt>> = REFERENCE_ROWS.iter().map(|e| parse_row(e, 10)).collect();
    ensure(rows == reference, || {
        format!("generated rows differ: {rows:?}")
    })?;
    Ok("10 rows identical".into())
}

fn cross_method() -> Outcome {
    let start = Instant::now();
    let all = sweep_params();
    for params in &all {
        let closed = closed_form_q(params)
            .map_err(|e| format!("{params}: {e}"))?
            .1;
        ensure(closed == linear(params)?, || {
            format!("{params}: methods differ")
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("{} sectors equal in {elapsed:.2?}", all.len()))
}

// τ(z-1)^M Q(z) - q^a (zq^{-2}-1)^M Q(zq^{-2}) - q^{-a} (zq^2-1)^M Q(zq^2), built term by term.
fn tq_oracle(params: &ChainParams, q: &FieldPoly) -> FieldPoly {
    let field = params.field();
    let m = params.sites();
    let a = (params.l() as i64 + 1) * params.m() / 2;
    let tau = &field.q_power(a) + &field.q_power(-a);
    let factor = |k| FieldPoly::shifted_unit_power(&field, VarKind::Z, k, m);
    let centre = (&factor(0) * q).scale(&tau);
    let down = (&factor(-2) * &q.scale_arg(-2)).scale(&field.q_power(a));
    let up = (&factor(2) * &q.scale_arg(2)).scale(&field.q_power(-a));
    &(&centre - &down) - &up
}

fn tq_residual_zero() -> Outcome {
    let all = sweep_params();
    for params in &all {
        let q = linear(params)?;
        ensure(verify_tq(&q).is_zero(), || {
            format!("{params}: verify_tq nonzero")
        })?;
        ensure(tq_oracle(params, q.poly()).is_zero(), || {
            format!("{params}: oracle residual nonzero")
        })?;
    }
    Ok(format!("{} sectors", all.len()))
}

fn structural() -> Outcome {
    let all = sweep_params();
    let minus_one = rat(-1, 1);
    for params in &all {
        let q = linear(params)?;
        let p = params.p() as usize;
        ensure(q.evaluate_rational(&BigRational::zero()).is_one(), || {
            format!("{params}: Q(0) != 1")
        })?;
        let vanishes = q.evaluate_rational(&minus_one).is_zero();
        let both_odd = params.l() % 2 == 1 && p % 2 == 1;
        ensure(vanishes == both_odd, || {
            format!("{params}: Q(-1) = 0 is {vanishes}")
        })?;
        let e = q.elementary();
        let sign = if p % 2 == 0 {
            rat(1, 1)
        } else {
            minus_one.clone()
        };
        ensure((0..=p).all(|j| e[p - j] == &sign * &e[j]), || {
            format!("{params}: not palindromic")
        })?;
    }
    Ok(format!("{} sectors", all.len()))
}

fn interpolation() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: 200,
        failure_persistence: None,
        ..Config::default()
    });
    let nodes = prop::collection::btree_set((-60i64..60, 1i64..12), 2..=8)
        .prop_map(|s| {
            let set: std::collections::BTreeSet<BigRational> =
                s.into_iter().map(|(a, b)| rat(a, b)).collect();
            set.into_iter().collect::<Vec<_>>()
        })
        .prop_filter("two or more distinct nodes", |xs| xs.len() >= 2);
    let instances = std::cell::Cell::new(0usize);
    runner
        .run(&nodes, |xs| {
            let k = xs.len() as u32;
            for ell in 0..k {
                let v =
                    interpolation_identity(&InterpolationInstance::new(xs.clone(), ell).unwrap())
                        .unwrap();
                let want = if ell == k - 1 {
                    BigRational::one()
                } else {
                    BigRational::zero()
                };
                prop_assert_eq!(v, want, "K = {} l = {}", k, ell);
            }
            instances.set(instances.get() + 1);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("{} instances", instances.get()))
}

fn bethe_residual() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for l in [1, 3] {
        for n in 1..=3 {
            for params in ChainParams::sectors(l, n).unwrap() {
                let q = linear(&params)?;
                let roots = find_roots(&q).map_err(|e| format!("{params}: {e}"))?;
                let r = bae_residual(&roots).map_err(|e| format!("{params}: {e}"))?;
                ensure(r < 1e-9, || format!("{params}: residual {r:e}"))?;
                worst = worst.max(r);
                count += 1;
            }
        }
    }
    Ok(format!("{count} sectors, worst {worst:.1e}"))
}

// C w^{L+1+2d} Π_j (w^2 ξ^{2k_j} - 1)^M with the product built directly in w.
fn closed_product(
    fam: &WronskianFamily,
    constant_exp: i64,
    with_unit: bool,
    exps: &[i64],
) -> FieldPoly {
    let wf = fam.w_field();
    let m = fam.params().sites();
    let deg = fam.params().l() as usize + 1 + 2 * fam.tilde.shift;
    let mut acc = FieldPoly::monomial(
        &wf.q_power(-constant_exp) - &wf.q_power(constant_exp),
        deg,
        VarKind::W,
    );
    let sq = |k: i64| {
        let mut c = vec![wf.zero(); 3];
        c[0] = wf.integer(-1);
        c[2] = wf.q_power(k);
        FieldPoly::from_coeffs(wf.clone(), VarKind::W, c).pow(m)
    };
    if with_unit {
        acc = &acc * &sq(0);
    }
    for &k in exps {
        acc = &acc * &sq(k);
    }
    acc
}

fn hierarchy() -> Outcome {
    let mut families = 0;
    let mut triples = 0;
    for l in [3u32, 5] {
        for n in [1u32, 2] {
            for params in ChainParams::sectors(l, n).unwrap() {
                let q = linear(&params)?;
                let pair = wrong_side_p(&q).map_err(|e| format!("{params}: {e}"))?;
                let a2 = (l as i64 + 1) * params.m(); // 2a in ξ-units
                let fam = WronskianFamily::new(pair, 6).map_err(|e| format!("{params}: {e}"))?;
                ensure(fam.t(HalfInt::MINUS_HALF).is_zero(), || {
                    format!("{params}: t(-1/2) != 0")
                })?;
                let li = l as i64;
                let t0 = closed_product(
                    &fam,
                    a2,
                    false,
                    &(1..=li).map(|j| 2 * (2 * j + 1)).collect::<Vec<_>>(),
                );
                ensure(fam.t(HalfInt::ZERO) == t0, || {
                    format!("{params}: t_0 closed form")
                })?;
                let th = closed_product(
                    &fam,
                    2 * a2,
                    true,
                    &(2..=li).map(|j| 4 * j).collect::<Vec<_>>(),
                );
                ensure(fam.t(HalfInt::HALF) == th, || {
                    format!("{params}: t_1/2 closed form")
                })?;
                for ((s1, s2, s3), r) in plucker_sweep(&fam, &SPIN_GRID) {
                    ensure(r.is_zero(), || {
                        format!("{params}: hierarchy ({s1},{s2},{s3}) nonzero")
                    })?;
                    triples += 1;
                }
                families += 1;
            }
        }
    }
    Ok(format!("{families} families, {triples} triples"))
}

fn decomposition() -> Outcome {
    for n in 1..=3 {
        let params = ChainParams::half_sector(3, n).unwrap();
        let q = linear(&params)?;
        let pair = wrong_side_p(&q).map_err(|e| format!("{params}: {e}"))?;
        let d = pq_decompose(&pair).map_err(|e| format!("{params}: {e}"))?;
        let residual = &(pair.p.poly() - &(&d.f * q.poly())) - &d.c;
        ensure(residual.is_zero(), || {
            format!("{params}: P - FQ - C nonzero")
        })?;
        let m = params.m();
        ensure(d.r.degree() == Some(m as usize), || {
            format!("{params}: deg R = {:?}", d.r.degree())
        })?;
    }
    Ok("L=3, N=1..3".into())
}

fn embedding() -> Outcome {
    let target = 2.0 * (2.0 * std::f64::consts::PI / 5.0).cos();
    let mut worst = 0.0f64;
    for n in 1..=4 {
        let params = ChainParams::half_sector(3, n).unwrap();
        let z = transfer_eigenvalue(&params).to_complex();
        worst = worst.max((z.re - target).abs()).max(z.im.abs());
    }
    // the same number inside the order-20 field
    let lifted = transfer_eigenvalue(&ChainParams::half_sector(3, 1).unwrap())
        .lift(&w_field(&ChainParams::half_sector(3, 1).unwrap()))
        .unwrap()
        .to_complex();
    worst = worst.max((lifted.re - target).abs());
    ensure(worst < 1e-12, || format!("deviation {worst:e}"))?;
    Ok(format!("deviation {worst:.1e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 reference polynomial L=3 N=3 p=10", reference_polynomial),
        ("2 reference system rows L=3 N=3", system_regression),
        ("3 closed form equals linear solve", cross_method),
        ("4 TQ residual vanishes", tq_residual_zero),
        ("5 structural properties", structural),
        ("6 interpolation identity", interpolation),
        ("7 Bethe equations at extracted roots", bethe_residual),
        ("8 Wronskian hierarchy", hierarchy),
        ("9 P = F Q + C decomposition", decomposition),
        ("10 numeric embedding of the eigenvalue", embedding),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        match f() {
            Ok(detail) => println!("PASS  {name}: {detail} [{:.2?}]", start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
