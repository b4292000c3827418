//! Exact Gauss–Jordan elimination over the rationals.

use num_rational::BigRational;
use num_traits::Zero;

/// Why an exact solve failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveFailure {
    /// Row index (into the input) whose reduced form reads `0 = c ≠ 0`.
    Inconsistent {
        row: usize,
    },
    UnderDetermined {
        rank: usize,
    },
}

fn cost(x: &BigRational) -> u64 {
    x.numer().bits() + x.denom().bits()
}

/// Solves `A x = b` for a possibly over-determined system, demanding a
/// unique and consistent solution.
///
/// Pivots are chosen per column as the nonzero entry with the smallest
/// combined numerator/denominator bit length, which keeps coefficient growth
/// down.
pub fn solve(
    a: &[Vec<BigRational>],
    b: &[BigRational],
    unknowns: usize,
) -> Result<Vec<BigRational>, SolveFailure> {
    assert_eq!(a.len(), b.len());
    // augmented rows, tagged with their original index
    let mut rows: Vec<(usize, Vec<BigRational>)> = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (r, rhs))| {
            assert_eq!(r.len(), unknowns);
            let mut v = r.clone();
            v.push(rhs.clone());
            (i, v)
        })
        .collect();

    let mut rank = 0;
    for col in 0..unknowns {
        let pivot = (rank..rows.len())
            .filter(|&r| !rows[r].1[col].is_zero())
            .min_by_key(|&r| cost(&rows[r].1[col]));
        let Some(pivot) = pivot else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank].1[col].recip();
        for v in rows[rank].1.iter_mut().skip(col) {
            *v *= &inv;
        }
        let pivot_row = rows[rank].1.clone();
        for (r, (_, row)) in rows.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        rank += 1;
    }

    if let Some((orig, _)) = rows[rank..].iter().find(|(_, r)| !r[unknowns].is_zero()) {
        return Err(SolveFailure::Inconsistent { row: *orig });
    }
    if rank < unknowns {
        return Err(SolveFailure::UnderDetermined { rank });
    }
    Ok(rows[..unknowns]
        .iter()
        .map(|(_, r)| r[unknowns].clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn mat(v: &[&[i64]]) -> Vec<Vec<BigRational>> {
        v.iter()
            .map(|row| row.iter().map(|&x| r(x)).collect())
            .collect()
    }

    #[test]
    fn unique_solution() {
        let a = mat(&[&[2, 1], &[1, 3]]);
        let b = vec![r(3), r(5)];
        let x = solve(&a, &b, 2).unwrap();
        assert_eq!(
            x,
            vec![
                BigRational::new(4.into(), 5.into()),
                BigRational::new(7.into(), 5.into())
            ]
        );
    }

    #[test]
    fn overdetermined_consistent() {
        let a = mat(&[&[1, 0], &[0, 1], &[1, 1]]);
        let x = solve(&a, &[r(1), r(2), r(3)], 2).unwrap();
        assert_eq!(x, vec![r(1), r(2)]);
    }

    #[test]
    fn inconsistent_and_rank_deficient() {
        let a = mat(&[&[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(
            solve(&a, &[r(1), r(2), r(4)], 2),
            Err(SolveFailure::Inconsistent { row: 2 })
        );
        let a = mat(&[&[1, 1], &[2, 2]]);
        assert_eq!(
            solve(&a, &[r(1), r(2)], 2),
            Err(SolveFailure::UnderDetermined { rank: 1 })
        );
    }
}
