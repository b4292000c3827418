//! Compares the closed interpolation formula with the linear solve over a
//! range of chains.

use std::time::Instant;

use qop::qsolver::{build_linear_system, closed_form_q, solve_q_linear, ChainParams};

fn main() {
    let start = Instant::now();
    let mut count = 0;
    for l in [1, 3, 5] {
        for n in 1..=4 {
            for params in ChainParams::sectors(l, n).unwrap() {
                let (cf, closed) = closed_form_q(&params).unwrap();
                let linear = solve_q_linear(&build_linear_system(&params)).unwrap();
                assert_eq!(closed, linear, "{params}");
                count += 1;
                if n == 1 {
                    let alpha: Vec<String> = cf.plus_terms.iter().map(|x| x.to_string()).collect();
                    let beta: Vec<String> = cf.minus_terms.iter().map(|x| x.to_string()).collect();
                    println!("{params}: alpha = {alpha:?} beta = {beta:?}");
                }
            }
        }
    }
    println!("{count} sectors agree in {:.2?}", start.elapsed());
}
