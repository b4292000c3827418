//! Builds the coefficient system for a sector and solves it exactly.
//!
//! Usage: cargo run --example solve_q -- [L N p]

use qop::qsolver::{build_linear_system, solve_q_linear, ChainParams};

fn main() {
    let args: Vec<u32> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("integer"))
        .collect();
    let params = match args[..] {
        [l, n, p] => ChainParams::new(l, n, p),
        _ => ChainParams::new(3, 3, 10),
    }
    .expect("valid sector");

    let system = build_linear_system(&params);
    println!(
        "{params}: {} kept rows, dropped l = {:?}",
        system.rows.len(),
        system.dropped
    );
    for row in system.half_range_rows() {
        let v: Vec<String> = row.as_vector().iter().map(|x| x.to_string()).collect();
        println!("  l = {:2}: [{}]", row.ell, v.join(", "));
    }

    let q = solve_q_linear(&system).expect("unique solution");
    println!("Q(z) = {q}");
    println!("LaTeX: {}", q.to_latex());
}
