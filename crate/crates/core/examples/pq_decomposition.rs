//! Splits the wrong-side P as F·Q + C via partial fractions.

use qop::functional::{pq_decompose, wrong_side_p};
use qop::qsolver::{closed_form_q, ChainParams};

fn main() {
    for n in 1..=3 {
        let params = ChainParams::half_sector(3, n).unwrap();
        let q = closed_form_q(&params).unwrap().1;
        let pair = wrong_side_p(&q).unwrap();
        let d = pq_decompose(&pair).unwrap();
        println!("{params} (m = {})", params.m());
        println!("  F = {}", d.f);
        println!("  C = {}", d.c);
        println!("  deg R = {:?}, deg C = {:?}", d.r.degree(), d.c.degree());
    }
}
