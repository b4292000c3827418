//! Builds the wrong-side P, the quantum Wronskians t_s, and sweeps the
//! three-term hierarchy and the fusion relations.

use std::time::Instant;

use qop::cli::SPIN_GRID;
use qop::functional::{
    fusion_check, plucker_sweep, verify_fundamental, wrong_side_p, WronskianFamily,
};
use qop::qsolver::{closed_form_q, ChainParams};

fn main() {
    let params = ChainParams::new(3, 2, 7).unwrap();
    let q = closed_form_q(&params).unwrap().1;
    let pair = wrong_side_p(&q).unwrap();
    println!("Q = {}", pair.q);
    println!("P = {}", pair.p);
    for c in verify_fundamental(&pair).unwrap() {
        println!("  {:<28} zero", c.name);
    }

    let family = WronskianFamily::new(pair, 6).unwrap();
    println!("w-shift {} ; t_s degrees:", family.tilde.shift);
    for (s, t) in family.stored() {
        println!("  t[{s}] degree {:?}", t.degree());
    }
    for c in family.structure_checks().unwrap() {
        println!(
            "  {:<28} {}",
            c.name,
            if c.holds() { "zero" } else { "NONZERO" }
        );
    }

    let start = Instant::now();
    let sweep = plucker_sweep(&family, &SPIN_GRID);
    let bad = sweep.iter().filter(|(_, r)| !r.is_zero()).count();
    println!(
        "hierarchy: {} triples, {bad} nonzero, {:.2?}",
        sweep.len(),
        start.elapsed()
    );
    for s in SPIN_GRID {
        println!("fusion s = {s}: {}", fusion_check(&family, s).is_zero());
    }
}
