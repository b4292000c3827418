//! Extracts the Bethe roots of a solved Q and writes them as CSV.

use qop::bethe::{bae_residual, find_roots};
use qop::qsolver::{closed_form_q, ChainParams};

fn main() {
    for (l, n, p) in [(1, 1, 1), (3, 1, 4), (3, 3, 10)] {
        let params = ChainParams::new(l, n, p).unwrap();
        let q = closed_form_q(&params).unwrap().1;
        let roots = find_roots(&q).unwrap();
        println!(
            "# {params}: |prod z| = {:.12}, max BAE residual {:.2e}",
            roots.product_modulus(),
            bae_residual(&roots).unwrap()
        );
        print!("{}", roots.to_csv().unwrap());
        for u in &roots.uroots {
            println!("#   u = {:.12} {:+.12}i", u.re, u.im);
        }
    }
}
