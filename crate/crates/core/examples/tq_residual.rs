//! Plugs Q back into the TQ equation, then shows a perturbed Q failing.

use num_rational::BigRational;
use qop::qsolver::{closed_form_q, tq_residual, transfer_eigenvalue, verify_tq, ChainParams};
use qop::FieldPoly;

fn main() {
    let params = ChainParams::half_sector(3, 2).unwrap();
    let q = closed_form_q(&params).unwrap().1;
    println!("{params}: tau = {}", transfer_eigenvalue(&params));
    println!("Q(z) = {q}");
    println!("residual is zero: {}", verify_tq(&q).is_zero());

    let field = params.field();
    let bump = FieldPoly::monomial(
        field.rational(BigRational::new(1.into(), 1000.into())),
        3,
        q.poly().var(),
    );
    let r = tq_residual(&params, &(q.poly() + &bump));
    println!("perturbed residual degree: {:?}", r.degree());
}
