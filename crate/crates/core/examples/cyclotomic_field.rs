//! Exact arithmetic in Q(ζ_n) for the root of unity q = exp(iπ/(L+2)).

use qop::field::cyclotomic_polynomial;
use qop::CycloField;

fn main() {
    let field = CycloField::for_spin(3);
    println!("order {} degree {}", field.order(), field.degree());
    println!("Φ_10 coefficients: {:?}", cyclotomic_polynomial(10));

    let q = field.q_power(1);
    let tau = field.ch_coeff(2);
    println!("q = {q}");
    println!("q^2 + q^-2 = {tau}  ~ {}", tau.to_complex());
    println!(
        "2cos(2π/5) = {}",
        2.0 * (2.0 * std::f64::consts::PI / 5.0).cos()
    );

    let x = &field.integer(3) + &field.q_power(3);
    let inv = x.inverse().unwrap();
    println!("(3 + q^3)^-1 = {inv}");
    println!("check: {}", &x * &inv);
    println!("json: {}", serde_json::to_string(&inv).unwrap());
}
