//! The divided-difference identity Σ_k x_k^l / Π_{j≠k}(x_k - x_j).

use num_rational::BigRational;
use qop::bethe::{interpolation_identity, InterpolationInstance};

fn main() {
    let xs: Vec<BigRational> = [(1, 2), (-3, 1), (5, 7), (2, 1), (11, 3)]
        .iter()
        .map(|&(a, b)| BigRational::new(a.into(), b.into()))
        .collect();
    let k = xs.len() as u32;
    for ell in 0..=k {
        let inst = InterpolationInstance::new(xs.clone(), ell).unwrap();
        println!(
            "K = {k}, l = {ell}: {}",
            interpolation_identity(&inst).unwrap()
        );
    }
    let dup = InterpolationInstance::from_integers(&[1, 2, 1], 0);
    println!("duplicate nodes: {dup:?}");
}
