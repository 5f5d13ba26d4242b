//! Exact certificate that the substitution grows at rate 2 + sqrt(3).

use dca::dynamics::perron_certificate;

fn main() {
    let c = perron_certificate();
    println!("alphabet {:?}", c.alphabet);
    for (row, sym) in c.matrix.iter().zip(&c.alphabet) {
        println!("  {sym:>3} {row:?}");
    }
    println!("characteristic polynomial {:?}", c.characteristic_polynomial);
    println!("  = {:?} * {:?}, remainder zero: {}", c.quadratic_factor, c.cofactor, c.remainder_is_zero);
    println!("quotient {:?}: trace {}, det {}", c.quotient, c.quotient_trace, c.quotient_determinant);
    println!("primitive power {:?}", c.primitive_power);
    println!("spectral radius {} ~ {:.12}  ({})", c.eigenvalue, c.eigenvalue_f64, if c.pass { "certified" } else { "FAILED" });
}
