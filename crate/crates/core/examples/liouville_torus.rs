//! Bounded d-holomorphic functions on flat tori are covariant constants.

use dca::euclid::{square_torus, torus};
use dca::ops::liouville_check;

fn main() {
    for n in 1..=4 {
        let t = square_torus(3 * n).unwrap();
        for r in liouville_check(&t.surface, &t.coloring).unwrap() {
            println!("{0}x{0} torus: {1} ({2} vs {3})", 3 * n, r.identity, r.lhs_dim, r.rhs_dim);
        }
    }
    // a skew quotient: period vectors (6, 3) and (0, 6)
    let t = torus(6, 3, 6).unwrap();
    match liouville_check(&t.surface, &t.coloring) {
        Ok(reps) => reps.iter().for_each(|r| println!("skew torus: {} ({} vs {})", r.identity, r.lhs_dim, r.rhs_dim)),
        Err(e) => println!("skew torus: {e}"),
    }
}
