//! Fourier Green function of Q^b and the decay of (Q^w)^k G.
//! Pass a path to write the table as `m,n,value` CSV.

use dca::euclid::green::{decay_slope, green_table, rational_analog, QuadratureSpec};
use dca::export::write_lattice_f64;

fn main() {
    let spec = QuadratureSpec::default();
    let table = green_table(140, &spec).unwrap();
    println!("levels {:?}, error estimate {:.2e}", table.levels, table.error_estimate.unwrap());
    for p in [(0, 0), (1, 0), (1, 1), (-1, -1), (2, -1), (5, 5), (20, 0)] {
        println!("G{p:?} = {:+.10}", table.values.values[&p]);
    }
    for k in 0..=2 {
        let f = rational_analog(&table.values, k).unwrap();
        let fit = decay_slope(&f, 10.0, 100.0, 18).unwrap();
        println!("(Q^w)^{k} G decays with slope {:.4} (expected {})", fit.slope, -(k as i64 + 1));
    }
    if let Some(path) = std::env::args().nth(1) {
        write_lattice_f64(std::fs::File::create(&path).unwrap(), &table.values).unwrap();
        println!("wrote {path}");
    }
}
