//! Gauge transformations rescale covariant constants and leave kernel
//! dimensions unchanged.

use dca::complex::{covariant_constant_basis, gauge_conjugate, Connection, VertexFunction};
use dca::euclid::hex_patch;
use dca::scalar::{format_q, q, q_frac, Q};

fn main() {
    let patch = hex_patch(2).unwrap();
    let s = &patch.surface;
    let conn = Connection::<Q>::canonical(s);
    let f: VertexFunction<Q> = s.vertices().iter().map(|&v| (v, q_frac(v as i64 % 5 + 1, 2))).collect();
    let gauged = gauge_conjugate(s, &conn, &f).unwrap();
    let before = covariant_constant_basis(s, &conn).unwrap();
    let after = covariant_constant_basis(s, &gauged).unwrap();
    println!("covariant constants: {} before, {} after the gauge change", before.len(), after.len());
    // ψ / f must be covariant for the gauged connection
    for psi in &before {
        let moved: VertexFunction<Q> = psi.values.iter().map(|(v, x)| (*v, x / &f.at(*v))).collect();
        let ok = (0..s.num_simplices()).all(|t| gauged.residual(t, &moved) == q(0));
        let sample: Vec<String> = s.vertices().iter().take(5).map(|&v| format_q(&moved.at(v))).collect();
        println!("  psi / f covariant: {ok}; first values {sample:?}");
    }
}
