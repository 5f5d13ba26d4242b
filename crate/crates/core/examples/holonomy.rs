//! Holonomy of the canonical connection around a vertex: trivial for even
//! stars, a transposition for odd ones.

use dca::complex::{build_surface, find_bw_coloring, permutation_parity, vertex_curvature, Connection};
use dca::scalar::Q;

fn cone(s: usize) -> Vec<Vec<usize>> {
    (0..s).map(|i| vec![0, 1 + i, 1 + (i + 1) % s]).collect()
}

fn main() {
    for s in 3..=8 {
        let surface = build_surface(&cone(s)).unwrap();
        let conn = Connection::<Q>::canonical(&surface);
        let h = &vertex_curvature(&surface, &conn, 0).unwrap()[0];
        let parity = h.permutation.as_ref().map(|p| permutation_parity(p));
        let colorable = find_bw_coloring(&surface).is_ok();
        println!(
            "star of {s}: holonomy {}, permutation {:?} (parity {parity:?}), black/white colorable: {colorable}",
            if h.is_identity() { "identity" } else { "non-trivial" },
            h.permutation
        );
    }
}
