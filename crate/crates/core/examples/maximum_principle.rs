//! Evaluations of random d-holomorphic functions stay inside the convex hull
//! of their boundary evaluations.

use dca::euclid::{hex_patch, hex_points};
use dca::ops::maximum_principle_trials;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for r in [2, 4, 6] {
        let patch = hex_patch(r + 1).unwrap();
        let domain = patch.black_within(&hex_points(r));
        let res = maximum_principle_trials(&patch.surface, &patch.coloring, &domain, 50, &mut rng, 9).unwrap();
        let first = &res.reports[0];
        println!(
            "hex {r}: kernel dim {}, {} interior / {} boundary triangles, hull of {} points; {} of {} trials failed",
            res.kernel_dimension, first.interior, first.boundary, first.hull_vertices, res.failures, res.trials
        );
    }
}
