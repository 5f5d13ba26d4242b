//! Zero sets of d-holomorphic functions on a hyperbolic ball and the
//! right-convex walks around them.

use dca::hyperbolic::build_ball;
use dca::hyperbolic::counting::ball_kernel;
use dca::hyperbolic::zeros::{random_with_zeros, zero_set_components};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let ball = build_ball(3);
    let kernel = ball_kernel(&ball).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (centre, arc) in [(0, 2), (3, 4), (12, 1)] {
        let mut patch = vec![centre];
        patch.extend(ball.rotation(centre).iter().take(arc));
        let f = random_with_zeros(&kernel, &patch, &mut rng, 4).unwrap();
        let rep = zero_set_components(&ball, &f).unwrap();
        println!(
            "zeros forced at {patch:?}: {} zeros, {} boundary vertices in {} components",
            rep.zeros, rep.boundary_set, rep.components
        );
        for w in rep.walks.iter().filter(|w| w.closed) {
            println!("  closed walk of {} vertices, right counts {:?}", w.vertices.len(), w.right_counts);
        }
        println!("  all walks right-convex: {}", rep.all_right_convex);
    }
}
