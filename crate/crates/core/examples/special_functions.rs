//! Special d-holomorphic functions on a hyperbolic ball under both extension
//! policies, with their growth profiles.

use dca::hyperbolic::build_ball;
use dca::hyperbolic::special::{default_direction, psi_function, z_default, ExtensionPolicy};

fn main() {
    let ball = build_ball(4);
    let (x, l) = default_direction(&ball).unwrap();
    for policy in [ExtensionPolicy::LeastNorm, ExtensionPolicy::Sparse] {
        let psi = psi_function(&ball, x, l, policy).unwrap();
        println!(
            "{} [{policy:?}]: path of {} vertices, {} forced zeros, profile {:?}",
            psi.kind,
            psi.anchor.len(),
            psi.zero_region.len(),
            psi.profile.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>()
        );
        for r in 1..=2 {
            let z = z_default(&ball, r, policy).unwrap();
            println!(
                "{} [{policy:?}]: arc {:?}, profile {:?}",
                z.kind,
                z.anchor,
                z.profile.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>()
            );
        }
    }
}
