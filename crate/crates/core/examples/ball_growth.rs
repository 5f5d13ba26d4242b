//! Layer-by-layer growth of balls in the order-8 triangular tiling.

use std::time::Instant;

use dca::hyperbolic::build_ball;

fn main() {
    let r: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let start = Instant::now();
    let ball = build_ball(r);
    println!("D_{r}: {} vertices, {} triangles ({:?})", ball.num_vertices(), ball.triangles.len(), start.elapsed());
    println!("k  |layer_k|  ratio");
    for k in 1..=r {
        let n = ball.boundary_size(k);
        let ratio = if k > 1 { n as f64 / ball.boundary_size(k - 1) as f64 } else { f64::NAN };
        println!("{k}  {n:8}  {ratio:.4}");
    }
    println!("limit ratio 2+sqrt(3) = {:.4}", 2.0 + 3f64.sqrt());
    for k in 1..=r.min(2) {
        println!("word of layer {k}: {}", ball.boundary_word(k).unwrap());
    }
}
