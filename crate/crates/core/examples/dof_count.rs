//! Equation counts, exact rank and boundary data needed on hyperbolic balls.

use dca::hyperbolic::build_ball;
use dca::hyperbolic::counting::{dof_rank_check, equation_count};

fn main() {
    let max: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    println!("r  N_r  Eq_r  N-Eq  |dD_r|/2+1  rank-nullity");
    for r in 1..=max {
        let ball = build_ball(r);
        let c = equation_count(&ball).expect("ball has a boundary");
        let rank = dof_rank_check(&ball, max).expect("within cap");
        println!(
            "{r}  {:4}  {:4}  {:4}  {:10}  {:12}  {}",
            c.vertices,
            c.equations,
            c.dof,
            c.dof_formula,
            rank.nullity,
            if c.pass && rank.pass { "ok" } else { "MISMATCH" }
        );
    }
}
