//! d-holomorphic polynomials on the Euclidean lattice: dimensions, the
//! canonical basis on T_k, and a Taylor step.

use dca::euclid::polynomials::{canonical_polynomials, in_pol, pol_dimension_stable, taylor_step, PolElement};
use dca::scalar::{format_q, q};

fn main() {
    for k in 0..=6 {
        let d = pol_dimension_stable(k).unwrap();
        println!("dim Pol_{k} = {:2} (windows {} and {})", d.dimension, d.runs[0].window, d.runs[1].window);
    }

    let k = 1;
    let ps = canonical_polynomials(k, (0, 0)).unwrap();
    for (alpha, p) in ps.iter().enumerate() {
        let f = p.eval_rect((0, 3), (0, 3));
        println!("psi_(T_1, {alpha}) on rows n = 3..0:");
        for n in (0..=3).rev() {
            let row: Vec<String> = (0..=3 - n).map(|m| format!("{:>3}", format_q(&f.values[&(m, n)]))).collect();
            println!("  {}", row.join(" "));
        }
    }
    let sum = ps[0].add(&ps[1]).add(&ps[2]).eval_rect((-5, 10), (-5, 10));
    println!("sum of the three lies in Pol_0: {}", in_pol(&sum, 0).unwrap());

    let psi = PolElement::new(3, (0, 0), [2, 0, -1, 5, 3, -2, 1, 4].map(q).to_vec()).eval_rect((-2, 10), (-2, 10));
    let step = taylor_step(&psi, 1, (0, 0)).unwrap();
    let bottom: Vec<String> = step.phi.bottom.iter().map(format_q).collect();
    println!("Taylor step of a cubic at degree 1: bottom row {bottom:?}, interpolation rank {}", step.interpolation_rank);
}
