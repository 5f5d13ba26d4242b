//! Discrete Cauchy formula with the integer Pascal kernel and with the
//! Fourier Green function.

use dca::euclid::cauchy::{cauchy_reconstruct, pascal_kernel};
use dca::euclid::green::{green_table, QuadratureSpec};
use dca::euclid::hex_points;
use dca::euclid::polynomials::PolElement;
use dca::scalar::{format_q, q, q_to_f64};

fn main() {
    let g = pascal_kernel(6);
    println!("Pascal kernel, rows n = 6..-1, columns m = -6..6:");
    for n in (-1..=6).rev() {
        let row: Vec<String> = (-6..=6).map(|m| format!("{:>3}", format_q(&g.values[&(m, n)]))).collect();
        println!("  {}", row.join(""));
    }

    let psi_poly = PolElement::new(2, (-1, 0), [1, -3, 2, 0, 4, -1].map(q).to_vec());
    for radius in [2, 4, 6] {
        let domain = hex_points(radius);
        let psi = psi_poly.eval_points(domain.iter().copied());
        let exact = cauchy_reconstruct(&domain, &psi, &pascal_kernel(2 * radius + 2)).unwrap();
        let fourier = green_table(2 * radius + 2, &QuadratureSpec::default()).unwrap();
        let approx = cauchy_reconstruct(&domain, &psi.map(q_to_f64), &fourier.values).unwrap();
        println!(
            "radius {radius}: {} points, {} strip triangles; Pascal exact: {}, Fourier max error {:.1e}",
            exact.points, exact.strip_triangles, exact.exact, approx.max_error
        );
    }
}
